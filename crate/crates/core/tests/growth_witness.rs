use qplex::geometry::is_germ;
use qplex::germlab::grow_sorted_qplex;
use qplex::rep::{prob_to_operator, DimensionParams};
use qplex::sic::{sic_from_fiducial, SicFiducial};
use qplex::tol::TAU_PSD;

fn min_eigenvalue_of_growth(d: usize, fid: SicFiducial, candidates: usize, seed: u64) -> f64 {
    let state = grow_sorted_qplex(d, candidates, seed, 1e-12).unwrap();
    assert!(is_germ(&state.accepted, &DimensionParams::new(d).unwrap(), 1e-12).pass);
    let sys = sic_from_fiducial(&fid).unwrap();
    state
        .accepted
        .points()
        .iter()
        .map(|p| prob_to_operator(p, &sys).unwrap().min_eigenvalue())
        .fold(f64::INFINITY, f64::min)
}

/// Every point of the qubit out-ball reconstructs to a PSD operator, so this
/// witness cannot exist at d = 2.
#[test]
#[ignore = "unattainable at d = 2: the qubit out-ball is the Bloch ball"]
fn qubit_growth_has_non_psd_witness() {
    let min = min_eigenvalue_of_growth(2, SicFiducial::qubit_tetrahedral(), 10_000, 1);
    assert!(min < -TAU_PSD, "min eigenvalue {min:e}");
}

#[test]
fn qutrit_growth_has_non_psd_witness() {
    let min = min_eigenvalue_of_growth(3, SicFiducial::qutrit_exact(), 2_000, 1);
    assert!(min < -1e-3, "min eigenvalue {min:e}");
}
