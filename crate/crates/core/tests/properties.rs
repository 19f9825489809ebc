use std::sync::OnceLock;

use proptest::prelude::*;

use qplex::geometry::{
    find_mmd_sets, is_germ, make_geometry, polar_point, vector_bounds, PointSet,
};
use qplex::germlab::{
    generalized_params, grow_sorted_qplex, sample_constraint_variety, spectra_lemma_check,
    theta_family,
};
use qplex::linalg::{
    eigen_decomposition, haar_unitary, hs_inner, max_abs_diff, random_density_from,
    random_pure_vector, rng, unitarity_defect, CMatrix, DensityOperator, HermitianOperator, C64,
};
use qplex::rep::{
    dot, evolve, povm_to_measurement, prob_to_operator, reference_rules, state_to_prob,
    urgleichung, validate_state_vector, DimensionParams, MeasurementMatrix, ProbVector,
    ReferenceRule, UrgleichungParams,
};
use qplex::sic::{
    build_quasi_sic, find_sic_fiducial, sic_defect, sic_from_fiducial, triple_products, verify_sic,
    SicFiducial, SicSystem, TripleProducts,
};
use qplex::symmetry::{
    stretch, stretched_from_antiunitary, stretched_from_unitary, unstretch, verify_stretched,
};

fn sic(d: usize) -> &'static (SicSystem, TripleProducts) {
    static CACHE: [OnceLock<(SicSystem, TripleProducts)>; 3] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    CACHE[d - 2].get_or_init(|| {
        let fid = match d {
            2 => SicFiducial::qubit_tetrahedral(),
            3 => SicFiducial::qutrit_exact(),
            _ => find_sic_fiducial(d, 1, 1e-20, 50).unwrap(),
        };
        let sys = sic_from_fiducial(&fid).unwrap();
        let t = triple_products(&sys);
        (sys, t)
    })
}

fn dims() -> impl Strategy<Value = usize> {
    2usize..=4
}

fn random_hermitian(d: usize, seed: u64) -> HermitianOperator {
    let mut g = rng(seed, 7);
    let m = qplex::linalg::ginibre(d, d, &mut g);
    HermitianOperator::new((&m + m.adjoint()) * C64::new(0.5, 0.0)).unwrap()
}

fn projective_measurement(d: usize, seed: u64, sys: &SicSystem) -> MeasurementMatrix {
    let u = haar_unitary(d, seed).unwrap();
    let effects: Vec<_> = (0..d)
        .map(|k| HermitianOperator::outer(&u.matrix().column(k).into_owned()))
        .collect();
    povm_to_measurement(&effects, sys).unwrap()
}

struct Classical(usize);

impl UrgleichungParams for Classical {
    fn outcome_count(&self) -> usize {
        self.0
    }
    fn alpha(&self) -> f64 {
        1.0
    }
    fn beta(&self) -> f64 {
        0.0
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigen_reconstruction(d in 1usize..=8, seed in any::<u64>()) {
        let h = random_hermitian(d, seed);
        let e = eigen_decomposition(&h);
        prop_assert!(max_abs_diff(&e.reconstruct(), h.matrix()) < 1e-10);
    }

    #[test]
    fn hs_inner_symmetric_and_bilinear(d in 1usize..=6, seed in any::<u64>(), s in -3.0f64..3.0) {
        let a = random_hermitian(d, seed);
        let b = random_hermitian(d, seed ^ 1);
        let c = random_hermitian(d, seed ^ 2);
        prop_assert!((hs_inner(&a, &b).unwrap() - hs_inner(&b, &a).unwrap()).abs() < 1e-12);
        let combo = HermitianOperator::combination(&[1.0, s], &[a.clone(), b.clone()]).unwrap();
        let lhs = hs_inner(&combo, &c).unwrap();
        let rhs = hs_inner(&a, &c).unwrap() + s * hs_inner(&b, &c).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()));
    }

    #[test]
    fn haar_products_are_unitary(d in 1usize..=8, seed in any::<u64>()) {
        let u = haar_unitary(d, seed).unwrap();
        let v = haar_unitary(d, seed.wrapping_add(1)).unwrap();
        prop_assert!(unitarity_defect(u.compose(&v).matrix()) < 1e-12);
    }

    #[test]
    fn sic_defect_phase_invariant(d in 2usize..=5, seed in any::<u64>(), phase in 0.0f64..std::f64::consts::TAU) {
        let psi = random_pure_vector(d, &mut rng(seed, 0));
        let rotated = psi.map(|z| z * C64::from_polar(1.0, phase));
        let a = sic_defect(&psi).unwrap();
        let b = sic_defect(&rotated).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a));
    }

    #[test]
    fn cubic_form_on_pure_states(d in dims(), seed in any::<u64>()) {
        let (sys, t) = sic(d);
        let rho = random_density_from(d, 1, &mut rng(seed, 0)).unwrap();
        let p = state_to_prob(&rho, sys).unwrap();
        let df = d as f64;
        prop_assert!((t.cubic_form(&p) - (df + 7.0) / (df + 1.0).powi(3)).abs() < 1e-8);
    }

    #[test]
    fn round_trip(d in dims(), rank in 1usize..=4, seed in any::<u64>()) {
        let (sys, _) = sic(d);
        let rho = random_density_from(d, rank.min(d), &mut rng(seed, 0)).unwrap();
        let back = prob_to_operator(&state_to_prob(&rho, sys).unwrap(), sys).unwrap();
        prop_assert!(max_abs_diff(back.matrix(), rho.matrix()) < 1e-10);
    }

    #[test]
    fn fundamental_inequalities(d in dims(), ra in 1usize..=4, rb in 1usize..=4, seed in any::<u64>()) {
        let (sys, _) = sic(d);
        let params = DimensionParams::new(d).unwrap();
        let mut g = rng(seed, 0);
        let a = state_to_prob(&random_density_from(d, ra.min(d), &mut g).unwrap(), sys).unwrap();
        let b = state_to_prob(&random_density_from(d, rb.min(d), &mut g).unwrap(), sys).unwrap();
        let inner = dot(&a, &b);
        prop_assert!(inner >= params.lower - 1e-12 && inner <= params.upper + 1e-12);
    }

    #[test]
    fn lower_bound_saturates_iff_orthogonal(d in dims(), seed in any::<u64>(), mix in 0.0f64..1.0) {
        let (sys, _) = sic(d);
        let params = DimensionParams::new(d).unwrap();
        let mut g = rng(seed, 0);
        let psi = random_pure_vector(d, &mut g);
        let mut phi = random_pure_vector(d, &mut g);
        // Half of the cases are made exactly orthogonal to psi.
        if mix < 0.5 {
            let ov = psi.dotc(&phi);
            phi -= &psi * ov;
            phi.unscale_mut(phi.norm());
        }
        let overlap = psi.dotc(&phi).norm_sqr();
        let p = state_to_prob(&DensityOperator::pure(&psi).unwrap(), sys).unwrap();
        let s = state_to_prob(&DensityOperator::pure(&phi).unwrap(), sys).unwrap();
        let saturated = (dot(&p, &s) - params.lower).abs() < 1e-10;
        prop_assert_eq!(saturated, overlap < 1e-10);
    }

    #[test]
    fn classical_urgleichung_is_total_probability(d in dims(), seed in any::<u64>()) {
        let (sys, _) = sic(d);
        let params = DimensionParams::new(d).unwrap();
        let p = state_to_prob(&random_density_from(d, 1, &mut rng(seed, 0)).unwrap(), sys).unwrap();
        let r = projective_measurement(d, seed ^ 5, sys);
        let a = urgleichung(&p, &r, &Classical(d * d)).unwrap();
        let b = reference_rules(&p, &r, ReferenceRule::Classical, &params).unwrap();
        prop_assert_eq!(a.q, b.q);
    }

    #[test]
    fn urgleichung_is_affine(d in dims(), seed in any::<u64>(), t in 0.0f64..1.0) {
        let (sys, _) = sic(d);
        let params = DimensionParams::new(d).unwrap();
        let mut g = rng(seed, 0);
        let p1 = state_to_prob(&random_density_from(d, 1, &mut g).unwrap(), sys).unwrap();
        let p2 = state_to_prob(&random_density_from(d, 2.min(d), &mut g).unwrap(), sys).unwrap();
        let r1 = projective_measurement(d, seed ^ 1, sys);
        let r2 = projective_measurement(d, seed ^ 2, sys);
        let pm = ProbVector::new(p1.iter().zip(p2.iter()).map(|(a, b)| t * a + (1.0 - t) * b).collect()).unwrap();
        let q1 = urgleichung(&p1, &r1, &params).unwrap().q;
        let q2 = urgleichung(&p2, &r1, &params).unwrap().q;
        let qm = urgleichung(&pm, &r1, &params).unwrap().q;
        for j in 0..d {
            prop_assert!((qm[j] - (t * q1[j] + (1.0 - t) * q2[j])).abs() < 1e-12);
        }
        let rm = MeasurementMatrix::new(
            d,
            d * d,
            r1.entries().iter().zip(r2.entries()).map(|(a, b)| t * a + (1.0 - t) * b).collect(),
        ).unwrap();
        let s1 = urgleichung(&p1, &r1, &params).unwrap().q;
        let s2 = urgleichung(&p1, &r2, &params).unwrap().q;
        let sm = urgleichung(&p1, &rm, &params).unwrap().q;
        for j in 0..d {
            prop_assert!((sm[j] - (t * s1[j] + (1.0 - t) * s2[j])).abs() < 1e-12);
        }
    }

    #[test]
    fn evolution_preserves_purity(d in dims(), seed in any::<u64>()) {
        let (sys, t) = sic(d);
        let p = state_to_prob(&random_density_from(d, 1, &mut rng(seed, 0)).unwrap(), sys).unwrap();
        let u = haar_unitary(d, seed ^ 3).unwrap();
        let q = evolve(&p, &u, sys).unwrap();
        let before = validate_state_vector(&p, sys, t).unwrap();
        let after = validate_state_vector(&q, sys, t).unwrap();
        prop_assert!(after.quadratic_residual < 1e-8 && after.cubic_residual < 1e-8);
        prop_assert!((after.quadratic_residual - before.quadratic_residual).abs() < 1e-8);
    }

    #[test]
    fn polar_point_involution(d in 2usize..=16, seed in any::<u64>()) {
        // Random point on S_o: c plus r_o times a unit vector orthogonal to 1.
        let params = DimensionParams::new(d).unwrap();
        let geom = make_geometry(params);
        let n = params.n;
        let mut g = rng(seed, 0);
        let mut v: Vec<f64> = (0..n).map(|_| rand_normal(&mut g)).collect();
        let mean = v.iter().sum::<f64>() / n as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let s: Vec<f64> = v.iter().map(|x| 1.0 / n as f64 + geom.r_o() * x / norm).collect();
        let u = polar_point(&s, &params).unwrap();
        prop_assert!((geom.dist2_from_center(&u) - geom.r_i2).abs() < 1e-12);
        let back = polar_point(&u, &params).unwrap();
        prop_assert!(back.iter().zip(&s).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn max_entry_equality_case(d in 2usize..=6, k in 0usize..36) {
        let params = DimensionParams::new(d).unwrap();
        let e = params.basis_distribution(k % params.n);
        let report = vector_bounds(&e, &params, 1e-12);
        prop_assert!(report.passed());
        prop_assert!(report.saturates);
        prop_assert!(report.rest_deviation.unwrap() < 1e-10);
    }

    #[test]
    fn quantum_mmd_sets_at_most_d(d in dims(), seed in any::<u64>(), count in 2usize..12) {
        let (sys, _) = sic(d);
        let params = DimensionParams::new(d).unwrap();
        let mut g = rng(seed, 0);
        let mut set = PointSet::new(d * d);
        let u = haar_unitary(d, seed ^ 9).unwrap();
        for k in 0..d {
            let rho = DensityOperator::pure(&u.matrix().column(k).into_owned()).unwrap();
            set.push(state_to_prob(&rho, sys).unwrap(), format!("b{k}")).unwrap();
        }
        for k in 0..count {
            let rho = random_density_from(d, 1, &mut g).unwrap();
            set.push(state_to_prob(&rho, sys).unwrap(), format!("r{k}")).unwrap();
        }
        let sets = find_mmd_sets(&set, &params, 1e-8);
        prop_assert!(sets.iter().all(|s| s.len() <= d));
        prop_assert!(sets.iter().any(|s| s.len() == d));
    }

    #[test]
    fn stretch_unstretch_inverse(d in 2usize..=4, seed in any::<u64>()) {
        let (sys, _) = sic(d);
        let params = DimensionParams::new(d).unwrap();
        // A type-preserving measurement: the SIC conjugated by a unitary.
        let u = haar_unitary(d, seed).unwrap();
        let effects: Vec<_> = sys
            .projectors()
            .iter()
            .map(|pi| pi.conjugate_by(&u).scale(1.0 / d as f64))
            .collect();
        let m = povm_to_measurement(&effects, sys).unwrap();
        let r = stretch(&m, &params).unwrap();
        let back = unstretch(&r, &params).unwrap();
        prop_assert!(back.entries().iter().zip(m.entries()).all(|(a, b)| (a - b).abs() < 1e-12));
        let again = stretch(&back, &params).unwrap();
        prop_assert!(again.to_rows().iter().zip(r.to_rows()).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn transfer_matrices_are_stochastic(d in 2usize..=3, seed in any::<u64>()) {
        let (sys, _) = sic(d);
        let params = DimensionParams::new(d).unwrap();
        let u = haar_unitary(d, seed).unwrap();
        let v = haar_unitary(d, seed ^ 1).unwrap();
        let ru = stretched_from_unitary(&u, sys).unwrap();
        let rv = stretched_from_unitary(&v, sys).unwrap();
        prop_assert!(verify_stretched(&ru, &params).passed());
        prop_assert!(verify_stretched(&stretched_from_antiunitary(&u, sys).unwrap(), &params).passed());
        let ruv = stretched_from_unitary(&u.compose(&v), sys).unwrap();
        let prod = ru.compose(&rv).unwrap();
        prop_assert!(ruv.to_rows().iter().zip(prod.to_rows()).all(|(a, b)| (a - b).abs() < 1e-9));
        let radj = stretched_from_unitary(&u.adjoint(), sys).unwrap();
        prop_assert!(radj.to_rows().iter().zip(ru.transpose().to_rows()).all(|(a, b)| (a - b).abs() < 1e-9));
    }

    #[test]
    fn theta_family_on_out_sphere(theta in 0.0f64..1.0, d in 2usize..=5) {
        let geom = make_geometry(DimensionParams::new(d).unwrap());
        let p = theta_family(&geom, theta);
        prop_assert!((geom.dist2_from_center(&p) - geom.r_o2).abs() < 1e-12);
    }

    #[test]
    fn lemma_never_positive(d in 2usize..=8, seed in any::<u64>()) {
        let mut g = rng(seed, 0);
        for _ in 0..200 {
            if let Some(profile) = sample_constraint_variety(d, &mut g) {
                prop_assert!(spectra_lemma_check(&profile, 1e-12).unwrap().holds);
            }
        }
    }
}

fn rand_normal<R: rand::Rng>(g: &mut R) -> f64 {
    g.sample(rand_distr::StandardNormal)
}

#[test]
fn quasi_sic_gram_structure() {
    for d in 2..=6 {
        let q = build_quasi_sic(d).unwrap();
        assert!(q.verify().overlap_ok());
        assert!(q.basis().max_gram_deviation() < 1e-10);
    }
}

#[test]
fn searched_sics_verify() {
    for d in 2..=4 {
        assert!(verify_sic(&sic(d).0).passed());
    }
}

#[test]
fn generalized_params_reproduce_quantum() {
    for d in 2..=16 {
        let p = DimensionParams::new(d).unwrap();
        let g = generalized_params(d * d, (d + 1) as f64).unwrap();
        assert!(g.quantum());
        for (a, b) in [
            (g.params.beta, p.beta),
            (g.params.lower, p.lower),
            (g.params.upper, p.upper),
        ] {
            assert!((a - b).abs() <= 4.0 * f64::EPSILON * b.abs(), "{a} vs {b}");
        }
        assert_eq!(g.params.m_max, d as f64);
    }
}

#[test]
fn growth_deterministic_and_prefix_closed() {
    let a = grow_sorted_qplex(2, 400, 17, 1e-12).unwrap();
    let b = grow_sorted_qplex(2, 400, 17, 1e-12).unwrap();
    assert_eq!(a.accepted.points(), b.accepted.points());
    let params = DimensionParams::new(2).unwrap();
    let n = a.accepted.len();
    for len in [1, n / 4, n / 2, n] {
        assert!(is_germ(&a.accepted.prefix(len), &params, 1e-12).pass);
    }
}

#[test]
fn hermitian_rejects_asymmetric() {
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 1)] = C64::new(1.0, 0.0);
    assert!(HermitianOperator::new(m).is_err());
}
