//! Stretched measurement matrices and the orthogonal symmetries of a qplex.
//!
//! A measurement `r(i|j)` on `N = d²` inputs and outcomes is stretched to
//!
//! ```text
//! R_ij = (d+1) r(i|j) - (1/d) Σ_k r(i|k)
//! ```
//!
//! `R_ij` multiplies source index `j` to give target index `i`, so the
//! urgleichung reads `q(i) = Σ_j R_ij p(j)`. A unitary `U` induces
//! `R_ij = ((d+1)/d) Tr(Π_i U Π_j U†) - 1/d`, and `R(UV) = R(U) R(V)`.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{QplexError, Result};
use crate::geometry::PointSet;
use crate::linalg::{rng, trace_product, HermitianOperator, UnitaryOperator};
use crate::rep::{dot, validate_state_vector, DimensionParams, MeasurementMatrix};
use crate::sic::{triple_products, OperatorFrame};
use crate::tol::TAU_SYM;

#[derive(Debug, Clone, PartialEq)]
pub struct StretchedMatrix {
    d: usize,
    matrix: DMatrix<f64>,
}

impl StretchedMatrix {
    pub fn new(d: usize, matrix: DMatrix<f64>) -> Result<Self> {
        let n = d * d;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(QplexError::DimensionMismatch {
                expected: n,
                found: if matrix.nrows() != n {
                    matrix.nrows()
                } else {
                    matrix.ncols()
                },
            });
        }
        if let Some(index) = matrix.iter().position(|x| !x.is_finite()) {
            return Err(QplexError::NonFinite { index });
        }
        Ok(StretchedMatrix { d, matrix })
    }

    /// From row-major entries.
    pub fn from_rows(d: usize, entries: &[f64]) -> Result<Self> {
        let n = d * d;
        if entries.len() != n * n {
            return Err(QplexError::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        StretchedMatrix::new(d, DMatrix::from_row_slice(n, n, entries))
    }

    pub fn identity(d: usize) -> Self {
        StretchedMatrix {
            d,
            matrix: DMatrix::identity(d * d, d * d),
        }
    }

    /// Permutation matrix sending source index `j` to target `perm[j]`.
    pub fn permutation(d: usize, perm: &[usize]) -> Result<Self> {
        let n = d * d;
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&k| k >= n || std::mem::replace(&mut seen[k], true))
        {
            return Err(QplexError::InvalidArgument(format!(
                "not a permutation of 0..{n}"
            )));
        }
        let mut m = DMatrix::zeros(n, n);
        for (j, &i) in perm.iter().enumerate() {
            m[(i, j)] = 1.0;
        }
        Ok(StretchedMatrix { d, matrix: m })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.d * self.d
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    /// Row-major entries.
    pub fn to_rows(&self) -> Vec<f64> {
        self.matrix.transpose().as_slice().to_vec()
    }

    pub fn transpose(&self) -> Self {
        StretchedMatrix {
            d: self.d,
            matrix: self.matrix.transpose(),
        }
    }

    /// `self · other` (apply `other` first).
    pub fn compose(&self, other: &StretchedMatrix) -> Result<Self> {
        if self.d != other.d {
            return Err(QplexError::DimensionMismatch {
                expected: self.d,
                found: other.d,
            });
        }
        Ok(StretchedMatrix {
            d: self.d,
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// `q(i) = Σ_j R_ij p(j)`.
    pub fn apply(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.n() {
            return Err(QplexError::DimensionMismatch {
                expected: self.n(),
                found: p.len(),
            });
        }
        Ok((0..self.n())
            .map(|i| dot(self.matrix.row(i).transpose().as_slice(), p))
            .collect())
    }
}

fn check_params(d: usize, params: &DimensionParams) -> Result<()> {
    if params.d != d {
        return Err(QplexError::DimensionMismatch {
            expected: params.d,
            found: d,
        });
    }
    Ok(())
}

pub fn stretch(r: &MeasurementMatrix, params: &DimensionParams) -> Result<StretchedMatrix> {
    let n = params.n;
    if r.outcomes() != n || r.inputs() != n {
        return Err(QplexError::DimensionMismatch {
            expected: n,
            found: if r.outcomes() != n {
                r.outcomes()
            } else {
                r.inputs()
            },
        });
    }
    let d = params.d as f64;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let row = r.row(i);
        let total: f64 = row.iter().sum();
        for j in 0..n {
            m[(i, j)] = (d + 1.0) * row[j] - total / d;
        }
    }
    Ok(StretchedMatrix {
        d: params.d,
        matrix: m,
    })
}

/// `r(i|j) = (R_ij + (1/d) Σ_k R_ik)/(d+1)`; fails with
/// [`QplexError::NotMeasurement`] if the result is not a valid measurement.
pub fn unstretch(r: &StretchedMatrix, params: &DimensionParams) -> Result<MeasurementMatrix> {
    check_params(r.d, params)?;
    let n = params.n;
    let d = params.d as f64;
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        let total: f64 = r.matrix.row(i).iter().sum();
        for j in 0..n {
            entries[i * n + j] = (r.matrix[(i, j)] + total / d) / (d + 1.0);
        }
    }
    MeasurementMatrix::new(n, n, entries)
}

/// Vertices `s_i(j) = (R_ij + 1/d)/(d+1)` read off the rows of `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSimplex {
    pub vertices: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    /// `max |R Rᵀ - I|`.
    pub orthogonality_defect: f64,
    /// `max |Rc - c|`.
    pub barycenter_defect: f64,
    pub min_entry: f64,
    /// `(i, j)` of entries below `-1/d - tol`.
    pub entry_violations: Vec<(usize, usize)>,
    pub row_sum_defect: f64,
    pub column_sum_defect: f64,
    pub simplex: MeasurementSimplex,
    /// `max_i |‖s_i - c‖² - r_o²|`.
    pub vertex_norm_defect: f64,
    /// Spread of the off-diagonal vertex inner products.
    pub regularity_defect: f64,
    /// `max_{i≠j} |<s_i,s_j> - (d+2)/(d(d+1)²)|`.
    pub vertex_overlap_defect: f64,
    pub tolerance: f64,
}

impl SymmetryReport {
    pub fn orthogonal(&self) -> bool {
        self.orthogonality_defect < self.tolerance
    }

    pub fn fixes_barycenter(&self) -> bool {
        self.barycenter_defect < self.tolerance
    }

    pub fn sums_ok(&self) -> bool {
        self.row_sum_defect < self.tolerance && self.column_sum_defect < self.tolerance
    }

    pub fn entries_ok(&self) -> bool {
        self.entry_violations.is_empty()
    }

    pub fn simplex_ok(&self) -> bool {
        self.vertex_norm_defect < self.tolerance && self.regularity_defect < self.tolerance
    }

    /// All stochastic-subgroup conditions.
    pub fn stochastic(&self) -> bool {
        self.orthogonal() && self.fixes_barycenter() && self.sums_ok() && self.entries_ok()
    }

    pub fn passed(&self) -> bool {
        self.stochastic() && self.simplex_ok()
    }
}

pub fn verify_stretched(r: &StretchedMatrix, params: &DimensionParams) -> SymmetryReport {
    verify_stretched_with(r, params, TAU_SYM)
}

pub fn verify_stretched_with(
    r: &StretchedMatrix,
    params: &DimensionParams,
    tol: f64,
) -> SymmetryReport {
    let n = r.n();
    let d = r.d as f64;
    let m = &r.matrix;
    let gram = m * m.transpose();
    let orthogonality_defect = (gram - DMatrix::<f64>::identity(n, n)).amax();
    let c = 1.0 / n as f64;
    let mut barycenter_defect = 0.0_f64;
    let mut row_sum_defect = 0.0_f64;
    let mut column_sum_defect = 0.0_f64;
    for k in 0..n {
        let row: f64 = m.row(k).sum();
        let col: f64 = m.column(k).sum();
        barycenter_defect = barycenter_defect.max((row * c - c).abs());
        row_sum_defect = row_sum_defect.max((row - 1.0).abs());
        column_sum_defect = column_sum_defect.max((col - 1.0).abs());
    }
    let mut entry_violations = Vec::new();
    let mut min_entry = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            let v = m[(i, j)];
            min_entry = min_entry.min(v);
            if v < -1.0 / d - tol {
                entry_violations.push((i, j));
            }
        }
    }
    let vertices: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| (m[(i, j)] + 1.0 / d) / (d + 1.0)).collect())
        .collect();
    let r_o2 = (n as f64 - 1.0) / (n as f64 * params.alpha * params.alpha);
    let vertex_norm_defect = vertices
        .iter()
        .map(|s| (s.iter().map(|x| (x - c).powi(2)).sum::<f64>() - r_o2).abs())
        .fold(0.0, f64::max);
    let target = (d + 2.0) / (d * (d + 1.0) * (d + 1.0));
    let (mut lo, mut hi, mut overlap) = (f64::INFINITY, f64::NEG_INFINITY, 0.0_f64);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = dot(&vertices[i], &vertices[j]);
            lo = lo.min(v);
            hi = hi.max(v);
            overlap = overlap.max((v - target).abs());
        }
    }
    SymmetryReport {
        orthogonality_defect,
        barycenter_defect,
        min_entry,
        entry_violations,
        row_sum_defect,
        column_sum_defect,
        simplex: MeasurementSimplex { vertices },
        vertex_norm_defect,
        regularity_defect: if n > 1 { hi - lo } else { 0.0 },
        vertex_overlap_defect: overlap,
        tolerance: tol,
    }
}

/// `R_ij = ((d+1)/d) Tr(Π_i W_j) - 1/d` for images `W_j` of the frame.
fn transfer_from_images<F: OperatorFrame + ?Sized>(
    frame: &F,
    images: &[HermitianOperator],
) -> StretchedMatrix {
    let ops = frame.operators();
    let n = ops.len();
    let d = frame.dim() as f64;
    let rows: Vec<Vec<f64>> = ops
        .par_iter()
        .map(|pi| {
            images
                .iter()
                .map(|w| (d + 1.0) / d * trace_product(pi.matrix(), w.matrix()).re - 1.0 / d)
                .collect()
        })
        .collect();
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    StretchedMatrix {
        d: frame.dim(),
        matrix: DMatrix::from_row_slice(n, n, &flat),
    }
}

fn check_frame<F: OperatorFrame + ?Sized>(u: &UnitaryOperator, frame: &F) -> Result<()> {
    if u.dim() != frame.dim() {
        return Err(QplexError::DimensionMismatch {
            expected: frame.dim(),
            found: u.dim(),
        });
    }
    if frame.operators().len() != frame.dim() * frame.dim() {
        return Err(QplexError::DimensionMismatch {
            expected: frame.dim() * frame.dim(),
            found: frame.operators().len(),
        });
    }
    Ok(())
}

/// Transfer matrix of the unitary symmetry `ρ ↦ U ρ U†`.
pub fn stretched_from_unitary<F: OperatorFrame + ?Sized>(
    u: &UnitaryOperator,
    frame: &F,
) -> Result<StretchedMatrix> {
    check_frame(u, frame)?;
    let images: Vec<HermitianOperator> = frame
        .operators()
        .iter()
        .map(|p| p.conjugate_by(u))
        .collect();
    Ok(transfer_from_images(frame, &images))
}

/// Transfer matrix of the anti-unitary `ρ ↦ U ρ̄ U†` (complex conjugation in
/// the computational basis, then `U`).
pub fn stretched_from_antiunitary<F: OperatorFrame + ?Sized>(
    u: &UnitaryOperator,
    frame: &F,
) -> Result<StretchedMatrix> {
    check_frame(u, frame)?;
    let images: Vec<HermitianOperator> = frame
        .operators()
        .iter()
        .map(|p| p.conj().conjugate_by(u))
        .collect();
    Ok(transfer_from_images(frame, &images))
}

/// A symmetry together with the (anti-)unitary that induced it.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    pub source: UnitaryOperator,
    pub antiunitary: bool,
    pub stretched: StretchedMatrix,
}

impl TransferMatrix {
    pub fn unitary<F: OperatorFrame + ?Sized>(u: UnitaryOperator, frame: &F) -> Result<Self> {
        let stretched = stretched_from_unitary(&u, frame)?;
        Ok(TransferMatrix {
            source: u,
            antiunitary: false,
            stretched,
        })
    }

    pub fn antiunitary<F: OperatorFrame + ?Sized>(u: UnitaryOperator, frame: &F) -> Result<Self> {
        let stretched = stretched_from_antiunitary(&u, frame)?;
        Ok(TransferMatrix {
            source: u,
            antiunitary: true,
            stretched,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageReport {
    pub total: usize,
    pub valid: usize,
    pub fraction: f64,
    /// Smallest eigenvalue over all reconstructed images.
    pub worst_min_eigenvalue: f64,
    /// Indices of sample points whose image is not a quantum state.
    pub invalid: Vec<usize>,
}

/// Applies `R` to every sample point and checks that the image is still a
/// quantum state.
pub fn image_membership<F: OperatorFrame + Sync + ?Sized>(
    r: &StretchedMatrix,
    sample: &PointSet,
    frame: &F,
) -> Result<ImageReport> {
    if r.d != frame.dim() {
        return Err(QplexError::DimensionMismatch {
            expected: frame.dim(),
            found: r.d,
        });
    }
    let triples = triple_products(frame);
    let results: Vec<(bool, f64)> = sample
        .points()
        .par_iter()
        .map(|p| -> Result<(bool, f64)> {
            let image = r.apply(p)?;
            let v = validate_state_vector(&image, frame, &triples)?;
            Ok((v.is_quantum_state, v.min_eigenvalue))
        })
        .collect::<Result<_>>()?;
    let invalid: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, (ok, _))| !ok)
        .map(|(i, _)| i)
        .collect();
    let total = results.len();
    let valid = total - invalid.len();
    Ok(ImageReport {
        total,
        valid,
        fraction: if total == 0 {
            1.0
        } else {
            valid as f64 / total as f64
        },
        worst_min_eigenvalue: results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min),
        invalid,
    })
}

/// One random word in the sampled elements.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductTrial {
    /// `(element index, transposed)` factors, leftmost first.
    pub word: Vec<(usize, bool)>,
    pub stochastic: bool,
    pub orthogonality_defect: f64,
    pub min_entry: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosureReport {
    /// Sample elements that fail the stochastic conditions on their own.
    pub flagged_elements: Vec<usize>,
    pub trials: Vec<ProductTrial>,
    pub pass: bool,
}

impl ClosureReport {
    pub fn failed_trials(&self) -> impl Iterator<Item = &ProductTrial> {
        self.trials.iter().filter(|t| !t.stochastic)
    }
}

/// Checks random products (words of length 2 to 4, factors optionally
/// transposed) of the sample against the stochastic-subgroup conditions.
/// Trial `t` draws from stream `t` of `seed`. Flagged elements are excluded
/// from the products.
pub fn group_closure_check(
    sample: &[StretchedMatrix],
    params: &DimensionParams,
    n_products: usize,
    seed: u64,
) -> Result<ClosureReport> {
    for r in sample {
        check_params(r.d, params)?;
    }
    let flagged_elements: Vec<usize> = sample
        .iter()
        .enumerate()
        .filter(|(_, r)| !verify_stretched(r, params).stochastic())
        .map(|(i, _)| i)
        .collect();
    let good: Vec<usize> = (0..sample.len())
        .filter(|i| !flagged_elements.contains(i))
        .collect();
    let trials: Vec<ProductTrial> = if good.is_empty() {
        Vec::new()
    } else {
        (0..n_products)
            .into_par_iter()
            .map(|t| {
                let mut g = rng(seed, t as u64);
                let len = g.random_range(2..=4);
                let word: Vec<(usize, bool)> = (0..len)
                    .map(|_| (good[g.random_range(0..good.len())], g.random_bool(0.5)))
                    .collect();
                let mut acc = DMatrix::<f64>::identity(params.n, params.n);
                for &(k, transposed) in &word {
                    let m = sample[k].matrix();
                    acc = if transposed {
                        acc * m.transpose()
                    } else {
                        acc * m
                    };
                }
                let report = verify_stretched(
                    &StretchedMatrix {
                        d: params.d,
                        matrix: acc,
                    },
                    params,
                );
                ProductTrial {
                    word,
                    stochastic: report.stochastic(),
                    orthogonality_defect: report.orthogonality_defect,
                    min_entry: report.min_entry,
                }
            })
            .collect()
    };
    let pass = flagged_elements.is_empty() && trials.iter().all(|t| t.stochastic);
    Ok(ClosureReport {
        flagged_elements,
        trials,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_geometry;
    use crate::linalg::{haar_unitary, haar_unitary_from, random_density_from, DensityOperator};
    use crate::rep::{evolution_matrix, evolve, state_to_prob};
    use crate::sic::{sic_from_fiducial, SicFiducial, SicSystem};

    fn params(d: usize) -> DimensionParams {
        DimensionParams::new(d).unwrap()
    }

    fn qubit() -> SicSystem {
        sic_from_fiducial(&SicFiducial::qubit_tetrahedral()).unwrap()
    }

    fn qutrit() -> SicSystem {
        sic_from_fiducial(&SicFiducial::qutrit_exact()).unwrap()
    }

    fn max_diff(a: &StretchedMatrix, b: &StretchedMatrix) -> f64 {
        (a.matrix() - b.matrix()).amax()
    }

    #[test]
    fn basis_measurement_stretches_to_identity() {
        for d in 2..=4 {
            let p = params(d);
            let r = stretch(&p.sic_measurement(), &p).unwrap();
            assert!(max_diff(&r, &StretchedMatrix::identity(d)) < 1e-14);
            let back = unstretch(&StretchedMatrix::identity(d), &p).unwrap();
            let rf = p.sic_measurement();
            let diff = back
                .entries()
                .iter()
                .zip(rf.entries())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(diff < 1e-15);
        }
    }

    #[test]
    fn trivial_evolution_stretches_to_identity() {
        let sys = qutrit();
        let p = params(3);
        let u = evolution_matrix(&UnitaryOperator::identity(3), &sys).unwrap();
        let r = stretch(&MeasurementMatrix::new(9, 9, u).unwrap(), &p).unwrap();
        assert!(max_diff(&r, &StretchedMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn stretch_unstretch_round_trip() {
        let sys = qutrit();
        let p = params(3);
        let r = stretched_from_unitary(&haar_unitary(3, 2).unwrap(), &sys).unwrap();
        let m = unstretch(&r, &p).unwrap();
        let rows: Vec<f64> = (0..9).map(|i| m.row(i).iter().sum::<f64>()).collect();
        assert!(rows.iter().all(|s| (s - 1.0).abs() < 1e-12));
        assert!(max_diff(&stretch(&m, &p).unwrap(), &r) < 1e-12);
    }

    #[test]
    fn negated_identity_is_not_a_measurement() {
        let p = params(2);
        let neg = StretchedMatrix::new(2, -DMatrix::<f64>::identity(4, 4)).unwrap();
        assert!(matches!(
            unstretch(&neg, &p),
            Err(QplexError::NotMeasurement(_))
        ));
    }

    #[test]
    fn identity_and_permutations_verify() {
        let p = params(2);
        let rep = verify_stretched(&StretchedMatrix::identity(2), &p);
        assert!(rep.passed());
        let g = make_geometry(p);
        for (s, e) in rep.simplex.vertices.iter().zip(&g.basis) {
            assert!(s.iter().zip(e.iter()).all(|(a, b)| (a - b).abs() < 1e-15));
        }
        let perm = StretchedMatrix::permutation(2, &[2, 0, 3, 1]).unwrap();
        assert!(verify_stretched(&perm, &p).stochastic());
        assert!(StretchedMatrix::permutation(2, &[0, 0, 1, 2]).is_err());
    }

    #[test]
    fn haar_transfers_are_stochastic() {
        for (d, sys) in [(2, qubit()), (3, qutrit())] {
            let p = params(d);
            let mut g = rng(21, d as u64);
            for _ in 0..20 {
                let u = haar_unitary_from(d, &mut g).unwrap();
                let rep = verify_stretched(&stretched_from_unitary(&u, &sys).unwrap(), &p);
                assert!(rep.passed(), "{rep:?}");
                assert!(rep.vertex_overlap_defect < 1e-9);
                let anti = verify_stretched(&stretched_from_antiunitary(&u, &sys).unwrap(), &p);
                assert!(anti.passed());
            }
        }
    }

    #[test]
    fn transfer_is_a_homomorphism() {
        let sys = qutrit();
        let mut g = rng(4, 0);
        for _ in 0..10 {
            let u = haar_unitary_from(3, &mut g).unwrap();
            let v = haar_unitary_from(3, &mut g).unwrap();
            let ru = stretched_from_unitary(&u, &sys).unwrap();
            let rv = stretched_from_unitary(&v, &sys).unwrap();
            let ruv = stretched_from_unitary(&u.compose(&v), &sys).unwrap();
            assert!(max_diff(&ruv, &ru.compose(&rv).unwrap()) < 1e-10);
            let radj = stretched_from_unitary(&u.adjoint(), &sys).unwrap();
            assert!(max_diff(&radj, &ru.transpose()) < 1e-10);
        }
    }

    #[test]
    fn transfer_matches_evolution() {
        let sys = qutrit();
        let u = haar_unitary(3, 9).unwrap();
        let r = stretched_from_unitary(&u, &sys).unwrap();
        let mut g = rng(9, 1);
        for _ in 0..10 {
            let rho = random_density_from(3, 2, &mut g).unwrap();
            let p = state_to_prob(&rho, &sys).unwrap();
            let via_r = r.apply(&p).unwrap();
            let via_rule = evolve(&p, &u, &sys).unwrap();
            let direct = state_to_prob(&rho.conjugate_by(&u), &sys).unwrap();
            for k in 0..9 {
                assert!((via_r[k] - via_rule[k]).abs() < 1e-12);
                assert!((via_r[k] - direct[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn transfer_rejects_dimension_mismatch() {
        assert!(stretched_from_unitary(&UnitaryOperator::identity(2), &qutrit()).is_err());
    }

    fn pure_sample(d: usize, sys: &SicSystem, count: usize, seed: u64) -> PointSet {
        let mut g = rng(seed, 0);
        let mut set = PointSet::new(d * d);
        for k in 0..count {
            let rho = DensityOperator::pure(&crate::linalg::random_pure_vector(d, &mut g)).unwrap();
            set.push(state_to_prob(&rho, sys).unwrap(), format!("s{k}"))
                .unwrap();
        }
        set
    }

    #[test]
    fn unitary_images_stay_quantum() {
        let sys = qutrit();
        let sample = pure_sample(3, &sys, 200, 1);
        let r = stretched_from_unitary(&haar_unitary(3, 5).unwrap(), &sys).unwrap();
        assert_eq!(image_membership(&r, &sample, &sys).unwrap().fraction, 1.0);
        let id = StretchedMatrix::identity(3);
        assert_eq!(image_membership(&id, &sample, &sys).unwrap().fraction, 1.0);
    }

    #[test]
    fn qubit_transposition_is_a_reflection() {
        // every permutation of the qubit SIC is an orthogonal map of the
        // Bloch ball, so even a single transposition preserves the states
        let sys = qubit();
        let sample = pure_sample(2, &sys, 200, 2);
        let swap = StretchedMatrix::permutation(2, &[1, 0, 2, 3]).unwrap();
        assert!(verify_stretched(&swap, &params(2)).stochastic());
        assert_eq!(
            image_membership(&swap, &sample, &sys).unwrap().fraction,
            1.0
        );
    }

    #[test]
    fn qutrit_transposition_leaves_state_space() {
        let sys = qutrit();
        let sample = pure_sample(3, &sys, 200, 3);
        let mut perm: Vec<usize> = (0..9).collect();
        perm.swap(0, 1);
        let swap = StretchedMatrix::permutation(3, &perm).unwrap();
        assert!(verify_stretched(&swap, &params(3)).stochastic());
        let rep = image_membership(&swap, &sample, &sys).unwrap();
        assert!(rep.fraction < 1.0);
        assert!(rep.worst_min_eigenvalue < -1e-3);
    }

    #[test]
    fn closure_of_unitary_transfers() {
        let sys = qutrit();
        let p = params(3);
        let sample: Vec<StretchedMatrix> = (0..20)
            .map(|k| stretched_from_unitary(&haar_unitary(3, 100 + k).unwrap(), &sys).unwrap())
            .collect();
        let rep = group_closure_check(&sample, &p, 100, 7).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.trials.len(), 100);
        assert!(
            group_closure_check(&[StretchedMatrix::identity(3)], &p, 10, 0)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn closure_flags_bad_element() {
        let p = params(2);
        let mut m = DMatrix::<f64>::identity(4, 4);
        m[(0, 1)] = -0.9;
        let bad = StretchedMatrix::new(2, m).unwrap();
        let rep = group_closure_check(&[StretchedMatrix::identity(2), bad], &p, 20, 1).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.flagged_elements, vec![1]);
        assert!(rep.failed_trials().next().is_none());
    }
}
