//! Dense complex linear algebra used throughout the crate.
//!
//! Operators are stored as `nalgebra` dense matrices of `Complex64`. The
//! newtypes [`HermitianOperator`], [`UnitaryOperator`] and [`DensityOperator`]
//! check their defining invariant once, at construction.
//!
//! Randomness comes from ChaCha20 seeded with a 64-bit seed. Independent
//! streams are obtained by [`rng`] with distinct `stream` values, so a
//! computation that needs several sub-generators derives them from one seed
//! as `rng(seed, 0)`, `rng(seed, 1)`, ...

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{QplexError, Result};
use crate::tol::{TAU_EQ, TAU_PSD};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Seeded generator on a given stream.
pub fn rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut r = ChaCha20Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Maximum entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `max_{jk} |A_jk - conj(A_kj)|`.
pub fn max_asymmetry(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for j in 0..n {
        for k in j..n {
            worst = worst.max((m[(j, k)] - m[(k, j)].conj()).norm());
        }
    }
    worst
}

/// `Tr(AB)` for arbitrary square matrices of equal size.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            acc += a[(j, k)] * b[(k, j)];
        }
    }
    acc
}

fn check_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(QplexError::InvalidArgument(format!(
            "expected a non-empty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if let Some(index) = m
        .iter()
        .position(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(QplexError::NonFinite { index });
    }
    Ok(())
}

/// A Hermitian `d x d` operator.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator(CMatrix);

impl HermitianOperator {
    /// Accepts `m` if it is Hermitian to [`TAU_EQ`]; the stored matrix is
    /// the exact Hermitian part `(m + m^†)/2`.
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        let asym = max_asymmetry(&m);
        if asym > TAU_EQ {
            return Err(QplexError::NotHermitian {
                max_asymmetry: asym,
            });
        }
        Ok(Self::symmetrized(m))
    }

    /// Hermitian part of `m`, without any check. For matrices that are
    /// Hermitian by construction up to rounding.
    pub(crate) fn symmetrized(m: CMatrix) -> Self {
        let adj = m.adjoint();
        HermitianOperator((m + adj) * C64::new(0.5, 0.0))
    }

    pub fn identity(d: usize) -> Self {
        HermitianOperator(CMatrix::identity(d, d))
    }

    /// `|v><v|` (not normalized).
    pub fn outer(v: &CVector) -> Self {
        HermitianOperator::symmetrized(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianOperator(&self.0 * C64::new(s, 0.0))
    }

    /// Real linear combination `Σ w_k H_k`.
    pub fn combination(weights: &[f64], ops: &[HermitianOperator]) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| QplexError::InvalidArgument("empty operator list".into()))?;
        if weights.len() != ops.len() {
            return Err(QplexError::DimensionMismatch {
                expected: ops.len(),
                found: weights.len(),
            });
        }
        let d = first.dim();
        let mut acc = CMatrix::zeros(d, d);
        for (w, op) in weights.iter().zip(ops) {
            if op.dim() != d {
                return Err(QplexError::DimensionMismatch {
                    expected: d,
                    found: op.dim(),
                });
            }
            acc += op.matrix() * C64::new(*w, 0.0);
        }
        Ok(HermitianOperator::symmetrized(acc))
    }

    /// `U H U^†`.
    pub fn conjugate_by(&self, u: &UnitaryOperator) -> Self {
        HermitianOperator::symmetrized(u.matrix() * &self.0 * u.matrix().adjoint())
    }

    /// Entrywise complex conjugate, i.e. transpose for a Hermitian matrix.
    pub fn conj(&self) -> Self {
        HermitianOperator(self.0.map(|z| z.conj()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigen(self).ascending[0]
    }
}

/// A unitary `d x d` operator.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator(CMatrix);

impl UnitaryOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        let defect = unitarity_defect(&m);
        if defect > TAU_EQ {
            return Err(QplexError::NotUnitary { defect });
        }
        Ok(UnitaryOperator(m))
    }

    pub(crate) fn new_unchecked(m: CMatrix) -> Self {
        UnitaryOperator(m)
    }

    pub fn identity(d: usize) -> Self {
        UnitaryOperator(CMatrix::identity(d, d))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        UnitaryOperator(self.0.adjoint())
    }

    pub fn compose(&self, other: &UnitaryOperator) -> Self {
        UnitaryOperator(&self.0 * &other.0)
    }
}

/// `max |UU^† - I|`.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    max_abs_diff(&(m * m.adjoint()), &CMatrix::identity(n, n))
}

/// A positive semi-definite, unit-trace Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator(HermitianOperator);

impl DensityOperator {
    pub fn new(h: HermitianOperator) -> Result<Self> {
        let trace = h.trace();
        let min_eigenvalue = h.min_eigenvalue();
        if (trace - 1.0).abs() > TAU_EQ || min_eigenvalue < -TAU_PSD {
            return Err(QplexError::NotDensity {
                trace,
                min_eigenvalue,
            });
        }
        Ok(DensityOperator(h))
    }

    /// Pure state `|ψ><ψ|` from a vector, normalizing it first.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(QplexError::NotNormalized { norm });
        }
        let v = psi.unscale(norm);
        Ok(DensityOperator(HermitianOperator::outer(&v)))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityOperator(HermitianOperator::identity(d).scale(1.0 / d as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.0
    }

    pub fn matrix(&self) -> &CMatrix {
        self.0.matrix()
    }

    pub fn purity(&self) -> f64 {
        trace_product(self.matrix(), self.matrix()).re
    }

    pub fn conjugate_by(&self, u: &UnitaryOperator) -> Self {
        DensityOperator(self.0.conjugate_by(u))
    }
}

/// Eigenvalues of a Hermitian operator in both orders.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub ascending: Vec<f64>,
    pub descending: Vec<f64>,
}

impl Spectrum {
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        let descending = values.iter().rev().copied().collect();
        Spectrum {
            ascending: values,
            descending,
        }
    }

    pub fn min(&self) -> f64 {
        self.ascending[0]
    }

    pub fn max(&self) -> f64 {
        self.descending[0]
    }
}

/// Eigenvalues with the corresponding orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    /// `V diag(λ) V^†`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, &lam) in self.values.iter().enumerate() {
            for j in 0..d {
                scaled[(j, k)] *= lam;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

pub fn eigen_decomposition(h: &HermitianOperator) -> EigenDecomposition {
    let eig = SymmetricEigen::new(h.matrix().clone());
    EigenDecomposition {
        values: eig.eigenvalues.iter().copied().collect(),
        vectors: eig.eigenvectors,
    }
}

pub fn hermitian_eigen(h: &HermitianOperator) -> Spectrum {
    let eig = SymmetricEigen::new(h.matrix().clone());
    Spectrum::from_values(eig.eigenvalues.iter().copied().collect())
}

/// Hilbert-Schmidt inner product `Tr(AB)`.
pub fn hs_inner(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(QplexError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(trace_product(a.matrix(), b.matrix()).re)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows x cols` matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary drawn from `rng`.
pub fn haar_unitary_from<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<UnitaryOperator> {
    if d == 0 {
        return Err(QplexError::InvalidArgument("dimension must be >= 1".into()));
    }
    let qr = ginibre(d, d, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..d {
        let diag = r[(k, k)];
        let phase = if diag.norm() > 0.0 {
            diag / diag.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for j in 0..d {
            q[(j, k)] *= phase;
        }
    }
    Ok(UnitaryOperator(q))
}

/// Haar-distributed unitary, deterministic in `seed`.
pub fn haar_unitary(d: usize, seed: u64) -> Result<UnitaryOperator> {
    haar_unitary_from(d, &mut rng(seed, 0))
}

/// Haar-random unit vector.
pub fn random_pure_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(d, |_, _| complex_gaussian(rng));
    let n = v.norm();
    v.unscale(n)
}

/// Random density operator `GG^†/Tr(GG^†)` with `G` a `d x rank` Ginibre
/// matrix. `rank = 1` is a Haar-random pure state.
pub fn random_density_from<R: Rng + ?Sized>(
    d: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityOperator> {
    if d == 0 || rank == 0 || rank > d {
        return Err(QplexError::InvalidArgument(format!(
            "rank {rank} out of range 1..={d}"
        )));
    }
    if rank == 1 {
        return DensityOperator::pure(&random_pure_vector(d, rng));
    }
    let g = ginibre(d, rank, rng);
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    Ok(DensityOperator(HermitianOperator::symmetrized(
        w * C64::new(1.0 / tr, 0.0),
    )))
}

pub fn random_density(d: usize, rank: usize, seed: u64) -> Result<DensityOperator> {
    random_density_from(d, rank, &mut rng(seed, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_spectrum() {
        let s = hermitian_eigen(&HermitianOperator::identity(3));
        for v in &s.ascending {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn projector_spectrum() {
        let v = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let s = hermitian_eigen(&HermitianOperator::outer(&v));
        assert!(s.ascending[0].abs() < 1e-14);
        assert!((s.ascending[1] - 1.0).abs() < 1e-14);
        assert_eq!(s.descending, vec![s.ascending[1], s.ascending[0]]);
    }

    #[test]
    fn two_by_two_matches_quadratic_formula() {
        let mut r = rng(11, 0);
        for _ in 0..50 {
            let a: f64 = r.sample(StandardNormal);
            let dd: f64 = r.sample(StandardNormal);
            let b = complex_gaussian(&mut r);
            let m = CMatrix::from_row_slice(2, 2, &[c(a, 0.0), b, b.conj(), c(dd, 0.0)]);
            let s = hermitian_eigen(&HermitianOperator::new(m).unwrap());
            // roots of x^2 - (a+d)x + (ad - |b|^2)
            let tr = a + dd;
            let det = a * dd - b.norm_sqr();
            let disc = (tr * tr - 4.0 * det).sqrt();
            assert!((s.ascending[0] - (tr - disc) / 2.0).abs() < 1e-12);
            assert!((s.ascending[1] - (tr + disc) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        match HermitianOperator::new(m) {
            Err(QplexError::NotHermitian { max_asymmetry }) => {
                assert!((max_asymmetry - 0.5).abs() < 1e-15)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn eigen_reconstructs() {
        let mut r = rng(3, 0);
        for d in 1..=8 {
            let g = ginibre(d, d, &mut r);
            let h = HermitianOperator::symmetrized(&g + g.adjoint());
            let eig = eigen_decomposition(&h);
            assert!(max_abs_diff(&eig.reconstruct(), h.matrix()) < crate::tol::TAU_EIG);
        }
    }

    #[test]
    fn hs_inner_basic_cases() {
        let i3 = HermitianOperator::identity(3);
        assert!((hs_inner(&i3, &i3).unwrap() - 3.0).abs() < 1e-15);
        let e0 = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let e1 = CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let p = HermitianOperator::outer(&e0);
        let q = HermitianOperator::outer(&e1);
        assert_eq!(hs_inner(&p, &q).unwrap(), 0.0);
        assert!(matches!(
            hs_inner(&p, &i3),
            Err(QplexError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn hs_inner_matches_entry_sum() {
        let mut r = rng(5, 0);
        let d = 4;
        let ga = ginibre(d, d, &mut r);
        let gb = ginibre(d, d, &mut r);
        let a = HermitianOperator::symmetrized(&ga + ga.adjoint());
        let b = HermitianOperator::symmetrized(&gb + gb.adjoint());
        let mut oracle = c(0.0, 0.0);
        for j in 0..d {
            for k in 0..d {
                oracle += a.matrix()[(j, k)] * b.matrix()[(k, j)];
            }
        }
        assert!(oracle.im.abs() < 1e-12);
        assert!((hs_inner(&a, &b).unwrap() - oracle.re).abs() < 1e-12);
    }

    #[test]
    fn haar_unitary_cases() {
        let u = haar_unitary(1, 42).unwrap();
        assert!((u.matrix()[(0, 0)].norm() - 1.0).abs() < 1e-14);
        for d in 2..=6 {
            let u = haar_unitary(d, d as u64).unwrap();
            assert!(unitarity_defect(u.matrix()) < 1e-12);
        }
        assert_eq!(haar_unitary(3, 9).unwrap(), haar_unitary(3, 9).unwrap());
        assert!(haar_unitary(0, 1).is_err());
    }

    #[test]
    fn haar_first_moment() {
        // E|U_00|^2 = 1/d, Var = 1/(d(d+1)) - 1/d^2 = 1/12 at d = 2.
        let mut r = rng(2024, 0);
        let n = 10_000;
        let mean = (0..n)
            .map(|_| haar_unitary_from(2, &mut r).unwrap().matrix()[(0, 0)].norm_sqr())
            .sum::<f64>()
            / n as f64;
        let se = (1.0_f64 / 12.0).sqrt() / (n as f64).sqrt();
        assert!((mean - 0.5).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn random_density_cases() {
        for seed in 0..20 {
            let rho = random_density(3, 1, seed).unwrap();
            assert!((rho.purity() - 1.0).abs() < 1e-12);
            let cube = trace_product(&(rho.matrix() * rho.matrix()), rho.matrix()).re;
            assert!((cube - 1.0).abs() < 1e-12);
            let mixed = random_density(2, 2, seed).unwrap();
            let s = hermitian_eigen(mixed.operator());
            assert!(s.min() >= -1e-12);
            assert!((s.ascending.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!(random_density(2, 3, 0).is_err());
        assert!(random_density(2, 0, 0).is_err());
    }
}
