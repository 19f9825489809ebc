//! Quasi-SICs: operators obeying the SIC trace and overlap equations
//! without being positive semi-definite.

use super::{verify_frame, OperatorFrame, SicSystem, SicVerification};
use crate::error::{QplexError, Result};
use crate::linalg::{trace_product, CMatrix, HermitianOperator, C64};
use crate::tol::TAU_SIC;

/// Generalized Gell-Mann matrices normalized to `Tr(G_a G_b) = δ_ab`.
///
/// Order: symmetric `(j,k)` pairs, antisymmetric pairs, then the `d - 1`
/// diagonal elements.
pub fn gell_mann_basis(d: usize) -> Vec<HermitianOperator> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = CMatrix::zeros(d, d);
            m[(j, k)] = C64::new(s, 0.0);
            m[(k, j)] = C64::new(s, 0.0);
            out.push(HermitianOperator::symmetrized(m));
        }
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = CMatrix::zeros(d, d);
            m[(j, k)] = C64::new(0.0, -s);
            m[(k, j)] = C64::new(0.0, s);
            out.push(HermitianOperator::symmetrized(m));
        }
    }
    for l in 1..d {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::zeros(d, d);
        for i in 0..l {
            m[(i, i)] = C64::new(1.0 / norm, 0.0);
        }
        m[(l, l)] = C64::new(-(l as f64) / norm, 0.0);
        out.push(HermitianOperator::symmetrized(m));
    }
    out
}

/// Vertices of a regular simplex with `n` vertices in `R^{n-1}`: unit vectors
/// with pairwise inner products `-1/(n-1)`. Vertex `j` has coordinates
/// `h_l(j)` on the Helmert basis of the sum-zero hyperplane of `R^n`,
/// rescaled to unit length.
pub fn regular_simplex(n: usize) -> Vec<Vec<f64>> {
    let scale = (n as f64 / (n as f64 - 1.0)).sqrt();
    (0..n)
        .map(|j| {
            (1..n)
                .map(|l| {
                    let norm = ((l * (l + 1)) as f64).sqrt();
                    let h = if j < l {
                        1.0
                    } else if j == l {
                        -(l as f64)
                    } else {
                        0.0
                    };
                    scale * h / norm
                })
                .collect()
        })
        .collect()
}

/// `d²` trace-zero Hermitian operators of unit Hilbert-Schmidt norm forming
/// a regular simplex: `Tr(B_j B_k) = 1` if `j = k`, else `-1/(d²-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiSicBasis {
    dim: usize,
    elements: Vec<HermitianOperator>,
}

impl QuasiSicBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    /// Largest deviation of the Gram matrix and traces from their targets.
    pub fn max_gram_deviation(&self) -> f64 {
        let n = self.elements.len() as f64;
        let mut worst = 0.0_f64;
        for (j, a) in self.elements.iter().enumerate() {
            worst = worst.max(a.trace().abs());
            for (k, b) in self.elements.iter().enumerate().skip(j) {
                let want = if j == k { 1.0 } else { -1.0 / (n - 1.0) };
                worst = worst.max((trace_product(a.matrix(), b.matrix()).re - want).abs());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuasiSic {
    dim: usize,
    operators: Vec<HermitianOperator>,
    basis: QuasiSicBasis,
}

impl QuasiSic {
    pub fn basis(&self) -> &QuasiSicBasis {
        &self.basis
    }

    /// Trace, overlap and resolution-of-identity deviations. Idempotency is
    /// reported but is not a quasi-SIC requirement.
    pub fn verify(&self) -> SicVerification {
        verify_frame(self, TAU_SIC)
    }

    /// Smallest eigenvalue over all operators.
    pub fn min_eigenvalue(&self) -> f64 {
        self.operators
            .iter()
            .map(|o| o.min_eigenvalue())
            .fold(f64::INFINITY, f64::min)
    }
}

impl OperatorFrame for QuasiSic {
    fn dim(&self) -> usize {
        self.dim
    }
    fn operators(&self) -> &[HermitianOperator] {
        &self.operators
    }
}

/// Quasi-SIC `Π_j = √((d-1)/d) B_j + I/d`, where `B_j` are the vertices of
/// [`regular_simplex`] placed on the [`gell_mann_basis`].
pub fn build_quasi_sic(d: usize) -> Result<QuasiSic> {
    if d < 2 {
        return Err(QplexError::InvalidArgument("quasi-SIC needs d >= 2".into()));
    }
    let n = d * d;
    let gm = gell_mann_basis(d);
    let elements: Vec<HermitianOperator> = regular_simplex(n)
        .iter()
        .map(|v| HermitianOperator::combination(v, &gm))
        .collect::<Result<_>>()?;
    let shift = HermitianOperator::identity(d).scale(1.0 / d as f64);
    let scale = ((d as f64 - 1.0) / d as f64).sqrt();
    let operators = elements
        .iter()
        .map(|b| HermitianOperator::combination(&[scale, 1.0], &[b.clone(), shift.clone()]))
        .collect::<Result<_>>()?;
    Ok(QuasiSic {
        dim: d,
        operators,
        basis: QuasiSicBasis { dim: d, elements },
    })
}

/// Quasi-SIC `Π'_j = (2/d) I - Π_j` built from a SIC, i.e. the simplex
/// construction with every vertex negated. It shares all transfer matrices
/// with the SIC and is not PSD for `d ≥ 3`.
pub fn complement_quasi_sic(system: &SicSystem) -> Result<QuasiSic> {
    let d = system.dim();
    let two_over_d = HermitianOperator::identity(d).scale(2.0 / d as f64);
    let shift = HermitianOperator::identity(d).scale(1.0 / d as f64);
    let scale = (d as f64 / (d as f64 - 1.0)).sqrt();
    let mut operators = Vec::with_capacity(system.len());
    let mut elements = Vec::with_capacity(system.len());
    for p in system.projectors() {
        let op = HermitianOperator::combination(&[1.0, -1.0], &[two_over_d.clone(), p.clone()])?;
        elements.push(HermitianOperator::combination(
            &[scale, -scale],
            &[op.clone(), shift.clone()],
        )?);
        operators.push(op);
    }
    Ok(QuasiSic {
        dim: d,
        operators,
        basis: QuasiSicBasis { dim: d, elements },
    })
}
