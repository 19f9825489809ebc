use std::f64::consts::PI;

use crate::error::{QplexError, Result};
use crate::linalg::{CMatrix, CVector, UnitaryOperator, C64};

/// Weyl-Heisenberg displacement operators `D_{a,b} = τ^{ab} X^a Z^b` with
/// `X|k> = |k+1 mod d>`, `Z|k> = ω^k |k>`, `ω = e^{2πi/d}` and
/// `τ = -e^{iπ/d}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WHGroup {
    dim: usize,
    tau: C64,
}

impl WHGroup {
    pub fn new(dim: usize) -> Self {
        WHGroup {
            dim,
            tau: -C64::from_polar(1.0, PI / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tau(&self) -> C64 {
        self.tau
    }

    /// `τ^n`, computed from the angle to avoid accumulated rounding.
    pub(crate) fn tau_pow(&self, n: usize) -> C64 {
        let d = self.dim;
        let m = n % (2 * d);
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        C64::from_polar(sign, PI * m as f64 / d as f64)
    }

    /// `ω^n`.
    pub(crate) fn omega_pow(&self, n: usize) -> C64 {
        let d = self.dim;
        C64::from_polar(1.0, 2.0 * PI * (n % d) as f64 / d as f64)
    }

    pub fn displacement(&self, a: usize, b: usize) -> Result<UnitaryOperator> {
        let d = self.dim;
        if a >= d || b >= d {
            return Err(QplexError::IndexOutOfRange { a, b, dim: d });
        }
        let phase = self.tau_pow(a * b);
        let mut m = CMatrix::zeros(d, d);
        for k in 0..d {
            // column k maps |k> to τ^{ab} ω^{bk} |k + a>
            m[((k + a) % d, k)] = phase * self.omega_pow(b * k);
        }
        Ok(UnitaryOperator::new_unchecked(m))
    }

    /// `D_{a,b} ψ` without forming the matrix. Indices are taken mod `d`.
    pub fn apply(&self, a: usize, b: usize, psi: &CVector) -> CVector {
        let d = self.dim;
        let phase = self.tau_pow(a * b);
        let mut out = CVector::zeros(d);
        for k in 0..d {
            out[(k + a) % d] = phase * self.omega_pow(b * k) * psi[k];
        }
        out
    }

    /// `D_{a,b}^† ψ`.
    pub fn apply_adjoint(&self, a: usize, b: usize, psi: &CVector) -> CVector {
        let d = self.dim;
        let phase = self.tau_pow(a * b).conj();
        let mut out = CVector::zeros(d);
        for k in 0..d {
            out[k] = phase * self.omega_pow(b * k).conj() * psi[(k + a) % d];
        }
        out
    }
}
