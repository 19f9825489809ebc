//! SIC construction and verification.
//!
//! A SIC in dimension `d` is a set of `d²` rank-one projectors `Π_i` with
//! `Tr(Π_j Π_k) = (d δ_jk + 1)/(d + 1)`. Here they are generated as orbits of
//! a fiducial vector under the Weyl-Heisenberg group, ordered
//! lexicographically by displacement index `(a, b)`.

mod quasi;
mod search;
mod triple;
mod weyl;

pub use quasi::{
    build_quasi_sic, complement_quasi_sic, gell_mann_basis, regular_simplex, QuasiSic,
    QuasiSicBasis,
};
pub use search::{
    find_sic_fiducial, search_fiducial, sic_defect, sic_defect_gradient, SearchOptions,
    SearchOutcome,
};
pub use triple::{triple_products, TripleProducts};
pub use weyl::WHGroup;

use crate::error::{QplexError, Result};
use crate::linalg::{max_abs_diff, trace_product, CMatrix, CVector, HermitianOperator, C64};
use crate::tol::{TAU_BUILD, TAU_EQ, TAU_SIC};

/// Any set of `d²` trace-one Hermitian operators indexed like a SIC.
pub trait OperatorFrame {
    fn dim(&self) -> usize;
    fn operators(&self) -> &[HermitianOperator];
}

/// Unit vector whose Weyl-Heisenberg orbit is (a candidate for) a SIC.
#[derive(Debug, Clone, PartialEq)]
pub struct SicFiducial {
    vector: CVector,
}

impl SicFiducial {
    pub fn new(vector: CVector) -> Result<Self> {
        if vector.len() < 2 {
            return Err(QplexError::InvalidArgument(
                "fiducial dimension must be >= 2".into(),
            ));
        }
        if let Some(index) = vector
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(QplexError::NonFinite { index });
        }
        let norm = vector.norm();
        if (norm - 1.0).abs() > TAU_EQ {
            return Err(QplexError::NotNormalized { norm });
        }
        Ok(SicFiducial { vector })
    }

    /// Normalizes `vector` before wrapping it.
    pub fn normalized(vector: CVector) -> Result<Self> {
        let norm = vector.norm();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(QplexError::NotNormalized { norm });
        }
        SicFiducial::new(vector.unscale(norm))
    }

    /// The exact qutrit fiducial `(0, 1, -1)/√2`.
    pub fn qutrit_exact() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        SicFiducial {
            vector: CVector::from_vec(vec![
                C64::new(0.0, 0.0),
                C64::new(s, 0.0),
                C64::new(-s, 0.0),
            ]),
        }
    }

    /// Qubit fiducial `(cos θ/2, e^{iπ/4} sin θ/2)` with `cos θ = 1/√3`.
    pub fn qubit_tetrahedral() -> Self {
        let theta = (1.0_f64 / 3.0_f64.sqrt()).acos();
        let phase = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        SicFiducial {
            vector: CVector::from_vec(vec![
                C64::new((theta / 2.0).cos(), 0.0),
                phase * (theta / 2.0).sin(),
            ]),
        }
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }

    pub fn defect(&self) -> f64 {
        search::defect_unchecked(&self.vector)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Fiducial(SicFiducial),
    Explicit,
}

/// `d²` projectors claimed to form a SIC. Construction through
/// [`sic_from_fiducial`] guarantees the invariants; [`SicSystem::explicit`]
/// does not, and should be followed by [`verify_sic`].
#[derive(Debug, Clone, PartialEq)]
pub struct SicSystem {
    dim: usize,
    projectors: Vec<HermitianOperator>,
    provenance: Provenance,
}

impl SicSystem {
    pub fn explicit(dim: usize, projectors: Vec<HermitianOperator>) -> Result<Self> {
        if projectors.len() != dim * dim {
            return Err(QplexError::DimensionMismatch {
                expected: dim * dim,
                found: projectors.len(),
            });
        }
        if let Some(p) = projectors.iter().find(|p| p.dim() != dim) {
            return Err(QplexError::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        Ok(SicSystem {
            dim,
            projectors,
            provenance: Provenance::Explicit,
        })
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn projectors(&self) -> &[HermitianOperator] {
        &self.projectors
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }
}

impl OperatorFrame for SicSystem {
    fn dim(&self) -> usize {
        self.dim
    }
    fn operators(&self) -> &[HermitianOperator] {
        &self.projectors
    }
}

/// Builds the Weyl-Heisenberg orbit of a fiducial whose defect is below
/// [`TAU_BUILD`].
pub fn sic_from_fiducial(fiducial: &SicFiducial) -> Result<SicSystem> {
    let defect = fiducial.defect();
    if defect >= TAU_BUILD {
        return Err(QplexError::DefectTooLarge {
            defect,
            limit: TAU_BUILD,
        });
    }
    let d = fiducial.dim();
    let group = WHGroup::new(d);
    let mut projectors = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let v = group.apply(a, b, fiducial.vector());
            projectors.push(HermitianOperator::outer(&v));
        }
    }
    Ok(SicSystem {
        dim: d,
        projectors,
        provenance: Provenance::Fiducial(fiducial.clone()),
    })
}

/// Maximum deviation of each SIC invariant class.
#[derive(Debug, Clone, PartialEq)]
pub struct SicVerification {
    pub dim: usize,
    pub count_ok: bool,
    pub max_trace_deviation: f64,
    pub max_idempotency_deviation: f64,
    pub max_diagonal_overlap_deviation: f64,
    pub max_overlap_deviation: f64,
    pub identity_deviation: f64,
    /// Index of the projector with the worst idempotency defect.
    pub worst_idempotency_index: usize,
    pub tolerance: f64,
}

impl SicVerification {
    pub fn trace_ok(&self) -> bool {
        self.max_trace_deviation < self.tolerance
    }
    pub fn idempotency_ok(&self) -> bool {
        self.max_idempotency_deviation < self.tolerance
    }
    pub fn overlap_ok(&self) -> bool {
        self.max_overlap_deviation < self.tolerance
            && self.max_diagonal_overlap_deviation < self.tolerance
    }
    pub fn identity_ok(&self) -> bool {
        self.identity_deviation < self.tolerance
    }
    pub fn passed(&self) -> bool {
        self.count_ok
            && self.trace_ok()
            && self.idempotency_ok()
            && self.overlap_ok()
            && self.identity_ok()
    }
}

pub fn verify_sic(system: &SicSystem) -> SicVerification {
    verify_frame(system, TAU_SIC)
}

pub(crate) fn verify_frame<F: OperatorFrame + ?Sized>(
    frame: &F,
    tolerance: f64,
) -> SicVerification {
    let d = frame.dim();
    let ops = frame.operators();
    let df = d as f64;
    let mut report = SicVerification {
        dim: d,
        count_ok: ops.len() == d * d,
        max_trace_deviation: 0.0,
        max_idempotency_deviation: 0.0,
        max_diagonal_overlap_deviation: 0.0,
        max_overlap_deviation: 0.0,
        identity_deviation: 0.0,
        worst_idempotency_index: 0,
        tolerance,
    };
    let mut sum = CMatrix::zeros(d, d);
    for (i, p) in ops.iter().enumerate() {
        report.max_trace_deviation = report.max_trace_deviation.max((p.trace() - 1.0).abs());
        let sq = p.matrix() * p.matrix();
        let idem = max_abs_diff(&sq, p.matrix());
        if idem > report.max_idempotency_deviation {
            report.max_idempotency_deviation = idem;
            report.worst_idempotency_index = i;
        }
        sum += p.matrix();
    }
    let off = 1.0 / (df + 1.0);
    for j in 0..ops.len() {
        for k in j..ops.len() {
            let ov = trace_product(ops[j].matrix(), ops[k].matrix()).re;
            if j == k {
                report.max_diagonal_overlap_deviation =
                    report.max_diagonal_overlap_deviation.max((ov - 1.0).abs());
            } else {
                report.max_overlap_deviation = report.max_overlap_deviation.max((ov - off).abs());
            }
        }
    }
    let resolved = sum * C64::new(1.0 / df, 0.0);
    report.identity_deviation = max_abs_diff(&resolved, &CMatrix::identity(d, d));
    report
}
