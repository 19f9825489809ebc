//! The SIC representation: density operators as probability vectors, and
//! the Born rule written as a relation between probability vectors.
//!
//! With a SIC `{Π_i}` a state `ρ` becomes `p(i) = Tr(ρ Π_i)/d`, and is
//! recovered as `ρ = Σ_i [(d+1) p(i) - 1/d] Π_i`. The probability of outcome
//! `j` of any other measurement `{E_j}` is then
//! `q(j) = Σ_i [(d+1) p(i) - 1/d] r(j|i)` with `r(j|i) = Tr(E_j Π_i)`.

use std::ops::Deref;

use crate::error::{QplexError, Result};
use crate::linalg::{
    hermitian_eigen, trace_product, DensityOperator, HermitianOperator, UnitaryOperator,
};
use crate::sic::{OperatorFrame, TripleProducts};
use crate::tol::{TAU_EQ, TAU_PROB, TAU_PSD};

/// Constants of the quantum case: `N = d²`, `α = d + 1`, `β = 1/d`,
/// `L = 1/(d(d+1))`, `U = 2/(d(d+1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionParams {
    pub d: usize,
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub lower: f64,
    pub upper: f64,
}

impl DimensionParams {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(QplexError::InvalidArgument(format!("dimension {d} < 2")));
        }
        let df = d as f64;
        Ok(DimensionParams {
            d,
            n: d * d,
            alpha: df + 1.0,
            beta: 1.0 / df,
            lower: 1.0 / (df * (df + 1.0)),
            upper: 2.0 / (df * (df + 1.0)),
        })
    }

    /// The flat vector `c(i) = 1/N`.
    pub fn barycenter(&self) -> ProbVector {
        ProbVector(vec![1.0 / self.n as f64; self.n])
    }

    /// `e_k(i) = (δ_ki + β)/α`.
    pub fn basis_distribution(&self, k: usize) -> ProbVector {
        ProbVector(
            (0..self.n)
                .map(|i| (if i == k { 1.0 } else { 0.0 } + self.beta) / self.alpha)
                .collect(),
        )
    }

    /// Measurement matrix `r_F(j|i) = e_j(i)`: the SIC measured on the ground.
    pub fn sic_measurement(&self) -> MeasurementMatrix {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for j in 0..n {
            entries.extend_from_slice(&self.basis_distribution(j));
        }
        MeasurementMatrix::from_parts(n, n, entries)
    }
}

/// Parameters of the generalized urgleichung `q = Σ [α p(i) - β] r(j|i)`
/// for an arbitrary outcome count `N` and `α > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralParams {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub lower: f64,
    pub upper: f64,
    pub m_max: f64,
}

impl GeneralParams {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n < 2 {
            return Err(QplexError::InvalidArgument(format!("N = {n} < 2")));
        }
        if !alpha.is_finite() || alpha <= 1.0 {
            return Err(QplexError::InvalidArgument(format!(
                "alpha = {alpha} must exceed 1"
            )));
        }
        let nf = n as f64;
        Ok(GeneralParams {
            n,
            alpha,
            beta: (alpha - 1.0) / nf,
            lower: 1.0 / nf - 1.0 / (nf * alpha),
            upper: (nf - 1.0) / (nf * alpha * alpha) + 1.0 / nf,
            m_max: 1.0 + (nf - 1.0) / alpha,
        })
    }
}

impl From<DimensionParams> for GeneralParams {
    fn from(p: DimensionParams) -> Self {
        GeneralParams {
            n: p.n,
            alpha: p.alpha,
            beta: p.beta,
            lower: p.lower,
            upper: p.upper,
            m_max: p.d as f64,
        }
    }
}

/// The three constants entering the urgleichung.
pub trait UrgleichungParams {
    fn outcome_count(&self) -> usize;
    fn alpha(&self) -> f64;
    fn beta(&self) -> f64;
}

impl UrgleichungParams for DimensionParams {
    fn outcome_count(&self) -> usize {
        self.n
    }
    fn alpha(&self) -> f64 {
        self.alpha
    }
    fn beta(&self) -> f64 {
        self.beta
    }
}

impl UrgleichungParams for GeneralParams {
    fn outcome_count(&self) -> usize {
        self.n
    }
    fn alpha(&self) -> f64 {
        self.alpha
    }
    fn beta(&self) -> f64 {
        self.beta
    }
}

/// A point of the probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    /// Validates entries against [`TAU_PROB`]. Negative entries within
    /// tolerance are clamped to zero and the vector renormalized.
    pub fn new(mut entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(QplexError::NotProbability("empty vector".into()));
        }
        if let Some(index) = entries.iter().position(|x| !x.is_finite()) {
            return Err(QplexError::NonFinite { index });
        }
        if let Some((index, v)) = entries.iter().enumerate().find(|(_, &v)| v < -TAU_PROB) {
            return Err(QplexError::NotProbability(format!(
                "entry {index} is negative ({v})"
            )));
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > TAU_PROB {
            return Err(QplexError::NotProbability(format!("entries sum to {sum}")));
        }
        let clamped: f64 = entries.iter().filter(|v| **v < 0.0).map(|v| -v).sum();
        if clamped > 0.0 {
            entries.iter_mut().for_each(|v| *v = v.max(0.0));
            let s: f64 = entries.iter().sum();
            entries.iter_mut().for_each(|v| *v /= s);
            log::debug!("clamped {clamped:e} of negative probability mass");
        }
        Ok(ProbVector(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Vertex `k` of the probability simplex.
    pub fn vertex(n: usize, k: usize) -> Self {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        ProbVector(v)
    }
}

impl Deref for ProbVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(QplexError::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Conditional probabilities `r(j|i)` for `outcomes` ground outcomes `j` and
/// `inputs` sky outcomes `i`, stored row-major by `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    outcomes: usize,
    inputs: usize,
    entries: Vec<f64>,
    gamma: Vec<f64>,
}

impl MeasurementMatrix {
    pub fn new(outcomes: usize, inputs: usize, entries: Vec<f64>) -> Result<Self> {
        check_len(outcomes * inputs, entries.len())?;
        if outcomes == 0 || inputs == 0 {
            return Err(QplexError::NotMeasurement("empty matrix".into()));
        }
        if let Some(index) = entries.iter().position(|x| !x.is_finite()) {
            return Err(QplexError::NonFinite { index });
        }
        if let Some(pos) = entries.iter().position(|&v| v < -TAU_PROB) {
            return Err(QplexError::NotMeasurement(format!(
                "r({}|{}) = {} is negative",
                pos / inputs,
                pos % inputs,
                entries[pos]
            )));
        }
        for i in 0..inputs {
            let s: f64 = (0..outcomes).map(|j| entries[j * inputs + i]).sum();
            if (s - 1.0).abs() > TAU_PROB {
                return Err(QplexError::NotMeasurement(format!(
                    "column {i} sums to {s}"
                )));
            }
        }
        Ok(Self::from_parts(outcomes, inputs, entries))
    }

    pub(crate) fn from_parts(outcomes: usize, inputs: usize, entries: Vec<f64>) -> Self {
        let gamma = (0..outcomes)
            .map(|j| entries[j * inputs..(j + 1) * inputs].iter().sum::<f64>() / inputs as f64)
            .collect();
        MeasurementMatrix {
            outcomes,
            inputs,
            entries,
            gamma,
        }
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    /// `r(j|i)`.
    pub fn get(&self, j: usize, i: usize) -> f64 {
        self.entries[j * self.inputs + i]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.entries[j * self.inputs..(j + 1) * self.inputs]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `γ_j = (1/N) Σ_i r(j|i)`.
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }
}

/// Raw frame coordinates `Tr(A Π_i)/d` of any Hermitian operator.
pub fn frame_coordinates<F: OperatorFrame + ?Sized>(
    op: &HermitianOperator,
    frame: &F,
) -> Result<Vec<f64>> {
    let d = frame.dim();
    check_len(d, op.dim())?;
    Ok(frame
        .operators()
        .iter()
        .map(|p| trace_product(op.matrix(), p.matrix()).re / d as f64)
        .collect())
}

/// `p(i) = Tr(ρ Π_i)/d`.
pub fn state_to_prob<F: OperatorFrame + ?Sized>(
    rho: &DensityOperator,
    frame: &F,
) -> Result<ProbVector> {
    ProbVector::new(frame_coordinates(rho.operator(), frame)?)
}

/// `Σ_i [(d+1) p(i) - 1/d] Π_i`. Unit trace whenever `Σ p = 1`; positivity
/// is not guaranteed.
pub fn prob_to_operator<F: OperatorFrame + ?Sized>(
    p: &[f64],
    frame: &F,
) -> Result<HermitianOperator> {
    let d = frame.dim() as f64;
    check_len(frame.operators().len(), p.len())?;
    let weights: Vec<f64> = p.iter().map(|x| (d + 1.0) * x - 1.0 / d).collect();
    HermitianOperator::combination(&weights, frame.operators())
}

/// Outcome of [`validate_state_vector`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateValidity {
    pub min_eigenvalue: f64,
    /// `Σ p(i)²`.
    pub quadratic: f64,
    /// `|Σ p(i)² - 2/(d(d+1))|`.
    pub quadratic_residual: f64,
    /// `Σ c_ijk p(i) p(j) p(k)`.
    pub cubic: f64,
    /// `|Σ c_ijk p(i) p(j) p(k) - (d+7)/(d+1)³|`.
    pub cubic_residual: f64,
    pub is_quantum_state: bool,
    pub is_pure: bool,
}

/// Thresholds for [`validate_state_vector`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityThresholds {
    pub psd: f64,
    pub quadratic: f64,
    pub cubic: f64,
}

impl Default for ValidityThresholds {
    fn default() -> Self {
        ValidityThresholds {
            psd: TAU_PSD,
            quadratic: 1e-8,
            cubic: 1e-8,
        }
    }
}

pub fn validate_state_vector<F: OperatorFrame + ?Sized>(
    p: &[f64],
    frame: &F,
    triples: &TripleProducts,
) -> Result<StateValidity> {
    validate_state_vector_with(p, frame, triples, ValidityThresholds::default())
}

pub fn validate_state_vector_with<F: OperatorFrame + ?Sized>(
    p: &[f64],
    frame: &F,
    triples: &TripleProducts,
    thresholds: ValidityThresholds,
) -> Result<StateValidity> {
    check_len(triples.len(), p.len())?;
    let d = frame.dim() as f64;
    let op = prob_to_operator(p, frame)?;
    let min_eigenvalue = hermitian_eigen(&op).min();
    let quadratic = dot(p, p);
    let quadratic_residual = (quadratic - 2.0 / (d * (d + 1.0))).abs();
    let cubic = triples.cubic_form(p);
    let cubic_residual = (cubic - (d + 7.0) / (d + 1.0).powi(3)).abs();
    let nonneg =
        p.iter().all(|&x| x >= -TAU_PROB) && (p.iter().sum::<f64>() - 1.0).abs() <= TAU_PROB;
    let is_quantum_state = nonneg && min_eigenvalue >= -thresholds.psd;
    Ok(StateValidity {
        min_eigenvalue,
        quadratic,
        quadratic_residual,
        cubic,
        cubic_residual,
        is_quantum_state,
        is_pure: is_quantum_state
            && quadratic_residual < thresholds.quadratic
            && cubic_residual < thresholds.cubic,
    })
}

/// `r(j|i) = Tr(E_j Π_i)` for a POVM `{E_j}`.
pub fn povm_to_measurement<F: OperatorFrame + ?Sized>(
    effects: &[HermitianOperator],
    frame: &F,
) -> Result<MeasurementMatrix> {
    let d = frame.dim();
    if effects.is_empty() {
        return Err(QplexError::NotMeasurement("no effects".into()));
    }
    let mut sum = HermitianOperator::identity(d).scale(0.0).into_matrix();
    for (j, e) in effects.iter().enumerate() {
        check_len(d, e.dim())?;
        let min = e.min_eigenvalue();
        if min < -TAU_PSD {
            return Err(QplexError::NotMeasurement(format!(
                "effect {j} has eigenvalue {min}"
            )));
        }
        sum += e.matrix();
    }
    let dev = crate::linalg::max_abs_diff(&sum, HermitianOperator::identity(d).matrix());
    if dev > TAU_EQ {
        return Err(QplexError::NotMeasurement(format!(
            "effects sum to identity only within {dev:e}"
        )));
    }
    let ops = frame.operators();
    let n = ops.len();
    let mut entries = Vec::with_capacity(effects.len() * n);
    for e in effects {
        for p in ops {
            entries.push(trace_product(e.matrix(), p.matrix()).re);
        }
    }
    MeasurementMatrix::new(effects.len(), n, entries)
}

/// A computed distribution that may fail to be a probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleOutput {
    pub q: Vec<f64>,
    pub min_entry: f64,
    /// `false` when some entry is below `-τ_prob`: the `(p, r)` pair is
    /// inconsistent.
    pub consistent: bool,
}

impl RuleOutput {
    fn from_vec(q: Vec<f64>) -> Self {
        let min_entry = q.iter().copied().fold(f64::INFINITY, f64::min);
        RuleOutput {
            consistent: min_entry >= -TAU_PROB,
            min_entry,
            q,
        }
    }

    pub fn into_prob(self) -> Result<ProbVector> {
        ProbVector::new(self.q)
    }
}

/// `q(j) = Σ_i [α p(i) - β] r(j|i)`.
pub fn urgleichung<P: UrgleichungParams + ?Sized>(
    p: &[f64],
    r: &MeasurementMatrix,
    params: &P,
) -> Result<RuleOutput> {
    check_len(params.outcome_count(), p.len())?;
    check_len(params.outcome_count(), r.inputs())?;
    let weights: Vec<f64> = p
        .iter()
        .map(|x| params.alpha() * x - params.beta())
        .collect();
    let q = (0..r.outcomes()).map(|j| dot(&weights, r.row(j))).collect();
    Ok(RuleOutput::from_vec(q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceRule {
    /// Law of total probability `q(j) = Σ_i p(i) r(j|i)`.
    Classical,
    /// `q(j) = (d+1) Σ_i p(i) r(j|i) - 1`, valid for `d` orthogonal projectors.
    VonNeumann,
}

pub fn reference_rules(
    p: &[f64],
    r: &MeasurementMatrix,
    mode: ReferenceRule,
    params: &DimensionParams,
) -> Result<RuleOutput> {
    check_len(params.n, p.len())?;
    check_len(params.n, r.inputs())?;
    let total: Vec<f64> = (0..r.outcomes()).map(|j| dot(p, r.row(j))).collect();
    let q = match mode {
        ReferenceRule::Classical => total,
        ReferenceRule::VonNeumann => {
            if r.outcomes() != params.d {
                return Err(QplexError::InvalidArgument(format!(
                    "von Neumann rule needs {} outcomes, got {}",
                    params.d,
                    r.outcomes()
                )));
            }
            total.iter().map(|t| params.alpha * t - 1.0).collect()
        }
    };
    Ok(RuleOutput::from_vec(q))
}

/// `u(j|i) = Tr(U Π_i U^† Π_j)/d`, row-major by `j`.
pub fn evolution_matrix<F: OperatorFrame + ?Sized>(
    u: &UnitaryOperator,
    frame: &F,
) -> Result<Vec<f64>> {
    let d = frame.dim();
    check_len(d, u.dim())?;
    let ops = frame.operators();
    let n = ops.len();
    let rotated: Vec<HermitianOperator> = ops.iter().map(|p| p.conjugate_by(u)).collect();
    let mut out = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            out[j * n + i] = trace_product(rotated[i].matrix(), ops[j].matrix()).re / d as f64;
        }
    }
    Ok(out)
}

/// `p'(j) = Σ_i [(d+1) p(i) - 1/d] u(j|i)`.
pub fn evolve<F: OperatorFrame + ?Sized>(
    p: &[f64],
    u: &UnitaryOperator,
    frame: &F,
) -> Result<ProbVector> {
    let n = frame.operators().len();
    check_len(n, p.len())?;
    let um = evolution_matrix(u, frame)?;
    for k in 0..n {
        let row: f64 = um[k * n..(k + 1) * n].iter().sum();
        let col: f64 = (0..n).map(|j| um[j * n + k]).sum();
        if (row - 1.0).abs() > TAU_PROB || (col - 1.0).abs() > TAU_PROB {
            return Err(QplexError::ConstraintViolation(format!(
                "transition matrix is not doubly stochastic (row {row}, column {col})"
            )));
        }
    }
    let d = frame.dim() as f64;
    let weights: Vec<f64> = p.iter().map(|x| (d + 1.0) * x - 1.0 / d).collect();
    let q = (0..n)
        .map(|j| dot(&weights, &um[j * n..(j + 1) * n]))
        .collect();
    ProbVector::new(q)
}

/// `Tr(ρσ) = d(d+1)<p,s> - 1`.
pub fn hs_from_probs(p: &[f64], s: &[f64], params: &DimensionParams) -> Result<f64> {
    check_len(params.n, p.len())?;
    check_len(params.n, s.len())?;
    let d = params.d as f64;
    Ok(d * (d + 1.0) * dot(p, s) - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, max_abs_diff, random_density, random_pure_vector, rng};
    use crate::sic::{build_quasi_sic, sic_from_fiducial, triple_products, SicFiducial, SicSystem};

    fn qubit() -> SicSystem {
        sic_from_fiducial(&SicFiducial::qubit_tetrahedral()).unwrap()
    }

    fn qutrit() -> SicSystem {
        sic_from_fiducial(&SicFiducial::qutrit_exact()).unwrap()
    }

    fn basis_projectors(d: usize, seed: u64) -> Vec<HermitianOperator> {
        let u = haar_unitary(d, seed).unwrap();
        (0..d)
            .map(|k| HermitianOperator::outer(&u.matrix().column(k).into_owned()))
            .collect()
    }

    #[test]
    fn params_relations() {
        for d in 2..=16 {
            let p = DimensionParams::new(d).unwrap();
            assert!((p.alpha - (p.n as f64 * p.beta + 1.0)).abs() < 1e-14);
            assert!((p.upper - 2.0 * p.lower).abs() < 1e-16);
            assert_eq!(p.n as f64, (p.alpha - 1.0).powi(2));
        }
        assert!(DimensionParams::new(1).is_err());
    }

    #[test]
    fn prob_vector_validation() {
        assert!(ProbVector::new(vec![0.5, 0.5]).is_ok());
        let err = ProbVector::new(vec![1.2, -0.2]).unwrap_err();
        assert!(err.to_string().contains("entry 1"));
        assert!(ProbVector::new(vec![0.5, 0.4]).is_err());
        let dust = ProbVector::new(vec![1.0 + 1e-12, -1e-12]).unwrap();
        assert_eq!(dust[1], 0.0);
        assert!((dust.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sic_projector_maps_to_basis_distribution() {
        let sys = qutrit();
        let params = DimensionParams::new(3).unwrap();
        for k in 0..9 {
            let rho = DensityOperator::new(sys.projectors()[k].clone()).unwrap();
            let p = state_to_prob(&rho, &sys).unwrap();
            let e = params.basis_distribution(k);
            for i in 0..9 {
                assert!((p[i] - e[i]).abs() < 1e-14);
            }
            assert!((p[k] - 1.0 / 3.0).abs() < 1e-14);
            let back = prob_to_operator(&e, &sys).unwrap();
            assert!(max_abs_diff(back.matrix(), sys.projectors()[k].matrix()) < 1e-13);
        }
    }

    #[test]
    fn maximally_mixed_is_flat() {
        let sys = qubit();
        let p = state_to_prob(&DensityOperator::maximally_mixed(2), &sys).unwrap();
        for x in p.iter() {
            assert!((x - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn pure_state_quadratic_condition() {
        let sys = qutrit();
        let mut g = rng(17, 0);
        for _ in 0..20 {
            let rho = DensityOperator::pure(&random_pure_vector(3, &mut g)).unwrap();
            let p = state_to_prob(&rho, &sys).unwrap();
            assert!((dot(&p, &p) - 2.0 / 12.0).abs() < 1e-10);
            let back = prob_to_operator(&p, &sys).unwrap();
            assert!(max_abs_diff(back.matrix(), rho.matrix()) < 1e-10);
        }
    }

    #[test]
    fn simplex_vertex_is_not_a_state() {
        let sys = qubit();
        let op = prob_to_operator(&ProbVector::vertex(4, 0), &sys).unwrap();
        assert!((op.trace() - 1.0).abs() < 1e-14);
        // 3Π_0 - I has eigenvalues 2 and -1
        assert!((op.min_eigenvalue() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let sys = qubit();
        assert!(matches!(
            prob_to_operator(&[0.5, 0.5], &sys),
            Err(QplexError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn validity_report_cases() {
        let sys = qutrit();
        let t = triple_products(&sys);
        let mut g = rng(2, 0);
        let rho = DensityOperator::pure(&random_pure_vector(3, &mut g)).unwrap();
        let p = state_to_prob(&rho, &sys).unwrap();
        let v = validate_state_vector(&p, &sys, &t).unwrap();
        assert!(v.quadratic_residual < 1e-8 && v.cubic_residual < 1e-8);
        assert!(v.min_eigenvalue > -1e-10);
        assert!(v.is_pure);

        let c = DimensionParams::new(3).unwrap().barycenter();
        let v = validate_state_vector(&c, &sys, &t).unwrap();
        assert!((v.quadratic_residual - (1.0 / 6.0 - 1.0 / 9.0)).abs() < 1e-15);
        assert!(v.is_quantum_state && !v.is_pure);
    }

    #[test]
    fn cubic_condition_separates_quasi_sic() {
        // e_k reconstructs to Π_k. For a genuine SIC that is a pure state and
        // both conditions hold; for the d=4 quasi-SIC the quadratic condition
        // still holds but the cubic one does not.
        let q = build_quasi_sic(4).unwrap();
        let t = triple_products(&q);
        let params = DimensionParams::new(4).unwrap();
        let k = (0..16)
            .min_by(|&a, &b| {
                q.operators()[a]
                    .min_eigenvalue()
                    .total_cmp(&q.operators()[b].min_eigenvalue())
            })
            .unwrap();
        let e = params.basis_distribution(k);
        let v = validate_state_vector(&e, &q, &t).unwrap();
        assert!(v.quadratic_residual < 1e-12);
        assert!(v.cubic_residual > 1e-6, "{v:?}");
        assert!(!v.is_quantum_state);

        let sys =
            sic_from_fiducial(&crate::sic::find_sic_fiducial(4, 1, 1e-20, 50).unwrap()).unwrap();
        let ts = triple_products(&sys);
        let v = validate_state_vector(&e, &sys, &ts).unwrap();
        assert!(v.is_pure && v.cubic_residual < 1e-10);
    }

    #[test]
    fn sic_measurement_reproduces_basis_distributions() {
        let sys = qutrit();
        let params = DimensionParams::new(3).unwrap();
        let effects: Vec<_> = sys
            .projectors()
            .iter()
            .map(|p| p.scale(1.0 / 3.0))
            .collect();
        let r = povm_to_measurement(&effects, &sys).unwrap();
        for j in 0..9 {
            let e = params.basis_distribution(j);
            for i in 0..9 {
                assert!((r.get(j, i) - e[i]).abs() < 1e-14);
            }
        }
        let trivial = povm_to_measurement(&[HermitianOperator::identity(3)], &sys).unwrap();
        assert_eq!(trivial.outcomes(), 1);
        assert!(trivial.row(0).iter().all(|x| (x - 1.0).abs() < 1e-14));
    }

    #[test]
    fn projective_measurement_columns_sum_to_one() {
        let sys = qubit();
        let r = povm_to_measurement(&basis_projectors(2, 4), &sys).unwrap();
        for i in 0..4 {
            assert!(((0..2).map(|j| r.get(j, i)).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn povm_errors() {
        let sys = qubit();
        let half = HermitianOperator::identity(2).scale(0.5);
        assert!(povm_to_measurement(std::slice::from_ref(&half), &sys).is_err());
        let neg = HermitianOperator::identity(2).scale(-0.5);
        assert!(povm_to_measurement(&[neg, half.scale(3.0)], &sys).is_err());
    }

    #[test]
    fn urgleichung_cases() {
        let sys = qutrit();
        let params = DimensionParams::new(3).unwrap();
        let mut g = rng(21, 0);
        let rho = DensityOperator::pure(&random_pure_vector(3, &mut g)).unwrap();
        let p = state_to_prob(&rho, &sys).unwrap();

        let same = urgleichung(&p, &params.sic_measurement(), &params).unwrap();
        for i in 0..9 {
            assert!((same.q[i] - p[i]).abs() < 1e-14);
        }

        let effects = basis_projectors(3, 9);
        let r = povm_to_measurement(&effects, &sys).unwrap();
        for k in 0..9 {
            let q = urgleichung(&params.basis_distribution(k), &r, &params).unwrap();
            for j in 0..3 {
                assert!((q.q[j] - r.get(j, k)).abs() < 1e-14);
            }
        }
        let q = urgleichung(&p, &r, &params).unwrap();
        assert!(q.consistent);
        for (j, e) in effects.iter().enumerate() {
            let born = trace_product(rho.matrix(), e.matrix()).re;
            assert!((q.q[j] - born).abs() < 1e-12);
        }
        assert!(urgleichung(&p[..4], &r, &params).is_err());
    }

    #[test]
    fn urgleichung_flags_inconsistent_pairs() {
        let sys = qubit();
        let params = DimensionParams::new(2).unwrap();
        // a simplex vertex is outside quantum state space: against the
        // measurement {Π_0, I - Π_0} it predicts q = (2, -1)
        let p0 = sys.projectors()[0].clone();
        let comp = HermitianOperator::combination(
            &[1.0, -1.0],
            &[HermitianOperator::identity(2), p0.clone()],
        )
        .unwrap();
        let r = povm_to_measurement(&[p0, comp], &sys).unwrap();
        let out = urgleichung(&ProbVector::vertex(4, 0), &r, &params).unwrap();
        assert!(!out.consistent);
        assert!((out.min_entry + 1.0).abs() < 1e-12);
        assert!(out.into_prob().is_err());
    }

    #[test]
    fn reference_rules_cases() {
        let sys = qubit();
        let params = DimensionParams::new(2).unwrap();
        let r = povm_to_measurement(&basis_projectors(2, 5), &sys).unwrap();
        let c = params.barycenter();
        let classical = reference_rules(&c, &r, ReferenceRule::Classical, &params).unwrap();
        for j in 0..2 {
            assert!((classical.q[j] - r.gamma()[j]).abs() < 1e-15);
        }
        let mut g = rng(6, 0);
        let rho = DensityOperator::pure(&random_pure_vector(2, &mut g)).unwrap();
        let p = state_to_prob(&rho, &sys).unwrap();
        let vn = reference_rules(&p, &r, ReferenceRule::VonNeumann, &params).unwrap();
        let ur = urgleichung(&p, &r, &params).unwrap();
        let cl = reference_rules(&p, &r, ReferenceRule::Classical, &params).unwrap();
        for j in 0..2 {
            assert!((vn.q[j] - ur.q[j]).abs() < 1e-14);
        }
        assert!((0..2).any(|j| (cl.q[j] - ur.q[j]).abs() > 1e-3));
        let sic_r = params.sic_measurement();
        assert!(reference_rules(&p, &sic_r, ReferenceRule::VonNeumann, &params).is_err());
    }

    #[test]
    fn classical_limit_of_general_urgleichung() {
        // α = 1, β = 0 is exactly the law of total probability
        let params = DimensionParams::new(2).unwrap();
        let sys = qubit();
        let r = povm_to_measurement(&basis_projectors(2, 2), &sys).unwrap();
        let classical_params = GeneralParams {
            n: 4,
            alpha: 1.0,
            beta: 0.0,
            lower: 0.0,
            upper: 1.0,
            m_max: 4.0,
        };
        let p = [0.1, 0.2, 0.3, 0.4];
        let a = urgleichung(&p, &r, &classical_params).unwrap();
        let b = reference_rules(&p, &r, ReferenceRule::Classical, &params).unwrap();
        assert_eq!(a.q, b.q);
    }

    #[test]
    fn evolution_cases() {
        let sys = qutrit();
        let mut g = rng(31, 0);
        let rho = random_density(3, 2, 4).unwrap();
        let p = state_to_prob(&rho, &sys).unwrap();
        let same = evolve(&p, &UnitaryOperator::identity(3), &sys).unwrap();
        for i in 0..9 {
            assert!((same[i] - p[i]).abs() < 1e-14);
        }
        let u = crate::linalg::haar_unitary_from(3, &mut g).unwrap();
        let moved = evolve(&p, &u, &sys).unwrap();
        let oracle = state_to_prob(&rho.conjugate_by(&u), &sys).unwrap();
        for i in 0..9 {
            assert!((moved[i] - oracle[i]).abs() < 1e-12);
        }
        let um = evolution_matrix(&u, &sys).unwrap();
        for k in 0..9 {
            assert!((um[k * 9..(k + 1) * 9].iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(((0..9).map(|j| um[j * 9 + k]).sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!(evolve(&p, &UnitaryOperator::identity(2), &sys).is_err());
    }

    #[test]
    fn inner_product_formula() {
        let sys = qutrit();
        let params = DimensionParams::new(3).unwrap();
        let mut g = rng(12, 0);
        let v = random_pure_vector(3, &mut g);
        let rho = DensityOperator::pure(&v).unwrap();
        let p = state_to_prob(&rho, &sys).unwrap();
        assert!((hs_from_probs(&p, &p, &params).unwrap() - 1.0).abs() < 1e-12);

        // an orthogonal partner: any vector orthogonal to v
        let mut w = random_pure_vector(3, &mut g);
        let proj = v.dotc(&w);
        w -= &v * proj;
        let sigma = DensityOperator::pure(&w).unwrap();
        let s = state_to_prob(&sigma, &sys).unwrap();
        assert!(hs_from_probs(&p, &s, &params).unwrap().abs() < 1e-12);
        assert!(hs_from_probs(&p, &s[..4], &params).is_err());
        assert!((dot(&p, &s) - params.lower).abs() < 1e-12);

        let a = random_density(3, 3, 1).unwrap();
        let b = random_density(3, 2, 2).unwrap();
        let pa = state_to_prob(&a, &sys).unwrap();
        let pb = state_to_prob(&b, &sys).unwrap();
        let direct = crate::linalg::hs_inner(a.operator(), b.operator()).unwrap();
        assert!((hs_from_probs(&pa, &pb, &params).unwrap() - direct).abs() < 1e-12);
    }
}
