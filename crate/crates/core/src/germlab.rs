//! Constructions beyond quantum state space: generalized parameters,
//! non-isomorphic germs on the out-sphere, greedy growth of a non-quantum
//! germ, the eigenvalue lemma behind quasi-SIC symmetry, and effective
//! population sizes.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{QplexError, Result};
use crate::geometry::{PointSet, QplexGeometry};
use crate::linalg::rng;
use crate::rep::{dot, GeneralParams, ProbVector};

/// Relative tolerance of the equality flags in [`GeneralizedReport`].
const FLAG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralizedReport {
    pub params: GeneralParams,
    /// `U = 2L`.
    pub upper_is_twice_lower: bool,
    /// `N = (α - 1)²`.
    pub quantum_count: bool,
    /// Whether `m_max` is an integer.
    pub m_max_integral: bool,
}

impl GeneralizedReport {
    pub fn quantum(&self) -> bool {
        self.upper_is_twice_lower && self.quantum_count
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= FLAG_TOL * a.abs().max(b.abs()).max(1.0)
}

pub fn generalized_params(n: usize, alpha: f64) -> Result<GeneralizedReport> {
    let params = GeneralParams::new(n, alpha)?;
    Ok(GeneralizedReport {
        params,
        upper_is_twice_lower: close(params.upper, 2.0 * params.lower),
        quantum_count: close(n as f64, (alpha - 1.0) * (alpha - 1.0)),
        m_max_integral: close(params.m_max, params.m_max.round()),
    })
}

/// `c + cos θ (e_1 - c) + sin θ (e_2 - c)`, rescaled about `c` onto the
/// out-sphere. The two offsets are not orthogonal, so the raw combination
/// falls short of `S_o` by `sin 2θ / (d²(d+1)²)` in squared radius.
pub fn theta_family(geom: &QplexGeometry, theta: f64) -> ProbVector {
    let n = geom.params.n;
    let c = 1.0 / n as f64;
    let (s, co) = theta.sin_cos();
    let offset: Vec<f64> = (0..n)
        .map(|i| co * (geom.basis[0][i] - c) + s * (geom.basis[1][i] - c))
        .collect();
    let scale = (geom.r_o2 / dot(&offset, &offset)).sqrt();
    ProbVector::new(offset.iter().map(|x| c + scale * x).collect())
        .expect("small rotations of e_1 stay in the simplex")
}

/// Accepted and rejected counts of one permutation region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionStats {
    /// `perm[r]` is the index of the `r`-th largest entry.
    pub permutation: Vec<usize>,
    pub accepted: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthState {
    pub d: usize,
    pub seed: u64,
    pub accepted: PointSet,
    pub rejected: usize,
    /// Simplex draws discarded for lying outside the out-ball.
    pub outside_ball: usize,
    pub draws: usize,
    /// Occupied regions in processing order.
    pub regions: Vec<RegionStats>,
    pub tol: f64,
    lower: f64,
}

impl GrowthState {
    pub fn new(d: usize, seed: u64, tol: f64) -> Self {
        let df = d as f64;
        GrowthState {
            d,
            seed,
            accepted: PointSet::new(d * d),
            rejected: 0,
            outside_ball: 0,
            draws: 0,
            regions: Vec::new(),
            tol,
            lower: 1.0 / (df * (df + 1.0)),
        }
    }

    /// Accepts `p` if it is consistent with itself and every accepted point.
    /// Points of the out-ball never exceed the upper bound, so only the lower
    /// one is tested against other points.
    pub fn offer(&mut self, p: ProbVector) -> Result<bool> {
        let upper = 2.0 * self.lower;
        let own = dot(&p, &p);
        let ok = own <= upper + self.tol
            && own >= self.lower - self.tol
            && self.accepted.points().iter().all(|s| {
                let v = dot(&p, s);
                v >= self.lower - self.tol && v <= upper + self.tol
            });
        if ok {
            let label = format!("g{}", self.accepted.len());
            self.accepted.push(p, label)?;
        } else {
            self.rejected += 1;
        }
        Ok(ok)
    }
}

/// Indices sorted by decreasing entry, ties broken by index.
pub fn sorting_permutation(p: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.sort_by(|&a, &b| p[b].total_cmp(&p[a]).then(a.cmp(&b)));
    idx
}

/// Draws uniform points of the simplex, keeps those in the out-ball, sorts
/// them into permutation regions and processes occupied regions in
/// lexicographic order of their permutation (the decreasing region first),
/// accepting each candidate consistent with everything accepted so far.
///
/// Sampling stops after `n_candidates` in-ball candidates or
/// `1000 · n_candidates` draws, whichever comes first.
pub fn grow_sorted_qplex(
    d: usize,
    n_candidates: usize,
    seed: u64,
    tol: f64,
) -> Result<GrowthState> {
    if d < 2 {
        return Err(QplexError::InvalidArgument(format!("dimension {d} < 2")));
    }
    let n = d * d;
    let nf = n as f64;
    let df = d as f64;
    let r_o2 = (nf - 1.0) / (nf * (df + 1.0) * (df + 1.0));
    let mut state = GrowthState::new(d, seed, tol);
    let mut g = rng(seed, 0);
    let mut candidates: Vec<(Vec<usize>, Vec<f64>)> = Vec::with_capacity(n_candidates);
    let max_draws = n_candidates.saturating_mul(1000);
    while candidates.len() < n_candidates && state.draws < max_draws {
        state.draws += 1;
        let mut x: Vec<f64> = (0..n).map(|_| Exp1.sample(&mut g)).collect();
        let total: f64 = x.iter().sum();
        x.iter_mut().for_each(|v| *v /= total);
        let dist2: f64 = x.iter().map(|v| (v - 1.0 / nf).powi(2)).sum();
        if dist2 > r_o2 {
            state.outside_ball += 1;
            continue;
        }
        candidates.push((sorting_permutation(&x), x));
    }
    // stable, so draw order is kept within a region
    candidates.sort_by(|a, b| a.0.cmp(&b.0));
    for (perm, x) in candidates {
        if state.regions.last().map(|r| &r.permutation) != Some(&perm) {
            state.regions.push(RegionStats {
                permutation: perm,
                accepted: 0,
                rejected: 0,
            });
        }
        let accepted = state.offer(ProbVector::new(x)?)?;
        let region = state.regions.last_mut().expect("pushed above");
        if accepted {
            region.accepted += 1;
        } else {
            region.rejected += 1;
        }
    }
    Ok(state)
}

/// Eigenvalues with their sum and sum of squares.
#[derive(Debug, Clone, PartialEq)]
pub struct EigProfile {
    pub values: Vec<f64>,
    pub sum: f64,
    pub sum_sq: f64,
}

impl EigProfile {
    pub fn new(values: Vec<f64>) -> Self {
        EigProfile {
            sum: values.iter().sum(),
            sum_sq: values.iter().map(|x| x * x).sum(),
            values,
        }
    }

    /// `(1, 0, …, 0)`.
    pub fn first_family(d: usize) -> Self {
        let mut v = vec![0.0; d];
        v[0] = 1.0;
        EigProfile::new(v)
    }

    /// `(2/d, …, 2/d, 2/d - 1)`.
    pub fn second_family(d: usize) -> Self {
        let t = 2.0 / d as f64;
        let mut v = vec![t; d];
        v[d - 1] = t - 1.0;
        EigProfile::new(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqualityFamily {
    /// One eigenvalue 1, the rest 0.
    Projector,
    /// `d - 1` eigenvalues `2/d` and one `2/d - 1`.
    Reflected,
    /// Zero product on neither family.
    Unclassified,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaVerdict {
    /// `Σ_i λ↑_i λ↓_i`.
    pub product: f64,
    pub holds: bool,
    /// `Some` when the product is zero within tolerance.
    pub equality: Option<EqualityFamily>,
}

/// Checks `Σ λ↑ λ↓ ≤ 0` on the variety `Σλ = Σλ² = 1`.
pub fn spectra_lemma_check(profile: &EigProfile, tol: f64) -> Result<LemmaVerdict> {
    let d = profile.values.len();
    if d == 0 {
        return Err(QplexError::InvalidArgument("empty profile".into()));
    }
    if (profile.sum - 1.0).abs() >= tol.max(1e-12) || (profile.sum_sq - 1.0).abs() >= tol.max(1e-12)
    {
        return Err(QplexError::ConstraintViolation(format!(
            "sum {} and sum of squares {} must both be 1",
            profile.sum, profile.sum_sq
        )));
    }
    let mut up = profile.values.clone();
    up.sort_by(f64::total_cmp);
    let product: f64 = (0..d).map(|i| up[i] * up[d - 1 - i]).sum();
    let equality = (product.abs() <= tol).then(|| {
        let matches = |family: EigProfile| {
            let mut f = family.values;
            f.sort_by(f64::total_cmp);
            f.iter()
                .zip(&up)
                .all(|(a, b)| (a - b).abs() <= tol.max(1e-9))
        };
        if matches(EigProfile::first_family(d)) {
            EqualityFamily::Projector
        } else if matches(EigProfile::second_family(d)) {
            EqualityFamily::Reflected
        } else {
            EqualityFamily::Unclassified
        }
    });
    Ok(LemmaVerdict {
        product,
        holds: product <= tol,
        equality,
    })
}

/// A random point of `Σλ = Σλ² = 1`: a Gaussian draw projected onto the
/// sum-one plane and rescaled within it. `None` if the draw is degenerate.
pub fn sample_constraint_variety<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Option<EigProfile> {
    if d < 2 {
        return None;
    }
    let df = d as f64;
    let g: Vec<f64> = (0..d)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let mut u = unit_centered(&g)?;
    // second pass removes the rounding left by the first
    u = unit_centered(&u)?;
    let radius = (1.0 - 1.0 / df).sqrt();
    Some(EigProfile::new(
        u.iter().map(|x| 1.0 / df + radius * x).collect(),
    ))
}

fn unit_centered(v: &[f64]) -> Option<Vec<f64>> {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let centered: Vec<f64> = v.iter().map(|x| x - mean).collect();
    let norm = dot(&centered, &centered).sqrt();
    (norm >= 1e-6).then(|| centered.iter().map(|x| x / norm).collect())
}

/// `1/<p,p>`.
pub fn n_eff(p: &[f64]) -> Result<f64> {
    let q = dot(p, p);
    if q <= 0.0 {
        return Err(QplexError::Undefined(
            "zero vector has no effective size".into(),
        ));
    }
    Ok(1.0 / q)
}

/// `<p,s>/(<p,p><s,s>)`.
pub fn n_eff_pair(p: &[f64], s: &[f64]) -> Result<f64> {
    if p.len() != s.len() {
        return Err(QplexError::DimensionMismatch {
            expected: p.len(),
            found: s.len(),
        });
    }
    let pp = dot(p, p);
    let ss = dot(s, s);
    if pp <= 0.0 || ss <= 0.0 {
        return Err(QplexError::Undefined(
            "zero vector has no effective size".into(),
        ));
    }
    Ok(dot(p, s) / (pp * ss))
}
