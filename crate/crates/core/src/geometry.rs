//! Convex geometry of qplexes in the `N = d²` outcome simplex.
//!
//! Every point `p` of a qplex satisfies the fundamental inequalities
//! `L ≤ <p,s> ≤ U` against every other point `s` (and itself). The
//! distinguished spheres about the barycenter `c` have squared radii
//!
//! * out-sphere `S_o`: `r_o² = (N-1)/(N α²)` (the basis distributions lie on it),
//! * in-sphere `S_i`: `r_i² = 1/(N(N-1))`,
//! * mid-sphere `S_m`: `r_m² = 1/(N α)`,
//!
//! with `r_i r_o = r_m²`.

use rayon::prelude::*;

use crate::error::{QplexError, Result};
use crate::rep::{dot, DimensionParams, ProbVector};
use crate::tol::TAU_PROB;

/// Point sets below this size are checked on one thread.
const PARALLEL_THRESHOLD: usize = 512;
/// At most this many violating pairs are recorded in a report.
const MAX_RECORDED_VIOLATIONS: usize = 1024;
/// Sets up to this size get exhaustive maximal-clique enumeration.
const EXHAUSTIVE_MMD_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct QplexGeometry {
    pub params: DimensionParams,
    pub c: ProbVector,
    pub basis: Vec<ProbVector>,
    pub r_o2: f64,
    pub r_i2: f64,
    pub r_m2: f64,
}

impl QplexGeometry {
    pub fn r_o(&self) -> f64 {
        self.r_o2.sqrt()
    }

    pub fn r_i(&self) -> f64 {
        self.r_i2.sqrt()
    }

    pub fn r_m(&self) -> f64 {
        self.r_m2.sqrt()
    }

    /// `‖p - c‖²`.
    pub fn dist2_from_center(&self, p: &[f64]) -> f64 {
        let cval = 1.0 / self.params.n as f64;
        p.iter().map(|x| (x - cval) * (x - cval)).sum()
    }
}

pub fn make_geometry(params: DimensionParams) -> QplexGeometry {
    let n = params.n as f64;
    let a = params.alpha;
    QplexGeometry {
        c: params.barycenter(),
        basis: (0..params.n)
            .map(|k| params.basis_distribution(k))
            .collect(),
        r_o2: (n - 1.0) / (n * a * a),
        r_i2: 1.0 / (n * (n - 1.0)),
        r_m2: 1.0 / (n * a),
        params,
    }
}

/// A finite list of probability vectors of common length, with labels.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    n: usize,
    points: Vec<ProbVector>,
    labels: Vec<String>,
}

impl PointSet {
    pub fn new(n: usize) -> Self {
        PointSet {
            n,
            points: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn from_points(n: usize, points: Vec<ProbVector>) -> Result<Self> {
        let mut set = PointSet::new(n);
        for (i, p) in points.into_iter().enumerate() {
            set.push(p, format!("p{i}"))?;
        }
        Ok(set)
    }

    pub fn push(&mut self, p: ProbVector, label: impl Into<String>) -> Result<()> {
        if p.len() != self.n {
            return Err(QplexError::DimensionMismatch {
                expected: self.n,
                found: p.len(),
            });
        }
        self.points.push(p);
        self.labels.push(label.into());
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ProbVector] {
        &self.points
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize) -> &ProbVector {
        &self.points[i]
    }

    /// The first `len` points.
    pub fn prefix(&self, len: usize) -> PointSet {
        PointSet {
            n: self.n,
            points: self.points[..len].to_vec(),
            labels: self.labels[..len].to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairVerdict {
    pub inner: f64,
    pub consistent: bool,
}

pub fn check_pair(p: &[f64], s: &[f64], params: &DimensionParams, tol: f64) -> Result<PairVerdict> {
    if p.len() != s.len() {
        return Err(QplexError::DimensionMismatch {
            expected: p.len(),
            found: s.len(),
        });
    }
    let inner = dot(p, s);
    Ok(PairVerdict {
        inner,
        consistent: inner >= params.lower - tol && inner <= params.upper + tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub i: usize,
    pub j: usize,
    pub inner: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub pass: bool,
    /// Up to the first 1024 violating pairs in row-major order.
    pub violations: Vec<Violation>,
    pub violation_count: usize,
    pub min_inner: f64,
    pub max_inner: f64,
}

struct PartialReport {
    violations: Vec<Violation>,
    count: usize,
    min: f64,
    max: f64,
}

impl PartialReport {
    fn empty() -> Self {
        PartialReport {
            violations: Vec::new(),
            count: 0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }

    fn merge(mut self, other: PartialReport) -> Self {
        self.count += other.count;
        self.min = self.min.min(other.min);
        self.max = self.max.max(other.max);
        let room = MAX_RECORDED_VIOLATIONS.saturating_sub(self.violations.len());
        self.violations
            .extend(other.violations.into_iter().take(room));
        self
    }
}

fn row_report(set: &PointSet, i: usize, lo: f64, hi: f64) -> PartialReport {
    let mut r = PartialReport::empty();
    let p = set.get(i);
    for j in i..set.len() {
        let v = dot(p, set.get(j));
        r.min = r.min.min(v);
        r.max = r.max.max(v);
        if v < lo || v > hi {
            r.count += 1;
            if r.violations.len() < MAX_RECORDED_VIOLATIONS {
                r.violations.push(Violation { i, j, inner: v });
            }
        }
    }
    r
}

/// Checks the fundamental inequalities on every pair, self-pairs included.
pub fn is_germ(set: &PointSet, params: &DimensionParams, tol: f64) -> ConsistencyReport {
    let lo = params.lower - tol;
    let hi = params.upper + tol;
    let merged = if set.len() < PARALLEL_THRESHOLD {
        (0..set.len())
            .map(|i| row_report(set, i, lo, hi))
            .fold(PartialReport::empty(), PartialReport::merge)
    } else {
        // rows are merged in index order, so the recorded violations do not
        // depend on scheduling
        let parts: Vec<PartialReport> = (0..set.len())
            .into_par_iter()
            .map(|i| row_report(set, i, lo, hi))
            .collect();
        parts
            .into_iter()
            .fold(PartialReport::empty(), PartialReport::merge)
    };
    ConsistencyReport {
        pass: merged.count == 0,
        violations: merged.violations,
        violation_count: merged.count,
        min_inner: merged.min,
        max_inner: merged.max,
    }
}

/// `|<u,c> - 1/N|`, after checking lengths.
fn hyperplane_offset(u: &[f64], params: &DimensionParams) -> Result<f64> {
    if u.len() != params.n {
        return Err(QplexError::DimensionMismatch {
            expected: params.n,
            found: u.len(),
        });
    }
    let n = params.n as f64;
    Ok((u.iter().sum::<f64>() / n - 1.0 / n).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarVerdict {
    pub member: bool,
    /// `min_v <u, v>` over the set (`+∞` for an empty set).
    pub min_inner: f64,
    /// Index attaining the minimum.
    pub argmin: Option<usize>,
}

/// Whether `u ∈ H` belongs to the polar `{u : <u,v> ≥ 1/(d(d+1)) ∀ v}` of
/// the set.
pub fn polar_membership(
    u: &[f64],
    set: &PointSet,
    params: &DimensionParams,
    tol: f64,
) -> Result<PolarVerdict> {
    let offset = hyperplane_offset(u, params)?;
    if offset > TAU_PROB {
        return Err(QplexError::NotOnHyperplane { offset });
    }
    let mut min_inner = f64::INFINITY;
    let mut argmin = None;
    for (i, v) in set.points().iter().enumerate() {
        let ip = dot(u, v);
        if ip < min_inner {
            min_inner = ip;
            argmin = Some(i);
        }
    }
    Ok(PolarVerdict {
        member: min_inner >= params.lower - tol,
        min_inner,
        argmin,
    })
}

/// `c - (r_o r_i/‖s-c‖²)(s - c)`.
pub fn polar_point(s: &[f64], params: &DimensionParams) -> Result<Vec<f64>> {
    let offset = hyperplane_offset(s, params)?;
    if offset > TAU_PROB {
        return Err(QplexError::NotOnHyperplane { offset });
    }
    let geom = make_geometry(*params);
    let d2 = geom.dist2_from_center(s);
    if d2 < 1e-30 {
        return Err(QplexError::Undefined(
            "the polar point of the barycenter is undefined".into(),
        ));
    }
    let k = geom.r_o() * geom.r_i() / d2;
    let cval = 1.0 / params.n as f64;
    Ok(s.iter().map(|x| cval - k * (x - cval)).collect())
}

/// `<u,s> - 1/(d(d+1))`; zero exactly on the polar hyperplane `H_s`.
pub fn polar_hyperplane_gap(u: &[f64], s: &[f64], params: &DimensionParams) -> f64 {
    dot(u, s) - params.lower
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub max_entry: f64,
    pub argmax: usize,
    /// `max_entry ≤ 1/d + tol`.
    pub max_entry_ok: bool,
    pub zero_count: usize,
    /// `zero_count ≤ d(d-1)/2`.
    pub zero_count_ok: bool,
    /// Whether the max entry equals `1/d` within [`SATURATION_TOL`].
    pub saturates: bool,
    /// For a saturating vector, `max_{i≠argmax} |p(i) - 1/(d(d+1))|`.
    pub rest_deviation: Option<f64>,
}

/// Entries of magnitude at most this are counted as zero.
pub const ZERO_TOL: f64 = 1e-12;
/// Maximum-entry saturation window.
pub const SATURATION_TOL: f64 = 1e-12;

impl BoundsReport {
    pub fn passed(&self) -> bool {
        self.max_entry_ok && self.zero_count_ok
    }
}

/// Max-entry and zero-count bounds for a point of a germ.
pub fn vector_bounds(p: &[f64], params: &DimensionParams, tol: f64) -> BoundsReport {
    let d = params.d as f64;
    let (argmax, max_entry) =
        p.iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
            );
    let zero_count = p.iter().filter(|x| x.abs() <= ZERO_TOL).count();
    let saturates = (max_entry - 1.0 / d).abs() <= SATURATION_TOL;
    let rest_deviation = saturates.then(|| {
        p.iter()
            .enumerate()
            .filter(|(i, _)| *i != argmax)
            .map(|(_, x)| (x - params.lower).abs())
            .fold(0.0, f64::max)
    });
    BoundsReport {
        max_entry,
        argmax,
        max_entry_ok: max_entry <= 1.0 / d + tol,
        zero_count,
        zero_count_ok: zero_count <= params.d * (params.d - 1) / 2,
        saturates,
        rest_deviation,
    }
}

/// Membership in the principal envelope `Δ ∩ B_o`.
pub fn envelope_membership(p: &[f64], geom: &QplexGeometry, tol: f64) -> bool {
    p.len() == geom.params.n
        && p.iter().all(|&x| x >= -tol)
        && (p.iter().sum::<f64>() - 1.0).abs() <= tol.max(TAU_PROB)
        && geom.dist2_from_center(p) <= geom.r_o2 + tol
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StemStatus {
    Member,
    NonMember,
    Indeterminate,
}

/// Witness `p ≈ λ Σ_k w_k e_k + (1-λ) y` with `‖y - c‖ ≤ r_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StemVerdict {
    pub status: StemStatus,
    pub residual: f64,
    pub lambda: f64,
    pub weights: Vec<f64>,
    pub y: Vec<f64>,
    pub iterations: usize,
}

/// Euclidean projection onto the probability simplex.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, x) in u.iter().enumerate() {
        cumsum += x;
        let t = (cumsum - 1.0) / (k as f64 + 1.0);
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

fn project_to_ball(v: &[f64], center: f64, radius: f64) -> Vec<f64> {
    let dist = v.iter().map(|x| (x - center).powi(2)).sum::<f64>().sqrt();
    if dist <= radius {
        return v.to_vec();
    }
    let k = radius / dist;
    v.iter().map(|x| center + k * (x - center)).collect()
}

fn norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Membership in the principal stem: the convex hull of the basis simplex
/// and the in-ball. Solved by alternating exact minimization over `y`
/// (projection onto `B_i`), `w` (projection onto the simplex) and `λ`
/// (line minimization). Residuals in `[tol, 10 tol]` are indeterminate.
pub fn stem_membership(
    p: &[f64],
    geom: &QplexGeometry,
    tol: f64,
    max_iter: usize,
) -> Result<StemVerdict> {
    let params = geom.params;
    let n = params.n;
    if p.len() != n {
        return Err(QplexError::DimensionMismatch {
            expected: n,
            found: p.len(),
        });
    }
    let (alpha, beta) = (params.alpha, params.beta);
    let cval = 1.0 / n as f64;
    let r_i = geom.r_i();
    let basis_point = |w: &[f64]| -> Vec<f64> { w.iter().map(|x| (x + beta) / alpha).collect() };

    // start from the best pure-ball and pure-simplex candidates
    let y_only = project_to_ball(p, cval, r_i);
    let w_only = project_to_simplex(&p.iter().map(|x| alpha * x - beta).collect::<Vec<_>>());
    let mut y = y_only.clone();
    let mut w = w_only;
    let mut lambda = 0.5;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut stalled = false;

    let combined = |lambda: f64, x: &[f64], y: &[f64]| -> Vec<f64> {
        x.iter()
            .zip(y)
            .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
            .collect()
    };

    while iterations < max_iter {
        iterations += 1;
        let x = basis_point(&w);
        // λ step
        let dx: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        let dd = dot(&dx, &dx);
        if dd > 0.0 {
            let py: Vec<f64> = p.iter().zip(&y).map(|(a, b)| a - b).collect();
            lambda = (dot(&py, &dx) / dd).clamp(0.0, 1.0);
        }
        // w step
        if lambda > 0.0 {
            let target: Vec<f64> = p
                .iter()
                .zip(&y)
                .map(|(a, b)| alpha * (a - (1.0 - lambda) * b) / lambda - beta)
                .collect();
            w = project_to_simplex(&target);
        }
        let x = basis_point(&w);
        // y step
        if lambda < 1.0 {
            let target: Vec<f64> = p
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - lambda * b) / (1.0 - lambda))
                .collect();
            y = project_to_ball(&target, cval, r_i);
        }
        let r = norm_diff(p, &combined(lambda, &x, &y));
        let improvement = residual - r;
        residual = residual.min(r);
        if residual < tol {
            break;
        }
        if improvement.abs() <= 1e-15 * residual.max(1e-300) {
            stalled = true;
            break;
        }
    }

    let status = if residual < tol {
        StemStatus::Member
    } else if residual > 10.0 * tol && stalled {
        StemStatus::NonMember
    } else {
        StemStatus::Indeterminate
    };
    Ok(StemVerdict {
        status,
        residual,
        lambda,
        weights: w,
        y,
        iterations,
    })
}

/// Maximal subsets of points pairwise at inner product `L` (mutually
/// maximally distant). Only points on the out-sphere within `tol` take part.
///
/// Sets of at most 64 candidates are enumerated exhaustively; larger sets
/// use a greedy extension from each candidate in input order, which returns
/// maximal but not necessarily all maximal subsets.
pub fn find_mmd_sets(set: &PointSet, params: &DimensionParams, tol: f64) -> Vec<Vec<usize>> {
    let geom = make_geometry(*params);
    let candidates: Vec<usize> = (0..set.len())
        .filter(|&i| (geom.dist2_from_center(set.get(i)).sqrt() - geom.r_o()).abs() <= tol)
        .collect();
    let m = candidates.len();
    let adjacent: Vec<Vec<bool>> = candidates
        .iter()
        .map(|&i| {
            candidates
                .iter()
                .map(|&j| i != j && (dot(set.get(i), set.get(j)) - params.lower).abs() <= tol)
                .collect()
        })
        .collect();

    let mut out: Vec<Vec<usize>> = Vec::new();
    if m <= EXHAUSTIVE_MMD_LIMIT {
        let mut cliques = Vec::new();
        bron_kerbosch(
            &adjacent,
            Vec::new(),
            (0..m).collect(),
            Vec::new(),
            &mut cliques,
        );
        out = cliques;
    } else {
        for start in 0..m {
            let mut clique = vec![start];
            for (cand, row) in adjacent.iter().enumerate() {
                if cand != start && clique.iter().all(|&k| row[k]) {
                    clique.push(cand);
                }
            }
            clique.sort_unstable();
            if !out.contains(&clique) {
                out.push(clique);
            }
        }
    }
    let mut mapped: Vec<Vec<usize>> = out
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|k| candidates[k]).collect();
            v.sort_unstable();
            v
        })
        .collect();
    mapped.sort();
    mapped
}

fn bron_kerbosch(
    adj: &[Vec<bool>],
    r: Vec<usize>,
    mut p: Vec<usize>,
    mut x: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r);
        return;
    }
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
        .expect("p or x is non-empty");
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    for v in candidates {
        let mut r2 = r.clone();
        r2.push(v);
        let p2 = p.iter().copied().filter(|&u| adj[v][u]).collect();
        let x2 = x.iter().copied().filter(|&u| adj[v][u]).collect();
        bron_kerbosch(adj, r2, p2, x2, out);
        p.retain(|&u| u != v);
        x.push(v);
    }
}
