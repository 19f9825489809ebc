//! Multi-start fiducial search.
//!
//! The objective is `Σ_{(a,b)≠(0,0)} (|<ψ|D_ab|ψ>|²/‖ψ‖⁴ - 1/(d+1))²`, which is
//! zero exactly on SIC fiducials. The global phase is removed by keeping the
//! first amplitude real, so the search runs over `2d - 1` real parameters.

use rayon::prelude::*;

use super::{SicFiducial, WHGroup};
use crate::error::{QplexError, Result};
use crate::linalg::{random_pure_vector, rng, CVector, C64};
use crate::optimize::{lbfgs, LbfgsOptions};
use crate::tol::TAU_EQ;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Required defect: the search succeeds once `sic_defect < tol`.
    pub tol: f64,
    pub max_restarts: usize,
    /// Iteration cap of each local minimization.
    pub max_iter: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            tol: 1e-20,
            max_restarts: 50,
            max_iter: 5000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub fiducial: SicFiducial,
    pub defect: f64,
    /// Index of the successful restart (zero-based).
    pub restart: usize,
}

/// `τ^{ab} ω^{bk}` for every `(a, b, k)`.
struct PhaseTable {
    d: usize,
    phases: Vec<C64>,
}

impl PhaseTable {
    fn new(d: usize) -> Self {
        let g = WHGroup::new(d);
        let mut phases = Vec::with_capacity(d * d * d);
        for a in 0..d {
            for b in 0..d {
                let t = g.tau_pow(a * b);
                for k in 0..d {
                    phases.push(t * g.omega_pow(b * k));
                }
            }
        }
        PhaseTable { d, phases }
    }

    #[inline]
    fn at(&self, a: usize, b: usize, k: usize) -> C64 {
        self.phases[(a * self.d + b) * self.d + k]
    }

    /// Objective value and, if requested, the Wirtinger gradient `∂f/∂ψ̄`.
    fn evaluate(&self, psi: &[C64], mut grad: Option<&mut [C64]>) -> f64 {
        let d = self.d;
        let target = 1.0 / (d as f64 + 1.0);
        let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        let n2 = n * n;
        let n3 = n2 * n;
        if let Some(g) = grad.as_deref_mut() {
            g.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        }
        let mut value = 0.0;
        for a in 0..d {
            for b in 0..d {
                if a == 0 && b == 0 {
                    continue;
                }
                let mut z = C64::new(0.0, 0.0);
                for k in 0..d {
                    z += psi[(k + a) % d].conj() * self.at(a, b, k) * psi[k];
                }
                let w = z.norm_sqr() / n2;
                let r = w - target;
                value += r * r;
                if let Some(g) = grad.as_deref_mut() {
                    let coef = 2.0 * r;
                    let zc = z.conj();
                    for k in 0..d {
                        let ph = self.at(a, b, k);
                        // (Dψ)_{k+a} = ph ψ_k ; (D^†ψ)_k = conj(ph) ψ_{k+a}
                        g[(k + a) % d] += zc * ph * psi[k] * (coef / n2);
                        g[k] += z * ph.conj() * psi[(k + a) % d] * (coef / n2);
                        g[k] -= psi[k] * (coef * 2.0 * z.norm_sqr() / n3);
                    }
                }
            }
        }
        value
    }
}

pub(crate) fn defect_unchecked(psi: &CVector) -> f64 {
    PhaseTable::new(psi.len()).evaluate(psi.as_slice(), None)
}

/// Sum of squared deviations of the Weyl-Heisenberg orbit overlaps of `psi`
/// from `1/(d+1)`. Zero exactly when the orbit is a SIC.
pub fn sic_defect(psi: &CVector) -> Result<f64> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > TAU_EQ {
        return Err(QplexError::NotNormalized { norm });
    }
    Ok(defect_unchecked(psi))
}

/// Defect together with its gradient `∂f/∂ψ̄` (treating `ψ` and `ψ̄` as
/// independent). The defect is scale invariant, so the gradient is orthogonal
/// to `ψ`.
pub fn sic_defect_gradient(psi: &CVector) -> (f64, CVector) {
    let table = PhaseTable::new(psi.len());
    let mut g = vec![C64::new(0.0, 0.0); psi.len()];
    let v = table.evaluate(psi.as_slice(), Some(&mut g));
    (v, CVector::from_vec(g))
}

fn params_to_psi(x: &[f64], d: usize, psi: &mut [C64]) {
    psi[0] = C64::new(x[0], 0.0);
    for k in 1..d {
        psi[k] = C64::new(x[k], x[d - 1 + k]);
    }
}

fn local_search(
    d: usize,
    table: &PhaseTable,
    start: &CVector,
    opts: &SearchOptions,
) -> (CVector, f64) {
    // rotate the global phase so the first amplitude is real
    let phase = if start[0].norm() > 0.0 {
        start[0].conj() / start[0].norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let mut x0 = vec![0.0; 2 * d - 1];
    x0[0] = (start[0] * phase).re;
    for k in 1..d {
        let z = start[k] * phase;
        x0[k] = z.re;
        x0[d - 1 + k] = z.im;
    }
    let mut psi = vec![C64::new(0.0, 0.0); d];
    let mut wgrad = vec![C64::new(0.0, 0.0); d];
    let objective = |x: &[f64], grad: &mut [f64]| {
        params_to_psi(x, d, &mut psi);
        let v = table.evaluate(&psi, Some(&mut wgrad));
        grad[0] = 2.0 * wgrad[0].re;
        for k in 1..d {
            grad[k] = 2.0 * wgrad[k].re;
            grad[d - 1 + k] = 2.0 * wgrad[k].im;
        }
        v
    };
    let lopts = LbfgsOptions {
        max_iter: opts.max_iter,
        target: opts.tol * 1e-2,
        ..LbfgsOptions::default()
    };
    let min = lbfgs(objective, x0, lopts);
    log::trace!(
        "local search: {} iterations, defect {:e}",
        min.iterations,
        min.value
    );
    let mut out = vec![C64::new(0.0, 0.0); d];
    params_to_psi(&min.x, d, &mut out);
    let v = CVector::from_vec(out);
    let v = v.unscale(v.norm());
    let defect = table.evaluate(v.as_slice(), None);
    (v, defect)
}

/// Multi-start search. Restart `r` starts from a Haar-random vector drawn
/// from stream `r` of `seed`; the lowest successful restart index wins, so
/// the result does not depend on the thread count.
pub fn search_fiducial(d: usize, seed: u64, opts: &SearchOptions) -> Result<SearchOutcome> {
    if d < 2 {
        return Err(QplexError::InvalidArgument(
            "fiducial search needs d >= 2".into(),
        ));
    }
    if opts.max_restarts == 0 {
        return Err(QplexError::InvalidArgument(
            "max_restarts must be >= 1".into(),
        ));
    }
    let table = PhaseTable::new(d);
    let batch = rayon::current_num_threads().max(1);
    let mut best = f64::INFINITY;
    let mut start = 0;
    while start < opts.max_restarts {
        let end = (start + batch).min(opts.max_restarts);
        let results: Vec<(usize, CVector, f64)> = (start..end)
            .into_par_iter()
            .map(|r| {
                let mut g = rng(seed, r as u64);
                let init = random_pure_vector(d, &mut g);
                let (v, f) = local_search(d, &table, &init, opts);
                (r, v, f)
            })
            .collect();
        for (r, v, f) in results {
            if f < opts.tol {
                return Ok(SearchOutcome {
                    fiducial: SicFiducial::new(v)?,
                    defect: f,
                    restart: r,
                });
            }
            best = best.min(f);
        }
        start = end;
    }
    Err(QplexError::SearchFailed {
        restarts: opts.max_restarts,
        best_defect: best,
    })
}

pub fn find_sic_fiducial(
    d: usize,
    seed: u64,
    tol: f64,
    max_restarts: usize,
) -> Result<SicFiducial> {
    let opts = SearchOptions {
        tol,
        max_restarts,
        ..SearchOptions::default()
    };
    search_fiducial(d, seed, &opts).map(|o| o.fiducial)
}
