use rayon::prelude::*;

use super::OperatorFrame;
use crate::linalg::{trace_product, CMatrix};

/// `c_ijk = Re Tr(Π_i Π_j Π_k)`, stored densely as an `N x N x N` array.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleProducts {
    dim: usize,
    n: usize,
    data: Vec<f64>,
}

impl TripleProducts {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    /// `Σ_ijk c_ijk p(i) p(j) p(k)`.
    pub fn cubic_form(&self, p: &[f64]) -> f64 {
        let n = self.n;
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let pij = p[i] * p[j];
                let row = &self.data[(i * n + j) * n..(i * n + j + 1) * n];
                total += pij * row.iter().zip(p).map(|(c, pk)| c * pk).sum::<f64>();
            }
        }
        total
    }
}

pub fn triple_products<F: OperatorFrame + ?Sized>(frame: &F) -> TripleProducts {
    let ops = frame.operators();
    let n = ops.len();
    let mut data = vec![0.0; n * n * n];
    // products Π_i Π_j for i <= j
    let rows: Vec<(usize, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; n * n];
            for j in i..n {
                let pij: CMatrix = ops[i].matrix() * ops[j].matrix();
                for k in j..n {
                    row[j * n + k] = trace_product(&pij, ops[k].matrix()).re;
                }
            }
            (i, row)
        })
        .collect();
    for (i, row) in rows {
        for j in i..n {
            for k in j..n {
                let v = row[j * n + k];
                for (a, b, c) in [
                    (i, j, k),
                    (i, k, j),
                    (j, i, k),
                    (j, k, i),
                    (k, i, j),
                    (k, j, i),
                ] {
                    data[(a * n + b) * n + c] = v;
                }
            }
        }
    }
    TripleProducts {
        dim: frame.dim(),
        n,
        data,
    }
}
