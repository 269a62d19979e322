//! Conjugate gradients with a symmetric SOR preconditioner, in natural node
//! order so that every run is bit-for-bit reproducible.

use super::mesh::{System, NONE};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) struct CgOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// Final relative residual `|b - A u| / |b|`.
    pub residual: f64,
    /// `J(u_k) = u_k^T A u_k / 2 - b^T u_k` after every iteration.
    pub energy_trace: Vec<f64>,
}

impl System {
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for k in 0..self.diag.len() {
            let mut s = self.diag[k] * x[k];
            for (&m, &c) in self.nbr[k].iter().zip(&self.cond[k]) {
                if m != NONE {
                    s -= c * x[m as usize];
                }
            }
            out[k] = s;
        }
    }

    /// `z = M^{-1} r` for the SSOR splitting with relaxation `omega`.
    fn precondition(&self, omega: f64, r: &[f64], z: &mut [f64]) {
        let n = self.diag.len();
        for k in 0..n {
            let mut s = r[k];
            for (&m, &c) in self.nbr[k].iter().zip(&self.cond[k]) {
                if m != NONE && (m as usize) < k {
                    s += c * z[m as usize];
                }
            }
            z[k] = omega * s / self.diag[k];
        }
        let scale = (2.0 - omega) / omega;
        for (zk, d) in z.iter_mut().zip(&self.diag) {
            *zk *= scale * d / omega;
        }
        for k in (0..n).rev() {
            let mut s = z[k];
            for (&m, &c) in self.nbr[k].iter().zip(&self.cond[k]) {
                if m != NONE && (m as usize) > k {
                    s += c * z[m as usize];
                }
            }
            z[k] = omega * s / self.diag[k];
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn solve(sys: &System, tolerance: f64, max_iterations: usize) -> Result<CgOutcome> {
    let n = sys.diag.len();
    let omega = 1.9;
    let mut u = vec![0.0; n];
    let mut r = sys.rhs.clone();
    let b_norm = dot(&r, &r).sqrt();
    if b_norm == 0.0 || n == 0 {
        return Ok(CgOutcome {
            solution: u,
            iterations: 0,
            residual: 0.0,
            energy_trace: Vec::new(),
        });
    }
    let mut z = vec![0.0; n];
    sys.precondition(omega, &r, &mut z);
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut trace = Vec::new();
    for it in 1..=max_iterations {
        sys.apply(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            return Err(Error::SolverStagnation {
                iterations: it,
                residual: dot(&r, &r).sqrt() / b_norm,
            });
        }
        let alpha = rz / pq;
        for k in 0..n {
            u[k] += alpha * p[k];
            r[k] -= alpha * q[k];
        }
        // with A u = b - r the quadratic functional is -(b + r) . u / 2
        trace.push(-0.5 * (dot(&sys.rhs, &u) + dot(&r, &u)));
        let residual = dot(&r, &r).sqrt() / b_norm;
        if residual <= tolerance {
            return Ok(CgOutcome {
                solution: u,
                iterations: it,
                residual,
                energy_trace: trace,
            });
        }
        sys.precondition(omega, &r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    Err(Error::SolverStagnation {
        iterations: max_iterations,
        residual: dot(&r, &r).sqrt() / b_norm,
    })
}
