//! Smallest eigenpair of the symmetric-definite pencil `A x = λ D x`, with
//! `A` symmetric tridiagonal and `D` positive diagonal.
//!
//! The pencil is reduced to the standard form `D^-1/2 A D^-1/2` (still
//! tridiagonal). Small systems go through a dense symmetric eigensolver;
//! larger ones, or a dense failure, use Sturm-sequence bisection followed by
//! inverse iteration.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{HcmError, Result};

pub const DENSE_LIMIT: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenRoute {
    Dense,
    Bisection,
}

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    /// Eigenvector of the original pencil (not of the reduced matrix).
    pub vector: Vec<f64>,
    pub route: EigenRoute,
}

#[derive(Debug, Clone)]
pub struct TridiagPencil {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    pub weight: Vec<f64>,
}

impl TridiagPencil {
    fn check(&self) -> Result<()> {
        let n = self.diag.len();
        if n == 0 || self.weight.len() != n || self.off.len() + 1 != n {
            return Err(HcmError::EigenFailure("inconsistent pencil dimensions".into()));
        }
        if self.weight.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(HcmError::EigenFailure("weight matrix is singular".into()));
        }
        if self.diag.iter().chain(&self.off).any(|v| !v.is_finite()) {
            return Err(HcmError::EigenFailure("non-finite stiffness entry".into()));
        }
        Ok(())
    }

    /// Diagonal and off-diagonal of `D^-1/2 A D^-1/2`.
    fn reduced(&self) -> (Vec<f64>, Vec<f64>) {
        let s: Vec<f64> = self.weight.iter().map(|w| w.sqrt()).collect();
        let d = self.diag.iter().zip(&self.weight).map(|(a, w)| a / w).collect();
        let e = self.off.iter().enumerate().map(|(i, b)| b / (s[i] * s[i + 1])).collect();
        (d, e)
    }

    pub fn smallest(&self) -> Result<Eigenpair> {
        self.check()?;
        if self.diag.len() <= DENSE_LIMIT {
            if let Ok(p) = self.smallest_dense() {
                return Ok(p);
            }
        }
        self.smallest_bisection()
    }

    pub fn smallest_dense(&self) -> Result<Eigenpair> {
        self.check()?;
        let (d, e) = self.reduced();
        let n = d.len();
        let m = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                d[i]
            } else if i + 1 == j {
                e[i]
            } else if j + 1 == i {
                e[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::try_new(m, f64::EPSILON, 10_000)
            .ok_or_else(|| HcmError::EigenFailure("dense eigensolver did not converge".into()))?;
        let (idx, value) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or_else(|| HcmError::EigenFailure("empty spectrum".into()))?;
        let y: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        self.finish(value, y, EigenRoute::Dense)
    }

    pub fn smallest_bisection(&self) -> Result<Eigenpair> {
        self.check()?;
        let (d, e) = self.reduced();
        let n = d.len();
        // Gershgorin bounds
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
            lo = lo.min(d[i] - r);
            hi = hi.max(d[i] + r);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(&d, &e, mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let value = 0.5 * (lo + hi);
        let y = inverse_iteration(&d, &e, value)?;
        self.finish(value, y, EigenRoute::Bisection)
    }

    fn finish(&self, value: f64, y: Vec<f64>, route: EigenRoute) -> Result<Eigenpair> {
        if !(value.is_finite() && value > 0.0) {
            return Err(HcmError::EigenFailure(format!("no positive eigenvalue (smallest {value})")));
        }
        let mut x: Vec<f64> = y.iter().zip(&self.weight).map(|(v, w)| v / w.sqrt()).collect();
        let peak = x.iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
        if peak == 0.0 || !peak.is_finite() {
            return Err(HcmError::EigenFailure("degenerate eigenvector".into()));
        }
        x.iter_mut().for_each(|v| *v /= peak);
        Ok(Eigenpair { value, vector: x, route })
    }
}

/// Number of eigenvalues strictly below `x`.
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        let denom = if q == 0.0 { f64::EPSILON * (e[i - 1].abs() + 1.0) } else { q };
        q = d[i] - x - e[i - 1] * e[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn inverse_iteration(d: &[f64], e: &[f64], shift: f64) -> Result<Vec<f64>> {
    let n = d.len();
    // nudge the shift off the eigenvalue so the factorisation stays regular
    let scale = d.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let sigma = shift - 1e-10 * scale;
    let mut y = vec![1.0; n];
    for _ in 0..8 {
        y = solve_tridiag(d, e, sigma, &y)?;
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(HcmError::EigenFailure("inverse iteration broke down".into()));
        }
        y.iter_mut().for_each(|v| *v /= norm);
    }
    Ok(y)
}

/// Thomas algorithm for `(T - sigma I) x = rhs`.
fn solve_tridiag(d: &[f64], e: &[f64], sigma: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    let mut c = vec![0.0; n];
    let mut r = vec![0.0; n];
    let mut b = d[0] - sigma;
    if b == 0.0 {
        return Err(HcmError::EigenFailure("singular shifted system".into()));
    }
    if n > 1 {
        c[0] = e[0] / b;
    }
    r[0] = rhs[0] / b;
    for i in 1..n {
        b = d[i] - sigma - e[i - 1] * c[i - 1];
        if b == 0.0 {
            return Err(HcmError::EigenFailure("singular shifted system".into()));
        }
        if i + 1 < n {
            c[i] = e[i] / b;
        }
        r[i] = (rhs[i] - e[i - 1] * r[i - 1]) / b;
    }
    for i in (0..n - 1).rev() {
        r[i] -= c[i] * r[i + 1];
    }
    Ok(r)
}
