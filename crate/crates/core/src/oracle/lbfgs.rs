//! Limited-memory BFGS with a strong-Wolfe line search.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy)]
pub struct LbfgsOptions {
    pub memory: usize,
    pub max_iter: usize,
    /// Stop once `max |g_i| <= gtol`.
    pub gtol: f64,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self { memory: 30, max_iter: 20_000, gtol: 1e-9 }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_inf: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective value after every accepted step, starting point first.
    pub history: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `fg(x, g)` writes the gradient into `g` and returns the objective.
pub fn minimize<F>(mut fg: F, x0: &[f64], opts: &LbfgsOptions) -> Minimum
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut f = fg(&x, &mut g);
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut history = vec![f];
    let mut d = vec![0.0; n];
    let mut xn = vec![0.0; n];
    let mut gn = vec![0.0; n];

    for iter in 0..opts.max_iter {
        let gi = inf_norm(&g);
        if gi <= opts.gtol {
            return Minimum { x, f, grad_inf: gi, iterations: iter, converged: true, history };
        }
        two_loop(&g, &pairs, &mut d);
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            pairs.clear();
            d.iter_mut().zip(&g).for_each(|(d, g)| *d = -g);
            slope = dot(&g, &d);
        }
        let step0 = if pairs.is_empty() { (1.0 / inf_norm(&d)).min(1.0) } else { 1.0 };
        let Some((alpha, fnew)) = wolfe(&mut fg, &x, f, slope, &d, step0, &mut xn, &mut gn) else {
            if pairs.is_empty() {
                return Minimum { x, f, grad_inf: gi, iterations: iter, converged: false, history };
            }
            pairs.clear();
            continue;
        };
        let s: Vec<f64> = d.iter().map(|v| alpha * v).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if pairs.len() == opts.memory {
                pairs.pop_front();
            }
            pairs.push_back((s, y, 1.0 / sy));
        }
        std::mem::swap(&mut x, &mut xn);
        std::mem::swap(&mut g, &mut gn);
        f = fnew;
        history.push(f);
    }
    let gi = inf_norm(&g);
    Minimum { x, f, grad_inf: gi, iterations: opts.max_iter, converged: gi <= opts.gtol, history }
}

fn two_loop(g: &[f64], pairs: &VecDeque<(Vec<f64>, Vec<f64>, f64)>, d: &mut [f64]) {
    d.iter_mut().zip(g).for_each(|(d, g)| *d = -g);
    let mut alphas = Vec::with_capacity(pairs.len());
    for (s, y, rho) in pairs.iter().rev() {
        let a = rho * dot(s, d);
        d.iter_mut().zip(y).for_each(|(d, y)| *d -= a * y);
        alphas.push(a);
    }
    if let Some((s, y, _)) = pairs.back() {
        let gamma = dot(s, y) / dot(y, y);
        d.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), a) in pairs.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, d);
        d.iter_mut().zip(s).for_each(|(d, s)| *d += (a - b) * s);
    }
}

const C1: f64 = 1e-4;
const C2: f64 = 0.9;

/// Relative slack on the objective in the approximate Wolfe test; a few
/// hundred times the evaluation noise of the penalised ribbon energy.
pub const APPROX_WOLFE_EPS: f64 = 1e-12;

/// Approximate Wolfe test: once the objective is flat to rounding, accept a
/// step on curvature information alone.
fn approx_wolfe(f0: f64, slope0: f64, fa: f64, sa: f64) -> bool {
    fa <= f0 + APPROX_WOLFE_EPS * f0.abs() && sa >= C2 * slope0 && sa <= (2.0 * C1 - 1.0) * slope0
}

/// Strong-Wolfe search along `d`. On success `xn`/`gn` hold the accepted
/// point and its gradient.
#[allow(clippy::too_many_arguments)]
fn wolfe<F>(
    fg: &mut F,
    x: &[f64],
    f0: f64,
    slope0: f64,
    d: &[f64],
    step0: f64,
    xn: &mut [f64],
    gn: &mut [f64],
) -> Option<(f64, f64)>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let mut eval = |a: f64, xn: &mut [f64], gn: &mut [f64]| {
        xn.iter_mut().zip(x.iter().zip(d)).for_each(|(xn, (x, d))| *xn = x + a * d);
        let f = fg(xn, gn);
        (f, dot(gn, d))
    };
    let (mut a_prev, mut f_prev, mut s_prev) = (0.0, f0, slope0);
    let mut a = step0;
    for i in 0..40 {
        let (fa, sa) = eval(a, xn, gn);
        if fa.is_finite() && approx_wolfe(f0, slope0, fa, sa) {
            return Some((a, fa));
        }
        if !fa.is_finite() || fa > f0 + C1 * a * slope0 || (i > 0 && fa >= f_prev) {
            return zoom(&mut eval, f0, slope0, (a_prev, f_prev, s_prev), (a, fa, sa), xn, gn);
        }
        if sa.abs() <= -C2 * slope0 {
            return Some((a, fa));
        }
        if sa >= 0.0 {
            return zoom(&mut eval, f0, slope0, (a, fa, sa), (a_prev, f_prev, s_prev), xn, gn);
        }
        (a_prev, f_prev, s_prev) = (a, fa, sa);
        a *= 2.0;
    }
    None
}

fn zoom<E>(
    eval: &mut E,
    f0: f64,
    slope0: f64,
    mut lo: (f64, f64, f64),
    mut hi: (f64, f64, f64),
    xn: &mut [f64],
    gn: &mut [f64],
) -> Option<(f64, f64)>
where
    E: FnMut(f64, &mut [f64], &mut [f64]) -> (f64, f64),
{
    for _ in 0..60 {
        let a = interpolate(lo, hi);
        if (hi.0 - lo.0).abs() <= 1e-16 * lo.0.abs().max(hi.0.abs()) {
            break;
        }
        let (fa, sa) = eval(a, xn, gn);
        if fa.is_finite() && approx_wolfe(f0, slope0, fa, sa) {
            return Some((a, fa));
        }
        if !fa.is_finite() || fa > f0 + C1 * a * slope0 || fa >= lo.1 {
            hi = (a, fa, sa);
        } else {
            if sa.abs() <= -C2 * slope0 {
                return Some((a, fa));
            }
            if sa * (hi.0 - lo.0) >= 0.0 {
                hi = lo;
            }
            lo = (a, fa, sa);
        }
    }
    // fall back to the best sufficient-decrease point seen
    if lo.0 > 0.0 && lo.1 < f0 {
        let (fa, _) = eval(lo.0, xn, gn);
        return Some((lo.0, fa));
    }
    None
}

/// Cubic interpolation through both end points, safeguarded to the middle
/// 80% of the bracket. When the two objective values agree to rounding the
/// cubic is fitted to noise, so a secant step on the slopes is taken instead.
fn interpolate(lo: (f64, f64, f64), hi: (f64, f64, f64)) -> f64 {
    let (a0, f0, s0) = lo;
    let (a1, f1, s1) = hi;
    let (left, right) = (a0.min(a1), a0.max(a1));
    let width = right - left;
    if (f1 - f0).abs() <= 1e-12 * f0.abs().max(f1.abs()) && s1 != s0 {
        let a = a0 - s0 * (a1 - a0) / (s1 - s0);
        if a.is_finite() {
            return a.clamp(left + 1e-3 * width, right - 1e-3 * width);
        }
    }
    let d1 = s0 + s1 - 3.0 * (f0 - f1) / (a0 - a1);
    let disc = d1 * d1 - s0 * s1;
    let mut a = 0.5 * (a0 + a1);
    if disc >= 0.0 {
        let d2 = (a1 - a0).signum() * disc.sqrt();
        let c = a1 - (a1 - a0) * (s1 + d2 - d1) / (s1 - s0 + 2.0 * d2);
        if c.is_finite() {
            a = c;
        }
    }
    a.clamp(left + 0.1 * width, right - 0.1 * width)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let fg = |x: &[f64], g: &mut [f64]| {
            let (a, b) = (x[0], x[1]);
            g[0] = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
            g[1] = 200.0 * (b - a * a);
            (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
        };
        let m = minimize(fg, &[-1.2, 1.0], &LbfgsOptions::default());
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-8 && (m.x[1] - 1.0).abs() < 1e-8, "{:?}", m.x);
        assert!(m.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn ill_conditioned_quadratic() {
        let scales: Vec<f64> = (0..50).map(|i| 10f64.powf(i as f64 / 49.0 * 6.0)).collect();
        let fg = |x: &[f64], g: &mut [f64]| {
            let mut f = 0.0;
            for i in 0..x.len() {
                g[i] = scales[i] * (x[i] - 1.0);
                f += 0.5 * scales[i] * (x[i] - 1.0).powi(2);
            }
            f
        };
        let m = minimize(fg, &vec![0.0; 50], &LbfgsOptions { gtol: 1e-10, ..Default::default() });
        assert!(m.converged, "{} {}", m.iterations, m.grad_inf);
        assert!(m.x.iter().all(|v| (v - 1.0).abs() < 1e-9));
    }
}
