//! Minimization over density matrices.
//!
//! A state on `C^d` is parametrized as `σ = L L† / tr(L L†)` with `L` lower
//! triangular: `d` real diagonal entries followed by the real and imaginary
//! parts of the strictly lower entries, `d²` reals in all. The objective
//! supplies its gradient with respect to σ and the chain rule through the
//! normalization gives the gradient in `L`. Descent is BFGS with a weak
//! Wolfe line search.

use nalgebra::{Cholesky, DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::tensor::linalg::{self, c, CMat};
use crate::tensor::random::{ginibre, trial_rng};
use crate::tensor::DensityOperator;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct OptConfig {
    pub starts: usize,
    pub grad_tol: f64,
    pub value_tol: f64,
    pub max_iter: usize,
    /// Seeds the random starting points.
    pub seed: u64,
    /// Run starts on the rayon pool.
    pub parallel: bool,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            starts: 8,
            grad_tol: 1e-9,
            value_tol: 1e-12,
            max_iter: 10_000,
            seed: 0,
            parallel: true,
        }
    }
}

impl OptConfig {
    /// Fewer starts for sweeps that evaluate many instances.
    pub fn sweep() -> Self {
        Self {
            starts: 2,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// A factor is trivial and the value is exact.
    Trivial,
    /// Closed-form von Neumann expression.
    ClosedForm,
    /// Multi-start BFGS.
    QuasiNewton,
    /// Minimization restricted to diagonal σ.
    Diagonal,
    /// Random net plus pattern search.
    BruteForce,
}

/// The result of an inner optimization over σ.
#[derive(Clone, Debug)]
pub struct OptimizedValue {
    pub value: f64,
    pub optimizer: DensityOperator,
    pub residual: f64,
    pub method: Method,
}

pub(crate) struct Minimum {
    pub value: f64,
    pub sigma: CMat,
    pub residual: f64,
}

/// Objective returning the value and the (Hermitian) gradient in σ, or
/// `None` where it is undefined.
pub(crate) trait StateObjective: Sync {
    fn eval(&self, sigma: &CMat) -> Option<(f64, CMat)>;
}

impl<F> StateObjective for F
where
    F: Fn(&CMat) -> Option<(f64, CMat)> + Sync,
{
    fn eval(&self, sigma: &CMat) -> Option<(f64, CMat)> {
        self(sigma)
    }
}

fn unpack(x: &[f64], d: usize) -> CMat {
    let mut l = CMat::zeros(d, d);
    for i in 0..d {
        l[(i, i)] = c(x[i], 0.0);
    }
    let mut k = d;
    for i in 0..d {
        for j in 0..i {
            l[(i, j)] = c(x[k], x[k + 1]);
            k += 2;
        }
    }
    l
}

fn pack(l: &CMat) -> Vec<f64> {
    let d = l.nrows();
    let mut x = Vec::with_capacity(d * d);
    for i in 0..d {
        x.push(l[(i, i)].re);
    }
    for i in 0..d {
        for j in 0..i {
            x.push(l[(i, j)].re);
            x.push(l[(i, j)].im);
        }
    }
    x
}

fn sigma_of(l: &CMat) -> (CMat, f64) {
    let p = l * l.adjoint();
    let t = linalg::trace(&p).re;
    (p.unscale(t), t)
}

/// Lower-triangular factor of a slightly smoothed `guess`.
fn factor_of(guess: &CMat) -> CMat {
    let d = guess.nrows();
    let smoothed = linalg::hermitize(guess).scale(1.0 - 1e-3) + linalg::maximally_mixed(d).scale(1e-3);
    match Cholesky::new(smoothed) {
        Some(ch) => ch.l(),
        None => linalg::identity(d),
    }
}

fn param_objective<'a, O: StateObjective + ?Sized>(
    obj: &'a O,
    d: usize,
) -> impl Fn(&[f64]) -> Option<(f64, Vec<f64>)> + 'a {
    move |x: &[f64]| {
        let l = unpack(x, d);
        let (sigma, t) = sigma_of(&l);
        if !(t > 0.0) || !t.is_finite() {
            return None;
        }
        let (v, g) = obj.eval(&sigma)?;
        if !v.is_finite() {
            return None;
        }
        let shift = linalg::trace(&(&g * &sigma)).re;
        let gp = (g - linalg::identity(d).scale(shift)).unscale(t);
        let gl = (gp * &l).scale(2.0);
        let grad = pack(&gl);
        if grad.iter().any(|v| !v.is_finite()) {
            return None;
        }
        Some((v, grad))
    }
}

struct BfgsOut {
    x: Vec<f64>,
    value: f64,
    residual: f64,
    converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn bfgs<F>(f: &F, x0: Vec<f64>, cfg: &OptConfig) -> Option<BfgsOut>
where
    F: Fn(&[f64]) -> Option<(f64, Vec<f64>)>,
{
    let n = x0.len();
    let (mut fx, mut g) = f(&x0)?;
    let mut x = x0;
    let mut h = DMatrix::<f64>::identity(n, n);
    let mut fresh = true;
    let mut quiet = 0usize;
    for _ in 0..cfg.max_iter {
        let gn = inf_norm(&g);
        if gn <= cfg.grad_tol {
            return Some(BfgsOut { x, value: fx, residual: gn, converged: true });
        }
        let gv = DVector::from_column_slice(&g);
        let mut dir: Vec<f64> = (-(&h * &gv)).iter().copied().collect();
        let mut slope = dot(&dir, &g);
        if !(slope < 0.0) {
            h = DMatrix::identity(n, n);
            dir = g.iter().map(|v| -v).collect();
            slope = dot(&dir, &g);
            fresh = true;
        }
        let Some((xn, fxn, gn_vec)) = wolfe(f, &x, fx, slope, &dir) else {
            if !fresh {
                h = DMatrix::identity(n, n);
                fresh = true;
                continue;
            }
            // no decrease is possible at working precision
            return Some(BfgsOut { x, value: fx, residual: gn, converged: gn <= 1e-5 });
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn_vec.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if fresh {
                let scale = sy / dot(&y, &y);
                h = DMatrix::identity(n, n).scale(scale);
                fresh = false;
            }
            let sv = DVector::from_column_slice(&s);
            let yv = DVector::from_column_slice(&y);
            let hy = &h * &yv;
            let yhy = yv.dot(&hy);
            let coef = (sy + yhy) / (sy * sy);
            h += &sv * sv.transpose() * coef;
            h -= (&hy * sv.transpose() + &sv * hy.transpose()) / sy;
        }
        let change = (fx - fxn).abs();
        x = xn;
        g = gn_vec;
        let prev = fx;
        fx = fxn;
        if change <= cfg.value_tol * prev.abs().max(1.0) {
            quiet += 1;
            if quiet >= 2 {
                return Some(BfgsOut { x, value: fx, residual: change, converged: true });
            }
        } else {
            quiet = 0;
        }
    }
    let residual = inf_norm(&g);
    Some(BfgsOut { x, value: fx, residual, converged: false })
}

/// Weak Wolfe line search by bracketing and bisection.
fn wolfe<F>(f: &F, x: &[f64], fx: f64, slope: f64, dir: &[f64]) -> Option<(Vec<f64>, f64, Vec<f64>)>
where
    F: Fn(&[f64]) -> Option<(f64, Vec<f64>)>,
{
    const C1: f64 = 1e-4;
    const C2: f64 = 0.9;
    let mut lo = 0.0;
    let mut hi = f64::INFINITY;
    let mut t = 1.0;
    let mut best: Option<(Vec<f64>, f64, Vec<f64>)> = None;
    for _ in 0..80 {
        let xt: Vec<f64> = x.iter().zip(dir).map(|(a, d)| a + t * d).collect();
        match f(&xt) {
            Some((ft, gt)) if ft <= fx + C1 * t * slope => {
                if dot(&gt, dir) < C2 * slope {
                    lo = t;
                    best = Some((xt, ft, gt));
                } else {
                    return Some((xt, ft, gt));
                }
            }
            _ => hi = t,
        }
        t = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * lo.max(t) };
        if hi.is_finite() && hi - lo < 1e-16 * (1.0 + lo) {
            break;
        }
    }
    // an Armijo point is still progress
    best.filter(|b| b.1 < fx)
}

/// Multi-start minimization of `obj` over states on `C^d`. The winner is the
/// converged start with the smallest value, ties going to the lower index.
pub(crate) fn minimize_states<O: StateObjective + ?Sized>(
    obj: &O,
    d: usize,
    guesses: &[CMat],
    cfg: &OptConfig,
) -> Result<Minimum> {
    let total = cfg.starts.max(1);
    let mut starts: Vec<CMat> = guesses.iter().take(total).map(factor_of).collect();
    for k in starts.len()..total {
        let mut rng = trial_rng(cfg.seed, k as u64);
        let g = ginibre(&mut rng, d, d);
        let (sigma, _) = sigma_of(&g);
        starts.push(factor_of(&sigma));
    }
    let f = param_objective(obj, d);
    let run = |l: &CMat| bfgs(&f, pack(l), cfg);
    let results: Vec<Option<BfgsOut>> = if cfg.parallel && starts.len() > 1 {
        starts.par_iter().map(run).collect()
    } else {
        starts.iter().map(run).collect()
    };
    let mut best: Option<&BfgsOut> = None;
    let mut fallback: Option<&BfgsOut> = None;
    for r in results.iter().flatten() {
        let slot = if r.converged { &mut best } else { &mut fallback };
        if slot.map_or(true, |b| r.value < b.value) {
            *slot = Some(r);
        }
    }
    match best {
        Some(b) => {
            let (sigma, _) = sigma_of(&unpack(&b.x, d));
            Ok(Minimum { value: b.value, sigma, residual: b.residual })
        }
        None => Err(Error::NonConvergence {
            best: fallback.map_or(f64::NAN, |b| b.value),
            residual: fallback.map_or(f64::NAN, |b| b.residual),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pack_round_trip() {
        let mut rng = trial_rng(1, 1);
        let g = ginibre(&mut rng, 3, 3);
        let l = CMat::from_fn(3, 3, |i, j| if i > j { g[(i, j)] } else if i == j { c(g[(i, j)].re, 0.0) } else { c(0.0, 0.0) });
        assert_eq!(unpack(&pack(&l), 3), l);
    }

    #[test]
    fn linear_objective_finds_smallest_eigenvector() {
        // f(σ) = tr(Hσ) is minimized by the ground state of H
        let h = linalg::diag(&[2.0, -1.0, 0.5]);
        let obj = |s: &CMat| Some((linalg::trace(&(&h * s)).re, h.clone()));
        let m = minimize_states(&obj, 3, &[], &OptConfig::default()).unwrap();
        assert!((m.value + 1.0).abs() < 1e-7, "{}", m.value);
    }

    #[test]
    fn parameter_gradient_matches_finite_differences() {
        let h = CMat::from_fn(3, 3, |i, j| c((i + 2 * j) as f64 * 0.1, (i as f64 - j as f64) * 0.2));
        let h = linalg::hermitize(&h);
        // a nonlinear objective: tr(Hσ)² + tr σ²
        let obj = |s: &CMat| {
            let a = linalg::trace(&(&h * s)).re;
            let b = linalg::trace(&(s * s)).re;
            Some((a * a + b, h.scale(2.0 * a) + s.scale(2.0)))
        };
        let f = param_objective(&obj, 3);
        let x: Vec<f64> = (0..9).map(|k| 0.3 + 0.1 * k as f64).collect();
        let (_, g) = f(&x).unwrap();
        for k in 0..9 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += 1e-6;
            xm[k] -= 1e-6;
            let fd = (f(&xp).unwrap().0 - f(&xm).unwrap().0) / 2e-6;
            assert!((fd - g[k]).abs() < 1e-7, "param {k}: {fd} vs {}", g[k]);
        }
    }
}
