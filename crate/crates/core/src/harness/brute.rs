//! Derivative-free oracle for `min_σ D̃_α(ρ_AB ‖ τ_A ⊗ σ_B)`.
//!
//! A random net of states is scored first; the best point is refined by
//! compass search on `σ = exp(H)/tr exp(H)` with `H` expanded in the
//! generalized Gell-Mann basis. Every value returned is attained by an
//! explicit σ, so it can never undercut the true minimum.

use crate::entropy::{sandwiched_matrix, Method, OptimizedValue};
use crate::tensor::linalg::{self, c, CMat, Eigh};
use crate::tensor::random::{random_state, trial_rng};
use crate::tensor::{DensityOperator, SystemSpace};
use crate::{Error, Result};

/// Largest `|B|` the oracle accepts.
pub const MAX_BRUTE_DIM: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BruteTarget {
    /// `τ = I_A`: the minimum is `−S̃_α(A|B)`.
    Conditional,
    /// `τ = ρ_A`: the minimum is `Ĩ_α(A;B)`.
    Mutual,
}

fn gell_mann(d: usize) -> Vec<CMat> {
    let mut out = Vec::new();
    for j in 0..d {
        for k in j + 1..d {
            let mut s = CMat::zeros(d, d);
            s[(j, k)] = c(1.0, 0.0);
            s[(k, j)] = c(1.0, 0.0);
            out.push(s);
            let mut a = CMat::zeros(d, d);
            a[(j, k)] = c(0.0, -1.0);
            a[(k, j)] = c(0.0, 1.0);
            out.push(a);
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut v = vec![0.0; d];
        v[..l].iter_mut().for_each(|x| *x = norm);
        v[l] = -(l as f64) * norm;
        out.push(linalg::diag(&v));
    }
    out
}

fn state_of(basis: &[CMat], coeffs: &[f64]) -> CMat {
    let d = basis.first().map_or(1, |b| b.nrows());
    let mut h = CMat::zeros(d, d);
    for (g, &x) in basis.iter().zip(coeffs) {
        h += g.scale(x);
    }
    let e = Eigh::new(&h);
    let top = e.values.first().copied().unwrap_or(0.0);
    let m = e.map(|x| (x - top).exp());
    let tr = linalg::trace(&m).re;
    m.unscale(tr)
}

fn coords_of(basis: &[CMat], sigma: &CMat) -> Vec<f64> {
    let floor = 1e-12;
    let log = Eigh::new(sigma).map(|x| x.max(floor).ln());
    basis.iter().map(|g| 0.5 * linalg::trace(&(&log * g)).re).collect()
}

/// Minimum of `D̃_α(ρ_AB ‖ τ_A ⊗ σ_B)` found with at most `budget`
/// divergence evaluations. The net holds a quarter of the budget.
pub fn brute_force_min_divergence(
    rho: &DensityOperator,
    a: &[&str],
    b: &[&str],
    alpha: f64,
    target: BruteTarget,
    budget: usize,
    seed: u64,
) -> Result<OptimizedValue> {
    if !(alpha >= 0.5) || !alpha.is_finite() {
        return Err(Error::usage(format!("the oracle needs α ≥ 1/2, got {alpha}")));
    }
    let labels: Vec<&str> = a.iter().chain(b).copied().collect();
    let ab = rho.marginal(&labels)?;
    let rho_b = ab.partial_trace(b)?;
    let db = rho_b.dim();
    if db > MAX_BRUTE_DIM {
        return Err(Error::Budget(format!("brute-force oracle needs |B| ≤ {MAX_BRUTE_DIM}, got {db}")));
    }
    let tau = match target {
        BruteTarget::Conditional => linalg::identity(ab.dim() / db),
        BruteTarget::Mutual => ab.partial_trace(a)?.matrix().clone(),
    };
    let eval = |s: &CMat| sandwiched_matrix(ab.matrix(), &linalg::kron(&tau, s), alpha);
    let mut used = 0usize;

    let mut best = rho_b.matrix().clone();
    let mut best_v = eval(&best)?;
    let consider = |s: CMat, best: &mut CMat, best_v: &mut f64| -> Result<()> {
        let v = eval(&s)?;
        if v < *best_v {
            *best_v = v;
            *best = s;
        }
        Ok(())
    };
    consider(linalg::maximally_mixed(db), &mut best, &mut best_v)?;
    used += 2;
    let mut rng = trial_rng(seed, 0);
    let space = SystemSpace::single("B", db)?;
    while used < (budget / 4).max(2) {
        consider(random_state(&mut rng, &space).matrix().clone(), &mut best, &mut best_v)?;
        used += 1;
    }

    let basis = gell_mann(db);
    let mut x = coords_of(&basis, &best);
    // the log map clips tiny eigenvalues, so rescore the reconstructed point
    let start = state_of(&basis, &x);
    let start_v = eval(&start)?;
    used += 1;
    if start_v <= best_v {
        best = start;
        best_v = start_v;
    }
    let mut step = 0.5;
    while used + 2 <= budget && step > 1e-9 && !basis.is_empty() {
        let mut improved = false;
        for i in 0..basis.len() {
            for sign in [1.0, -1.0] {
                if used >= budget {
                    break;
                }
                let mut y = x.clone();
                y[i] += sign * step;
                let s = state_of(&basis, &y);
                let v = eval(&s)?;
                used += 1;
                if v < best_v {
                    best_v = v;
                    best = s;
                    x = y;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(OptimizedValue {
        value: best_v,
        optimizer: DensityOperator::from_parts(rho_b.space().clone(), best),
        residual: step,
        method: Method::BruteForce,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{conditional_entropy, renyi_entropy, OptConfig};
    use crate::tensor::random::random_state;

    fn ab() -> SystemSpace {
        SystemSpace::new([("A", 2), ("B", 2)]).unwrap()
    }

    #[test]
    fn product_state_gives_marginal_entropy() {
        let mut rng = trial_rng(2, 0);
        let ra = random_state(&mut rng, &SystemSpace::single("A", 2).unwrap());
        let rb = random_state(&mut rng, &SystemSpace::single("B", 2).unwrap());
        let rho = ra.tensor(&rb).unwrap();
        for alpha in [0.6, 2.0] {
            let v = brute_force_min_divergence(&rho, &["A"], &["B"], alpha, BruteTarget::Conditional, 4000, 1).unwrap();
            assert!((-v.value - renyi_entropy(&ra, alpha).unwrap()).abs() < 1e-4);
        }
    }

    #[test]
    fn maximally_entangled_is_minus_one() {
        let phi = DensityOperator::maximally_entangled("A", "B", 2).unwrap();
        for alpha in [0.6, 2.0] {
            let v = brute_force_min_divergence(&phi, &["A"], &["B"], alpha, BruteTarget::Conditional, 4000, 1).unwrap();
            assert!((v.value - 1.0).abs() < 1e-4, "{}", v.value);
        }
    }

    #[test]
    fn never_below_optimizer() {
        let rho = random_state(&mut trial_rng(3, 0), &ab());
        let cfg = OptConfig::default();
        let opt = -conditional_entropy(&rho, &["A"], &["B"], 0.75, &cfg).unwrap().value;
        let v = brute_force_min_divergence(&rho, &["A"], &["B"], 0.75, BruteTarget::Conditional, 4000, 9).unwrap();
        assert!(v.value >= opt - 1e-9);
        assert!(v.value - opt < 1e-4);
    }

    #[test]
    fn large_b_rejected() {
        let s = SystemSpace::new([("A", 2), ("B", 4)]).unwrap();
        let rho = random_state(&mut trial_rng(1, 0), &s);
        assert!(brute_force_min_divergence(&rho, &["A"], &["B"], 0.8, BruteTarget::Mutual, 10, 0).is_err());
    }
}
