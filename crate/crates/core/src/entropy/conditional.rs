use std::f64::consts::LN_2;

use super::alpha::near_one;
use super::divergence::{renyi_matrix, SUPPORT_TOL};
use super::optimize::{minimize_states, Method, Minimum, OptConfig, OptimizedValue, StateObjective};
use crate::tensor::linalg::{self, psd_eigh, CMat, Eigh};
use crate::tensor::{DensityOperator, SystemSpace};
use crate::{Error, Result};

/// `σ ↦ D̃_α(ρ_AB ‖ τ_A ⊗ σ_B)` with its gradient in σ.
///
/// With `Γ = τ⊗σ`, `γ = (1−α)/α` and `M = ρ^{1/2} Γ^γ ρ^{1/2}`, the trace
/// `Q = tr M^α` has differential `α tr[Y dΓ^γ]` where
/// `Y = ρ^{1/2} M^{α−1} ρ^{1/2}`. The derivative of `Γ ↦ Γ^γ` is the Hadamard
/// product with the first divided differences of `x^γ` in the eigenbasis of
/// Γ, and the σ-gradient is `tr_A[(τ⊗I) G_Γ]`.
pub(crate) struct Sandwiched {
    alpha: f64,
    gamma: f64,
    rho_half: CMat,
    tau: CMat,
    tau_eig: Eigh,
    da: usize,
    db: usize,
}

impl Sandwiched {
    pub(crate) fn new(rho: &CMat, tau: &CMat, da: usize, db: usize, alpha: f64) -> Result<Self> {
        if rho.nrows() != da * db || tau.nrows() != da {
            return Err(Error::dims("sandwiched objective dimensions"));
        }
        let tr = linalg::trace(rho).re;
        Ok(Self {
            alpha,
            gamma: (1.0 - alpha) / alpha,
            rho_half: linalg::psd_sqrt(&rho.unscale(tr))?,
            tau: tau.clone(),
            tau_eig: psd_eigh(tau)?,
            da,
            db,
        })
    }

    fn divided_difference(&self, a: f64, b: f64, cut: f64) -> f64 {
        let g = self.gamma;
        let f = |x: f64| if x > cut { x.powf(g) } else { 0.0 };
        if a <= cut && b <= cut {
            return 0.0;
        }
        if (a - b).abs() > 1e-9 * a.max(b) {
            (f(a) - f(b)) / (a - b)
        } else {
            let m = 0.5 * (a + b);
            g * m.powf(g - 1.0)
        }
    }
}

impl StateObjective for Sandwiched {
    fn eval(&self, sigma: &CMat) -> Option<(f64, CMat)> {
        let se = Eigh::new(sigma);
        if se.values.iter().any(|v| !v.is_finite()) || se.values.last().copied().unwrap_or(0.0) <= 0.0 {
            return None;
        }
        let (da, db) = (self.da, self.db);
        let lam: Vec<f64> = self
            .tau_eig
            .values
            .iter()
            .flat_map(|&t| se.values.iter().map(move |&s| t * s))
            .collect();
        let top = lam.iter().fold(0.0f64, |m, &v| m.max(v));
        let cut = linalg::CLIP * top;
        let u = linalg::kron(&self.tau_eig.vectors, &se.vectors);
        let gp = linalg::kron(&self.tau_eig.power(self.gamma), &se.power(self.gamma));
        let m = &self.rho_half * gp * &self.rho_half;
        let me = Eigh::new(&m);
        let mcut = me.cutoff();
        let q: f64 = me.values.iter().filter(|&&x| x > mcut).map(|x| x.powf(self.alpha)).sum();
        if !(q > 0.0) || !q.is_finite() {
            return None;
        }
        let value = q.log2() / (self.alpha - 1.0);
        let a1 = self.alpha - 1.0;
        let mpow = me.map(|x| if x > mcut { x.powf(a1) } else { 0.0 });
        let y = &self.rho_half * mpow * &self.rho_half;
        let mut yh = u.adjoint() * y * &u;
        let n = da * db;
        for i in 0..n {
            for j in 0..n {
                yh[(i, j)] *= self.divided_difference(lam[i], lam[j], cut);
            }
        }
        let g_gamma = (&u * yh * u.adjoint()).scale(self.alpha);
        let k = g_gamma * linalg::kron(&self.tau, &linalg::identity(db));
        let mut g = CMat::zeros(db, db);
        for a in 0..da {
            g += k.view((a * db, a * db), (db, db));
        }
        let g = linalg::hermitize(&g).unscale(a1 * q * LN_2);
        Some((value, g))
    }
}

fn check_order(alpha: f64) -> Result<()> {
    if !(alpha >= 0.5) || !alpha.is_finite() {
        return Err(Error::usage(format!(
            "optimized conditional quantities need α ≥ 1/2, got {alpha}"
        )));
    }
    Ok(())
}

fn joined<L: AsRef<str>>(a: &[L], b: &[L]) -> Vec<String> {
    a.iter().chain(b).map(|l| l.as_ref().to_string()).collect()
}

fn trivial_state() -> DensityOperator {
    DensityOperator::maximally_mixed(SystemSpace::trivial())
}

/// Orthonormal basis of the support of a PSD matrix, or `None` when it has
/// full rank.
fn support_basis(m: &CMat) -> Option<CMat> {
    let e = Eigh::new(m);
    let cut = SUPPORT_TOL * e.max_abs();
    let r = e.values.iter().filter(|&&v| v > cut).count();
    (r < m.nrows()).then(|| e.vectors.columns(0, r).into_owned())
}

/// `min_σ D̃_α(ρ_AB ‖ τ_A ⊗ σ_B)`. Since `ρ_AB` lives on
/// `supp ρ_A ⊗ supp ρ_B`, the search runs on that subspace (on the `A` side
/// only when `shrink_a`, i.e. when τ = ρ_A), which keeps the optimum away
/// from the boundary of the state space when `ρ_B` is singular.
fn minimize_product(rho_ab: &CMat, tau: &CMat, shrink_a: bool, rho_b: &CMat, alpha: f64, cfg: &OptConfig) -> Result<Minimum> {
    let (da, db) = (tau.nrows(), rho_b.nrows());
    let ua = if shrink_a { support_basis(tau) } else { None };
    let ub = support_basis(rho_b);
    if ua.is_none() && ub.is_none() {
        let obj = Sandwiched::new(rho_ab, tau, da, db, alpha)?;
        let guesses = [rho_b.clone(), linalg::maximally_mixed(db)];
        return minimize_states(&obj, db, &guesses, cfg);
    }
    let ua = ua.unwrap_or_else(|| linalg::identity(da));
    let ub = ub.unwrap_or_else(|| linalg::identity(db));
    let w = linalg::kron(&ua, &ub);
    let rho_c = w.adjoint() * rho_ab * &w;
    let tau_c = ua.adjoint() * tau * &ua;
    let rb = ub.ncols();
    let obj = Sandwiched::new(&rho_c, &tau_c, ua.ncols(), rb, alpha)?;
    let guesses = [ub.adjoint() * rho_b * &ub, linalg::maximally_mixed(rb)];
    let m = minimize_states(&obj, rb, &guesses, cfg)?;
    Ok(Minimum { sigma: &ub * m.sigma * ub.adjoint(), ..m })
}

/// `S̃_α(A|B) = −min_σ D̃_α(ρ_AB ‖ I_A ⊗ σ_B)` for the factor groups `a`
/// and `b` of `rho` (other factors are traced out).
pub fn conditional_entropy<L: AsRef<str>>(
    rho: &DensityOperator,
    a: &[L],
    b: &[L],
    alpha: f64,
    cfg: &OptConfig,
) -> Result<OptimizedValue> {
    check_order(alpha)?;
    let ab = rho.marginal(&joined(a, b))?;
    let rho_b = ab.partial_trace(b)?;
    if b.is_empty() {
        return Ok(OptimizedValue {
            value: renyi_matrix(ab.matrix(), alpha)?,
            optimizer: trivial_state(),
            residual: 0.0,
            method: Method::Trivial,
        });
    }
    if a.is_empty() {
        return Ok(OptimizedValue { value: 0.0, optimizer: rho_b, residual: 0.0, method: Method::Trivial });
    }
    if near_one(alpha) {
        let value = renyi_matrix(ab.matrix(), 1.0)? - renyi_matrix(rho_b.matrix(), 1.0)?;
        return Ok(OptimizedValue { value, optimizer: rho_b, residual: 0.0, method: Method::ClosedForm });
    }
    let da = ab.dim() / rho_b.dim();
    let m = minimize_product(ab.matrix(), &linalg::identity(da), false, rho_b.matrix(), alpha, cfg)?;
    Ok(OptimizedValue {
        value: -m.value,
        optimizer: DensityOperator::from_parts(rho_b.space().clone(), m.sigma),
        residual: m.residual,
        method: Method::QuasiNewton,
    })
}

/// `Ĩ_α(A;B) = min_σ D̃_α(ρ_AB ‖ ρ_A ⊗ σ_B)`.
pub fn mutual_information<L: AsRef<str>>(
    rho: &DensityOperator,
    a: &[L],
    b: &[L],
    alpha: f64,
    cfg: &OptConfig,
) -> Result<OptimizedValue> {
    check_order(alpha)?;
    let ab = rho.marginal(&joined(a, b))?;
    let rho_b = ab.partial_trace(b)?;
    if a.is_empty() || b.is_empty() {
        return Ok(OptimizedValue { value: 0.0, optimizer: rho_b, residual: 0.0, method: Method::Trivial });
    }
    let rho_a = ab.partial_trace(a)?;
    if near_one(alpha) {
        let value = renyi_matrix(rho_a.matrix(), 1.0)? + renyi_matrix(rho_b.matrix(), 1.0)?
            - renyi_matrix(ab.matrix(), 1.0)?;
        return Ok(OptimizedValue { value, optimizer: rho_b, residual: 0.0, method: Method::ClosedForm });
    }
    let m = minimize_product(ab.matrix(), rho_a.matrix(), true, rho_b.matrix(), alpha, cfg)?;
    Ok(OptimizedValue {
        value: m.value,
        optimizer: DensityOperator::from_parts(rho_b.space().clone(), m.sigma),
        residual: m.residual,
        method: Method::QuasiNewton,
    })
}

/// `S(A|B) = S(AB) − S(B)`.
pub fn vn_conditional_entropy<L: AsRef<str>>(rho: &DensityOperator, a: &[L], b: &[L]) -> Result<f64> {
    let ab = rho.partial_trace(&joined(a, b))?;
    Ok(renyi_matrix(ab.matrix(), 1.0)? - renyi_matrix(rho.partial_trace(b)?.matrix(), 1.0)?)
}

/// `I(A;B) = S(A) + S(B) − S(AB)`.
pub fn vn_mutual_information<L: AsRef<str>>(rho: &DensityOperator, a: &[L], b: &[L]) -> Result<f64> {
    let s = |l: &[String]| -> Result<f64> { renyi_matrix(rho.partial_trace(l)?.matrix(), 1.0) };
    let a: Vec<String> = a.iter().map(|l| l.as_ref().to_string()).collect();
    let b: Vec<String> = b.iter().map(|l| l.as_ref().to_string()).collect();
    Ok(s(&a)? + s(&b)? - s(&joined(&a, &b))?)
}

/// `I(A;B|C) = S(AC) + S(BC) − S(ABC) − S(C)`.
pub fn vn_conditional_mutual_information<L: AsRef<str>>(
    rho: &DensityOperator,
    a: &[L],
    b: &[L],
    c: &[L],
) -> Result<f64> {
    let s = |l: Vec<String>| -> Result<f64> { renyi_matrix(rho.partial_trace(&l)?.matrix(), 1.0) };
    let ac = joined(a, c);
    let bc = joined(b, c);
    let abc: Vec<String> = joined(a, b).into_iter().chain(c.iter().map(|l| l.as_ref().to_string())).collect();
    let cc: Vec<String> = c.iter().map(|l| l.as_ref().to_string()).collect();
    Ok(s(ac)? + s(bc)? - s(abc)? - s(cc)?)
}
