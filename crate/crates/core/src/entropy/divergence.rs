use super::alpha::near_one;
use crate::tensor::linalg::{self, psd_eigh, CMat, Eigh};
use crate::tensor::{DensityOperator, LabeledOperator};
use crate::{Error, Result};

/// Relative eigenvalue threshold for support decisions.
pub const SUPPORT_TOL: f64 = 1e-9;

/// Sandwiched Rényi divergence `D̃_α(ρ‖σ)` in bits; `+∞` where the support
/// conditions fail. α = 1 (and the band around it) gives the relative
/// entropy.
pub fn sandwiched_divergence(rho: &DensityOperator, sigma: &LabeledOperator, alpha: f64) -> Result<f64> {
    if !sigma.is_square() || sigma.space_out().dim() != rho.dim() {
        return Err(Error::dims(format!(
            "divergence of a state on {} against an operator on {}",
            rho.space(),
            sigma.space_out()
        )));
    }
    sandwiched_matrix(rho.matrix(), sigma.entries(), alpha)
}

pub(crate) fn sandwiched_matrix(rho: &CMat, sigma: &CMat, alpha: f64) -> Result<f64> {
    if rho.shape() != sigma.shape() {
        return Err(Error::dims("ρ and σ have different shapes"));
    }
    if !(alpha >= 0.0) {
        return Err(Error::usage(format!("divergence order must be ≥ 0, got {alpha}")));
    }
    if alpha == 0.0 {
        return Err(Error::usage("the order-0 sandwiched divergence is not implemented"));
    }
    let tr = linalg::trace(rho).re;
    let se = psd_eigh(sigma)?;
    if alpha > 1.0 || near_one(alpha) {
        if !support_contained(rho, &se) {
            return Ok(f64::INFINITY);
        }
    } else if orthogonal(rho, &se)? {
        return Ok(f64::INFINITY);
    }
    if near_one(alpha) {
        return Ok(relative_entropy_eig(rho, &se)? / tr);
    }
    let gamma = (1.0 - alpha) / alpha;
    let s = se.power(gamma / 2.0);
    let m = &s * rho * &s;
    let q = trace_power(&m, alpha);
    Ok((q / tr).log2() / (alpha - 1.0))
}

/// `tr M^p` over the positive spectrum of a Hermitian `M`.
pub(crate) fn trace_power(m: &CMat, p: f64) -> f64 {
    let e = Eigh::new(m);
    let cut = e.cutoff();
    e.values.iter().filter(|&&x| x > cut).map(|x| x.powf(p)).sum()
}

fn support_contained(rho: &CMat, se: &Eigh) -> bool {
    let cut = SUPPORT_TOL * se.max_abs();
    let scale = linalg::trace(rho).re.max(f64::MIN_POSITIVE);
    se.values.iter().enumerate().all(|(k, &lam)| {
        if lam > cut {
            return true;
        }
        let v = se.vectors.column(k);
        let overlap = v.dotc(&(rho * v)).re;
        overlap <= SUPPORT_TOL * scale
    })
}

fn orthogonal(rho: &CMat, se: &Eigh) -> Result<bool> {
    let re = psd_eigh(rho)?;
    let cut_r = SUPPORT_TOL * re.max_abs();
    let cut_s = SUPPORT_TOL * se.max_abs();
    let pr = re.map(|x| if x > cut_r { 1.0 } else { 0.0 });
    let ps = se.map(|x| if x > cut_s { 1.0 } else { 0.0 });
    Ok(linalg::trace(&(pr * ps)).re < SUPPORT_TOL)
}

fn relative_entropy_eig(rho: &CMat, se: &Eigh) -> Result<f64> {
    let re = psd_eigh(rho)?;
    let cut_r = re.cutoff();
    let neg: f64 = re
        .values
        .iter()
        .filter(|&&x| x > cut_r)
        .map(|&x| x * x.log2())
        .sum();
    let cut_s = se.cutoff();
    let mut cross = 0.0;
    for (k, &lam) in se.values.iter().enumerate() {
        if lam > cut_s {
            let v = se.vectors.column(k);
            cross += v.dotc(&(rho * v)).re * lam.log2();
        }
    }
    Ok(neg - cross)
}

/// Umegaki relative entropy `tr ρ(log ρ − log σ)` in bits.
pub fn relative_entropy(rho: &DensityOperator, sigma: &LabeledOperator) -> Result<f64> {
    sandwiched_divergence(rho, sigma, 1.0)
}

/// Rényi entropy from a spectrum.
pub(crate) fn renyi_of_spectrum(values: &[f64], alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(Error::usage(format!("entropy order must be ≥ 0, got {alpha}")));
    }
    let top = values.iter().fold(0.0f64, |m, &v| m.max(v));
    let cut = linalg::CLIP * top;
    let pos = values.iter().copied().filter(|&x| x > cut);
    if alpha == 0.0 {
        return Ok((pos.count() as f64).log2());
    }
    if alpha.is_infinite() {
        return Ok(-top.log2());
    }
    if near_one(alpha) {
        return Ok(-pos.map(|x| x * x.log2()).sum::<f64>());
    }
    // scale by the largest eigenvalue to keep large orders finite
    let s: f64 = pos.map(|x| (x / top).powf(alpha)).sum();
    Ok((s.log2() + alpha * top.log2()) / (1.0 - alpha))
}

/// `S_α(ρ) = (1/(1−α)) log tr ρ^α`; von Neumann at α = 1, log-rank at α = 0.
pub fn renyi_entropy(rho: &DensityOperator, alpha: f64) -> Result<f64> {
    renyi_matrix(rho.matrix(), alpha)
}

pub(crate) fn renyi_matrix(m: &CMat, alpha: f64) -> Result<f64> {
    renyi_of_spectrum(&Eigh::new(m).values, alpha)
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    renyi_matrix(rho.matrix(), 1.0).expect("order 1 is valid")
}

/// Rényi entropy of the marginal on `labels`.
pub fn marginal_entropy<L: AsRef<str>>(rho: &DensityOperator, labels: &[L], alpha: f64) -> Result<f64> {
    renyi_entropy(&rho.partial_trace(labels)?, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::linalg::{diag, identity};
    use crate::tensor::random::{random_state, trial_rng};
    use crate::tensor::SystemSpace;

    fn st(p: &[f64]) -> DensityOperator {
        DensityOperator::new(SystemSpace::single("A", p.len()).unwrap(), diag(p)).unwrap()
    }

    #[test]
    fn self_divergence_vanishes() {
        let s = SystemSpace::new([("A", 2), ("B", 2)]).unwrap();
        let rho = random_state(&mut trial_rng(3, 0), &s);
        for a in [0.6, 1.0, 2.0] {
            let d = sandwiched_divergence(&rho, &rho.as_operator(), a).unwrap();
            assert!(d.abs() < 1e-10, "α={a}: {d}");
        }
    }

    #[test]
    fn pure_against_mixed_at_two() {
        let d = sandwiched_matrix(&diag(&[1.0, 0.0]), &diag(&[0.5, 0.5]), 2.0).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn commuting_inputs_are_classical() {
        let p = [0.2, 0.5, 0.3];
        let q = [0.4, 0.4, 0.2];
        for a in [0.3, 0.7, 1.5, 3.0] {
            let d = sandwiched_matrix(&diag(&p), &diag(&q), a).unwrap();
            let s: f64 = p.iter().zip(&q).map(|(x, y)| x.powf(a) * y.powf(1.0 - a)).sum();
            assert!((d - s.log2() / (a - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn support_conditions() {
        let rho = diag(&[0.5, 0.5]);
        let sigma = diag(&[1.0, 0.0]);
        assert_eq!(sandwiched_matrix(&rho, &sigma, 2.0).unwrap(), f64::INFINITY);
        assert_eq!(sandwiched_matrix(&rho, &sigma, 1.0).unwrap(), f64::INFINITY);
        assert!(sandwiched_matrix(&rho, &sigma, 0.7).unwrap().is_finite());
        let orth = diag(&[0.0, 1.0]);
        assert_eq!(sandwiched_matrix(&sigma, &orth, 0.7).unwrap(), f64::INFINITY);
        assert!(sandwiched_matrix(&rho, &sigma, -0.1).is_err());
    }

    #[test]
    fn entropy_examples() {
        for a in [0.0, 0.5, 1.0, 2.0, 7.0] {
            assert!((renyi_entropy(&st(&[0.25; 4]), a).unwrap() - 2.0).abs() < 1e-12);
            assert!(renyi_entropy(&st(&[1.0, 0.0, 0.0]), a).unwrap().abs() < 1e-12);
        }
        assert!((renyi_entropy(&st(&[0.5, 0.5, 0.0]), 0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn entropy_is_negative_divergence_from_identity() {
        let s = SystemSpace::single("A", 3).unwrap();
        let rho = random_state(&mut trial_rng(4, 0), &s);
        for a in [0.5, 0.8, 1.0, 2.0] {
            let d = sandwiched_matrix(rho.matrix(), &identity(3), a).unwrap();
            assert!((renyi_entropy(&rho, a).unwrap() + d).abs() < 1e-10);
        }
    }
}
