use super::alpha::{beta, near_one};
use super::conditional::{conditional_entropy, mutual_information, vn_conditional_mutual_information};
use super::optimize::OptConfig;
use crate::tensor::linalg::{self, psd_power, schatten};
use crate::tensor::{embed_matrix, DensityOperator};
use crate::{Error, Result};

/// Rényi conditional mutual information
/// `(2α/(α−1)) log ‖ρ_ABC^{1/2} ρ_AC^{(1−α)/2α} ρ_C^{(α−1)/2α} ρ_BC^{(1−α)/2α}‖_{2α}`.
///
/// Orders within the band around 1 return the von Neumann value.
pub fn conditional_mutual_information<L: AsRef<str>>(
    rho: &DensityOperator,
    a: &[L],
    b: &[L],
    c: &[L],
    alpha: f64,
) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::usage(format!("Rényi CMI needs α > 0, got {alpha}")));
    }
    if near_one(alpha) {
        return vn_conditional_mutual_information(rho, a, b, c);
    }
    let labels: Vec<&str> = a.iter().chain(b).chain(c).map(|l| l.as_ref()).collect();
    let abc = rho.marginal(&labels)?;
    let full = abc.space().clone();
    let ac: Vec<&str> = a.iter().chain(c).map(|l| l.as_ref()).collect();
    let bc: Vec<&str> = b.iter().chain(c).map(|l| l.as_ref()).collect();
    let cc: Vec<&str> = c.iter().map(|l| l.as_ref()).collect();
    let e = (1.0 - alpha) / (2.0 * alpha);
    let factor = |labels: &[&str], p: f64| -> Result<linalg::CMat> {
        let m = abc.marginal(labels)?;
        embed_matrix(m.space(), &psd_power(m.matrix(), p)?, &full)
    };
    let prod = psd_power(abc.matrix(), 0.5)? * factor(&ac, e)? * factor(&cc, -e)? * factor(&bc, e)?;
    let norm = schatten(&prod, 2.0 * alpha)?;
    Ok(2.0 * alpha / (alpha - 1.0) * norm.log2())
}

/// `(S̃_α(A|C) − S̃_β(A|BC), Ĩ_α(A;BC) − Ĩ_β(A;C))` with `β = α/(2α−1)`.
pub fn cmi_generalizations<L: AsRef<str>>(
    rho: &DensityOperator,
    a: &[L],
    b: &[L],
    c: &[L],
    alpha: f64,
    cfg: &OptConfig,
) -> Result<(f64, f64)> {
    let bt = if near_one(alpha) { 1.0 } else { beta(alpha)? };
    let bc: Vec<&str> = b.iter().chain(c).map(|l| l.as_ref()).collect();
    let cc: Vec<&str> = c.iter().map(|l| l.as_ref()).collect();
    let aa: Vec<&str> = a.iter().map(|l| l.as_ref()).collect();
    let first = conditional_entropy(rho, &aa, &cc, alpha, cfg)?.value
        - conditional_entropy(rho, &aa, &bc, bt, cfg)?.value;
    let second = mutual_information(rho, &aa, &bc, alpha, cfg)?.value
        - mutual_information(rho, &aa, &cc, bt, cfg)?.value;
    Ok((first, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::random::{random_state, trial_rng};
    use crate::tensor::SystemSpace;

    fn abc(seed: u64) -> DensityOperator {
        let s = SystemSpace::new([("A", 2), ("B", 2), ("C", 2)]).unwrap();
        random_state(&mut trial_rng(seed, 0), &s)
    }

    #[test]
    fn markov_product_vanishes() {
        let mut rng = trial_rng(4, 4);
        let ac = random_state(&mut rng, &SystemSpace::new([("A", 2), ("C", 2)]).unwrap());
        let b = random_state(&mut rng, &SystemSpace::single("B", 3).unwrap());
        let state = ac.tensor(&b).unwrap();
        for alpha in [0.3, 0.7, 1.5, 2.5] {
            let v = conditional_mutual_information(&state, &["A"], &["B"], &["C"], alpha).unwrap();
            assert!(v.abs() < 1e-10, "α={alpha}: {v}");
        }
    }

    #[test]
    fn trivial_systems_vanish() {
        let s = SystemSpace::new([("A", 1), ("B", 1), ("C", 1)]).unwrap();
        let rho = DensityOperator::maximally_mixed(s);
        assert!(conditional_mutual_information(&rho, &["A"], &["B"], &["C"], 0.7).unwrap().abs() < 1e-15);
    }

    #[test]
    fn near_one_matches_von_neumann() {
        let rho = abc(8);
        let vn = vn_conditional_mutual_information(&rho, &["A"], &["B"], &["C"]).unwrap();
        for alpha in [1.0 - 1e-3, 1.0 + 1e-3] {
            let v = conditional_mutual_information(&rho, &["A"], &["B"], &["C"], alpha).unwrap();
            assert!((v - vn).abs() < 1e-2, "α={alpha}: {v} vs {vn}");
        }
    }

    #[test]
    fn generalizations_at_one_are_von_neumann() {
        let rho = abc(9);
        let vn = vn_conditional_mutual_information(&rho, &["A"], &["B"], &["C"]).unwrap();
        let (i1, i2) = cmi_generalizations(&rho, &["A"], &["B"], &["C"], 1.0, &OptConfig::default()).unwrap();
        assert!((i1 - vn).abs() < 1e-10);
        assert!((i2 - vn).abs() < 1e-10);
    }
}
