use super::linalg::{self, psd_eigh, CVec};
use super::operator::{DensityOperator, LabeledOperator};
use super::space::SystemSpace;
use crate::{Error, Result};

/// `op^p` on the support of a PSD operator.
pub fn fractional_power(op: &LabeledOperator, p: f64) -> Result<LabeledOperator> {
    if !op.is_square() {
        return Err(Error::dims("fractional power of a non-square operator"));
    }
    let herm = linalg::hermiticity_defect(op.entries());
    if herm > 1e-8 * op.entries().norm().max(1.0) {
        return Err(Error::NotDensity(format!("not Hermitian (defect {herm:e})")));
    }
    LabeledOperator::square(op.space_out().clone(), linalg::psd_power(op.entries(), p)?)
}

pub fn schatten_norm(op: &LabeledOperator, p: f64) -> Result<f64> {
    linalg::schatten(op.entries(), p)
}

/// Uhlmann fidelity `‖√ρ√σ‖₁`.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.space() != sigma.space() {
        return Err(Error::dims(format!(
            "fidelity between states on {} and {}",
            rho.space(),
            sigma.space()
        )));
    }
    Ok(linalg::fidelity_psd(rho.matrix(), sigma.matrix())?.min(1.0))
}

/// A pure state kept as a ket together with its space.
#[derive(Clone, Debug)]
pub struct PureState {
    pub space: SystemSpace,
    pub ket: CVec,
}

impl PureState {
    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_parts(self.space.clone(), &self.ket * self.ket.adjoint())
    }

    pub fn reorder<L: AsRef<str>>(&self, labels: &[L]) -> Result<Self> {
        let order = self.space.positions(labels)?;
        if labels.len() != self.space.len() {
            return Err(Error::usage("reorder needs every label"));
        }
        let map = self.space.permutation_map(&order);
        Ok(Self {
            space: self.space.select(labels)?,
            ket: super::operator::permute_vector(&self.ket, &map),
        })
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            space: self.space.join(&other.space)?,
            ket: self.ket.kronecker(&other.ket),
        })
    }
}

/// Canonical purification of `rho` onto `rho.space() ⊗ R`.
///
/// Eigenvalues are taken in descending order, each eigenvector is rotated so
/// that its first nonzero component is real and positive, and `|R|` equals
/// the rank.
pub fn purify_ket(rho: &DensityOperator, r_label: &str) -> Result<PureState> {
    let e = psd_eigh(rho.matrix())?;
    let rank = e.rank().max(1);
    let d = rho.dim();
    let mut ket = CVec::zeros(d * rank);
    for k in 0..rank {
        let lam = e.values[k].max(0.0);
        let mut v = e.vectors.column(k).clone_owned();
        if let Some(first) = v.iter().find(|z| z.norm() > 1e-10) {
            let phase = first.conj() / first.norm();
            v *= phase;
        }
        let w = lam.sqrt();
        for i in 0..d {
            ket[i * rank + k] = v[i] * w;
        }
    }
    let norm = ket.norm();
    if norm > 0.0 {
        ket.unscale_mut(norm);
    }
    let space = rho.space().join(&SystemSpace::single(r_label, rank)?)?;
    Ok(PureState { space, ket })
}

pub fn purify(rho: &DensityOperator, r_label: &str) -> Result<DensityOperator> {
    Ok(purify_ket(rho, r_label)?.density())
}

/// Fidelity of `rho` with a pure state living on the same factors (possibly
/// in a different order).
pub fn fidelity_with_pure(rho: &DensityOperator, target: &PureState) -> Result<f64> {
    let t = target.reorder(&rho.space().labels())?;
    if t.space != *rho.space() {
        return Err(Error::dims(format!(
            "fidelity between {} and pure state on {}",
            rho.space(),
            target.space
        )));
    }
    Ok(linalg::fidelity_with_ket(rho.matrix(), &t.ket).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::linalg::diag;

    fn qubit(p: &[f64]) -> DensityOperator {
        DensityOperator::new(SystemSpace::single("A", p.len()).unwrap(), diag(p)).unwrap()
    }

    #[test]
    fn purify_mixed_gives_mes() {
        let psi = purify(&qubit(&[0.5, 0.5]), "R").unwrap();
        let phi = DensityOperator::maximally_entangled("A", "R", 2).unwrap();
        assert!((psi.matrix() - phi.matrix()).norm() < 1e-12);
    }

    #[test]
    fn purify_pure_has_trivial_reference() {
        let psi = purify(&qubit(&[1.0, 0.0]), "R").unwrap();
        assert_eq!(psi.space().dim_of("R").unwrap(), 1);
    }

    #[test]
    fn purify_marginal_recovers_state() {
        let rho = qubit(&[0.1, 0.6, 0.3]);
        let psi = purify(&rho, "R").unwrap();
        let back = psi.partial_trace(&["A"]).unwrap();
        assert!((back.matrix() - rho.matrix()).norm() < 1e-12);
        assert_eq!(psi.space().dim_of("R").unwrap(), 3);
    }

    #[test]
    fn fidelity_examples() {
        let r = qubit(&[0.3, 0.7]);
        assert!((fidelity(&r, &r).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&qubit(&[1.0, 0.0]), &qubit(&[0.0, 1.0])).unwrap().abs() < 1e-12);
    }
}
