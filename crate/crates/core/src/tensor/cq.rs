use super::linalg::{self, CMat};
use super::operator::DensityOperator;
use super::space::SystemSpace;
use crate::{Error, Result};

/// A classical-quantum state `Σ_x p_x |x⟩⟨x|_X ⊗ ρ_B^x`.
#[derive(Clone, Debug, PartialEq)]
pub struct CqState {
    x_label: String,
    probs: Vec<f64>,
    conditionals: Vec<DensityOperator>,
    b_space: SystemSpace,
}

impl CqState {
    pub fn new(
        x_label: impl Into<String>,
        probs: Vec<f64>,
        conditionals: Vec<DensityOperator>,
    ) -> Result<Self> {
        let x_label = x_label.into();
        if probs.is_empty() || probs.len() != conditionals.len() {
            return Err(Error::dims(format!(
                "{} probabilities for {} conditional states",
                probs.len(),
                conditionals.len()
            )));
        }
        if probs.iter().any(|&p| !(p >= -1e-12)) {
            return Err(Error::NotDensity("negative probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::NotDensity(format!("probabilities sum to {total}")));
        }
        let b_space = conditionals[0].space().clone();
        if conditionals.iter().any(|c| c.space() != &b_space) {
            return Err(Error::dims("conditional states live on different spaces"));
        }
        if b_space.contains(&x_label) {
            return Err(Error::DuplicateLabel(x_label));
        }
        Ok(Self {
            x_label,
            probs: probs.into_iter().map(|p| p.max(0.0)).collect(),
            conditionals,
            b_space,
        })
    }

    /// A classical distribution with a trivial quantum part labeled `B`.
    pub fn classical(x_label: &str, probs: Vec<f64>) -> Result<Self> {
        let b = SystemSpace::single("B", 1)?;
        let one = DensityOperator::new(b, linalg::identity(1))?;
        let n = probs.len();
        Self::new(x_label, probs, vec![one; n])
    }

    /// Reads a block-diagonal state on `X ⊗ rest`.
    pub fn from_density(rho: &DensityOperator, x_label: &str) -> Result<Self> {
        let nx = rho.space().dim_of(x_label)?;
        let mut order = vec![x_label];
        let b_space = rho.space().without(&[x_label]);
        let b_labels = b_space.labels();
        order.extend(b_labels.iter().copied());
        let r = rho.reorder(&order)?;
        let db = b_space.dim();
        let m = r.matrix();
        let mut probs = Vec::with_capacity(nx);
        let mut conditionals = Vec::with_capacity(nx);
        for x in 0..nx {
            for y in 0..nx {
                if x != y {
                    let off = m.view((x * db, y * db), (db, db)).norm();
                    if off > 1e-10 {
                        return Err(Error::NotDensity(format!(
                            "not classical on `{x_label}` (off-diagonal block norm {off:e})"
                        )));
                    }
                }
            }
            let block = m.view((x * db, x * db), (db, db)).clone_owned();
            let p = linalg::trace(&block).re;
            probs.push(p.max(0.0));
            let cond = if p > 1e-15 {
                block.unscale(p)
            } else {
                linalg::maximally_mixed(db)
            };
            conditionals.push(DensityOperator::from_parts(b_space.clone(), cond));
        }
        let total: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= total;
        }
        Self::new(x_label, probs, conditionals)
    }

    pub fn x_label(&self) -> &str {
        &self.x_label
    }

    pub fn x_dim(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn conditionals(&self) -> &[DensityOperator] {
        &self.conditionals
    }

    pub fn b_space(&self) -> &SystemSpace {
        &self.b_space
    }

    pub fn b_labels(&self) -> Vec<&str> {
        self.b_space.labels()
    }

    /// `Σ_x p_x |x⟩⟨x| ⊗ ρ^x` on `X ⊗ B`.
    pub fn to_density(&self) -> DensityOperator {
        let db = self.b_space.dim();
        let nx = self.x_dim();
        let mut m = CMat::zeros(nx * db, nx * db);
        for (x, (p, c)) in self.probs.iter().zip(&self.conditionals).enumerate() {
            m.view_mut((x * db, x * db), (db, db))
                .copy_from(&c.matrix().scale(*p));
        }
        let space = SystemSpace::single(self.x_label.clone(), nx)
            .and_then(|x| x.join(&self.b_space))
            .expect("labels checked at construction");
        DensityOperator::from_parts(space, m)
    }

    /// The average state `Σ_x p_x ρ^x` on B.
    pub fn b_marginal(&self) -> DensityOperator {
        let db = self.b_space.dim();
        let mut m = CMat::zeros(db, db);
        for (p, c) in self.probs.iter().zip(&self.conditionals) {
            m += c.matrix().scale(*p);
        }
        DensityOperator::from_parts(self.b_space.clone(), m)
    }

    /// Unnormalized `p_{x^n} ρ^{x^n}` for the string with digits `xs`.
    pub(crate) fn weighted_string(&self, xs: &[usize]) -> CMat {
        let mut m = linalg::identity(1);
        for &x in xs {
            m = linalg::kron(&m, &self.conditionals[x].matrix().scale(self.probs[x]));
        }
        m
    }
}

/// Digits of `index` in base `base`, most significant first.
pub(crate) fn digits(mut index: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for k in (0..len).rev() {
        out[k] = index % base;
        index /= base;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_round_trip() {
        let b = SystemSpace::single("B", 2).unwrap();
        let r0 = DensityOperator::new(b.clone(), linalg::diag(&[0.9, 0.1])).unwrap();
        let r1 = DensityOperator::maximally_mixed(b);
        let cq = CqState::new("X", vec![0.25, 0.75], vec![r0, r1]).unwrap();
        let rho = cq.to_density();
        let back = CqState::from_density(&rho, "X").unwrap();
        assert!((back.to_density().matrix() - rho.matrix()).norm() < 1e-14);
    }

    #[test]
    fn digits_most_significant_first() {
        assert_eq!(digits(5, 2, 3), vec![1, 0, 1]);
    }
}
