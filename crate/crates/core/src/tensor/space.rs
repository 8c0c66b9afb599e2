use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One tensor factor of a composite system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsystem {
    pub label: String,
    pub dim: usize,
}

/// An ordered list of labeled subsystems.
///
/// Composite indices put the first subsystem in the most significant
/// position: `index = Σ_k i_k · Π_{j>k} d_j`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SystemSpace {
    subsystems: Vec<Subsystem>,
}

impl SystemSpace {
    pub fn new<I, S>(parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let subsystems = parts
            .into_iter()
            .map(|(label, dim)| Subsystem {
                label: label.into(),
                dim,
            })
            .collect();
        Self::from_subsystems(subsystems)
    }

    pub fn from_subsystems(subsystems: Vec<Subsystem>) -> Result<Self> {
        for (i, s) in subsystems.iter().enumerate() {
            if s.dim == 0 {
                return Err(Error::dims(format!("subsystem `{}` has dimension 0", s.label)));
            }
            if s.label.is_empty() {
                return Err(Error::usage("empty subsystem label"));
            }
            if subsystems[..i].iter().any(|t| t.label == s.label) {
                return Err(Error::DuplicateLabel(s.label.clone()));
            }
        }
        Ok(Self { subsystems })
    }

    /// The space with no factors (dimension 1).
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn single(label: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new([(label, dim)])
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.subsystems.iter().map(|s| s.dim).product()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(|s| s.dim).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.subsystems.iter().map(|s| s.label.as_str()).collect()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.subsystems.iter().position(|s| s.label == label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        self.position(label)
            .map(|i| self.subsystems[i].dim)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Positions of `labels`, in the order given.
    pub fn positions<L: AsRef<str>>(&self, labels: &[L]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            let l = l.as_ref();
            let p = self
                .position(l)
                .ok_or_else(|| Error::UnknownLabel(l.to_string()))?;
            if out.contains(&p) {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
            out.push(p);
        }
        Ok(out)
    }

    /// The subspace made of `labels`, in the order given.
    pub fn select<L: AsRef<str>>(&self, labels: &[L]) -> Result<SystemSpace> {
        let pos = self.positions(labels)?;
        Ok(Self {
            subsystems: pos.iter().map(|&p| self.subsystems[p].clone()).collect(),
        })
    }

    /// The factors not named in `labels`, in their original order.
    pub fn without<L: AsRef<str>>(&self, labels: &[L]) -> SystemSpace {
        Self {
            subsystems: self
                .subsystems
                .iter()
                .filter(|s| !labels.iter().any(|l| l.as_ref() == s.label))
                .cloned()
                .collect(),
        }
    }

    /// Concatenation; labels must stay unique.
    pub fn join(&self, other: &SystemSpace) -> Result<SystemSpace> {
        let mut subsystems = self.subsystems.clone();
        subsystems.extend(other.subsystems.iter().cloned());
        Self::from_subsystems(subsystems)
    }

    /// Renames factors; pairs are `(old, new)`.
    pub fn relabel<L: AsRef<str>, M: AsRef<str>>(&self, pairs: &[(L, M)]) -> Result<SystemSpace> {
        let mut subsystems = self.subsystems.clone();
        for (old, new) in pairs {
            let p = self
                .position(old.as_ref())
                .ok_or_else(|| Error::UnknownLabel(old.as_ref().to_string()))?;
            subsystems[p].label = new.as_ref().to_string();
        }
        Self::from_subsystems(subsystems)
    }

    /// True when both spaces hold the same labels with the same dims,
    /// ignoring order.
    pub fn same_factors(&self, other: &SystemSpace) -> bool {
        self.len() == other.len()
            && self
                .subsystems
                .iter()
                .all(|s| other.subsystems.iter().any(|t| t == s))
    }

    /// For a reordering `order` of this space's factors, maps each composite
    /// index of the reordered space to the index it came from.
    pub(crate) fn permutation_map(&self, order: &[usize]) -> Vec<usize> {
        let dims = self.dims();
        let mut strides = vec![1usize; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let new_dims: Vec<usize> = order.iter().map(|&p| dims[p]).collect();
        let total = self.dim();
        let mut map = Vec::with_capacity(total);
        let mut digits = vec![0usize; order.len()];
        for _ in 0..total {
            map.push(
                digits
                    .iter()
                    .zip(order)
                    .map(|(&d, &p)| d * strides[p])
                    .sum(),
            );
            for k in (0..digits.len()).rev() {
                digits[k] += 1;
                if digits[k] < new_dims[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
        map
    }
}

impl std::fmt::Display for SystemSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.subsystems.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self
            .subsystems
            .iter()
            .map(|s| format!("{}({})", s.label, s.dim))
            .collect();
        write!(f, "{}", parts.join("⊗"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_labels_rejected() {
        assert!(matches!(
            SystemSpace::new([("A", 2), ("A", 3)]),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn permutation_map_swaps_factors() {
        let s = SystemSpace::new([("A", 2), ("B", 3)]).unwrap();
        let map = s.permutation_map(&[1, 0]);
        // new index (b, a) = b*2 + a comes from old a*3 + b
        for b in 0..3 {
            for a in 0..2 {
                assert_eq!(map[b * 2 + a], a * 3 + b);
            }
        }
    }

    #[test]
    fn trivial_space_has_dimension_one() {
        assert_eq!(SystemSpace::trivial().dim(), 1);
        assert_eq!(SystemSpace::trivial().permutation_map(&[]), vec![0]);
    }
}
