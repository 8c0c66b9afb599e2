use super::functions::purify_ket;
use super::linalg::{self, c, CMat};
use super::operator::{reorder_matrix, DensityOperator, LabeledOperator};
use super::space::SystemSpace;
use crate::{Error, Result};

/// A channel in Stinespring form `ρ ↦ tr_E(V ρ V†)`.
///
/// The isometry's rows are ordered as the output factors followed by the
/// environment factors.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec {
    input: SystemSpace,
    output: SystemSpace,
    environment: SystemSpace,
    isometry: CMat,
}

/// Tolerance on `V†V = I`.
pub const ISOMETRY_TOL: f64 = 1e-10;

impl ChannelSpec {
    /// `isometry` maps `input` to `output ⊗ environment` (rows in that order).
    pub fn new(
        input: SystemSpace,
        output: SystemSpace,
        environment: SystemSpace,
        isometry: CMat,
    ) -> Result<Self> {
        let rows = output.join(&environment)?;
        if isometry.nrows() != rows.dim() || isometry.ncols() != input.dim() {
            return Err(Error::InvalidChannel(format!(
                "isometry is {}×{} but spaces need {}×{}",
                isometry.nrows(),
                isometry.ncols(),
                rows.dim(),
                input.dim()
            )));
        }
        let defect = (isometry.adjoint() * &isometry - linalg::identity(input.dim()))
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        if defect > ISOMETRY_TOL {
            return Err(Error::InvalidChannel(format!("V†V deviates from I by {defect:e}")));
        }
        Ok(Self {
            input,
            output,
            environment,
            isometry,
        })
    }

    /// From an isometry whose output space lists outputs and environment in
    /// any order; `environment` names the factors to discard.
    pub fn from_isometry<L: AsRef<str>>(isometry: &LabeledOperator, environment: &[L]) -> Result<Self> {
        let rows = isometry.space_out();
        let env = rows.select(environment)?;
        let out = rows.without(environment);
        let order: Vec<&str> = out.labels().into_iter().chain(env.labels()).collect();
        let m = reorder_rows(rows, isometry.entries(), &order)?;
        Self::new(isometry.space_in().clone(), out, env, m)
    }

    pub fn input(&self) -> &SystemSpace {
        &self.input
    }

    pub fn output(&self) -> &SystemSpace {
        &self.output
    }

    pub fn environment(&self) -> &SystemSpace {
        &self.environment
    }

    pub fn isometry(&self) -> &CMat {
        &self.isometry
    }

    pub fn isometry_operator(&self) -> LabeledOperator {
        LabeledOperator::new(
            self.output.join(&self.environment).expect("validated at construction"),
            self.input.clone(),
            self.isometry.clone(),
        )
        .expect("validated at construction")
    }

    /// Moves each `from` factor to a factor named `to` of the same dimension.
    pub fn relabel<L: AsRef<str>, M: AsRef<str>>(space: &SystemSpace, pairs: &[(L, M)]) -> Result<Self> {
        let input = space.select(&pairs.iter().map(|p| p.0.as_ref()).collect::<Vec<_>>())?;
        let output = input.relabel(pairs)?;
        let d = input.dim();
        Self::new(input, output, SystemSpace::trivial(), linalg::identity(d))
    }

    /// The identity channel on `space`.
    pub fn identity(space: &SystemSpace) -> Self {
        let d = space.dim();
        Self {
            input: space.clone(),
            output: space.clone(),
            environment: SystemSpace::trivial(),
            isometry: linalg::identity(d),
        }
    }

    /// Traces out `space` entirely.
    pub fn discard(space: &SystemSpace) -> Self {
        let d = space.dim();
        Self {
            input: space.clone(),
            output: SystemSpace::trivial(),
            environment: space.clone(),
            isometry: linalg::identity(d),
        }
    }

    /// Prepares `state` from nothing.
    pub fn prepare(state: &DensityOperator) -> Result<Self> {
        let env_label = fresh_label(state.space(), "E");
        let psi = purify_ket(state, &env_label)?;
        let env = psi.space.select(&[env_label.as_str()])?;
        let v = CMat::from_column_slice(psi.ket.len(), 1, psi.ket.as_slice());
        Self::new(SystemSpace::trivial(), state.space().clone(), env, v)
    }

    /// Parallel composition; environment factors are renamed on collision.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let input = self.input.join(&other.input)?;
        let output = self.output.join(&other.output)?;
        let taken = output.join(&self.environment)?;
        let other_env = rename_apart(&other.environment, &taken)?;
        let rows = self
            .output
            .join(&self.environment)?
            .join(&other.output)?
            .join(&other_env)?;
        let m = linalg::kron(&self.isometry, &other.isometry);
        let environment = self.environment.join(&other_env)?;
        let order: Vec<&str> = output.labels().into_iter().chain(environment.labels()).collect();
        let m = reorder_rows(&rows, &m, &order)?;
        Self::new(input, output, environment, m)
    }

    /// `second ∘ self`; the inputs of `second` must be outputs of `self`.
    pub fn then(&self, second: &Self) -> Result<Self> {
        let in2 = second.input.labels();
        for l in &in2 {
            let d = self.output.dim_of(l).map_err(|_| {
                Error::Wiring(format!("composed channel input `{l}` is not produced by the first channel"))
            })?;
            if d != second.input.dim_of(l)? {
                return Err(Error::Wiring(format!("dimension of `{l}` differs between channels")));
            }
        }
        let rest_out = self.output.without(&in2);
        let out = rest_out.join(&second.output)?;
        let env2 = rename_apart(&second.environment, &out.join(&self.environment)?)?;
        let first_rows = self.output.join(&self.environment)?;
        let passthrough = rest_out.join(&self.environment)?;
        let order: Vec<&str> = second.input.labels().into_iter().chain(passthrough.labels()).collect();
        let v1 = reorder_rows(&first_rows, &self.isometry, &order)?;
        let v = linalg::kron(&second.isometry, &linalg::identity(passthrough.dim())) * v1;
        let rows = second.output.join(&env2)?.join(&passthrough)?;
        let environment = self.environment.join(&env2)?;
        let order: Vec<&str> = out.labels().into_iter().chain(environment.labels()).collect();
        let v = reorder_rows(&rows, &v, &order)?;
        Self::new(self.input.clone(), out, environment, v)
    }
}

fn fresh_label(taken: &SystemSpace, base: &str) -> String {
    let mut k = 0usize;
    loop {
        let l = format!("{base}{k}");
        if !taken.contains(&l) {
            return l;
        }
        k += 1;
    }
}

fn rename_apart(space: &SystemSpace, taken: &SystemSpace) -> Result<SystemSpace> {
    let mut used = taken.clone();
    let mut parts = Vec::new();
    for s in space.subsystems() {
        let label = if used.contains(&s.label) {
            fresh_label(&used.join(space).unwrap_or_else(|_| used.clone()), &s.label)
        } else {
            s.label.clone()
        };
        used = used.join(&SystemSpace::single(label.clone(), s.dim)?)?;
        parts.push((label, s.dim));
    }
    SystemSpace::new(parts)
}

/// Permutes the rows of `m` (rows indexed by `rows`) into the factor order
/// `labels`.
pub(crate) fn reorder_rows<L: AsRef<str>>(rows: &SystemSpace, m: &CMat, labels: &[L]) -> Result<CMat> {
    if labels.len() != rows.len() {
        return Err(Error::usage("row reorder needs every label"));
    }
    let order = rows.positions(labels)?;
    let map = rows.permutation_map(&order);
    Ok(CMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(map[i], j)]))
}

/// Applies `ch` to the factors of `rho` named by its input, acting as the
/// identity elsewhere. The result lists the untouched factors first, then the
/// channel outputs.
pub fn apply_channel(ch: &ChannelSpec, rho: &DensityOperator) -> Result<DensityOperator> {
    let space = rho.space();
    for s in ch.input.subsystems() {
        let d = space
            .dim_of(&s.label)
            .map_err(|_| Error::Wiring(format!("channel input `{}` is not present in the state", s.label)))?;
        if d != s.dim {
            return Err(Error::Wiring(format!(
                "channel expects `{}` of dimension {}, state has {d}",
                s.label, s.dim
            )));
        }
    }
    let in_labels = ch.input.labels();
    let rest = space.without(&in_labels);
    let out_space = rest.join(&ch.output).map_err(|e| match e {
        Error::DuplicateLabel(l) => Error::Wiring(format!("channel output `{l}` collides with an existing factor")),
        e => e,
    })?;
    let order: Vec<&str> = rest.labels().into_iter().chain(in_labels).collect();
    let (_, m) = reorder_matrix(space, rho.matrix(), &order)?;

    let di = ch.input.dim();
    let dout = ch.output.dim();
    let de = ch.environment.dim();
    let dr = rest.dim();
    let v = &ch.isometry;
    let vh = v.adjoint();
    let mut out = CMat::zeros(dr * dout, dr * dout);
    for r in 0..dr {
        for s in r..dr {
            let block = m.view((r * di, s * di), (di, di));
            let w = v * block * &vh;
            for o in 0..dout {
                for p in 0..dout {
                    let mut acc = c(0.0, 0.0);
                    for e in 0..de {
                        acc += w[(o * de + e, p * de + e)];
                    }
                    out[(r * dout + o, s * dout + p)] = acc;
                    if s != r {
                        out[(s * dout + p, r * dout + o)] = acc.conj();
                    }
                }
            }
        }
    }
    Ok(DensityOperator::from_parts(out_space, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::linalg::{diag, maximally_mixed};

    fn rho_ab() -> DensityOperator {
        let m = CMat::from_fn(4, 4, |i, j| {
            if i == j {
                c([0.1, 0.2, 0.3, 0.4][i], 0.0)
            } else if i + j == 3 {
                c(0.05, if i < j { 0.02 } else { -0.02 })
            } else {
                c(0.0, 0.0)
            }
        });
        DensityOperator::new(SystemSpace::new([("A", 2), ("B", 2)]).unwrap(), m).unwrap()
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let rho = rho_ab();
        let out = apply_channel(&ChannelSpec::identity(rho.space()), &rho).unwrap();
        assert!((out.matrix() - rho.matrix()).norm() < 1e-14);
    }

    #[test]
    fn embedding_then_discarding_env_is_identity() {
        let rho = rho_ab();
        // |ψ⟩_A ↦ |ψ⟩_A ⊗ |0⟩_E
        let mut v = CMat::zeros(6, 2);
        v[(0, 0)] = c(1.0, 0.0);
        v[(3, 1)] = c(1.0, 0.0);
        let ch = ChannelSpec::new(
            SystemSpace::single("A", 2).unwrap(),
            SystemSpace::single("A", 2).unwrap(),
            SystemSpace::single("E", 3).unwrap(),
            v,
        )
        .unwrap();
        let out = apply_channel(&ch, &rho).unwrap().reorder(&["A", "B"]).unwrap();
        assert!((out.matrix() - rho.matrix()).norm() < 1e-14);
    }

    #[test]
    fn swap_with_mixed_environment_depolarizes() {
        // V|ψ⟩_A = |ψ⟩_E ⊗ |Φ⟩_{A F}: the output on A is π for any input.
        let mut v = CMat::zeros(8, 2);
        let a = 1.0 / 2f64.sqrt();
        for psi in 0..2 {
            for k in 0..2 {
                // rows ordered (A, E, F)
                v[(k * 4 + psi * 2 + k, psi)] = c(a, 0.0);
            }
        }
        let ch = ChannelSpec::new(
            SystemSpace::single("A", 2).unwrap(),
            SystemSpace::single("A", 2).unwrap(),
            SystemSpace::new([("E", 2), ("F", 2)]).unwrap(),
            v,
        )
        .unwrap();
        let pure = DensityOperator::new(SystemSpace::single("A", 2).unwrap(), diag(&[1.0, 0.0])).unwrap();
        let out = apply_channel(&ch, &pure).unwrap();
        assert!((out.matrix() - maximally_mixed(2)).norm() < 1e-14);
        let mixed = DensityOperator::maximally_mixed(SystemSpace::single("A", 2).unwrap());
        let out = apply_channel(&ch, &mixed).unwrap();
        assert!((out.matrix() - maximally_mixed(2)).norm() < 1e-14);
    }

    #[test]
    fn non_isometry_rejected() {
        let s = SystemSpace::single("A", 2).unwrap();
        let r = ChannelSpec::new(s.clone(), s, SystemSpace::trivial(), diag(&[1.0, 0.5]));
        assert!(matches!(r, Err(Error::InvalidChannel(_))));
    }

    #[test]
    fn composition_matches_sequential_application() {
        let rho = rho_ab();
        let a = SystemSpace::single("A", 2).unwrap();
        let first = ChannelSpec::relabel(&a, &[("A", "X")]).unwrap();
        let x = SystemSpace::single("X", 2).unwrap();
        let second = ChannelSpec::discard(&x)
            .tensor(&ChannelSpec::prepare(&DensityOperator::maximally_mixed(
                SystemSpace::single("Y", 2).unwrap(),
            ))
            .unwrap())
            .unwrap();
        let both = first.then(&second).unwrap();
        let seq = apply_channel(&second, &apply_channel(&first, &rho).unwrap()).unwrap();
        let once = apply_channel(&both, &rho).unwrap();
        assert_eq!(seq.space(), once.space());
        assert!((seq.matrix() - once.matrix()).norm() < 1e-14);
    }
}
