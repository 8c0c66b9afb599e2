use super::linalg::{self, hermiticity_defect, kron, CMat, CVec, Eigh};
use super::space::SystemSpace;
use crate::{Error, Result};

/// A matrix together with the labeled spaces it maps between.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledOperator {
    space_out: SystemSpace,
    space_in: SystemSpace,
    entries: CMat,
}

impl LabeledOperator {
    pub fn new(space_out: SystemSpace, space_in: SystemSpace, entries: CMat) -> Result<Self> {
        if entries.nrows() != space_out.dim() || entries.ncols() != space_in.dim() {
            return Err(Error::dims(format!(
                "{}×{} matrix for spaces {} ← {}",
                entries.nrows(),
                entries.ncols(),
                space_out,
                space_in
            )));
        }
        Ok(Self {
            space_out,
            space_in,
            entries,
        })
    }

    pub fn square(space: SystemSpace, entries: CMat) -> Result<Self> {
        Self::new(space.clone(), space, entries)
    }

    pub fn identity(space: SystemSpace) -> Self {
        let d = space.dim();
        Self {
            space_out: space.clone(),
            space_in: space,
            entries: linalg::identity(d),
        }
    }

    pub fn space_out(&self) -> &SystemSpace {
        &self.space_out
    }

    pub fn space_in(&self) -> &SystemSpace {
        &self.space_in
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub fn into_entries(self) -> CMat {
        self.entries
    }

    pub fn is_square(&self) -> bool {
        self.space_out == self.space_in
    }

    fn require_square(&self) -> Result<&SystemSpace> {
        if !self.is_square() {
            return Err(Error::dims(format!(
                "expected a square operator, got {} ← {}",
                self.space_out, self.space_in
            )));
        }
        Ok(&self.space_out)
    }

    pub fn partial_trace<L: AsRef<str>>(&self, keep: &[L]) -> Result<Self> {
        let space = self.require_square()?;
        let (kept, m) = trace_matrix(space, &self.entries, keep)?;
        Self::square(kept, m)
    }

    /// Puts the factors in the order `labels` (a permutation of the space).
    pub fn reorder<L: AsRef<str>>(&self, labels: &[L]) -> Result<Self> {
        let space = self.require_square()?;
        let (s, m) = reorder_matrix(space, &self.entries, labels)?;
        Self::square(s, m)
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Self::new(
            self.space_out.join(&other.space_out)?,
            self.space_in.join(&other.space_in)?,
            kron(&self.entries, &other.entries),
        )
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space_out: self.space_in.clone(),
            space_in: self.space_out.clone(),
            entries: self.entries.adjoint(),
        }
    }
}

/// A Hermitian, positive semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    space: SystemSpace,
    matrix: CMat,
}

/// Tolerance on Hermiticity, positivity and trace for [`DensityOperator`].
pub const DENSITY_TOL: f64 = 1e-10;

impl DensityOperator {
    pub fn new(space: SystemSpace, matrix: CMat) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::dims(format!(
                "{}×{} matrix for space {} of dimension {d}",
                matrix.nrows(),
                matrix.ncols(),
                space
            )));
        }
        let herm = hermiticity_defect(&matrix);
        if herm > DENSITY_TOL {
            return Err(Error::NotDensity(format!("not Hermitian (defect {herm:e})")));
        }
        let tr = linalg::trace(&matrix).re;
        if (tr - 1.0).abs() > DENSITY_TOL {
            return Err(Error::NotDensity(format!("trace {tr} ≠ 1")));
        }
        let min = Eigh::new(&matrix).values.last().copied().unwrap_or(0.0);
        if min < -DENSITY_TOL {
            return Err(Error::NotDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self {
            space,
            matrix: linalg::hermitize(&matrix),
        })
    }

    /// Wraps a matrix already known to be a state up to round-off.
    pub(crate) fn from_parts(space: SystemSpace, matrix: CMat) -> Self {
        debug_assert_eq!(space.dim(), matrix.nrows());
        Self {
            space,
            matrix: linalg::hermitize(&matrix),
        }
    }

    pub fn from_ket(space: SystemSpace, ket: &CVec) -> Result<Self> {
        if ket.len() != space.dim() {
            return Err(Error::dims(format!(
                "ket of length {} for space {space}",
                ket.len()
            )));
        }
        let n = ket.norm();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::NotDensity(format!("ket norm {n} ≠ 1")));
        }
        Ok(Self::from_parts(space, ket * ket.adjoint()))
    }

    pub fn maximally_mixed(space: SystemSpace) -> Self {
        let d = space.dim();
        Self {
            space,
            matrix: linalg::maximally_mixed(d),
        }
    }

    /// `Φ^k` on `a ⊗ b`, both of dimension `k`.
    pub fn maximally_entangled(a: &str, b: &str, k: usize) -> Result<Self> {
        let space = SystemSpace::new([(a, k), (b, k)])?;
        Self::from_ket(space, &maximally_entangled_ket(k))
    }

    pub fn space(&self) -> &SystemSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn into_operator(self) -> LabeledOperator {
        LabeledOperator {
            space_out: self.space.clone(),
            space_in: self.space,
            entries: self.matrix,
        }
    }

    pub fn as_operator(&self) -> LabeledOperator {
        self.clone().into_operator()
    }

    pub fn partial_trace<L: AsRef<str>>(&self, keep: &[L]) -> Result<Self> {
        let (space, m) = trace_matrix(&self.space, &self.matrix, keep)?;
        Ok(Self::from_parts(space, m))
    }

    /// Marginal on `labels`, in that order.
    pub fn marginal<L: AsRef<str>>(&self, labels: &[L]) -> Result<Self> {
        self.partial_trace(labels)?.reorder(labels)
    }

    pub fn reorder<L: AsRef<str>>(&self, labels: &[L]) -> Result<Self> {
        let (space, m) = reorder_matrix(&self.space, &self.matrix, labels)?;
        Ok(Self { space, matrix: m })
    }

    pub fn relabel<L: AsRef<str>, M: AsRef<str>>(&self, pairs: &[(L, M)]) -> Result<Self> {
        Ok(Self {
            space: self.space.relabel(pairs)?,
            matrix: self.matrix.clone(),
        })
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            space: self.space.join(&other.space)?,
            matrix: kron(&self.matrix, &other.matrix),
        })
    }

    /// `ρ^{⊗n}` with the copies of each factor grouped into a single factor
    /// of dimension `d^n` under the same label.
    pub fn tensor_power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::usage("number of copies must be at least 1"));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let k = self.space.len();
        let mut parts = Vec::with_capacity(n * k);
        for copy in 0..n {
            for s in self.space.subsystems() {
                parts.push((format!("{}#{copy}", s.label), s.dim));
            }
        }
        let expanded = SystemSpace::new(parts)?;
        let mut m = self.matrix.clone();
        for _ in 1..n {
            m = kron(&m, &self.matrix);
        }
        let grouped_order: Vec<usize> = (0..k)
            .flat_map(|f| (0..n).map(move |copy| copy * k + f))
            .collect();
        let map = expanded.permutation_map(&grouped_order);
        let m = permute_matrix(&m, &map);
        let space = SystemSpace::new(
            self.space
                .subsystems()
                .iter()
                .map(|s| (s.label.clone(), s.dim.pow(n as u32))),
        )?;
        Ok(Self { space, matrix: m })
    }

    pub fn eigh(&self) -> Eigh {
        Eigh::new(&self.matrix)
    }

    pub fn rank(&self) -> usize {
        self.eigh().rank()
    }

    /// Purity test `tr ρ² ≈ 1`.
    pub fn is_pure(&self, tol: f64) -> bool {
        let p = self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>();
        (p - 1.0).abs() <= tol
    }
}

pub fn maximally_entangled_ket(k: usize) -> CVec {
    let mut v = CVec::zeros(k * k);
    let a = 1.0 / (k as f64).sqrt();
    for i in 0..k {
        v[i * k + i] = linalg::c(a, 0.0);
    }
    v
}

pub(crate) fn permute_matrix(m: &CMat, map: &[usize]) -> CMat {
    let d = map.len();
    CMat::from_fn(d, d, |i, j| m[(map[i], map[j])])
}

pub(crate) fn permute_vector(v: &CVec, map: &[usize]) -> CVec {
    CVec::from_fn(map.len(), |i, _| v[map[i]])
}

pub(crate) fn reorder_matrix<L: AsRef<str>>(
    space: &SystemSpace,
    m: &CMat,
    labels: &[L],
) -> Result<(SystemSpace, CMat)> {
    if labels.len() != space.len() {
        return Err(Error::usage(format!(
            "reorder of {space} needs all {} labels, got {}",
            space.len(),
            labels.len()
        )));
    }
    let order = space.positions(labels)?;
    let new_space = space.select(labels)?;
    if order.iter().enumerate().all(|(i, &p)| i == p) {
        return Ok((new_space, m.clone()));
    }
    let map = space.permutation_map(&order);
    Ok((new_space, permute_matrix(m, &map)))
}

pub(crate) fn trace_matrix<L: AsRef<str>>(
    space: &SystemSpace,
    m: &CMat,
    keep: &[L],
) -> Result<(SystemSpace, CMat)> {
    let mut keep_pos = space.positions(keep)?;
    keep_pos.sort_unstable();
    let kept = SystemSpace::from_subsystems(
        keep_pos.iter().map(|&p| space.subsystems()[p].clone()).collect(),
    )?;
    let traced: Vec<usize> = (0..space.len()).filter(|p| !keep_pos.contains(p)).collect();
    let mut order = keep_pos.clone();
    order.extend(&traced);
    let map = space.permutation_map(&order);
    let dk = kept.dim();
    let dt = space.dim() / dk;
    let mut out = CMat::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = linalg::c(0.0, 0.0);
            for t in 0..dt {
                acc += m[(map[i * dt + t], map[j * dt + t])];
            }
            out[(i, j)] = acc;
        }
    }
    Ok((kept, out))
}

/// `op ⊗ I` on `full`, with the factors of `op` placed where `full` lists them.
pub(crate) fn embed_matrix(op_space: &SystemSpace, op: &CMat, full: &SystemSpace) -> Result<CMat> {
    let rest = full.without(&op_space.labels());
    let joined = op_space.join(&rest)?;
    let big = kron(op, &linalg::identity(rest.dim()));
    let (_, m) = reorder_matrix(&joined, &big, &full.labels())?;
    Ok(m)
}

/// Free-function form of [`LabeledOperator::partial_trace`].
pub fn partial_trace<L: AsRef<str>>(op: &LabeledOperator, keep: &[L]) -> Result<LabeledOperator> {
    op.partial_trace(keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::linalg::diag;

    #[test]
    fn mes_marginal_is_maximally_mixed() {
        let phi = DensityOperator::maximally_entangled("A", "B", 2).unwrap();
        let a = phi.partial_trace(&["A"]).unwrap();
        assert!((a.matrix() - diag(&[0.5, 0.5])).norm() < 1e-14);
    }

    #[test]
    fn trace_of_product_keeps_factor() {
        let ra = DensityOperator::new(
            SystemSpace::single("A", 2).unwrap(),
            diag(&[0.3, 0.7]),
        )
        .unwrap();
        let sb = DensityOperator::new(
            SystemSpace::single("B", 3).unwrap(),
            diag(&[0.2, 0.2, 0.6]),
        )
        .unwrap();
        let ab = ra.tensor(&sb).unwrap();
        assert!((ab.partial_trace(&["A"]).unwrap().matrix() - ra.matrix()).norm() < 1e-14);
        assert!((ab.partial_trace(&["B"]).unwrap().matrix() - sb.matrix()).norm() < 1e-14);
        let none: [&str; 0] = [];
        let t = ab.partial_trace(&none).unwrap();
        assert_eq!(t.dim(), 1);
        assert!((t.matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unknown_label_is_an_error() {
        let phi = DensityOperator::maximally_entangled("A", "B", 2).unwrap();
        assert!(matches!(phi.partial_trace(&["Z"]), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn reorder_round_trip() {
        let ra = DensityOperator::new(SystemSpace::single("A", 2).unwrap(), diag(&[0.3, 0.7]))
            .unwrap();
        let sb = DensityOperator::new(
            SystemSpace::single("B", 3).unwrap(),
            diag(&[0.2, 0.2, 0.6]),
        )
        .unwrap();
        let ab = ra.tensor(&sb).unwrap();
        let ba = sb.tensor(&ra).unwrap();
        assert!((ab.reorder(&["B", "A"]).unwrap().matrix() - ba.matrix()).norm() < 1e-14);
    }

    #[test]
    fn tensor_power_groups_copies() {
        let ra = DensityOperator::new(SystemSpace::single("A", 2).unwrap(), diag(&[0.3, 0.7]))
            .unwrap();
        let sb = DensityOperator::new(SystemSpace::single("B", 2).unwrap(), diag(&[0.1, 0.9]))
            .unwrap();
        let ab = ra.tensor(&sb).unwrap();
        let p = ab.tensor_power(2).unwrap();
        assert_eq!(p.space().dims(), vec![4, 4]);
        let expect = kron(&kron(ra.matrix(), ra.matrix()), &kron(sb.matrix(), sb.matrix()));
        assert!((p.matrix() - expect).norm() < 1e-14);
    }

    #[test]
    fn density_validation() {
        let s = SystemSpace::single("A", 2).unwrap();
        assert!(DensityOperator::new(s.clone(), diag(&[0.5, 0.6])).is_err());
        assert!(DensityOperator::new(s.clone(), diag(&[1.2, -0.2])).is_err());
        assert!(DensityOperator::new(s, diag(&[0.5, 0.5])).is_ok());
    }
}
