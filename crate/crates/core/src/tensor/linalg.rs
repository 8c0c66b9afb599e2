//! Dense complex matrix helpers shared by every layer above.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Relative threshold below which an eigenvalue counts as zero.
pub const CLIP: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn maximally_mixed(d: usize) -> CMat {
    CMat::identity(d, d).unscale(d as f64)
}

pub fn diag(values: &[f64]) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(
        values.len(),
        values.iter().map(|&v| c(v, 0.0)),
    ))
}

pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()).unscale(2.0)
}

pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().sum()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Largest entry of `|m − m†|`.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted
/// descending.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl Eigh {
    pub fn new(m: &CMat) -> Self {
        let d = m.nrows();
        if d == 0 {
            return Self {
                values: vec![],
                vectors: CMat::zeros(0, 0),
            };
        }
        let se = SymmetricEigen::new(hermitize(m));
        let mut idx: Vec<usize> = (0..d).collect();
        idx.sort_by(|&i, &j| se.eigenvalues[j].total_cmp(&se.eigenvalues[i]).then(i.cmp(&j)));
        let values = idx.iter().map(|&i| se.eigenvalues[i]).collect();
        let mut vectors = CMat::zeros(d, d);
        for (k, &i) in idx.iter().enumerate() {
            vectors.set_column(k, &se.eigenvectors.column(i));
        }
        Self { values, vectors }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Absolute cutoff below which eigenvalues are treated as zero.
    pub fn cutoff(&self) -> f64 {
        CLIP * self.max_abs()
    }

    /// `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMat {
        let d = self.values.len();
        let mut scaled = self.vectors.clone();
        for k in 0..d {
            let w = f(self.values[k]);
            scaled.column_mut(k).scale_mut(w);
        }
        scaled * self.vectors.adjoint()
    }

    /// Applies `x ↦ x^p` on the support and 0 elsewhere.
    pub fn power(&self, p: f64) -> CMat {
        let cut = self.cutoff();
        self.map(|x| if x > cut { x.powf(p) } else { 0.0 })
    }

    pub fn support_projector(&self) -> CMat {
        let cut = self.cutoff();
        self.map(|x| if x > cut { 1.0 } else { 0.0 })
    }

    pub fn rank(&self) -> usize {
        let cut = self.cutoff();
        self.values.iter().filter(|&&x| x > cut).count()
    }
}

/// Eigendecomposition after checking positive semidefiniteness.
pub fn psd_eigh(m: &CMat) -> Result<Eigh> {
    let e = Eigh::new(m);
    let min = e.values.last().copied().unwrap_or(0.0);
    if min < -1e-8 * e.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    Ok(e)
}

/// `m^p` for PSD `m` under the support convention.
pub fn psd_power(m: &CMat, p: f64) -> Result<CMat> {
    Ok(psd_eigh(m)?.power(p))
}

pub fn psd_sqrt(m: &CMat) -> Result<CMat> {
    psd_power(m, 0.5)
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return vec![];
    }
    SVD::new(m.clone(), false, false).singular_values.iter().copied().collect()
}

/// `(Σ s_i^p)^{1/p}`; `p = ∞` gives the operator norm.
pub fn schatten(m: &CMat, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::usage(format!("Schatten index must be positive, got {p}")));
    }
    Ok(schatten_of(&singular_values(m), p))
}

pub(crate) fn schatten_of(sv: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return sv.iter().fold(0.0f64, |m, &s| m.max(s));
    }
    let top = sv.iter().fold(0.0f64, |m, &s| m.max(s));
    if top == 0.0 {
        return 0.0;
    }
    // factor out the largest value to keep large p stable
    let sum: f64 = sv.iter().map(|&s| (s / top).powf(p)).sum();
    top * sum.powf(1.0 / p)
}

pub fn trace_norm(m: &CMat) -> f64 {
    singular_values(m).iter().sum()
}

/// `‖√a √b‖₁` for PSD `a`, `b` (not necessarily normalized).
pub fn fidelity_psd(a: &CMat, b: &CMat) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::dims(format!(
            "fidelity of {:?} and {:?} matrices",
            a.shape(),
            b.shape()
        )));
    }
    let sa = psd_sqrt(a)?;
    let sb = psd_sqrt(b)?;
    Ok(trace_norm(&(sa * sb)))
}

/// `√⟨ψ|ρ|ψ⟩`, the fidelity of `ρ` with a normalized pure state.
pub fn fidelity_with_ket(rho: &CMat, ket: &CVec) -> f64 {
    let v = rho * ket;
    ket.dotc(&v).re.max(0.0).sqrt()
}

/// Base-2 logarithm of a positive number; 0 maps to −∞.
pub fn log2(x: f64) -> f64 {
    x.log2()
}
