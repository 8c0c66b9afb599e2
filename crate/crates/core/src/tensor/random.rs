//! Seeded random ensembles.
//!
//! Every draw comes from a ChaCha20 stream cipher generator. A 64-bit seed
//! selects the key and a second 64-bit value selects the stream, so trial `t`
//! of a run with seed `s` always sees the same numbers no matter how trials
//! are scheduled.

use nalgebra::QR;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::channel::ChannelSpec;
use super::cq::CqState;
use super::linalg::{self, c, CMat, CVec};
use super::operator::DensityOperator;
use super::space::SystemSpace;
use crate::{Error, Result};

pub type TrialRng = ChaCha20Rng;

pub fn trial_rng(seed: u64, stream: u64) -> TrialRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Matrix of i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    let mut m = CMat::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            let re = gaussian(rng);
            let im = gaussian(rng);
            m[(i, j)] = c(re, im);
        }
    }
    m
}

/// `G G† / tr(G G†)` with `G` a `d × rank` Ginibre matrix.
pub fn random_state_with_rank<R: Rng + ?Sized>(
    rng: &mut R,
    space: &SystemSpace,
    rank: usize,
) -> DensityOperator {
    let d = space.dim();
    let g = ginibre(rng, d, rank.max(1));
    let m = &g * g.adjoint();
    let tr = linalg::trace(&m).re;
    DensityOperator::from_parts(space.clone(), m.unscale(tr))
}

pub fn random_state<R: Rng + ?Sized>(rng: &mut R, space: &SystemSpace) -> DensityOperator {
    random_state_with_rank(rng, space, space.dim())
}

pub fn random_ket<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CVec {
    let g = ginibre(rng, d, 1);
    let v = CVec::from_column_slice(g.as_slice());
    let n = v.norm();
    v.unscale(n)
}

pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, space: &SystemSpace) -> DensityOperator {
    let v = random_ket(rng, space.dim());
    DensityOperator::from_parts(space.clone(), &v * v.adjoint())
}

/// Haar-distributed isometry `C^{din} → C^{dout}`.
pub fn haar_isometry<R: Rng + ?Sized>(rng: &mut R, din: usize, dout: usize) -> Result<CMat> {
    if dout < din {
        return Err(Error::dims(format!("no isometry from dimension {din} into {dout}")));
    }
    let g = ginibre(rng, dout, din);
    let qr = QR::new(g);
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..din {
        let rk = r[(k, k)];
        let n = rk.norm();
        if n > 0.0 {
            let phase = rk / n;
            for i in 0..dout {
                q[(i, k)] *= phase;
            }
        }
    }
    Ok(q)
}

pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMat {
    haar_isometry(rng, d, d).expect("square")
}

/// POVM with `outcomes` elements on `C^d`, obtained by cutting a Haar
/// isometry `C^d → C^{d·outcomes}` into `d × d` blocks `V_x` and setting
/// `Λ_x = V_x† V_x`.
pub fn random_povm<R: Rng + ?Sized>(rng: &mut R, d: usize, outcomes: usize) -> Result<Vec<CMat>> {
    if outcomes == 0 {
        return Err(Error::usage("a POVM needs at least one outcome"));
    }
    let v = haar_isometry(rng, d, d * outcomes)?;
    Ok((0..outcomes)
        .map(|x| {
            let block = v.view((x * d, 0), (d, d));
            block.adjoint() * block
        })
        .collect())
}

/// Dirichlet(1, …, 1) weights.
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

pub fn random_cq_state<R: Rng + ?Sized>(
    rng: &mut R,
    x_label: &str,
    nx: usize,
    b_space: &SystemSpace,
) -> Result<CqState> {
    let probs = random_distribution(rng, nx);
    let conditionals = (0..nx).map(|_| random_state(rng, b_space)).collect();
    CqState::new(x_label, probs, conditionals)
}

/// Classical-classical state: a Dirichlet joint distribution on `X × B`
/// with diagonal conditionals.
pub fn random_classical_state<R: Rng + ?Sized>(
    rng: &mut R,
    x_label: &str,
    nx: usize,
    b_label: &str,
    nb: usize,
) -> Result<CqState> {
    let joint = random_distribution(rng, nx * nb);
    let b = SystemSpace::single(b_label, nb)?;
    let mut probs = Vec::with_capacity(nx);
    let mut conditionals = Vec::with_capacity(nx);
    for x in 0..nx {
        let row = &joint[x * nb..(x + 1) * nb];
        let p: f64 = row.iter().sum();
        probs.push(p);
        let cond: Vec<f64> = row.iter().map(|v| v / p).collect();
        conditionals.push(DensityOperator::from_parts(b.clone(), linalg::diag(&cond)));
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    CqState::new(x_label, probs, conditionals)
}

/// Channel with a Haar isometry `input → output ⊗ E`, `|E| = env_dim`.
pub fn random_channel<R: Rng + ?Sized>(
    rng: &mut R,
    input: &SystemSpace,
    output: &SystemSpace,
    env_label: &str,
    env_dim: usize,
) -> Result<ChannelSpec> {
    let env = SystemSpace::single(env_label, env_dim)?;
    let v = haar_isometry(rng, input.dim(), output.dim() * env_dim)?;
    ChannelSpec::new(input.clone(), output.clone(), env, v)
}

/// Smallest environment that lets `input` embed into `output ⊗ E`, doubled
/// so the channel is generically noisy.
pub fn default_env_dim(input: &SystemSpace, output: &SystemSpace) -> usize {
    2 * input.dim().div_ceil(output.dim())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnsembleKind {
    State,
    PureState,
    Isometry,
    Povm,
    CqState,
}

#[derive(Clone, Debug)]
pub enum RandomObject {
    State(DensityOperator),
    Isometry(CMat),
    Povm(Vec<CMat>),
    CqState(CqState),
}

/// Draws one object of `kind` from the stream `(seed, 0)`.
///
/// `dims` are subsystem dimensions for states (labels `S0, S1, …`),
/// `[din, dout]` for isometries, `[d]` for POVMs and `[|X|, |B|]` for c-q
/// states; `param` is the POVM outcome count.
pub fn random_ensemble(kind: EnsembleKind, dims: &[usize], seed: u64, param: usize) -> Result<RandomObject> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::dims("dimensions must be positive"));
    }
    let mut rng = trial_rng(seed, 0);
    let space = || SystemSpace::new(dims.iter().enumerate().map(|(i, &d)| (format!("S{i}"), d)));
    match kind {
        EnsembleKind::State => Ok(RandomObject::State(random_state(&mut rng, &space()?))),
        EnsembleKind::PureState => Ok(RandomObject::State(random_pure_state(&mut rng, &space()?))),
        EnsembleKind::Isometry => {
            let [din, dout] = dims else {
                return Err(Error::usage("isometry needs [din, dout]"));
            };
            Ok(RandomObject::Isometry(haar_isometry(&mut rng, *din, *dout)?))
        }
        EnsembleKind::Povm => Ok(RandomObject::Povm(random_povm(&mut rng, dims[0], param)?)),
        EnsembleKind::CqState => {
            let [nx, nb] = dims else {
                return Err(Error::usage("c-q state needs [|X|, |B|]"));
            };
            let b = SystemSpace::single("B", *nb)?;
            Ok(RandomObject::CqState(random_cq_state(&mut rng, "X", *nx, &b)?))
        }
    }
}
