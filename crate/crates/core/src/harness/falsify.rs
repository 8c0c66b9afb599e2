//! Search for classical witnesses that the two randomness-extraction
//! expressions `S_α(XB) − S_β(B)` and `S̃_α(X|B)` are incomparable.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::AlphaGrid;
use crate::entropy::{beta, conditional_entropy, renyi_entropy, OptConfig};
use crate::tensor::io::StateFile;
use crate::tensor::random::{random_classical_state, trial_rng};
use crate::tensor::CqState;
use crate::{Error, Result};

/// A counterexample must clear the inequality by more than this.
pub const COUNTEREXAMPLE_MARGIN: f64 = 1e-6;

/// Witnesses kept per direction.
const KEEP: usize = 3;

/// Cross-check one trial in this many against the full optimizer.
const CROSS_CHECK_EVERY: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// `S_α(XB) − S_β(B) ≤ S̃_α(X|B)` fails.
    LeftViolated,
    /// `S_α(XB) − S_β(B) ≥ S̃_α(X|B)` fails.
    RightViolated,
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub direction: Direction,
    /// `ρ_XB` with `X` first.
    pub state: StateFile,
    pub alpha: f64,
    pub beta: f64,
    /// `S_α(XB) − S_β(B)`.
    pub left: f64,
    /// `S̃_α(X|B)`, from the full optimizer.
    pub right: f64,
    /// How far the violated inequality misses.
    pub margin: f64,
    pub trial: usize,
    pub seed: u64,
}

impl Counterexample {
    /// Recomputes both sides from the serialized state.
    pub fn replay(&self, cfg: &OptConfig) -> Result<(f64, f64)> {
        let rho = self.state.to_state("counterexample")?;
        comparison_sides(&CqState::from_density(&rho, "X")?, self.alpha, cfg)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FalsifyReport {
    pub trials: usize,
    pub seed: u64,
    pub counterexamples: Vec<Counterexample>,
    pub cross_checks: usize,
    /// Largest `|closed form − optimizer|` seen in the cross-checks.
    pub max_cross_check_gap: f64,
    /// Trials where the closed form and the optimizer disagree by more
    /// than the optimizer tolerance.
    pub cross_check_failures: Vec<usize>,
}

impl FalsifyReport {
    pub fn found(&self, d: Direction) -> usize {
        self.counterexamples.iter().filter(|c| c.direction == d).count()
    }
}

fn joint(cq: &CqState) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(cq.x_dim());
    for (p, cond) in cq.probs().iter().zip(cq.conditionals()) {
        let m = cond.matrix();
        let d = m.nrows();
        let mut off = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    off = off.max(m[(i, j)].norm());
                }
            }
        }
        if off > 1e-12 {
            return Err(Error::usage("the closed form needs a diagonal conditional state"));
        }
        out.push((0..d).map(|b| p * m[(b, b)].re.max(0.0)).collect());
    }
    Ok(out)
}

/// `S̃_α(X|B)` of a classical-classical state in closed form:
/// `(α/(1−α)) log Σ_b (Σ_x p(x,b)^α)^{1/α}`. Diagonal σ is optimal here
/// because pinching in the `B` basis leaves ρ invariant and cannot increase
/// the divergence.
pub fn classical_conditional_entropy(cq: &CqState, alpha: f64) -> Result<f64> {
    if !(alpha >= 0.5) || !alpha.is_finite() {
        return Err(Error::usage(format!("closed form needs α ≥ 1/2, got {alpha}")));
    }
    let p = joint(cq)?;
    let nb = p.first().map_or(0, Vec::len);
    if crate::entropy::near_one(alpha) {
        let h = |v: f64| if v > 0.0 { -v * v.log2() } else { 0.0 };
        let hxb: f64 = p.iter().flatten().map(|&v| h(v)).sum();
        let hb: f64 = (0..nb).map(|b| h(p.iter().map(|r| r[b]).sum())).sum();
        return Ok(hxb - hb);
    }
    let s: f64 = (0..nb)
        .map(|b| p.iter().map(|r| r[b].powf(alpha)).sum::<f64>().powf(1.0 / alpha))
        .sum();
    Ok(alpha / (1.0 - alpha) * s.log2())
}

fn left_side(cq: &CqState, alpha: f64) -> Result<f64> {
    let rho = cq.to_density();
    let b = cq.b_labels();
    Ok(renyi_entropy(&rho, alpha)? - renyi_entropy(&rho.partial_trace(&b)?, beta(alpha)?)?)
}

/// `(S_α(XB) − S_β(B), S̃_α(X|B))`, the right side from the full optimizer.
pub fn comparison_sides(cq: &CqState, alpha: f64, cfg: &OptConfig) -> Result<(f64, f64)> {
    let rho = cq.to_density();
    let right = conditional_entropy(&rho, &[cq.x_label()], &cq.b_labels(), alpha, cfg)?.value;
    Ok((left_side(cq, alpha)?, right))
}

fn classify(left: f64, right: f64) -> Option<(Direction, f64)> {
    if left - right > COUNTEREXAMPLE_MARGIN {
        Some((Direction::LeftViolated, left - right))
    } else if right - left > COUNTEREXAMPLE_MARGIN {
        Some((Direction::RightViolated, right - left))
    } else {
        None
    }
}

struct Sample {
    cq: CqState,
    alpha: f64,
    left: f64,
    fast: f64,
}

fn sample(seed: u64, trial: usize, grid: &AlphaGrid) -> Result<Sample> {
    let mut rng = trial_rng(seed, trial as u64);
    let cq = random_classical_state(&mut rng, "X", 2, "B", 2)?;
    let pts = grid.points();
    let alpha = pts[rng.random_range(0..pts.len())];
    let left = left_side(&cq, alpha)?;
    let fast = classical_conditional_entropy(&cq, alpha)?;
    Ok(Sample { cq, alpha, left, fast })
}

/// Samples `trials` classical `2×2` states with α drawn from `grid`. The
/// right side is evaluated in closed form; one trial in a hundred is
/// cross-checked against the optimizer, and every kept witness is recomputed
/// with `cfg` before it is reported.
pub fn falsify_bound_comparison(trials: usize, seed: u64, grid: &AlphaGrid, cfg: &OptConfig) -> Result<FalsifyReport> {
    let samples: Vec<Sample> = (0..trials).into_par_iter().map(|t| sample(seed, t, grid)).collect::<Result<_>>()?;

    let checked: Vec<(usize, f64)> = (0..trials)
        .into_par_iter()
        .filter(|t| t % CROSS_CHECK_EVERY == 0)
        .map(|t| {
            let s = &samples[t];
            let c = OptConfig { seed: cfg.seed ^ t as u64, parallel: false, ..cfg.clone() };
            let (_, opt) = comparison_sides(&s.cq, s.alpha, &c)?;
            Ok((t, (opt - s.fast).abs()))
        })
        .collect::<Result<_>>()?;
    let max_cross_check_gap = checked.iter().fold(0.0f64, |m, &(_, g)| m.max(g));
    let cross_check_failures = checked.iter().filter(|&&(_, g)| g > super::OPTIMIZER_TOL).map(|&(t, _)| t).collect();

    let mut counterexamples = Vec::new();
    let mut counts = [0usize; 2];
    for (t, s) in samples.iter().enumerate() {
        let Some((dir, _)) = classify(s.left, s.fast) else { continue };
        let slot = dir as usize;
        if counts[slot] >= KEEP {
            if counts.iter().all(|&c| c >= KEEP) {
                break;
            }
            continue;
        }
        let (left, right) = comparison_sides(&s.cq, s.alpha, cfg)?;
        if let Some((d, margin)) = classify(left, right) {
            if d == dir {
                counts[slot] += 1;
                counterexamples.push(Counterexample {
                    direction: d,
                    state: StateFile::from_state(&s.cq.to_density()),
                    alpha: s.alpha,
                    beta: beta(s.alpha)?,
                    left,
                    right,
                    margin,
                    trial: t,
                    seed,
                });
            }
        }
    }
    Ok(FalsifyReport {
        trials,
        seed,
        counterexamples,
        cross_checks: checked.len(),
        max_cross_check_gap,
        cross_check_failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::linalg::diag;
    use crate::tensor::{DensityOperator, SystemSpace};

    fn classical(p: [f64; 4]) -> CqState {
        let s = SystemSpace::new([("X", 2), ("B", 2)]).unwrap();
        CqState::from_density(&DensityOperator::new(s, diag(&p)).unwrap(), "X").unwrap()
    }

    #[test]
    fn correlated_pair_is_balanced() {
        let cq = classical([0.5, 0.0, 0.0, 0.5]);
        for a in [0.55, 0.75, 0.95] {
            assert!(left_side(&cq, a).unwrap().abs() < 1e-12);
            assert!(classical_conditional_entropy(&cq, a).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_optimizer() {
        let cq = classical([0.1, 0.4, 0.3, 0.2]);
        for a in [0.6, 0.9, 1.5] {
            let (_, opt) = comparison_sides(&cq, a, &OptConfig::default()).unwrap();
            assert!((opt - classical_conditional_entropy(&cq, a).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn witnesses_replay() {
        let grid = AlphaGrid::default();
        let cfg = OptConfig::default();
        let r = falsify_bound_comparison(2000, 1, &grid, &cfg).unwrap();
        assert!(r.cross_check_failures.is_empty());
        for c in &r.counterexamples {
            let (l, rr) = c.replay(&cfg).unwrap();
            let (d, m) = classify(l, rr).unwrap();
            assert_eq!(d, c.direction);
            assert!(m > COUNTEREXAMPLE_MARGIN);
        }
    }
}
