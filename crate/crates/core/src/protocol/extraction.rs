use super::{check_budget, check_copies, cost, Costs, FinalState, ProtocolKind, ProtocolOutcome};
use crate::entropy::{minimize_states, OptConfig};
use crate::tensor::linalg::{self, psd_sqrt, CMat, Eigh};
use crate::tensor::{digits, CqState};
use crate::protocol::ClassicalTable;
use crate::{Error, Result};

/// Extraction from `ρ_XB^{⊗n}` by a function `e: X^n → Z` (`|Z|` = codomain
/// of the table, the `n`-copy register size).
#[derive(Clone, Debug)]
pub struct ExtractionInstance {
    pub state: CqState,
    pub copies: usize,
    pub table: ClassicalTable,
}

/// The blocks `ω_z = Σ_{e(x^n)=z} p_{x^n} ρ^{x^n}` on `B^n`.
pub(crate) fn output_blocks(state: &CqState, copies: usize, table: &ClassicalTable) -> Result<Vec<CMat>> {
    let nx = state.x_dim();
    let domain = nx.checked_pow(copies as u32).ok_or_else(|| Error::Budget("too many strings".into()))?;
    if table.domain() != domain {
        return Err(Error::Table(format!("table domain {} but |X|^n = {domain}", table.domain())));
    }
    let db = state.b_space().dim().pow(copies as u32);
    check_budget("output state", db * table.codomain())?;
    let mut blocks = vec![CMat::zeros(db, db); table.codomain()];
    for x in 0..domain {
        let xs = digits(x, nx, copies);
        blocks[table.apply(x)] += state.weighted_string(&xs);
    }
    Ok(blocks)
}

/// `max_σ Σ_z F(ω_z, σ)` by descent on σ, started at `guess`.
fn max_fidelity_sum(blocks: &[CMat], guess: &CMat, cfg: &OptConfig) -> Result<f64> {
    let d = guess.nrows();
    let roots: Vec<CMat> = blocks.iter().map(psd_sqrt).collect::<Result<_>>()?;
    // F(ω, σ) = tr (√ω σ √ω)^{1/2}, with gradient ½ √ω (√ω σ √ω)^{-1/2} √ω
    let obj = |sigma: &CMat| {
        let mut value = 0.0;
        let mut grad = CMat::zeros(d, d);
        for r in &roots {
            let x = r * sigma * r;
            let e = Eigh::new(&x);
            let cut = e.cutoff();
            value += e.values.iter().filter(|&&v| v > cut).map(|v| v.sqrt()).sum::<f64>();
            let inv = e.map(|v| if v > cut { v.powf(-0.5) } else { 0.0 });
            grad += r * inv * r;
        }
        Some((-value, grad.scale(-0.5)))
    };
    let m = minimize_states(&obj, d, &[guess.clone()], cfg)?;
    Ok(-m.value)
}

pub fn run_randomness_extraction(inst: &ExtractionInstance, cfg: &OptConfig) -> Result<ProtocolOutcome> {
    check_copies(inst.copies)?;
    if !inst.table.is_surjective() {
        return Err(Error::Table("the extraction function must be surjective".into()));
    }
    let blocks = output_blocks(&inst.state, inst.copies, &inst.table)?;
    let nz = blocks.len() as f64;
    let db = blocks[0].nrows();
    let omega_b = blocks.iter().fold(CMat::zeros(db, db), |a, b| a + b);
    let mut at_marginal = 0.0;
    for b in &blocks {
        at_marginal += linalg::fidelity_psd(b, &omega_b)?;
    }
    // F(ω, π⊗σ) = Σ_z F(ω_z, σ)/√|Z|
    let lower = (at_marginal / nz.sqrt()).min(1.0);
    let upper = lower.sqrt();
    let merit = if db == 1 {
        lower
    } else {
        let found = max_fidelity_sum(&blocks, &omega_b, cfg)? / nz.sqrt();
        if found > upper + 1e-8 {
            return Err(Error::NonConvergence { best: found, residual: found - upper });
        }
        found.clamp(lower, upper)
    };
    let mut costs = Costs::new();
    costs.insert("l".into(), cost(blocks.len(), inst.copies));
    let mut b_space = inst.state.b_space().clone();
    if inst.copies > 1 {
        b_space = crate::tensor::SystemSpace::new(
            b_space.subsystems().iter().map(|s| (s.label.clone(), s.dim.pow(inst.copies as u32))),
        )?;
    }
    Ok(ProtocolOutcome {
        kind: ProtocolKind::RandomnessExtraction,
        final_state: FinalState::CqBlocks { z_label: "Z".into(), blocks, b_space },
        merit: merit.min(1.0),
        costs,
        copies: inst.copies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::random::{random_cq_state, trial_rng};
    use crate::tensor::SystemSpace;

    #[test]
    fn single_output_is_perfect() {
        let b = SystemSpace::single("B", 2).unwrap();
        let cq = random_cq_state(&mut trial_rng(1, 0), "X", 3, &b).unwrap();
        let inst = ExtractionInstance { state: cq, copies: 1, table: ClassicalTable::constant(3) };
        let out = run_randomness_extraction(&inst, &OptConfig::default()).unwrap();
        assert!((out.merit - 1.0).abs() < 1e-10);
    }

    #[test]
    fn uniform_bits_are_perfect() {
        let cq = CqState::classical("X", vec![0.5, 0.5]).unwrap();
        let inst = ExtractionInstance { state: cq, copies: 3, table: ClassicalTable::identity(8) };
        let out = run_randomness_extraction(&inst, &OptConfig::default()).unwrap();
        assert!((out.merit - 1.0).abs() < 1e-12);
        assert_eq!(out.costs["l"], 1.0);
    }

    #[test]
    fn merit_sits_in_bracket() {
        let b = SystemSpace::single("B", 2).unwrap();
        let cq = random_cq_state(&mut trial_rng(2, 0), "X", 2, &b).unwrap();
        let inst = ExtractionInstance { state: cq, copies: 1, table: ClassicalTable::identity(2) };
        let out = run_randomness_extraction(&inst, &OptConfig::default()).unwrap();
        assert!(out.merit > 0.0 && out.merit <= 1.0);
    }

    #[test]
    fn non_surjective_table_rejected() {
        let cq = CqState::classical("X", vec![0.5, 0.5]).unwrap();
        let inst = ExtractionInstance { state: cq, copies: 1, table: ClassicalTable::new(3, vec![0, 1]).unwrap() };
        assert!(matches!(run_randomness_extraction(&inst, &OptConfig::default()), Err(Error::Table(_))));
    }
}
