use std::collections::BTreeSet;

use super::{check_budget, check_copies, cost, Costs, FinalState, ProtocolKind, ProtocolOutcome};
use crate::tensor::{
    apply_channel, fidelity_with_pure, maximally_entangled_ket, purify_ket, ChannelSpec, DensityOperator, PureState,
    SystemSpace,
};
use crate::{Error, Result};

/// One round: Alice applies `encoder` and sends `forward` to Bob, who
/// applies `decoder` and returns `backward`.
#[derive(Clone, Debug)]
pub struct Round {
    pub encoder: ChannelSpec,
    pub forward: Vec<String>,
    pub decoder: ChannelSpec,
    pub backward: Vec<String>,
}

/// A redistribution instance on `ρ_ABC` with `k` ebits in (`T_A T_B`) and
/// `m` ebits out (`T_A' T_B'`). Channels act on the `n`-copy factors, each of
/// which keeps its single-copy label.
#[derive(Clone, Debug)]
pub struct RedistributionInstance {
    pub state: DensityOperator,
    pub copies: usize,
    pub k: usize,
    pub m: usize,
    pub rounds: Vec<Round>,
}

fn set(labels: &[&str]) -> BTreeSet<String> {
    labels.iter().map(|s| s.to_string()).collect()
}

struct Run {
    final_state: DensityOperator,
    merit: f64,
    forward: f64,
    backward: f64,
    e: f64,
}

fn run_rounds(inst: &RedistributionInstance) -> Result<Run> {
    check_copies(inst.copies)?;
    if inst.k == 0 || inst.m == 0 {
        return Err(Error::usage("entanglement sizes must be at least 1"));
    }
    if inst.rounds.is_empty() {
        return Err(Error::Wiring("no rounds".into()));
    }
    let base = inst.state.reorder(&["A", "B", "C"]).map_err(|_| {
        Error::Wiring(format!("redistribution needs a state on A, B, C; got {}", inst.state.space()))
    })?;
    let n = inst.copies;
    let rho = base.tensor_power(n)?;
    check_budget("n-copy input", rho.dim())?;
    let psi = purify_ket(&rho, "R")?;
    let ent_in = PureState {
        space: SystemSpace::new([("TA", inst.k), ("TB", inst.k)])?,
        ket: maximally_entangled_ket(inst.k),
    };
    let initial = ent_in.tensor(&psi)?;
    check_budget("initial state", initial.space.dim())?;
    let mut state = initial.density();

    let mut alice = set(&["A", "C", "TA"]);
    let mut bob = set(&["B", "TB"]);
    let mut forward = 0.0;
    let mut backward = 0.0;
    let last = inst.rounds.len() - 1;
    for (i, round) in inst.rounds.iter().enumerate() {
        step(&mut state, &round.encoder, &mut alice, &mut bob, &round.forward, "encoder", i)?;
        for l in &round.forward {
            forward += cost(state.space().dim_of(l)?, n);
        }
        if i == last && !round.backward.is_empty() {
            return Err(Error::Wiring("the last round has no backward message".into()));
        }
        step(&mut state, &round.decoder, &mut bob, &mut alice, &round.backward, "decoder", i)?;
        for l in &round.backward {
            backward += cost(state.space().dim_of(l)?, n);
        }
    }
    if alice != set(&["C'", "TA'"]) || bob != set(&["A'", "B'", "TB'"]) {
        return Err(Error::Wiring(format!(
            "final registers: Alice holds {alice:?} (expected C', TA'), Bob holds {bob:?} (expected A', B', TB')"
        )));
    }
    for (out, inp) in [("A'", "A"), ("B'", "B"), ("C'", "C")] {
        if state.space().dim_of(out)? != rho.space().dim_of(inp)? {
            return Err(Error::Wiring(format!("`{out}` does not match the dimension of `{inp}`")));
        }
    }
    for t in ["TA'", "TB'"] {
        if state.space().dim_of(t)? != inst.m {
            return Err(Error::Wiring(format!("`{t}` should have dimension m = {}", inst.m)));
        }
    }
    let target = PureState {
        space: SystemSpace::new([("TA'", inst.m), ("TB'", inst.m)])?,
        ket: maximally_entangled_ket(inst.m),
    }
    .tensor(&PureState {
        space: psi.space.relabel(&[("A", "A'"), ("B", "B'"), ("C", "C'")])?,
        ket: psi.ket.clone(),
    })?;
    let final_state = state.reorder(&["TA'", "TB'", "A'", "B'", "C'", "R"])?;
    let merit = fidelity_with_pure(&final_state, &target)?;
    Ok(Run {
        final_state,
        merit,
        forward,
        backward,
        e: ((inst.k as f64).log2() - (inst.m as f64).log2()) / n as f64,
    })
}

fn step(
    state: &mut DensityOperator,
    ch: &ChannelSpec,
    own: &mut BTreeSet<String>,
    other: &mut BTreeSet<String>,
    sent: &[String],
    who: &str,
    round: usize,
) -> Result<()> {
    for l in ch.input().labels() {
        if !own.remove(l) {
            return Err(Error::Wiring(format!("round {}: {who} input `{l}` is not held by its party", round + 1)));
        }
    }
    for l in ch.output().labels() {
        own.insert(l.to_string());
    }
    for l in sent {
        if !ch.output().contains(l) {
            return Err(Error::Wiring(format!("round {}: message `{l}` is not a {who} output", round + 1)));
        }
        own.remove(l);
        other.insert(l.clone());
    }
    let out_dim = state.space().without(&ch.input().labels()).dim() * ch.output().dim();
    check_budget("intermediate state", out_dim)?;
    *state = apply_channel(ch, state)?;
    Ok(())
}

fn outcome(kind: ProtocolKind, run: Run, copies: usize, costs: Costs) -> ProtocolOutcome {
    ProtocolOutcome { kind, final_state: FinalState::Quantum(run.final_state), merit: run.merit, costs, copies }
}

/// Single-round redistribution: `E: A C T_A → C' T_A' Q`, `D: Q B T_B → T_B' A' B'`.
pub fn run_redistribution(inst: &RedistributionInstance) -> Result<ProtocolOutcome> {
    if inst.rounds.len() != 1 || !inst.rounds[0].backward.is_empty() {
        return Err(Error::Wiring("single-round redistribution takes exactly one round without feedback".into()));
    }
    let run = run_rounds(inst)?;
    let mut costs = Costs::new();
    costs.insert("q".into(), run.forward);
    costs.insert("e".into(), run.e);
    Ok(outcome(ProtocolKind::Redistribution, run, inst.copies, costs))
}

/// Redistribution with `M` rounds of forward and backward communication.
pub fn run_feedback_redistribution(inst: &RedistributionInstance) -> Result<ProtocolOutcome> {
    let run = run_rounds(inst)?;
    let mut costs = Costs::new();
    costs.insert("q_fwd".into(), run.forward);
    costs.insert("q_tot".into(), run.forward + run.backward);
    costs.insert("e".into(), run.e);
    Ok(outcome(ProtocolKind::RedistributionFeedback, run, inst.copies, costs))
}

/// Merging of `ρ_AB`: `E: A → T_A' Q`, `D: Q B → T_B' A' B'`.
#[derive(Clone, Debug)]
pub struct MergingInput {
    pub state: DensityOperator,
    pub copies: usize,
    pub m: usize,
    pub encoder: ChannelSpec,
    pub forward: Vec<String>,
    pub decoder: ChannelSpec,
}

/// Splitting of `ρ_AC` held by Alice: `E: A C T_A → C' Q`, `D: Q T_B → A'`.
#[derive(Clone, Debug)]
pub struct SplittingInput {
    pub state: DensityOperator,
    pub copies: usize,
    pub k: usize,
    pub encoder: ChannelSpec,
    pub forward: Vec<String>,
    pub decoder: ChannelSpec,
}

#[derive(Clone, Debug)]
pub enum SpecializeInput {
    Merging(MergingInput),
    Splitting(SplittingInput),
}

fn trivial(label: &str) -> Result<DensityOperator> {
    Ok(DensityOperator::maximally_mixed(SystemSpace::single(label, 1)?))
}

fn forbid(ch: &ChannelSpec, allowed: &[&str], who: &str) -> Result<()> {
    for l in ch.input().labels() {
        if !allowed.contains(&l) {
            return Err(Error::Wiring(format!("{who} may not act on `{l}`")));
        }
    }
    Ok(())
}

/// Embeds merging or splitting into a redistribution instance with the
/// absent registers of dimension 1.
pub fn specialize(input: &SpecializeInput) -> Result<RedistributionInstance> {
    match input {
        SpecializeInput::Merging(mi) => {
            let s = mi.state.reorder(&["A", "B"])?;
            forbid(&mi.encoder, &["A"], "the merging encoder")?;
            let state = s.tensor(&trivial("C")?)?;
            let one = |l: &str| SystemSpace::single(l, 1);
            let encoder = mi
                .encoder
                .tensor(&ChannelSpec::relabel(&one("C")?, &[("C", "C'")])?)?
                .tensor(&ChannelSpec::discard(&one("TA")?))?;
            let decoder = mi.decoder.tensor(&ChannelSpec::discard(&one("TB")?))?;
            Ok(RedistributionInstance {
                state,
                copies: mi.copies,
                k: 1,
                m: mi.m,
                rounds: vec![Round { encoder, forward: mi.forward.clone(), decoder, backward: vec![] }],
            })
        }
        SpecializeInput::Splitting(si) => {
            let s = si.state.reorder(&["A", "C"])?;
            forbid(&si.encoder, &["A", "C", "TA"], "the splitting encoder")?;
            forbid(&si.decoder, &si.forward.iter().map(|s| s.as_str()).chain(["TB"]).collect::<Vec<_>>(), "the splitting decoder")?;
            let state = s.tensor(&trivial("B")?)?.reorder(&["A", "B", "C"])?;
            let one = |l: &str| SystemSpace::single(l, 1);
            let encoder = si.encoder.tensor(&ChannelSpec::prepare(&trivial("TA'")?)?)?;
            let decoder = si
                .decoder
                .tensor(&ChannelSpec::relabel(&one("B")?, &[("B", "B'")])?)?
                .tensor(&ChannelSpec::prepare(&trivial("TB'")?)?)?;
            Ok(RedistributionInstance {
                state,
                copies: si.copies,
                k: si.k,
                m: 1,
                rounds: vec![Round { encoder, forward: si.forward.clone(), decoder, backward: vec![] }],
            })
        }
    }
}

pub fn run_merging(input: &MergingInput) -> Result<ProtocolOutcome> {
    let inst = specialize(&SpecializeInput::Merging(input.clone()))?;
    let mut out = run_redistribution(&inst)?;
    let q = out.costs["q"];
    out.costs.insert("q_csm".into(), q);
    out.costs.insert("e_csm".into(), cost(input.m, input.copies));
    out.kind = ProtocolKind::CoherentMerging;
    Ok(out)
}

pub fn run_splitting(input: &SplittingInput) -> Result<ProtocolOutcome> {
    let inst = specialize(&SpecializeInput::Splitting(input.clone()))?;
    let mut out = run_redistribution(&inst)?;
    let q = out.costs["q"];
    out.costs.insert("q_qss".into(), q);
    out.costs.insert("e_qss".into(), cost(input.k, input.copies));
    out.kind = ProtocolKind::StateSplitting;
    Ok(out)
}

/// The protocol that sends A through `Q` unchanged, with `k = m = 1`.
pub fn identity_redistribution(state: &DensityOperator, copies: usize) -> Result<RedistributionInstance> {
    let s = state.reorder(&["A", "B", "C"])?;
    let p = s.tensor_power(copies)?;
    let sp = p.space();
    let alice = SystemSpace::new([("A", sp.dim_of("A")?), ("C", sp.dim_of("C")?), ("TA", 1)])?;
    let bob = SystemSpace::new([("Q", sp.dim_of("A")?), ("B", sp.dim_of("B")?), ("TB", 1)])?;
    Ok(RedistributionInstance {
        state: s,
        copies,
        k: 1,
        m: 1,
        rounds: vec![Round {
            encoder: ChannelSpec::relabel(&alice, &[("A", "Q"), ("C", "C'"), ("TA", "TA'")])?,
            forward: vec!["Q".into()],
            decoder: ChannelSpec::relabel(&bob, &[("Q", "A'"), ("B", "B'"), ("TB", "TB'")])?,
            backward: vec![],
        }],
    })
}
