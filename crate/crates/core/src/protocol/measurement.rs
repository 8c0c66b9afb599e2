use std::collections::BTreeSet;

use super::{check_budget, check_copies, cost, Costs, FinalState, ProtocolKind, ProtocolOutcome};
use crate::tensor::linalg::{self, c, psd_sqrt, CMat};
use crate::tensor::{apply_channel, fidelity, purify_ket, ChannelSpec, DensityOperator, SystemSpace};
use crate::{Error, Result};

/// Measurement compression of a POVM `Λ` on A with side information B.
///
/// Shared randomness is `χ = Σ_m |mm⟩⟨mm|/|M|` on `M_A M_B`. The encoder maps
/// `A M_A → X̄ L` (labels `Xbar`, `L`) and the decoder maps
/// `L B M_B → X̂ B'` (labels `Xhat`, `B'`).
#[derive(Clone, Debug)]
pub struct MeasurementInstance {
    pub state: DensityOperator,
    pub povm: Vec<CMat>,
    pub copies: usize,
    pub shared: usize,
    pub encoder: ChannelSpec,
    pub decoder: ChannelSpec,
}

pub(crate) fn check_povm(povm: &[CMat], d: usize) -> Result<()> {
    if povm.is_empty() {
        return Err(Error::InvalidPovm("no outcomes".into()));
    }
    let mut sum = CMat::zeros(d, d);
    for (x, e) in povm.iter().enumerate() {
        if e.shape() != (d, d) {
            return Err(Error::InvalidPovm(format!("element {x} has shape {:?}, expected {d}×{d}", e.shape())));
        }
        linalg::psd_eigh(e).map_err(|_| Error::InvalidPovm(format!("element {x} is not positive")))?;
        sum += e;
    }
    let defect = (sum - linalg::identity(d)).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if defect > 1e-8 {
        return Err(Error::InvalidPovm(format!("elements sum to I only within {defect:e}")));
    }
    Ok(())
}

/// `Λ^{⊗n}` with outcome strings indexed most significant first.
pub(crate) fn povm_power(povm: &[CMat], n: usize) -> Vec<CMat> {
    let mut out = povm.to_vec();
    for _ in 1..n {
        out = out.iter().flat_map(|a| povm.iter().map(move |b| linalg::kron(a, b))).collect();
    }
    out
}

/// Stinespring form of `ρ ↦ Σ_x tr(Λ_x ρ) |x⟩⟨x|^{⊗k}`, writing the outcome
/// into each of the `outputs` registers.
pub fn measurement_channel(input: &SystemSpace, povm: &[CMat], outputs: &[&str]) -> Result<ChannelSpec> {
    let d = input.dim();
    check_povm(povm, d)?;
    let nx = povm.len();
    let roots: Vec<CMat> = povm.iter().map(psd_sqrt).collect::<Result<_>>()?;
    let output = SystemSpace::new(outputs.iter().map(|&l| (l, nx)))?;
    let env = SystemSpace::new([("Ex", nx), ("Ea", d)])?;
    let rows = output.dim() * nx * d;
    let mut v = CMat::zeros(rows, d);
    for (x, r) in roots.iter().enumerate() {
        let mut idx = 0usize;
        for _ in 0..=outputs.len() {
            idx = idx * nx + x;
        }
        for i in 0..d {
            for j in 0..d {
                v[(idx * d + i, j)] = r[(i, j)];
            }
        }
    }
    ChannelSpec::new(input.clone(), output, env, v)
}

/// Copies the computational basis of `label` into the environment.
pub fn dephasing_channel(label: &str, dim: usize) -> Result<ChannelSpec> {
    let s = SystemSpace::single(label, dim)?;
    let mut v = CMat::zeros(dim * dim, dim);
    for x in 0..dim {
        v[(x * dim + x, x)] = c(1.0, 0.0);
    }
    ChannelSpec::new(s.clone(), s, SystemSpace::single("Ed", dim)?, v)
}

/// `φ_{R X X' B}`: the measurement channel applied to the canonical
/// purification of `ρ_AB^{⊗n}`.
pub fn ideal_measurement_state(state: &DensityOperator, povm: &[CMat], copies: usize) -> Result<DensityOperator> {
    check_copies(copies)?;
    let rho = state.reorder(&["A", "B"])?.tensor_power(copies)?;
    let psi = purify_ket(&rho, "R")?.density();
    let a = rho.space().select(&["A"])?;
    let ch = measurement_channel(&a, &povm_power(povm, copies), &["X", "X'"])?;
    check_budget("ideal state", psi.dim() / a.dim() * ch.output().dim())?;
    apply_channel(&ch, &psi)?.reorder(&["R", "X", "X'", "B"])
}

fn labels(s: &SystemSpace) -> BTreeSet<&str> {
    s.labels().into_iter().collect()
}

pub fn run_measurement_compression(inst: &MeasurementInstance) -> Result<ProtocolOutcome> {
    check_copies(inst.copies)?;
    if inst.shared == 0 {
        return Err(Error::usage("shared randomness size must be at least 1"));
    }
    let n = inst.copies;
    let da = inst.state.space().dim_of("A")?;
    check_povm(&inst.povm, da)?;
    let phi = ideal_measurement_state(&inst.state, &inst.povm, n)?;
    let nx = phi.space().dim_of("X")?;

    let want = |ch: &ChannelSpec, inp: &[&str], out: &[&str], who: &str| -> Result<()> {
        if labels(ch.input()) != inp.iter().copied().collect() || labels(ch.output()) != out.iter().copied().collect() {
            return Err(Error::Wiring(format!(
                "{who} maps {} → {}, expected {} → {}",
                ch.input(),
                ch.output(),
                inp.join(" "),
                out.join(" ")
            )));
        }
        Ok(())
    };
    want(&inst.encoder, &["A", "MA"], &["Xbar", "L"], "encoder")?;
    want(&inst.decoder, &["L", "B", "MB"], &["Xhat", "B'"], "decoder")?;
    if inst.encoder.output().dim_of("Xbar")? != nx || inst.decoder.output().dim_of("Xhat")? != nx {
        return Err(Error::Wiring(format!("outcome registers must have dimension {nx}")));
    }
    let db = phi.space().dim_of("B")?;
    if inst.decoder.output().dim_of("B'")? != db {
        return Err(Error::Wiring(format!("`B'` must have dimension {db}")));
    }

    let rho = inst.state.reorder(&["A", "B"])?.tensor_power(n)?;
    let psi = purify_ket(&rho, "R")?.density();
    let k = inst.shared;
    let mut chi = CMat::zeros(k * k, k * k);
    for m in 0..k {
        chi[(m * k + m, m * k + m)] = c(1.0 / k as f64, 0.0);
    }
    let chi = DensityOperator::new(SystemSpace::new([("MA", k), ("MB", k)])?, chi)?;
    let initial = chi.tensor(&psi)?;
    check_budget("initial state", initial.dim())?;
    let after_e = apply_channel(&inst.encoder, &initial)?;
    check_budget("intermediate state", after_e.dim())?;
    let sigma = apply_channel(&inst.decoder, &after_e)?
        .reorder(&["R", "Xbar", "Xhat", "B'"])?
        .relabel(&[("Xbar", "X"), ("Xhat", "X'"), ("B'", "B")])?;
    let merit = fidelity(&phi, &sigma)?;
    let mut costs = Costs::new();
    costs.insert("c".into(), cost(inst.encoder.output().dim_of("L")?, n));
    costs.insert("r".into(), cost(k, n));
    Ok(ProtocolOutcome {
        kind: ProtocolKind::MeasurementCompression,
        final_state: FinalState::Quantum(sigma),
        merit,
        costs,
        copies: n,
    })
}

/// Alice measures and sends the outcome; Bob copies it. No shared
/// randomness is used.
pub fn uncompressed_measurement(state: &DensityOperator, povm: &[CMat], copies: usize) -> Result<MeasurementInstance> {
    let rho = state.reorder(&["A", "B"])?.tensor_power(copies)?;
    let a = rho.space().select(&["A"])?;
    let pw = povm_power(povm, copies);
    let nx = pw.len();
    let one = |l: &str| SystemSpace::single(l, 1);
    let encoder = measurement_channel(&a, &pw, &["Xbar", "L"])?.tensor(&ChannelSpec::discard(&one("MA")?))?;
    let bob = SystemSpace::new([("L", nx), ("B", rho.space().dim_of("B")?)])?;
    let decoder = ChannelSpec::relabel(&bob, &[("L", "Xhat"), ("B", "B'")])?.tensor(&ChannelSpec::discard(&one("MB")?))?;
    Ok(MeasurementInstance { state: state.clone(), povm: povm.to_vec(), copies, shared: 1, encoder, decoder })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::random::{random_povm, random_state, trial_rng};

    #[test]
    fn uncompressed_protocol_is_perfect() {
        let mut rng = trial_rng(7, 0);
        let s = SystemSpace::new([("A", 2), ("B", 2)]).unwrap();
        let rho = random_state(&mut rng, &s);
        let povm = random_povm(&mut rng, 2, 2).unwrap();
        let out = run_measurement_compression(&uncompressed_measurement(&rho, &povm, 1).unwrap()).unwrap();
        assert!((out.merit - 1.0).abs() < 1e-7, "{}", out.merit);
        assert_eq!(out.costs["c"], 1.0);
        assert_eq!(out.costs["r"], 0.0);
    }

    #[test]
    fn incomplete_povm_rejected() {
        let s = SystemSpace::single("A", 2).unwrap();
        let bad = vec![linalg::diag(&[1.0, 0.0]), linalg::diag(&[0.0, 0.5])];
        assert!(matches!(measurement_channel(&s, &bad, &["X"]), Err(Error::InvalidPovm(_))));
    }
}
