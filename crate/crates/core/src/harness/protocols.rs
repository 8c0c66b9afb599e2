//! Soundness sweeps: random protocol instances against their converse
//! bounds at every order of an α-grid.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{dim, run_trials, Check, SuiteReport};
use crate::bounds::{exponent_curve, AlphaGrid, BoundProblem, BoundSource};
use crate::entropy::OptConfig;
use crate::protocol::file::Instance;
use crate::protocol::{
    identity_redistribution, uncompressed_measurement, ClassicalTable, CompressionInstance, Decoder,
    ExtractionInstance, MeasurementInstance, MergingInput, ProtocolKind, RedistributionInstance, Round,
    SplittingInput, DIMENSION_BUDGET,
};
use crate::tensor::random::{default_env_dim, random_channel, random_cq_state, random_povm, random_state_with_rank, TrialRng};
use crate::tensor::{ChannelSpec, SystemSpace};
use crate::{Error, Result};

/// Slack allowed between a merit and its bound.
pub const BOUND_TOL: f64 = 1e-8;

fn space(parts: &[(&str, usize)]) -> Result<SystemSpace> {
    SystemSpace::new(parts.iter().map(|&(l, d)| (l, d)))
}

fn channel(rng: &mut TrialRng, input: &[(&str, usize)], output: &[(&str, usize)]) -> Result<ChannelSpec> {
    let (i, o) = (space(input)?, space(output)?);
    let e = default_env_dim(&i, &o);
    random_channel(rng, &i, &o, "E", e)
}

fn random_rank_state(rng: &mut TrialRng, parts: &[(&str, usize)]) -> Result<crate::tensor::DensityOperator> {
    let s = space(parts)?;
    let rank = rng.random_range(1..=s.dim());
    Ok(random_state_with_rank(rng, &s, rank))
}

fn random_table(rng: &mut TrialRng, domain: usize, codomain: usize) -> Result<ClassicalTable> {
    let mut map: Vec<usize> = (0..domain).map(|_| rng.random_range(0..codomain)).collect();
    let mut order: Vec<usize> = (0..domain).collect();
    order.shuffle(rng);
    for (z, &x) in order.iter().take(codomain).enumerate() {
        map[x] = z;
    }
    ClassicalTable::new(codomain, map)
}

fn redistribution(rng: &mut TrialRng, a: usize, b: usize, c: usize) -> Result<RedistributionInstance> {
    let state = random_rank_state(rng, &[("A", a), ("B", b), ("C", c)])?;
    if rng.random_bool(0.2) {
        return identity_redistribution(&state, 1);
    }
    let (k, m) = (rng.random_range(1..=2), rng.random_range(1..=2));
    // Q of size 1 is the no-communication protocol
    let q = [1, 2, a][rng.random_range(0..3)];
    let encoder = channel(rng, &[("A", a), ("C", c), ("TA", k)], &[("C'", c), ("TA'", m), ("Q", q)])?;
    let decoder = channel(rng, &[("Q", q), ("B", b), ("TB", k)], &[("TB'", m), ("A'", a), ("B'", b)])?;
    Ok(RedistributionInstance {
        state,
        copies: 1,
        k,
        m,
        rounds: vec![Round { encoder, forward: vec!["Q".into()], decoder, backward: vec![] }],
    })
}

/// Two rounds; Alice keeps `A1`, Bob keeps `B1` between them.
fn feedback(rng: &mut TrialRng, a: usize, b: usize, c: usize) -> Result<RedistributionInstance> {
    let state = random_rank_state(rng, &[("A", a), ("B", b), ("C", c)])?;
    let (k, m) = (rng.random_range(1..=2), rng.random_range(1..=2));
    let (q1, g1, q2) = (rng.random_range(1..=2), rng.random_range(1..=2), [1, 2, a][rng.random_range(0..3)]);
    let first = Round {
        encoder: channel(rng, &[("A", a), ("C", c), ("TA", k)], &[("A1", a * c), ("Q1", q1)])?,
        forward: vec!["Q1".into()],
        decoder: channel(rng, &[("Q1", q1), ("B", b), ("TB", k)], &[("B1", b * k), ("G1", g1)])?,
        backward: vec!["G1".into()],
    };
    let second = Round {
        encoder: channel(rng, &[("A1", a * c), ("G1", g1)], &[("C'", c), ("TA'", m), ("Q2", q2)])?,
        forward: vec!["Q2".into()],
        decoder: channel(rng, &[("B1", b * k), ("Q2", q2)], &[("TB'", m), ("A'", a), ("B'", b)])?,
        backward: vec![],
    };
    Ok(RedistributionInstance { state, copies: 1, k, m, rounds: vec![first, second] })
}

fn merging(rng: &mut TrialRng, a: usize, b: usize) -> Result<MergingInput> {
    let state = random_rank_state(rng, &[("A", a), ("B", b)])?;
    let (m, q) = if rng.random_bool(0.2) { (1, a) } else { (rng.random_range(1..=2), [1, 2, a][rng.random_range(0..3)]) };
    let (encoder, decoder) = if q == a && m == 1 {
        let one = SystemSpace::single("TA'", 1)?;
        let enc = ChannelSpec::relabel(&space(&[("A", a)])?, &[("A", "Q")])?.tensor(&ChannelSpec::prepare(
            &crate::tensor::DensityOperator::maximally_mixed(one),
        )?)?;
        let dec = ChannelSpec::relabel(&space(&[("Q", a), ("B", b)])?, &[("Q", "A'"), ("B", "B'")])?.tensor(
            &ChannelSpec::prepare(&crate::tensor::DensityOperator::maximally_mixed(SystemSpace::single("TB'", 1)?))?,
        )?;
        (enc, dec)
    } else {
        (
            channel(rng, &[("A", a)], &[("TA'", m), ("Q", q)])?,
            channel(rng, &[("Q", q), ("B", b)], &[("TB'", m), ("A'", a), ("B'", b)])?,
        )
    };
    Ok(MergingInput { state, copies: 1, m, encoder, forward: vec!["Q".into()], decoder })
}

fn splitting(rng: &mut TrialRng, a: usize, c: usize) -> Result<SplittingInput> {
    let state = random_rank_state(rng, &[("A", a), ("C", c)])?;
    let k = rng.random_range(1..=2);
    let (encoder, decoder) = if rng.random_bool(0.2) {
        let enc = ChannelSpec::relabel(&space(&[("A", a), ("C", c)])?, &[("A", "Q"), ("C", "C'")])?
            .tensor(&ChannelSpec::discard(&space(&[("TA", k)])?))?;
        let dec = ChannelSpec::relabel(&space(&[("Q", a)])?, &[("Q", "A'")])?
            .tensor(&ChannelSpec::discard(&space(&[("TB", k)])?))?;
        (enc, dec)
    } else {
        let q = [1, 2, a][rng.random_range(0..3)];
        (
            channel(rng, &[("A", a), ("C", c), ("TA", k)], &[("C'", c), ("Q", q)])?,
            channel(rng, &[("Q", q), ("TB", k)], &[("A'", a)])?,
        )
    };
    Ok(SplittingInput { state, copies: 1, k, encoder, forward: vec!["Q".into()], decoder })
}

fn measurement(rng: &mut TrialRng, a: usize, b: usize) -> Result<MeasurementInstance> {
    let state = random_rank_state(rng, &[("A", a), ("B", b)])?;
    let povm = random_povm(rng, a, 2)?;
    if rng.random_bool(0.3) {
        return uncompressed_measurement(&state, &povm, 1);
    }
    let (l, shared) = (rng.random_range(1..=2), rng.random_range(1..=2));
    let encoder = channel(rng, &[("A", a), ("MA", shared)], &[("Xbar", 2), ("L", l)])?;
    let decoder = channel(rng, &[("L", l), ("B", b), ("MB", shared)], &[("Xhat", 2), ("B'", b)])?;
    Ok(MeasurementInstance { state, povm, copies: 1, shared, encoder, decoder })
}

/// A random instance of `kind` and the single-copy source its bounds are
/// evaluated on. `dims` gives `|A|, |B|, |C|` for the quantum protocols and
/// `|X|, |B|` for the classical ones.
pub fn random_instance(kind: ProtocolKind, rng: &mut TrialRng, dims: &[usize]) -> Result<(Instance, BoundSource)> {
    let (a, b, c) = (dim(dims, 0), dim(dims, 1), dim(dims, 2));
    let inst = match kind {
        ProtocolKind::Redistribution => Instance::Redistribution(redistribution(rng, a, b, c)?),
        ProtocolKind::RedistributionFeedback => Instance::Feedback(feedback(rng, a, b, c)?),
        ProtocolKind::CoherentMerging => Instance::Merging(merging(rng, a, b)?),
        ProtocolKind::StateSplitting => Instance::Splitting(splitting(rng, a, c)?),
        ProtocolKind::MeasurementCompression => Instance::Measurement(measurement(rng, a, b)?),
        ProtocolKind::RandomnessExtraction | ProtocolKind::DataCompression => {
            let state = random_cq_state(rng, "X", a, &SystemSpace::single("B", b)?)?;
            let n = rng.random_range(1..=3);
            let domain = a.pow(n as u32);
            if kind == ProtocolKind::RandomnessExtraction {
                let z = rng.random_range(1..=domain.min(4));
                let table = random_table(rng, domain, z)?;
                Instance::Extraction(ExtractionInstance { state, copies: n, table })
            } else {
                let size = rng.random_range(1..=domain);
                let table = random_table(rng, domain, size)?;
                let decoder = if rng.random_bool(0.5) {
                    Decoder::PrettyGood
                } else {
                    let d = b.pow(n as u32);
                    Decoder::Povm((0..size).map(|_| random_povm(rng, d, domain)).collect::<Result<_>>()?)
                };
                Instance::Compression(CompressionInstance { state, copies: n, table, decoder })
            }
        }
    };
    let src = BoundSource::of_instance(&inst);
    Ok((inst, src))
}

/// Runs `trials` random instances of `kind` and checks `merit ≤ 2^bound`
/// for every implemented bound at every order of `grid`, with slack
/// [`BOUND_TOL`].
pub fn check_protocol_bounds(
    kind: ProtocolKind,
    trials: usize,
    dims: &[usize],
    seed: u64,
    grid: &AlphaGrid,
) -> Result<SuiteReport> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::usage("protocol dimensions must be positive"));
    }
    let total: usize = (0..3).map(|i| dim(dims, i)).product();
    if total > 8 * 2 || total * total > DIMENSION_BUDGET {
        return Err(Error::Budget(format!("protocol sweep dimensions {dims:?} are too large")));
    }
    let suite = format!("protocol/{}", kind.name());
    Ok(run_trials(
        &suite,
        |rng, cfg: &OptConfig| {
            let (inst, src) = random_instance(kind, rng, dims)?;
            let out = inst.run(cfg)?;
            let curve = exponent_curve(&BoundProblem::for_outcome(src, &out), grid, cfg)?;
            Ok(curve
                .entries
                .iter()
                .map(|e| Check::le(format!("{} α={}", e.bound_id, e.alpha), out.merit, e.merit_bound(), false))
                .collect())
        },
        trials,
        dims,
        seed,
        BOUND_TOL,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::random::trial_rng;

    #[test]
    fn every_kind_builds_and_runs() {
        let cfg = OptConfig::sweep();
        for kind in ProtocolKind::ALL {
            for t in 0..4 {
                let mut rng = trial_rng(11, t);
                let (inst, _) = random_instance(kind, &mut rng, &[2, 2, 2]).unwrap();
                let out = inst.run(&cfg).unwrap_or_else(|e| panic!("{kind:?} trial {t}: {e}"));
                assert!(out.merit > -1e-12 && out.merit < 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn short_sweep_is_sound() {
        let grid = AlphaGrid::uniform(0.55, 0.95, 3).unwrap();
        for kind in ProtocolKind::ALL {
            let r = check_protocol_bounds(kind, 3, &[2, 2, 2], 3, &grid).unwrap();
            assert!(r.passed(), "{kind:?}: {:?}", r.failures);
        }
    }
}
