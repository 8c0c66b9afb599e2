use super::measurement::check_povm;
use super::{check_budget, check_copies, cost, Costs, FinalState, ProtocolKind, ProtocolOutcome};
use crate::protocol::ClassicalTable;
use crate::tensor::linalg::{self, psd_eigh, CMat};
use crate::tensor::{digits, CqState};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub enum Decoder {
    /// `povms[c][x̂]` is the element for guess `x̂` given the message `c`.
    Povm(Vec<Vec<CMat>>),
    /// Square-root measurement over `{p_x ρ^x : e(x) = c}` for each `c`.
    PrettyGood,
}

/// Compression of `ρ_XB^{⊗n}` to the message `e(x^n)`, decoded with B's help.
#[derive(Clone, Debug)]
pub struct CompressionInstance {
    pub state: CqState,
    pub copies: usize,
    pub table: ClassicalTable,
    pub decoder: Decoder,
}

/// Per message `c`, the nonzero elements `(x̂, Λ_{x̂,c})`.
type SparseDecoder = Vec<Vec<(usize, CMat)>>;

fn pretty_good(weighted: &[CMat], table: &ClassicalTable) -> Result<SparseDecoder> {
    let d = weighted[0].nrows();
    table
        .classes()
        .into_iter()
        .map(|class| {
            if class.is_empty() {
                return Ok(vec![(0, linalg::identity(d))]);
            }
            let s = class.iter().fold(CMat::zeros(d, d), |a, &x| a + &weighted[x]);
            let e = psd_eigh(&s)?;
            let inv = e.power(-0.5);
            let complement = linalg::identity(d) - e.support_projector();
            Ok(class
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let mut el = &inv * &weighted[x] * &inv;
                    if i == 0 {
                        el += &complement;
                    }
                    (x, el)
                })
                .collect())
        })
        .collect()
}

fn explicit(povms: &[Vec<CMat>], table: &ClassicalTable, d: usize) -> Result<SparseDecoder> {
    if povms.len() != table.codomain() {
        return Err(Error::InvalidPovm(format!(
            "{} decoder POVMs for {} messages",
            povms.len(),
            table.codomain()
        )));
    }
    povms
        .iter()
        .enumerate()
        .map(|(c, p)| {
            if p.len() != table.domain() {
                return Err(Error::InvalidPovm(format!(
                    "decoder POVM for message {c} has {} outcomes, expected {}",
                    p.len(),
                    table.domain()
                )));
            }
            check_povm(p, d).map_err(|e| Error::InvalidPovm(format!("message {c}: {e}")))?;
            Ok(p.iter().cloned().enumerate().collect())
        })
        .collect()
}

pub fn run_data_compression(inst: &CompressionInstance) -> Result<ProtocolOutcome> {
    check_copies(inst.copies)?;
    let n = inst.copies;
    let nx = inst.state.x_dim();
    let domain = nx.checked_pow(n as u32).ok_or_else(|| Error::Budget("too many strings".into()))?;
    if inst.table.domain() != domain {
        return Err(Error::Table(format!("table domain {} but |X|^n = {domain}", inst.table.domain())));
    }
    let db = inst.state.b_space().dim().pow(n as u32);
    check_budget("side information", db)?;
    if domain > 1024 {
        return Err(Error::Budget(format!("{domain} source strings exceed the limit of 1024")));
    }
    let weighted: Vec<CMat> = (0..domain).map(|x| inst.state.weighted_string(&digits(x, nx, n))).collect();
    let decoder = match &inst.decoder {
        Decoder::PrettyGood => pretty_good(&weighted, &inst.table)?,
        Decoder::Povm(p) => explicit(p, &inst.table, db)?,
    };
    let mut joint = vec![0.0; domain * domain];
    for (x, w) in weighted.iter().enumerate() {
        for (xh, el) in &decoder[inst.table.apply(x)] {
            joint[x * domain + xh] = linalg::trace(&(el * w)).re.max(0.0);
        }
    }
    let merit: f64 = (0..domain).map(|x| joint[x * domain + x]).sum();
    let mut costs = Costs::new();
    costs.insert("m".into(), cost(inst.table.codomain(), n));
    Ok(ProtocolOutcome {
        kind: ProtocolKind::DataCompression,
        final_state: FinalState::Joint { x_dim: domain, probabilities: joint },
        merit: merit.clamp(0.0, 1.0),
        costs,
        copies: n,
    })
}

/// Projectors onto the nonnegative and negative parts of `p₀ρ⁰ − p₁ρ¹`.
pub fn helstrom_povm(state: &CqState) -> Result<Vec<CMat>> {
    if state.x_dim() != 2 {
        return Err(Error::usage("the Helstrom measurement discriminates two states"));
    }
    let p = state.probs();
    let c = state.conditionals();
    let diff = c[0].matrix().scale(p[0]) - c[1].matrix().scale(p[1]);
    let e = linalg::Eigh::new(&diff);
    let pos = e.map(|v| if v >= 0.0 { 1.0 } else { 0.0 });
    let neg = e.map(|v| if v >= 0.0 { 0.0 } else { 1.0 });
    Ok(vec![pos, neg])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::random::{random_cq_state, random_state, trial_rng};
    use crate::tensor::SystemSpace;

    #[test]
    fn identity_compression_is_perfect() {
        let b = SystemSpace::single("B", 2).unwrap();
        let cq = random_cq_state(&mut trial_rng(3, 0), "X", 3, &b).unwrap();
        let id = linalg::identity(2);
        let zero = CMat::zeros(2, 2);
        let povms = (0..3)
            .map(|c| (0..3).map(|x| if x == c { id.clone() } else { zero.clone() }).collect())
            .collect();
        let inst = CompressionInstance { state: cq, copies: 1, table: ClassicalTable::identity(3), decoder: Decoder::Povm(povms) };
        let out = run_data_compression(&inst).unwrap();
        assert!((out.merit - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_states_give_maximum_likelihood() {
        let b = SystemSpace::single("B", 2).unwrap();
        let r = random_state(&mut trial_rng(4, 0), &b);
        let cq = CqState::new("X", vec![0.2, 0.5, 0.3], vec![r.clone(), r.clone(), r]).unwrap();
        let id = linalg::identity(2);
        let zero = CMat::zeros(2, 2);
        let ml = vec![vec![zero.clone(), id, zero]];
        let inst = CompressionInstance { state: cq, copies: 1, table: ClassicalTable::constant(3), decoder: Decoder::Povm(ml) };
        let out = run_data_compression(&inst).unwrap();
        assert!((out.merit - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pretty_good_decoder_is_complete() {
        let b = SystemSpace::single("B", 2).unwrap();
        let cq = random_cq_state(&mut trial_rng(5, 0), "X", 3, &b).unwrap();
        let weighted: Vec<CMat> = (0..3).map(|x| cq.weighted_string(&[x])).collect();
        let dec = pretty_good(&weighted, &ClassicalTable::new(2, vec![0, 1, 0]).unwrap()).unwrap();
        for class in dec {
            let s = class.iter().fold(CMat::zeros(2, 2), |a, (_, e)| a + e);
            assert!((s - linalg::identity(2)).norm() < 1e-10);
        }
    }
}
