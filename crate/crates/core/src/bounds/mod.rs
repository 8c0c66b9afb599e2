//! Strong-converse bounds on the figures of merit.
//!
//! Every bound has the shape `log₂ merit ≤ −n·κ(α)·(expression − rate)`
//! (cost rates) or `−n·κ(α)·(rate − expression)` (extracted rates), with the
//! expression a Rényi quantity of the single-copy source state evaluated at
//! `α ∈ (1/2, 1)` and its dual order `β = α/(2α−1)`.

mod grid;
mod limits;

use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::{
    beta, conditional_entropy, kappa, kappa_extraction, mutual_information, renyi_entropy, OptConfig,
};
use crate::protocol::file::Instance;
use crate::protocol::{ideal_measurement_state, Costs, ProtocolKind, ProtocolOutcome};
use crate::tensor::{purify, CMat, CqState, DensityOperator};
use crate::{Error, Result};

pub use grid::AlphaGrid;
pub use limits::{vn_limit_check, LimitEntry, LimitReport};

/// The single-copy state a bound is evaluated on.
#[derive(Clone, Debug)]
pub enum BoundSource {
    /// `ρ_ABC` (redistribution), `ρ_AB` (merging) or `ρ_AC` (splitting).
    Quantum(DensityOperator),
    /// `ρ_AB` and the POVM on A.
    Measurement { state: DensityOperator, povm: Vec<CMat> },
    Cq(CqState),
}

impl BoundSource {
    /// The source of a protocol instance.
    pub fn of_instance(inst: &Instance) -> Self {
        match inst {
            Instance::Redistribution(i) | Instance::Feedback(i) => BoundSource::Quantum(i.state.clone()),
            Instance::Merging(i) => BoundSource::Quantum(i.state.clone()),
            Instance::Splitting(i) => BoundSource::Quantum(i.state.clone()),
            Instance::Measurement(i) => BoundSource::Measurement { state: i.state.clone(), povm: i.povm.clone() },
            Instance::Extraction(i) => BoundSource::Cq(i.state.clone()),
            Instance::Compression(i) => BoundSource::Cq(i.state.clone()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoundProblem {
    pub kind: ProtocolKind,
    pub source: BoundSource,
    /// Per-copy rates keyed as in [`Costs`].
    pub rates: Costs,
    pub copies: usize,
}

impl BoundProblem {
    /// Uses the costs of a simulated run as the rates.
    pub fn for_outcome(source: BoundSource, outcome: &ProtocolOutcome) -> Self {
        Self { kind: outcome.kind, source, rates: outcome.costs.clone(), copies: outcome.copies }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sense {
    Cost,
    Gain,
}

/// One implemented inequality: its id, the rate combination it compares
/// against, and the sense of the comparison.
struct Plan {
    id: &'static str,
    rate: fn(&Costs) -> Result<f64>,
    sense: Sense,
}

fn get(r: &Costs, key: &str) -> Result<f64> {
    r.get(key).copied().ok_or_else(|| Error::Usage(format!("missing rate `{key}`")))
}

fn plans(kind: ProtocolKind) -> Vec<Plan> {
    use Sense::*;
    let p = |id, rate, sense| Plan { id, rate, sense };
    match kind {
        ProtocolKind::Redistribution => vec![
            p("redistribution/q+e", |r| Ok(get(r, "q")? + get(r, "e")?), Cost),
            p("redistribution/q", |r| Ok(2.0 * get(r, "q")?), Cost),
            p("redistribution/q-alt", |r| Ok(2.0 * get(r, "q")?), Cost),
        ],
        ProtocolKind::RedistributionFeedback => vec![
            p("feedback/q-tot+e", |r| Ok(get(r, "q_tot")? + get(r, "e")?), Cost),
            p("feedback/q-fwd", |r| Ok(2.0 * get(r, "q_fwd")?), Cost),
            p("feedback/q-fwd-alt", |r| Ok(2.0 * get(r, "q_fwd")?), Cost),
        ],
        ProtocolKind::CoherentMerging => vec![
            p("merging/q-e", |r| Ok(get(r, "q_csm")? - get(r, "e_csm")?), Cost),
            p("merging/q", |r| Ok(2.0 * get(r, "q_csm")?), Cost),
        ],
        ProtocolKind::StateSplitting => vec![
            p("splitting/q+e", |r| Ok(get(r, "q_qss")? + get(r, "e_qss")?), Cost),
            p("splitting/q", |r| Ok(2.0 * get(r, "q_qss")?), Cost),
            p("splitting/q-alt", |r| Ok(2.0 * get(r, "q_qss")?), Cost),
        ],
        ProtocolKind::MeasurementCompression => vec![p("measurement/c", |r| get(r, "c"), Cost)],
        ProtocolKind::RandomnessExtraction => vec![
            p("extraction/linear", |r| get(r, "l"), Gain),
            p("extraction/conditional", |r| get(r, "l"), Gain),
        ],
        ProtocolKind::DataCompression => vec![
            p("compression/linear", |r| get(r, "m"), Cost),
            p("compression/conditional", |r| get(r, "m"), Cost),
        ],
    }
}

/// Ids of the bounds implemented for `kind`, in report order.
pub fn bound_ids(kind: ProtocolKind) -> Vec<&'static str> {
    plans(kind).into_iter().map(|p| p.id).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundEntry {
    pub bound_id: String,
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    pub expression_bits: f64,
    pub rate_bits: f64,
    /// Per-copy exponent: `κ(expression − rate)` or `κ(rate − expression)`.
    pub exponent: f64,
    /// `−n · exponent`.
    pub log2_merit_bound: f64,
}

impl BoundEntry {
    /// The bound on the merit itself.
    pub fn merit_bound(&self) -> f64 {
        self.log2_merit_bound.exp2()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub kind: ProtocolKind,
    pub copies: usize,
    pub entries: Vec<BoundEntry>,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(Error::Usage(format!("converse bounds need α in (1/2, 1), got {alpha}")));
    }
    Ok(())
}

/// Labels of the conditioning system of a c-q state, empty when it is trivial.
fn side_labels(cq: &CqState) -> Vec<String> {
    if cq.b_space().dim() == 1 {
        vec![]
    } else {
        cq.b_labels().into_iter().map(String::from).collect()
    }
}

/// The entropic expressions of `kind` at order `a` (with `b` its dual
/// order), in plan order. `a = b = 1` gives the von Neumann values.
pub(crate) fn expressions(kind: ProtocolKind, source: &BoundSource, a: f64, b: f64, cfg: &OptConfig) -> Result<Vec<f64>> {
    let ce = |rho: &DensityOperator, x: &[&str], y: &[&str], o: f64| conditional_entropy(rho, x, y, o, cfg).map(|v| v.value);
    let mi = |rho: &DensityOperator, x: &[&str], y: &[&str], o: f64| mutual_information(rho, x, y, o, cfg).map(|v| v.value);
    let s = |rho: &DensityOperator, x: &[&str], o: f64| -> Result<f64> {
        if x.is_empty() {
            return Ok(0.0);
        }
        renyi_entropy(&rho.partial_trace(x)?, o)
    };
    let wrong = || Error::Usage(format!("the bound source does not match the protocol kind `{kind}`"));
    match (kind, source) {
        (ProtocolKind::Redistribution | ProtocolKind::RedistributionFeedback, BoundSource::Quantum(rho)) => {
            redistribution_expressions(&purify(&rho.reorder(&["A", "B", "C"])?, "R")?, a, b, cfg)
        }
        (ProtocolKind::CoherentMerging, BoundSource::Quantum(rho)) => {
            let psi = purify(&rho.reorder(&["A", "B"])?, "R")?;
            let sr = s(&psi, &["R"], b)?;
            Ok(vec![sr - s(&psi, &["A", "R"], a)?, sr - ce(&psi, &["R"], &["A"], a)?])
        }
        (ProtocolKind::StateSplitting, BoundSource::Quantum(rho)) => {
            let psi = purify(&rho.reorder(&["A", "C"])?, "R")?;
            Ok(vec![
                s(&psi, &["A"], b)?,
                s(&psi, &["R"], b)? - ce(&psi, &["R"], &["A"], a)?,
                mi(&psi, &["R"], &["A"], a)?,
            ])
        }
        (ProtocolKind::MeasurementCompression, BoundSource::Measurement { state, povm }) => {
            let phi = ideal_measurement_state(state, povm, 1)?;
            Ok(vec![ce(&phi, &["R"], &["B"], b)? - ce(&phi, &["R"], &["X", "B"], a)?])
        }
        (ProtocolKind::RandomnessExtraction, BoundSource::Cq(cq)) => {
            let rho = cq.to_density();
            let side = side_labels(cq);
            let side: Vec<&str> = side.iter().map(String::as_str).collect();
            let x = [cq.x_label()];
            let xb: Vec<&str> = x.iter().copied().chain(side.iter().copied()).collect();
            Ok(vec![s(&rho, &xb, a)? - s(&rho, &side, b)?, ce(&rho, &x, &side, a)?])
        }
        (ProtocolKind::DataCompression, BoundSource::Cq(cq)) => {
            let rho = cq.to_density();
            let side = side_labels(cq);
            let side: Vec<&str> = side.iter().map(String::as_str).collect();
            let x = [cq.x_label()];
            let xb: Vec<&str> = x.iter().copied().chain(side.iter().copied()).collect();
            Ok(vec![s(&rho, &xb, b)? - s(&rho, &side, a)?, ce(&rho, &x, &side, b)?])
        }
        _ => Err(wrong()),
    }
}

/// Redistribution expressions on a purification `psi` of `ρ_ABC` with
/// purifying system `R`.
fn redistribution_expressions(psi: &DensityOperator, a: f64, b: f64, cfg: &OptConfig) -> Result<Vec<f64>> {
    let ce = |x: &[&str], y: &[&str], o: f64| conditional_entropy(psi, x, y, o, cfg).map(|v| v.value);
    let mi = |x: &[&str], y: &[&str], o: f64| mutual_information(psi, x, y, o, cfg).map(|v| v.value);
    Ok(vec![
        renyi_entropy(&psi.partial_trace(&["A", "B"])?, b)? - renyi_entropy(&psi.partial_trace(&["B"])?, a)?,
        ce(&["R"], &["B"], b)? - ce(&["R"], &["A", "B"], a)?,
        mi(&["R"], &["A", "B"], a)? - mi(&["R"], &["B"], b)?,
    ])
}

/// Evaluates every implemented bound of `problem.kind` at order `alpha`.
pub fn converse_bound(problem: &BoundProblem, alpha: f64, cfg: &OptConfig) -> Result<BoundReport> {
    check_alpha(alpha)?;
    if problem.copies == 0 {
        return Err(Error::usage("number of copies must be at least 1"));
    }
    let b = beta(alpha)?;
    let values = expressions(problem.kind, &problem.source, alpha, b, cfg)?;
    let n = problem.copies as f64;
    let entries = plans(problem.kind)
        .into_iter()
        .zip(values)
        .map(|(plan, expr)| {
            let rate = (plan.rate)(&problem.rates)?;
            let (k, gap) = match plan.sense {
                Sense::Cost => (kappa(alpha)?, expr - rate),
                Sense::Gain => (kappa_extraction(alpha)?, rate - expr),
            };
            let exponent = k * gap;
            Ok(BoundEntry {
                bound_id: plan.id.to_string(),
                alpha,
                beta: b,
                kappa: k,
                expression_bits: expr,
                rate_bits: rate,
                exponent,
                log2_merit_bound: -n * exponent,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundReport { kind: problem.kind, copies: problem.copies, entries })
}

/// Largest exponent of one bound over the grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundSup {
    pub bound_id: String,
    pub exponent: f64,
    pub alpha: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentCurve {
    pub kind: ProtocolKind,
    pub grid: Vec<f64>,
    /// Ordered by α, then by bound.
    pub entries: Vec<BoundEntry>,
    pub sup: Vec<BoundSup>,
}

impl ExponentCurve {
    pub fn to_csv(&self) -> String {
        entries_to_csv(&self.entries)
    }
}

pub const CSV_HEADER: &str = "bound_id,alpha,beta,kappa,expression_bits,rate_bits,exponent,log2_merit_bound";

pub fn entries_to_csv(entries: &[BoundEntry]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for e in entries {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            e.bound_id, e.alpha, e.beta, e.kappa, e.expression_bits, e.rate_bits, e.exponent, e.log2_merit_bound
        ));
    }
    out
}

/// Evaluates the bounds at every grid point; the points run in parallel.
pub fn exponent_curve(problem: &BoundProblem, grid: &AlphaGrid, cfg: &OptConfig) -> Result<ExponentCurve> {
    let reports: Vec<BoundReport> = grid
        .points()
        .par_iter()
        .map(|&a| converse_bound(problem, a, cfg))
        .collect::<Result<_>>()?;
    let entries: Vec<BoundEntry> = reports.into_iter().flat_map(|r| r.entries).collect();
    let sup = bound_ids(problem.kind)
        .into_iter()
        .map(|id| {
            let best = entries
                .iter()
                .filter(|e| e.bound_id == id)
                .fold(None::<&BoundEntry>, |acc, e| match acc {
                    Some(b) if b.exponent >= e.exponent => Some(b),
                    _ => Some(e),
                })
                .expect("grids are nonempty");
            BoundSup { bound_id: id.to_string(), exponent: best.exponent, alpha: best.alpha }
        })
        .collect();
    Ok(ExponentCurve { kind: problem.kind, grid: grid.points().to_vec(), entries, sup })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::vn_conditional_entropy;
    use crate::tensor::random::{random_ket, random_state, trial_rng};
    use crate::tensor::SystemSpace;

    fn rates(pairs: &[(&str, f64)]) -> Costs {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn redistribution_expressions_ignore_the_purification() {
        use crate::tensor::random::haar_isometry;
        use crate::tensor::{apply_channel, ChannelSpec};
        let mut rng = trial_rng(21, 0);
        let rho = random_state(&mut rng, &SystemSpace::new([("A", 2), ("B", 2), ("C", 2)]).unwrap());
        let psi = purify(&rho, "R").unwrap();
        let r = psi.space().select(&["R"]).unwrap();
        let wider = SystemSpace::single("R", r.dim() + 3).unwrap();
        let v = haar_isometry(&mut rng, r.dim(), wider.dim()).unwrap();
        let ch = ChannelSpec::new(r, wider, SystemSpace::trivial(), v).unwrap();
        let other = apply_channel(&ch, &psi).unwrap();
        let cfg = OptConfig::default();
        for (a, b) in [(0.6, 3.0), (0.9, 9.0 / 8.0)] {
            let x = redistribution_expressions(&psi, a, b, &cfg).unwrap();
            let y = redistribution_expressions(&other, a, b, &cfg).unwrap();
            for (x, y) in x.iter().zip(&y) {
                assert!((x - y).abs() < 1e-6, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn pure_a_product_q_plus_e() {
        let mut rng = trial_rng(1, 0);
        let a = DensityOperator::from_ket(SystemSpace::single("A", 2).unwrap(), &random_ket(&mut rng, 2)).unwrap();
        let bc = random_state(&mut rng, &SystemSpace::new([("B", 2), ("C", 2)]).unwrap());
        let flat = DensityOperator::maximally_mixed(SystemSpace::new([("B", 2), ("C", 2)]).unwrap());
        let cfg = OptConfig::default();
        for alpha in [0.55, 0.75, 0.95] {
            // S_β(AB) − S_α(B) = S_β(B) − S_α(B): zero for flat ρ_B, negative otherwise
            let p = |rest: &DensityOperator| BoundProblem {
                kind: ProtocolKind::Redistribution,
                source: BoundSource::Quantum(a.tensor(rest).unwrap()),
                rates: rates(&[("q", 0.0), ("e", 0.0)]),
                copies: 1,
            };
            let e = converse_bound(&p(&flat), alpha, &cfg).unwrap().entries[0].clone();
            assert!(e.expression_bits.abs() < 1e-12 && e.log2_merit_bound.abs() < 1e-12);
            let e = converse_bound(&p(&bc), alpha, &cfg).unwrap().entries[0].clone();
            let rb = bc.partial_trace(&["B"]).unwrap();
            let want = renyi_entropy(&rb, beta(alpha).unwrap()).unwrap() - renyi_entropy(&rb, alpha).unwrap();
            assert!((e.expression_bits - want).abs() < 1e-12 && want < 0.0);
            assert!(e.log2_merit_bound > 0.0);
        }
    }

    #[test]
    fn uniform_bit_extraction_is_free() {
        let cq = CqState::classical("X", vec![0.5, 0.5]).unwrap();
        let p = BoundProblem {
            kind: ProtocolKind::RandomnessExtraction,
            source: BoundSource::Cq(cq),
            rates: rates(&[("l", 1.0)]),
            copies: 1,
        };
        let r = converse_bound(&p, 0.7, &OptConfig::default()).unwrap();
        for e in &r.entries {
            assert!(e.exponent.abs() < 1e-12);
            assert_eq!(e.kappa, (1.0 - 0.7) / (4.0 * 0.7));
        }
    }

    #[test]
    fn kappa_on_grid() {
        let s = SystemSpace::new([("A", 2), ("B", 2), ("C", 2)]).unwrap();
        let rho = random_state(&mut trial_rng(3, 0), &s);
        let p = BoundProblem {
            kind: ProtocolKind::Redistribution,
            source: BoundSource::Quantum(rho.clone()),
            rates: rates(&[("q", 0.5), ("e", 0.0)]),
            copies: 2,
        };
        let grid = AlphaGrid::parse("0.6:0.9:4").unwrap();
        let curve = exponent_curve(&p, &grid, &OptConfig::sweep()).unwrap();
        assert_eq!(curve.entries.len(), 12);
        for e in &curve.entries {
            assert_eq!(e.kappa, (1.0 - e.alpha) / (2.0 * e.alpha));
            assert_eq!(e.log2_merit_bound, -2.0 * e.exponent);
        }
        assert!(curve.to_csv().starts_with(CSV_HEADER));
        // rate 0.1 bit below the boundary gives a positive supremum
        let s_ab = vn_conditional_entropy(&rho, &["A"], &["B"]).unwrap();
        let below = BoundProblem { rates: rates(&[("q", s_ab - 0.1), ("e", 0.0)]), ..p };
        let c = exponent_curve(&below, &AlphaGrid::default(), &OptConfig::sweep()).unwrap();
        assert!(c.sup[0].exponent > 0.0);
    }

    #[test]
    fn alpha_outside_range_rejected() {
        let cq = CqState::classical("X", vec![0.5, 0.5]).unwrap();
        let p = BoundProblem {
            kind: ProtocolKind::DataCompression,
            source: BoundSource::Cq(cq),
            rates: rates(&[("m", 1.0)]),
            copies: 1,
        };
        assert!(converse_bound(&p, 1.2, &OptConfig::default()).is_err());
    }
}
