//! The inequality suites. Each trial draws its states from the trial
//! stream and returns the checks it evaluated.

use rand::Rng;

use super::{dim, Check, TrialFn};
use crate::entropy::{
    beta, cmi_generalizations, conditional_entropy, conditional_mutual_information, mutual_information,
    renyi_entropy, sandwiched_divergence, vn_conditional_mutual_information, OptConfig,
};
use crate::tensor::linalg::{self, schatten, trace_norm, CMat, Eigh};
use crate::tensor::random::{
    default_env_dim, ginibre, haar_isometry, random_channel, random_cq_state, random_pure_state, random_state,
    random_state_with_rank, TrialRng,
};
use crate::tensor::{apply_channel, embed_matrix, fidelity, purify, CqState, DensityOperator, LabeledOperator, SystemSpace};
use crate::Result;

pub struct Suite {
    pub id: &'static str,
    pub about: &'static str,
    pub(crate) run: TrialFn,
}

pub const SUITES: &[Suite] = &[
    Suite { id: "hoelder", about: "Hölder's inequality for Schatten norms", run: hoelder },
    Suite { id: "mccarthy", about: "McCarthy's inequalities for p < 1 and p ≥ 1", run: mccarthy },
    Suite { id: "monotonicity-alpha", about: "divergence non-decreasing in α", run: monotonicity_alpha },
    Suite { id: "positivity-dimension", about: "0 ≤ S_α ≤ log d with extremal states", run: positivity_dimension },
    Suite { id: "additivity", about: "additivity on product states", run: additivity },
    Suite { id: "isometric-invariance", about: "invariance under isometries", run: isometric_invariance },
    Suite { id: "entropy-duality", about: "S_α(A) = S_α(B) on pure states", run: entropy_duality },
    Suite { id: "conditional-duality", about: "S̃_α(A|B) = −S̃_β(A|C) on pure states", run: conditional_duality },
    Suite { id: "dpi", about: "data processing for divergences, conditional entropy and mutual information", run: dpi },
    Suite { id: "subadditivity", about: "S_α(A) − log|B| ≤ S_α(AB) ≤ S_α(A) + log|B|", run: subadditivity },
    Suite { id: "dimension-bounds", about: "dimension bounds and product invariance", run: dimension_bounds },
    Suite { id: "fidelity-bounds", about: "fidelity bounds on entropy differences", run: fidelity_bounds },
    Suite { id: "cq-monotonicity", about: "discarding classical information", run: cq_monotonicity },
    Suite { id: "cmi-generalizations", about: "limit, α-monotonicity, DPI and duality of Ĩ⁽¹⁾, Ĩ⁽²⁾", run: cmi_generalizations_suite },
    Suite { id: "fidelity-product", about: "F(ρ_AB, σ_A⊗ρ_B) ≥ F²(ρ_AB, σ_A⊗χ_B)", run: fidelity_product },
];

fn space(parts: &[(&str, usize)]) -> Result<SystemSpace> {
    SystemSpace::new(parts.iter().map(|&(l, d)| (l, d)))
}

fn pick<T: Copy>(rng: &mut TrialRng, xs: &[T]) -> T {
    xs[rng.random_range(0..xs.len())]
}

fn ce(rho: &DensityOperator, a: &[&str], b: &[&str], alpha: f64, cfg: &OptConfig) -> Result<f64> {
    Ok(conditional_entropy(rho, a, b, alpha, cfg)?.value)
}

fn mi(rho: &DensityOperator, a: &[&str], b: &[&str], alpha: f64, cfg: &OptConfig) -> Result<f64> {
    Ok(mutual_information(rho, a, b, alpha, cfg)?.value)
}

fn div(rho: &DensityOperator, sigma: &DensityOperator, alpha: f64) -> Result<f64> {
    sandwiched_divergence(rho, &sigma.as_operator(), alpha)
}

fn ent(rho: &DensityOperator, labels: &[&str], alpha: f64) -> Result<f64> {
    renyi_entropy(&rho.partial_trace(labels)?, alpha)
}

fn channel_on(rng: &mut TrialRng, label: &str, din: usize, out: &str, dout: usize) -> Result<crate::tensor::ChannelSpec> {
    let i = SystemSpace::single(label, din)?;
    let o = SystemSpace::single(out, dout)?;
    let e = default_env_dim(&i, &o);
    random_channel(rng, &i, &o, "E", e)
}

fn hoelder(rng: &mut TrialRng, dims: &[usize], _: &OptConfig) -> Result<Vec<Check>> {
    let d = dim(dims, 0) * dim(dims, 1);
    let m = ginibre(rng, d, d);
    let n = ginibre(rng, d, d);
    let lhs = trace_norm(&(&m * &n));
    let mut out = Vec::new();
    for p in [1.0, 1.25, 1.5, 2.0, 3.0, 4.0, f64::INFINITY] {
        let q = if p == 1.0 {
            f64::INFINITY
        } else if p.is_infinite() {
            1.0
        } else {
            p / (p - 1.0)
        };
        out.push(Check::le(format!("‖MN‖₁ ≤ ‖M‖_p‖N‖_q, p={p}"), lhs, schatten(&m, p)? * schatten(&n, q)?, false));
    }
    Ok(out)
}

fn random_psd(rng: &mut TrialRng, d: usize) -> CMat {
    let g = ginibre(rng, d, d);
    let m = &g * g.adjoint();
    let scale: f64 = rng.random_range(0.1..2.0);
    m.scale(scale / linalg::trace(&m).re)
}

fn mccarthy(rng: &mut TrialRng, dims: &[usize], _: &OptConfig) -> Result<Vec<Check>> {
    let d = dim(dims, 0) * dim(dims, 1);
    let m = random_psd(rng, d);
    let n = random_psd(rng, d);
    let s = &m + &n;
    let mut out = Vec::new();
    for p in [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0] {
        let (a, b, ab) = (schatten(&m, p)?.powf(p), schatten(&n, p)?.powf(p), schatten(&s, p)?.powf(p));
        if p < 1.0 {
            out.push(Check::le(format!("‖M+N‖_p^p ≤ ‖M‖_p^p + ‖N‖_p^p, p={p}"), ab, a + b, false));
        } else {
            out.push(Check::le(format!("‖M‖_p^p + ‖N‖_p^p ≤ ‖M+N‖_p^p, p={p}"), a + b, ab, false));
        }
    }
    Ok(out)
}

const ORDERS: [f64; 9] = [0.5, 0.6, 0.75, 0.9, 1.0, 1.25, 1.5, 2.0, 3.0];

fn monotonicity_alpha(rng: &mut TrialRng, dims: &[usize], _: &OptConfig) -> Result<Vec<Check>> {
    let s = space(&[("A", dim(dims, 0)), ("B", dim(dims, 1))])?;
    let rho = random_state(rng, &s);
    let sigma = random_state(rng, &s);
    let mut out = Vec::new();
    let vals: Vec<f64> = ORDERS.iter().map(|&a| div(&rho, &sigma, a)).collect::<Result<_>>()?;
    for i in 1..ORDERS.len() {
        out.push(Check::le(format!("D̃_{} ≤ D̃_{}", ORDERS[i - 1], ORDERS[i]), vals[i - 1], vals[i], false));
    }
    // S_β(AB) − S_α(B) is non-decreasing in α on (1/2, 1)
    let grid = [0.55, 0.65, 0.75, 0.85, 0.95];
    let f = |a: f64| -> Result<f64> { Ok(ent(&rho, &["A", "B"], beta(a)?)? - ent(&rho, &["B"], a)?) };
    let fs: Vec<f64> = grid.iter().map(|&a| f(a)).collect::<Result<_>>()?;
    for i in 1..grid.len() {
        out.push(Check::le(
            format!("S_β(AB) − S_α(B) at α={} ≤ at α={}", grid[i - 1], grid[i]),
            fs[i - 1],
            fs[i],
            false,
        ));
    }
    Ok(out)
}

fn positivity_dimension(rng: &mut TrialRng, dims: &[usize], _: &OptConfig) -> Result<Vec<Check>> {
    let s = space(&[("A", dim(dims, 0)), ("B", dim(dims, 1))])?;
    let log_d = (s.dim() as f64).log2();
    let rho = random_state(rng, &s);
    let pure = random_pure_state(rng, &s);
    let flat = DensityOperator::maximally_mixed(s);
    let mut out = Vec::new();
    for a in [0.0, 0.5, 0.8, 1.0, 2.0, 5.0] {
        let v = renyi_entropy(&rho, a)?;
        out.push(Check::le(format!("0 ≤ S_{a}"), 0.0, v, false));
        out.push(Check::le(format!("S_{a} ≤ log d"), v, log_d, false));
        out.push(Check::eq(format!("S_{a}(pure) = 0"), renyi_entropy(&pure, a)?, 0.0, false));
        out.push(Check::eq(format!("S_{a}(π) = log d"), renyi_entropy(&flat, a)?, log_d, false));
    }
    Ok(out)
}

fn additivity(rng: &mut TrialRng, dims: &[usize], cfg: &OptConfig) -> Result<Vec<Check>> {
    let (a, b) = (dim(dims, 0), dim(dims, 1));
    let s1 = space(&[("A", a), ("B", b)])?;
    let s2 = space(&[("A2", a), ("B2", b)])?;
    let (r1, r2) = (random_state(rng, &s1), random_state(rng, &s2));
    let (t1, t2) = (random_state(rng, &s1), random_state(rng, &s2));
    let alpha = pick(rng, &[0.6, 0.8, 1.5, 2.0]);
    let r = r1.tensor(&r2)?;
    let t = t1.tensor(&t2)?;
    Ok(vec![
        Check::eq(format!("D̃_{alpha} additive"), div(&r, &t, alpha)?, div(&r1, &t1, alpha)? + div(&r2, &t2, alpha)?, false),
        Check::eq(
            format!("S_{alpha} additive"),
            renyi_entropy(&r, alpha)?,
            renyi_entropy(&r1, alpha)? + renyi_entropy(&r2, alpha)?,
            false,
        ),
        Check::eq(
            format!("S̃_{alpha} additive"),
            ce(&r, &["A", "A2"], &["B", "B2"], alpha, cfg)?,
            ce(&r1, &["A"], &["B"], alpha, cfg)? + ce(&r2, &["A2"], &["B2"], alpha, cfg)?,
            true,
        ),
        Check::eq(
            format!("Ĩ_{alpha} additive"),
            mi(&r, &["A", "A2"], &["B", "B2"], alpha, cfg)?,
            mi(&r1, &["A"], &["B"], alpha, cfg)? + mi(&r2, &["A2"], &["B2"], alpha, cfg)?,
            true,
        ),
    ])
}

fn conjugate(v: &CMat, rho: &DensityOperator, label: &str) -> Result<DensityOperator> {
    Ok(DensityOperator::from_parts(SystemSpace::single(label, v.nrows())?, v * rho.matrix() * v.adjoint()))
}

fn isometric_invariance(rng: &mut TrialRng, dims: &[usize], _: &OptConfig) -> Result<Vec<Check>> {
    let d = dim(dims, 0) * dim(dims, 1);
    let s = SystemSpace::single("A", d)?;
    let rho = random_state(rng, &s);
    let sigma = random_state(rng, &s);
    let v = haar_isometry(rng, d, d + dim(dims, 2))?;
    let (vr, vs) = (conjugate(&v, &rho, "A'")?, conjugate(&v, &sigma, "A'")?);
    let mut out = Vec::new();
    for a in [0.5, 0.7, 1.0, 1.5, 2.0] {
        out.push(Check::eq(format!("D̃_{a} invariant"), div(&vr, &vs, a)?, div(&rho, &sigma, a)?, false));
        out.push(Check::eq(format!("S_{a} invariant"), renyi_entropy(&vr, a)?, renyi_entropy(&rho, a)?, false));
    }
    Ok(out)
}

fn entropy_duality(rng: &mut TrialRng, dims: &[usize], _: &OptConfig) -> Result<Vec<Check>> {
    let psi = random_pure_state(rng, &space(&[("A", dim(dims, 0)), ("B", dim(dims, 1))])?);
    [0.0, 0.5, 0.7, 1.0, 1.5, 2.0, 4.0]
        .into_iter()
        .map(|a| Ok(Check::eq(format!("S_{a}(A) = S_{a}(B)"), ent(&psi, &["A"], a)?, ent(&psi, &["B"], a)?, false)))
        .collect()
}

fn conditional_duality(rng: &mut TrialRng, dims: &[usize], cfg: &OptConfig) -> Result<Vec<Check>> {
    let psi = random_pure_state(rng, &space(&[("A", dim(dims, 0)), ("B", dim(dims, 1)), ("C", dim(dims, 2))])?);
    [0.6, 0.75, 1.5, 2.0]
        .into_iter()
        .map(|a| {
            let b = beta(a)?;
            Ok(Check::eq(
                format!("S̃_{a}(A|B) = −S̃_β(A|C)"),
                ce(&psi, &["A"], &["B"], a, cfg)?,
                -ce(&psi, &["A"], &["C"], b, cfg)?,
                true,
            ))
        })
        .collect()
}

fn dpi(rng: &mut TrialRng, dims: &[usize], cfg: &OptConfig) -> Result<Vec<Check>> {
    let (a, b, c) = (dim(dims, 0), dim(dims, 1), dim(dims, 2));
    let mut out = Vec::new();
    // a generic channel A → A'
    let sa = SystemSpace::single("A", a)?;
    let (rho, sigma) = (random_state(rng, &sa), random_state(rng, &sa));
    let ch = channel_on(rng, "A", a, "A'", b)?;
    let (pr, ps) = (apply_channel(&ch, &rho)?, apply_channel(&ch, &sigma)?);
    for al in ORDERS {
        out.push(Check::le(format!("D̃_{al}(Φρ‖Φσ) ≤ D̃_{al}(ρ‖σ)"), div(&pr, &ps, al)?, div(&rho, &sigma, al)?, false));
    }
    // the partial trace
    let sab = space(&[("A", a), ("B", b)])?;
    let (rab, tab) = (random_state(rng, &sab), random_state(rng, &sab));
    let (ra, ta) = (rab.partial_trace(&["A"])?, tab.partial_trace(&["A"])?);
    for al in ORDERS {
        out.push(Check::le(format!("D̃_{al}(ρ_A‖σ_A) ≤ D̃_{al}(ρ_AB‖σ_AB)"), div(&ra, &ta, al)?, div(&rab, &tab, al)?, false));
    }
    // a channel on the conditioning system
    let al = pick(rng, &[0.6, 0.8, 1.5, 2.0]);
    let chb = channel_on(rng, "B", b, "C", c)?;
    let rac = apply_channel(&chb, &rab)?;
    out.push(Check::le(
        format!("S̃_{al}(A|B) ≤ S̃_{al}(A|C)"),
        ce(&rab, &["A"], &["B"], al, cfg)?,
        ce(&rac, &["A"], &["C"], al, cfg)?,
        true,
    ));
    out.push(Check::le(
        format!("Ĩ_{al}(A;C) ≤ Ĩ_{al}(A;B)"),
        mi(&rac, &["A"], &["C"], al, cfg)?,
        mi(&rab, &["A"], &["B"], al, cfg)?,
        true,
    ));
    Ok(out)
}

fn subadditivity(rng: &mut TrialRng, dims: &[usize], _: &OptConfig) -> Result<Vec<Check>> {
    let b = dim(dims, 1);
    let rho = random_state(rng, &space(&[("A", dim(dims, 0)), ("B", b)])?);
    let log_b = (b as f64).log2();
    let mut out = Vec::new();
    for a in [0.0, 0.3, 0.5, 0.8, 1.0, 1.5, 2.0, 5.0] {
        let (sa, sab) = (ent(&rho, &["A"], a)?, renyi_entropy(&rho, a)?);
        out.push(Check::le(format!("S_{a}(A) − log|B| ≤ S_{a}(AB)"), sa - log_b, sab, false));
        out.push(Check::le(format!("S_{a}(AB) ≤ S_{a}(A) + log|B|"), sab, sa + log_b, false));
    }
    Ok(out)
}

fn dimension_bounds(rng: &mut TrialRng, dims: &[usize], cfg: &OptConfig) -> Result<Vec<Check>> {
    let (a, b, c) = (dim(dims, 0), dim(dims, 1), dim(dims, 2));
    let rho = random_state(rng, &space(&[("A", a), ("B", b), ("C", c)])?);
    let al = pick(rng, &[0.6, 0.8, 1.5, 2.0]);
    let two_log_c = 2.0 * (c as f64).log2();
    let s_b = ce(&rho, &["A"], &["B"], al, cfg)?;
    let i_b = mi(&rho, &["A"], &["B"], al, cfg)?;
    let mut out = vec![
        Check::le(format!("S̃_{al}(A|B) ≤ S̃_{al}(A|BC) + 2log|C|"), s_b, ce(&rho, &["A"], &["B", "C"], al, cfg)? + two_log_c, true),
        Check::le(format!("Ĩ_{al}(A;BC) ≤ Ĩ_{al}(A;B) + 2log|C|"), mi(&rho, &["A"], &["B", "C"], al, cfg)?, i_b + two_log_c, true),
    ];
    let prod = rho.partial_trace(&["A", "B"])?.tensor(&random_state(rng, &SystemSpace::single("C", c)?))?;
    out.push(Check::eq(format!("S̃_{al}(A|BC)_(ρ⊗σ) = S̃_{al}(A|B)_ρ"), ce(&prod, &["A"], &["B", "C"], al, cfg)?, s_b, true));
    out.push(Check::eq(format!("Ĩ_{al}(A;BC)_(ρ⊗σ) = Ĩ_{al}(A;B)_ρ"), mi(&prod, &["A"], &["B", "C"], al, cfg)?, i_b, true));
    Ok(out)
}

/// `H − π_A⊗tr_A H − π_B⊗tr_B H + π_A⊗π_B⊗tr_AB H` for Hermitian `H` on
/// `A B C`: both the `AC` and the `BC` marginals vanish.
fn doubly_traceless(h: &CMat, s: &SystemSpace) -> Result<CMat> {
    let op = LabeledOperator::square(s.clone(), h.clone())?;
    let (da, db) = (s.dim_of("A")? as f64, s.dim_of("B")? as f64);
    let part = |keep: &[&str]| -> Result<CMat> {
        let t = op.partial_trace(keep)?;
        embed_matrix(t.space_out(), t.entries(), s)
    };
    Ok(h - part(&["B", "C"])?.unscale(da) - part(&["A", "C"])?.unscale(db) + part(&["C"])?.unscale(da * db))
}

fn fidelity_bounds(rng: &mut TrialRng, dims: &[usize], cfg: &OptConfig) -> Result<Vec<Check>> {
    let (a, b, c) = (dim(dims, 0), dim(dims, 1), dim(dims, 2));
    let al = pick(rng, &[0.55, 0.65, 0.75, 0.85, 0.95]);
    let bt = beta(al)?;
    let k = 2.0 * al / (1.0 - al);
    let sab = space(&[("A", a), ("B", b)])?;
    let (rho, sigma) = (random_state(rng, &sab), random_state(rng, &sab));
    let (ra, sa) = (rho.partial_trace(&["A"])?, sigma.partial_trace(&["A"])?);
    let mut out = Vec::new();

    let s_rho_a = renyi_entropy(&ra, al)?;
    out.push(Check::le("entropy", k * fidelity(&ra, &sa)?.log2(), s_rho_a - renyi_entropy(&sa, bt)?, false));
    out.push(Check::le("entropy, ρ = σ", 0.0, s_rho_a - renyi_entropy(&ra, bt)?, false));

    let c_rho = ce(&rho, &["A"], &["B"], al, cfg)?;
    out.push(Check::le("conditional", k * fidelity(&rho, &sigma)?.log2(), c_rho - ce(&sigma, &["A"], &["B"], bt, cfg)?, true));
    out.push(Check::le("conditional, ρ = σ", 0.0, c_rho - ce(&rho, &["A"], &["B"], bt, cfg)?, true));

    // shared A marginal: purify ρ_A and apply two channels to the purifying side
    let psi = purify(&random_state(rng, &SystemSpace::single("A", a)?), "R")?;
    let r = psi.space().dim_of("R")?;
    let m1 = apply_channel(&channel_on(rng, "R", r, "B", b)?, &psi)?;
    let m2 = apply_channel(&channel_on(rng, "R", r, "B", b)?, &psi)?;
    let i_beta = mi(&m1, &["A"], &["B"], bt, cfg)?;
    out.push(Check::le("mutual", k * fidelity(&m1, &m2)?.log2(), i_beta - mi(&m2, &["A"], &["B"], al, cfg)?, true));
    out.push(Check::le("mutual, ρ = σ", 0.0, i_beta - mi(&m1, &["A"], &["B"], al, cfg)?, true));

    // equal AC, BC and C marginals: perturb a full-rank ρ_ABC along a doubly traceless direction
    let sabc = space(&[("A", a), ("B", b), ("C", c)])?;
    let rho3 = random_state(rng, &sabc);
    let g = ginibre(rng, sabc.dim(), sabc.dim());
    let delta = doubly_traceless(&linalg::hermitize(&g), &sabc)?;
    let lam_min = *Eigh::new(rho3.matrix()).values.last().expect("nonempty");
    let op_norm = Eigh::new(&delta).max_abs();
    let eps = rng.random_range(0.2..0.9) * lam_min / op_norm;
    let sigma3 = DensityOperator::new(sabc, rho3.matrix() + delta.scale(eps))?;
    let cmi_beta = conditional_mutual_information(&rho3, &["A"], &["B"], &["C"], bt)?;
    out.push(Check::le(
        "conditional mutual",
        k * fidelity(&rho3, &sigma3)?.log2(),
        cmi_beta - conditional_mutual_information(&sigma3, &["A"], &["B"], &["C"], al)?,
        false,
    ));
    out.push(Check::le(
        "conditional mutual, ρ = σ",
        0.0,
        cmi_beta - conditional_mutual_information(&rho3, &["A"], &["B"], &["C"], al)?,
        false,
    ));
    for q in out.iter_mut() {
        q.quantity = format!("{} (α={al})", q.quantity);
    }
    Ok(out)
}

fn cq_monotonicity(rng: &mut TrialRng, dims: &[usize], cfg: &OptConfig) -> Result<Vec<Check>> {
    let (a, b, nx) = (dim(dims, 0), dim(dims, 1), dim(dims, 2));
    let cq: CqState = random_cq_state(rng, "X", nx, &space(&[("A", a), ("B", b)])?)?;
    let rho = cq.to_density();
    let al = pick(rng, &[0.5, 0.6, 0.8, 1.5, 2.0]);
    let log_x = (nx as f64).log2();
    let s_ab = ce(&rho, &["A"], &["B"], al, cfg)?;
    Ok(vec![
        Check::le(format!("S̃_{al}(A|B) ≤ S̃_{al}(AX|B)"), s_ab, ce(&rho, &["A", "X"], &["B"], al, cfg)?, true),
        Check::le(format!("S̃_{al}(A|B) ≤ S̃_{al}(A|BX) + log|X|"), s_ab, ce(&rho, &["A"], &["B", "X"], al, cfg)? + log_x, true),
        Check::le(
            format!("Ĩ_{al}(A;BX) ≤ log|X| + Ĩ_{al}(A;B)"),
            mi(&rho, &["A"], &["B", "X"], al, cfg)?,
            log_x + mi(&rho, &["A"], &["B"], al, cfg)?,
            true,
        ),
    ])
}

fn cmi_generalizations_suite(rng: &mut TrialRng, dims: &[usize], cfg: &OptConfig) -> Result<Vec<Check>> {
    let (a, b, c) = (dim(dims, 0), dim(dims, 1), dim(dims, 2));
    let s = space(&[("A", a), ("B", b), ("C", c)])?;
    let rho = random_state(rng, &s);
    let (lo, hi) = pick(rng, &[(0.6, 0.9), (0.55, 0.8), (0.7, 1.5), (1.5, 2.5)]);
    let g = |st: &DensityOperator, bl: &str, cl: &str, al: f64| cmi_generalizations(st, &["A"], &[bl], &[cl], al, cfg);
    let (i1_lo, i2_lo) = g(&rho, "B", "C", lo)?;
    let (i1_hi, i2_hi) = g(&rho, "B", "C", hi)?;
    let mut out = vec![
        Check::le(format!("Ĩ⁽¹⁾_{hi} ≤ Ĩ⁽¹⁾_{lo}"), i1_hi, i1_lo, true),
        Check::le(format!("Ĩ⁽²⁾_{lo} ≤ Ĩ⁽²⁾_{hi}"), i2_lo, i2_hi, true),
    ];
    let vn = vn_conditional_mutual_information(&rho, &["A"], &["B"], &["C"])?;
    let (i1_near, i2_near) = g(&rho, "B", "C", 0.999)?;
    out.push(Check::le("|Ĩ⁽¹⁾_0.999 − I(A;B|C)| ≤ 0.01", (i1_near - vn).abs(), 0.01, true));
    out.push(Check::le("|Ĩ⁽²⁾_0.999 − I(A;B|C)| ≤ 0.01", (i2_near - vn).abs(), 0.01, true));
    let moved = apply_channel(&channel_on(rng, "B", b, "B'", b)?, &rho)?;
    let (j1, j2) = g(&moved, "B'", "C", lo)?;
    out.push(Check::le(format!("Ĩ⁽¹⁾_{lo}(A;B'|C) ≤ Ĩ⁽¹⁾_{lo}(A;B|C)"), j1, i1_lo, true));
    out.push(Check::le(format!("Ĩ⁽²⁾_{lo}(A;B'|C) ≤ Ĩ⁽²⁾_{lo}(A;B|C)"), j2, i2_lo, true));
    // duality needs a small purifying system
    let low = purify(&random_state_with_rank(rng, &s, 2), "D")?;
    let (d1, _) = g(&low, "B", "C", lo)?;
    let (d2, _) = g(&low, "B", "D", lo)?;
    out.push(Check::eq(format!("Ĩ⁽¹⁾_{lo}(A;B|C) = Ĩ⁽¹⁾_{lo}(A;B|D)"), d1, d2, true));
    Ok(out)
}

fn fidelity_product(rng: &mut TrialRng, dims: &[usize], _: &OptConfig) -> Result<Vec<Check>> {
    let (a, b) = (dim(dims, 0), dim(dims, 1));
    let rho = random_state(rng, &space(&[("A", a), ("B", b)])?);
    let sigma = random_state(rng, &SystemSpace::single("A", a)?);
    let chi = random_state(rng, &SystemSpace::single("B", b)?);
    let lhs = fidelity(&rho, &sigma.tensor(&chi)?)?.powi(2);
    let rhs = fidelity(&rho, &sigma.tensor(&rho.partial_trace(&["B"])?)?)?;
    Ok(vec![Check::le("F²(ρ_AB, σ_A⊗χ_B) ≤ F(ρ_AB, σ_A⊗ρ_B)", lhs, rhs, false)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::run_inequality_suite;

    #[test]
    fn traceless_direction_keeps_marginals() {
        let mut rng = crate::tensor::random::trial_rng(1, 0);
        let s = space(&[("A", 2), ("B", 3), ("C", 2)]).unwrap();
        let h = linalg::hermitize(&ginibre(&mut rng, 12, 12));
        let d = doubly_traceless(&h, &s).unwrap();
        let op = LabeledOperator::square(s, d).unwrap();
        assert!(op.partial_trace(&["A", "C"]).unwrap().entries().norm() < 1e-12);
        assert!(op.partial_trace(&["B", "C"]).unwrap().entries().norm() < 1e-12);
    }

    #[test]
    fn every_suite_runs() {
        for s in SUITES {
            let r = run_inequality_suite(s.id, 3, &[2, 2, 2], 5, 1e-8).unwrap();
            assert!(r.passed(), "{}: {:?}", s.id, r.failures);
            assert!(r.checks > 0);
        }
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(run_inequality_suite("nope", 1, &[2], 0, 1e-8), Err(crate::Error::UnknownSuite(_))));
    }
}
