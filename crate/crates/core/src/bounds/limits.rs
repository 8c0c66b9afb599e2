use serde::Serialize;

use super::{bound_ids, expressions, BoundSource};
use crate::entropy::{beta, OptConfig};
use crate::protocol::ProtocolKind;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitEntry {
    pub bound_id: String,
    /// The expression at α = 1.
    pub von_neumann: f64,
    pub at_eps: f64,
    pub at_half_eps: f64,
    pub gap_eps: f64,
    pub gap_half_eps: f64,
    /// `gap_eps / gap_half_eps`; infinite when the smaller gap vanishes.
    pub ratio: f64,
}

impl LimitEntry {
    pub fn shrinks(&self) -> bool {
        self.gap_half_eps < self.gap_eps || self.gap_eps <= 1e-12
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitReport {
    pub kind: ProtocolKind,
    pub eps: f64,
    pub entries: Vec<LimitEntry>,
}

/// Gaps between each expression at `α = 1 − ε` (and `1 − ε/2`) and its
/// von Neumann value.
pub fn vn_limit_check(kind: ProtocolKind, source: &BoundSource, eps: f64, cfg: &OptConfig) -> Result<LimitReport> {
    if !(eps > 0.0 && eps <= 0.1) {
        return Err(Error::Usage(format!("ε must lie in (0, 0.1], got {eps}")));
    }
    let vn = expressions(kind, source, 1.0, 1.0, cfg)?;
    let at = |a: f64| expressions(kind, source, a, beta(a)?, cfg);
    let full = at(1.0 - eps)?;
    let half = at(1.0 - eps / 2.0)?;
    let entries = bound_ids(kind)
        .into_iter()
        .enumerate()
        .map(|(i, id)| {
            let gap_eps = (full[i] - vn[i]).abs();
            let gap_half_eps = (half[i] - vn[i]).abs();
            LimitEntry {
                bound_id: id.to_string(),
                von_neumann: vn[i],
                at_eps: full[i],
                at_half_eps: half[i],
                gap_eps,
                gap_half_eps,
                ratio: if gap_half_eps > 0.0 { gap_eps / gap_half_eps } else { f64::INFINITY },
            }
        })
        .collect();
    Ok(LimitReport { kind, eps, entries })
}
