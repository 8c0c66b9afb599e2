//! Simulators for the source-coding protocols.
//!
//! Each simulator builds the initial state, applies the parties' channels in
//! order, and reports the figure of merit together with the per-copy costs
//! `log₂(register size)/n`.

mod compression;
mod extraction;
pub mod file;
mod measurement;
mod redistribution;
mod table;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::tensor::{CMat, DensityOperator, SystemSpace};
use crate::{Error, Result};

pub use compression::{helstrom_povm, run_data_compression, CompressionInstance, Decoder};
pub use extraction::{run_randomness_extraction, ExtractionInstance};
pub use measurement::{
    dephasing_channel, ideal_measurement_state, measurement_channel, run_measurement_compression,
    uncompressed_measurement, MeasurementInstance,
};
pub use redistribution::{
    identity_redistribution, run_feedback_redistribution, run_merging, run_redistribution, run_splitting,
    specialize, MergingInput, RedistributionInstance, Round, SpecializeInput, SplittingInput,
};
pub use table::ClassicalTable;

/// Largest composite dimension a simulation may build.
pub const DIMENSION_BUDGET: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    Redistribution,
    RedistributionFeedback,
    CoherentMerging,
    StateSplitting,
    MeasurementCompression,
    RandomnessExtraction,
    DataCompression,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 7] = [
        ProtocolKind::Redistribution,
        ProtocolKind::RedistributionFeedback,
        ProtocolKind::CoherentMerging,
        ProtocolKind::StateSplitting,
        ProtocolKind::MeasurementCompression,
        ProtocolKind::RandomnessExtraction,
        ProtocolKind::DataCompression,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Redistribution => "redistribution",
            ProtocolKind::RedistributionFeedback => "redistribution-feedback",
            ProtocolKind::CoherentMerging => "coherent-merging",
            ProtocolKind::StateSplitting => "state-splitting",
            ProtocolKind::MeasurementCompression => "measurement-compression",
            ProtocolKind::RandomnessExtraction => "randomness-extraction",
            ProtocolKind::DataCompression => "data-compression",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown protocol kind `{s}`")))
    }
}

impl std::fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-copy costs in bits, keyed by `q`, `e`, `q_fwd`, `q_tot`, `q_csm`,
/// `e_csm`, `q_qss`, `e_qss`, `c`, `r`, `l` and `m`.
pub type Costs = BTreeMap<String, f64>;

/// The state a protocol ends in.
#[derive(Clone, Debug)]
pub enum FinalState {
    Quantum(DensityOperator),
    /// `Σ_z |z⟩⟨z| ⊗ ω_z` kept as its diagonal blocks.
    CqBlocks { z_label: String, blocks: Vec<CMat>, b_space: SystemSpace },
    /// Joint distribution of `(X, X̂)`, row-major.
    Joint { x_dim: usize, probabilities: Vec<f64> },
}

#[derive(Clone, Debug)]
pub struct ProtocolOutcome {
    pub kind: ProtocolKind,
    pub final_state: FinalState,
    /// Fidelity, or success probability for data compression.
    pub merit: f64,
    pub costs: Costs,
    pub copies: usize,
}

pub(crate) fn cost(size: usize, copies: usize) -> f64 {
    (size as f64).log2() / copies as f64
}

pub(crate) fn check_budget(what: &str, dim: usize) -> Result<()> {
    if dim > DIMENSION_BUDGET {
        return Err(Error::Budget(format!(
            "{what} has dimension {dim}, above the budget of {DIMENSION_BUDGET}"
        )));
    }
    Ok(())
}

pub(crate) fn check_copies(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::usage("number of copies must be at least 1"));
    }
    Ok(())
}
