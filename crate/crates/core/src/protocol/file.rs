//! Protocol instance files.
//!
//! A file is a JSON object tagged by `"kind"`. States and channels use the
//! same layout as standalone state and channel files; register sizes go in
//! `"registers"`, and classical functions in `"e_table"` as
//! `{"<x_1…x_n>": "<index>"}`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    run_data_compression, run_feedback_redistribution, run_measurement_compression, run_merging,
    run_randomness_extraction, run_redistribution, run_splitting, ClassicalTable, CompressionInstance, Decoder,
    ExtractionInstance, MeasurementInstance, MergingInput, ProtocolKind, ProtocolOutcome, RedistributionInstance,
    Round, SplittingInput,
};
use crate::entropy::OptConfig;
use crate::tensor::io::{input_error, matrix_from_json, matrix_to_json, ChannelFile, MatrixJson, StateFile};
use crate::tensor::{CqState, DensityOperator};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundFile {
    pub encoder: ChannelFile,
    pub forward: Vec<String>,
    pub decoder: ChannelFile,
    #[serde(default)]
    pub backward: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderFile {
    PrettyGood,
    /// `povm[c][x̂]`.
    Povm(Vec<Vec<MatrixJson>>),
}

fn one() -> usize {
    1
}

fn default_x() -> String {
    "X".into()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceFile {
    /// Registers `k`, `m`.
    Redistribution {
        state: StateFile,
        #[serde(default = "one")]
        copies: usize,
        #[serde(default)]
        registers: BTreeMap<String, usize>,
        rounds: Vec<RoundFile>,
    },
    RedistributionFeedback {
        state: StateFile,
        #[serde(default = "one")]
        copies: usize,
        #[serde(default)]
        registers: BTreeMap<String, usize>,
        rounds: Vec<RoundFile>,
    },
    /// Register `m`.
    CoherentMerging {
        state: StateFile,
        #[serde(default = "one")]
        copies: usize,
        #[serde(default)]
        registers: BTreeMap<String, usize>,
        encoder: ChannelFile,
        forward: Vec<String>,
        decoder: ChannelFile,
    },
    /// Register `k`.
    StateSplitting {
        state: StateFile,
        #[serde(default = "one")]
        copies: usize,
        #[serde(default)]
        registers: BTreeMap<String, usize>,
        encoder: ChannelFile,
        forward: Vec<String>,
        decoder: ChannelFile,
    },
    /// Register `MA` (shared randomness size).
    MeasurementCompression {
        state: StateFile,
        #[serde(default = "one")]
        copies: usize,
        #[serde(default)]
        registers: BTreeMap<String, usize>,
        povm: Vec<MatrixJson>,
        encoder: ChannelFile,
        decoder: ChannelFile,
    },
    /// Register `Z`; the state is classical on `x_label`.
    RandomnessExtraction {
        state: StateFile,
        #[serde(default = "default_x")]
        x_label: String,
        #[serde(default = "one")]
        copies: usize,
        registers: BTreeMap<String, usize>,
        e_table: BTreeMap<String, String>,
    },
    /// Register `C`.
    DataCompression {
        state: StateFile,
        #[serde(default = "default_x")]
        x_label: String,
        #[serde(default = "one")]
        copies: usize,
        registers: BTreeMap<String, usize>,
        e_table: BTreeMap<String, String>,
        #[serde(default = "pretty_good")]
        decoder: DecoderFile,
    },
}

fn pretty_good() -> DecoderFile {
    DecoderFile::PrettyGood
}

/// A parsed instance ready to run.
#[derive(Clone, Debug)]
pub enum Instance {
    Redistribution(RedistributionInstance),
    Feedback(RedistributionInstance),
    Merging(MergingInput),
    Splitting(SplittingInput),
    Measurement(MeasurementInstance),
    Extraction(ExtractionInstance),
    Compression(CompressionInstance),
}

impl Instance {
    pub fn kind(&self) -> ProtocolKind {
        match self {
            Instance::Redistribution(_) => ProtocolKind::Redistribution,
            Instance::Feedback(_) => ProtocolKind::RedistributionFeedback,
            Instance::Merging(_) => ProtocolKind::CoherentMerging,
            Instance::Splitting(_) => ProtocolKind::StateSplitting,
            Instance::Measurement(_) => ProtocolKind::MeasurementCompression,
            Instance::Extraction(_) => ProtocolKind::RandomnessExtraction,
            Instance::Compression(_) => ProtocolKind::DataCompression,
        }
    }

    pub fn run(&self, cfg: &OptConfig) -> Result<ProtocolOutcome> {
        match self {
            Instance::Redistribution(i) => run_redistribution(i),
            Instance::Feedback(i) => run_feedback_redistribution(i),
            Instance::Merging(i) => run_merging(i),
            Instance::Splitting(i) => run_splitting(i),
            Instance::Measurement(i) => run_measurement_compression(i),
            Instance::Extraction(i) => run_randomness_extraction(i, cfg),
            Instance::Compression(i) => run_data_compression(i),
        }
    }

    pub fn to_file(&self) -> InstanceFile {
        let rounds = |r: &[Round]| {
            r.iter()
                .map(|r| RoundFile {
                    encoder: ChannelFile::from_channel(&r.encoder),
                    forward: r.forward.clone(),
                    decoder: ChannelFile::from_channel(&r.decoder),
                    backward: r.backward.clone(),
                })
                .collect()
        };
        let regs = |pairs: &[(&str, usize)]| pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        match self {
            Instance::Redistribution(i) => InstanceFile::Redistribution {
                state: StateFile::from_state(&i.state),
                copies: i.copies,
                registers: regs(&[("k", i.k), ("m", i.m)]),
                rounds: rounds(&i.rounds),
            },
            Instance::Feedback(i) => InstanceFile::RedistributionFeedback {
                state: StateFile::from_state(&i.state),
                copies: i.copies,
                registers: regs(&[("k", i.k), ("m", i.m)]),
                rounds: rounds(&i.rounds),
            },
            Instance::Merging(i) => InstanceFile::CoherentMerging {
                state: StateFile::from_state(&i.state),
                copies: i.copies,
                registers: regs(&[("m", i.m)]),
                encoder: ChannelFile::from_channel(&i.encoder),
                forward: i.forward.clone(),
                decoder: ChannelFile::from_channel(&i.decoder),
            },
            Instance::Splitting(i) => InstanceFile::StateSplitting {
                state: StateFile::from_state(&i.state),
                copies: i.copies,
                registers: regs(&[("k", i.k)]),
                encoder: ChannelFile::from_channel(&i.encoder),
                forward: i.forward.clone(),
                decoder: ChannelFile::from_channel(&i.decoder),
            },
            Instance::Measurement(i) => InstanceFile::MeasurementCompression {
                state: StateFile::from_state(&i.state),
                copies: i.copies,
                registers: regs(&[("MA", i.shared)]),
                povm: i.povm.iter().map(matrix_to_json).collect(),
                encoder: ChannelFile::from_channel(&i.encoder),
                decoder: ChannelFile::from_channel(&i.decoder),
            },
            Instance::Extraction(i) => InstanceFile::RandomnessExtraction {
                state: StateFile::from_state(&i.state.to_density()),
                x_label: i.state.x_label().to_string(),
                copies: i.copies,
                registers: regs(&[("Z", i.table.codomain())]),
                e_table: i.table.to_strings(i.state.x_dim(), i.copies),
            },
            Instance::Compression(i) => InstanceFile::DataCompression {
                state: StateFile::from_state(&i.state.to_density()),
                x_label: i.state.x_label().to_string(),
                copies: i.copies,
                registers: regs(&[("C", i.table.codomain())]),
                e_table: i.table.to_strings(i.state.x_dim(), i.copies),
                decoder: match &i.decoder {
                    Decoder::PrettyGood => DecoderFile::PrettyGood,
                    Decoder::Povm(p) => {
                        DecoderFile::Povm(p.iter().map(|c| c.iter().map(matrix_to_json).collect()).collect())
                    }
                },
            },
        }
    }
}

fn register(regs: &BTreeMap<String, usize>, name: &str, default: Option<usize>, origin: &str) -> Result<usize> {
    match regs.get(name).copied().or(default) {
        Some(0) => Err(input_error(origin, &format!("registers.{name}"), "register sizes must be at least 1")),
        Some(v) => Ok(v),
        None => Err(input_error(origin, &format!("registers.{name}"), "missing register size")),
    }
}

fn rounds_from(files: &[RoundFile], origin: &str) -> Result<Vec<Round>> {
    files
        .iter()
        .enumerate()
        .map(|(i, r)| {
            Ok(Round {
                encoder: r.encoder.to_channel(&format!("{origin}: rounds[{i}].encoder"))?,
                forward: r.forward.clone(),
                decoder: r.decoder.to_channel(&format!("{origin}: rounds[{i}].decoder"))?,
                backward: r.backward.clone(),
            })
        })
        .collect()
}

fn cq_from(state: &StateFile, x_label: &str, origin: &str) -> Result<CqState> {
    let rho: DensityOperator = state.to_state(&format!("{origin}: state"))?;
    CqState::from_density(&rho, x_label).map_err(|e| input_error(origin, "state", e))
}

fn table_from(
    entries: &BTreeMap<String, String>,
    cq: &CqState,
    copies: usize,
    codomain: usize,
    origin: &str,
) -> Result<ClassicalTable> {
    ClassicalTable::from_strings(entries, cq.x_dim(), copies, codomain).map_err(|e| input_error(origin, "e_table", e))
}

impl InstanceFile {
    /// `origin` names the file in error messages.
    pub fn to_instance(&self, origin: &str) -> Result<Instance> {
        let st = |s: &StateFile| s.to_state(&format!("{origin}: state"));
        let ch = |c: &ChannelFile, f: &str| c.to_channel(&format!("{origin}: {f}"));
        Ok(match self {
            InstanceFile::Redistribution { state, copies, registers, rounds }
            | InstanceFile::RedistributionFeedback { state, copies, registers, rounds } => {
                let inst = RedistributionInstance {
                    state: st(state)?,
                    copies: *copies,
                    k: register(registers, "k", Some(1), origin)?,
                    m: register(registers, "m", Some(1), origin)?,
                    rounds: rounds_from(rounds, origin)?,
                };
                if matches!(self, InstanceFile::Redistribution { .. }) {
                    Instance::Redistribution(inst)
                } else {
                    Instance::Feedback(inst)
                }
            }
            InstanceFile::CoherentMerging { state, copies, registers, encoder, forward, decoder } => {
                Instance::Merging(MergingInput {
                    state: st(state)?,
                    copies: *copies,
                    m: register(registers, "m", Some(1), origin)?,
                    encoder: ch(encoder, "encoder")?,
                    forward: forward.clone(),
                    decoder: ch(decoder, "decoder")?,
                })
            }
            InstanceFile::StateSplitting { state, copies, registers, encoder, forward, decoder } => {
                Instance::Splitting(SplittingInput {
                    state: st(state)?,
                    copies: *copies,
                    k: register(registers, "k", Some(1), origin)?,
                    encoder: ch(encoder, "encoder")?,
                    forward: forward.clone(),
                    decoder: ch(decoder, "decoder")?,
                })
            }
            InstanceFile::MeasurementCompression { state, copies, registers, povm, encoder, decoder } => {
                let povm = povm
                    .iter()
                    .enumerate()
                    .map(|(i, m)| matrix_from_json(m, origin, &format!("povm[{i}]")))
                    .collect::<Result<_>>()?;
                Instance::Measurement(MeasurementInstance {
                    state: st(state)?,
                    povm,
                    copies: *copies,
                    shared: register(registers, "MA", Some(1), origin)?,
                    encoder: ch(encoder, "encoder")?,
                    decoder: ch(decoder, "decoder")?,
                })
            }
            InstanceFile::RandomnessExtraction { state, x_label, copies, registers, e_table } => {
                let cq = cq_from(state, x_label, origin)?;
                let table = table_from(e_table, &cq, *copies, register(registers, "Z", None, origin)?, origin)?;
                Instance::Extraction(ExtractionInstance { state: cq, copies: *copies, table })
            }
            InstanceFile::DataCompression { state, x_label, copies, registers, e_table, decoder } => {
                let cq = cq_from(state, x_label, origin)?;
                let table = table_from(e_table, &cq, *copies, register(registers, "C", None, origin)?, origin)?;
                let decoder = match decoder {
                    DecoderFile::PrettyGood => Decoder::PrettyGood,
                    DecoderFile::Povm(p) => Decoder::Povm(
                        p.iter()
                            .enumerate()
                            .map(|(c, els)| {
                                els.iter()
                                    .enumerate()
                                    .map(|(x, m)| matrix_from_json(m, origin, &format!("decoder.povm[{c}][{x}]")))
                                    .collect::<Result<Vec<_>>>()
                            })
                            .collect::<Result<_>>()?,
                    ),
                };
                Instance::Compression(CompressionInstance { state: cq, copies: *copies, table, decoder })
            }
        })
    }
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| input_error(&origin, "<file>", e))?;
    let f: InstanceFile = serde_json::from_str(&text).map_err(|e| input_error(&origin, "<json>", e))?;
    f.to_instance(&origin)
}

pub fn instance_to_json(inst: &Instance) -> Result<String> {
    serde_json::to_string_pretty(&inst.to_file()).map_err(Error::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::identity_redistribution;
    use crate::tensor::random::{random_state, trial_rng};
    use crate::tensor::SystemSpace;

    #[test]
    fn redistribution_round_trip() {
        let s = SystemSpace::new([("A", 2), ("B", 2), ("C", 2)]).unwrap();
        let rho = random_state(&mut trial_rng(11, 0), &s);
        let inst = Instance::Redistribution(identity_redistribution(&rho, 1).unwrap());
        let text = instance_to_json(&inst).unwrap();
        let back: InstanceFile = serde_json::from_str(&text).unwrap();
        let out = back.to_instance("mem").unwrap().run(&OptConfig::default()).unwrap();
        assert!((out.merit - 1.0).abs() < 1e-9);
    }

    #[test]
    fn extraction_table_parses() {
        let text = r#"{
            "kind": "randomness-extraction",
            "state": {"systems": [{"label": "X", "dim": 2}],
                      "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]},
            "copies": 2,
            "registers": {"Z": 2},
            "e_table": {"00": "0", "01": "1", "10": "1", "11": "0"}
        }"#;
        let f: InstanceFile = serde_json::from_str(text).unwrap();
        let out = f.to_instance("mem").unwrap().run(&OptConfig::default()).unwrap();
        assert!((out.merit - 1.0).abs() < 1e-12);
        assert_eq!(out.costs["l"], 0.5);
    }

    #[test]
    fn missing_table_entry_names_field() {
        let text = r#"{
            "kind": "data-compression",
            "state": {"systems": [{"label": "X", "dim": 2}],
                      "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]},
            "registers": {"C": 1},
            "e_table": {"0": "0"}
        }"#;
        let f: InstanceFile = serde_json::from_str(text).unwrap();
        match f.to_instance("inst.json") {
            Err(Error::Input { field, .. }) => assert_eq!(field, "e_table"),
            other => panic!("{other:?}"),
        }
    }
}
