//! JSON interchange for states and channels.
//!
//! Matrices are row-major arrays of `[re, im]` pairs under the fixed
//! composite index convention.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::channel::ChannelSpec;
use super::linalg::{c, CMat};
use super::operator::DensityOperator;
use super::space::{Subsystem, SystemSpace};
use crate::{Error, Result};

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub systems: Vec<Subsystem>,
    pub matrix: MatrixJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub input: Vec<Subsystem>,
    pub output: Vec<Subsystem>,
    #[serde(default)]
    pub environment: Vec<Subsystem>,
    /// Rows ordered as output factors then environment factors.
    pub isometry: MatrixJson,
}

pub fn matrix_to_json(m: &CMat) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson, origin: &str, field: &str) -> Result<CMat> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != m) {
        return Err(input_error(origin, field, "rows have different lengths"));
    }
    if rows.iter().flatten().flatten().any(|v| !v.is_finite()) {
        return Err(input_error(origin, field, "non-finite entry"));
    }
    Ok(CMat::from_fn(n, m, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

pub(crate) fn input_error(origin: &str, field: &str, message: impl std::fmt::Display) -> Error {
    Error::Input {
        path: origin.to_string(),
        field: field.to_string(),
        message: message.to_string(),
    }
}

fn space_from(parts: &[Subsystem], origin: &str, field: &str) -> Result<SystemSpace> {
    SystemSpace::from_subsystems(parts.to_vec()).map_err(|e| input_error(origin, field, e))
}

impl StateFile {
    pub fn from_state(rho: &DensityOperator) -> Self {
        Self {
            systems: rho.space().subsystems().to_vec(),
            matrix: matrix_to_json(rho.matrix()),
        }
    }

    /// `origin` names the file (or enclosing field) in error messages.
    pub fn to_state(&self, origin: &str) -> Result<DensityOperator> {
        let space = space_from(&self.systems, origin, "systems")?;
        let m = matrix_from_json(&self.matrix, origin, "matrix")?;
        DensityOperator::new(space, m).map_err(|e| input_error(origin, "matrix", e))
    }
}

impl ChannelFile {
    pub fn from_channel(ch: &ChannelSpec) -> Self {
        Self {
            input: ch.input().subsystems().to_vec(),
            output: ch.output().subsystems().to_vec(),
            environment: ch.environment().subsystems().to_vec(),
            isometry: matrix_to_json(ch.isometry()),
        }
    }

    pub fn to_channel(&self, origin: &str) -> Result<ChannelSpec> {
        let input = space_from(&self.input, origin, "input")?;
        let output = space_from(&self.output, origin, "output")?;
        let env = space_from(&self.environment, origin, "environment")?;
        let v = matrix_from_json(&self.isometry, origin, "isometry")?;
        ChannelSpec::new(input, output, env, v).map_err(|e| input_error(origin, "isometry", e))
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| input_error(&origin, "<file>", e))?;
    serde_json::from_str(&text).map_err(|e| input_error(&origin, "<json>", e))
}

pub fn read_state(path: &Path) -> Result<DensityOperator> {
    let f: StateFile = read_json(path)?;
    f.to_state(&path.display().to_string())
}

pub fn write_state(path: &Path, rho: &DensityOperator) -> Result<()> {
    std::fs::write(path, state_to_json(rho))?;
    Ok(())
}

pub fn state_to_json(rho: &DensityOperator) -> String {
    let mut s = serde_json::to_string_pretty(&StateFile::from_state(rho)).expect("serializable");
    s.push('\n');
    s
}

pub fn read_channel(path: &Path) -> Result<ChannelSpec> {
    let f: ChannelFile = read_json(path)?;
    f.to_channel(&path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::random::{random_state, trial_rng};

    #[test]
    fn state_json_round_trip_is_exact() {
        let s = SystemSpace::new([("A", 2), ("B", 3)]).unwrap();
        let rho = random_state(&mut trial_rng(1, 2), &s);
        let text = state_to_json(&rho);
        let f: StateFile = serde_json::from_str(&text).unwrap();
        let back = f.to_state("mem").unwrap();
        assert_eq!(back.matrix(), rho.matrix());
    }

    #[test]
    fn malformed_state_names_field() {
        let f = StateFile {
            systems: vec![Subsystem { label: "A".into(), dim: 2 }],
            matrix: vec![vec![[0.5, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [0.6, 0.0]]],
        };
        match f.to_state("bad.json") {
            Err(Error::Input { path, field, .. }) => {
                assert_eq!(path, "bad.json");
                assert_eq!(field, "matrix");
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
