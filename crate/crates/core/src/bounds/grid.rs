use serde::Serialize;

use crate::{Error, Result};

/// Uniformly spaced orders in (1/2, 1), written `start:end:count`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaGrid {
    points: Vec<f64>,
}

impl Default for AlphaGrid {
    /// 25 points on [0.51, 0.99].
    fn default() -> Self {
        Self::uniform(0.51, 0.99, 25).expect("valid default grid")
    }
}

impl AlphaGrid {
    pub fn uniform(start: f64, end: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::usage("an α-grid needs at least one point"));
        }
        if !(start > 0.5 && start < 1.0 && end > 0.5 && end < 1.0) {
            return Err(Error::Usage(format!("α-grid [{start}, {end}] must lie inside (1/2, 1)")));
        }
        if count > 1 && !(end > start) {
            return Err(Error::Usage(format!("α-grid end {end} must exceed start {start}")));
        }
        let points = if count == 1 {
            vec![start]
        } else {
            let step = (end - start) / (count - 1) as f64;
            (0..count).map(|i| if i == count - 1 { end } else { start + step * i as f64 }).collect()
        };
        Ok(Self { points })
    }

    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        let bad = || Error::Usage(format!("α-grid `{spec}` should read start:end:count"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let end: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        Self::uniform(start, end, count)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid() {
        let g = AlphaGrid::default();
        assert_eq!(g.points().len(), 25);
        assert_eq!(g.points()[0], 0.51);
        assert_eq!(g.points()[24], 0.99);
        assert!((g.points()[1] - 0.53).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_specs() {
        for s in ["0.4:0.9:5", "0.6:1.0:3", "0.6:0.9", "a:b:c", "0.9:0.6:3", "0.6:0.9:0"] {
            assert!(AlphaGrid::parse(s).is_err(), "{s}");
        }
    }
}
