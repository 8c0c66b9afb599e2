use serde::Serialize;

use crate::{Error, Result};

/// Half-width of the band around α = 1 routed to von Neumann formulas.
pub const VN_BAND: f64 = 1e-6;

pub fn near_one(alpha: f64) -> bool {
    (alpha - 1.0).abs() < VN_BAND
}

/// An order α with its dual order β and decay constant κ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlphaParams {
    pub alpha: f64,
    /// `α/(2α−1)`, so that `1/α + 1/β = 2`.
    pub beta: f64,
    /// `(1−α)/(2α)`.
    pub kappa: f64,
}

impl AlphaParams {
    pub fn new(alpha: f64) -> Result<Self> {
        Ok(Self {
            alpha,
            beta: beta(alpha)?,
            kappa: kappa(alpha)?,
        })
    }
}

pub fn alpha_params(alpha: f64) -> Result<AlphaParams> {
    AlphaParams::new(alpha)
}

pub fn beta(alpha: f64) -> Result<f64> {
    if !(alpha > 0.5) || !alpha.is_finite() {
        return Err(Error::usage(format!("the dual order needs α > 1/2, got {alpha}")));
    }
    Ok(alpha / (2.0 * alpha - 1.0))
}

pub fn kappa(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::usage(format!("κ needs α > 0, got {alpha}")));
    }
    Ok((1.0 - alpha) / (2.0 * alpha))
}

/// The randomness-extraction constant `(1−α)/(4α)`.
pub fn kappa_extraction(alpha: f64) -> Result<f64> {
    Ok(kappa(alpha)? / 2.0)
}
