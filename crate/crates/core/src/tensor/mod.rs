//! Labeled finite-dimensional linear algebra.

mod channel;
mod cq;
mod functions;
pub mod io;
pub mod linalg;
mod operator;
pub mod random;
mod space;

pub use channel::{apply_channel, ChannelSpec};
pub use cq::CqState;
pub(crate) use cq::digits;
pub use functions::{fidelity, fidelity_with_pure, fractional_power, purify, purify_ket, schatten_norm, PureState};
pub use linalg::{CMat, CVec};
pub use operator::{maximally_entangled_ket, partial_trace, DensityOperator, LabeledOperator};
pub(crate) use operator::embed_matrix;
pub use space::{Subsystem, SystemSpace};
