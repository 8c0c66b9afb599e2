//! Rényi divergences and the entropic quantities built from them.

mod alpha;
mod cmi;
mod conditional;
mod divergence;
mod optimize;

pub use alpha::{alpha_params, beta, kappa, kappa_extraction, near_one, AlphaParams, VN_BAND};
pub use cmi::{cmi_generalizations, conditional_mutual_information};
pub use conditional::{
    conditional_entropy, mutual_information, vn_conditional_entropy, vn_conditional_mutual_information,
    vn_mutual_information,
};
pub use divergence::{
    marginal_entropy, relative_entropy, renyi_entropy, sandwiched_divergence, von_neumann_entropy, SUPPORT_TOL,
};
pub(crate) use divergence::sandwiched_matrix;
pub use optimize::{Method, OptConfig, OptimizedValue};
pub(crate) use optimize::minimize_states;
