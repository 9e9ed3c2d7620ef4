//! Closed-form estimation of fiber nonlinear interference (NLI) for
//! multi-span, multi-format WDM links, with a numerical GN-model reference,
//! launch-power and OSNR budgeting, and a random scenario generator.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod budget;
pub mod cff;
pub mod egn;
pub mod error;
pub mod gmi;
pub mod link_model;
pub mod oracle;
pub mod quad;
pub mod report;
pub mod scenario_gen;
pub mod schema;
pub mod special;

pub use error::{Error, Result};
