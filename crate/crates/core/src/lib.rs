//! Numerical toolkit for the capacity pre-log of SIMO correlated block-fading
//! channels `Y = S·Pᵀ·diag(x) + W`.
//!
//! * [`svd`], [`matrix`], [`rng`]: small complex linear algebra, canonical
//!   SVD and reproducible random streams.
//! * [`channel`]: the channel model, input laws and the rank-1 stacking.
//! * [`property_a`]: certification of the index-set rank condition.
//! * [`prelog`]: closed-form pre-log bounds and the optimal antenna count.
//! * [`duality`]: Monte Carlo evaluation of the duality upper bound for the
//!   rank-1 channel and its high-SNR slope.
//! * [`checks`]: numerical verification of the inequalities behind the bounds.
//!
//! All logarithms are natural; information is measured in nats.

// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod checks;
pub mod duality;
pub mod error;
pub mod fit;
pub mod matrix;
pub mod mc;
pub mod prelog;
pub mod property_a;
pub mod rng;
pub mod svd;

pub use channel::{CorrelationRoot, InputKind};
pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, C64};
pub use mc::Execution;
pub use rng::RngStream;
pub use svd::{svd, SvdTriple};
