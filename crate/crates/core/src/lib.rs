// `!(x > 0.0)` style checks are kept on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli_report;
pub mod error;
mod extreal;
pub mod multiplier;
pub mod oracle;
mod section;
pub mod seq;
pub mod shift_spectrum;
pub mod spaces;
pub mod toeplitz;
pub mod trig;

pub use error::{Error, Result};
pub use seq::{FiniteSymbol, SeqWindow};
