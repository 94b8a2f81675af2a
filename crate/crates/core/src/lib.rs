#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod ec;
pub mod error;
pub mod estimation;
pub mod fixtures;
pub mod fmt;
pub mod gof;
pub mod modality;
pub mod moments;
pub mod numerics;
pub mod par;
pub mod simulate;

pub use error::{Error, Result};
