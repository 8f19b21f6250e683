//! Optimal synthesis of labeling programs and trajectory queries by best-first
//! search over partial programs with interval-valued objective bounds.

pub mod bench;
pub mod constants;
pub mod data;
pub mod error;
pub mod interval;
mod lex;
pub mod near;
pub mod objectives;
pub mod oracle;
pub mod quivr;
pub mod run;
pub mod search;
pub mod synthetic;

pub use error::{Error, Result};
