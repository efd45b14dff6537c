//! Ergodic optimization for expanding Thurston maps given by two-tile
//! subdivision rules.

pub mod cli;
pub mod closing;
pub mod ergopt;
pub mod error;
pub mod geometry;
pub mod plane;
pub mod potential;
pub mod subdivision;
pub mod symbolic;
pub mod textfmt;
pub mod tpo;

pub use error::{Error, Result};
