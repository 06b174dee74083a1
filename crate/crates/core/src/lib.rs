//! Exact mixed moments of single-particle marginals of Haar-rotated fixed-spectrum Hermitian
//! operators, with a Monte-Carlo oracle and leading-order asymptotics.

pub mod asymptotics;
pub mod checks;
pub mod error;
pub mod exact;
pub mod mc;
pub mod moments;
pub mod par;
pub mod symgroup;
pub mod weingarten;

pub use error::{Error, Result};
pub use exact::Exact;
pub use par::Execution;
