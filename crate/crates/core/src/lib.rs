//! Exact cokernels of random integer matrices and total sandpile groups of
//! random digraphs, closed-form limiting probabilities for their
//! statistics, and a seeded Monte-Carlo harness comparing the two.

pub mod constants;
pub mod error;
pub mod experiments;
pub mod groups;
pub mod linalg;
pub mod sampling;

pub use error::{Error, Result};
