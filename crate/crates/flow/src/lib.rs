//! The generation flow: spec decomposition into comment units, initial
//! generation with iterative compiler-feedback repair, and construction of
//! the fine-tuning dataset.

pub mod dataset;
pub mod decompose;
pub mod repair;
