//! Golden behavioral models, bounded assertion checking over finite
//! traces, stimulus enumeration and three-way verdicts.

mod bounded;
mod classify;
mod model;
mod stimulus;
mod trace;

pub use bounded::{check_on_trace, CheckOutcome};
pub use classify::{classify, ClassifyContext, Verdict};
pub use model::{simulate, BehavioralModel, ModelError, PortSpec, StateSpec};
pub use stimulus::{ResetPolicy, StimulusPlan, StimulusSource, Strategy};
pub use trace::Trace;

use thiserror::Error;

use crate::eval::EvalError;

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("signal '{0}' is missing from the trace")]
    MissingSignal(String),
    #[error("cycle {cycle}: {source}")]
    Eval { cycle: usize, source: EvalError },
    #[error("model: {0}")]
    Model(#[from] ModelError),
    #[error("stimulus plan: {0}")]
    Plan(String),
}
