//! Table-I-style tallies, per-design reports and FPV setup scripts.

mod report;
mod tally;
mod tcl;

pub use report::{emit_report, parse_json_report, ReportFormat};
pub use tally::{aggregate, aggregate_with_designs, AggregateError, AssertionRecord, DesignRow, RepairOutcome, Scoreboard, Tally, VerdictKind};
pub use tcl::{emit_tcl, emit_tcl_with, TclError, TclRequest, FPV_TEMPLATE};
