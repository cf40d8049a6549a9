use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    SyntaxError,
    FunctionallyIncorrect,
    FunctionallyCorrect,
}

/// How the repair loop ended for one assertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepairOutcome {
    Fixed,
    Exhausted,
    LoopDetected,
}

/// Everything the tally needs to know about one generated assertion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssertionRecord {
    pub design_id: String,
    /// The first candidate compiled without diagnostics.
    pub initial_clean: bool,
    pub repair: RepairOutcome,
    pub verdict: VerdictKind,
    #[serde(default)]
    pub vacuous: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub generated: u64,
    pub syntax_incorrect: u64,
    pub syntax_correct: u64,
    pub fixed_by_repair: u64,
    pub clean_initially: u64,
    pub functionally_correct: u64,
    pub functionally_incorrect: u64,
}

impl Tally {
    /// Names of the arithmetic identities that do not hold.
    pub fn violated_invariants(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.generated != self.syntax_incorrect + self.syntax_correct {
            out.push("generated = syntax_incorrect + syntax_correct");
        }
        if self.syntax_correct != self.fixed_by_repair + self.clean_initially {
            out.push("syntax_correct = fixed_by_repair + clean_initially");
        }
        if self.syntax_correct != self.functionally_correct + self.functionally_incorrect {
            out.push("syntax_correct = functionally_correct + functionally_incorrect");
        }
        out
    }

    pub fn is_consistent(&self) -> bool {
        self.violated_invariants().is_empty()
    }

    fn add(&mut self, o: &Tally) {
        self.generated += o.generated;
        self.syntax_incorrect += o.syntax_incorrect;
        self.syntax_correct += o.syntax_correct;
        self.fixed_by_repair += o.fixed_by_repair;
        self.clean_initially += o.clean_initially;
        self.functionally_correct += o.functionally_correct;
        self.functionally_incorrect += o.functionally_incorrect;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignRow {
    pub tally: Tally,
    /// Functionally correct assertions that never had a non-vacuous attempt.
    pub vacuous: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scoreboard {
    pub designs: BTreeMap<String, DesignRow>,
    pub total: DesignRow,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AggregateError {
    #[error("record {index} ({design}): {reason}")]
    Inconsistent { index: usize, design: String, reason: String },
}

pub fn aggregate(records: &[AssertionRecord]) -> Result<Scoreboard, AggregateError> {
    aggregate_with_designs(records, std::iter::empty::<&str>())
}

/// Like [`aggregate`], but also lists designs that produced no records.
pub fn aggregate_with_designs<'a>(
    records: &[AssertionRecord],
    designs: impl IntoIterator<Item = &'a str>,
) -> Result<Scoreboard, AggregateError> {
    let mut board = Scoreboard::default();
    for d in designs {
        board.designs.entry(d.to_string()).or_default();
    }
    for (index, r) in records.iter().enumerate() {
        let bad = |reason: &str| AggregateError::Inconsistent {
            index,
            design: r.design_id.clone(),
            reason: reason.to_string(),
        };
        let failed_repair = matches!(r.repair, RepairOutcome::Exhausted | RepairOutcome::LoopDetected);
        match (failed_repair, r.verdict) {
            (true, VerdictKind::SyntaxError) | (false, VerdictKind::FunctionallyCorrect | VerdictKind::FunctionallyIncorrect) => {}
            (true, _) => return Err(bad("functional verdict on an assertion whose repair did not finish")),
            (false, _) => return Err(bad("syntax_error verdict on an assertion the repair loop reported fixed")),
        }
        if r.initial_clean && failed_repair {
            return Err(bad("initially clean assertion cannot end in a failed repair"));
        }
        if r.vacuous && r.verdict != VerdictKind::FunctionallyCorrect {
            return Err(bad("only functionally correct assertions can be vacuous"));
        }
        let mut t = Tally { generated: 1, ..Tally::default() };
        match r.verdict {
            VerdictKind::SyntaxError => t.syntax_incorrect = 1,
            v => {
                t.syntax_correct = 1;
                if r.initial_clean {
                    t.clean_initially = 1;
                } else {
                    t.fixed_by_repair = 1;
                }
                if v == VerdictKind::FunctionallyCorrect {
                    t.functionally_correct = 1;
                } else {
                    t.functionally_incorrect = 1;
                }
            }
        }
        let row = board.designs.entry(r.design_id.clone()).or_default();
        row.tally.add(&t);
        row.vacuous += u64::from(r.vacuous);
    }
    for row in board.designs.values() {
        board.total.tally.add(&row.tally);
        board.total.vacuous += row.vacuous;
    }
    debug_assert!(board.total.tally.is_consistent());
    Ok(board)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(design: &str, initial_clean: bool, repair: RepairOutcome, verdict: VerdictKind) -> AssertionRecord {
        AssertionRecord { design_id: design.into(), initial_clean, repair, verdict, vacuous: false }
    }

    #[test]
    fn empty_is_all_zero() {
        let b = aggregate(&[]).unwrap();
        assert_eq!(b.total.tally, Tally::default());
        assert!(b.designs.is_empty());
    }

    #[test]
    fn per_design_and_total() {
        let rs = vec![
            rec("b", true, RepairOutcome::Fixed, VerdictKind::FunctionallyCorrect),
            rec("a", false, RepairOutcome::Fixed, VerdictKind::FunctionallyIncorrect),
            rec("a", false, RepairOutcome::LoopDetected, VerdictKind::SyntaxError),
        ];
        let b = aggregate(&rs).unwrap();
        assert_eq!(b.designs.keys().collect::<Vec<_>>(), ["a", "b"]);
        let a = b.designs["a"].tally;
        assert_eq!((a.generated, a.syntax_incorrect, a.fixed_by_repair, a.functionally_incorrect), (2, 1, 1, 1));
        assert_eq!(b.total.tally.generated, 3);
        assert!(b.total.tally.is_consistent());
    }

    #[test]
    fn inconsistent_records_are_hard_errors() {
        assert!(aggregate(&[rec("a", false, RepairOutcome::Exhausted, VerdictKind::FunctionallyCorrect)]).is_err());
        assert!(aggregate(&[rec("a", false, RepairOutcome::Fixed, VerdictKind::SyntaxError)]).is_err());
        assert!(aggregate(&[rec("a", true, RepairOutcome::LoopDetected, VerdictKind::SyntaxError)]).is_err());
    }
}
