//! Per-design flow: decompose, generate, align, repair, classify.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use assertgen_core::checker::{BehavioralModel, ClassifyContext, StimulusPlan, Verdict};
use assertgen_core::rtl::{extract_interface, ModuleInterface, NameLists};
use assertgen_core::scoreboard::{AssertionRecord, RepairOutcome, VerdictKind};
use assertgen_core::sva::render_all;
use assertgen_flow::decompose::{decompose, CommentUnit, DecompositionResult};
use assertgen_flow::repair::{compile, run_repair, start_session, RepairError, RepairPolicy, RepairSession, RepairStatus};
use assertgen_llm::{Gateway, PromptLibrary};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::DesignManifestEntry;
use crate::rundir::{to_json, write_file};

/// Loaded inputs of one design.
pub struct DesignInputs {
    pub spec: String,
    pub rtl: String,
    pub model: BehavioralModel,
    pub iface: ModuleInterface,
}

impl DesignInputs {
    pub fn load(entry: &DesignManifestEntry, design_dir: &Path, names: &NameLists) -> Result<DesignInputs> {
        let read = |p: &Path| {
            let full = design_dir.join(p);
            std::fs::read_to_string(&full).with_context(|| format!("reading {}", full.display()))
        };
        let spec = read(&entry.spec_path)?;
        let rtl = read(&entry.rtl_path)?;
        let model = BehavioralModel::from_json(&read(&entry.model_path)?)
            .with_context(|| format!("design '{}': loading behavioral model", entry.design_id))?;
        let iface = extract_interface(&rtl, names)
            .map_err(|d| anyhow::anyhow!("design '{}': {}", entry.design_id, render_all(&[d], &rtl)))?;
        Ok(DesignInputs { spec, rtl, model, iface })
    }
}

/// Where a design failed, when it did.
#[derive(Debug, Clone, Serialize)]
pub struct DesignFailure {
    pub design_id: String,
    pub stage: &'static str,
    pub message: String,
    pub gateway: bool,
}

#[derive(Debug, Serialize)]
pub struct UnitVerdict {
    pub unit_index: usize,
    pub kind: &'static str,
    pub comment: String,
    pub repair_status: RepairStatus,
    pub iterations: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_assertion: Option<String>,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation_cycle: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vacuous: Option<bool>,
}

pub struct DesignResult {
    pub records: Vec<AssertionRecord>,
    pub failure: Option<DesignFailure>,
}

pub struct Flow<'a> {
    pub gateway: &'a Gateway,
    pub prompts: &'a PromptLibrary,
    pub policy: &'a RepairPolicy,
    pub plan: &'a StimulusPlan,
    pub names: &'a NameLists,
    pub design_dir: &'a Path,
}

fn failure(design: &str, stage: &'static str, err: impl std::fmt::Display, gateway: bool) -> DesignFailure {
    DesignFailure { design_id: design.to_string(), stage, message: format!("{err:#}"), gateway }
}

pub fn write_decomposition(dir: &Path, result: &DecompositionResult) -> Result<PathBuf> {
    write_file(&dir.join("decomposition.json"), to_json(result))
}

/// Writes a comment above each fixed assertion.
fn assertion_file(design: &str, sessions: &[(usize, RepairSession)]) -> String {
    let mut out = format!("// Generated assertions for {design}\n");
    for (i, s) in sessions {
        if let Some(text) = s.final_assertion() {
            let _ = write!(out, "\n// unit {i}: {}\n{text}\n", s.unit.rendered_comment);
        }
    }
    out
}

fn record(design: &str, session: &RepairSession, verdict: Option<&Verdict>) -> AssertionRecord {
    let repair = match session.status {
        RepairStatus::Fixed => RepairOutcome::Fixed,
        RepairStatus::LoopDetected => RepairOutcome::LoopDetected,
        _ => RepairOutcome::Exhausted,
    };
    let (verdict, vacuous) = match verdict {
        None | Some(Verdict::SyntaxError { .. }) => (VerdictKind::SyntaxError, false),
        Some(Verdict::FunctionallyIncorrect { .. }) => (VerdictKind::FunctionallyIncorrect, false),
        Some(Verdict::FunctionallyCorrect { vacuous, .. }) => (VerdictKind::FunctionallyCorrect, *vacuous),
    };
    AssertionRecord { design_id: design.to_string(), initial_clean: session.initial_clean(), repair, verdict, vacuous }
}

impl Flow<'_> {
    /// Runs one design end to end, persisting every intermediate under
    /// `out`. Errors inside the flow become a [`DesignFailure`]; records of
    /// units that completed are still returned.
    pub fn run_design(&self, entry: &DesignManifestEntry, out: &Path) -> Result<DesignResult> {
        let id = entry.design_id.as_str();
        let inputs = match DesignInputs::load(entry, self.design_dir, self.names) {
            Ok(i) => i,
            Err(e) => return Ok(DesignResult { records: vec![], failure: Some(failure(id, "load", e, false)) }),
        };
        let classifier = match ClassifyContext::new(&inputs.model, &inputs.iface, self.plan) {
            Ok(c) => c,
            Err(e) => return Ok(DesignResult { records: vec![], failure: Some(failure(id, "load", e, false)) }),
        };
        write_file(&out.join("interface.json"), to_json(&inputs.iface))?;

        let decomposition = match decompose(id, &inputs.spec, self.gateway, self.prompts) {
            Ok(d) => d,
            Err(e) => {
                let gw = e.is_gateway();
                return Ok(DesignResult { records: vec![], failure: Some(failure(id, "decompose", e, gw)) });
            }
        };
        write_decomposition(out, &decomposition)?;

        let outcomes: Vec<(usize, Result<RepairSession, RepairError>)> = decomposition
            .units
            .par_iter()
            .enumerate()
            .map(|(i, unit)| (i, self.run_unit(unit, &inputs)))
            .collect();

        let mut sessions = Vec::new();
        let mut failure_msg = None;
        for (i, outcome) in outcomes {
            match outcome {
                Ok(s) => sessions.push((i, s)),
                Err(e) => {
                    let gw = matches!(e, RepairError::Gateway(_));
                    failure_msg.get_or_insert_with(|| failure(id, "repair", format!("unit {i}: {e}"), gw));
                }
            }
        }

        let mut records = Vec::new();
        let mut verdicts = Vec::new();
        for (i, s) in &sessions {
            write_file(&out.join(format!("sessions/unit_{i:02}.json")), to_json(s))?;
            let verdict = match s.final_assertion() {
                Some(text) => match classifier.classify(text) {
                    Ok(Verdict::SyntaxError { diagnostics }) => {
                        let msg = format!("unit {i}: checker rejected a compiled assertion: {}", render_all(&diagnostics, text));
                        failure_msg.get_or_insert_with(|| failure(id, "classify", msg, false));
                        continue;
                    }
                    Ok(v) => Some(v),
                    Err(e) => {
                        failure_msg.get_or_insert_with(|| failure(id, "classify", format!("unit {i}: {e}"), false));
                        continue;
                    }
                },
                None => None,
            };
            if let Some(Verdict::FunctionallyIncorrect { counterexample, .. }) = &verdict {
                write_file(&out.join(format!("counterexamples/unit_{i:02}.csv")), counterexample.to_csv())?;
            }
            records.push(record(id, s, verdict.as_ref()));
            verdicts.push(UnitVerdict {
                unit_index: *i,
                kind: s.unit.kind(),
                comment: s.unit.rendered_comment.clone(),
                repair_status: s.status,
                iterations: s.iteration,
                final_assertion: s.final_assertion().map(str::to_string),
                verdict: verdict.as_ref().map_or("syntax_error", Verdict::label),
                violation_cycle: match &verdict {
                    Some(Verdict::FunctionallyIncorrect { violation_cycle, .. }) => Some(*violation_cycle),
                    _ => None,
                },
                vacuous: match &verdict {
                    Some(Verdict::FunctionallyCorrect { vacuous, .. }) => Some(*vacuous),
                    _ => None,
                },
            });
        }
        write_file(&out.join("verdicts.json"), to_json(&verdicts))?;
        write_file(&out.join("assertions.sv"), assertion_file(id, &sessions))?;
        Ok(DesignResult { records, failure: failure_msg })
    }

    fn run_unit(&self, unit: &CommentUnit, inputs: &DesignInputs) -> Result<RepairSession, RepairError> {
        let mut session = start_session(unit, &inputs.rtl, &inputs.iface, self.gateway, self.prompts)?;
        run_repair(&mut session, self.policy, self.gateway, self.prompts)?;
        Ok(session)
    }
}

/// One statement per `;` at parenthesis depth zero, comments removed.
pub fn split_statements(text: &str) -> Vec<String> {
    let mut clean = String::new();
    let mut rest = text;
    while !rest.is_empty() {
        if let Some(r) = rest.strip_prefix("//") {
            rest = r.find('\n').map_or("", |i| &r[i..]);
        } else if let Some(r) = rest.strip_prefix("/*") {
            rest = r.find("*/").map_or("", |i| &r[i + 2..]);
            clean.push(' ');
        } else {
            let ch = rest.chars().next().expect("non-empty");
            clean.push(ch);
            rest = &rest[ch.len_utf8()..];
        }
    }
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    for ch in clean.chars() {
        cur.push(ch);
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ';' if depth <= 0 => {
                out.push(cur.split_whitespace().collect::<Vec<_>>().join(" "));
                cur.clear();
                depth = 0;
            }
            _ => {}
        }
    }
    let tail = cur.split_whitespace().collect::<Vec<_>>().join(" ");
    if !tail.is_empty() {
        out.push(tail);
    }
    out
}

/// One row of a score run's `verdicts.json`; same verdict labels as the
/// pipeline's rows.
#[derive(Debug, Serialize)]
pub struct ScoredAssertion {
    pub index: usize,
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compiled: Option<String>,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation_cycle: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vacuous: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<String>,
    #[serde(skip)]
    pub detail: Verdict,
}

/// Scores assertions as written: compiled (with the combinational rewrite
/// where it applies) and classified, without any repair.
pub fn score_statements(
    design: &str,
    statements: &[String],
    iface: &ModuleInterface,
    classifier: &ClassifyContext<'_>,
) -> Result<(Vec<ScoredAssertion>, Vec<AssertionRecord>)> {
    let policy = RepairPolicy::default();
    let scored: Vec<Result<ScoredAssertion>> = statements
        .par_iter()
        .enumerate()
        .map(|(index, source)| {
            let (compiled, diagnostics) = compile(source, iface, &policy);
            let clean = diagnostics.is_empty();
            let detail = if clean {
                classifier.classify(&compiled).with_context(|| format!("assertion {index}"))?
            } else {
                Verdict::SyntaxError { diagnostics }
            };
            let (violation_cycle, vacuous, diagnostics) = match &detail {
                Verdict::SyntaxError { diagnostics } => (None, None, Some(render_all(diagnostics, source))),
                Verdict::FunctionallyIncorrect { violation_cycle, .. } => (Some(*violation_cycle), None, None),
                Verdict::FunctionallyCorrect { vacuous, .. } => (None, Some(*vacuous), None),
            };
            Ok(ScoredAssertion {
                index,
                source: source.clone(),
                compiled: clean.then_some(compiled),
                verdict: detail.label(),
                violation_cycle,
                vacuous,
                diagnostics,
                detail,
            })
        })
        .collect();
    let scored: Vec<ScoredAssertion> = scored.into_iter().collect::<Result<_>>()?;
    let records = scored
        .iter()
        .map(|s| {
            let (verdict, vacuous, clean) = match &s.detail {
                Verdict::SyntaxError { .. } => (VerdictKind::SyntaxError, false, false),
                Verdict::FunctionallyIncorrect { .. } => (VerdictKind::FunctionallyIncorrect, false, true),
                Verdict::FunctionallyCorrect { vacuous, .. } => (VerdictKind::FunctionallyCorrect, *vacuous, true),
            };
            let repair = if clean { RepairOutcome::Fixed } else { RepairOutcome::Exhausted };
            AssertionRecord { design_id: design.to_string(), initial_clean: clean, repair, verdict, vacuous }
        })
        .collect();
    Ok((scored, records))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statements() {
        let text = "// header\nassert property (@(posedge clk) a |-> (b;c));\n/* skip; */ p: assert (x);\nassert (y";
        assert_eq!(split_statements(text), ["assert property (@(posedge clk) a |-> (b;c));", "p: assert (x);", "assert (y"]);
        assert!(split_statements("// only a comment\n").is_empty());
    }
}
