//! Initial generation, RTL alignment and the compile-feedback repair loop.

use std::collections::BTreeMap;

use assertgen_core::rewrite::to_combinational;
use assertgen_core::rtl::{resolve_names, Mode, ModuleInterface};
use assertgen_core::sva::{parse_assertion, render_all, Diagnostic};
use assertgen_llm::{strip_fences, ChatMessage, Gateway, GatewayError, PromptError, PromptLibrary};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decompose::CommentUnit;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RepairPolicy {
    pub max_iterations: u32,
    /// A candidate equal to any of this many predecessors ends the loop.
    pub loop_window: usize,
    /// Apply the sequential-to-combinational rewrite before compiling in
    /// combinational designs.
    pub apply_combinational_rewrite: bool,
}

impl Default for RepairPolicy {
    fn default() -> Self {
        RepairPolicy { max_iterations: 5, loop_window: 2, apply_combinational_rewrite: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepairStatus {
    InProgress,
    Fixed,
    Exhausted,
    LoopDetected,
}

impl RepairStatus {
    pub fn is_terminal(self) -> bool {
        self != RepairStatus::InProgress
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    /// Assertion text as extracted from the model response.
    pub text: String,
    /// Text that was compiled: the rewritten form in combinational mode.
    pub compiled: Option<String>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Candidate {
    pub fn new(text: impl Into<String>) -> Candidate {
        Candidate { text: text.into(), compiled: None, diagnostics: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exchange {
    pub stage: String,
    pub prompt: Vec<ChatMessage>,
    pub response: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairSession {
    pub unit: CommentUnit,
    pub interface: ModuleInterface,
    pub candidates: Vec<Candidate>,
    pub iteration: u32,
    pub status: RepairStatus,
    #[serde(default)]
    pub transcript: Vec<Exchange>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl RepairSession {
    pub fn new(unit: CommentUnit, interface: ModuleInterface, initial: impl Into<String>) -> RepairSession {
        RepairSession {
            unit,
            interface,
            candidates: vec![Candidate::new(initial)],
            iteration: 0,
            status: RepairStatus::InProgress,
            transcript: Vec::new(),
            warnings: Vec::new(),
        }
    }

    /// The compiled text of the last candidate once the session is fixed.
    pub fn final_assertion(&self) -> Option<&str> {
        match self.status {
            RepairStatus::Fixed => self.candidates.last().and_then(|c| c.compiled.as_deref()),
            _ => None,
        }
    }

    /// True when the first candidate compiled without a repair round.
    pub fn initial_clean(&self) -> bool {
        self.candidates.first().is_some_and(|c| c.compiled.is_some() && c.diagnostics.is_empty())
    }
}

#[derive(Debug, Error)]
pub enum RepairError {
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
}

/// The first statement in `response` that starts with `assert`, optionally
/// labelled, up to its terminating semicolon. Further statements produce a
/// warning.
pub fn extract_assertion(response: &str) -> (String, Vec<String>) {
    let body = strip_fences(response);
    let starts = assert_starts(body);
    let mut warnings = Vec::new();
    let Some(&first) = starts.first() else {
        warnings.push("response contains no assert statement".to_string());
        return (body.trim().to_string(), warnings);
    };
    if starts.len() > 1 {
        warnings.push(format!("response contains {} assert statements; the first one is used", starts.len()));
    }
    let rest = &body[first..];
    let mut depth = 0i32;
    let mut end = rest.len();
    for (i, ch) in rest.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ';' if depth <= 0 => {
                end = i + 1;
                break;
            }
            _ => {}
        }
    }
    (rest[..end].trim().to_string(), warnings)
}

fn is_word(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '$'
}

/// Byte offsets of statements starting with `assert` or `label: assert`.
fn assert_starts(text: &str) -> Vec<usize> {
    let mut out = Vec::new();
    let mut from = 0;
    while let Some(k) = text[from..].find("assert") {
        let at = from + k;
        from = at + 6;
        let before_ok = !text[..at].chars().next_back().is_some_and(is_word);
        let after_ok = !text[at + 6..].chars().next().is_some_and(is_word);
        if !(before_ok && after_ok) {
            continue;
        }
        // include a preceding `label :`
        let head = text[..at].trim_end();
        let start = match head.strip_suffix(':') {
            Some(h) => {
                let h = h.trim_end();
                let label_start = h.char_indices().rev().take_while(|&(_, c)| is_word(c)).last().map(|(i, _)| i);
                match label_start {
                    Some(i)
                        if !h[i..].starts_with(|c: char| c.is_ascii_digit())
                            && h[..i].trim_end_matches([' ', '\t']).chars().next_back().map_or(true, |c| c == '\n' || c == ';') =>
                    {
                        i
                    }
                    _ => at,
                }
            }
            None => at,
        };
        out.push(start);
    }
    out
}

/// Compiles a candidate against `iface`, returning the compiled text and
/// its diagnostics.
pub fn compile(text: &str, iface: &ModuleInterface, policy: &RepairPolicy) -> (String, Vec<Diagnostic>) {
    let decl = match parse_assertion(text) {
        Ok(d) => d,
        Err(diags) => return (text.to_string(), diags),
    };
    let decl = if iface.mode == Mode::Combinational && policy.apply_combinational_rewrite {
        match to_combinational(&decl) {
            Ok(d) => d,
            Err(diag) => return (text.to_string(), vec![diag]),
        }
    } else {
        decl
    };
    let diags = resolve_names(&decl, iface);
    (decl.raw_text.clone(), diags)
}

fn normalized(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Sequential => "sequential",
        Mode::Combinational => "combinational",
    }
}

fn ask(
    gateway: &Gateway,
    prompts: &PromptLibrary,
    stage: &str,
    template: &str,
    bindings: &[(&str, &str)],
) -> Result<(String, Vec<String>, Exchange), RepairError> {
    let bindings: BTreeMap<String, String> = bindings.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    let prompt = prompts.render_prompt(template, &bindings)?;
    let response = gateway.chat(prompt.clone())?;
    let (text, warnings) = extract_assertion(&response);
    Ok((text, warnings, Exchange { stage: stage.to_string(), prompt, response }))
}

/// Asks for a first assertion from the unit's comment.
pub fn generate_initial(unit: &CommentUnit, gateway: &Gateway, prompts: &PromptLibrary) -> Result<(String, Vec<String>, Exchange), RepairError> {
    ask(gateway, prompts, "generate", "generate", &[("comment", &unit.rendered_comment)])
}

/// Rewrites an assertion so that it uses the RTL's signal names.
pub fn semantic_align(
    assertion: &str,
    rtl_source: &str,
    iface: &ModuleInterface,
    gateway: &Gateway,
    prompts: &PromptLibrary,
) -> Result<(String, Vec<String>, Exchange), RepairError> {
    let table = iface.signal_table();
    ask(
        gateway,
        prompts,
        "align",
        "align",
        &[("assertion", assertion), ("signal_table", &table), ("rtl_source", rtl_source)],
    )
}

/// Runs generation and alignment and opens a repair session.
pub fn start_session(
    unit: &CommentUnit,
    rtl_source: &str,
    iface: &ModuleInterface,
    gateway: &Gateway,
    prompts: &PromptLibrary,
) -> Result<RepairSession, RepairError> {
    let (generated, mut warnings, ex1) = generate_initial(unit, gateway, prompts)?;
    let (aligned, w2, ex2) = semantic_align(&generated, rtl_source, iface, gateway, prompts)?;
    warnings.extend(w2);
    let mut session = RepairSession::new(unit.clone(), iface.clone(), aligned);
    session.transcript = vec![ex1, ex2];
    session.warnings = warnings;
    Ok(session)
}

fn compile_last(session: &mut RepairSession, policy: &RepairPolicy) {
    let iface = &session.interface;
    let last = session.candidates.last_mut().expect("session has a candidate");
    if last.compiled.is_none() {
        let (compiled, diags) = compile(&last.text, iface, policy);
        last.compiled = Some(compiled);
        last.diagnostics = diags;
    }
}

/// Drives the session to a terminal status. A gateway failure leaves it
/// in progress, so the call can be repeated later.
pub fn run_repair(session: &mut RepairSession, policy: &RepairPolicy, gateway: &Gateway, prompts: &PromptLibrary) -> Result<RepairStatus, RepairError> {
    while !session.status.is_terminal() {
        compile_last(session, policy);
        let last = session.candidates.last().expect("session has a candidate");
        if last.diagnostics.is_empty() {
            session.status = RepairStatus::Fixed;
            break;
        }
        if session.iteration >= policy.max_iterations {
            session.status = RepairStatus::Exhausted;
            break;
        }
        let rendered = render_all(&last.diagnostics, &last.text);
        let table = session.interface.signal_table();
        let (text, warnings, exchange) = ask(
            gateway,
            prompts,
            "repair",
            "repair",
            &[
                ("assertion", &last.text),
                ("diagnostics", &rendered),
                ("signal_table", &table),
                ("mode", mode_name(session.interface.mode)),
            ],
        )?;
        session.transcript.push(exchange);
        session.warnings.extend(warnings);
        let key = normalized(&text);
        let n = session.candidates.len();
        let repeated = session.candidates[n.saturating_sub(policy.loop_window)..].iter().any(|c| normalized(&c.text) == key);
        session.candidates.push(Candidate::new(text));
        session.iteration += 1;
        if repeated {
            compile_last(session, policy);
            session.status = if session.candidates.last().is_some_and(|c| c.diagnostics.is_empty()) {
                RepairStatus::Fixed
            } else {
                RepairStatus::LoopDetected
            };
        }
    }
    Ok(session.status)
}
