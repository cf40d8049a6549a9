//! Questions A/B/C over a specification and fan-out of the answers into
//! one comment unit per transition, output, conditional and variable
//! condition.

use std::collections::BTreeMap;

use assertgen_llm::{validate_json_response, ChatMessage, Gateway, GatewayError, PromptError, PromptLibrary, SchemaId, ValidationError};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

/// Payload fields carry the answer field names unchanged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum UnitPayload {
    FsmTransition {
        current_state: String,
        conditions: String,
        next_state_condition_true: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        next_state_condition_false: Option<String>,
    },
    FsmOutput {
        current_state: String,
        output_name: String,
        conditions: String,
        output_value_condition_true: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        output_value_condition_false: Option<String>,
    },
    Conditional {
        antecedent: String,
        consequent: String,
    },
    VariableRange {
        variable_name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        condition: Option<String>,
        range_or_value: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommentUnit {
    pub source_question: char,
    #[serde(flatten)]
    pub payload: UnitPayload,
    pub rendered_comment: String,
}

impl CommentUnit {
    pub fn new(source_question: char, payload: UnitPayload) -> CommentUnit {
        let rendered_comment = render_comment(&payload);
        CommentUnit { source_question, payload, rendered_comment }
    }

    pub fn kind(&self) -> &'static str {
        match self.payload {
            UnitPayload::FsmTransition { .. } => "fsm_transition",
            UnitPayload::FsmOutput { .. } => "fsm_output",
            UnitPayload::Conditional { .. } => "conditional",
            UnitPayload::VariableRange { .. } => "variable_range",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionResult {
    pub spec_id: String,
    pub units: Vec<CommentUnit>,
    /// Validated, normalized answers keyed by question letter.
    pub raw_answers: BTreeMap<char, Value>,
}

#[derive(Debug, Error)]
pub enum DecomposeError {
    #[error("specification text is empty")]
    EmptySpec,
    #[error("question {question}: {source}")]
    Gateway { question: char, source: GatewayError },
    #[error("question {question}: answer still invalid after one re-ask: {source}")]
    Validation { question: char, source: ValidationError },
    #[error(transparent)]
    Prompt(#[from] PromptError),
}

impl DecomposeError {
    pub fn is_gateway(&self) -> bool {
        matches!(self, DecomposeError::Gateway { .. })
    }
}

fn clean(s: &str) -> String {
    s.trim().trim_end_matches('.').trim().to_string()
}

fn non_empty(s: &str) -> Option<String> {
    let s = clean(s);
    (!s.is_empty()).then_some(s)
}

/// One English sentence describing a unit.
pub fn render_comment(p: &UnitPayload) -> String {
    match p {
        UnitPayload::FsmTransition { current_state, conditions, next_state_condition_true, next_state_condition_false } => {
            let mut s = format!("When in state {}", clean(current_state));
            if let Some(c) = non_empty(conditions) {
                s.push_str(&format!(", if {c}"));
            }
            s.push_str(&format!(", the FSM moves to {}", clean(next_state_condition_true)));
            if let Some(f) = next_state_condition_false.as_deref().and_then(non_empty) {
                s.push_str(&format!("; otherwise it moves to {f}"));
            }
            s + "."
        }
        UnitPayload::FsmOutput { current_state, output_name, conditions, output_value_condition_true, output_value_condition_false } => {
            let mut clauses = Vec::new();
            if let Some(st) = non_empty(current_state) {
                clauses.push(format!("When in state {st}"));
            }
            if let Some(c) = non_empty(conditions) {
                clauses.push(format!("if {c}"));
            }
            let main = format!("output {} is {}", clean(output_name), clean(output_value_condition_true));
            let mut s = if clauses.is_empty() {
                let mut m = main;
                m[..1].make_ascii_uppercase();
                m
            } else {
                format!("{}, {main}", clauses.join(", "))
            };
            if let Some(f) = output_value_condition_false.as_deref().and_then(non_empty) {
                s.push_str(&format!("; otherwise it is {f}"));
            }
            s + "."
        }
        UnitPayload::Conditional { antecedent, consequent } => {
            format!("If {}, then {}.", clean(antecedent), clean(consequent))
        }
        UnitPayload::VariableRange { variable_name, condition, range_or_value } => match condition.as_deref().and_then(non_empty) {
            None => format!("The variable {} always stays in the range {}.", clean(variable_name), clean(range_or_value)),
            Some(c) => format!("When {c}, the variable {} stays in the range {}.", clean(variable_name), clean(range_or_value)),
        },
    }
}

fn text(v: &Value, key: &str) -> String {
    v.get(key).and_then(Value::as_str).unwrap_or_default().to_string()
}

fn items<'a>(v: &'a Value, key: &str) -> &'a [Value] {
    v.get(key).and_then(Value::as_array).map_or(&[], Vec::as_slice)
}

/// Pure fan-out of three validated answers, ordered A-transitions,
/// A-outputs, B, C.
pub fn fan_out(a: &Value, b: &Value, c: &Value) -> Vec<CommentUnit> {
    let empty = Vec::new();
    let fsms = a.as_array().unwrap_or(&empty);
    let mut units = Vec::new();
    for fsm in fsms {
        for t in items(fsm, "transitions") {
            units.push(CommentUnit::new(
                'A',
                UnitPayload::FsmTransition {
                    current_state: text(t, "current_state"),
                    conditions: text(t, "conditions"),
                    next_state_condition_true: text(t, "next_state_condition_true"),
                    next_state_condition_false: non_empty(&text(t, "next_state_condition_false")),
                },
            ));
        }
    }
    for fsm in fsms {
        for o in items(fsm, "outputs") {
            units.push(CommentUnit::new(
                'A',
                UnitPayload::FsmOutput {
                    current_state: text(o, "current_state"),
                    output_name: text(o, "output_name"),
                    conditions: text(o, "conditions"),
                    output_value_condition_true: text(o, "output_value_condition_true"),
                    output_value_condition_false: non_empty(&text(o, "output_value_condition_false")),
                },
            ));
        }
    }
    for cond in b.as_array().unwrap_or(&empty) {
        units.push(CommentUnit::new(
            'B',
            UnitPayload::Conditional { antecedent: text(cond, "antecedent"), consequent: text(cond, "consequent") },
        ));
    }
    for var in c.as_array().unwrap_or(&empty) {
        for entry in items(var, "condition_list") {
            units.push(CommentUnit::new(
                'C',
                UnitPayload::VariableRange {
                    variable_name: text(var, "variable_name"),
                    condition: non_empty(&text(entry, "condition")),
                    range_or_value: text(entry, "range_or_value"),
                },
            ));
        }
    }
    units
}

/// The unit count the answers must produce.
pub fn expected_unit_count(a: &Value, b: &Value, c: &Value) -> usize {
    let len = |v: &Value| v.as_array().map_or(0, Vec::len);
    let fsm: usize = a
        .as_array()
        .map_or(0, |fs| fs.iter().map(|f| items(f, "transitions").len() + items(f, "outputs").len()).sum());
    let vars: usize = c.as_array().map_or(0, |vs| vs.iter().map(|v| items(v, "condition_list").len()).sum());
    fsm + len(b) + vars
}

/// Rendered question prompts, in A, B, C order.
pub fn question_prompts(prompts: &PromptLibrary, spec_text: &str) -> Result<Vec<(SchemaId, Vec<ChatMessage>)>, PromptError> {
    let bindings = BTreeMap::from([("spec_text".to_string(), spec_text.to_string())]);
    SchemaId::ALL
        .iter()
        .map(|&q| Ok((q, prompts.render_prompt(q.template_id(), &bindings)?)))
        .collect()
}

fn ask(gateway: &Gateway, prompts: &PromptLibrary, q: SchemaId, messages: Vec<ChatMessage>) -> Result<Value, DecomposeError> {
    let gw = |source| DecomposeError::Gateway { question: q.letter(), source };
    let first = gateway.chat(messages.clone()).map_err(gw)?;
    let error = match validate_json_response(q, &first) {
        Ok(v) => return Ok(v),
        Err(e) => e,
    };
    let mut retry = messages;
    retry.push(ChatMessage::assistant(first));
    let bindings = BTreeMap::from([("error".to_string(), error.to_string())]);
    retry.extend(prompts.render_prompt("reask", &bindings)?);
    let second = gateway.chat(retry).map_err(gw)?;
    validate_json_response(q, &second).map_err(|source| DecomposeError::Validation { question: q.letter(), source })
}

pub fn decompose(spec_id: &str, spec_text: &str, gateway: &Gateway, prompts: &PromptLibrary) -> Result<DecompositionResult, DecomposeError> {
    if spec_text.trim().is_empty() {
        return Err(DecomposeError::EmptySpec);
    }
    let questions = question_prompts(prompts, spec_text)?;
    let answers: Vec<Result<Value, DecomposeError>> = std::thread::scope(|s| {
        let handles: Vec<_> = questions
            .into_iter()
            .map(|(q, messages)| s.spawn(move || ask(gateway, prompts, q, messages)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("question thread")).collect()
    });
    let mut raw_answers = BTreeMap::new();
    for (q, answer) in SchemaId::ALL.iter().zip(answers) {
        raw_answers.insert(q.letter(), answer?);
    }
    let units = fan_out(&raw_answers[&'A'], &raw_answers[&'B'], &raw_answers[&'C']);
    Ok(DecompositionResult { spec_id: spec_id.to_string(), units, raw_answers })
}
