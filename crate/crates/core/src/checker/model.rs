use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::trace::Trace;
use crate::eval::{eval_expr, Binding, EvalError};
use crate::rtl::Mode;
use crate::sva::{parse_bool_expr, render_all, BoolExpr};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortSpec {
    pub name: String,
    pub width: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub name: String,
    pub width: u32,
    pub init: u64,
}

/// Executable stand-in for a design's golden RTL.
///
/// Expressions are stored as text in the boolean grammar and parsed on
/// load. State updates happen at every clock edge, outputs are
/// combinational functions of the current inputs and state.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BehavioralModel {
    pub name: String,
    pub inputs: Vec<PortSpec>,
    #[serde(default)]
    pub state_vars: Vec<StateSpec>,
    #[serde(default)]
    pub next_state: IndexMap<String, String>,
    pub outputs: IndexMap<String, String>,
    pub mode: Mode,
    /// Named constants visible to model and assertion expressions.
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub constants: IndexMap<String, u64>,
    #[serde(skip)]
    parsed: Parsed,
}

#[derive(Debug, Clone, Default)]
struct Parsed {
    next: Vec<BoolExpr>,
    outputs: Vec<BoolExpr>,
    output_widths: Vec<u32>,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("model '{model}': expression for '{target}' does not parse:\n{detail}")]
    Expr { model: String, target: String, detail: String },
    #[error("model '{model}': {detail}")]
    Invalid { model: String, detail: String },
    #[error("model '{model}' cycle {cycle}: {source}")]
    Eval { model: String, cycle: usize, source: EvalError },
}

impl BehavioralModel {
    pub fn from_json(text: &str) -> Result<BehavioralModel, ModelError> {
        let model: BehavioralModel = serde_json::from_str(text)?;
        model.validated()
    }

    /// Parses expressions and checks the structural invariants.
    pub fn validated(mut self) -> Result<BehavioralModel, ModelError> {
        let invalid = |detail: String| ModelError::Invalid { model: self.name.clone(), detail };
        if self.mode == Mode::Combinational && !self.state_vars.is_empty() {
            return Err(invalid("combinational models cannot have state variables".into()));
        }
        let mut declared: IndexMap<&str, u32> = IndexMap::new();
        for (name, width) in self
            .inputs
            .iter()
            .map(|p| (p.name.as_str(), p.width))
            .chain(self.state_vars.iter().map(|s| (s.name.as_str(), s.width)))
        {
            if !(1..=32).contains(&width) {
                return Err(invalid(format!("'{name}' has width {width}; widths must be 1..=32")));
            }
            if declared.insert(name, width).is_some() {
                return Err(invalid(format!("'{name}' is declared twice")));
            }
        }
        for s in &self.state_vars {
            if s.init > crate::eval::mask(s.width) {
                return Err(invalid(format!("init value of '{}' does not fit {} bits", s.name, s.width)));
            }
            if !self.next_state.contains_key(&s.name) {
                return Err(invalid(format!("state variable '{}' has no next_state expression", s.name)));
            }
        }
        if let Some(extra) = self.next_state.keys().find(|k| !self.state_vars.iter().any(|s| &s.name == *k)) {
            return Err(invalid(format!("next_state entry '{extra}' is not a state variable")));
        }

        let parse = |target: &str, text: &str| -> Result<BoolExpr, ModelError> {
            let e = parse_bool_expr(text).map_err(|d| ModelError::Expr {
                model: self.name.clone(),
                target: target.to_string(),
                detail: render_all(&d, text),
            })?;
            let mut problem = None;
            e.walk(&mut |n| match n {
                BoolExpr::Ident { name, .. }
                    if !declared.contains_key(name.as_str()) && !self.constants.contains_key(name) =>
                {
                    problem.get_or_insert(format!("expression for '{target}' references undeclared '{name}'"));
                }
                BoolExpr::SystemCall { .. } => {
                    problem.get_or_insert(format!("expression for '{target}' uses a sampled-value function"));
                }
                _ => {}
            });
            match problem {
                Some(detail) => Err(ModelError::Invalid { model: self.name.clone(), detail }),
                None => Ok(e),
            }
        };
        let mut parsed = Parsed::default();
        for s in &self.state_vars {
            parsed.next.push(parse(&s.name, &self.next_state[&s.name])?);
        }
        for (name, text) in &self.outputs {
            if declared.contains_key(name.as_str()) {
                return Err(invalid(format!("output '{name}' collides with an input or state variable")));
            }
            parsed.outputs.push(parse(name, text)?);
        }
        // outputs are sized by evaluating at all-zero inputs and state
        let zero = |n: &str| {
            declared
                .get(n)
                .map(|&w| Binding::new(0, w))
                .or_else(|| self.constants.get(n).map(|&v| Binding::new(v, crate::eval::min_width(v))))
        };
        for e in &parsed.outputs {
            let w = eval_expr(e, &zero).map(|v| v.width).unwrap_or(1);
            parsed.output_widths.push(w);
        }
        self.parsed = parsed;
        Ok(self)
    }

    pub fn input_bits(&self) -> u32 {
        self.inputs.iter().map(|p| p.width).sum()
    }

    /// Every signal name a trace of this model carries.
    pub fn signal_names(&self) -> impl Iterator<Item = &str> {
        self.inputs
            .iter()
            .map(|p| p.name.as_str())
            .chain(self.state_vars.iter().map(|s| s.name.as_str()))
            .chain(self.outputs.keys().map(String::as_str))
    }

    fn ensure_parsed(&self) -> Result<(), ModelError> {
        if self.parsed.next.len() != self.state_vars.len() || self.parsed.outputs.len() != self.outputs.len() {
            return Err(ModelError::Invalid {
                model: self.name.clone(),
                detail: "model was not validated; construct it with from_json or validated()".into(),
            });
        }
        Ok(())
    }
}

/// Runs `model` on `inputs` (one row per cycle, values in input order).
pub fn simulate(model: &BehavioralModel, inputs: &[Vec<u64>]) -> Result<Trace, ModelError> {
    model.ensure_parsed()?;
    let mut trace = Trace::new();
    for p in &model.inputs {
        trace.add_column(&p.name, p.width);
    }
    for s in &model.state_vars {
        trace.add_column(&s.name, s.width);
    }
    for (name, &w) in model.outputs.keys().zip(&model.parsed.output_widths) {
        trace.add_column(name, w);
    }
    trace.constants = model.constants.clone();

    let mut state: Vec<u64> = model.state_vars.iter().map(|s| s.init).collect();
    for (cycle, row) in inputs.iter().enumerate() {
        if row.len() != model.inputs.len() {
            return Err(ModelError::Invalid {
                model: model.name.clone(),
                detail: format!("cycle {cycle} assigns {} of {} inputs", row.len(), model.inputs.len()),
            });
        }
        let lookup = |n: &str| -> Option<Binding> {
            if let Some(i) = model.inputs.iter().position(|p| p.name == n) {
                return Some(Binding::new(row[i], model.inputs[i].width));
            }
            if let Some(i) = model.state_vars.iter().position(|s| s.name == n) {
                return Some(Binding::new(state[i], model.state_vars[i].width));
            }
            model.constants.get(n).map(|&v| Binding::new(v, crate::eval::min_width(v)))
        };
        let err = |source| ModelError::Eval { model: model.name.clone(), cycle, source };
        let mut values: Vec<u64> = row.iter().zip(&model.inputs).map(|(&v, p)| v & crate::eval::mask(p.width)).collect();
        values.extend(&state);
        for (e, &w) in model.parsed.outputs.iter().zip(&model.parsed.output_widths) {
            values.push(eval_expr(e, &lookup).map_err(err)?.bits & crate::eval::mask(w));
        }
        let mut next = Vec::with_capacity(state.len());
        for (e, s) in model.parsed.next.iter().zip(&model.state_vars) {
            next.push(eval_expr(e, &lookup).map_err(err)?.bits & crate::eval::mask(s.width));
        }
        trace.push_row(&values);
        state = next;
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_models() {
        // the boolean grammar has no ternary
        let ternary = r#"{"name":"m","inputs":[{"name":"a","width":1}],"outputs":{"y":"a ? 1 : 0"},"mode":"combinational"}"#;
        assert!(matches!(BehavioralModel::from_json(ternary), Err(ModelError::Expr { .. })));
        let undeclared = r#"{"name":"m","inputs":[{"name":"a","width":1}],"outputs":{"y":"a & b"},"mode":"combinational"}"#;
        assert!(matches!(BehavioralModel::from_json(undeclared), Err(ModelError::Invalid { .. })));
        let comb_state = r#"{"name":"m","inputs":[],"state_vars":[{"name":"s","width":1,"init":0}],
            "next_state":{"s":"s"},"outputs":{},"mode":"combinational"}"#;
        assert!(BehavioralModel::from_json(comb_state).is_err());
        let wide = r#"{"name":"m","inputs":[{"name":"a","width":33}],"outputs":{},"mode":"combinational"}"#;
        assert!(BehavioralModel::from_json(wide).is_err());
    }

    #[test]
    fn counter_fixed_point_on_zero_inputs() {
        let m = BehavioralModel::from_json(
            r#"{"name":"cnt","inputs":[{"name":"enable","width":1}],
                "state_vars":[{"name":"count","width":4,"init":0}],
                "next_state":{"count":"count + enable"},
                "outputs":{"zero":"count == 0"},"mode":"sequential"}"#,
        )
        .unwrap();
        let t = simulate(&m, &vec![vec![0]; 6]).unwrap();
        assert_eq!(t.column("count").unwrap(), &[0; 6]);
        let t = simulate(&m, &vec![vec![1]; 18]).unwrap();
        assert_eq!(t.column("count").unwrap()[16], 0);
        assert_eq!(t.column("zero").unwrap()[16], 1);
    }

    #[test]
    fn combinational_single_cycle() {
        let m = BehavioralModel::from_json(
            r#"{"name":"mux","inputs":[{"name":"a","width":1},{"name":"b","width":1},{"name":"sel","width":1}],
                "outputs":{"y":"(sel && b) || (!sel && a)"},"mode":"combinational"}"#,
        )
        .unwrap();
        let t = simulate(&m, &[vec![1, 0, 0]]).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.column("y").unwrap(), &[1]);
    }
}
