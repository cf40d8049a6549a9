use serde::{Deserialize, Serialize};

use super::bounded::{check_on_trace, CheckOutcome};
use super::model::{simulate, BehavioralModel, ModelError};
use super::stimulus::{StimulusPlan, StimulusSource};
use super::trace::Trace;
use super::CheckError;
use crate::rtl::{resolve_names, ModuleInterface};
use crate::sva::{parse_assertion, Diagnostic};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    SyntaxError { diagnostics: Vec<Diagnostic> },
    FunctionallyIncorrect { counterexample: Trace, violation_cycle: usize },
    FunctionallyCorrect { vacuous: bool, traces_checked: u64 },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::SyntaxError { .. } => "syntax_error",
            Verdict::FunctionallyIncorrect { .. } => "functionally_incorrect",
            Verdict::FunctionallyCorrect { .. } => "functionally_correct",
        }
    }
}

/// A model, its interface and a plan, checked for consistency once and
/// reused across assertions.
#[derive(Debug, Clone)]
pub struct ClassifyContext<'a> {
    pub model: &'a BehavioralModel,
    pub iface: &'a ModuleInterface,
    pub stimulus: StimulusSource,
}

impl<'a> ClassifyContext<'a> {
    pub fn new(model: &'a BehavioralModel, iface: &'a ModuleInterface, plan: &StimulusPlan) -> Result<Self, CheckError> {
        let names: Vec<&str> = model.signal_names().collect();
        for s in &iface.signals {
            if iface.clock.as_deref() == Some(s.name.as_str()) {
                continue;
            }
            if !names.contains(&s.name.as_str()) {
                return Err(CheckError::Model(ModelError::Invalid {
                    model: model.name.clone(),
                    detail: format!("interface signal '{}' of '{}' is not modeled", s.name, iface.module_name),
                }));
            }
        }
        if model.mode != iface.mode {
            return Err(CheckError::Model(ModelError::Invalid {
                model: model.name.clone(),
                detail: format!("model mode {:?} differs from interface mode {:?}", model.mode, iface.mode),
            }));
        }
        let stimulus = StimulusSource::new(plan, model, iface.reset.as_deref())?;
        Ok(ClassifyContext { model, iface, stimulus })
    }

    pub fn classify(&self, decl_text: &str) -> Result<Verdict, CheckError> {
        let decl = match parse_assertion(decl_text) {
            Ok(d) => d,
            Err(diagnostics) => return Ok(Verdict::SyntaxError { diagnostics }),
        };
        let diagnostics = resolve_names(&decl, self.iface);
        if !diagnostics.is_empty() {
            return Ok(Verdict::SyntaxError { diagnostics });
        }
        let mut vacuous = true;
        let mut checked = 0u64;
        for inputs in self.stimulus.sequences() {
            let mut trace = simulate(self.model, &inputs)?;
            for (name, value) in &self.iface.parameters {
                trace.constants.entry(name.clone()).or_insert(*value);
            }
            if let Some(clk) = &self.iface.clock {
                // the clock reads as high at its sampling edge
                trace.constants.entry(clk.clone()).or_insert(1);
            }
            checked += 1;
            match check_on_trace(&decl, &trace)? {
                CheckOutcome::ViolatedAt(cycle) => {
                    return Ok(Verdict::FunctionallyIncorrect { counterexample: trace, violation_cycle: cycle })
                }
                CheckOutcome::Holds { vacuous: v } => vacuous &= v,
            }
        }
        Ok(Verdict::FunctionallyCorrect { vacuous, traces_checked: checked })
    }
}

/// One-shot form of [`ClassifyContext::classify`].
pub fn classify(
    decl_text: &str,
    model: &BehavioralModel,
    iface: &ModuleInterface,
    plan: &StimulusPlan,
) -> Result<Verdict, CheckError> {
    ClassifyContext::new(model, iface, plan)?.classify(decl_text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rtl::{extract_interface, NameLists};
    use crate::sva::codes;

    const COUNTER_V: &str = "module decade(input clk, input reset, input enable, output reg [3:0] count);\nendmodule";
    const COUNTER: &str = r#"{"name":"decade","inputs":[{"name":"reset","width":1},{"name":"enable","width":1}],
        "state_vars":[{"name":"count","width":4,"init":0}],
        "next_state":{"count":"(4'd0 - !(reset || (enable && count == 9))) & (count + enable)"},
        "outputs":{},"mode":"sequential"}"#;

    fn setup() -> (BehavioralModel, ModuleInterface) {
        (BehavioralModel::from_json(COUNTER).unwrap(), extract_interface(COUNTER_V, &NameLists::default()).unwrap())
    }

    #[test]
    fn three_verdicts() {
        let (m, i) = setup();
        let plan = StimulusPlan::default();
        let v = classify("assert property (@(posedge clk) count <= 9);", &m, &i, &plan).unwrap();
        assert!(matches!(v, Verdict::FunctionallyCorrect { vacuous: false, .. }), "{v:?}");

        let v = classify("assert property (@(posedge clk) 1'b0);", &m, &i, &plan).unwrap();
        assert!(matches!(v, Verdict::FunctionallyIncorrect { violation_cycle: 0, .. }));

        let v = classify("assert property (@(posedge clk) (count <= 9);", &m, &i, &plan).unwrap();
        match v {
            Verdict::SyntaxError { diagnostics } => assert_eq!(diagnostics[0].code, codes::UNBALANCED_PAREN),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn counterexample_reproduces() {
        let (m, i) = setup();
        let text = "assert property (@(posedge clk) enable |=> count == $past(count) + 1);";
        let Verdict::FunctionallyIncorrect { counterexample, violation_cycle } =
            classify(text, &m, &i, &StimulusPlan::default()).unwrap()
        else {
            panic!("wrap from 9 to 0 should falsify this");
        };
        let decl = parse_assertion(text).unwrap();
        assert_eq!(check_on_trace(&decl, &counterexample).unwrap(), CheckOutcome::ViolatedAt(violation_cycle));
        assert!(counterexample.len() <= 20);
    }

    #[test]
    fn unmodeled_interface_signal_is_a_config_error() {
        let (m, _) = setup();
        let i = extract_interface("module decade(input clk, input reset, input enable, output [3:0] count, output tc); endmodule", &NameLists::default()).unwrap();
        assert!(ClassifyContext::new(&m, &i, &StimulusPlan::default()).is_err());
    }
}
