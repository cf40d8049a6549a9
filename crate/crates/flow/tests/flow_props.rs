use assertgen_core::rtl::{Direction, Mode, ModuleInterface, SignalDecl};
use assertgen_flow::decompose::{expected_unit_count, fan_out, CommentUnit, UnitPayload};
use assertgen_flow::repair::{run_repair, RepairPolicy, RepairSession, RepairStatus};
use assertgen_llm::{Gateway, PromptLibrary, ScriptedBackend};
use proptest::prelude::*;
use serde_json::{json, Value};

fn answers() -> impl Strategy<Value = (Value, Value, Value)> {
    let a = prop::collection::vec((0usize..4, 0usize..3), 0..3).prop_map(|fsms| {
        Value::Array(
            fsms.into_iter()
                .map(|(t, o)| {
                    json!({
                        "states": ["S0"],
                        "transitions": (0..t).map(|i| json!({"current_state": format!("S{i}"), "conditions": "x", "next_state_condition_true": "S0", "next_state_condition_false": ""})).collect::<Vec<_>>(),
                        "outputs": (0..o).map(|_| json!({"current_state": "S0", "output_name": "y", "conditions": "", "output_value_condition_true": "1", "output_value_condition_false": "0"})).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )
    });
    let b = (0usize..5).prop_map(|n| Value::Array((0..n).map(|i| json!({"antecedent": format!("a{i}"), "consequent": "b"})).collect()));
    let c = prop::collection::vec(0usize..4, 0..4).prop_map(|vars| {
        Value::Array(
            vars.into_iter()
                .map(|k| json!({"variable_name": "v", "condition_list": (0..k).map(|_| json!({"condition": "", "range_or_value": "0 to 3"})).collect::<Vec<_>>()}))
                .collect(),
        )
    });
    (a, b, c)
}

proptest! {
    #[test]
    fn fan_out_count_matches_answers((a, b, c) in answers()) {
        let units = fan_out(&a, &b, &c);
        prop_assert_eq!(units.len(), expected_unit_count(&a, &b, &c));
        // A, then B, then C
        let order: Vec<char> = units.iter().map(|u| u.source_question).collect();
        let mut sorted = order.clone();
        sorted.sort();
        prop_assert_eq!(order, sorted);
    }

    #[test]
    fn repair_terminates(script in prop::collection::vec(0usize..4, 0..8), max in 0u32..6) {
        let pool = ["assert (x);", "assert (q);", "assert (q == 1;", "assert (p);"];
        let unit = CommentUnit::new('B', UnitPayload::Conditional { antecedent: "p".into(), consequent: "q".into() });
        let iface = ModuleInterface {
            module_name: "m".into(),
            signals: vec![SignalDecl::new("q", Direction::Input, 0, 0)],
            clock: None,
            reset: None,
            mode: Mode::Combinational,
            parameters: vec![],
        };
        let responses: Vec<&str> = script.iter().map(|&i| pool[i]).collect();
        let gw = Gateway::new(Box::new(ScriptedBackend::sequence(responses.clone())), 1);
        let policy = RepairPolicy { max_iterations: max, ..RepairPolicy::default() };
        let mut s = RepairSession::new(unit, iface, "assert (p);");
        match run_repair(&mut s, &policy, &gw, &PromptLibrary::bundled()) {
            Ok(status) => {
                prop_assert!(status.is_terminal());
                prop_assert!(s.iteration <= max);
                let last = s.candidates.last().unwrap();
                prop_assert_eq!(status == RepairStatus::Fixed, last.diagnostics.is_empty());
            }
            Err(_) => {
                // script ran out before a terminal state
                prop_assert_eq!(s.status, RepairStatus::InProgress);
                prop_assert_eq!(s.iteration as usize, responses.len());
            }
        }
        prop_assert_eq!(s.iteration as usize + 1, s.candidates.len());
    }
}
