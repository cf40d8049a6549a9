use std::path::PathBuf;

use assertgen_core::checker::{classify, BehavioralModel, ClassifyContext, StimulusPlan, Verdict};
use assertgen_core::rtl::{extract_interface, Direction, Mode, ModuleInterface, NameLists};

fn design(id: &str) -> (BehavioralModel, ModuleInterface) {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../designs").join(id);
    let rtl = std::fs::read_to_string(dir.join(format!("{id}.v"))).unwrap();
    let model = BehavioralModel::from_json(&std::fs::read_to_string(dir.join("model.json")).unwrap()).unwrap();
    (model, extract_interface(&rtl, &NameLists::default()).unwrap())
}

fn verdict(id: &str, text: &str) -> &'static str {
    let (m, i) = design(id);
    classify(text, &m, &i, &StimulusPlan::default()).unwrap().label()
}

#[test]
fn interfaces_match_models() {
    for id in ["counter", "fsm_1101", "mux2", "parity", "updown"] {
        let (m, i) = design(id);
        ClassifyContext::new(&m, &i, &StimulusPlan::default()).unwrap_or_else(|e| panic!("{id}: {e}"));
    }
}

#[test]
fn fsm_interface() {
    let (_, i) = design("fsm_1101");
    assert_eq!(i.mode, Mode::Sequential);
    assert_eq!(i.clock.as_deref(), Some("clk"));
    assert_eq!(i.reset.as_deref(), Some("reset"));
    let state = i.signal("state").unwrap();
    assert_eq!((state.direction, state.width), (Direction::Internal, 2));
    assert_eq!(i.parameter("S3"), Some(3));
    assert_eq!(design("parity").1.mode, Mode::Combinational);
}

#[test]
fn oracle_assertions() {
    let fc = "functionally_correct";
    let fi = "functionally_incorrect";
    assert_eq!(verdict("mux2", "assert ((!(sel)) || (y == b));"), fc);
    assert_eq!(verdict("mux2", "assert (y == a);"), fi);
    assert_eq!(verdict("parity", "assert (parity == (data[0] ^ data[1] ^ data[2] ^ data[3] ^ data[4] ^ data[5] ^ data[6] ^ data[7]));"), fc);
    assert_eq!(verdict("parity", "assert (data != 0 || !parity);"), fc);
    assert_eq!(verdict("parity", "assert (!(data[0]) || parity);"), fi);
    assert_eq!(verdict("counter", "assert property (@(posedge clk) count <= 9);"), fc);
    assert_eq!(verdict("counter", "assert property (@(posedge clk) enable && count == 9 |=> count == 0);"), fc);
    assert_eq!(verdict("counter", "assert property (@(posedge clk) enable && count == 9 |-> count == 0);"), fi);
    assert_eq!(verdict("fsm_1101", "assert property (@(posedge clk) state == S2 && !din |=> state == S3);"), fc);
    assert_eq!(verdict("fsm_1101", "assert property (@(posedge clk) state == S3 && din |=> dout);"), fc);
    assert_eq!(verdict("fsm_1101", "assert property (@(posedge clk) state == S3 && din |-> dout);"), fi);
    assert_eq!(verdict("updown", "assert property (@(posedge clk) en && !up |=> count == $past(count) - 1);"), fc);
    assert_eq!(verdict("updown", "assert property (@(posedge clk) !en |=> $stable(count));"), fc);
    assert_eq!(verdict("updown", "assert property (@(posedge clk) en |=> count == $past(count) + 1);"), fi);
}

#[test]
fn reset_is_held_inactive() {
    let (m, i) = design("updown");
    match classify("assert property (@(posedge clk) !rst_n |=> count == 0);", &m, &i, &StimulusPlan::default()).unwrap() {
        Verdict::FunctionallyCorrect { vacuous, .. } => assert!(vacuous),
        other => panic!("{other:?}"),
    }
}
