use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_assertgen"))
        .args(args)
        .current_dir(root())
        .env_remove("OPENAI_API_KEY")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn run_dir(o: &Output) -> PathBuf {
    let out = stdout(o);
    PathBuf::from(out.lines().find_map(|l| l.strip_prefix("run directory: ")).expect("run directory line").trim())
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// A config in `dir` pointing at the bundled designs, with overrides.
fn config(dir: &Path, edit: impl FnOnce(&mut Value)) -> PathBuf {
    let r = root();
    let mut c = json(&r.join("assertgen.json"));
    c["provider"]["replay"]["fixture_path"] = r.join("fixtures/bundled.jsonl").to_str().unwrap().into();
    c["provider"]["scripted"]["script_path"] = r.join("fixtures/scripts/bundled.json").to_str().unwrap().into();
    c["paths"]["designs_manifest"] = r.join("designs/manifest.json").to_str().unwrap().into();
    c["paths"]["output_dir"] = dir.join("out").to_str().unwrap().into();
    edit(&mut c);
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&c).unwrap()).unwrap();
    path
}

fn verdict_labels(dir: &Path, design: &str) -> Vec<String> {
    let v = json(&dir.join(design).join("verdicts.json"));
    v.as_array().unwrap().iter().map(|r| r["verdict"].as_str().unwrap().to_string()).collect()
}

#[test]
fn decompose_mux_matches_golden() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["--out", tmp.path().to_str().unwrap(), "decompose", "mux2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let got = std::fs::read_to_string(run_dir(&o).join("mux2/decomposition.json")).unwrap();
    let want = std::fs::read_to_string(root().join("golden/decompose/mux2.json")).unwrap();
    assert_eq!(got, want);
    let units: Value = serde_json::from_str(&got).unwrap();
    assert!(units["units"].as_array().unwrap().iter().any(|u| u["kind"] == "conditional"));
}

#[test]
fn replay_miss_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    let cfg = config(tmp.path(), |c| c["provider"]["replay"]["fixture_path"] = empty.to_str().unwrap().into());
    let o = run(&["--config", cfg.to_str().unwrap(), "decompose", "counter"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("replay"), "{}", stderr(&o));
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.json");
    let o = run(&["--config", missing.to_str().unwrap(), "pipeline", "--all"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    let cfg = config(tmp.path(), |c| c["provider"]["api_key"] = "sk-test".into());
    let o = run(&["--config", cfg.to_str().unwrap(), "pipeline", "--all"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    let o = run(&["--out", tmp.path().to_str().unwrap(), "pipeline", "no_such_design"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn dry_run_prints_prompts_without_gateway() {
    let tmp = tempfile::tempdir().unwrap();
    // a fixture file that could not answer anything
    let empty = tmp.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    let cfg = config(tmp.path(), |c| c["provider"]["replay"]["fixture_path"] = empty.to_str().unwrap().into());
    let o = run(&["--config", cfg.to_str().unwrap(), "--dry-run", "decompose", "fsm_1101"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("specify every conditional statement"));
    assert!(text.contains("The fsm_1101 module"));
    assert!(!tmp.path().join("out").exists(), "dry run created a run directory");
}

#[test]
fn empty_manifest_gives_zero_tally() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = tmp.path().join("manifest.json");
    std::fs::write(&manifest, "[]").unwrap();
    let cfg = config(tmp.path(), |c| c["paths"]["designs_manifest"] = manifest.to_str().unwrap().into());
    let o = run(&["--config", cfg.to_str().unwrap(), "pipeline", "--all"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let tally = json(&run_dir(&o).join("tally.json"));
    assert_eq!(tally["total"]["tally"]["generated"], 0);
    assert!(tally["designs"].as_object().unwrap().is_empty());
}

#[test]
fn max_iterations_flag_overrides_policy() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["--out", tmp.path().to_str().unwrap(), "--backend", "scripted", "--max-iterations", "1", "pipeline", "parity"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let dir = run_dir(&o);
    assert_eq!(json(&dir.join("manifest.json"))["config"]["repair"]["max_iterations"], 1);
    // the $countones unit needs two repair rounds, so one is not enough
    let s = json(&dir.join("parity/sessions/unit_00.json"));
    assert_eq!(s["status"], "exhausted");
    assert_eq!(s["iteration"], 1);
    assert_eq!(verdict_labels(&dir, "parity")[0], "syntax_error");
}

#[test]
fn replay_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let a = run_dir(&run(&["--out", out, "pipeline", "--all"]));
    let b = run_dir(&run(&["--out", out, "pipeline", "--all"]));
    assert_ne!(a, b);
    let files = |d: &Path| -> Vec<(PathBuf, Vec<u8>)> {
        let mut v: Vec<_> = walk(d).into_iter().map(|p| (p.strip_prefix(d).unwrap().to_path_buf(), std::fs::read(&p).unwrap())).collect();
        v.sort();
        v
    };
    let (fa, fb) = (files(&a), files(&b));
    assert!(fa.len() > 20);
    assert_eq!(fa, fb);
}

fn walk(d: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(d).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn score_verdicts_are_data() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let good = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/counter_known_good.sv");
    let o = run(&["--out", out, "score", "counter", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let labels = verdict_labels(&run_dir(&o), "counter");
    assert_eq!(labels.len(), 5);
    assert!(labels.iter().all(|l| l == "functionally_correct"), "{labels:?}");

    let bad = tmp.path().join("bad.sv");
    std::fs::write(&bad, "assert property (@(posedge clk) 1'b0);\nassert property (@(posedge clk) (count <= 9);\n").unwrap();
    let o = run(&["--out", out, "score", "counter", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(verdict_labels(&run_dir(&o), "counter"), ["functionally_incorrect", "syntax_error"]);
}

#[test]
fn emit_with_empty_manifest_writes_empty_jsonl() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    std::fs::create_dir(&corpus).unwrap();
    let o = run(&["--out", tmp.path().to_str().unwrap(), "dataset", "mine", corpus.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = run_dir(&o).join("mined_manifest.json");
    let o = run(&["--out", tmp.path().to_str().unwrap(), "dataset", "emit", m.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let dir = run_dir(&o);
    assert_eq!(std::fs::read(dir.join("dataset.jsonl")).unwrap(), b"");
    assert!(json(&dir.join("finetune_job.json")).is_object());
}

#[test]
fn report_reformats_a_run() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let dir = run_dir(&run(&["--out", out, "pipeline", "--all"]));
    let o = run(&["--out", out, "report", dir.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains(&std::fs::read_to_string(root().join("golden/pipeline/report.csv")).unwrap()));
}
