//! `assertgen`: spec-to-assertion generation with compiler-feedback
//! repair, bounded functional scoring, FPV script emission and
//! fine-tuning dataset construction.
//!
//! Exit codes: 0 success, 2 configuration error, 3 gateway or replay
//! error, 4 some designs failed.

mod config;
mod pipeline;
mod rundir;

// stdout may be a closed pipe (`assertgen report ... | head`); drop output
// instead of panicking
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout().lock(), $($t)*);
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use assertgen_core::checker::{ClassifyContext, Verdict};
use assertgen_core::scoreboard::{aggregate_with_designs, emit_report, emit_tcl, parse_json_report, ReportFormat, Scoreboard, TclRequest};
use assertgen_flow::dataset::{emit_finetune_jsonl, filter_pairs, mine_pairs, synthesize_pairs, DatasetManifest, Embedder};
use assertgen_flow::decompose::{decompose, question_prompts};
use assertgen_llm::{BackendKind, FineTuneJobDescriptor, Gateway, PromptLibrary, Recorder};
use clap::{Parser, Subcommand};
use rayon::prelude::*;

use config::{config_hash, DatasetSettings, Loaded, DEFAULT_CONFIG};
use pipeline::{split_statements, score_statements, write_decomposition, DesignInputs, Flow};
use rundir::{coded, exit, exit_code, to_json, RunDir, RunManifest};

#[derive(Parser)]
#[command(name = "assertgen", version, about = "Generate, repair and score SystemVerilog assertions from specifications")]
struct Cli {
    /// Run configuration (JSON). Defaults to ./assertgen.json.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the configured LLM backend.
    #[arg(long, global = true)]
    backend: Option<BackendKind>,
    /// Append every LLM exchange to this fixture file.
    #[arg(long, global = true)]
    record: Option<PathBuf>,
    /// Override the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the stimulus seed (and the synthesis seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the repair iteration cap.
    #[arg(long, global = true)]
    max_iterations: Option<u32>,
    /// Print rendered prompts instead of calling the model.
    #[arg(long, global = true)]
    dry_run: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ask the three spec questions and write the comment units.
    Decompose { design: String },
    /// Full flow for one design or all of them.
    Pipeline {
        design: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// Fine-tuning dataset construction.
    Dataset {
        #[command(subcommand)]
        command: DatasetCommand,
    },
    /// Classify a file of assertions against a design's golden model.
    Score { design: String, assertions: PathBuf },
    /// Emit the FPV setup script for a design.
    Tcl {
        design: String,
        /// Assertion files to analyze, as they should appear in the script.
        #[arg(long = "assertions")]
        assertions: Vec<String>,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Re-render a JSON report (file or run directory) in another format.
    Report {
        path: PathBuf,
        #[arg(long, default_value = "markdown")]
        format: ReportFormat,
    },
}

#[derive(Subcommand)]
enum DatasetCommand {
    /// Mine comment/assertion pairs from a corpus and filter them.
    Mine { corpus: PathBuf },
    /// Generate templated synthetic pairs.
    Synth {
        #[arg(long, default_value_t = 500)]
        n: usize,
        /// Comma-separated signal names; the configured vocabulary otherwise.
        #[arg(long)]
        vocab: Option<String>,
    },
    /// Write the JSONL dataset and job descriptor from one or more manifests.
    Emit {
        manifests: Vec<PathBuf>,
        #[arg(long)]
        system_message: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match &cli.command {
        Command::Report { path, format } => cmd_report(path, *format),
        Command::Dataset { command } => cmd_dataset(&cli, command),
        Command::Decompose { design } => cmd_decompose(&cli, design),
        Command::Pipeline { design, all } => cmd_pipeline(&cli, design.as_deref(), *all),
        Command::Score { design, assertions } => cmd_score(&cli, design, assertions),
        Command::Tcl { design, assertions, horizon } => cmd_tcl(&cli, design, assertions, *horizon),
    }
}

// ---------------------------------------------------------------------------
// Shared setup

fn config_path(cli: &Cli) -> PathBuf {
    cli.config.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_CONFIG))
}

/// Loads the config and applies command-line overrides.
fn load_config(cli: &Cli) -> Result<Loaded> {
    let mut loaded = Loaded::read(&config_path(cli)).map_err(|e| coded(exit::CONFIG, e))?;
    let c = &mut loaded.config;
    if let Some(b) = cli.backend {
        c.provider.backend = b;
    }
    if let Some(out) = &cli.out {
        // relative to the working directory, not the config file
        c.paths.output_dir = std::path::absolute(out).map_err(|e| coded(exit::CONFIG, e))?;
    }
    if let Some(seed) = cli.seed {
        c.stimulus.seed = seed;
    }
    if let Some(n) = cli.max_iterations {
        c.repair.max_iterations = n;
    }
    loaded.validate().map_err(|e| coded(exit::CONFIG, e))?;
    Ok(loaded)
}

fn prompts(loaded: &Loaded) -> Result<PromptLibrary> {
    match &loaded.config.paths.prompts_dir {
        Some(d) => PromptLibrary::load_dir(&loaded.resolve(d)).map_err(|e| coded(exit::CONFIG, e)),
        None => Ok(PromptLibrary::bundled()),
    }
}

fn gateway(cli: &Cli, loaded: &Loaded) -> Result<Gateway> {
    Gateway::from_config(&loaded.config.provider, &loaded.base_dir, cli.record.as_deref()).map_err(|e| coded(exit::CONFIG, e))
}

/// Sorts and deduplicates the recorded fixture file, if any.
fn finish_recording(cli: &Cli) -> Result<()> {
    if let Some(p) = &cli.record {
        let n = Recorder::<Box<dyn assertgen_llm::Backend>>::normalize(p).map_err(|e| coded(exit::GATEWAY, e))?;
        eprintln!("recorded {n} exchanges in {}", p.display());
    }
    Ok(())
}

fn open_run(loaded: &Loaded, command: &str, prompts: &PromptLibrary) -> Result<RunDir> {
    let out = loaded.resolve(&loaded.config.paths.output_dir);
    let run = RunDir::create(&out, &loaded.hash())?;
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION"),
        command,
        config_hash: loaded.hash(),
        seeds: BTreeMap::from([("stimulus", loaded.config.stimulus.seed)]),
        horizon: Some(loaded.config.stimulus.horizon),
        template_versions: prompts.versions(),
        config: &loaded.config,
    };
    run.write("manifest.json", to_json(&manifest))?;
    outln!("run directory: {}", run.path.display());
    Ok(run)
}

fn find_design(loaded: &Loaded, id: &str) -> Result<config::DesignManifestEntry> {
    let designs = loaded.designs().map_err(|e| coded(exit::CONFIG, e))?;
    designs
        .into_iter()
        .find(|d| d.design_id == id)
        .ok_or_else(|| coded(exit::CONFIG, format!("design '{id}' is not in the design manifest")))
}

fn load_design(loaded: &Loaded, id: &str) -> Result<DesignInputs> {
    let entry = find_design(loaded, id)?;
    DesignInputs::load(&entry, &loaded.design_dir(), &loaded.name_lists()).map_err(|e| coded(exit::CONFIG, e))
}

fn print_prompts(prompts: &PromptLibrary, design: &str, spec: &str) -> Result<()> {
    for (q, messages) in question_prompts(prompts, spec).map_err(|e| coded(exit::CONFIG, e))? {
        outln!("===== {design} / {} =====", q.template_id());
        for m in messages {
            outln!("--- {:?} ---\n{}", m.role, m.content);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Commands

fn cmd_decompose(cli: &Cli, design: &str) -> Result<u8> {
    let loaded = load_config(cli)?;
    let prompts = prompts(&loaded)?;
    let inputs = load_design(&loaded, design)?;
    if cli.dry_run {
        print_prompts(&prompts, design, &inputs.spec)?;
        return Ok(exit::OK);
    }
    let gw = gateway(cli, &loaded)?;
    let run = open_run(&loaded, "decompose", &prompts)?;
    let result = decompose(design, &inputs.spec, &gw, &prompts).map_err(|e| {
        let code = if e.is_gateway() { exit::GATEWAY } else { exit::PARTIAL };
        coded(code, e)
    });
    finish_recording(cli)?;
    let result = result?;
    let path = write_decomposition(&run.sub(design)?, &result)?;
    outln!("{} comment units written to {}", result.units.len(), path.display());
    Ok(exit::OK)
}

fn cmd_pipeline(cli: &Cli, design: Option<&str>, all: bool) -> Result<u8> {
    let loaded = load_config(cli)?;
    let prompts = prompts(&loaded)?;
    let entries = match (design, all) {
        (Some(_), true) => return Err(coded(exit::CONFIG, "give either a design id or --all, not both")),
        (None, false) => return Err(coded(exit::CONFIG, "give a design id or --all")),
        (Some(id), false) => vec![find_design(&loaded, id)?],
        (None, true) => loaded.designs().map_err(|e| coded(exit::CONFIG, e))?,
    };
    if cli.dry_run {
        for e in &entries {
            let inputs = DesignInputs::load(e, &loaded.design_dir(), &loaded.name_lists()).map_err(|e| coded(exit::CONFIG, e))?;
            print_prompts(&prompts, &e.design_id, &inputs.spec)?;
        }
        return Ok(exit::OK);
    }
    let gw = gateway(cli, &loaded)?;
    let run = open_run(&loaded, "pipeline", &prompts)?;
    let names = loaded.name_lists();
    let design_dir = loaded.design_dir();
    let flow = Flow {
        gateway: &gw,
        prompts: &prompts,
        policy: &loaded.config.repair,
        plan: &loaded.config.stimulus,
        names: &names,
        design_dir: &design_dir,
    };
    let results: Vec<Result<pipeline::DesignResult>> = entries
        .par_iter()
        .map(|e| {
            let dir = run.sub(&e.design_id)?;
            flow.run_design(e, &dir)
        })
        .collect();
    finish_recording(cli)?;

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        let r = r?;
        records.extend(r.records);
        failures.extend(r.failure);
    }
    let board = aggregate_with_designs(&records, entries.iter().map(|e| e.design_id.as_str()))
        .context("aggregating verdicts")?;
    write_reports(&run, "", &board)?;
    run.write("failures.json", to_json(&failures))?;
    out!("{}", emit_report(&board, ReportFormat::Markdown));
    for f in &failures {
        eprintln!("design '{}' failed at {}: {}", f.design_id, f.stage, f.message);
    }
    Ok(match failures.first() {
        None => exit::OK,
        Some(_) if all => exit::PARTIAL,
        Some(f) if f.gateway => exit::GATEWAY,
        Some(_) => exit::PARTIAL,
    })
}

fn write_reports(run: &RunDir, prefix: &str, board: &Scoreboard) -> Result<()> {
    run.write(&format!("{prefix}tally.json"), to_json(board))?;
    for f in [ReportFormat::Json, ReportFormat::Csv, ReportFormat::Markdown] {
        run.write(&format!("{prefix}report.{}", f.extension()), emit_report(board, f))?;
    }
    Ok(())
}

fn cmd_score(cli: &Cli, design: &str, assertions: &Path) -> Result<u8> {
    let loaded = load_config(cli)?;
    let prompts = prompts(&loaded)?;
    let inputs = load_design(&loaded, design)?;
    let text = std::fs::read_to_string(assertions)
        .with_context(|| format!("reading {}", assertions.display()))
        .map_err(|e| coded(exit::CONFIG, e))?;
    let statements = split_statements(&text);
    let classifier = ClassifyContext::new(&inputs.model, &inputs.iface, &loaded.config.stimulus).map_err(|e| coded(exit::CONFIG, e))?;
    let (scored, records) = score_statements(design, &statements, &inputs.iface, &classifier)?;
    let run = open_run(&loaded, "score", &prompts)?;
    let board = aggregate_with_designs(&records, [design]).context("aggregating verdicts")?;
    let prefix = format!("{design}/");
    run.write(&format!("{prefix}verdicts.json"), to_json(&scored))?;
    write_reports(&run, &prefix, &board)?;
    for s in &scored {
        if let Verdict::FunctionallyIncorrect { counterexample, .. } = &s.detail {
            run.write(&format!("{prefix}counterexamples/assertion_{:02}.csv", s.index), counterexample.to_csv())?;
        }
        outln!("[{}] {}: {}", s.index, s.verdict, s.source);
    }
    out!("{}", emit_report(&board, ReportFormat::Markdown));
    Ok(exit::OK)
}

fn cmd_tcl(cli: &Cli, design: &str, assertions: &[String], horizon: Option<usize>) -> Result<u8> {
    let loaded = load_config(cli)?;
    let prompts = prompts(&loaded)?;
    let entry = find_design(&loaded, design)?;
    let inputs = load_design(&loaded, design)?;
    let req = TclRequest {
        design_id: design.to_string(),
        top: inputs.iface.module_name.clone(),
        rtl_path: entry.rtl_path.to_string_lossy().replace('\\', "/"),
        assertion_paths: if assertions.is_empty() { vec!["assertions.sv".to_string()] } else { assertions.to_vec() },
        clock: inputs.iface.clock.clone(),
        reset: inputs.iface.reset.clone(),
        mode: inputs.iface.mode,
        horizon: horizon.unwrap_or(loaded.config.stimulus.horizon),
    };
    let script = emit_tcl(&req).map_err(|e| coded(exit::CONFIG, e))?;
    let run = open_run(&loaded, "tcl", &prompts)?;
    let path = run.write(&format!("{design}/fpv.tcl"), &script)?;
    eprintln!("wrote {}", path.display());
    out!("{script}");
    Ok(exit::OK)
}

fn cmd_report(path: &Path, format: ReportFormat) -> Result<u8> {
    let file = if path.is_dir() { path.join("report.json") } else { path.to_path_buf() };
    let text = std::fs::read_to_string(&file)
        .with_context(|| format!("reading {}", file.display()))
        .map_err(|e| coded(exit::CONFIG, e))?;
    let board = parse_json_report(&text).map_err(|e| coded(exit::CONFIG, format!("{}: {e}", file.display())))?;
    out!("{}", emit_report(&board, format));
    Ok(exit::OK)
}

// ---------------------------------------------------------------------------
// Dataset

/// Dataset commands work without a config file; defaults apply then.
fn dataset_setup(cli: &Cli) -> Result<(DatasetSettings, PathBuf, PathBuf)> {
    let path = config_path(cli);
    if cli.config.is_some() || path.exists() {
        let loaded = load_config(cli)?;
        let out = loaded.resolve(&loaded.config.paths.output_dir);
        return Ok((loaded.config.dataset.clone(), out, loaded.base_dir.clone()));
    }
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    Ok((DatasetSettings::default(), out, PathBuf::from(".")))
}

fn dataset_run(settings: &DatasetSettings, out: &Path, command: &str, seed: u64) -> Result<RunDir> {
    let hash = config_hash(settings);
    let run = RunDir::create(out, &hash)?;
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION"),
        command,
        config_hash: hash,
        seeds: BTreeMap::from([("dataset", seed)]),
        horizon: None,
        template_versions: PromptLibrary::bundled().versions(),
        config: settings,
    };
    run.write("manifest.json", to_json(&manifest))?;
    outln!("run directory: {}", run.path.display());
    Ok(run)
}

fn cmd_dataset(cli: &Cli, command: &DatasetCommand) -> Result<u8> {
    let (settings, out, base) = dataset_setup(cli)?;
    let seed = cli.seed.unwrap_or(0);
    let embedder = || Embedder::from_config(&settings.embedder, &base).map_err(|e| coded(exit::CONFIG, e));
    match command {
        DatasetCommand::Mine { corpus } => {
            if !corpus.is_dir() {
                return Err(coded(exit::CONFIG, format!("corpus {} is not a directory", corpus.display())));
            }
            let (pairs, warnings) = mine_pairs(corpus)?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            let manifest = filter_pairs(pairs, &embedder()?, &settings.embedder, settings.threshold, settings.normalization);
            let run = dataset_run(&settings, &out, "dataset mine", seed)?;
            let path = run.write("mined_manifest.json", to_json(&manifest))?;
            outln!(
                "mined {} candidates: {} kept, {} below threshold, {} without embeddable text, {} unparseable",
                manifest.mined_count,
                manifest.kept_mined(),
                manifest.dropped_below_threshold,
                manifest.dropped_zero_vector,
                manifest.excluded_unparseable.len()
            );
            outln!("manifest: {}", path.display());
        }
        DatasetCommand::Synth { n, vocab } => {
            if *n == 0 {
                return Err(coded(exit::CONFIG, "--n must be at least 1"));
            }
            let vocab: Vec<String> = match vocab {
                Some(v) => v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect(),
                None => settings.synth_vocab.clone(),
            };
            let pairs = synthesize_pairs(*n, seed, &vocab).map_err(|e| coded(exit::CONFIG, e))?;
            let manifest = filter_pairs(pairs, &embedder()?, &settings.embedder, settings.threshold, settings.normalization);
            let run = dataset_run(&settings, &out, "dataset synth", seed)?;
            let path = run.write("synth_manifest.json", to_json(&manifest))?;
            outln!("synthesized {} pairs", manifest.synthetic_count);
            outln!("manifest: {}", path.display());
        }
        DatasetCommand::Emit { manifests, system_message } => {
            let mut merged: Option<DatasetManifest> = None;
            for p in manifests {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display())).map_err(|e| coded(exit::CONFIG, e))?;
                let m: DatasetManifest =
                    serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display())).map_err(|e| coded(exit::CONFIG, e))?;
                merged = Some(match merged {
                    None => m,
                    Some(mut acc) => {
                        acc.mined_count += m.mined_count;
                        acc.synthetic_count += m.synthetic_count;
                        acc.dropped_below_threshold += m.dropped_below_threshold;
                        acc.dropped_zero_vector += m.dropped_zero_vector;
                        acc.excluded_unparseable.extend(m.excluded_unparseable);
                        acc.kept_pairs.extend(m.kept_pairs);
                        acc
                    }
                });
            }
            let mut manifest = merged.unwrap_or_else(|| filter_pairs(vec![], &Embedder::Hashed { dimension: 1, seed: 0 }, &settings.embedder, settings.threshold, settings.normalization));
            let run = dataset_run(&settings, &out, "dataset emit", seed)?;
            let system_path = system_message.clone().or_else(|| settings.system_message_path.as_ref().map(|p| base.join(p)));
            let (system_text, system_path) = match system_path {
                Some(p) => {
                    let t = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display())).map_err(|e| coded(exit::CONFIG, e))?;
                    (t, p)
                }
                None => {
                    let t = PromptLibrary::bundled().render_partial("system_sva").map_err(|e| coded(exit::INTERNAL, e))?;
                    let p = run.write("system_message.txt", &t)?;
                    (t, p)
                }
            };
            manifest.system_message_path = Some(system_path.clone());
            let dataset = run.path.join("dataset.jsonl");
            let lines = emit_finetune_jsonl(&manifest, system_text.trim_end(), &dataset)?;
            run.write("dataset_manifest.json", to_json(&manifest))?;
            let job = FineTuneJobDescriptor::new(settings.base_model.clone(), dataset.clone(), system_path);
            run.write("finetune_job.json", job.to_json())?;
            outln!("wrote {lines} examples to {}", dataset.display());
        }
    }
    Ok(exit::OK)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_valid() {
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from(["assertgen", "pipeline", "--all", "--backend", "replay", "--max-iterations", "1"]).unwrap();
        assert_eq!(cli.backend, Some(BackendKind::Replay));
        assert_eq!(cli.max_iterations, Some(1));
        assert!(Cli::try_parse_from(["assertgen", "pipeline", "--backend", "carrier-pigeon"]).is_err());
    }
}
