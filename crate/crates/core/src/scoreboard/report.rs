use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::tally::{DesignRow, Scoreboard, Tally};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "md",
        }
    }
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(format!("unknown report format '{other}' (expected json, csv or markdown)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonRow {
    design: String,
    functionally_correct: u64,
    functionally_incorrect: u64,
    syntax_error: u64,
    vacuous: u64,
    tally: Tally,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonReport {
    designs: Vec<JsonRow>,
    total: JsonRow,
}

fn json_row(design: &str, row: &DesignRow) -> JsonRow {
    JsonRow {
        design: design.to_string(),
        functionally_correct: row.tally.functionally_correct,
        functionally_incorrect: row.tally.functionally_incorrect,
        syntax_error: row.tally.syntax_incorrect,
        vacuous: row.vacuous,
        tally: row.tally,
    }
}

/// Renders the per-design verdict counts. Rows are ordered by design id.
pub fn emit_report(board: &Scoreboard, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let report = JsonReport {
                designs: board.designs.iter().map(|(d, r)| json_row(d, r)).collect(),
                total: json_row("total", &board.total),
            };
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Csv => {
            let mut s = String::from("design,functionally_correct,functionally_incorrect,syntax_error\n");
            for (d, r) in &board.designs {
                let t = &r.tally;
                let _ = writeln!(s, "{d},{},{},{}", t.functionally_correct, t.functionally_incorrect, t.syntax_incorrect);
            }
            s
        }
        ReportFormat::Markdown => {
            let mut s = String::from(
                "| design | functionally correct | functionally incorrect | syntax error | vacuous |\n|---|---:|---:|---:|---:|\n",
            );
            let mut row = |name: &str, r: &DesignRow| {
                let t = &r.tally;
                let _ = writeln!(
                    s,
                    "| {name} | {} | {} | {} | {} |",
                    t.functionally_correct, t.functionally_incorrect, t.syntax_incorrect, r.vacuous
                );
            };
            for (d, r) in &board.designs {
                row(d, r);
            }
            row("**total**", &board.total);
            let t = &board.total.tally;
            let _ = write!(
                s,
                "\nGenerated {}: {} with incorrect syntax ({}), {} with correct syntax ({} fixed by repair, {} clean initially).\n",
                t.generated,
                t.syntax_incorrect,
                percent(t.syntax_incorrect, t.generated),
                t.syntax_correct,
                t.fixed_by_repair,
                t.clean_initially,
            );
            s
        }
    }
}

fn percent(part: u64, whole: u64) -> String {
    if whole == 0 {
        "n/a".to_string()
    } else {
        format!("{:.1}%", part as f64 * 100.0 / whole as f64)
    }
}

/// Reads a JSON report back into a scoreboard.
pub fn parse_json_report(text: &str) -> Result<Scoreboard, serde_json::Error> {
    let r: JsonReport = serde_json::from_str(text)?;
    let row = |j: &JsonRow| DesignRow { tally: j.tally, vacuous: j.vacuous };
    Ok(Scoreboard {
        designs: r.designs.iter().map(|j| (j.design.clone(), row(j))).collect(),
        total: row(&r.total),
    })
}
