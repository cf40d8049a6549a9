//! Fine-tuning dataset: mining comment/assertion pairs from Verilog,
//! similarity filtering, templated synthetic pairs and JSONL emission.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use assertgen_core::sva::gen::{AstGen, GenConfig};
use assertgen_core::sva::{
    parse_assertion, pretty_print, print_literal, BinaryOp, BoolExpr, ImplicationKind, PropertyExpr, Select, SequenceExpr, SysFunc, UnaryOp,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use walkdir::WalkDir;

pub const DEFAULT_THRESHOLD: f64 = 0.6;
pub const DEFAULT_DIMENSION: usize = 128;
/// A comment block must end at most this many lines above its assertion.
pub const MAX_COMMENT_GAP: usize = 2;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("embedding table {path}: {reason}")]
    Embeddings { path: PathBuf, reason: String },
    #[error("synthesis vocabulary is empty")]
    EmptyVocabulary,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairOrigin {
    Mined,
    Synthetic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCandidate {
    pub comment_text: String,
    pub assertion_text: String,
    pub source_path: String,
    pub source_line: usize,
    pub origin: PairOrigin,
    pub parseable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub similarity: Option<f64>,
}

// ---------------------------------------------------------------------------
// Mining

#[derive(Debug, Clone, PartialEq, Eq)]
enum LineKind {
    Blank,
    Comment(String),
    Code,
}

/// Classifies each line as blank, comment-only or code. Text inside block
/// comments is attached to the line it appears on. The second value is the
/// line with comments removed.
fn scan_lines(src: &str) -> Vec<(LineKind, String)> {
    let mut out = Vec::new();
    let mut in_block = false;
    for line in src.lines() {
        let mut code = String::new();
        let mut comment = String::new();
        let mut rest = line;
        loop {
            if in_block {
                match rest.find("*/") {
                    Some(i) => {
                        comment.push_str(&rest[..i]);
                        comment.push(' ');
                        rest = &rest[i + 2..];
                        in_block = false;
                    }
                    None => {
                        comment.push_str(rest);
                        break;
                    }
                }
            } else {
                let line_c = rest.find("//");
                let block_c = rest.find("/*");
                match (line_c, block_c) {
                    (Some(l), b) if b.map_or(true, |b| l < b) => {
                        code.push_str(&rest[..l]);
                        comment.push_str(&rest[l + 2..]);
                        comment.push(' ');
                        break;
                    }
                    (_, Some(b)) => {
                        code.push_str(&rest[..b]);
                        rest = &rest[b + 2..];
                        in_block = true;
                    }
                    _ => {
                        code.push_str(rest);
                        break;
                    }
                }
            }
        }
        let comment = comment.trim().trim_start_matches(['*', '/', '!']).trim().to_string();
        let kind = if !code.trim().is_empty() {
            LineKind::Code
        } else if !comment.is_empty() {
            LineKind::Comment(comment)
        } else if line.trim().is_empty() {
            LineKind::Blank
        } else {
            // decoration such as `/* */` or `//` alone
            LineKind::Comment(String::new())
        };
        out.push((kind, code));
    }
    out
}

fn starts_assert(code: &str) -> bool {
    let t = code.trim_start();
    let t = match t.split_once(':') {
        Some((label, rest)) if !label.is_empty() && label.trim().chars().all(|c| c.is_ascii_alphanumeric() || c == '_') => rest.trim_start(),
        _ => t,
    };
    t.strip_prefix("assert").is_some_and(|r| r.starts_with(|c: char| c == '(' || c.is_whitespace()))
}

/// Comment/assertion pairs in one file's text. `path` is only recorded.
pub fn mine_source(path: &str, src: &str) -> Vec<PairCandidate> {
    let lines = scan_lines(src);
    let mut out = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        if !(lines[i].0 == LineKind::Code && starts_assert(&lines[i].1)) {
            i += 1;
            continue;
        }
        // statement text up to the terminating semicolon
        let start = i;
        let mut stmt = String::new();
        let mut depth = 0i32;
        let mut done = false;
        while i < lines.len() && !done {
            for ch in lines[i].1.chars() {
                if done {
                    break;
                }
                stmt.push(ch);
                match ch {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    ';' if depth <= 0 => done = true,
                    _ => {}
                }
            }
            if !done {
                stmt.push('\n');
            }
            i += 1;
        }
        let stmt = stmt.lines().map(str::trim).filter(|l| !l.is_empty()).collect::<Vec<_>>().join(" ");

        // nearest comment block above, separated by blank lines only
        let mut j = start;
        let mut gap = 0;
        while j > 0 && lines[j - 1].0 == LineKind::Blank {
            j -= 1;
            gap += 1;
        }
        if j == 0 || gap + 1 > MAX_COMMENT_GAP || !matches!(lines[j - 1].0, LineKind::Comment(_)) {
            continue;
        }
        let mut parts = Vec::new();
        while j > 0 {
            match &lines[j - 1].0 {
                LineKind::Comment(c) => parts.push(c.clone()),
                _ => break,
            }
            j -= 1;
        }
        parts.reverse();
        let comment = parts.iter().filter(|p| !p.is_empty()).cloned().collect::<Vec<_>>().join(" ");
        if comment.is_empty() {
            continue;
        }
        out.push(PairCandidate {
            comment_text: comment,
            parseable: parse_assertion(&stmt).is_ok(),
            assertion_text: stmt,
            source_path: path.to_string(),
            source_line: start + 1,
            origin: PairOrigin::Mined,
            similarity: None,
        });
    }
    out
}

/// Mines every `.v`/`.sv` file below `root`, in path order. Unreadable
/// files and directories are skipped with a warning.
pub fn mine_pairs(root: &Path) -> Result<(Vec<PairCandidate>, Vec<String>), DatasetError> {
    std::fs::read_dir(root).map_err(io_err(root))?;
    let mut files = Vec::new();
    let mut warnings = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        match entry {
            Ok(entry) => {
                let ext = entry.path().extension().and_then(|e| e.to_str());
                if entry.file_type().is_file() && matches!(ext, Some("v" | "sv")) {
                    files.push(entry.into_path());
                }
            }
            Err(e) => warnings.push(format!("skipped: {e}")),
        }
    }
    let mined: Vec<Result<Vec<PairCandidate>, String>> = files
        .par_iter()
        .map(|p| {
            let bytes = std::fs::read(p).map_err(|e| format!("skipped {}: {e}", p.display()))?;
            let rel = p.strip_prefix(root).unwrap_or(p).to_string_lossy().replace('\\', "/");
            Ok(mine_source(&rel, &String::from_utf8_lossy(&bytes)))
        })
        .collect();
    let mut pairs = Vec::new();
    for r in mined {
        match r {
            Ok(p) => pairs.extend(p),
            Err(w) => warnings.push(w),
        }
    }
    Ok((pairs, warnings))
}

// ---------------------------------------------------------------------------
// Embedding

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EmbedderConfig {
    /// Signed feature hashing of lowercase word tokens.
    HashedBow {
        #[serde(default = "default_dimension")]
        dimension: usize,
        #[serde(default)]
        seed: u64,
    },
    /// Mean of pretrained vectors from a word2vec-format text file.
    External { path: PathBuf },
}

fn default_dimension() -> usize {
    DEFAULT_DIMENSION
}

impl Default for EmbedderConfig {
    fn default() -> Self {
        EmbedderConfig::HashedBow { dimension: DEFAULT_DIMENSION, seed: 0 }
    }
}

pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_ascii_lowercase)
        .collect()
}

pub enum Embedder {
    Hashed { dimension: usize, seed: u64 },
    Table { dimension: usize, vectors: HashMap<String, Vec<f64>> },
}

impl Embedder {
    pub fn from_config(cfg: &EmbedderConfig, base_dir: &Path) -> Result<Embedder, DatasetError> {
        match cfg {
            EmbedderConfig::HashedBow { dimension, seed } => Ok(Embedder::Hashed { dimension: (*dimension).max(1), seed: *seed }),
            EmbedderConfig::External { path } => {
                let path = base_dir.join(path);
                let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
                Embedder::parse_table(&text).map_err(|reason| DatasetError::Embeddings { path, reason })
            }
        }
    }

    /// word2vec text format; an optional `count dim` header line is skipped.
    pub fn parse_table(text: &str) -> Result<Embedder, String> {
        let mut vectors = HashMap::new();
        let mut dimension = None;
        for (n, line) in text.lines().enumerate() {
            let mut parts = line.split_whitespace();
            let Some(word) = parts.next() else { continue };
            let values: Result<Vec<f64>, _> = parts.map(str::parse::<f64>).collect();
            let values = values.map_err(|e| format!("line {}: {e}", n + 1))?;
            if n == 0 && values.len() == 1 && word.parse::<usize>().is_ok() {
                continue;
            }
            match dimension {
                None => dimension = Some(values.len()),
                Some(d) if d != values.len() => return Err(format!("line {}: expected {d} values, found {}", n + 1, values.len())),
                _ => {}
            }
            vectors.insert(word.to_ascii_lowercase(), values);
        }
        match dimension {
            Some(d) if d > 0 => Ok(Embedder::Table { dimension: d, vectors }),
            _ => Err("no vectors".into()),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Embedder::Hashed { dimension, .. } | Embedder::Table { dimension, .. } => *dimension,
        }
    }

    /// L2-normalized embedding; all zeros when no token contributes.
    pub fn embed(&self, text: &str) -> Vec<f64> {
        let mut v = vec![0.0; self.dimension()];
        for tok in tokenize(text) {
            match self {
                Embedder::Hashed { dimension, seed } => {
                    let mut h = Sha256::new();
                    h.update(seed.to_le_bytes());
                    h.update(tok.as_bytes());
                    let d = h.finalize();
                    let bucket = u64::from_le_bytes(d[..8].try_into().expect("8 bytes")) % *dimension as u64;
                    let sign = if d[8] & 1 == 0 { 1.0 } else { -1.0 };
                    v[bucket as usize] += sign;
                }
                Embedder::Table { vectors, .. } => {
                    if let Some(w) = vectors.get(&tok) {
                        v.iter_mut().zip(w).for_each(|(a, b)| *a += b);
                    }
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }
}

/// Cosine similarity; 0 when either vector is zero.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Text preprocessing applied before embedding, beyond lowercasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Lowercase word tokens only.
    #[default]
    None,
    /// Also drop the clocking event, the label and SVA keywords from the
    /// assertion side.
    StripSvaKeywords,
}

const SVA_KEYWORDS: [&str; 7] = ["assert", "property", "disable", "iff", "not", "posedge", "negedge"];

pub fn assertion_embedding_text(assertion: &str, norm: Normalization) -> String {
    if norm == Normalization::None {
        return assertion.to_string();
    }
    let mut text = assertion.to_string();
    if let Some(at) = text.find("@(") {
        let mut depth = 0;
        let mut end = text.len();
        for (i, ch) in text[at + 1..].char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        end = at + 1 + i + 1;
                        break;
                    }
                }
                _ => {}
            }
        }
        text.replace_range(at..end, " ");
    }
    if let Some(k) = text.find("assert") {
        text.replace_range(..k, " ");
    }
    tokenize(&text).into_iter().filter(|t| !SVA_KEYWORDS.contains(&t.as_str())).collect::<Vec<_>>().join(" ")
}

/// Similarity of a pair, or `None` when either side embeds to zero.
pub fn similarity(embedder: &Embedder, pair: &PairCandidate, norm: Normalization) -> Option<f64> {
    let a = embedder.embed(&pair.comment_text);
    let b = embedder.embed(&assertion_embedding_text(&pair.assertion_text, norm));
    let zero = |v: &[f64]| v.iter().all(|x| *x == 0.0);
    (!zero(&a) && !zero(&b)).then(|| cosine(&a, &b))
}

// ---------------------------------------------------------------------------
// Filtering and manifest

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub threshold: f64,
    pub embedder: EmbedderConfig,
    pub mined_count: usize,
    pub synthetic_count: usize,
    pub normalization: Normalization,
    pub dropped_below_threshold: usize,
    /// Mined pairs with a side that has no embeddable token.
    pub dropped_zero_vector: usize,
    pub excluded_unparseable: Vec<PairCandidate>,
    pub kept_pairs: Vec<PairCandidate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system_message_path: Option<PathBuf>,
}

impl DatasetManifest {
    pub fn kept_mined(&self) -> usize {
        self.kept_pairs.iter().filter(|p| p.origin == PairOrigin::Mined).count()
    }
}

/// Keeps mined pairs whose similarity is at least `threshold` and that
/// parse; synthetic pairs are kept unconditionally. Output order follows
/// the input order.
pub fn filter_pairs(
    candidates: Vec<PairCandidate>,
    embedder: &Embedder,
    cfg: &EmbedderConfig,
    threshold: f64,
    normalization: Normalization,
) -> DatasetManifest {
    let mut m = DatasetManifest {
        threshold,
        embedder: cfg.clone(),
        mined_count: 0,
        synthetic_count: 0,
        normalization,
        dropped_below_threshold: 0,
        dropped_zero_vector: 0,
        excluded_unparseable: Vec::new(),
        kept_pairs: Vec::new(),
        system_message_path: None,
    };
    let scored: Vec<(PairCandidate, Option<f64>)> = candidates
        .into_par_iter()
        .map(|p| {
            let s = similarity(embedder, &p, normalization);
            (p, s)
        })
        .collect();
    for (mut p, s) in scored {
        p.similarity = s;
        match p.origin {
            PairOrigin::Synthetic => {
                m.synthetic_count += 1;
                m.kept_pairs.push(p);
            }
            PairOrigin::Mined => {
                m.mined_count += 1;
                let Some(s) = s else {
                    m.dropped_zero_vector += 1;
                    continue;
                };
                if s < threshold {
                    m.dropped_below_threshold += 1;
                } else if !p.parseable {
                    m.excluded_unparseable.push(p);
                } else {
                    m.kept_pairs.push(p);
                }
            }
        }
    }
    m
}

// ---------------------------------------------------------------------------
// Synthesis

fn describe_bool(e: &BoolExpr) -> String {
    match e {
        BoolExpr::Ident { name, select: None, .. } => name.clone(),
        BoolExpr::Ident { name, select: Some(Select::Bit(i)), .. } => format!("bit {i} of {name}"),
        BoolExpr::Ident { name, select: Some(Select::Part { high, low }), .. } => format!("bits {high} down to {low} of {name}"),
        BoolExpr::Literal(l) => print_literal(l),
        BoolExpr::Paren(inner) => describe_bool(inner),
        BoolExpr::Unary(op, x) => {
            let x = operand(x);
            match op {
                UnaryOp::LogNot => format!("not {x}"),
                UnaryOp::BitNot => format!("the bitwise inverse of {x}"),
                UnaryOp::Neg => format!("the negation of {x}"),
            }
        }
        BoolExpr::Binary(op, l, r) => {
            let (l, r) = (operand(l), operand(r));
            let word = match op {
                BinaryOp::LogAnd => "and",
                BinaryOp::LogOr => "or",
                BinaryOp::BitAnd => "bitwise-and",
                BinaryOp::BitOr => "bitwise-or",
                BinaryOp::BitXor => "xor",
                BinaryOp::Eq => "equals",
                BinaryOp::Ne => "differs from",
                BinaryOp::Lt => "is less than",
                BinaryOp::Le => "is at most",
                BinaryOp::Gt => "is greater than",
                BinaryOp::Ge => "is at least",
                BinaryOp::Add => "plus",
                BinaryOp::Sub => "minus",
            };
            format!("{l} {word} {r}")
        }
        BoolExpr::SystemCall { func, arg, cycles, .. } => {
            let a = operand(arg);
            match func {
                SysFunc::Past => match cycles.unwrap_or(1) {
                    1 => format!("the previous value of {a}"),
                    n => format!("the value of {a} {n} cycles earlier"),
                },
                SysFunc::Rose => format!("{a} rises"),
                SysFunc::Fell => format!("{a} falls"),
                SysFunc::Stable => format!("{a} is stable"),
            }
        }
    }
}

fn operand(e: &BoolExpr) -> String {
    let inner = match e {
        BoolExpr::Paren(x) => x.as_ref(),
        other => other,
    };
    let text = describe_bool(inner);
    if matches!(inner, BoolExpr::Binary(..)) {
        format!("({text})")
    } else {
        text
    }
}

fn cycles_phrase(min: u32, max: Option<u32>) -> String {
    match max {
        None if min == 1 => "one cycle later".to_string(),
        None => format!("{min} cycles later"),
        Some(u32::MAX) => format!("at least {min} cycles later"),
        Some(max) => format!("between {min} and {max} cycles later"),
    }
}

fn describe_seq(s: &SequenceExpr) -> String {
    match s {
        SequenceExpr::Bool(b) => describe_bool(b),
        SequenceExpr::Delay { lhs: None, min, max, rhs, .. } => format!("{}, {}", cycles_phrase(*min, *max), describe_seq(rhs)),
        SequenceExpr::Delay { lhs: Some(l), min, max, rhs, .. } => {
            format!("{} followed {} by {}", describe_seq(l), cycles_phrase(*min, *max), describe_seq(rhs))
        }
    }
}

fn describe_property(p: &PropertyExpr) -> String {
    match p {
        PropertyExpr::Seq(s) => format!("{} must hold", describe_seq(s)),
        PropertyExpr::Implication { kind, antecedent, consequent } => {
            let when = match kind {
                ImplicationKind::Overlapped => "in the same cycle",
                ImplicationKind::NonOverlapped => "in the next cycle",
            };
            let then = match consequent.as_ref() {
                PropertyExpr::Seq(s) => format!("{} must hold {when}", describe_seq(s)),
                other => format!("{when}, {}", describe_property(other)),
            };
            format!("whenever {} holds, {then}", describe_seq(antecedent))
        }
        PropertyExpr::Not(inner) => format!("it must never be the case that {}", describe_property(inner).trim_end_matches(" must hold")),
        PropertyExpr::DisableIff { condition, body } => {
            format!("unless {} is asserted, {}", describe_bool(condition), describe_property(body))
        }
    }
}

/// One-sentence description of an assertion's property.
pub fn describe_assertion(decl: &assertgen_core::sva::AssertionDecl) -> String {
    describe_property(&decl.property) + "."
}

/// `n` templated pairs from random well-formed assertions over `vocab`.
pub fn synthesize_pairs(n: usize, seed: u64, vocab: &[String]) -> Result<Vec<PairCandidate>, DatasetError> {
    if vocab.is_empty() {
        return Err(DatasetError::EmptyVocabulary);
    }
    let mut cfg = GenConfig::new(vocab.to_vec());
    cfg.max_depth = 3;
    let mut gen = AstGen::new(&cfg, ChaCha8Rng::seed_from_u64(seed));
    Ok((0..n)
        .map(|i| {
            let decl = gen.assertion();
            PairCandidate {
                comment_text: describe_assertion(&decl),
                assertion_text: pretty_print(&decl),
                source_path: "<synthetic>".to_string(),
                source_line: i + 1,
                origin: PairOrigin::Synthetic,
                parseable: true,
                similarity: None,
            }
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Emission

#[derive(Serialize)]
struct JsonlMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct JsonlLine<'a> {
    messages: [JsonlMessage<'a>; 3],
}

/// Writes one chat-format training example per kept, parseable pair and
/// returns the number of lines.
pub fn emit_finetune_jsonl(manifest: &DatasetManifest, system_message: &str, out: &Path) -> Result<usize, DatasetError> {
    let mut buf = Vec::new();
    let mut count = 0;
    for p in manifest.kept_pairs.iter().filter(|p| p.parseable) {
        let line = JsonlLine {
            messages: [
                JsonlMessage { role: "system", content: system_message },
                JsonlMessage { role: "user", content: &p.comment_text },
                JsonlMessage { role: "assistant", content: &p.assertion_text },
            ],
        };
        serde_json::to_writer(&mut buf, &line).expect("jsonl line serializes");
        buf.push(b'\n');
        count += 1;
    }
    let mut f = std::fs::File::create(out).map_err(io_err(out))?;
    f.write_all(&buf).map_err(io_err(out))?;
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comment_window() {
        let src = "// checks a\nassert property (@(posedge clk) a);\n\n// two above\n\nassert (b);\n// three above\n\n\nassert (c);\n";
        let pairs = mine_source("t.v", src);
        let found: Vec<_> = pairs.iter().map(|p| (p.comment_text.as_str(), p.source_line)).collect();
        assert_eq!(found, [("checks a", 2), ("two above", 6)]);
    }

    #[test]
    fn block_comments_and_multiline_statements() {
        let src = "/* reset clears\n * the counter */\nchk: assert property (@(posedge clk)\n    rst |=> cnt == 0);\n/* assert (x); */\n";
        let pairs = mine_source("t.sv", src);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].comment_text, "reset clears the counter");
        assert_eq!(pairs[0].assertion_text, "chk: assert property (@(posedge clk) rst |=> cnt == 0);");
        assert!(pairs[0].parseable);
    }

    #[test]
    fn cosine_boundaries() {
        assert!((cosine(&[1.0, 0.0, 1.0], &[1.0, 1.0, 0.0]) - 0.5).abs() < 1e-12);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 0.0]), 0.0);
        let e = Embedder::Hashed { dimension: 128, seed: 0 };
        let v = e.embed("Counter resets to zero");
        assert!((cosine(&v, &e.embed("counter RESETS to zero")) - 1.0).abs() < 1e-12);
        assert!(e.embed("!! ##").iter().all(|x| *x == 0.0));
    }

    #[test]
    fn embedding_contract() {
        let e = Embedder::Hashed { dimension: 128, seed: 0 };
        assert_eq!(e.embed("a b"), e.embed("b a"));
        let base = e.embed("reset clears counter");
        assert!(cosine(&base, &e.embed("reset clears the counter")) > cosine(&base, &e.embed("grant follows request")));
        assert_eq!(
            assertion_embedding_text("lbl: assert property (@(posedge clk) disable iff (rst) req |-> gnt);", Normalization::StripSvaKeywords),
            "rst req gnt"
        );
    }

    #[test]
    fn seeds_differ() {
        let vocab: Vec<String> = ["a", "b", "c", "d"].map(String::from).to_vec();
        let base = synthesize_pairs(20, 0, &vocab).unwrap();
        let differing = (1..100).filter(|&s| synthesize_pairs(20, s, &vocab).unwrap() != base).count();
        assert_eq!(differing, 99);
    }

    #[test]
    fn external_table() {
        let e = Embedder::parse_table("2 2\nreset 1 0\ncount 0 1\n").unwrap();
        assert_eq!(e.embed("reset"), vec![1.0, 0.0]);
        assert!((cosine(&e.embed("reset count"), &e.embed("count")) - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(Embedder::parse_table("a 1 2\nb 1\n").is_err());
    }

    #[test]
    fn synthesis_is_deterministic_and_parses() {
        let vocab: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
        let x = synthesize_pairs(50, 7, &vocab).unwrap();
        assert_eq!(x, synthesize_pairs(50, 7, &vocab).unwrap());
        for p in &x {
            assert!(parse_assertion(&p.assertion_text).is_ok(), "{}", p.assertion_text);
            assert!(p.comment_text.ends_with('.'));
        }
        let d = parse_assertion("assert property (@(posedge clk) a |-> b);").unwrap();
        assert_eq!(describe_assertion(&d), "whenever a holds, b must hold in the same cycle.");
    }

    #[test]
    fn filtering_and_emission() {
        let mk = |comment: &str, assertion: &str, origin| PairCandidate {
            comment_text: comment.into(),
            assertion_text: assertion.into(),
            source_path: "x".into(),
            source_line: 1,
            origin,
            parseable: parse_assertion(assertion).is_ok(),
            similarity: None,
        };
        let cands = vec![
            mk("req implies gnt", "assert property (@(posedge clk) req |-> gnt);", PairOrigin::Mined),
            mk("unrelated words entirely", "assert (zz);", PairOrigin::Mined),
            mk("bad bad", "assert (bad bad", PairOrigin::Mined),
            mk("anything", "assert (q);", PairOrigin::Synthetic),
        ];
        let cfg = EmbedderConfig::default();
        let e = Embedder::from_config(&cfg, Path::new(".")).unwrap();
        let m = filter_pairs(cands, &e, &cfg, 0.6, Normalization::StripSvaKeywords);
        assert_eq!((m.mined_count, m.synthetic_count, m.kept_mined()), (3, 1, 1));
        assert_eq!(m.excluded_unparseable.len(), 1);
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("d.jsonl");
        assert_eq!(emit_finetune_jsonl(&m, "sys", &out).unwrap(), 2);
        let text = std::fs::read_to_string(&out).unwrap();
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first["messages"][2]["role"], "assistant");
    }
}
