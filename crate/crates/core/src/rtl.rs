//! Port and signal tables extracted from Verilog source, plus name
//! resolution of assertions against them.
//!
//! Only the module header and top-level net/variable/parameter
//! declarations are read; bodies are skipped by keyword scanning.

use serde::{Deserialize, Serialize};

use crate::sva::{codes, AssertionDecl, BoolExpr, Category, Diagnostic, Select, Span};

pub mod rtl_codes {
    pub const NO_MODULE: &str = "R001";
    pub const MULTIPLE_MODULES: &str = "R002";
    pub const BAD_PORT_LIST: &str = "R003";
    pub const NON_ANSI: &str = "R004";
    pub const BAD_CLOCK: &str = "R005";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Input,
    Output,
    Inout,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignalDecl {
    pub name: String,
    pub direction: Direction,
    pub width: u32,
    pub msb: i64,
    pub lsb: i64,
}

impl SignalDecl {
    pub fn new(name: impl Into<String>, direction: Direction, msb: i64, lsb: i64) -> SignalDecl {
        SignalDecl {
            name: name.into(),
            direction,
            width: ((msb - lsb).unsigned_abs() + 1) as u32,
            msb,
            lsb,
        }
    }

    fn contains(&self, index: u32) -> bool {
        let (lo, hi) = (self.msb.min(self.lsb), self.msb.max(self.lsb));
        (lo..=hi).contains(&i64::from(index))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Sequential,
    Combinational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleInterface {
    pub module_name: String,
    pub signals: Vec<SignalDecl>,
    pub clock: Option<String>,
    pub reset: Option<String>,
    pub mode: Mode,
    /// `parameter` / `localparam` constants with literal values. Assertions
    /// may reference them by name (e.g. FSM state encodings).
    #[serde(default)]
    pub parameters: Vec<(String, u64)>,
}

impl ModuleInterface {
    pub fn signal(&self, name: &str) -> Option<&SignalDecl> {
        self.signals.iter().find(|s| s.name == name)
    }

    pub fn parameter(&self, name: &str) -> Option<u64> {
        self.parameters.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }

    /// Human/LLM-readable table of signals, one per line.
    pub fn signal_table(&self) -> String {
        let mut out = String::new();
        for s in &self.signals {
            let dir = match s.direction {
                Direction::Input => "input",
                Direction::Output => "output",
                Direction::Inout => "inout",
                Direction::Internal => "internal",
            };
            let range = if s.width == 1 && s.msb == 0 && s.lsb == 0 {
                String::new()
            } else {
                format!(" [{}:{}]", s.msb, s.lsb)
            };
            out.push_str(&format!("{dir}{range} {}\n", s.name));
        }
        for (n, v) in &self.parameters {
            out.push_str(&format!("parameter {n} = {v}\n"));
        }
        out
    }
}

/// Clock and reset name lists used for mode detection. Matching is
/// case-insensitive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NameLists {
    pub clock_names: Vec<String>,
    pub reset_names: Vec<String>,
}

impl Default for NameLists {
    fn default() -> Self {
        NameLists {
            clock_names: ["clk", "clock", "clk_i", "clock_i"].map(String::from).to_vec(),
            reset_names: ["rst", "reset", "rst_n", "reset_n", "areset", "aresetn"].map(String::from).to_vec(),
        }
    }
}

impl NameLists {
    pub fn is_clock(&self, name: &str) -> bool {
        self.clock_names.iter().any(|c| c.eq_ignore_ascii_case(name))
    }

    pub fn is_reset(&self, name: &str) -> bool {
        self.reset_names.iter().any(|c| c.eq_ignore_ascii_case(name))
    }
}

/// True when a reset signal is asserted low, judged by its name.
pub fn reset_active_low(name: &str) -> bool {
    let n = name.to_ascii_lowercase();
    n.ends_with("_n") || n.ends_with("n") && n.starts_with("areset") || n.ends_with("_b")
}

pub fn detect_mode<'a>(signal_names: impl IntoIterator<Item = &'a str>, names: &NameLists) -> Mode {
    if signal_names.into_iter().any(|n| names.is_clock(n)) {
        Mode::Sequential
    } else {
        Mode::Combinational
    }
}

// ---------------------------------------------------------------------------
// Verilog scanning

#[derive(Debug, Clone, PartialEq)]
enum VTok {
    Word(String),
    Num(u64),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: VTok,
    start: usize,
    end: usize,
}

fn tokenize(src: &str) -> Vec<Spanned> {
    let b = src.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if src[i..].starts_with("//") {
            i = src[i..].find('\n').map_or(b.len(), |n| i + n);
        } else if src[i..].starts_with("/*") {
            i = src[i + 2..].find("*/").map_or(b.len(), |n| i + 2 + n + 2);
        } else if c == b'"' {
            i += 1;
            while i < b.len() && b[i] != b'"' {
                i += if b[i] == b'\\' { 2 } else { 1 };
            }
            i += 1;
        } else if c == b'`' {
            // compiler directives occupy the rest of their line
            i = src[i..].find('\n').map_or(b.len(), |n| i + n);
        } else if c.is_ascii_alphabetic() || c == b'_' || c == b'$' {
            let s = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'$') {
                i += 1;
            }
            out.push(Spanned { tok: VTok::Word(src[s..i].to_string()), start: s, end: i });
        } else if c.is_ascii_digit() || c == b'\'' {
            let s = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'\'') {
                i += 1;
            }
            let tok = match verilog_literal(&src[s..i]) {
                Some(v) => VTok::Num(v),
                None => VTok::Word(src[s..i].to_string()),
            };
            out.push(Spanned { tok, start: s, end: i });
        } else {
            let len = src[i..].chars().next().map_or(1, char::len_utf8);
            let ch = src[i..].chars().next().unwrap_or('?');
            out.push(Spanned { tok: VTok::Sym(ch), start: i, end: i + len });
            i += len;
        }
    }
    out
}

fn verilog_literal(text: &str) -> Option<u64> {
    let clean: String = text.chars().filter(|&c| c != '_').collect();
    match clean.find('\'') {
        None => clean.parse().ok(),
        Some(q) => {
            let rest = clean[q + 1..].trim_start_matches(['s', 'S']);
            let mut chars = rest.chars();
            let radix = match chars.next()?.to_ascii_lowercase() {
                'b' => 2,
                'o' => 8,
                'd' => 10,
                'h' => 16,
                _ => return None,
            };
            u64::from_str_radix(chars.as_str(), radix).ok()
        }
    }
}

struct Scanner<'a> {
    src: &'a str,
    toks: Vec<Spanned>,
    pos: usize,
    params: Vec<(String, u64)>,
}

type SResult<T> = Result<T, Diagnostic>;

impl<'a> Scanner<'a> {
    fn peek(&self) -> Option<&VTok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(VTok::Word(x)) if x == w)
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek() == Some(&VTok::Sym(c))
    }

    fn bump(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) => (t.start, t.end),
            None => (0, 0),
        }
    }

    fn error(&self, code: &str, msg: &str) -> Diagnostic {
        let (s, e) = self.here();
        let span = Span::locate(self.src, s, e);
        let msg = msg.to_string();
        Diagnostic::error(Category::Parse, code, self.src, span, |q| format!("{msg} at {q}"))
    }

    fn word(&mut self) -> SResult<String> {
        match self.peek() {
            Some(VTok::Word(w)) => {
                let w = w.clone();
                self.bump();
                Ok(w)
            }
            _ => Err(self.error(rtl_codes::BAD_PORT_LIST, "expected an identifier")),
        }
    }

    fn expect_sym(&mut self, c: char) -> SResult<()> {
        if self.is_sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(rtl_codes::BAD_PORT_LIST, &format!("expected '{c}'")))
        }
    }

    /// Constant expression: literals, known parameters, `+ - *`, parentheses.
    fn const_expr(&mut self) -> SResult<i64> {
        let mut acc = self.const_term()?;
        loop {
            if self.is_sym('+') {
                self.bump();
                acc += self.const_term()?;
            } else if self.is_sym('-') {
                self.bump();
                acc -= self.const_term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn const_term(&mut self) -> SResult<i64> {
        let mut acc = self.const_atom()?;
        while self.is_sym('*') {
            self.bump();
            acc *= self.const_atom()?;
        }
        Ok(acc)
    }

    fn const_atom(&mut self) -> SResult<i64> {
        match self.peek().cloned() {
            Some(VTok::Num(v)) => {
                self.bump();
                Ok(v as i64)
            }
            Some(VTok::Word(w)) => match self.params.iter().find(|(n, _)| *n == w) {
                Some(&(_, v)) => {
                    self.bump();
                    Ok(v as i64)
                }
                None => Err(self.error(rtl_codes::BAD_PORT_LIST, "expected a constant")),
            },
            Some(VTok::Sym('(')) => {
                self.bump();
                let v = self.const_expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            Some(VTok::Sym('-')) => {
                self.bump();
                Ok(-self.const_atom()?)
            }
            _ => Err(self.error(rtl_codes::BAD_PORT_LIST, "expected a constant")),
        }
    }

    fn opt_range(&mut self) -> SResult<(i64, i64)> {
        if !self.is_sym('[') {
            return Ok((0, 0));
        }
        self.bump();
        let msb = self.const_expr()?;
        self.expect_sym(':')?;
        let lsb = self.const_expr()?;
        self.expect_sym(']')?;
        Ok((msb, lsb))
    }

    fn skip_data_type(&mut self) {
        while let Some(VTok::Word(w)) = self.peek() {
            if matches!(w.as_str(), "wire" | "reg" | "logic" | "tri" | "signed" | "unsigned" | "bit" | "var") {
                self.bump();
            } else {
                break;
            }
        }
    }

    /// `#( parameter A = 1, B = 2 )`
    fn header_params(&mut self) -> SResult<()> {
        self.expect_sym('(')?;
        while !self.is_sym(')') {
            if self.peek().is_none() {
                return Err(self.error(rtl_codes::BAD_PORT_LIST, "unterminated parameter list"));
            }
            if self.is_word("parameter") || self.is_word("localparam") {
                self.bump();
            }
            self.param_assignments(')')?;
            if self.is_sym(',') {
                self.bump();
            }
        }
        self.bump();
        Ok(())
    }

    /// `[type] [range] NAME = expr {, NAME = expr}` up to (not including) `stop`.
    fn param_assignments(&mut self, stop: char) -> SResult<()> {
        self.skip_data_type();
        if self.is_word("integer") {
            self.bump();
        }
        self.opt_range()?;
        loop {
            let name = self.word()?;
            self.expect_sym('=')?;
            let start = self.pos;
            match self.const_expr() {
                Ok(v) if self.is_sym(',') || self.is_sym(stop) => self.params.push((name, v as u64)),
                _ => {
                    // not a literal-valued parameter; skip its value
                    self.pos = start;
                    while !(self.is_sym(',') || self.is_sym(stop) || self.peek().is_none()) {
                        self.bump();
                    }
                }
            }
            if self.is_sym(',') {
                let save = self.pos;
                self.bump();
                // in a header list a comma may start the next `parameter`
                if self.is_word("parameter") || self.is_word("localparam") || !matches!(self.peek(), Some(VTok::Word(_))) {
                    self.pos = save;
                    return Ok(());
                }
                if self.toks.get(self.pos + 1).map(|t| &t.tok) != Some(&VTok::Sym('=')) {
                    self.pos = save;
                    return Ok(());
                }
                continue;
            }
            return Ok(());
        }
    }

    fn ports(&mut self, signals: &mut Vec<SignalDecl>) -> SResult<()> {
        self.expect_sym('(')?;
        if self.is_sym(')') {
            self.bump();
            return Ok(());
        }
        let mut dir: Option<Direction> = None;
        let mut range = (0, 0);
        loop {
            let d = match self.peek() {
                Some(VTok::Word(w)) if w == "input" => Some(Direction::Input),
                Some(VTok::Word(w)) if w == "output" => Some(Direction::Output),
                Some(VTok::Word(w)) if w == "inout" => Some(Direction::Inout),
                _ => None,
            };
            if let Some(d) = d {
                self.bump();
                dir = Some(d);
                self.skip_data_type();
                range = self.opt_range()?;
            } else if dir.is_none() {
                return Err(self.error(
                    rtl_codes::NON_ANSI,
                    "non-ANSI port list: declare each port's direction inside the header",
                )
                .with_hint("rewrite the header as `module m(input a, output y);`"));
            }
            let name = self.word()?;
            if self.is_sym('[') {
                return Err(self.error(rtl_codes::BAD_PORT_LIST, "unpacked port dimensions are not supported"));
            }
            signals.push(SignalDecl::new(name, dir.unwrap(), range.0, range.1));
            if self.is_sym(',') {
                self.bump();
                continue;
            }
            self.expect_sym(')')?;
            return Ok(());
        }
    }

    fn body(&mut self, signals: &mut Vec<SignalDecl>) -> SResult<()> {
        let mut depth = 0usize;
        let mut at_stmt_start = true;
        loop {
            let Some(tok) = self.peek().cloned() else {
                return Err(self.error(rtl_codes::NO_MODULE, "missing 'endmodule'"));
            };
            match tok {
                VTok::Word(w) => match w.as_str() {
                    "endmodule" => {
                        self.bump();
                        return Ok(());
                    }
                    "begin" | "case" | "casez" | "casex" | "function" | "task" | "generate" | "fork" => {
                        depth += 1;
                        self.bump();
                        at_stmt_start = true;
                    }
                    "end" | "endcase" | "endfunction" | "endtask" | "endgenerate" | "join" => {
                        depth = depth.saturating_sub(1);
                        self.bump();
                        at_stmt_start = true;
                    }
                    "reg" | "wire" | "logic" | "integer" if depth == 0 && at_stmt_start => {
                        self.bump();
                        let width_override = (w == "integer").then_some((31, 0));
                        self.skip_data_type();
                        let range = match width_override {
                            Some(r) => r,
                            None => self.opt_range()?,
                        };
                        self.net_names(range, signals)?;
                        at_stmt_start = true;
                    }
                    "parameter" | "localparam" if depth == 0 && at_stmt_start => {
                        self.bump();
                        self.param_assignments(';')?;
                        while !self.is_sym(';') && self.peek().is_some() {
                            self.bump();
                        }
                        self.bump();
                        at_stmt_start = true;
                    }
                    "module" => {
                        return Err(self.error(rtl_codes::MULTIPLE_MODULES, "nested or second 'module'"));
                    }
                    _ => {
                        self.bump();
                        at_stmt_start = false;
                    }
                },
                VTok::Sym(';') => {
                    self.bump();
                    at_stmt_start = true;
                }
                _ => {
                    self.bump();
                    at_stmt_start = false;
                }
            }
        }
    }

    fn net_names(&mut self, range: (i64, i64), signals: &mut Vec<SignalDecl>) -> SResult<()> {
        loop {
            let name = self.word()?;
            while self.is_sym('[') {
                // memories: keep the element width, skip the array dimension
                while !self.is_sym(']') && self.peek().is_some() {
                    self.bump();
                }
                self.bump();
            }
            if !signals.iter().any(|s| s.name == name) {
                signals.push(SignalDecl::new(name, Direction::Internal, range.0, range.1));
            }
            if self.is_sym('=') {
                let mut nest = 0i32;
                while let Some(t) = self.peek() {
                    match t {
                        VTok::Sym('(') | VTok::Sym('{') => nest += 1,
                        VTok::Sym(')') | VTok::Sym('}') => nest -= 1,
                        VTok::Sym(',') | VTok::Sym(';') if nest == 0 => break,
                        _ => {}
                    }
                    self.bump();
                }
            }
            if self.is_sym(',') {
                self.bump();
                continue;
            }
            self.expect_sym(';')?;
            return Ok(());
        }
    }
}

/// Reads the single module in `source` into a [`ModuleInterface`].
pub fn extract_interface(source: &str, names: &NameLists) -> Result<ModuleInterface, Diagnostic> {
    let toks = tokenize(source);
    let modules: Vec<usize> = toks
        .iter()
        .enumerate()
        .filter(|(_, t)| matches!(&t.tok, VTok::Word(w) if w == "module" || w == "macromodule"))
        .map(|(i, _)| i)
        .collect();
    let mut sc = Scanner { src: source, toks, pos: 0, params: Vec::new() };
    match modules.as_slice() {
        [] => {
            let span = Span::locate(source, 0, source.len().min(source.find('\n').unwrap_or(source.len())));
            return Err(Diagnostic::error(Category::Parse, rtl_codes::NO_MODULE, source, span, |q| {
                format!("no 'module' declaration found in {q}")
            }));
        }
        [_] => {}
        [_, second, ..] => {
            sc.pos = *second;
            return Err(sc.error(rtl_codes::MULTIPLE_MODULES, "only one module per file is supported; second module"));
        }
    }
    sc.pos = modules[0] + 1;
    let module_name = sc.word()?;
    if sc.is_sym('#') {
        sc.bump();
        sc.header_params()?;
    }
    let mut signals = Vec::new();
    sc.ports(&mut signals)?;
    sc.expect_sym(';')?;
    sc.body(&mut signals)?;

    let mode = detect_mode(signals.iter().map(|s| s.name.as_str()), names);
    let clock = signals.iter().find(|s| names.is_clock(&s.name));
    if let Some(c) = clock {
        if c.width != 1 {
            let at = source.find(&c.name).unwrap_or(0);
            let span = Span::locate(source, at, at + c.name.len());
            return Err(Diagnostic::error(Category::Semantic, rtl_codes::BAD_CLOCK, source, span, |q| {
                format!("clock signal {q} must be 1 bit wide")
            }));
        }
    }
    let clock = clock.map(|s| s.name.clone());
    let reset = signals.iter().find(|s| names.is_reset(&s.name)).map(|s| s.name.clone());
    Ok(ModuleInterface { module_name, signals, clock, reset, mode, parameters: sc.params })
}

// ---------------------------------------------------------------------------
// Name resolution

/// Semantic diagnostics for `decl` against `iface`. Empty means clean.
pub fn resolve_names(decl: &AssertionDecl, iface: &ModuleInterface) -> Vec<Diagnostic> {
    let src = decl.raw_text.as_str();
    let mut out = Vec::new();
    let in_source = |sp: Span| sp.end <= src.len() && src.is_char_boundary(sp.start) && src.is_char_boundary(sp.end);

    if let Some(c) = &decl.clocking {
        if iface.clock.as_deref() != Some(c.signal.as_str()) {
            let span = if in_source(c.span) { c.span } else { Span::locate(src, 0, src.len()) };
            let d = Diagnostic::error(Category::Semantic, codes::NOT_A_CLOCK, src, span, |q| {
                format!("clocking event uses {q}, which is not the clock of module '{}'", iface.module_name)
            });
            out.push(match &iface.clock {
                Some(clk) => d.with_hint(format!("write @(posedge {clk})")),
                None => d.with_hint("this design has no clock; write an immediate assertion `assert(<expr>);`"),
            });
        }
    }

    for e in decl.identifiers() {
        let BoolExpr::Ident { name, select, span } = e else { continue };
        let span = if in_source(*span) { *span } else { Span::locate(src, 0, src.len()) };
        let Some(sig) = iface.signal(name) else {
            if iface.parameter(name).is_some() && select.is_none() {
                continue;
            }
            let mut d = Diagnostic::error(Category::Semantic, codes::UNKNOWN_IDENT, src, span, |q| {
                format!("unknown identifier {q} in module '{}'", iface.module_name)
            });
            d = if name.contains('.') {
                d.with_hint(format!(
                    "hierarchical references are not supported; use a signal declared in '{}': {}",
                    iface.module_name,
                    signal_names(iface)
                ))
            } else {
                d.with_hint(format!("declared signals: {}", signal_names(iface)))
            };
            out.push(d);
            continue;
        };
        let ok = match select {
            None => true,
            Some(Select::Bit(i)) => sig.contains(*i),
            Some(Select::Part { high, low }) => sig.contains(*high) && sig.contains(*low),
        };
        if !ok {
            let (msb, lsb) = (sig.msb, sig.lsb);
            out.push(Diagnostic::error(Category::Semantic, codes::SELECT_OUT_OF_RANGE, src, span, |q| {
                format!("bit-select {q} is out of range; '{name}' is declared [{msb}:{lsb}]")
            }));
        }
    }
    out
}

fn signal_names(iface: &ModuleInterface) -> String {
    iface.signals.iter().map(|s| s.name.as_str()).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sva::parse_assertion;

    fn iface(src: &str) -> ModuleInterface {
        extract_interface(src, &NameLists::default()).unwrap()
    }

    #[test]
    fn flip_flop_header() {
        let i = iface("module m(input clk, input d, output reg q); always @(posedge clk) q <= d; endmodule");
        assert_eq!(i.clock.as_deref(), Some("clk"));
        assert_eq!(i.mode, Mode::Sequential);
        assert_eq!(i.signals.len(), 3);
        assert_eq!(i.signals[2], SignalDecl::new("q", Direction::Output, 0, 0));
    }

    #[test]
    fn clockless_mux() {
        let i = iface("module mux(input [3:0] a, input sel, output y);\n assign y = sel ? a[0] : a[1];\nendmodule");
        assert_eq!(i.clock, None);
        assert_eq!(i.mode, Mode::Combinational);
        assert_eq!(i.signal("a").unwrap().width, 4);
    }

    #[test]
    fn body_declarations_and_params() {
        let src = "module f #(parameter W = 4) (input clk, input rst_n, input [W-1:0] x, output y);\n\
                   localparam S0 = 2'd0, S1 = 2'd1;\n\
                   reg [1:0] state, next_state;\n\
                   wire [W:0] sum = x + 1;\n\
                   always @(*) begin reg_like = 1; end\n\
                   integer k;\n\
                   endmodule";
        let i = iface(src);
        assert_eq!(i.signal("x").unwrap().width, 4);
        assert_eq!(i.signal("state").unwrap().width, 2);
        assert_eq!(i.signal("next_state").unwrap().direction, Direction::Internal);
        assert_eq!(i.signal("sum").unwrap().width, 5);
        assert_eq!(i.signal("k").unwrap().width, 32);
        assert_eq!(i.parameter("S1"), Some(1));
        assert_eq!(i.parameter("W"), Some(4));
        assert_eq!(i.reset.as_deref(), Some("rst_n"));
        assert!(i.signal("reg_like").is_none());
    }

    #[test]
    fn rejects_non_ansi_and_multiple_modules() {
        let e = extract_interface("module m(a, b); input a; output b; endmodule", &NameLists::default()).unwrap_err();
        assert_eq!(e.code, rtl_codes::NON_ANSI);
        let e = extract_interface("module a(); endmodule module b(); endmodule", &NameLists::default()).unwrap_err();
        assert_eq!(e.code, rtl_codes::MULTIPLE_MODULES);
        let e = extract_interface("// nothing here", &NameLists::default()).unwrap_err();
        assert_eq!(e.code, rtl_codes::NO_MODULE);
    }

    #[test]
    fn detect_mode_by_name() {
        let n = NameLists::default();
        assert_eq!(detect_mode(["clk", "d", "q"], &n), Mode::Sequential);
        assert_eq!(detect_mode(["a", "b", "y"], &n), Mode::Combinational);
        assert_eq!(detect_mode(["clock_i", "rst_n", "d"], &n), Mode::Sequential);
        assert_eq!(detect_mode(["CLK"], &n), Mode::Sequential);
    }

    #[test]
    fn resolve_clean_and_unknown() {
        let i = iface("module m(input clk, input a, input b); endmodule");
        let d = parse_assertion("assert property (@(posedge clk) a |-> b);").unwrap();
        assert!(resolve_names(&d, &i).is_empty());

        let d = parse_assertion("assert property (@(posedge clk) name.pattern_detected |=> b);").unwrap();
        let diags = resolve_names(&d, &i);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, codes::UNKNOWN_IDENT);
        assert_eq!(diags[0].quoted_fragment, "name.pattern_detected");
        assert!(diags[0].message.contains("unknown identifier «name.pattern_detected»"));
    }

    #[test]
    fn select_bounds() {
        let i = iface("module m(input [3:0] a); endmodule");
        let d = parse_assertion("assert (a[5]);").unwrap();
        let diags = resolve_names(&d, &i);
        assert_eq!(diags[0].code, codes::SELECT_OUT_OF_RANGE);
        assert_eq!(diags[0].quoted_fragment, "a[5]");
        assert!(resolve_names(&parse_assertion("assert (a[3] && a[3:0] == 0);").unwrap(), &i).is_empty());
        assert_eq!(resolve_names(&parse_assertion("assert (a[4:1]);").unwrap(), &i).len(), 1);
    }

    #[test]
    fn clocking_must_name_the_clock() {
        let i = iface("module m(input clk, input a); endmodule");
        let d = parse_assertion("assert property (@(posedge a) a);").unwrap();
        let diags = resolve_names(&d, &i);
        assert_eq!(diags[0].code, codes::NOT_A_CLOCK);
        assert_eq!(diags[0].quoted_fragment, "a");
        let comb = iface("module m(input a); endmodule");
        let d = parse_assertion("assert property (@(posedge clk) a);").unwrap();
        assert_eq!(resolve_names(&d, &comb)[0].code, codes::NOT_A_CLOCK);
    }
}
