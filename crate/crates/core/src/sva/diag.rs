//! Span-carrying diagnostics that quote the offending source text inline.
//!
//! Every message embeds the exact fragment it complains about between
//! guillemets, so a reader (human or model) never has to count words or
//! columns to find the problem.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A byte range into a source string plus the 1-based position of its start.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub column: u32,
}

impl Span {
    /// Builds a span for `start..end` in `source`, computing line and column.
    ///
    /// Offsets past the end of `source` are clamped and non-char-boundary
    /// offsets are moved back to the nearest boundary.
    pub fn locate(source: &str, start: usize, end: usize) -> Span {
        let start = floor_boundary(source, start.min(source.len()));
        let end = floor_boundary(source, end.clamp(start, source.len())).max(start);
        let before = &source[..start];
        let line = before.matches('\n').count() as u32 + 1;
        let line_start = before.rfind('\n').map_or(0, |i| i + 1);
        let column = source[line_start..start].chars().count() as u32 + 1;
        Span {
            start,
            end,
            line,
            column,
        }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// Smallest span covering both `self` and `other`. Line/column come from
    /// whichever starts first.
    pub fn to(self, other: Span) -> Span {
        let first = if self.start <= other.start { self } else { other };
        Span {
            start: first.start,
            end: self.end.max(other.end),
            line: first.line,
            column: first.column,
        }
    }
}

fn floor_boundary(s: &str, mut i: usize) -> usize {
    while i > 0 && !s.is_char_boundary(i) {
        i -= 1;
    }
    i
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Lex,
    Parse,
    Semantic,
}

impl Category {
    fn phrase(self) -> &'static str {
        match self {
            Category::Lex => "lexical error",
            Category::Parse => "syntax error",
            Category::Semantic => "semantic error",
        }
    }
}

/// Stable diagnostic codes. The repair loop and the golden corpus key on
/// these strings, so never renumber an existing code.
pub mod codes {
    pub const UNBALANCED_PAREN: &str = "E001";
    pub const UNEXPECTED_TOKEN: &str = "E002";
    pub const UNEXPECTED_EOF: &str = "E003";
    pub const MISSING_SEMICOLON: &str = "E004";
    pub const UNSUPPORTED: &str = "E005";
    pub const DISABLE_IFF_PLACEMENT: &str = "E006";
    pub const TRAILING_INPUT: &str = "E007";
    pub const UNCLOCKED_TEMPORAL: &str = "E008";
    pub const BAD_DELAY_RANGE: &str = "E009";
    pub const BAD_SELECT: &str = "E010";
    pub const BAD_PAST_COUNT: &str = "E011";
    pub const BAD_LITERAL: &str = "E012";

    pub const ILLEGAL_CHAR: &str = "E100";
    pub const MALFORMED_NUMBER: &str = "E101";

    pub const UNKNOWN_IDENT: &str = "E201";
    pub const SELECT_OUT_OF_RANGE: &str = "E202";
    pub const NOT_A_CLOCK: &str = "E203";
    pub const NOT_OBSERVABLE: &str = "E205";

    pub const NO_ASSERTION: &str = "E300";

    pub const COMB_DELAY: &str = "E_COMB_DELAY";
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub category: Category,
    pub code: String,
    pub message: String,
    pub span: Span,
    pub quoted_fragment: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hint: Option<String>,
}

impl Diagnostic {
    /// Creates an error whose message is produced by `message`, which
    /// receives the already-quoted fragment (`«...»`) to splice in.
    pub fn error(
        category: Category,
        code: &str,
        source: &str,
        span: Span,
        message: impl FnOnce(&str) -> String,
    ) -> Diagnostic {
        let fragment = source[span.start..span.end].to_string();
        let quoted = quote(&fragment);
        Diagnostic {
            severity: Severity::Error,
            category,
            code: code.to_string(),
            message: message(&quoted),
            span,
            quoted_fragment: fragment,
            hint: None,
        }
    }

    pub fn with_hint(mut self, hint: impl Into<String>) -> Diagnostic {
        self.hint = Some(hint.into());
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]: {}", severity_word(self.severity), self.code, self.message)
    }
}

pub fn quote(fragment: &str) -> String {
    format!("«{fragment}»")
}

fn severity_word(s: Severity) -> &'static str {
    match s {
        Severity::Error => "error",
        Severity::Warning => "warning",
    }
}

/// Renders one diagnostic against its source.
///
/// The output names the fragment, repeats the diagnostic message, and ends
/// with the complete source line(s) containing the span:
///
/// ```text
/// error[E001]: syntax error near «;» - expected ')' before «;» in: assert property (a |-> b;
/// ```
pub fn render_diagnostic(diag: &Diagnostic, source: &str) -> String {
    let start = diag.span.start.min(source.len());
    let end = diag.span.end.clamp(start, source.len());
    let line_start = source[..start].rfind('\n').map_or(0, |i| i + 1);
    let line_end = source[end..].find('\n').map_or(source.len(), |i| end + i);
    let context = source[line_start..line_end].trim_end_matches('\r');

    let mut out = format!(
        "{}[{}]: {} near {} - {}",
        severity_word(diag.severity),
        diag.code,
        diag.category.phrase(),
        quote(&diag.quoted_fragment),
        diag.message,
    );
    if context.contains('\n') {
        out.push_str(" in:\n");
        for line in context.lines() {
            out.push_str("    ");
            out.push_str(line);
            out.push('\n');
        }
        out.pop();
    } else {
        out.push_str(" in: ");
        out.push_str(context);
    }
    if let Some(hint) = &diag.hint {
        out.push_str("\n  hint: ");
        out.push_str(hint);
    }
    out
}

/// Renders diagnostics in order, separated by blank lines.
pub fn render_all(diags: &[Diagnostic], source: &str) -> String {
    diags
        .iter()
        .map(|d| render_diagnostic(d, source))
        .collect::<Vec<_>>()
        .join("\n\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locate_counts_lines_and_columns() {
        let src = "ab\ncd ef";
        let sp = Span::locate(src, 6, 8);
        assert_eq!((sp.line, sp.column), (2, 4));
        assert_eq!(&src[sp.start..sp.end], "ef");
    }

    #[test]
    fn locate_clamps_out_of_range() {
        let sp = Span::locate("abc", 10, 20);
        assert_eq!((sp.start, sp.end), (3, 3));
    }

    #[test]
    fn locate_respects_char_boundaries() {
        let src = "a«b";
        let sp = Span::locate(src, 2, 3);
        assert!(src.is_char_boundary(sp.start) && src.is_char_boundary(sp.end));
    }

    #[test]
    fn full_span_quotes_line_once_in_context() {
        let src = "assert property (zz);";
        let sp = Span::locate(src, 0, src.len());
        let d = Diagnostic::error(Category::Parse, codes::UNSUPPORTED, src, sp, |q| {
            format!("cannot use {q} here")
        });
        let out = render_diagnostic(&d, src);
        assert_eq!(out.matches(" in: assert property (zz);").count(), 1);
        assert!(out.ends_with("in: assert property (zz);"));
    }

    #[test]
    fn multiple_diagnostics_keep_order_with_blank_lines() {
        let src = "x y";
        let a = Diagnostic::error(Category::Parse, "E002", src, Span::locate(src, 0, 1), |q| {
            format!("first {q}")
        });
        let b = Diagnostic::error(Category::Parse, "E002", src, Span::locate(src, 2, 3), |q| {
            format!("second {q}")
        });
        let out = render_all(&[a, b], src);
        let parts: Vec<_> = out.split("\n\n").collect();
        assert_eq!(parts.len(), 2);
        assert!(parts[0].contains("first «x»"));
        assert!(parts[1].contains("second «y»"));
    }

    #[test]
    fn multi_line_span_renders_every_line() {
        let src = "assert property (a\n |-> b;";
        let d = Diagnostic::error(Category::Parse, "E001", src, Span::locate(src, 17, src.len()), |q| {
            format!("unclosed {q}")
        });
        let out = render_diagnostic(&d, src);
        assert!(out.contains("    assert property (a\n     |-> b;"));
    }
}
