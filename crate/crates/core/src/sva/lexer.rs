use super::ast::{Base, Literal};
use super::diag::{codes, Category, Diagnostic, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    SysIdent(String),
    Number(Literal),
    KwAssert,
    KwProperty,
    KwPosedge,
    KwNegedge,
    KwDisable,
    KwIff,
    KwNot,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    Semi,
    Comma,
    At,
    HashHash,
    Dollar,
    ImplOverlap,
    ImplNext,
    Bang,
    Tilde,
    Minus,
    Plus,
    AndAnd,
    OrOr,
    And,
    Or,
    Caret,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(n) => format!("identifier '{n}'"),
            Tok::SysIdent(n) => format!("system function '{n}'"),
            Tok::Number(_) => "number".to_string(),
            Tok::Eof => "end of input".to_string(),
            other => format!("'{}'", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::KwAssert => "assert",
            Tok::KwProperty => "property",
            Tok::KwPosedge => "posedge",
            Tok::KwNegedge => "negedge",
            Tok::KwDisable => "disable",
            Tok::KwIff => "iff",
            Tok::KwNot => "not",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::At => "@",
            Tok::HashHash => "##",
            Tok::Dollar => "$",
            Tok::ImplOverlap => "|->",
            Tok::ImplNext => "|=>",
            Tok::Bang => "!",
            Tok::Tilde => "~",
            Tok::Minus => "-",
            Tok::Plus => "+",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Caret => "^",
            Tok::EqEq => "==",
            Tok::NotEq => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            _ => "",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// Splits `src` into tokens. Comments and whitespace are dropped. On any
/// lexical error the collected diagnostics are returned instead.
pub fn lex(src: &str) -> Result<Vec<Token>, Vec<Diagnostic>> {
    let mut lx = Lexer { src, bytes: src.as_bytes(), pos: 0, toks: Vec::new(), diags: Vec::new() };
    lx.run();
    if lx.diags.is_empty() {
        Ok(lx.toks)
    } else {
        Err(lx.diags)
    }
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    toks: Vec<Token>,
    diags: Vec<Diagnostic>,
}

/// Reserved SystemVerilog words outside the supported subset. Reporting
/// them by name beats a confusing parse error further on.
const UNSUPPORTED_KEYWORDS: &[&str] = &[
    "always", "and", "cover", "else", "eventually", "first_match", "implies", "inside", "intersect", "nexttime", "or",
    "s_always", "s_eventually", "s_nexttime", "s_until", "s_until_with", "sequence", "throughout", "until", "until_with",
    "within",
];

fn is_ident_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_'
}

fn is_ident_cont(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'$'
}

impl<'a> Lexer<'a> {
    fn peek(&self, off: usize) -> u8 {
        self.bytes.get(self.pos + off).copied().unwrap_or(0)
    }

    fn push(&mut self, tok: Tok, start: usize) {
        let span = Span::locate(self.src, start, self.pos);
        self.toks.push(Token { tok, span });
    }

    fn error(&mut self, code: &str, start: usize, end: usize, msg: impl FnOnce(&str) -> String) -> &mut Diagnostic {
        let span = Span::locate(self.src, start, end);
        self.diags.push(Diagnostic::error(Category::Lex, code, self.src, span, msg));
        self.diags.last_mut().unwrap()
    }

    fn run(&mut self) {
        while self.pos < self.bytes.len() {
            let c = self.peek(0);
            let start = self.pos;
            if c.is_ascii_whitespace() {
                self.pos += 1;
                continue;
            }
            if c == b'/' && self.peek(1) == b'/' {
                while self.pos < self.bytes.len() && self.peek(0) != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            if c == b'/' && self.peek(1) == b'*' {
                match self.src[self.pos + 2..].find("*/") {
                    Some(i) => self.pos += 2 + i + 2,
                    None => {
                        self.pos = self.bytes.len();
                        self.error(codes::ILLEGAL_CHAR, start, start + 2, |q| {
                            format!("comment opened by {q} is never closed")
                        });
                    }
                }
                continue;
            }
            if is_ident_start(c) {
                self.ident(start);
                continue;
            }
            if c == b'$' {
                self.pos += 1;
                if is_ident_start(self.peek(0)) {
                    while is_ident_cont(self.peek(0)) {
                        self.pos += 1;
                    }
                    let name = self.src[start..self.pos].to_string();
                    self.push(Tok::SysIdent(name), start);
                } else {
                    self.push(Tok::Dollar, start);
                }
                continue;
            }
            if c.is_ascii_digit() || c == b'\'' {
                self.number(start);
                continue;
            }
            if c == b'"' {
                self.pos = self.src[start + 1..].find('"').map_or(self.bytes.len(), |i| start + i + 2);
                self.error(codes::ILLEGAL_CHAR, start, self.pos, |q| {
                    format!("string literal {q} cannot appear in an assertion")
                })
                .hint = Some("action blocks such as `else $error(...)` are not supported; end the assertion after its ')'".into());
                continue;
            }
            let (tok, len) = match (c, self.peek(1), self.peek(2)) {
                (b'=' | b'!', b'=', b'=') => {
                    self.pos += 3;
                    self.error(codes::ILLEGAL_CHAR, start, self.pos, |q| {
                        format!("case equality operator {q} is not supported")
                    })
                    .hint = Some("use '==' or '!=' instead".into());
                    continue;
                }
                (b'|', b'-', b'>') => (Tok::ImplOverlap, 3),
                (b'|', b'=', b'>') => (Tok::ImplNext, 3),
                (b'#', b'#', _) => (Tok::HashHash, 2),
                (b'&', b'&', _) => (Tok::AndAnd, 2),
                (b'|', b'|', _) => (Tok::OrOr, 2),
                (b'=', b'=', _) => (Tok::EqEq, 2),
                (b'!', b'=', _) => (Tok::NotEq, 2),
                (b'<', b'=', _) => (Tok::Le, 2),
                (b'>', b'=', _) => (Tok::Ge, 2),
                (b'(', ..) => (Tok::LParen, 1),
                (b')', ..) => (Tok::RParen, 1),
                (b'[', ..) => (Tok::LBracket, 1),
                (b']', ..) => (Tok::RBracket, 1),
                (b':', ..) => (Tok::Colon, 1),
                (b';', ..) => (Tok::Semi, 1),
                (b',', ..) => (Tok::Comma, 1),
                (b'@', ..) => (Tok::At, 1),
                (b'!', ..) => (Tok::Bang, 1),
                (b'~', ..) => (Tok::Tilde, 1),
                (b'-', ..) => (Tok::Minus, 1),
                (b'+', ..) => (Tok::Plus, 1),
                (b'&', ..) => (Tok::And, 1),
                (b'|', ..) => (Tok::Or, 1),
                (b'^', ..) => (Tok::Caret, 1),
                (b'<', ..) => (Tok::Lt, 1),
                (b'>', ..) => (Tok::Gt, 1),
                (b'=', b'>', _) => {
                    self.pos += 2;
                    self.error(codes::ILLEGAL_CHAR, start, self.pos, |q| {
                        format!("operator {q} is not valid SystemVerilog")
                    })
                    .hint = Some("write '|=>' for next-cycle implication or '|->' for same-cycle".into());
                    continue;
                }
                (b'=', ..) => {
                    self.pos += 1;
                    self.error(codes::ILLEGAL_CHAR, start, self.pos, |q| {
                        format!("assignment operator {q} cannot appear in an assertion")
                    })
                    .hint = Some("use '==' to compare values".into());
                    continue;
                }
                _ => {
                    let ch_len = self.src[start..].chars().next().map_or(1, char::len_utf8);
                    self.pos += ch_len;
                    self.error(codes::ILLEGAL_CHAR, start, self.pos, |q| {
                        format!("illegal character {q}")
                    });
                    continue;
                }
            };
            self.pos += len;
            self.push(tok, start);
        }
        let end = self.bytes.len();
        self.toks.push(Token { tok: Tok::Eof, span: Span::locate(self.src, end, end) });
    }

    fn ident(&mut self, start: usize) {
        loop {
            while is_ident_cont(self.peek(0)) {
                self.pos += 1;
            }
            // hierarchical names such as `top.u0.sig` stay one token
            if self.peek(0) == b'.' && is_ident_start(self.peek(1)) {
                self.pos += 1;
                continue;
            }
            break;
        }
        let text = &self.src[start..self.pos];
        let tok = match text {
            "assert" => Tok::KwAssert,
            "property" => Tok::KwProperty,
            "posedge" => Tok::KwPosedge,
            "negedge" => Tok::KwNegedge,
            "disable" => Tok::KwDisable,
            "iff" => Tok::KwIff,
            "not" => Tok::KwNot,
            _ if UNSUPPORTED_KEYWORDS.contains(&text) => {
                let span = Span::locate(self.src, start, self.pos);
                self.diags.push(
                    Diagnostic::error(Category::Parse, codes::UNSUPPORTED, self.src, span, |q| {
                        format!("SVA keyword {q} is not supported")
                    })
                    .with_hint("supported property forms are |->, |=>, ##N, ##[m:n], not and disable iff over boolean expressions"),
                );
                return;
            }
            _ => Tok::Ident(text.to_string()),
        };
        self.push(tok, start);
    }

    fn digits(&mut self, accept: impl Fn(u8) -> bool) -> &'a str {
        let s = self.pos;
        while accept(self.peek(0)) || self.peek(0) == b'_' {
            self.pos += 1;
        }
        &self.src[s..self.pos]
    }

    fn number(&mut self, start: usize) {
        let mut width = None;
        if self.peek(0).is_ascii_digit() {
            let text = self.digits(|b| b.is_ascii_digit());
            if self.peek(0) != b'\'' {
                match parse_digits(text, 10) {
                    Some(value) => {
                        self.push(Tok::Number(Literal::Number { width: None, base: Base::Dec, value }), start)
                    }
                    None => {
                        self.error(codes::MALFORMED_NUMBER, start, self.pos, |q| {
                            format!("number {q} does not fit in 64 bits")
                        });
                    }
                }
                return;
            }
            match parse_digits(text, 10) {
                Some(w) if (1..=64).contains(&w) => width = Some(w as u32),
                _ => {
                    self.pos += 1;
                    self.error(codes::MALFORMED_NUMBER, start, self.pos, |q| {
                        format!("literal width in {q} must be between 1 and 64")
                    });
                    self.skip_based_digits();
                    return;
                }
            }
        }
        // at the apostrophe
        self.pos += 1;
        let base = match self.peek(0) {
            b'0' | b'1' if width.is_none() => {
                let bit = self.peek(0) == b'1';
                self.pos += 1;
                self.push(Tok::Number(Literal::Fill(bit)), start);
                return;
            }
            b'b' | b'B' => Base::Bin,
            b'o' | b'O' => Base::Oct,
            b'd' | b'D' => Base::Dec,
            b'h' | b'H' => Base::Hex,
            b's' | b'S' => {
                self.pos += 1;
                self.error(codes::MALFORMED_NUMBER, start, self.pos, |q| {
                    format!("signed literal {q} is not supported")
                });
                self.skip_based_digits();
                return;
            }
            _ => {
                self.error(codes::MALFORMED_NUMBER, start, self.pos, |q| {
                    format!("{q} must be followed by a base letter (b, o, d, h) or by 0/1")
                });
                return;
            }
        };
        self.pos += 1;
        let digits_start = self.pos;
        let radix = base.radix();
        let text = self.digits(|b| b.is_ascii_alphanumeric());
        if text.is_empty() {
            self.error(codes::MALFORMED_NUMBER, start, self.pos, |q| {
                format!("literal {q} has no digits")
            });
            return;
        }
        if text.bytes().any(|b| matches!(b, b'x' | b'X' | b'z' | b'Z' | b'?')) {
            self.error(codes::MALFORMED_NUMBER, start, self.pos, |q| {
                format!("x/z digits in {q} are not supported")
            });
            return;
        }
        let Some(value) = parse_digits(text, radix) else {
            self.error(codes::MALFORMED_NUMBER, start, self.pos, |q| {
                format!("{q} is not a valid base-{radix} literal")
            });
            return;
        };
        if let Some(w) = width {
            if w < 64 && value >> w != 0 {
                self.error(codes::MALFORMED_NUMBER, start, self.pos, |q| {
                    format!("value of {q} does not fit in {w} bits")
                });
                return;
            }
        }
        debug_assert!(digits_start <= self.pos);
        self.push(Tok::Number(Literal::Number { width, base, value }), start);
    }

    fn skip_based_digits(&mut self) {
        while self.peek(0).is_ascii_alphanumeric() || self.peek(0) == b'_' {
            self.pos += 1;
        }
    }
}

fn parse_digits(text: &str, radix: u32) -> Option<u64> {
    let cleaned: String = text.chars().filter(|&c| c != '_').collect();
    if cleaned.is_empty() {
        return None;
    }
    u64::from_str_radix(&cleaned, radix).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        lex(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn operators_longest_match() {
        assert_eq!(
            toks("a |-> b |=> c || d | e"),
            vec![
                Tok::Ident("a".into()),
                Tok::ImplOverlap,
                Tok::Ident("b".into()),
                Tok::ImplNext,
                Tok::Ident("c".into()),
                Tok::OrOr,
                Tok::Ident("d".into()),
                Tok::Or,
                Tok::Ident("e".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn literals() {
        assert_eq!(
            toks("4'b1101 'hF '0 '1 12 8'd2_5"),
            vec![
                Tok::Number(Literal::Number { width: Some(4), base: Base::Bin, value: 13 }),
                Tok::Number(Literal::Number { width: None, base: Base::Hex, value: 15 }),
                Tok::Number(Literal::Fill(false)),
                Tok::Number(Literal::Fill(true)),
                Tok::Number(Literal::Number { width: None, base: Base::Dec, value: 12 }),
                Tok::Number(Literal::Number { width: Some(8), base: Base::Dec, value: 25 }),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn literal_overflowing_width_is_rejected() {
        let d = lex("2'b111").unwrap_err();
        assert_eq!(d[0].code, codes::MALFORMED_NUMBER);
        assert_eq!(d[0].quoted_fragment, "2'b111");
    }

    #[test]
    fn dotted_names_are_single_tokens() {
        assert_eq!(toks("name.pattern_detected")[0], Tok::Ident("name.pattern_detected".into()));
    }

    #[test]
    fn comments_are_skipped() {
        assert_eq!(toks("a // x\n /* y */ b").len(), 3);
    }

    #[test]
    fn bare_arrow_gets_hint() {
        let d = lex("a => b").unwrap_err();
        assert_eq!(d[0].quoted_fragment, "=>");
        assert!(d[0].hint.as_deref().unwrap().contains("|=>"));
    }

    #[test]
    fn non_ascii_is_illegal_not_a_panic() {
        let d = lex("a ≥ b").unwrap_err();
        assert_eq!(d[0].quoted_fragment, "≥");
    }

    #[test]
    fn unsupported_constructs_are_named() {
        let d = lex("assert (a === b);").unwrap_err();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].quoted_fragment, "===");
        let d = lex("assert property (@(posedge clk) a) else $error(\"bad\");").unwrap_err();
        let frags: Vec<&str> = d.iter().map(|d| d.quoted_fragment.as_str()).collect();
        assert_eq!(frags, ["else", "\"bad\""]);
        let d = lex("assert property (@(posedge clk) a |-> s_eventually b);").unwrap_err();
        assert_eq!((d[0].code.as_str(), d[0].quoted_fragment.as_str()), (codes::UNSUPPORTED, "s_eventually"));
        assert!(lex("assert (order && andy);").is_ok());
    }
}
