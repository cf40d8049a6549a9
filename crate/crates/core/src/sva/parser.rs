//! Recursive-descent parser for the assertion grammar in `docs/grammar.md`.
//!
//! Parentheses are ambiguous between the boolean, sequence and property
//! layers, so the parser tries the wider reading first and backtracks.
//! Every failed attempt records its error; the one that got furthest into
//! the input is the one reported.

use std::collections::HashSet;

use super::ast::*;
use super::diag::{codes, Category, Diagnostic, Span};
use super::lexer::{lex, Tok, Token};

type PResult<T> = Result<T, ()>;

/// Parses one `assert property (...);` or `assert (...);` statement.
pub fn parse_assertion(source: &str) -> Result<AssertionDecl, Vec<Diagnostic>> {
    let toks = lex(source)?;
    let mut p = Parser::new(source, toks);
    match p.statement() {
        Ok(decl) => {
            let diags = structural_checks(&decl, &p, source);
            if diags.is_empty() {
                Ok(decl)
            } else {
                Err(diags)
            }
        }
        Err(()) => Err(vec![p.take_error()]),
    }
}

/// Parses a standalone boolean expression, as used by behavioral model files.
pub fn parse_bool_expr(source: &str) -> Result<BoolExpr, Vec<Diagnostic>> {
    let toks = lex(source)?;
    let mut p = Parser::new(source, toks);
    let result = p.bool_expr(0).and_then(|e| {
        if p.at(&Tok::Eof) {
            Ok(e)
        } else {
            p.unexpected("expected an operator or the end of the expression")
        }
    });
    result.map_err(|()| vec![p.take_error()])
}

fn structural_checks(decl: &AssertionDecl, p: &Parser, source: &str) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if decl.clocking.is_none() {
        if let Some(span) = p.first_temporal {
            out.push(
                Diagnostic::error(Category::Parse, codes::UNCLOCKED_TEMPORAL, source, span, |q| {
                    format!("temporal construct {q} needs a clocking event")
                })
                .with_hint("add '@(posedge clk)' at the start of the property, or drop the temporal construct"),
            );
        }
    }
    out
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
    best: Option<Diagnostic>,
    first_temporal: Option<Span>,
    /// (token index, rule) pairs already known to fail; keeps nested
    /// parentheses from backtracking exponentially.
    failed: HashSet<(usize, Rule)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Rule {
    ParenProperty,
    ParenSequence,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, toks: Vec<Token>) -> Parser<'a> {
        Parser { src, toks, pos: 0, best: None, first_temporal: None, failed: HashSet::new() }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn at(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.at(t) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn prev_span(&self) -> Span {
        if self.pos == 0 {
            self.span()
        } else {
            self.toks[self.pos - 1].span
        }
    }

    fn note_temporal(&mut self, span: Span) {
        if self.first_temporal.map_or(true, |s| span.start < s.start) {
            self.first_temporal = Some(span);
        }
    }

    fn record(&mut self, d: Diagnostic) {
        let replace = match &self.best {
            None => true,
            Some(b) => d.span.start > b.span.start,
        };
        if replace {
            self.best = Some(d);
        }
    }

    fn take_error(&mut self) -> Diagnostic {
        self.best.take().expect("parse failure without a diagnostic")
    }

    fn fail<T>(&mut self, code: &str, span: Span, msg: impl FnOnce(&str) -> String) -> PResult<T> {
        let d = Diagnostic::error(Category::Parse, code, self.src, span, msg);
        self.record(d);
        Err(())
    }

    fn fail_hint<T>(
        &mut self,
        code: &str,
        span: Span,
        hint: &str,
        msg: impl FnOnce(&str) -> String,
    ) -> PResult<T> {
        let d = Diagnostic::error(Category::Parse, code, self.src, span, msg).with_hint(hint);
        self.record(d);
        Err(())
    }

    /// Error at the current token. At end of input the previous token is
    /// quoted instead so the fragment is never empty.
    fn unexpected<T>(&mut self, expected: &str) -> PResult<T> {
        if self.at(&Tok::Eof) {
            let sp = self.prev_span();
            if self.pos == 0 {
                return self.fail(codes::UNEXPECTED_EOF, sp, |q| format!("empty input {q}; {expected}"));
            }
            return self.fail(codes::UNEXPECTED_EOF, sp, |q| {
                format!("input ends after {q}; {expected}")
            });
        }
        let sp = self.span();
        let found = self.peek().describe();
        self.fail(codes::UNEXPECTED_TOKEN, sp, |q| format!("{expected}, found {found} {q}"))
    }

    fn expect(&mut self, t: Tok, expected: &str) -> PResult<Token> {
        if self.at(&t) {
            Ok(self.bump())
        } else {
            self.unexpected(expected)
        }
    }

    fn expect_close(&mut self) -> PResult<()> {
        if self.eat(&Tok::RParen) {
            return Ok(());
        }
        let hint = "every '(' needs a matching ')'";
        if self.at(&Tok::Eof) {
            let sp = self.prev_span();
            self.fail_hint(codes::UNBALANCED_PAREN, sp, hint, |q| format!("expected ')' after {q}"))
        } else {
            let sp = self.span();
            self.fail_hint(codes::UNBALANCED_PAREN, sp, hint, |q| format!("expected ')' before {q}"))
        }
    }

    // ---- statement layer ----

    fn statement(&mut self) -> PResult<AssertionDecl> {
        let first = self.span();
        let mut label = None;
        if let (Tok::Ident(name), Tok::Colon) = (self.peek().clone(), self.peek_at(1)) {
            label = Some(name);
            self.bump();
            self.bump();
        }
        if !self.at(&Tok::KwAssert) {
            return self.unexpected("expected 'assert'");
        }
        self.bump();

        let (clocking, property) = if self.eat(&Tok::KwProperty) {
            self.expect(Tok::LParen, "expected '(' after 'assert property'")?;
            let clocking = self.clocking()?;
            let property = self.property_spec()?;
            self.expect_close()?;
            (clocking, property)
        } else if self.at(&Tok::LParen) {
            self.bump();
            let e = self.bool_expr(0)?;
            if matches!(self.peek(), Tok::ImplOverlap | Tok::ImplNext | Tok::HashHash) {
                let sp = self.span();
                return self.fail_hint(
                    codes::UNBALANCED_PAREN,
                    sp,
                    "immediate assertions take a boolean expression; use 'assert property' for temporal properties",
                    |q| format!("expected ')' before {q}"),
                );
            }
            self.expect_close()?;
            (None, PropertyExpr::Seq(SequenceExpr::Bool(e)))
        } else {
            return self.unexpected("expected 'property' or '(' after 'assert'");
        };

        if !self.at(&Tok::Semi) {
            if self.at(&Tok::Eof) {
                let sp = self.prev_span();
                return self.fail(codes::MISSING_SEMICOLON, sp, |q| format!("expected ';' after {q}"));
            }
            if self.at(&Tok::RParen) {
                let sp = self.span();
                return self.fail_hint(
                    codes::UNBALANCED_PAREN,
                    sp,
                    "every ')' needs a matching '('",
                    |q| format!("unmatched {q}"),
                );
            }
            let sp = self.span();
            return self.fail(codes::MISSING_SEMICOLON, sp, |q| format!("expected ';' before {q}"));
        }
        let semi = self.bump();
        if !self.at(&Tok::Eof) {
            let sp = self.span();
            return self.fail_hint(
                codes::TRAILING_INPUT,
                sp,
                "submit exactly one assertion per request",
                |q| format!("unexpected {q} after the end of the assertion"),
            );
        }
        Ok(AssertionDecl {
            label,
            clocking,
            property,
            source_span: first.to(semi.span),
            raw_text: self.src.to_string(),
        })
    }

    fn clocking(&mut self) -> PResult<Option<Clocking>> {
        if !self.at(&Tok::At) {
            return Ok(None);
        }
        let at = self.bump().span;
        self.expect(Tok::LParen, "expected '(' after '@'")?;
        let edge = match self.peek() {
            Tok::KwPosedge => Edge::Posedge,
            Tok::KwNegedge => Edge::Negedge,
            _ => return self.unexpected("expected 'posedge' or 'negedge'"),
        };
        self.bump();
        let (signal, sig_span) = match self.peek().clone() {
            Tok::Ident(n) => (n, self.bump().span),
            _ => return self.unexpected("expected a clock signal name"),
        };
        self.expect_close()?;
        let _ = at;
        Ok(Some(Clocking { edge, signal, span: sig_span }))
    }

    fn property_spec(&mut self) -> PResult<PropertyExpr> {
        if self.at(&Tok::KwDisable) {
            self.bump();
            self.expect(Tok::KwIff, "expected 'iff' after 'disable'")?;
            self.expect(Tok::LParen, "expected '(' after 'disable iff'")?;
            let condition = self.bool_expr(0)?;
            self.expect_close()?;
            if self.at(&Tok::At) {
                let sp = self.span();
                return self.fail_hint(
                    codes::UNEXPECTED_TOKEN,
                    sp,
                    "write the clocking event before 'disable iff'",
                    |q| format!("clocking event {q} must come first"),
                );
            }
            let body = self.property()?;
            return Ok(PropertyExpr::DisableIff { condition, body: Box::new(body) });
        }
        self.property()
    }

    // ---- property layer ----

    fn property(&mut self) -> PResult<PropertyExpr> {
        match self.peek() {
            Tok::KwDisable => {
                let sp = self.span();
                self.fail_hint(
                    codes::DISABLE_IFF_PLACEMENT,
                    sp,
                    "use a single 'disable iff (...)' directly after the clocking event",
                    |q| format!("{q} iff may only appear once, at the start of the property"),
                )
            }
            Tok::KwNot => {
                self.bump();
                let inner = self.property()?;
                Ok(PropertyExpr::Not(Box::new(inner)))
            }
            Tok::LParen => {
                let save = self.pos;
                if self.failed.insert((save, Rule::ParenProperty)) {
                    if let Ok(p) = self.paren_property() {
                        self.failed.remove(&(save, Rule::ParenProperty));
                        return Ok(p);
                    }
                    self.pos = save;
                }
                self.implication()
            }
            _ => self.implication(),
        }
    }

    /// `( property )` where the inner property is more than a bare sequence
    /// and nothing but the end of a property follows.
    fn paren_property(&mut self) -> PResult<PropertyExpr> {
        self.bump();
        let inner = self.property()?;
        self.expect_close()?;
        if matches!(inner, PropertyExpr::Seq(_)) {
            return Err(());
        }
        if !matches!(self.peek(), Tok::RParen | Tok::Semi | Tok::Eof) {
            return Err(());
        }
        Ok(inner)
    }

    fn implication(&mut self) -> PResult<PropertyExpr> {
        let seq = self.sequence()?;
        let kind = match self.peek() {
            Tok::ImplOverlap => ImplicationKind::Overlapped,
            Tok::ImplNext => {
                let sp = self.span();
                self.note_temporal(sp);
                ImplicationKind::NonOverlapped
            }
            _ => return Ok(PropertyExpr::Seq(seq)),
        };
        self.bump();
        let consequent = self.property()?;
        Ok(PropertyExpr::Implication { kind, antecedent: seq, consequent: Box::new(consequent) })
    }

    // ---- sequence layer ----

    fn sequence(&mut self) -> PResult<SequenceExpr> {
        let mut cur = if self.at(&Tok::HashHash) {
            let (span, min, max) = self.delay_range()?;
            let rhs = self.seq_atom()?;
            SequenceExpr::Delay { lhs: None, min, max, rhs: Box::new(rhs), span }
        } else {
            self.seq_atom()?
        };
        while self.at(&Tok::HashHash) {
            let (span, min, max) = self.delay_range()?;
            let rhs = self.seq_atom()?;
            cur = SequenceExpr::Delay { lhs: Some(Box::new(cur)), min, max, rhs: Box::new(rhs), span };
        }
        Ok(cur)
    }

    fn delay_range(&mut self) -> PResult<(Span, u32, Option<u32>)> {
        let start = self.bump().span;
        self.note_temporal(start);
        if self.eat(&Tok::LBracket) {
            let min = self.const_u32("expected a cycle count")?;
            self.expect(Tok::Colon, "expected ':' in delay range")?;
            if self.at(&Tok::Dollar) {
                let sp = self.span();
                return self.fail(codes::UNSUPPORTED, sp, |q| {
                    format!("unbounded delay range ending in {q} is not supported")
                });
            }
            let max = self.const_u32("expected a cycle count")?;
            let close = self.expect(Tok::RBracket, "expected ']' to close the delay range")?;
            let span = start.to(close.span);
            if max < min {
                return self.fail(codes::BAD_DELAY_RANGE, span, |q| {
                    format!("delay range {q} has its upper bound below its lower bound")
                });
            }
            Ok((span, min, Some(max)))
        } else {
            let n = self.const_u32("expected a cycle count or '[' after '##'")?;
            Ok((start.to(self.prev_span()), n, None))
        }
    }

    fn const_u32(&mut self, expected: &str) -> PResult<u32> {
        if let Tok::Number(Literal::Number { value, .. }) = *self.peek() {
            let sp = self.span();
            self.bump();
            return match u32::try_from(value) {
                Ok(v) => Ok(v),
                Err(_) => self.fail(codes::BAD_LITERAL, sp, |q| format!("constant {q} is too large")),
            };
        }
        self.unexpected(expected)
    }

    fn seq_atom(&mut self) -> PResult<SequenceExpr> {
        if self.at(&Tok::LParen) {
            let save = self.pos;
            if self.failed.insert((save, Rule::ParenSequence)) {
                if let Ok(s) = self.paren_sequence() {
                    self.failed.remove(&(save, Rule::ParenSequence));
                    return Ok(s);
                }
                self.pos = save;
            }
        }
        Ok(SequenceExpr::Bool(self.bool_expr(0)?))
    }

    fn paren_sequence(&mut self) -> PResult<SequenceExpr> {
        self.bump();
        let inner = self.sequence()?;
        self.expect_close()?;
        if !inner.has_delay() || binary_op(self.peek()).is_some() || self.at(&Tok::LBracket) {
            return Err(());
        }
        Ok(inner)
    }

    // ---- boolean layer ----

    fn bool_expr(&mut self, min_prec: u8) -> PResult<BoolExpr> {
        let mut lhs = self.unary()?;
        while let Some(op) = binary_op(self.peek()) {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.bump();
            let rhs = self.bool_expr(prec + 1)?;
            lhs = BoolExpr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<BoolExpr> {
        let op = match self.peek() {
            Tok::Bang => UnaryOp::LogNot,
            Tok::Tilde => UnaryOp::BitNot,
            Tok::Minus => UnaryOp::Neg,
            Tok::And | Tok::Or | Tok::Caret => {
                let sp = self.span();
                return self.fail(codes::UNSUPPORTED, sp, |q| {
                    format!("reduction operator {q} is not supported")
                });
            }
            _ => return self.primary(),
        };
        self.bump();
        let inner = self.unary()?;
        Ok(BoolExpr::unary(op, inner))
    }

    fn primary(&mut self) -> PResult<BoolExpr> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.bump().span;
                let select = if self.at(&Tok::LBracket) { Some(self.select()?) } else { None };
                let span = if select.is_some() { span.to(self.prev_span()) } else { span };
                Ok(BoolExpr::Ident { name, select, span })
            }
            Tok::Number(lit) => {
                self.bump();
                Ok(BoolExpr::Literal(lit))
            }
            Tok::SysIdent(name) => self.system_call(&name),
            Tok::LParen => {
                self.bump();
                let inner = self.bool_expr(0)?;
                self.expect_close()?;
                Ok(BoolExpr::Paren(Box::new(inner)))
            }
            _ => self.unexpected("expected an expression"),
        }
    }

    fn select(&mut self) -> PResult<Select> {
        let open = self.bump().span;
        if !matches!(self.peek(), Tok::Number(Literal::Number { .. })) {
            let sp = self.span();
            if self.at(&Tok::Eof) {
                return self.unexpected("expected a constant index");
            }
            return self.fail(codes::UNSUPPORTED, sp, |q| {
                format!("index {q} is not a constant; only constant bit-selects are supported")
            });
        }
        let high = self.const_u32("expected a constant index")?;
        if self.eat(&Tok::Colon) {
            let low = self.const_u32("expected a constant index")?;
            let close = self.expect(Tok::RBracket, "expected ']' to close the part-select")?;
            if high < low {
                let sp = open.to(close.span);
                return self.fail(codes::BAD_SELECT, sp, |q| {
                    format!("part-select {q} must be written [high:low]")
                });
            }
            return Ok(Select::Part { high, low });
        }
        self.expect(Tok::RBracket, "expected ']' to close the bit-select")?;
        Ok(Select::Bit(high))
    }

    fn system_call(&mut self, name: &str) -> PResult<BoolExpr> {
        let start = self.span();
        let Some(func) = SysFunc::from_name(name) else {
            return self.fail_hint(
                codes::UNSUPPORTED,
                start,
                "supported system functions are $past, $rose, $fell and $stable",
                |q| format!("system function {q} is not supported"),
            );
        };
        self.bump();
        self.note_temporal(start);
        self.expect(Tok::LParen, "expected '(' after the system function name")?;
        let arg = self.bool_expr(0)?;
        let mut cycles = None;
        if self.at(&Tok::Comma) {
            if func != SysFunc::Past {
                let sp = self.span();
                return self.fail(codes::UNSUPPORTED, sp, |q| {
                    format!("{} takes one argument; unexpected {q}", func.name())
                });
            }
            self.bump();
            let sp = self.span();
            let n = self.const_u32("expected a cycle count")?;
            if n < 1 {
                return self.fail(codes::BAD_PAST_COUNT, sp, |q| {
                    format!("$past cycle count {q} must be at least 1")
                });
            }
            cycles = Some(n);
        }
        self.expect_close()?;
        let span = start.to(self.prev_span());
        Ok(BoolExpr::SystemCall { func, arg: Box::new(arg), cycles, span })
    }
}

fn binary_op(t: &Tok) -> Option<BinaryOp> {
    Some(match t {
        Tok::AndAnd => BinaryOp::LogAnd,
        Tok::OrOr => BinaryOp::LogOr,
        Tok::And => BinaryOp::BitAnd,
        Tok::Or => BinaryOp::BitOr,
        Tok::Caret => BinaryOp::BitXor,
        Tok::EqEq => BinaryOp::Eq,
        Tok::NotEq => BinaryOp::Ne,
        Tok::Lt => BinaryOp::Lt,
        Tok::Le => BinaryOp::Le,
        Tok::Gt => BinaryOp::Gt,
        Tok::Ge => BinaryOp::Ge,
        Tok::Plus => BinaryOp::Add,
        Tok::Minus => BinaryOp::Sub,
        _ => return None,
    })
}
