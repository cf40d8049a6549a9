//! Syntax tree for the supported SVA subset.
//!
//! Three layers: boolean expressions, sequences (`##N` / `##[m:n]`
//! chaining) and properties (implication, `not`, one outer `disable iff`).
//! Spans are carried only where diagnostics need them and are ignored by
//! [`AssertionDecl::structurally_eq`], as are redundant parentheses.

use serde::{Deserialize, Serialize};

use super::diag::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnaryOp {
    /// `!`
    LogNot,
    /// `~`
    BitNot,
    /// `-`
    Neg,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::LogNot => "!",
            UnaryOp::BitNot => "~",
            UnaryOp::Neg => "-",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinaryOp {
    LogAnd,
    LogOr,
    BitAnd,
    BitOr,
    BitXor,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 13] = [
        BinaryOp::LogAnd,
        BinaryOp::LogOr,
        BinaryOp::BitAnd,
        BinaryOp::BitOr,
        BinaryOp::BitXor,
        BinaryOp::Eq,
        BinaryOp::Ne,
        BinaryOp::Lt,
        BinaryOp::Le,
        BinaryOp::Gt,
        BinaryOp::Ge,
        BinaryOp::Add,
        BinaryOp::Sub,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::LogAnd => "&&",
            BinaryOp::LogOr => "||",
            BinaryOp::BitAnd => "&",
            BinaryOp::BitOr => "|",
            BinaryOp::BitXor => "^",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
        }
    }

    /// Binding strength; higher binds tighter. Follows SystemVerilog.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Add | BinaryOp::Sub => 8,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 7,
            BinaryOp::Eq | BinaryOp::Ne => 6,
            BinaryOp::BitAnd => 5,
            BinaryOp::BitXor => 4,
            BinaryOp::BitOr => 3,
            BinaryOp::LogAnd => 2,
            BinaryOp::LogOr => 1,
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinaryOp::Eq | BinaryOp::Ne | BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge
        )
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinaryOp::LogAnd | BinaryOp::LogOr)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Base {
    Bin,
    Oct,
    Dec,
    Hex,
}

impl Base {
    pub fn letter(self) -> char {
        match self {
            Base::Bin => 'b',
            Base::Oct => 'o',
            Base::Dec => 'd',
            Base::Hex => 'h',
        }
    }

    pub fn radix(self) -> u32 {
        match self {
            Base::Bin => 2,
            Base::Oct => 8,
            Base::Dec => 10,
            Base::Hex => 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Literal {
    /// `4'b1101`, `'hff`, `12`. `width` is absent for unsized forms; `base`
    /// is [`Base::Dec`] for plain decimals.
    Number {
        width: Option<u32>,
        base: Base,
        value: u64,
    },
    /// `'0` / `'1`: every bit set to the given value at the context width.
    Fill(bool),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Select {
    Bit(u32),
    Part { high: u32, low: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SysFunc {
    Past,
    Rose,
    Fell,
    Stable,
}

impl SysFunc {
    pub fn name(self) -> &'static str {
        match self {
            SysFunc::Past => "$past",
            SysFunc::Rose => "$rose",
            SysFunc::Fell => "$fell",
            SysFunc::Stable => "$stable",
        }
    }

    pub fn from_name(name: &str) -> Option<SysFunc> {
        Some(match name {
            "$past" => SysFunc::Past,
            "$rose" => SysFunc::Rose,
            "$fell" => SysFunc::Fell,
            "$stable" => SysFunc::Stable,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoolExpr {
    Ident {
        name: String,
        select: Option<Select>,
        span: Span,
    },
    Literal(Literal),
    Unary(UnaryOp, Box<BoolExpr>),
    Binary(BinaryOp, Box<BoolExpr>, Box<BoolExpr>),
    Paren(Box<BoolExpr>),
    /// `$past(x)`, `$past(x, N)`, `$rose(x)`, ... `cycles` is only used by `$past`.
    SystemCall {
        func: SysFunc,
        arg: Box<BoolExpr>,
        cycles: Option<u32>,
        span: Span,
    },
}

impl BoolExpr {
    pub fn ident(name: impl Into<String>) -> BoolExpr {
        BoolExpr::Ident {
            name: name.into(),
            select: None,
            span: Span::default(),
        }
    }

    pub fn unary(op: UnaryOp, e: BoolExpr) -> BoolExpr {
        BoolExpr::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinaryOp, l: BoolExpr, r: BoolExpr) -> BoolExpr {
        BoolExpr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn number(width: Option<u32>, base: Base, value: u64) -> BoolExpr {
        BoolExpr::Literal(Literal::Number { width, base, value })
    }

    /// Strips parentheses and spans.
    pub fn canonical(&self) -> BoolExpr {
        match self {
            BoolExpr::Ident { name, select, .. } => BoolExpr::Ident {
                name: name.clone(),
                select: *select,
                span: Span::default(),
            },
            BoolExpr::Literal(l) => BoolExpr::Literal(*l),
            BoolExpr::Unary(op, e) => BoolExpr::unary(*op, e.canonical()),
            BoolExpr::Binary(op, l, r) => BoolExpr::binary(*op, l.canonical(), r.canonical()),
            BoolExpr::Paren(e) => e.canonical(),
            BoolExpr::SystemCall { func, arg, cycles, .. } => BoolExpr::SystemCall {
                func: *func,
                arg: Box::new(arg.canonical()),
                cycles: *cycles,
                span: Span::default(),
            },
        }
    }

    /// Calls `f` on every node, parents before children.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a BoolExpr)) {
        f(self);
        match self {
            BoolExpr::Ident { .. } | BoolExpr::Literal(_) => {}
            BoolExpr::Unary(_, e) | BoolExpr::Paren(e) => e.walk(f),
            BoolExpr::Binary(_, l, r) => {
                l.walk(f);
                r.walk(f);
            }
            BoolExpr::SystemCall { arg, .. } => arg.walk(f),
        }
    }

    pub fn has_system_call(&self) -> bool {
        let mut found = false;
        self.walk(&mut |e| found |= matches!(e, BoolExpr::SystemCall { .. }));
        found
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SequenceExpr {
    Bool(BoolExpr),
    /// `lhs ##[min:max] rhs`; a missing `lhs` is a leading delay (`##1 b`).
    Delay {
        lhs: Option<Box<SequenceExpr>>,
        min: u32,
        max: Option<u32>,
        rhs: Box<SequenceExpr>,
        span: Span,
    },
}

impl SequenceExpr {
    pub fn canonical(&self) -> SequenceExpr {
        match self {
            SequenceExpr::Bool(b) => SequenceExpr::Bool(b.canonical()),
            SequenceExpr::Delay { lhs, min, max, rhs, .. } => SequenceExpr::Delay {
                lhs: lhs.as_ref().map(|l| Box::new(l.canonical())),
                min: *min,
                max: *max,
                rhs: Box::new(rhs.canonical()),
                span: Span::default(),
            },
        }
    }

    pub fn has_delay(&self) -> bool {
        matches!(self, SequenceExpr::Delay { .. })
    }

    pub fn for_each_bool<'a>(&'a self, f: &mut dyn FnMut(&'a BoolExpr)) {
        match self {
            SequenceExpr::Bool(b) => f(b),
            SequenceExpr::Delay { lhs, rhs, .. } => {
                if let Some(l) = lhs {
                    l.for_each_bool(f);
                }
                rhs.for_each_bool(f);
            }
        }
    }

    /// First delay node found, left to right.
    pub fn first_delay_span(&self) -> Option<Span> {
        match self {
            SequenceExpr::Bool(_) => None,
            SequenceExpr::Delay { lhs, span, .. } => {
                lhs.as_ref().and_then(|l| l.first_delay_span()).or(Some(*span))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ImplicationKind {
    /// `|->`
    Overlapped,
    /// `|=>`
    NonOverlapped,
}

impl ImplicationKind {
    pub fn symbol(self) -> &'static str {
        match self {
            ImplicationKind::Overlapped => "|->",
            ImplicationKind::NonOverlapped => "|=>",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropertyExpr {
    Seq(SequenceExpr),
    Implication {
        kind: ImplicationKind,
        antecedent: SequenceExpr,
        consequent: Box<PropertyExpr>,
    },
    Not(Box<PropertyExpr>),
    DisableIff {
        condition: BoolExpr,
        body: Box<PropertyExpr>,
    },
}

impl PropertyExpr {
    pub fn canonical(&self) -> PropertyExpr {
        match self {
            PropertyExpr::Seq(s) => PropertyExpr::Seq(s.canonical()),
            PropertyExpr::Implication { kind, antecedent, consequent } => PropertyExpr::Implication {
                kind: *kind,
                antecedent: antecedent.canonical(),
                consequent: Box::new(consequent.canonical()),
            },
            PropertyExpr::Not(p) => PropertyExpr::Not(Box::new(p.canonical())),
            PropertyExpr::DisableIff { condition, body } => PropertyExpr::DisableIff {
                condition: condition.canonical(),
                body: Box::new(body.canonical()),
            },
        }
    }

    /// Visits every boolean leaf, including `disable iff` conditions.
    pub fn for_each_bool<'a>(&'a self, f: &mut dyn FnMut(&'a BoolExpr)) {
        match self {
            PropertyExpr::Seq(s) => s.for_each_bool(f),
            PropertyExpr::Implication { antecedent, consequent, .. } => {
                antecedent.for_each_bool(f);
                consequent.for_each_bool(f);
            }
            PropertyExpr::Not(p) => p.for_each_bool(f),
            PropertyExpr::DisableIff { condition, body } => {
                f(condition);
                body.for_each_bool(f);
            }
        }
    }

    pub fn for_each_sequence<'a>(&'a self, f: &mut dyn FnMut(&'a SequenceExpr)) {
        match self {
            PropertyExpr::Seq(s) => f(s),
            PropertyExpr::Implication { antecedent, consequent, .. } => {
                f(antecedent);
                consequent.for_each_sequence(f);
            }
            PropertyExpr::Not(p) => p.for_each_sequence(f),
            PropertyExpr::DisableIff { body, .. } => body.for_each_sequence(f),
        }
    }

    pub fn has_implication(&self) -> bool {
        match self {
            PropertyExpr::Seq(_) => false,
            PropertyExpr::Implication { .. } => true,
            PropertyExpr::Not(p) | PropertyExpr::DisableIff { body: p, .. } => p.has_implication(),
        }
    }

    pub fn has_non_overlapped(&self) -> bool {
        match self {
            PropertyExpr::Seq(_) => false,
            PropertyExpr::Implication { kind, consequent, .. } => {
                *kind == ImplicationKind::NonOverlapped || consequent.has_non_overlapped()
            }
            PropertyExpr::Not(p) | PropertyExpr::DisableIff { body: p, .. } => p.has_non_overlapped(),
        }
    }

    pub fn has_disable_iff(&self) -> bool {
        match self {
            PropertyExpr::Seq(_) => false,
            PropertyExpr::DisableIff { .. } => true,
            PropertyExpr::Implication { consequent, .. } => consequent.has_disable_iff(),
            PropertyExpr::Not(p) => p.has_disable_iff(),
        }
    }

    pub fn has_delay(&self) -> bool {
        let mut found = false;
        self.for_each_sequence(&mut |s| found |= s.has_delay());
        found
    }

    pub fn has_system_call(&self) -> bool {
        let mut found = false;
        self.for_each_bool(&mut |b| found |= b.has_system_call());
        found
    }

    /// True when the property uses no construct that needs a clock.
    pub fn is_temporal_free(&self) -> bool {
        !self.has_delay() && !self.has_non_overlapped() && !self.has_system_call()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Edge {
    Posedge,
    Negedge,
}

impl Edge {
    pub fn keyword(self) -> &'static str {
        match self {
            Edge::Posedge => "posedge",
            Edge::Negedge => "negedge",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clocking {
    pub edge: Edge,
    pub signal: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssertionDecl {
    pub label: Option<String>,
    pub clocking: Option<Clocking>,
    pub property: PropertyExpr,
    pub source_span: Span,
    pub raw_text: String,
}

impl AssertionDecl {
    /// Equality of label, clock event and property, ignoring spans, raw
    /// text and redundant parentheses.
    pub fn structurally_eq(&self, other: &AssertionDecl) -> bool {
        self.label == other.label
            && self.clocking.as_ref().map(|c| (c.edge, &c.signal))
                == other.clocking.as_ref().map(|c| (c.edge, &c.signal))
            && self.property.canonical() == other.property.canonical()
    }

    /// Holds when an unclocked assertion contains no temporal construct.
    pub fn is_combinationally_well_formed(&self) -> bool {
        self.clocking.is_some() || self.property.is_temporal_free()
    }

    /// Every identifier referenced by the property, in source order.
    pub fn identifiers(&self) -> Vec<&BoolExpr> {
        let mut out = Vec::new();
        self.property.for_each_bool(&mut |b| {
            b.walk(&mut |e| {
                if matches!(e, BoolExpr::Ident { .. }) {
                    out.push(e);
                }
            })
        });
        out
    }
}
