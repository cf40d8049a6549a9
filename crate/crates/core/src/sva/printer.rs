//! Canonical, fully parenthesized rendering of assertions.
//!
//! Every binary operand, unary operand, sequence element and implication
//! consequent gets its own parentheses, so the output never depends on
//! precedence and always re-parses to the same tree.

use std::fmt::Write;

use super::ast::*;

pub fn pretty_print(decl: &AssertionDecl) -> String {
    let mut out = String::new();
    if let Some(label) = &decl.label {
        out.push_str(label);
        out.push_str(": ");
    }
    match (&decl.clocking, &decl.property) {
        (None, PropertyExpr::Seq(SequenceExpr::Bool(e))) => {
            out.push_str("assert(");
            out.push_str(&print_bool(e));
            out.push_str(");");
        }
        (clocking, prop) => {
            out.push_str("assert property (");
            if let Some(c) = clocking {
                let _ = write!(out, "@({} {}) ", c.edge.keyword(), c.signal);
            }
            print_property(prop, &mut out);
            out.push_str(");");
        }
    }
    out
}

pub fn print_property_text(p: &PropertyExpr) -> String {
    let mut out = String::new();
    print_property(p, &mut out);
    out
}

fn print_property(p: &PropertyExpr, out: &mut String) {
    match p {
        PropertyExpr::Seq(s) => print_sequence(s, out),
        PropertyExpr::Implication { kind, antecedent, consequent } => {
            print_sequence(antecedent, out);
            out.push(' ');
            out.push_str(kind.symbol());
            out.push_str(" (");
            match consequent.as_ref() {
                PropertyExpr::Seq(SequenceExpr::Bool(b)) => out.push_str(&print_bool(b)),
                other => print_property(other, out),
            }
            out.push(')');
        }
        PropertyExpr::Not(inner) => {
            out.push_str("not (");
            print_property(inner, out);
            out.push(')');
        }
        PropertyExpr::DisableIff { condition, body } => {
            out.push_str("disable iff (");
            out.push_str(&print_bool(condition));
            out.push_str(") ");
            print_property(body, out);
        }
    }
}

fn print_sequence(s: &SequenceExpr, out: &mut String) {
    match s {
        SequenceExpr::Bool(b) => {
            out.push('(');
            out.push_str(&print_bool(b));
            out.push(')');
        }
        SequenceExpr::Delay { lhs, min, max, rhs, .. } => {
            if let Some(l) = lhs {
                print_sequence(l, out);
                out.push(' ');
            }
            match max {
                None => {
                    let _ = write!(out, "##{min} ");
                }
                Some(max) => {
                    let _ = write!(out, "##[{min}:{max}] ");
                }
            }
            if rhs.has_delay() {
                out.push('(');
                print_sequence(rhs, out);
                out.push(')');
            } else {
                print_sequence(rhs, out);
            }
        }
    }
}

/// Prints a boolean expression without outer parentheses.
pub fn print_bool(e: &BoolExpr) -> String {
    let mut out = String::new();
    write_bool(e, &mut out);
    out
}

fn write_bool(e: &BoolExpr, out: &mut String) {
    match e {
        BoolExpr::Ident { name, select, .. } => {
            out.push_str(name);
            match select {
                None => {}
                Some(Select::Bit(i)) => {
                    let _ = write!(out, "[{i}]");
                }
                Some(Select::Part { high, low }) => {
                    let _ = write!(out, "[{high}:{low}]");
                }
            }
        }
        BoolExpr::Literal(l) => out.push_str(&print_literal(l)),
        BoolExpr::Unary(op, inner) => {
            out.push_str(op.symbol());
            out.push('(');
            write_bool(inner, out);
            out.push(')');
        }
        BoolExpr::Binary(op, l, r) => {
            out.push('(');
            write_bool(l, out);
            out.push_str(") ");
            out.push_str(op.symbol());
            out.push_str(" (");
            write_bool(r, out);
            out.push(')');
        }
        // every context already parenthesizes its operands
        BoolExpr::Paren(inner) => write_bool(inner, out),
        BoolExpr::SystemCall { func, arg, cycles, .. } => {
            out.push_str(func.name());
            out.push('(');
            write_bool(arg, out);
            if let Some(n) = cycles {
                let _ = write!(out, ", {n}");
            }
            out.push(')');
        }
    }
}

pub fn print_literal(l: &Literal) -> String {
    match *l {
        Literal::Fill(bit) => format!("'{}", u8::from(bit)),
        Literal::Number { width: None, base: Base::Dec, value } => value.to_string(),
        Literal::Number { width, base, value } => {
            let digits = match base {
                Base::Bin => format!("{value:b}"),
                Base::Oct => format!("{value:o}"),
                Base::Dec => value.to_string(),
                Base::Hex => format!("{value:x}"),
            };
            match width {
                Some(w) => format!("{w}'{}{digits}", base.letter()),
                None => format!("'{}{digits}", base.letter()),
            }
        }
    }
}
