//! Sequential-to-combinational rewrite for clockless designs.
//!
//! Clocking and `disable iff` are dropped, sampled-value functions collapse
//! to their argument and every implication `a |-> b` (or `a |=> b`) becomes
//! `!a || b`. Delays have no combinational reading and are rejected.

use crate::sva::{
    codes, pretty_print, AssertionDecl, BinaryOp, BoolExpr, Category, Diagnostic, PropertyExpr, SequenceExpr, Span,
    UnaryOp,
};

pub fn to_combinational(decl: &AssertionDecl) -> Result<AssertionDecl, Diagnostic> {
    let body = property_to_bool(&decl.property).map_err(|span| delay_diagnostic(decl, span))?;
    let mut out = AssertionDecl {
        label: decl.label.clone(),
        clocking: None,
        property: PropertyExpr::Seq(SequenceExpr::Bool(body)),
        source_span: Span::default(),
        raw_text: String::new(),
    };
    out.raw_text = pretty_print(&out);
    Ok(out)
}

/// True when `decl` has nothing left for the rewrite to remove.
pub fn is_pure_combinational(decl: &AssertionDecl) -> bool {
    decl.clocking.is_none()
        && matches!(&decl.property, PropertyExpr::Seq(SequenceExpr::Bool(b)) if !b.has_system_call())
}

fn delay_diagnostic(decl: &AssertionDecl, span: Span) -> Diagnostic {
    let src = decl.raw_text.as_str();
    let fits = span.end <= src.len() && span.start < span.end && src.is_char_boundary(span.start) && src.is_char_boundary(span.end);
    let span = if fits { span } else { Span::locate(src, 0, src.len()) };
    Diagnostic::error(Category::Semantic, codes::COMB_DELAY, src, span, |q| {
        format!("cycle delay {q} has no combinational meaning in a clockless design")
    })
    .with_hint("express the check as a single-cycle relation between signals, e.g. `assert(!(a) || (b));`")
}

fn property_to_bool(p: &PropertyExpr) -> Result<BoolExpr, Span> {
    match p {
        PropertyExpr::Seq(s) => sequence_to_bool(s),
        PropertyExpr::Implication { antecedent, consequent, .. } => {
            let a = sequence_to_bool(antecedent)?;
            let b = property_to_bool(consequent)?;
            Ok(BoolExpr::binary(BinaryOp::LogOr, BoolExpr::unary(UnaryOp::LogNot, a), b))
        }
        PropertyExpr::Not(inner) => Ok(BoolExpr::unary(UnaryOp::LogNot, property_to_bool(inner)?)),
        PropertyExpr::DisableIff { body, .. } => property_to_bool(body),
    }
}

fn sequence_to_bool(s: &SequenceExpr) -> Result<BoolExpr, Span> {
    match s {
        SequenceExpr::Bool(b) => Ok(strip_sampled(b)),
        SequenceExpr::Delay { .. } => Err(s.first_delay_span().unwrap_or_default()),
    }
}

fn strip_sampled(e: &BoolExpr) -> BoolExpr {
    match e {
        BoolExpr::SystemCall { arg, .. } => strip_sampled(arg),
        BoolExpr::Unary(op, x) => BoolExpr::Unary(*op, Box::new(strip_sampled(x))),
        BoolExpr::Binary(op, l, r) => BoolExpr::Binary(*op, Box::new(strip_sampled(l)), Box::new(strip_sampled(r))),
        BoolExpr::Paren(x) => BoolExpr::Paren(Box::new(strip_sampled(x))),
        leaf => leaf.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sva::parse_assertion;

    fn rewrite(src: &str) -> Result<String, Diagnostic> {
        to_combinational(&parse_assertion(src).unwrap()).map(|d| d.raw_text)
    }

    #[test]
    fn implication_becomes_disjunction() {
        assert_eq!(rewrite("assert property (@(posedge clk) a |-> b);").unwrap(), "assert((!(a)) || (b));");
        assert_eq!(rewrite("assert property (@(posedge clk) a |=> b);").unwrap(), "assert((!(a)) || (b));");
    }

    #[test]
    fn fixed_point() {
        let once = rewrite("assert((!(a)) || (b));").unwrap();
        assert_eq!(once, "assert((!(a)) || (b));");
        assert_eq!(rewrite(&once).unwrap(), once);
    }

    #[test]
    fn delays_are_rejected() {
        let e = rewrite("assert property (@(posedge clk) a ##1 b |-> c);").unwrap_err();
        assert_eq!(e.code, codes::COMB_DELAY);
        assert_eq!(e.quoted_fragment, "##1");
    }

    #[test]
    fn clock_functions_and_disable_are_dropped() {
        let out = rewrite("lbl: assert property (@(posedge clk) disable iff (rst) $rose(a) |-> $past(b, 2) == c && not_x);")
            .unwrap();
        assert_eq!(out, "lbl: assert((!(a)) || (((b) == (c)) && (not_x)));");
        let d = parse_assertion(&out).unwrap();
        assert!(is_pure_combinational(&d));
        assert_eq!(rewrite("assert property (@(posedge clk) not (a |-> b));").unwrap(), "assert(!((!(a)) || (b)));");
    }
}
