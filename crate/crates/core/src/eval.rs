//! Width-aware evaluation of boolean-layer expressions.
//!
//! Operands are extended to the wider of the two widths and results wrap
//! at that width. Unsized literals take the minimal width that holds their
//! value, and `'0`/`'1` fill to the width of the other operand.

use thiserror::Error;

use crate::sva::{BinaryOp, BoolExpr, Literal, Select, SysFunc, UnaryOp};

/// An evaluated value and its bit width (1..=64).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Value {
    pub bits: u64,
    pub width: u32,
    fill: bool,
}

impl Value {
    pub fn new(bits: u64, width: u32) -> Value {
        let width = width.clamp(1, 64);
        Value { bits: bits & mask(width), width, fill: false }
    }

    pub fn bool(b: bool) -> Value {
        Value::new(u64::from(b), 1)
    }

    pub fn is_true(self) -> bool {
        self.bits != 0
    }

    fn widen_fill(self, width: u32) -> Value {
        if self.fill {
            Value::new(if self.bits != 0 { u64::MAX } else { 0 }, width)
        } else {
            self
        }
    }
}

/// A signal binding: value plus declared range, so selects can be
/// resolved relative to the declared lsb.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Binding {
    pub value: u64,
    pub width: u32,
    pub lsb: i64,
}

impl Binding {
    pub fn new(value: u64, width: u32) -> Binding {
        Binding { value, width, lsb: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound identifier '{0}'")]
    Unbound(String),
    #[error("temporal function {0} cannot be evaluated on a single cycle")]
    Temporal(&'static str),
    #[error("select [{index}] is outside '{name}'")]
    SelectRange { name: String, index: i64 },
    /// A sampled-value function reached before the first cycle.
    #[error("sampled value requested before the first cycle")]
    BeforeStart,
}

pub fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Minimal width that holds `value` (at least 1).
pub fn min_width(value: u64) -> u32 {
    (64 - value.leading_zeros()).max(1)
}

/// Evaluates `expr` with identifiers resolved by `env`. System calls are
/// rejected.
pub fn eval_expr(expr: &BoolExpr, env: &dyn Fn(&str) -> Option<Binding>) -> Result<Value, EvalError> {
    eval_with(expr, env, &mut |func, _, _| Err(EvalError::Temporal(func.name())))
}

/// Like [`eval_expr`], delegating system calls to `sys(func, arg, cycles)`.
pub fn eval_with(
    expr: &BoolExpr,
    env: &dyn Fn(&str) -> Option<Binding>,
    sys: &mut dyn FnMut(SysFunc, &BoolExpr, Option<u32>) -> Result<Value, EvalError>,
) -> Result<Value, EvalError> {
    Ok(match expr {
        BoolExpr::Ident { name, select, .. } => {
            let b = env(name).ok_or_else(|| EvalError::Unbound(name.clone()))?;
            let v = Value::new(b.value, b.width);
            match select {
                None => v,
                Some(Select::Bit(i)) => {
                    let off = offset(name, &b, *i)?;
                    Value::new(v.bits >> off, 1)
                }
                Some(Select::Part { high, low }) => {
                    let lo = offset(name, &b, *low)?;
                    let hi = offset(name, &b, *high)?;
                    Value::new(v.bits >> lo, hi - lo + 1)
                }
            }
        }
        BoolExpr::Literal(Literal::Fill(bit)) => Value { bits: u64::from(*bit), width: 1, fill: true },
        BoolExpr::Literal(Literal::Number { width, value, .. }) => {
            Value::new(*value, width.unwrap_or_else(|| min_width(*value)))
        }
        BoolExpr::Paren(inner) => eval_with(inner, env, sys)?,
        BoolExpr::Unary(op, inner) => {
            let v = eval_with(inner, env, sys)?.widen_fill(1);
            match op {
                UnaryOp::LogNot => Value::bool(!v.is_true()),
                UnaryOp::BitNot => Value::new(!v.bits, v.width),
                UnaryOp::Neg => Value::new(v.bits.wrapping_neg(), v.width),
            }
        }
        BoolExpr::Binary(op, l, r) => {
            let a = eval_with(l, env, sys)?;
            // short-circuit as in SystemVerilog
            match op {
                BinaryOp::LogAnd if !a.widen_fill(1).is_true() => return Ok(Value::bool(false)),
                BinaryOp::LogOr if a.widen_fill(1).is_true() => return Ok(Value::bool(true)),
                _ => {}
            }
            let b = eval_with(r, env, sys)?;
            binary(*op, a, b)
        }
        BoolExpr::SystemCall { func, arg, cycles, .. } => sys(*func, arg, *cycles)?,
    })
}

fn offset(name: &str, b: &Binding, index: u32) -> Result<u32, EvalError> {
    let off = i64::from(index) - b.lsb;
    if off < 0 || off >= i64::from(b.width) {
        return Err(EvalError::SelectRange { name: name.to_string(), index: i64::from(index) });
    }
    Ok(off as u32)
}

fn binary(op: BinaryOp, a: Value, b: Value) -> Value {
    let width = match (a.fill, b.fill) {
        (true, true) => 1,
        (true, false) => b.width,
        (false, true) => a.width,
        (false, false) => a.width.max(b.width),
    };
    let (a, b) = (a.widen_fill(width), b.widen_fill(width));
    let (x, y) = (a.bits, b.bits);
    match op {
        BinaryOp::LogAnd => Value::bool(x != 0 && y != 0),
        BinaryOp::LogOr => Value::bool(x != 0 || y != 0),
        BinaryOp::BitAnd => Value::new(x & y, width),
        BinaryOp::BitOr => Value::new(x | y, width),
        BinaryOp::BitXor => Value::new(x ^ y, width),
        BinaryOp::Eq => Value::bool(x == y),
        BinaryOp::Ne => Value::bool(x != y),
        BinaryOp::Lt => Value::bool(x < y),
        BinaryOp::Le => Value::bool(x <= y),
        BinaryOp::Gt => Value::bool(x > y),
        BinaryOp::Ge => Value::bool(x >= y),
        BinaryOp::Add => Value::new(x.wrapping_add(y), width),
        BinaryOp::Sub => Value::new(x.wrapping_sub(y), width),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sva::parse_bool_expr;

    fn ev(src: &str, vars: &[(&str, u64, u32)]) -> Result<u64, EvalError> {
        let e = parse_bool_expr(src).unwrap();
        let env = |n: &str| vars.iter().find(|v| v.0 == n).map(|&(_, v, w)| Binding::new(v, w));
        eval_expr(&e, &env).map(|v| v.bits)
    }

    #[test]
    fn implication_truth_table() {
        assert_eq!(ev("!a | b", &[("a", 1, 1), ("b", 0, 1)]), Ok(0));
        assert_eq!(ev("!a | b", &[("a", 0, 1), ("b", 0, 1)]), Ok(1));
        assert_eq!(ev("!a || b", &[("a", 1, 1), ("b", 1, 1)]), Ok(1));
    }

    #[test]
    fn four_bit_wraparound_matches_reference() {
        for c in 0..16u64 {
            assert_eq!(ev("c + 1", &[("c", c, 4)]), Ok((c + 1) % 16), "c={c}");
            assert_eq!(ev("c - 1", &[("c", c, 4)]), Ok((c + 15) % 16));
            assert_eq!(ev("c + 1 == 0", &[("c", c, 4)]), Ok(u64::from(c == 15)));
        }
        assert_eq!(ev("c + 5'd1", &[("c", 15, 4)]), Ok(16));
    }

    #[test]
    fn selects_fill_and_unary() {
        let vars = [("a", 0b1010, 4)];
        assert_eq!(ev("a[1]", &vars), Ok(1));
        assert_eq!(ev("a[3:2]", &vars), Ok(0b10));
        assert_eq!(ev("~a", &vars), Ok(0b0101));
        assert_eq!(ev("-a", &vars), Ok(0b0110));
        assert_eq!(ev("a == '1", &[("a", 15, 4)]), Ok(1));
        assert_eq!(ev("a != '0", &vars), Ok(1));
        assert_eq!(ev("(a > 9) && (a <= 10)", &vars), Ok(1));
    }

    #[test]
    fn errors() {
        assert_eq!(ev("zz", &[]), Err(EvalError::Unbound("zz".into())));
        assert_eq!(ev("$past(a)", &[("a", 0, 1)]), Err(EvalError::Temporal("$past")));
        assert!(matches!(ev("a[7]", &[("a", 0, 4)]), Err(EvalError::SelectRange { .. })));
        // short circuit skips the unbound right operand
        assert_eq!(ev("0 && zz", &[]), Ok(0));
    }
}
