//! Bounded SVA semantics on a finite trace.
//!
//! Each start cycle is an attempt. An attempt whose obligations run past
//! the end of the trace, or that reads a sampled value before cycle 0, is
//! vacuously satisfied, so only completed violations are reported.

use super::trace::Trace;
use super::CheckError;
use crate::eval::{eval_with, Binding, EvalError, Value};
use crate::sva::{AssertionDecl, BoolExpr, ImplicationKind, PropertyExpr, SequenceExpr, SysFunc};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckOutcome {
    /// No attempt failed. `vacuous` is set when no attempt succeeded
    /// non-vacuously either (e.g. the antecedent never matched).
    Holds { vacuous: bool },
    ViolatedAt(usize),
}

impl CheckOutcome {
    pub fn is_violated(self) -> bool {
        matches!(self, CheckOutcome::ViolatedAt(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tri {
    True,
    False,
    Vacuous,
}

pub fn check_on_trace(decl: &AssertionDecl, trace: &Trace) -> Result<CheckOutcome, CheckError> {
    let mut missing = None;
    decl.property.for_each_bool(&mut |b| {
        b.walk(&mut |e| {
            if let BoolExpr::Ident { name, .. } = e {
                if missing.is_none() && trace.column(name).is_none() && !trace.constants.contains_key(name) {
                    missing = Some(name.clone());
                }
            }
        })
    });
    if let Some(name) = missing {
        return Err(CheckError::MissingSignal(name));
    }

    let checker = Checker { trace };
    let mut any_true = false;
    for s in 0..trace.len() {
        match checker.property(&decl.property, s, trace.len())? {
            Tri::False => return Ok(CheckOutcome::ViolatedAt(s)),
            Tri::True => any_true = true,
            Tri::Vacuous => {}
        }
    }
    Ok(CheckOutcome::Holds { vacuous: !any_true })
}

struct Checker<'t> {
    trace: &'t Trace,
}

/// End cycles where a sequence matched, plus whether some path was cut
/// off by the limit or by a pre-trace sampled value.
#[derive(Default)]
struct Matches {
    ends: Vec<usize>,
    incomplete: bool,
}

impl Checker<'_> {
    fn property(&self, p: &PropertyExpr, t: usize, limit: usize) -> Result<Tri, CheckError> {
        match p {
            PropertyExpr::Seq(s) => {
                let m = self.sequence(s, t, limit)?;
                Ok(if !m.ends.is_empty() {
                    Tri::True
                } else if m.incomplete {
                    Tri::Vacuous
                } else {
                    Tri::False
                })
            }
            PropertyExpr::Implication { kind, antecedent, consequent } => {
                let m = self.sequence(antecedent, t, limit)?;
                let mut result = Tri::Vacuous;
                for e in m.ends {
                    let start = match kind {
                        ImplicationKind::Overlapped => e,
                        ImplicationKind::NonOverlapped => e + 1,
                    };
                    if start >= limit {
                        continue;
                    }
                    match self.property(consequent, start, limit)? {
                        Tri::False => return Ok(Tri::False),
                        Tri::True => result = Tri::True,
                        Tri::Vacuous => {}
                    }
                }
                Ok(result)
            }
            PropertyExpr::Not(inner) => Ok(match self.property(inner, t, limit)? {
                Tri::True => Tri::False,
                Tri::False => Tri::True,
                Tri::Vacuous => Tri::Vacuous,
            }),
            PropertyExpr::DisableIff { condition, body } => {
                // cycles from the first true condition onward are out of reach
                let mut cut = limit;
                for c in t..limit {
                    match self.boolean(condition, c) {
                        Ok(v) if v.is_true() => {
                            cut = c;
                            break;
                        }
                        Ok(_) | Err(EvalError::BeforeStart) => {}
                        Err(source) => return Err(CheckError::Eval { cycle: c, source }),
                    }
                }
                if cut <= t {
                    return Ok(Tri::Vacuous);
                }
                self.property(body, t, cut)
            }
        }
    }

    fn sequence(&self, s: &SequenceExpr, t: usize, limit: usize) -> Result<Matches, CheckError> {
        let mut out = Matches::default();
        match s {
            SequenceExpr::Bool(b) => {
                if t >= limit {
                    out.incomplete = true;
                    return Ok(out);
                }
                match self.boolean(b, t) {
                    Ok(v) if v.is_true() => out.ends.push(t),
                    Ok(_) => {}
                    Err(EvalError::BeforeStart) => out.incomplete = true,
                    Err(source) => return Err(CheckError::Eval { cycle: t, source }),
                }
            }
            SequenceExpr::Delay { lhs, min, max, rhs, .. } => {
                let starts = match lhs {
                    Some(l) => {
                        let m = self.sequence(l, t, limit)?;
                        out.incomplete |= m.incomplete;
                        m.ends
                    }
                    None => vec![t],
                };
                let max = max.unwrap_or(*min);
                for e in starts {
                    for k in *min..=max {
                        let m = self.sequence(rhs, e + k as usize, limit)?;
                        out.incomplete |= m.incomplete;
                        out.ends.extend(m.ends);
                    }
                }
                out.ends.sort_unstable();
                out.ends.dedup();
            }
        }
        Ok(out)
    }

    fn boolean(&self, b: &BoolExpr, t: usize) -> Result<Value, EvalError> {
        let trace = self.trace;
        let env = |n: &str| lookup(trace, n, t);
        eval_with(b, &env, &mut |func, arg, cycles| self.sampled(func, arg, cycles, t))
    }

    fn sampled(&self, func: SysFunc, arg: &BoolExpr, cycles: Option<u32>, t: usize) -> Result<Value, EvalError> {
        let back = match func {
            SysFunc::Past => cycles.unwrap_or(1) as usize,
            _ => 1,
        };
        if t < back {
            return Err(EvalError::BeforeStart);
        }
        let past = self.boolean(arg, t - back)?;
        if func == SysFunc::Past {
            return Ok(past);
        }
        let now = self.boolean(arg, t)?;
        // edge functions look at the least significant bit
        Ok(Value::bool(match func {
            SysFunc::Rose => now.bits & 1 == 1 && past.bits & 1 == 0,
            SysFunc::Fell => now.bits & 1 == 0 && past.bits & 1 == 1,
            SysFunc::Stable => now.bits == past.bits,
            SysFunc::Past => unreachable!(),
        }))
    }
}

fn lookup(trace: &Trace, name: &str, t: usize) -> Option<Binding> {
    if let Some(col) = trace.column(name) {
        return Some(Binding::new(col[t], trace.widths[name]));
    }
    trace.constants.get(name).map(|&v| Binding::new(v, crate::eval::min_width(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sva::parse_assertion;

    fn trace(cols: &[(&str, &[u64])]) -> Trace {
        let mut t = Trace::new();
        for (n, _) in cols {
            t.add_column(n, 4);
        }
        for i in 0..cols[0].1.len() {
            t.push_row(&cols.iter().map(|c| c.1[i]).collect::<Vec<_>>());
        }
        t
    }

    fn check(src: &str, t: &Trace) -> CheckOutcome {
        check_on_trace(&parse_assertion(src).unwrap(), t).unwrap()
    }

    #[test]
    fn constants() {
        let t = trace(&[("a", &[0, 1, 0])]);
        assert_eq!(check("assert property (@(posedge clk) 1'b1);", &t), CheckOutcome::Holds { vacuous: false });
        assert_eq!(check("assert property (@(posedge clk) 1'b0);", &t), CheckOutcome::ViolatedAt(0));
    }

    #[test]
    fn implication_kinds() {
        let t = trace(&[("a", &[1, 0, 0, 1]), ("b", &[0, 1, 0, 0])]);
        assert_eq!(check("assert property (@(posedge clk) a |=> b);", &t), CheckOutcome::Holds { vacuous: false });
        assert_eq!(check("assert property (@(posedge clk) a |-> b);", &t), CheckOutcome::ViolatedAt(0));
        // the a at cycle 3 has no following cycle: vacuous, not a violation
        let t2 = trace(&[("a", &[0, 0, 0, 1]), ("b", &[0, 0, 0, 0])]);
        assert_eq!(check("assert property (@(posedge clk) a |=> b);", &t2), CheckOutcome::Holds { vacuous: true });
    }

    #[test]
    fn ranged_delay_tries_every_offset() {
        let t = trace(&[("a", &[1, 0, 0, 0, 0]), ("b", &[0, 0, 0, 1, 0])]);
        assert!(!check("assert property (@(posedge clk) a |-> ##[1:3] b);", &t).is_violated());
        assert_eq!(check("assert property (@(posedge clk) a |-> ##[1:2] b);", &t), CheckOutcome::ViolatedAt(0));
        assert_eq!(check("assert property (@(posedge clk) a ##3 b);", &t), CheckOutcome::ViolatedAt(1));
    }

    #[test]
    fn sampled_values() {
        let t = trace(&[("a", &[0, 1, 1, 0]), ("b", &[0, 0, 1, 1])]);
        assert!(!check("assert property (@(posedge clk) $rose(a) |=> b);", &t).is_violated());
        assert!(!check("assert property (@(posedge clk) b |-> $past(a));", &t).is_violated());
        assert_eq!(check("assert property (@(posedge clk) b |-> $past(a, 2));", &t), CheckOutcome::ViolatedAt(2));
        assert_eq!(check("assert property (@(posedge clk) $stable(a));", &t), CheckOutcome::ViolatedAt(1));
        assert!(!check("assert property (@(posedge clk) $fell(a) |-> b && !a);", &t).is_violated());
    }

    #[test]
    fn disable_iff_aborts_attempts() {
        let t = trace(&[("rst", &[0, 1, 0, 0]), ("a", &[1, 0, 0, 0]), ("b", &[0, 0, 0, 0])]);
        // the attempt at 0 would fail at cycle 1, but rst is high there
        assert!(!check("assert property (@(posedge clk) disable iff (rst) a |=> b);", &t).is_violated());
        assert_eq!(check("assert property (@(posedge clk) a |=> b);", &t), CheckOutcome::ViolatedAt(0));
        assert_eq!(check("assert property (@(posedge clk) disable iff (rst) a |-> b);", &t), CheckOutcome::ViolatedAt(0));
    }

    #[test]
    fn not_and_missing_signal() {
        let t = trace(&[("a", &[1, 1])]);
        assert_eq!(check("assert property (@(posedge clk) not (a));", &t), CheckOutcome::ViolatedAt(0));
        let d = parse_assertion("assert property (@(posedge clk) zz);").unwrap();
        assert!(matches!(check_on_trace(&d, &t), Err(CheckError::MissingSignal(n)) if n == "zz"));
    }
}
