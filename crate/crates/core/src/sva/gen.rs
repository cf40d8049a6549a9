//! Seeded random generator of well-formed assertion trees.
//!
//! Used for round-trip property tests and for synthesizing templated
//! training pairs. Output always satisfies the AST invariants: one outer
//! `disable iff` at most, valid ranges and selects, and no temporal
//! construct when the clocking event is omitted.

use rand::seq::SliceRandom;
use rand::Rng;

use super::ast::*;
use super::diag::Span;

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub vocab: Vec<String>,
    /// Maximum nesting depth of property/sequence/boolean layers combined.
    pub max_depth: u32,
    pub allow_selects: bool,
    pub allow_labels: bool,
    /// Probability that an assertion carries a clocking event.
    pub clocked_ratio: f64,
    pub clock: String,
}

impl GenConfig {
    pub fn new(vocab: Vec<String>) -> GenConfig {
        GenConfig {
            vocab,
            max_depth: 3,
            allow_selects: true,
            allow_labels: true,
            clocked_ratio: 0.8,
            clock: "clk".to_string(),
        }
    }
}

pub struct AstGen<'c, R> {
    cfg: &'c GenConfig,
    rng: R,
    temporal: bool,
}

impl<'c, R: Rng> AstGen<'c, R> {
    pub fn new(cfg: &'c GenConfig, rng: R) -> Self {
        assert!(!cfg.vocab.is_empty(), "generator vocabulary must not be empty");
        AstGen { cfg, rng, temporal: true }
    }

    pub fn assertion(&mut self) -> AssertionDecl {
        let clocked = self.rng.gen_bool(self.cfg.clocked_ratio);
        self.temporal = clocked;
        let depth = self.cfg.max_depth;
        let mut property = self.property(depth);
        if clocked && self.rng.gen_bool(0.15) {
            let condition = self.bool_expr(depth.min(1));
            property = PropertyExpr::DisableIff { condition, body: Box::new(property) };
        }
        let label = (self.cfg.allow_labels && self.rng.gen_bool(0.1))
            .then(|| format!("p_{}", self.rng.gen_range(0..100)));
        let clocking = clocked.then(|| Clocking {
            edge: if self.rng.gen_bool(0.9) { Edge::Posedge } else { Edge::Negedge },
            signal: self.cfg.clock.clone(),
            span: Span::default(),
        });
        let mut decl = AssertionDecl {
            label,
            clocking,
            property,
            source_span: Span::default(),
            raw_text: String::new(),
        };
        decl.raw_text = super::printer::pretty_print(&decl);
        decl
    }

    pub fn property(&mut self, depth: u32) -> PropertyExpr {
        if depth == 0 {
            return PropertyExpr::Seq(self.sequence(0));
        }
        match self.rng.gen_range(0..10) {
            0..=4 => {
                let kind = if self.temporal && self.rng.gen_bool(0.4) {
                    ImplicationKind::NonOverlapped
                } else {
                    ImplicationKind::Overlapped
                };
                PropertyExpr::Implication {
                    kind,
                    antecedent: self.sequence(depth - 1),
                    consequent: Box::new(self.property(depth - 1)),
                }
            }
            5 => PropertyExpr::Not(Box::new(self.property(depth - 1))),
            _ => PropertyExpr::Seq(self.sequence(depth)),
        }
    }

    pub fn sequence(&mut self, depth: u32) -> SequenceExpr {
        if depth == 0 || !self.temporal || self.rng.gen_bool(0.5) {
            return SequenceExpr::Bool(self.bool_expr(depth));
        }
        let lhs = if self.rng.gen_bool(0.8) { Some(Box::new(self.sequence(depth - 1))) } else { None };
        let min = self.rng.gen_range(0..4);
        let max = self.rng.gen_bool(0.4).then(|| min + self.rng.gen_range(0..4));
        SequenceExpr::Delay {
            lhs,
            min,
            max,
            rhs: Box::new(self.sequence(depth - 1)),
            span: Span::default(),
        }
    }

    pub fn bool_expr(&mut self, depth: u32) -> BoolExpr {
        if depth == 0 {
            return self.leaf();
        }
        match self.rng.gen_range(0..12) {
            0..=5 => {
                let op = *BinaryOp::ALL.choose(&mut self.rng).unwrap();
                BoolExpr::binary(op, self.bool_expr(depth - 1), self.bool_expr(depth - 1))
            }
            6 | 7 => {
                let op = *[UnaryOp::LogNot, UnaryOp::LogNot, UnaryOp::BitNot, UnaryOp::Neg]
                    .choose(&mut self.rng)
                    .unwrap();
                BoolExpr::unary(op, self.bool_expr(depth - 1))
            }
            8 => BoolExpr::Paren(Box::new(self.bool_expr(depth - 1))),
            9 if self.temporal => {
                let func = *[SysFunc::Past, SysFunc::Rose, SysFunc::Fell, SysFunc::Stable]
                    .choose(&mut self.rng)
                    .unwrap();
                let cycles = (func == SysFunc::Past && self.rng.gen_bool(0.5))
                    .then(|| self.rng.gen_range(1..4));
                BoolExpr::SystemCall {
                    func,
                    arg: Box::new(self.bool_expr(depth - 1)),
                    cycles,
                    span: Span::default(),
                }
            }
            _ => self.leaf(),
        }
    }

    fn leaf(&mut self) -> BoolExpr {
        if self.rng.gen_bool(0.75) {
            let name = self.cfg.vocab.choose(&mut self.rng).unwrap().clone();
            let select = if self.cfg.allow_selects && self.rng.gen_bool(0.15) {
                let high = self.rng.gen_range(0..16);
                if self.rng.gen_bool(0.5) {
                    Some(Select::Bit(high))
                } else {
                    Some(Select::Part { high, low: self.rng.gen_range(0..=high) })
                }
            } else {
                None
            };
            BoolExpr::Ident { name, select, span: Span::default() }
        } else {
            BoolExpr::Literal(self.literal())
        }
    }

    fn literal(&mut self) -> Literal {
        match self.rng.gen_range(0..6) {
            0 => Literal::Fill(self.rng.gen_bool(0.5)),
            1 => Literal::Number { width: None, base: Base::Dec, value: self.rng.gen_range(0..64) },
            2 => {
                let base = *[Base::Bin, Base::Hex].choose(&mut self.rng).unwrap();
                Literal::Number { width: None, base, value: self.rng.gen_range(0..256) }
            }
            _ => {
                let width = self.rng.gen_range(1..=16u32);
                let base = *[Base::Bin, Base::Oct, Base::Dec, Base::Hex].choose(&mut self.rng).unwrap();
                let value = self.rng.gen_range(0..(1u64 << width));
                Literal::Number { width: Some(width), base, value }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn generated_assertions_respect_invariants() {
        let cfg = GenConfig::new(vec!["a".into(), "b".into(), "c".into()]);
        let mut g = AstGen::new(&cfg, ChaCha8Rng::seed_from_u64(1));
        for _ in 0..500 {
            let d = g.assertion();
            assert!(d.is_combinationally_well_formed(), "{}", d.raw_text);
        }
    }
}
