use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::BehavioralModel;
use super::CheckError;
use crate::eval::mask;
use crate::rtl::{reset_active_low, Mode};

/// Largest sequence space (in bits of choice) an exhaustive plan may cover.
pub const EXHAUSTIVE_SEQ_BITS: u32 = 24;
pub const EXHAUSTIVE_COMB_BITS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Every input sequence of length `horizon`; rejected when too large.
    Exhaustive,
    /// `random_budget` seeded sequences of length `horizon`.
    Random,
    /// Exhaustive at the depth `hybrid_bits` allows, then random top-up.
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResetPolicy {
    /// Hold the design's reset input deasserted on every cycle.
    HoldInactive,
    /// Treat reset like any other input.
    Free,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StimulusPlan {
    pub horizon: usize,
    pub strategy: Strategy,
    pub random_budget: usize,
    pub seed: u64,
    pub hybrid_bits: u32,
    pub reset: ResetPolicy,
}

impl Default for StimulusPlan {
    fn default() -> Self {
        StimulusPlan {
            horizon: 20,
            strategy: Strategy::Hybrid,
            random_budget: 256,
            seed: 0,
            hybrid_bits: 12,
            reset: ResetPolicy::HoldInactive,
        }
    }
}

/// Input sequences for one model under one plan, produced lazily.
#[derive(Debug, Clone)]
pub struct StimulusSource {
    widths: Vec<u32>,
    /// Index into `widths` of a held reset input and its inactive value.
    held: Option<(usize, u64)>,
    free_bits: u32,
    combinational: bool,
    /// Exhaustive part: sequence length and count.
    pub exhaustive_depth: usize,
    exhaustive_count: u64,
    pub random_count: usize,
    horizon: usize,
    seed: u64,
}

impl StimulusSource {
    pub fn new(plan: &StimulusPlan, model: &BehavioralModel, reset: Option<&str>) -> Result<StimulusSource, CheckError> {
        if plan.horizon == 0 {
            return Err(CheckError::Plan("horizon must be at least 1".into()));
        }
        let widths: Vec<u32> = model.inputs.iter().map(|p| p.width).collect();
        let held = match (plan.reset, reset) {
            (ResetPolicy::HoldInactive, Some(r)) => model
                .inputs
                .iter()
                .position(|p| p.name == r)
                .map(|i| (i, if reset_active_low(r) { mask(widths[i]) } else { 0 })),
            _ => None,
        };
        let free_bits: u32 = widths.iter().enumerate().filter(|(i, _)| held.map(|h| h.0) != Some(*i)).map(|(_, w)| w).sum();
        let combinational = model.mode == Mode::Combinational;
        let (depth, random) = match (plan.strategy, combinational) {
            (Strategy::Exhaustive, true) => {
                if free_bits > EXHAUSTIVE_COMB_BITS {
                    return Err(CheckError::Plan(format!(
                        "exhaustive enumeration of {free_bits} input bits exceeds {EXHAUSTIVE_COMB_BITS}; use the random or hybrid strategy"
                    )));
                }
                (1, 0)
            }
            (Strategy::Exhaustive, false) => {
                let total = u64::from(free_bits) * plan.horizon as u64;
                if total > u64::from(EXHAUSTIVE_SEQ_BITS) {
                    return Err(CheckError::Plan(format!(
                        "exhaustive enumeration needs {free_bits} bits x {} cycles = {total} bits of choice, above {EXHAUSTIVE_SEQ_BITS}; use the random or hybrid strategy",
                        plan.horizon
                    )));
                }
                (plan.horizon, 0)
            }
            (Strategy::Random, _) => (0, plan.random_budget),
            (Strategy::Hybrid, true) if free_bits <= EXHAUSTIVE_COMB_BITS => (1, 0),
            (Strategy::Hybrid, true) => (0, plan.random_budget),
            (Strategy::Hybrid, false) => {
                let depth = if free_bits == 0 { plan.horizon } else { (plan.hybrid_bits / free_bits) as usize };
                let depth = depth.min(plan.horizon);
                // nothing left to randomize when the exhaustive part already covers the horizon
                let random = if depth == plan.horizon { 0 } else { plan.random_budget };
                (depth, random)
            }
        };
        let exhaustive_count = if depth == 0 { 0 } else { 1u64 << (u64::from(free_bits) * depth as u64) };
        Ok(StimulusSource {
            widths,
            held,
            free_bits,
            combinational,
            exhaustive_depth: depth,
            exhaustive_count,
            random_count: random,
            horizon: if combinational { 1 } else { plan.horizon },
            seed: plan.seed,
        })
    }

    pub fn free_bits(&self) -> u32 {
        self.free_bits
    }

    pub fn total(&self) -> u64 {
        self.exhaustive_count + self.random_count as u64
    }

    /// Every sequence in a fixed order: exhaustive part by counting, then
    /// the seeded random stream. Each sequence is a list of per-cycle rows.
    pub fn sequences(&self) -> impl Iterator<Item = Vec<Vec<u64>>> + '_ {
        let exhaustive = (0..self.exhaustive_count).map(move |i| self.exhaustive_sequence(i));
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let random = (0..self.random_count).map(move |_| {
            (0..self.horizon)
                .map(|_| self.row(|w| rng.gen::<u64>() & mask(w)))
                .collect::<Vec<_>>()
        });
        exhaustive.chain(random)
    }

    fn exhaustive_sequence(&self, index: u64) -> Vec<Vec<u64>> {
        let mut bits = index;
        (0..self.exhaustive_depth.max(usize::from(self.combinational)))
            .map(|_| {
                self.row(|w| {
                    let v = bits & mask(w);
                    bits = bits.checked_shr(w).unwrap_or(0);
                    v
                })
            })
            .collect()
    }

    fn row(&self, mut draw: impl FnMut(u32) -> u64) -> Vec<u64> {
        self.widths
            .iter()
            .enumerate()
            .map(|(i, &w)| match self.held {
                Some((h, v)) if h == i => v,
                _ => draw(w),
            })
            .collect()
    }
}
