//! Seeded write-sequence simulation driving a code until it erases.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use super::bounds::bound_for;
use super::report::DeficiencyReport;
use crate::cell::{CellState, EncodeOutcome, InfoVector};
use crate::codec::{Codec, FlashCode};
use crate::error::CodeError;
use crate::params::CodeParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Policy {
    UniformRandom,
    RoundRobin,
    GreedyAdversary,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::UniformRandom, Policy::RoundRobin, Policy::GreedyAdversary];

    pub fn name(self) -> &'static str {
        match self {
            Policy::UniformRandom => "uniform-random",
            Policy::RoundRobin => "round-robin",
            Policy::GreedyAdversary => "greedy-adversary",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SimulationError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("seed {seed}, write {write}: {reason}")]
    Violation { seed: u64, write: u64, reason: String },
}

/// Chooses the next bit to flip.
pub struct BitChooser {
    policy: Policy,
    rng: ChaCha8Rng,
    offset: usize,
    step: usize,
}

impl BitChooser {
    pub fn new(policy: Policy, seed: u64) -> Self {
        BitChooser { policy, rng: ChaCha8Rng::seed_from_u64(seed), offset: seed as usize, step: 0 }
    }

    pub fn next_bit<C: FlashCode + ?Sized>(&mut self, codec: &C, state: &CellState) -> Result<usize, CodeError> {
        let k = codec.params().k;
        let bit = match self.policy {
            Policy::UniformRandom => self.rng.gen_range(0..k),
            Policy::RoundRobin => (self.offset.wrapping_add(self.step)) % k,
            Policy::GreedyAdversary => {
                let alloc = codec.allocations(state)?;
                match alloc.iter().position(Option::is_none) {
                    Some(bit) => bit,
                    None => alloc
                        .iter()
                        .enumerate()
                        .min_by_key(|(_, free)| free.expect("every bit allocated"))
                        .map(|(bit, _)| bit)
                        .unwrap_or(0),
                }
            }
        };
        self.step += 1;
        Ok(bit)
    }
}

/// Drives `codec` from its initial state until it erases, checking every
/// step against a shadow copy of the information bits. Returns the number of
/// writes absorbed.
pub fn run_to_erasure<C: FlashCode + ?Sized>(codec: &C, policy: Policy, seed: u64) -> Result<u64, SimulationError> {
    let params = codec.params();
    let limit = params.total_levels();
    let mut chooser = BitChooser::new(policy, seed);
    let mut state = codec.init();
    let mut shadow = InfoVector::zeros(params.k);
    let mut writes = 0u64;
    let violation = |write, reason: String| SimulationError::Violation { seed, write, reason };
    loop {
        let bit = chooser.next_bit(codec, &state)?;
        let next = match codec.encode(bit, &state)? {
            EncodeOutcome::Erase => return Ok(writes),
            EncodeOutcome::Next(next) => next,
        };
        writes += 1;
        if writes > limit {
            return Err(violation(writes, format!("more than n(q-1) = {limit} writes")));
        }
        if !next.dominates(&state) {
            return Err(violation(writes, "a cell level decreased".into()));
        }
        shadow.flip(bit);
        let decoded = codec.decode(&next)?;
        if decoded != shadow {
            return Err(violation(writes, format!("decoded {:?}, expected {:?}", decoded.bits(), shadow.bits())));
        }
        state = next;
    }
}

/// Runs `runs` independent simulations with seeds `seed, seed + 1, ...`.
/// Rows come back in seed order.
pub fn simulate(
    params: &CodeParams,
    policy: Policy,
    seed: u64,
    runs: usize,
) -> Result<Vec<DeficiencyReport>, SimulationError> {
    let codec = Codec::new(*params)?;
    let bound = bound_for(params)?;
    (0..runs as u64)
        .into_par_iter()
        .map(|r| {
            let run_seed = seed.wrapping_add(r);
            let writes = run_to_erasure(&codec, policy, run_seed)?;
            Ok(DeficiencyReport::new(params, policy.name(), Some(run_seed), writes, bound))
        })
        .collect()
}
