use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::CodeError;
use crate::numeral::ceil_log;

/// Largest supported number of levels per cell; levels are stored as `u8`.
pub const MAX_Q: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Indexless,
    #[serde(rename = "multistage-baseq")]
    #[value(name = "multistage-baseq")]
    MultistageBaseQ,
    MultistageStacked,
    ConstantRate,
}

impl Scheme {
    pub const ALL: [Scheme; 4] =
        [Scheme::Indexless, Scheme::MultistageBaseQ, Scheme::MultistageStacked, Scheme::ConstantRate];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Indexless => "indexless",
            Scheme::MultistageBaseQ => "multistage-baseq",
            Scheme::MultistageStacked => "multistage-stacked",
            Scheme::ConstantRate => "constant-rate",
        }
    }

    pub fn is_multistage(self) -> bool {
        matches!(self, Scheme::MultistageBaseQ | Scheme::MultistageStacked)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.name() == s)
            .ok_or_else(|| CodeError::InvalidParams(format!("unknown scheme `{s}`")))
    }
}

/// The `(n, k, q)` triple of a code together with its scheme.
///
/// `k` is always the logical number of information bits. Internally the
/// codecs work with [`CodeParams::k_eff`], which pads `k` so that a full
/// block has even weight (and, for the multi-stage schemes, so that block
/// sizes halve cleanly down to 2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub q: usize,
    pub scheme: Scheme,
}

impl CodeParams {
    pub fn new(n: usize, k: usize, q: usize, scheme: Scheme) -> Result<Self, CodeError> {
        if q < 2 {
            return Err(CodeError::InvalidParams(format!("q must be at least 2, got {q}")));
        }
        if q > MAX_Q {
            return Err(CodeError::InvalidParams(format!("q must be at most {MAX_Q}, got {q}")));
        }
        if n == 0 {
            return Err(CodeError::InvalidParams("n must be positive".into()));
        }
        if k == 0 {
            return Err(CodeError::InvalidParams("k must be positive".into()));
        }
        if k > n {
            return Err(CodeError::InvalidParams(format!("k = {k} exceeds n = {n}")));
        }
        Ok(CodeParams { n, k, q, scheme })
    }

    /// Total number of level transitions available, `n(q-1)`.
    pub fn total_levels(&self) -> u64 {
        (self.n as u64) * (self.q as u64 - 1)
    }

    /// Internally padded bit count.
    ///
    /// Odd `k` with even `q` is padded to `k + 1` (the extra bit stays 0).
    /// Multi-stage schemes further round up to a power of two, at least 2.
    pub fn k_eff(&self) -> usize {
        let mut k = self.k;
        if k % 2 == 1 && self.q.is_multiple_of(2) {
            k += 1;
        }
        if self.scheme.is_multistage() {
            k = k.next_power_of_two().max(2);
        }
        k
    }

    /// Number of encoding stages `s = ceil(log2 k_eff)`.
    pub fn stage_count(&self) -> usize {
        ceil_log(2, self.k_eff() as u64) as usize
    }

    /// Base-`q` index block width `ceil(log_q(k_eff + 2))`.
    pub fn mu(&self) -> usize {
        ceil_log(self.q as u64, self.k_eff() as u64 + 2) as usize
    }

    /// Binary index block width `ceil(log2(k_eff + 2))`.
    pub fn mu_binary(&self) -> usize {
        ceil_log(2, self.k_eff() as u64 + 2) as usize
    }

    /// Number of index stacks used by stacked binary indexing.
    pub fn stack_count(&self) -> usize {
        (self.stage_count().saturating_sub(1)).div_ceil(self.q - 1)
    }

    /// Number of cells reserved at the tail of the state for index and tally
    /// regions.
    pub fn reserved_cells(&self) -> usize {
        let k = self.k_eff();
        let batch = 2 * (k - 1);
        match self.scheme {
            Scheme::Indexless => 0,
            Scheme::MultistageBaseQ => self.stage_count().saturating_sub(1) * batch * self.mu(),
            Scheme::MultistageStacked => self.stack_count() * batch * self.mu_binary() + self.stack_count(),
            Scheme::ConstantRate => self.k + 1,
        }
    }
}
