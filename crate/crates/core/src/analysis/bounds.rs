//! Closed-form write-deficiency bounds.

use num_rational::Ratio;

use crate::error::CodeError;
use crate::layout::Layout;
use crate::numeral::ceil_log;
use crate::params::{CodeParams, Scheme};

/// Lower bound on the deficiency of any flash code:
/// `(q-1) * min(n, k-1) / 2`, as an exact rational.
pub fn jbb_lower_bound(n: u64, k: u64, q: u64) -> Ratio<u64> {
    let span = n.min(k.saturating_sub(1));
    Ratio::new(q.saturating_sub(1) * span, 2)
}

/// Deficiency bound of the index-less code, `(k-1)((k+1)(q-1) - 1)`.
///
/// `k` is the padded bit count.
pub fn bound_indexless(k: u64, q: u64) -> u64 {
    if k <= 1 {
        return 0;
    }
    (k - 1) * ((k + 1) * (q - 1) - 1)
}

fn stages(k: u64) -> u64 {
    u64::from(ceil_log(2, k))
}

/// Deficiency bound of the multi-stage code with base-`q` index blocks:
/// `(q-1)(k-1)(2(s-1)ceil(log_q(k+2)) + 3) + k(s-1)` with `s = ceil(log2 k)`.
pub fn bound_multistage_baseq(k: u64, q: u64) -> u64 {
    let s = stages(k).max(1);
    let mu = u64::from(ceil_log(q, k + 2));
    (q - 1) * (k - 1) * (2 * (s - 1) * mu + 3) + k * (s - 1)
}

/// Deficiency bound of the multi-stage code with stacked binary indexing,
/// without the stage tally: the stacked index waste
/// `2(q-1)(k-1) ceil((s-1)/(q-1)) ceil(log2(k+2))` plus the remaining
/// non-index terms `3(q-1)(k-1) + k(s-1)`.
pub fn bound_multistage_stacked(k: u64, q: u64) -> u64 {
    let s = stages(k).max(1);
    let stacks = (s - 1).div_ceil(q - 1);
    let mu = u64::from(ceil_log(2, k + 2));
    2 * (q - 1) * (k - 1) * stacks * mu + 3 * (q - 1) * (k - 1) + k * (s - 1)
}

/// Levels spent on the stage tally of stacked indexing,
/// `ceil((s-1)/(q-1)) * (q-1)`.
pub fn stacked_tally_allowance(k: u64, q: u64) -> u64 {
    let s = stages(k).max(1);
    (s - 1).div_ceil(q - 1) * (q - 1)
}

/// Exact guaranteed writes of the constant-rate code, `m(q-1)`.
pub fn constant_rate_capacity(params: &CodeParams) -> Result<u64, CodeError> {
    let params = CodeParams { scheme: Scheme::ConstantRate, ..*params };
    let layout = Layout::new(&params)?;
    Ok(layout.index[0].len() as u64 * (params.q as u64 - 1))
}

/// Idealized constant-rate write count `n(q-1)(1-R)/log2 k` with `R = k/n`,
/// ignoring floors and ceilings. Undefined for `k < 2`.
pub fn constant_rate_ideal(n: u64, k: u64, q: u64) -> Option<f64> {
    if k < 2 {
        return None;
    }
    let rate = k as f64 / n as f64;
    Some(n as f64 * (q - 1) as f64 * (1.0 - rate) / (k as f64).log2())
}

/// The deficiency bound checked for a code with these parameters.
///
/// Multi-stage stacked includes the tally allowance; constant-rate reports
/// the exact deficiency `n(q-1) - m(q-1)`.
pub fn bound_for(params: &CodeParams) -> Result<u64, CodeError> {
    let k = params.k_eff() as u64;
    let q = params.q as u64;
    Ok(match params.scheme {
        Scheme::Indexless => bound_indexless(k, q),
        Scheme::MultistageBaseQ => bound_multistage_baseq(k, q),
        Scheme::MultistageStacked => bound_multistage_stacked(k, q) + stacked_tally_allowance(k, q),
        Scheme::ConstantRate => params.total_levels() - constant_rate_capacity(params)?,
    })
}
