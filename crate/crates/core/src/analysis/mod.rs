//! Deficiency bounds, the exhaustive worst-case oracle, and the simulator.

pub mod bounds;
pub mod oracle;
pub mod report;
pub mod simulate;

pub use bounds::{
    bound_for, bound_indexless, bound_multistage_baseq, bound_multistage_stacked, constant_rate_capacity,
    constant_rate_ideal, jbb_lower_bound, stacked_tally_allowance,
};
pub use oracle::{oracle_min_writes, OracleError, OracleResult, DEFAULT_MEMO_CAP};
pub use report::{DeficiencyReport, CSV_HEADER};
pub use simulate::{simulate, Policy, SimulationError};
