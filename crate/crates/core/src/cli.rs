//! Command-line front end: `bounds`, `oracle`, `simulate` and `trace`.
//!
//! Exit codes: 0 success, 1 invalid parameters or input, 2 a bound or codec
//! check failed, 3 the oracle ran out of budget.

use std::fs::File;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::bounds::{
    bound_indexless, bound_multistage_baseq, bound_multistage_stacked, constant_rate_capacity, constant_rate_ideal,
    jbb_lower_bound, stacked_tally_allowance,
};
use crate::analysis::report::{write_csv, write_json_lines, DeficiencyReport};
use crate::analysis::{bound_for, oracle_min_writes, simulate, OracleError, Policy, SimulationError, DEFAULT_MEMO_CAP};
use crate::cell::{EncodeOutcome, StateRecord};
use crate::codec::{Codec, FlashCode};
use crate::error::CodeError;
use crate::params::{CodeParams, Scheme};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "flashcode",
    version,
    about = "Flash memory rewriting codes: bounds, exact oracle, simulation and traces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the closed-form deficiency bounds for (n, k, q)
    Bounds(CliConfig),
    /// Compute the exact guaranteed write count by exhaustive search
    Oracle(CliConfig),
    /// Drive the code to erasure under a write policy
    Simulate(CliConfig),
    /// Apply bit writes read from stdin (one index per line) and print each state
    Trace(CliConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct CliConfig {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long, value_enum, default_value = "indexless")]
    pub scheme: Scheme,
    #[arg(long, value_enum, default_value = "uniform-random")]
    pub policy: Policy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Write output to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Oracle memo table limit (states)
    #[arg(long, default_value_t = DEFAULT_MEMO_CAP)]
    pub cap: usize,
}

impl CliConfig {
    fn params(&self) -> Result<CodeParams, CliError> {
        let missing = |flag: &str| CliError::Invalid(format!("missing required flag --{flag}"));
        let n = self.n.ok_or_else(|| missing("n"))?;
        let k = self.k.ok_or_else(|| missing("k"))?;
        let q = self.q.ok_or_else(|| missing("q"))?;
        Ok(CodeParams::new(n, k, q, self.scheme)?)
    }
}

#[derive(Debug)]
enum CliError {
    Invalid(String),
    CheckFailed(String),
    Budget(String),
    Io(io::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) | CliError::Io(_) => EXIT_INVALID,
            CliError::CheckFailed(_) => EXIT_CHECK_FAILED,
            CliError::Budget(_) => EXIT_BUDGET,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Invalid(m) | CliError::CheckFailed(m) | CliError::Budget(m) => m.clone(),
            CliError::Io(e) => format!("i/o error: {e}"),
        }
    }
}

impl From<CodeError> for CliError {
    fn from(e: CodeError) -> Self {
        match e {
            CodeError::InvalidParams(_)
            | CodeError::InsufficientCells(_)
            | CodeError::BitOutOfRange { .. }
            | CodeError::LengthMismatch { .. } => CliError::Invalid(e.to_string()),
            other => CliError::CheckFailed(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(stderr, "{line}");
            return EXIT_INVALID;
        }
    };
    let (config, result) = match &cli.command {
        Command::Bounds(c) => (c, with_output(c, stdout, |out| run_bounds(c, out))),
        Command::Oracle(c) => (c, with_output(c, stdout, |out| run_oracle(c, out))),
        Command::Simulate(c) => (c, with_output(c, stdout, |out| run_simulate(c, out))),
        Command::Trace(c) => (c, with_output(c, stdout, |out| run_trace(c, stdin, out))),
    };
    let _ = config;
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}

fn with_output<F>(config: &CliConfig, stdout: &mut dyn Write, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
{
    match &config.out {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            let result = body(&mut file);
            file.flush()?;
            result
        }
        None => {
            let result = body(stdout);
            stdout.flush()?;
            result
        }
    }
}

#[derive(Serialize)]
struct BoundRow {
    name: &'static str,
    value: String,
}

/// One row per closed-form bound, evaluated with each scheme's padded `k`.
fn bound_rows(n: usize, k: usize, q: usize) -> Result<Vec<BoundRow>, CliError> {
    let keff = |scheme| CodeParams::new(n, k, q, scheme).map(|p| p.k_eff() as u64);
    let k0 = keff(Scheme::Indexless)?;
    let kms = keff(Scheme::MultistageBaseQ)?;
    let q64 = q as u64;
    let cr = CodeParams::new(n, k, q, Scheme::ConstantRate)?;
    let exact = match constant_rate_capacity(&cr) {
        Ok(c) => c.to_string(),
        Err(_) => "n/a".to_string(),
    };
    let row = |name, value: String| BoundRow { name, value };
    Ok(vec![
        row("jbb_lower_bound", jbb_lower_bound(n as u64, k as u64, q64).to_string()),
        row("indexless", bound_indexless(k0, q64).to_string()),
        row("multistage_baseq", bound_multistage_baseq(kms, q64).to_string()),
        row("multistage_stacked", bound_multistage_stacked(kms, q64).to_string()),
        row(
            "multistage_stacked_with_tally",
            (bound_multistage_stacked(kms, q64) + stacked_tally_allowance(kms, q64)).to_string(),
        ),
        row(
            "constant_rate_writes_ideal",
            constant_rate_ideal(n as u64, k as u64, q64).map_or_else(|| "n/a".to_string(), |v| format!("{v:.3}")),
        ),
        row("constant_rate_writes_exact", exact),
    ])
}

fn run_bounds(config: &CliConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let params = config.params()?;
    let rows = bound_rows(params.n, params.k, params.q)?;
    match config.format {
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(out);
            for r in &rows {
                writer.serialize(r)?;
            }
            writer.flush()?;
        }
        Format::Json => {
            for r in &rows {
                serde_json::to_writer(&mut *out, r).map_err(io::Error::from)?;
                out.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn emit_reports(config: &CliConfig, out: &mut dyn Write, reports: &[DeficiencyReport]) -> Result<(), CliError> {
    match config.format {
        Format::Csv => write_csv(out, reports)?,
        Format::Json => write_json_lines(out, reports)?,
    }
    Ok(())
}

fn check_bounds(reports: &[DeficiencyReport]) -> Result<(), CliError> {
    match reports.iter().find(|r| !r.within_bound()) {
        Some(r) => Err(CliError::CheckFailed(format!(
            "deficiency {} exceeds bound {} (seed {:?})",
            r.deficiency, r.bound, r.seed
        ))),
        None => Ok(()),
    }
}

fn run_oracle(config: &CliConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let params = config.params()?;
    let codec = Codec::new(params)?;
    let result = oracle_min_writes(&codec, config.cap).map_err(|e| match e {
        OracleError::Code(c) => CliError::from(c),
        OracleError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
        OracleError::NonMonotone => CliError::CheckFailed(e.to_string()),
    })?;
    let report = DeficiencyReport::new(&params, "oracle", None, result.writes, bound_for(&params)?);
    let reports = [report];
    emit_reports(config, out, &reports)?;
    check_bounds(&reports)
}

fn run_simulate(config: &CliConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let params = config.params()?;
    let reports = simulate(&params, config.policy, config.seed, config.runs).map_err(|e| match e {
        SimulationError::Code(c) => CliError::from(c),
        v @ SimulationError::Violation { .. } => CliError::CheckFailed(v.to_string()),
    })?;
    emit_reports(config, out, &reports)?;
    check_bounds(&reports)
}

#[derive(Serialize)]
struct TraceRecord<'a> {
    event: &'static str,
    step: u64,
    bit: Option<usize>,
    #[serde(flatten)]
    state: Option<StateRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stage: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decoded: Option<&'a [u8]>,
}

fn run_trace(config: &CliConfig, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<(), CliError> {
    let params = config.params()?;
    let codec = Codec::new(params)?;
    let mut emit = |record: &TraceRecord| -> Result<(), CliError> {
        serde_json::to_writer(&mut *out, record).map_err(io::Error::from)?;
        out.write_all(b"\n")?;
        Ok(())
    };
    let mut state = codec.init();
    let decoded = codec.decode(&state)?;
    emit(&TraceRecord {
        event: "init",
        step: 0,
        bit: None,
        state: Some(StateRecord::new(&params, &state)),
        stage: Some(codec.stage(&state)?),
        decoded: Some(decoded.bits()),
    })?;
    let mut step = 0u64;
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let bit: usize = text
            .parse()
            .map_err(|_| CliError::Invalid(format!("line {}: expected a bit index, got `{text}`", lineno + 1)))?;
        if bit >= params.k {
            return Err(CliError::Invalid(format!(
                "line {}: bit index {bit} out of range for k = {}",
                lineno + 1,
                params.k
            )));
        }
        step += 1;
        match codec.encode(bit, &state)? {
            EncodeOutcome::Erase => {
                emit(&TraceRecord { event: "erase", step, bit: Some(bit), state: None, stage: None, decoded: None })?;
                return Ok(());
            }
            EncodeOutcome::Next(next) => state = next,
        }
        let decoded = codec.decode(&state)?;
        emit(&TraceRecord {
            event: "write",
            step,
            bit: Some(bit),
            state: Some(StateRecord::new(&params, &state)),
            stage: Some(codec.stage(&state)?),
            decoded: Some(decoded.bits()),
        })?;
    }
    Ok(())
}
