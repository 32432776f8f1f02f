use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use recres_core::{FieldDescriptor, RecurrenceSpec, ValidationOptions};

use crate::fuzz::{self, Bounds, FuzzConfig, FuzzError, NMax};
use crate::instance::InstanceFile;
use crate::verify::{self, EvalOptions, InstanceIdentity, Method, Report};

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    Internal = 1,
    Parse = 2,
    Validation = 3,
    Mismatch = 4,
    RetriesExhausted = 5,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Parser)]
#[command(name = "recres", version, about = "Resultants of polynomial recurrence sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print r_0..r_N with their degrees.
    Sequence {
        file: PathBuf,
        #[arg(long)]
        n: usize,
        /// Also write the sequence as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compute Res(r_n, r_{n-1}) by one or all methods.
    Resultant {
        file: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
        /// Write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check the closed form against both direct resultants for d+1 <= n <= n_max.
    Verify {
        file: PathBuf,
        #[arg(long)]
        n_max: usize,
        /// Write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sample, dump and verify random instances.
    Fuzz(FuzzArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Accept v_n = 0 (reported as a warning).
    #[arg(long)]
    pub allow_zero_v: bool,
}

impl CommonArgs {
    fn options(&self) -> ValidationOptions {
        ValidationOptions { allow_zero_v: self.allow_zero_v }
    }
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = 2)]
    pub d_max: usize,
    #[arg(long, default_value_t = 2)]
    pub m_max: usize,
    #[arg(long, default_value_t = 2)]
    pub k_max: usize,
    #[arg(long, default_value_t = 2)]
    pub i_max: usize,
    /// N or d+K; defaults to d+3 when m >= 2 and d+6 when m = 1.
    #[arg(long)]
    pub n_max: Option<NMax>,
    /// "rational" or a prime p.
    #[arg(long, default_value = "10007", value_parser = parse_field)]
    pub field: FieldDescriptor,
    /// Coefficients are drawn from [-B, B].
    #[arg(long, default_value_t = fuzz::DEFAULT_COEFF_BOUND)]
    pub coeff_bound: i64,
    #[arg(long, default_value_t = fuzz::DEFAULT_MAX_RETRIES)]
    pub max_retries: usize,
    /// Include wall-clock timings (makes the report non-reproducible).
    #[arg(long)]
    pub timings: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Formula,
    Sylvester,
    Euclid,
    All,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Formula => Method::Formula,
            MethodArg::Sylvester => Method::Sylvester,
            MethodArg::Euclid => Method::Euclid,
            MethodArg::All => Method::All,
        }
    }
}

pub fn parse_field(s: &str) -> Result<FieldDescriptor, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "rational" | "q" => Ok(FieldDescriptor::Rational),
        other => {
            let p = u64::from_str(other.strip_prefix("f_").unwrap_or(other))
                .map_err(|_| format!("expected 'rational' or a prime, got '{s}'"))?;
            FieldDescriptor::prime(p).map_err(|e| e.to_string())
        }
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

// Console write failures (closed pipe) are not worth a distinct exit code.
macro_rules! say {
    ($w:expr, $($arg:tt)*) => {{
        let _ = writeln!($w, $($arg)*);
    }};
}

fn load(path: &Path, io: &mut Io<'_>) -> Result<(InstanceFile, RecurrenceSpec), ExitCode> {
    let file = InstanceFile::load(path).map_err(|e| {
        say!(io.err, "error: {e}");
        ExitCode::Parse
    })?;
    let spec = file.to_spec().map_err(|e| {
        say!(io.err, "error: {e}");
        ExitCode::Parse
    })?;
    Ok((file, spec))
}

fn write_file(path: &Path, text: &str, io: &mut Io<'_>) -> Result<(), ExitCode> {
    fs::write(path, text).map_err(|e| {
        say!(io.err, "error: cannot write {}: {e}", path.display());
        ExitCode::Internal
    })
}

fn print_violations(report: &Report, io: &mut Io<'_>) {
    say!(io.err, "validation failed:");
    for v in &report.validation.violations {
        match v.step {
            Some(n) => say!(io.err, "  {} (n = {n}): {}", v.code, v.detail),
            None => say!(io.err, "  {}: {}", v.code, v.detail),
        }
    }
}

fn print_warnings(report: &Report, io: &mut Io<'_>) {
    for v in &report.validation.warnings {
        say!(io.err, "warning: {}: {}", v.code, v.detail);
    }
}

fn identity(file: &InstanceFile, spec: &RecurrenceSpec, path: &Path) -> InstanceIdentity {
    InstanceIdentity::of(spec, file.name.clone(), Some(path.display().to_string()))
}

/// Runs one parsed command line. Human-readable output goes to `out`,
/// diagnostics to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> ExitCode {
    let mut io = Io { out, err };
    let result = match cli.command {
        Command::Sequence { file, n, json, common } => sequence(&file, n, json.as_deref(), &common, &mut io),
        Command::Resultant { file, n, method, json, common } => {
            resultant(&file, n, method.into(), json.as_deref(), &common, &mut io)
        }
        Command::Verify { file, n_max, json, common } => verify_cmd(&file, n_max, json.as_deref(), &common, &mut io),
        Command::Fuzz(args) => fuzz_cmd(&args, &mut io),
    };
    result.unwrap_or_else(|code| code)
}

#[derive(serde::Serialize)]
struct SequenceEntry {
    n: usize,
    degree: String,
    coeffs: Vec<String>,
}

#[derive(serde::Serialize)]
struct SequenceDump {
    tool_version: &'static str,
    field: String,
    sequence: Vec<SequenceEntry>,
}

fn sequence(
    path: &Path,
    n: usize,
    json: Option<&Path>,
    common: &CommonArgs,
    io: &mut Io<'_>,
) -> Result<ExitCode, ExitCode> {
    let (file, spec) = load(path, io)?;
    let report = evaluate(&file, &spec, path, n + 1, n, plain(common), io)?;
    if report.validation_failed() {
        print_violations(&report, io);
        return Err(ExitCode::Validation);
    }
    print_warnings(&report, io);
    let seq = verify::sequence(&spec, n).map_err(|e| internal(e, io))?;
    for (s, r) in seq.iter().enumerate() {
        say!(io.out, "r_{s} = {r}, deg {}", r.degree());
    }
    if let Some(json) = json {
        let dump = SequenceDump {
            tool_version: verify::TOOL_VERSION,
            field: spec.descriptor().to_string(),
            sequence: seq
                .iter()
                .enumerate()
                .map(|(s, r)| SequenceEntry {
                    n: s,
                    degree: r.degree().to_string(),
                    coeffs: r.coeffs().iter().map(ToString::to_string).collect(),
                })
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&dump).expect("serializes");
        text.push('\n');
        write_file(json, &text, io)?;
    }
    Ok(ExitCode::Ok)
}

fn plain(common: &CommonArgs) -> EvalOptions {
    EvalOptions { method: Method::All, closed_form_checks: false, validation: common.options(), timings: true }
}

fn internal(e: recres_core::Error, io: &mut Io<'_>) -> ExitCode {
    say!(io.err, "error: {e}");
    ExitCode::Internal
}

fn evaluate(
    file: &InstanceFile,
    spec: &RecurrenceSpec,
    path: &Path,
    n_lo: usize,
    n_hi: usize,
    options: EvalOptions,
    io: &mut Io<'_>,
) -> Result<Report, ExitCode> {
    verify::evaluate(spec, identity(file, spec, path), file.seed, n_lo, n_hi, options).map_err(|e| internal(e, io))
}

fn finish(report: &Report, json: Option<&Path>, io: &mut Io<'_>) -> Result<(), ExitCode> {
    if let Some(json) = json {
        write_file(json, &report.to_json(), io)?;
    }
    if report.validation_failed() {
        print_violations(report, io);
        return Err(ExitCode::Validation);
    }
    print_warnings(report, io);
    Ok(())
}

fn resultant(
    path: &Path,
    n: usize,
    method: Method,
    json: Option<&Path>,
    common: &CommonArgs,
    io: &mut Io<'_>,
) -> Result<ExitCode, ExitCode> {
    let (file, spec) = load(path, io)?;
    if n <= spec.d() {
        say!(io.err, "error: n must be at least d + 1 = {}", spec.d() + 1);
        return Err(ExitCode::Parse);
    }
    let report = evaluate(&file, &spec, path, n, n, EvalOptions { method, ..plain(common) }, io)?;
    finish(&report, json, io)?;
    let record = &report.records[0];
    for (label, value) in [("formula", &record.formula), ("sylvester", &record.sylvester), ("euclid", &record.euclid)] {
        if let Some(value) = value {
            say!(io.out, "{label:<9} R_{n} = {value}");
        }
    }
    match verdict(&report) {
        ExitCode::Ok => Ok(ExitCode::Ok),
        code => {
            say!(io.err, "MISMATCH at n = {n}: {}", record.failures().join(", "));
            Err(code)
        }
    }
}

/// Exit status for a finished report, recomputed from its records.
pub fn verdict(report: &Report) -> ExitCode {
    if report.validation_failed() {
        ExitCode::Validation
    } else if !report.passed || report.records.iter().any(|r| !r.passed()) {
        ExitCode::Mismatch
    } else {
        ExitCode::Ok
    }
}

fn verify_cmd(
    path: &Path,
    n_max: usize,
    json: Option<&Path>,
    common: &CommonArgs,
    io: &mut Io<'_>,
) -> Result<ExitCode, ExitCode> {
    let (file, spec) = load(path, io)?;
    let options = EvalOptions { validation: common.options(), ..EvalOptions::verify() };
    let report = evaluate(&file, &spec, path, spec.d() + 1, n_max, options, io)?;
    finish(&report, json, io)?;
    for r in &report.records {
        let status = if r.passed() { "ok".to_string() } else { format!("FAIL ({})", r.failures().join(", ")) };
        say!(io.out, "n = {:<3} deg {:<6} R = {}  {status}", r.n, r.degree, r.sylvester.as_deref().unwrap_or("?"));
    }
    let passing = report.records.iter().filter(|r| r.passed()).count();
    say!(io.out, "{passing}/{} records pass", report.records.len());
    match (verdict(&report), report.first_failure) {
        (ExitCode::Ok, _) => Ok(ExitCode::Ok),
        (code, n) => {
            let n = n.unwrap_or(report.n_range[0]);
            say!(io.err, "first failing n = {n}");
            if let Some(r) = report.records.iter().find(|r| r.n == n) {
                say!(
                    io.err,
                    "  formula = {}, sylvester = {}, euclid = {}",
                    r.formula.as_deref().unwrap_or("?"),
                    r.sylvester.as_deref().unwrap_or("?"),
                    r.euclid.as_deref().unwrap_or("?")
                );
            }
            Err(code)
        }
    }
}

fn fuzz_cmd(args: &FuzzArgs, io: &mut Io<'_>) -> Result<ExitCode, ExitCode> {
    let config = FuzzConfig {
        seed: args.seed,
        count: args.count,
        bounds: Bounds {
            d_max: args.d_max,
            m_max: args.m_max,
            k_max: args.k_max,
            i_max: args.i_max,
            coeff_bound: args.coeff_bound,
        },
        n_max: args.n_max.unwrap_or(NMax::Default),
        field: args.field,
        max_retries: args.max_retries,
        timings: args.timings,
    };
    let report = fuzz::run(&config, &args.out).map_err(|e| {
        say!(io.err, "error: {e}");
        match e {
            FuzzError::Bounds(_) => ExitCode::Parse,
            FuzzError::RetriesExhausted { .. } => ExitCode::RetriesExhausted,
            FuzzError::Io { .. } | FuzzError::Core { .. } => ExitCode::Internal,
        }
    })?;
    let c = &report.coverage;
    say!(io.out, "{}/{} instances pass over {}", report.passed, report.count, report.field);
    say!(
        io.out,
        "coverage: edge_branch {}, generic_branch {}, l_zero {}, l_positive {}, with_t_terms {}",
        c.edge_branch,
        c.generic_branch,
        c.l_zero,
        c.l_positive,
        c.with_t_terms
    );
    say!(io.out, "report: {}", args.out.join(fuzz::REPORT_FILE).display());
    if report.all_passed {
        return Ok(ExitCode::Ok);
    }
    for entry in report.instances.iter().filter(|e| !e.report.passed) {
        say!(
            io.err,
            "FAIL {} (first failing n = {})",
            args.out.join(&entry.file).display(),
            entry.report.first_failure.map_or("-".into(), |n| n.to_string())
        );
    }
    Err(ExitCode::Mismatch)
}
