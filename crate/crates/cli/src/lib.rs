//! Batch front end: one job per invocation, JSON report on stdout.
//!
//! Exit codes: 0 clean PASS / good verdict, 1 invariant FAIL or bad verdict,
//! 2 input or precision error, 3 cohomology that is only window-limited.

use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use frobmod::frobcoh::{cohomology, cohomology_finite, CMComplex, SeriesWindow, Status, DEFAULT_SEED};
use frobmod::json::{matrix_to_wire, AnyModule, ModuleWire, Rational, SeriesWire, SCHEMA_VERSION};
use frobmod::linalg::QMatrix;
use frobmod::monodromy::{is_nonsingular, residue, PhiNModule, PhiNWire, Witness};
use frobmod::phinabla::{Check, ValidationReport};
use frobmod::pi1::{rank_report, LieWire, NilpotentLieData, RankOracle, VerdictWire};
use frobmod::series::TruncatedSeries;
use frobmod::Error;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_WINDOW_LIMITED: i32 = 3;

#[derive(Parser, Debug, Clone)]
#[command(name = "frobmod", version, about = "Frobenius modules, cohomology and monodromy on truncated series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Highest exponent solved for in the series cohomology regime.
    #[arg(long, global = true)]
    pub window: Option<i64>,

    /// Required absolute precision p^m of every coefficient used.
    #[arg(long, global = true)]
    pub precision: Option<i64>,

    /// Seed for the randomized probes of `validate`.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Check the invariants of any supported object.
    Validate { input: PathBuf },
    /// Frobenius cohomology of a module, or of finite data `{Phi0, Phi1}`.
    Cohomology { input: PathBuf },
    /// `(Phi, N)` at the origin of a log module.
    Residue { input: PathBuf },
    /// Whether a log module extends across the origin.
    Nonsingular { input: PathBuf },
    /// Good-reduction verdict from nilpotent Lie data, or from `H1` as a
    /// `(Phi, N)`-module via the free model.
    Verdict {
        input: PathBuf,
        /// Level of the free model built from `H1` input.
        #[arg(long, default_value_t = 3)]
        level: usize,
    },
    /// Rank recursion for the universal unipotent object.
    Ranks {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        level: usize,
        #[arg(long, value_enum, default_value_t = OracleArg::Euler)]
        oracle: OracleArg,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleArg {
    Euler,
    Model,
}

impl From<OracleArg> for RankOracle {
    fn from(o: OracleArg) -> Self {
        match o {
            OracleArg::Euler => RankOracle::Euler,
            OracleArg::Model => RankOracle::Model,
        }
    }
}

/// Exit code and the report written to stdout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    version: &'a str,
    status: &'a str,
    error: ErrorBody,
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    kind: String,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    location: Option<String>,
}

/// Failure of a job before a report could be produced.
#[derive(Debug)]
pub struct JobError {
    code: i32,
    body: ErrorBody,
}

impl JobError {
    fn input(message: String, location: Option<String>) -> Self {
        JobError { code: EXIT_ERROR, body: ErrorBody { kind: "input".into(), message, location } }
    }
}

impl From<Error> for JobError {
    fn from(e: Error) -> Self {
        let (code, kind, location) = match &e {
            Error::ValidationFailed(_) => (EXIT_FAIL, "validation", None),
            Error::ComplexNotExact(_) => (EXIT_FAIL, "complex", None),
            Error::NonSingularityViolation { .. } => (EXIT_FAIL, "singular", None),
            Error::PrecisionExhausted { location } => (EXIT_ERROR, "precision", Some(location.clone())),
            Error::TruncationInsufficient(_) => (EXIT_ERROR, "precision", None),
            Error::LevelOutOfRange(_) => (EXIT_ERROR, "level", None),
            Error::IdealNotStable { .. } => (EXIT_FAIL, "ideal", None),
            _ => (EXIT_ERROR, "input", None),
        };
        JobError { code, body: ErrorBody { kind: kind.into(), message: e.to_string(), location } }
    }
}

fn render<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Run a parsed job.
pub fn run(cli: &Cli) -> Outcome {
    match dispatch(cli) {
        Ok(o) => o,
        Err(e) => Outcome { code: e.code, report: render(&ErrorReport { version: SCHEMA_VERSION, status: "ERROR", error: e.body }) },
    }
}

/// Parse arguments (without the program name) and run.
pub fn run_args<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("frobmod")).chain(args.into_iter().map(Into::into));
    match Cli::try_parse_from(argv) {
        Ok(cli) => run(&cli),
        Err(e) => Outcome { code: EXIT_ERROR, report: e.to_string() },
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome, JobError> {
    if let Some(w) = cli.window {
        if w <= 0 {
            return Err(JobError::input(format!("--window must be positive, got {w}"), None));
        }
    }
    if let Some(m) = cli.precision {
        if m <= 0 {
            return Err(JobError::input(format!("--precision must be positive, got {m}"), None));
        }
    }
    match &cli.command {
        Command::Validate { input } => validate(&read_json(input)?, cli.seed),
        Command::Cohomology { input } => run_cohomology(&read_json(input)?, cli.window, cli.precision),
        Command::Residue { input } => run_residue(&read_json(input)?),
        Command::Nonsingular { input } => run_nonsingular(&read_json(input)?),
        Command::Verdict { input, level } => run_verdict(&read_json(input)?, *level),
        Command::Ranks { g, level, oracle } => {
            let report = rank_report(*g, *level, (*oracle).into())?;
            Ok(Outcome { code: EXIT_PASS, report: render(&report) })
        }
    }
}

fn read_json(path: &PathBuf) -> Result<Value, JobError> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| JobError::input(format!("reading stdin: {e}"), None))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| JobError::input(format!("reading {}: {e}", path.display()), None))?
    };
    serde_json::from_str(&text)
        .map_err(|e| JobError::input(format!("malformed JSON: {e}"), Some(format!("line {} column {}", e.line(), e.column()))))
}

fn parse<T: for<'de> Deserialize<'de>>(v: &Value, what: &str) -> Result<T, JobError> {
    serde_json::from_value(v.clone()).map_err(|e| JobError::input(format!("not a valid {what}: {e}"), None))
}

/// Kinds of input object, told apart by their keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Module,
    LogModule,
    PhiN,
    LieData,
    FinitePhi,
    Series,
}

pub fn detect(v: &Value) -> Result<Kind, JobError> {
    let Some(obj) = v.as_object() else {
        return Err(JobError::input("expected a JSON object".into(), None));
    };
    let has = |k: &str| obj.contains_key(k);
    Ok(if has("frob") {
        if obj.get("log").and_then(Value::as_bool).unwrap_or(false) {
            Kind::LogModule
        } else {
            Kind::Module
        }
    } else if has("level") && has("brackets") {
        Kind::LieData
    } else if has("Phi0") && has("Phi1") {
        Kind::FinitePhi
    } else if has("Phi") && has("N") {
        Kind::PhiN
    } else if has("ringTag") {
        Kind::Series
    } else {
        return Err(JobError::input(
            "unrecognized object: expected a module, (Phi, N) data, Lie data, {Phi0, Phi1} or a series".into(),
            None,
        ));
    })
}

/// `{Phi0, Phi1}`: Frobenius on `H^0_dR` and (twisted) on `H^1_dR`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteWire {
    #[serde(rename = "Phi0")]
    pub phi0: Vec<Vec<Rational>>,
    #[serde(rename = "Phi1")]
    pub phi1: Vec<Vec<Rational>>,
}

fn square(rows: &[Vec<Rational>], name: &str) -> Result<QMatrix, JobError> {
    if rows.is_empty() {
        return Ok(QMatrix::zeros(0, 0));
    }
    Ok(frobmod::json::matrix_from_wire(rows, rows.len(), name)?)
}

fn module_of(v: &Value) -> Result<AnyModule, JobError> {
    let w: ModuleWire = parse(v, "module")?;
    Ok(AnyModule::try_from(&w)?)
}

#[derive(Serialize)]
struct ValidateReport {
    version: &'static str,
    kind: Kind,
    status: &'static str,
    checks: Vec<Check>,
}

fn validate(v: &Value, seed: u64) -> Result<Outcome, JobError> {
    let kind = detect(v)?;
    let report = match kind {
        Kind::Module => {
            let AnyModule::Plain(m) = module_of(v)? else { unreachable!("log flag checked by detect") };
            let mut report = m.validate();
            if report.passed() {
                let complex = CMComplex::build_seeded(&m, seed);
                report.checks.push(match complex {
                    Ok(_) => Check {
                        name: "complex".into(),
                        passed: true,
                        detail: Some(format!("d1 o d0 = 0 on probes, seed {seed}")),
                        first_failure: None,
                    },
                    Err(e) => Check { name: "complex".into(), passed: false, detail: Some(e.to_string()), first_failure: None },
                });
            }
            report
        }
        Kind::LogModule => match module_of(v)? {
            AnyModule::Log(l) => l.validate(),
            AnyModule::Plain(_) => unreachable!("log flag checked by detect"),
        },
        Kind::PhiN => PhiNModule::try_from(parse::<PhiNWire>(v, "(Phi, N) object")?)?.validate(),
        Kind::LieData => NilpotentLieData::try_from(&parse::<LieWire>(v, "Lie data object")?)?.validate(),
        Kind::FinitePhi => {
            let w: FiniteWire = parse(v, "{Phi0, Phi1} object")?;
            square(&w.phi0, "Phi0")?;
            square(&w.phi1, "Phi1")?;
            let mut r = ValidationReport::default();
            r.checks.push(Check { name: "square".into(), passed: true, detail: None, first_failure: None });
            r
        }
        Kind::Series => {
            TruncatedSeries::try_from(&parse::<SeriesWire>(v, "series")?)?;
            let mut r = ValidationReport::default();
            r.checks.push(Check { name: "well_formed".into(), passed: true, detail: None, first_failure: None });
            r
        }
    };
    let passed = report.passed();
    Ok(Outcome {
        code: if passed { EXIT_PASS } else { EXIT_FAIL },
        report: render(&ValidateReport {
            version: SCHEMA_VERSION,
            kind,
            status: if passed { "PASS" } else { "FAIL" },
            checks: report.checks,
        }),
    })
}

fn run_cohomology(v: &Value, window: Option<i64>, precision: Option<i64>) -> Result<Outcome, JobError> {
    let report = match detect(v)? {
        Kind::FinitePhi => {
            let w: FiniteWire = parse(v, "{Phi0, Phi1} object")?;
            cohomology_finite(&square(&w.phi0, "Phi0")?, &square(&w.phi1, "Phi1")?)
        }
        Kind::Module => {
            let AnyModule::Plain(m) = module_of(v)? else { unreachable!("log flag checked by detect") };
            let mut w = SeriesWindow::for_module(&m);
            if let Some(hi) = window {
                w.hi = hi;
            }
            cohomology(&m, w, precision)?
        }
        other => return Err(JobError::input(format!("cohomology takes a module or {{Phi0, Phi1}}, got {other:?}"), None)),
    };
    let code = match report.status() {
        Status::Pass => EXIT_PASS,
        Status::WindowLimited => EXIT_WINDOW_LIMITED,
    };
    Ok(Outcome { code, report: render(&report) })
}

fn log_module(v: &Value) -> Result<frobmod::phinabla::LogPhiNablaModule, JobError> {
    match detect(v)? {
        Kind::LogModule => match module_of(v)? {
            AnyModule::Log(l) => Ok(l),
            AnyModule::Plain(_) => unreachable!("log flag checked by detect"),
        },
        other => Err(JobError::input(format!("expected a log module, got {other:?}"), None)),
    }
}

#[derive(Serialize)]
struct ResidueReport {
    version: &'static str,
    #[serde(flatten)]
    residue: PhiNWire,
    #[serde(rename = "nilpotencyIndex")]
    nilpotency_index: usize,
    checks: Vec<Check>,
}

fn run_residue(v: &Value) -> Result<Outcome, JobError> {
    let l = log_module(v)?;
    let r = residue(&l)?;
    let report = ResidueReport {
        version: SCHEMA_VERSION,
        residue: PhiNWire::from(&r),
        nilpotency_index: r.n().nilpotency_index().unwrap_or(0),
        checks: r.validate().checks,
    };
    Ok(Outcome { code: EXIT_PASS, report: render(&report) })
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum WitnessWire {
    Module {
        module: Box<ModuleWire>,
    },
    Monodromy {
        #[serde(rename = "N")]
        n: Vec<Vec<Rational>>,
    },
}

#[derive(Serialize)]
struct NonsingularReport {
    version: &'static str,
    nonsingular: bool,
    witness: WitnessWire,
    caveats: Vec<String>,
}

fn run_nonsingular(v: &Value) -> Result<Outcome, JobError> {
    let verdict = is_nonsingular(&log_module(v)?)?;
    let witness = match &verdict.witness {
        Witness::Module(m) => WitnessWire::Module { module: Box::new(ModuleWire::from(m)) },
        Witness::Monodromy(n) => WitnessWire::Monodromy { n: matrix_to_wire(n) },
    };
    let report = NonsingularReport { version: SCHEMA_VERSION, nonsingular: verdict.nonsingular, witness, caveats: verdict.caveats };
    Ok(Outcome { code: if verdict.nonsingular { EXIT_PASS } else { EXIT_FAIL }, report: render(&report) })
}

#[derive(Serialize)]
struct VerdictReport {
    #[serde(flatten)]
    verdict: VerdictWire,
    dims: Vec<usize>,
    abelianization: PhiNWire,
}

fn run_verdict(v: &Value, level: usize) -> Result<Outcome, JobError> {
    let data = match detect(v)? {
        Kind::LieData => {
            let data = NilpotentLieData::try_from(&parse::<LieWire>(v, "Lie data object")?)?;
            data.validate().into_result()?;
            data
        }
        Kind::PhiN => {
            let h1 = PhiNModule::try_from(parse::<PhiNWire>(v, "(Phi, N) object")?)?;
            NilpotentLieData::free_nilpotent(&h1, level)?
        }
        other => return Err(JobError::input(format!("verdict takes Lie data or (Phi, N) data, got {other:?}"), None)),
    };
    let verdict = data.good_reduction_verdict()?;
    let report =
        VerdictReport { verdict: VerdictWire::from(&verdict), dims: data.dims(), abelianization: PhiNWire::from(&data.abelianization()?) };
    Ok(Outcome { code: if verdict.good { EXIT_PASS } else { EXIT_FAIL }, report: render(&report) })
}
