//! Command-line front end. Every subcommand reads one JSON document (from
//! `--input FILE`, `--input -` for stdin, or inline via `--json`) and writes
//! one JSON document. Errors come out as `{"error": code, "detail": message}`
//! with a nonzero exit status.

use std::ffi::OsString;
use std::io::Read;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use twisted_hahn::lifting::{lift_auto, CoeffAutoWire, LiftReport};
use twisted_hahn::verify::{run_suite, verify_all, Suite, VerifyReport};
use twisted_hahn::{
    check_cocycle, check_cocycle_compat, check_sigma_compat, pseudo_limit, verify_lift_hom, CocycleReport,
    CocycleSpec, CoeffAutoSpec, Error, FieldConfig, GBetaElement, GroupAutoSpec, InversionAlgorithm,
    PadicNumber, PseudoCauchyCase, PseudoCauchyPrefix, RationalExponent, SeriesContext, TwistedSeries,
};
use twisted_hahn::coefficient_field::{ExtWire, PadicWire};

#[derive(Parser, Debug)]
#[command(name = "twisted-hahn", version, about = "Exact arithmetic on twisted Hahn series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON input file, or `-` for stdin
    #[arg(long, global = true, value_name = "FILE")]
    pub input: Option<String>,
    /// JSON input given inline
    #[arg(long, global = true, value_name = "JSON", conflicts_with = "input")]
    pub json: Option<String>,
    /// Seed for sampled checks
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of sampled trials
    #[arg(long, global = true, default_value_t = 100)]
    pub trials: usize,
    /// Write the result here instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the cocycle laws on given triples
    CocycleCheck,
    #[command(subcommand)]
    Group(GroupOp),
    #[command(subcommand)]
    Series(SeriesOp),
    #[command(subcommand)]
    Padic(PadicOp),
    /// Pseudo-limit of a pseudo-Cauchy prefix
    PseudoLimit,
    #[command(subcommand)]
    Lift(LiftOp),
    /// Run the property suites
    Verify {
        /// Only run the named suite (repeatable)
        #[arg(long = "suite", value_name = "NAME")]
        suites: Vec<String>,
    },
}

/// Operations in the value group `G_beta`
#[derive(Subcommand, Debug)]
pub enum GroupOp {
    /// `{cocycle, a, b}` -> a + b
    Add,
    /// `{cocycle, a}` -> -a
    Neg,
    /// `{a, b}` -> -1, 0 or 1
    Cmp,
}

/// Operations on twisted series
#[derive(Subcommand, Debug)]
pub enum SeriesOp {
    /// `{a, b}` -> a + b
    Add,
    /// `{a, b}` -> a b
    Mul,
    /// `{a}` -> valuation in `G_beta`, or "inf"
    Val,
    /// `{a, algorithm?}` -> inverse below the cutoff
    Inv,
    /// `{a}` -> `{c, h_tilde, a}` where the input is c t^h_tilde (1 - a)
    Factor,
}

/// Operations on p-adic numbers
#[derive(Subcommand, Debug)]
pub enum PadicOp {
    /// `{field, a, b}` -> a + b
    Add,
    /// `{field, a, b}` -> a b
    Mul,
    /// `{field, a}` -> 1/a
    Inv,
}

/// Lifting automorphisms to series
#[derive(Subcommand, Debug)]
pub enum LiftOp {
    /// `{series, phi_bar, spec}` -> the image of the series
    Apply,
    /// `{context, phi_bar, spec}` -> compatibility and sampled homomorphism checks
    Check,
}

/// Exit status and what goes to stdout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(String),
    /// A verification ran and found counterexamples; the report is the output.
    Refuted(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::InvalidConfig(_) => 2,
        Error::ContextMismatch => 3,
        Error::DivisionByZero | Error::ZeroSeries | Error::NegativeValuation(_) => 4,
        Error::NotPseudoCauchy(_) | Error::UndeterminedCase => 5,
        Error::IncompatibleAutomorphism(_) => 6,
        Error::Overflow(_) => 70,
    }
}

#[derive(Serialize)]
struct ErrorOut<'a> {
    error: &'a str,
    detail: &'a str,
}

/// `{"error": code, "detail": detail}` plus a newline.
pub fn error_json(code: &str, detail: &str) -> String {
    let text = serde_json::to_string(&ErrorOut { error: code, detail }).expect("strings serialize");
    format!("{text}\n")
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome { code: 0, stdout: e.to_string() },
                _ => Outcome { code: 2, stdout: error_json("ParseError", e.to_string().trim()) },
            };
        }
    };
    let (code, body) = match execute(&cli, stdin) {
        Ok(body) => (0, body),
        Err(Failure::Refuted(body)) => (1, body),
        Err(Failure::Core(e)) => return Outcome { code: exit_code(&e), stdout: error_json(e.code(), &e.to_string()) },
        Err(Failure::Io(msg)) => return Outcome { code: 74, stdout: error_json("IoError", &msg) },
    };
    let text = format!("{body}\n");
    match &cli.output {
        None => Outcome { code, stdout: text },
        Some(path) => match std::fs::write(path, text) {
            Ok(()) => Outcome { code, stdout: String::new() },
            Err(e) => Outcome { code: 74, stdout: error_json("IoError", &format!("{}: {e}", path.display())) },
        },
    }
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<String, Failure> {
    let mut input = || read_input(cli, stdin);
    let out = match &cli.command {
        Command::CocycleCheck => {
            let req: CocycleCheckRequest = parse(&input()?)?;
            let report = check_cocycle(&req.cocycle, &req.samples);
            let ok = report.ok();
            verdict(ok, to_json(&CocycleCheckOut { ok, report })?)
        }
        Command::Group(op) => group(op, &input()?),
        Command::Series(op) => series(op, &input()?),
        Command::Padic(op) => padic(op, &input()?),
        Command::PseudoLimit => {
            let req: PrefixRequest = parse(&input()?)?;
            let ctx = Arc::new(req.context);
            let entries = req
                .entries
                .iter()
                .map(|terms| TwistedSeries::from_json_terms(&ctx, terms))
                .collect::<Result<Vec<_>, _>>()?;
            let prefix = PseudoCauchyPrefix::new(entries)?;
            let limit = pseudo_limit(&prefix)?;
            to_json(&PseudoLimitOut { case: prefix.case(), ladder: prefix.ladder().to_vec(), limit })
        }
        Command::Lift(LiftOp::Apply) => {
            let req: LiftApplyRequest = parse(&input()?)?;
            let phi = CoeffAutoSpec::from_wire(&req.phi_bar, req.series.field())?;
            to_json(&lift_auto(&req.series, &phi, &req.spec)?)
        }
        Command::Lift(LiftOp::Check) => {
            let req: LiftCheckRequest = parse(&input()?)?;
            let ctx = Arc::new(req.context);
            let phi = CoeffAutoSpec::from_wire(&req.phi_bar, &ctx.field)?;
            let sigma_compatible = check_sigma_compat(&phi, &ctx.field, &(-8..=8).collect::<Vec<_>>());
            let cocycle_compatible = check_cocycle_compat(&req.spec, &ctx.cocycle, &exponent_pairs());
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let report = verify_lift_hom(&phi, &req.spec, &ctx, cli.trials, &mut rng)?;
            let ok = sigma_compatible && cocycle_compatible && report.ok();
            verdict(ok, to_json(&LiftCheckOut { ok, sigma_compatible, cocycle_compatible, report })?)
        }
        Command::Verify { suites } => {
            let report = if suites.is_empty() {
                verify_all(cli.seed, cli.trials)
            } else {
                let picked = suites
                    .iter()
                    .map(|n| Suite::from_name(n).ok_or_else(|| Error::Parse(format!("unknown suite {n:?}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                let suites: Vec<_> = if cli.trials == 0 {
                    Vec::new()
                } else {
                    picked.into_iter().map(|s| run_suite(s, cli.seed, cli.trials)).collect()
                };
                let ok = suites.iter().all(|s| s.ok());
                VerifyReport { suites, ok }
            };
            verdict(report.ok, to_json(&report)?)
        }
    };
    out
}

/// A check that found counterexamples still prints its report, but exits 1.
fn verdict(ok: bool, body: String) -> Result<String, Failure> {
    if ok {
        Ok(body)
    } else {
        Err(Failure::Refuted(body))
    }
}

fn group(op: &GroupOp, text: &str) -> Result<String, Failure> {
    match op {
        GroupOp::Add => {
            let req: GroupBinary = parse(text)?;
            to_json(&req.a.add(&req.b, &req.cocycle))
        }
        GroupOp::Neg => {
            let req: GroupUnary = parse(text)?;
            to_json(&req.a.neg(&req.cocycle))
        }
        GroupOp::Cmp => {
            let req: GroupCmp = parse(text)?;
            to_json(&serde_json::json!({ "cmp": req.a.cmp(&req.b) as i8 }))
        }
    }
}

fn series(op: &SeriesOp, text: &str) -> Result<String, Failure> {
    match op {
        SeriesOp::Add => {
            let req: SeriesBinary = parse(text)?;
            to_json(&req.a.add(&req.b)?)
        }
        SeriesOp::Mul => {
            let req: SeriesBinary = parse(text)?;
            to_json(&req.a.mul(&req.b)?)
        }
        SeriesOp::Val => {
            let req: SeriesUnary = parse(text)?;
            to_json(&req.a.val())
        }
        SeriesOp::Inv => {
            let req: SeriesInv = parse(text)?;
            to_json(&req.a.inv_with(req.algorithm)?)
        }
        SeriesOp::Factor => {
            let req: SeriesUnary = parse(text)?;
            let f = req.a.factor()?;
            to_json(&FactorOut { c: f.c.to_wire(req.a.field()), h_tilde: f.h_tilde, a: f.a })
        }
    }
}

fn padic(op: &PadicOp, text: &str) -> Result<String, Failure> {
    let (cfg, out) = match op {
        PadicOp::Add | PadicOp::Mul => {
            let req: PadicBinary = parse(text)?;
            let a = PadicNumber::from_wire(&req.a, &req.field)?;
            let b = PadicNumber::from_wire(&req.b, &req.field)?;
            let out = if matches!(op, PadicOp::Add) { a.add(&b, &req.field) } else { a.mul(&b, &req.field) };
            (req.field, out)
        }
        PadicOp::Inv => {
            let req: PadicUnary = parse(text)?;
            let out = PadicNumber::from_wire(&req.a, &req.field)?.inv(&req.field)?;
            (req.field, out)
        }
    };
    to_json(&out.to_wire(&cfg))
}

/// Exponents `n/d` with `d <= 6` and `|n/d| <= 2`, paired with each other.
fn exponent_pairs() -> Vec<(RationalExponent, RationalExponent)> {
    let mut hs: Vec<RationalExponent> =
        (1..=6).flat_map(|d| (-2 * d..=2 * d).map(move |n| RationalExponent::ratio(n, d))).collect();
    hs.sort();
    hs.dedup();
    hs.iter().flat_map(|x| hs.iter().map(move |y| (x.clone(), y.clone()))).collect()
}

fn read_input(cli: &Cli, stdin: &mut dyn Read) -> Result<String, Failure> {
    match (&cli.json, cli.input.as_deref()) {
        (Some(text), _) => Ok(text.clone()),
        (None, Some("-")) => {
            let mut buf = String::new();
            stdin.read_to_string(&mut buf).map_err(|e| Failure::Io(format!("stdin: {e}")))?;
            Ok(buf)
        }
        (None, Some(path)) => std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{path}: {e}"))),
        (None, None) => Err(Error::Parse("no input: pass --input FILE, --input - or --json".into()).into()),
    }
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T, Error> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    // every output type serializes; a failure here is a bug
    serde_json::to_string(value).map_err(|e| Failure::Core(Error::Overflow(format!("serialization: {e}"))))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CocycleCheckRequest {
    cocycle: CocycleSpec,
    samples: Vec<(RationalExponent, RationalExponent, RationalExponent)>,
}

#[derive(Serialize)]
struct CocycleCheckOut {
    ok: bool,
    #[serde(flatten)]
    report: CocycleReport,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupBinary {
    cocycle: CocycleSpec,
    a: GBetaElement,
    b: GBetaElement,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupUnary {
    cocycle: CocycleSpec,
    a: GBetaElement,
}

/// The order does not depend on the cocycle, so none is asked for.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupCmp {
    a: GBetaElement,
    b: GBetaElement,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesBinary {
    a: TwistedSeries,
    b: TwistedSeries,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesUnary {
    a: TwistedSeries,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesInv {
    a: TwistedSeries,
    #[serde(default = "default_algorithm")]
    algorithm: InversionAlgorithm,
}

fn default_algorithm() -> InversionAlgorithm {
    InversionAlgorithm::Geometric
}

#[derive(Serialize)]
struct FactorOut {
    c: ExtWire,
    h_tilde: RationalExponent,
    a: TwistedSeries,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PadicBinary {
    field: FieldConfig,
    a: PadicWire,
    b: PadicWire,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PadicUnary {
    field: FieldConfig,
    a: PadicWire,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PrefixRequest {
    context: SeriesContext,
    entries: Vec<Value>,
}

#[derive(Serialize)]
struct PseudoLimitOut {
    case: PseudoCauchyCase,
    ladder: Vec<GBetaElement>,
    limit: TwistedSeries,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LiftApplyRequest {
    series: TwistedSeries,
    phi_bar: CoeffAutoWire,
    spec: GroupAutoSpec,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LiftCheckRequest {
    context: SeriesContext,
    phi_bar: CoeffAutoWire,
    spec: GroupAutoSpec,
}

#[derive(Serialize)]
struct LiftCheckOut {
    ok: bool,
    sigma_compatible: bool,
    cocycle_compatible: bool,
    #[serde(flatten)]
    report: LiftReport,
}
