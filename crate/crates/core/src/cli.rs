//! Command-line front end. [`run`] parses arguments, writes the report to
//! `out` and diagnostics to `err`, and returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | certificate failed re-verification |
//! | 2 | malformed input (files, flags, suite spec) |
//! | 3 | tensor spaces do not match |
//! | 4 | unknown norm or invalid exponent |
//! | 5 | at least one law failed |

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::json::to_machine_string;
use crate::laws::{default_suite, run_suite, LawCase, SuiteReport};
use crate::nuclear::{
    check_certificate, nuclear_bracket, tuple_beta_star, tuple_beta_star_lower, Certificate, NormKind,
};
use crate::spectral::{spectral_bracket, tuple_alpha, Exponent, NormBracket, SolverConfig, UpperMethod, Witness};
use crate::tensor::io::{read_tensor, write_tensor};
use crate::tensor::{DenseTensor, Field, TensorTuple};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_CERTIFICATE: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_SPACE_MISMATCH: i32 = 3;
pub const EXIT_INVALID_NORM: i32 = 4;
pub const EXIT_LAW_FAILURE: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "kronorm", version, about = "Certified tensor norm brackets, products and law checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bracket a norm of one tensor or a tuple of tensors.
    Norm(NormArgs),
    /// Vertical tensor product or direct sum of two tensor files.
    Product(ProductArgs),
    /// Run the law suite.
    Verify(VerifyArgs),
    /// Re-verify a certificate against its tensor file(s).
    CheckCertificate(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    num_starts: Option<usize>,
    /// Base seed of the random starts.
    #[arg(long)]
    seed: Option<u64>,
    /// Run every solver sequentially.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct NormArgs {
    /// Tensor file(s); several files form a tuple.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// frobenius, spectral, nuclear, alpha or beta-star.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
    /// Write the certificate here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dual witness file(s) for the nuclear / beta-star lower bound, one per member.
    #[arg(long, num_args = 1..)]
    witness: Vec<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Op {
    Kron,
    Dirsum,
}

#[derive(Debug, Args)]
struct ProductArgs {
    #[arg(long, value_enum)]
    op: Op,
    a: PathBuf,
    b: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Suite spec: a JSON list of law cases, or {"cases": [...], "repetitions": n}.
    spec: Option<PathBuf>,
    /// Run the built-in suite (every law, both fields, three seeds).
    #[arg(long, conflicts_with = "spec")]
    default: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
    /// Also write the machine report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    certificate: PathBuf,
    #[arg(required = true)]
    tensors: Vec<PathBuf>,
}

/// A failure with the exit code it maps to.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SpaceMismatch { .. } | Error::OrderMismatch(..) | Error::FieldMismatch => EXIT_SPACE_MISMATCH,
            Error::InvalidExponent(_) | Error::MissingExponent(_) | Error::NotConjugate { .. } => EXIT_INVALID_NORM,
            _ => EXIT_MALFORMED,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: EXIT_MALFORMED, message: e.to_string() }
    }
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

type Outcome = std::result::Result<i32, Failure>;

/// Parse `args` (program name first) and run the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not errors.
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_MALFORMED;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let outcome = match cli.command {
        Command::Norm(a) => cmd_norm(&a, out),
        Command::Product(a) => cmd_product(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::CheckCertificate(a) => cmd_check_certificate(&a, out),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn parse_exponent(s: &Option<String>) -> std::result::Result<Option<Exponent>, Failure> {
    s.as_deref()
        .map(|s| s.parse::<Exponent>().map_err(|e| fail(EXIT_INVALID_NORM, e.to_string())))
        .transpose()
}

fn read_tuple(paths: &[PathBuf]) -> std::result::Result<TensorTuple, Failure> {
    let members = paths
        .iter()
        .map(|p| read_tensor(p).map_err(|e| fail(EXIT_MALFORMED, format!("{}: {e}", p.display()))))
        .collect::<std::result::Result<Vec<DenseTensor>, _>>()?;
    Ok(TensorTuple::new(members)?)
}

fn solver_config(a: &SolverArgs) -> SolverConfig {
    let mut cfg = SolverConfig::default();
    if let Some(v) = a.max_iters {
        cfg.max_iters = v;
    }
    if let Some(v) = a.rel_tol {
        cfg.rel_tol = v;
    }
    if let Some(v) = a.num_starts {
        cfg.num_starts = v;
    }
    if let Some(v) = a.seed {
        cfg.base_seed = v;
    }
    if a.sequential {
        cfg = cfg.sequential();
    }
    cfg
}

fn write_file(path: &Path, text: &str) -> std::result::Result<(), Failure> {
    fs::write(path, text).map_err(|e| fail(EXIT_MALFORMED, format!("{}: {e}", path.display())))
}

/// The report printed by `norm`.
#[derive(Debug, Serialize, Deserialize)]
pub struct NormReport {
    pub norm: NormKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<Exponent>,
    pub shape: Vec<usize>,
    pub field: Field,
    pub members: usize,
    pub lower: f64,
    pub upper: f64,
    pub relative_gap: f64,
    pub upper_method: UpperMethod,
    pub iterations: usize,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<PathBuf>,
    pub config_digest: String,
}

/// Raise the lower end with a caller-supplied dual witness when it helps.
fn inject_witness(
    b: &mut NormBracket,
    s: &TensorTuple,
    w: TensorTuple,
    cfg: &SolverConfig,
) -> std::result::Result<(), Failure> {
    let lower = tuple_beta_star_lower(s, &w, cfg)?;
    if lower > b.lower {
        b.lower = lower.min(b.upper);
        b.lower_witness = Some(Witness::Dual(w));
    }
    Ok(())
}

fn cmd_norm(a: &NormArgs, out: &mut dyn Write) -> Outcome {
    let kind: NormKind = a.kind.parse().map_err(|_| {
        fail(EXIT_INVALID_NORM, format!("unknown norm `{}` (frobenius, spectral, nuclear, alpha, beta-star)", a.kind))
    })?;
    let (alpha, beta) = (parse_exponent(&a.alpha)?, parse_exponent(&a.beta)?);
    let s = read_tuple(&a.inputs)?;
    let mut cfg = solver_config(&a.solver);
    if let Some(x) = alpha {
        cfg.alpha = Some(x);
    }
    if let Some(x) = beta {
        cfg.beta = Some(x);
    }
    cfg.validate()?;
    let single = matches!(kind, NormKind::Spectral | NormKind::Nuclear);
    if single && s.len() != 1 {
        return Err(fail(EXIT_MALFORMED, format!("{kind} takes one tensor, got {}", s.len())));
    }
    if !a.witness.is_empty() && !matches!(kind, NormKind::Nuclear | NormKind::BetaStar) {
        return Err(fail(EXIT_MALFORMED, "--witness applies to nuclear and beta-star only"));
    }
    let digest = cfg.digest();
    let (cert, bracket, exponent, atoms) = match kind {
        NormKind::Frobenius => {
            let n = s.norm();
            let b = NormBracket {
                lower: n,
                upper: n,
                lower_witness: None,
                upper_method: UpperMethod::Exact,
                iterations: 0,
                converged: true,
            };
            (Certificate::frobenius(&s, &digest), b, None, None)
        }
        NormKind::Spectral => {
            let b = spectral_bracket(&s.members()[0], &cfg)?;
            (Certificate::spectral(kind, None, &s, &b, &digest), b, None, None)
        }
        NormKind::Alpha => {
            let alpha = cfg.resolved_alpha()?;
            let b = tuple_alpha(&s, &cfg)?;
            (Certificate::spectral(kind, Some(alpha), &s, &b, &digest), b, Some(alpha), None)
        }
        NormKind::Nuclear | NormKind::BetaStar => {
            let (sol, beta) = if kind == NormKind::Nuclear {
                (nuclear_bracket(&s.members()[0], &cfg)?, None)
            } else {
                let beta = cfg.resolved_beta()?;
                (tuple_beta_star(&s, &cfg)?, Some(beta))
            };
            let mut b = sol.bracket;
            if !a.witness.is_empty() {
                let w = read_tuple(&a.witness)?;
                let wcfg = cfg.clone().with_beta(beta.unwrap_or(Exponent::ONE));
                inject_witness(&mut b, &s, w, &wcfg)?;
            }
            let cert = Certificate::decomposition(kind, beta, &s, &b, &sol.decomposition, &digest);
            (cert, b, beta, Some(sol.decomposition.len()))
        }
    };
    if let Some(path) = &a.out {
        write_file(path, &to_machine_string(&cert)?)?;
    }
    let report = NormReport {
        norm: kind,
        exponent,
        shape: s.space().dims().to_vec(),
        field: s.space().field(),
        members: s.len(),
        lower: bracket.lower,
        upper: bracket.upper,
        relative_gap: bracket.relative_gap(),
        upper_method: bracket.upper_method,
        iterations: bracket.iterations,
        converged: bracket.converged,
        atoms,
        certificate: a.out.clone(),
        config_digest: digest,
    };
    match a.format {
        Format::Machine => out.write_all(to_machine_string(&report)?.as_bytes())?,
        Format::Human => {
            let label = match exponent {
                Some(e) => format!("{kind} ({e})"),
                None => kind.to_string(),
            };
            if kind == NormKind::Frobenius {
                writeln!(out, "{label}: {:.17}", report.upper)?;
            } else {
                writeln!(out, "{label}: [{:.12}, {:.12}]  relative gap {:.3e}", report.lower, report.upper, report.relative_gap)?;
            }
            if let Some(n) = atoms {
                writeln!(out, "atoms: {n}")?;
            }
            if let Some(p) = &report.certificate {
                writeln!(out, "certificate: {}", p.display())?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_product(a: &ProductArgs, out: &mut dyn Write) -> Outcome {
    let x = read_tensor(&a.a).map_err(|e| fail(EXIT_MALFORMED, format!("{}: {e}", a.a.display())))?;
    let y = read_tensor(&a.b).map_err(|e| fail(EXIT_MALFORMED, format!("{}: {e}", a.b.display())))?;
    let z = match a.op {
        Op::Kron => x.kron(&y)?,
        Op::Dirsum => x.direct_sum(&y)?,
    };
    write_tensor(&a.out, &z)?;
    writeln!(out, "{} shape {:?}", a.out.display(), z.space().dims())?;
    Ok(EXIT_OK)
}

/// Suite spec file in object form; a bare list of cases is accepted too.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    cases: Vec<LawCase>,
    #[serde(default)]
    repetitions: Option<usize>,
}

fn load_suite(path: &Path) -> std::result::Result<(Vec<LawCase>, Option<usize>), Failure> {
    let text = fs::read_to_string(path).map_err(|e| fail(EXIT_MALFORMED, format!("{}: {e}", path.display())))?;
    let bad = |e: serde_json::Error| fail(EXIT_MALFORMED, format!("{}: not a valid suite spec: {e}", path.display()));
    let value: serde_json::Value = serde_json::from_str(&text).map_err(bad)?;
    if value.is_array() {
        Ok((serde_json::from_value(value).map_err(bad)?, None))
    } else {
        let f: SuiteFile = serde_json::from_value(value).map_err(bad)?;
        Ok((f.cases, f.repetitions))
    }
}

fn write_human(report: &SuiteReport, out: &mut dyn Write) -> std::io::Result<()> {
    for (i, r) in report.reports.iter().enumerate() {
        let status = if r.pass { "pass" } else { "FAIL" };
        writeln!(
            out,
            "{i:>3} {:<11} {:<7} seed {:>20}  {status}  margin {:+.3e}  {:.2?}",
            r.law_id.name(),
            r.field.to_string(),
            r.seed,
            r.margin,
            r.runtime
        )?;
        if let Some(e) = &r.error {
            writeln!(out, "      error: {e}")?;
        }
        for c in r.checks.iter().filter(|c| !c.pass) {
            writeln!(out, "      {}: lhs {:.17e} rhs {:.17e} margin {:+.3e}", c.name, c.lhs, c.rhs, c.margin)?;
        }
    }
    let s = &report.summary;
    writeln!(out, "{} / {} passed, worst margin {:+.3e}", s.passed, s.total, s.worst_margin)?;
    for l in &s.per_law {
        writeln!(out, "  {:<11} {:>3} / {:<3} worst margin {:+.3e}", l.law_id.name(), l.passed, l.total, l.worst_margin)?;
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Outcome {
    let (cases, reps) = match (&a.spec, a.default) {
        (Some(path), _) => load_suite(path)?,
        (None, true) => (default_suite(), None),
        (None, false) => return Err(fail(EXIT_MALFORMED, "give a suite spec file or --default")),
    };
    for c in &cases {
        c.validate()?;
    }
    let report = run_suite(&cases, a.repetitions.or(reps).unwrap_or(1), a.seed);
    let machine = to_machine_string(&report)?;
    if let Some(path) = &a.out {
        write_file(path, &machine)?;
    }
    match a.format {
        Format::Machine => out.write_all(machine.as_bytes())?,
        Format::Human => write_human(&report, out)?,
    }
    Ok(if report.all_pass() { EXIT_OK } else { EXIT_LAW_FAILURE })
}

fn cmd_check_certificate(a: &CheckArgs, out: &mut dyn Write) -> Outcome {
    let text = fs::read_to_string(&a.certificate)
        .map_err(|e| fail(EXIT_MALFORMED, format!("{}: {e}", a.certificate.display())))?;
    let cert: Certificate = serde_json::from_str(&text)
        .map_err(|e| fail(EXIT_MALFORMED, format!("{}: not a certificate: {e}", a.certificate.display())))?;
    let s = read_tuple(&a.tensors)?;
    let check = check_certificate(&cert, &s)?;
    if check.is_valid() {
        writeln!(out, "valid {} certificate: [{:.17e}, {:.17e}]", cert.norm, cert.lower, cert.upper)?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "invalid {} certificate:", cert.norm)?;
        for f in &check.failures {
            writeln!(out, "  {f}")?;
        }
        Ok(EXIT_INVALID_CERTIFICATE)
    }
}
