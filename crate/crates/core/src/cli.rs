//! Command-line front end. [`run`] parses arguments, writes to the given
//! streams and returns the process exit code.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::complex::Complex64;
use num::rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fock::{eigenvalue_type1, FockModel};
use crate::moment::{is_well_adapted, spherical_point_type1, DEFAULT_SEED};
use crate::pairs::{builtin, load_pair, load_pair_unchecked, pair_to_json, validate_pair, PairSpec};
use crate::polyalg::{fmt_ratio, parse_ratio};
use crate::spectrum::{
    convergence_experiment, fmt_num, make_sequence, orbit_signature, phi_embed, psi_orbit, Regime, SequenceKind,
    SphericalParam, Verdict,
};
use crate::verify::{all_passed, run_suites, Suite, ALL_SUITES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "gelfand-orbit", version, about = "Eigenvalue and orbit models of nilpotent Gelfand pairs")]
pub struct Cli {
    /// Builtin pair name (heisenberg1..heisenberg4, u2su2) or path to a pair file.
    #[arg(long, global = true, default_value = "u2su2")]
    pub pair: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Overrides the verdict tolerance of `converge`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output file; `converge` also writes a JSON summary next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Inspect a pair description.
    Pair {
        #[command(subcommand)]
        action: PairAction,
    },
    /// Exact type I eigenvalues over a list of lambdas and a grid of m.
    Eigentable(EigentableArgs),
    /// Solve for the spherical point of a type I parameter.
    SphericalPoint(SphericalPointArgs),
    /// Run verification suites.
    Verify {
        #[arg(long, value_delimiter = ',')]
        suite: Vec<Suite>,
    },
    /// Eigenvalue vector and orbit signature of one parameter.
    Embed(ParamArgs),
    /// Convergence experiment along a generated sequence.
    Converge(ConvergeArgs),
}

#[derive(Subcommand, Debug)]
pub enum PairAction {
    Validate,
    Export,
}

#[derive(Args, Debug)]
pub struct EigentableArgs {
    /// Comma separated rationals, e.g. `1/2,1,2`.
    #[arg(long, value_delimiter = ',', default_value = "1", allow_hyphen_values = true)]
    pub lambda: Vec<String>,
    /// Adds the grid `{m_min..m_max}^r`.
    #[arg(long)]
    pub m_max: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub m_min: u32,
    /// Adds one lattice point, e.g. `--m 1,0,2`; repeatable.
    #[arg(long)]
    pub m: Vec<String>,
}

#[derive(Args, Debug)]
pub struct SphericalPointArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub lambda: f64,
    #[arg(long)]
    pub m: String,
}

#[derive(Args, Debug)]
pub struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub m: Option<String>,
    /// Type II parameter as `re1,im1,re2,im2,..`.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    #[value(name = "i-i")]
    II,
    #[value(name = "i-ii")]
    IIi,
    #[value(name = "ii-ii")]
    IiIi,
}

#[derive(Args, Debug)]
pub struct ConvergeArgs {
    #[arg(long, value_enum)]
    pub regime: RegimeArg,
    #[arg(long, default_value_t = 1000)]
    pub n_max: u64,
    /// I->I: limit lambda.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// I->I: fixed m (defaults to all ones).
    #[arg(long)]
    pub m: Option<String>,
    /// I->I: approach the limit lambda from below.
    #[arg(long)]
    pub from_below: bool,
    /// I->I: perturb m at odd n, which has no type I limit.
    #[arg(long)]
    pub oscillate: bool,
    /// I->II: limit of lambda(n) m(n), one entry per generator (defaults to 0.1 each).
    #[arg(long, allow_hyphen_values = true)]
    pub direction: Option<String>,
    /// I->II: constant added to m(n).
    #[arg(long)]
    pub offset: Option<String>,
    /// I->II: exponent of n in m(n).
    #[arg(long, default_value_t = 1.0)]
    pub growth: f64,
    /// II->II: limit b as `re1,im1,..` (seeded random when omitted).
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// II->II: perturbation direction, same layout as `--b`.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,
    /// II->II: b(n) = b + delta / n^rate.
    #[arg(long, default_value_t = 3.0)]
    pub rate: f64,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Validation(_)
        | Error::NotEigenvector { .. }
        | Error::InterpolationResidual { .. }
        | Error::DegreeBound { .. }
        | Error::ComplexEigenvalue { .. }
        | Error::NoConvergence { .. }
        | Error::WellAdaptedViolation { .. }
        | Error::RegimeViolation(_) => EXIT_FAILURE,
        _ => EXIT_USAGE,
    }
}

fn resolve_pair(src: &str, checked: bool) -> Result<PairSpec> {
    match builtin(src) {
        Ok(p) => Ok(p),
        Err(Error::UnknownPair(_)) if Path::new(src).exists() => {
            if checked {
                load_pair(src)
            } else {
                load_pair_unchecked(src)
            }
        }
        Err(e) => Err(e),
    }
}

fn parse_list<T: std::str::FromStr>(what: &str, s: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse::<T>().map_err(|_| Error::ParseScalar(format!("{what}: {x}"))))
        .collect()
}

fn parse_m(pair: &PairSpec, s: &str) -> Result<Vec<u32>> {
    let m: Vec<u32> = parse_list("m", s)?;
    if m.len() != pair.rank() {
        return Err(Error::Arity { what: "m", expected: pair.rank(), got: m.len() });
    }
    Ok(m)
}

fn parse_complex(pair: &PairSpec, what: &'static str, s: &str) -> Result<Vec<Complex64>> {
    let x: Vec<f64> = parse_list(what, s)?;
    if x.len() != 2 * pair.n {
        return Err(Error::Arity { what, expected: 2 * pair.n, got: x.len() });
    }
    Ok(x.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect()
}

/// Rounds every float in a JSON tree to 12 significant digits.
fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x: f64 = fmt_num(n.as_f64().unwrap_or(0.0)).parse().unwrap_or(0.0);
            *v = json!(x);
        }
        Value::Array(a) => a.iter_mut().for_each(round_json),
        Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

fn json_string(mut v: Value) -> String {
    round_json(&mut v);
    serde_json::to_string_pretty(&v).expect("JSON values always serialize") + "\n"
}

fn complex_json(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|x| json!([x.re, x.im])).collect())
}

struct Ctx<'a> {
    cli: &'a Cli,
    stdout: &'a mut dyn Write,
}

impl Ctx<'_> {
    /// Writes to `--out` when given, else to stdout.
    fn emit(&mut self, text: &str) -> Result<()> {
        match &self.cli.out {
            Some(path) => {
                let mut f = BufWriter::new(File::create(path)?);
                f.write_all(text.as_bytes())?;
                f.flush()?;
            }
            None => self.stdout.write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn csv_string(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

fn cmd_pair(ctx: &mut Ctx<'_>, action: &PairAction) -> Result<i32> {
    let pair = resolve_pair(&ctx.cli.pair, false)?;
    pair.check_shape()?;
    match action {
        PairAction::Export => {
            ctx.emit(&(pair_to_json(&pair) + "\n"))?;
            Ok(EXIT_OK)
        }
        PairAction::Validate => {
            let report = validate_pair(&pair);
            let text = match ctx.cli.format {
                Format::Csv => report.to_string(),
                Format::Json => json_string(json!({
                    "pair": report.pair,
                    "passed": report.passed(),
                    "checks": report.checks.iter().map(|c| json!({
                        "name": c.name, "passed": c.passed, "witness": c.witness,
                    })).collect::<Vec<_>>(),
                })),
            };
            ctx.emit(&text)?;
            Ok(if report.passed() { EXIT_OK } else { EXIT_FAILURE })
        }
    }
}

fn cmd_eigentable(ctx: &mut Ctx<'_>, args: &EigentableArgs) -> Result<i32> {
    let pair = resolve_pair(&ctx.cli.pair, true)?;
    let r = pair.rank();
    let lambdas: Vec<BigRational> = args.lambda.iter().map(|s| parse_ratio(s.trim())).collect::<Result<_>>()?;
    if let Some(bad) = lambdas.iter().find(|l| **l <= BigRational::from_integer(0.into())) {
        return Err(Error::NonPositiveLambda(fmt_ratio(bad)));
    }
    let mut grid: Vec<Vec<u32>> = match args.m_max {
        Some(hi) => crate::verify::lattice_grid(r, args.m_min, hi),
        None => Vec::new(),
    };
    if args.m_max.is_some() && args.m_min > args.m_max.unwrap_or(0) {
        grid.clear();
    }
    for s in &args.m {
        grid.push(parse_m(&pair, s)?);
    }

    let mut rows = Vec::new();
    for lam in &lambdas {
        for m in &grid {
            let vals = (0..pair.invariants.len())
                .map(|i| eigenvalue_type1(&pair, i, lam, m))
                .collect::<Result<Vec<_>>>()?;
            rows.push((lam.clone(), m.clone(), vals));
        }
    }
    let text = match ctx.cli.format {
        Format::Csv => {
            let mut header = vec!["lambda".to_string()];
            header.extend((1..=r).map(|i| format!("m{i}")));
            header.extend(pair.invariants.iter().enumerate().map(|(i, _)| format!("D{i}")));
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|(lam, m, vals)| {
                    let mut rec = vec![fmt_ratio(lam)];
                    rec.extend(m.iter().map(|k| k.to_string()));
                    rec.extend(vals.iter().map(|v| v.to_string()));
                    rec
                })
                .collect();
            csv_string(&header, &body)?
        }
        Format::Json => json_string(json!({
            "pair": pair.name,
            "invariants": pair.invariants.iter().map(|inv| inv.name.clone()).collect::<Vec<_>>(),
            "rows": rows.iter().map(|(lam, m, vals)| json!({
                "lambda": fmt_ratio(lam),
                "m": m,
                "eigenvalues": vals.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })),
    };
    ctx.emit(&text)?;
    Ok(EXIT_OK)
}

fn cmd_spherical_point(ctx: &mut Ctx<'_>, args: &SphericalPointArgs) -> Result<i32> {
    let pair = resolve_pair(&ctx.cli.pair, true)?;
    let m = parse_m(&pair, &args.m)?;
    if !(args.lambda > 0.0) {
        return Err(Error::NonPositiveLambda(args.lambda.to_string()));
    }
    let sp = spherical_point_type1(&pair, args.lambda, &m, ctx.cli.seed)?;
    let unit = spherical_point_type1(&pair, 1.0, &m, ctx.cli.seed)?;
    let (adapted, defect) = is_well_adapted(&pair, &m, &unit.v)?;
    let pt = sp.point(&pair);
    let sig = orbit_signature(&pair, &pt);
    let text = match ctx.cli.format {
        Format::Csv => {
            let mut rows = Vec::new();
            for (i, x) in pt.v.iter().enumerate() {
                rows.push(vec![format!("v{}", i + 1), fmt_num(x.re), fmt_num(x.im)]);
            }
            for (k, t) in pt.t.iter().enumerate() {
                rows.push(vec![format!("t{}", k + 1), fmt_num(*t), fmt_num(0.0)]);
            }
            for (inv, s) in pair.invariants.iter().zip(&sig.values) {
                rows.push(vec![inv.name.clone(), fmt_num(*s), fmt_num(0.0)]);
            }
            rows.push(vec!["residual".into(), fmt_num(sp.residual), fmt_num(0.0)]);
            rows.push(vec!["well_adapted_defect".into(), fmt_num(defect), fmt_num(0.0)]);
            csv_string(&["component".into(), "re".into(), "im".into()], &rows)?
        }
        Format::Json => json_string(json!({
            "pair": pair.name,
            "lambda": args.lambda,
            "m": m,
            "v": complex_json(&pt.v),
            "t": pt.t,
            "signature": sig.values,
            "residual": sp.residual,
            "well_adapted": adapted,
            "well_adapted_defect": defect,
        })),
    };
    ctx.emit(&text)?;
    Ok(EXIT_OK)
}

fn cmd_verify(ctx: &mut Ctx<'_>, suites: &[Suite]) -> Result<i32> {
    let pair = resolve_pair(&ctx.cli.pair, false)?;
    pair.check_shape()?;
    let suites = if suites.is_empty() { ALL_SUITES.to_vec() } else { suites.to_vec() };
    let outcomes = run_suites(&pair, &suites, ctx.cli.seed);
    let text = match ctx.cli.format {
        Format::Csv => outcomes.iter().map(|o| format!("{o}\n")).collect::<String>(),
        Format::Json => json_string(json!({
            "pair": pair.name,
            "passed": all_passed(&outcomes),
            "outcomes": outcomes,
        })),
    };
    ctx.emit(&text)?;
    Ok(if all_passed(&outcomes) { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_embed(ctx: &mut Ctx<'_>, args: &ParamArgs) -> Result<i32> {
    let pair = resolve_pair(&ctx.cli.pair, true)?;
    let param = match (&args.b, &args.m) {
        (Some(b), None) if args.lambda.is_none() => SphericalParam::TypeII { b: parse_complex(&pair, "b", b)? },
        (None, Some(m)) => SphericalParam::type1(args.lambda.unwrap_or(1.0), parse_m(&pair, m)?)?,
        _ => {
            return Err(Error::InvalidRegime("embed takes either --lambda/--m or --b".into()));
        }
    };
    let model = FockModel::new(&pair);
    let phi = phi_embed(&model, &param)?;
    let sp = psi_orbit(&pair, &param, ctx.cli.seed)?;
    let sig = orbit_signature(&pair, &sp.point(&pair));
    let text = match ctx.cli.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = pair
                .invariants
                .iter()
                .zip(phi.values.iter().zip(&sig.values))
                .map(|(inv, (f, s))| vec![inv.name.clone(), fmt_num(*f), fmt_num(*s)])
                .collect();
            csv_string(&["invariant".into(), "phi".into(), "psi".into()], &rows)?
        }
        Format::Json => {
            let param_json = match &param {
                SphericalParam::TypeI { lambda, m } => json!({"type": "I", "lambda": lambda, "m": m}),
                SphericalParam::TypeII { b } => json!({"type": "II", "b": complex_json(b)}),
            };
            json_string(json!({
                "pair": pair.name,
                "param": param_json,
                "phi": phi.values,
                "signature": sig.values,
                "orbit_point": complex_json(&sp.v),
            }))
        }
    };
    ctx.emit(&text)?;
    Ok(EXIT_OK)
}

fn cmd_converge(ctx: &mut Ctx<'_>, args: &ConvergeArgs) -> Result<i32> {
    let pair = resolve_pair(&ctx.cli.pair, true)?;
    let r = pair.rank();
    let seed = ctx.cli.seed;
    let (regime, kind) = match args.regime {
        RegimeArg::II => {
            let m = match &args.m {
                Some(s) => parse_m(&pair, s)?,
                None => vec![1; r],
            };
            let kind = SequenceKind::TypeIToTypeI {
                lambda: args.lambda,
                m,
                from_above: !args.from_below,
                oscillate: args.oscillate,
            };
            (Regime::TypeIToTypeI, kind)
        }
        RegimeArg::IIi => {
            let direction: Vec<f64> = match &args.direction {
                Some(s) => parse_list("direction", s)?,
                None => vec![0.1; r],
            };
            let offset: Vec<u32> = match &args.offset {
                Some(s) => parse_m(&pair, s)?,
                None => vec![0; r],
            };
            if direction.len() != r {
                return Err(Error::Arity { what: "direction", expected: r, got: direction.len() });
            }
            (Regime::TypeIToTypeII, SequenceKind::TypeIToTypeII { direction, offset, growth: args.growth })
        }
        RegimeArg::IiIi => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = match &args.b {
                Some(s) => parse_complex(&pair, "b", s)?,
                None => random_complex(&mut rng, pair.n),
            };
            let delta = match &args.delta {
                Some(s) => parse_complex(&pair, "delta", s)?,
                None => random_complex(&mut rng, pair.n),
            };
            (Regime::TypeIIToTypeII, SequenceKind::TypeIIToTypeII { b, delta, rate: args.rate })
        }
    };
    let tol = ctx.cli.tol.unwrap_or(regime.default_tolerance());
    let seq = make_sequence(&pair, &kind, args.n_max, seed)?;
    let model = FockModel::new(&pair);
    let report = convergence_experiment(&model, &seq, tol, seed)?;

    let mut csv_bytes = Vec::new();
    report.write_csv(r, &mut csv_bytes)?;
    let summary: Value = serde_json::to_value(&report)?;
    let summary = json_string(summary);

    match &ctx.cli.out {
        Some(path) => {
            std::fs::write(path, &csv_bytes)?;
            std::fs::write(path.with_extension("json"), summary.as_bytes())?;
            writeln!(
                ctx.stdout,
                "verdict: {} (d_phi = {}, d_psi = {} at n = {})",
                serde_json::to_value(report.verdict)?.as_str().unwrap_or("?"),
                fmt_num(report.final_d_phi),
                fmt_num(report.final_d_psi),
                report.final_n
            )?;
        }
        None => match ctx.cli.format {
            Format::Csv => ctx.stdout.write_all(&csv_bytes)?,
            Format::Json => ctx.stdout.write_all(summary.as_bytes())?,
        },
    }
    Ok(if report.verdict == Verdict::CoConvergent { EXIT_OK } else { EXIT_FAILURE })
}

/// Executes a parsed command.
pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let mut ctx = Ctx { cli, stdout };
    let result = match &cli.command {
        Command::Pair { action } => cmd_pair(&mut ctx, action),
        Command::Eigentable(a) => cmd_eigentable(&mut ctx, a),
        Command::SphericalPoint(a) => cmd_spherical_point(&mut ctx, a),
        Command::Verify { suite } => cmd_verify(&mut ctx, suite),
        Command::Embed(a) => cmd_embed(&mut ctx, a),
        Command::Converge(a) => cmd_converge(&mut ctx, a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let code = exit_code(&e);
            let label = if matches!(e, Error::RegimeViolation(_)) { "regime violation" } else { "error" };
            let _ = writeln!(stderr, "{label}: {e}");
            code
        }
    }
}

/// Parses `args` (including the program name) and executes the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli, stdout, stderr),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            code
        }
    }
}

/// Entry point used by the binary.
pub fn main_with_std() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = run(std::env::args_os(), &mut out, &mut err);
    let _ = out.flush();
    code
}
