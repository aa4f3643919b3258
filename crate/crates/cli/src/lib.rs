//! Command-line front end for `qsd-core`.
//!
//! Every subcommand prints its result to stdout; with `--out FILE` the CSV
//! table is also written to `FILE` together with a `FILE.manifest.json`
//! sidecar. Exit codes: 0 success, 1 invalid input, 2 numerical failure.

mod format;
mod manifest;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qsd_core::hedge::{run_hedge_experiments, HedgeResult, HedgeSpec};
use qsd_core::mc::{duality_test, martingale_test, McConfig, McRow, PayoffDescriptor};
use qsd_core::models::{triplet_of, QsdSpec, SymmetricBase};
use qsd_core::qsd::{
    alpha_of_lambda, full_report, lambda_of_alpha, lambda_of_alpha_quadrature, meixner_alpha0_lambda, DualityReport,
    InversionResult,
};
use qsd_core::Error;

pub use format::fmt_num;
pub use manifest::RunManifest;

/// Largest relative gap tolerated between the closed form and quadrature.
pub const FORWARD_CROSS_CHECK_TOL: f64 = 1e-5;

#[derive(Debug, Parser)]
#[command(name = "qsd", version, about = "Quasi self-dual exponential Lévy models")]
pub struct Cli {
    /// Also write the CSV table here, with a `.manifest.json` sidecar.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Carrying cost λ(α), closed form cross-checked by quadrature.
    #[command(allow_negative_numbers = true)]
    Forward(ForwardArgs),
    /// Orders α solving λ(α) = λ, with branches and residuals.
    #[command(allow_negative_numbers = true)]
    Invert(InvertArgs),
    /// Every duality and martingale condition for one spec.
    #[command(allow_negative_numbers = true)]
    Check(CheckArgs),
    /// Monte Carlo test of the duality identity.
    #[command(name = "mc-duality", allow_negative_numbers = true)]
    McDuality(McDualityArgs),
    /// Monte Carlo estimates of E[e^X_T] and E[(S_T/S0)^α].
    #[command(name = "mc-martingale", allow_negative_numbers = true)]
    McMartingale(McMartingaleArgs),
    /// Semi-static hedge of a down-and-in claim.
    #[command(allow_negative_numbers = true)]
    Hedge(HedgeArgs),
    /// Table of (α, λ, residuals) over an α grid.
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Carrying cost of the symmetric Meixner model (α = 0).
    #[command(name = "meixner-alpha0", allow_negative_numbers = true)]
    MeixnerAlpha0(MeixnerAlpha0Args),
}

/// Family and base parameters. Meixner takes `b` in radians.
#[derive(Debug, Clone, Args, Serialize)]
pub struct BaseArgs {
    /// nig, vg, meixner, cgmy or bs.
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long = "C")]
    #[serde(rename = "C")]
    pub c: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long = "Y")]
    #[serde(rename = "Y")]
    pub y: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
}

impl BaseArgs {
    pub fn to_base(&self) -> qsd_core::Result<SymmetricBase> {
        let mut s = format!("family={}", self.family);
        for (k, v) in [
            ("a", self.a),
            ("b", self.b),
            ("d", self.d),
            ("C", self.c),
            ("beta", self.beta),
            ("Y", self.y),
            ("sigma", self.sigma),
        ] {
            if let Some(v) = v {
                s.push_str(&format!(" {k}={v:?}"));
            }
        }
        s.parse()
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ForwardArgs {
    #[command(flatten)]
    pub base: BaseArgs,
    #[arg(long)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InvertArgs {
    #[command(flatten)]
    pub base: BaseArgs,
    #[arg(long)]
    pub lambda: f64,
}

/// Model order and carrying cost; `λ` defaults to the calibrated `λ(α)`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct SpecArgs {
    #[command(flatten)]
    pub base: BaseArgs,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Added to λ after calibration (power checks).
    #[arg(long, default_value_t = 0.0)]
    pub lambda_shift: f64,
}

impl SpecArgs {
    pub fn to_spec(&self) -> qsd_core::Result<QsdSpec> {
        let base = self.base.to_base()?;
        let spec = match self.lambda {
            Some(l) => QsdSpec::new(base, self.alpha, l)?,
            None => QsdSpec::calibrated(base, self.alpha)?,
        };
        Ok(if self.lambda_shift != 0.0 { spec.with_lambda_shift(self.lambda_shift) } else { spec })
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CheckArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct McArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub paths: u64,
    /// Defaults to `$QSD_SEED`, else 42.
    #[arg(long, env = "QSD_SEED", default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long)]
    pub antithetic: bool,
}

impl McArgs {
    fn config(&self, n_steps: u32) -> McConfig {
        McConfig {
            n_paths: self.paths,
            n_steps,
            horizon: self.horizon,
            seed: self.seed,
            antithetic: self.antithetic,
            s0: 1.0,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PayoffArgs {
    /// call, put, digital, identity or constant.
    #[arg(long, default_value = "call")]
    pub payoff: String,
    #[arg(long)]
    pub strike: Option<f64>,
}

impl PayoffArgs {
    fn descriptor(&self) -> qsd_core::Result<PayoffDescriptor> {
        PayoffDescriptor::from_kind(&self.payoff, self.strike)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct McDualityArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub payoff: PayoffArgs,
    #[arg(long, default_value_t = 1)]
    pub steps: u32,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct McMartingaleArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, default_value_t = 1)]
    pub steps: u32,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HedgeArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub payoff: PayoffArgs,
    #[arg(long, default_value_t = 1.0)]
    pub s0: f64,
    /// Barrier level `H < S0`.
    #[arg(long)]
    pub barrier: f64,
    /// Monitoring grids, e.g. `32,128,512,2048`; each must divide the largest.
    #[arg(long, value_delimiter = ',', default_value = "512")]
    pub steps: Vec<u32>,
    /// Order used in the hedge claim; defaults to the model's.
    #[arg(long)]
    pub hedge_alpha: Option<f64>,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub base: BaseArgs,
    /// `lo:hi:n`, `n ≥ 2` equally spaced points including both ends.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_grid: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MeixnerAlpha0Args {
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub d: f64,
}

/// Failure of a subcommand, mapped to the process exit code.
#[derive(Debug)]
pub enum CliError {
    Core(Error),
    /// Closed form and quadrature disagree.
    CrossCheck(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_validation() => 1,
            CliError::Io(_) => 1,
            _ => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(Error::Validation(msgs)) => {
                writeln!(f, "invalid input:")?;
                for m in msgs {
                    writeln!(f, "  - {m}")?;
                }
                Ok(())
            }
            CliError::Core(e) => writeln!(f, "{e}"),
            CliError::CrossCheck(msg) => writeln!(f, "{msg}"),
            CliError::Io(e) => writeln!(f, "i/o error: {e}"),
        }
    }
}

/// Result of a subcommand: text for the terminal and a CSV table.
#[derive(Debug, Default)]
pub struct Output {
    pub text: String,
    pub header: String,
    pub rows: Vec<String>,
    pub seed: Option<u64>,
}

impl Output {
    fn csv(&self) -> String {
        let mut s = self.header.clone();
        s.push('\n');
        for r in &self.rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }

    fn table(header: &str, rows: Vec<String>, seed: Option<u64>) -> Self {
        let mut o = Output { header: header.to_string(), rows, seed, text: String::new() };
        o.text = o.csv();
        o
    }
}

/// Parses `argv` (including the program name) and runs it, writing to the
/// given streams. Returns the exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return 1;
            }
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let _ = write!(stdout, "{}", out.text);
            0
        }
        Err(e) => {
            let _ = write!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// Runs a parsed command; writes `--out` and its manifest if requested.
pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let (name, params, out) = match &cli.command {
        Command::Forward(a) => ("forward", manifest::parameters_of(a), forward(a)?),
        Command::Invert(a) => ("invert", manifest::parameters_of(a), invert(a)?),
        Command::Check(a) => ("check", manifest::parameters_of(a), check(a)?),
        Command::McDuality(a) => ("mc-duality", manifest::parameters_of(a), mc_duality(a)?),
        Command::McMartingale(a) => ("mc-martingale", manifest::parameters_of(a), mc_martingale(a)?),
        Command::Hedge(a) => ("hedge", manifest::parameters_of(a), hedge(a)?),
        Command::Sweep(a) => ("sweep", manifest::parameters_of(a), sweep(a)?),
        Command::MeixnerAlpha0(a) => ("meixner-alpha0", manifest::parameters_of(a), meixner_alpha0(a)?),
    };
    if let Some(path) = &cli.out {
        fs::write(path, out.csv())?;
        RunManifest::new(name, params, out.seed).write_sidecar(path)?;
    }
    Ok(out)
}

fn forward(args: &ForwardArgs) -> Result<Output, CliError> {
    let base = args.base.to_base()?;
    let closed = lambda_of_alpha(&base, args.alpha)?;
    // The quadrature route needs the triplet of the model at this order.
    let spec = QsdSpec::new(base, args.alpha, closed)?;
    let quad = lambda_of_alpha_quadrature(&triplet_of(&spec.native())?, args.alpha)?;
    let diff = closed - quad;
    let rel = diff.abs() / closed.abs().max(f64::MIN_POSITIVE);
    let row = format!("{},{},{},{},{}", fmt_num(args.alpha), fmt_num(closed), fmt_num(quad), fmt_num(diff), fmt_num(rel));
    let mut out = Output::table("alpha,lambda,lambda_quadrature,difference,relative_difference", vec![row], None);
    out.text = format!(
        "lambda={}\nlambda_quadrature={}\ndifference={}\nrelative_difference={}\n",
        fmt_num(closed),
        fmt_num(quad),
        fmt_num(diff),
        fmt_num(rel)
    );
    if !(rel <= FORWARD_CROSS_CHECK_TOL || diff.abs() <= 1e-12) {
        return Err(CliError::CrossCheck(format!(
            "closed form {} and quadrature {} differ by {} relative (tolerance {FORWARD_CROSS_CHECK_TOL:e})\n{}",
            fmt_num(closed),
            fmt_num(quad),
            fmt_num(rel),
            out.text.trim_end()
        )));
    }
    Ok(out)
}

fn invert(args: &InvertArgs) -> Result<Output, CliError> {
    let base = args.base.to_base()?;
    let res: InversionResult = alpha_of_lambda(&base, args.lambda)?;
    let mut out = Output::table(InversionResult::CSV_HEADER, res.csv_records(fmt_num), None);
    out.text = res
        .solutions
        .iter()
        .map(|s| {
            format!("alpha={} branch={} residual={}\n", fmt_num(s.alpha), s.branch.name(), fmt_num(s.residual))
        })
        .collect();
    Ok(out)
}

fn check(args: &CheckArgs) -> Result<Output, CliError> {
    let spec = args.spec.to_spec()?;
    let r = full_report(&spec)?;
    let row = format!("{},{},{}", fmt_num(spec.alpha()), fmt_num(spec.lambda()), r.csv_record(fmt_num));
    let mut out = Output::table(&format!("alpha,lambda,{}", DualityReport::CSV_HEADER), vec![row], None);
    out.text = format!("{spec}\n{r}max residual               {}\n", fmt_num(r.max_residual()));
    Ok(out)
}

fn mc_duality(args: &McDualityArgs) -> Result<Output, CliError> {
    let spec = args.spec.to_spec()?;
    let f = args.payoff.descriptor()?;
    let cfg = args.mc.config(args.steps);
    let d = duality_test(&spec, &f, &cfg)?;
    let row = McRow::new(&format!("duality:{f}"), &spec, d.lhs, d.rhs, d.z_score, &cfg);
    Ok(Output::table(McRow::CSV_HEADER, vec![row.csv(fmt_num)], Some(cfg.seed)))
}

fn mc_martingale(args: &McMartingaleArgs) -> Result<Output, CliError> {
    let spec = args.spec.to_spec()?;
    let cfg = args.mc.config(args.steps);
    let (exp_x, power) = martingale_test(&spec, &cfg)?;
    let rows = vec![
        McRow::martingale("martingale:exp_x", &spec, exp_x, &cfg).csv(fmt_num),
        McRow::martingale("martingale:power_alpha", &spec, power, &cfg).csv(fmt_num),
    ];
    Ok(Output::table(McRow::CSV_HEADER, rows, Some(cfg.seed)))
}

fn hedge(args: &HedgeArgs) -> Result<Output, CliError> {
    let model = args.spec.to_spec()?;
    let f = args.payoff.descriptor()?;
    let alpha = args.hedge_alpha.unwrap_or(model.alpha());
    let specs = args
        .steps
        .iter()
        .map(|&n| HedgeSpec::new(args.s0, args.barrier, f, alpha, n))
        .collect::<qsd_core::Result<Vec<_>>>()?;
    let cfg = McConfig { s0: args.s0, ..args.mc.config(1) };
    let results = run_hedge_experiments(&specs, &model, &cfg)?;
    let rows = specs.iter().zip(&results).map(|(s, r)| r.csv_record(s, &model, fmt_num)).collect();
    Ok(Output::table(HedgeResult::CSV_HEADER, rows, Some(cfg.seed)))
}

/// Parses `lo:hi:n`.
pub fn parse_grid(s: &str) -> qsd_core::Result<Vec<f64>> {
    let bad = || Error::validation(format!("alpha grid must look like lo:hi:n with n >= 2, got '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else { return Err(bad()) };
    let (lo, hi): (f64, f64) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n < 2 || !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(bad());
    }
    Ok((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect())
}

fn sweep(args: &SweepArgs) -> Result<Output, CliError> {
    let base = args.base.to_base()?;
    let grid = parse_grid(&args.alpha_grid)?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut skipped = Vec::new();
    for alpha in grid {
        if !base.admits(alpha) {
            skipped.push(alpha);
            continue;
        }
        let spec = QsdSpec::calibrated(base, alpha)?;
        let r = full_report(&spec)?;
        rows.push(format!(
            "{},{},{},{}",
            fmt_num(alpha),
            fmt_num(spec.lambda()),
            fmt_num(r.max_residual()),
            r.csv_record(fmt_num)
        ));
    }
    if rows.is_empty() {
        let (lo, hi) = base.alpha_interval();
        return Err(Error::validation(format!("no admissible α on the grid; admissible interval is ({lo}, {hi})")).into());
    }
    let mut out = Output::table(&format!("alpha,lambda,max_residual,{}", DualityReport::CSV_HEADER), rows, None);
    if !skipped.is_empty() {
        let list: Vec<String> = skipped.iter().map(|&a| fmt_num(a)).collect();
        out.text.push_str(&format!("# skipped inadmissible alpha: {}\n", list.join(" ")));
    }
    Ok(out)
}

fn meixner_alpha0(args: &MeixnerAlpha0Args) -> Result<Output, CliError> {
    let lambda = meixner_alpha0_lambda(args.a, args.d)?;
    let mut out = Output::table("a,d,lambda", vec![format!("{},{},{}", fmt_num(args.a), fmt_num(args.d), fmt_num(lambda))], None);
    out.text = format!("lambda={}\n", fmt_num(lambda));
    Ok(out)
}
