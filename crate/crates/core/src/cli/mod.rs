//! Command-line front end. Exit codes: 0 success, 1 invalid input or a
//! failed check, 2 I/O failure.

mod input;
mod output;

pub use input::{parse_tuple, parse_upper, read_column, read_column_from};
pub use output::{Cell, Format, Report};

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ambiguity::{estimate_from_samples, AmbiguitySet};
use crate::chance::{self, ConstraintModel, NoiseSet, RadiotherapyProblem};
use crate::format::{fmt2, write_dat_rows};
use crate::lp_oracle::{verify_suite, BoundCheck, VerifyReport, VerifyStatus, PASS_GAP};
use crate::newsvendor::{order_interval_beta, order_interval_mad, NewsvendorInput};
use crate::pricing::{optimal_price, tie_mad, worst_case_profit};
use crate::stoploss::{reinsurer_benefit_bound, retention_bound, Layer};
use crate::sums::{self, Copula, Lognormal, MarginalSet};
use crate::tail_bounds::{self, linspace, BoundKind, Mode};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] crate::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) | CliError::Usage(_) => 1,
            CliError::Io { .. } => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "madbound", version, about = "Tail bounds and robust decisions under mean-MAD ambiguity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Dat)]
    pub format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One tail bound at a threshold.
    #[command(allow_negative_numbers = true)]
    Bound(BoundArgs),
    /// A bound sampled over a grid of thresholds.
    #[command(allow_negative_numbers = true)]
    Curve(CurveArgs),
    /// A distribution in the set attaining the bound.
    #[command(allow_negative_numbers = true)]
    Worstcase(WorstcaseArgs),
    /// Intervals containing the optimal newsvendor order quantity.
    #[command(allow_negative_numbers = true)]
    Newsvendor(NewsvendorArgs),
    /// Maxmin monopoly price.
    Price(PriceArgs),
    /// Stop-loss reinsurance bounds.
    #[command(allow_negative_numbers = true)]
    Stoploss(StoplossArgs),
    /// Bounds for sums of risks with unknown dependence.
    #[command(allow_negative_numbers = true)]
    Sum(SumArgs),
    /// Reformulated ambiguous chance constraints.
    #[command(allow_negative_numbers = true)]
    Chance(ChanceArgs),
    /// Two-fraction radiotherapy plan.
    Radiotherapy(RadiotherapyArgs),
    /// Fit an ambiguity set to a sample.
    #[command(allow_negative_numbers = true)]
    Estimate(EstimateArgs),
    /// Compare closed forms with the moment LP on random instances.
    Verify(VerifyArgs),
}

/// Ambiguity set given directly or fitted to a sample file.
#[derive(Debug, Args)]
pub struct SetArgs {
    /// Lower end of the support.
    #[arg(long = "shift-a", visible_alias = "a")]
    pub shift_a: Option<f64>,
    /// Upper end of the support.
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    /// Mean absolute deviation.
    #[arg(long)]
    pub d: Option<f64>,
    /// Probability of landing at or above the mean.
    #[arg(long)]
    pub beta: Option<f64>,
    /// One-column CSV sample to fit instead; --shift-a and --b then
    /// override the sample range.
    #[arg(long, conflicts_with_all = ["mu", "d", "beta"])]
    pub samples: Option<PathBuf>,
}

impl SetArgs {
    pub fn resolve(&self) -> CliResult<AmbiguitySet> {
        if let Some(path) = &self.samples {
            let values = read_column(path)?;
            let support = match (self.shift_a, self.b) {
                (Some(a), Some(b)) => Some((a, b)),
                (None, None) => None,
                _ => return Err(CliError::Usage("a support override needs both --shift-a and --b".into())),
            };
            return Ok(estimate_from_samples(&values, support)?.0);
        }
        let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| CliError::Usage(format!("missing --{flag}")));
        let set = AmbiguitySet {
            a: self.shift_a.unwrap_or(0.0),
            b: need(self.b, "b")?,
            mu: need(self.mu, "mu")?,
            d: need(self.d, "d")?,
            beta: self.beta,
        };
        set.validate().map_err(crate::Error::from)?;
        Ok(set)
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct WhichBound {
    /// Largest `P(X >= t)`.
    #[arg(long)]
    pub sup: bool,
    /// Smallest `P(X > t)`.
    #[arg(long)]
    pub inf: bool,
    /// Largest `P(X >= t)` given `beta`.
    #[arg(long)]
    pub sup_beta: bool,
    /// Smallest `P(X > t)` given `beta`.
    #[arg(long)]
    pub inf_beta: bool,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub set: SetArgs,
    #[command(flatten)]
    pub which: WhichBound,
    /// Threshold.
    #[arg(long)]
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveKind {
    Sup,
    Inf,
    SupBeta,
    InfBeta,
    SupIneqMad,
    Cantelli,
    DeSchepperSup,
    DeSchepperInf,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(long, value_enum, default_value_t = CurveKind::Sup)]
    pub kind: CurveKind,
    /// Standard deviation for the mean-variance bounds.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Sup,
    Inf,
}

#[derive(Debug, Args)]
pub struct WorstcaseArgs {
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(long)]
    pub t: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Sup)]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct NewsvendorArgs {
    #[arg(long = "shift-a", visible_alias = "a", default_value_t = 0.0)]
    pub shift_a: f64,
    #[arg(long)]
    pub mu: f64,
    #[arg(long)]
    pub d: f64,
    /// Upper ends of the demand support; `inf` for unbounded demand.
    #[arg(long, value_delimiter = ',', required = true)]
    pub b: Vec<String>,
    /// Critical ratios `(p - c) / p`.
    #[arg(long, value_delimiter = ',', required_unless_present = "price")]
    pub eta: Vec<f64>,
    /// Selling price; with --cost, sets the critical ratio.
    #[arg(long, requires = "cost", conflicts_with = "eta")]
    pub price: Option<f64>,
    #[arg(long)]
    pub cost: Option<f64>,
    /// Use the interval that also knows `P(D >= mu)`.
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PriceCurve {
    /// Worst-case revenue against the price.
    Profit,
    /// Maxmin price against the MAD.
    Price,
}

#[derive(Debug, Args)]
pub struct PriceArgs {
    #[arg(long = "shift-a", visible_alias = "a", default_value_t = 0.0)]
    pub shift_a: f64,
    #[arg(long)]
    pub mu: f64,
    #[arg(long)]
    pub b: f64,
    #[arg(long, required_unless_present = "curve")]
    pub d: Option<f64>,
    #[arg(long, value_enum)]
    pub curve: Option<PriceCurve>,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct StoplossArgs {
    #[command(flatten)]
    pub set: SetArgs,
    /// Retention; without it the bound is sampled over the support.
    #[arg(long)]
    pub z: Option<f64>,
    /// Layer width; none means unlimited.
    #[arg(long)]
    pub cap: Option<f64>,
    /// Bound the insurer's retained payment instead of the reinsurer's.
    #[arg(long)]
    pub insurer: bool,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Claim sample (one-column CSV) for an empirical overlay.
    #[arg(long)]
    pub claims: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CopulaArg {
    Independent,
    Comonotonic,
    Both,
}

#[derive(Debug, Args)]
pub struct SumArgs {
    /// Bounded marginal `b,mu,d` on `[0, b]`; repeat per risk.
    #[arg(long)]
    pub marginal: Vec<String>,
    /// Lognormal marginal `m,v`: `exp(m + v N)`; repeat per risk.
    #[arg(long, conflicts_with = "marginal")]
    pub lognormal: Vec<String>,
    /// Use the three lognormal risks of the aggregate example.
    #[arg(long, conflicts_with_all = ["marginal", "lognormal"])]
    pub lognormal_triple: bool,
    /// Quantile at which lognormal supports are cut for the bounds.
    #[arg(long, default_value_t = sums::DEFAULT_TRUNCATION)]
    pub truncation: f64,
    /// MAD bound for the sum; defaults to the sum of marginal MADs.
    #[arg(long)]
    pub d_hat: Option<f64>,
    /// Single threshold (retention with --stoploss).
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Stop-loss bound against the retention instead of the tail bound.
    #[arg(long)]
    pub stoploss: bool,
    #[arg(long, requires = "stoploss")]
    pub cap: Option<f64>,
    /// Report the VaR bound at this level instead.
    #[arg(long, conflicts_with_all = ["stoploss", "t"])]
    pub var: Option<f64>,
    #[arg(long, value_enum, default_value_t = CopulaArg::Both)]
    pub copula: CopulaArg,
    /// Monte Carlo draws for lognormal marginals; 0 skips simulation.
    #[arg(long, default_value_t = 100_000)]
    pub draws: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChanceForm {
    /// Right-hand-side noise on `[-1, 1]`.
    Rhs,
    /// Right-hand-side noise on `[-1, u]`.
    Asym,
    /// Bilinear constraint `(a_bar + Z a_hat) . x <= h`.
    Bilinear,
    /// Several rows with independent noises (sufficient test).
    JointIndep,
    /// Several rows sharing one noise.
    JointShared,
}

#[derive(Debug, Args)]
pub struct ChanceArgs {
    #[arg(long, value_enum)]
    pub form: ChanceForm,
    /// Noise MAD; one per row for joint-indep.
    #[arg(long, value_delimiter = ',', required = true)]
    pub d: Vec<f64>,
    #[arg(long)]
    pub eps: f64,
    /// Upper end of the noise support.
    #[arg(long, default_value_t = 1.0)]
    pub u: f64,
    /// Deterministic constraint values `g(x)` to test.
    #[arg(long, value_delimiter = ',')]
    pub g: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub a_bar: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub a_hat: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub h: f64,
    /// Point to test against the bilinear constraint.
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct RadiotherapyArgs {
    /// Violation level; without it `rho2` is taken as known.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Known healthy-tissue sensitivity; defaults to the mean.
    #[arg(long, conflicts_with = "eps")]
    pub rho2: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub rho1: f64,
    #[arg(long, default_value_t = 0.9)]
    pub sigma: f64,
    #[arg(long, default_value_t = 2.0)]
    pub phi: f64,
    #[arg(long, default_value_t = 27.0)]
    pub dose: f64,
    #[arg(long, default_value_t = 5.0)]
    pub fractions: f64,
    #[arg(long, default_value_t = 1.5)]
    pub x_min: f64,
    /// Support and moments of `rho2`.
    #[arg(long, default_value_t = 3.0)]
    pub rho2_a: f64,
    #[arg(long, default_value_t = 6.0)]
    pub rho2_b: f64,
    #[arg(long, default_value_t = 4.0)]
    pub rho2_mu: f64,
    #[arg(long, default_value_t = 0.25)]
    pub rho2_d: f64,
    /// Write the feasible-region outline here as a `.dat` polyline.
    #[arg(long)]
    pub boundary_out: Option<PathBuf>,
    #[arg(long, default_value_t = 400)]
    pub boundary_points: usize,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// One-column CSV sample.
    #[arg(long)]
    pub samples: PathBuf,
    /// Support override; needs --b too.
    #[arg(long = "shift-a", visible_alias = "a", requires = "b")]
    pub shift_a: Option<f64>,
    #[arg(long, requires = "shift_a")]
    pub b: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    SupTail,
    InfTail,
    SupTailBeta,
    InfTailBeta,
    Retention,
    Layer,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Evenly spaced LP grid points on top of the knots.
    #[arg(long, default_value_t = 501)]
    pub grid: usize,
    /// Random instances per check.
    #[arg(long, default_value_t = 100)]
    pub draws: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Largest gap counted as agreement.
    #[arg(long, default_value_t = PASS_GAP)]
    pub tol: f64,
}

/// What a subcommand produced.
pub struct Outcome {
    pub report: Report,
    /// False when a check inside the command failed (exit code 1).
    pub success: bool,
    pub notes: Vec<String>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome { report, success: true, notes: vec![] }
    }
}

/// Parse `args` (program name first), run, and write to the given streams.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    1
                }
            };
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<i32> {
    let outcome = dispatch(&cli.command)?;
    for note in &outcome.notes {
        let _ = writeln!(stderr, "note: {note}");
    }
    let text = outcome.report.render(cli.format);
    match &cli.output {
        Some(path) => write_file(path, &text)?,
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?,
    }
    Ok(if outcome.success { 0 } else { 1 })
}

fn write_file(path: &std::path::Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub fn dispatch(command: &Command) -> CliResult<Outcome> {
    match command {
        Command::Bound(a) => bound(a).map(Into::into),
        Command::Curve(a) => curve(a).map(Into::into),
        Command::Worstcase(a) => worstcase(a).map(Into::into),
        Command::Newsvendor(a) => newsvendor(a).map(Into::into),
        Command::Price(a) => price(a).map(Into::into),
        Command::Stoploss(a) => stoploss(a).map(Into::into),
        Command::Sum(a) => sum(a),
        Command::Chance(a) => chance_cmd(a).map(Into::into),
        Command::Radiotherapy(a) => radiotherapy(a).map(Into::into),
        Command::Estimate(a) => estimate(a).map(Into::into),
        Command::Verify(a) => verify(a),
    }
}

fn set_meta(report: &mut Report, set: &AmbiguitySet) {
    report.meta("a", set.a);
    report.meta("b", set.b);
    report.meta("mu", set.mu);
    report.meta("d", set.d);
    report.meta("beta", set.beta);
}

fn bound(args: &BoundArgs) -> CliResult<Report> {
    let set = args.set.resolve()?;
    let w = &args.which;
    let bv = if w.sup {
        tail_bounds::sup_tail(&set, args.t)?
    } else if w.inf {
        tail_bounds::inf_tail(&set, args.t)?
    } else if w.sup_beta {
        tail_bounds::sup_tail_beta(&set, args.t)?
    } else {
        tail_bounds::inf_tail_beta(&set, args.t)?
    };
    let mut r = Report::new(&["t", "value", "branch", "tau1", "tau2"]);
    r.row(vec![args.t.into(), bv.value.into(), format!("{:?}", bv.branch).into(), bv.tau1.into(), bv.tau2.into()]);
    set_meta(&mut r, &set);
    Ok(r.dat_only(&["value"]))
}

fn curve(args: &CurveArgs) -> CliResult<Report> {
    let set = args.set.resolve()?;
    let sigma = || args.sigma.ok_or_else(|| CliError::Usage("this curve needs --sigma".into()));
    let kind = match args.kind {
        CurveKind::Sup => BoundKind::Sup,
        CurveKind::Inf => BoundKind::Inf,
        CurveKind::SupBeta => BoundKind::SupBeta,
        CurveKind::InfBeta => BoundKind::InfBeta,
        CurveKind::SupIneqMad => BoundKind::SupIneqMad,
        CurveKind::Cantelli => BoundKind::Cantelli { sigma: sigma()? },
        CurveKind::DeSchepperSup => BoundKind::DeSchepperSup { sigma: sigma()? },
        CurveKind::DeSchepperInf => BoundKind::DeSchepperInf { sigma: sigma()? },
    };
    if args.points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let grid = linspace(args.t_min.unwrap_or(set.a), args.t_max.unwrap_or(set.b), args.points);
    let c = tail_bounds::curve(kind, &set, &grid)?;
    let mut r = Report::new(&["t", "value"]);
    for p in &c.points {
        r.row(vec![p.t.into(), p.value.into()]);
    }
    set_meta(&mut r, &set);
    Ok(r)
}

fn worstcase(args: &WorstcaseArgs) -> CliResult<Report> {
    let set = args.set.resolve()?;
    let mode = match args.mode {
        ModeArg::Sup => Mode::Sup,
        ModeArg::Inf => Mode::Inf,
    };
    let dist = tail_bounds::worst_case_distribution(&set, args.t, mode)?;
    let mut r = Report::new(&["x", "p"]);
    for atom in &dist.atoms {
        r.row(vec![atom.x.into(), atom.p.into()]);
    }
    set_meta(&mut r, &set);
    r.meta("t", args.t);
    r.meta("mean", dist.mean());
    r.meta("mad", dist.mad_about(set.mu));
    let value = match mode {
        Mode::Sup => dist.prob_ge(args.t),
        Mode::Inf => dist.prob_gt(args.t),
    };
    r.meta("value", value);
    if let Some(free) = dist.free {
        r.meta("free_lo", free.lo);
        r.meta("free_hi", free.hi);
        r.meta("free_mass", free.mass);
    }
    Ok(r)
}

fn newsvendor(args: &NewsvendorArgs) -> CliResult<Report> {
    let etas = match (args.price, args.cost) {
        (Some(p), Some(c)) => vec![NewsvendorInput::critical_ratio(p, c)?],
        _ => args.eta.clone(),
    };
    let uppers = args.b.iter().map(|s| parse_upper(s)).collect::<CliResult<Vec<_>>>()?;
    let mut r = Report::new(&["eta", "b", "lo", "hi", "interval"]);
    let mut grid = String::new();
    for &eta in &etas {
        let mut line = vec![crate::format::sig(eta, crate::format::DAT_DIGITS)];
        for &upper in &uppers {
            let input = match upper {
                Some(b) => {
                    let set = AmbiguitySet { a: args.shift_a, b, mu: args.mu, d: args.d, beta: args.beta };
                    NewsvendorInput::new(&set, eta)?
                }
                None => NewsvendorInput::unbounded(args.shift_a, args.mu, args.d, args.beta, eta)?,
            };
            let q = if args.beta.is_some() { order_interval_beta(&input)? } else { order_interval_mad(&input)? };
            let shown = format!("[{}, {}]", fmt2(q.lo), fmt2(q.hi));
            r.row(vec![eta.into(), upper.unwrap_or(f64::INFINITY).into(), q.lo.into(), q.hi.into(), shown.clone().into()]);
            line.push(shown);
        }
        grid.push_str(&line.join(" "));
        grid.push('\n');
    }
    if r.rows.len() == 1 {
        r.dat_text = Some(match &r.rows[0][4] {
            Cell::Text(s) => format!("{s}\n"),
            _ => unreachable!("interval column holds text"),
        });
    } else {
        r.dat_text = Some(grid);
    }
    r.meta("mu", args.mu);
    r.meta("d", args.d);
    r.meta("beta", args.beta);
    Ok(r)
}

fn price(args: &PriceArgs) -> CliResult<Report> {
    let set_with = |d: f64| -> CliResult<AmbiguitySet> {
        Ok(AmbiguitySet::new(args.shift_a, args.b, args.mu, d)?)
    };
    let mut r = match args.curve {
        Some(PriceCurve::Profit) => {
            let set = set_with(args.d.ok_or_else(|| CliError::Usage("the profit curve needs --d".into()))?)?;
            let mut r = Report::new(&["r", "profit"]);
            for p in linspace(set.a, set.b, args.points) {
                r.row(vec![p.into(), worst_case_profit(&set, p)?.into()]);
            }
            r
        }
        Some(PriceCurve::Price) => {
            let d_max = 2.0 * (args.b - args.mu) * (args.mu - args.shift_a) / (args.b - args.shift_a);
            let mut r = Report::new(&["d", "r_star", "profit", "regime"]);
            for d in linspace(0.0, d_max, args.points) {
                let s = optimal_price(&set_with(d)?)?;
                r.row(vec![d.into(), s.r_star.into(), s.profit.into(), format!("{:?}", s.regime).into()]);
            }
            r.dat_only(&["d", "r_star"])
        }
        None => {
            let d = args.d.expect("clap requires --d without --curve");
            let s = optimal_price(&set_with(d)?)?;
            let mut r = Report::new(&["r_star", "profit", "regime", "d1", "d2", "d_max"]);
            r.row(vec![
                s.r_star.into(),
                s.profit.into(),
                format!("{:?}", s.regime).into(),
                s.d1.into(),
                s.d2.into(),
                s.d_max.into(),
            ]);
            r
        }
    };
    r.meta("mu", args.mu);
    r.meta("b", args.b);
    if args.b > 5.0 * args.mu && args.shift_a == 0.0 {
        r.meta("tie_d", tie_mad(args.mu, args.b)?);
    }
    Ok(r)
}

fn stoploss(args: &StoplossArgs) -> CliResult<Report> {
    let set = args.set.resolve()?;
    let zs = match args.z {
        Some(z) => vec![z],
        None => linspace(set.a, set.b, args.points.max(2)),
    };
    let claims = args.claims.as_deref().map(read_column).transpose()?;
    let mut columns = vec!["z", "bound"];
    if claims.is_some() {
        columns.push("empirical");
    }
    let mut r = Report::new(&columns);
    for z in zs {
        let layer = Layer::new(z, args.cap)?;
        let bound = if args.insurer { retention_bound(&set, z)? } else { reinsurer_benefit_bound(&set, layer)? };
        let mut row = vec![z.into(), bound.into()];
        if let Some(xs) = &claims {
            let pay = |x: f64| {
                if args.insurer {
                    x.min(z)
                } else {
                    (x - z).max(0.0).min(layer.cap.unwrap_or(f64::INFINITY))
                }
            };
            row.push((xs.iter().map(|&x| pay(x)).sum::<f64>() / xs.len() as f64).into());
        }
        r.row(row);
    }
    set_meta(&mut r, &set);
    r.meta("cap", args.cap);
    Ok(r)
}

fn sum(args: &SumArgs) -> CliResult<Outcome> {
    let lognormals: Vec<Lognormal> = if args.lognormal_triple {
        sums::lognormal_triple().to_vec()
    } else {
        args.lognormal
            .iter()
            .map(|s| {
                let v = parse_tuple(s, 2, "--lognormal")?;
                Ok(Lognormal::new(v[0], v[1])?)
            })
            .collect::<CliResult<_>>()?
    };
    let marginal_sets: Vec<AmbiguitySet> = if lognormals.is_empty() {
        args.marginal
            .iter()
            .map(|s| {
                let v = parse_tuple(s, 3, "--marginal")?;
                Ok(AmbiguitySet::new(0.0, v[0], v[1], v[2])?)
            })
            .collect::<CliResult<_>>()?
    } else {
        lognormals.iter().map(|l| l.truncated_set(args.truncation)).collect::<crate::Result<_>>()?
    };
    if marginal_sets.is_empty() {
        return Err(CliError::Usage("give --marginal, --lognormal or --lognormal-triple".into()));
    }
    let mut set = MarginalSet::new(marginal_sets)?;
    if let Some(d_hat) = args.d_hat {
        set = set.with_d_hat(d_hat)?;
    }
    let mut notes = vec![];
    let meta = |r: &mut Report| {
        r.meta("mu_bar", set.mu_bar());
        r.meta("b_bar", set.b_bar());
        r.meta("d_hat", set.d_hat());
        if !lognormals.is_empty() {
            r.meta("truncation", args.truncation);
        }
    };
    if !lognormals.is_empty() {
        notes.push(format!("lognormal supports cut at the {} quantile for the bounds", args.truncation));
    }

    if let Some(alpha) = args.var {
        let v = sums::var_bound(&set, alpha)?;
        let mut r = Report::new(&["alpha", "var", "reached"]);
        r.row(vec![alpha.into(), v.value.into(), v.reached.into()]);
        meta(&mut r);
        if !v.reached {
            notes.push("tail bound never drops to 1 - alpha; reporting b_bar".into());
        }
        return Ok(Outcome { report: r, success: true, notes });
    }

    let lo = args.t_min.unwrap_or(if args.stoploss { 0.0 } else { set.mu_bar() });
    let ts = match args.t {
        Some(t) => vec![t],
        None => linspace(lo, args.t_max.unwrap_or(set.b_bar()), args.points.max(2)),
    };
    let copulas: Vec<Copula> = match args.copula {
        CopulaArg::Independent => vec![Copula::Independent],
        CopulaArg::Comonotonic => vec![Copula::Comonotonic],
        CopulaArg::Both => vec![Copula::Independent, Copula::Comonotonic],
    };
    let samples = if lognormals.is_empty() || args.draws == 0 {
        vec![]
    } else {
        copulas
            .iter()
            .map(|&c| sums::simulate_sum(&lognormals, c, args.draws, args.seed))
            .collect::<crate::Result<Vec<_>>>()?
    };
    let first = if args.stoploss { "z" } else { "t" };
    let mut columns = vec![first.to_string(), "bound".to_string()];
    for s in &samples {
        let name = match s.copula {
            Copula::Independent => "independent",
            Copula::Comonotonic => "comonotonic",
        };
        columns.push(name.into());
        columns.push(format!("{name}_se"));
    }
    let mut r = Report { columns, ..Default::default() };
    for t in ts {
        let (bound, layer) = if args.stoploss {
            let layer = Layer::new(t, args.cap)?;
            (sums::sum_stoploss_bound(&set, layer)?, Some(layer))
        } else {
            (sums::sum_tail_bound(&set, t)?, None)
        };
        let mut row = vec![t.into(), bound.into()];
        for s in &samples {
            let e = match layer {
                Some(l) => s.stoploss(l),
                None => s.tail(t),
            };
            row.push(e.value.into());
            row.push(e.std_error.into());
        }
        r.row(row);
    }
    meta(&mut r);
    if !samples.is_empty() {
        r.meta("draws", args.draws as f64);
        r.meta("seed", args.seed as f64);
    }
    Ok(Outcome { report: r, success: true, notes })
}

fn chance_cmd(args: &ChanceArgs) -> CliResult<Report> {
    let single_d = || match args.d.as_slice() {
        [d] => Ok(*d),
        _ => Err(CliError::Usage("this form takes a single --d".into())),
    };
    match args.form {
        ChanceForm::Rhs | ChanceForm::Asym => {
            let noise = NoiseSet::new(args.u, single_d()?)?;
            let k = match args.form {
                ChanceForm::Rhs => chance::reform_rhs(&noise, args.eps)?,
                _ => chance::reform_rhs_asym(&noise, args.eps)?,
            };
            if args.g.is_empty() {
                let mut r = Report::new(&["kappa", "clipped"]);
                r.row(vec![k.kappa.into(), k.clipped.into()]);
                return Ok(r);
            }
            let mut r = Report::new(&["g", "kappa", "feasible"]);
            for &g in &args.g {
                r.row(vec![g.into(), k.kappa.into(), k.admits(g).into()]);
            }
            Ok(r)
        }
        ChanceForm::Bilinear => {
            let noise = NoiseSet::unit(single_d()?)?;
            let reform = chance::reform_bilinear(args.a_bar.clone(), args.a_hat.clone(), args.h, &noise, args.eps)?;
            let n = args.a_bar.len();
            let mut columns = vec!["sign".to_string()];
            columns.extend((1..=n).map(|i| format!("c{i}")));
            columns.push("rhs".into());
            let mut r = Report { columns, ..Default::default() };
            for (sign, row) in ["plus", "minus"].into_iter().zip(reform.linear_form()) {
                let mut cells: Vec<Cell> = vec![sign.into()];
                cells.extend(row.coeffs.iter().map(|&c| Cell::Num(c)));
                cells.push(row.rhs.into());
                r.row(cells);
            }
            r.meta("kappa", reform.coefficient.kappa);
            if !args.x.is_empty() {
                let slack = reform.slack(&args.x)?;
                r.meta("slack", slack);
                r.meta("feasible", slack <= 0.0);
            }
            Ok(r)
        }
        ChanceForm::JointIndep => {
            let j = chance::reform_joint_indep(&args.g, &args.d, args.eps)?;
            let mut r = Report::new(&["feasible", "log_sum", "log_target"]);
            r.row(vec![j.feasible.into(), j.log_sum.into(), j.log_target.into()]);
            Ok(r)
        }
        ChanceForm::JointShared => {
            let noise = NoiseSet::unit(single_d()?)?;
            let feasible = chance::reform_joint_shared(&args.g, &noise, args.eps)?;
            let k = chance::reform_rhs(&noise, args.eps)?;
            let worst = args.g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut r = Report::new(&["max_g", "kappa", "feasible"]);
            r.row(vec![worst.into(), k.kappa.into(), feasible.into()]);
            Ok(r)
        }
    }
}

fn radiotherapy(args: &RadiotherapyArgs) -> CliResult<Report> {
    let problem = RadiotherapyProblem {
        rho1: args.rho1,
        sigma: args.sigma,
        phi: args.phi,
        dose: args.dose,
        fractions: args.fractions,
        x_min: args.x_min,
        rho2: AmbiguitySet { a: args.rho2_a, b: args.rho2_b, mu: args.rho2_mu, d: args.rho2_d, beta: None },
    };
    let model = match args.eps {
        Some(epsilon) => ConstraintModel::Ambiguous { epsilon },
        None => ConstraintModel::Nominal { rho2: args.rho2.unwrap_or(args.rho2_mu) },
    };
    let s = chance::radiotherapy_solve(&problem, model)?;
    if let Some(path) = &args.boundary_out {
        let pts = chance::feasible_boundary(&problem, model, args.boundary_points)?;
        write_file(path, &write_dat_rows(pts.iter().map(|p| [p.x1, p.x2])))?;
    }
    let mut r = Report::new(&["x1", "x2", "objective", "residual"]);
    r.row(vec![s.x1.into(), s.x2.into(), s.objective.into(), s.residual.into()]);
    r.meta("worst_case_violation", s.worst_case_violation);
    r.meta("beyond_support", s.beyond_support);
    Ok(r)
}

fn estimate(args: &EstimateArgs) -> CliResult<Report> {
    let values = read_column(&args.samples)?;
    let support = args.shift_a.zip(args.b);
    let (set, m) = estimate_from_samples(&values, support)?;
    let mut r = Report::new(&["a", "b", "mu", "d", "beta", "n"]);
    r.row(vec![set.a.into(), set.b.into(), set.mu.into(), set.d.into(), set.beta.into(), (m.n as f64).into()]);
    Ok(r)
}

fn verify(args: &VerifyArgs) -> CliResult<Outcome> {
    if !(args.tol >= 0.0) {
        return Err(CliError::Usage(format!("--tol must be nonnegative, got {}", args.tol)));
    }
    let all = [
        BoundCheck::SupTail,
        BoundCheck::InfTail,
        BoundCheck::SupTailBeta,
        BoundCheck::InfTailBeta,
        BoundCheck::Retention,
        BoundCheck::Layer { cap: None },
    ];
    let checks: Vec<BoundCheck> = match args.suite {
        Suite::All => all.to_vec(),
        Suite::SupTail => vec![all[0]],
        Suite::InfTail => vec![all[1]],
        Suite::SupTailBeta => vec![all[2]],
        Suite::InfTailBeta => vec![all[3]],
        Suite::Retention => vec![all[4]],
        Suite::Layer => vec![all[5]],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let reports = verify_suite(&mut rng, &checks, args.draws, args.grid)?;
    let columns: Vec<&str> = VerifyReport::CSV_HEADER.split(',').collect();
    let mut r = Report::new(&columns);
    let mut failures = 0;
    for rep in &reports {
        let pass = rep.status != VerifyStatus::Infeasible && rep.gap <= args.tol;
        if !pass {
            failures += 1;
        }
        let status = match (rep.status, pass) {
            (VerifyStatus::Infeasible, _) => "infeasible",
            (_, true) => "pass",
            (_, false) => "fail",
        };
        let s = &rep.set;
        r.row(vec![
            rep.id.as_str().into(),
            s.a.into(),
            s.b.into(),
            s.mu.into(),
            s.d.into(),
            s.beta.into(),
            rep.t.into(),
            rep.cap.into(),
            rep.closed_form.into(),
            rep.lp_value.into(),
            rep.gap.into(),
            status.into(),
        ]);
    }
    let worst = reports.iter().map(|x| x.gap).fold(0.0, f64::max);
    r.meta("cases", reports.len() as f64);
    r.meta("failures", failures as f64);
    r.meta("max_gap", worst);
    let notes = vec![format!("{} cases, {failures} failures, max gap {worst:.3e}", reports.len())];
    Ok(Outcome { report: r.dat_only(&["id", "gap", "status"]), success: failures == 0, notes })
}
