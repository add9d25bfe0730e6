//! Command-line front end. Each subcommand turns its arguments into a
//! [`Report`], which is then written as CSV or JSON.

pub mod output;
pub mod tables;

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::RandomnessReport;
use crate::bounds::BoundsReport;
use crate::error::{Error, Result};
use crate::montecarlo::{simulate_many, McConfig, DEFAULT_DURATION, DEFAULT_GROUPS, DEFAULT_TOTAL_COUNTS};
use crate::numeric::linspace;
use crate::optimizer::{optimize, scan_region, GridSpec};
use crate::protocol::{
    p_ab_bruteforce, p_ab_closed, p_abc, p_abc_bruteforce, p_ac_bruteforce, p_ac_closed,
    sharpness_from_theta, Branch, ProtocolParams, THETA_LAMBDA_MAX,
};

pub use output::{Cell, Format, Report};
use tables::{Summary, Which};

/// Either a single value or `start:stop:count`, inclusive at both ends.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl ValueRange {
    pub fn single(v: f64) -> Self {
        Self {
            start: v,
            stop: v,
            count: 1,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.count)
    }
}

impl FromStr for ValueRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{t}` is not a finite number"))
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [v] => Ok(Self::single(num(v)?)),
            [a, b, n] => {
                let count = n
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| format!("`{n}` is not a point count"))?;
                if count == 0 {
                    return Err("a range needs at least one point".into());
                }
                Ok(Self {
                    start: num(a)?,
                    stop: num(b)?,
                    count,
                })
            }
            _ => Err(format!("`{s}` is neither a number nor start:stop:count")),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "seqrac",
    version,
    about = "Entanglement-assisted sequential 2->1 QRAC toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Master seed for Monte Carlo runs.
    #[arg(long, global = true, default_value_t = 2021)]
    pub seed: u64,

    /// Grid points per axis for region scans.
    #[arg(long, global = true, default_value_t = 241)]
    pub grid: usize,

    /// Overrides every pass/fail tolerance in `tables`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

/// Bob's sharpnesses, directly or through the wave-plate angle.
#[derive(Debug, Clone, Args)]
pub struct Sharpness {
    /// η₀ value or range.
    #[arg(long, allow_hyphen_values = true)]
    pub eta0: Option<ValueRange>,
    /// η₁ value or range.
    #[arg(long, allow_hyphen_values = true)]
    pub eta1: Option<ValueRange>,
    /// Wave-plate angle θ_λ in degrees; sets η₁ = cos 4θ_λ, and η₀ too
    /// unless `--eta0` is given.
    #[arg(long = "theta-lambda", allow_hyphen_values = true)]
    pub theta_lambda: Option<ValueRange>,
}

/// A resolved sharpness pair, remembering the wave-plate angle if any.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SharpnessPoint {
    pub theta_deg: Option<f64>,
    pub eta0: f64,
    pub eta1: f64,
}

impl Sharpness {
    pub fn points(&self) -> Result<Vec<SharpnessPoint>> {
        let mut out = Vec::new();
        match &self.theta_lambda {
            Some(theta) => {
                let eta0 = self.eta0.as_ref().map(ValueRange::values);
                for t in theta.values() {
                    if !(0.0..=THETA_LAMBDA_MAX.to_degrees()).contains(&t) {
                        return Err(Error::Usage(format!(
                            "--theta-lambda {t} is outside [0, 22.5] degrees"
                        )));
                    }
                    let eta1 = sharpness_from_theta(t.to_radians()).max(0.0);
                    let e0s = eta0.clone().unwrap_or_else(|| vec![eta1]);
                    for e0 in e0s {
                        out.push(SharpnessPoint {
                            theta_deg: Some(t),
                            eta0: e0,
                            eta1,
                        });
                    }
                }
            }
            None => {
                let e0s = self.eta0.as_ref().map_or(vec![1.0], ValueRange::values);
                let e1s = self.eta1.as_ref().map_or(vec![1.0], ValueRange::values);
                for &e0 in &e0s {
                    for &e1 in &e1s {
                        out.push(SharpnessPoint {
                            theta_deg: None,
                            eta0: e0,
                            eta1: e1,
                        });
                    }
                }
            }
        }
        for p in &out {
            for (name, v) in [("--eta0", p.eta0), ("--eta1", p.eta1)] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Usage(format!("{name} {v} is outside [0, 1]")));
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionOutput {
    /// Polylines where min(P_AB, P_AC) = 3/4.
    Boundary,
    /// Every grid point with its maximin setting.
    Points,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Success probabilities, closed form and brute force.
    Probs {
        #[command(flatten)]
        sharpness: Sharpness,
        /// Bob's angle α in degrees.
        #[arg(long, default_value = "45", allow_hyphen_values = true)]
        alpha: ValueRange,
        /// Charlie's angle β in degrees.
        #[arg(long, default_value = "45", allow_hyphen_values = true)]
        beta: ValueRange,
    },
    /// Maximin measurement angles.
    Optimize {
        #[command(flatten)]
        sharpness: Sharpness,
    },
    /// Double-violation region over the (η₀, η₁) square.
    Region {
        #[arg(long, value_enum, default_value_t = RegionOutput::Boundary)]
        what: RegionOutput,
    },
    /// Sharpness, biasness and incompatibility bounds from observed data.
    Bounds {
        #[arg(long = "p-ab")]
        p_ab: ValueRange,
        #[arg(long = "p-ac")]
        p_ac: ValueRange,
        /// Known η₀; both sharpnesses must be given together.
        #[arg(long, requires = "eta1")]
        eta0: Option<f64>,
        #[arg(long, requires = "eta0")]
        eta1: Option<f64>,
    },
    /// CHSH values and certified min-entropy.
    Entropy {
        #[command(flatten)]
        sharpness: Sharpness,
        /// Use maximin angles instead of α = β = 45°.
        #[arg(long)]
        optimized: bool,
        /// Observed CHSH value for Bob; skips the model.
        #[arg(long = "i-ab", requires = "i_ac")]
        i_ab: Option<f64>,
        #[arg(long = "i-ac", requires = "i_ab")]
        i_ac: Option<f64>,
    },
    /// Poisson emulation of the counting experiment.
    Mc {
        #[command(flatten)]
        sharpness: Sharpness,
        #[arg(long)]
        optimized: bool,
        #[arg(long, default_value_t = 1)]
        runs: usize,
        /// Expected coincidences per decoder measurement.
        #[arg(long = "total-counts", default_value_t = DEFAULT_TOTAL_COUNTS)]
        total_counts: f64,
        /// Seconds per trial window.
        #[arg(long, default_value_t = DEFAULT_DURATION)]
        duration: f64,
        /// Counting groups (sub-windows per trial).
        #[arg(long, default_value_t = DEFAULT_GROUPS)]
        groups: usize,
    },
    /// Regenerates the reference tables and diffs them cell by cell.
    Tables {
        /// I..VIII or all.
        #[arg(long, default_value = "all")]
        which: Which,
        /// Exit nonzero if any cell fails.
        #[arg(long)]
        strict: bool,
    },
}

/// What a subcommand produced.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    /// Line for stderr, if any.
    pub note: Option<String>,
    /// Set when the run should end with a nonzero status.
    pub failed: bool,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Self {
            report,
            note: None,
            failed: false,
        }
    }
}

fn theta_cell(p: &SharpnessPoint) -> Cell {
    p.theta_deg.map_or(Cell::Empty, Cell::Angle)
}

fn degrees(range: &ValueRange, name: &str) -> Result<Vec<f64>> {
    let v = range.values();
    if let Some(bad) = v.iter().find(|d| !(0.0..=45.0).contains(*d)) {
        return Err(Error::Usage(format!("--{name} {bad} is outside [0, 45] degrees")));
    }
    Ok(v)
}

fn cmd_probs(s: &Sharpness, alpha: &ValueRange, beta: &ValueRange) -> Result<Report> {
    let mut r = Report::new(vec![
        "theta_lambda_deg",
        "eta0",
        "eta1",
        "alpha_deg",
        "beta_deg",
        "p_ab",
        "p_ac",
        "p_abc",
        "p_ab_bruteforce",
        "p_ac_bruteforce",
        "p_abc_bruteforce",
    ]);
    let (alphas, betas) = (degrees(alpha, "alpha")?, degrees(beta, "beta")?);
    for pt in s.points()? {
        for &a in &alphas {
            for &b in &betas {
                let p = ProtocolParams::new(pt.eta0, pt.eta1, a.to_radians(), b.to_radians())?;
                r.push(vec![
                    theta_cell(&pt),
                    Cell::Fixed(pt.eta0, 6),
                    Cell::Fixed(pt.eta1, 6),
                    Cell::Angle(a),
                    Cell::Angle(b),
                    Cell::Prob(p_ab_closed(&p)),
                    Cell::Prob(p_ac_closed(&p)),
                    Cell::Prob(p_abc(&p)),
                    Cell::Prob(p_ab_bruteforce(&p)),
                    Cell::Prob(p_ac_bruteforce(&p)),
                    Cell::Prob(p_abc_bruteforce(&p)),
                ]);
            }
        }
    }
    Ok(r)
}

fn cmd_optimize(s: &Sharpness) -> Result<Report> {
    let mut r = Report::new(vec![
        "theta_lambda_deg",
        "eta0",
        "eta1",
        "branch",
        "alpha_deg",
        "beta_deg",
        "p_ab",
        "p_ac",
        "p_abc",
    ]);
    for pt in s.points()? {
        let o = optimize(pt.eta0, pt.eta1)?;
        let rep = o.report();
        r.push(vec![
            theta_cell(&pt),
            Cell::Fixed(pt.eta0, 6),
            Cell::Fixed(pt.eta1, 6),
            Cell::text(o.branch.as_str()),
            Cell::Angle(o.alpha_deg()),
            Cell::Angle(o.beta_deg()),
            Cell::Prob(rep.p_ab),
            Cell::Prob(rep.p_ac),
            Cell::Prob(rep.p_abc),
        ]);
    }
    Ok(r)
}

fn cmd_region(grid: usize, what: RegionOutput) -> Result<Report> {
    let scan = scan_region(GridSpec::new(grid)?)?;
    Ok(match what {
        RegionOutput::Boundary => {
            let mut r = Report::new(vec!["polyline", "vertex", "eta0", "eta1"]);
            for (k, line) in scan.boundary.iter().enumerate() {
                for (v, &(e0, e1)) in line.iter().enumerate() {
                    r.push(vec![
                        Cell::Int(k as i64),
                        Cell::Int(v as i64),
                        Cell::Fixed(e0, 6),
                        Cell::Fixed(e1, 6),
                    ]);
                }
            }
            r
        }
        RegionOutput::Points => {
            let mut r = Report::new(vec![
                "eta0",
                "eta1",
                "branch",
                "alpha_deg",
                "beta_deg",
                "p_ab",
                "p_ac",
                "p_abc",
                "violation",
            ]);
            for p in &scan.points {
                r.push(vec![
                    Cell::Fixed(p.setting.eta0, 6),
                    Cell::Fixed(p.setting.eta1, 6),
                    Cell::text(p.setting.branch.as_str()),
                    Cell::Angle(p.setting.alpha_deg()),
                    Cell::Angle(p.setting.beta_deg()),
                    Cell::Prob(p.report.p_ab),
                    Cell::Prob(p.report.p_ac),
                    Cell::Prob(p.report.p_abc),
                    Cell::Bool(p.violation),
                ]);
            }
            r
        }
    })
}

fn cmd_bounds(
    p_ab: &ValueRange,
    p_ac: &ValueRange,
    eta: Option<(f64, f64)>,
) -> Result<Report> {
    let mut r = Report::new(vec![
        "p_ab", "p_ac", "eta_low", "eta_up", "s_up", "t_up", "d_s_low", "d_t_low", "m",
        "hmin_ab", "hmin_ac", "clamped",
    ]);
    for a in p_ab.values() {
        for c in p_ac.values() {
            let b = BoundsReport::from_observed(a, c, eta)?;
            r.push(vec![
                Cell::Prob(b.p_ab),
                Cell::Prob(b.p_ac),
                Cell::Fixed(b.eta_low, 6),
                Cell::Fixed(b.eta_up, 6),
                Cell::Fixed(b.s_up, 6),
                Cell::Fixed(b.t_up, 6),
                Cell::Fixed(b.d_s_low, 6),
                Cell::Fixed(b.d_t_low, 6),
                Cell::Fixed(b.m, 6),
                Cell::Fixed(b.hmin_ab, 6),
                Cell::Fixed(b.hmin_ac, 6),
                Cell::text(b.clamped.join(";")),
            ]);
        }
    }
    Ok(r)
}

fn entropy_row(r: &mut Report, theta: Cell, e0: Cell, e1: Cell, branch: Cell, x: &RandomnessReport) {
    r.push(vec![
        theta,
        e0,
        e1,
        branch,
        Cell::Fixed(x.i_ab, 6),
        Cell::Fixed(x.i_ac, 6),
        Cell::Fixed(x.hmin_ab, 6),
        Cell::Fixed(x.hmin_ac, 6),
        Cell::Fixed(x.hmin_total, 6),
    ]);
}

fn cmd_entropy(
    s: &Sharpness,
    optimized: bool,
    observed: Option<(f64, f64)>,
) -> Result<Report> {
    let mut r = Report::new(vec![
        "theta_lambda_deg",
        "eta0",
        "eta1",
        "branch",
        "i_ab",
        "i_ac",
        "hmin_ab",
        "hmin_ac",
        "hmin_total",
    ]);
    if let Some((i_ab, i_ac)) = observed {
        let x = RandomnessReport::from_chsh(i_ab, i_ac)?;
        entropy_row(&mut r, Cell::Empty, Cell::Empty, Cell::Empty, Cell::text("observed"), &x);
        return Ok(r);
    }
    for pt in s.points()? {
        let (params, branch) = settings(&pt, optimized)?;
        let x = RandomnessReport::from_params(&params);
        entropy_row(
            &mut r,
            theta_cell(&pt),
            Cell::Fixed(pt.eta0, 6),
            Cell::Fixed(pt.eta1, 6),
            Cell::text(branch.as_str()),
            &x,
        );
    }
    Ok(r)
}

fn settings(pt: &SharpnessPoint, optimized: bool) -> Result<(ProtocolParams, Branch)> {
    if optimized {
        let o = optimize(pt.eta0, pt.eta1)?;
        Ok((o.params(), o.branch))
    } else {
        Ok((ProtocolParams::unbiased(pt.eta0, pt.eta1)?, Branch::Unbiased))
    }
}

fn cmd_mc(s: &Sharpness, optimized: bool, runs: usize, config: McConfig, seed: u64) -> Result<Report> {
    if runs == 0 {
        return Err(Error::Usage("--runs must be at least 1".into()));
    }
    let mut r = Report::new(vec![
        "theta_lambda_deg",
        "eta0",
        "eta1",
        "alpha_deg",
        "beta_deg",
        "run",
        "seed",
        "p_ab",
        "p_ac",
        "sd_ab",
        "sd_ac",
        "counts_ab",
        "counts_ac",
        "theory_p_ab",
        "theory_p_ac",
    ]);
    for pt in s.points()? {
        let (params, _) = settings(&pt, optimized)?;
        for (k, run) in simulate_many(&params, &config, seed, runs)?.into_iter().enumerate() {
            r.push(vec![
                theta_cell(&pt),
                Cell::Fixed(pt.eta0, 6),
                Cell::Fixed(pt.eta1, 6),
                Cell::Angle(params.alpha.to_degrees()),
                Cell::Angle(params.beta.to_degrees()),
                Cell::Int(k as i64),
                Cell::text(run.seed.to_string()),
                Cell::Prob(run.p_ab),
                Cell::Prob(run.p_ac),
                Cell::Fixed(run.sd_ab, 6),
                Cell::Fixed(run.sd_ac, 6),
                Cell::Int(run.counts_ab as i64),
                Cell::Int(run.counts_ac as i64),
                Cell::Prob(p_ab_closed(&params)),
                Cell::Prob(p_ac_closed(&params)),
            ]);
        }
    }
    Ok(r)
}

fn cmd_tables(which: &Which, strict: bool, tol: Option<f64>) -> Result<Outcome> {
    let checks = tables::check_tables(&which.0, tol)?;
    let s = Summary::of(&checks);
    Ok(Outcome {
        report: tables::to_report(&checks),
        note: Some(format!(
            "tables: {} pass, {} fail, {} info, {} excluded",
            s.pass, s.fail, s.info, s.excluded
        )),
        failed: strict && s.fail > 0,
    })
}

/// Runs the parsed command without touching the output destination.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Probs {
            sharpness,
            alpha,
            beta,
        } => cmd_probs(sharpness, alpha, beta).map(Outcome::from),
        Command::Optimize { sharpness } => cmd_optimize(sharpness).map(Outcome::from),
        Command::Region { what } => cmd_region(cli.grid, *what).map(Outcome::from),
        Command::Bounds {
            p_ab,
            p_ac,
            eta0,
            eta1,
        } => cmd_bounds(p_ab, p_ac, eta0.zip(*eta1)).map(Outcome::from),
        Command::Entropy {
            sharpness,
            optimized,
            i_ab,
            i_ac,
        } => cmd_entropy(sharpness, *optimized, i_ab.zip(*i_ac)).map(Outcome::from),
        Command::Mc {
            sharpness,
            optimized,
            runs,
            total_counts,
            duration,
            groups,
        } => {
            let config = McConfig {
                total_counts: *total_counts,
                duration: *duration,
                groups: *groups,
            };
            cmd_mc(sharpness, *optimized, *runs, config, cli.seed).map(Outcome::from)
        }
        Command::Tables { which, strict } => cmd_tables(which, *strict, cli.tol),
    }
}

/// Parses `args`, runs the command and writes its output. Returns the
/// process exit code; every failure prints exactly one line to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.to_string();
            let line = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            eprintln!("error: {line}");
            return 2;
        }
    };
    match execute(&cli).and_then(|o| {
        o.report.emit(cli.format, cli.out.as_deref())?;
        Ok(o)
    }) {
        Ok(o) => {
            if let Some(n) = o.note {
                eprintln!("{n}");
            }
            i32::from(o.failed)
        }
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            match e {
                Error::Usage(_) | Error::Domain { .. } => 2,
                _ => 1,
            }
        }
    }
}
