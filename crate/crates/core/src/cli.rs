//! Command-line adapter. Every subcommand validates its flags, calls one
//! library operation and serializes the result.
//!
//! Exit codes: 0 on success, 1 for usage errors (bad flags, unparseable
//! input, parameters outside the domain), 2 when a computation fails.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::ec::{normalize, ApproxQuantile, EcParams};
use crate::error::{Error, Result};
use crate::estimation::{
    fit_cardioid_mle_with, fit_ec_mle_with, fit_ec_qlse_with, fit_vonmises_mle, FitOptions, FitResult, Method, Model,
    Sample,
};
use crate::fmt::{sig17, to_json};
use crate::gof::{gof_compare, gof_csv, lrt_c_vs_ec_with, lrt_from_fits, GofRow, LrtReport};
use crate::modality::{
    classify_modality, modality_csv, modality_table, ModalityCell, DEFAULT_GRID_N, DEFAULT_MERGE_TOL,
};
use crate::moments::{
    circular_measures, skew_kurt_csv, skew_kurt_grid, trig_moment, trig_moment_series, SeriesTruncation, TrigMoment,
    MOMENT_TOL,
};
use crate::par::Execution;
use crate::simulate::{compare_estimation_systems, run_mc_study, sim_csv, sim_csv_rows, SimConfig, SIM_CSV_HEADER};

pub const SCHEMA: &str = "1";

/// The 21 wind directions, in degrees, compiled into the binary.
pub const WIND_DEGREES: [f64; 21] = [
    356.0, 97.0, 211.0, 232.0, 343.0, 292.0, 157.0, 302.0, 335.0, 302.0, 324.0, 85.0, 324.0, 340.0, 157.0, 238.0,
    254.0, 146.0, 232.0, 122.0, 329.0,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Unit {
    Deg,
    Rad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Ec,
    Cardioid,
    Vonmises,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Mle,
    Qlse,
}

#[derive(Debug, Parser)]
#[command(name = "excard", version, about = "Exponentiated Cardioid circular-statistics toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub global: Globals,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Globals {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Seed for every random draw and random restart.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Numerical tolerance for root finding and optimization.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Truncation order for series representations.
    #[arg(long = "max-k", global = true, default_value_t = 40)]
    pub max_k: usize,
    /// Monte Carlo replications.
    #[arg(long, global = true, default_value_t = 500)]
    pub reps: usize,
    /// Unit of angles read from data files and `--at` lists. Model
    /// parameters and all output are in radians.
    #[arg(long, global = true, value_enum, default_value = "rad")]
    pub unit: Unit,
    /// Run on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct EcArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: f64,
}

#[derive(Debug, Args, Clone)]
pub struct PointsArgs {
    /// Comma-separated evaluation angles; defaults to an even grid.
    #[arg(long)]
    pub at: Option<String>,
    /// Number of grid points 2πk/N, k = 1..N.
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
}

#[derive(Debug, Args, Clone)]
pub struct DataArgs {
    /// Angle file path or inline list; the embedded wind data when absent.
    #[arg(long)]
    pub data: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density values over a grid or at given angles.
    Density {
        #[command(flatten)]
        ec: EcArgs,
        #[command(flatten)]
        points: PointsArgs,
    },
    /// Distribution function values.
    Cdf {
        #[command(flatten)]
        ec: EcArgs,
        #[command(flatten)]
        points: PointsArgs,
        /// Use the power-series representation (requires ρ < 0.5).
        #[arg(long)]
        series: bool,
    },
    /// Quantile by root finding or by the closed-form approximation.
    Quantile {
        #[command(flatten)]
        ec: EcArgs,
        #[arg(long)]
        alpha: f64,
        #[arg(long, conflicts_with = "approx")]
        exact: bool,
        #[arg(long)]
        approx: bool,
    },
    /// Random draws by inversion.
    Sample {
        #[command(flatten)]
        ec: EcArgs,
        #[arg(long)]
        n: usize,
    },
    /// First and second central trigonometric moments.
    Moments {
        #[command(flatten)]
        ec: EcArgs,
        #[arg(long)]
        series: bool,
    },
    /// Mean resultant length, variance, deviation, dispersion, skewness, kurtosis.
    Measures {
        #[command(flatten)]
        ec: EcArgs,
    },
    /// Number and location of modes.
    Modality {
        #[command(flatten)]
        ec: EcArgs,
        #[arg(long = "grid-n", default_value_t = DEFAULT_GRID_N)]
        grid_n: usize,
        #[arg(long = "merge-tol", default_value_t = DEFAULT_MERGE_TOL)]
        merge_tol: f64,
    },
    /// Modality over a parameter lattice; defaults to the published lattice.
    ModalityTable {
        #[arg(long, value_delimiter = ',')]
        betas: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        rhos: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        mus: Option<Vec<f64>>,
        #[arg(long = "grid-n", default_value_t = DEFAULT_GRID_N)]
        grid_n: usize,
    },
    /// Fit one model to data.
    Fit {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum, default_value = "ec")]
        model: ModelArg,
        #[arg(long, value_enum, default_value = "mle")]
        method: MethodArg,
    },
    /// Kuiper and Watson statistics for Cardioid, EC and von Mises fits.
    Gof {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Likelihood-ratio test of Cardioid inside EC.
    Lrt {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Monte Carlo bias and MSE of the estimators.
    Simulate {
        #[command(flatten)]
        ec: EcArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "mle,qlse")]
        methods: Vec<MethodArg>,
    },
    /// Profiled against full three-parameter likelihood search.
    CompareSystems {
        #[command(flatten)]
        ec: EcArgs,
        #[arg(long)]
        n: usize,
    },
    /// Skewness and kurtosis over a parameter lattice.
    SkewkurtMap {
        #[arg(long, value_delimiter = ',')]
        betas: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        rhos: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        mus: Option<Vec<f64>>,
    },
    /// Fits, goodness of fit and the LRT on the embedded wind data.
    WindDemo,
}

/// Result of one invocation, ready to be written out by `main`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Numerical(Error),
}

impl Failure {
    fn usage(e: impl ToString) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numerical(e)
    }
}

type CmdResult = std::result::Result<String, Failure>;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'a str,
    command: &'a str,
    result: T,
}

#[derive(Serialize)]
struct ErrorBody {
    kind: &'static str,
    code: i32,
    message: String,
}

#[derive(Serialize)]
struct ErrorEnvelope<'a> {
    schema: &'a str,
    error: ErrorBody,
}

fn error_outcome(kind: &'static str, code: i32, message: String) -> Outcome {
    let body = ErrorEnvelope { schema: SCHEMA, error: ErrorBody { kind, code, message } };
    Outcome { code, stdout: String::new(), stderr: to_json(&body) + "\n" }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: e.to_string(), stderr: String::new() }
                }
                _ => error_outcome("usage", 1, e.to_string().trim_end().to_string()),
            };
        }
    };
    match dispatch(&cli) {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(Failure::Usage(m)) => error_outcome("usage", 1, m),
        Err(Failure::Numerical(e)) => error_outcome("numerical", 2, e.to_string()),
    }
}

/// Splits on commas and newlines; blank tokens are skipped and `#` starts a
/// comment. Degrees are converted, then every value is reduced onto (0, 2π].
pub fn parse_angles(text: &str, unit: Unit) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let v: f64 = tok.parse().map_err(|_| Error::Parse { line: i + 1, token: tok.to_string() })?;
            if !v.is_finite() {
                return Err(Error::Parse { line: i + 1, token: tok.to_string() });
            }
            out.push(normalize(match unit {
                Unit::Deg => v * PI / 180.0,
                Unit::Rad => v,
            }));
        }
    }
    if out.is_empty() {
        return Err(Error::Domain("no angles found in input".into()));
    }
    Ok(out)
}

pub fn wind_angles() -> Vec<f64> {
    WIND_DEGREES.iter().map(|d| normalize(d * PI / 180.0)).collect()
}

fn load_sample(data: &DataArgs, unit: Unit) -> std::result::Result<Sample, Failure> {
    let angles = match &data.data {
        None => wind_angles(),
        Some(src) => {
            let text = if Path::new(src).is_file() {
                std::fs::read_to_string(src).map_err(|e| Failure::usage(format!("cannot read {src}: {e}")))?
            } else {
                src.clone()
            };
            parse_angles(&text, unit).map_err(Failure::usage)?
        }
    };
    Sample::new(angles).map_err(Failure::usage)
}

fn params(a: &EcArgs) -> std::result::Result<EcParams, Failure> {
    EcParams::new(a.beta, a.rho, a.mu).map_err(Failure::usage)
}

fn points(p: &PointsArgs, unit: Unit) -> std::result::Result<Vec<f64>, Failure> {
    match &p.at {
        Some(text) => parse_angles(text, unit).map_err(Failure::usage),
        None if p.grid == 0 => Err(Failure::usage("--grid must be positive")),
        None => Ok((1..=p.grid).map(|k| TAU * k as f64 / p.grid as f64).collect()),
    }
}

fn check_tol(tol: f64) -> std::result::Result<(), Failure> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Failure::usage(format!("--tol must be positive, got {tol}")))
    }
}

fn emit<T: Serialize>(command: &str, result: T) -> String {
    to_json(&Envelope { schema: SCHEMA, command, result }) + "\n"
}

#[derive(Serialize)]
struct Curve {
    params: EcParams,
    theta: Vec<f64>,
    value: Vec<f64>,
}

fn curve_csv(c: &Curve, name: &str) -> String {
    let mut out = format!("theta,{name}\n");
    for (t, v) in c.theta.iter().zip(&c.value) {
        let _ = writeln!(out, "{},{}", sig17(*t), sig17(*v));
    }
    out
}

#[derive(Serialize)]
struct QuantileOut {
    params: EcParams,
    alpha: f64,
    method: &'static str,
    theta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    approximation: Option<ApproxQuantile>,
}

#[derive(Serialize)]
struct MomentsOut {
    params: EcParams,
    method: &'static str,
    moments: Vec<TrigMoment>,
}

#[derive(Serialize)]
struct FitOut {
    n: usize,
    fit: FitResult,
}

#[derive(Serialize)]
struct WindRow {
    model: Model,
    fit: FitResult,
    kuiper: f64,
    watson: f64,
}

#[derive(Serialize)]
struct WindReport {
    n: usize,
    rows: Vec<WindRow>,
    lrt: LrtReport,
}

const TABLE_BETAS: [f64; 6] = [0.3, 0.6, 1.0, 2.0, 4.0, 10.0];
const TABLE_RHOS: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];
const TABLE_MUS: [f64; 6] = [PI / 6.0, PI / 3.0, 2.0 * PI / 3.0, PI, 4.0 * PI / 3.0, TAU];

fn opt_num(v: Option<f64>) -> String {
    v.map(sig17).unwrap_or_else(|| "NA".into())
}

fn dispatch(cli: &Cli) -> CmdResult {
    let g = &cli.global;
    check_tol(g.tol)?;
    let exec = if g.sequential { Execution::Sequential } else { Execution::Parallel };
    let opts = FitOptions { seed: g.seed, tol: g.tol, exec, ..FitOptions::default() };
    let csv = g.format == Format::Csv;
    match &cli.command {
        Command::Density { ec, points: pts } => {
            let p = params(ec)?;
            let theta = points(pts, g.unit)?;
            let value = theta.iter().map(|&t| p.pdf(t)).collect();
            let c = Curve { params: p, theta, value };
            Ok(if csv { curve_csv(&c, "density") } else { emit("density", c) })
        }
        Command::Cdf { ec, points: pts, series } => {
            let p = params(ec)?;
            let theta = points(pts, g.unit)?;
            let value = if *series {
                let trunc = SeriesTruncation::new(g.max_k, MOMENT_TOL).map_err(Failure::usage)?;
                theta.iter().map(|&t| crate::moments::cdf_series(t, &p, trunc)).collect::<Result<Vec<_>>>()?
            } else {
                theta.iter().map(|&t| p.cdf(t)).collect()
            };
            let c = Curve { params: p, theta, value };
            Ok(if csv { curve_csv(&c, "cdf") } else { emit("cdf", c) })
        }
        Command::Quantile { ec, alpha, exact: _, approx } => {
            let p = params(ec)?;
            if !(0.0..=1.0).contains(alpha) {
                return Err(Failure::usage(format!("--alpha must lie in [0, 1], got {alpha}")));
            }
            let out = if *approx {
                let a = p.quantile_approx(*alpha)?;
                QuantileOut { params: p, alpha: *alpha, method: "approx", theta: a.theta, approximation: Some(a) }
            } else {
                let theta = p.quantile_exact(*alpha, g.tol)?;
                QuantileOut { params: p, alpha: *alpha, method: "exact", theta, approximation: None }
            };
            Ok(if csv {
                format!("alpha,method,theta\n{},{},{}\n", sig17(out.alpha), out.method, sig17(out.theta))
            } else {
                emit("quantile", out)
            })
        }
        Command::Sample { ec, n } => {
            let p = params(ec)?;
            if *n == 0 {
                return Err(Failure::usage("--n must be positive"));
            }
            let draws = p.sample_with(*n, g.seed, exec);
            Ok(if csv {
                let mut out = String::from("theta\n");
                for t in &draws {
                    let _ = writeln!(out, "{}", sig17(*t));
                }
                out
            } else {
                #[derive(Serialize)]
                struct SampleOut {
                    params: EcParams,
                    seed: u64,
                    angles: Vec<f64>,
                }
                emit("sample", SampleOut { params: p, seed: g.seed, angles: draws })
            })
        }
        Command::Moments { ec, series } => {
            let p = params(ec)?;
            let (method, moments) = if *series {
                let trunc = SeriesTruncation::new(g.max_k, MOMENT_TOL).map_err(Failure::usage)?;
                ("series", vec![trig_moment_series(&p, 1, trunc)?, trig_moment_series(&p, 2, trunc)?])
            } else {
                ("quadrature", vec![trig_moment(&p, 1)?, trig_moment(&p, 2)?])
            };
            Ok(if csv {
                let mut out = String::from("order,alpha,beta\n");
                for m in &moments {
                    let _ = writeln!(out, "{},{},{}", m.order, sig17(m.alpha), sig17(m.beta));
                }
                out
            } else {
                emit("moments", MomentsOut { params: p, method, moments })
            })
        }
        Command::Measures { ec } => {
            let p = params(ec)?;
            let m = circular_measures(&p)?;
            Ok(if csv {
                format!(
                    "mean_resultant_length,variance,std_dev,dispersion,skewness,kurtosis\n{},{},{},{},{},{}\n",
                    sig17(m.mean_resultant_length),
                    sig17(m.variance),
                    opt_num(m.std_dev),
                    opt_num(m.dispersion),
                    opt_num(m.skewness),
                    opt_num(m.kurtosis)
                )
            } else {
                emit("measures", m)
            })
        }
        Command::Modality { ec, grid_n, merge_tol } => {
            let p = params(ec)?;
            if *grid_n < 1024 {
                return Err(Failure::usage(format!("--grid-n must be at least 1024, got {grid_n}")));
            }
            let report = classify_modality(&p, *grid_n, *merge_tol)?;
            Ok(if csv {
                let cell = ModalityCell { beta: p.beta, rho: p.rho, mu: p.mu, report: Some(report), error: None };
                modality_csv(&[cell])
            } else {
                emit("modality", report)
            })
        }
        Command::ModalityTable { betas, rhos, mus, grid_n } => {
            let betas = betas.clone().unwrap_or(TABLE_BETAS.to_vec());
            let rhos = rhos.clone().unwrap_or(TABLE_RHOS.to_vec());
            let mus = mus.clone().unwrap_or(TABLE_MUS.to_vec());
            if *grid_n < 1024 {
                return Err(Failure::usage(format!("--grid-n must be at least 1024, got {grid_n}")));
            }
            for &b in &betas {
                for &r in &rhos {
                    for &m in &mus {
                        EcParams::new(b, r, m).map_err(Failure::usage)?;
                    }
                }
            }
            let cells = modality_table(&betas, &rhos, &mus, *grid_n, DEFAULT_MERGE_TOL, exec)?;
            Ok(if csv { modality_csv(&cells) } else { emit("modality-table", cells) })
        }
        Command::Fit { data, model, method } => {
            let s = load_sample(data, g.unit)?;
            let fit = match (model, method) {
                (ModelArg::Ec, MethodArg::Mle) => fit_ec_mle_with(&s, &opts)?,
                (ModelArg::Ec, MethodArg::Qlse) => fit_ec_qlse_with(&s, &opts)?,
                (ModelArg::Cardioid, MethodArg::Mle) => fit_cardioid_mle_with(&s, &opts)?,
                (ModelArg::Vonmises, MethodArg::Mle) => fit_vonmises_mle(&s)?,
                (_, MethodArg::Qlse) => {
                    return Err(Failure::usage("least-squares fitting is only available for the EC model"))
                }
            };
            Ok(if csv {
                let mut out = String::from("param,estimate,se\n");
                for (name, v) in &fit.params.0 {
                    let _ = writeln!(out, "{name},{},{}", sig17(*v), opt_num(fit.se_of(name)));
                }
                out
            } else {
                emit("fit", FitOut { n: s.n(), fit })
            })
        }
        Command::Gof { data } => {
            let s = load_sample(data, g.unit)?;
            let rows = gof_compare(&s, &opts)?;
            Ok(if csv { gof_csv(&rows) } else { emit("gof", rows) })
        }
        Command::Lrt { data } => {
            let s = load_sample(data, g.unit)?;
            let r = lrt_c_vs_ec_with(&s, &opts)?;
            Ok(if csv {
                format!(
                    "statistic,df,p_value,loglik_ec,loglik_cardioid\n{},{},{},{},{}\n",
                    sig17(r.statistic),
                    r.df,
                    sig17(r.p_value),
                    sig17(r.loglik_ec),
                    sig17(r.loglik_cardioid)
                )
            } else {
                emit("lrt", r)
            })
        }
        Command::Simulate { ec, n, methods } => {
            let p = params(ec)?;
            let methods = methods
                .iter()
                .map(|m| match m {
                    MethodArg::Mle => Method::Mle,
                    MethodArg::Qlse => Method::Qlse,
                })
                .collect();
            let cfg = SimConfig::new(p, *n, g.reps, g.seed, methods).map_err(Failure::usage)?.with_exec(exec);
            let report = run_mc_study(&cfg)?;
            Ok(if csv { sim_csv(&[report]) } else { emit("simulate", report) })
        }
        Command::CompareSystems { ec, n } => {
            let p = params(ec)?;
            let cfg = SimConfig::new(p, *n, g.reps, g.seed, vec![Method::Mle]).map_err(Failure::usage)?.with_exec(exec);
            let cmp = compare_estimation_systems(&cfg)?;
            Ok(if csv {
                let mut out = String::from(SIM_CSV_HEADER);
                out.push('\n');
                sim_csv_rows(&mut out, &cmp.truth, cmp.n, &[&cmp.profiled, &cmp.full]);
                out
            } else {
                emit("compare-systems", cmp)
            })
        }
        Command::SkewkurtMap { betas, rhos, mus } => {
            let betas = betas.clone().unwrap_or(TABLE_BETAS.to_vec());
            let rhos = rhos.clone().unwrap_or_else(|| (1..=10).map(|k| 0.05 * k as f64).collect());
            let mus = mus.clone().unwrap_or_else(|| (1..=24).map(|k| TAU * k as f64 / 24.0).collect());
            for &b in &betas {
                for &r in &rhos {
                    for &m in &mus {
                        EcParams::new(b, r, m).map_err(Failure::usage)?;
                    }
                }
            }
            let rows = skew_kurt_grid(&betas, &rhos, &mus, exec)?;
            Ok(if csv { skew_kurt_csv(&rows) } else { emit("skewkurt-map", rows) })
        }
        Command::WindDemo => {
            let s = Sample::new(wind_angles()).map_err(Failure::usage)?;
            let rows = gof_compare(&s, &opts)?;
            let find = |m: Model| rows.iter().find(|r| r.model == m).expect("every model has a row");
            let fit_of =
                |r: &GofRow| r.fit.clone().ok_or_else(|| Error::FitFailed(r.error.clone().unwrap_or_default()));
            let lrt = lrt_from_fits(&s, &fit_of(find(Model::Ec))?, &fit_of(find(Model::Cardioid))?)?;
            if csv {
                return Ok(gof_csv(&rows));
            }
            let mut out = Vec::new();
            for r in &rows {
                let (Some(k), Some(w)) = (r.kuiper, r.watson) else {
                    return Err(Error::FitFailed(r.error.clone().unwrap_or_default()).into());
                };
                out.push(WindRow { model: r.model, fit: fit_of(r)?, kuiper: k, watson: w });
            }
            Ok(emit("wind-demo", WindReport { n: s.n(), rows: out, lrt }))
        }
    }
}
