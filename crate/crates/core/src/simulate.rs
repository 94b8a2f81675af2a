//! Monte Carlo bias/MSE studies for the EC estimators.
//!
//! Replication `r` draws its sample from a seed mixed out of `(seed, r)`, so
//! results never depend on scheduling. Per-replication outcomes are collected
//! in index order and only then accumulated.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::ec::EcParams;
use crate::error::{Error, Result};
use crate::estimation::{fit_ec_mle_full, fit_ec_mle_with, fit_ec_qlse_with, FitOptions, FitResult, Method, Sample};
use crate::fmt::sig17;
use crate::par::{self, Execution};

/// Anything that turns a sample into an EC parameter estimate.
pub trait Estimator: Sync {
    fn label(&self) -> String;
    fn estimate(&self, s: &Sample) -> Result<EcParams>;
}

fn accept(fit: FitResult) -> Result<EcParams> {
    if !fit.converged {
        return Err(Error::FitFailed("optimizer did not converge".into()));
    }
    fit.ec_params().ok_or_else(|| Error::FitFailed("estimate outside the EC domain".into()))
}

/// Profile-likelihood MLE.
pub struct ProfileMle(pub FitOptions);

impl Estimator for ProfileMle {
    fn label(&self) -> String {
        "MLE".into()
    }
    fn estimate(&self, s: &Sample) -> Result<EcParams> {
        accept(fit_ec_mle_with(s, &self.0)?)
    }
}

/// MLE over (β, ρ, μ) jointly.
pub struct FullMle(pub FitOptions);

impl Estimator for FullMle {
    fn label(&self) -> String {
        "MLE-full".into()
    }
    fn estimate(&self, s: &Sample) -> Result<EcParams> {
        accept(fit_ec_mle_full(s, &self.0)?)
    }
}

pub struct Qlse(pub FitOptions);

impl Estimator for Qlse {
    fn label(&self) -> String {
        "QLSE".into()
    }
    fn estimate(&self, s: &Sample) -> Result<EcParams> {
        accept(fit_ec_qlse_with(s, &self.0)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub truth: EcParams,
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    #[serde(skip)]
    pub exec: Execution,
}

impl SimConfig {
    pub fn new(truth: EcParams, n: usize, replications: usize, seed: u64, methods: Vec<Method>) -> Result<Self> {
        if replications < 1 {
            return Err(Error::Domain("at least one replication is required".into()));
        }
        if n < 3 {
            return Err(Error::Domain(format!("sample size must be at least 3, got {n}")));
        }
        if methods.is_empty() {
            return Err(Error::Domain("no estimation method selected".into()));
        }
        Ok(Self { truth, n, replications, seed, methods, exec: Execution::default() })
    }

    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: String,
    pub bias: [f64; 3],
    pub mse: [f64; 3],
    pub successes: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub truth: EcParams,
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    pub methods: Vec<MethodSummary>,
}

impl SimReport {
    pub fn method(&self, label: &str) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.method == label)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn replication_seed(seed: u64, r: usize) -> u64 {
    splitmix64(splitmix64(seed) ^ r as u64)
}

pub fn replication_sample(truth: &EcParams, n: usize, seed: u64, r: usize) -> Sample {
    let angles = truth.sample_with(n, replication_seed(seed, r), Execution::Sequential);
    Sample::new(angles).expect("n >= 3 angles on the support")
}

/// Signed angular difference wrapped onto (−π, π].
pub fn wrapped_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

fn errors(est: &EcParams, truth: &EcParams) -> [f64; 3] {
    [est.beta - truth.beta, est.rho - truth.rho, wrapped_difference(est.mu, truth.mu)]
}

fn summarize(label: String, outcomes: impl Iterator<Item = Option<[f64; 3]>>) -> Result<MethodSummary> {
    let (mut sum, mut sq) = ([0.0; 3], [0.0; 3]);
    let (mut ok, mut failed) = (0usize, 0usize);
    for o in outcomes {
        match o {
            Some(e) => {
                ok += 1;
                for k in 0..3 {
                    sum[k] += e[k];
                    sq[k] += e[k] * e[k];
                }
            }
            None => failed += 1,
        }
    }
    if ok == 0 {
        return Err(Error::AllReplicationsFailed(failed));
    }
    let m = ok as f64;
    Ok(MethodSummary {
        method: label,
        bias: sum.map(|v| v / m),
        mse: sq.map(|v| v / m),
        successes: ok,
        failures: failed,
    })
}

struct RepOutcome {
    errors: Vec<Option<[f64; 3]>>,
    elapsed: Vec<Duration>,
}

fn run_replications(
    truth: &EcParams,
    n: usize,
    replications: usize,
    seed: u64,
    estimators: &[&dyn Estimator],
    exec: Execution,
) -> Vec<RepOutcome> {
    par::map_indexed(replications, exec, |r| {
        let s = replication_sample(truth, n, seed, r);
        let mut errs = Vec::with_capacity(estimators.len());
        let mut elapsed = Vec::with_capacity(estimators.len());
        for est in estimators {
            let t0 = Instant::now();
            let e = est.estimate(&s).ok().map(|p| errors(&p, truth));
            elapsed.push(t0.elapsed());
            errs.push(e);
        }
        RepOutcome { errors: errs, elapsed }
    })
}

/// Runs every estimator on the same replication samples.
pub fn run_study(
    truth: &EcParams,
    n: usize,
    replications: usize,
    seed: u64,
    estimators: &[&dyn Estimator],
    exec: Execution,
) -> Result<SimReport> {
    let reps = run_replications(truth, n, replications, seed, estimators, exec);
    let methods = estimators
        .iter()
        .enumerate()
        .map(|(k, est)| summarize(est.label(), reps.iter().map(|r| r.errors[k])))
        .collect::<Result<Vec<_>>>()?;
    Ok(SimReport { truth: *truth, n, replications, seed, methods })
}

fn inner_options() -> FitOptions {
    FitOptions { exec: Execution::Sequential, ..FitOptions::default() }
}

pub fn run_mc_study(cfg: &SimConfig) -> Result<SimReport> {
    let mle = ProfileMle(inner_options());
    let qlse = Qlse(inner_options());
    let estimators: Vec<&dyn Estimator> = cfg
        .methods
        .iter()
        .map(|m| match m {
            Method::Mle => &mle as &dyn Estimator,
            Method::Qlse => &qlse as &dyn Estimator,
        })
        .collect();
    run_study(&cfg.truth, cfg.n, cfg.replications, cfg.seed, &estimators, cfg.exec)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemsComparison {
    pub truth: EcParams,
    pub n: usize,
    pub replications: usize,
    /// β profiled out, two-dimensional search.
    pub profiled: MethodSummary,
    /// all three parameters searched jointly.
    pub full: MethodSummary,
    /// Total fitting time summed over replications.
    pub profiled_seconds: f64,
    pub full_seconds: f64,
}

/// Fits each replication sample twice by maximum likelihood: with β profiled
/// out and with the full three-parameter search.
pub fn compare_estimation_systems(cfg: &SimConfig) -> Result<SystemsComparison> {
    let profiled = ProfileMle(inner_options());
    let full = FullMle(inner_options());
    let ests: [&dyn Estimator; 2] = [&profiled, &full];
    let reps = run_replications(&cfg.truth, cfg.n, cfg.replications, cfg.seed, &ests, cfg.exec);
    let secs = |k: usize| reps.iter().map(|r| r.elapsed[k].as_secs_f64()).sum::<f64>();
    Ok(SystemsComparison {
        truth: cfg.truth,
        n: cfg.n,
        replications: cfg.replications,
        profiled: summarize(profiled.label(), reps.iter().map(|r| r.errors[0]))?,
        full: summarize(full.label(), reps.iter().map(|r| r.errors[1]))?,
        profiled_seconds: secs(0),
        full_seconds: secs(1),
    })
}

pub const SIM_CSV_HEADER: &str = "truth,method,n,bias_beta,bias_rho,bias_mu,mse_beta,mse_rho,mse_mu,failures";

fn truth_label(p: &EcParams) -> String {
    format!("{};{};{}", sig17(p.beta), sig17(p.rho), sig17(p.mu))
}

pub fn sim_csv_rows(out: &mut String, truth: &EcParams, n: usize, rows: &[&MethodSummary]) {
    for m in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            truth_label(truth),
            m.method,
            n,
            sig17(m.bias[0]),
            sig17(m.bias[1]),
            sig17(m.bias[2]),
            sig17(m.mse[0]),
            sig17(m.mse[1]),
            sig17(m.mse[2]),
            m.failures
        );
    }
}

pub fn sim_csv(reports: &[SimReport]) -> String {
    let mut out = String::from(SIM_CSV_HEADER);
    out.push('\n');
    for r in reports {
        sim_csv_rows(&mut out, &r.truth, r.n, &r.methods.iter().collect::<Vec<_>>());
    }
    out
}
