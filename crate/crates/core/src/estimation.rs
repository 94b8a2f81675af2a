//! Parameter estimation: profile-likelihood MLE and quantile least squares
//! for EC, plus Cardioid and von Mises baselines.
//!
//! μ is searched over the box [−π, 3π] so an optimum near the 0/2π seam is
//! interior to the box, then wrapped onto (0, 2π].

use std::f64::consts::{FRAC_1_PI, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;
use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::ec::{cardioid_base, normalize, EcParams};
use crate::error::{Error, Result};
use crate::numerics::{bessel_i0, bessel_i1, find_root, minimize, Interval, OptimResult};
use crate::par::{self, Execution};

pub const MU_BOX: (f64, f64) = (-PI, 3.0 * PI);
pub const BETA_BOX: (f64, f64) = (1e-2, 1e2);
pub const KAPPA_MAX: f64 = 500.0;

/// Observed angles, each mapped onto (0, 2π].
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    angles: Vec<f64>,
}

impl Sample {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.len() < 2 {
            return Err(Error::Domain(format!("a sample needs at least 2 angles, got {}", angles.len())));
        }
        if let Some(bad) = angles.iter().find(|a| !a.is_finite()) {
            return Err(Error::Domain(format!("angle {bad} is not finite")));
        }
        Ok(Self { angles: angles.into_iter().map(normalize).collect() })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn n(&self) -> usize {
        self.angles.len()
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.angles.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    fn require(&self, min: usize) -> Result<()> {
        if self.n() < min {
            return Err(Error::Domain(format!("this fit needs n >= {min}, got {}", self.n())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Model {
    #[serde(rename = "EC")]
    Ec,
    Cardioid,
    VonMises,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    Mle,
    Qlse,
}

/// Named values that serialize as an ordered JSON object.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamMap(pub Vec<(&'static str, f64)>);

impl ParamMap {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.iter().find(|(k, _)| *k == name).map(|&(_, v)| v)
    }

    pub fn values(&self) -> Vec<f64> {
        self.0.iter().map(|&(_, v)| v).collect()
    }

    fn from_names(names: &[&'static str], values: &[f64]) -> Self {
        Self(names.iter().copied().zip(values.iter().copied()).collect())
    }
}

impl Serialize for ParamMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FitResult {
    pub model: Model,
    pub method: Method,
    pub params: ParamMap,
    pub se: Option<ParamMap>,
    pub loglik: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Value of the minimized objective at the estimate.
    pub objective: f64,
    /// Gradient of the estimating objective at the estimate.
    pub residuals: ParamMap,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl FitResult {
    pub fn param(&self, name: &str) -> f64 {
        self.params.get(name).unwrap_or(f64::NAN)
    }

    pub fn se_of(&self, name: &str) -> Option<f64> {
        self.se.as_ref().and_then(|s| s.get(name))
    }

    /// The fitted law as EC parameters (Cardioid fits map to β = 1).
    pub fn ec_params(&self) -> Option<EcParams> {
        match self.model {
            Model::Ec => EcParams::new(self.param("beta"), self.param("rho"), self.param("mu")).ok(),
            Model::Cardioid => EcParams::new(1.0, self.param("rho"), self.param("mu")).ok(),
            Model::VonMises => None,
        }
    }
}

const EC_NAMES: [&str; 3] = ["beta", "rho", "mu"];
const CARDIOID_NAMES: [&str; 2] = ["rho", "mu"];
const VONMISES_NAMES: [&str; 2] = ["kappa", "mu"];

fn perturb(theta: f64, rho: f64, mu: f64) -> f64 {
    1.0 + 2.0 * rho * (theta - mu).cos()
}

/// EC log-likelihood for any real μ (the law is 2π-periodic in μ).
fn ec_loglik_raw(angles: &[f64], beta: f64, rho: f64, mu: f64) -> f64 {
    let n = angles.len() as f64;
    let mut sum_base = 0.0;
    let mut sum_perturb = 0.0;
    for &t in angles {
        let q = perturb(t, rho, mu);
        if q <= 0.0 {
            return f64::NEG_INFINITY;
        }
        sum_perturb += q.ln();
        if beta != 1.0 {
            let b = cardioid_base(t, rho, mu);
            if b <= 0.0 {
                return f64::NEG_INFINITY;
            }
            sum_base += b.ln();
        }
    }
    n * beta.ln() + (beta - 1.0) * sum_base - n * TAU.ln() + sum_perturb
}

pub fn ec_loglik(s: &Sample, p: &EcParams) -> f64 {
    ec_loglik_raw(&s.angles, p.beta, p.rho, p.mu)
}

fn sum_log_base(angles: &[f64], rho: f64, mu: f64) -> Result<f64> {
    let mut acc = 0.0;
    for &t in angles {
        let b = cardioid_base(t, rho, mu);
        if !(b > 0.0) {
            return Err(Error::ProfileUndefined { rho, mu });
        }
        acc += b.ln();
    }
    if !(acc < 0.0) {
        return Err(Error::ProfileUndefined { rho, mu });
    }
    Ok(acc)
}

/// β̂(ρ, μ) = −n / Σ log F_C(θ_i), the root of ∂l/∂β = 0 at fixed (ρ, μ).
pub fn profile_beta(s: &Sample, rho: f64, mu: f64) -> Result<f64> {
    Ok(-(s.n() as f64) / sum_log_base(&s.angles, rho, mu)?)
}

fn neg_profile_loglik(angles: &[f64], rho: f64, mu: f64) -> f64 {
    match sum_log_base(angles, rho, mu) {
        Ok(sum) => -ec_loglik_raw(angles, -(angles.len() as f64) / sum, rho, mu),
        Err(_) => f64::INFINITY,
    }
}

/// Profiled log-likelihood l(β̂(ρ, μ), ρ, μ); `-inf` where the profile is
/// undefined.
pub fn profile_loglik(s: &Sample, rho: f64, mu: f64) -> f64 {
    -neg_profile_loglik(&s.angles, rho, mu)
}

/// Gradient of the EC log-likelihood with respect to (β, ρ, μ).
pub fn score(s: &Sample, p: &EcParams) -> [f64; 3] {
    let (beta, rho, mu) = (p.beta, p.rho, p.mu);
    let n = s.n() as f64;
    let (mut g_beta, mut g_rho, mut g_mu) = (n / beta, 0.0, 0.0);
    for &t in &s.angles {
        let d = t - mu;
        let b = cardioid_base(t, rho, mu);
        let q = perturb(t, rho, mu);
        g_beta += b.ln();
        g_rho += (beta - 1.0) * (d.sin() + mu.sin()) * FRAC_1_PI / b + 2.0 * d.cos() / q;
        g_mu += (beta - 1.0) * rho * FRAC_1_PI * (mu.cos() - d.cos()) / b + 2.0 * rho * d.sin() / q;
    }
    [g_beta, g_rho, g_mu]
}

/// q(δ) = Σ (i/n − F(θ_{i:n}))² over the sorted sample.
pub fn qlse_goal(sorted: &[f64], p: &EcParams) -> f64 {
    qlse_goal_raw(sorted, p.beta, p.rho, p.mu)
}

fn qlse_goal_raw(sorted: &[f64], beta: f64, rho: f64, mu: f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let r = (i + 1) as f64 / n - cardioid_base(t, rho, mu).powf(beta);
            r * r
        })
        .sum()
}

/// ∂F/∂(β, ρ, μ) at θ.
fn cdf_jacobian(t: f64, beta: f64, rho: f64, mu: f64) -> [f64; 3] {
    let b = cardioid_base(t, rho, mu);
    if b <= 0.0 {
        return [0.0; 3];
    }
    let f = b.powf(beta);
    let lead = beta * f / b;
    [f * b.ln(), lead * ((t - mu).sin() + mu.sin()) * FRAC_1_PI, lead * rho * FRAC_1_PI * (mu.cos() - (t - mu).cos())]
}

/// Gradient of q with respect to (β, ρ, μ).
pub fn qlse_gradient(sorted: &[f64], p: &EcParams) -> [f64; 3] {
    qlse_gradient_raw(sorted, p.beta, p.rho, p.mu)
}

fn qlse_gradient_raw(sorted: &[f64], beta: f64, rho: f64, mu: f64) -> [f64; 3] {
    let n = sorted.len() as f64;
    let mut g = [0.0; 3];
    for (i, &t) in sorted.iter().enumerate() {
        let r = (i + 1) as f64 / n - cardioid_base(t, rho, mu).powf(beta);
        let j = cdf_jacobian(t, beta, rho, mu);
        for k in 0..3 {
            g[k] -= 2.0 * r * j[k];
        }
    }
    g
}

pub fn cardioid_loglik(s: &Sample, rho: f64, mu: f64) -> f64 {
    ec_loglik_raw(&s.angles, 1.0, rho, mu)
}

pub fn vonmises_loglik(s: &Sample, kappa: f64, mu: f64) -> f64 {
    let n = s.n() as f64;
    let c: f64 = s.angles.iter().map(|&t| (t - mu).cos()).sum();
    kappa * c - n * (TAU * bessel_i0(kappa)).ln()
}

/// Search settings shared by the numerical fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub starts: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
    pub exec: Execution,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { starts: 12, seed: 0, tol: 1e-10, max_iter: 5000, exec: Execution::Sequential }
    }
}

/// The default start lattice ρ ∈ {0.1, 0.25, 0.4} × μ ∈ {π/4, 3π/4, 5π/4, 7π/4},
/// extended with seeded uniform draws when more starts are requested.
pub fn start_points(starts: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> =
        [0.1, 0.25, 0.4].iter().flat_map(|&r| [1.0, 3.0, 5.0, 7.0].map(|k| (r, k * PI / 4.0))).collect();
    pts.truncate(starts.max(1));
    let mut rng = Pcg64::seed_from_u64(seed);
    while pts.len() < starts {
        pts.push((rng.random_range(0.0..0.5), rng.random_range(0.0..TAU)));
    }
    pts
}

fn best_of(results: Vec<Result<OptimResult>>) -> Result<(OptimResult, usize)> {
    let iterations = results.iter().flatten().map(|r| r.iterations).sum();
    let mut best: Option<OptimResult> = None;
    let mut last_err = None;
    for r in results {
        match r {
            // strict comparison keeps the earliest start on ties
            Ok(r) if r.value.is_finite() && best.as_ref().is_none_or(|b| r.value < b.value) => best = Some(r),
            Ok(_) => {}
            Err(e) => last_err = Some(e),
        }
    }
    match best {
        Some(b) => Ok((b, iterations)),
        None => Err(last_err.unwrap_or_else(|| Error::FitFailed("no start reached a finite objective".into()))),
    }
}

fn box_bounds(lo_hi: &[(f64, f64)]) -> Result<Vec<Interval>> {
    lo_hi.iter().map(|&(lo, hi)| Interval::new(lo, hi)).collect()
}

fn clamp_mu_start(mu: f64) -> f64 {
    mu.clamp(MU_BOX.0, MU_BOX.1)
}

/// Central-difference Hessian with per-coordinate step max(1e-5, 1e-5·|x|).
/// Near a bound the whole stencil is shifted inward by one step.
fn hessian(f: &dyn Fn(&[f64]) -> f64, x: &[f64], bounds: &[(f64, f64)]) -> Vec<Vec<f64>> {
    let d = x.len();
    let h: Vec<f64> = x.iter().map(|v| (1e-5 * v.abs()).max(1e-5)).collect();
    let c: Vec<f64> = (0..d)
        .map(|k| {
            let (lo, hi) = bounds[k];
            if x[k] + h[k] > hi {
                x[k] - h[k]
            } else if x[k] - h[k] < lo {
                x[k] + h[k]
            } else {
                x[k]
            }
        })
        .collect();
    let eval = |di: &[(usize, f64)]| {
        let mut y = c.clone();
        for &(k, s) in di {
            y[k] += s * h[k];
        }
        f(&y)
    };
    let f0 = f(&c);
    let mut m = vec![vec![0.0; d]; d];
    for i in 0..d {
        m[i][i] = (eval(&[(i, 1.0)]) - 2.0 * f0 + eval(&[(i, -1.0)])) / (h[i] * h[i]);
        for j in 0..i {
            let v = (eval(&[(i, 1.0), (j, 1.0)]) - eval(&[(i, 1.0), (j, -1.0)]) - eval(&[(i, -1.0), (j, 1.0)])
                + eval(&[(i, -1.0), (j, -1.0)]))
                / (4.0 * h[i] * h[j]);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    m
}

/// Inverse of a symmetric positive-definite matrix through its Cholesky
/// factor; `None` when the matrix is not positive definite.
fn spd_inverse(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let d = a.len();
    let mut l = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let s: f64 = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if !(s > 0.0) || !s.is_finite() {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut inv = vec![vec![0.0; d]; d];
    for col in 0..d {
        // solve L y = e_col, then Lᵀ x = y
        let mut y = vec![0.0; d];
        for i in 0..d {
            let e = if i == col { 1.0 } else { 0.0 };
            y[i] = (e - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>()) / l[i][i];
        }
        for i in (0..d).rev() {
            inv[i][col] = (y[i] - (i + 1..d).map(|k| l[k][i] * inv[k][col]).sum::<f64>()) / l[i][i];
        }
    }
    Some(inv)
}

fn observed_info_se(negll: &dyn Fn(&[f64]) -> f64, x: &[f64], bounds: &[(f64, f64)]) -> Result<Vec<f64>> {
    let h = hessian(negll, x, bounds);
    let inv = spd_inverse(&h).ok_or(Error::NotPositiveDefinite)?;
    Ok((0..x.len()).map(|i| inv[i][i].sqrt()).collect())
}

const EC_SE_BOUNDS: [(f64, f64); 3] = [(0.0, f64::INFINITY), (0.0, 0.5), (f64::NEG_INFINITY, f64::INFINITY)];

/// Standard errors of (β, ρ, μ) from the inverse observed information.
pub fn standard_errors(s: &Sample, p: &EcParams) -> Result<[f64; 3]> {
    let f = |x: &[f64]| -ec_loglik_raw(&s.angles, x[0], x[1], x[2]);
    let se = observed_info_se(&f, &[p.beta, p.rho, p.mu], &EC_SE_BOUNDS)?;
    Ok([se[0], se[1], se[2]])
}

fn split_se(r: Result<Vec<f64>>, names: &[&'static str]) -> (Option<ParamMap>, Option<String>) {
    match r {
        Ok(se) if se.iter().all(|v| v.is_finite()) => (Some(ParamMap::from_names(names, &se)), None),
        Ok(_) => (None, Some("standard errors are not finite".into())),
        Err(e) => (None, Some(format!("standard errors unavailable: {e}"))),
    }
}

/// Profile-likelihood MLE with the default start lattice.
pub fn fit_ec_mle(s: &Sample, starts: usize, seed: u64) -> Result<FitResult> {
    fit_ec_mle_with(s, &FitOptions { starts, seed, ..FitOptions::default() })
}

/// Maximizes l(β̂(ρ, μ), ρ, μ) over (ρ, μ) and sets β = β̂(ρ̂, μ̂).
pub fn fit_ec_mle_with(s: &Sample, opts: &FitOptions) -> Result<FitResult> {
    s.require(3)?;
    let bounds = box_bounds(&[(0.0, 0.5), MU_BOX])?;
    let starts = start_points(opts.starts, opts.seed);
    let runs = par::map_slice(&starts, opts.exec, |&(r0, m0)| {
        let f = |x: &[f64]| neg_profile_loglik(&s.angles, x[0], x[1]);
        minimize(f, &[r0, clamp_mu_start(m0)], &bounds, opts.tol, opts.max_iter)
    });
    let (best, iterations) = best_of(runs)?;
    let (rho, mu_raw) = (best.argmin[0], best.argmin[1]);
    let beta = profile_beta(s, rho, mu_raw)?;
    let p = EcParams::with_wrapped_mu(beta, rho, mu_raw)?;
    ec_mle_result(s, p, best.converged, iterations, best.value)
}

fn ec_mle_result(s: &Sample, p: EcParams, converged: bool, iterations: usize, objective: f64) -> Result<FitResult> {
    let (se, diagnostic) = split_se(standard_errors(s, &p).map(|v| v.to_vec()), &EC_NAMES);
    Ok(FitResult {
        model: Model::Ec,
        method: Method::Mle,
        params: ParamMap::from_names(&EC_NAMES, &[p.beta, p.rho, p.mu]),
        se,
        loglik: ec_loglik(s, &p),
        converged,
        iterations,
        objective,
        residuals: ParamMap::from_names(&EC_NAMES, &score(s, &p)),
        diagnostic,
    })
}

/// MLE over all three coordinates at once, without profiling β out. Each
/// lattice start begins at β = 1.
pub fn fit_ec_mle_full(s: &Sample, opts: &FitOptions) -> Result<FitResult> {
    s.require(3)?;
    let bounds = box_bounds(&[(BETA_BOX.0.ln(), BETA_BOX.1.ln()), (0.0, 0.5), MU_BOX])?;
    let starts = start_points(opts.starts, opts.seed);
    let runs = par::map_slice(&starts, opts.exec, |&(r0, m0)| {
        let f = |x: &[f64]| -ec_loglik_raw(&s.angles, x[0].exp(), x[1], x[2]);
        minimize(f, &[0.0, r0, clamp_mu_start(m0)], &bounds, opts.tol, opts.max_iter)
    });
    let (best, iterations) = best_of(runs)?;
    let p = EcParams::with_wrapped_mu(best.argmin[0].exp(), best.argmin[1], best.argmin[2])?;
    ec_mle_result(s, p, best.converged, iterations, best.value)
}

/// Quantile least squares with default options.
pub fn fit_ec_qlse(s: &Sample) -> Result<FitResult> {
    fit_ec_qlse_with(s, &FitOptions::default())
}

/// Minimizes q(δ) over (log β, ρ, μ) from the start lattice, with β started
/// at the profile value, then polishes with damped Gauss–Newton steps.
pub fn fit_ec_qlse_with(s: &Sample, opts: &FitOptions) -> Result<FitResult> {
    s.require(3)?;
    let sorted = s.sorted();
    let bounds = box_bounds(&[(BETA_BOX.0.ln(), BETA_BOX.1.ln()), (0.0, 0.5), MU_BOX])?;
    let starts = start_points(opts.starts, opts.seed);
    let runs = par::map_slice(&starts, opts.exec, |&(r0, m0)| {
        let b0 = profile_beta(s, r0, m0).unwrap_or(1.0).clamp(BETA_BOX.0 * 1.01, BETA_BOX.1 / 1.01);
        let f = |x: &[f64]| qlse_goal_raw(&sorted, x[0].exp(), x[1], x[2]);
        minimize(f, &[b0.ln(), r0, clamp_mu_start(m0)], &bounds, opts.tol, opts.max_iter)
    });
    let (best, iterations) = best_of(runs)?;
    let x = [best.argmin[0].exp(), best.argmin[1], best.argmin[2]];
    let (x, objective) = gauss_newton_polish(&sorted, x, best.value);
    let p = EcParams::with_wrapped_mu(x[0], x[1], x[2])?;
    let (se, diagnostic) = split_se(qlse_standard_errors(&sorted, &p), &EC_NAMES);
    Ok(FitResult {
        model: Model::Ec,
        method: Method::Qlse,
        params: ParamMap::from_names(&EC_NAMES, &[p.beta, p.rho, p.mu]),
        se,
        loglik: ec_loglik(s, &p),
        converged: best.converged,
        iterations,
        objective,
        residuals: ParamMap::from_names(&EC_NAMES, &qlse_gradient(&sorted, &p)),
        diagnostic,
    })
}

fn in_qlse_domain(x: &[f64; 3]) -> bool {
    x[0] >= BETA_BOX.0 && x[0] <= BETA_BOX.1 && (0.0..=0.5).contains(&x[1])
}

fn gauss_newton_polish(sorted: &[f64], mut x: [f64; 3], mut q: f64) -> ([f64; 3], f64) {
    let n = sorted.len() as f64;
    let mut lambda = 1e-6;
    for _ in 0..50 {
        let mut jtj = vec![vec![0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for (i, &t) in sorted.iter().enumerate() {
            let r = (i + 1) as f64 / n - cardioid_base(t, x[1], x[2]).powf(x[0]);
            let j = cdf_jacobian(t, x[0], x[1], x[2]);
            for a in 0..3 {
                jtr[a] += j[a] * r;
                for b in 0..3 {
                    jtj[a][b] += j[a] * j[b];
                }
            }
        }
        let mut improved = false;
        while lambda < 1e6 {
            let mut damped = jtj.clone();
            for a in 0..3 {
                damped[a][a] *= 1.0 + lambda;
            }
            let Some(inv) = spd_inverse(&damped) else { break };
            let step: Vec<f64> = (0..3).map(|a| (0..3).map(|b| inv[a][b] * jtr[b]).sum()).collect();
            let cand = [x[0] + step[0], x[1] + step[1], x[2] + step[2]];
            let qc =
                if in_qlse_domain(&cand) { qlse_goal_raw(sorted, cand[0], cand[1], cand[2]) } else { f64::INFINITY };
            if qc < q {
                let rel = (q - qc) / q.max(f64::MIN_POSITIVE);
                x = cand;
                q = qc;
                lambda = (lambda * 0.1).max(1e-12);
                improved = rel > 1e-15;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (x, q)
}

/// Sandwich covariance (JᵀJ)⁻¹ JᵀΣJ (JᵀJ)⁻¹ for the QLSE, where J holds
/// ∂F(θ_{i:n})/∂δ and Σ_ij = min(p_i, p_j)(1 − max(p_i, p_j))/n is the
/// covariance of the empirical cdf at the order statistics.
pub fn qlse_standard_errors(sorted: &[f64], p: &EcParams) -> Result<Vec<f64>> {
    let n = sorted.len();
    let jac: Vec<[f64; 3]> = sorted.iter().map(|&t| cdf_jacobian(t, p.beta, p.rho, p.mu)).collect();
    let prob: Vec<f64> = sorted.iter().map(|&t| p.cdf(t)).collect();
    let mut jtj = vec![vec![0.0; 3]; 3];
    for j in &jac {
        for a in 0..3 {
            for b in 0..3 {
                jtj[a][b] += j[a] * j[b];
            }
        }
    }
    // JᵀΣJ in O(n): with p sorted, Σ_ij = p_min(i,j)(1 − p_max(i,j)) / n
    let mut meat = vec![vec![0.0; 3]; 3];
    let mut prefix = [0.0; 3];
    for k in 0..n {
        for a in 0..3 {
            prefix[a] += prob[k] * jac[k][a];
        }
        let w = 1.0 - prob[k];
        for a in 0..3 {
            for b in 0..3 {
                meat[a][b] += w * (jac[k][b] * prefix[a] + jac[k][a] * prefix[b]) - prob[k] * w * jac[k][a] * jac[k][b];
            }
        }
    }
    for row in meat.iter_mut() {
        for v in row.iter_mut() {
            *v /= n as f64;
        }
    }
    let bread = spd_inverse(&jtj).ok_or(Error::NotPositiveDefinite)?;
    let mut cov = vec![vec![0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            cov[a][b] = (0..3)
                .flat_map(|c| (0..3).map(move |d| (c, d)))
                .map(|(c, d)| bread[a][c] * meat[c][d] * bread[d][b])
                .sum();
        }
    }
    if (0..3).any(|a| !(cov[a][a] >= 0.0)) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok((0..3).map(|a| cov[a][a].sqrt()).collect())
}

const CARDIOID_SE_BOUNDS: [(f64, f64); 2] = [(0.0, 0.5), (f64::NEG_INFINITY, f64::INFINITY)];

pub fn fit_cardioid_mle(s: &Sample) -> Result<FitResult> {
    fit_cardioid_mle_with(s, &FitOptions::default())
}

pub fn fit_cardioid_mle_with(s: &Sample, opts: &FitOptions) -> Result<FitResult> {
    s.require(2)?;
    let bounds = box_bounds(&[(0.0, 0.5), MU_BOX])?;
    let starts = start_points(opts.starts, opts.seed);
    let runs = par::map_slice(&starts, opts.exec, |&(r0, m0)| {
        let f = |x: &[f64]| -ec_loglik_raw(&s.angles, 1.0, x[0], x[1]);
        minimize(f, &[r0, clamp_mu_start(m0)], &bounds, opts.tol, opts.max_iter)
    });
    let (best, iterations) = best_of(runs)?;
    let rho = best.argmin[0];
    let mu = normalize(best.argmin[1]);
    let f = |x: &[f64]| -ec_loglik_raw(&s.angles, 1.0, x[0], x[1]);
    let (se, diagnostic) = split_se(observed_info_se(&f, &[rho, mu], &CARDIOID_SE_BOUNDS), &CARDIOID_NAMES);
    let p = EcParams::new(1.0, rho, mu)?;
    let g = score(s, &p);
    Ok(FitResult {
        model: Model::Cardioid,
        method: Method::Mle,
        params: ParamMap::from_names(&CARDIOID_NAMES, &[rho, mu]),
        se,
        loglik: cardioid_loglik(s, rho, mu),
        converged: best.converged,
        iterations,
        objective: best.value,
        residuals: ParamMap::from_names(&CARDIOID_NAMES, &[g[1], g[2]]),
        diagnostic,
    })
}

/// A(κ) = I1(κ)/I0(κ).
pub fn bessel_ratio(kappa: f64) -> f64 {
    if kappa == 0.0 {
        0.0
    } else {
        bessel_i1(kappa) / bessel_i0(kappa)
    }
}

const VONMISES_SE_BOUNDS: [(f64, f64); 2] = [(0.0, f64::INFINITY), (f64::NEG_INFINITY, f64::INFINITY)];

/// Closed-form direction and Bessel-ratio concentration.
pub fn fit_vonmises_mle(s: &Sample) -> Result<FitResult> {
    s.require(2)?;
    let n = s.n() as f64;
    let (ss, cs) = s.angles.iter().fold((0.0, 0.0), |(a, b), &t| (a + t.sin(), b + t.cos()));
    let r_bar = ss.hypot(cs) / n;
    let mu = normalize(ss.atan2(cs));
    let kappa = if r_bar <= 1e-15 {
        0.0
    } else {
        let g = |k: f64| bessel_ratio(k) - r_bar;
        if g(KAPPA_MAX) < 0.0 {
            return Err(Error::FitFailed(format!(
                "mean resultant length {r_bar} needs a concentration beyond {KAPPA_MAX}"
            )));
        }
        find_root(g, Interval::new(0.0, KAPPA_MAX)?, 1e-13)?
    };
    let f = |x: &[f64]| -vonmises_loglik(s, x[0], x[1]);
    let (se, diagnostic) = split_se(observed_info_se(&f, &[kappa, mu], &VONMISES_SE_BOUNDS), &VONMISES_NAMES);
    let s_mu: f64 = s.angles.iter().map(|&t| (t - mu).sin()).sum();
    Ok(FitResult {
        model: Model::VonMises,
        method: Method::Mle,
        params: ParamMap::from_names(&VONMISES_NAMES, &[kappa, mu]),
        se,
        loglik: vonmises_loglik(s, kappa, mu),
        converged: true,
        iterations: 0,
        objective: -vonmises_loglik(s, kappa, mu),
        residuals: ParamMap::from_names(&VONMISES_NAMES, &[n * (r_bar - bessel_ratio(kappa)), kappa * s_mu]),
        diagnostic,
    })
}

/// von Mises cdf on (0, 2π], integrated from 0⁺.
pub fn vonmises_cdf(theta: f64, kappa: f64, mu: f64) -> Result<f64> {
    if theta <= 0.0 {
        return Ok(0.0);
    }
    let norm = TAU * bessel_i0(kappa);
    let v = crate::numerics::integrate(
        |t| (kappa * (t - mu).cos()).exp() / norm,
        Interval::new(0.0, theta.min(TAU))?,
        1e-12,
    )?;
    Ok(v.clamp(0.0, 1.0))
}
