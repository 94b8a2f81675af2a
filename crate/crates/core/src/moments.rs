//! Trigonometric moments of the EC law and the descriptive measures built on
//! them.
//!
//! The primary route integrates the exact cdf against sin/cos after
//! integration by parts:
//!
//! ```text
//! α_p = cos pμ + p ∫₀^{2π} sin(p(θ−μ)) F(θ) dθ
//! β_p = −sin pμ − p ∫₀^{2π} cos(p(θ−μ)) F(θ) dθ
//! ```
//!
//! The cross-check route replaces F by its binomial series in k and
//! integrates block by block.

use std::f64::consts::{FRAC_1_PI, PI, TAU};
use std::fmt::Write as _;

use serde::Serialize;

use crate::ec::{sine_sum, EcParams};
use crate::error::{Error, Result};
use crate::fmt::sig17;
use crate::numerics::{integrate, Interval};
use crate::par::{self, Execution};

/// Quadrature tolerance for moment integrals.
pub const MOMENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesTruncation {
    pub max_k: usize,
    pub tail_tol: f64,
}

impl Default for SeriesTruncation {
    fn default() -> Self {
        Self { max_k: 40, tail_tol: 1e-12 }
    }
}

impl SeriesTruncation {
    pub fn new(max_k: usize, tail_tol: f64) -> Result<Self> {
        if max_k < 1 || !(tail_tol > 0.0) {
            return Err(Error::Domain(format!(
                "series truncation needs max_k >= 1 and tail_tol > 0, got {max_k}, {tail_tol}"
            )));
        }
        Ok(Self { max_k, tail_tol })
    }
}

/// Central trigonometric moment of order `order`: (E cos p(Θ−μ), E sin p(Θ−μ)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrigMoment {
    pub order: u32,
    /// cosine component α_p
    pub alpha: f64,
    /// sine component β_p
    pub beta: f64,
}

impl TrigMoment {
    pub fn resultant(&self) -> f64 {
        self.alpha.hypot(self.beta)
    }
}

/// Generalized binomial coefficient β(β−1)…(β−k+1)/k!.
pub fn gen_binomial(beta: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (beta - j as f64) / (j as f64 + 1.0))
}

fn binomial(k: usize, s: usize) -> f64 {
    gen_binomial(k as f64, s)
}

/// T_{k,s} = C(β,k) C(k,s) (1/2π)^{β−k} (ρ/π)^k sin(μ)^s.
pub fn t_coeff(k: usize, s: usize, p: &EcParams) -> f64 {
    assert!(s <= k, "T_(k,s) needs s <= k");
    gen_binomial(p.beta, k)
        * binomial(k, s)
        * (1.0 / TAU).powf(p.beta - k as f64)
        * (p.rho * FRAC_1_PI).powi(k as i32)
        * p.mu.sin().powi(s as i32)
}

fn check_series_domain(p: &EcParams) -> Result<()> {
    if p.rho >= 0.5 {
        return Err(Error::SeriesRefused(format!(
            "rho = {} gives only marginal convergence; use the direct cdf",
            p.rho
        )));
    }
    Ok(())
}

/// Double series for the cdf: Σ_k Σ_{s≤k} T_{k,s} θ^{β−k} sin(θ−μ)^s
/// {sin(θ−μ)^{k−2s} M₀ + sin(μ)^{k−2s} M₁}, with M₀ = 1{|sin(θ−μ)| ≥ |sin μ|}
/// and M₁ = 1 − M₀. Stops once a whole k-block is below `tail_tol`.
pub fn cdf_series(theta: f64, p: &EcParams, trunc: SeriesTruncation) -> Result<f64> {
    check_series_domain(p)?;
    let sd = (theta - p.mu).sin();
    let sm = p.mu.sin();
    let m0 = sd.abs() >= sm.abs();
    let mut total = 0.0;
    for k in 0..=trunc.max_k {
        let pow_theta = theta.powf(p.beta - k as f64);
        let mut block = 0.0;
        for s in 0..=k {
            let t = t_coeff(k, s, p);
            // the two exponents are combined so a zero sine never meets a
            // negative power
            let trig = if m0 { sd.powi((k - s) as i32) } else { sd.powi(s as i32) * sm.powi(k as i32 - 2 * s as i32) };
            block += t * pow_theta * trig;
        }
        total += block;
        if k >= 1 && block.abs() < trunc.tail_tol {
            break;
        }
    }
    Ok(total)
}

/// Which part of (0, 2π] an A-integral runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    Full,
    /// |sin(θ−μ)| ≥ |sin μ|
    M0,
    /// |sin(θ−μ)| < |sin μ|
    M1,
}

/// A(a, b, c) = ∫ θ^a cos^b(θ−μ) sin^c(θ−μ) dθ over (0, 2π].
pub fn a_integral(a: f64, b: u32, c: u32, mu: f64) -> Result<f64> {
    a_integral_restricted(a, b, c, mu, Region::Full)
}

/// A(a, b, c) restricted to the region where the given indicator is 1.
pub fn a_integral_restricted(a: f64, b: u32, c: u32, mu: f64, region: Region) -> Result<f64> {
    if !(a > -1.0) {
        return Err(Error::Domain(format!("A(a, b, c) diverges for a = {a} <= -1")));
    }
    let integrand = |t: f64| {
        let d = t - mu;
        t.powf(a) * d.cos().powi(b as i32) * d.sin().powi(c as i32)
    };
    // |sin(θ−μ)| = |sin μ| exactly at θ = kπ and θ = 2μ + kπ
    let mut cuts = vec![0.0, TAU];
    if region != Region::Full {
        for k in -4..=4 {
            for t in [k as f64 * PI, 2.0 * mu + k as f64 * PI] {
                if t > 0.0 && t < TAU {
                    cuts.push(t);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-14);

    let sm = mu.sin().abs();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo < 1e-14 {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let in_m0 = (mid - mu).sin().abs() >= sm;
        let keep = match region {
            Region::Full => true,
            Region::M0 => in_m0,
            Region::M1 => !in_m0,
        };
        if keep {
            total += integrate(integrand, Interval::new(lo, hi)?, MOMENT_TOL)?;
        }
    }
    Ok(total)
}

/// Moment of order `order` by quadrature of the integration-by-parts identity.
pub fn trig_moment(p: &EcParams, order: u32) -> Result<TrigMoment> {
    let k = order as f64;
    let full = Interval::new(0.0, TAU)?;
    let s = integrate(|t| (k * (t - p.mu)).sin() * p.cdf(t), full, MOMENT_TOL)?;
    let c = integrate(|t| (k * (t - p.mu)).cos() * p.cdf(t), full, MOMENT_TOL)?;
    Ok(TrigMoment { order, alpha: (k * p.mu).cos() + k * s, beta: -(k * p.mu).sin() - k * c })
}

pub fn first_trig_moment(p: &EcParams) -> Result<TrigMoment> {
    trig_moment(p, 1)
}

pub fn second_trig_moment(p: &EcParams) -> Result<TrigMoment> {
    trig_moment(p, 2)
}

/// Cross-check route: the same identity with F replaced by its k-series,
/// integrating one k-block at a time.
///
/// Term-wise A-integrals with a = β−k ≤ −1 diverge at 0⁺, so each block is
/// integrated in its binomially collapsed form
/// C(β,k) (θ/2π)^{β−k} (ρ/π)^k (sin(θ−μ) + sin μ)^k, which is bounded.
pub fn trig_moment_series(p: &EcParams, order: u32, trunc: SeriesTruncation) -> Result<TrigMoment> {
    check_series_domain(p)?;
    let ord = order as f64;
    let full = Interval::new(0.0, TAU)?;
    let (mut s_acc, mut c_acc) = (0.0, 0.0);
    for k in 0..=trunc.max_k {
        let coef = gen_binomial(p.beta, k);
        if coef == 0.0 {
            break;
        }
        let block =
            |t: f64| coef * (t / TAU).powf(p.beta - k as f64) * (p.rho * FRAC_1_PI * sine_sum(t, p.mu)).powi(k as i32);
        let s = integrate(|t| (ord * (t - p.mu)).sin() * block(t), full, MOMENT_TOL)?;
        let c = integrate(|t| (ord * (t - p.mu)).cos() * block(t), full, MOMENT_TOL)?;
        s_acc += s;
        c_acc += c;
        if k >= 1 && s.abs().max(c.abs()) < trunc.tail_tol {
            break;
        }
    }
    Ok(TrigMoment { order, alpha: (ord * p.mu).cos() + ord * s_acc, beta: -(ord * p.mu).sin() - ord * c_acc })
}

/// Standard circular measures. `None` marks a measure that is undefined at
/// this parameter point (ρ₁ = 0 or ρ₁ = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircularMeasures {
    pub mean_resultant_length: f64,
    pub variance: f64,
    pub std_dev: Option<f64>,
    pub dispersion: Option<f64>,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
}

const RESULTANT_EPS: f64 = 1e-12;

impl CircularMeasures {
    pub fn from_moments(first: TrigMoment, second: TrigMoment) -> Self {
        let r1 = first.resultant().min(1.0);
        let positive = r1 > RESULTANT_EPS;
        let below_one = r1 < 1.0 - RESULTANT_EPS;
        Self {
            mean_resultant_length: r1,
            variance: 1.0 - r1,
            std_dev: positive.then(|| (-2.0 * r1.ln()).max(0.0).sqrt()),
            dispersion: positive.then(|| (1.0 - second.alpha) / (2.0 * r1 * r1)),
            skewness: below_one.then(|| second.beta / (1.0 - r1).powf(1.5)),
            kurtosis: below_one.then(|| (second.alpha - r1.powi(4)) / (1.0 - r1).powi(2)),
        }
    }
}

pub fn circular_measures(p: &EcParams) -> Result<CircularMeasures> {
    Ok(CircularMeasures::from_moments(first_trig_moment(p)?, second_trig_moment(p)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkewKurtRow {
    pub beta: f64,
    pub rho: f64,
    pub mu: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
    /// Set when a measure is undefined or the point could not be evaluated.
    pub flagged: bool,
}

/// One row per (β, ρ, μ) lattice point, in β-major, then ρ, then μ order.
pub fn skew_kurt_grid(betas: &[f64], rhos: &[f64], mus: &[f64], exec: Execution) -> Result<Vec<SkewKurtRow>> {
    if betas.is_empty() || rhos.is_empty() || mus.is_empty() {
        return Err(Error::Domain("skewness/kurtosis grid needs non-empty axes".into()));
    }
    let mut points = Vec::with_capacity(betas.len() * rhos.len() * mus.len());
    for &b in betas {
        for &r in rhos {
            for &m in mus {
                points.push(EcParams::new(b, r, m)?);
            }
        }
    }
    Ok(par::map_slice(&points, exec, |p| match circular_measures(p) {
        Ok(m) => SkewKurtRow {
            beta: p.beta,
            rho: p.rho,
            mu: p.mu,
            skewness: m.skewness,
            kurtosis: m.kurtosis,
            flagged: m.skewness.is_none() || m.kurtosis.is_none(),
        },
        Err(_) => SkewKurtRow { beta: p.beta, rho: p.rho, mu: p.mu, skewness: None, kurtosis: None, flagged: true },
    }))
}

pub const SKEW_KURT_CSV_HEADER: &str = "beta,rho,mu,skewness,kurtosis";

/// Undefined measures are written as `NA`.
pub fn skew_kurt_csv(rows: &[SkewKurtRow]) -> String {
    let mut out = String::from(SKEW_KURT_CSV_HEADER);
    out.push('\n');
    let opt = |v: Option<f64>| v.map(sig17).unwrap_or_else(|| "NA".into());
    for r in rows {
        let _ =
            writeln!(out, "{},{},{},{},{}", sig17(r.beta), sig17(r.rho), sig17(r.mu), opt(r.skewness), opt(r.kurtosis));
    }
    out
}
