//! The Exponentiated Cardioid law on the support (0, 2π].
//!
//! The cdf is the Cardioid cdf raised to a positive power β:
//!
//! ```text
//! F(θ) = { θ/2π + (ρ/π)[sin(θ−μ) + sin μ] }^β
//! ```
//!
//! with β > 0, 0 ≤ ρ ≤ ½ and 0 < μ ≤ 2π. β = 1 gives the Cardioid, and
//! β = 1, ρ = 0 the circular uniform.

use std::f64::consts::{FRAC_1_PI, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{find_root, Interval};
use crate::par::{self, Execution};

/// Bracket width used when inverting the cdf for sampling.
pub const SAMPLE_QUANTILE_TOL: f64 = 1e-12;

/// A direction in radians, normalized onto (0, 2π].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    /// Reduces modulo 2π; an exact 0 (or multiple of 2π) maps to 2π.
    pub fn new(radians: f64) -> Result<Self> {
        if !radians.is_finite() {
            return Err(Error::Domain(format!("angle must be finite, got {radians}")));
        }
        Ok(Self(normalize(radians)))
    }

    pub fn from_degrees(degrees: f64) -> Result<Self> {
        Self::new(degrees.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

/// Maps any finite value onto (0, 2π].
pub fn normalize(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r == 0.0 || r >= TAU {
        TAU
    } else {
        r
    }
}

/// Validated (β, ρ, μ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EcParams {
    pub beta: f64,
    pub rho: f64,
    pub mu: f64,
}

impl EcParams {
    pub fn new(beta: f64, rho: f64, mu: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("beta must be positive, got {beta}")));
        }
        if !(0.0..=0.5).contains(&rho) {
            return Err(Error::Domain(format!("rho must lie in [0, 0.5], got {rho}")));
        }
        if !(mu > 0.0 && mu <= TAU) {
            return Err(Error::Domain(format!("mu must lie in (0, 2pi], got {mu}")));
        }
        Ok(Self { beta, rho, mu })
    }

    /// Like [`EcParams::new`] but first maps μ onto (0, 2π].
    pub fn with_wrapped_mu(beta: f64, rho: f64, mu: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::Domain(format!("mu must be finite, got {mu}")));
        }
        Self::new(beta, rho, normalize(mu))
    }

    pub fn cdf(&self, theta: f64) -> f64 {
        cardioid_base(theta, self.rho, self.mu).powf(self.beta)
    }

    /// Density. Finite formula value for every θ > 0; for β < 1 it diverges
    /// as θ → 0⁺.
    pub fn pdf(&self, theta: f64) -> f64 {
        let base = cardioid_base(theta, self.rho, self.mu);
        let perturb = 1.0 + 2.0 * self.rho * (theta - self.mu).cos();
        if self.beta == 1.0 {
            return perturb.max(0.0) / TAU;
        }
        base.powf(self.beta - 1.0) * self.beta / TAU * perturb.max(0.0)
    }

    /// Log-density, `-inf` wherever the density vanishes.
    pub fn log_pdf(&self, theta: f64) -> f64 {
        let base = cardioid_base(theta, self.rho, self.mu);
        let perturb = 1.0 + 2.0 * self.rho * (theta - self.mu).cos();
        if perturb <= 0.0 || (base <= 0.0 && self.beta > 1.0) {
            return f64::NEG_INFINITY;
        }
        let base_term = if self.beta == 1.0 { 0.0 } else { (self.beta - 1.0) * base.ln() };
        base_term + self.beta.ln() - TAU.ln() + perturb.ln()
    }

    /// θ with F(θ) = α, located by bracketing on (0, 2π] to width `tol`.
    pub fn quantile_exact(&self, alpha: f64, tol: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Domain(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        if alpha == 1.0 {
            return Ok(TAU);
        }
        // invert the base, which is better conditioned than base^β
        let target = alpha.powf(1.0 / self.beta);
        let g = |t: f64| cardioid_base(t, self.rho, self.mu) - target;
        let root = find_root(g, Interval::new(0.0, TAU)?, tol)?;
        Ok(if root <= 0.0 { f64::MIN_POSITIVE } else { root })
    }

    /// Piecewise closed-form quantile approximation.
    pub fn quantile_approx(&self, alpha: f64) -> Result<ApproxQuantile> {
        quantile_approx(alpha, self)
    }

    /// `n` inversion draws. Uniforms come from a PCG-64 stream seeded with
    /// `seed`, so identical arguments always reproduce the same sample.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        self.sample_with(n, seed, Execution::default())
    }

    pub fn sample_with(&self, n: usize, seed: u64, exec: Execution) -> Vec<f64> {
        let mut rng = Pcg64::seed_from_u64(seed);
        // uniforms on (0, 1]
        let u: Vec<f64> = (0..n).map(|_| 1.0 - rng.random::<f64>()).collect();
        par::map_slice(&u, exec, |&u| self.quantile_exact(u, SAMPLE_QUANTILE_TOL).expect("u in (0, 1] always brackets"))
    }
}

/// The Cardioid cdf θ/2π + (ρ/π)[sin(θ−μ) + sin μ], clamped to [0, 1]
/// against round-off.
pub fn cardioid_base(theta: f64, rho: f64, mu: f64) -> f64 {
    let v = theta / TAU + rho * FRAC_1_PI * sine_sum(theta, mu);
    v.clamp(0.0, 1.0)
}

/// sin(θ−μ) + sin μ in product form, which keeps full relative precision
/// as θ → 0⁺.
pub fn sine_sum(theta: f64, mu: f64) -> f64 {
    2.0 * (0.5 * theta).sin() * (0.5 * theta - mu).cos()
}

/// Half-open intervals for Q−μ, one per approximation branch. The first one
/// is closed on the left.
pub const BRANCH_BOUNDS: [(f64, f64); 5] = [(0.0, 0.60), (0.60, 2.62), (2.62, 3.64), (3.64, 5.76), (5.76, TAU)];

/// Auxiliary constants of the two quadratic branches, evaluated for a given
/// α and an effective location `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantileApproxConstants {
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub h: f64,
}

impl QuantileApproxConstants {
    pub fn new(alpha: f64, beta: f64, rho: f64, mu: f64) -> Self {
        let x = alpha.powf(1.0 / beta);
        let c = x - rho / PI * (mu.sin() - 0.5 * mu * (PI + mu) + (8.0 - PI * PI) / 8.0);
        let d = (1.0 + PI * rho + 2.0 * rho * mu) / TAU;
        let e = d * d - 2.0 * rho * c / PI;
        let g = d - 2.0 * rho * (1.0 + mu / PI);
        // Expanding the quadratic sine approximation about 3π/2 gives the
        // constant 2μ + 5π/4 here.
        let f = c - rho * ((mu * mu - 2.0) / PI + 2.0 * mu + 1.25 * PI);
        let h = g * g + 2.0 * rho * f / PI;
        Self { c, d, e, f, g, h }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxQuantile {
    pub theta: f64,
    /// 1-based branch index that produced `theta`.
    pub branch: usize,
    /// Whether Q−μ fell inside the interval of its own branch.
    pub self_consistent: bool,
}

struct Candidate {
    theta: f64,
    branch: usize,
    consistent: bool,
}

fn branch_candidates(alpha: f64, p: &EcParams) -> Vec<Candidate> {
    let (beta, rho) = (p.beta, p.rho);
    let x = alpha.powf(1.0 / beta);
    let mut out = Vec::with_capacity(10);
    // Q−μ is taken in [0, 2π): for Q < μ the formulas are evaluated with the
    // equivalent location μ − 2π.
    for mu in [p.mu, p.mu - TAU] {
        let s = mu.sin();
        let k = QuantileApproxConstants::new(alpha, beta, rho, mu);
        let raw = [
            Some(TAU / (1.0 + 2.0 * rho) * (x - rho / PI * (s - mu))),
            (rho > 0.0 && k.e >= 0.0).then(|| PI / rho * (k.d - k.e.sqrt())),
            (rho < 0.5).then(|| TAU / (1.0 - 2.0 * rho) * (x - rho / PI * (s + mu + PI))),
            (rho > 0.0 && k.h >= 0.0).then(|| -PI / rho * (k.g - k.h.sqrt())),
            Some(TAU / (1.0 + 2.0 * rho) * (x - rho / PI * (s - mu - TAU))),
        ];
        for (i, q) in raw.into_iter().enumerate() {
            let Some(q) = q else { continue };
            if !q.is_finite() {
                continue;
            }
            let offset = q - mu;
            let (lo, hi) = BRANCH_BOUNDS[i];
            let inside = if i == 0 { offset >= lo && offset <= hi } else { offset > lo && offset <= hi };
            let in_support = q > 0.0 && q <= TAU;
            out.push(Candidate { theta: q, branch: i + 1, consistent: inside && in_support });
        }
    }
    out
}

/// Evaluates all five branch formulas and keeps the one whose Q−μ lands in
/// its own interval; ties and the no-consistent-branch case are settled by
/// the smallest cdf residual.
pub fn quantile_approx(alpha: f64, p: &EcParams) -> Result<ApproxQuantile> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let cands = branch_candidates(alpha, p);
    let residual = |t: f64| (p.cdf(t.clamp(f64::MIN_POSITIVE, TAU)) - alpha).abs();
    let pick = |consistent_only: bool| {
        cands
            .iter()
            .filter(|c| !consistent_only || c.consistent)
            .min_by(|a, b| residual(a.theta).total_cmp(&residual(b.theta)))
    };
    let chosen = pick(true).or_else(|| pick(false)).expect("branches 1 and 5 always evaluate");
    Ok(ApproxQuantile {
        theta: chosen.theta.clamp(f64::MIN_POSITIVE, TAU),
        branch: chosen.branch,
        self_consistent: chosen.consistent,
    })
}

/// Cardioid density (1/2π)(1 + 2ρ cos(θ−μ)).
pub fn cardioid_pdf(theta: f64, rho: f64, mu: f64) -> f64 {
    (1.0 + 2.0 * rho * (theta - mu).cos()) / TAU
}
