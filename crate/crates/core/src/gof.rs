//! Kuiper and Watson statistics on probability-integral-transformed data, and
//! the likelihood-ratio test of Cardioid against EC.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimation::{
    ec_loglik, fit_cardioid_mle_with, fit_ec_mle_with, fit_vonmises_mle, vonmises_cdf, FitOptions, FitResult, Model,
    Sample,
};
use crate::fmt::sig17;
use crate::numerics::chi2_sf;
use crate::par;

fn sorted_checked(u: &[f64]) -> Result<Vec<f64>> {
    if u.is_empty() {
        return Err(Error::Domain("goodness-of-fit statistics need at least one value".into()));
    }
    if let Some(&bad) = u.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Contract(bad));
    }
    let mut v = u.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// K = √n {max_i (U_(i) − (i−1)/n) + max_i (i/n − U_(i))}.
pub fn kuiper_statistic(u: &[f64]) -> Result<f64> {
    let v = sorted_checked(u)?;
    let n = v.len() as f64;
    let (mut d_plus, mut d_minus) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (i, &x) in v.iter().enumerate() {
        d_plus = d_plus.max(x - i as f64 / n);
        d_minus = d_minus.max((i + 1) as f64 / n - x);
    }
    Ok(n.sqrt() * (d_plus + d_minus))
}

/// W = Σ [(U_(i) − (i − ½)/n) − (Ū − ½)]² + 1/(12n).
pub fn watson_statistic(u: &[f64]) -> Result<f64> {
    let v = sorted_checked(u)?;
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let ss: f64 = v
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let d = (x - (i as f64 + 0.5) / n) - (mean - 0.5);
            d * d
        })
        .sum();
    Ok(ss + 1.0 / (12.0 * n))
}

/// U_i = F(θ_i) for a candidate cdf.
pub fn pit_values(s: &Sample, cdf: impl Fn(f64) -> Result<f64>) -> Result<Vec<f64>> {
    s.angles().iter().map(|&t| cdf(t)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofReport {
    pub model: Model,
    pub n: usize,
    pub kuiper: f64,
    pub watson: f64,
}

pub fn gof_for_fit(s: &Sample, fit: &FitResult) -> Result<GofReport> {
    let u = match fit.model {
        Model::VonMises => {
            let (k, m) = (fit.param("kappa"), fit.param("mu"));
            pit_values(s, |t| vonmises_cdf(t, k, m))?
        }
        _ => {
            let p = fit
                .ec_params()
                .ok_or_else(|| Error::FitFailed("fitted parameters are outside the EC domain".into()))?;
            pit_values(s, |t| Ok(p.cdf(t)))?
        }
    };
    Ok(GofReport { model: fit.model, n: s.n(), kuiper: kuiper_statistic(&u)?, watson: watson_statistic(&u)? })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LrtReport {
    pub statistic: f64,
    pub df: u32,
    pub p_value: f64,
    pub loglik_ec: f64,
    pub loglik_cardioid: f64,
}

impl LrtReport {
    /// Builds the report from the two maximized log-likelihoods.
    pub fn from_logliks(loglik_ec: f64, loglik_cardioid: f64) -> Self {
        let statistic = 2.0 * (loglik_ec - loglik_cardioid);
        Self { statistic, df: 1, p_value: chi2_sf(statistic.max(0.0), 1), loglik_ec, loglik_cardioid }
    }
}

/// LRT from two finished fits. The EC maximum is at least the EC
/// log-likelihood at (1, ρ̂_C, μ̂_C), which is the Cardioid maximum.
pub fn lrt_from_fits(s: &Sample, ec: &FitResult, cardioid: &FitResult) -> Result<LrtReport> {
    for f in [ec, cardioid] {
        if !f.converged {
            return Err(Error::FitFailed(format!("{:?} fit did not converge", f.model)));
        }
    }
    let nested = cardioid.ec_params().map(|p| ec_loglik(s, &p)).unwrap_or(f64::NEG_INFINITY);
    Ok(LrtReport::from_logliks(ec.loglik.max(nested), cardioid.loglik))
}

pub fn lrt_c_vs_ec(s: &Sample) -> Result<LrtReport> {
    lrt_c_vs_ec_with(s, &FitOptions::default())
}

pub fn lrt_c_vs_ec_with(s: &Sample, opts: &FitOptions) -> Result<LrtReport> {
    if s.n() < 3 {
        return Err(Error::Domain(format!("the likelihood-ratio test needs n >= 3, got {}", s.n())));
    }
    let ec = fit_ec_mle_with(s, opts)?;
    let c = fit_cardioid_mle_with(s, opts)?;
    lrt_from_fits(s, &ec, &c)
}

/// One row per model: the fit, its statistics, or the error that stopped it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofRow {
    pub model: Model,
    pub fit: Option<FitResult>,
    pub kuiper: Option<f64>,
    pub watson: Option<f64>,
    pub error: Option<String>,
}

pub const GOF_MODELS: [Model; 3] = [Model::Cardioid, Model::Ec, Model::VonMises];

/// Fits Cardioid, EC and von Mises by maximum likelihood and scores each.
pub fn gof_compare(s: &Sample, opts: &FitOptions) -> Result<Vec<GofRow>> {
    if s.n() < 3 {
        return Err(Error::Domain(format!("model comparison needs n >= 3, got {}", s.n())));
    }
    Ok(par::map_slice(&GOF_MODELS, opts.exec, |&model| {
        let fit = match model {
            Model::Cardioid => fit_cardioid_mle_with(s, opts),
            Model::Ec => fit_ec_mle_with(s, opts),
            Model::VonMises => fit_vonmises_mle(s),
        };
        match fit.and_then(|f| gof_for_fit(s, &f).map(|g| (f, g))) {
            Ok((f, g)) => GofRow { model, fit: Some(f), kuiper: Some(g.kuiper), watson: Some(g.watson), error: None },
            Err(e) => GofRow { model, fit: None, kuiper: None, watson: None, error: Some(e.to_string()) },
        }
    }))
}

pub const GOF_CSV_HEADER: &str = "model,beta,rho,mu,kappa,kuiper,watson";

/// Table-shaped CSV; parameters a model lacks are left empty.
pub fn gof_csv(rows: &[GofRow]) -> String {
    let mut out = String::from(GOF_CSV_HEADER);
    out.push('\n');
    let opt = |v: Option<f64>| v.map(sig17).unwrap_or_default();
    for r in rows {
        let get = |k: &str| r.fit.as_ref().and_then(|f| f.params.get(k));
        let name = match r.model {
            Model::Ec => "EC",
            Model::Cardioid => "Cardioid",
            Model::VonMises => "VonMises",
        };
        let _ = writeln!(
            out,
            "{name},{},{},{},{},{},{}",
            opt(get("beta")),
            opt(get("rho")),
            opt(get("mu")),
            opt(get("kappa")),
            opt(r.kuiper),
            opt(r.watson)
        );
    }
    out
}
