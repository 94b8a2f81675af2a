//! Mode counting for EC densities.
//!
//! The support is the interval (0, 2π]. Interior modes are strict local
//! maxima of the pdf found on a uniform grid and polished by golden-section
//! search. The right endpoint 2π also counts as a mode when the density rises
//! into it and the circle closes over it: either the density does not exceed
//! f(2π) just after the origin, or β < 1, where the pole at 0⁺ and the mass
//! piled up against 2π form a single peak on the circle.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use serde::Serialize;

use crate::ec::EcParams;
use crate::error::{Error, Result};
use crate::fmt::sig17;
use crate::par::{self, Execution};

pub const DEFAULT_GRID_N: usize = 8192;
pub const DEFAULT_MERGE_TOL: f64 = 1e-3;

/// Two peaks closer than this in height are reported as borderline.
pub const TIE_TOL: f64 = 1e-10;
/// A peak rising less than this fraction above its neighbouring trough is
/// reported as borderline.
pub const PROMINENCE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "modes", rename_all = "lowercase")]
pub enum ModalityClass {
    Amodal,
    Unimodal(f64),
    Bimodal(f64, f64),
}

impl ModalityClass {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Amodal => "amodal",
            Self::Unimodal(_) => "unimodal",
            Self::Bimodal(..) => "bimodal",
        }
    }

    pub fn modes(&self) -> Vec<f64> {
        match *self {
            Self::Amodal => vec![],
            Self::Unimodal(a) => vec![a],
            Self::Bimodal(a, b) => vec![a, b],
        }
    }

    pub fn count(&self) -> usize {
        self.modes().len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModalityReport {
    pub class: ModalityClass,
    pub borderline: bool,
    /// Smallest relative prominence among the reported modes, if any.
    pub min_prominence: Option<f64>,
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if b - a < 1e-13 {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

struct Peak {
    theta: f64,
    height: f64,
    prominence: f64,
}

pub fn classify_modality(p: &EcParams, grid_n: usize, merge_tol: f64) -> Result<ModalityReport> {
    if grid_n < 1024 {
        return Err(Error::Domain(format!("grid_n must be at least 1024, got {grid_n}")));
    }
    if !(merge_tol > 0.0) {
        return Err(Error::Domain(format!("merge_tol must be positive, got {merge_tol}")));
    }
    let h = TAU / grid_n as f64;
    // f[j] = pdf(j·h) for j = 1..=grid_n; f[0] is a placeholder for 0⁺
    let f: Vec<f64> = (0..=grid_n).map(|j| if j == 0 { f64::NAN } else { p.pdf(j as f64 * h) }).collect();
    let pdf = |t: f64| p.pdf(t);

    // trough on each side, walked along the grid, for prominence
    let trough = |j: usize, step: isize| -> f64 {
        let mut lo = f[j];
        let mut k = j as isize;
        loop {
            k += step;
            if k < 1 || k > grid_n as isize {
                break;
            }
            let v = f[k as usize];
            if v > f[j] {
                break;
            }
            lo = lo.min(v);
        }
        lo
    };

    let mut peaks: Vec<Peak> = Vec::new();
    for j in 2..grid_n {
        if f[j] > f[j - 1] && f[j] >= f[j + 1] {
            let theta = golden_max(pdf, (j - 1) as f64 * h, (j + 1) as f64 * h);
            let height = pdf(theta).max(f[j]);
            let base = trough(j, -1).max(trough(j, 1));
            peaks.push(Peak { theta, height, prominence: (height - base) / height });
        }
    }

    let top = f[grid_n];
    let rises_into_seam = top > f[grid_n - 1];
    if rises_into_seam && (p.beta < 1.0 || f[1] < top) {
        let left = trough(grid_n, -1);
        let base = if p.beta < 1.0 {
            left
        } else {
            // continue past the seam from 0⁺
            let mut lo = f[1];
            for &v in &f[2..] {
                if v > top {
                    break;
                }
                lo = lo.min(v);
            }
            left.max(lo)
        };
        peaks.push(Peak { theta: TAU, height: top, prominence: (top - base) / top });
    }

    peaks.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    let mut merged: Vec<Peak> = Vec::new();
    for pk in peaks {
        match merged.last_mut() {
            Some(last) if pk.theta - last.theta < merge_tol => {
                let prominence = last.prominence.max(pk.prominence);
                if pk.height > last.height {
                    *last = pk;
                }
                last.prominence = prominence;
            }
            _ => merged.push(pk),
        }
    }

    let min_prominence = merged.iter().map(|m| m.prominence).reduce(f64::min);
    let mut borderline = min_prominence.is_some_and(|v| v < PROMINENCE_TOL);
    if merged.len() == 2 && (merged[0].height - merged[1].height).abs() < TIE_TOL {
        borderline = true;
    }
    let class = match merged.as_slice() {
        [] => ModalityClass::Amodal,
        [a] => ModalityClass::Unimodal(a.theta),
        [a, b] => ModalityClass::Bimodal(a.theta, b.theta),
        many => return Err(Error::TooManyModes(many.iter().map(|m| m.theta).collect())),
    };
    Ok(ModalityReport { class, borderline, min_prominence })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModalityCell {
    pub beta: f64,
    pub rho: f64,
    pub mu: f64,
    pub report: Option<ModalityReport>,
    pub error: Option<String>,
}

/// Classifies every lattice cell, ordered by β, then μ, then ρ. A failing
/// cell records its error and the sweep carries on.
pub fn modality_table(
    betas: &[f64],
    rhos: &[f64],
    mus: &[f64],
    grid_n: usize,
    merge_tol: f64,
    exec: Execution,
) -> Result<Vec<ModalityCell>> {
    if betas.is_empty() || rhos.is_empty() || mus.is_empty() {
        return Err(Error::Domain("modality table needs non-empty axes".into()));
    }
    let mut points = Vec::with_capacity(betas.len() * rhos.len() * mus.len());
    for &b in betas {
        for &m in mus {
            for &r in rhos {
                points.push(EcParams::new(b, r, m)?);
            }
        }
    }
    Ok(par::map_slice(&points, exec, |p| {
        let (report, error) = match classify_modality(p, grid_n, merge_tol) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        ModalityCell { beta: p.beta, rho: p.rho, mu: p.mu, report, error }
    }))
}

pub const MODALITY_CSV_HEADER: &str = "beta,rho,mu,class,mode1,mode2,borderline";

pub fn modality_csv(cells: &[ModalityCell]) -> String {
    let mut out = String::from(MODALITY_CSV_HEADER);
    out.push('\n');
    for c in cells {
        let (class, modes, borderline) = match &c.report {
            Some(r) => (r.class.name(), r.class.modes(), r.borderline),
            None => ("error", vec![], false),
        };
        let m = |i: usize| modes.get(i).map(|&v| sig17(v)).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            sig17(c.beta),
            sig17(c.rho),
            sig17(c.mu),
            class,
            m(0),
            m(1),
            borderline
        );
    }
    out
}
