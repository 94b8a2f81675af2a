//! Numerical kernel: quadrature, bracketing root finder, bounded Nelder–Mead
//! and the handful of special functions the statistical modules need.

mod optim;
mod quad;
mod root;
mod special;

pub use optim::{minimize, OptimResult};
pub use quad::{integrate, DEFAULT_TOL, PANEL_BUDGET};
pub use root::find_root;
pub use special::{bessel_i0, bessel_i1, chi2_sf, gamma_q, ln_gamma};

use crate::error::{Error, Result};

/// A finite, non-degenerate closed interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && hi > lo {
            Ok(Self { lo, hi })
        } else {
            Err(Error::Interval { lo, hi })
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}
