//! Brute-force reference routines. None of these call into the crate's
//! numerical kernels; they trade speed for transparency.

use std::f64::consts::{PI, TAU};

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on P_m.
pub fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    (1..=m)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=m {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite 20-point Gauss–Legendre with `panels` equal panels.
pub fn gl(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let mid = lo + 0.5 * h;
        total += rule.iter().map(|&(x, w)| w * f(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h;
    }
    total
}

/// ∫₀^{2π} g(θ) dθ through θ = 2π t^20, which flattens power singularities
/// at 0⁺.
pub fn gl_support(g: impl Fn(f64) -> f64, panels: usize) -> f64 {
    const M: i32 = 20;
    gl(
        |t| {
            if t <= 0.0 {
                return 0.0;
            }
            let theta = TAU * t.powi(M);
            if theta <= 0.0 {
                return 0.0;
            }
            g(theta) * TAU * M as f64 * t.powi(M - 1)
        },
        0.0,
        1.0,
        panels,
    )
}

/// Runs an oracle at two resolutions and insists they agree.
pub fn agreeing(name: &str, coarse: f64, fine: f64, tol: f64) -> f64 {
    assert!((coarse - fine).abs() <= tol, "oracle {name} disagrees with itself: {coarse} vs {fine}");
    fine
}

/// sin(θ−μ) + sin μ written as sin θ cos μ + 2 sin μ sin²(θ/2).
pub fn sine_pair(theta: f64, mu: f64) -> f64 {
    let h = (0.5 * theta).sin();
    theta.sin() * mu.cos() + 2.0 * mu.sin() * h * h
}

pub fn base(theta: f64, rho: f64, mu: f64) -> f64 {
    theta / TAU + rho / PI * sine_pair(theta, mu)
}

/// The base exactly as written, without any rearrangement.
pub fn base_literal(theta: f64, rho: f64, mu: f64) -> f64 {
    theta / TAU + rho / PI * ((theta - mu).sin() + mu.sin())
}

pub fn cdf(theta: f64, beta: f64, rho: f64, mu: f64) -> f64 {
    base(theta, rho, mu).max(0.0).powf(beta)
}

pub fn pdf(theta: f64, beta: f64, rho: f64, mu: f64) -> f64 {
    let b = base(theta, rho, mu).max(0.0);
    beta / TAU * b.powf(beta - 1.0) * (1.0 + 2.0 * rho * (theta - mu).cos())
}

/// 200 halvings of [0, 2π].
pub fn quantile(alpha: f64, beta: f64, rho: f64, mu: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, TAU);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid, beta, rho, mu) < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// (1/π) ∫₀^π e^{x cos t} cos(νt) dt by the trapezoid rule, which converges
/// geometrically for this periodic integrand.
pub fn bessel_i(nu: u32, x: f64, points: usize) -> f64 {
    let h = PI / points as f64;
    let g = |t: f64| (x * t.cos()).exp() * (nu as f64 * t).cos();
    let inner: f64 = (1..points).map(|k| g(k as f64 * h)).sum();
    (0.5 * (g(0.0) + g(PI)) + inner) * h / PI
}

/// Upper tail of chi-square with one degree of freedom as
/// ∫_{√x}^{∞} 2 φ(s) ds, truncated at s = 40.
pub fn chi2_sf_df1(x: f64, panels: usize) -> f64 {
    let phi = |s: f64| (-0.5 * s * s).exp() / (TAU).sqrt();
    gl(|s| 2.0 * phi(s), x.sqrt(), 40.0, panels)
}

/// Density-side trigonometric moment (E cos p(Θ−μ), E sin p(Θ−μ)).
pub fn trig_moment(order: u32, beta: f64, rho: f64, mu: f64, panels: usize) -> (f64, f64) {
    let k = order as f64;
    let c = gl_support(|t| (k * (t - mu)).cos() * pdf(t, beta, rho, mu), panels);
    let s = gl_support(|t| (k * (t - mu)).sin() * pdf(t, beta, rho, mu), panels);
    (c, s)
}

pub fn a_integral(a: f64, b: u32, c: u32, mu: f64, panels: usize) -> f64 {
    gl_support(|t| t.powf(a) * (t - mu).cos().powi(b as i32) * (t - mu).sin().powi(c as i32), panels)
}

/// β(β−1)…(β−k+1)/k! · k!/(s!(k−s)!) · (1/2π)^{β−k} · (ρ/π)^k · sin^s μ,
/// each factor formed separately.
pub fn t_coeff(k: usize, s: usize, beta: f64, rho: f64, mu: f64) -> f64 {
    let fact = |m: usize| (1..=m).map(|j| j as f64).product::<f64>();
    let falling: f64 = (0..k).map(|j| beta - j as f64).product();
    falling / fact(k) * fact(k) / (fact(s) * fact(k - s))
        * (1.0 / TAU).powf(beta - k as f64)
        * (rho / PI).powi(k as i32)
        * mu.sin().powi(s as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        assert!((gl(|x| x.powi(7) + x * x, 0.0, 1.0, 1) - (1.0 / 8.0 + 1.0 / 3.0)).abs() < 1e-15);
    }
}
