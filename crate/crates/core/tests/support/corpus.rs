//! Builds every fixture document from the oracles and from transcribed
//! published values. Kept single-threaded so output order never varies.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_6, PI, TAU};

use excard::fixtures::{FixtureFile, GoldenCase, Origin};
use serde_json::{json, Value};

use super::oracles as o;

fn exact(id: impl Into<String>, inputs: Value, expected: Value, why: &str, tol: f64) -> GoldenCase {
    GoldenCase::new(id, inputs, expected, Origin::Exact, why, tol)
}

fn oracle(id: impl Into<String>, inputs: Value, expected: Value, name: &str, tol: f64) -> GoldenCase {
    GoldenCase::new(id, inputs, expected, Origin::Oracle, name, tol)
}

fn published(id: impl Into<String>, inputs: Value, expected: Value, table: &str, tol: f64) -> GoldenCase {
    GoldenCase::new(id, inputs, expected, Origin::Published, table, tol)
}

pub const WIND_DEGREES: [f64; 21] = [
    356.0, 97.0, 211.0, 232.0, 343.0, 292.0, 157.0, 302.0, 335.0, 302.0, 324.0, 85.0, 324.0, 340.0, 157.0, 238.0,
    254.0, 146.0, 232.0, 122.0, 329.0,
];

pub fn numerics() -> FixtureFile {
    let mut cases = vec![
        exact("integrate/sin", json!({"a": 0.0, "b": TAU}), json!(0.0), "odd over a full period", 1e-12),
        exact("integrate/square", json!({"a": 0.0, "b": 1.0}), json!(1.0 / 3.0), "polynomial antiderivative", 1e-12),
        exact("integrate/cos2", json!({"a": 0.0, "b": TAU}), json!(PI), "half-angle identity", 1e-12),
        exact("bessel_i0/0", json!({"x": 0.0}), json!(1.0), "series constant term", 0.0),
        exact("bessel_i1/0", json!({"x": 0.0}), json!(0.0), "odd series", 0.0),
        exact("chi2_sf/0", json!({"x": 0.0, "df": 1}), json!(1.0), "full mass above zero", 0.0),
    ];
    let cube = o::bisect(|x| x * x * x - 2.0, 1.0, 2.0);
    cases.push(oracle("find_root/cube", json!({"lo": 1.0, "hi": 2.0}), json!(cube), "bisection, 200 halvings", 1e-12));
    for nu in [0u32, 1] {
        for x in [0.5, 1.0, 2.5, 5.0, 10.0, 20.0] {
            let name = format!("bessel_i{nu}");
            let v = o::agreeing(
                &name,
                o::bessel_i(nu, x, 96),
                o::bessel_i(nu, x, 192),
                1e-14 * (1.0 + o::bessel_i(nu, x, 192)),
            );
            let tol = 1e-13 * v.abs().max(1.0);
            cases.push(oracle(
                format!("{name}/{x}"),
                json!({"x": x}),
                json!(v),
                "trapezoid rule on the integral representation over [0, pi]",
                tol,
            ));
        }
    }
    for x in [0.5, 2.0, 3.841, 6.635, 12.0] {
        let v = o::agreeing("chi2", o::chi2_sf_df1(x, 400), o::chi2_sf_df1(x, 800), 1e-14);
        cases.push(oracle(
            format!("chi2_sf/{x}"),
            json!({"x": x, "df": 1}),
            json!(v),
            "Gauss-Legendre quadrature of the chi-square density",
            1e-10,
        ));
    }
    FixtureFile::new("numerics", cases)
}

pub fn ec() -> FixtureFile {
    let mut cases = vec![
        exact("base/full_turn", json!({"theta": TAU, "rho": 0.3, "mu": 1.0}), json!(1.0), "sines cancel at 2pi", 1e-15),
        exact("base/uniform", json!({"theta": PI, "rho": 0.0, "mu": 2.0}), json!(0.5), "uniform base", 1e-15),
        published(
            "branch_bounds",
            json!({}),
            json!([0.60, 2.62, 3.64, 5.76, 6.28]),
            "published quantile branch intervals",
            0.0,
        ),
    ];
    let lit = o::base_literal(PI, 0.2, 2.0);
    let b = o::agreeing("base", lit, o::base(PI, 0.2, 2.0), 1e-15);
    cases.push(oracle(
        "base/reference",
        json!({"theta": PI, "rho": 0.2, "mu": 2.0}),
        json!(b),
        "direct formula evaluation",
        1e-14,
    ));
    cases.push(oracle(
        "cdf/reference",
        json!({"theta": PI, "beta": 2.0, "rho": 0.2, "mu": 2.0}),
        json!(b * b),
        "direct formula evaluation",
        1e-14,
    ));
    for (beta, rho, mu) in [(2.0, 0.2, 2.0), (0.5, 0.3, 4.0), (4.0, 0.5, FRAC_PI_3), (0.3, 0.5, 1.0)] {
        let mass = o::agreeing(
            "pdf mass",
            o::gl_support(|t| o::pdf(t, beta, rho, mu), 200),
            o::gl_support(|t| o::pdf(t, beta, rho, mu), 400),
            1e-12,
        );
        cases.push(oracle(
            format!("pdf_mass/{beta}/{rho}/{mu:.6}"),
            json!({"beta": beta, "rho": rho, "mu": mu}),
            json!(mass),
            "Gauss-Legendre quadrature after theta = 2pi t^20",
            1e-9,
        ));
        for k in 1..=9 {
            let alpha = k as f64 / 10.0;
            let q = o::quantile(alpha, beta, rho, mu);
            cases.push(oracle(
                format!("quantile/{beta}/{rho}/{mu:.6}/{alpha}"),
                json!({"alpha": alpha, "beta": beta, "rho": rho, "mu": mu}),
                json!(q),
                "bisection on the cdf, 200 halvings",
                1e-9,
            ));
        }
    }
    let q = o::quantile(0.25, 2.0, 0.2, 2.0);
    cases.push(oracle(
        "quantile_approx/reference",
        json!({"alpha": 0.25, "beta": 2.0, "rho": 0.2, "mu": 2.0}),
        json!(q),
        "bisection on the cdf, 200 halvings",
        0.05,
    ));
    FixtureFile::new("ec", cases)
}

pub fn moments() -> FixtureFile {
    let mut cases = vec![
        exact(
            "t_coeff/0_0",
            json!({"k": 0, "s": 0, "beta": 1.7, "rho": 0.3, "mu": 2.0}),
            json!((1.0 / TAU).powf(1.7)),
            "empty products",
            1e-15,
        ),
        exact(
            "t_coeff/1_1",
            json!({"k": 1, "s": 1, "beta": 1.0, "rho": 0.3, "mu": 2.0}),
            json!(0.3 / PI * 2f64.sin()),
            "direct substitution",
            1e-15,
        ),
        exact(
            "a_integral/0_0_0",
            json!({"a": 0.0, "b": 0, "c": 0, "mu": 2.0}),
            json!(TAU),
            "constant integrand",
            1e-11,
        ),
    ];
    let t = o::t_coeff(3, 1, 2.5, 0.2, 2.0);
    cases.push(oracle(
        "t_coeff/3_1",
        json!({"k": 3, "s": 1, "beta": 2.5, "rho": 0.2, "mu": 2.0}),
        json!(t),
        "factor-by-factor binomial evaluation",
        1e-14 * t.abs(),
    ));
    for (b, c) in [(0u32, 1u32), (1, 1), (1, 0)] {
        cases.push(published(
            format!("a_integral/0_{b}_{c}"),
            json!({"a": 0.0, "b": b, "c": c, "mu": 2.0}),
            json!(0.0),
            "published worked reduction",
            1e-11,
        ));
    }
    for (a, b, c, mu) in [(1.0, 0u32, 1u32, 2.0), (0.5, 1, 2, 0.7), (-0.5, 0, 1, 2.0), (2.5, 2, 1, 4.4)] {
        let v = o::agreeing("A", o::a_integral(a, b, c, mu, 200), o::a_integral(a, b, c, mu, 400), 1e-11);
        cases.push(oracle(
            format!("a_integral/{a}_{b}_{c}_{mu}"),
            json!({"a": a, "b": b, "c": c, "mu": mu}),
            json!(v),
            "Gauss-Legendre quadrature after theta = 2pi t^20",
            1e-9,
        ));
    }
    let cdf = o::cdf(PI, 2.5, 0.2, 2.0);
    cases.push(oracle(
        "cdf_series/reference",
        json!({"theta": PI, "beta": 2.5, "rho": 0.2, "mu": 2.0, "max_k": 40}),
        json!(cdf),
        "direct formula evaluation",
        1e-6,
    ));
    let points = [
        (2.0, 0.2, 2.0),
        (0.5, 0.3, 4.0),
        (4.0, 0.5, FRAC_PI_3),
        (0.3, 0.2, FRAC_PI_6),
        (10.0, 0.4, TAU),
        (1.0, 0.25, 2.0),
    ];
    for (beta, rho, mu) in points {
        for order in [1u32, 2] {
            let (c1, s1) = o::trig_moment(order, beta, rho, mu, 200);
            let (c2, s2) = o::trig_moment(order, beta, rho, mu, 400);
            let c = o::agreeing("moment cos", c1, c2, 1e-12);
            let s = o::agreeing("moment sin", s1, s2, 1e-12);
            cases.push(oracle(
                format!("trig_moment/{order}/{beta}/{rho}/{mu:.6}"),
                json!({"order": order, "beta": beta, "rho": rho, "mu": mu}),
                json!([c, s]),
                "density-side Gauss-Legendre quadrature after theta = 2pi t^20",
                1e-8,
            ));
        }
    }
    cases.push(published(
        "cardioid_first_moment",
        json!({"beta": 1.0, "rho": 0.25, "mu": 2.0}),
        json!([0.25, 0.0]),
        "published Cardioid reduction of the first moment",
        1e-8,
    ));
    FixtureFile::new("moments", cases)
}

/// Rows μ ∈ {π/6, π/3, 2π/3, π, 4π/3, 2π}, columns ρ ∈ {0.1, …, 0.5};
/// A amodal, U unimodal, B bimodal.
pub const MODALITY_TABLE: [(f64, [&str; 6]); 6] = [
    (0.3, ["UUUUU", "UUUUU", "UUUUU", "AAAAA", "AUUUU", "UUUUU"]),
    (0.6, ["UUUUU", "UUUUU", "UUUUB", "AUUUU", "UUUUU", "UUUUU"]),
    (1.0, ["UUUUU", "UUUUU", "UUUUU", "UUUUU", "UUUUU", "UUUUU"]),
    (2.0, ["UBBBB", "UBBBB", "UBBBB", "BBBBU", "UUUBB", "UBBBB"]),
    (4.0, ["UUBBB", "UUBBB", "UUBBB", "UBBBU", "UUUUU", "UUBBB"]),
    (10.0, ["UUUBB", "UUUBB", "UUUBB", "UUUBU", "UUUUU", "UUUBB"]),
];

pub const TABLE_MUS: [f64; 6] = [PI / 6.0, PI / 3.0, 2.0 * PI / 3.0, PI, 4.0 * PI / 3.0, TAU];
pub const TABLE_RHOS: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];
const MU_LABELS: [&str; 6] = ["pi/6", "pi/3", "2pi/3", "pi", "4pi/3", "2pi"];

fn class_name(c: char) -> &'static str {
    match c {
        'A' => "amodal",
        'U' => "unimodal",
        'B' => "bimodal",
        _ => unreachable!(),
    }
}

pub fn modality() -> FixtureFile {
    let mut cases = Vec::new();
    for (beta, rows) in MODALITY_TABLE {
        for (mi, row) in rows.iter().enumerate() {
            for (ri, c) in row.chars().enumerate() {
                cases.push(published(
                    format!("table/{beta}/{}/{}", MU_LABELS[mi], TABLE_RHOS[ri]),
                    json!({"beta": beta, "rho": TABLE_RHOS[ri], "mu": TABLE_MUS[mi]}),
                    json!(class_name(c)),
                    "published modality table",
                    0.0,
                ));
            }
        }
    }
    let cited = [
        ("cited/cardioid", 1.0, 0.2, 2.0, "unimodal"),
        ("cited/bimodal", 2.0, 0.3, FRAC_PI_6, "bimodal"),
        ("cited/amodal", 0.3, 0.2, PI, "amodal"),
    ];
    for (id, beta, rho, mu, class) in cited {
        cases.push(published(
            id,
            json!({"beta": beta, "rho": rho, "mu": mu}),
            json!(class),
            "published modality table",
            0.0,
        ));
    }
    for (mi, mu) in TABLE_MUS.iter().enumerate() {
        cases.push(published(
            format!("cited/beta10_rho01/{}", MU_LABELS[mi]),
            json!({"beta": 10.0, "rho": 0.1, "mu": mu}),
            json!("unimodal"),
            "published modality table",
            0.0,
        ));
    }
    FixtureFile::new("modality", cases)
}

pub fn estimation() -> FixtureFile {
    let wind = "published wind-direction fit table";
    let cases = vec![
        published("wind/degrees", json!({}), json!(WIND_DEGREES.to_vec()), "published wind-direction data", 0.0),
        published("wind/ec/params", json!({}), json!([2.8757, 0.2164, 1.1782]), wind, 0.02),
        published("wind/ec/se", json!({}), json!([0.8929, 0.1465, 0.6168]), wind, 0.10),
        published("wind/cardioid/params", json!({}), json!([0.2436, 4.6708]), wind, 0.01),
        published("wind/cardioid/se", json!({}), json!([0.1463, 0.6835]), wind, 0.10),
        published("wind/vonmises/params", json!({}), json!([0.5322, 5.0092]), wind, 0.01),
        published("wind/vonmises/se", json!({}), json!([0.3250, 0.5899]), wind, 0.10),
        published("wind/profile_beta", json!({"rho": 0.2164, "mu": 1.1782}), json!(2.8757), wind, 0.02),
    ];
    FixtureFile::new("estimation", cases)
}

pub fn gof() -> FixtureFile {
    let wind = "published wind-direction fit table";
    let cases = vec![
        exact("kuiper/single", json!({"u": [0.5]}), json!(1.0), "direct formula", 1e-15),
        exact("kuiper/pair", json!({"u": [0.25, 0.75]}), json!(0.5 * 2f64.sqrt()), "hand evaluation", 1e-15),
        exact(
            "watson/plotting_positions",
            json!({"u": [0.125, 0.375, 0.625, 0.875]}),
            json!(1.0 / 48.0),
            "bracket terms vanish",
            1e-15,
        ),
        exact("watson/pair", json!({"u": [0.2, 0.9]}), json!(0.02 + 1.0 / 24.0), "hand evaluation", 1e-15),
        published(
            "wind/kuiper",
            json!({"models": ["Cardioid", "EC", "VonMises"]}),
            json!([1.0388, 0.7369, 1.1590]),
            wind,
            0.01,
        ),
        published(
            "wind/watson",
            json!({"models": ["Cardioid", "EC", "VonMises"]}),
            json!([0.0592, 0.0257, 0.0711]),
            wind,
            0.005,
        ),
        published("wind/lrt_p", json!({}), json!(0.0027), "published likelihood-ratio p-value", 0.001),
    ];
    FixtureFile::new("gof", cases)
}

pub fn simulate() -> FixtureFile {
    let mc = "published Monte Carlo table, n = 100";
    let t6 = "published MLE vs QLSE table, n = 100";
    let cases = vec![
        published(
            "mse/mle/1/0.5/2pi",
            json!({"beta": 1.0, "rho": 0.5, "mu": TAU}),
            json!([0.0, 0.0, 0.0]),
            mc,
            0.00005,
        ),
        published(
            "mse/qlse/1/0.5/2pi",
            json!({"beta": 1.0, "rho": 0.5, "mu": TAU}),
            json!([0.0071, 0.2991, 0.0]),
            mc,
            0.00005,
        ),
        published(
            "mse/mle/1/0.3/4pi3",
            json!({"beta": 1.0, "rho": 0.3, "mu": 4.0 * PI / 3.0}),
            json!([0.0293, 0.0073, 0.0936]),
            mc,
            0.00005,
        ),
        published(
            "mse/qlse/1/0.3/4pi3",
            json!({"beta": 1.0, "rho": 0.3, "mu": 4.0 * PI / 3.0}),
            json!([0.0658, 0.5818, 0.1883]),
            mc,
            0.00005,
        ),
        published(
            "mse/mle/4/0.5/pi3",
            json!({"beta": 4.0, "rho": 0.5, "mu": FRAC_PI_3}),
            json!([0.1761, 0.0001, 0.0056]),
            mc,
            0.00005,
        ),
        published(
            "mse/qlse/4/0.5/pi3",
            json!({"beta": 4.0, "rho": 0.5, "mu": FRAC_PI_3}),
            json!([0.2384, 11.4078, 0.0119]),
            mc,
            0.00005,
        ),
        published(
            "mse/mle/10/0.5/2pi",
            json!({"beta": 10.0, "rho": 0.5, "mu": TAU}),
            json!([1.0645, 0.0, 0.0]),
            t6,
            0.00005,
        ),
        published(
            "mse/qlse/10/0.5/2pi",
            json!({"beta": 10.0, "rho": 0.5, "mu": TAU}),
            json!([0.2405, 95.9267, 0.0]),
            t6,
            0.00005,
        ),
        published(
            "bias/mle/1/0.5/2pi",
            json!({"beta": 1.0, "rho": 0.5, "mu": TAU}),
            json!([0.0094, 0.0, 0.0]),
            mc,
            0.00005,
        ),
    ];
    FixtureFile::new("simulate", cases)
}

pub fn cli() -> FixtureFile {
    let cases = vec![
        oracle(
            "parse/356deg",
            json!({"text": "356", "unit": "deg"}),
            json!(356.0 * PI / 180.0),
            "degrees times pi over 180",
            1e-12,
        ),
        exact("parse/0deg", json!({"text": "0", "unit": "deg"}), json!(TAU), "zero maps to 2pi", 0.0),
        published("wind/n", json!({}), json!(21), "published wind-direction data", 0.0),
        exact(
            "quantile/uniform_median",
            json!({"alpha": 0.5, "beta": 1.0, "rho": 0.0, "mu": 6.283185}),
            json!(PI),
            "uniform median",
            1e-9,
        ),
    ];
    FixtureFile::new("cli", cases)
}

pub fn all() -> Vec<FixtureFile> {
    vec![numerics(), ec(), moments(), modality(), estimation(), gof(), simulate(), cli()]
}
