use super::Interval;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult {
    pub argmin: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

// Each bounded coordinate is searched through x = lo + w·σ(z).
struct Transform<'a> {
    bounds: &'a [Interval],
}

impl Transform<'_> {
    fn to_bounded(&self, z: &[f64]) -> Vec<f64> {
        z.iter()
            .zip(self.bounds)
            .map(|(&z, b)| {
                let s = 1.0 / (1.0 + (-z).exp());
                (b.lo() + b.width() * s).clamp(b.lo(), b.hi())
            })
            .collect()
    }

    fn to_free(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.bounds)
            .map(|(&x, b)| {
                let u = ((x - b.lo()) / b.width()).clamp(1e-9, 1.0 - 1e-9);
                (u / (1.0 - u)).ln()
            })
            .collect()
    }
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
const INITIAL_STEP: f64 = 0.6;
const MAX_RESTARTS: usize = 4;

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Bounded Nelder–Mead minimization.
///
/// Converges when the simplex diameter, measured in the original (bounded)
/// coordinates, falls below `tol`. After each convergence the simplex is
/// rebuilt around the incumbent; the search stops once a restart no longer
/// improves it. Infinite or NaN objective values mark rejected points.
pub fn minimize<F>(f: F, x0: &[f64], bounds: &[Interval], tol: f64, max_iter: usize) -> Result<OptimResult>
where
    F: Fn(&[f64]) -> f64,
{
    if x0.len() != bounds.len() || x0.is_empty() {
        return Err(Error::Domain(format!(
            "start has {} coordinates but {} bounds were given",
            x0.len(),
            bounds.len()
        )));
    }
    if let Some((x, b)) = x0.iter().zip(bounds).find(|(x, b)| !b.contains(**x)) {
        return Err(Error::Domain(format!("start {x} outside [{}, {}]", b.lo(), b.hi())));
    }

    let tr = Transform { bounds };
    let f0 = sanitize(f(x0));
    let eval = |z: &[f64]| sanitize(f(&tr.to_bounded(z)));

    let mut best_z = tr.to_free(x0);
    let mut best_f = eval(&best_z);
    let mut iterations = 0;
    let mut converged = false;

    for restart in 0..=MAX_RESTARTS {
        let (z, fz, iters, conv) = nelder_mead(&eval, &tr, &best_z, best_f, tol, max_iter - iterations.min(max_iter));
        iterations += iters;
        let improved = fz < best_f - 1e-12 * (1.0 + best_f.abs());
        if fz <= best_f {
            best_z = z;
            best_f = fz;
        }
        converged = conv;
        if !conv || iterations >= max_iter || (restart > 0 && !improved) {
            break;
        }
    }

    let mut argmin = tr.to_bounded(&best_z);
    let mut value = best_f;
    // never hand back something worse than the caller's own start
    if !(value <= f0) && f0.is_finite() {
        argmin = x0.to_vec();
        value = f0;
    }
    Ok(OptimResult { argmin, value, iterations, converged: converged && value.is_finite() })
}

fn nelder_mead<E>(
    eval: &E,
    tr: &Transform<'_>,
    start: &[f64],
    f_start: f64,
    tol: f64,
    budget: usize,
) -> (Vec<f64>, f64, usize, bool)
where
    E: Fn(&[f64]) -> f64,
{
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    values.push(f_start);
    for i in 0..n {
        let mut v = start.to_vec();
        // step towards the interior so vertices near a bound stay informative
        v[i] += if start[i] > 0.0 { -INITIAL_STEP } else { INITIAL_STEP };
        values.push(eval(&v));
        simplex.push(v);
    }

    let mut iters = 0;
    loop {
        // order vertices best → worst
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        values = idx.iter().map(|&i| values[i]).collect();

        if diameter(tr, &simplex) < tol && values[0].is_finite() {
            return (simplex[0].clone(), values[0], iters, true);
        }
        if iters >= budget {
            return (simplex[0].clone(), values[0], iters, false);
        }
        iters += 1;

        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (c - w)).collect() };

        let xr = along(REFLECT);
        let fr = eval(&xr);
        if fr < values[0] {
            let xe = along(EXPAND);
            let fe = eval(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let xc = along(CONTRACT);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(-CONTRACT);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        // shrink towards the best vertex
        for i in 1..=n {
            for j in 0..n {
                simplex[i][j] = simplex[0][j] + SHRINK * (simplex[i][j] - simplex[0][j]);
            }
            values[i] = eval(&simplex[i]);
        }
    }
}

fn diameter(tr: &Transform<'_>, simplex: &[Vec<f64>]) -> f64 {
    let best = tr.to_bounded(&simplex[0]);
    simplex[1..]
        .iter()
        .map(|v| tr.to_bounded(v).iter().zip(&best).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}
