use crate::error::{Error, Result};

/// Settings for [`fletcher_reeves`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Stop when the Euclidean gradient norm falls to this value.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Sufficient-decrease constant of the backtracking line search.
    pub armijo_c1: f64,
    /// Abort with [`Error::Divergence`] once any coordinate exceeds this magnitude.
    pub divergence_bound: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            max_iterations: 10_000,
            armijo_c1: 1e-4,
            divergence_bound: 500.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Nonlinear conjugate gradients with the Fletcher–Reeves coefficient.
///
/// `f(x, grad)` returns the objective and writes the gradient. Directions are
/// reset to steepest descent every `n + 1` iterations and whenever the
/// conjugate direction stops being a descent direction. Step lengths come
/// from [`line_search`].
pub fn fletcher_reeves<F>(mut f: F, x0: Vec<f64>, opts: &SolverOptions) -> Result<Minimum>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0;
    let mut g = vec![0.0; n];
    let mut value = f(&x, &mut g);
    if !value.is_finite() {
        return Err(Error::Divergence { norm: inf_norm(&x) });
    }
    let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
    let mut since_restart = 0;
    let mut last_step = 1.0_f64;
    let mut trial = vec![0.0; n];
    let mut g_trial = vec![0.0; n];

    for iteration in 0..=opts.max_iterations {
        let gnorm = norm(&g);
        if gnorm <= opts.tolerance {
            return Ok(Minimum {
                x,
                value,
                gradient: g,
                iterations: iteration,
            });
        }
        if iteration == opts.max_iterations {
            return Err(Error::NonConvergence {
                iterations: iteration,
                gradient_norm: gnorm,
                best_lambdas: x,
            });
        }

        let mut slope = dot(&g, &d);
        if since_restart > n || slope >= 0.0 {
            d.iter_mut().zip(&g).for_each(|(di, gi)| *di = -gi);
            slope = -gnorm * gnorm;
            since_restart = 0;
        }

        let accepted = line_search(
            &mut f,
            &x,
            &d,
            value,
            slope,
            last_step.max(1e-8),
            opts.armijo_c1,
            &mut trial,
            &mut g_trial,
        );
        let Some((alpha, new_value)) = accepted else {
            if since_restart == 0 {
                // no progress even along steepest descent: numerically stalled
                return Err(Error::NonConvergence {
                    iterations: iteration,
                    gradient_norm: gnorm,
                    best_lambdas: x,
                });
            }
            since_restart = n + 1;
            continue;
        };
        last_step = alpha;
        std::mem::swap(&mut x, &mut trial);
        let beta = dot(&g_trial, &g_trial) / (gnorm * gnorm);
        std::mem::swap(&mut g, &mut g_trial);
        value = new_value;
        for i in 0..n {
            d[i] = -g[i] + beta * d[i];
        }
        since_restart += 1;

        let size = inf_norm(&x);
        if size > opts.divergence_bound {
            return Err(Error::Divergence { norm: size });
        }
    }
    unreachable!("loop returns on its last iteration")
}

/// Step length along `d`: a few safeguarded secant steps on the directional
/// derivative pick the trial step, then Armijo backtracking (halving)
/// guarantees sufficient decrease. On success `trial` and `g_trial` hold the
/// accepted point and its gradient.
#[allow(clippy::too_many_arguments)]
fn line_search<F>(
    f: &mut F,
    x: &[f64],
    d: &[f64],
    value: f64,
    slope: f64,
    alpha0: f64,
    c1: f64,
    trial: &mut [f64],
    g_trial: &mut [f64],
) -> Option<(f64, f64)>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let mut eval = |alpha: f64, trial: &mut [f64], g: &mut [f64]| -> (f64, f64) {
        for i in 0..x.len() {
            trial[i] = x[i] + alpha * d[i];
        }
        let v = f(trial, g);
        (v, dot(g, d))
    };
    // near the minimum the predicted decrease drops below the rounding error
    // of the objective itself; allow that much slack
    let noise = 8.0 * f64::EPSILON * value.abs().max(1.0);
    let armijo = |alpha: f64, v: f64| v.is_finite() && v <= value + c1 * alpha * slope + noise;

    // secant iterations on phi'(alpha) = 0; `lo` is an acceptable point
    // still descending, `hi` a point past the minimum (or unacceptable)
    let mut lo = (0.0, slope);
    let mut hi: Option<(f64, f64)> = None;
    let mut best: Option<(f64, f64)> = None;
    let mut alpha = alpha0;
    for _ in 0..12 {
        let (v, dphi) = eval(alpha, trial, g_trial);
        let ok = armijo(alpha, v);
        if ok && dphi.abs() <= 0.1 * slope.abs() {
            return Some((alpha, v));
        }
        if ok && best.is_none_or(|(_, bv)| v < bv) {
            best = Some((alpha, v));
        }
        let prev = lo;
        if ok && dphi < 0.0 {
            lo = (alpha, dphi);
        } else {
            hi = Some((alpha, if v.is_finite() { dphi } else { f64::NAN }));
        }
        alpha = match hi {
            None => {
                let ((a0, d0), (a1, d1)) = (prev, lo);
                let guess = if d1 > d0 {
                    a1 - d1 * (a1 - a0) / (d1 - d0)
                } else {
                    4.0 * a1
                };
                guess.clamp(1.5 * a1, 4.0 * a1)
            }
            Some((h, dh)) => {
                let (a0, d0) = lo;
                let width = h - a0;
                if dh.is_finite() && dh > 0.0 {
                    let guess = a0 - d0 * width / (dh - d0);
                    guess.clamp(a0 + 0.1 * width, h - 0.1 * width)
                } else {
                    a0 + 0.5 * width
                }
            }
        };
    }
    if let Some((a, _)) = best {
        let (v, _) = eval(a, trial, g_trial);
        return Some((a, v));
    }

    // fall back to plain backtracking
    let mut alpha = alpha0.max(1.0);
    loop {
        let (v, _) = eval(alpha, trial, g_trial);
        if armijo(alpha, v) {
            return Some((alpha, v));
        }
        alpha *= 0.5;
        if alpha < 1e-30 {
            return None;
        }
    }
}

fn inf_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}
