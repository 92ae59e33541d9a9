//! Scaling index `iota` from the decay of
//! `I(lambda; alpha) = int_0^T dr int_0^{T-r} dt e^{-lambda t} |w_{r+t} - w_r|^alpha`
//! like `lambda^{-1 - iota alpha}`.
//!
//! The inner `r`-integral is first reduced to a lag profile
//! `S(t_j) = int_0^{T - t_j} |w_{r + t_j} - w_r|^alpha dr` (trapezoid over `r`)
//! on a set of lags that is dense near zero and geometric beyond. `I` is then a
//! one-dimensional Laplace transform of `S`, integrated with Gauss–Legendre on
//! each lag cell under power-law interpolation of `S`. The first cell
//! `[0, t_1]` carries the integrable singularity of `S` at `t = 0` and uses a
//! power-law extrapolation fitted on the smallest lags.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{gauss_legendre, geomspace, line_fit, log_log_fit, median};
use crate::paths::SampledPath;

/// Fraction of exactly vanishing increments above which a path is flagged.
pub const ZERO_INCREMENT_LIMIT: f64 = 1e-3;
/// Lags `1..=DENSE_LAGS` are all kept.
const DENSE_LAGS: usize = 64;
const LAG_RATIO: f64 = 1.05;
/// Smallest lags used to fit the power law continued into `[0, t_1]`.
const HEAD_FIT_LAGS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaFit {
    pub alpha: f64,
    pub slope: f64,
    pub fit_quality: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IotaEstimate {
    /// Median of the per-`alpha` estimates, clamped to `[0, 1.5]`.
    pub iota_hat: f64,
    pub per_alpha: Vec<AlphaFit>,
    pub lambda_grid: Vec<f64>,
    /// Median over `alpha` of the fitted prefactor `e^{intercept}`.
    pub constant_c: f64,
    /// `I(lambda; alpha)`, one row per `alpha`, aligned with `lambda_grid`.
    pub integrals: Vec<Vec<f64>>,
    /// Fraction of `(r, t)` grid pairs with `w_{r+t} = w_r` exactly.
    pub zero_fraction: f64,
    /// Set when `zero_fraction` exceeds [`ZERO_INCREMENT_LIMIT`].
    pub flagged: bool,
}

impl IotaEstimate {
    pub fn per_alpha_iota(&self) -> Vec<f64> {
        self.per_alpha.iter().map(|f| (-1.0 - f.slope) / f.alpha).collect()
    }
}

/// Lags (in grid steps) at which the profile is sampled.
pub(crate) fn lag_set(n: usize) -> Vec<usize> {
    let mut lags: Vec<usize> = (1..=DENSE_LAGS.min(n)).collect();
    let mut j = DENSE_LAGS;
    while j < n {
        j = (j + 1).max((j as f64 * LAG_RATIO).round() as usize).min(n);
        lags.push(j);
    }
    lags
}

/// `S_alpha(t_j)` for every `alpha` (rows) and lag (columns), with the number
/// of vanishing increments encountered.
fn lag_profiles(path: &SampledPath, alphas: &[f64], lags: &[usize]) -> (Vec<Vec<f64>>, usize, usize) {
    let n = path.n_steps();
    let dt = path.dt();
    let d = path.dim();
    let mut out = vec![vec![0.0; lags.len()]; alphas.len()];
    let (mut zeros, mut total) = (0usize, 0usize);
    let mut logs = Vec::with_capacity(n + 1);
    for (il, &j) in lags.iter().enumerate() {
        logs.clear();
        for r in 0..=(n - j) {
            let a = path.point(r);
            let b = path.point(r + j);
            let sq: f64 = a.iter().zip(b).map(|(x, y)| (y - x) * (y - x)).sum();
            let weight = if n - j == 0 {
                0.0
            } else if r == 0 || r == n - j {
                0.5
            } else {
                1.0
            };
            total += 1;
            if sq == 0.0 {
                zeros += 1;
                continue;
            }
            logs.push((weight, if d == 1 { sq.sqrt().ln() } else { 0.5 * sq.ln() }));
        }
        for (ia, &alpha) in alphas.iter().enumerate() {
            out[ia][il] = dt * logs.iter().map(|&(wt, l)| wt * (alpha * l).exp()).sum::<f64>();
        }
    }
    (out, zeros, total)
}

struct Quadrature {
    nodes8: Vec<f64>,
    weights8: Vec<f64>,
    nodes16: Vec<f64>,
    weights16: Vec<f64>,
}

impl Quadrature {
    fn new() -> Self {
        let (nodes8, weights8) = gauss_legendre(8);
        let (nodes16, weights16) = gauss_legendre(16);
        Self { nodes8, weights8, nodes16, weights16 }
    }
}

/// `int_0^{t_last} e^{-lambda t} S(t) dt` from the sampled profile.
fn laplace_of_profile(lambda: f64, times: &[f64], s: &[f64], head_beta: f64, q: &Quadrature) -> f64 {
    // First cell: S(t) = S_1 (t / t_1)^beta; substituting t = t_1 u^{1/(1+beta)}
    // turns the integral into t_1 S_1 / (1 + beta) int_0^1 e^{-lambda t(u)} du.
    let (t1, s1) = (times[0], s[0]);
    let p = 1.0 / (1.0 + head_beta);
    let head: f64 = q
        .nodes16
        .iter()
        .zip(&q.weights16)
        .map(|(x, wt)| {
            let u = 0.5 * (x + 1.0);
            0.5 * wt * (-lambda * t1 * u.powf(p)).exp()
        })
        .sum();
    let mut total = t1 * s1 * p * head;
    for i in 0..times.len() - 1 {
        let (a, b) = (times[i], times[i + 1]);
        let (sa, sb) = (s[i], s[i + 1]);
        let half = 0.5 * (b - a);
        let power = if sa > 0.0 && sb > 0.0 { Some((sb / sa).ln() / (b / a).ln()) } else { None };
        for (x, wt) in q.nodes8.iter().zip(&q.weights8) {
            let t = a + half * (x + 1.0);
            let sv = match power {
                Some(beta) => sa * (t / a).powf(beta),
                None => sa + (sb - sa) * (t - a) / (b - a),
            };
            total += wt * half * (-lambda * t).exp() * sv;
        }
    }
    total
}

/// Estimates `iota` for each `alpha` from the slope of `log I` against `log lambda`.
pub fn estimate_iota(
    path: &SampledPath,
    alphas: &[f64],
    lambda_min: f64,
    lambda_max: f64,
    n_lambda: usize,
) -> Result<IotaEstimate> {
    if alphas.is_empty() {
        return Err(Error::param("alphas", "need at least one exponent"));
    }
    if let Some(a) = alphas.iter().find(|a| !(**a > -0.9 && **a < -0.1)) {
        return Err(Error::param("alphas", format!("each alpha must lie in (-0.9, -0.1), got {a}")));
    }
    if !(lambda_min >= 1.0) {
        return Err(Error::param("lambda_min", "must be at least 1"));
    }
    if !(lambda_max / lambda_min >= 16.0) || !lambda_max.is_finite() {
        return Err(Error::param("lambda_max", "need lambda_max / lambda_min >= 16"));
    }
    if n_lambda < 4 {
        return Err(Error::param("n_lambda", "need at least 4 values"));
    }
    let n = path.n_steps();
    if n < 2 * HEAD_FIT_LAGS {
        return Err(Error::param("n_steps", format!("need at least {} steps", 2 * HEAD_FIT_LAGS)));
    }
    let lags = lag_set(n);
    let times: Vec<f64> = lags.iter().map(|&j| j as f64 * path.dt()).collect();
    let (profiles, zeros, total) = lag_profiles(path, alphas, &lags);
    let zero_fraction = zeros as f64 / total as f64;
    let lambda_grid = geomspace(lambda_min, lambda_max, n_lambda);
    let quad = Quadrature::new();
    let log_lambda: Vec<f64> = lambda_grid.iter().map(|l| l.ln()).collect();

    let mut per_alpha = Vec::with_capacity(alphas.len());
    let mut integrals = Vec::with_capacity(alphas.len());
    let mut prefactors = Vec::with_capacity(alphas.len());
    for (&alpha, s) in alphas.iter().zip(&profiles) {
        if s[..HEAD_FIT_LAGS].iter().any(|v| *v <= 0.0) {
            return Err(Error::param("path", "increments vanish at the smallest lags"));
        }
        let head_beta = log_log_fit(&times[..HEAD_FIT_LAGS], &s[..HEAD_FIT_LAGS])
            .map_or(alpha, |f| f.slope)
            .max(-0.999);
        let vals: Vec<f64> =
            lambda_grid.iter().map(|&l| laplace_of_profile(l, &times, s, head_beta, &quad)).collect();
        let logs: Vec<f64> = vals.iter().map(|v| v.ln()).collect();
        let fit = line_fit(&log_lambda, &logs).ok_or_else(|| Error::param("lambda", "degenerate grid"))?;
        per_alpha.push(AlphaFit { alpha, slope: fit.slope, fit_quality: fit.r_squared });
        prefactors.push(fit.intercept.exp());
        integrals.push(vals);
    }
    let estimates: Vec<f64> = per_alpha.iter().map(|f| (-1.0 - f.slope) / f.alpha).collect();
    Ok(IotaEstimate {
        iota_hat: median(&estimates).clamp(0.0, 1.5),
        per_alpha,
        lambda_grid,
        constant_c: median(&prefactors),
        integrals,
        zero_fraction,
        flagged: zero_fraction > ZERO_INCREMENT_LIMIT,
    })
}
