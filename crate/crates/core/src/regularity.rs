//! Fractional `L^1` regularity of periodic cell-average fields, and the
//! predicted regularity exponents.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::log_log_fit;

/// `omega(h) = ||u(. + h) - u||_{L^1(T)}` on dyadic lags.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusCurve {
    /// `h = 2^l dx`, increasing.
    pub lags: Vec<f64>,
    pub omega: Vec<f64>,
    pub field_l1: f64,
}

impl ModulusCurve {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "h,omega")?;
        for (h, w) in self.lags.iter().zip(&self.omega) {
            writeln!(out, "{h:.16e},{w:.16e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    /// Fitted exponent, clamped to `[0, 1]`.
    pub lambda_hat: f64,
    pub curve: ModulusCurve,
    /// Half-open index range of `curve.lags` used by the fit.
    pub fit_range: (usize, usize),
    pub fit_quality: f64,
    pub gagliardo: Option<Vec<(f64, f64)>>,
    pub time_averaged: bool,
    /// Set when the modulus vanishes on the fit range.
    pub smooth_field: bool,
}

/// Default fit window `[4 dx, 1/16]`.
pub fn default_fit_range(nx: usize) -> (f64, f64) {
    (4.0 / nx as f64, 1.0 / 16.0)
}

/// `sum_j |u_{j+s} - u_j| dx` for a cell shift `s`.
fn shift_l1(u: &[f64], s: usize) -> f64 {
    let nx = u.len();
    let dx = 1.0 / nx as f64;
    let s = s % nx;
    let tail = &u[s..];
    let mut total = 0.0;
    for (j, x) in u[..nx - s].iter().enumerate() {
        total += (tail[j] - x).abs();
    }
    for (j, x) in u[nx - s..].iter().enumerate() {
        total += (u[j] - x).abs();
    }
    total * dx
}

/// The modulus on the lags `2^l dx`, `l = 0..n_levels`.
pub fn l1_modulus(field: &[f64], n_levels: u32) -> Result<ModulusCurve> {
    let nx = field.len();
    if nx < 2 {
        return Err(Error::param("field", "need at least 2 cells"));
    }
    if n_levels < 4 {
        return Err(Error::param("n_levels", "need at least 4 levels"));
    }
    if n_levels >= usize::BITS || (1usize << n_levels) > nx {
        return Err(Error::param("n_levels", format!("2^{n_levels} exceeds nx = {nx}")));
    }
    let dx = 1.0 / nx as f64;
    let lags = (0..n_levels).map(|l| (1usize << l) as f64 * dx).collect();
    let omega = (0..n_levels).map(|l| shift_l1(field, 1usize << l)).collect();
    Ok(ModulusCurve { lags, omega, field_l1: field.iter().map(|x| x.abs()).sum::<f64>() * dx })
}

/// Mean of the modulus over equally spaced time slices.
pub fn time_averaged_modulus(slices: &[&[f64]], n_levels: u32) -> Result<ModulusCurve> {
    if slices.is_empty() {
        return Err(Error::param("slices", "need at least one time slice"));
    }
    let curves = slices.par_iter().map(|u| l1_modulus(u, n_levels)).collect::<Result<Vec<_>>>()?;
    let n = curves.len() as f64;
    let mut omega = vec![0.0; curves[0].omega.len()];
    let mut field_l1 = 0.0;
    for c in &curves {
        for (o, w) in omega.iter_mut().zip(&c.omega) {
            *o += w / n;
        }
        field_l1 += c.field_l1 / n;
    }
    Ok(ModulusCurve { lags: curves[0].lags.clone(), omega, field_l1 })
}

/// Slope of `log omega` against `log h` over the lags in `[fit_lo, fit_hi]`.
pub fn besov_exponent(curve: &ModulusCurve, fit_lo: f64, fit_hi: f64) -> Result<RegularityReport> {
    let eps = 1e-9;
    let start = curve.lags.partition_point(|h| *h < fit_lo * (1.0 - eps));
    let end = curve.lags.partition_point(|h| *h <= fit_hi * (1.0 + eps));
    if start >= end {
        return Err(Error::param("fit_range", format!("no lags in [{fit_lo}, {fit_hi}]")));
    }
    if end - start < 4 {
        return Err(Error::param("fit_range", format!("need at least 4 lags in [{fit_lo}, {fit_hi}], found {}", end - start)));
    }
    let (h, w) = (&curve.lags[start..end], &curve.omega[start..end]);
    let base = RegularityReport {
        lambda_hat: 1.0,
        curve: curve.clone(),
        fit_range: (start, end),
        fit_quality: 1.0,
        gagliardo: None,
        time_averaged: false,
        smooth_field: true,
    };
    if w.iter().any(|x| *x <= 0.0) {
        return Ok(base);
    }
    let fit = log_log_fit(h, w).ok_or_else(|| Error::param("fit_range", "degenerate lags"))?;
    Ok(RegularityReport { lambda_hat: fit.slope.clamp(0.0, 1.0), fit_quality: fit.r_squared, smooth_field: false, ..base })
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.05 && lambda < 0.95) {
        return Err(Error::param("lambda", format!("must lie in (0.05, 0.95), got {lambda}")));
    }
    Ok(())
}

/// `int_a^b (alpha + beta h) h^{-1-lambda} dh`.
fn linear_piece(alpha: f64, beta: f64, a: f64, b: f64, lambda: f64) -> f64 {
    let head = if alpha == 0.0 { 0.0 } else { alpha * (b.powf(-lambda) - a.powf(-lambda)) / -lambda };
    head + beta * (b.powf(1.0 - lambda) - a.powf(1.0 - lambda)) / (1.0 - lambda)
}

/// `int_{|h| <= 1/2} int_T |u(x + h) - u(x)| / |h|^{1 + lambda} dx dh`.
///
/// For cell averages `h -> omega(h)` is piecewise linear between cell shifts,
/// so the lag integral is done exactly on every shift interval. Cost is
/// `O(nx^2)`.
pub fn gagliardo_seminorm(field: &[f64], lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let nx = field.len();
    if nx < 2 {
        return Err(Error::param("field", "need at least 2 cells"));
    }
    let dx = 1.0 / nx as f64;
    let half = nx / 2;
    let omega: Vec<f64> = (0..=half).into_par_iter().map(|s| shift_l1(field, s)).collect();
    let mut total = 0.0;
    for s in 0..half {
        let (a, b) = (s as f64 * dx, (s + 1) as f64 * dx);
        let beta = (omega[s + 1] - omega[s]) / dx;
        let alpha = omega[s] - beta * a;
        total += linear_piece(alpha, beta, a, b, lambda);
    }
    if nx % 2 == 1 {
        // last partial interval up to 1/2, where omega is symmetric about 1/2
        let (a, b) = (half as f64 * dx, 0.5);
        total += linear_piece(omega[half], 0.0, a, b, lambda);
    }
    Ok(2.0 * total)
}

/// The same seminorm from a dyadic modulus curve: linear on `[0, h_0]`,
/// power-law interpolation between dyadic lags, and the last power law
/// continued to `1/2`.
pub fn gagliardo_from_modulus(curve: &ModulusCurve, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let (h, w) = (&curve.lags, &curve.omega);
    if h.len() < 2 {
        return Err(Error::param("curve", "need at least 2 lags"));
    }
    let power_piece = |h0: f64, w0: f64, p: f64, a: f64, b: f64| {
        let e = p - lambda;
        let scale = w0 * h0.powf(-p);
        if e.abs() < 1e-12 {
            scale * (b / a).ln()
        } else {
            scale * (b.powf(e) - a.powf(e)) / e
        }
    };
    let mut total = linear_piece(0.0, w[0] / h[0], 0.0, h[0], lambda);
    let mut last_p = 1.0;
    for i in 0..h.len() - 1 {
        let (a, b) = (h[i], h[i + 1]);
        if w[i] > 0.0 && w[i + 1] > 0.0 {
            let p = (w[i + 1] / w[i]).ln() / (b / a).ln();
            total += power_piece(a, w[i], p, a, b);
            last_p = p;
        } else {
            let beta = (w[i + 1] - w[i]) / (b - a);
            total += linear_piece(w[i] - beta * a, beta, a, b, lambda);
            last_p = 1.0;
        }
    }
    let (hl, wl) = (h[h.len() - 1], w[w.len() - 1]);
    if hl < 0.5 && wl > 0.0 {
        total += power_piece(hl, wl, last_p, hl, 0.5);
    }
    Ok(2.0 * total)
}

fn positive(name: &'static str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::param(name, format!("must be positive, got {x}")));
    }
    Ok(())
}

/// Exponent threshold for a `(rho, gamma)`-irregular, `eta`-Hölder path and a
/// flux of degeneracy `nu`:
/// `min([rho(eta+1) - (1-gamma)] / [(nu rho v 1)(eta+1) + (1-gamma)],
///      [rho + 2(nu rho v 1)] / [(nu rho v 1)(2 eta + 1) + (1-gamma)])`.
pub fn predicted_lambda_main(rho: f64, gamma: f64, eta: f64, nu: f64) -> Result<f64> {
    positive("rho", rho)?;
    positive("eta", eta)?;
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::param("gamma", format!("must lie in (0, 1], got {gamma}")));
    }
    if !(nu >= 1.0 && nu.is_finite()) {
        return Err(Error::param("nu", format!("must be at least 1, got {nu}")));
    }
    let m = (nu * rho).max(1.0);
    let g = 1.0 - gamma;
    let first = (rho * (eta + 1.0) - g) / (m * (eta + 1.0) + g);
    let second = (rho + 2.0 * m) / (m * (2.0 * eta + 1.0) + g);
    Ok(first.min(second))
}

/// `1 / ((nu v 2H)(H + 1) + H)`, the threshold for fBm driving.
pub fn predicted_lambda_fbm(hurst: f64, nu: f64) -> Result<f64> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::param("hurst", format!("must lie in (0, 1), got {hurst}")));
    }
    if !(nu >= 1.0 && nu.is_finite()) {
        return Err(Error::param("nu", format!("must be at least 1, got {nu}")));
    }
    Ok(1.0 / (nu.max(2.0 * hurst) * (hurst + 1.0) + hurst))
}

/// Velocity-average threshold `s* = (1 + eta - iota) / (1 + eta + iota)`.
pub fn predicted_s_star(eta: f64, iota: f64) -> Result<f64> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::param("eta", format!("must lie in (0, 1], got {eta}")));
    }
    if !(0.5..=1.0).contains(&iota) {
        return Err(Error::param("iota", format!("must lie in [1/2, 1], got {iota}")));
    }
    Ok((1.0 + eta - iota) / (1.0 + eta + iota))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interplay {
    pub nu2: f64,
    /// `nu2 >= 1`.
    pub feasible: bool,
}

/// Solves `nu2 (H2 + 1) + H2 = nu1 (H1 + 1) + H1` for `nu2`.
pub fn interplay_pairs(h1: f64, nu1: f64, h2: f64) -> Result<Interplay> {
    for (name, h) in [("h1", h1), ("h2", h2)] {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::param(name, format!("must lie in (0, 1), got {h}")));
        }
    }
    if !(nu1 >= 1.0 && nu1.is_finite()) {
        return Err(Error::param("nu1", format!("must be at least 1, got {nu1}")));
    }
    let nu2 = (nu1 * (h1 + 1.0) + h1 - h2) / (h2 + 1.0);
    Ok(Interplay { nu2, feasible: nu2 >= 1.0 })
}
