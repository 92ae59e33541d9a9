use super::SampledPath;
use crate::error::{Error, Result};
use crate::fit::log_log_fit;

/// Hölder exponent estimate from the sup-increment modulus on dyadic lags.
#[derive(Debug, Clone, PartialEq)]
pub struct HoelderEstimate {
    /// Fitted exponent, clamped to `[0, 1]`.
    pub eta_hat: f64,
    /// `(h, sup_k |w(t_k + h) - w(t_k)|)` for `h = 2^l dt`.
    pub modulus: Vec<(f64, f64)>,
    pub fit_quality: f64,
    /// Set for constant paths, where the modulus vanishes identically.
    pub degenerate: bool,
}

/// Fits the slope of `log M(h)` against `log h` over the lags
/// `h = 2^l T/N`, `l = 0..levels`.
pub fn holder_exponent(path: &SampledPath, levels: u32) -> Result<HoelderEstimate> {
    if levels < 3 {
        return Err(Error::param("h_dyadic_levels", "need at least 3 levels"));
    }
    let n = path.n_steps();
    if (1usize << levels) > n {
        return Err(Error::param("h_dyadic_levels", format!("2^{levels} exceeds N = {n}")));
    }
    let d = path.dim();
    let mut modulus = Vec::with_capacity(levels as usize);
    for l in 0..levels {
        let lag = 1usize << l;
        let mut sup = 0.0f64;
        for k in 0..=(n - lag) {
            let a = path.point(k);
            let b = path.point(k + lag);
            let inc = if d == 1 {
                (b[0] - a[0]).abs()
            } else {
                a.iter().zip(b).map(|(x, y)| (y - x) * (y - x)).sum::<f64>().sqrt()
            };
            sup = sup.max(inc);
        }
        modulus.push((lag as f64 * path.dt(), sup));
    }
    if modulus.iter().all(|&(_, m)| m == 0.0) {
        return Ok(HoelderEstimate { eta_hat: 1.0, modulus, fit_quality: 1.0, degenerate: true });
    }
    let pts: Vec<(f64, f64)> = modulus.iter().copied().filter(|&(_, m)| m > 0.0).collect();
    let (h, m): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let (eta, q) = match log_log_fit(&h, &m) {
        Some(f) => (f.slope.clamp(0.0, 1.0), f.r_squared),
        None => (1.0, 0.0),
    };
    Ok(HoelderEstimate { eta_hat: eta, modulus, fit_quality: q, degenerate: false })
}
