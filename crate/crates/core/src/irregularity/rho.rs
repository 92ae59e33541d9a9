//! Finite-grid estimates of the `(rho, gamma)`-irregularity norm
//! `sup_a sup_{s<t} (1 + |a|)^rho |Phi_{s,t}(a)| / (t - s)^gamma`.

use num_complex::Complex64;
use serde::Serialize;

use super::oscillatory::{cell_integral, phase_track};
use crate::error::{Error, Result};
use crate::fit::{geomspace, line_fit};
use crate::paths::SampledPath;

/// Frequency span of the default scan: `a` runs over `[a_max / 64, a_max]`.
pub const DEFAULT_FREQUENCY_DECADES: f64 = 64.0;
/// Default shortest window, in units of `1 / a_max`.
pub const DEFAULT_MIN_WINDOW_PERIODS: f64 = 4.0;
pub const DEFAULT_GAMMA: f64 = 0.55;

/// `|Phi_{s,t}(a)|` on a frequency grid times a set of dyadic windows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillatoryScan {
    pub a_grid: Vec<f64>,
    /// Unit direction the frequency magnitudes are applied along.
    pub direction: Vec<f64>,
    pub window_pairs: Vec<(f64, f64)>,
    /// Row-major `a_grid.len() x window_pairs.len()`.
    pub magnitudes: Vec<f64>,
}

impl OscillatoryScan {
    pub fn magnitude(&self, ia: usize, iw: usize) -> f64 {
        self.magnitudes[ia * self.window_pairs.len() + iw]
    }

    /// `max_{windows} |Phi| / (t - s)^gamma` for every frequency.
    pub fn sup_profile(&self, gamma: f64) -> Vec<f64> {
        (0..self.a_grid.len())
            .map(|ia| {
                self.window_pairs
                    .iter()
                    .enumerate()
                    .map(|(iw, &(s, t))| self.magnitude(ia, iw) / (t - s).powf(gamma))
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    /// `max_{a, windows} (1 + |a|)^rho |Phi| / (t - s)^gamma`.
    pub fn norm(&self, rho: f64, gamma: f64) -> f64 {
        self.sup_profile(gamma)
            .iter()
            .zip(&self.a_grid)
            .map(|(d, a)| (1.0 + a).powf(rho) * d)
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IrregularityReport {
    pub rho_hat: f64,
    pub gamma_used: f64,
    pub norm_estimate: f64,
    pub scan: OscillatoryScan,
    pub fit_quality: f64,
    /// Set for constant paths, whose `|Phi|` does not decay in `a`.
    pub degenerate: bool,
}

/// Scan layout for [`estimate_rho_gamma_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScanOptions {
    /// Lowest frequency is `a_max / frequency_span`.
    pub frequency_span: f64,
    /// Shortest dyadic window is the longest `T 2^{-m}` not below
    /// `min_window_periods / a_max` (and never below one grid cell).
    pub min_window_periods: f64,
    /// Direction of the frequency sweep for `d > 1`; defaults to the diagonal.
    pub direction: Option<Vec<f64>>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            frequency_span: DEFAULT_FREQUENCY_DECADES,
            min_window_periods: DEFAULT_MIN_WINDOW_PERIODS,
            direction: None,
        }
    }
}

/// Dyadic windows `[j T 2^{-m}, (j+1) T 2^{-m}]` for `m = 0..=depth`, as grid index pairs.
fn dyadic_windows(n_steps: usize, depth: u32) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for m in 0..=depth {
        let parts = 1usize << m;
        for j in 0..parts {
            out.push((j * n_steps / parts, (j + 1) * n_steps / parts));
        }
    }
    out
}

fn window_depth(path: &SampledPath, a_max: f64, periods: f64) -> u32 {
    let min_len = periods / a_max;
    let mut depth = 0u32;
    while depth < 62 {
        let next = depth + 1;
        let parts = 1usize << next;
        if parts > path.n_steps() || path.horizon() / parts as f64 + 1e-15 < min_len {
            break;
        }
        depth = next;
    }
    depth
}

/// `|Phi_{s,t}(a)|` for every `(a, window)` pair, via prefix sums of exact
/// cell integrals.
pub fn oscillatory_scan(
    path: &SampledPath,
    a_grid: &[f64],
    direction: &[f64],
    windows: &[(usize, usize)],
) -> Result<OscillatoryScan> {
    let dt = path.dt();
    let n = path.n_steps();
    let mut magnitudes = Vec::with_capacity(a_grid.len() * windows.len());
    let base = phase_track(path, direction)?;
    let mut prefix = vec![Complex64::new(0.0, 0.0); n + 1];
    for &a in a_grid {
        let theta: Vec<f64> = base.iter().map(|x| a * x).collect();
        for k in 0..n {
            prefix[k + 1] = prefix[k] + cell_integral(&theta, k, path.time(k), dt, 0.0);
        }
        magnitudes.extend(windows.iter().map(|&(i, j)| (prefix[j] - prefix[i]).norm()));
    }
    Ok(OscillatoryScan {
        a_grid: a_grid.to_vec(),
        direction: direction.to_vec(),
        window_pairs: windows.iter().map(|&(i, j)| (path.time(i), path.time(j))).collect(),
        magnitudes,
    })
}

/// [`estimate_rho_gamma_with`] using the default scan layout.
pub fn estimate_rho_gamma(path: &SampledPath, a_max: f64, n_a: usize, gamma: f64) -> Result<IrregularityReport> {
    estimate_rho_gamma_with(path, a_max, n_a, gamma, &ScanOptions::default())
}

/// Estimates the decay rate `rho` of `D(a) = sup_windows |Phi| / (t-s)^gamma`.
///
/// `rho_hat` is minus the slope of `log D(a)` against `log(1 + a)` over the
/// upper half of a geometric frequency grid; the low-frequency plateau is
/// excluded from the fit. The norm estimate uses `rho_hat` on the full grid.
pub fn estimate_rho_gamma_with(
    path: &SampledPath,
    a_max: f64,
    n_a: usize,
    gamma: f64,
    opts: &ScanOptions,
) -> Result<IrregularityReport> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::param("gamma", format!("must lie in (0, 1], got {gamma}")));
    }
    if n_a < 8 {
        return Err(Error::param("n_a", "need at least 8 frequencies"));
    }
    if !(a_max >= 4.0 && a_max.is_finite()) {
        return Err(Error::param("a_max", "must be at least 4"));
    }
    let direction = match &opts.direction {
        Some(e) => {
            let norm = e.iter().map(|x| x * x).sum::<f64>().sqrt();
            if e.len() != path.dim() || norm == 0.0 {
                return Err(Error::param("direction", "must be a nonzero vector of the path dimension"));
            }
            e.iter().map(|x| x / norm).collect()
        }
        None => vec![1.0 / (path.dim() as f64).sqrt(); path.dim()],
    };
    let a_grid = geomspace(a_max / opts.frequency_span, a_max, n_a);
    let depth = window_depth(path, a_max, opts.min_window_periods);
    let windows = dyadic_windows(path.n_steps(), depth);
    let scan = oscillatory_scan(path, &a_grid, &direction, &windows)?;
    let profile = scan.sup_profile(gamma);

    if path.is_constant() {
        let norm_estimate = scan.norm(0.0, gamma);
        return Ok(IrregularityReport {
            rho_hat: 0.0,
            gamma_used: gamma,
            norm_estimate,
            scan,
            fit_quality: 1.0,
            degenerate: true,
        });
    }

    let half = n_a / 2;
    let x: Vec<f64> = a_grid[half..].iter().map(|a| a.ln_1p()).collect();
    let y: Vec<f64> = profile[half..].iter().map(|d| d.max(f64::MIN_POSITIVE).ln()).collect();
    let fit = line_fit(&x, &y).ok_or_else(|| Error::param("a_grid", "degenerate frequency grid"))?;
    let rho_hat = (-fit.slope).max(0.0);
    let norm_estimate = scan.norm(rho_hat, gamma);
    Ok(IrregularityReport {
        rho_hat,
        gamma_used: gamma,
        norm_estimate,
        scan,
        fit_quality: fit.r_squared,
        degenerate: false,
    })
}

/// Outcome of re-evaluating the norm at interpolated exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterpolationCheck {
    pub kappa: f64,
    /// Finite-grid norm at `(rho kappa, 1 - kappa (1 - gamma))`.
    pub lhs: f64,
    /// `2^{1 - kappa} * norm^kappa`.
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

/// Checks `||Phi||_{rho k, 1 - k(1 - gamma)} <= 2^{1-k} ||Phi||_{rho,gamma}^k`
/// on the report's own grid.
pub fn check_interpolation(report: &IrregularityReport, kappa: f64) -> Result<InterpolationCheck> {
    const TOL: f64 = 1e-8;
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::param("kappa", format!("must lie in (0, 1], got {kappa}")));
    }
    let rho = report.rho_hat * kappa;
    let gamma = 1.0 - kappa * (1.0 - report.gamma_used);
    let lhs = report.scan.norm(rho, gamma);
    let rhs = 2f64.powf(1.0 - kappa) * report.norm_estimate.powf(kappa);
    let margin = rhs - lhs;
    Ok(InterpolationCheck { kappa, lhs, rhs, margin, pass: margin >= -TOL })
}
