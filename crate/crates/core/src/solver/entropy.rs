//! Discrete entropy production of the monotone scheme, collected into the
//! kinetic measure `m(t, x, v)`.
//!
//! For the Kruzhkov entropy `|u - v|` the scheme satisfies the cell entropy
//! inequality with the Crandall–Majda numerical entropy flux
//! `Q(ul, ur) = F(ul v v, ur v v) - F(ul ^ v, ur ^ v)`. The production of
//! `|u - v|` equals `2 m(., v)`, so each substep adds `P / 2 * dv` to the
//! `(time bin, cell, level)` mass, where `P` is the cell production.

use serde::Serialize;

use super::flux::{Flux, FluxTable};
use super::scheme::{data_range, path_ref, run_engine, GridSolution, SubstepObserver};
use crate::error::{Error, Result};
use crate::paths::SampledPath;

/// Relative size below which negative cell production is treated as roundoff.
pub const NEGATIVE_TOLERANCE: f64 = 1e-8;
/// Default number of Kruzhkov levels.
pub const DEFAULT_V_LEVELS: usize = 64;
/// Default relative margin of the level range around the data range.
pub const DEFAULT_V_MARGIN: f64 = 0.05;
/// Default upper bound on the number of time bins.
pub const DEFAULT_MAX_BINS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KineticMeasure {
    pub v_levels: Vec<f64>,
    /// Quadrature width of each level.
    pub dv: Vec<f64>,
    /// Bin boundaries in physical time; bin `b` is `[t_edges[b], t_edges[b+1]]`.
    pub t_edges: Vec<f64>,
    pub steps_per_bin: usize,
    pub nx: usize,
    /// `(bin, cell, level)` row-major densities, nonnegative after clamping.
    pub density: Vec<f64>,
    /// `sum |density| * cell volume`.
    pub total_variation: f64,
    /// `sum |a'(v)| |density| * cell volume`.
    pub weighted_tv: f64,
    /// Cells whose production fell below `-NEGATIVE_TOLERANCE * max density`.
    pub violations: usize,
    /// Most negative density seen before clamping (0 if none).
    pub worst_negative: f64,
    pub max_density: f64,
}

impl KineticMeasure {
    pub fn n_bins(&self) -> usize {
        self.t_edges.len() - 1
    }

    pub fn n_levels(&self) -> usize {
        self.v_levels.len()
    }

    fn index(&self, b: usize, j: usize, l: usize) -> usize {
        (b * self.nx + j) * self.v_levels.len() + l
    }

    pub fn density_at(&self, b: usize, j: usize, l: usize) -> f64 {
        self.density[self.index(b, j, l)]
    }

    pub fn cell_volume(&self, b: usize, l: usize) -> f64 {
        (self.t_edges[b + 1] - self.t_edges[b]) / self.nx as f64 * self.dv[l]
    }

    /// Measure of the `(b, j, l)` cell.
    pub fn mass(&self, b: usize, j: usize, l: usize) -> f64 {
        self.density_at(b, j, l) * self.cell_volume(b, l)
    }

    /// Mass per `(bin, level)`, summed over cells.
    pub fn bin_level_mass(&self, b: usize, l: usize) -> f64 {
        (0..self.nx).map(|j| self.mass(b, j, l)).sum()
    }

    /// Total mass over all cells.
    pub fn total_mass(&self) -> f64 {
        (0..self.n_bins())
            .flat_map(|b| (0..self.n_levels()).map(move |l| (b, l)))
            .map(|(b, l)| self.bin_level_mass(b, l))
            .sum()
    }

    /// Fails if any cell violated nonnegativity beyond the tolerance.
    pub fn ensure_nonnegative(&self) -> Result<()> {
        if self.violations > 0 {
            return Err(Error::NegativeEntropyProduction {
                count: self.violations,
                worst: self.worst_negative,
                tolerance: NEGATIVE_TOLERANCE * self.max_density,
            });
        }
        Ok(())
    }
}

/// `n` uniform levels spanning the data range of `sol` widened by `margin`
/// times its length on each side.
pub fn default_v_levels(sol: &GridSolution, n: usize, margin: f64) -> Vec<f64> {
    let (lo, hi) = sol.data_range();
    let pad = if hi > lo { margin * (hi - lo) } else { margin * lo.abs().max(1.0) };
    let (a, b) = (lo - pad, hi + pad);
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn trapezoid_widths(v: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; v.len()];
    for i in 0..v.len() - 1 {
        let h = 0.5 * (v[i + 1] - v[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    w
}

struct Collector<'a> {
    levels: &'a [f64],
    dv: Vec<f64>,
    steps_per_bin: usize,
    nx: usize,
    mass: Vec<f64>,
}

impl SubstepObserver for Collector<'_> {
    /// Levels outside the open range of `{u_{j-1}, u_j, u_{j+1}, u_j^new}`
    /// produce exactly nothing in cell `j` (the entropy update collapses to
    /// the scheme itself), so only the levels inside that range are visited.
    fn substep(&mut self, step: usize, dtau: f64, dx: f64, table: &FluxTable, before: &[f64], after: &[f64]) {
        let nx = self.nx;
        let nv = self.levels.len();
        let base = step / self.steps_per_bin * nx * nv;
        let q = |ul: f64, ur: f64, v: f64| table.flux(ul.max(v), ur.max(v)) - table.flux(ul.min(v), ur.min(v));
        for j in 0..nx {
            let ul = before[if j == 0 { nx - 1 } else { j - 1 }];
            let uc = before[j];
            let ur = before[if j == nx - 1 { 0 } else { j + 1 }];
            let un = after[j];
            let lo = ul.min(uc).min(ur).min(un);
            let hi = ul.max(uc).max(ur).max(un);
            let first = self.levels.partition_point(|v| *v <= lo);
            let last = self.levels.partition_point(|v| *v < hi);
            for l in first..last {
                let v = self.levels[l];
                let production = -(dx * ((un - v).abs() - (uc - v).abs()) + dtau * (q(uc, ur, v) - q(ul, uc, v)));
                self.mass[base + j * nv + l] += 0.5 * production * self.dv[l];
            }
        }
    }
}

/// [`entropy_defect_with`] with at most [`DEFAULT_MAX_BINS`] time bins.
pub fn entropy_defect(sol: &GridSolution, flux: &Flux, path: &SampledPath, v_levels: &[f64]) -> Result<KineticMeasure> {
    let spb = path.n_steps().div_ceil(DEFAULT_MAX_BINS).max(1);
    entropy_defect_with(sol, flux, path, v_levels, spb)
}

/// Reruns the scheme from `sol.u0` and records the Kruzhkov entropy
/// production at every level, binned by `steps_per_bin` path steps.
pub fn entropy_defect_with(
    sol: &GridSolution,
    flux: &Flux,
    path: &SampledPath,
    v_levels: &[f64],
    steps_per_bin: usize,
) -> Result<KineticMeasure> {
    if path.n_steps() != sol.path_steps || path.horizon() != sol.path_horizon || path_ref(path) != sol.path_ref {
        return Err(Error::GridMismatch(format!("solution was driven by `{}`, got `{}`", sol.path_ref, path_ref(path))));
    }
    if v_levels.len() < 2 || v_levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("v_levels", "need at least two strictly increasing levels"));
    }
    if steps_per_bin == 0 {
        return Err(Error::param("steps_per_bin", "must be positive"));
    }
    let (lo, hi) = data_range(&sol.u0);
    if v_levels[0] > lo || v_levels[v_levels.len() - 1] < hi {
        return Err(Error::Coverage(format!(
            "levels [{}, {}] do not span the data range [{lo}, {hi}]",
            v_levels[0],
            v_levels[v_levels.len() - 1]
        )));
    }
    let nx = sol.nx;
    let nv = v_levels.len();
    let n_bins = path.n_steps().div_ceil(steps_per_bin);
    let dv = trapezoid_widths(v_levels);
    let mut collector = Collector {
        levels: v_levels,
        dv: dv.clone(),
        steps_per_bin,
        nx,
        mass: vec![0.0; n_bins * nx * nv],
    };
    run_engine(flux, path, &sol.u0, sol.cfl, sol.scheme, &[], &mut collector)?;

    let t_edges: Vec<f64> = (0..=n_bins).map(|b| path.time((b * steps_per_bin).min(path.n_steps()))).collect();
    let dx = 1.0 / nx as f64;
    let mut density = collector.mass;
    for b in 0..n_bins {
        let dt = t_edges[b + 1] - t_edges[b];
        for j in 0..nx {
            for l in 0..nv {
                density[(b * nx + j) * nv + l] /= dt * dx * dv[l];
            }
        }
    }
    let max_density = density.iter().copied().fold(0.0, f64::max);
    let threshold = -NEGATIVE_TOLERANCE * max_density;
    let mut violations = 0;
    let mut worst_negative = 0.0f64;
    for d in density.iter_mut() {
        if *d < 0.0 {
            worst_negative = worst_negative.min(*d);
            if *d < threshold {
                violations += 1;
            } else {
                *d = 0.0;
            }
        }
    }
    let mut measure = KineticMeasure {
        v_levels: v_levels.to_vec(),
        dv,
        t_edges,
        steps_per_bin,
        nx,
        density,
        total_variation: 0.0,
        weighted_tv: 0.0,
        violations,
        worst_negative,
        max_density,
    };
    let a_prime: Vec<f64> = v_levels.iter().map(|v| flux.a_prime(*v).abs()).collect();
    let (mut tv, mut wtv) = (0.0, 0.0);
    for b in 0..n_bins {
        for j in 0..nx {
            for l in 0..nv {
                let m = measure.mass(b, j, l).abs();
                tv += m;
                wtv += a_prime[l] * m;
            }
        }
    }
    measure.total_variation = tv;
    measure.weighted_tv = wtv;
    Ok(measure)
}
