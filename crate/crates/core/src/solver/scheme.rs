//! Monotone finite-volume solver for `du + d_x A(u) o dw = 0` on the unit torus.
//!
//! On each path step the equation is the autonomous law run for pseudo-time
//! `|dw_k|`, with the flux negated when `dw_k < 0`. Each step is sub-cycled so
//! that `max |a| dtau / dx <= cfl` over the range of the initial data.

use serde::Serialize;

use super::flux::{Flux, FluxTable, NumericalFlux};
use crate::error::{Error, Result};
use crate::paths::SampledPath;

/// The solution field at the requested output times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSolution {
    pub nx: usize,
    pub times: Vec<f64>,
    /// Path grid index of every output time.
    pub time_indices: Vec<usize>,
    /// Row-major `times.len() x nx` cell averages.
    pub u: Vec<f64>,
    pub u0: Vec<f64>,
    pub cfl: f64,
    pub scheme: NumericalFlux,
    pub path_ref: String,
    /// Total number of monotone substeps over the whole path.
    pub substeps: u64,
    pub path_steps: usize,
    pub path_horizon: f64,
}

impl GridSolution {
    pub fn dx(&self) -> f64 {
        1.0 / self.nx as f64
    }

    pub fn n_times(&self) -> usize {
        self.times.len()
    }

    /// `u(times[k], .)`.
    pub fn slice(&self, k: usize) -> &[f64] {
        &self.u[k * self.nx..(k + 1) * self.nx]
    }

    /// Cell centre of cell `j`.
    pub fn x_center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dx()
    }

    /// `sum_j u(times[k], x_j) dx`.
    pub fn mass(&self, k: usize) -> f64 {
        self.slice(k).iter().sum::<f64>() * self.dx()
    }

    /// `(min, max)` of the initial data.
    pub fn data_range(&self) -> (f64, f64) {
        data_range(&self.u0)
    }
}

pub(crate) fn data_range(u: &[f64]) -> (f64, f64) {
    u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(*x), hi.max(*x)))
}

/// Short identifier of a driving path.
pub fn path_ref(path: &SampledPath) -> String {
    let hurst = path.hurst().map_or_else(String::new, |h| format!(" H={h}"));
    let seed = path.seed().map_or_else(String::new, |s| format!(" seed={s}"));
    format!("{}{hurst}{seed} N={} T={}", path.kind().name(), path.n_steps(), path.horizon())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub cfl: f64,
    pub scheme: NumericalFlux,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { cfl: 0.9, scheme: NumericalFlux::EngquistOsher }
    }
}

/// Upper bound on CFL substeps within one path step.
const MAX_SUBSTEPS: f64 = 1e9;

/// Receives every substep of the engine.
pub(crate) trait SubstepObserver {
    fn substep(&mut self, step: usize, dtau: f64, dx: f64, table: &FluxTable, before: &[f64], after: &[f64]);
}

impl SubstepObserver for () {
    #[inline]
    fn substep(&mut self, _: usize, _: f64, _: f64, _: &FluxTable, _: &[f64], _: &[f64]) {}
}

pub(crate) struct EngineOutput {
    pub u: Vec<f64>,
    pub substeps: u64,
}

/// Runs the sign-aware substepping over the whole path, storing the state at
/// the path indices in `record` (sorted, unique).
pub(crate) fn run_engine<O: SubstepObserver>(
    flux: &Flux,
    path: &SampledPath,
    u0: &[f64],
    cfl: f64,
    scheme: NumericalFlux,
    record: &[usize],
    observer: &mut O,
) -> Result<EngineOutput> {
    let nx = u0.len();
    let dx = 1.0 / nx as f64;
    let (lo, hi) = data_range(u0);
    let amax = flux.max_speed(lo, hi);
    if !(amax.is_finite() && flux.eval(lo).is_finite() && flux.eval(hi).is_finite()) {
        return Err(Error::NonFinite { step: 0, detail: format!("flux overflows on the data range [{lo:e}, {hi:e}]") });
    }
    let forward = FluxTable::new(&flux.coeffs, scheme);
    let backward = FluxTable::new(&flux.negated().coeffs, scheme);
    let w = path.component(0);

    let mut u = u0.to_vec();
    let mut next = vec![0.0; nx];
    let mut faces = vec![0.0; nx];
    let mut out = Vec::with_capacity(record.len() * nx);
    let mut rec = record.iter().peekable();
    let mut substeps = 0u64;
    if rec.peek() == Some(&&0) {
        out.extend_from_slice(&u);
        rec.next();
    }
    for k in 0..path.n_steps() {
        let dw = w[k + 1] - w[k];
        if dw != 0.0 {
            let table = if dw > 0.0 { &forward } else { &backward };
            let tau = dw.abs();
            let n_sub = if amax > 0.0 { (tau * amax / (cfl * dx)).ceil().max(1.0) } else { 1.0 };
            if n_sub > MAX_SUBSTEPS {
                return Err(Error::param("cfl", format!("path step {k} needs {n_sub:e} substeps")));
            }
            let n_sub = n_sub as u64;
            let dtau = tau / n_sub as f64;
            let ratio = dtau / dx;
            for _ in 0..n_sub {
                for j in 0..nx - 1 {
                    faces[j] = table.flux(u[j], u[j + 1]);
                }
                faces[nx - 1] = table.flux(u[nx - 1], u[0]);
                next[0] = u[0] - ratio * (faces[0] - faces[nx - 1]);
                for j in 1..nx {
                    next[j] = u[j] - ratio * (faces[j] - faces[j - 1]);
                }
                observer.substep(k, dtau, dx, table, &u, &next);
                std::mem::swap(&mut u, &mut next);
            }
            substeps += n_sub;
            if let Some(j) = u.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite { step: k, detail: format!("cell {j} holds {}", u[j]) });
            }
        }
        if rec.peek() == Some(&&(k + 1)) {
            out.extend_from_slice(&u);
            rec.next();
        }
    }
    Ok(EngineOutput { u: out, substeps })
}

fn validate(path: &SampledPath, u0: &[f64], nx: usize, cfl: f64) -> Result<()> {
    if path.dim() != 1 {
        return Err(Error::param("path", format!("solver needs a one-dimensional path, got d = {}", path.dim())));
    }
    if nx < 2 {
        return Err(Error::param("nx", "need at least 2 cells"));
    }
    if u0.len() != nx {
        return Err(Error::GridMismatch(format!("u0 has {} cells, nx = {nx}", u0.len())));
    }
    if let Some(x) = u0.iter().find(|x| !x.is_finite()) {
        return Err(Error::param("u0", format!("non-finite initial value {x}")));
    }
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(Error::param("cfl", format!("must lie in (0, 1], got {cfl}")));
    }
    Ok(())
}

/// [`solve_rough_with`] using the Engquist–Osher flux.
pub fn solve_rough(
    flux: &Flux,
    path: &SampledPath,
    u0: &[f64],
    nx: usize,
    cfl: f64,
    output_times: &[f64],
) -> Result<GridSolution> {
    solve_rough_with(flux, path, u0, nx, output_times, &SolveOptions { cfl, ..SolveOptions::default() })
}

/// Solves the rough-flux law driven by `path` from cell averages `u0`.
/// Output times must lie on the path grid and be strictly increasing.
pub fn solve_rough_with(
    flux: &Flux,
    path: &SampledPath,
    u0: &[f64],
    nx: usize,
    output_times: &[f64],
    opts: &SolveOptions,
) -> Result<GridSolution> {
    validate(path, u0, nx, opts.cfl)?;
    let time_indices = output_times.iter().map(|&t| path.grid_index(t)).collect::<Result<Vec<_>>>()?;
    if time_indices.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("output_times", "must be strictly increasing"));
    }
    let run = run_engine(flux, path, u0, opts.cfl, opts.scheme, &time_indices, &mut ())?;
    Ok(GridSolution {
        nx,
        times: time_indices.iter().map(|&k| path.time(k)).collect(),
        time_indices,
        u: run.u,
        u0: u0.to_vec(),
        cfl: opts.cfl,
        scheme: opts.scheme,
        path_ref: path_ref(path),
        substeps: run.substeps,
        path_steps: path.n_steps(),
        path_horizon: path.horizon(),
    })
}

/// Discrete total variation on the torus.
pub fn total_variation(u: &[f64]) -> f64 {
    let n = u.len();
    (0..n).map(|j| (u[(j + 1) % n] - u[j]).abs()).sum()
}
