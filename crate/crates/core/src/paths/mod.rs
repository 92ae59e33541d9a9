//! Driving paths `w : [0, T] -> R^d` sampled on a uniform grid.
//!
//! Paths always start at the origin and are stored as values; consumers
//! read increments as differences of stored values.

mod fbm;
mod holder;
mod io;

pub use fbm::{fbm_autocovariance, generate_brownian, generate_fbm, FbmGenerator, FbmMethod};
pub use holder::{holder_exponent, HoelderEstimate};
pub use io::{read_path, write_path};

use crate::error::{Error, Result};

/// How a path was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathKind {
    Fbm { hurst: f64 },
    Brownian,
    Linear,
    Custom,
    Sum,
}

impl PathKind {
    pub fn name(&self) -> &'static str {
        match self {
            PathKind::Fbm { .. } => "fbm",
            PathKind::Brownian => "brownian",
            PathKind::Linear => "linear",
            PathKind::Custom => "custom",
            PathKind::Sum => "sum",
        }
    }
}

/// A `d`-dimensional path on the grid `t_k = k T / N`, `k = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    dim: usize,
    horizon: f64,
    n_steps: usize,
    /// Point-major: `values[k * dim + c]` is component `c` at `t_k`.
    values: Vec<f64>,
    kind: PathKind,
    seed: Option<u64>,
}

/// Deterministic path recipes.
#[derive(Debug, Clone, PartialEq)]
pub enum DeterministicKind {
    /// `w(t) = t`.
    Linear,
    /// User-supplied one-dimensional samples, `N + 1` of them.
    Custom(Vec<f64>),
}

impl SampledPath {
    /// Builds a path from raw point-major values. `values[0..dim]` is
    /// subtracted from every point so the path starts at the origin.
    pub fn from_values(
        dim: usize,
        horizon: f64,
        values: Vec<f64>,
        kind: PathKind,
        seed: Option<u64>,
    ) -> Result<Self> {
        check_grid(dim, horizon)?;
        if !values.len().is_multiple_of(dim) || values.len() / dim < 2 {
            return Err(Error::param("values", "need at least two grid points of full dimension"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("values", "non-finite sample"));
        }
        let n_steps = values.len() / dim - 1;
        let mut values = values;
        let origin: Vec<f64> = values[..dim].to_vec();
        if origin.iter().any(|&o| o != 0.0) {
            for (i, v) in values.iter_mut().enumerate() {
                *v -= origin[i % dim];
            }
        }
        Ok(Self { dim, horizon, n_steps, values, kind, seed })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn hurst(&self) -> Option<f64> {
        match self.kind {
            PathKind::Fbm { hurst } => Some(hurst),
            PathKind::Brownian => Some(0.5),
            _ => None,
        }
    }

    /// Grid spacing `T / N`.
    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.n_steps {
            self.horizon
        } else {
            self.horizon * k as f64 / self.n_steps as f64
        }
    }

    /// The point `w(t_k)`.
    pub fn point(&self, k: usize) -> &[f64] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }

    /// All samples, point-major.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Samples of component `c` as a contiguous vector of length `N + 1`.
    pub fn component(&self, c: usize) -> Vec<f64> {
        (0..=self.n_steps).map(|k| self.values[k * self.dim + c]).collect()
    }

    /// Projection `<e, w(t_k)>` onto a direction.
    pub fn project(&self, direction: &[f64]) -> Result<Vec<f64>> {
        if direction.len() != self.dim {
            return Err(Error::GridMismatch(format!(
                "direction has {} components, path has {}",
                direction.len(),
                self.dim
            )));
        }
        Ok((0..=self.n_steps)
            .map(|k| self.point(k).iter().zip(direction).map(|(w, e)| w * e).sum())
            .collect())
    }

    /// Nearest grid index of `t`, rejecting times outside `[0, T]`.
    pub fn snap(&self, t: f64) -> Result<usize> {
        if !(t >= -1e-12 * self.horizon && t <= self.horizon * (1.0 + 1e-12)) {
            return Err(Error::param("time", format!("{t} outside [0, {}]", self.horizon)));
        }
        Ok(((t / self.dt()).round() as usize).min(self.n_steps))
    }

    /// Exact grid index of `t`, rejecting times that are not grid points.
    pub fn grid_index(&self, t: f64) -> Result<usize> {
        let k = self.snap(t)?;
        if (self.time(k) - t).abs() > 1e-9 * self.horizon.max(1.0) {
            return Err(Error::OffGrid { time: t, horizon: self.horizon, n_steps: self.n_steps });
        }
        Ok(k)
    }

    /// The increment path `w^s_r = w_{s+r} - w_s` on `[0, T - t_s]`.
    pub fn shifted(&self, s_index: usize) -> Result<SampledPath> {
        if s_index >= self.n_steps {
            return Err(Error::param("s_index", "shift must leave at least one step"));
        }
        let base = self.point(s_index).to_vec();
        let values: Vec<f64> = self.values[s_index * self.dim..]
            .iter()
            .enumerate()
            .map(|(i, v)| v - base[i % self.dim])
            .collect();
        Ok(SampledPath {
            dim: self.dim,
            horizon: self.horizon - self.time(s_index),
            n_steps: self.n_steps - s_index,
            values,
            kind: self.kind,
            seed: self.seed,
        })
    }

    /// `c * w`, keeping the generation metadata.
    pub fn scaled(&self, c: f64) -> SampledPath {
        SampledPath { values: self.values.iter().map(|v| c * v).collect(), ..self.clone() }
    }

    /// `-w`; exact in floating point.
    pub fn negated(&self) -> SampledPath {
        SampledPath { values: self.values.iter().map(|v| -v).collect(), ..self.clone() }
    }

    /// Returns true when every sample equals the origin.
    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

fn check_grid(dim: usize, horizon: f64) -> Result<()> {
    if dim == 0 {
        return Err(Error::param("dim", "must be positive"));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::param("horizon", format!("must be positive, got {horizon}")));
    }
    Ok(())
}

/// Builds a deterministic one-dimensional path on `N` steps over `[0, T]`.
pub fn generate_deterministic(kind: DeterministicKind, n_steps: usize, horizon: f64) -> Result<SampledPath> {
    if n_steps == 0 {
        return Err(Error::param("n_steps", "must be positive"));
    }
    check_grid(1, horizon)?;
    match kind {
        DeterministicKind::Linear => {
            let values = (0..=n_steps)
                .map(|k| if k == n_steps { horizon } else { horizon * k as f64 / n_steps as f64 })
                .collect();
            SampledPath::from_values(1, horizon, values, PathKind::Linear, None)
        }
        DeterministicKind::Custom(values) => {
            if values.len() != n_steps + 1 {
                return Err(Error::GridMismatch(format!(
                    "custom path needs {} values, got {}",
                    n_steps + 1,
                    values.len()
                )));
            }
            SampledPath::from_values(1, horizon, values, PathKind::Custom, None)
        }
    }
}

/// Pointwise sum `p + q` on identical grids.
pub fn sum_paths(p: &SampledPath, q: &SampledPath) -> Result<SampledPath> {
    if p.dim != q.dim || p.n_steps != q.n_steps || p.horizon != q.horizon {
        return Err(Error::GridMismatch(format!(
            "(d, N, T) = ({}, {}, {}) vs ({}, {}, {})",
            p.dim, p.n_steps, p.horizon, q.dim, q.n_steps, q.horizon
        )));
    }
    let values = p.values.iter().zip(&q.values).map(|(a, b)| a + b).collect();
    Ok(SampledPath {
        dim: p.dim,
        horizon: p.horizon,
        n_steps: p.n_steps,
        values,
        kind: PathKind::Sum,
        seed: None,
    })
}

/// Tent path rising linearly to `peak` at `T / 2` and returning to zero.
pub fn tent_path(peak: f64, n_steps: usize, horizon: f64) -> Result<SampledPath> {
    if !n_steps.is_multiple_of(2) {
        return Err(Error::param("n_steps", "tent path needs an even number of steps"));
    }
    let half = n_steps / 2;
    let values = (0..=n_steps)
        .map(|k| peak * (half as f64 - (k as f64 - half as f64).abs()) / half as f64)
        .collect();
    generate_deterministic(DeterministicKind::Custom(values), n_steps, horizon)
}

/// Per-realization seed derived from a master seed (SplitMix64 finalizer).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
