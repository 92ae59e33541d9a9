//! Exact fractional Brownian motion sampling.
//!
//! Increments (fractional Gaussian noise) are drawn by circulant embedding of
//! their Toeplitz covariance (Davies–Harte). When the embedding has a
//! negative eigenvalue the generator falls back to a Cholesky factor of the
//! covariance matrix itself.

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftPlanner};

use super::{PathKind, SampledPath};
use crate::error::{Error, Result};

/// Largest step count for which the Cholesky fallback is attempted.
const CHOLESKY_MAX_STEPS: usize = 4096;

/// Autocovariance of unit-step fractional Gaussian noise at lag `k`.
pub fn fbm_autocovariance(hurst: f64, k: usize) -> f64 {
    let k = k as f64;
    let h2 = 2.0 * hurst;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbmMethod {
    CirculantEmbedding,
    Cholesky,
}

enum Sampler {
    Circulant { sqrt_eig: Vec<f64>, fft: Arc<dyn Fft<f64>> },
    Cholesky { lower: Vec<f64> },
}

/// Reusable fBm sampler for a fixed `(H, d, N, T)`; each call to
/// [`FbmGenerator::sample`] is a pure function of the seed.
pub struct FbmGenerator {
    hurst: f64,
    dim: usize,
    n_steps: usize,
    horizon: f64,
    sampler: Sampler,
}

impl std::fmt::Debug for FbmGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FbmGenerator")
            .field("hurst", &self.hurst)
            .field("dim", &self.dim)
            .field("n_steps", &self.n_steps)
            .field("horizon", &self.horizon)
            .field("method", &self.method())
            .finish()
    }
}

fn validate(hurst: f64, dim: usize, n_steps: usize, horizon: f64) -> Result<()> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::param("hurst", format!("must lie in (0, 1), got {hurst}")));
    }
    if n_steps == 0 {
        return Err(Error::param("n_steps", "must be positive"));
    }
    if dim == 0 {
        return Err(Error::param("dim", "must be positive"));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::param("horizon", format!("must be positive, got {horizon}")));
    }
    Ok(())
}

impl FbmGenerator {
    /// Prefers circulant embedding, falling back to Cholesky.
    pub fn new(hurst: f64, dim: usize, n_steps: usize, horizon: f64) -> Result<Self> {
        validate(hurst, dim, n_steps, horizon)?;
        match circulant_sqrt_eigenvalues(hurst, n_steps) {
            Some((sqrt_eig, fft)) => Ok(Self {
                hurst,
                dim,
                n_steps,
                horizon,
                sampler: Sampler::Circulant { sqrt_eig, fft },
            }),
            None => Self::with_method(hurst, dim, n_steps, horizon, FbmMethod::Cholesky),
        }
    }

    /// Forces a particular synthesis method.
    pub fn with_method(hurst: f64, dim: usize, n_steps: usize, horizon: f64, method: FbmMethod) -> Result<Self> {
        validate(hurst, dim, n_steps, horizon)?;
        let sampler = match method {
            FbmMethod::CirculantEmbedding => {
                let (sqrt_eig, fft) = circulant_sqrt_eigenvalues(hurst, n_steps).ok_or_else(|| {
                    Error::param("n_steps", "circulant embedding is not nonnegative definite at this size")
                })?;
                Sampler::Circulant { sqrt_eig, fft }
            }
            FbmMethod::Cholesky => {
                if n_steps > CHOLESKY_MAX_STEPS {
                    return Err(Error::param(
                        "n_steps",
                        format!("Cholesky fallback limited to {CHOLESKY_MAX_STEPS} steps"),
                    ));
                }
                Sampler::Cholesky { lower: toeplitz_cholesky(hurst, n_steps)? }
            }
        };
        Ok(Self { hurst, dim, n_steps, horizon, sampler })
    }

    pub fn method(&self) -> FbmMethod {
        match self.sampler {
            Sampler::Circulant { .. } => FbmMethod::CirculantEmbedding,
            Sampler::Cholesky { .. } => FbmMethod::Cholesky,
        }
    }

    /// One path; components are independent and drawn in order from a
    /// single ChaCha8 stream seeded by `seed`.
    pub fn sample(&self, seed: u64) -> SampledPath {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.n_steps;
        let scale = (self.horizon / n as f64).powf(self.hurst);
        let mut values = vec![0.0; (n + 1) * self.dim];
        for c in 0..self.dim {
            let noise = self.unit_noise(&mut rng);
            let mut acc = 0.0;
            for (k, x) in noise.iter().enumerate() {
                acc += scale * x;
                values[(k + 1) * self.dim + c] = acc;
            }
        }
        SampledPath::from_values(self.dim, self.horizon, values, PathKind::Fbm { hurst: self.hurst }, Some(seed))
            .expect("generator parameters validated at construction")
    }

    /// Unit-step fractional Gaussian noise of length `N`.
    fn unit_noise(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let n = self.n_steps;
        match &self.sampler {
            Sampler::Circulant { sqrt_eig, fft } => {
                let mut buf: Vec<Complex64> = sqrt_eig
                    .iter()
                    .map(|s| {
                        let re: f64 = StandardNormal.sample(rng);
                        let im: f64 = StandardNormal.sample(rng);
                        Complex64::new(s * re, s * im)
                    })
                    .collect();
                fft.process(&mut buf);
                buf[..n].iter().map(|z| z.re).collect()
            }
            Sampler::Cholesky { lower } => {
                let z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
                (0..n)
                    .map(|i| {
                        let row = &lower[i * n..i * n + i + 1];
                        row.iter().zip(&z).map(|(l, zj)| l * zj).sum()
                    })
                    .collect()
            }
        }
    }
}

/// `sqrt(lambda_k / m)` for the minimal circulant embedding of size
/// `m = 2N`, or `None` if some eigenvalue is negative beyond roundoff.
fn circulant_sqrt_eigenvalues(hurst: f64, n: usize) -> Option<(Vec<f64>, Arc<dyn Fft<f64>>)> {
    let m = 2 * n;
    let mut row: Vec<Complex64> = (0..m)
        .map(|j| {
            let lag = if j <= n { j } else { m - j };
            Complex64::new(fbm_autocovariance(hurst, lag), 0.0)
        })
        .collect();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut row);
    let max = row.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    if row.iter().any(|z| z.re < -1e-10 * max) {
        return None;
    }
    let sqrt_eig = row.iter().map(|z| (z.re.max(0.0) / m as f64).sqrt()).collect();
    Some((sqrt_eig, fft))
}

/// Dense lower Cholesky factor (row-major `N x N`) of the fGn covariance.
fn toeplitz_cholesky(hurst: f64, n: usize) -> Result<Vec<f64>> {
    let gamma: Vec<f64> = (0..n).map(|k| fbm_autocovariance(hurst, k)).collect();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = gamma[i - j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::param("n_steps", "fGn covariance is not positive definite"));
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(l)
}

/// Samples a single fBm path with Hurst index `hurst`.
pub fn generate_fbm(hurst: f64, dim: usize, n_steps: usize, horizon: f64, seed: u64) -> Result<SampledPath> {
    Ok(FbmGenerator::new(hurst, dim, n_steps, horizon)?.sample(seed))
}

/// Standard Brownian motion from i.i.d. Gaussian increments.
pub fn generate_brownian(dim: usize, n_steps: usize, horizon: f64, seed: u64) -> Result<SampledPath> {
    validate(0.5, dim, n_steps, horizon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sd = (horizon / n_steps as f64).sqrt();
    let mut values = vec![0.0; (n_steps + 1) * dim];
    for c in 0..dim {
        let mut acc = 0.0;
        for k in 1..=n_steps {
            let z: f64 = StandardNormal.sample(&mut rng);
            acc += sd * z;
            values[k * dim + c] = acc;
        }
    }
    SampledPath::from_values(dim, horizon, values, PathKind::Brownian, Some(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(generate_fbm(0.0, 1, 16, 1.0, 0).is_err());
        assert!(generate_fbm(1.0, 1, 16, 1.0, 0).is_err());
        assert!(generate_fbm(0.5, 1, 0, 1.0, 0).is_err());
        assert!(generate_fbm(0.5, 1, 16, 0.0, 0).is_err());
        assert!(generate_fbm(0.5, 1, 16, -1.0, 0).is_err());
    }

    #[test]
    fn seeded_determinism() {
        let a = generate_fbm(0.3, 2, 256, 1.0, 11).unwrap();
        let b = generate_fbm(0.3, 2, 256, 1.0, 11).unwrap();
        assert_eq!(a.values(), b.values());
        let c = generate_fbm(0.3, 2, 256, 1.0, 12).unwrap();
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn shape_and_origin() {
        let p = generate_fbm(0.7, 3, 100, 2.0, 5).unwrap();
        assert_eq!(p.values().len(), 101 * 3);
        assert_eq!(p.point(0), &[0.0, 0.0, 0.0]);
        assert_eq!(p.hurst(), Some(0.7));
    }

    #[test]
    fn embedding_is_nonnegative_across_hurst() {
        for &h in &[0.05, 0.25, 0.5, 0.75, 0.95] {
            for &n in &[2usize, 7, 64, 1000] {
                let g = FbmGenerator::new(h, 1, n, 1.0).unwrap();
                assert_eq!(g.method(), FbmMethod::CirculantEmbedding, "H={h} N={n}");
            }
        }
    }

    #[test]
    fn cholesky_factor_reproduces_covariance() {
        let n = 12;
        let l = toeplitz_cholesky(0.8, n).unwrap();
        for i in 0..n {
            for j in 0..=i {
                let s: f64 = (0..=j).map(|k| l[i * n + k] * l[j * n + k]).sum();
                assert!((s - fbm_autocovariance(0.8, i - j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cholesky_method_samples() {
        let g = FbmGenerator::with_method(0.6, 1, 64, 1.0, FbmMethod::Cholesky).unwrap();
        let p = g.sample(3);
        assert_eq!(p.n_steps(), 64);
        assert_eq!(p.values(), g.sample(3).values());
    }

    #[test]
    fn half_hurst_autocovariance_is_white() {
        assert!((fbm_autocovariance(0.5, 0) - 1.0).abs() < 1e-15);
        for k in 1..10 {
            assert!(fbm_autocovariance(0.5, k).abs() < 1e-14);
        }
    }
}
