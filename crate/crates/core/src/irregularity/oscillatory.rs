//! The oscillatory integrals `Phi_{s,t}(a) = int_s^t e^{i<a, w_r>} dr` and
//! `Psi_{s,t}(a, b) = int_s^t e^{i<a, w_r> - 2 b r} dr`.
//!
//! Between grid points the path is taken piecewise linear, so the exponent
//! is affine in `r` on every cell and each cell integral is evaluated in
//! closed form. This stays accurate when `|a| |w_{k+1} - w_k|` is of order
//! one or larger, where a trapezoid sum of the integrand would alias.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::paths::SampledPath;

/// `(e^z - 1) / z`, with its Taylor series near the origin.
pub(crate) fn expm1_over(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        let z2 = z * z;
        Complex64::new(1.0, 0.0) + z / 2.0 + z2 / 6.0 + z2 * z / 24.0 + z2 * z2 / 120.0
    } else {
        (z.exp() - 1.0) / z
    }
}

/// Projection of the path onto `a`, i.e. `<a, w(t_k)>` for every grid point.
pub(crate) fn phase_track(path: &SampledPath, a: &[f64]) -> Result<Vec<f64>> {
    if a.len() != path.dim() {
        return Err(Error::GridMismatch(format!(
            "frequency has {} components, path has {}",
            a.len(),
            path.dim()
        )));
    }
    path.project(a)
}

/// Exact integral of `exp(i theta(r) - 2 b r)` over cell `k` with `theta`
/// linear between `theta[k]` and `theta[k + 1]`.
#[inline]
pub(crate) fn cell_integral(theta: &[f64], k: usize, t_k: f64, dt: f64, b: f64) -> Complex64 {
    let start = Complex64::new(-2.0 * b * t_k, theta[k]);
    let slope = Complex64::new(-2.0 * b * dt, theta[k + 1] - theta[k]);
    dt * start.exp() * expm1_over(slope)
}

fn window_indices(path: &SampledPath, s: f64, t: f64) -> Result<(usize, usize)> {
    if !(s < t) {
        return Err(Error::param("window", format!("need s < t, got s = {s}, t = {t}")));
    }
    let i = path.snap(s)?;
    let j = path.snap(t)?;
    if i >= j {
        return Err(Error::param("window", "s and t snap to the same grid point"));
    }
    Ok((i, j))
}

/// `Psi^w_{s,t}(a, b)`, with `s` and `t` snapped to the nearest grid points.
pub fn psi(path: &SampledPath, a: &[f64], b: f64, s: f64, t: f64) -> Result<Complex64> {
    let (i, j) = window_indices(path, s, t)?;
    let theta = phase_track(path, a)?;
    let dt = path.dt();
    Ok((i..j).map(|k| cell_integral(&theta, k, path.time(k), dt, b)).sum())
}

/// `Phi^w_{s,t}(a)`; identical to `psi` with `b = 0`.
pub fn phi(path: &SampledPath, a: &[f64], s: f64, t: f64) -> Result<Complex64> {
    psi(path, a, 0.0, s, t)
}

/// `K^w(a, b) = sup_s |Psi^{w^s}_{0, T - s}(a, b)|` over grid values of `s`.
///
/// Evaluated by the backward recursion
/// `G(s_k) = I_k + exp(i <a, w_{k+1} - w_k> - 2 b dt) G(s_{k+1})`
/// in the shifted frame, so no factor `e^{2bs}` is ever formed.
pub fn k_sup(path: &SampledPath, a: &[f64], b: f64) -> Result<f64> {
    if b < 0.0 {
        return Err(Error::param("b", "must be nonnegative"));
    }
    let theta = phase_track(path, a)?;
    let dt = path.dt();
    let n = path.n_steps();
    let mut g = Complex64::new(0.0, 0.0);
    let mut best = 0.0f64;
    for k in (0..n).rev() {
        let slope = Complex64::new(-2.0 * b * dt, theta[k + 1] - theta[k]);
        let own = dt * expm1_over(slope);
        g = own + slope.exp() * g;
        best = best.max(g.norm());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::{generate_deterministic, generate_fbm, DeterministicKind};
    use std::f64::consts::PI;

    fn zero_path(n: usize) -> SampledPath {
        generate_deterministic(DeterministicKind::Custom(vec![0.0; n + 1]), n, 1.0).unwrap()
    }

    #[test]
    fn constant_path_gives_window_length() {
        let p = zero_path(64);
        for a in [0.0, 3.0, -17.5] {
            let v = phi(&p, &[a], 0.25, 0.75).unwrap();
            assert!((v.re - 0.5).abs() < 1e-14 && v.im.abs() < 1e-14);
        }
    }

    #[test]
    fn zero_frequency_gives_window_length() {
        let p = generate_fbm(0.4, 1, 128, 1.0, 5).unwrap();
        let v = phi(&p, &[0.0], 0.125, 1.0).unwrap();
        assert!((v.re - 0.875).abs() < 1e-14 && v.im.abs() < 1e-14);
    }

    #[test]
    fn linear_path_full_period_vanishes() {
        let p = generate_deterministic(DeterministicKind::Linear, 1 << 14, 1.0).unwrap();
        let v = phi(&p, &[2.0 * PI], 0.0, 1.0).unwrap();
        assert!(v.norm() < 1e-6, "{v}");
    }

    #[test]
    fn psi_zero_frequency_is_elementary() {
        let p = generate_fbm(0.6, 1, 256, 1.0, 2).unwrap();
        let b = 1.7;
        let (s, t) = (0.25, 0.875);
        let v = psi(&p, &[0.0], b, s, t).unwrap();
        let exact = ((-2.0 * b * s).exp() - (-2.0 * b * t).exp()) / (2.0 * b);
        assert!((v.re - exact).abs() < 1e-13 && v.im.abs() < 1e-14);
    }

    #[test]
    fn psi_with_zero_damping_is_phi_bitwise() {
        let p = generate_fbm(0.3, 2, 200, 1.0, 8).unwrap();
        let a = [4.0, -9.0];
        assert_eq!(psi(&p, &a, 0.0, 0.1, 0.9).unwrap(), phi(&p, &a, 0.1, 0.9).unwrap());
    }

    #[test]
    fn window_errors() {
        let p = zero_path(16);
        assert!(phi(&p, &[1.0], 0.5, 0.5).is_err());
        assert!(phi(&p, &[1.0], 0.6, 0.5).is_err());
        assert!(phi(&p, &[1.0], -0.5, 0.5).is_err());
        assert!(phi(&p, &[1.0], 0.0, 1.5).is_err());
        assert!(phi(&p, &[1.0, 2.0], 0.0, 1.0).is_err());
    }

    #[test]
    fn k_sup_elementary_cases() {
        let p = zero_path(512);
        let k = k_sup(&p, &[5.0], 1.0).unwrap();
        assert!((k - (1.0 - (-2.0f64).exp()) / 2.0).abs() < 1e-12);
        let q = generate_fbm(0.5, 1, 512, 1.0, 1).unwrap();
        assert!((k_sup(&q, &[0.0], 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(k_sup(&q, &[1.0], -1.0).is_err());
    }

    #[test]
    fn k_sup_matches_direct_maximum() {
        let p = generate_fbm(0.5, 1, 64, 1.0, 4).unwrap();
        let (a, b) = ([7.0], 0.8);
        let mut direct = 0.0f64;
        for s in 0..64 {
            let sh = p.shifted(s).unwrap();
            let v = psi(&sh, &a, b, 0.0, sh.horizon()).unwrap();
            direct = direct.max(v.norm());
        }
        assert!((k_sup(&p, &a, b).unwrap() - direct).abs() < 1e-13);
    }
}
