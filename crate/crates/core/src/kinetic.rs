//! Kinetic function `chi`, velocity averages, and a checker for the weak
//! formulation with test functions transported along characteristics:
//!
//! ```text
//! int chi(t) psi(x - a(v) w_t, v) = int chi(0) psi(x, v) - int m(r, x, v) d_v[psi(x - a(v) w_r, v)]
//! ```

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::gauss_legendre;
use crate::paths::SampledPath;
use crate::solver::{Flux, GridSolution, KineticMeasure};

/// `+1` if `0 < v < u`, `-1` if `u < v < 0`, else `0` (including `v = 0` and `v = u`).
pub fn chi(u: f64, v: f64) -> i8 {
    if 0.0 < v && v < u {
        1
    } else if u < v && v < 0.0 {
        -1
    } else {
        0
    }
}

/// `chi(u(x_j), v_l)` on a single time slice.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticField {
    pub u: Vec<f64>,
    pub v_levels: Vec<f64>,
    /// Row-major `u.len() x v_levels.len()`.
    pub chi: Vec<i8>,
}

impl KineticField {
    pub fn new(u: &[f64], v_levels: &[f64]) -> Self {
        let chi = u.iter().flat_map(|&x| v_levels.iter().map(move |&v| chi(x, v))).collect();
        Self { u: u.to_vec(), v_levels: v_levels.to_vec(), chi }
    }

    pub fn at(&self, j: usize, l: usize) -> i8 {
        self.chi[j * self.v_levels.len() + l]
    }
}

/// `u^phi(x) = int chi(u(x), v) phi(v) dv = int_0^{u(x)} phi`, by the trapezoid
/// rule on the levels lying between `0` and `u(x)`, closed by partial cells at
/// both ends.
pub fn velocity_average<F: Fn(f64) -> f64>(u: &[f64], phi: F, v_levels: &[f64]) -> Result<Vec<f64>> {
    if v_levels.len() < 2 || v_levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("v_levels", "need at least two strictly increasing levels"));
    }
    let lo = u.iter().copied().fold(0.0, f64::min);
    let hi = u.iter().copied().fold(0.0, f64::max);
    if v_levels[0] > lo || v_levels[v_levels.len() - 1] < hi {
        return Err(Error::Coverage(format!(
            "levels [{}, {}] do not cover [{lo}, {hi}]",
            v_levels[0],
            v_levels[v_levels.len() - 1]
        )));
    }
    let phis: Vec<f64> = v_levels.iter().map(|v| phi(*v)).collect();
    let phi0 = phi(0.0);
    Ok(u
        .iter()
        .map(|&x| {
            if x == 0.0 {
                return 0.0;
            }
            let (a, b) = if x > 0.0 { (0.0, x) } else { (x, 0.0) };
            let (fa, fb) = (if x > 0.0 { phi0 } else { phi(x) }, if x > 0.0 { phi(x) } else { phi0 });
            let first = v_levels.partition_point(|v| *v <= a);
            let last = v_levels.partition_point(|v| *v < b);
            let mut total = 0.0;
            let (mut prev_v, mut prev_f) = (a, fa);
            for l in first..last {
                total += 0.5 * (v_levels[l] - prev_v) * (phis[l] + prev_f);
                prev_v = v_levels[l];
                prev_f = phis[l];
            }
            total += 0.5 * (b - prev_v) * (fb + prev_f);
            if x > 0.0 {
                total
            } else {
                -total
            }
        })
        .collect())
}

/// `psi(x, v) = e^{2 pi i n x} bump((v - center) / radius)` with the standard
/// `C^infty` bump `exp(1 - 1 / (1 - s^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestFunction {
    pub n: i32,
    pub bump_id: usize,
    pub center: f64,
    pub radius: f64,
}

impl TestFunction {
    pub fn bump(&self, v: f64) -> f64 {
        let s = (v - self.center) / self.radius;
        if s.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - s * s)).exp()
        }
    }

    pub fn bump_derivative(&self, v: f64) -> f64 {
        let s = (v - self.center) / self.radius;
        if s.abs() >= 1.0 {
            0.0
        } else {
            let q = 1.0 - s * s;
            self.bump(v) * (-2.0 * s / (q * q)) / self.radius
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.radius, self.center + self.radius)
    }
}

/// Spatial frequencies of the default catalog.
pub const CATALOG_FREQUENCIES: [i32; 7] = [0, 1, -1, 2, -2, 4, -4];
/// Bump radii of the default catalog, relative to the half-width of the level range.
pub const CATALOG_RADII: [f64; 3] = [0.99, 0.66, 0.33];

/// Every frequency in [`CATALOG_FREQUENCIES`] times three bumps centred on `[v_lo, v_hi]`.
pub fn default_catalog(v_lo: f64, v_hi: f64) -> Vec<TestFunction> {
    let center = 0.5 * (v_lo + v_hi);
    let half = 0.5 * (v_hi - v_lo);
    CATALOG_FREQUENCIES
        .iter()
        .flat_map(|&n| {
            CATALOG_RADII
                .iter()
                .enumerate()
                .map(move |(bump_id, r)| TestFunction { n, bump_id, center, radius: r * half })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeakFormEntry {
    pub n: i32,
    pub bump_id: usize,
    /// `|lhs - (initial - measure)|`.
    pub residual: f64,
    pub lhs: (f64, f64),
    pub initial: (f64, f64),
    pub measure: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakFormReport {
    pub entries: Vec<WeakFormEntry>,
    pub catalog: Vec<TestFunction>,
    pub max_residual: f64,
    pub t_eval: f64,
    pub nx: usize,
    pub n_levels: usize,
    /// Fraction of the last contributing time bin kept after truncating at `t_eval`.
    pub truncation_fraction: f64,
    /// Whether a measure was supplied (`false` means `m = 0`).
    pub with_measure: bool,
}

impl WeakFormReport {
    /// Rows `n,bump_id,residual` and a trailing `# max_residual` line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n,bump_id,residual")?;
        for e in &self.entries {
            writeln!(out, "{},{},{:.16e}", e.n, e.bump_id, e.residual)?;
        }
        writeln!(out, "# max_residual {:.16e}", self.max_residual)
    }
}

/// Gauss–Legendre panels covering a test function's support.
const V_PANELS: usize = 16;
const V_NODES: usize = 8;

struct VQuad {
    x: Vec<f64>,
    w: Vec<f64>,
}

/// `int_{x, v} chi(u(x), v) psi(x - a(v) shift, v)` for piecewise constant `u`.
fn transported_pairing(u: &[f64], psi: &TestFunction, flux: &Flux, shift: f64, q: &VQuad) -> Complex64 {
    let nx = u.len();
    let dx = 1.0 / nx as f64;
    let k = 2.0 * PI * psi.n as f64;
    let da = flux.derivative_coeffs();
    let a = |v: f64| da.iter().rev().fold(0.0, |acc, c| acc * v + c);
    let (s_lo, s_hi) = psi.support();
    let panel = (s_hi - s_lo) / V_PANELS as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for (j, &uj) in u.iter().enumerate() {
        if uj == 0.0 {
            continue;
        }
        // exact x-integral of e^{2 pi i n x} over the cell
        let cell = if psi.n == 0 {
            Complex64::new(dx, 0.0)
        } else {
            let (x0, x1) = (j as f64 * dx, (j + 1) as f64 * dx);
            (Complex64::from_polar(1.0, k * x1) - Complex64::from_polar(1.0, k * x0)) / Complex64::new(0.0, k)
        };
        let (lo, hi, sign) = if uj > 0.0 { (0.0f64, uj, 1.0) } else { (uj, 0.0, -1.0) };
        let (lo, hi) = (lo.max(s_lo), hi.min(s_hi));
        if lo >= hi {
            continue;
        }
        let mut v_int = Complex64::new(0.0, 0.0);
        for p in 0..V_PANELS {
            let (p0, p1) = (s_lo + p as f64 * panel, s_lo + (p + 1) as f64 * panel);
            let (c0, c1) = (p0.max(lo), p1.min(hi));
            if c0 >= c1 {
                continue;
            }
            let half = 0.5 * (c1 - c0);
            for (x, w) in q.x.iter().zip(&q.w) {
                let v = c0 + half * (x + 1.0);
                let phase = Complex64::from_polar(1.0, -k * a(v) * shift);
                v_int += w * half * psi.bump(v) * phase;
            }
        }
        total += sign * cell * v_int;
    }
    total
}

/// `int m(r, x, v) d_v[psi(x - a(v) w_r, v)]` over `r <= t_eval`, pairing each
/// measure cell with the integrand at its midpoint. Returns the pairing and
/// the kept fraction of the last contributing bin.
fn measure_pairing(m: &KineticMeasure, path: &SampledPath, psi: &TestFunction, flux: &Flux, t_eval: f64) -> (Complex64, f64) {
    let k = 2.0 * PI * psi.n as f64;
    let dx = 1.0 / m.nx as f64;
    let w = path.component(0);
    let w_at = |t: f64| {
        let s = t / path.dt();
        let i = (s.floor() as usize).min(path.n_steps() - 1);
        let f = s - i as f64;
        w[i] + f * (w[i + 1] - w[i])
    };
    let mut total = Complex64::new(0.0, 0.0);
    let mut kept = 1.0;
    for b in 0..m.n_bins() {
        let (t0, t1) = (m.t_edges[b], m.t_edges[b + 1]);
        if t0 >= t_eval {
            break;
        }
        let frac = if t1 > t_eval { (t_eval - t0) / (t1 - t0) } else { 1.0 };
        if frac < 1.0 {
            kept = frac;
        }
        let wm = w_at(0.5 * (t0 + t0 + frac * (t1 - t0)));
        for (l, &v) in m.v_levels.iter().enumerate() {
            let (bv, dbv) = (psi.bump(v), psi.bump_derivative(v));
            if bv == 0.0 && dbv == 0.0 {
                continue;
            }
            let shift = flux.a(v) * wm;
            let amp = Complex64::new(dbv, -k * flux.a_prime(v) * wm * bv);
            let vol = m.cell_volume(b, l) * frac;
            for j in 0..m.nx {
                let d = m.density_at(b, j, l);
                if d == 0.0 {
                    continue;
                }
                let x = (j as f64 + 0.5) * dx;
                total += d * vol * Complex64::from_polar(1.0, k * (x - shift)) * amp;
            }
        }
    }
    (total, kept)
}

/// Evaluates both sides of the transported weak formulation at `t_eval` for
/// every test function; `measure = None` means `m = 0`.
pub fn weak_form_residual(
    sol: &GridSolution,
    measure: Option<&KineticMeasure>,
    path: &SampledPath,
    flux: &Flux,
    t_eval: f64,
    catalog: &[TestFunction],
) -> Result<WeakFormReport> {
    if catalog.is_empty() {
        return Err(Error::param("catalog", "need at least one test function"));
    }
    let k_out = sol
        .times
        .iter()
        .position(|t| (t - t_eval).abs() <= 1e-12 * sol.path_horizon.max(1.0))
        .ok_or_else(|| Error::param("t_eval", format!("{t_eval} is not an output time")))?;
    let t_eval = sol.times[k_out];
    if path.n_steps() != sol.path_steps || path.horizon() != sol.path_horizon {
        return Err(Error::GridMismatch("path does not match the solution's driving path".into()));
    }
    let n_levels = match measure {
        Some(m) => {
            if m.nx != sol.nx {
                return Err(Error::GridMismatch(format!("measure has {} cells, solution {}", m.nx, sol.nx)));
            }
            let (lo, hi) = (m.v_levels[0], m.v_levels[m.v_levels.len() - 1]);
            if let Some(p) = catalog.iter().find(|p| p.support().0 < lo || p.support().1 > hi) {
                return Err(Error::Coverage(format!(
                    "test function support [{}, {}] exceeds levels [{lo}, {hi}]",
                    p.support().0,
                    p.support().1
                )));
            }
            m.v_levels.len()
        }
        None => 0,
    };
    let (gx, gw) = gauss_legendre(V_NODES);
    let quad = VQuad { x: gx, w: gw };
    let u_t = sol.slice(k_out);
    let w_t = path.component(0)[sol.time_indices[k_out]];
    let results: Vec<(WeakFormEntry, f64)> = catalog
        .par_iter()
        .map(|psi| {
            let lhs = transported_pairing(u_t, psi, flux, w_t, &quad);
            let initial = transported_pairing(&sol.u0, psi, flux, 0.0, &quad);
            let (meas, kept) = match measure {
                Some(m) => measure_pairing(m, path, psi, flux, t_eval),
                None => (Complex64::new(0.0, 0.0), 1.0),
            };
            let residual = (lhs - (initial - meas)).norm();
            let entry = WeakFormEntry {
                n: psi.n,
                bump_id: psi.bump_id,
                residual,
                lhs: (lhs.re, lhs.im),
                initial: (initial.re, initial.im),
                measure: (meas.re, meas.im),
            };
            (entry, kept)
        })
        .collect();
    let truncation_fraction = results.first().map_or(1.0, |r| r.1);
    let entries: Vec<WeakFormEntry> = results.into_iter().map(|r| r.0).collect();
    let max_residual = entries.iter().map(|e| e.residual).fold(0.0, f64::max);
    Ok(WeakFormReport {
        entries,
        catalog: catalog.to_vec(),
        max_residual,
        t_eval,
        nx: sol.nx,
        n_levels,
        truncation_fraction,
        with_measure: measure.is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::generate_fbm;
    use crate::solver::{default_v_levels, entropy_defect, make_flux, solve_rough};

    #[test]
    fn chi_cases() {
        assert_eq!(chi(2.0, 1.0), 1);
        assert_eq!(chi(-1.0, -0.5), -1);
        assert_eq!(chi(1.0, 2.0), 0);
        assert_eq!(chi(1.0, 1.0), 0);
        assert_eq!(chi(1.0, 0.0), 0);
        assert_eq!(chi(-1.0, 0.5), 0);
    }

    #[test]
    fn velocity_average_identities() {
        let levels: Vec<f64> = (0..64).map(|i| -1.0 + 2.0 * i as f64 / 63.0).collect();
        let u = [0.37, -0.81, 0.0, 1.0, -1.0];
        let avg = velocity_average(&u, |_| 1.0, &levels).unwrap();
        for (a, b) in avg.iter().zip(&u) {
            assert!((a - b).abs() < 1e-12);
        }
        let half = velocity_average(&[0.5; 3], |v| 2.0 * v, &levels).unwrap();
        assert!(half.iter().all(|x| (x - 0.25).abs() < 1e-12));
        assert!(velocity_average(&[1.5], |_| 1.0, &levels).is_err());
    }

    #[test]
    fn bump_derivative_matches_difference() {
        let p = TestFunction { n: 1, bump_id: 0, center: 0.1, radius: 0.7 };
        for v in [-0.4, 0.0, 0.3, 0.6] {
            let h = 1e-6;
            let fd = (p.bump(v + h) - p.bump(v - h)) / (2.0 * h);
            assert!((fd - p.bump_derivative(v)).abs() < 1e-7);
        }
        assert_eq!(p.bump(0.9), 0.0);
    }

    #[test]
    fn constant_solution_has_no_residual() {
        let f = make_flux(&[0.0, 0.0, 0.5]).unwrap();
        let p = generate_fbm(0.5, 1, 32, 1.0, 6).unwrap();
        let sol = solve_rough(&f, &p, &[0.4; 64], 64, 0.9, &[1.0]).unwrap();
        let levels = default_v_levels(&sol, 64, 0.05);
        let m = entropy_defect(&sol, &f, &p, &levels).unwrap();
        let cat = default_catalog(-1.0, 1.0);
        let r0 = weak_form_residual(&sol, None, &p, &f, 1.0, &cat).unwrap();
        assert!(r0.max_residual < 1e-8, "{}", r0.max_residual);
        let cat = default_catalog(levels[0], levels[63]);
        let r = weak_form_residual(&sol, Some(&m), &p, &f, 1.0, &cat).unwrap();
        assert!(r.max_residual < 1e-8, "{}", r.max_residual);
        assert_eq!(r.entries.len(), 21);
    }

    #[test]
    fn rejects_off_grid_and_uncovered_support() {
        let f = make_flux(&[0.0, 0.0, 0.5]).unwrap();
        let p = generate_fbm(0.5, 1, 32, 1.0, 6).unwrap();
        let u0: Vec<f64> = (0..32).map(|j| (j as f64 * 0.2).sin() * 0.5).collect();
        let sol = solve_rough(&f, &p, &u0, 32, 0.9, &[1.0]).unwrap();
        let levels = default_v_levels(&sol, 16, 0.05);
        let m = entropy_defect(&sol, &f, &p, &levels).unwrap();
        let cat = default_catalog(-5.0, 5.0);
        assert!(weak_form_residual(&sol, Some(&m), &p, &f, 1.0, &cat).is_err());
        assert!(weak_form_residual(&sol, None, &p, &f, 0.5, &cat).is_err());
    }
}
