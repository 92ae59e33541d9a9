//! Polynomial fluxes `A(u) = sum_i c_i u^i` and their monotone numerical fluxes.

use serde::Serialize;

use crate::error::{Error, Result};

/// Default interval for the non-degeneracy check done by [`make_flux`].
pub const DEFAULT_V_RANGE: (f64, f64) = (-1.0, 1.0);
const DEFAULT_N_GRID: usize = 256;

/// A flux `A`, with `c_i` the coefficient of `u^i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Flux {
    pub coeffs: Vec<f64>,
    /// Degeneracy order used for `c_estimate`.
    pub nu: f64,
    /// `min |a(v2) - a(v1)| / |v2 - v1|^nu` on the working range.
    pub c_estimate: f64,
}

pub(crate) fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, ci| acc * x + ci)
}

pub(crate) fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(i, ci)| i as f64 * ci).collect()
}

fn trim(c: &[f64]) -> &[f64] {
    let end = c.iter().rposition(|x| *x != 0.0).map_or(0, |i| i + 1);
    &c[..end]
}

/// All real roots of the polynomial `c` in `[lo, hi]`, increasing.
///
/// Roots of `c` are separated by roots of its derivative; on each monotone
/// piece a sign change is located by bisection to full precision.
pub(crate) fn real_roots(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let c = trim(c);
    match c.len() {
        0 | 1 => Vec::new(),
        2 => {
            let r = -c[0] / c[1];
            if (lo..=hi).contains(&r) {
                vec![r]
            } else {
                Vec::new()
            }
        }
        _ => {
            let mut knots = vec![lo];
            knots.extend(real_roots(&derivative(c), lo, hi));
            knots.push(hi);
            let mut roots: Vec<f64> = Vec::new();
            for w in knots.windows(2) {
                let (mut a, mut b) = (w[0], w[1]);
                let (fa, fb) = (horner(c, a), horner(c, b));
                let r = if fa == 0.0 {
                    a
                } else if fb == 0.0 {
                    b
                } else if fa.signum() != fb.signum() {
                    let neg_left = fa < 0.0;
                    loop {
                        let m = 0.5 * (a + b);
                        if m <= a || m >= b {
                            break m;
                        }
                        if (horner(c, m) < 0.0) == neg_left {
                            a = m;
                        } else {
                            b = m;
                        }
                    }
                } else {
                    continue;
                };
                if roots.last().is_none_or(|last| r > *last) {
                    roots.push(r);
                }
            }
            roots
        }
    }
}

/// Cauchy bound on the moduli of all roots.
fn root_bound(c: &[f64]) -> f64 {
    let c = trim(c);
    if c.len() < 2 {
        return 1.0;
    }
    let lead = c[c.len() - 1].abs();
    1.0 + c[..c.len() - 1].iter().map(|x| x.abs() / lead).fold(0.0, f64::max)
}

impl Flux {
    pub fn eval(&self, u: f64) -> f64 {
        horner(&self.coeffs, u)
    }

    /// `a(v) = A'(v)`.
    pub fn a(&self, v: f64) -> f64 {
        horner(&derivative(&self.coeffs), v)
    }

    /// `a'(v) = A''(v)`.
    pub fn a_prime(&self, v: f64) -> f64 {
        horner(&derivative(&derivative(&self.coeffs)), v)
    }

    pub fn derivative_coeffs(&self) -> Vec<f64> {
        derivative(&self.coeffs)
    }

    /// `max |a|` over `[lo, hi]`, from the endpoints and the critical points of `a`.
    pub fn max_speed(&self, lo: f64, hi: f64) -> f64 {
        let da = derivative(&self.coeffs);
        let dda = derivative(&da);
        let mut m = horner(&da, lo).abs().max(horner(&da, hi).abs());
        for r in real_roots(&dda, lo, hi) {
            m = m.max(horner(&da, r).abs());
        }
        m
    }

    /// `-A`.
    pub fn negated(&self) -> Flux {
        Flux { coeffs: self.coeffs.iter().map(|c| -c).collect(), nu: self.nu, c_estimate: self.c_estimate }
    }

    pub fn is_burgers(&self) -> bool {
        trim(&self.coeffs) == [0.0, 0.0, 0.5]
    }
}

/// Degeneracy order of `a` on `range`: one plus the largest multiplicity of a
/// critical point of `a` there. `None` when `a` is constant or not monotone.
fn degeneracy_order(da: &[f64], range: (f64, f64)) -> Option<f64> {
    let da = trim(da);
    if da.len() < 2 {
        return None;
    }
    let dda = derivative(da);
    let crit = real_roots(&dda, range.0, range.1);
    let scale = da.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let tol = 1e-10 * scale.max(1.0);
    let mut order = 1usize;
    for r in crit {
        // multiplicity of r as a root of a'
        let mut k = 1usize;
        let mut p = derivative(&dda);
        while k < da.len() && horner(&p, r).abs() <= tol {
            k += 1;
            p = derivative(&p);
        }
        if k % 2 == 1 {
            // odd multiplicity: a' changes sign, so a is not injective
            return None;
        }
        order = order.max(k + 1);
    }
    Some(order as f64)
}

/// Builds a flux from polynomial coefficients. `nu` is set to the smallest
/// order for which `a` is non-degenerate on [`DEFAULT_V_RANGE`], and
/// `c_estimate` is measured there; degenerate fluxes get `c_estimate = 0`.
pub fn make_flux(coeffs: &[f64]) -> Result<Flux> {
    if coeffs.is_empty() {
        return Err(Error::param("coeffs", "empty coefficient list"));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::param("coeffs", "coefficients must be finite"));
    }
    if trim(coeffs).len() < 2 {
        return Err(Error::param("coeffs", "flux must have degree at least 1"));
    }
    let da = derivative(coeffs);
    let mut flux = Flux { coeffs: coeffs.to_vec(), nu: 1.0, c_estimate: 0.0 };
    match degeneracy_order(&da, DEFAULT_V_RANGE) {
        Some(nu) => {
            check_nondegeneracy(&mut flux, nu, DEFAULT_V_RANGE, DEFAULT_N_GRID)?;
        }
        None => {
            flux.nu = (trim(coeffs).len() - 1) as f64;
        }
    }
    Ok(flux)
}

/// `min |a(v2) - a(v1)| / |v2 - v1|^nu` over pairs of a uniform grid on
/// `v_range`; the result and `nu` are stored in `flux`.
pub fn check_nondegeneracy(flux: &mut Flux, nu: f64, v_range: (f64, f64), n_grid: usize) -> Result<f64> {
    if n_grid < 64 {
        return Err(Error::param("n_grid", "need at least 64 grid points"));
    }
    if !(nu >= 1.0) {
        return Err(Error::param("nu", "must be at least 1"));
    }
    let (lo, hi) = v_range;
    if !(lo < hi) {
        return Err(Error::param("v_range", "need lo < hi"));
    }
    let da = derivative(&flux.coeffs);
    let v: Vec<f64> = (0..n_grid).map(|i| lo + (hi - lo) * i as f64 / (n_grid - 1) as f64).collect();
    let a: Vec<f64> = v.iter().map(|x| horner(&da, *x)).collect();
    let mut c = f64::INFINITY;
    for i in 0..n_grid {
        for j in i + 1..n_grid {
            let dv = v[j] - v[i];
            let den = if nu == 1.0 { dv } else { dv.powf(nu) };
            c = c.min((a[j] - a[i]).abs() / den);
        }
    }
    flux.nu = nu;
    flux.c_estimate = c;
    Ok(c)
}

/// Choice of two-point monotone flux.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum NumericalFlux {
    #[default]
    EngquistOsher,
    Godunov,
}

impl NumericalFlux {
    pub fn name(&self) -> &'static str {
        match self {
            NumericalFlux::EngquistOsher => "engquist-osher",
            NumericalFlux::Godunov => "godunov",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "engquist-osher" | "eo" => Some(NumericalFlux::EngquistOsher),
            "godunov" => Some(NumericalFlux::Godunov),
            _ => None,
        }
    }
}

/// Precomputed two-point flux `F(ul, ur)` for a polynomial `A`.
#[derive(Debug, Clone)]
pub(crate) struct FluxTable {
    coeffs: Vec<f64>,
    kind: NumericalFlux,
    burgers_sign: Option<f64>,
    /// Roots of `a`, increasing, with `0` merged in.
    knots: Vec<f64>,
    /// `int_0^{knot} max(a, 0)` at each knot.
    plus_at_knot: Vec<f64>,
    /// Whether `a > 0` on `(knots[i], knots[i + 1])`; one extra entry on each side.
    positive: Vec<bool>,
    roots: Vec<f64>,
}

impl FluxTable {
    pub(crate) fn new(coeffs: &[f64], kind: NumericalFlux) -> Self {
        let da = derivative(coeffs);
        let bound = root_bound(&da);
        let roots = real_roots(&da, -bound, bound);
        let mut knots = roots.clone();
        if !knots.contains(&0.0) {
            knots.push(0.0);
            knots.sort_by(f64::total_cmp);
        }
        // sign of a on each gap, including the two unbounded ends
        let mut positive = Vec::with_capacity(knots.len() + 1);
        positive.push(horner(&da, knots[0] - 1.0) > 0.0);
        for w in knots.windows(2) {
            positive.push(horner(&da, 0.5 * (w[0] + w[1])) > 0.0);
        }
        positive.push(horner(&da, knots[knots.len() - 1] + 1.0) > 0.0);
        let zero = knots.iter().position(|k| *k == 0.0).unwrap();
        let mut plus_at_knot = vec![0.0; knots.len()];
        for i in zero + 1..knots.len() {
            let gain = if positive[i] { horner(coeffs, knots[i]) - horner(coeffs, knots[i - 1]) } else { 0.0 };
            plus_at_knot[i] = plus_at_knot[i - 1] + gain;
        }
        for i in (0..zero).rev() {
            let gain = if positive[i + 1] { horner(coeffs, knots[i]) - horner(coeffs, knots[i + 1]) } else { 0.0 };
            plus_at_knot[i] = plus_at_knot[i + 1] + gain;
        }
        let t = trim(coeffs);
        let burgers_sign = if t.len() == 3 && t[0] == 0.0 && t[1] == 0.0 && t[2].abs() == 0.5 {
            Some(t[2].signum())
        } else {
            None
        };
        Self { coeffs: coeffs.to_vec(), kind, burgers_sign, knots, plus_at_knot, positive, roots }
    }

    #[inline]
    pub(crate) fn a_flux(&self, u: f64) -> f64 {
        horner(&self.coeffs, u)
    }

    /// `A+(u) = int_0^u max(a, 0)`.
    #[inline]
    fn plus(&self, u: f64) -> f64 {
        // gap index g: knots[g-1] <= u < knots[g]
        let g = self.knots.partition_point(|k| *k <= u);
        if u >= 0.0 {
            let k = g - 1;
            let tail = if self.positive[g] { self.a_flux(u) - self.a_flux(self.knots[k]) } else { 0.0 };
            self.plus_at_knot[k] + tail
        } else {
            let tail = if self.positive[g] { self.a_flux(u) - self.a_flux(self.knots[g]) } else { 0.0 };
            self.plus_at_knot[g] + tail
        }
    }

    #[inline]
    pub(crate) fn flux(&self, ul: f64, ur: f64) -> f64 {
        match self.kind {
            NumericalFlux::EngquistOsher => {
                if let Some(s) = self.burgers_sign {
                    return if s > 0.0 {
                        0.5 * (ul.max(0.0) * ul.max(0.0) + ur.min(0.0) * ur.min(0.0))
                    } else {
                        -0.5 * (ul.min(0.0) * ul.min(0.0) + ur.max(0.0) * ur.max(0.0))
                    };
                }
                // A(0) + A+(ul) + A-(ur) with A- = A - A(0) - A+
                self.plus(ul) + self.a_flux(ur) - self.plus(ur)
            }
            NumericalFlux::Godunov => {
                let (lo, hi) = if ul <= ur { (ul, ur) } else { (ur, ul) };
                let mut best = self.a_flux(ul);
                let pick = |x: f64, y: f64| if ul <= ur { x.min(y) } else { x.max(y) };
                best = pick(best, self.a_flux(ur));
                for &r in &self.roots {
                    if r > lo && r < hi {
                        best = pick(best, self.a_flux(r));
                    }
                }
                best
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn burgers_flux() {
        let f = make_flux(&[0.0, 0.0, 0.5]).unwrap();
        assert_eq!(f.a(0.3), 0.3);
        assert_eq!(f.nu, 1.0);
        assert_eq!(f.c_estimate, 1.0);
        assert!(f.is_burgers());
    }

    #[test]
    fn linear_flux_is_degenerate() {
        let f = make_flux(&[0.0, 1.0]).unwrap();
        assert_eq!(f.a(5.0), 1.0);
        assert_eq!(f.c_estimate, 0.0);
        let mut g = f.clone();
        for nu in [1.0, 2.0, 3.5] {
            assert_eq!(check_nondegeneracy(&mut g, nu, (-1.0, 1.0), 64).unwrap(), 0.0);
        }
    }

    #[test]
    fn quartic_flux_order_three() {
        let f = make_flux(&[0.0, 0.0, 0.0, 0.0, 0.25]).unwrap();
        assert_eq!(f.a(0.5), 0.125);
        assert_eq!(f.nu, 3.0);
        assert!((f.c_estimate - 0.25).abs() < 1e-12, "{}", f.c_estimate);
    }

    #[test]
    fn burgers_order_two_gives_half() {
        let mut f = make_flux(&[0.0, 0.0, 0.5]).unwrap();
        let c = check_nondegeneracy(&mut f, 2.0, (-1.0, 1.0), 101).unwrap();
        assert!((c - 0.5).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_coefficients() {
        assert!(make_flux(&[]).is_err());
        assert!(make_flux(&[3.0]).is_err());
        assert!(make_flux(&[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn roots_of_cubic() {
        // (x - 1)(x + 0.5)(x - 2)
        let c = [1.0, 0.5, -2.5, 1.0];
        let r = real_roots(&c, -10.0, 10.0);
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([-0.5, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        // double root
        let r = real_roots(&[0.0, 0.0, 1.0], -1.0, 1.0);
        assert_eq!(r, vec![0.0]);
    }

    #[test]
    fn generic_eo_matches_burgers_closed_form() {
        let generic = FluxTable { burgers_sign: None, ..FluxTable::new(&[0.0, 0.0, 0.5], NumericalFlux::EngquistOsher) };
        let fast = FluxTable::new(&[0.0, 0.0, 0.5], NumericalFlux::EngquistOsher);
        for &(l, r) in &[(1.0, -1.0), (-0.3, 0.7), (0.2, 0.4), (-2.0, -1.0)] {
            assert!((generic.flux(l, r) - fast.flux(l, r)).abs() < 1e-15);
        }
    }

    #[test]
    fn eo_is_consistent_and_monotone_for_cubic() {
        let c = [0.1, -0.3, 0.0, 1.0];
        let t = FluxTable::new(&c, NumericalFlux::EngquistOsher);
        let g = FluxTable::new(&c, NumericalFlux::Godunov);
        let pts: Vec<f64> = (0..41).map(|i| -1.0 + i as f64 * 0.05).collect();
        for &u in &pts {
            assert!((t.flux(u, u) - horner(&c, u)).abs() < 1e-13);
            assert!((g.flux(u, u) - horner(&c, u)).abs() < 1e-13);
        }
        for w in pts.windows(2) {
            for &o in &pts {
                assert!(t.flux(w[1], o) >= t.flux(w[0], o) - 1e-14);
                assert!(t.flux(o, w[1]) <= t.flux(o, w[0]) + 1e-14);
                assert!(g.flux(w[1], o) >= g.flux(w[0], o) - 1e-14);
                assert!(g.flux(o, w[1]) <= g.flux(o, w[0]) + 1e-14);
            }
        }
    }

    #[test]
    fn max_speed_uses_interior_extrema() {
        // a(v) = 3v^2 - 1 on [-0.5, 0.5]: max |a| = 1 at v = 0
        let f = make_flux(&[0.0, -1.0, 0.0, 1.0]).unwrap();
        assert!((f.max_speed(-0.5, 0.5) - 1.0).abs() < 1e-15);
    }
}
