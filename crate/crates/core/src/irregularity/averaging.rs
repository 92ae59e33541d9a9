//! Numerical check of the averaging estimate
//! `int int f1(v1) f2(v2) / (1 + |n (a(v1) - a(v2))|^rho) dv1 dv2 <~ ||f1||_2 ||f2||_2 |n|^{-rho}`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AveragingCheck {
    pub n_list: Vec<u64>,
    pub lhs: Vec<f64>,
    /// `lhs(n) |n|^rho / (||f1||_2 ||f2||_2)`.
    pub ratios: Vec<f64>,
    pub f1_l1: f64,
    pub f2_l1: f64,
    pub f1_l2: f64,
    pub f2_l2: f64,
}

impl AveragingCheck {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }
}

fn trapezoid_weights(v: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; v.len()];
    for i in 0..v.len() - 1 {
        let h = 0.5 * (v[i + 1] - v[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    w
}

/// `min |a_i - a_j| / |v_i - v_j|^nu` over grid pairs.
pub(crate) fn sampled_nondegeneracy(v: &[f64], a: &[f64], nu: f64) -> f64 {
    let mut c = f64::INFINITY;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            c = c.min((a[j] - a[i]).abs() / (v[j] - v[i]).abs().powf(nu));
        }
    }
    c
}

/// Evaluates the left side by product trapezoid quadrature on the sample grid
/// `v` and returns the normalized ratios for every `n`.
///
/// `nu` is the non-degeneracy order of `a` on the grid; `rho nu >= 1` is
/// outside the estimate's hypothesis and rejected, as is a degenerate `a`.
pub fn check_averaging_bound(
    v: &[f64],
    f1: &[f64],
    f2: &[f64],
    a: &[f64],
    rho: f64,
    nu: f64,
    n_list: &[u64],
) -> Result<AveragingCheck> {
    let m = v.len();
    if m < 2 || f1.len() != m || f2.len() != m || a.len() != m {
        return Err(Error::GridMismatch("f1, f2 and a must be sampled on the grid v".into()));
    }
    if v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("v", "grid must be strictly increasing"));
    }
    if f1.iter().chain(f2).any(|x| !(*x >= 0.0)) {
        return Err(Error::param("f", "densities must be nonnegative"));
    }
    if !(rho > 0.0) || !(nu >= 1.0) {
        return Err(Error::param("rho", "need rho > 0 and nu >= 1"));
    }
    if rho * nu >= 1.0 {
        return Err(Error::param("rho", format!("rho * nu = {} must be below 1", rho * nu)));
    }
    if n_list.contains(&0) {
        return Err(Error::param("n_list", "frequencies must be positive"));
    }
    if sampled_nondegeneracy(v, a, nu) <= 0.0 {
        return Err(Error::param("a", format!("not non-degenerate of order {nu} on the grid")));
    }
    let w = trapezoid_weights(v);
    let l1 = |f: &[f64]| f.iter().zip(&w).map(|(x, wt)| x * wt).sum::<f64>();
    let l2 = |f: &[f64]| f.iter().zip(&w).map(|(x, wt)| x * x * wt).sum::<f64>().sqrt();
    let (f1_l2, f2_l2) = (l2(f1), l2(f2));
    let g1: Vec<f64> = f1.iter().zip(&w).map(|(x, wt)| x * wt).collect();
    let g2: Vec<f64> = f2.iter().zip(&w).map(|(x, wt)| x * wt).collect();
    let mut lhs = Vec::with_capacity(n_list.len());
    let mut ratios = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let nf = n as f64;
        let mut total = 0.0;
        for i in 0..m {
            if g1[i] == 0.0 {
                continue;
            }
            let row: f64 = (0..m)
                .filter(|&j| g2[j] != 0.0)
                .map(|j| g2[j] / (1.0 + (nf * (a[i] - a[j])).abs().powf(rho)))
                .sum();
            total += g1[i] * row;
        }
        lhs.push(total);
        ratios.push(total * nf.powf(rho) / (f1_l2 * f2_l2));
    }
    Ok(AveragingCheck {
        n_list: n_list.to_vec(),
        lhs,
        ratios,
        f1_l1: l1(f1),
        f2_l1: l1(f2),
        f1_l2,
        f2_l2,
    })
}
