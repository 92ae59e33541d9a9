//! Initial data given as exact cell averages on the unit torus.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum InitialData {
    /// `ul` on `[0, x0)`, `ur` on `[x0, 1)`.
    Riemann { ul: f64, ur: f64, x0: f64 },
    /// `amp sin(2 pi freq x)`.
    Sine { amp: f64, freq: u32 },
    /// `sum_{j=1..J} 2^{-lambda j} cos(2 pi 2^j x)`, of Besov regularity `lambda`.
    Lacunary { lambda: f64, terms: u32 },
}

impl InitialData {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InitialData::Riemann { ul, ur, x0 } => {
                if !(ul.is_finite() && ur.is_finite()) {
                    return Err(Error::param("riemann", "states must be finite"));
                }
                if !(0.0..1.0).contains(&x0) {
                    return Err(Error::param("riemann", format!("x0 must lie in [0, 1), got {x0}")));
                }
            }
            InitialData::Sine { amp, freq } => {
                if !amp.is_finite() || freq == 0 {
                    return Err(Error::param("sine", "need finite amplitude and positive frequency"));
                }
            }
            InitialData::Lacunary { lambda, terms } => {
                if !(lambda > 0.0 && lambda < 1.0) {
                    return Err(Error::param("lacunary", format!("lambda must lie in (0, 1), got {lambda}")));
                }
                if terms == 0 || terms > 30 {
                    return Err(Error::param("lacunary", "terms must lie in 1..=30"));
                }
            }
        }
        Ok(())
    }

    /// Exact averages over the cells `[j/nx, (j+1)/nx)`.
    pub fn cell_averages(&self, nx: usize) -> Result<Vec<f64>> {
        self.validate()?;
        if nx < 2 {
            return Err(Error::param("nx", "need at least 2 cells"));
        }
        let dx = 1.0 / nx as f64;
        let edge = |j: usize| j as f64 * dx;
        Ok(match *self {
            InitialData::Riemann { ul, ur, x0 } => (0..nx)
                .map(|j| {
                    let (a, b) = (edge(j), edge(j + 1));
                    if b <= x0 {
                        ul
                    } else if a >= x0 {
                        ur
                    } else {
                        (ul * (x0 - a) + ur * (b - x0)) / dx
                    }
                })
                .collect(),
            InitialData::Sine { amp, freq } => {
                let k = 2.0 * PI * freq as f64;
                (0..nx).map(|j| amp * ((k * edge(j)).cos() - (k * edge(j + 1)).cos()) / (k * dx)).collect()
            }
            InitialData::Lacunary { lambda, terms } => lacunary_cell_averages(lambda, terms, nx),
        })
    }
}

fn lacunary_cell_averages(lambda: f64, terms: u32, nx: usize) -> Vec<f64> {
    let dx = 1.0 / nx as f64;
    let mut u = vec![0.0; nx];
    for j in 1..=terms {
        let freq = 2f64.powi(j as i32);
        let amp = 2f64.powf(-lambda * j as f64);
        let k = 2.0 * PI * freq;
        // sin(k x) at the cell edges; the frequency divides nx often, so reduce the phase exactly
        let period = nx as f64 / freq;
        let edges: Vec<f64> = (0..=nx)
            .map(|e| {
                let phase = if period.fract() == 0.0 { (e as f64 % period) / period } else { e as f64 * dx * freq };
                (2.0 * PI * phase).sin()
            })
            .collect();
        for (c, x) in u.iter_mut().enumerate() {
            *x += amp * (edges[c + 1] - edges[c]) / (k * dx);
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn riemann_partial_cell() {
        let u = InitialData::Riemann { ul: 1.0, ur: 0.0, x0: 0.3 }.cell_averages(4).unwrap();
        assert_eq!(u[0], 1.0);
        assert!((u[1] - 0.2).abs() < 1e-15);
        assert_eq!(&u[2..], &[0.0, 0.0]);
    }

    #[test]
    fn sine_has_zero_mean() {
        let u = InitialData::Sine { amp: 0.1, freq: 1 }.cell_averages(64).unwrap();
        assert!(u.iter().sum::<f64>().abs() < 1e-14);
        let mid = (2.0 * PI * (16.5 / 64.0)).sin() * 0.1;
        assert!((u[16] - mid).abs() < 1e-4);
    }

    #[test]
    fn lacunary_zero_mean_and_amplitude() {
        let u = InitialData::Lacunary { lambda: 0.5, terms: 6 }.cell_averages(1024).unwrap();
        assert!(u.iter().sum::<f64>().abs() < 1e-10);
        // at x near 0 every cosine is close to 1
        let peak: f64 = (1..=6).map(|j| 2f64.powf(-0.5 * j as f64)).sum();
        assert!((u[0] - peak).abs() < 0.05 * peak);
    }

    #[test]
    fn rejects_bad_presets() {
        assert!(InitialData::Riemann { ul: 1.0, ur: 0.0, x0: 1.0 }.validate().is_err());
        assert!(InitialData::Sine { amp: 1.0, freq: 0 }.validate().is_err());
        assert!(InitialData::Lacunary { lambda: 1.2, terms: 4 }.validate().is_err());
    }
}
