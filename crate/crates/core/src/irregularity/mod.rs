//! Oscillatory integrals of a driving path and the irregularity measures
//! built from them.

mod averaging;
mod iota;
mod oscillatory;
mod rho;

use std::io::Write;

pub use averaging::{check_averaging_bound, AveragingCheck};
pub use iota::{estimate_iota, AlphaFit, IotaEstimate, ZERO_INCREMENT_LIMIT};
pub use oscillatory::{k_sup, phi, psi};
pub use rho::{
    check_interpolation, estimate_rho_gamma, estimate_rho_gamma_with, oscillatory_scan, InterpolationCheck,
    IrregularityReport, OscillatoryScan, ScanOptions, DEFAULT_GAMMA,
};

/// One row per `(a, s, t)` cell: `a,s,t,magnitude`.
pub fn write_scan_csv<W: Write>(scan: &OscillatoryScan, mut out: W) -> std::io::Result<()> {
    writeln!(out, "a,s,t,magnitude")?;
    for (ia, a) in scan.a_grid.iter().enumerate() {
        for (iw, (s, t)) in scan.window_pairs.iter().enumerate() {
            writeln!(out, "{a:.16e},{s:.16e},{t:.16e},{:.16e}", scan.magnitude(ia, iw))?;
        }
    }
    Ok(())
}

/// One row per `(alpha, lambda)` cell: `alpha,lambda,integral`.
pub fn write_iota_csv<W: Write>(est: &IotaEstimate, mut out: W) -> std::io::Result<()> {
    writeln!(out, "alpha,lambda,integral")?;
    for (fit, row) in est.per_alpha.iter().zip(&est.integrals) {
        for (l, v) in est.lambda_grid.iter().zip(row) {
            writeln!(out, "{:.16e},{l:.16e},{v:.16e}", fit.alpha)?;
        }
    }
    Ok(())
}

/// Key-value summary of a report without the scan matrix.
pub fn report_summary(report: &IrregularityReport) -> serde_json::Value {
    serde_json::json!({
        "rho_hat": report.rho_hat,
        "gamma_used": report.gamma_used,
        "norm_estimate": report.norm_estimate,
        "fit_quality": report.fit_quality,
        "degenerate": report.degenerate,
        "n_a": report.scan.a_grid.len(),
        "n_windows": report.scan.window_pairs.len(),
    })
}

/// Key-value summary of a scaling-index estimate.
pub fn iota_summary(est: &IotaEstimate) -> serde_json::Value {
    serde_json::json!({
        "iota_hat": est.iota_hat,
        "per_alpha": est.per_alpha,
        "per_alpha_iota": est.per_alpha_iota(),
        "constant_c": est.constant_c,
        "zero_fraction": est.zero_fraction,
        "flagged": est.flagged,
    })
}
