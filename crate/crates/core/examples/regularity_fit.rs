//! Calibrate the Besov estimator on lacunary fields and a step.

use roughflux::regularity::{besov_exponent, default_fit_range, gagliardo_from_modulus, gagliardo_seminorm, l1_modulus};
use roughflux::solver::InitialData;

fn main() -> roughflux::Result<()> {
    let nx = 1 << 16;
    let (lo, hi) = default_fit_range(nx);
    for lambda in [0.3, 0.5, 0.7] {
        let u = InitialData::Lacunary { lambda, terms: 16 }.cell_averages(nx)?;
        let rep = besov_exponent(&l1_modulus(&u, 14)?, lo, hi)?;
        println!("lacunary {lambda}: lambda_hat {:.4}  R^2 {:.4}", rep.lambda_hat, rep.fit_quality);
    }
    let step: Vec<f64> = (0..nx).map(|j| if j < nx / 2 { 1.0 } else { 0.0 }).collect();
    let curve = l1_modulus(&step, 14)?;
    println!("step: lambda_hat {:.4}", besov_exponent(&curve, lo, hi)?.lambda_hat);

    let small: Vec<f64> = (0..1024).map(|j| if j < 512 { 1.0 } else { 0.0 }).collect();
    let exact = gagliardo_seminorm(&small, 0.5)?;
    let via = gagliardo_from_modulus(&l1_modulus(&small, 10)?, 0.5)?;
    println!("step W^(1/2,1) seminorm: direct {exact:.4}  modulus route {via:.4}");
    Ok(())
}
