//! Predicted regularity thresholds and the interplay of noise and flux.

use roughflux::harness::{exponent_table, format_exponent_table};
use roughflux::regularity::{interplay_pairs, predicted_lambda_main};

fn main() -> roughflux::Result<()> {
    let hs: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    for nu in [1.0, 2.0] {
        println!("nu = {nu}");
        print!("{}", format_exponent_table(&exponent_table(&hs, nu)?));
    }
    println!("general formula, rho = 1, gamma = 0.55, eta = 0.49: {:.4}", predicted_lambda_main(1.0, 0.55, 0.49, 1.0)?);
    let ip = interplay_pairs(0.25, 1.0, 0.5)?;
    println!("H = 0.25 with nu = 1 matches H = 0.5 with nu = {:.4} (feasible {})", ip.nu2, ip.feasible);
    Ok(())
}
