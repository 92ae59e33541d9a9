//! Scaling index iota from the Laplace decay of |w_t^r|^alpha.

use roughflux::fit::median;
use roughflux::irregularity::estimate_iota;
use roughflux::paths::{derive_seed, generate_deterministic, generate_fbm, DeterministicKind};

fn main() -> roughflux::Result<()> {
    let alphas = [-0.3, -0.5, -0.7];
    let lin = generate_deterministic(DeterministicKind::Linear, 16384, 4.0)?;
    let est = estimate_iota(&lin, &alphas, 4.0, 4096.0, 16)?;
    println!("linear: iota_hat {:.4}  per alpha {:?}", est.iota_hat, est.per_alpha_iota());
    for h in [0.25, 0.5, 0.75] {
        let vals: Vec<f64> = (0..10)
            .map(|i| {
                let p = generate_fbm(h, 1, 16384, 4.0, derive_seed(3, i))?;
                Ok(estimate_iota(&p, &alphas, 4.0, 4096.0, 16)?.iota_hat)
            })
            .collect::<roughflux::Result<_>>()?;
        println!("fbm H={h}: median iota_hat {:.4}", median(&vals));
    }
    Ok(())
}
