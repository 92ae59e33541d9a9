//! Sample fBm paths, check the ensemble covariance against the closed form
//! and estimate Hölder exponents.

use roughflux::paths::{derive_seed, generate_fbm, holder_exponent, FbmGenerator};

fn main() -> roughflux::Result<()> {
    let (n, ensemble) = (1024, 2000);
    let pairs = [(0.25, 0.75), (0.5, 1.0)];
    for h in [0.25, 0.5, 0.75] {
        let gen = FbmGenerator::new(h, 1, n, 1.0)?;
        let mut acc = [0.0; 2];
        let mut eta = 0.0;
        for i in 0..ensemble {
            let p = gen.sample(derive_seed(7, i));
            for (k, &(s, t)) in pairs.iter().enumerate() {
                acc[k] += p.point((s * n as f64) as usize)[0] * p.point((t * n as f64) as usize)[0];
            }
            if i < 20 {
                eta += holder_exponent(&p, 8)?.eta_hat / 20.0;
            }
        }
        println!("H = {h}  method {:?}  mean eta_hat {eta:.3}", gen.method());
        for (k, &(s, t)) in pairs.iter().enumerate() {
            let exact = 0.5 * (f64::powf(s, 2.0 * h) + f64::powf(t, 2.0 * h) - f64::powf(t - s, 2.0 * h));
            println!("  E[w({s}) w({t})]  empirical {:.4}  exact {exact:.4}", acc[k] / ensemble as f64);
        }
    }
    let a = generate_fbm(0.3, 2, 256, 1.0, 99)?;
    let b = generate_fbm(0.3, 2, 256, 1.0, 99)?;
    println!("same seed reproduces the path: {}", a == b);
    Ok(())
}
