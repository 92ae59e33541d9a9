//! (rho, gamma) estimates for fBm and the linear path, with the
//! interpolation inequality on the scanned grid.

use roughflux::fit::median;
use roughflux::irregularity::{check_interpolation, estimate_rho_gamma, phi};
use roughflux::paths::{derive_seed, generate_deterministic, generate_fbm, DeterministicKind};

fn main() -> roughflux::Result<()> {
    let lin = generate_deterministic(DeterministicKind::Linear, 4096, 1.0)?;
    println!("Phi_(0,1)(a) for w(t) = t:");
    for a in [1.0, 10.0, 100.0] {
        let z = phi(&lin, &[a], 0.0, 1.0)?;
        println!("  a = {a:>5}  |Phi| = {:.5}  2|sin(a/2)|/a = {:.5}", z.norm(), 2.0 * (a / 2.0f64).sin().abs() / a);
    }
    let r = estimate_rho_gamma(&lin, 256.0, 32, 0.5)?;
    println!("linear path, gamma 0.5: rho_hat = {:.3}", r.rho_hat);

    let mut rhos = Vec::new();
    for i in 0..10 {
        let p = generate_fbm(0.5, 1, 16384, 1.0, derive_seed(1, i))?;
        let rep = estimate_rho_gamma(&p, 256.0, 32, 0.55)?;
        let checks: Vec<bool> =
            [0.25, 0.5, 0.75].iter().map(|&k| check_interpolation(&rep, k).map(|c| c.pass)).collect::<Result<_, _>>()?;
        rhos.push(rep.rho_hat);
        println!("fbm H=0.5 seed {i}: rho_hat {:.3}  R^2 {:.3}  interpolation {checks:?}", rep.rho_hat, rep.fit_quality);
    }
    println!("median rho_hat {:.3} (bound 1/(2H) = 1)", median(&rhos));
    Ok(())
}
