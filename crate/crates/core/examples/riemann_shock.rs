//! Burgers Riemann problem driven by w(t) = t and by its reversal.

use roughflux::paths::{generate_deterministic, DeterministicKind};
use roughflux::solver::{make_flux, solve_rough_with, total_variation, InitialData, NumericalFlux, SolveOptions};

fn main() -> roughflux::Result<()> {
    let flux = make_flux(&[0.0, 0.0, 0.5])?;
    println!("flux nu = {}, c = {:.4}", flux.nu, flux.c_estimate);
    let nx = 1024;
    let u0 = InitialData::Riemann { ul: 1.0, ur: 0.0, x0: 0.25 }.cell_averages(nx)?;
    let path = generate_deterministic(DeterministicKind::Linear, 64, 0.5)?;
    for scheme in [NumericalFlux::EngquistOsher, NumericalFlux::Godunov] {
        let sol = solve_rough_with(&flux, &path, &u0, nx, &[0.25, 0.5], &SolveOptions { cfl: 0.9, scheme })?;
        let u = sol.slice(1);
        let j = (0..nx).max_by(|&a, &b| (u[a] - u[(a + 1) % nx]).total_cmp(&(u[b] - u[(b + 1) % nx]))).unwrap();
        let x = (j + 1) as f64 / nx as f64;
        println!(
            "{:>15}: shock at x = {x:.5} (exact 0.5, error {:.1} dx), mass drift {:.1e}, TV {:.3}, {} substeps",
            scheme.name(),
            (x - 0.5) * nx as f64,
            sol.mass(1) - sol.mass(0),
            total_variation(u),
            sol.substeps
        );
    }
    Ok(())
}
