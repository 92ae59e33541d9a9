//! Kinetic measure of a stationary shock: mass equals the entropy dissipation
//! and every cell production is nonnegative.

use roughflux::paths::{generate_deterministic, DeterministicKind};
use roughflux::solver::{default_v_levels, entropy_defect_with, make_flux, solve_rough, InitialData};

fn main() -> roughflux::Result<()> {
    let flux = make_flux(&[0.0, 0.0, 0.5])?;
    let nx = 2048;
    let u0 = InitialData::Riemann { ul: 1.0, ur: -1.0, x0: 0.5 }.cell_averages(nx)?;
    let path = generate_deterministic(DeterministicKind::Linear, 64, 0.25)?;
    let sol = solve_rough(&flux, &path, &u0, nx, 0.9, &[0.125, 0.25])?;
    let energy = |u: &[f64]| u.iter().map(|x| 0.5 * x * x).sum::<f64>() / nx as f64;
    let levels = default_v_levels(&sol, 64, 0.05);
    let m = entropy_defect_with(&sol, &flux, &path, &levels, 4)?;
    m.ensure_nonnegative()?;
    println!("energy dissipated  {:.5}", energy(&u0) - energy(sol.slice(1)));
    println!("measure mass       {:.5}  (exact 1/6 = {:.5})", m.total_mass(), 1.0 / 6.0);
    println!("bins {}  levels {}  violations {}  max density {:.3e}", m.n_bins(), m.n_levels(), m.violations, m.max_density);
    let per_level: Vec<f64> = (0..m.n_levels()).map(|l| (0..m.n_bins()).map(|b| m.bin_level_mass(b, l)).sum()).collect();
    let peak = per_level.iter().copied().fold(0.0, f64::max);
    for (l, v) in levels.iter().enumerate().step_by(8) {
        println!("  v = {v:+.3}  {}", "#".repeat((40.0 * per_level[l] / peak).round() as usize));
    }
    Ok(())
}
