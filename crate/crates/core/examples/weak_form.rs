//! Transported weak formulation with and without the kinetic measure.

use roughflux::kinetic::{default_catalog, velocity_average, weak_form_residual};
use roughflux::paths::{generate_deterministic, DeterministicKind};
use roughflux::solver::{default_v_levels, entropy_defect_with, make_flux, solve_rough, InitialData};

fn main() -> roughflux::Result<()> {
    let flux = make_flux(&[0.0, 0.0, 0.5])?;
    let nx = 2048;
    let u0 = InitialData::Riemann { ul: 1.0, ur: -1.0, x0: 0.5 }.cell_averages(nx)?;
    let path = generate_deterministic(DeterministicKind::Linear, 64, 0.25)?;
    let sol = solve_rough(&flux, &path, &u0, nx, 0.9, &[0.125, 0.25])?;
    let levels = default_v_levels(&sol, 64, 0.05);
    let m = entropy_defect_with(&sol, &flux, &path, &levels, 1)?;
    let catalog = default_catalog(levels[0], levels[levels.len() - 1]);
    let with = weak_form_residual(&sol, Some(&m), &path, &flux, 0.25, &catalog)?;
    let without = weak_form_residual(&sol, None, &path, &flux, 0.25, &catalog)?;
    println!("{} test functions", catalog.len());
    println!("max residual with m    {:.3e}", with.max_residual);
    println!("max residual with m=0  {:.3e}", without.max_residual);

    let fine: Vec<f64> = (0..=400).map(|i| -1.1 + 2.2 * i as f64 / 400.0).collect();
    let avg = velocity_average(sol.slice(1), |_| 1.0, &fine)?;
    let err = avg.iter().zip(sol.slice(1)).map(|(a, u)| (a - u).abs()).fold(0.0, f64::max);
    println!("int chi(u, v) dv = u up to {err:.1e}");
    Ok(())
}
