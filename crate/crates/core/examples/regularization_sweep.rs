//! Burgers with rough lacunary data: time-averaged regularity versus the
//! Hurst parameter, through the config-driven runner.

use roughflux::harness::{load_summary, preset, run};

fn main() -> roughflux::Result<()> {
    let mut cfg = preset("exp-regularity")?;
    cfg.ensemble = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    cfg.output_dir = std::env::temp_dir().join("roughflux-regularization-sweep");
    let manifest = run(&cfg)?;
    let summary = load_summary(&cfg.output_dir)?;
    for v in summary["variants"].as_array().unwrap() {
        println!(
            "{:<10} median lambda_hat {:.3}  predicted {:.3}",
            v["variant"].as_str().unwrap(),
            v["median_lambda_hat"].as_f64().unwrap(),
            v["predicted"].as_f64().unwrap()
        );
    }
    println!("{} files, {:.1} s, outputs in {}", manifest.files.len(), manifest.wall_clock_seconds, cfg.output_dir.display());
    Ok(())
}
