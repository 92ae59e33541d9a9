//! Build a config from INI text, run it and list the manifest inventory.

use roughflux::harness::{run, ExperimentConfig};

const CONFIG: &str = "
[experiment]
kind = iota
ensemble = 4
master_seed = 7

[path]
kinds = linear, fbm
hurst = 0.3, 0.7
n_steps = 4096
horizon = 4
";

fn main() -> roughflux::Result<()> {
    let mut cfg = ExperimentConfig::from_ini_str(CONFIG)?;
    cfg.output_dir = std::env::temp_dir().join("roughflux-config-run");
    let manifest = run(&cfg)?;
    println!("status {:?}, seeds {:?}", manifest.status, manifest.seeds);
    for f in &manifest.files {
        println!("  {:<32} {}", f.path, f.rows.map_or_else(|| "-".into(), |r| r.to_string()));
    }
    match ExperimentConfig::from_ini_str("[estimator]\nalphas = -0.95\n[experiment]\nkind = iota\n") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
