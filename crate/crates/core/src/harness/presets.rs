//! Named configurations for the headline comparisons.

use std::path::PathBuf;

use super::config::{ExperimentConfig, ExperimentKind, OutputTimes, PathFamily};
use crate::error::{Error, Result};
use crate::solver::InitialData;

pub const PRESET_NAMES: [&str; 5] = ["exp-irregularity", "exp-iota", "exp-regularity", "exp-det-vs-noise", "exp-weakform"];

/// Burgers, lacunary data of regularity 0.3, 20 paths per variant.
fn regularity_base() -> ExperimentConfig {
    let mut c = ExperimentConfig { kind: ExperimentKind::RegularitySweep, ensemble: 20, ..Default::default() };
    c.path.n_steps = 256;
    c.path.horizon = 1.0;
    c.solver.flux = vec![0.0, 0.0, 0.5];
    c.solver.nx = 1024;
    c.solver.initial = InitialData::Lacunary { lambda: 0.3, terms: 8 };
    c.solver.output_times = OutputTimes::Uniform(8);
    c.solver.v_levels = 16;
    c.solver.check_entropy = true;
    c.estimator.modulus_levels = 10;
    c
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let mut c = match name {
        "exp-irregularity" => {
            let mut c = ExperimentConfig { kind: ExperimentKind::Irregularity, ensemble: 100, ..Default::default() };
            c.path.kinds = vec![PathFamily::Fbm];
            c.path.hurst = vec![0.5];
            c.path.n_steps = 65536;
            c.estimator.a_max = 256.0;
            c.estimator.n_a = 32;
            c.estimator.gamma = vec![0.55];
            c.estimator.kappas = vec![0.25, 0.5, 0.75];
            c
        }
        "exp-iota" => {
            let mut c = ExperimentConfig { kind: ExperimentKind::Iota, ensemble: 100, ..Default::default() };
            c.path.kinds = vec![PathFamily::Linear, PathFamily::Fbm];
            c.path.hurst = vec![0.25, 0.5, 0.75];
            c.path.n_steps = 16384;
            c.path.horizon = 4.0;
            c.estimator.alphas = vec![-0.3, -0.5, -0.7];
            c.estimator.lambda_min = 4.0;
            c.estimator.lambda_max = 4096.0;
            c.estimator.n_lambda = 16;
            c
        }
        "exp-regularity" => {
            let mut c = regularity_base();
            c.path.kinds = vec![PathFamily::Fbm];
            c.path.hurst = vec![0.25, 0.5, 0.75];
            c
        }
        "exp-det-vs-noise" => {
            let mut c = regularity_base();
            c.path.kinds = vec![PathFamily::Linear, PathFamily::Fbm];
            c.path.hurst = vec![0.25];
            c
        }
        "exp-weakform" => {
            let mut c = ExperimentConfig { kind: ExperimentKind::Weakform, ensemble: 1, ..Default::default() };
            c.path.kinds = vec![PathFamily::Linear];
            c.path.n_steps = 64;
            c.path.horizon = 0.25;
            c.solver.nx = 2048;
            c.solver.initial = InitialData::Riemann { ul: 1.0, ur: -1.0, x0: 0.5 };
            c.solver.output_times = OutputTimes::List(vec![0.125, 0.25]);
            c.solver.v_levels = 64;
            c.solver.steps_per_bin = 1;
            c.estimator.t_eval = 0.25;
            c
        }
        other => {
            return Err(Error::config("experiment", "preset", format!("unknown preset `{other}`, expected one of {PRESET_NAMES:?}")))
        }
    };
    c.output_dir = PathBuf::from("out").join(name);
    c.validate()?;
    Ok(c)
}

/// Small default configuration for each experiment kind, used by the CLI subcommands.
pub fn kind_defaults(kind: ExperimentKind) -> ExperimentConfig {
    let mut c = ExperimentConfig { kind, output_dir: PathBuf::from("out").join(kind.name()), ..Default::default() };
    match kind {
        ExperimentKind::Paths => {
            c.ensemble = 100;
        }
        ExperimentKind::Irregularity => {
            c.ensemble = 8;
            c.path.n_steps = 16384;
        }
        ExperimentKind::Iota => {
            c.ensemble = 8;
            c.path.kinds = vec![PathFamily::Linear, PathFamily::Fbm];
            c.path.hurst = vec![0.25, 0.5, 0.75];
            c.path.n_steps = 4096;
            c.path.horizon = 4.0;
        }
        ExperimentKind::Solve => {
            c.ensemble = 1;
            c.path.kinds = vec![PathFamily::Linear];
            c.path.n_steps = 64;
            c.path.horizon = 0.5;
            c.solver.output_times = OutputTimes::List(vec![0.25, 0.5]);
        }
        ExperimentKind::RegularitySweep => {
            let mut r = regularity_base();
            r.ensemble = 4;
            r.path.hurst = vec![0.25, 0.5, 0.75];
            r.output_dir = c.output_dir;
            c = r;
        }
        ExperimentKind::Exponents => {}
        ExperimentKind::Weakform => {
            let mut w = preset("exp-weakform").expect("built-in preset");
            w.output_dir = c.output_dir;
            c = w;
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_validate_and_round_trip() {
        for name in PRESET_NAMES {
            let c = preset(name).unwrap();
            assert_eq!(ExperimentConfig::from_ini_str(&c.to_ini_string()).unwrap(), c);
        }
        assert!(preset("exp-nothing").is_err());
    }

    #[test]
    fn regularity_content() {
        let c = preset("exp-regularity").unwrap();
        assert_eq!(c.path.hurst, vec![0.25, 0.5, 0.75]);
        assert_eq!(c.solver.flux, vec![0.0, 0.0, 0.5]);
        assert_eq!(c.solver.initial, InitialData::Lacunary { lambda: 0.3, terms: 8 });
        assert_eq!(c.ensemble, 20);
    }

    #[test]
    fn iota_content() {
        let c = preset("exp-iota").unwrap();
        assert_eq!(c.estimator.alphas, vec![-0.3, -0.5, -0.7]);
        assert_eq!((c.estimator.lambda_min, c.estimator.lambda_max), (4.0, 4096.0));
        assert_eq!(c.ensemble, 100);
    }

    #[test]
    fn det_vs_noise_pairs() {
        let c = preset("exp-det-vs-noise").unwrap();
        assert_eq!(c.path.kinds, vec![PathFamily::Linear, PathFamily::Fbm]);
        assert_eq!(c.path.hurst, vec![0.25]);
        let r = preset("exp-regularity").unwrap();
        assert_eq!(c.solver, r.solver);
        assert_eq!(c.master_seed, r.master_seed);
    }
}
