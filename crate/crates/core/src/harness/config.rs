//! Experiment configuration as a sectioned INI file.

use std::fmt::Write as _;
use std::path::PathBuf;

use ini::Ini;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::solver::{make_flux, InitialData, NumericalFlux};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Paths,
    Irregularity,
    Iota,
    Solve,
    RegularitySweep,
    Exponents,
    Weakform,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Paths,
        ExperimentKind::Irregularity,
        ExperimentKind::Iota,
        ExperimentKind::Solve,
        ExperimentKind::RegularitySweep,
        ExperimentKind::Exponents,
        ExperimentKind::Weakform,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Paths => "paths",
            ExperimentKind::Irregularity => "irregularity",
            ExperimentKind::Iota => "iota",
            ExperimentKind::Solve => "solve",
            ExperimentKind::RegularitySweep => "regularity-sweep",
            ExperimentKind::Exponents => "exponents",
            ExperimentKind::Weakform => "weakform",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// Family of driving paths; fBm is expanded over the `hurst` list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PathFamily {
    Fbm,
    Brownian,
    Linear,
}

impl PathFamily {
    pub fn name(&self) -> &'static str {
        match self {
            PathFamily::Fbm => "fbm",
            PathFamily::Brownian => "brownian",
            PathFamily::Linear => "linear",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "fbm" => Some(PathFamily::Fbm),
            "brownian" => Some(PathFamily::Brownian),
            "linear" => Some(PathFamily::Linear),
            _ => None,
        }
    }

    pub fn is_random(&self) -> bool {
        !matches!(self, PathFamily::Linear)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSpec {
    pub kinds: Vec<PathFamily>,
    pub hurst: Vec<f64>,
    pub n_steps: usize,
    pub horizon: f64,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum OutputTimes {
    /// `k T / K` for `k = 1..=K`.
    Uniform(usize),
    List(Vec<f64>),
}

impl OutputTimes {
    pub fn resolve(&self, horizon: f64) -> Vec<f64> {
        match self {
            OutputTimes::Uniform(k) => (1..=*k).map(|i| horizon * i as f64 / *k as f64).collect(),
            OutputTimes::List(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverSpec {
    /// `A(u) = sum_k flux[k] u^k`.
    pub flux: Vec<f64>,
    pub nx: usize,
    pub cfl: f64,
    pub scheme: NumericalFlux,
    pub initial: InitialData,
    pub output_times: OutputTimes,
    pub v_levels: usize,
    /// 0 picks the default binning.
    pub steps_per_bin: usize,
    pub check_entropy: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorSpec {
    pub a_max: f64,
    pub n_a: usize,
    pub gamma: Vec<f64>,
    pub kappas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub n_lambda: usize,
    /// 0 means the default `4 dx`.
    pub fit_lo: f64,
    /// 0 means the default `1/16`.
    pub fit_hi: f64,
    pub modulus_levels: u32,
    pub holder_levels: u32,
    pub nu: f64,
    pub hurst_table: Vec<f64>,
    /// 0 means the last output time.
    pub t_eval: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub ensemble: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub path: PathSpec,
    pub solver: SolverSpec,
    pub estimator: EstimatorSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: ExperimentKind::Paths,
            ensemble: 10,
            master_seed: 42,
            output_dir: PathBuf::from("out"),
            path: PathSpec { kinds: vec![PathFamily::Fbm], hurst: vec![0.5], n_steps: 1024, horizon: 1.0, dim: 1 },
            solver: SolverSpec {
                flux: vec![0.0, 0.0, 0.5],
                nx: 1024,
                cfl: 0.9,
                scheme: NumericalFlux::EngquistOsher,
                initial: InitialData::Riemann { ul: 1.0, ur: 0.0, x0: 0.25 },
                output_times: OutputTimes::Uniform(4),
                v_levels: 64,
                steps_per_bin: 0,
                check_entropy: true,
            },
            estimator: EstimatorSpec {
                a_max: 256.0,
                n_a: 32,
                gamma: vec![0.55],
                kappas: vec![0.25, 0.5, 0.75],
                alphas: vec![-0.3, -0.5, -0.7],
                lambda_min: 4.0,
                lambda_max: 4096.0,
                n_lambda: 16,
                fit_lo: 0.0,
                fit_hi: 0.0,
                modulus_levels: 10,
                holder_levels: 8,
                nu: 1.0,
                hurst_table: (1..=9).map(|k| k as f64 / 10.0).collect(),
                t_eval: 0.0,
            },
        }
    }
}

/// One documented key of the config schema.
#[derive(Debug, Clone, Copy)]
pub struct SchemaEntry {
    pub section: &'static str,
    pub key: &'static str,
    pub format: &'static str,
    pub doc: &'static str,
}

pub const SCHEMA: &[SchemaEntry] = &[
    SchemaEntry { section: "experiment", key: "kind", format: "paths|irregularity|iota|solve|regularity-sweep|exponents|weakform", doc: "experiment to run" },
    SchemaEntry { section: "experiment", key: "ensemble", format: "int >= 1", doc: "realizations per random path variant (deterministic paths run once)" },
    SchemaEntry { section: "experiment", key: "master_seed", format: "u64", doc: "realization i uses derive_seed(master_seed, i) for every variant" },
    SchemaEntry { section: "experiment", key: "output_dir", format: "path", doc: "directory for all outputs (created if missing)" },
    SchemaEntry { section: "path", key: "kinds", format: "list of fbm|brownian|linear", doc: "path families; fbm expands over hurst" },
    SchemaEntry { section: "path", key: "hurst", format: "list of reals in (0,1)", doc: "Hurst parameters for fbm" },
    SchemaEntry { section: "path", key: "n_steps", format: "int >= 2", doc: "time steps N" },
    SchemaEntry { section: "path", key: "horizon", format: "real > 0", doc: "time horizon T" },
    SchemaEntry { section: "path", key: "dim", format: "int >= 1", doc: "path dimension d (solver experiments need 1)" },
    SchemaEntry { section: "solver", key: "flux", format: "list of reals", doc: "polynomial coefficients of A(u), constant term first" },
    SchemaEntry { section: "solver", key: "nx", format: "int >= 16", doc: "cells on the unit torus" },
    SchemaEntry { section: "solver", key: "cfl", format: "real in (0,1]", doc: "CFL number" },
    SchemaEntry { section: "solver", key: "scheme", format: "engquist-osher|godunov", doc: "numerical flux" },
    SchemaEntry { section: "solver", key: "initial", format: "riemann(ul,ur,x0)|sine(amp,freq)|lacunary(lambda,terms)", doc: "initial datum" },
    SchemaEntry { section: "solver", key: "output_times", format: "uniform:K or list of grid times", doc: "times at which the field is stored" },
    SchemaEntry { section: "solver", key: "v_levels", format: "int >= 2", doc: "Kruzhkov levels for the kinetic measure" },
    SchemaEntry { section: "solver", key: "steps_per_bin", format: "int >= 0", doc: "path steps per measure time bin (0 = default)" },
    SchemaEntry { section: "solver", key: "check_entropy", format: "bool", doc: "extract the kinetic measure and fail on negative production" },
    SchemaEntry { section: "estimator", key: "a_max", format: "real > 0", doc: "largest frequency of the oscillatory scan" },
    SchemaEntry { section: "estimator", key: "n_a", format: "int >= 4", doc: "frequencies in the scan" },
    SchemaEntry { section: "estimator", key: "gamma", format: "list of reals in (0,1]", doc: "window exponents gamma (a list gives a sweep)" },
    SchemaEntry { section: "estimator", key: "kappas", format: "list of reals in (0,1)", doc: "interpolation checks" },
    SchemaEntry { section: "estimator", key: "alphas", format: "list of reals in (-0.9,-0.1)", doc: "exponents for the scaling index" },
    SchemaEntry { section: "estimator", key: "lambda_min", format: "real > 0", doc: "smallest Laplace rate" },
    SchemaEntry { section: "estimator", key: "lambda_max", format: "real >= 16 lambda_min", doc: "largest Laplace rate" },
    SchemaEntry { section: "estimator", key: "n_lambda", format: "int >= 4", doc: "geometric Laplace rates" },
    SchemaEntry { section: "estimator", key: "fit_lo", format: "real >= 0", doc: "smallest lag in the Besov fit (0 = 4 dx)" },
    SchemaEntry { section: "estimator", key: "fit_hi", format: "real >= 0", doc: "largest lag in the Besov fit (0 = 1/16)" },
    SchemaEntry { section: "estimator", key: "modulus_levels", format: "int, 2^levels <= nx", doc: "dyadic lags of the L1 modulus" },
    SchemaEntry { section: "estimator", key: "holder_levels", format: "int >= 3, 2^levels <= N", doc: "dyadic lags of the path modulus" },
    SchemaEntry { section: "estimator", key: "nu", format: "real >= 1", doc: "flux degeneracy used in predicted exponents" },
    SchemaEntry { section: "estimator", key: "hurst_table", format: "list of reals in (0,1)", doc: "rows of the exponents table" },
    SchemaEntry { section: "estimator", key: "t_eval", format: "real >= 0", doc: "weak-form evaluation time (0 = last output time)" },
];

/// Human-readable schema listing.
pub fn schema_text() -> String {
    let mut s = String::new();
    let mut section = "";
    for e in SCHEMA {
        if e.section != section {
            section = e.section;
            let _ = writeln!(s, "[{section}]");
        }
        let _ = writeln!(s, "  {:<15} {}\n  {:<15} {}", e.key, e.format, "", e.doc);
    }
    s
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
}

fn fmt_initial(init: &InitialData) -> String {
    match *init {
        InitialData::Riemann { ul, ur, x0 } => format!("riemann({ul},{ur},{x0})"),
        InitialData::Sine { amp, freq } => format!("sine({amp},{freq})"),
        InitialData::Lacunary { lambda, terms } => format!("lacunary({lambda},{terms})"),
    }
}

fn parse_initial(s: &str) -> std::result::Result<InitialData, String> {
    let s = s.trim();
    let open = s.find('(').ok_or("expected name(args)")?;
    if !s.ends_with(')') {
        return Err("missing closing parenthesis".into());
    }
    let name = &s[..open];
    let args: Vec<&str> = s[open + 1..s.len() - 1].split(',').map(str::trim).collect();
    let num = |i: usize| -> std::result::Result<f64, String> {
        args.get(i).ok_or("too few arguments")?.parse::<f64>().map_err(|e| format!("argument {}: {e}", i + 1))
    };
    let int = |i: usize| -> std::result::Result<u32, String> {
        args.get(i).ok_or("too few arguments")?.parse::<u32>().map_err(|e| format!("argument {}: {e}", i + 1))
    };
    let (init, arity) = match name {
        "riemann" => (InitialData::Riemann { ul: num(0)?, ur: num(1)?, x0: num(2)? }, 3),
        "sine" => (InitialData::Sine { amp: num(0)?, freq: int(1)? }, 2),
        "lacunary" => (InitialData::Lacunary { lambda: num(0)?, terms: int(1)? }, 2),
        other => return Err(format!("unknown initial datum `{other}`")),
    };
    if args.len() != arity {
        return Err(format!("{name} takes {arity} arguments"));
    }
    Ok(init)
}

struct Reader<'a> {
    ini: &'a Ini,
}

impl Reader<'_> {
    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.ini.get_from(Some(section), key).map(str::trim)
    }

    fn value<T>(&self, section: &str, key: &str, default: T, parse: impl Fn(&str) -> std::result::Result<T, String>) -> Result<T> {
        match self.raw(section, key) {
            None => Ok(default),
            Some(s) => parse(s).map_err(|r| Error::config(section, key, r)),
        }
    }

    fn num<T: std::str::FromStr>(&self, section: &str, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.value(section, key, default, |s| s.parse::<T>().map_err(|e| format!("cannot parse `{s}`: {e}")))
    }

    fn list(&self, section: &str, key: &str, default: Vec<f64>) -> Result<Vec<f64>> {
        self.value(section, key, default, |s| {
            s.split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(|x| x.parse::<f64>().map_err(|e| format!("cannot parse `{x}`: {e}")))
                .collect()
        })
    }
}

impl ExperimentConfig {
    /// Parses an INI document; absent keys keep their defaults, unknown keys are rejected.
    pub fn from_ini_str(text: &str) -> Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| Error::Parse { line: e.line, reason: e.msg.to_string() })?;
        for (section, props) in ini.iter() {
            let Some(section) = section else {
                if let Some((k, _)) = props.iter().next() {
                    return Err(Error::config("", k, "key outside any section"));
                }
                continue;
            };
            if !SCHEMA.iter().any(|e| e.section == section) {
                return Err(Error::config(section, "", "unknown section"));
            }
            for (k, _) in props.iter() {
                if !SCHEMA.iter().any(|e| e.section == section && e.key == k) {
                    return Err(Error::config(section, k, "unknown key"));
                }
            }
        }
        let r = Reader { ini: &ini };
        let d = Self::default();
        let cfg = Self {
            kind: r.value("experiment", "kind", d.kind, |s| {
                ExperimentKind::parse(s).ok_or_else(|| format!("unknown experiment kind `{s}`"))
            })?,
            ensemble: r.num("experiment", "ensemble", d.ensemble)?,
            master_seed: r.num("experiment", "master_seed", d.master_seed)?,
            output_dir: r.value("experiment", "output_dir", d.output_dir, |s| Ok(PathBuf::from(s)))?,
            path: PathSpec {
                kinds: r.value("path", "kinds", d.path.kinds, |s| {
                    s.split(',')
                        .map(str::trim)
                        .map(|x| PathFamily::parse(x).ok_or_else(|| format!("unknown path kind `{x}`")))
                        .collect()
                })?,
                hurst: r.list("path", "hurst", d.path.hurst)?,
                n_steps: r.num("path", "n_steps", d.path.n_steps)?,
                horizon: r.num("path", "horizon", d.path.horizon)?,
                dim: r.num("path", "dim", d.path.dim)?,
            },
            solver: SolverSpec {
                flux: r.list("solver", "flux", d.solver.flux)?,
                nx: r.num("solver", "nx", d.solver.nx)?,
                cfl: r.num("solver", "cfl", d.solver.cfl)?,
                scheme: r.value("solver", "scheme", d.solver.scheme, |s| {
                    NumericalFlux::parse(s).ok_or_else(|| format!("unknown scheme `{s}`"))
                })?,
                initial: r.value("solver", "initial", d.solver.initial, parse_initial)?,
                output_times: r.value("solver", "output_times", d.solver.output_times, |s| {
                    if let Some(k) = s.strip_prefix("uniform:") {
                        k.trim().parse::<usize>().map(OutputTimes::Uniform).map_err(|e| format!("uniform count: {e}"))
                    } else {
                        s.split(',')
                            .map(|x| x.trim().parse::<f64>().map_err(|e| format!("cannot parse `{x}`: {e}")))
                            .collect::<std::result::Result<Vec<_>, _>>()
                            .map(OutputTimes::List)
                    }
                })?,
                v_levels: r.num("solver", "v_levels", d.solver.v_levels)?,
                steps_per_bin: r.num("solver", "steps_per_bin", d.solver.steps_per_bin)?,
                check_entropy: r.num("solver", "check_entropy", d.solver.check_entropy)?,
            },
            estimator: EstimatorSpec {
                a_max: r.num("estimator", "a_max", d.estimator.a_max)?,
                n_a: r.num("estimator", "n_a", d.estimator.n_a)?,
                gamma: r.list("estimator", "gamma", d.estimator.gamma)?,
                kappas: r.list("estimator", "kappas", d.estimator.kappas)?,
                alphas: r.list("estimator", "alphas", d.estimator.alphas)?,
                lambda_min: r.num("estimator", "lambda_min", d.estimator.lambda_min)?,
                lambda_max: r.num("estimator", "lambda_max", d.estimator.lambda_max)?,
                n_lambda: r.num("estimator", "n_lambda", d.estimator.n_lambda)?,
                fit_lo: r.num("estimator", "fit_lo", d.estimator.fit_lo)?,
                fit_hi: r.num("estimator", "fit_hi", d.estimator.fit_hi)?,
                modulus_levels: r.num("estimator", "modulus_levels", d.estimator.modulus_levels)?,
                holder_levels: r.num("estimator", "holder_levels", d.estimator.holder_levels)?,
                nu: r.num("estimator", "nu", d.estimator.nu)?,
                hurst_table: r.list("estimator", "hurst_table", d.estimator.hurst_table)?,
                t_eval: r.num("estimator", "t_eval", d.estimator.t_eval)?,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_ini_str(&text)
    }

    /// Full INI rendering; `from_ini_str(to_ini_string())` reproduces `self`.
    pub fn to_ini_string(&self) -> String {
        let mut ini = Ini::new();
        ini.with_section(Some("experiment"))
            .set("kind", self.kind.name())
            .set("ensemble", self.ensemble.to_string())
            .set("master_seed", self.master_seed.to_string())
            .set("output_dir", self.output_dir.display().to_string());
        let p = &self.path;
        ini.with_section(Some("path"))
            .set("kinds", p.kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join(","))
            .set("hurst", fmt_list(&p.hurst))
            .set("n_steps", p.n_steps.to_string())
            .set("horizon", format!("{}", p.horizon))
            .set("dim", p.dim.to_string());
        let s = &self.solver;
        ini.with_section(Some("solver"))
            .set("flux", fmt_list(&s.flux))
            .set("nx", s.nx.to_string())
            .set("cfl", format!("{}", s.cfl))
            .set("scheme", s.scheme.name())
            .set("initial", fmt_initial(&s.initial))
            .set(
                "output_times",
                match &s.output_times {
                    OutputTimes::Uniform(k) => format!("uniform:{k}"),
                    OutputTimes::List(v) => fmt_list(v),
                },
            )
            .set("v_levels", s.v_levels.to_string())
            .set("steps_per_bin", s.steps_per_bin.to_string())
            .set("check_entropy", s.check_entropy.to_string());
        let e = &self.estimator;
        ini.with_section(Some("estimator"))
            .set("a_max", format!("{}", e.a_max))
            .set("n_a", e.n_a.to_string())
            .set("gamma", fmt_list(&e.gamma))
            .set("kappas", fmt_list(&e.kappas))
            .set("alphas", fmt_list(&e.alphas))
            .set("lambda_min", format!("{}", e.lambda_min))
            .set("lambda_max", format!("{}", e.lambda_max))
            .set("n_lambda", e.n_lambda.to_string())
            .set("fit_lo", format!("{}", e.fit_lo))
            .set("fit_hi", format!("{}", e.fit_hi))
            .set("modulus_levels", e.modulus_levels.to_string())
            .set("holder_levels", e.holder_levels.to_string())
            .set("nu", format!("{}", e.nu))
            .set("hurst_table", fmt_list(&e.hurst_table))
            .set("t_eval", format!("{}", e.t_eval));
        let mut buf = Vec::new();
        ini.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ini output is utf-8")
    }

    /// Applies a `section.key=value` override on top of the current values.
    pub fn with_override(&self, assignment: &str) -> Result<Self> {
        let (lhs, value) =
            assignment.split_once('=').ok_or_else(|| Error::config("", assignment, "expected section.key=value"))?;
        let (section, key) =
            lhs.trim().split_once('.').ok_or_else(|| Error::config("", lhs, "expected section.key=value"))?;
        let mut ini = Ini::load_from_str(&self.to_ini_string()).expect("own rendering parses");
        if !SCHEMA.iter().any(|e| e.section == section && e.key == key) {
            return Err(Error::config(section, key, "unknown key"));
        }
        ini.with_section(Some(section)).set(key, value.trim());
        let mut buf = Vec::new();
        ini.write_to(&mut buf).expect("writing to a Vec cannot fail");
        Self::from_ini_str(&String::from_utf8(buf).expect("ini output is utf-8"))
    }

    /// Every field against the ranges its owning module accepts.
    pub fn validate(&self) -> Result<()> {
        let bad = |section: &str, key: &str, reason: String| Err(Error::config(section, key, reason));
        let finite_in = |x: f64, lo: f64, hi: f64| x.is_finite() && x > lo && x < hi;

        if self.ensemble == 0 {
            return bad("experiment", "ensemble", "must be at least 1".into());
        }
        if self.output_dir.as_os_str().is_empty() {
            return bad("experiment", "output_dir", "must not be empty".into());
        }

        let p = &self.path;
        if p.kinds.is_empty() {
            return bad("path", "kinds", "need at least one path kind".into());
        }
        if p.kinds.contains(&PathFamily::Fbm) && p.hurst.is_empty() {
            return bad("path", "hurst", "fbm needs at least one Hurst parameter".into());
        }
        if let Some(h) = p.hurst.iter().find(|h| !finite_in(**h, 0.0, 1.0)) {
            return bad("path", "hurst", format!("must lie in (0, 1), got {h}"));
        }
        if p.n_steps < 2 {
            return bad("path", "n_steps", format!("must be at least 2, got {}", p.n_steps));
        }
        if !(p.horizon.is_finite() && p.horizon > 0.0) {
            return bad("path", "horizon", format!("must be positive, got {}", p.horizon));
        }
        if p.dim == 0 {
            return bad("path", "dim", "must be at least 1".into());
        }

        let e = &self.estimator;
        if !(e.nu.is_finite() && e.nu >= 1.0) {
            return bad("estimator", "nu", format!("must be at least 1, got {}", e.nu));
        }
        match self.kind {
            ExperimentKind::Paths => {
                if e.holder_levels < 3 || (1usize << e.holder_levels.min(62)) > p.n_steps {
                    return bad("estimator", "holder_levels", format!("need 3 <= levels and 2^levels <= N = {}", p.n_steps));
                }
            }
            ExperimentKind::Irregularity => {
                if !(e.a_max.is_finite() && e.a_max > 0.0) {
                    return bad("estimator", "a_max", format!("must be positive, got {}", e.a_max));
                }
                if e.n_a < 4 {
                    return bad("estimator", "n_a", "need at least 4 frequencies".into());
                }
                if e.gamma.is_empty() {
                    return bad("estimator", "gamma", "need at least one value".into());
                }
                if let Some(g) = e.gamma.iter().find(|g| !(g.is_finite() && **g > 0.0 && **g <= 1.0)) {
                    return bad("estimator", "gamma", format!("must lie in (0, 1], got {g}"));
                }
                if let Some(k) = e.kappas.iter().find(|k| !finite_in(**k, 0.0, 1.0)) {
                    return bad("estimator", "kappas", format!("must lie in (0, 1), got {k}"));
                }
            }
            ExperimentKind::Iota => {
                if e.alphas.is_empty() {
                    return bad("estimator", "alphas", "need at least one value".into());
                }
                if let Some(a) = e.alphas.iter().find(|a| !finite_in(**a, -0.9, -0.1)) {
                    return bad("estimator", "alphas", format!("must lie in (-0.9, -0.1), got {a}"));
                }
                if !(e.lambda_min.is_finite() && e.lambda_min > 0.0) {
                    return bad("estimator", "lambda_min", format!("must be positive, got {}", e.lambda_min));
                }
                if !(e.lambda_max.is_finite() && e.lambda_max >= 16.0 * e.lambda_min) {
                    return bad("estimator", "lambda_max", "must be at least 16 lambda_min".into());
                }
                if e.n_lambda < 4 {
                    return bad("estimator", "n_lambda", "need at least 4 rates".into());
                }
                if p.n_steps < 16 {
                    return bad("path", "n_steps", "the scaling index needs at least 16 steps".into());
                }
            }
            ExperimentKind::Exponents => {
                if e.hurst_table.is_empty() {
                    return bad("estimator", "hurst_table", "need at least one value".into());
                }
                if let Some(h) = e.hurst_table.iter().find(|h| !finite_in(**h, 0.0, 1.0)) {
                    return bad("estimator", "hurst_table", format!("must lie in (0, 1), got {h}"));
                }
            }
            ExperimentKind::Solve | ExperimentKind::RegularitySweep | ExperimentKind::Weakform => {
                self.validate_solver()?;
            }
        }
        Ok(())
    }

    fn validate_solver(&self) -> Result<()> {
        let bad = |key: &str, reason: String| Err(Error::config("solver", key, reason));
        let (p, s, e) = (&self.path, &self.solver, &self.estimator);
        if p.dim != 1 {
            return Err(Error::config("path", "dim", "the solver is one-dimensional"));
        }
        if let Err(err) = make_flux(&s.flux) {
            return bad("flux", err.to_string());
        }
        if s.nx < 16 {
            return bad("nx", format!("need at least 16 cells, got {}", s.nx));
        }
        if !(s.cfl > 0.0 && s.cfl <= 1.0) {
            return bad("cfl", format!("must lie in (0, 1], got {}", s.cfl));
        }
        if let Err(err) = s.initial.validate() {
            return bad("initial", err.to_string());
        }
        if let OutputTimes::Uniform(0) = s.output_times {
            return bad("output_times", "uniform count must be positive".into());
        }
        let times = s.output_times.resolve(p.horizon);
        if times.is_empty() {
            return bad("output_times", "need at least one time".into());
        }
        for t in &times {
            let k = t / p.horizon * p.n_steps as f64;
            if !(t.is_finite() && *t >= 0.0 && *t <= p.horizon * (1.0 + 1e-12)) || (k - k.round()).abs() > 1e-9 * k.max(1.0) {
                return bad("output_times", format!("{t} is not a grid time of [0, {}] with {} steps", p.horizon, p.n_steps));
            }
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return bad("output_times", "must be strictly increasing".into());
        }
        if s.v_levels < 2 {
            return bad("v_levels", "need at least 2 levels".into());
        }
        if self.kind == ExperimentKind::RegularitySweep {
            let lv = e.modulus_levels;
            if lv < 4 || (1usize << lv.min(62)) > s.nx {
                return Err(Error::config("estimator", "modulus_levels", format!("need 4 <= levels and 2^levels <= nx = {}", s.nx)));
            }
            if e.fit_lo < 0.0 || e.fit_hi < 0.0 || (e.fit_hi > 0.0 && e.fit_lo >= e.fit_hi) {
                return Err(Error::config("estimator", "fit_hi", "need 0 <= fit_lo < fit_hi"));
            }
        }
        if self.kind == ExperimentKind::Weakform && e.t_eval != 0.0 && !times.iter().any(|t| (t - e.t_eval).abs() < 1e-12) {
            return Err(Error::config("estimator", "t_eval", format!("{} is not an output time", e.t_eval)));
        }
        Ok(())
    }

    /// Fit window of the Besov estimator with defaults filled in.
    pub fn fit_range(&self) -> (f64, f64) {
        let (lo, hi) = crate::regularity::default_fit_range(self.solver.nx);
        let e = &self.estimator;
        (if e.fit_lo > 0.0 { e.fit_lo } else { lo }, if e.fit_hi > 0.0 { e.fit_hi } else { hi })
    }
}
