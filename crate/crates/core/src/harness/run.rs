//! Experiment execution: realization-parallel compute, single-threaded writes.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::config::{ExperimentConfig, ExperimentKind, PathFamily};
use super::manifest::{remove_previous, RunManifest, RunStatus};
use super::svg::{line_plot, Series};
use crate::error::{Error, Result};
use crate::fit::median;
use crate::irregularity::{check_interpolation, estimate_iota, estimate_rho_gamma, write_iota_csv, write_scan_csv};
use crate::kinetic::{default_catalog, weak_form_residual, WeakFormReport};
use crate::paths::{derive_seed, generate_brownian, generate_deterministic, generate_fbm, holder_exponent, write_path};
use crate::paths::{DeterministicKind, SampledPath};
use crate::regularity::{besov_exponent, l1_modulus, predicted_lambda_fbm, predicted_s_star, time_averaged_modulus};
use crate::regularity::ModulusCurve;
use crate::solver::{
    default_v_levels, entropy_defect, entropy_defect_with, make_flux, solve_rough_with, total_variation,
    write_measure_csv, write_solution_csv, GridSolution, KineticMeasure, SolveOptions, DEFAULT_V_MARGIN,
};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "ROUGHFLUX_THREADS";

pub fn threads_env_doc() -> String {
    format!(
        "{THREADS_ENV}: number of worker threads for realization-parallel runs.\n\
         Unset, empty or 0 means one thread per logical core. Output bytes do not\n\
         depend on this value: results are sorted by realization before writing.\n"
    )
}

/// Threads requested through [`THREADS_ENV`], 0 meaning the default.
pub fn requested_threads() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(s) if s.trim().is_empty() => Ok(0),
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .map_err(|e| Error::config("env", THREADS_ENV, format!("cannot parse `{s}`: {e}"))),
    }
}

/// A path family instance: fBm at one Hurst parameter, Brownian, or linear.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Variant {
    pub label: String,
    pub family: PathFamily,
    pub hurst: Option<f64>,
}

pub fn variants(cfg: &ExperimentConfig) -> Vec<Variant> {
    let mut out = Vec::new();
    for &family in &cfg.path.kinds {
        match family {
            PathFamily::Fbm => {
                for &h in &cfg.path.hurst {
                    out.push(Variant { label: format!("fbm_H{h}"), family, hurst: Some(h) });
                }
            }
            PathFamily::Brownian => out.push(Variant { label: "brownian".into(), family, hurst: Some(0.5) }),
            PathFamily::Linear => out.push(Variant { label: "linear".into(), family, hurst: None }),
        }
    }
    out
}

/// Random variants run the full ensemble; deterministic ones run once.
fn n_realizations(cfg: &ExperimentConfig, v: &Variant) -> usize {
    if v.family.is_random() {
        cfg.ensemble
    } else {
        1
    }
}

fn make_path(cfg: &ExperimentConfig, v: &Variant, seed: u64) -> Result<SampledPath> {
    let p = &cfg.path;
    match v.family {
        PathFamily::Fbm => generate_fbm(v.hurst.expect("fbm variant has H"), p.dim, p.n_steps, p.horizon, seed),
        PathFamily::Brownian => generate_brownian(p.dim, p.n_steps, p.horizon, seed),
        PathFamily::Linear => {
            if p.dim != 1 {
                return Err(Error::config("path", "dim", "linear paths are one-dimensional"));
            }
            generate_deterministic(DeterministicKind::Linear, p.n_steps, p.horizon)
        }
    }
}

/// Realization index pairs `(variant, i)` in output order.
fn jobs(cfg: &ExperimentConfig, vars: &[Variant]) -> Vec<(usize, usize)> {
    vars.iter().enumerate().flat_map(|(k, v)| (0..n_realizations(cfg, v)).map(move |i| (k, i))).collect()
}

fn seed_of(cfg: &ExperimentConfig, v: &Variant, i: usize) -> Option<u64> {
    v.family.is_random().then(|| derive_seed(cfg.master_seed, i as u64))
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |x| format!("{x:.16e}"))
}

fn fmt_seed(s: Option<u64>) -> String {
    s.map_or_else(String::new, |s| s.to_string())
}

/// Single-threaded writer for the output directory.
struct Out {
    dir: PathBuf,
}

impl Out {
    fn file(&self, name: &str, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
        let p = self.dir.join(name);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        let f = File::create(&p).map_err(|e| Error::io(&p, e))?;
        let mut w = BufWriter::new(f);
        body(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(&p, e))
    }

    fn text(&self, name: &str, text: &str) -> Result<()> {
        self.file(name, |w| w.write_all(text.as_bytes()))
    }

    fn json(&self, name: &str, v: &serde_json::Value) -> Result<()> {
        self.text(name, &(serde_json::to_string_pretty(v).expect("json serializes") + "\n"))
    }
}

/// Accumulated kinetic-measure violations across a run.
#[derive(Default)]
struct Violations {
    count: usize,
    worst: f64,
    tolerance: f64,
}

impl Violations {
    fn add(&mut self, m: &KineticMeasure) {
        if m.violations > 0 {
            self.count += m.violations;
            if m.worst_negative < self.worst {
                self.worst = m.worst_negative;
                self.tolerance = crate::solver::NEGATIVE_TOLERANCE * m.max_density;
            }
        }
    }

    fn into_result(self) -> Result<()> {
        if self.count > 0 {
            return Err(Error::NegativeEntropyProduction { count: self.count, worst: self.worst, tolerance: self.tolerance });
        }
        Ok(())
    }
}

/// Runs `cfg`, writing every artifact and `manifest.json` into its output directory.
/// The manifest is written before any computation and finalized afterwards,
/// also when the run fails.
pub fn run(cfg: &ExperimentConfig) -> Result<RunManifest> {
    cfg.validate()?;
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    remove_previous(&dir)?;
    let threads = requested_threads()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::config("env", THREADS_ENV, e.to_string()))?;

    let vars = if cfg.kind == ExperimentKind::Exponents { Vec::new() } else { variants(cfg) };
    let n_seeds = if vars.iter().any(|v| v.family.is_random()) { cfg.ensemble } else { 0 };
    let started = Instant::now();
    let mut manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        kind: cfg.kind.name().into(),
        status: RunStatus::Running,
        error: None,
        config: cfg.to_ini_string(),
        started_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        wall_clock_seconds: 0.0,
        threads: pool.current_num_threads(),
        variants: vars.iter().map(|v| v.label.clone()).collect(),
        seeds: (0..n_seeds).map(|i| derive_seed(cfg.master_seed, i as u64)).collect(),
        files: Vec::new(),
    };
    let out = Out { dir: dir.clone() };
    out.text("config.ini", &manifest.config)?;
    manifest.write(&dir)?;

    let outcome = pool.install(|| execute(cfg, &vars, &out));
    manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
    manifest.status = match &outcome {
        Ok(()) => RunStatus::Complete,
        Err(Error::NegativeEntropyProduction { .. }) => RunStatus::InvariantViolation,
        Err(_) => RunStatus::Failed,
    };
    manifest.error = outcome.as_ref().err().map(|e| e.to_string());
    manifest.write(&dir)?;
    outcome.map(|_| manifest)
}

fn execute(cfg: &ExperimentConfig, vars: &[Variant], out: &Out) -> Result<()> {
    match cfg.kind {
        ExperimentKind::Paths => run_paths(cfg, vars, out),
        ExperimentKind::Irregularity => run_irregularity(cfg, vars, out),
        ExperimentKind::Iota => run_iota(cfg, vars, out),
        ExperimentKind::Solve => run_solve(cfg, vars, out),
        ExperimentKind::RegularitySweep => run_regularity(cfg, vars, out),
        ExperimentKind::Exponents => run_exponents(cfg, out),
        ExperimentKind::Weakform => run_weakform(cfg, vars, out),
    }
}

fn run_paths(cfg: &ExperimentConfig, vars: &[Variant], out: &Out) -> Result<()> {
    let jobs = jobs(cfg, vars);
    let results: Vec<(SampledPath, f64, f64)> = jobs
        .par_iter()
        .map(|&(k, i)| {
            let v = &vars[k];
            let path = make_path(cfg, v, seed_of(cfg, v, i).unwrap_or(0))?;
            let h = holder_exponent(&path, cfg.estimator.holder_levels)?;
            Ok((path, h.eta_hat, h.fit_quality))
        })
        .collect::<Result<_>>()?;
    for (&(k, i), (path, _, _)) in jobs.iter().zip(&results) {
        out.file(&format!("paths/{}_r{i:04}.csv", vars[k].label), |w| write_path(path, w))?;
    }
    out.file("paths.csv", |w| {
        writeln!(w, "variant,hurst,realization,seed,eta_hat,fit_quality,w_end")?;
        for (&(k, i), (path, eta, q)) in jobs.iter().zip(&results) {
            let v = &vars[k];
            writeln!(
                w,
                "{},{},{i},{},{eta:.16e},{q:.16e},{:.16e}",
                v.label,
                fmt_opt(v.hurst),
                fmt_seed(seed_of(cfg, v, i)),
                path.point(path.n_steps())[0]
            )?;
        }
        Ok(())
    })?;
    let mut per = Vec::new();
    for (k, v) in vars.iter().enumerate() {
        let rows: Vec<&(SampledPath, f64, f64)> =
            jobs.iter().zip(&results).filter(|((kk, _), _)| *kk == k).map(|(_, r)| r).collect();
        let ends: Vec<f64> = rows.iter().map(|r| r.0.point(r.0.n_steps())[0]).collect();
        let mean = ends.iter().sum::<f64>() / ends.len() as f64;
        let var = if ends.len() > 1 {
            ends.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (ends.len() - 1) as f64
        } else {
            0.0
        };
        let etas: Vec<f64> = rows.iter().map(|r| r.1).collect();
        per.push(json!({
            "variant": v.label,
            "hurst": v.hurst,
            "realizations": rows.len(),
            "median_eta_hat": median(&etas),
            "mean_w_end": mean,
            "var_w_end": var,
        }));
    }
    out.json("summary.json", &json!({ "kind": "paths", "variants": per }))
}

fn run_irregularity(cfg: &ExperimentConfig, vars: &[Variant], out: &Out) -> Result<()> {
    let e = &cfg.estimator;
    let jobs = jobs(cfg, vars);
    struct Row {
        gamma: f64,
        rho: f64,
        norm: f64,
        q: f64,
        degenerate: bool,
        checks: Vec<(f64, f64, f64, f64, bool)>,
    }
    let results: Vec<(Vec<Row>, Option<crate::irregularity::OscillatoryScan>)> = jobs
        .par_iter()
        .map(|&(k, i)| {
            let v = &vars[k];
            let path = make_path(cfg, v, seed_of(cfg, v, i).unwrap_or(0))?;
            let mut rows = Vec::new();
            let mut scan = None;
            for (ig, &g) in e.gamma.iter().enumerate() {
                let rep = estimate_rho_gamma(&path, e.a_max, e.n_a, g)?;
                let checks = e
                    .kappas
                    .iter()
                    .map(|&kappa| check_interpolation(&rep, kappa).map(|c| (kappa, c.lhs, c.rhs, c.margin, c.pass)))
                    .collect::<Result<Vec<_>>>()?;
                rows.push(Row {
                    gamma: g,
                    rho: rep.rho_hat,
                    norm: rep.norm_estimate,
                    q: rep.fit_quality,
                    degenerate: rep.degenerate,
                    checks,
                });
                if i == 0 && ig == 0 {
                    scan = Some(rep.scan);
                }
            }
            Ok((rows, scan))
        })
        .collect::<Result<_>>()?;
    out.file("irregularity.csv", |w| {
        writeln!(w, "variant,hurst,realization,seed,gamma,rho_hat,norm_estimate,fit_quality,degenerate")?;
        for (&(k, i), (rows, _)) in jobs.iter().zip(&results) {
            let v = &vars[k];
            for r in rows {
                writeln!(
                    w,
                    "{},{},{i},{},{},{:.16e},{:.16e},{:.16e},{}",
                    v.label,
                    fmt_opt(v.hurst),
                    fmt_seed(seed_of(cfg, v, i)),
                    r.gamma,
                    r.rho,
                    r.norm,
                    r.q,
                    r.degenerate
                )?;
            }
        }
        Ok(())
    })?;
    out.file("interpolation.csv", |w| {
        writeln!(w, "variant,realization,gamma,kappa,lhs,rhs,margin,pass")?;
        for (&(k, i), (rows, _)) in jobs.iter().zip(&results) {
            for r in rows {
                for (kappa, lhs, rhs, margin, pass) in &r.checks {
                    writeln!(w, "{},{i},{},{kappa},{lhs:.16e},{rhs:.16e},{margin:.16e},{pass}", vars[k].label, r.gamma)?;
                }
            }
        }
        Ok(())
    })?;
    for (&(k, _), (_, scan)) in jobs.iter().zip(&results) {
        if let Some(scan) = scan {
            out.file(&format!("scan_{}.csv", vars[k].label), |w| write_scan_csv(scan, w))?;
        }
    }
    let mut per = Vec::new();
    for (k, v) in vars.iter().enumerate() {
        for (ig, &g) in e.gamma.iter().enumerate() {
            let rows: Vec<&Row> =
                jobs.iter().zip(&results).filter(|((kk, _), _)| *kk == k).map(|(_, r)| &r.0[ig]).collect();
            let rhos: Vec<f64> = rows.iter().map(|r| r.rho).collect();
            let checks: Vec<bool> = rows.iter().flat_map(|r| r.checks.iter().map(|c| c.4)).collect();
            let pass = checks.iter().filter(|p| **p).count();
            per.push(json!({
                "variant": v.label,
                "hurst": v.hurst,
                "gamma": g,
                "realizations": rows.len(),
                "median_rho_hat": median(&rhos),
                "rho_upper_bound": v.hurst.filter(|_| v.family.is_random()).map(|h| 1.0 / (2.0 * h)),
                "interpolation_checks": checks.len(),
                "interpolation_pass": pass,
            }));
        }
    }
    out.json("summary.json", &json!({ "kind": "irregularity", "a_max": e.a_max, "n_a": e.n_a, "variants": per }))
}

fn run_iota(cfg: &ExperimentConfig, vars: &[Variant], out: &Out) -> Result<()> {
    let e = &cfg.estimator;
    let jobs = jobs(cfg, vars);
    let results: Vec<crate::irregularity::IotaEstimate> = jobs
        .par_iter()
        .map(|&(k, i)| {
            let v = &vars[k];
            let path = make_path(cfg, v, seed_of(cfg, v, i).unwrap_or(0))?;
            estimate_iota(&path, &e.alphas, e.lambda_min, e.lambda_max, e.n_lambda)
        })
        .collect::<Result<_>>()?;
    out.file("iota.csv", |w| {
        writeln!(w, "variant,hurst,realization,seed,iota_hat,constant_c,zero_fraction,flagged")?;
        for (&(k, i), r) in jobs.iter().zip(&results) {
            let v = &vars[k];
            writeln!(
                w,
                "{},{},{i},{},{:.16e},{:.16e},{:.16e},{}",
                v.label,
                fmt_opt(v.hurst),
                fmt_seed(seed_of(cfg, v, i)),
                r.iota_hat,
                r.constant_c,
                r.zero_fraction,
                r.flagged
            )?;
        }
        Ok(())
    })?;
    out.file("iota_alpha.csv", |w| {
        writeln!(w, "variant,realization,alpha,slope,iota,fit_quality")?;
        for (&(k, i), r) in jobs.iter().zip(&results) {
            for (f, iota) in r.per_alpha.iter().zip(r.per_alpha_iota()) {
                writeln!(w, "{},{i},{},{:.16e},{iota:.16e},{:.16e}", vars[k].label, f.alpha, f.slope, f.fit_quality)?;
            }
        }
        Ok(())
    })?;
    for (&(k, i), r) in jobs.iter().zip(&results) {
        if i == 0 {
            out.file(&format!("iota_integrals_{}.csv", vars[k].label), |w| write_iota_csv(r, w))?;
        }
    }
    let mut per = Vec::new();
    let mut points = Vec::new();
    for (k, v) in vars.iter().enumerate() {
        let iotas: Vec<f64> =
            jobs.iter().zip(&results).filter(|((kk, _), _)| *kk == k).map(|(_, r)| r.iota_hat).collect();
        let med = median(&iotas);
        if let (Some(h), true) = (v.hurst, v.family.is_random()) {
            points.push((h, med));
        }
        per.push(json!({
            "variant": v.label,
            "hurst": v.hurst,
            "realizations": iotas.len(),
            "median_iota_hat": med,
            "reference": if v.family.is_random() { v.hurst } else { Some(1.0) },
        }));
    }
    if !points.is_empty() {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let svg = line_plot(
            "scaling index versus Hurst parameter",
            "H",
            "median iota",
            &[
                Series { name: "median iota".into(), points, dashed: false, markers: true },
                Series { name: "iota = H".into(), points: vec![(0.0, 0.0), (1.0, 1.0)], dashed: true, markers: false },
            ],
        );
        out.text("iota_vs_h.svg", &svg)?;
    }
    out.json("summary.json", &json!({ "kind": "iota", "alphas": e.alphas, "variants": per }))
}

/// One solver realization with optional measure.
struct Solved {
    sol: GridSolution,
    measure: Option<KineticMeasure>,
}

fn solve_one(cfg: &ExperimentConfig, path: &SampledPath, want_measure: bool) -> Result<Solved> {
    let s = &cfg.solver;
    let flux = make_flux(&s.flux)?;
    let u0 = s.initial.cell_averages(s.nx)?;
    let times = s.output_times.resolve(cfg.path.horizon);
    let sol = solve_rough_with(&flux, path, &u0, s.nx, &times, &SolveOptions { cfl: s.cfl, scheme: s.scheme })?;
    let measure = if want_measure {
        let lv = default_v_levels(&sol, s.v_levels, DEFAULT_V_MARGIN);
        Some(if s.steps_per_bin == 0 {
            entropy_defect(&sol, &flux, path, &lv)?
        } else {
            entropy_defect_with(&sol, &flux, path, &lv, s.steps_per_bin)?
        })
    } else {
        None
    };
    Ok(Solved { sol, measure })
}

fn run_solve(cfg: &ExperimentConfig, vars: &[Variant], out: &Out) -> Result<()> {
    let jobs = jobs(cfg, vars);
    let results: Vec<Solved> = jobs
        .par_iter()
        .map(|&(k, i)| {
            let v = &vars[k];
            let path = make_path(cfg, v, seed_of(cfg, v, i).unwrap_or(0))?;
            solve_one(cfg, &path, cfg.solver.check_entropy)
        })
        .collect::<Result<_>>()?;
    let mut viol = Violations::default();
    out.file("solve.csv", |w| {
        writeln!(w, "variant,hurst,realization,seed,mass_drift,u_min,u_max,tv_initial,tv_final,substeps,measure_mass,violations")?;
        for (&(k, i), r) in jobs.iter().zip(&results) {
            let v = &vars[k];
            let sol = &r.sol;
            let m0: f64 = sol.u0.iter().sum::<f64>() * sol.dx();
            let drift = (0..sol.n_times()).map(|t| (sol.mass(t) - m0).abs()).fold(0.0, f64::max);
            let (lo, hi) = sol.data_range();
            let last = sol.slice(sol.n_times() - 1);
            writeln!(
                w,
                "{},{},{i},{},{drift:.16e},{lo:.16e},{hi:.16e},{:.16e},{:.16e},{},{},{}",
                v.label,
                fmt_opt(v.hurst),
                fmt_seed(seed_of(cfg, v, i)),
                total_variation(&sol.u0),
                total_variation(last),
                sol.substeps,
                fmt_opt(r.measure.as_ref().map(|m| m.total_mass())),
                r.measure.as_ref().map_or_else(String::new, |m| m.violations.to_string()),
            )?;
        }
        Ok(())
    })?;
    for (&(k, i), r) in jobs.iter().zip(&results) {
        if let Some(m) = &r.measure {
            viol.add(m);
        }
        if i == 0 {
            out.file(&format!("solution_{}.csv", vars[k].label), |w| write_solution_csv(&r.sol, w))?;
            if let Some(m) = &r.measure {
                out.file(&format!("measure_{}.csv", vars[k].label), |w| write_measure_csv(m, w))?;
            }
        }
    }
    let total_violations = viol.count;
    out.json(
        "summary.json",
        &json!({
            "kind": "solve",
            "runs": results.len(),
            "entropy_checked": cfg.solver.check_entropy,
            "entropy_violations": total_violations,
        }),
    )?;
    viol.into_result()
}

struct RegRow {
    lambda_hat: f64,
    fit_quality: f64,
    per_time: Vec<(f64, f64)>,
    curve: ModulusCurve,
    measure: Option<(usize, f64, f64, f64)>,
    measure_mass: Option<f64>,
}

fn run_regularity(cfg: &ExperimentConfig, vars: &[Variant], out: &Out) -> Result<()> {
    let e = &cfg.estimator;
    let (lo, hi) = cfg.fit_range();
    let jobs = jobs(cfg, vars);
    let results: Vec<RegRow> = jobs
        .par_iter()
        .map(|&(k, i)| {
            let v = &vars[k];
            let path = make_path(cfg, v, seed_of(cfg, v, i).unwrap_or(0))?;
            let solved = solve_one(cfg, &path, cfg.solver.check_entropy)?;
            let sol = &solved.sol;
            let slices: Vec<&[f64]> = (0..sol.n_times()).map(|t| sol.slice(t)).collect();
            let curve = time_averaged_modulus(&slices, e.modulus_levels)?;
            let rep = besov_exponent(&curve, lo, hi)?;
            let per_time = (0..sol.n_times())
                .map(|t| {
                    let c = l1_modulus(sol.slice(t), e.modulus_levels)?;
                    Ok((sol.times[t], besov_exponent(&c, lo, hi)?.lambda_hat))
                })
                .collect::<Result<Vec<_>>>()?;
            let measure = solved.measure.as_ref().map(|m| (m.violations, m.worst_negative, m.max_density, m.total_mass()));
            Ok(RegRow {
                lambda_hat: rep.lambda_hat,
                fit_quality: rep.fit_quality,
                per_time,
                curve,
                measure_mass: measure.map(|m| m.3),
                measure,
            })
        })
        .collect::<Result<_>>()?;
    let predicted = |v: &Variant| -> Option<f64> {
        v.hurst.filter(|_| v.family.is_random()).and_then(|h| predicted_lambda_fbm(h, e.nu).ok())
    };
    out.file("regularity.csv", |w| {
        writeln!(w, "variant,hurst,realization,seed,lambda_hat,fit_quality,predicted,measure_mass,violations")?;
        for (&(k, i), r) in jobs.iter().zip(&results) {
            let v = &vars[k];
            writeln!(
                w,
                "{},{},{i},{},{:.16e},{:.16e},{},{},{}",
                v.label,
                fmt_opt(v.hurst),
                fmt_seed(seed_of(cfg, v, i)),
                r.lambda_hat,
                r.fit_quality,
                fmt_opt(predicted(v)),
                fmt_opt(r.measure_mass),
                r.measure.map_or_else(String::new, |m| m.0.to_string()),
            )?;
        }
        Ok(())
    })?;
    out.file("lambda_per_time.csv", |w| {
        writeln!(w, "variant,realization,t,lambda_hat")?;
        for (&(k, i), r) in jobs.iter().zip(&results) {
            for (t, l) in &r.per_time {
                writeln!(w, "{},{i},{t:.16e},{l:.16e}", vars[k].label)?;
            }
        }
        Ok(())
    })?;
    for (&(k, i), r) in jobs.iter().zip(&results) {
        if i == 0 {
            out.file(&format!("modulus_{}.csv", vars[k].label), |w| r.curve.write_csv(w))?;
        }
    }
    let mut viol = Violations::default();
    for r in &results {
        if let Some((count, worst, max_density, _)) = r.measure {
            if count > 0 {
                viol.count += count;
                if worst < viol.worst {
                    viol.worst = worst;
                    viol.tolerance = crate::solver::NEGATIVE_TOLERANCE * max_density;
                }
            }
        }
    }
    let mut per = Vec::new();
    let mut fbm_points = Vec::new();
    let mut flat = Vec::new();
    for (k, v) in vars.iter().enumerate() {
        let lams: Vec<f64> =
            jobs.iter().zip(&results).filter(|((kk, _), _)| *kk == k).map(|(_, r)| r.lambda_hat).collect();
        let med = median(&lams);
        match (v.family.is_random(), v.hurst) {
            (true, Some(h)) => fbm_points.push((h, med)),
            _ => flat.push((v.label.clone(), med)),
        }
        per.push(json!({
            "variant": v.label,
            "hurst": v.hurst,
            "realizations": lams.len(),
            "median_lambda_hat": med,
            "min_lambda_hat": lams.iter().copied().fold(f64::INFINITY, f64::min),
            "predicted": predicted(v),
        }));
    }
    if !fbm_points.is_empty() {
        fbm_points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let curve: Vec<(f64, f64)> = (1..=19)
            .map(|j| j as f64 / 20.0)
            .filter_map(|h| predicted_lambda_fbm(h, e.nu).ok().map(|l| (h, l)))
            .collect();
        let mut series = vec![
            Series { name: "median lambda".into(), points: fbm_points, dashed: false, markers: true },
            Series { name: "predicted".into(), points: curve, dashed: true, markers: false },
        ];
        for (name, med) in flat {
            series.push(Series { name, points: vec![(0.05, med), (0.95, med)], dashed: true, markers: false });
        }
        out.text("lambda_vs_h.svg", &line_plot("time-averaged regularity versus Hurst parameter", "H", "lambda", &series))?;
    }
    out.json(
        "summary.json",
        &json!({
            "kind": "regularity-sweep",
            "fit_range": [lo, hi],
            "nu": e.nu,
            "variants": per,
            "entropy_checked": cfg.solver.check_entropy,
            "entropy_violations": viol.count,
        }),
    )?;
    viol.into_result()
}

/// One row of the predicted-exponent table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentRow {
    pub hurst: f64,
    pub nu: f64,
    pub lambda_fbm: f64,
    /// Velocity-average threshold at `eta = iota = H`, defined for `H >= 1/2`.
    pub s_star: Option<f64>,
}

pub fn exponent_table(hurst: &[f64], nu: f64) -> Result<Vec<ExponentRow>> {
    hurst
        .iter()
        .map(|&h| {
            Ok(ExponentRow {
                hurst: h,
                nu,
                lambda_fbm: predicted_lambda_fbm(h, nu)?,
                s_star: if h >= 0.5 { Some(predicted_s_star(h, h)?) } else { None },
            })
        })
        .collect()
}

/// Fixed-width rendering of [`exponent_table`].
pub fn format_exponent_table(rows: &[ExponentRow]) -> String {
    let mut s = format!("{:>6} {:>6} {:>10} {:>10}\n", "H", "nu", "lambda", "s*");
    for r in rows {
        let ss = r.s_star.map_or_else(|| "-".to_string(), |x| format!("{x:.6}"));
        s.push_str(&format!("{:>6} {:>6} {:>10.6} {:>10}\n", r.hurst, r.nu, r.lambda_fbm, ss));
    }
    s
}

fn run_exponents(cfg: &ExperimentConfig, out: &Out) -> Result<()> {
    let rows = exponent_table(&cfg.estimator.hurst_table, cfg.estimator.nu)?;
    out.file("exponents.csv", |w| {
        writeln!(w, "hurst,nu,predicted_lambda_fbm,predicted_s_star")?;
        for r in &rows {
            writeln!(w, "{},{},{:.16e},{}", r.hurst, r.nu, r.lambda_fbm, fmt_opt(r.s_star))?;
        }
        Ok(())
    })?;
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.hurst, r.lambda_fbm)).collect();
    out.text(
        "exponents.svg",
        &line_plot("predicted regularity", "H", "lambda", &[Series { name: "1/((nu v 2H)(H+1)+H)".into(), points: pts, dashed: false, markers: true }]),
    )?;
    out.json("summary.json", &json!({ "kind": "exponents", "rows": rows }))
}

fn run_weakform(cfg: &ExperimentConfig, vars: &[Variant], out: &Out) -> Result<()> {
    let jobs = jobs(cfg, vars);
    let results: Vec<(Solved, WeakFormReport, WeakFormReport)> = jobs
        .par_iter()
        .map(|&(k, i)| {
            let v = &vars[k];
            let path = make_path(cfg, v, seed_of(cfg, v, i).unwrap_or(0))?;
            let solved = solve_one(cfg, &path, true)?;
            let flux = make_flux(&cfg.solver.flux)?;
            let sol = &solved.sol;
            let t_eval = if cfg.estimator.t_eval > 0.0 { cfg.estimator.t_eval } else { sol.times[sol.n_times() - 1] };
            let m = solved.measure.as_ref().expect("measure requested");
            let catalog = default_catalog(m.v_levels[0], m.v_levels[m.v_levels.len() - 1]);
            let with = weak_form_residual(sol, Some(m), &path, &flux, t_eval, &catalog)?;
            let without = weak_form_residual(sol, None, &path, &flux, t_eval, &catalog)?;
            Ok((solved, with, without))
        })
        .collect::<Result<_>>()?;
    let mut viol = Violations::default();
    out.file("weakform.csv", |w| {
        writeln!(w, "variant,realization,seed,t_eval,max_residual_with_m,max_residual_without_m,ratio,measure_mass,violations")?;
        for (&(k, i), (s, with, without)) in jobs.iter().zip(&results) {
            let v = &vars[k];
            let m = s.measure.as_ref().expect("measure requested");
            writeln!(
                w,
                "{},{i},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                v.label,
                fmt_seed(seed_of(cfg, v, i)),
                with.t_eval,
                with.max_residual,
                without.max_residual,
                without.max_residual / with.max_residual,
                m.total_mass(),
                m.violations
            )?;
        }
        Ok(())
    })?;
    let mut per = Vec::new();
    for (&(k, i), (s, with, without)) in jobs.iter().zip(&results) {
        let m = s.measure.as_ref().expect("measure requested");
        viol.add(m);
        if i == 0 {
            let label = &vars[k].label;
            out.file(&format!("weakform_{label}.csv"), |w| {
                writeln!(w, "n,bump_id,residual_with_m,residual_without_m")?;
                for (a, b) in with.entries.iter().zip(&without.entries) {
                    writeln!(w, "{},{},{:.16e},{:.16e}", a.n, a.bump_id, a.residual, b.residual)?;
                }
                Ok(())
            })?;
            out.file(&format!("measure_{label}.csv"), |w| write_measure_csv(m, w))?;
            per.push(json!({
                "variant": label,
                "t_eval": with.t_eval,
                "max_residual_with_m": with.max_residual,
                "max_residual_without_m": without.max_residual,
                "reduction": without.max_residual / with.max_residual,
                "measure_mass": m.total_mass(),
                "truncation_fraction": with.truncation_fraction,
            }));
        }
    }
    out.json("summary.json", &json!({ "kind": "weakform", "variants": per, "entropy_violations": viol.count }))?;
    viol.into_result()
}

/// Reads a run's `summary.json`.
pub fn load_summary(dir: &Path) -> Result<serde_json::Value> {
    let p = dir.join("summary.json");
    let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse { line: e.line(), reason: e.to_string() })
}
