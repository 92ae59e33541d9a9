use std::fs;
use std::path::Path;
use std::process::Command;

use roughflux::harness::{kind_defaults, run, ExperimentConfig, ExperimentKind, RunManifest, RunStatus, MANIFEST_FILE};

fn data_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let m = RunManifest::load(dir).unwrap();
    m.files
        .iter()
        .filter(|f| f.path != MANIFEST_FILE)
        .map(|f| (f.path.clone(), fs::read(dir.join(&f.path)).unwrap()))
        .collect()
}

fn all_files(dir: &Path, base: &Path, out: &mut Vec<String>) {
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            all_files(&p, base, out);
        } else {
            out.push(p.strip_prefix(base).unwrap().to_string_lossy().replace('\\', "/"));
        }
    }
}

fn small(kind: ExperimentKind, dir: &Path) -> ExperimentConfig {
    let mut c = kind_defaults(kind);
    c.output_dir = dir.to_path_buf();
    c
}

#[test]
fn paths_rerun_is_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut cfg = small(ExperimentKind::Paths, a.path());
    cfg.ensemble = 100;
    cfg.master_seed = 42;
    run(&cfg).unwrap();
    cfg.output_dir = b.path().to_path_buf();
    run(&cfg).unwrap();
    let (fa, fb) = (data_files(a.path()), data_files(b.path()));
    assert_eq!(fa.len(), fb.len());
    for ((na, da), (nb, db)) in fa.iter().zip(&fb) {
        assert_eq!(na, nb);
        if na != "config.ini" {
            assert!(da == db, "{na} differs");
        }
    }
}

#[test]
fn rerun_into_same_directory_replaces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(ExperimentKind::Paths, dir.path());
    cfg.ensemble = 5;
    run(&cfg).unwrap();
    let first = data_files(dir.path());
    cfg.ensemble = 3;
    run(&cfg).unwrap();
    let second = data_files(dir.path());
    assert!(second.len() < first.len());
    let mut on_disk = Vec::new();
    all_files(dir.path(), dir.path(), &mut on_disk);
    assert_eq!(on_disk.len(), second.len() + 1);
}

#[test]
fn manifest_lists_every_file() {
    for kind in [ExperimentKind::Iota, ExperimentKind::Solve, ExperimentKind::Exponents] {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small(kind, dir.path());
        cfg.ensemble = 2;
        let m = run(&cfg).unwrap();
        assert_eq!(m.status, RunStatus::Complete);
        let mut on_disk = Vec::new();
        all_files(dir.path(), dir.path(), &mut on_disk);
        on_disk.sort();
        let listed: Vec<String> = RunManifest::load(dir.path()).unwrap().files.into_iter().map(|f| f.path).collect();
        assert_eq!(on_disk, listed, "{kind:?}");
        assert_eq!(ExperimentConfig::from_ini_str(&m.config).unwrap(), cfg);
    }
}

#[test]
fn csv_row_counts_match() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(ExperimentKind::Paths, dir.path());
    cfg.ensemble = 7;
    let m = run(&cfg).unwrap();
    let entry = m.files.iter().find(|f| f.path == "paths.csv").unwrap();
    assert_eq!(entry.rows, Some(7));
    assert_eq!(m.seeds.len(), 7);
}

#[test]
fn exponents_row_at_half_is_half() {
    let dir = tempfile::tempdir().unwrap();
    run(&small(ExperimentKind::Exponents, dir.path())).unwrap();
    let csv = fs::read_to_string(dir.path().join("exponents.csv")).unwrap();
    let row = csv.lines().find(|l| l.starts_with("0.5,")).unwrap();
    let lambda: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert_eq!(lambda, 0.5);
}

#[test]
fn iota_linear_summary_near_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(ExperimentKind::Iota, dir.path());
    cfg.ensemble = 1;
    run(&cfg).unwrap();
    let s = roughflux::harness::load_summary(dir.path()).unwrap();
    let lin = s["variants"].as_array().unwrap().iter().find(|v| v["variant"] == "linear").unwrap();
    let iota = lin["median_iota_hat"].as_f64().unwrap();
    assert!((0.95..=1.05).contains(&iota), "{iota}");
}

#[test]
fn failed_run_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(ExperimentKind::Solve, dir.path());
    cfg.solver.initial = roughflux::solver::InitialData::Riemann { ul: 1e200, ur: 0.0, x0: 0.25 };
    assert!(run(&cfg).is_err());
    let m = RunManifest::load(dir.path()).unwrap();
    assert_eq!(m.status, RunStatus::Failed);
    assert!(m.error.is_some());
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_roughflux"))
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = cli().args(["exponents", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("0.500000"));

    let bad = cli().args(["paths", "--set", "path.hurst=1.5", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("hurst"));

    let cfg_path = dir.path().join("bad.ini");
    fs::write(&cfg_path, "[solver]\nnx = lots\n").unwrap();
    assert_eq!(cli().arg("run").arg(&cfg_path).output().unwrap().status.code(), Some(1));

    let blowup = cli()
        .args(["solve", "--set", "solver.initial=riemann(1e200,0,0.25)", "--out"])
        .arg(dir.path().join("blowup"))
        .output()
        .unwrap();
    assert_eq!(blowup.status.code(), Some(2), "{}", String::from_utf8_lossy(&blowup.stderr));

    for flag in ["--schema", "--threads-env-doc"] {
        let o = cli().arg(flag).output().unwrap();
        assert_eq!(o.status.code(), Some(0));
        assert!(!o.stdout.is_empty());
    }
    let p = cli().args(["preset", "exp-regularity"]).output().unwrap();
    let text = String::from_utf8(p.stdout).unwrap();
    assert!(ExperimentConfig::from_ini_str(&text).is_ok());
    assert_eq!(cli().args(["preset", "exp-unknown"]).output().unwrap().status.code(), Some(1));
}
