//! Acceptance criteria AC1..AC12, one PASS/FAIL line each.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use roughflux::fit::median;
use roughflux::harness::{load_summary, preset, run};
use roughflux::irregularity::{check_averaging_bound, check_interpolation, estimate_iota, estimate_rho_gamma};
use roughflux::kinetic::{default_catalog, velocity_average, weak_form_residual};
use roughflux::paths::{derive_seed, generate_deterministic, generate_fbm, tent_path, DeterministicKind, FbmGenerator};
use roughflux::regularity::{besov_exponent, default_fit_range, l1_modulus, predicted_lambda_fbm, predicted_s_star};
use roughflux::solver::{default_v_levels, entropy_defect, entropy_defect_with, make_flux, solve_rough, InitialData};
use roughflux::solver::{Flux, KineticMeasure, NEGATIVE_TOLERANCE};

// Tolerances pinned by the criteria.
const AC2_REL_TOL: f64 = 0.05;
const AC3_LINEAR_BAND: (f64, f64) = (0.95, 1.05);
const AC3_FBM_TOL: f64 = 0.1;
const AC4_FBM_BAND: (f64, f64) = (0.8, 1.2);
const AC4_LINEAR_BAND: (f64, f64) = (0.4, 0.6);
const AC6_BOUND: f64 = 4.0;
const AC6_ORACLE_REL_TOL: f64 = 0.02;
const AC7_EXACT: f64 = 1e-12;
const AC7_CONTRACTION: f64 = 1e-10;
const AC7_SHOCK_DX: f64 = 2.0;
const AC8_RATE: f64 = 0.8;
const AC8_CONSTANT: f64 = 0.1;
const AC9_CHI_TOL: f64 = 1e-8;
const AC9_RATE: f64 = 0.8;
const AC9_REDUCTION: f64 = 2.0;
const AC10_TOL: f64 = 0.05;
const AC10_STEP_TOL: f64 = 0.02;
const AC11_SLACK: f64 = 0.1;
const AC11_FLAT: f64 = 0.05;

/// `2 int_0^1 (1 - x) / (1 + (n x)^{1/2}) dx * n^{1/2}` for n = 2^k, k = 1..8,
/// from adaptive quadrature.
const AC6_ORACLE: [f64; 8] = [0.834, 1.019, 1.213, 1.408, 1.597, 1.773, 1.931, 2.071];

struct Ledger {
    results: Vec<(String, bool)>,
    measures: Vec<(String, usize, f64, f64)>,
}

impl Ledger {
    fn record(&mut self, id: &str, pass: bool, detail: String, started: Instant) {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("{id:<5} {tag}  {detail}  [{:.1} s]", started.elapsed().as_secs_f64());
        self.results.push((id.to_string(), pass));
    }

    fn measure(&mut self, what: &str, m: &KineticMeasure) {
        self.measures.push((what.to_string(), m.violations, m.worst_negative, m.max_density));
    }
}

fn burgers() -> Flux {
    make_flux(&[0.0, 0.0, 0.5]).unwrap()
}

fn ac1(l: &mut Ledger) {
    let t = Instant::now();
    let half = predicted_lambda_fbm(0.5, 1.0).unwrap();
    let mut worst = 0.0f64;
    for k in 1..=10 {
        let h = 0.05 * k as f64;
        let exact = 1.0 / (1.0 + 2.0 * h);
        worst = worst.max(((predicted_lambda_fbm(h, 1.0).unwrap() - exact) / exact).abs());
    }
    let s = predicted_s_star(0.5, 0.5).unwrap();
    let pass = half == 0.5 && worst <= 4.0 * f64::EPSILON && s == 0.5;
    l.record("AC1", pass, format!("lambda_fbm(0.5,1) = {half}, max rel err vs 1/(1+2H) = {worst:.1e}, s*(0.5,0.5) = {s}"), t);
}

fn ac2(l: &mut Ledger) {
    let t = Instant::now();
    let n = 1024;
    let seeds = 10_000u64;
    let pairs = [(0.25, 0.5), (0.25, 1.0), (0.5, 0.75), (0.5, 1.0), (0.75, 1.0)];
    let mut worst = 0.0f64;
    for h in [0.25, 0.5, 0.75] {
        let gen = FbmGenerator::new(h, 1, n, 1.0).unwrap();
        let mut acc = [0.0; 5];
        for i in 0..seeds {
            let p = gen.sample(derive_seed(20_240, i));
            for (k, &(s, u)) in pairs.iter().enumerate() {
                acc[k] += p.point((s * n as f64) as usize)[0] * p.point((u * n as f64) as usize)[0];
            }
        }
        for (k, &(s, u)) in pairs.iter().enumerate() {
            let exact = 0.5 * (f64::powf(s, 2.0 * h) + f64::powf(u, 2.0 * h) - f64::powf(u - s, 2.0 * h));
            worst = worst.max((acc[k] / seeds as f64 - exact).abs() / exact);
        }
    }
    l.record("AC2", worst <= AC2_REL_TOL, format!("max relative covariance error {worst:.4} (tol {AC2_REL_TOL})"), t);
}

fn ac3(l: &mut Ledger) {
    let t = Instant::now();
    let alphas = [-0.3, -0.5, -0.7];
    let (n, horizon) = (16384, 4.0);
    let lin = generate_deterministic(DeterministicKind::Linear, n, horizon).unwrap();
    let li = estimate_iota(&lin, &alphas, 4.0, 4096.0, 16).unwrap().iota_hat;
    let mut pass = li >= AC3_LINEAR_BAND.0 && li <= AC3_LINEAR_BAND.1;
    let mut detail = format!("linear {li:.4}");
    for h in [0.25, 0.5, 0.75] {
        let vals: Vec<f64> = (0..100)
            .map(|i| {
                let p = generate_fbm(h, 1, n, horizon, derive_seed(3, i)).unwrap();
                estimate_iota(&p, &alphas, 4.0, 4096.0, 16).unwrap().iota_hat
            })
            .collect();
        let m = median(&vals);
        pass &= (m - h).abs() <= AC3_FBM_TOL;
        detail += &format!(", H={h} median {m:.4}");
    }
    l.record("AC3", pass, detail, t);
}

fn ac4_ac5(l: &mut Ledger) {
    let t = Instant::now();
    let n = 65536;
    let mut rhos = Vec::new();
    let (mut checks, mut passes) = (0, 0);
    for i in 0..100 {
        let p = generate_fbm(0.5, 1, n, 1.0, derive_seed(4, i)).unwrap();
        let rep = estimate_rho_gamma(&p, 256.0, 32, 0.55).unwrap();
        for kappa in [0.25, 0.5, 0.75] {
            checks += 1;
            passes += check_interpolation(&rep, kappa).unwrap().pass as usize;
        }
        rhos.push(rep.rho_hat);
    }
    let m = median(&rhos);
    let lin = generate_deterministic(DeterministicKind::Linear, n, 1.0).unwrap();
    let lr = estimate_rho_gamma(&lin, 256.0, 32, 0.5).unwrap().rho_hat;
    let pass = m >= AC4_FBM_BAND.0 && m <= AC4_FBM_BAND.1 && lr >= AC4_LINEAR_BAND.0 && lr <= AC4_LINEAR_BAND.1;
    l.record("AC4", pass, format!("fbm H=0.5 median rho_hat {m:.4} in {AC4_FBM_BAND:?}, linear rho_hat {lr:.4} in {AC4_LINEAR_BAND:?}"), t);
    let t = Instant::now();
    l.record("AC5", passes == checks, format!("interpolation inequality {passes}/{checks} on 100 fbm paths"), t);
}

fn ac6(l: &mut Ledger) {
    let t = Instant::now();
    let m = 4097;
    let v: Vec<f64> = (0..m).map(|i| i as f64 / (m - 1) as f64).collect();
    let one = vec![1.0; m];
    let ns: Vec<u64> = (1..=8).map(|k| 1u64 << k).collect();
    let r = check_averaging_bound(&v, &one, &one, &v, 0.5, 1.0, &ns).unwrap();
    let worst_oracle =
        r.ratios.iter().zip(AC6_ORACLE).map(|(x, o)| ((x - o) / o).abs()).fold(0.0, f64::max);
    let pass = r.max_ratio() <= AC6_BOUND && worst_oracle <= AC6_ORACLE_REL_TOL;
    let shown: Vec<String> = r.ratios.iter().map(|x| format!("{x:.3}")).collect();
    l.record("AC6", pass, format!("ratios [{}] max {:.3} <= {AC6_BOUND}, oracle rel err {worst_oracle:.4}", shown.join(", "), r.max_ratio()), t);
}

fn ac7(l: &mut Ledger) {
    let t = Instant::now();
    let f = burgers();
    let nx = 256;
    let mut ok = true;
    let mut notes = Vec::new();

    let path = generate_fbm(0.3, 1, 128, 1.0, 77).unwrap();
    let c = solve_rough(&f, &path, &vec![0.37; nx], nx, 0.9, &[0.5, 1.0]).unwrap();
    let const_err = c.u.iter().map(|x| (x - 0.37).abs()).fold(0.0, f64::max);
    ok &= const_err <= AC7_EXACT;
    notes.push(format!("constant err {const_err:.1e}"));

    let (mut mass_err, mut maxp, mut contr) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
    for i in 0..20u64 {
        let p = generate_fbm(0.4, 1, 64, 1.0, derive_seed(7, i)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(8, i));
        let u0: Vec<f64> = (0..nx).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v0: Vec<f64> = (0..nx).map(|_| rng.random_range(-1.0..1.0)).collect();
        let su = solve_rough(&f, &p, &u0, nx, 0.9, &[0.5, 1.0]).unwrap();
        let sv = solve_rough(&f, &p, &v0, nx, 0.9, &[0.5, 1.0]).unwrap();
        for (s, init) in [(&su, &u0), (&sv, &v0)] {
            let m0 = init.iter().sum::<f64>() / nx as f64;
            let (lo, hi) = init.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
            for k in 0..2 {
                mass_err = mass_err.max((s.mass(k) - m0).abs());
                for x in s.slice(k) {
                    maxp = maxp.max(lo - x).max(x - hi);
                }
            }
        }
        let d0: f64 = u0.iter().zip(&v0).map(|(a, b)| (a - b).abs()).sum::<f64>() / nx as f64;
        let d1: f64 = su.slice(1).iter().zip(sv.slice(1)).map(|(a, b)| (a - b).abs()).sum::<f64>() / nx as f64;
        contr = contr.max(d1 - d0);
    }
    ok &= mass_err <= AC7_EXACT * nx as f64 && maxp <= AC7_EXACT && contr <= AC7_CONTRACTION;
    notes.push(format!("mass err {mass_err:.1e}, max-principle excess {:.1e}, L1 growth {contr:.1e}", maxp.max(0.0)));

    let nx = 1024;
    let u0 = InitialData::Riemann { ul: 1.0, ur: 0.0, x0: 0.25 }.cell_averages(nx).unwrap();
    let lin = generate_deterministic(DeterministicKind::Linear, 64, 0.5).unwrap();
    let sol = solve_rough(&f, &lin, &u0, nx, 0.9, &[0.5]).unwrap();
    let u = sol.slice(0);
    let j = (0..nx).max_by(|&a, &b| (u[a] - u[(a + 1) % nx]).total_cmp(&(u[b] - u[(b + 1) % nx]))).unwrap();
    let err = ((j + 1) as f64 / nx as f64 - 0.5).abs() * nx as f64;
    ok &= err <= AC7_SHOCK_DX;
    notes.push(format!("shock position error {err:.2} dx"));
    let m = entropy_defect(&sol, &f, &lin, &default_v_levels(&sol, 64, 0.05)).unwrap();
    l.measure("AC7 riemann", &m);
    l.record("AC7", ok, notes.join(", "), t);
}

fn ac8(l: &mut Ledger) {
    let t = Instant::now();
    let f = burgers();
    let mut errs = Vec::new();
    for nx in [256, 512, 1024] {
        let u0 = InitialData::Sine { amp: 0.1, freq: 1 }.cell_averages(nx).unwrap();
        let p = tent_path(0.3, 64, 1.0).unwrap();
        let sol = solve_rough(&f, &p, &u0, nx, 0.9, &[1.0]).unwrap();
        errs.push((nx, sol.slice(0).iter().zip(&u0).map(|(a, b)| (a - b).abs()).sum::<f64>() / nx as f64));
    }
    let rates: Vec<f64> = errs.windows(2).map(|w| (w[0].1 / w[1].1).log2()).collect();
    let consts: Vec<f64> = errs.iter().map(|(nx, e)| e * *nx as f64).collect();
    let pass = rates.iter().all(|r| *r >= AC8_RATE) && consts.iter().all(|c| *c <= AC8_CONSTANT);
    let shown: Vec<String> = errs.iter().map(|(nx, e)| format!("{nx}:{e:.2e}")).collect();
    l.record("AC8", pass, format!("L1 errors [{}], rates {rates:.3?}, err/dx max {:.3}", shown.join(" "), consts.iter().copied().fold(0.0, f64::max)), t);
}

fn ac9(l: &mut Ledger) {
    let t = Instant::now();
    let f = burgers();
    let levels: Vec<f64> = (0..=512).map(|i| -2.0 + 4.0 * i as f64 / 512.0).collect();
    let field: Vec<f64> = (0..1000).map(|j| 1.9 * ((j as f64) * 0.0123).sin()).collect();
    let avg = velocity_average(&field, |_| 1.0, &levels).unwrap();
    let chi_err = avg.iter().zip(&field).map(|(a, u)| (a - u).abs()).fold(0.0, f64::max);

    let mut res = Vec::new();
    for nx in [256, 512, 1024, 2048] {
        let u0 = InitialData::Sine { amp: 0.1, freq: 1 }.cell_averages(nx).unwrap();
        let p = generate_deterministic(DeterministicKind::Linear, 64, 1.0).unwrap();
        let sol = solve_rough(&f, &p, &u0, nx, 0.9, &[1.0]).unwrap();
        let lv = default_v_levels(&sol, 64, 0.05);
        let m = entropy_defect(&sol, &f, &p, &lv).unwrap();
        l.measure(&format!("AC9 smooth nx={nx}"), &m);
        let r = weak_form_residual(&sol, Some(&m), &p, &f, 1.0, &default_catalog(lv[0], lv[63])).unwrap();
        res.push(r.max_residual);
    }
    let rates: Vec<f64> = res.windows(2).map(|w| (w[0] / w[1]).log2()).collect();

    let nx = 2048;
    let u0 = InitialData::Riemann { ul: 1.0, ur: -1.0, x0: 0.5 }.cell_averages(nx).unwrap();
    let p = generate_deterministic(DeterministicKind::Linear, 64, 0.25).unwrap();
    let sol = solve_rough(&f, &p, &u0, nx, 0.9, &[0.125, 0.25]).unwrap();
    let lv = default_v_levels(&sol, 64, 0.05);
    let m = entropy_defect_with(&sol, &f, &p, &lv, 1).unwrap();
    l.measure("AC9 shock", &m);
    let cat = default_catalog(lv[0], lv[63]);
    let with = weak_form_residual(&sol, Some(&m), &p, &f, 0.25, &cat).unwrap().max_residual;
    let without = weak_form_residual(&sol, None, &p, &f, 0.25, &cat).unwrap().max_residual;

    let pass = chi_err <= AC9_CHI_TOL && rates.iter().all(|r| *r >= AC9_RATE) && without >= AC9_REDUCTION * with;
    l.record(
        "AC9",
        pass,
        format!(
            "chi err {chi_err:.1e}, smooth residuals [{}] rates {rates:.3?}, shock residual {with:.2e} vs {without:.2e} without m ({:.0}x)",
            res.iter().map(|r| format!("{r:.2e}")).collect::<Vec<_>>().join(", "),
            without / with
        ),
        t,
    );
}

fn ac10(l: &mut Ledger) {
    let t = Instant::now();
    let nx = 1 << 16;
    let (lo, hi) = default_fit_range(nx);
    let mut pass = true;
    let mut notes = Vec::new();
    for lambda in [0.3, 0.5, 0.7] {
        let u = InitialData::Lacunary { lambda, terms: 16 }.cell_averages(nx).unwrap();
        let est = besov_exponent(&l1_modulus(&u, 14).unwrap(), lo, hi).unwrap().lambda_hat;
        pass &= (est - lambda).abs() <= AC10_TOL;
        notes.push(format!("{lambda}->{est:.4}"));
    }
    let step: Vec<f64> = (0..nx).map(|j| if j < nx / 2 { 1.0 } else { 0.0 }).collect();
    let s = besov_exponent(&l1_modulus(&step, 14).unwrap(), lo, hi).unwrap().lambda_hat;
    pass &= (s - 1.0).abs() <= AC10_STEP_TOL;
    notes.push(format!("step->{s:.4}"));
    l.record("AC10", pass, notes.join(", "), t);
}

fn ac11(l: &mut Ledger) {
    let t = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = preset("exp-regularity").unwrap();
    cfg.output_dir = dir.path().to_path_buf();
    let outcome = run(&cfg);
    let summary = load_summary(dir.path()).unwrap();
    let mut meds = Vec::new();
    let mut pass = outcome.is_ok();
    for v in summary["variants"].as_array().unwrap() {
        let (h, med, pred) = (
            v["hurst"].as_f64().unwrap(),
            v["median_lambda_hat"].as_f64().unwrap(),
            v["predicted"].as_f64().unwrap(),
        );
        pass &= med >= pred - AC11_SLACK;
        meds.push((h, med, pred));
    }
    meds.sort_by(|a, b| a.0.total_cmp(&b.0));
    let non_increasing = meds.windows(2).all(|w| w[1].1 <= w[0].1);
    let spread = meds.iter().map(|m| m.1).fold(f64::NEG_INFINITY, f64::max) - meds.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);
    pass &= non_increasing || spread <= AC11_FLAT;
    let violations = summary["entropy_violations"].as_u64().unwrap() as usize;
    l.measures.push(("AC11 ensemble".into(), violations, 0.0, 0.0));
    let shown: Vec<String> = meds.iter().map(|(h, m, p)| format!("H={h}: {m:.3} (>= {:.3})", p - AC11_SLACK)).collect();
    l.record("AC11", pass, format!("{}, non-increasing {non_increasing}, spread {spread:.3}", shown.join(", ")), t);
}

fn ac12(l: &mut Ledger) {
    let t = Instant::now();
    let total: usize = l.measures.iter().map(|m| m.1).sum();
    let worst = l.measures.iter().filter(|m| m.3 > 0.0).map(|m| m.2 / m.3).fold(0.0, f64::min);
    let detail = format!(
        "{} measures, {total} cells below -{NEGATIVE_TOLERANCE:e} x max density, worst relative {worst:.1e}",
        l.measures.len()
    );
    l.record("AC12", total == 0, detail, t);
}

fn main() {
    let mut l = Ledger { results: Vec::new(), measures: Vec::new() };
    ac1(&mut l);
    ac2(&mut l);
    ac3(&mut l);
    ac4_ac5(&mut l);
    ac6(&mut l);
    ac7(&mut l);
    ac8(&mut l);
    ac9(&mut l);
    ac10(&mut l);
    ac11(&mut l);
    ac12(&mut l);
    let failed: Vec<&str> = l.results.iter().filter(|r| !r.1).map(|r| r.0.as_str()).collect();
    println!("acceptance: {}/{} criteria passed", l.results.len() - failed.len(), l.results.len());
    if !failed.is_empty() {
        println!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}
