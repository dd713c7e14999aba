//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process fails if any criterion fails. Pass criterion numbers as
//! arguments to run a subset: `cargo test --test acceptance -- 3 5`.

use std::time::Instant;

use qwalk_core::*;
use qwalk_experiment::{fit_scalings, run_preset, stopping_time, ExperimentConfig, FitRanges, Preset};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

// 1. eta = 0 two-site coherence against the closed form
const C1_DT: f64 = 1e-4;
const C1_T_FINAL: f64 = 10.0;
const C1_MAX_REL_ERR: f64 = 1e-3;
const C1_FLOOR: f64 = 1e-4;

fn analytic_match() -> Outcome {
    let mut worst = Vec::new();
    for k in [0.5, 1.0, 2.0, 4.0] {
        let p = SimulationParams64::new(2, k, 0.0, C1_DT, C1_T_FINAL);
        let r = run_trajectory(&p, Recording::default(), &[]).expect("run");
        let (mut err, mut at) = (0.0f64, 0.0);
        for (t, c) in r.times().iter().zip(&r.observables.mean_coherence) {
            let exact = analytical_cn_eta0(k, *t);
            if exact >= C1_FLOOR {
                let rel = (c - exact).abs() / exact;
                if rel > err {
                    (err, at) = (rel, *t);
                }
            }
        }
        worst.push((k, err, at));
    }
    let passed = worst.iter().all(|w| w.1 <= C1_MAX_REL_ERR);
    let detail = worst.iter().map(|(k, e, t)| format!("k={k}: {e:.2e} at t={t:.2}")).collect::<Vec<_>>().join(", ");
    outcome(passed, format!("max relative error (limit {C1_MAX_REL_ERR:e}) {detail}"))
}

// 2. unit efficiency, weak measurement: stationary coherence of random pure states
const C2_TRAJECTORIES: usize = 2000;
const C2_TOL: f64 = 0.02;

fn pure_state_average() -> Outcome {
    let k = 0.1;
    let t_f = stopping_time(k, 2).expect("stopping time");
    let mut p = SimulationParams64::new(2, k, 1.0, 1e-3, t_f).with_trajectories(C2_TRAJECTORIES).with_seed(2);
    p.sample_stride = p.n_steps();
    let e = run_ensemble(&p, Recording::default(), &[]).expect("ensemble");
    let (m, se) = (*e.mean.mean_coherence.last().unwrap(), *e.std_error.mean_coherence.last().unwrap());
    outcome((m - 0.25).abs() <= C2_TOL, format!("C(t_f={t_f:.1}) = {m:.4} +- {se:.4}, target 0.25 +- {C2_TOL}"))
}

// 3. small-efficiency law C = eta / 2, independent of k
const C3_TRAJECTORIES: usize = 500;
const C3_REL_TOL: f64 = 0.2;
const C3_SIGMAS: f64 = 3.0;

fn small_efficiency_law() -> Outcome {
    let mut passed = true;
    let mut lines = Vec::new();
    for eta in [0.01, 0.05] {
        let mut cells = Vec::new();
        for k in [0.1, 0.5, 1.0] {
            let t_f = stopping_time(k, 2).expect("stopping time");
            let dt = 1.0f64.min(1.0 / k) * 1e-3;
            let p = SimulationParams64::new(2, k, eta, dt, 2.0 * t_f)
                .with_trajectories(C3_TRAJECTORIES)
                .with_seed(3)
                .with_sample_stride(100);
            // stationary estimate: per-trajectory time average over [t_f, 2 t_f]
            let averages = map_trajectories(&p, Recording::default(), &[], |r| {
                let o = &r.observables;
                let window: Vec<f64> =
                    o.times.iter().zip(&o.mean_coherence).filter(|(t, _)| **t >= t_f).map(|(_, c)| *c).collect();
                window.iter().sum::<f64>() / window.len() as f64
            })
            .expect("ensemble");
            let (m, se) = mean_se(&averages);
            let ok = (m - eta / 2.0).abs() <= C3_REL_TOL * eta / 2.0;
            passed &= ok;
            lines.push(format!("eta={eta} k={k}: {m:.5}+-{se:.5}{}", if ok { "" } else { " (off)" }));
            cells.push((k, m, se));
        }
        for (i, a) in cells.iter().enumerate() {
            for b in &cells[i + 1..] {
                let gap = (a.1 - b.1).abs();
                let bound = C3_SIGMAS * (a.2.powi(2) + b.2.powi(2)).sqrt();
                if gap > bound {
                    passed = false;
                    lines.push(format!("eta={eta}: k={} vs k={} differ by {gap:.2e} > {bound:.2e}", a.0, b.0));
                }
            }
        }
    }
    outcome(passed, format!("target eta/2 within {}%: {}", C3_REL_TOL * 100.0, lines.join("; ")))
}

// 4. the average state does not depend on the efficiency
const C4_TRAJECTORIES: usize = 2000;
const C4_SNAPSHOTS: usize = 20;
const C4_SIGMAS: f64 = 3.0;

fn average_state_independence() -> Outcome {
    let t_f = 10.0;
    let base = SimulationParams64::new(2, 0.5, 1.0, 1e-3, t_f).with_seed(4);
    let stride = base.n_steps() / C4_SNAPSHOTS;
    let rec = Recording { states: true, ..Default::default() };
    let e = run_ensemble(&base.clone().with_trajectories(C4_TRAJECTORIES).with_sample_stride(stride), rec, &[])
        .expect("ensemble");
    let exact = run_trajectory(&SimulationParams64 { eta: 0.0, ..base }.with_sample_stride(stride), rec, &[])
        .expect("lindblad")
        .states
        .unwrap();
    let (means, errs) = (e.mean_states.unwrap(), e.state_std_error.unwrap());
    let mut worst: f64 = 0.0;
    let mut passed = true;
    for s in 1..=C4_SNAPSHOTS {
        let gap = means[s].matrix().max_abs_diff(exact[s].matrix());
        let se = errs[s].as_slice().iter().map(|z| z.re.max(z.im)).fold(0.0, f64::max);
        passed &= gap <= C4_SIGMAS * se;
        worst = worst.max(gap / se);
    }
    outcome(passed, format!("{C4_SNAPSHOTS} snapshots, worst max-norm gap {worst:.2} SE (limit {C4_SIGMAS})"))
}

// 5. Zeno localization at strong measurement
const C5_TRAJECTORIES: usize = 1000;
const C5_LOCALIZED: f64 = 0.95;
const C5_FRACTION: f64 = 0.9;
const C5_POLE_RADIUS: f64 = 0.1;

fn zeno_localization() -> Outcome {
    let mut p = SimulationParams64::new(2, 10.0, 0.99, 1e-4, 50.0).with_trajectories(C5_TRAJECTORIES).with_seed(5);
    p.sample_stride = p.n_steps();
    let rec = Recording { densities: true, bloch: true, ..Default::default() };
    let finals = map_trajectories(&p, rec, &[], |r| {
        let o = r.observables;
        let n = o.densities.last().unwrap();
        (n[0].max(n[1]), *o.bloch.last().unwrap())
    })
    .expect("ensemble");
    let localized = finals.iter().filter(|f| f.0 >= C5_LOCALIZED).count() as f64 / finals.len() as f64;
    let blochs: Vec<BlochVector64> = finals.iter().map(|f| f.1).collect();
    let h = bloch_disk_histogram(&blochs, BlochDiskHistogram::DEFAULT_BINS).expect("histogram");
    let poles = h.mass_within(0.0, 1.0, C5_POLE_RADIUS) + h.mass_within(0.0, -1.0, C5_POLE_RADIUS);
    // for reference: mass in the bands |z| >= 1 - radius
    let band = blochs.iter().filter(|v| v.z.abs() >= 1.0 - C5_POLE_RADIUS).count() as f64 / blochs.len() as f64;
    outcome(
        localized >= C5_FRACTION && poles >= C5_FRACTION,
        format!(
            "localized fraction {localized:.3}, mass within {C5_POLE_RADIUS} of the poles {poles:.3} (both >= {C5_FRACTION}); \
             mass with |z| >= {:.1}: {band:.3}",
            1.0 - C5_POLE_RADIUS
        ),
    )
}

// 6. ballistic-to-diffusive crossover of the Lindblad evolution
const C6_BALLISTIC_COEFF: f64 = 0.5;
const C6_BALLISTIC_TOL: f64 = 0.2;
const C6_SLOPE_TOL: f64 = 0.2;

fn crossover() -> Outcome {
    let k = 0.5;
    let p = SimulationParams64::new(21, k, 0.0, 1e-3, 14.0).with_init_site(11).with_sample_stride(20);
    let r = run_trajectory(&p, Recording { variance: true, ..Default::default() }, &[]).expect("run");
    let (t, v) = (r.times(), &r.observables.variance);
    // t << 1/k: var / t^2 constant
    let early: Vec<f64> = t.iter().zip(v).filter(|(t, _)| **t > 0.0 && **t <= 0.1 / k).map(|(t, v)| v / (t * t)).collect();
    let coeff = early.iter().sum::<f64>() / early.len() as f64;
    let spread = early.iter().map(|c| (c - coeff).abs()).fold(0.0, f64::max);
    let ballistic = spread <= C6_BALLISTIC_TOL * coeff && (coeff - C6_BALLISTIC_COEFF).abs() <= C6_BALLISTIC_TOL * C6_BALLISTIC_COEFF;
    // t >> 1/k, before the spread reaches the edges
    let late: Vec<(f64, f64)> = t.iter().copied().zip(v.iter().copied()).filter(|(t, _)| *t >= 3.0 / k).collect();
    let fit = qwalk_experiment::fit::least_squares(
        &late.iter().map(|p| p.0).collect::<Vec<_>>(),
        &late.iter().map(|p| p.1).collect::<Vec<_>>(),
    );
    let target = 4.0 / k;
    let diffusive = (fit.slope - target).abs() <= C6_SLOPE_TOL * target;
    outcome(
        ballistic && diffusive,
        format!(
            "early var/t^2 = {coeff:.3} (spread {spread:.3}); late slope {:.3} (R^2 {:.4}), target 4/k = {target} +- {}%",
            fit.slope,
            fit.r_squared,
            C6_SLOPE_TOL * 100.0
        ),
    )
}

// 7. interior maximum of the mean coherence vs a stationary plateau
const C7_TRAJECTORIES: usize = 200;
const C7_SIGMAS: f64 = 3.0;

fn interior_maximum() -> Outcome {
    let mut passed = true;
    let mut lines = Vec::new();
    for (k, eta, expect_interior) in [(2.0, 0.0, true), (2.0, 0.5, true), (0.1, 1.0, false)] {
        let mut cfg = ExperimentConfig::for_preset(Preset::Fig3);
        cfg.k = vec![k];
        cfg.eta = vec![eta];
        cfg.seed = 7;
        cfg.overrides.n_traj = Some(if eta == 0.0 { 1 } else { C7_TRAJECTORIES });
        let out = run_preset(&cfg).expect("preset");
        let t = out.table("mean_coherence").unwrap();
        let (times, cn, se) = (t.column("t").unwrap(), t.column("cn").unwrap(), t.column("cn_se").unwrap());
        let (imax, cmax) = cn.iter().copied().enumerate().fold((0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
        let last = cn.len() - 1;
        let band = C7_SIGMAS * (se[imax].powi(2) + se[last].powi(2)).sqrt();
        let drop = cmax - cn[last];
        let ok = if expect_interior { imax > 0 && imax < last && drop > band } else { drop <= band };
        passed &= ok;
        lines.push(format!(
            "k={k} eta={eta}: max {cmax:.4} at t={:.2}, final {:.4} (3 SE {band:.1e}){}",
            times[imax],
            cn[last],
            if ok { "" } else { " (unexpected)" }
        ));
    }
    outcome(passed, lines.join("; "))
}

// 8. scaling shapes of the maximal mean coherence at desk scale
const C8_TRAJECTORIES: usize = 200;
const C8_MIN_R2: f64 = 0.95;

fn scaling_shapes() -> Outcome {
    let mut cfg = ExperimentConfig::for_preset(Preset::Fig4);
    cfg.k = vec![1.0, 2.0, 4.0, 8.0];
    cfg.eta = vec![0.1, 0.2, 0.3, 0.4, 0.5];
    cfg.chain_length = Some(11);
    cfg.seed = 8;
    cfg.overrides.n_traj = Some(C8_TRAJECTORIES);
    let out = run_preset(&cfg).expect("preset");
    let table = out.table("cn_max").unwrap();
    let report = fit_scalings(table, FitRanges::default()).expect("fit");
    let mut passed = report.power_laws.len() == 5 && report.exponentials.len() == 4;
    passed &= report.power_laws.iter().all(|f| f.r_squared >= C8_MIN_R2);
    passed &= report.exponentials.iter().all(|f| f.r_squared >= C8_MIN_R2);
    let (k, eta, c) = (table.column("k").unwrap(), table.column("eta").unwrap(), table.column("cn_max").unwrap());
    let at = |kk: f64, ee: f64| (0..k.len()).find(|&i| k[i] == kk && eta[i] == ee).map(|i| c[i]).unwrap();
    let mut monotone = true;
    for &e in &cfg.eta {
        monotone &= cfg.k.windows(2).all(|w| at(w[1], e) < at(w[0], e));
    }
    for &kk in &cfg.k {
        monotone &= cfg.eta.windows(2).all(|w| at(kk, w[1]) > at(kk, w[0]));
    }
    passed &= monotone;
    let a: Vec<String> = report.power_laws.iter().map(|f| format!("{:.2}/{:.3}", f.exponent, f.r_squared)).collect();
    let b: Vec<String> = report.exponentials.iter().map(|f| format!("{:.2}/{:.3}", f.rate, f.r_squared)).collect();
    outcome(passed, format!("exponent/R^2 per eta [{}]; rate/R^2 per k [{}]; monotone {monotone}", a.join(" "), b.join(" ")))
}

// 9. every Kraus step yields a physical state
const C9_STEPS: usize = 100_000;

fn physicality_audit() -> Outcome {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let tol = Tolerances::default();
    let (mut steps, mut bad, mut worst_eig) = (0usize, 0usize, f64::INFINITY);
    let dt = 1e-3;
    while steps < C9_STEPS {
        let l = rng.random_range(2..=8);
        let (k, eta) = (rng.random_range(0.0..=10.0), rng.random_range(0.0..=1.0));
        let prop = build_propagator(&build_hamiltonian(l, 1.0).unwrap(), dt).unwrap();
        let mut rho = init_localized::<f64>(l, rng.random_range(1..=l)).unwrap();
        let mut noise = trajectory_rng(rng.random());
        for _ in 0..1000 {
            rho = kraus_step(&rho, &prop, k, eta, dt, &sample_wiener(&mut noise, l, dt)).expect("step");
            let r = validate_state(&rho, &tol);
            worst_eig = worst_eig.min(r.min_eigenvalue);
            bad += usize::from(!r.is_valid());
            steps += 1;
        }
    }
    outcome(bad == 0, format!("{steps} steps, {bad} invalid states, lowest eigenvalue {worst_eig:.2e}"))
}

// 10. strong convergence of the Kraus engine to the Bloch SDE
const C10_PATHS: usize = 200;
const C10_RATIO_BAND: (f64, f64) = (0.35, 0.65);

fn pathwise_convergence() -> Outcome {
    let t_final = 1.0;
    let levels = [6u32, 8, 10]; // dt = 2^-level
    let fine = 12u32;
    let n_fine = 1usize << fine;
    let mut passed = true;
    let mut lines = Vec::new();
    for k in [0.5, 2.0] {
        for eta in [0.5, 1.0] {
            let mut sq = vec![0.0; levels.len()];
            for path in 0..C10_PATHS {
                let mut rng = trajectory_rng(trajectory_seed(10, path));
                let w: Vec<Vec<f64>> =
                    (0..n_fine).map(|_| sample_wiener(&mut rng, 2, t_final / n_fine as f64).values).collect();
                for (li, &level) in levels.iter().enumerate() {
                    let dt = t_final / f64::from(1u32 << level);
                    let chunk = 1usize << (fine - level);
                    let prop = build_propagator(&build_hamiltonian(2, 1.0).unwrap(), dt).unwrap();
                    let mut rho = init_localized::<f64>(2, 1).unwrap();
                    let mut v = bloch_from_rho(&rho).unwrap();
                    for c in w.chunks(chunk) {
                        let dw = WienerIncrements {
                            values: vec![c.iter().map(|x| x[0]).sum(), c.iter().map(|x| x[1]).sum()],
                            dt,
                        };
                        rho = kraus_step(&rho, &prop, k, eta, dt, &dw).unwrap();
                        v = bloch_sde_step(&v, k, eta, dt, dw.two_site_combined());
                    }
                    let b = bloch_from_rho(&rho).unwrap();
                    sq[li] += (b.x - v.x).powi(2) + (b.y - v.y).powi(2) + (b.z - v.z).powi(2);
                }
            }
            let err: Vec<f64> = sq.iter().map(|s| (s / C10_PATHS as f64).sqrt()).collect();
            let ratios: Vec<f64> = err.windows(2).map(|w| w[1] / w[0]).collect();
            let ok = ratios.iter().all(|r| (C10_RATIO_BAND.0..=C10_RATIO_BAND.1).contains(r));
            passed &= ok;
            lines.push(format!(
                "k={k} eta={eta}: rms {} ratios {}",
                err.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join("/"),
                ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join("/")
            ));
        }
    }
    outcome(passed, format!("ratio per quartering in [{}, {}]: {}", C10_RATIO_BAND.0, C10_RATIO_BAND.1, lines.join("; ")))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 10] = [
        (1, "analytical two-site coherence at eta = 0", analytic_match),
        (2, "average pure-state coherence 1/4", pure_state_average),
        (3, "small-efficiency law eta/2", small_efficiency_law),
        (4, "average state independent of efficiency", average_state_independence),
        (5, "Zeno localization", zeno_localization),
        (6, "ballistic-to-diffusive crossover", crossover),
        (7, "interior maximum vs plateau", interior_maximum),
        (8, "scaling shapes of the maximal coherence", scaling_shapes),
        (9, "physicality audit", physicality_audit),
        (10, "pathwise convergence to the Bloch SDE", pathwise_convergence),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (id, name, run) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {verdict}: {name} ({:.1} s) | {}", start.elapsed().as_secs_f64(), o.detail);
        if !o.passed {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
    println!("acceptance: all selected criteria passed");
}
