use qwalk_core::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn rabi_oscillation_without_measurement() {
    let p = SimulationParams64::new(2, 0.0, 1.0, 1e-3, 10.0);
    let rec = Recording { densities: true, ..Default::default() };
    let r = run_trajectory(&p, rec, &[]).unwrap();
    for (t, n) in r.times().iter().zip(&r.observables.densities) {
        assert!(close(n[0], (t / 2.0).cos().powi(2), 1e-5), "t={t}");
    }
}

#[test]
fn zero_efficiency_is_seed_independent() {
    let p = SimulationParams64::new(5, 1.3, 0.0, 1e-3, 2.0).with_init_site(3);
    let rec = Recording { densities: true, bond_coherence: true, ..Default::default() };
    let a = run_trajectory(&p.clone().with_seed(1), rec, &[]).unwrap();
    let b = run_trajectory(&p.with_seed(99), rec, &[]).unwrap();
    assert_eq!(a.observables, b.observables);
}

#[test]
fn unit_efficiency_keeps_states_pure() {
    for k in [0.5, 10.0] {
        let p = SimulationParams64::new(4, k, 1.0, 1e-4, 3.0).with_seed(5).with_sample_stride(50);
        let r = run_trajectory(&p, Recording::default(), &[]).unwrap();
        for &pur in &r.observables.purity {
            assert!(close(pur, 1.0, 1e-8), "k={k} purity {pur}");
        }
    }
}

#[test]
fn strong_measurement_freezes_the_particle() {
    // Zeno: the particle stays near its starting site far longer than the Rabi period
    let p = SimulationParams64::new(2, 10.0, 0.99, 1e-4, 2.0).with_trajectories(64).with_seed(3);
    let rec = Recording { densities: true, ..Default::default() };
    let e = run_ensemble(&p, rec, &[]).unwrap();
    let last = e.mean.densities.last().unwrap()[0];
    // unmonitored: cos^2(1) = 0.29
    assert!(last > 0.6, "mean <n_1>(2) = {last}");
}

#[test]
fn average_state_does_not_depend_on_efficiency() {
    let base = SimulationParams64::new(3, 1.0, 1.0, 1e-3, 2.0).with_sample_stride(500).with_seed(11);
    let rec = Recording { states: true, ..Default::default() };
    let monitored = run_ensemble(&base.clone().with_trajectories(400), rec, &[]).unwrap();
    let lindblad = run_trajectory(&SimulationParams64 { eta: 0.0, ..base }, rec, &[]).unwrap();
    let means = monitored.mean_states.unwrap();
    let errs = monitored.state_std_error.unwrap();
    let exact = lindblad.states.unwrap();
    assert_eq!(means.len(), exact.len());
    for ((m, e), x) in means.iter().zip(&errs).zip(&exact) {
        for ((a, b), s) in m.matrix().as_slice().iter().zip(x.matrix().as_slice()).zip(e.as_slice()) {
            assert!((a.re - b.re).abs() <= 4.0 * s.re + 1e-3, "{a} vs {b} (se {s})");
            assert!((a.im - b.im).abs() <= 4.0 * s.im + 1e-3, "{a} vs {b} (se {s})");
        }
    }
}

#[test]
fn ensembles_are_independent_of_thread_count() {
    let p = SimulationParams64::new(3, 2.0, 0.6, 1e-3, 0.5).with_trajectories(150).with_sample_stride(50);
    let rec = Recording { densities: true, bond_coherence: true, ..Default::default() };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_ensemble(&p, rec, &[]).unwrap())
    };
    assert_eq!(run(1), run(3));
}

/// Kraus engine and a literal Euler–Maruyama integration of the SME driven by
/// the same Brownian path; returns the max-norm difference at `t_final`.
fn pathwise_gap(p: &SimulationParams64, refine: usize, path: &[Vec<f64>]) -> f64 {
    let dt = p.dt;
    let h = build_hamiltonian(p.chain_length, 1.0).unwrap();
    let prop = build_propagator(&h, dt).unwrap();
    let mut kraus = init_localized::<f64>(p.chain_length, 1).unwrap();
    let mut em = kraus.clone();
    for chunk in path.chunks(refine) {
        let mut sum = vec![0.0; p.chain_length];
        for w in chunk {
            sum.iter_mut().zip(w).for_each(|(s, x)| *s += x);
        }
        let dw = WienerIncrements { values: sum, dt };
        kraus = kraus_step(&kraus, &prop, p.k, p.eta, dt, &dw).unwrap();
        em = euler_maruyama_step(&em, &h, p.k, p.eta, dt, &dw);
    }
    kraus.matrix().max_abs_diff(em.matrix())
}

#[test]
fn kraus_and_euler_maruyama_converge_pathwise() {
    let fine_dt = 1e-3 / 16.0;
    let t_final = 1.0;
    let n_fine = (t_final / fine_dt) as usize;
    let (mut coarse, mut fine) = (0.0, 0.0);
    for seed in 0..40 {
        let mut rng = trajectory_rng(trajectory_seed(seed, 0));
        let path: Vec<Vec<f64>> = (0..n_fine).map(|_| sample_wiener(&mut rng, 3, fine_dt).values).collect();
        let p = SimulationParams64::new(3, 1.0, 0.7, 1e-3, t_final);
        coarse += pathwise_gap(&p, 16, &path).powi(2);
        let p = SimulationParams64::new(3, 1.0, 0.7, fine_dt, t_final);
        fine += pathwise_gap(&p, 1, &path).powi(2);
    }
    let ratio = (fine / coarse).sqrt();
    // order >= 1/2 gives at most 1/4 for a 16-fold refinement
    assert!(ratio < 0.3, "rms gap ratio {ratio}");
}

#[test]
fn plain_and_improved_schemes_agree_for_small_steps() {
    let p = SimulationParams64::new(3, 1.0, 0.5, 1e-4, 1.0).with_seed(8).with_sample_stride(10_000);
    let rec = Recording { states: true, ..Default::default() };
    let a = run_trajectory(&p, rec, &[]).unwrap().states.unwrap();
    let b = run_trajectory(&p.clone().with_scheme(Scheme::Plain), rec, &[]).unwrap().states.unwrap();
    let gap = a.last().unwrap().matrix().max_abs_diff(b.last().unwrap().matrix());
    assert!(gap < 1e-2, "gap {gap}");
}

#[test]
fn lindblad_spreading_is_ballistic_then_diffusive() {
    // Hopping J/2 gives a ballistic variance t^2 / 2 and, once dephased, a
    // classical hop rate 1 / (2k) per bond: variance grows as t / k.
    let k = 0.5;
    let p = SimulationParams64::new(41, k, 0.0, 5e-3, 30.0).with_init_site(21).with_sample_stride(20);
    let rec = Recording { variance: true, ..Default::default() };
    let r = run_trajectory(&p, rec, &[]).unwrap();
    let (t, v) = (r.times(), &r.observables.variance);
    for (ti, vi) in t.iter().zip(v).filter(|(ti, _)| **ti > 0.05 && **ti <= 0.2) {
        assert!(close(vi / (ti * ti), 0.5, 0.05), "t={ti} var={vi}");
    }
    let window: Vec<(f64, f64)> = t.iter().copied().zip(v.iter().copied()).filter(|(ti, _)| *ti >= 15.0).collect();
    let n = window.len() as f64;
    let (mt, mv) = window.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let slope = window.iter().map(|(x, y)| (x - mt) * (y - mv)).sum::<f64>()
        / window.iter().map(|(x, _)| (x - mt).powi(2)).sum::<f64>();
    assert!(close(slope, 1.0 / k, 0.1 / k), "slope {slope}");
}

#[test]
fn breakdown_is_reported_with_step_context() {
    let h = build_hamiltonian::<f64>(2, 1.0).unwrap();
    let prop = build_propagator(&h, 1e-3).unwrap();
    let rho = init_localized::<f64>(2, 1).unwrap();
    let dw = WienerIncrements { values: vec![f64::NAN, 0.0], dt: 1e-3 };
    assert!(matches!(kraus_step(&rho, &prop, 1.0, 0.5, 1e-3, &dw), Err(Error::NumericBreakdown { .. })));
}

#[test]
fn single_precision_runs() {
    let p = SimulationParams32::new(3, 1.0, 0.5, 1e-3, 1.0).with_seed(2).with_sample_stride(100);
    let r = run_trajectory(&p, Recording::default(), &[]).unwrap();
    let last = r.observables.purity.last().copied().unwrap();
    assert!(last > 0.0 && last <= 1.0 + 1e-4);
}
