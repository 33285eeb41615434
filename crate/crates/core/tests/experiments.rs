use rshs::experiments::*;
use rshs::*;

fn sweep_config() -> Config {
    Config::from_json(
        r#"{"relax":{"eta":0.1,"zeta":0.1,"chi":0.1},
            "grid":{"n":100},
            "time":{"t_end":0.05},
            "ic":{"type":"density_sine","amplitude":0.05},
            "scheme":{"limiter":"central"},
            "sweep":{"epsilons":[0.02,0.01,0.005]}}"#,
    )
    .unwrap()
}

#[test]
fn small_sweep_approaches_reference_monotonically() {
    let r = relax_sweep(&sweep_config()).unwrap();
    assert_eq!(r.rows.len(), 3);
    assert!(r.monotone(), "{:?}", r.rows);
    assert!(r.rows[0].order.is_none());
    assert!(r.rows[1..].iter().all(|row| row.order.unwrap() > 0.5));
    assert!((r.mu_eff - (4.0 / 3.0 * 0.1 + 0.3)).abs() < 1e-15);
    let csv = r.to_csv();
    assert!(csv.starts_with(SweepResult::CSV_HEADER));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn sweep_rejects_bad_epsilon_lists() {
    let mut cfg = sweep_config();
    cfg.sweep.epsilons = vec![0.01, 0.02];
    assert!(matches!(relax_sweep(&cfg), Err(Error::Config(_))));
}

#[test]
fn decay_of_exact_equilibrium_stays_zero() {
    let mut cfg = Config::default();
    cfg.ic.amplitude = 0.0;
    cfg.grid.n_cells = 32;
    cfg.time.t_end = 0.5;
    let r = decay(&cfg).unwrap();
    assert!(!r.blowup);
    assert!(
        r.rows.iter().all(|row| row.total <= 1e-12),
        "{:?}",
        r.rows.last()
    );
    assert!(r.fit_total.is_none());
}

#[test]
fn decay_of_small_perturbation_decreases() {
    let mut cfg = Config::default();
    cfg.ic.amplitude = 1e-3;
    cfg.grid.n_cells = 50;
    cfg.time.t_end = 4.0;
    let r = decay(&cfg).unwrap();
    assert!(!r.blowup);
    assert!(
        r.last() < 0.8 * r.initial(),
        "{} vs {}",
        r.last(),
        r.initial()
    );
    assert_eq!(r.rows.len(), 201);
    assert!(r.to_csv().starts_with(DecayResult::CSV_HEADER));
}

#[test]
fn simulated_models_agree_on_data_at_time_zero() {
    let mut cfg = sweep_config();
    cfg.time.t_end = 1e-3;
    let a = simulate_rshs(&cfg).unwrap();
    let b = simulate_nsf(&cfg).unwrap();
    let d = field_distance(&a.snapshots[0], &b.snapshots[0], &cfg.grid);
    assert!(d.total < 1e-14, "{d:?}");
    let d = field_distance(a.snapshots.last().unwrap(), &a.snapshots[0], &cfg.grid);
    assert!(d.total > 0.0);
}

#[test]
fn verify_reports_pass_and_rejects_bad_states() {
    let cfg = Config::default();
    let report = run_verify(&cfg, 3).unwrap();
    assert!(report.all_pass());
    assert_eq!(report.kawashima.len(), 8);
    let mut bad = Config::default();
    bad.state.theta = -1.0;
    assert!(matches!(run_verify(&bad, 3), Err(Error::Domain(_))));
    let mut bad = Config::default();
    bad.relax.eta = 0.0;
    assert!(run_verify(&bad, 3).is_err());
}
