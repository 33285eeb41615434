//! Relaxation-limit sweep, decay to equilibrium and the structural audit driver.
//!
//! * [`relax_sweep`]: distance of the relaxation solution to the
//!   Navier–Stokes–Fourier solution as `ε → 0`.
//! * [`decay`]: decay of a small perturbation of a constant equilibrium
//!   at fixed relaxation moduli.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::grid::{Grid1D, Snapshot};
use crate::initial::{initial_states, primitive_fields};
use crate::nsf::{NsfField, NsfSolver, NsfTrajectory};
use crate::solver::{Field1D, RshsSolver, Trajectory};
use crate::state::{Model, PhysicalState, RelaxationParams};
use crate::structure::{self, StructureReport, Tolerances};

/// `e₁, e₂, e₃` followed by `n_random` seeded uniform unit vectors.
pub fn verification_directions(seed: u64, n_random: usize) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dirs = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _ in 0..n_random {
        let z: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..TAU);
        let r = (1.0 - z * z).max(0.0).sqrt();
        dirs.push([r * phi.cos(), r * phi.sin(), z]);
    }
    dirs
}

/// Structural audit at the configured equilibrium.
pub fn run_verify(cfg: &Config, seed: u64) -> Result<StructureReport> {
    let model = cfg.model()?;
    let y = model.to_godunov(&cfg.state.physical())?;
    structure::verify(
        &y,
        &verification_directions(seed, 5),
        &model,
        &Tolerances::default(),
    )
}

fn rshs_setup(
    cfg: &Config,
    relax: RelaxationParams,
) -> Result<(RshsSolver<crate::IdealGas>, Field1D)> {
    cfg.validate_run()?;
    let model = Model::new(cfg.eos, relax)?.with_source(cfg.source);
    let states = initial_states(&cfg.ic, &cfg.grid, cfg.eos.gamma, cfg.eos.gas_const, &relax)?;
    let solver = RshsSolver::new(model, cfg.grid, cfg.scheme, cfg.time.cfl)?;
    let field = Field1D::from_physical(&states, cfg.grid, &model)?;
    Ok((solver, field))
}

/// Relaxation-system run as configured.
pub fn simulate_rshs(cfg: &Config) -> Result<Trajectory> {
    let (solver, mut field) = rshs_setup(cfg, cfg.relax)?;
    solver.run(&mut field, cfg.time.t_end, cfg.output.every)
}

/// Navier–Stokes–Fourier run on the same grid and initial data;
/// relaxation moduli and `ε` are ignored.
pub fn simulate_nsf(cfg: &Config) -> Result<NsfTrajectory> {
    cfg.validate_run()?;
    let prim = primitive_fields(&cfg.ic, &cfg.grid, cfg.eos.gamma, cfg.eos.gas_const)?;
    let solver = NsfSolver::new(
        cfg.eos,
        cfg.relax,
        cfg.grid,
        cfg.scheme.limiter,
        cfg.time.cfl,
    )?;
    let mut field = NsfField::from_primitive(&prim, cfg.grid, &cfg.eos)?;
    solver.run(&mut field, cfg.time.t_end, cfg.output.every)
}

/// Cell-wise L² distances on `(ρ, u₁, θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupDistance {
    pub rho: f64,
    pub u1: f64,
    pub theta: f64,
    pub total: f64,
}

pub fn field_distance(a: &Snapshot, b: &Snapshot, grid: &Grid1D) -> GroupDistance {
    let d = |f: fn(&PhysicalState) -> f64| {
        grid.l2(a.cells.iter().zip(&b.cells).map(|(x, y)| f(x) - f(y)))
    };
    let (rho, u1, theta) = (d(|c| c.rho), d(|c| c.u[0]), d(|c| c.theta));
    GroupDistance {
        rho,
        u1,
        theta,
        total: (rho * rho + u1 * u1 + theta * theta).sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub distance: GroupDistance,
    /// `log(dᵢ₋₁/dᵢ)/log(εᵢ₋₁/εᵢ)` for the total distance; `None` in the first row.
    pub order: Option<f64>,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Effective NSF viscosity `(4/3)η + 3ζ` used by the reference run.
    pub mu_eff: f64,
    pub kappa: f64,
    pub nsf_steps: usize,
    pub n_cells: usize,
    pub t_end: f64,
}

impl SweepResult {
    pub const CSV_HEADER: &'static str = "epsilon,dist_rho,dist_u1,dist_theta,dist_total,order";

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            let d = &r.distance;
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}\n",
                r.epsilon,
                d.rho,
                d.u1,
                d.theta,
                d.total,
                r.order.map(|o| format!("{o:.6}")).unwrap_or_default()
            ));
        }
        out
    }

    /// Strictly decreasing total distance.
    pub fn monotone(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].distance.total < w[0].distance.total)
    }
}

fn annotate(e: Error, eps: f64) -> Error {
    match e {
        Error::Abort { time, reason } => Error::Abort {
            time,
            reason: format!("epsilon = {eps}: {reason}"),
        },
        other => other,
    }
}

pub fn validate_epsilons(eps: &[f64]) -> Result<()> {
    if eps.is_empty() {
        return Err(Error::Config("sweep.epsilons is empty".into()));
    }
    if eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(Error::Config(format!(
            "sweep epsilons must be positive: {eps:?}"
        )));
    }
    if eps.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Config(format!(
            "sweep epsilons must be strictly decreasing: {eps:?}"
        )));
    }
    Ok(())
}

/// Runs the NSF reference once and the relaxation solver for every `ε`
/// (in parallel), all to `t_end` on the same grid and initial data.
pub fn relax_sweep(cfg: &Config) -> Result<SweepResult> {
    let eps = &cfg.sweep.epsilons;
    validate_epsilons(eps)?;
    cfg.validate_run()?;
    let nsf = simulate_nsf(cfg)?;
    let reference = nsf.snapshots.last().expect("run records the final state");
    let runs: Vec<(Snapshot, usize)> = eps
        .par_iter()
        .map(|&e| {
            let (solver, mut field) = rshs_setup(cfg, cfg.relax.with_epsilon(e))?;
            let traj = solver
                .run(&mut field, cfg.time.t_end, None)
                .map_err(|err| annotate(err, e))?;
            let last = traj.snapshots.into_iter().last().expect("final snapshot");
            Ok((last, traj.steps))
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<SweepRow> = Vec::with_capacity(eps.len());
    for (&e, (snap, steps)) in eps.iter().zip(runs) {
        let distance = field_distance(&snap, reference, &cfg.grid);
        let order = rows
            .last()
            .map(|prev| (prev.distance.total / distance.total).ln() / (prev.epsilon / e).ln());
        rows.push(SweepRow {
            epsilon: e,
            distance,
            order,
            steps,
        });
    }
    Ok(SweepResult {
        rows,
        mu_eff: cfg.relax.effective_viscosity(),
        kappa: cfg.relax.chi,
        nsf_steps: nsf.steps,
        n_cells: cfg.grid.n_cells,
        t_end: cfg.time.t_end,
    })
}

/// Reference magnitudes used to make the mixed-unit deviation norm
/// dimensionless: `ρ₀`, `c = √(Rθ₀)` for velocities, `θ₀`, `p₀ = ρ₀Rθ₀`
/// for stresses and `p₀c` for the heat flux.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationScales {
    pub rho: f64,
    pub velocity: f64,
    pub theta: f64,
    pub stress: f64,
    pub heat_flux: f64,
}

impl DeviationScales {
    pub fn new(rho0: f64, theta0: f64, gas_const: f64) -> Self {
        let c = (gas_const * theta0).sqrt();
        let p0 = rho0 * gas_const * theta0;
        Self {
            rho: rho0,
            velocity: c,
            theta: theta0,
            stress: p0,
            heat_flux: p0 * c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayRow {
    pub t: f64,
    pub rho: f64,
    pub velocity: f64,
    pub theta: f64,
    /// `(Σ, σ, q)` group.
    pub dissipative: f64,
    pub total: f64,
}

/// Z-scored L² deviation of a snapshot from the constant reference state.
pub fn deviation(
    snap: &Snapshot,
    reference: &PhysicalState,
    scales: &DeviationScales,
    grid: &Grid1D,
) -> DecayRow {
    let cells = &snap.cells;
    let rho = grid.l2(cells.iter().map(|c| (c.rho - reference.rho) / scales.rho));
    let theta = grid.l2(cells
        .iter()
        .map(|c| (c.theta - reference.theta) / scales.theta));
    let velocity = grid.l2(cells.iter().map(|c| {
        let d2: f64 = (0..3).map(|a| (c.u[a] - reference.u[a]).powi(2)).sum();
        d2.sqrt() / scales.velocity
    }));
    let dissipative = grid.l2(cells.iter().map(|c| {
        let s2: f64 = c.sigma_dev.iter().map(|v| v * v).sum::<f64>() + c.sigma * c.sigma;
        let q2: f64 = c.q.iter().map(|v| v * v).sum();
        (s2 / scales.stress.powi(2) + q2 / scales.heat_flux.powi(2)).sqrt()
    }));
    DecayRow {
        t: snap.time,
        rho,
        velocity,
        theta,
        dissipative,
        total: (rho * rho + velocity * velocity + theta * theta + dissipative * dissipative).sqrt(),
    }
}

/// Least-squares fit `ln v ≈ a − rate·t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpFit {
    pub rate: f64,
    pub r2: f64,
    pub points: usize,
}

pub fn fit_exponential(t: &[f64], v: &[f64]) -> Option<ExpFit> {
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(v)
        .filter(|(_, v)| **v > 0.0 && v.is_finite())
        .map(|(t, v)| (*t, v.ln()))
        .collect();
    let n = pts.len();
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sty: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if stt == 0.0 {
        return None;
    }
    let slope = sty / stt;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sty * sty / (stt * syy)
    };
    Some(ExpFit {
        rate: -slope,
        r2,
        points: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowDecay {
    pub total: f64,
    pub dissipative: f64,
}

fn rms_ratio(rows: &[DecayRow], t_mid: f64, f: fn(&DecayRow) -> f64) -> f64 {
    let rms =
        |it: Vec<f64>| (it.iter().map(|v| v * v).sum::<f64>() / it.len().max(1) as f64).sqrt();
    let early = rms(rows.iter().filter(|r| r.t <= t_mid).map(f).collect());
    let late = rms(rows.iter().filter(|r| r.t >= t_mid).map(f).collect());
    early / late
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayResult {
    pub rows: Vec<DecayRow>,
    pub scales: DeviationScales,
    /// Fit of the total deviation over the tail window.
    pub fit_total: Option<ExpFit>,
    /// Fit of the dissipative group over the same window.
    pub fit_dissipative: Option<ExpFit>,
    pub tail_start: f64,
    /// RMS over the first half of the window divided by RMS over the
    /// second half, per group; larger means faster decay.
    pub window_decay: WindowDecay,
    /// Non-finite deviation or growth above 100× the initial value.
    pub blowup: bool,
    pub steps: usize,
    pub norm: &'static str,
}

impl DecayResult {
    pub const CSV_HEADER: &'static str = "t,rho,velocity,theta,dissipative,total";

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                r.t, r.rho, r.velocity, r.theta, r.dissipative, r.total
            ));
        }
        out
    }

    pub fn initial(&self) -> f64 {
        self.rows.first().map_or(0.0, |r| r.total)
    }

    pub fn last(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.total)
    }
}

/// Perturbed-equilibrium run at fixed moduli, recording the deviation
/// norms at the output cadence (default `t_end/200`).
pub fn decay(cfg: &Config) -> Result<DecayResult> {
    let tail = cfg.decay.tail_fraction;
    if !(tail > 0.0 && tail <= 1.0) {
        return Err(Error::Config(format!(
            "decay.tail_fraction must lie in (0, 1], got {tail}"
        )));
    }
    let mut run_cfg = cfg.clone();
    if run_cfg.output.every.is_none() {
        run_cfg.output.every = Some(cfg.time.t_end / 200.0);
    }
    let traj = simulate_rshs(&run_cfg)?;
    let ic = &cfg.ic;
    let reference = PhysicalState {
        u: [ic.u0, 0.0, 0.0],
        ..PhysicalState::equilibrium(ic.rho0, ic.theta0)
    };
    let scales = DeviationScales::new(ic.rho0, ic.theta0, cfg.eos.gas_const);
    let rows: Vec<DecayRow> = traj
        .snapshots
        .iter()
        .map(|s| deviation(s, &reference, &scales, &cfg.grid))
        .collect();
    let tail_start = cfg.time.t_end * (1.0 - tail);
    let window: Vec<&DecayRow> = rows.iter().filter(|r| r.t >= tail_start).collect();
    let ts: Vec<f64> = window.iter().map(|r| r.t).collect();
    let fit_total = fit_exponential(&ts, &window.iter().map(|r| r.total).collect::<Vec<_>>());
    let fit_dissipative = fit_exponential(
        &ts,
        &window.iter().map(|r| r.dissipative).collect::<Vec<_>>(),
    );
    let t_mid = 0.5 * cfg.time.t_end;
    let window_decay = WindowDecay {
        total: rms_ratio(&rows, t_mid, |r| r.total),
        dissipative: rms_ratio(&rows, t_mid, |r| r.dissipative),
    };
    let first = rows.first().map_or(0.0, |r| r.total);
    let blowup = rows
        .iter()
        .any(|r| !r.total.is_finite() || (first > 0.0 && r.total > 100.0 * first));
    Ok(DecayResult {
        rows,
        scales,
        fit_total,
        fit_dissipative,
        tail_start,
        window_decay,
        blowup,
        steps: traj.steps,
        norm: "discrete L2 over cells; rho/rho0, |u - u0|/sqrt(R theta0), theta/theta0, \
               |(Sigma, sigma)|/p0 and |q|/(p0 sqrt(R theta0)) with p0 = rho0 R theta0",
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_are_unit_and_seeded() {
        let a = verification_directions(7, 5);
        assert_eq!(a.len(), 8);
        assert_eq!(a, verification_directions(7, 5));
        assert_ne!(a, verification_directions(8, 5));
        for n in a {
            assert!((n.iter().map(|c| c * c).sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn exponential_fit_recovers_rate() {
        let t: Vec<f64> = (0..20).map(|k| k as f64 * 0.5).collect();
        let v: Vec<f64> = t.iter().map(|t| 3.0 * (-0.7 * t).exp()).collect();
        let f = fit_exponential(&t, &v).unwrap();
        assert!((f.rate - 0.7).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
        assert!(fit_exponential(&t, &[0.0; 20]).is_none());
    }

    #[test]
    fn distance_to_itself_is_zero() {
        let g = Grid1D::new(8, 0.0, 1.0).unwrap();
        let s = Snapshot {
            time: 0.0,
            cells: vec![PhysicalState::equilibrium(1.2, 0.8); 8],
        };
        assert_eq!(field_distance(&s, &s, &g).total, 0.0);
    }

    #[test]
    fn epsilon_list_validation() {
        assert!(validate_epsilons(&[0.02, 0.01]).is_ok());
        assert!(validate_epsilons(&[0.01, 0.02]).is_err());
        assert!(validate_epsilons(&[0.01, 0.01]).is_err());
        assert!(validate_epsilons(&[0.01, 0.0]).is_err());
        assert!(validate_epsilons(&[]).is_err());
    }

    #[test]
    fn verify_default_passes_and_source_off_fails() {
        let cfg = Config::default();
        assert!(run_verify(&cfg, 0).unwrap().all_pass());
        let off = Config {
            source: crate::state::SourceMode::Off,
            ..Config::default()
        };
        let r = run_verify(&off, 0).unwrap();
        assert!(!r.verdicts.kawashima);
    }
}
