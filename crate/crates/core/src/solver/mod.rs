//! Finite-volume IMEX solver for the relaxation system in one space
//! dimension (planar symmetry, all 14 components carried).
//!
//! Each step is a Strang splitting: half relaxation substep, explicit
//! conservative transport of `U = ∇X⁰` with a Rusanov flux, half
//! relaxation substep. After every stage the main-field variables are
//! recovered by Newton's method, warm-started from the previous cell state.

pub mod flux;
pub mod inversion;
pub mod relax;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eos::Eos;
use crate::error::{Error, Result};
use crate::grid::{Grid1D, Snapshot};
use crate::limiter::Limiter;
use crate::potentials::{entropy_production_raw, ConservedVector, E1};
use crate::state::{idx, GodunovState, Model, PhysicalState, STATE_DIM};
use crate::structure::spectral_radius_raw;

pub use inversion::{cold_start_guess, conserved_to_godunov, NewtonOptions};

/// Conserved vectors per cell with the matching main-field states.
#[derive(Debug, Clone, PartialEq)]
pub struct Field1D {
    pub grid: Grid1D,
    pub conserved: Vec<ConservedVector>,
    pub main: Vec<GodunovState>,
}

impl Field1D {
    pub fn from_physical<E: Eos>(
        states: &[PhysicalState],
        grid: Grid1D,
        model: &Model<E>,
    ) -> Result<Self> {
        if states.len() != grid.n_cells {
            return Err(Error::Config(format!(
                "{} states for {} cells",
                states.len(),
                grid.n_cells
            )));
        }
        let main = states
            .iter()
            .map(|p| model.to_godunov(p))
            .collect::<Result<Vec<_>>>()?;
        let conserved = main.iter().map(|y| flux::conserved(&y.0, model)).collect();
        Ok(Self {
            grid,
            conserved,
            main,
        })
    }

    pub fn to_physical<E: Eos>(&self, model: &Model<E>) -> Result<Vec<PhysicalState>> {
        self.main.iter().map(|y| model.from_godunov(y)).collect()
    }

    pub fn snapshot<E: Eos>(&self, time: f64, model: &Model<E>) -> Result<Snapshot> {
        Ok(Snapshot {
            time,
            cells: self.to_physical(model)?,
        })
    }

    /// `dx Σᵢ Uᵢ` for mass, the three momenta and energy.
    pub fn totals(&self) -> [f64; 5] {
        let dx = self.grid.dx();
        let mut t = [0.0; 5];
        for u in &self.conserved {
            for k in 0..5 {
                t[k] += u[k];
            }
        }
        t.map(|v| v * dx)
    }

    /// `dx Σᵢ Υᵢ·I(Υᵢ)`, never positive.
    pub fn entropy_production<E: Eos>(&self, model: &Model<E>) -> f64 {
        self.grid.dx()
            * self
                .main
                .iter()
                .map(|y| entropy_production_raw(&y.0, model))
                .sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Order {
    #[serde(rename = "1")]
    First,
    #[default]
    #[serde(rename = "2")]
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeConfig {
    #[serde(default)]
    pub order: Order,
    #[serde(default)]
    pub limiter: Limiter,
}

impl SchemeConfig {
    pub fn first_order() -> Self {
        Self {
            order: Order::First,
            limiter: Limiter::Minmod,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RshsSolver<E: Eos> {
    pub model: Model<E>,
    pub grid: Grid1D,
    pub scheme: SchemeConfig,
    pub cfl: f64,
    pub newton: NewtonOptions,
}

/// Output of [`RshsSolver::run`].
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub steps: usize,
    /// `(t, dx Σ Υ·I)` at the start of every step.
    pub entropy_production: Vec<(f64, f64)>,
    pub max_speed: f64,
}

pub fn validate_cfl(cfl: f64) -> Result<()> {
    if cfl > 0.0 && cfl <= 0.9 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "cfl must lie in (0, 0.9], got {cfl}"
        )))
    }
}

/// Reconstructed face state from cell `i`: `θ̃ < 0`, finite conserved
/// vector and flux, positive internal energy, and density and energy within
/// the range of cells `i−1, i, i+1` widened by that range.
fn admissible_face(
    y: &[f64; STATE_DIM],
    u: &ConservedVector,
    f: &[f64; STATE_DIM],
    conserved: &[ConservedVector],
    i: usize,
    grid: &Grid1D,
) -> bool {
    if !(y[idx::THETA] < 0.0 && u[0] > 0.0 && u.iter().chain(f.iter()).all(|c| c.is_finite())) {
        return false;
    }
    let kinetic = 0.5 * (u[1] * u[1] + u[2] * u[2] + u[3] * u[3]) / u[0];
    if !(u[4] > kinetic) {
        return false;
    }
    let cells = [grid.left(i), i, grid.right(i)];
    [0, 4].iter().all(|&k| {
        let (lo, hi) = cells
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &c| {
                (lo.min(conserved[c][k]), hi.max(conserved[c][k]))
            });
        let w = hi - lo;
        u[k] >= lo - w && u[k] <= hi + w
    })
}

impl<E: Eos> RshsSolver<E> {
    pub fn new(model: Model<E>, grid: Grid1D, scheme: SchemeConfig, cfl: f64) -> Result<Self> {
        grid.validate()?;
        validate_cfl(cfl)?;
        model.relax.validate()?;
        if !(model.relax.epsilon > 0.0) {
            return Err(Error::Config(
                "the relaxation solver needs epsilon > 0; use the NSF model for epsilon = 0".into(),
            ));
        }
        Ok(Self {
            model,
            grid,
            scheme,
            cfl,
            newton: NewtonOptions::default(),
        })
    }

    /// Pencil spectral radius in direction `e₁` for every cell.
    pub fn spectral_radii(&self, field: &Field1D) -> Result<Vec<f64>> {
        field
            .main
            .par_iter()
            .enumerate()
            .map(|(i, y)| spectral_radius_raw(&y.0, &E1, &self.model).map_err(|e| e.in_cell(i)))
            .collect()
    }

    pub fn stable_dt(&self, field: &Field1D) -> Result<f64> {
        let smax = self.spectral_radii(field)?.into_iter().fold(0.0, f64::max);
        Ok(self.cfl * self.grid.dx() / smax)
    }

    fn invert(&self, i: usize, u: &ConservedVector, guess: &GodunovState) -> Result<GodunovState> {
        conserved_to_godunov(u, guess, &self.model, &self.newton)
            .or_else(|_| {
                let cold = cold_start_guess(u, &self.model)?;
                conserved_to_godunov(u, &cold, &self.model, &self.newton)
            })
            .map_err(|e| match e.in_cell(i) {
                Error::Inversion {
                    cell,
                    iterations,
                    residual,
                    reason,
                } => Error::Inversion {
                    cell,
                    iterations,
                    residual,
                    reason: format!("{reason}; U = {u:?}"),
                },
                other => other,
            })
    }

    fn relax_all(&self, field: &mut Field1D, dt: f64) -> Result<()> {
        field
            .conserved
            .par_iter_mut()
            .zip(field.main.par_iter_mut())
            .enumerate()
            .try_for_each(|(i, (u, y))| {
                *y = relax::relax_substep(u, y, dt, &self.model).map_err(|e| e.in_cell(i))?;
                Ok(())
            })
    }

    /// `−(F̂ᵢ₊½ − F̂ᵢ₋½)/dx` for every cell.
    fn transport_rate(
        &self,
        conserved: &[ConservedVector],
        main: &[GodunovState],
        radii: &[f64],
    ) -> Vec<[f64; STATE_DIM]> {
        let n = self.grid.n_cells;
        let g = &self.grid;
        let model = &self.model;
        // interface k sits between cells k and k+1
        let faces: Vec<[f64; STATE_DIM]> = match self.scheme.order {
            Order::First => {
                let f: Vec<_> = main
                    .par_iter()
                    .map(|y| flux::physical_flux(&y.0, model))
                    .collect();
                (0..n)
                    .into_par_iter()
                    .map(|k| {
                        let r = g.right(k);
                        let s = radii[k].max(radii[r]);
                        flux::rusanov(&conserved[k], &conserved[r], &f[k], &f[r], s)
                    })
                    .collect()
            }
            Order::Second => {
                let lim = self.scheme.limiter;
                let slopes: Vec<[f64; STATE_DIM]> = (0..n)
                    .into_par_iter()
                    .map(|i| {
                        let (a, b, c) = (&main[g.left(i)].0, &main[i].0, &main[g.right(i)].0);
                        std::array::from_fn(|k| lim.slope(b[k] - a[k], c[k] - b[k]))
                    })
                    .collect();
                (0..n)
                    .into_par_iter()
                    .map(|k| {
                        let r = g.right(k);
                        let yl: [f64; STATE_DIM] =
                            std::array::from_fn(|c| main[k].0[c] + 0.5 * slopes[k][c]);
                        let yr: [f64; STATE_DIM] =
                            std::array::from_fn(|c| main[r].0[c] - 0.5 * slopes[r][c]);
                        let s = radii[k].max(radii[r]);
                        let (ul, ur) = (flux::conserved(&yl, model), flux::conserved(&yr, model));
                        let (fl, fr) = (
                            flux::physical_flux(&yl, model),
                            flux::physical_flux(&yr, model),
                        );
                        if admissible_face(&yl, &ul, &fl, conserved, k, g)
                            && admissible_face(&yr, &ur, &fr, conserved, r, g)
                        {
                            flux::rusanov(&ul, &ur, &fl, &fr, s)
                        } else {
                            // first-order fallback at faces whose reconstruction left the domain
                            let (a, b) = (&main[k].0, &main[r].0);
                            flux::rusanov(
                                &conserved[k],
                                &conserved[r],
                                &flux::physical_flux(a, model),
                                &flux::physical_flux(b, model),
                                s,
                            )
                        }
                    })
                    .collect()
            }
        };
        let inv_dx = 1.0 / g.dx();
        (0..n)
            .map(|i| {
                let (fr, fl) = (&faces[i], &faces[g.left(i)]);
                std::array::from_fn(|k| -(fr[k] - fl[k]) * inv_dx)
            })
            .collect()
    }

    fn reinvert(&self, conserved: &[ConservedVector], main: &mut [GodunovState]) -> Result<()> {
        main.par_iter_mut().enumerate().try_for_each(|(i, y)| {
            *y = self.invert(i, &conserved[i], y)?;
            Ok(())
        })
    }

    fn transport(&self, field: &mut Field1D, dt: f64, radii: &[f64]) -> Result<()> {
        let rate = self.transport_rate(&field.conserved, &field.main, radii);
        let stage1: Vec<ConservedVector> = field
            .conserved
            .iter()
            .zip(&rate)
            .map(|(u, l)| std::array::from_fn(|k| u[k] + dt * l[k]))
            .collect();
        match self.scheme.order {
            Order::First => {
                field.conserved = stage1;
                self.reinvert(&field.conserved, &mut field.main)
            }
            Order::Second => {
                // SSP-RK2 (Heun)
                let mut main1 = field.main.clone();
                self.reinvert(&stage1, &mut main1)?;
                let rate1 = self.transport_rate(&stage1, &main1, radii);
                for ((u, u1), l1) in field.conserved.iter_mut().zip(&stage1).zip(&rate1) {
                    for k in 0..STATE_DIM {
                        u[k] = 0.5 * u[k] + 0.5 * (u1[k] + dt * l1[k]);
                    }
                }
                field.main = main1;
                self.reinvert(&field.conserved, &mut field.main)
            }
        }
    }

    /// One Strang-split step of size `dt`; returns the speed bound used.
    pub fn step(&self, field: &mut Field1D, dt: f64) -> Result<f64> {
        let radii = self.spectral_radii(field)?;
        self.advance(field, dt, &radii)
    }

    fn advance(&self, field: &mut Field1D, dt: f64, radii: &[f64]) -> Result<f64> {
        let smax = radii.iter().cloned().fold(0.0, f64::max);
        let limit = self.cfl * self.grid.dx() / smax;
        if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "time step {dt:.6e} violates the CFL limit {limit:.6e}"
            )));
        }
        self.relax_all(field, 0.5 * dt)?;
        self.transport(field, dt, radii)?;
        self.relax_all(field, 0.5 * dt)?;
        Ok(smax)
    }

    /// Integrates to `t_end`, recording snapshots every `every` time units
    /// (and always at the start and the end).
    pub fn run(&self, field: &mut Field1D, t_end: f64, every: Option<f64>) -> Result<Trajectory> {
        if !(t_end > 0.0) {
            return Err(Error::Config(format!(
                "t_end must be positive, got {t_end}"
            )));
        }
        let every = every.filter(|e| *e > 0.0 && *e < t_end).unwrap_or(t_end);
        let eps_t = 1e-12 * t_end;
        let mut t = 0.0;
        let mut next_out = every;
        let mut traj = Trajectory {
            snapshots: vec![field.snapshot(0.0, &self.model)?],
            steps: 0,
            entropy_production: Vec::new(),
            max_speed: 0.0,
        };
        while t < t_end - eps_t {
            let abort = |e: Error| match e {
                Error::Inversion { .. }
                | Error::Numeric(_)
                | Error::Domain(_)
                | Error::Structural(_) => Error::Abort {
                    time: t,
                    reason: e.to_string(),
                },
                other => other,
            };
            let radii = self.spectral_radii(field).map_err(abort)?;
            let smax = radii.iter().cloned().fold(0.0, f64::max);
            let dt = (self.cfl * self.grid.dx() / smax)
                .min(next_out - t)
                .min(t_end - t);
            traj.entropy_production
                .push((t, field.entropy_production(&self.model)));
            self.advance(field, dt, &radii).map_err(abort)?;
            traj.max_speed = traj.max_speed.max(smax);
            traj.steps += 1;
            t += dt;
            if t >= next_out - eps_t {
                let time = if (t_end - t).abs() <= eps_t {
                    t_end
                } else {
                    next_out
                };
                traj.snapshots.push(field.snapshot(time, &self.model)?);
                next_out = (next_out + every).min(t_end);
            }
        }
        Ok(traj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::IdealGas;
    use crate::state::RelaxationParams;

    fn solver(order: SchemeConfig) -> RshsSolver<IdealGas> {
        let m = Model::new(IdealGas::default(), RelaxationParams::default()).unwrap();
        RshsSolver::new(m, Grid1D::new(16, 0.0, 1.0).unwrap(), order, 0.5).unwrap()
    }

    #[test]
    fn uniform_equilibrium_is_a_fixed_point() {
        for scheme in [SchemeConfig::first_order(), SchemeConfig::default()] {
            let s = solver(scheme);
            let states = vec![PhysicalState::equilibrium(1.0, 1.0); 16];
            let mut f = Field1D::from_physical(&states, s.grid, &s.model).unwrap();
            let f0 = f.clone();
            let dt = s.stable_dt(&f).unwrap();
            for _ in 0..20 {
                s.step(&mut f, dt).unwrap();
            }
            assert_eq!(f, f0);
        }
    }

    #[test]
    fn cfl_violation_is_config_error() {
        let s = solver(SchemeConfig::default());
        let states = vec![PhysicalState::equilibrium(1.0, 1.0); 16];
        let mut f = Field1D::from_physical(&states, s.grid, &s.model).unwrap();
        let dt = s.stable_dt(&f).unwrap();
        assert!(matches!(s.step(&mut f, 2.0 * dt), Err(Error::Config(_))));
    }

    #[test]
    fn rejects_bad_configuration() {
        let m = Model::new(IdealGas::default(), RelaxationParams::default()).unwrap();
        let g = Grid1D::new(16, 0.0, 1.0).unwrap();
        assert!(RshsSolver::new(m, g, SchemeConfig::default(), 0.95).is_err());
        let m0 = Model::new(
            IdealGas::default(),
            RelaxationParams::default().with_epsilon(0.0),
        )
        .unwrap();
        assert!(RshsSolver::new(m0, g, SchemeConfig::default(), 0.5).is_err());
    }

    #[test]
    fn run_records_start_cadence_and_end() {
        let s = solver(SchemeConfig::first_order());
        let states = vec![PhysicalState::equilibrium(1.0, 1.0); 16];
        let mut f = Field1D::from_physical(&states, s.grid, &s.model).unwrap();
        let traj = s.run(&mut f, 0.1, Some(0.04)).unwrap();
        let times: Vec<f64> = traj.snapshots.iter().map(|s| s.time).collect();
        assert_eq!(times, vec![0.0, 0.04, 0.08, 0.1]);
    }

    #[test]
    fn scheme_config_parses() {
        let c: SchemeConfig = serde_json::from_str(r#"{"order":"1","limiter":"central"}"#).unwrap();
        assert_eq!(c.order, Order::First);
        assert_eq!(c.limiter, Limiter::Central);
    }
}
