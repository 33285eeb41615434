//! Conserved variables back to main-field variables.
//!
//! `U = ∇X⁰(Υ)` is inverted by Newton's method on `G(Υ) = ∇X⁰(Υ) − U`.
//! The Jacobian `D²X⁰` is symmetric positive definite, so each Newton
//! system is solved by Cholesky. Steps are halved until `θ̃` stays
//! negative and the convex merit `X⁰(Υ) − U·Υ` or the residual decreases.

use nalgebra::{Cholesky, SVector};

use crate::eos::Eos;
use crate::error::{Error, Result};
use crate::potentials::{grad_x0_generic, hess_x0_raw, ConservedVector};
use crate::state::{idx, GodunovState, Model, STATE_DIM};

type Vector14 = SVector<f64, STATE_DIM>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Converged when `‖G‖ ≤ tol·‖U‖`.
    pub tol: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 50,
            max_halvings: 40,
        }
    }
}

fn residual<E: Eos>(y: &[f64; STATE_DIM], u: &ConservedVector, model: &Model<E>) -> Vector14 {
    let g = grad_x0_generic(y, model);
    Vector14::from_fn(|k, _| g[k] - u[k])
}

fn merit<E: Eos>(y: &[f64; STATE_DIM], u: &ConservedVector, model: &Model<E>) -> f64 {
    let theta = -1.0 / y[idx::THETA];
    let [p, _, _] = model.eos.eval(theta, extended_psi(y, model));
    p / theta - y.iter().zip(u).map(|(a, b)| a * b).sum::<f64>()
}

fn extended_psi<E: Eos>(y: &[f64; STATE_DIM], model: &Model<E>) -> f64 {
    let rp = &model.relax;
    let sq = |r: std::ops::Range<usize>| y[r].iter().map(|c| c * c).sum::<f64>();
    y[idx::PSI]
        + 0.5 * (-1.0 / y[idx::THETA]) * sq(idx::U)
        + 0.5 * rp.tau1() * sq(idx::DEV)
        + 0.5 * rp.tau2() * y[idx::BULK] * y[idx::BULK]
        + 0.5 * rp.tau0() * sq(idx::Q)
}

fn admissible(y: &[f64; STATE_DIM]) -> bool {
    y[idx::THETA] < 0.0 && y.iter().all(|c| c.is_finite())
}

/// Solves `∇X⁰(Υ) = U` starting from `guess`.
pub fn conserved_to_godunov<E: Eos>(
    u: &ConservedVector,
    guess: &GodunovState,
    model: &Model<E>,
    opts: &NewtonOptions,
) -> Result<GodunovState> {
    let fail = |iterations, residual: f64, reason: &str| Error::Inversion {
        cell: None,
        iterations,
        residual,
        reason: reason.to_string(),
    };
    if u.iter().any(|c| !c.is_finite()) {
        return Err(fail(0, f64::NAN, "non-finite conserved vector"));
    }
    if !(u[0] > 0.0) {
        return Err(fail(0, f64::NAN, "non-positive mass density"));
    }
    let mut y = guess.0;
    if !admissible(&y) {
        return Err(fail(0, f64::NAN, "initial guess has non-negative theta_t"));
    }
    let target = opts.tol * u.iter().map(|c| c * c).sum::<f64>().sqrt();
    let mut g = residual(&y, u, model);
    let mut res = g.norm();
    for iter in 0..opts.max_iter {
        if !res.is_finite() {
            return Err(fail(iter, res, "non-finite residual"));
        }
        if res <= target {
            return Ok(GodunovState(y));
        }
        let h = hess_x0_raw(&y, model);
        let chol = Cholesky::new((h + h.transpose()) * 0.5)
            .ok_or_else(|| fail(iter, res, "symmetrizer lost positive definiteness"))?;
        let delta = chol.solve(&(-g));
        let phi0 = merit(&y, u, model);
        let slope = g.dot(&delta);

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial: [f64; STATE_DIM] = std::array::from_fn(|k| y[k] + alpha * delta[k]);
            if admissible(&trial) {
                let g_trial = residual(&trial, u, model);
                let r_trial = g_trial.norm();
                if r_trial.is_finite() {
                    let phi = merit(&trial, u, model);
                    if r_trial < res || phi <= phi0 + 1e-4 * alpha * slope {
                        accepted = Some((trial, g_trial, r_trial));
                        break;
                    }
                }
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((trial, g_trial, r_trial)) => {
                y = trial;
                g = g_trial;
                res = r_trial;
            }
            None => return Err(fail(iter, res, "line search failed to stay in the domain")),
        }
    }
    if res <= target {
        Ok(GodunovState(y))
    } else {
        Err(fail(
            opts.max_iter,
            res,
            "Newton iteration did not converge",
        ))
    }
}

/// Starting point for Newton without a previous solution.
///
/// Density and velocity follow directly from `U`; the temperature solves
/// `ρ e(ρ, θ) = E − ½|ρu|²/ρ` by bracketing and bisection; the dissipative
/// variables are read off their conserved densities.
pub fn cold_start_guess<E: Eos>(u: &ConservedVector, model: &Model<E>) -> Result<GodunovState> {
    let fail = |reason: String| Error::Inversion {
        cell: None,
        iterations: 0,
        residual: f64::NAN,
        reason,
    };
    let rho = u[0];
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(fail(format!("non-positive mass density {rho}")));
    }
    let vel: [f64; 3] = std::array::from_fn(|a| u[1 + a] / rho);
    let internal = u[idx::THETA] - 0.5 * rho * vel.iter().map(|v| v * v).sum::<f64>();
    let eos = &model.eos;
    let energy_gap = |theta: f64| -> Result<f64> {
        let psi = eos.psi_from_rho_theta(rho, theta)?;
        let (_, e) = eos.density_energy(theta, psi)?;
        Ok(rho * e - internal)
    };
    let (mut lo, mut hi) = (1.0, 1.0);
    let mut found = false;
    for _ in 0..200 {
        if energy_gap(lo)? < 0.0 && energy_gap(hi)? > 0.0 {
            found = true;
            break;
        }
        if energy_gap(lo)? >= 0.0 {
            lo *= 0.5;
        }
        if energy_gap(hi)? <= 0.0 {
            hi *= 2.0;
        }
    }
    if !found {
        return Err(fail(format!(
            "no temperature matches internal energy density {internal:.6e}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if energy_gap(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    let theta = 0.5 * (lo + hi);
    let rp = &model.relax;
    let scaled = |v: f64, tau: f64| if tau > 0.0 { v / (tau * rho) } else { 0.0 };
    let dev_t: [f64; 5] = std::array::from_fn(|m| scaled(u[5 + m], rp.tau1()));
    let bulk_t = scaled(u[idx::BULK], rp.tau2());
    let q_t: [f64; 3] = std::array::from_fn(|a| scaled(u[11 + a], rp.tau0()));
    let mut y = GodunovState::new(
        0.0,
        vel.map(|v| v / theta),
        -1.0 / theta,
        dev_t,
        bulk_t,
        q_t,
    );
    let psi = eos.psi_from_rho_theta(rho, theta)?;
    y.0[idx::PSI] = psi - (model.extended_psi(&y) - y.0[idx::PSI]);
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::IdealGas;
    use crate::potentials::grad_x0;
    use crate::state::{PhysicalState, RelaxationParams};

    fn model() -> Model {
        Model::new(IdealGas::default(), RelaxationParams::default()).unwrap()
    }

    #[test]
    fn equilibrium_vector_inverts_to_equilibrium() {
        let m = model();
        let mut u = [0.0; STATE_DIM];
        u[0] = 1.0;
        u[4] = 2.5;
        let guess = m.to_godunov(&PhysicalState::equilibrium(1.3, 0.8)).unwrap();
        let y = conserved_to_godunov(&u, &guess, &m, &NewtonOptions::default()).unwrap();
        let want = m.to_godunov(&PhysicalState::equilibrium(1.0, 1.0)).unwrap();
        for k in 0..STATE_DIM {
            assert!((y.0[k] - want.0[k]).abs() < 1e-12, "{:?}", y.0);
        }
    }

    #[test]
    fn recovers_perturbed_state() {
        let m = model();
        let p = PhysicalState {
            rho: 1.7,
            u: [0.3, -0.2, 0.1],
            theta: 2.2,
            sigma_dev: [0.1, -0.3, 0.2, 0.05, -0.1],
            sigma: 0.2,
            q: [0.4, -0.1, 0.3],
        };
        let y = m.to_godunov(&p).unwrap();
        let u = grad_x0(&y, &m).unwrap();
        let guess = GodunovState(y.0.map(|c| c * (1.0 + 1e-3)));
        let got = conserved_to_godunov(&u, &guess, &m, &NewtonOptions::default()).unwrap();
        for k in 0..STATE_DIM {
            assert!((got.0[k] - y.0[k]).abs() <= 1e-10 * y.0[k].abs().max(1.0));
        }
    }

    #[test]
    fn cold_start_guess_is_close_to_newton_solution() {
        let m = model();
        let p = PhysicalState {
            rho: 0.6,
            u: [-0.4, 0.1, 0.0],
            theta: 0.7,
            sigma_dev: [0.2, 0.0, -0.1, 0.0, 0.3],
            sigma: -0.1,
            q: [0.1, 0.2, -0.3],
        };
        let y = m.to_godunov(&p).unwrap();
        let u = grad_x0(&y, &m).unwrap();
        let guess = cold_start_guess(&u, &m).unwrap();
        for k in 0..STATE_DIM {
            assert!((guess.0[k] - y.0[k]).abs() <= 1e-10 * y.0[k].abs().max(1.0));
        }
    }

    #[test]
    fn energy_below_kinetic_bound_is_rejected() {
        let m = model();
        let mut u = [0.0; STATE_DIM];
        u[0] = 1.0;
        u[1] = 1.0;
        u[4] = 0.4; // kinetic energy alone is 0.5
        let guess = m.to_godunov(&PhysicalState::equilibrium(1.0, 1.0)).unwrap();
        let r = conserved_to_godunov(&u, &guess, &m, &NewtonOptions::default());
        assert!(matches!(r, Err(Error::Inversion { .. })), "{r:?}");
        assert!(cold_start_guess(&u, &m).is_err());
    }
}
