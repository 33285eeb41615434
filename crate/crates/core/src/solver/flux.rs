//! Two-point Rusanov (local Lax–Friedrichs) flux in direction `e₁`.

use crate::eos::Eos;
use crate::error::Result;
use crate::potentials::{grad_x0_generic, grad_xdir_generic, ConservedVector, E1};
use crate::state::{GodunovState, Model, STATE_DIM};
use crate::structure::spectral_radius_raw;

use super::inversion::{cold_start_guess, conserved_to_godunov, NewtonOptions};

/// `½(F_L + F_R) − ½ s (U_R − U_L)`.
#[inline]
pub fn rusanov(
    ul: &ConservedVector,
    ur: &ConservedVector,
    fl: &[f64; STATE_DIM],
    fr: &[f64; STATE_DIM],
    s: f64,
) -> [f64; STATE_DIM] {
    std::array::from_fn(|k| 0.5 * (fl[k] + fr[k]) - 0.5 * s * (ur[k] - ul[k]))
}

/// Physical flux `∇X¹(Υ)`.
#[inline]
pub fn physical_flux<E: Eos>(y: &[f64; STATE_DIM], model: &Model<E>) -> [f64; STATE_DIM] {
    grad_xdir_generic(y, &E1, model)
}

#[inline]
pub fn conserved<E: Eos>(y: &[f64; STATE_DIM], model: &Model<E>) -> ConservedVector {
    grad_x0_generic(y, model)
}

/// Rusanov flux between two conserved states, with the wave-speed bound
/// taken as the larger pencil spectral radius of the two states.
pub fn numerical_flux<E: Eos>(
    ul: &ConservedVector,
    ur: &ConservedVector,
    model: &Model<E>,
) -> Result<[f64; STATE_DIM]> {
    let opts = NewtonOptions::default();
    let invert = |u: &ConservedVector| -> Result<GodunovState> {
        let guess = cold_start_guess(u, model)?;
        conserved_to_godunov(u, &guess, model, &opts)
    };
    let yl = invert(ul)?;
    let yr = invert(ur)?;
    let s = spectral_radius_raw(&yl.0, &E1, model)?.max(spectral_radius_raw(&yr.0, &E1, model)?);
    Ok(rusanov(
        ul,
        ur,
        &physical_flux(&yl.0, model),
        &physical_flux(&yr.0, model),
        s,
    ))
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
    fn equal_states_give_physical_flux() {
        let m = model();
        let y = m.to_godunov(&PhysicalState::equilibrium(1.0, 1.0)).unwrap();
        let u = grad_x0(&y, &m).unwrap();
        let f = numerical_flux(&u, &u, &m).unwrap();
        let mut want = [0.0; STATE_DIM];
        want[1] = 1.0;
        want[11] = 1.0;
        for k in 0..STATE_DIM {
            assert!((f[k] - want[k]).abs() < 1e-13, "{f:?}");
        }

        let p = PhysicalState {
            rho: 1.2,
            u: [0.3, 0.1, 0.0],
            theta: 0.9,
            sigma_dev: [0.1, 0.0, 0.05, 0.0, 0.0],
            sigma: 0.02,
            q: [0.1, 0.0, 0.0],
        };
        let y = m.to_godunov(&p).unwrap();
        let u = grad_x0(&y, &m).unwrap();
        let f = numerical_flux(&u, &u, &m).unwrap();
        let exact = physical_flux(&y.0, &m);
        for k in 0..STATE_DIM {
            assert!((f[k] - exact[k]).abs() < 1e-12 * exact[k].abs().max(1.0));
        }
    }

    #[test]
    fn upwind_term_is_proportional_to_jump() {
        let ul = [1.0; STATE_DIM];
        let ur = [2.0; STATE_DIM];
        let f = [0.5; STATE_DIM];
        let out = rusanov(&ul, &ur, &f, &f, 3.0);
        assert!(out.iter().all(|&v| (v - (0.5 - 1.5)).abs() < 1e-15));
    }
}
