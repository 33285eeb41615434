//! Stiff relaxation substep.
//!
//! Mass, momentum and energy have no source. With `ρ` and `θ` frozen at
//! the substep start, the conserved dissipative densities obey linear decay
//!
//! ```text
//! d/dt (τ₁ρΣ̃) = −θΣ̃/(2η)   rate θ/(2ητ₁ρ)
//! d/dt (τ₂ρσ̃) = −θσ̃/(3ζ)   rate θ/(3ζτ₂ρ)
//! d/dt (τ₀ρq̃) = −θ²q̃/χ     rate θ²/(χτ₀ρ)
//! ```
//!
//! which is integrated exactly. Decaying the dissipative densities leaves
//! `θ` and the extended potential `ψ` unchanged (only `ψ̃` absorbs the
//! change of the quadratic terms), so `ρ`, `u` and the energy stay put and
//! the new main field follows in closed form.

use crate::eos::Eos;
use crate::error::{Error, Result};
use crate::potentials::ConservedVector;
use crate::state::{idx, GodunovState, Model, SourceMode};

/// Decay rates `(shear, bulk, heat)` at a cell with density `rho` and
/// temperature `theta`.
pub fn relaxation_rates<E: Eos>(rho: f64, theta: f64, model: &Model<E>) -> [f64; 3] {
    let rp = &model.relax;
    [
        theta / (2.0 * rp.eta * rp.tau1() * rho),
        theta / (3.0 * rp.zeta * rp.tau2() * rho),
        theta * theta / (rp.chi * rp.tau0() * rho),
    ]
}

/// Applies the exponential decay in place and returns the updated
/// main-field state.
pub fn relax_substep<E: Eos>(
    u: &mut ConservedVector,
    y: &GodunovState,
    dt: f64,
    model: &Model<E>,
) -> Result<GodunovState> {
    if model.source == SourceMode::Off || y.is_equilibrium() {
        return Ok(*y);
    }
    let [shear, bulk, heat] = relaxation_rates(u[0], y.theta(), model);
    let (fs, fb, fh) = ((-shear * dt).exp(), (-bulk * dt).exp(), (-heat * dt).exp());
    for k in idx::DEV {
        u[k] *= fs;
    }
    u[idx::BULK] *= fb;
    for k in idx::Q {
        u[k] *= fh;
    }
    let rp = &model.relax;
    let mut out = y.0;
    let mut dpsi = 0.0;
    let mut scale = |k: usize, f: f64, tau: f64| {
        let old = out[k];
        out[k] *= f;
        dpsi += 0.5 * tau * (old * old - out[k] * out[k]);
    };
    for k in idx::DEV {
        scale(k, fs, rp.tau1());
    }
    scale(idx::BULK, fb, rp.tau2());
    for k in idx::Q {
        scale(k, fh, rp.tau0());
    }
    out[idx::PSI] += dpsi;
    if out.iter().any(|c| !c.is_finite()) {
        return Err(Error::Numeric("non-finite state after relaxation".into()));
    }
    Ok(GodunovState(out))
}
