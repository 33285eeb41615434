//! Equation of state in (temperature, extended potential) variables.
//!
//! The model needs `p̂(θ, ψ)` together with the identities `p̂_ψ = ρθ` and
//! `θ p̂_θ = ρe + p`; density and specific energy are *defined* through them.

use serde::{Deserialize, Serialize};

use crate::dual::Scalar;
use crate::error::{Error, Result};

/// The five partial derivatives of `p̂(θ, ψ)` up to second order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressurePartials {
    pub p_psi: f64,
    pub p_theta: f64,
    pub p_psipsi: f64,
    pub p_thetapsi: f64,
    pub p_thetatheta: f64,
}

/// An equation of state `p = p̂(θ, ψ)`.
///
/// Implementors provide the pressure with its first partials for any
/// [`Scalar`] (so that forward-mode differentiation can see through them),
/// the second partials, and the inverse map `(ρ, θ) ↦ ψ`. The provided
/// methods add the domain checks.
pub trait Eos: Send + Sync {
    /// `(p, p_ψ, p_θ)`; assumes `θ > 0`.
    fn eval<S: Scalar>(&self, theta: S, psi: S) -> [S; 3];

    /// `(p_ψψ, p_θψ, p_θθ)`; assumes `θ > 0`.
    fn second_partials_unchecked(&self, theta: f64, psi: f64) -> [f64; 3];

    /// Inverse of `ψ ↦ ρ(θ, ψ)`; assumes `ρ, θ > 0`.
    fn psi_unchecked(&self, rho: f64, theta: f64) -> f64;

    fn pressure(&self, theta: f64, psi: f64) -> Result<f64> {
        check_theta(theta)?;
        let [p, _, _] = self.eval(theta, psi);
        finite(p, "pressure")
    }

    fn pressure_partials(&self, theta: f64, psi: f64) -> Result<PressurePartials> {
        check_theta(theta)?;
        let [_, p_psi, p_theta] = self.eval(theta, psi);
        let [p_psipsi, p_thetapsi, p_thetatheta] = self.second_partials_unchecked(theta, psi);
        Ok(PressurePartials {
            p_psi,
            p_theta,
            p_psipsi,
            p_thetapsi,
            p_thetatheta,
        })
    }

    /// `ρ = p̂_ψ / θ` and `e = (θ p̂_θ − p) / ρ`.
    fn density_energy(&self, theta: f64, psi: f64) -> Result<(f64, f64)> {
        check_theta(theta)?;
        let [p, p_psi, p_theta] = self.eval(theta, psi);
        let rho = finite(p_psi / theta, "density")?;
        if rho <= 0.0 {
            return Err(Error::domain(format!("non-positive density {rho}")));
        }
        Ok((rho, (theta * p_theta - p) / rho))
    }

    fn psi_from_rho_theta(&self, rho: f64, theta: f64) -> Result<f64> {
        check_theta(theta)?;
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::domain(format!(
                "density must be positive, got {rho}"
            )));
        }
        finite(self.psi_unchecked(rho, theta), "extended potential")
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "temperature must be positive, got {theta}"
        )))
    }
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(format!("{what} is not finite")))
    }
}

/// Polytropic ideal gas, `p̂(θ, ψ) = p_ref θ^(γ/(γ−1)) exp(ψ/R)`.
///
/// This is the closed form for which `p̂_ψ/θ = p/(Rθ)` (ideal-gas law) and
/// `θ p̂_θ − p = ρ c_v θ` hold simultaneously.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdealGas {
    pub gamma: f64,
    #[serde(rename = "R")]
    pub gas_const: f64,
    pub p_ref: f64,
}

impl Default for IdealGas {
    fn default() -> Self {
        Self {
            gamma: 1.4,
            gas_const: 1.0,
            p_ref: 1.0,
        }
    }
}

impl IdealGas {
    pub fn new(gamma: f64, gas_const: f64, p_ref: f64) -> Result<Self> {
        let eos = Self {
            gamma,
            gas_const,
            p_ref,
        };
        eos.validate()?;
        Ok(eos)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return Err(Error::domain(format!(
                "gamma must exceed 1, got {}",
                self.gamma
            )));
        }
        if !(self.gas_const > 0.0 && self.gas_const.is_finite()) {
            return Err(Error::domain(format!(
                "R must be positive, got {}",
                self.gas_const
            )));
        }
        if !(self.p_ref > 0.0 && self.p_ref.is_finite()) {
            return Err(Error::domain(format!(
                "p_ref must be positive, got {}",
                self.p_ref
            )));
        }
        Ok(())
    }

    /// `γ/(γ−1)`, the temperature exponent of the pressure.
    #[inline]
    pub fn exponent(&self) -> f64 {
        self.gamma / (self.gamma - 1.0)
    }

    #[inline]
    pub fn cv(&self) -> f64 {
        self.gas_const / (self.gamma - 1.0)
    }

    #[inline]
    pub fn sound_speed(&self, theta: f64) -> f64 {
        (self.gamma * self.gas_const * theta).sqrt()
    }
}

impl Eos for IdealGas {
    #[inline]
    fn eval<S: Scalar>(&self, theta: S, psi: S) -> [S; 3] {
        let a = self.exponent();
        let p = theta.powf(a) * (psi / self.gas_const).exp() * self.p_ref;
        [p, p / self.gas_const, p * a / theta]
    }

    fn second_partials_unchecked(&self, theta: f64, psi: f64) -> [f64; 3] {
        let a = self.exponent();
        let r = self.gas_const;
        let [p, _, _] = self.eval(theta, psi);
        [
            p / (r * r),
            a * p / (r * theta),
            a * (a - 1.0) * p / (theta * theta),
        ]
    }

    fn psi_unchecked(&self, rho: f64, theta: f64) -> f64 {
        let r = self.gas_const;
        r * (rho * r * theta / (self.p_ref * theta.powf(self.exponent()))).ln()
    }
}
