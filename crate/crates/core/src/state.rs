//! State representations: laboratory variables, the 14-component main-field
//! (Godunov) vector, packed trace-free symmetric tensors and the model
//! parameters that connect them.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::eos::{Eos, IdealGas};
use crate::error::{Error, Result};

/// Length of the main-field and conserved vectors.
pub const STATE_DIM: usize = 14;

/// Component layout `[ψ̃, ũ₁, ũ₂, ũ₃, θ̃, s₁…s₅, σ̃, q̃₁, q̃₂, q̃₃]`.
pub mod idx {
    use std::ops::Range;

    pub const PSI: usize = 0;
    pub const U: Range<usize> = 1..4;
    pub const THETA: usize = 4;
    pub const DEV: Range<usize> = 5..10;
    pub const BULK: usize = 10;
    pub const Q: Range<usize> = 11..14;
    /// Coordinates on which the relaxation source acts.
    pub const DISSIPATIVE: Range<usize> = 5..14;
    /// Mass, momentum and energy.
    pub const BALANCE: Range<usize> = 0..5;
}

const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Orthonormal (Frobenius) basis of symmetric trace-free 3×3 matrices.
pub struct DevTensorBasis;

impl DevTensorBasis {
    /// `B₁ … B₅`.
    pub fn elements() -> [Matrix3<f64>; 5] {
        let s6 = 6f64.sqrt();
        let h = INV_SQRT2;
        [
            Matrix3::new(2.0 / s6, 0.0, 0.0, 0.0, -1.0 / s6, 0.0, 0.0, 0.0, -1.0 / s6),
            Matrix3::new(0.0, 0.0, 0.0, 0.0, h, 0.0, 0.0, 0.0, -h),
            Matrix3::new(0.0, h, 0.0, h, 0.0, 0.0, 0.0, 0.0, 0.0),
            Matrix3::new(0.0, 0.0, h, 0.0, 0.0, 0.0, h, 0.0, 0.0),
            Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, h, 0.0, h, 0.0),
        ]
    }

    /// Entry `(Bₘ)_{ab}` without building the matrices.
    #[inline]
    pub fn entry(m: usize, a: usize, b: usize) -> f64 {
        let s6 = 6f64.sqrt();
        match (m, a, b) {
            (0, 0, 0) => 2.0 / s6,
            (0, 1, 1) | (0, 2, 2) => -1.0 / s6,
            (1, 1, 1) => INV_SQRT2,
            (1, 2, 2) => -INV_SQRT2,
            (2, 0, 1) | (2, 1, 0) => INV_SQRT2,
            (3, 0, 2) | (3, 2, 0) => INV_SQRT2,
            (4, 1, 2) | (4, 2, 1) => INV_SQRT2,
            _ => 0.0,
        }
    }
}

/// Coordinates of a symmetric trace-free tensor in [`DevTensorBasis`].
pub fn pack_dev(t: &Matrix3<f64>) -> Result<[f64; 5]> {
    let scale = t.norm().max(f64::MIN_POSITIVE);
    let asym = (t - t.transpose()).norm();
    if asym > 1e-12 * scale {
        return Err(Error::Validation(format!(
            "tensor is not symmetric (|T - T^T| = {asym:.3e})"
        )));
    }
    if t.trace().abs() > 1e-12 * scale {
        return Err(Error::Validation(format!(
            "tensor is not trace-free (trace = {:.3e})",
            t.trace()
        )));
    }
    Ok(pack_dev_unchecked(t))
}

/// Projection of any 3×3 matrix onto the packed coordinates; the result
/// represents the symmetric trace-free part.
pub fn pack_dev_unchecked(t: &Matrix3<f64>) -> [f64; 5] {
    let b = DevTensorBasis::elements();
    std::array::from_fn(|m| b[m].component_mul(t).sum())
}

pub fn unpack_dev(s: &[f64; 5]) -> Matrix3<f64> {
    DevTensorBasis::elements()
        .iter()
        .zip(s)
        .fold(Matrix3::zeros(), |acc, (b, &c)| acc + b * c)
}

/// `(Σ)₁₁` from packed coordinates.
#[inline]
pub fn dev_11(s: &[f64; 5]) -> f64 {
    s[0] * DevTensorBasis::entry(0, 0, 0)
}

/// Relaxation moduli, transport coefficients and the scaling `ε`.
///
/// `tau` holds `(τ̄₀, τ̄₁, τ̄₂)`; the moduli used by the model are `ε·τ̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelaxationParams {
    pub tau: [f64; 3],
    pub epsilon: f64,
    pub eta: f64,
    pub zeta: f64,
    pub chi: f64,
}

impl Default for RelaxationParams {
    fn default() -> Self {
        Self {
            tau: [1.0; 3],
            epsilon: 1.0,
            eta: 1.0,
            zeta: 1.0,
            chi: 1.0,
        }
    }
}

impl RelaxationParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tau0", self.tau[0]),
            ("tau1", self.tau[1]),
            ("tau2", self.tau[2]),
            ("eta", self.eta),
            ("zeta", self.zeta),
            ("chi", self.chi),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::domain(format!(
                "epsilon must be non-negative, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }

    pub fn with_epsilon(self, epsilon: f64) -> Self {
        Self { epsilon, ..self }
    }

    #[inline]
    pub fn tau0(&self) -> f64 {
        self.epsilon * self.tau[0]
    }
    #[inline]
    pub fn tau1(&self) -> f64 {
        self.epsilon * self.tau[1]
    }
    #[inline]
    pub fn tau2(&self) -> f64 {
        self.epsilon * self.tau[2]
    }

    /// Effective 1D viscosity `(4/3)η + 3ζ` of the relaxation limit.
    pub fn effective_viscosity(&self) -> f64 {
        4.0 / 3.0 * self.eta + 3.0 * self.zeta
    }
}

/// Whether the relaxation source is active. `Off` is a control that
/// removes every dissipative mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceMode {
    #[default]
    On,
    Off,
}

/// Equation of state, relaxation parameters and source switch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model<E: Eos = IdealGas> {
    pub eos: E,
    pub relax: RelaxationParams,
    pub source: SourceMode,
}

impl<E: Eos> Model<E> {
    pub fn new(eos: E, relax: RelaxationParams) -> Result<Self> {
        relax.validate()?;
        Ok(Self {
            eos,
            relax,
            source: SourceMode::On,
        })
    }

    pub fn with_source(self, source: SourceMode) -> Self {
        Self { source, ..self }
    }

    /// Laboratory variables to main-field variables.
    pub fn to_godunov(&self, p: &PhysicalState) -> Result<GodunovState> {
        p.validate()?;
        let theta = p.theta;
        let psi = self.eos.psi_from_rho_theta(p.rho, theta)?;
        let u_t = p.u.map(|c| c / theta);
        let dev_t = p.sigma_dev.map(|c| c / theta);
        let bulk_t = p.sigma / theta;
        let q_t = p.q.map(|c| c / (theta * theta));
        let rp = &self.relax;
        let psi_t = psi
            - 0.5 * theta * norm2(&u_t)
            - 0.5 * rp.tau1() * norm2(&dev_t)
            - 0.5 * rp.tau2() * bulk_t * bulk_t
            - 0.5 * rp.tau0() * norm2(&q_t);
        Ok(GodunovState::new(
            psi_t,
            u_t,
            -1.0 / theta,
            dev_t,
            bulk_t,
            q_t,
        ))
    }

    /// Main-field variables to laboratory variables.
    pub fn from_godunov(&self, y: &GodunovState) -> Result<PhysicalState> {
        y.validate()?;
        let theta = y.theta();
        let psi = self.extended_psi(y);
        let (rho, _) = self.eos.density_energy(theta, psi)?;
        Ok(PhysicalState {
            rho,
            u: y.u_t().map(|c| c * theta),
            theta,
            sigma_dev: y.sigma_dev_t().map(|c| c * theta),
            sigma: y.sigma_bulk_t() * theta,
            q: y.q_t().map(|c| c * theta * theta),
        })
    }

    /// `ψ = ψ̃ + ½θ|ũ|² + ½τ₁ Σ̃:Σ̃ + ½τ₂ σ̃² + ½τ₀ |q̃|²`.
    pub fn extended_psi(&self, y: &GodunovState) -> f64 {
        let rp = &self.relax;
        let b = y.sigma_bulk_t();
        y.psi_t()
            + 0.5 * y.theta() * norm2(&y.u_t())
            + 0.5 * rp.tau1() * norm2(&y.sigma_dev_t())
            + 0.5 * rp.tau2() * b * b
            + 0.5 * rp.tau0() * norm2(&y.q_t())
    }
}

#[inline]
fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum()
}

/// The main-field vector `Υ = (ψ̃, ũ, θ̃, Σ̃, σ̃, q̃)` with `Σ̃` packed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GodunovState(pub [f64; STATE_DIM]);

impl GodunovState {
    pub fn new(
        psi_t: f64,
        u_t: [f64; 3],
        theta_t: f64,
        sigma_dev_t: [f64; 5],
        sigma_bulk_t: f64,
        q_t: [f64; 3],
    ) -> Self {
        let mut y = [0.0; STATE_DIM];
        y[idx::PSI] = psi_t;
        y[idx::U].copy_from_slice(&u_t);
        y[idx::THETA] = theta_t;
        y[idx::DEV].copy_from_slice(&sigma_dev_t);
        y[idx::BULK] = sigma_bulk_t;
        y[idx::Q].copy_from_slice(&q_t);
        Self(y)
    }

    pub fn as_array(&self) -> &[f64; STATE_DIM] {
        &self.0
    }

    pub fn psi_t(&self) -> f64 {
        self.0[idx::PSI]
    }
    pub fn u_t(&self) -> [f64; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }
    pub fn theta_t(&self) -> f64 {
        self.0[idx::THETA]
    }
    pub fn sigma_dev_t(&self) -> [f64; 5] {
        [self.0[5], self.0[6], self.0[7], self.0[8], self.0[9]]
    }
    pub fn sigma_bulk_t(&self) -> f64 {
        self.0[idx::BULK]
    }
    pub fn q_t(&self) -> [f64; 3] {
        [self.0[11], self.0[12], self.0[13]]
    }

    /// Temperature `θ = −1/θ̃`.
    pub fn theta(&self) -> f64 {
        -1.0 / self.theta_t()
    }

    /// True when `Σ̃ = σ̃ = q̃ = 0`.
    pub fn is_equilibrium(&self) -> bool {
        self.0[idx::DISSIPATIVE].iter().all(|&c| c == 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.0.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("main-field vector has non-finite components"));
        }
        if !(self.theta_t() < 0.0) {
            return Err(Error::domain(format!(
                "theta_t must be negative, got {}",
                self.theta_t()
            )));
        }
        Ok(())
    }
}

/// Laboratory variables. The viscous stress is `−(Σ + σ𝕀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalState {
    pub rho: f64,
    pub u: [f64; 3],
    pub theta: f64,
    #[serde(rename = "Sigma")]
    pub sigma_dev: [f64; 5],
    pub sigma: f64,
    pub q: [f64; 3],
}

impl PhysicalState {
    /// At rest, without dissipative fields.
    pub fn equilibrium(rho: f64, theta: f64) -> Self {
        Self {
            rho,
            u: [0.0; 3],
            theta,
            sigma_dev: [0.0; 5],
            sigma: 0.0,
            q: [0.0; 3],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::domain(format!(
                "rho must be positive, got {}",
                self.rho
            )));
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(Error::domain(format!(
                "theta must be positive, got {}",
                self.theta
            )));
        }
        let rest = self
            .u
            .iter()
            .chain(&self.sigma_dev)
            .chain(std::iter::once(&self.sigma))
            .chain(&self.q);
        if rest.into_iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("physical state has non-finite components"));
        }
        Ok(())
    }

    /// Full trace-free stress `Σ` as a matrix.
    pub fn sigma_dev_tensor(&self) -> Matrix3<f64> {
        unpack_dev(&self.sigma_dev)
    }
}
