//! Initial conditions on a periodic grid.
//!
//! Dissipative fields are "well prepared": they are set to their
//! Navier–Stokes–Fourier values `Σ = −2η dev sym ∇u`, `σ = −3ζ div u`,
//! `q = −χ∇θ`, evaluated by centred differences, so that the relaxation
//! system starts without an initial layer.

use std::f64::consts::TAU;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::state::{pack_dev_unchecked, PhysicalState, RelaxationParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IcKind {
    DensitySine,
    AcousticPulse,
    CustomJson,
}

/// The `"ic"` block of a run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IcConfig {
    #[serde(rename = "type")]
    pub kind: IcKind,
    #[serde(default)]
    pub amplitude: f64,
    /// Reference density.
    #[serde(default = "one")]
    pub rho0: f64,
    /// Reference temperature.
    #[serde(default = "one")]
    pub theta0: f64,
    /// Uniform background velocity along `x`.
    #[serde(default)]
    pub u0: f64,
    /// Gaussian width of the acoustic pulse, in units of the domain length.
    #[serde(default = "default_width")]
    pub width: f64,
    /// Cell states for `custom_json`, one per cell.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<PhysicalState>>,
    /// File holding a JSON array of cell states for `custom_json`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

fn one() -> f64 {
    1.0
}

fn default_width() -> f64 {
    0.05
}

impl Default for IcConfig {
    fn default() -> Self {
        Self {
            kind: IcKind::DensitySine,
            amplitude: 0.05,
            rho0: 1.0,
            theta0: 1.0,
            u0: 0.0,
            width: default_width(),
            states: None,
            path: None,
        }
    }
}

impl IcConfig {
    pub fn density_sine(amplitude: f64) -> Self {
        Self {
            amplitude,
            ..Default::default()
        }
    }

    pub fn acoustic_pulse(amplitude: f64) -> Self {
        Self {
            kind: IcKind::AcousticPulse,
            amplitude,
            ..Default::default()
        }
    }
}

/// Density, velocity and temperature on the cell centres.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveFields {
    pub rho: Vec<f64>,
    pub u: Vec<[f64; 3]>,
    pub theta: Vec<f64>,
}

/// Laboratory state of every cell, with well-prepared dissipative fields
/// (except for `custom_json`, whose states are taken verbatim).
pub fn initial_states(
    ic: &IcConfig,
    grid: &Grid1D,
    gamma: f64,
    gas_const: f64,
    relax: &RelaxationParams,
) -> Result<Vec<PhysicalState>> {
    if ic.kind == IcKind::CustomJson {
        return custom_states(ic, grid);
    }
    let prim = primitive_fields(ic, grid, gamma, gas_const)?;
    Ok(prepared_states(&prim, grid, relax))
}

pub fn primitive_fields(
    ic: &IcConfig,
    grid: &Grid1D,
    gamma: f64,
    gas_const: f64,
) -> Result<PrimitiveFields> {
    if !(ic.rho0 > 0.0 && ic.theta0 > 0.0) {
        return Err(Error::Config(format!(
            "reference state needs rho0, theta0 > 0 (got {}, {})",
            ic.rho0, ic.theta0
        )));
    }
    let len = grid.length();
    let xs = grid.centers();
    let (rho, u, theta) = match ic.kind {
        IcKind::DensitySine => {
            let rho = xs
                .iter()
                .map(|x| ic.rho0 * (1.0 + ic.amplitude * (TAU * (x - grid.x_min) / len).sin()))
                .collect();
            (
                rho,
                vec![[ic.u0, 0.0, 0.0]; xs.len()],
                vec![ic.theta0; xs.len()],
            )
        }
        IcKind::AcousticPulse => {
            // Right-moving linear acoustic wave with a Gaussian profile.
            let c0 = (gamma * gas_const * ic.theta0).sqrt();
            let mid = grid.x_min + 0.5 * len;
            let shape: Vec<f64> = xs
                .iter()
                .map(|x| ic.amplitude * (-((x - mid) / (ic.width * len)).powi(2)).exp())
                .collect();
            (
                shape.iter().map(|f| ic.rho0 * (1.0 + f)).collect(),
                shape.iter().map(|f| [ic.u0 + c0 * f, 0.0, 0.0]).collect(),
                shape
                    .iter()
                    .map(|f| ic.theta0 * (1.0 + (gamma - 1.0) * f))
                    .collect(),
            )
        }
        IcKind::CustomJson => {
            // dissipative fields of custom states are dropped here
            let states = custom_states(ic, grid)?;
            (
                states.iter().map(|s| s.rho).collect(),
                states.iter().map(|s| s.u).collect(),
                states.iter().map(|s| s.theta).collect(),
            )
        }
    };
    let prim = PrimitiveFields { rho, u, theta };
    if prim.rho.iter().chain(&prim.theta).any(|v| !(*v > 0.0)) {
        return Err(Error::Config(
            "initial condition has non-positive density or temperature".into(),
        ));
    }
    Ok(prim)
}

fn custom_states(ic: &IcConfig, grid: &Grid1D) -> Result<Vec<PhysicalState>> {
    let states = match (&ic.states, &ic.path) {
        (Some(s), _) => s.clone(),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {path}: {e}")))?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("cannot parse {path}: {e}")))?
        }
        (None, None) => {
            return Err(Error::Config(
                "custom_json initial condition needs \"states\" or \"path\"".into(),
            ))
        }
    };
    if states.len() != grid.n_cells {
        return Err(Error::Config(format!(
            "custom_json has {} states for {} cells",
            states.len(),
            grid.n_cells
        )));
    }
    for s in &states {
        s.validate()?;
    }
    Ok(states)
}

/// Dissipative fields at their relaxation-limit values for the given
/// primitive fields.
pub fn prepared_states(
    prim: &PrimitiveFields,
    grid: &Grid1D,
    relax: &RelaxationParams,
) -> Vec<PhysicalState> {
    let du: [Vec<f64>; 3] = std::array::from_fn(|a| {
        let comp: Vec<f64> = prim.u.iter().map(|u| u[a]).collect();
        grid.centered_derivative(&comp)
    });
    let dtheta = grid.centered_derivative(&prim.theta);
    (0..grid.n_cells)
        .map(|i| {
            let mut grad_u = Matrix3::zeros();
            for a in 0..3 {
                grad_u[(a, 0)] = du[a][i];
            }
            let sym = (grad_u + grad_u.transpose()) * 0.5;
            let dev = pack_dev_unchecked(&sym);
            PhysicalState {
                rho: prim.rho[i],
                u: prim.u[i],
                theta: prim.theta[i],
                sigma_dev: dev.map(|c| -2.0 * relax.eta * c),
                sigma: -3.0 * relax.zeta * du[0][i],
                q: [-relax.chi * dtheta[i], 0.0, 0.0],
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::dev_11;

    #[test]
    fn custom_states_give_primitive_fields() {
        let g = Grid1D::new(4, 0.0, 1.0).unwrap();
        let mut states = vec![PhysicalState::equilibrium(1.0, 2.0); 4];
        states[1].u = [0.3, 0.0, 0.0];
        states[1].sigma = 0.2;
        let ic = IcConfig {
            kind: IcKind::CustomJson,
            states: Some(states),
            ..Default::default()
        };
        let prim = primitive_fields(&ic, &g, 1.4, 1.0).unwrap();
        assert_eq!(prim.u[1], [0.3, 0.0, 0.0]);
        assert_eq!(prim.theta, vec![2.0; 4]);
    }

    #[test]
    fn density_sine_is_well_prepared_at_rest() {
        let g = Grid1D::new(16, 0.0, 1.0).unwrap();
        let s = initial_states(
            &IcConfig::density_sine(0.05),
            &g,
            1.4,
            1.0,
            &Default::default(),
        )
        .unwrap();
        assert_eq!(s.len(), 16);
        let mean: f64 = s.iter().map(|c| c.rho).sum::<f64>() / 16.0;
        assert!((mean - 1.0).abs() < 1e-15);
        assert!(s
            .iter()
            .all(|c| c.sigma == 0.0 && c.q == [0.0; 3] && c.theta == 1.0));
    }

    #[test]
    fn prepared_shear_stress_matches_newtonian_law() {
        let g = Grid1D::new(64, 0.0, 1.0).unwrap();
        let xs = g.centers();
        let prim = PrimitiveFields {
            rho: vec![1.0; 64],
            u: xs.iter().map(|x| [(TAU * x).sin(), 0.0, 0.0]).collect(),
            theta: vec![1.0; 64],
        };
        let relax = RelaxationParams {
            eta: 0.7,
            zeta: 0.2,
            ..Default::default()
        };
        let s = prepared_states(&prim, &g, &relax);
        let du = g.centered_derivative(&prim.u.iter().map(|u| u[0]).collect::<Vec<_>>());
        for (c, d) in s.iter().zip(du) {
            assert!((dev_11(&c.sigma_dev) + 4.0 / 3.0 * 0.7 * d).abs() < 1e-14);
            assert!((c.sigma + 0.6 * d).abs() < 1e-14);
        }
    }

    #[test]
    fn custom_states_need_matching_length() {
        let g = Grid1D::new(4, 0.0, 1.0).unwrap();
        let ic = IcConfig {
            kind: IcKind::CustomJson,
            states: Some(vec![PhysicalState::equilibrium(1.0, 1.0); 3]),
            ..Default::default()
        };
        assert!(matches!(
            initial_states(&ic, &g, 1.4, 1.0, &Default::default()),
            Err(Error::Config(_))
        ));
    }
}
