//! Structural verification of the symmetric hyperbolic relaxation system:
//! positivity of the symmetrizer `D²X⁰`, symmetry of the Hessians,
//! sign of the source Jacobian and the Kawashima condition
//! (no eigenvector of `D²(n·X)` relative to `D²X⁰` lies in `ker(DI)`).

use nalgebra::DMatrix;
use serde::Serialize;

use crate::eos::Eos;
use crate::error::{Error, Result};
use crate::linalg;
use crate::potentials::{self, Matrix14};
use crate::state::{GodunovState, Model, STATE_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative asymmetry allowed for the Hessians.
    pub symmetry: f64,
    /// `D²X⁰` passes when its smallest eigenvalue exceeds `spd · ‖D²X⁰‖₂`.
    pub spd: f64,
    /// Relative gap below which pencil eigenvalues belong to one cluster.
    pub cluster: f64,
    /// Kawashima margin threshold, also the relative rank cut for `DI`.
    pub rank: f64,
    /// Largest admissible eigenvalue of `sym(DI)` at equilibrium.
    pub dissipativity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            symmetry: 1e-12,
            spd: 1e-12,
            cluster: 1e-8,
            rank: 1e-8,
            dissipativity: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpdCheck {
    pub min_eig: f64,
    pub max_eig: f64,
    pub pass: bool,
}

/// Smallest eigenvalue of `D²X⁰(Υ)`; passes when it exceeds `tol·‖D²X⁰‖₂`.
pub fn check_spd<E: Eos>(y: &GodunovState, model: &Model<E>, tol: f64) -> Result<SpdCheck> {
    let h = potentials::hess_x0(y, model)?;
    let vals = ((h + h.transpose()) * 0.5).symmetric_eigenvalues();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!(
            "non-finite eigenvalue of D2X0 at {:?}",
            y.0
        )));
    }
    let min_eig = vals.min();
    let max_eig = vals.max();
    let scale = min_eig.abs().max(max_eig.abs());
    Ok(SpdCheck {
        min_eig,
        max_eig,
        pass: min_eig > tol * scale,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KawashimaCheck {
    pub direction: [f64; 3],
    pub margin: f64,
    pub pass: bool,
    pub eigenvalues: Vec<f64>,
    /// Multiplicity of each eigenvalue cluster, in ascending order.
    pub cluster_sizes: Vec<usize>,
}

/// Eigenspace-level check of the Kawashima condition at an equilibrium.
///
/// For each cluster of eigenvalues of the pencil `(D²(n·X), D²X⁰)`, with
/// `D²X⁰`-orthonormal eigenbasis `V`, the smallest singular value of `P V`
/// is computed, `P` being the orthogonal projector onto `ker(DI)^⊥`. A
/// positive value means the eigenspace meets `ker(DI)` only at zero.
pub fn kawashima_check<E: Eos>(
    y_eq: &GodunovState,
    n: &[f64; 3],
    model: &Model<E>,
    cluster_tol: f64,
    rank_tol: f64,
) -> Result<KawashimaCheck> {
    y_eq.validate()?;
    if !y_eq.is_equilibrium() {
        return Err(Error::Precondition(
            "Kawashima check requires an equilibrium state (vanishing dissipative fields)".into(),
        ));
    }
    let h0 = potentials::hess_x0(y_eq, model)?;
    let h1 = potentials::hess_x_dir(y_eq, n, model)?;
    let eig = linalg::pencil_eigen(&h1, &h0)?;
    let di = potentials::source_jacobian(y_eq, model)?;
    let proj = linalg::corange_projector(&di, rank_tol)?;

    let clusters = cluster(&eig.values, cluster_tol);
    let mut margin = f64::INFINITY;
    for range in &clusters {
        let v = DMatrix::from_fn(STATE_DIM, range.len(), |r, c| {
            eig.vectors[(r, range.start + c)]
        });
        let pv = DMatrix::from_fn(STATE_DIM, STATE_DIM, |r, c| proj[(r, c)]) * v;
        margin = margin.min(linalg::min_singular_value(&pv));
    }
    Ok(KawashimaCheck {
        direction: *n,
        margin,
        pass: margin > rank_tol,
        eigenvalues: eig.values.to_vec(),
        cluster_sizes: clusters.iter().map(|r| r.len()).collect(),
    })
}

/// Groups ascending values whose consecutive gaps are at most
/// `tol · max|λ|`.
fn cluster(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let radius = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let gap = tol * radius;
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > gap {
            out.push(start..i);
            start = i;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DissipativityCheck {
    pub max_eig: f64,
    /// `None` away from equilibrium, where `sym(DI)` need not be semi-definite.
    pub pass: Option<bool>,
}

/// Largest eigenvalue of `½(DI + DIᵀ)`.
pub fn check_dissipativity<E: Eos>(
    y: &GodunovState,
    model: &Model<E>,
    tol: f64,
) -> Result<DissipativityCheck> {
    let di = potentials::source_jacobian(y, model)?;
    let max_eig = ((di + di.transpose()) * 0.5).symmetric_eigenvalues().max();
    Ok(DissipativityCheck {
        max_eig,
        pass: y.is_equilibrium().then_some(max_eig <= tol),
    })
}

/// Eigenvalues of the pencil `(D²(n·X), D²X⁰)`, ascending.
pub fn characteristic_speeds<E: Eos>(
    y: &GodunovState,
    n: &[f64; 3],
    model: &Model<E>,
) -> Result<[f64; STATE_DIM]> {
    let h0 = potentials::hess_x0(y, model)?;
    let h1 = potentials::hess_x_dir(y, n, model)?;
    linalg::pencil_eigenvalues(&h1, &h0)
}

/// Largest `|λ|` of the pencil in direction `n`, unchecked state.
pub fn spectral_radius_raw<E: Eos>(
    y: &[f64; STATE_DIM],
    n: &[f64; 3],
    model: &Model<E>,
) -> Result<f64> {
    let h0 = potentials::hess_x0_raw(y, model);
    let h1 = potentials::hess_xdir_raw(y, n, model);
    let vals = linalg::pencil_eigenvalues(&h1, &h0)?;
    Ok(vals[0].abs().max(vals[STATE_DIM - 1].abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdicts {
    pub symmetry: bool,
    pub spd: bool,
    pub dissipativity: bool,
    pub kawashima: bool,
}

impl Verdicts {
    pub fn all(&self) -> bool {
        self.symmetry && self.spd && self.dissipativity && self.kawashima
    }
}

/// Result of the full structural audit at one equilibrium state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub symmetry_residual: f64,
    pub min_eig_h0: f64,
    pub kawashima_margin: f64,
    pub dissipativity_max: f64,
    pub tolerances: Tolerances,
    pub verdicts: Verdicts,
    pub kawashima: Vec<KawashimaCheck>,
}

impl StructureReport {
    pub fn all_pass(&self) -> bool {
        self.verdicts.all()
    }
}

/// Runs every structural check at `y_eq` for the given directions.
pub fn verify<E: Eos>(
    y_eq: &GodunovState,
    directions: &[[f64; 3]],
    model: &Model<E>,
    tol: &Tolerances,
) -> Result<StructureReport> {
    let spd = check_spd(y_eq, model, tol.spd)?;
    if !spd.pass {
        return Err(Error::Structural(format!(
            "D2X0 is not positive definite (min eigenvalue {:.3e})",
            spd.min_eig
        )));
    }
    let mut symmetry_residual = linalg::asymmetry(&potentials::hess_x0(y_eq, model)?);
    let mut kawashima = Vec::with_capacity(directions.len());
    for n in directions {
        let h: Matrix14 = potentials::hess_x_dir(y_eq, n, model)?;
        symmetry_residual = symmetry_residual.max(linalg::asymmetry(&h));
        kawashima.push(kawashima_check(y_eq, n, model, tol.cluster, tol.rank)?);
    }
    let diss = check_dissipativity(y_eq, model, tol.dissipativity)?;
    let kawashima_margin = kawashima.iter().fold(f64::INFINITY, |m, k| m.min(k.margin));
    let verdicts = Verdicts {
        symmetry: symmetry_residual <= tol.symmetry,
        spd: spd.pass,
        dissipativity: diss.pass.unwrap_or(false),
        kawashima: !kawashima.is_empty() && kawashima_margin > tol.rank,
    };
    Ok(StructureReport {
        symmetry_residual,
        min_eig_h0: spd.min_eig,
        kawashima_margin,
        dissipativity_max: diss.max_eig,
        tolerances: *tol,
        verdicts,
        kawashima,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::IdealGas;
    use crate::potentials::E1;
    use crate::state::{PhysicalState, RelaxationParams, SourceMode};

    fn model() -> Model {
        Model::new(IdealGas::default(), RelaxationParams::default()).unwrap()
    }

    fn eq(rho: f64, theta: f64) -> GodunovState {
        model()
            .to_godunov(&PhysicalState::equilibrium(rho, theta))
            .unwrap()
    }

    #[test]
    fn spd_min_eigenvalue_is_the_thermal_block() {
        let c = check_spd(&eq(1.0, 1.0), &model(), 1e-12).unwrap();
        // eigenvalues of [[1, 2.5], [2.5, 8.75]]
        let oracle = (9.75 - (7.75f64 * 7.75 + 25.0).sqrt()) / 2.0;
        assert!(
            (c.min_eig - oracle).abs() < 1e-12,
            "{} vs {oracle}",
            c.min_eig
        );
        assert!(c.pass);
        assert!(check_spd(&eq(1.0, 4.0), &model(), 1e-12).unwrap().pass);
    }

    #[test]
    fn spd_rejects_invalid_state() {
        let y = GodunovState::new(0.0, [0.0; 3], 0.5, [0.0; 5], 0.0, [0.0; 3]);
        assert!(matches!(
            check_spd(&y, &model(), 1e-12),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn kawashima_passes_at_reference_equilibrium() {
        let k = kawashima_check(&eq(1.0, 1.0), &E1, &model(), 1e-8, 1e-8).unwrap();
        assert!(k.pass, "margin {}", k.margin);
        assert_eq!(k.cluster_sizes.iter().sum::<usize>(), STATE_DIM);
    }

    #[test]
    fn kawashima_fails_without_source() {
        let m = model().with_source(SourceMode::Off);
        let k = kawashima_check(&eq(1.0, 1.0), &E1, &m, 1e-8, 1e-8).unwrap();
        assert!(!k.pass);
        assert_eq!(k.margin, 0.0);
    }

    #[test]
    fn kawashima_requires_equilibrium() {
        let y = GodunovState::new(0.0, [0.0; 3], -1.0, [0.0; 5], 0.1, [0.0; 3]);
        let r = kawashima_check(&y, &E1, &model(), 1e-8, 1e-8);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn dissipativity_at_equilibrium() {
        let d = check_dissipativity(&eq(1.0, 1.0), &model(), 1e-12).unwrap();
        assert_eq!(d.max_eig, 0.0);
        assert_eq!(d.pass, Some(true));
        let rp = RelaxationParams {
            eta: 1e12,
            ..Default::default()
        };
        let m = Model::new(IdealGas::default(), rp).unwrap();
        assert_eq!(
            check_dissipativity(&eq(1.0, 1.0), &m, 1e-12).unwrap().pass,
            Some(true)
        );
        let y = GodunovState::new(0.0, [0.0; 3], -1.0, [0.0; 5], 0.1, [0.0; 3]);
        assert_eq!(check_dissipativity(&y, &model(), 1e-12).unwrap().pass, None);
    }

    #[test]
    fn speeds_at_rest_are_symmetric() {
        let s = characteristic_speeds(&eq(1.0, 1.0), &E1, &model()).unwrap();
        for k in 0..STATE_DIM {
            assert!((s[k] + s[STATE_DIM - 1 - k]).abs() < 1e-10, "{s:?}");
        }
    }

    #[test]
    fn clustering_groups_close_values() {
        let c = cluster(&[-1.0, -1.0 + 1e-12, 0.0, 0.5, 0.5], 1e-8);
        assert_eq!(c, vec![0..2, 2..3, 3..5]);
    }

    #[test]
    fn full_report_passes_by_default() {
        let dirs = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let r = verify(&eq(1.0, 1.0), &dirs, &model(), &Tolerances::default()).unwrap();
        assert!(r.all_pass(), "{r:?}");
    }
}
