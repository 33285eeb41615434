//! Godunov–Boillat potentials `X⁰`, `Xʲ`, their gradients (conserved
//! densities and fluxes), their Hessians (symmetrizers) and the relaxation
//! source with its Jacobian.
//!
//! Gradients are closed-form and generic over [`Scalar`]; Hessians are
//! obtained by pushing dual numbers through the gradients.

use nalgebra::SMatrix;

use crate::dual::{self, Dual, Scalar};
use crate::eos::Eos;
use crate::error::{Error, Result};
use crate::state::{idx, DevTensorBasis, GodunovState, Model, SourceMode, STATE_DIM};

pub type Matrix14 = SMatrix<f64, STATE_DIM, STATE_DIM>;

/// `∇X⁰`: `[ρ, ρu, ρe + ½ρ|u|², τ₁ρΣ/θ, τ₂ρσ/θ, τ₀ρq/θ²]`.
pub type ConservedVector = [f64; STATE_DIM];

/// Row `j` holds `∇Xʲ`, the flux of the conserved vector in direction `eⱼ`.
pub type FluxTable = [[f64; STATE_DIM]; 3];

pub type SourceVector = [f64; STATE_DIM];

pub const E1: [f64; 3] = [1.0, 0.0, 0.0];

struct Fields<S> {
    theta: S,
    u_t: [S; 3],
    dev_t: [S; 5],
    bulk_t: S,
    q_t: [S; 3],
    /// `(p, p_ψ, p_θ)` at the extended potential.
    p: [S; 3],
}

fn fields<S: Scalar, E: Eos>(y: &[S; STATE_DIM], model: &Model<E>) -> Fields<S> {
    let rp = &model.relax;
    let theta = S::cst(-1.0) / y[idx::THETA];
    let u_t = [y[1], y[2], y[3]];
    let dev_t = [y[5], y[6], y[7], y[8], y[9]];
    let bulk_t = y[idx::BULK];
    let q_t = [y[11], y[12], y[13]];
    let psi = y[idx::PSI]
        + theta * sq(&u_t) * 0.5
        + sq(&dev_t) * (0.5 * rp.tau1())
        + bulk_t * bulk_t * (0.5 * rp.tau2())
        + sq(&q_t) * (0.5 * rp.tau0());
    Fields {
        theta,
        u_t,
        dev_t,
        bulk_t,
        q_t,
        p: model.eos.eval(theta, psi),
    }
}

#[inline]
fn sq<S: Scalar>(v: &[S]) -> S {
    v.iter().fold(S::cst(0.0), |acc, &c| acc + c * c)
}

#[inline]
fn dot<S: Scalar>(a: &[S; 3], n: &[f64; 3]) -> S {
    a[0] * n[0] + a[1] * n[1] + a[2] * n[2]
}

/// `∇_Υ X⁰` for any scalar type. Assumes `θ̃ < 0`.
pub fn grad_x0_generic<S: Scalar, E: Eos>(y: &[S; STATE_DIM], model: &Model<E>) -> [S; STATE_DIM] {
    let rp = &model.relax;
    let f = fields(y, model);
    let [p, p_psi, p_theta] = f.p;
    let rho = p_psi / f.theta;
    let mut g = [S::cst(0.0); STATE_DIM];
    g[idx::PSI] = rho;
    for a in 0..3 {
        g[1 + a] = p_psi * f.u_t[a];
    }
    g[idx::THETA] = f.theta * p_theta - p + f.theta * p_psi * sq(&f.u_t) * 0.5;
    for m in 0..5 {
        g[5 + m] = rho * f.dev_t[m] * rp.tau1();
    }
    g[idx::BULK] = rho * f.bulk_t * rp.tau2();
    for a in 0..3 {
        g[11 + a] = rho * f.q_t[a] * rp.tau0();
    }
    g
}

/// `∇_Υ (n·X)` for a direction `n`. Assumes `θ̃ < 0`.
pub fn grad_xdir_generic<S: Scalar, E: Eos>(
    y: &[S; STATE_DIM],
    n: &[f64; 3],
    model: &Model<E>,
) -> [S; STATE_DIM] {
    let rp = &model.relax;
    let f = fields(y, model);
    let [p, p_psi, p_theta] = f.p;
    let theta = f.theta;
    let un = dot(&f.u_t, n);
    // w = Σ̃ n
    let w: [S; 3] = std::array::from_fn(|a| {
        let mut acc = S::cst(0.0);
        for m in 0..5 {
            let bn: f64 = (0..3).map(|b| DevTensorBasis::entry(m, a, b) * n[b]).sum();
            if bn != 0.0 {
                acc = acc + f.dev_t[m] * bn;
            }
        }
        acc
    });
    let uw = f.u_t[0] * w[0] + f.u_t[1] * w[1] + f.u_t[2] * w[2];
    let qn = dot(&f.q_t, n);

    let mut g = [S::cst(0.0); STATE_DIM];
    g[idx::PSI] = p_psi * un;
    for a in 0..3 {
        g[1 + a] = p_psi * theta * f.u_t[a] * un + (p + theta * f.bulk_t) * n[a] + theta * w[a];
    }
    g[idx::THETA] =
        theta * theta * ((p_theta + p_psi * sq(&f.u_t) * 0.5 + f.bulk_t) * un + uw + qn);
    for m in 0..5 {
        let mut ubn = S::cst(0.0);
        for a in 0..3 {
            let bn: f64 = (0..3).map(|b| DevTensorBasis::entry(m, a, b) * n[b]).sum();
            if bn != 0.0 {
                ubn = ubn + f.u_t[a] * bn;
            }
        }
        g[5 + m] = p_psi * f.dev_t[m] * un * rp.tau1() + theta * ubn;
    }
    g[idx::BULK] = p_psi * f.bulk_t * un * rp.tau2() + theta * un;
    for a in 0..3 {
        g[11 + a] = p_psi * f.q_t[a] * un * rp.tau0() + theta * n[a];
    }
    g
}

fn checked<E: Eos>(y: &GodunovState, model: &Model<E>) -> Result<()> {
    y.validate()?;
    let psi = model.extended_psi(y);
    model.eos.pressure(y.theta(), psi)?;
    Ok(())
}

fn finite<const N: usize>(v: [f64; N], what: &str) -> Result<[f64; N]> {
    if v.iter().all(|c| c.is_finite()) {
        Ok(v)
    } else {
        Err(Error::Domain(format!("{what} is not finite")))
    }
}

/// `X⁰ = p/θ`.
pub fn x0<E: Eos>(y: &GodunovState, model: &Model<E>) -> Result<f64> {
    checked(y, model)?;
    let p = model.eos.pressure(y.theta(), model.extended_psi(y))?;
    Ok(p / y.theta())
}

/// `Xʲ = ((p𝕀 + θ(Σ̃ + σ̃𝕀)) ũ)ⱼ + θ q̃ⱼ`, `j = 1, 2, 3`.
pub fn xj<E: Eos>(y: &GodunovState, model: &Model<E>) -> Result<[f64; 3]> {
    checked(y, model)?;
    let theta = y.theta();
    let p = model.eos.pressure(theta, model.extended_psi(y))?;
    let u_t = nalgebra::Vector3::from(y.u_t());
    let dev = crate::state::unpack_dev(&y.sigma_dev_t());
    let m = nalgebra::Matrix3::identity() * (p + theta * y.sigma_bulk_t()) + dev * theta;
    let v = m * u_t;
    let q = y.q_t();
    Ok(std::array::from_fn(|j| v[j] + theta * q[j]))
}

pub fn grad_x0<E: Eos>(y: &GodunovState, model: &Model<E>) -> Result<ConservedVector> {
    checked(y, model)?;
    finite(grad_x0_generic(&y.0, model), "conserved vector")
}

pub fn grad_xj<E: Eos>(y: &GodunovState, model: &Model<E>) -> Result<FluxTable> {
    checked(y, model)?;
    let mut table = [[0.0; STATE_DIM]; 3];
    for (j, row) in table.iter_mut().enumerate() {
        let mut n = [0.0; 3];
        n[j] = 1.0;
        *row = finite(grad_xdir_generic(&y.0, &n, model), "flux")?;
    }
    Ok(table)
}

/// Hessian of `X⁰`, unchecked.
pub fn hess_x0_raw<E: Eos>(y: &[f64; STATE_DIM], model: &Model<E>) -> Matrix14 {
    let jac = dual::jacobian(y, |v: &[Dual; STATE_DIM]| grad_x0_generic(v, model));
    Matrix14::from_fn(|i, j| jac[i][j])
}

/// Hessian of `n·X`, unchecked.
pub fn hess_xdir_raw<E: Eos>(y: &[f64; STATE_DIM], n: &[f64; 3], model: &Model<E>) -> Matrix14 {
    let jac = dual::jacobian(y, |v: &[Dual; STATE_DIM]| grad_xdir_generic(v, n, model));
    Matrix14::from_fn(|i, j| jac[i][j])
}

pub fn hess_x0<E: Eos>(y: &GodunovState, model: &Model<E>) -> Result<Matrix14> {
    checked(y, model)?;
    Ok(hess_x0_raw(&y.0, model))
}

/// Hessian of `n·X` for a unit direction `n`.
pub fn hess_x_dir<E: Eos>(y: &GodunovState, n: &[f64; 3], model: &Model<E>) -> Result<Matrix14> {
    checked(y, model)?;
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Validation(format!(
            "direction must be a unit vector, |n| = {norm}"
        )));
    }
    Ok(hess_xdir_raw(&y.0, n, model))
}

/// Relaxation source `I(Υ)`: zero on the balance rows,
/// `−Σ/(2η)`, `−σ/(3ζ)`, `−q/χ` on the dissipative rows.
pub fn source_raw<E: Eos>(y: &[f64; STATE_DIM], model: &Model<E>) -> SourceVector {
    let mut s = [0.0; STATE_DIM];
    if model.source == SourceMode::Off {
        return s;
    }
    let rp = &model.relax;
    let theta = -1.0 / y[idx::THETA];
    for k in idx::DEV {
        s[k] = -theta * y[k] / (2.0 * rp.eta);
    }
    s[idx::BULK] = -theta * y[idx::BULK] / (3.0 * rp.zeta);
    for k in idx::Q {
        s[k] = -theta * theta * y[k] / rp.chi;
    }
    s
}

pub fn source<E: Eos>(y: &GodunovState, model: &Model<E>) -> Result<SourceVector> {
    y.validate()?;
    Ok(source_raw(&y.0, model))
}

/// Exact Jacobian `∂I/∂Υ`, including the `θ̃` column away from equilibrium.
pub fn source_jacobian<E: Eos>(y: &GodunovState, model: &Model<E>) -> Result<Matrix14> {
    y.validate()?;
    let mut jac = Matrix14::zeros();
    if model.source == SourceMode::Off {
        return Ok(jac);
    }
    let rp = &model.relax;
    let theta = y.theta();
    let t2 = theta * theta;
    // ∂θ/∂θ̃ = θ²
    for k in idx::DEV {
        jac[(k, k)] = -theta / (2.0 * rp.eta);
        jac[(k, idx::THETA)] = -t2 * y.0[k] / (2.0 * rp.eta);
    }
    let b = idx::BULK;
    jac[(b, b)] = -theta / (3.0 * rp.zeta);
    jac[(b, idx::THETA)] = -t2 * y.0[b] / (3.0 * rp.zeta);
    for k in idx::Q {
        jac[(k, k)] = -t2 / rp.chi;
        jac[(k, idx::THETA)] = -2.0 * t2 * theta * y.0[k] / rp.chi;
    }
    Ok(jac)
}

/// `Υ·I(Υ) = −θΣ̃:Σ̃/(2η) − θσ̃²/(3ζ) − θ²|q̃|²/χ`, never positive.
pub fn entropy_production_raw<E: Eos>(y: &[f64; STATE_DIM], model: &Model<E>) -> f64 {
    let s = source_raw(y, model);
    idx::DISSIPATIVE.map(|k| y[k] * s[k]).sum()
}
