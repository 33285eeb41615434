//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{Complex, Matrix3, Vector3};
use rand::Rng;
use rshs::initial::PrimitiveFields;
use rshs::potentials::{source_raw, ConservedVector};
use rshs::solver::{cold_start_guess, conserved_to_godunov, NewtonOptions};
use rshs::*;

pub fn default_model() -> Model {
    Model::new(IdealGas::default(), RelaxationParams::default()).unwrap()
}

pub fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

/// Laboratory state with `ρ, θ ∈ (0.1, 10)` and all other components in `[−1, 1]`.
pub fn random_physical(rng: &mut impl Rng) -> PhysicalState {
    let mut c = || uniform(rng, -1.0, 1.0);
    let u = [c(), c(), c()];
    let sigma_dev = [c(), c(), c(), c(), c()];
    let sigma = c();
    let q = [c(), c(), c()];
    PhysicalState {
        rho: uniform(rng, 0.1, 10.0),
        u,
        theta: uniform(rng, 0.1, 10.0),
        sigma_dev,
        sigma,
        q,
    }
}

/// Smaller dissipative amplitudes and a narrower `(ρ, θ)` window, used where
/// finite differences of exponentials need a moderate dynamic range.
pub fn random_moderate(rng: &mut impl Rng) -> PhysicalState {
    let mut p = random_physical(rng);
    p.rho = uniform(rng, 0.3, 3.0);
    p.theta = uniform(rng, 0.3, 3.0);
    p
}

pub fn random_unit(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v = [
            uniform(rng, -1.0, 1.0),
            uniform(rng, -1.0, 1.0),
            uniform(rng, -1.0, 1.0),
        ];
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            return v.map(|c| c / n);
        }
    }
}

pub fn rel_err(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(f64::MIN_POSITIVE)
}

/// Central difference gradient of a scalar function of the main field.
pub fn fd_gradient(f: impl Fn(&[f64; 14]) -> f64, y: &[f64; 14], h: f64) -> [f64; 14] {
    std::array::from_fn(|k| {
        let step = h * y[k].abs().max(1.0);
        let (mut a, mut b) = (*y, *y);
        a[k] += step;
        b[k] -= step;
        (f(&a) - f(&b)) / (2.0 * step)
    })
}

/// Second-order central differences for the Hessian of a scalar function.
pub fn fd_hessian(f: impl Fn(&[f64; 14]) -> f64, y: &[f64; 14], h: f64) -> [[f64; 14]; 14] {
    let steps: [f64; 14] = std::array::from_fn(|k| h * y[k].abs().max(1.0));
    let eval = |i: usize, si: f64, j: usize, sj: f64| {
        let mut z = *y;
        z[i] += si;
        z[j] += sj;
        f(&z)
    };
    let mut out = [[0.0; 14]; 14];
    for i in 0..14 {
        for j in i..14 {
            let (hi, hj) = (steps[i], steps[j]);
            let v = if i == j {
                (eval(i, hi, i, 0.0) - 2.0 * f(y) + eval(i, -hi, i, 0.0)) / (hi * hi)
            } else {
                (eval(i, hi, j, hj) - eval(i, hi, j, -hj) - eval(i, -hi, j, hj)
                    + eval(i, -hi, j, -hj))
                    / (4.0 * hi * hj)
            };
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}

/// Exact per-cell relaxation `dU/dt = I(Υ(U))` integrated by classical RK4
/// with a full Newton inversion at every stage; no structural shortcut.
pub fn relaxation_ode_oracle(
    u0: &ConservedVector,
    model: &Model,
    t: f64,
    steps: usize,
) -> ConservedVector {
    let opts = NewtonOptions::default();
    let rhs = |u: &ConservedVector| -> ConservedVector {
        let guess = cold_start_guess(u, model).unwrap();
        let y = conserved_to_godunov(u, &guess, model, &opts).unwrap();
        source_raw(&y.0, model)
    };
    let h = t / steps as f64;
    let mut u = *u0;
    let axpy = |u: &ConservedVector, k: &ConservedVector, a: f64| -> ConservedVector {
        std::array::from_fn(|i| u[i] + a * k[i])
    };
    for _ in 0..steps {
        let k1 = rhs(&u);
        let k2 = rhs(&axpy(&u, &k1, 0.5 * h));
        let k3 = rhs(&axpy(&u, &k2, 0.5 * h));
        let k4 = rhs(&axpy(&u, &k3, h));
        for i in 0..14 {
            u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    u
}

/// Linearized 1D NSF about `(ρ₀, 0, θ₀)` for a mode `e^{ikx + λt}`.
///
/// With `û = iŵ` the symbol is real:
/// ```text
/// λρ̂ =  kρ₀ŵ
/// λŵ = −kRθ₀/ρ₀ ρ̂ − μk²/ρ₀ ŵ − kR θ̂
/// λθ̂ =  kp₀/(ρ₀c_v) ŵ − κk²/(ρ₀c_v) θ̂
/// ```
pub fn nsf_symbol(
    k: f64,
    rho0: f64,
    theta0: f64,
    eos: &IdealGas,
    mu: f64,
    kappa: f64,
) -> Matrix3<f64> {
    let r = eos.gas_const;
    let cv = eos.cv();
    let p0 = rho0 * r * theta0;
    Matrix3::new(
        0.0,
        k * rho0,
        0.0,
        -k * r * theta0 / rho0,
        -mu * k * k / rho0,
        -k * r,
        0.0,
        k * p0 / (rho0 * cv),
        -kappa * k * k / (rho0 * cv),
    )
}

pub fn nsf_eigenvalues(sym: &Matrix3<f64>) -> [Complex<f64>; 3] {
    let ev = sym.complex_eigenvalues();
    [ev[0], ev[1], ev[2]]
}

/// The purely decaying (thermal) mode: its real eigenvalue and real
/// eigenvector `(ρ̂, ŵ, θ̂)`, normalized so that `θ̂ = 1`.
pub fn nsf_thermal_mode(sym: &Matrix3<f64>) -> (f64, Vector3<f64>) {
    let ev = nsf_eigenvalues(sym);
    let lam = ev
        .iter()
        .filter(|l| l.im.abs() < 1e-12 * l.norm().max(1.0))
        .map(|l| l.re)
        .next()
        .expect("a real eigenvalue");
    let m = sym - Matrix3::identity() * lam;
    // null vector from the cross product of two rows
    let r0 = Vector3::new(m[(0, 0)], m[(0, 1)], m[(0, 2)]);
    let r2 = Vector3::new(m[(2, 0)], m[(2, 1)], m[(2, 2)]);
    let v = r0.cross(&r2);
    (lam, v / v[2])
}

/// Discrete Fourier cosine/sine coefficients of a periodic field at wavenumber `k`.
pub fn fourier_coeff(f: &[f64], xs: &[f64], k: f64) -> (f64, f64) {
    let n = f.len() as f64;
    let c = 2.0 / n
        * f.iter()
            .zip(xs)
            .map(|(v, x)| v * (k * x).cos())
            .sum::<f64>();
    let s = 2.0 / n
        * f.iter()
            .zip(xs)
            .map(|(v, x)| v * (k * x).sin())
            .sum::<f64>();
    (c, s)
}

/// Relative error of the measured thermal-mode decay rate against the
/// eigenvalue of the linearized symbol.
pub fn thermal_mode_error(n: usize, limiter: Limiter, coeff: f64) -> (f64, f64, f64) {
    let rp = RelaxationParams {
        eta: coeff,
        zeta: coeff,
        chi: coeff,
        ..Default::default()
    };
    let grid = Grid1D::new(n, 0.0, 1.0).unwrap();
    let s = NsfSolver::new(IdealGas::default(), rp, grid, limiter, 0.5).unwrap();
    let k = std::f64::consts::TAU;
    let sym = nsf_symbol(k, 1.0, 1.0, &s.eos, rp.effective_viscosity(), rp.chi);
    let (lam, v) = nsf_thermal_mode(&sym);
    assert!(lam < 0.0);
    let amp = 1e-4;
    let xs = s.grid.centers();
    let prim = PrimitiveFields {
        rho: xs
            .iter()
            .map(|x| 1.0 + amp * v[0] * (k * x).cos())
            .collect(),
        u: xs
            .iter()
            .map(|x| [-amp * v[1] * (k * x).sin(), 0.0, 0.0])
            .collect(),
        theta: xs
            .iter()
            .map(|x| 1.0 + amp * v[2] * (k * x).cos())
            .collect(),
    };
    let mut f = NsfField::from_primitive(&prim, s.grid, &s.eos).unwrap();
    let t_end = 1.0 / lam.abs();
    let traj = s.run(&mut f, t_end, Some(t_end / 20.0)).unwrap();
    let amp_at = |snap: &Snapshot| {
        let th: Vec<f64> = snap.cells.iter().map(|c| c.theta - 1.0).collect();
        fourier_coeff(&th, &xs, k).0
    };
    let a0 = amp_at(&traj.snapshots[0]);
    let a1 = amp_at(traj.snapshots.last().unwrap());
    let measured = -(a1 / a0).ln() / t_end;
    ((measured - (-lam)).abs() / lam.abs(), measured, -lam)
}
