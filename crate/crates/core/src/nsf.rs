//! Reference 1D compressible Navier–Stokes–Fourier solver for the ideal gas.
//!
//! Setting the relaxation moduli to zero in the `Σ̃`, `σ̃`, `q̃` rows of the
//! relaxation system leaves the algebraic balance "flux gradient = source".
//! At rest-frame order in planar symmetry the rows read
//!
//! ```text
//! θ ∂ₓu₁ · B₀₀ = −θ s₀/(2η)   ⇒ Σ₁₁ = −(4/3) η ∂ₓu₁
//! θ ∂ₓu₁       = −θσ̃/(3ζ)     ⇒ σ   = −3ζ ∂ₓu₁
//! θ² ∂ₓθ̃      = −θ² q̃₁/χ     ⇒ q₁  = −χ ∂ₓθ
//! ```
//!
//! (the shear row projects the 1D velocity gradient onto the first
//! deviatoric basis element, `B₀₀ = 2/√6`). The momentum flux therefore
//! carries `Σ₁₁ + σ = −μ ∂ₓu₁` with `μ = (4/3)η + 3ζ` and the energy flux
//! carries `(Σ₁₁ + σ)u₁ + q₁`, with conductivity `κ = χ`.

use rayon::prelude::*;
use serde::Serialize;

use crate::eos::IdealGas;
use crate::error::{Error, Result};
use crate::grid::{Grid1D, Snapshot};
use crate::initial::{prepared_states, PrimitiveFields};
use crate::limiter::Limiter;
use crate::solver::validate_cfl;
use crate::state::RelaxationParams;

/// `(ρ, ρu, E)` per cell, `E = ρc_vθ + ½ρu²`.
pub type NsfCell = [f64; 3];

/// Transport coefficients of the relaxation limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NsfCoefficients {
    pub eta: f64,
    pub zeta: f64,
    pub chi: f64,
    /// `(4/3)η + 3ζ`
    pub mu_eff: f64,
    /// `χ`
    pub kappa: f64,
}

impl NsfCoefficients {
    pub fn from_relax(rp: &RelaxationParams) -> Self {
        Self {
            eta: rp.eta,
            zeta: rp.zeta,
            chi: rp.chi,
            mu_eff: rp.effective_viscosity(),
            kappa: rp.chi,
        }
    }
}

/// `(Σ₁₁, σ, q₁)` from velocity and temperature by centred differences.
pub fn nsf_closure(
    u: &[f64],
    theta: &[f64],
    rp: &RelaxationParams,
    grid: &Grid1D,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let du = grid.centered_derivative(u);
    let dth = grid.centered_derivative(theta);
    (
        du.iter().map(|d| -4.0 / 3.0 * rp.eta * d).collect(),
        du.iter().map(|d| -3.0 * rp.zeta * d).collect(),
        dth.iter().map(|d| -rp.chi * d).collect(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct NsfField {
    pub grid: Grid1D,
    pub cells: Vec<NsfCell>,
}

impl NsfField {
    pub fn from_primitive(prim: &PrimitiveFields, grid: Grid1D, eos: &IdealGas) -> Result<Self> {
        let n = grid.n_cells;
        if prim.rho.len() != n || prim.u.len() != n || prim.theta.len() != n {
            return Err(Error::Config(
                "primitive fields do not match the grid".into(),
            ));
        }
        let cv = eos.cv();
        let cells = (0..n)
            .map(|i| {
                let (r, u, t) = (prim.rho[i], prim.u[i][0], prim.theta[i]);
                [r, r * u, r * cv * t + 0.5 * r * u * u]
            })
            .collect();
        Ok(Self { grid, cells })
    }

    pub fn primitive(&self, eos: &IdealGas) -> PrimitiveFields {
        let cv = eos.cv();
        let mut prim = PrimitiveFields {
            rho: Vec::with_capacity(self.cells.len()),
            u: Vec::with_capacity(self.cells.len()),
            theta: Vec::with_capacity(self.cells.len()),
        };
        for c in &self.cells {
            let u = c[1] / c[0];
            prim.rho.push(c[0]);
            prim.u.push([u, 0.0, 0.0]);
            prim.theta.push((c[2] / c[0] - 0.5 * u * u) / cv);
        }
        prim
    }

    /// Laboratory fields with the dissipative columns from [`nsf_closure`].
    pub fn snapshot(&self, time: f64, eos: &IdealGas, rp: &RelaxationParams) -> Snapshot {
        Snapshot {
            time,
            cells: prepared_states(&self.primitive(eos), &self.grid, rp),
        }
    }

    pub fn totals(&self) -> [f64; 3] {
        let dx = self.grid.dx();
        let mut t = [0.0; 3];
        for c in &self.cells {
            for k in 0..3 {
                t[k] += c[k];
            }
        }
        t.map(|v| v * dx)
    }

    /// `∫ρs dx` with `s = c_v ln θ − R ln ρ`.
    pub fn total_entropy(&self, eos: &IdealGas) -> f64 {
        let p = self.primitive(eos);
        self.grid.dx()
            * p.rho
                .iter()
                .zip(&p.theta)
                .map(|(r, t)| r * (eos.cv() * t.ln() - eos.gas_const * r.ln()))
                .sum::<f64>()
    }
}

#[derive(Debug, Clone)]
pub struct NsfSolver {
    pub eos: IdealGas,
    pub relax: RelaxationParams,
    pub coeffs: NsfCoefficients,
    pub grid: Grid1D,
    pub limiter: Limiter,
    pub cfl: f64,
}

#[derive(Debug, Clone)]
pub struct NsfTrajectory {
    pub snapshots: Vec<Snapshot>,
    pub steps: usize,
    /// `(t, ∫ρs)` at every recorded snapshot.
    pub entropy: Vec<(f64, f64)>,
}

impl NsfSolver {
    pub fn new(
        eos: IdealGas,
        relax: RelaxationParams,
        grid: Grid1D,
        limiter: Limiter,
        cfl: f64,
    ) -> Result<Self> {
        eos.validate()?;
        relax.validate()?;
        grid.validate()?;
        validate_cfl(cfl)?;
        Ok(Self {
            eos,
            relax,
            coeffs: NsfCoefficients::from_relax(&relax),
            grid,
            limiter,
            cfl,
        })
    }

    fn primitive_checked(&self, cells: &[NsfCell]) -> Result<Vec<[f64; 3]>> {
        let cv = self.eos.cv();
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let u = c[1] / c[0];
                let th = (c[2] / c[0] - 0.5 * u * u) / cv;
                if c[0] > 0.0 && th > 0.0 && th.is_finite() {
                    Ok([c[0], u, th])
                } else {
                    Err(Error::Numeric(format!(
                        "positivity lost in cell {i}: rho = {}, theta = {th}",
                        c[0]
                    )))
                }
            })
            .collect()
    }

    /// Stable step: hyperbolic and parabolic limits.
    pub fn stable_dt(&self, field: &NsfField) -> Result<f64> {
        let prim = self.primitive_checked(&field.cells)?;
        let dx = self.grid.dx();
        let cv = self.eos.cv();
        let (mut smax, mut nu) = (0.0f64, 0.0f64);
        for [r, u, th] in prim {
            smax = smax.max(u.abs() + self.eos.sound_speed(th));
            nu = nu
                .max(self.coeffs.mu_eff / r)
                .max(self.coeffs.kappa / (r * cv));
        }
        let hyp = self.cfl * dx / smax;
        let par = if nu > 0.0 {
            self.cfl * 0.5 * dx * dx / nu
        } else {
            f64::INFINITY
        };
        Ok(hyp.min(par))
    }

    /// `−∂ₓF` by MUSCL–Rusanov inviscid fluxes and centred viscous fluxes.
    fn rate(&self, cells: &[NsfCell]) -> Result<Vec<NsfCell>> {
        let g = &self.grid;
        let n = g.n_cells;
        let prim = self.primitive_checked(cells)?;
        let (gamma, r_gas, cv) = (self.eos.gamma, self.eos.gas_const, self.eos.cv());
        let lim = self.limiter;
        let slopes: Vec<[f64; 3]> = (0..n)
            .map(|i| {
                let (a, b, c) = (&prim[g.left(i)], &prim[i], &prim[g.right(i)]);
                std::array::from_fn(|k| lim.slope(b[k] - a[k], c[k] - b[k]))
            })
            .collect();
        let euler = |w: [f64; 3]| -> ([f64; 3], [f64; 3], f64) {
            let [r, u, th] = w;
            let p = r * r_gas * th;
            let e = r * cv * th + 0.5 * r * u * u;
            (
                [r, r * u, e],
                [r * u, r * u * u + p, (e + p) * u],
                u.abs() + (gamma * r_gas * th).sqrt(),
            )
        };
        let inv_dx = 1.0 / g.dx();
        let (mu, kappa) = (self.coeffs.mu_eff, self.coeffs.kappa);
        let faces: Vec<[f64; 3]> = (0..n)
            .into_par_iter()
            .map(|k| {
                let r = g.right(k);
                let wl: [f64; 3] = std::array::from_fn(|c| prim[k][c] + 0.5 * slopes[k][c]);
                let wr: [f64; 3] = std::array::from_fn(|c| prim[r][c] - 0.5 * slopes[r][c]);
                let (ul, fl, sl) = euler(wl);
                let (ur, fr, sr) = euler(wr);
                let s = sl.max(sr);
                let tau = mu * (prim[r][1] - prim[k][1]) * inv_dx;
                let q = -kappa * (prim[r][2] - prim[k][2]) * inv_dx;
                let u_face = 0.5 * (prim[r][1] + prim[k][1]);
                let mut f: [f64; 3] =
                    std::array::from_fn(|c| 0.5 * (fl[c] + fr[c]) - 0.5 * s * (ur[c] - ul[c]));
                f[1] -= tau;
                f[2] += q - tau * u_face;
                f
            })
            .collect();
        Ok((0..n)
            .map(|i| {
                let (fr, fl) = (&faces[i], &faces[g.left(i)]);
                std::array::from_fn(|c| -(fr[c] - fl[c]) * inv_dx)
            })
            .collect())
    }

    /// One SSP-RK2 step.
    pub fn step(&self, field: &mut NsfField, dt: f64) -> Result<()> {
        let l0 = self.rate(&field.cells)?;
        let stage: Vec<NsfCell> = field
            .cells
            .iter()
            .zip(&l0)
            .map(|(c, l)| std::array::from_fn(|k| c[k] + dt * l[k]))
            .collect();
        let l1 = self.rate(&stage)?;
        for ((c, s), l) in field.cells.iter_mut().zip(&stage).zip(&l1) {
            for k in 0..3 {
                c[k] = 0.5 * c[k] + 0.5 * (s[k] + dt * l[k]);
            }
        }
        self.primitive_checked(&field.cells)?;
        Ok(())
    }

    pub fn run(
        &self,
        field: &mut NsfField,
        t_end: f64,
        every: Option<f64>,
    ) -> Result<NsfTrajectory> {
        if !(t_end > 0.0) {
            return Err(Error::Config(format!(
                "t_end must be positive, got {t_end}"
            )));
        }
        let every = every.filter(|e| *e > 0.0 && *e < t_end).unwrap_or(t_end);
        let eps_t = 1e-12 * t_end;
        let (mut t, mut next_out) = (0.0, every);
        let mut traj = NsfTrajectory {
            snapshots: vec![field.snapshot(0.0, &self.eos, &self.relax)],
            steps: 0,
            entropy: vec![(0.0, field.total_entropy(&self.eos))],
        };
        while t < t_end - eps_t {
            let abort = |e: Error| Error::Abort {
                time: t,
                reason: e.to_string(),
            };
            let dt = self
                .stable_dt(field)
                .map_err(abort)?
                .min(next_out - t)
                .min(t_end - t);
            self.step(field, dt).map_err(abort)?;
            traj.steps += 1;
            t += dt;
            if t >= next_out - eps_t {
                let time = if (t_end - t).abs() <= eps_t {
                    t_end
                } else {
                    next_out
                };
                traj.snapshots
                    .push(field.snapshot(time, &self.eos, &self.relax));
                traj.entropy.push((time, field.total_entropy(&self.eos)));
                next_out = (next_out + every).min(t_end);
            }
        }
        Ok(traj)
    }
}
