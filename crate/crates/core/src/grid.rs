//! Uniform periodic 1D grid and snapshot output shared by both solvers.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{dev_11, PhysicalState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid1D {
    #[serde(rename = "n")]
    pub n_cells: usize,
    #[serde(rename = "xmin")]
    pub x_min: f64,
    #[serde(rename = "xmax")]
    pub x_max: f64,
}

impl Default for Grid1D {
    fn default() -> Self {
        Self {
            n_cells: 200,
            x_min: 0.0,
            x_max: 1.0,
        }
    }
}

impl Grid1D {
    pub fn new(n_cells: usize, x_min: f64, x_max: f64) -> Result<Self> {
        let g = Self {
            n_cells,
            x_min,
            x_max,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cells <= 3 {
            return Err(Error::Config(format!(
                "grid needs more than 3 cells, got {}",
                self.n_cells
            )));
        }
        if !(self.x_max > self.x_min) || !self.x_min.is_finite() || !self.x_max.is_finite() {
            return Err(Error::Config(format!(
                "invalid grid extent [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n_cells as f64
    }

    /// Cell-centre coordinate.
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.x(i)).collect()
    }

    #[inline]
    pub fn left(&self, i: usize) -> usize {
        if i == 0 {
            self.n_cells - 1
        } else {
            i - 1
        }
    }

    #[inline]
    pub fn right(&self, i: usize) -> usize {
        if i + 1 == self.n_cells {
            0
        } else {
            i + 1
        }
    }

    /// Second-order centred difference of a periodic cell field.
    pub fn centered_derivative(&self, f: &[f64]) -> Vec<f64> {
        let inv = 0.5 / self.dx();
        (0..self.n_cells)
            .map(|i| (f[self.right(i)] - f[self.left(i)]) * inv)
            .collect()
    }

    /// Discrete L² norm `(dx Σ fᵢ²)^½`.
    pub fn l2(&self, f: impl IntoIterator<Item = f64>) -> f64 {
        (self.dx() * f.into_iter().map(|v| v * v).sum::<f64>()).sqrt()
    }
}

/// Laboratory fields at one output time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub cells: Vec<PhysicalState>,
}

impl Snapshot {
    pub const CSV_HEADER: &'static str = "x,rho,u1,theta,Sigma11,sigma,q1";

    pub fn column(&self, f: impl Fn(&PhysicalState) -> f64) -> Vec<f64> {
        self.cells.iter().map(f).collect()
    }

    pub fn to_csv(&self, grid: &Grid1D) -> String {
        let mut out = String::with_capacity(64 * (self.cells.len() + 1));
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for (i, c) in self.cells.iter().enumerate() {
            // `+ 0.0` turns negative zeros into zeros
            let row = [
                grid.x(i),
                c.rho,
                c.u[0],
                c.theta,
                dev_11(&c.sigma_dev),
                c.sigma,
                c.q[0],
            ]
            .map(|v| format!("{:.17e}", v + 0.0));
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}
