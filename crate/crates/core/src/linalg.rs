//! Symmetric-definite generalized eigenproblems `A v = λ B v` by Cholesky
//! congruence: with `B = L Lᵀ`, solve the standard problem for
//! `C = L⁻¹ A L⁻ᵀ` and map eigenvectors back with `v = L⁻ᵀ w`.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::potentials::Matrix14;
use crate::state::STATE_DIM;

/// `L⁻¹ A L⁻ᵀ` by two triangular solves, for when `L⁻¹` is not needed.
fn reduce_values(a: &Matrix14, b: &Matrix14) -> Result<Matrix14> {
    let chol = Cholesky::new((b + b.transpose()) * 0.5).ok_or_else(|| {
        Error::Structural("right-hand matrix of the pencil is not positive definite".into())
    })?;
    let l = chol.l();
    let singular = || Error::Numeric("singular Cholesky factor".into());
    let x = l.solve_lower_triangular(a).ok_or_else(singular)?;
    let c = l
        .solve_lower_triangular(&x.transpose())
        .ok_or_else(singular)?;
    Ok((c + c.transpose()) * 0.5)
}

/// Eigenpairs of a symmetric-definite pencil, eigenvalues ascending.
/// The columns of `vectors` are `B`-orthonormal: `Vᵀ B V = 𝕀`.
#[derive(Debug, Clone)]
pub struct PencilEigen {
    pub values: [f64; STATE_DIM],
    pub vectors: Matrix14,
}

fn reduce(a: &Matrix14, b: &Matrix14) -> Result<(Matrix14, Matrix14)> {
    let b_sym = (b + b.transpose()) * 0.5;
    let chol = Cholesky::new(b_sym).ok_or_else(|| {
        Error::Structural("right-hand matrix of the pencil is not positive definite".into())
    })?;
    let l = chol.l();
    let l_inv = l
        .try_inverse()
        .ok_or_else(|| Error::Numeric("singular Cholesky factor".into()))?;
    let c = l_inv * a * l_inv.transpose();
    Ok(((c + c.transpose()) * 0.5, l_inv))
}

pub fn pencil_eigen(a: &Matrix14, b: &Matrix14) -> Result<PencilEigen> {
    let (c, l_inv) = reduce(a, b)?;
    let eig = SymmetricEigen::try_new(c, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numeric("symmetric eigensolver did not converge".into()))?;
    let mut order: [usize; STATE_DIM] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let w = Matrix14::from_fn(|r, c| eig.eigenvectors[(r, order[c])]);
    Ok(PencilEigen {
        values: order.map(|i| eig.eigenvalues[i]),
        vectors: l_inv.transpose() * w,
    })
}

/// Eigenvalues only, ascending.
pub fn pencil_eigenvalues(a: &Matrix14, b: &Matrix14) -> Result<[f64; STATE_DIM]> {
    let c = reduce_values(a, b)?;
    let vals = c.symmetric_eigenvalues();
    let mut out: [f64; STATE_DIM] = std::array::from_fn(|i| vals[i]);
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite pencil eigenvalue".into()));
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// `‖H − Hᵀ‖_F / ‖H‖_F` (zero for the zero matrix).
pub fn asymmetry(h: &Matrix14) -> f64 {
    let n = h.norm();
    if n == 0.0 {
        0.0
    } else {
        (h - h.transpose()).norm() / n
    }
}

/// Orthogonal projector onto the complement of `ker(m)`, with numerical
/// rank decided at `rank_tol` relative to the largest singular value.
pub fn corange_projector(m: &Matrix14, rank_tol: f64) -> Result<Matrix14> {
    let svd = m.svd(false, true);
    let vt = svd
        .v_t
        .ok_or_else(|| Error::Numeric("SVD did not return right singular vectors".into()))?;
    let smax = svd.singular_values.max();
    let mut p = Matrix14::zeros();
    if smax == 0.0 {
        return Ok(p);
    }
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > rank_tol * smax {
            let v = vt.row(k).transpose();
            p += v * v.transpose();
        }
    }
    Ok(p)
}

/// Smallest singular value of a tall matrix, counting missing rank as zero.
pub fn min_singular_value(m: &DMatrix<f64>) -> f64 {
    if m.ncols() == 0 {
        return f64::INFINITY;
    }
    if m.ncols() > m.nrows() {
        return 0.0;
    }
    m.singular_values().min()
}
