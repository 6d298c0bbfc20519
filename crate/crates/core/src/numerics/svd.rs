//! One-sided (Hestenes) Jacobi SVD. Small singular values come out with high
//! relative accuracy, which is what the rank and kernel decisions rely on.

use num_complex::Complex64;

use super::eigen::{fix_column_phases, Rotation};
use super::matrix::{ComplexMatrix, ZERO};
use super::ToleranceConfig;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// A = U · diag(σ) · V*, σ descending. `u` is m×n with zero columns where σ = 0;
/// `v` is n×n unitary.
#[derive(Debug, Clone)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn max_singular_value(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    fn cutoff(&self, tol: &ToleranceConfig) -> f64 {
        tol.rel_rank_tol * self.max_singular_value()
    }

    pub fn rank(&self, tol: &ToleranceConfig) -> usize {
        let cutoff = self.cutoff(tol);
        self.singular_values.iter().filter(|&&s| s > cutoff && s > 0.0).count()
    }
}

fn column_dot(a: &ComplexMatrix, p: usize, q: usize) -> Complex64 {
    (0..a.rows()).map(|k| a[(k, p)].conj() * a[(k, q)]).sum()
}

fn column_norm_sqr(a: &ComplexMatrix, p: usize) -> f64 {
    (0..a.rows()).map(|k| a[(k, p)].norm_sqr()).sum()
}

pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    let n = a.cols();
    let mut w = a.clone();
    let mut v = ComplexMatrix::identity(n);
    // Columns below this norm are numerically zero; leaving them alone
    // guarantees termination for wide matrices.
    let floor = f64::EPSILON * a.frobenius_norm();
    let mut sweeps = 0;
    loop {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = column_norm_sqr(&w, p);
                let beta = column_norm_sqr(&w, q);
                if alpha.sqrt() <= floor || beta.sqrt() <= floor {
                    continue;
                }
                let gamma = column_dot(&w, p, q);
                if gamma == ZERO || gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                let rot = Rotation::new(alpha, beta, gamma);
                rot.apply_right(&mut w, p, q);
                rot.apply_right(&mut v, p, q);
                rotated = true;
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n).map(|j| column_norm_sqr(&w, j).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let singular_values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let u = ComplexMatrix::from_fn(a.rows(), n, |i, j| {
        let s = norms[order[j]];
        if s > 0.0 {
            w[(i, order[j])] / s
        } else {
            ZERO
        }
    });
    let v = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(Svd {
        singular_values,
        u,
        v,
    })
}

/// Number of singular values exceeding rel_rank_tol·σ_max (0 for a zero matrix).
pub fn rank_tol(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<usize> {
    Ok(svd(m)?.rank(tol))
}

/// Orthonormal basis of the numerical kernel {x : Lx ≈ 0}.
pub fn kernel_basis(l: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Vec<Vec<Complex64>>> {
    let dec = svd(l)?;
    let r = dec.rank(tol);
    let n = l.cols();
    let mut basis = dec.v.submatrix(0, r, n, n - r);
    fix_column_phases(&mut basis, tol.rel_rank_tol);
    Ok((0..basis.cols()).map(|j| basis.col(j)).collect())
}

/// Orthonormal basis of the numerical column space of M.
pub fn range_basis(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Vec<Vec<Complex64>>> {
    let dec = svd(m)?;
    let r = dec.rank(tol);
    let mut basis = dec.u.submatrix(0, 0, m.rows(), r);
    fix_column_phases(&mut basis, tol.rel_rank_tol);
    Ok((0..r).map(|j| basis.col(j)).collect())
}
