//! Hermitian eigendecomposition by cyclic complex Jacobi rotations, and the
//! PSD factorizations built on it.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use super::ToleranceConfig;
use crate::error::{mismatch, Error, Result};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues in descending order with matching unit eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn min_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| f64::max(m, v.abs()))
    }

    /// Q diag(λ) Q*.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let q = &self.vectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| q[(i, k)] * self.values[k] * q[(j, k)].conj())
                .sum()
        })
    }
}

/// Rotation G = diag(1, conj(phase)) · [[c, s], [-s, c]] that diagonalizes
/// the Hermitian 2×2 matrix [[app, b], [conj(b), aqq]] via G* · A · G.
#[derive(Clone, Copy)]
pub(crate) struct Rotation {
    pp: Complex64,
    pq: Complex64,
    qp: Complex64,
    qq: Complex64,
}

impl Rotation {
    pub(crate) fn new(app: f64, aqq: f64, b: Complex64) -> Self {
        let babs = b.norm();
        let tau = (aqq - app) / (2.0 * babs);
        let t = if tau >= 0.0 {
            1.0 / (tau + tau.hypot(1.0))
        } else {
            -1.0 / (-tau + tau.hypot(1.0))
        };
        let c = 1.0 / t.hypot(1.0);
        let s = t * c;
        let phase = (b / babs).conj();
        Rotation {
            pp: Complex64::new(c, 0.0),
            pq: Complex64::new(s, 0.0),
            qp: phase * (-s),
            qq: phase * c,
        }
    }

    /// Columns p, q of `m` ← columns p, q of `m · G`.
    pub(crate) fn apply_right(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        for k in 0..m.rows() {
            let a = m[(k, p)];
            let b = m[(k, q)];
            m[(k, p)] = a * self.pp + b * self.qp;
            m[(k, q)] = a * self.pq + b * self.qq;
        }
    }

    /// Rows p, q of `m` ← rows p, q of `G* · m`.
    fn apply_left_adjoint(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        for k in 0..m.cols() {
            let a = m[(p, k)];
            let b = m[(q, k)];
            m[(p, k)] = self.pp.conj() * a + self.qp.conj() * b;
            m[(q, k)] = self.pq.conj() * a + self.qq.conj() * b;
        }
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Makes the first entry of each column whose magnitude exceeds `threshold`
/// real and nonnegative.
pub(crate) fn fix_column_phases(m: &mut ComplexMatrix, threshold: f64) {
    for j in 0..m.cols() {
        let lead = (0..m.rows()).map(|i| m[(i, j)]).find(|z| z.norm() > threshold);
        if let Some(z) = lead {
            let phase = z.conj() / z.norm();
            for i in 0..m.rows() {
                m[(i, j)] *= phase;
            }
        }
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come back in descending order; ties keep the order in which the
/// Jacobi sweep left them, so results are reproducible for identical inputs.
pub fn eigh(h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(mismatch(format!(
            "eigh needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let norm = h.frobenius_norm();
    let asymmetry = h.hermitian_defect();
    let bound = tol.bound(norm);
    if asymmetry > bound {
        return Err(Error::NotHermitian { asymmetry, bound });
    }

    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let mut converged = n <= 1 || norm == 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[(p, q)];
                if b == ZERO {
                    continue;
                }
                let rot = Rotation::new(a[(p, p)].re, a[(q, q)].re, b);
                rot.apply_right(&mut a, p, q);
                rot.apply_left_adjoint(&mut a, p, q);
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                rot.apply_right(&mut v, p, q);
            }
        }
        converged = off_diagonal_norm(&a) <= f64::EPSILON * norm;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    fix_column_phases(&mut vectors, tol.rel_rank_tol);
    Ok(HermitianEigen { values, vectors })
}

/// Number of eigenvalues above the relative rank threshold.
fn positive_rank(eig: &HermitianEigen, tol: &ToleranceConfig) -> usize {
    let cutoff = tol.rel_rank_tol * eig.max_abs_value();
    eig.values.iter().filter(|&&l| l > cutoff && l > 0.0).count()
}

/// Checks positive semidefiniteness against abs_tol·max(1, ‖P‖_F).
pub fn check_psd(p: &ComplexMatrix, tol: &ToleranceConfig) -> Result<HermitianEigen> {
    let eig = eigh(p, tol)?;
    let bound = tol.bound(p.frobenius_norm());
    let min_eigenvalue = eig.min_value();
    if min_eigenvalue < -bound {
        return Err(Error::NotPsd {
            min_eigenvalue,
            bound: -bound,
        });
    }
    Ok(eig)
}

/// Factors a PSD matrix as B*·B with B having rank(P) rows.
///
/// Row i of B is sqrt(λ_i)·q_i* for the i-th largest eigenpair, so rows are
/// the scaled eigenvectors; eigenvalues below the rank threshold are dropped.
pub fn psd_factor(p: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let eig = check_psd(p, tol)?;
    Ok(factor_from_eigen(&eig, tol))
}

pub(crate) fn factor_from_eigen(eig: &HermitianEigen, tol: &ToleranceConfig) -> ComplexMatrix {
    let n = eig.values.len();
    let r = positive_rank(eig, tol);
    ComplexMatrix::from_fn(r, n, |i, j| eig.vectors[(j, i)].conj() * eig.values[i].sqrt())
}

/// Moore-Penrose pseudo-inverse of a Hermitian matrix, inverting only the
/// eigenvalues above the relative rank threshold.
pub fn pinv_hermitian(h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let eig = eigh(h, tol)?;
    let n = h.rows();
    let cutoff = tol.rel_rank_tol * eig.max_abs_value();
    let inv: Vec<f64> = eig
        .values
        .iter()
        .map(|&l| if l.abs() > cutoff && l != 0.0 { 1.0 / l } else { 0.0 })
        .collect();
    let q = &eig.vectors;
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|k| q[(i, k)] * inv[k] * q[(j, k)].conj()).sum()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn identity_spectrum() {
        let e = eigh(&ComplexMatrix::identity(2), &tol()).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
        let q = &e.vectors;
        assert!((&(&q.adjoint() * q) - &ComplexMatrix::identity(2)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = eigh(&x, &tol()).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15);
        assert!((e.values[1] + 1.0).abs() < 1e-15);
        assert!((&e.reconstruct() - &x).frobenius_norm() < 1e-14);
        // phase fixing: leading entries real nonnegative
        for j in 0..2 {
            assert!(e.vectors[(0, j)].im.abs() < 1e-15 && e.vectors[(0, j)].re > 0.0);
        }
    }

    #[test]
    fn complex_hermitian_reconstructs() {
        let h = ComplexMatrix::from_rows(&[
            vec![Complex64::new(2.0, 0.0), Complex64::new(1.0, -1.0), Complex64::new(0.0, 0.5)],
            vec![Complex64::new(1.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.3, 0.0)],
            vec![Complex64::new(0.0, -0.5), Complex64::new(0.3, 0.0), Complex64::new(0.5, 0.0)],
        ]);
        let e = eigh(&h, &tol()).unwrap();
        assert!((&e.reconstruct() - &h).frobenius_norm() < 1e-13);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(eigh(&m, &tol()), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn psd_factor_identity_and_zero() {
        let b = psd_factor(&ComplexMatrix::identity(3), &tol()).unwrap();
        assert_eq!(b, ComplexMatrix::identity(3));
        let z = psd_factor(&ComplexMatrix::zeros(2, 2), &tol()).unwrap();
        assert_eq!(z.shape(), (0, 2));
    }

    #[test]
    fn psd_factor_rank_one() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = ComplexMatrix::column(&[Complex64::new(s, 0.0), Complex64::new(s, 0.0)]);
        let p = &z * &z.adjoint();
        let b = psd_factor(&p, &tol()).unwrap();
        assert_eq!(b.rows(), 1);
        assert!((&(&b.adjoint() * &b) - &p).frobenius_norm() < 1e-15);
    }

    #[test]
    fn psd_factor_rejects_negative() {
        let m = ComplexMatrix::diag_real(&[1.0, -0.01]);
        assert!(matches!(psd_factor(&m, &tol()), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn psd_factor_clamps_tiny_negative() {
        let m = ComplexMatrix::diag_real(&[1.0, -1e-12]);
        let b = psd_factor(&m, &tol()).unwrap();
        assert_eq!(b.rows(), 1);
    }

    #[test]
    fn pinv_of_singular_diagonal() {
        let m = ComplexMatrix::diag_real(&[2.0, 0.0, 4.0]);
        let p = pinv_hermitian(&m, &tol()).unwrap();
        assert!((&p - &ComplexMatrix::diag_real(&[0.5, 0.0, 0.25])).frobenius_norm() < 1e-15);
    }
}
