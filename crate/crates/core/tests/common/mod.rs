//! Random generators and brute-force oracles shared by the integration tests.
//!
//! The oracles deliberately avoid the crate's eigen/SVD code: ranks come from
//! Gaussian elimination and orthonormal bases from modified Gram-Schmidt.

#![allow(dead_code)]

use num_complex::Complex64;
use qfact::channel::KrausSet;
use qfact::numerics::ComplexMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C64 = Complex64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Approximately standard normal, from Box-Muller.
pub fn normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn ginibre(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| C64::new(normal(rng), normal(rng)))
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = ginibre(rng, n, n);
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Orthonormalizes the columns with modified Gram-Schmidt (two passes).
pub fn gram_schmidt(m: &ComplexMatrix) -> ComplexMatrix {
    let (rows, cols) = m.shape();
    let mut out = m.clone();
    for j in 0..cols {
        for _ in 0..2 {
            for q in 0..j {
                let proj: C64 = (0..rows).map(|r| out[(r, q)].conj() * out[(r, j)]).sum();
                for r in 0..rows {
                    let v = out[(r, q)];
                    out[(r, j)] -= proj * v;
                }
            }
        }
        let norm: f64 = (0..rows).map(|r| out[(r, j)].norm_sqr()).sum::<f64>().sqrt();
        for r in 0..rows {
            out[(r, j)] /= norm;
        }
    }
    out
}

pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    gram_schmidt(&ginibre(rng, n, n))
}

/// rows×cols with orthonormal columns (rows ≥ cols).
pub fn random_isometry(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    gram_schmidt(&ginibre(rng, rows, cols))
}

/// Trace-preserving channel M_n → M_m with p Kraus operators, cut out of a
/// random isometry C^n → C^m ⊗ C^p.
pub fn random_channel(rng: &mut impl Rng, n: usize, m: usize, p: usize) -> KrausSet {
    let v = random_isometry(rng, m * p, n);
    let ops = (0..p)
        .map(|i| ComplexMatrix::from_fn(m, n, |a, c| v[(a * p + i, c)]))
        .collect();
    KrausSet::new(n, m, ops).unwrap()
}

/// Completely positive map with generic (unnormalized) Kraus operators.
pub fn random_cp_map(rng: &mut impl Rng, n: usize, m: usize, p: usize) -> KrausSet {
    KrausSet::new(n, m, (0..p).map(|_| ginibre(rng, m, n)).collect()).unwrap()
}

/// Rank by Gaussian elimination with complete pivoting; entries below
/// rel·max|a_ij| count as zero.
pub fn rank_oracle(m: &ComplexMatrix, rel: f64) -> usize {
    let (rows, cols) = m.shape();
    let mut a: Vec<Vec<C64>> = (0..rows).map(|i| m.row(i).to_vec()).collect();
    let scale = m.max_abs();
    if scale == 0.0 {
        return 0;
    }
    let mut rank = 0;
    let mut used_cols = vec![false; cols];
    let mut used_rows = vec![false; rows];
    loop {
        let mut best = (0, 0, 0.0);
        for (i, row) in a.iter().enumerate() {
            if used_rows[i] {
                continue;
            }
            for (j, z) in row.iter().enumerate() {
                if !used_cols[j] && z.norm() > best.2 {
                    best = (i, j, z.norm());
                }
            }
        }
        if best.2 <= rel * scale {
            return rank;
        }
        let (pi, pj, _) = best;
        used_rows[pi] = true;
        used_cols[pj] = true;
        rank += 1;
        let pivot_row = a[pi].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if used_rows[i] {
                continue;
            }
            let f = row[pj] / pivot_row[pj];
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x -= f * y;
            }
        }
    }
}

/// Distance from `m` to the complex span of `basis`, via Gram-Schmidt on the
/// flattened basis.
pub fn span_distance(basis: &[ComplexMatrix], m: &ComplexMatrix) -> f64 {
    let len = m.rows() * m.cols();
    let stacked = ComplexMatrix::from_fn(len, basis.len(), |r, j| basis[j].as_slice()[r]);
    let q = gram_schmidt(&stacked);
    let mut r: Vec<C64> = m.as_slice().to_vec();
    for j in 0..q.cols() {
        let proj: C64 = (0..len).map(|i| q[(i, j)].conj() * r[i]).sum();
        for (i, x) in r.iter_mut().enumerate() {
            *x -= proj * q[(i, j)];
        }
    }
    r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Φ^{C†}(Y) = Σ y_ij K_i* K_j, written out directly.
pub fn complement_adjoint_oracle(k: &KrausSet, y: &ComplexMatrix) -> ComplexMatrix {
    let ops = k.operators();
    let n = k.dim_in();
    ComplexMatrix::from_fn(n, n, |r, c| {
        let mut acc = C64::new(0.0, 0.0);
        for (i, ki) in ops.iter().enumerate() {
            for (j, kj) in ops.iter().enumerate() {
                for a in 0..k.dim_out() {
                    acc += y[(i, j)] * ki[(a, r)].conj() * kj[(a, c)];
                }
            }
        }
        acc
    })
}

/// Σ_ij E_ij ⊗ Φ(E_ij) entry by entry.
pub fn choi_oracle(k: &KrausSet) -> ComplexMatrix {
    let (n, m) = (k.dim_in(), k.dim_out());
    ComplexMatrix::from_fn(n * m, n * m, |row, col| {
        let (i, a) = (row / m, row % m);
        let (j, b) = (col / m, col % m);
        // Φ(E_ij)_ab = Σ_l K_l[a,i] conj(K_l[b,j])
        k.operators().iter().map(|kl| kl[(a, i)] * kl[(b, j)].conj()).sum()
    })
}

pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    (&(&u.adjoint() * u) - &ComplexMatrix::identity(u.cols())).frobenius_norm()
}

/// Smallest eigenvalue of a Hermitian matrix via bisection on Sylvester
/// inertia counts from an LDL* sweep (no eigenvectors needed).
pub fn min_eigenvalue_oracle(h: &ComplexMatrix) -> f64 {
    let n = h.rows();
    let bound = h.frobenius_norm() + 1.0;
    let negatives_below = |shift: f64| -> usize {
        // count of negative pivots of H − shift·I
        let mut a: Vec<Vec<C64>> = (0..n)
            .map(|i| (0..n).map(|j| h[(i, j)] - if i == j { shift } else { 0.0 }).collect())
            .collect();
        let mut count = 0;
        for k in 0..n {
            let mut d = a[k][k].re;
            if d == 0.0 {
                d = -1e-300;
            }
            if d < 0.0 {
                count += 1;
            }
            for i in (k + 1)..n {
                let f = a[i][k] / d;
                let (upper, lower) = a.split_at_mut(i);
                for (x, y) in lower[0][(k + 1)..].iter_mut().zip(&upper[k][(k + 1)..]) {
                    *x -= f * y;
                }
            }
        }
        count
    };
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if negatives_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// A = √2·U E_12 U* split into the three Hermitian coefficients solving the
/// six-point example's equations at k = 2.
pub fn nilpotent_solution(u: &ComplexMatrix) -> [ComplexMatrix; 3] {
    let r2 = std::f64::consts::SQRT_2;
    let a = &(&u.scale_real(r2) * &ComplexMatrix::unit(2, 2, 0, 1)) * &u.adjoint();
    let a_adj = a.adjoint();
    let a1 = (&(&a_adj * &a) - &(&a * &a_adj)).scale_real(1.0 / (2.0 * r2));
    let a2 = (&a + &a_adj).scale_real(0.5);
    let a3 = (&a - &a_adj).scale(C64::new(0.0, -0.5));
    [a1.hermitian_part(), a2.hermitian_part(), a3.hermitian_part()]
}

pub fn hm_point_matrices() -> [ComplexMatrix; 3] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let i = C64::new(0.0, 1.0);
    let z = C64::new(0.0, 0.0);
    [
        ComplexMatrix::diag_real(&[-h, h]),
        ComplexMatrix::from_real_rows(&[&[0.0, h], &[h, 0.0]]),
        ComplexMatrix::from_rows(&[vec![z, -i * h], vec![i * h, z]]),
    ]
}
