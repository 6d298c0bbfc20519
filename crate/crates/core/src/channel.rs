//! Completely positive maps in operator-sum form, Choi matrices, and
//! Stinespring dilations.

use num_complex::Complex64;

use crate::error::{mismatch, Error, Result};
use crate::numerics::{
    complete_isometry, kron, partial_trace, psd_factor, unvec, vec, ComplexMatrix, Side, ToleranceConfig,
};

/// Kraus operators K_1..K_p of a CP map M_n → M_m, each m×n.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    dim_in: usize,
    dim_out: usize,
    operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn new(dim_in: usize, dim_out: usize, operators: Vec<ComplexMatrix>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidArgument("a Kraus set needs at least one operator".into()));
        }
        if dim_in == 0 || dim_out == 0 {
            return Err(mismatch("channel dimensions must be positive"));
        }
        if let Some((i, k)) = operators
            .iter()
            .enumerate()
            .find(|(_, k)| k.shape() != (dim_out, dim_in))
        {
            return Err(mismatch(format!(
                "Kraus operator {i} is {}x{}, expected {dim_out}x{dim_in}",
                k.rows(),
                k.cols()
            )));
        }
        Ok(Self {
            dim_in,
            dim_out,
            operators,
        })
    }

    /// Infers dimensions from the first operator.
    pub fn from_operators(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let (m, n) = operators
            .first()
            .map(ComplexMatrix::shape)
            .ok_or_else(|| Error::InvalidArgument("a Kraus set needs at least one operator".into()))?;
        Self::new(n, m, operators)
    }

    /// Unitary adjunction X ↦ U X U*.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::from_operators(vec![u])
    }

    pub fn identity(n: usize) -> Self {
        Self::new(n, n, vec![ComplexMatrix::identity(n)]).expect("identity channel")
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn into_operators(self) -> Vec<ComplexMatrix> {
        self.operators
    }

    /// Σ K_i* K_i
    pub fn gram_sum(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.operators {
            acc += &(&k.adjoint() * k);
        }
        acc
    }

    /// The matrix K whose columns are vec(K_i); the Choi matrix is K K*.
    pub fn stacked_vectors(&self) -> ComplexMatrix {
        let rows = self.dim_in * self.dim_out;
        let mut out = ComplexMatrix::zeros(rows, self.len());
        for (j, k) in self.operators.iter().enumerate() {
            out.set_col(j, &vec(k));
        }
        out
    }

    /// Kraus operators Σ_j c_ij K_j for the rows of `coeffs`.
    pub fn recombine(&self, coeffs: &ComplexMatrix) -> Result<Self> {
        if coeffs.cols() != self.len() {
            return Err(mismatch(format!(
                "coefficient matrix has {} columns for {} Kraus operators",
                coeffs.cols(),
                self.len()
            )));
        }
        let ops = (0..coeffs.rows())
            .map(|i| {
                let mut acc = ComplexMatrix::zeros(self.dim_out, self.dim_in);
                for (j, k) in self.operators.iter().enumerate() {
                    acc += &k.scale(coeffs[(i, j)]);
                }
                acc
            })
            .collect();
        Self::new(self.dim_in, self.dim_out, ops)
    }

    /// Removes operators with ‖K‖_F ≤ threshold, keeping at least one.
    pub fn drop_negligible(self, threshold: f64) -> Self {
        let Self {
            dim_in,
            dim_out,
            operators,
        } = self;
        let mut kept: Vec<ComplexMatrix> = operators
            .iter()
            .filter(|k| k.frobenius_norm() > threshold)
            .cloned()
            .collect();
        if kept.is_empty() {
            kept.push(ComplexMatrix::zeros(dim_out, dim_in));
        }
        Self {
            dim_in,
            dim_out,
            operators: kept,
        }
    }
}

/// C_Φ = Σ_ij E_ij ⊗ Φ(E_ij) ∈ M_n ⊗ M_m.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    dim_in: usize,
    dim_out: usize,
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn new(dim_in: usize, dim_out: usize, matrix: ComplexMatrix) -> Result<Self> {
        let d = dim_in * dim_out;
        if d == 0 || matrix.shape() != (d, d) {
            return Err(mismatch(format!(
                "Choi matrix for M_{dim_in} -> M_{dim_out} must be {d}x{d}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self {
            dim_in,
            dim_out,
            matrix,
        })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Trace preservation and unitality read off the partial traces of the
    /// Choi matrix; complete positivity from its PSD test.
    pub fn checks(&self, tol: &ToleranceConfig) -> ChannelChecks {
        let (n, m) = (self.dim_in, self.dim_out);
        let tp = partial_trace(&self.matrix, (n, m), Side::Right).expect("shape checked");
        let unital = partial_trace(&self.matrix, (n, m), Side::Left).expect("shape checked");
        // (id ⊗ Tr)(C) = Σ E_ij Tr Φ(E_ij) = (Σ K*K)^T, and (Tr ⊗ id)(C) = Φ(I)
        let tp_res = (&tp - &ComplexMatrix::identity(n)).frobenius_norm();
        let un_res = (&unital - &ComplexMatrix::identity(m)).frobenius_norm();
        ChannelChecks {
            trace_preserving: tp_res <= tol.abs_tol * (n as f64).sqrt(),
            unital: un_res <= tol.abs_tol * (m as f64).sqrt(),
            completely_positive: kraus_from_choi(self, tol).is_ok(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelChecks {
    pub trace_preserving: bool,
    pub unital: bool,
    pub completely_positive: bool,
}

pub fn choi_from_kraus(k: &KrausSet) -> ChoiMatrix {
    let stacked = k.stacked_vectors();
    let matrix = &stacked * &stacked.adjoint();
    ChoiMatrix {
        dim_in: k.dim_in,
        dim_out: k.dim_out,
        matrix,
    }
}

/// Kraus operators from the scaled eigenvectors of the Choi matrix.
pub fn kraus_from_choi(c: &ChoiMatrix, tol: &ToleranceConfig) -> Result<KrausSet> {
    let b = psd_factor(&c.matrix, tol)?;
    if b.rows() == 0 {
        return Err(Error::InvalidArgument("the zero map has no nonzero Kraus operators".into()));
    }
    // C = B* B, so the vectors k_i are the conjugated rows of B.
    let ops = (0..b.rows())
        .map(|i| {
            let k: Vec<Complex64> = b.row(i).iter().map(|z| z.conj()).collect();
            unvec(&k, c.dim_out, c.dim_in)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(KrausSet::new(c.dim_in, c.dim_out, ops)?.drop_negligible(tol.abs_tol))
}

/// Φ(X) = Σ K_i X K_i*
pub fn apply(k: &KrausSet, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if x.shape() != (k.dim_in, k.dim_in) {
        return Err(mismatch(format!(
            "input must be {n}x{n}, got {}x{}",
            x.rows(),
            x.cols(),
            n = k.dim_in
        )));
    }
    let mut acc = ComplexMatrix::zeros(k.dim_out, k.dim_out);
    for op in &k.operators {
        acc += &(&(op * x) * &op.adjoint());
    }
    Ok(acc)
}

/// Φ†(Y) = Σ K_i* Y K_i
pub fn apply_adjoint(k: &KrausSet, y: &ComplexMatrix) -> Result<ComplexMatrix> {
    if y.shape() != (k.dim_out, k.dim_out) {
        return Err(mismatch(format!(
            "input must be {m}x{m}, got {}x{}",
            y.rows(),
            y.cols(),
            m = k.dim_out
        )));
    }
    let mut acc = ComplexMatrix::zeros(k.dim_in, k.dim_in);
    for op in &k.operators {
        acc += &(&(&op.adjoint() * y) * op);
    }
    Ok(acc)
}

pub fn trace_preservation_residual(k: &KrausSet) -> f64 {
    (&k.gram_sum() - &ComplexMatrix::identity(k.dim_in)).frobenius_norm()
}

fn unitality_residual(k: &KrausSet) -> f64 {
    let mut acc = ComplexMatrix::zeros(k.dim_out, k.dim_out);
    for op in &k.operators {
        acc += &(op * &op.adjoint());
    }
    (&acc - &ComplexMatrix::identity(k.dim_out)).frobenius_norm()
}

pub fn channel_checks(k: &KrausSet, tol: &ToleranceConfig) -> ChannelChecks {
    ChannelChecks {
        trace_preserving: trace_preservation_residual(k) <= tol.abs_tol * (k.dim_in as f64).sqrt(),
        unital: unitality_residual(k) <= tol.abs_tol * (k.dim_out as f64).sqrt(),
        completely_positive: true,
    }
}

pub(crate) fn require_trace_preserving(k: &KrausSet, tol: &ToleranceConfig) -> Result<()> {
    let residual = trace_preservation_residual(k);
    if residual > tol.abs_tol * (k.dim_in as f64).sqrt() {
        return Err(Error::NotTracePreserving { residual });
    }
    Ok(())
}

/// A unitary U on C^m ⊗ C^p with Φ(X) = (id ⊗ Tr)(U (X ⊗ E_11) U*).
#[derive(Debug, Clone)]
pub struct StinespringDilation {
    pub unitary: ComplexMatrix,
    pub dim_out: usize,
    pub env_dim: usize,
}

impl StinespringDilation {
    /// (id ⊗ Tr)(U (X ⊗ E_11) U*), with an n×n input (n ≤ m) padded into M_m.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let (m, p) = (self.dim_out, self.env_dim);
        if !x.is_square() || x.rows() > m {
            return Err(mismatch(format!("input must be square with at most {m} rows")));
        }
        let mut padded = ComplexMatrix::zeros(m, m);
        padded.set_submatrix(0, 0, x);
        let state = kron(&padded, &ComplexMatrix::unit(p, p, 0, 0));
        let evolved = &(&self.unitary * &state) * &self.unitary.adjoint();
        partial_trace(&evolved, (m, p), Side::Right)
    }
}

/// Completes V = Σ K_i ⊗ e_i to a unitary in M_m ⊗ M_p.
///
/// The input space is embedded as the first n basis vectors of C^m, so
/// dim_in ≤ dim_out is required.
pub fn stinespring_dilation(k: &KrausSet, tol: &ToleranceConfig) -> Result<StinespringDilation> {
    require_trace_preserving(k, tol)?;
    let (n, m, p) = (k.dim_in, k.dim_out, k.len());
    if n > m {
        return Err(mismatch(format!(
            "dilation into M_{m} ⊗ M_{p} needs dim_in ≤ dim_out, got {n} > {m}"
        )));
    }
    let v = ComplexMatrix::from_fn(m * p, n, |row, c| {
        let (a, i) = (row / p, row % p);
        k.operators[i][(a, c)]
    });
    let w = complete_isometry(&v, tol)?;
    // column c·p of U is V e_c; the completion fills the remaining slots in order
    let mut unitary = ComplexMatrix::zeros(m * p, m * p);
    let mut rest = n..m * p;
    for slot in 0..m * p {
        let src = if slot % p == 0 && slot / p < n {
            slot / p
        } else {
            rest.next().expect("completion has m·p columns")
        };
        unitary.set_col(slot, &w.col(src));
    }
    Ok(StinespringDilation {
        unitary,
        dim_out: m,
        env_dim: p,
    })
}

/// X ↦ (id ⊗ τ_k)(W (X ⊗ I_k) W*) with τ_k = Tr/k, as Kraus operators
/// K_ab = k^{-1/2} (I ⊗ e_a*) W (I ⊗ e_b).
pub fn channel_from_dilation(w: &ComplexMatrix, n: usize, k: usize, tol: &ToleranceConfig) -> Result<KrausSet> {
    let ops = dilation_blocks(w, n, k, tol)?;
    let scale = 1.0 / (k as f64).sqrt();
    let ops = ops.into_iter().map(|(_, _, b)| b.scale_real(scale)).collect();
    Ok(KrausSet::new(n, n, ops)?.drop_negligible(tol.abs_tol))
}

/// Blocks (I ⊗ e_a*) W (I ⊗ e_b) of a unitary on C^n ⊗ C^k, in (a, b) order.
pub(crate) fn dilation_blocks(
    w: &ComplexMatrix,
    n: usize,
    k: usize,
    tol: &ToleranceConfig,
) -> Result<Vec<(usize, usize, ComplexMatrix)>> {
    if n == 0 || k == 0 || w.shape() != (n * k, n * k) {
        return Err(mismatch(format!(
            "dilation unitary must be {d}x{d}, got {}x{}",
            w.rows(),
            w.cols(),
            d = n * k
        )));
    }
    let residual = (&(&w.adjoint() * w) - &ComplexMatrix::identity(n * k)).frobenius_norm();
    if residual > tol.bound(((n * k) as f64).sqrt()) {
        return Err(Error::NotUnitary { residual });
    }
    let mut out = Vec::with_capacity(k * k);
    for a in 0..k {
        for b in 0..k {
            let block = ComplexMatrix::from_fn(n, n, |r, c| w[(r * k + a, c * k + b)]);
            out.push((a, b, block));
        }
    }
    Ok(out)
}

/// t·Φ_1 + (1−t)·Φ_2 via the Kraus list {√t K_i} ∪ {√(1−t) L_j}.
pub fn convex_combine_channels(k1: &KrausSet, k2: &KrausSet, t: f64) -> Result<KrausSet> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidArgument(format!("mixing weight must lie in (0, 1), got {t}")));
    }
    if (k1.dim_in, k1.dim_out) != (k2.dim_in, k2.dim_out) {
        return Err(mismatch("channels being mixed have different dimensions"));
    }
    let ops = k1
        .operators
        .iter()
        .map(|k| k.scale_real(t.sqrt()))
        .chain(k2.operators.iter().map(|l| l.scale_real((1.0 - t).sqrt())))
        .collect();
    KrausSet::new(k1.dim_in, k1.dim_out, ops)
}
