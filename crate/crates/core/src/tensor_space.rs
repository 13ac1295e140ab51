//! Bases and inner products for two-tensors on a Euclidean space `V = R^n`.
//!
//! Conventions:
//! * `e_i ⊙ e_j = e_i ⊗ e_j + e_j ⊗ e_i` and `e_i ∧ e_j = e_i ⊗ e_j - e_j ⊗ e_i`.
//! * Symmetric tensors use `<A, B> = tr(AᵀB)`; two-forms use `<A, B> = ½ tr(AᵀB)`,
//!   so `{e_i ∧ e_j}_{i<j}` is orthonormal.
//! * Indices are zero-based throughout the crate.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tol;

/// Dimension of the underlying vector space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dim(usize);

impl Dim {
    /// Accepts `2 <= n <= 12`.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_limit(n, tol::DEFAULT_MAX_DIM)
    }

    pub fn with_limit(n: usize, max: usize) -> Result<Self> {
        if n < 2 || n > max {
            return Err(Error::Dimension { n, min: 2, max });
        }
        Ok(Dim(n))
    }

    /// Checks an additional lower bound, e.g. `n >= 3` for cone conditions.
    pub fn require_at_least(self, min: usize) -> Result<Self> {
        if self.0 < min {
            return Err(Error::Dimension {
                n: self.0,
                min,
                max: usize::MAX,
            });
        }
        Ok(self)
    }

    #[inline]
    pub fn n(self) -> usize {
        self.0
    }

    /// `dim S²₀(V) = (n-1)(n+2)/2`.
    #[inline]
    pub fn traceless_dim(self) -> usize {
        (self.0 - 1) * (self.0 + 2) / 2
    }

    /// `dim ∧²(V) = n(n-1)/2`.
    #[inline]
    pub fn wedge2_dim(self) -> usize {
        self.0 * (self.0 - 1) / 2
    }

    /// `dim S²(V) = n(n+1)/2`.
    #[inline]
    pub fn sym_dim(self) -> usize {
        self.0 * (self.0 + 1) / 2
    }
}

/// Position of `e_i ∧ e_j` (`i < j`) in the lexicographic basis of `∧²(V)`.
#[inline]
pub fn wedge_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Lexicographic pairs `(i, j)`, `i < j`.
pub fn wedge_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

/// Lexicographic pairs `(i, j)`, `i <= j`.
pub fn sym_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            out.push((i, j));
        }
    }
    out
}

/// Coordinates of `u ∧ v` in the lexicographic `∧²` basis.
pub fn wedge_vector(u: &[f64], v: &[f64]) -> DVector<f64> {
    let n = u.len();
    let mut out = DVector::zeros(n * (n - 1) / 2);
    let mut idx = 0;
    for i in 0..n {
        for j in i + 1..n {
            out[idx] = u[i] * v[j] - u[j] * v[i];
            idx += 1;
        }
    }
    out
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

fn max_skew_defect(m: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..=i {
            worst = worst.max((m[(i, j)] + m[(j, i)]).abs());
        }
    }
    worst
}

fn check_square(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape {
            rows: m.nrows(),
            cols: m.ncols(),
            expected: m.nrows(),
        });
    }
    Ok(m.nrows())
}

/// Symmetric two-tensor stored as an `n x n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor2(DMatrix<f64>);

impl SymTensor2 {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        check_square(&entries)?;
        let asym = max_asymmetry(&entries);
        if asym > tol::EXACT {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(SymTensor2(entries))
    }

    /// Symmetrizes `(M + Mᵀ)/2`.
    pub fn symmetrize(m: &DMatrix<f64>) -> Self {
        SymTensor2((m + m.transpose()) * 0.5)
    }

    pub fn identity(n: usize) -> Self {
        SymTensor2(DMatrix::identity(n, n))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// `tr(AᵀB)`.
    pub fn inner(&self, other: &SymTensor2) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }
}

/// Traceless symmetric two-tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct TracelessSymTensor2(DMatrix<f64>);

impl TracelessSymTensor2 {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let s = SymTensor2::new(entries)?;
        let tr = s.trace();
        if tr.abs() > tol::EXACT {
            return Err(crate::error::range_err("trace", tr, "[-1e-12, 1e-12]"));
        }
        Ok(TracelessSymTensor2(s.0))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn inner(&self, other: &TracelessSymTensor2) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn as_sym(&self) -> SymTensor2 {
        SymTensor2(self.0.clone())
    }
}

/// Two-form stored as an antisymmetric `n x n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoForm(DMatrix<f64>);

impl TwoForm {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        check_square(&entries)?;
        let defect = max_skew_defect(&entries);
        if defect > tol::EXACT {
            return Err(Error::NotSymmetric(defect));
        }
        Ok(TwoForm(entries))
    }

    /// `e_i ∧ e_j`.
    pub fn wedge(i: usize, j: usize, dim: Dim) -> Result<Self> {
        let n = dim.n();
        for idx in [i, j] {
            if idx >= n {
                return Err(Error::IndexOutOfRange { index: idx, n });
            }
        }
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] += 1.0;
        m[(j, i)] -= 1.0;
        Ok(TwoForm(m))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// `½ tr(AᵀB)`.
    pub fn inner(&self, other: &TwoForm) -> f64 {
        0.5 * self.0.dot(&other.0)
    }

    /// Coordinates in the lexicographic `∧²` basis.
    pub fn coordinates(&self) -> DVector<f64> {
        let n = self.0.nrows();
        DVector::from_iterator(
            n * (n - 1) / 2,
            wedge_pairs(n).into_iter().map(|(i, j)| self.0[(i, j)]),
        )
    }
}

/// Lexicographic basis `{e_i ∧ e_j}_{i<j}` of `∧²(V)`.
pub fn standard_basis_wedge2(dim: Dim) -> Vec<TwoForm> {
    wedge_pairs(dim.n())
        .into_iter()
        .map(|(i, j)| TwoForm::wedge(i, j, dim).expect("indices in range"))
        .collect()
}

/// `e_i ⊙ e_j`: ones at `(i,j)` and `(j,i)`, or a two at `(i,i)`.
pub fn symmetric_product(i: usize, j: usize, dim: Dim) -> Result<SymTensor2> {
    let n = dim.n();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, n });
        }
    }
    let mut m = DMatrix::zeros(n, n);
    m[(i, j)] += 1.0;
    m[(j, i)] += 1.0;
    Ok(SymTensor2(m))
}

/// `u ⊙ v = u ⊗ v + v ⊗ u` for arbitrary vectors.
pub fn symmetric_product_vec(u: &DVector<f64>, v: &DVector<f64>) -> DMatrix<f64> {
    u * v.transpose() + v * u.transpose()
}

/// `π(h) = h - (tr h / n) Id`.
pub fn project_traceless(h: &SymTensor2) -> TracelessSymTensor2 {
    let n = h.n();
    let shift = h.trace() / n as f64;
    let mut m = h.0.clone();
    for i in 0..n {
        m[(i, i)] -= shift;
    }
    TracelessSymTensor2(m)
}

/// Orthonormal basis of `S²₀(V)` in the fixed global order: the
/// `(1/√2) e_i ⊙ e_j` for `i < j` lexicographically, then the diagonal tensors
/// `ψ_k = ((n-k) E_kk - Σ_{l>k} E_ll) / √((n-k)(n-k+1))` for `k = 0..n-2`.
pub fn standard_basis_s20(dim: Dim) -> Vec<TracelessSymTensor2> {
    let n = dim.n();
    let mut out = Vec::with_capacity(dim.traceless_dim());
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for (i, j) in wedge_pairs(n) {
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] = r;
        m[(j, i)] = r;
        out.push(TracelessSymTensor2(m));
    }
    for k in 0..n - 1 {
        // `rest` counts the indices after k, i.e. n-k in one-based terms.
        let rest = (n - 1 - k) as f64;
        let scale = 1.0 / (rest * (rest + 1.0)).sqrt();
        let mut m = DMatrix::zeros(n, n);
        m[(k, k)] = rest * scale;
        for l in k + 1..n {
            m[(l, l)] = -scale;
        }
        out.push(TracelessSymTensor2(m));
    }
    out
}

/// Gram matrix `G_ab = <B_a, B_b>` under `tr(AᵀB)`.
pub fn gram_matrix(basis: &[DMatrix<f64>]) -> DMatrix<f64> {
    let k = basis.len();
    DMatrix::from_fn(k, k, |a, b| basis[a].dot(&basis[b]))
}

/// Coefficients `c_ij` (`i <= j`, lexicographic) with `A = Σ c_ij e_i ⊙ e_j`.
pub fn odot_coefficients(a: &DMatrix<f64>) -> DVector<f64> {
    let n = a.nrows();
    DVector::from_iterator(
        n * (n + 1) / 2,
        sym_pairs(n)
            .into_iter()
            .map(|(i, j)| if i == j { 0.5 * a[(i, i)] } else { a[(i, j)] }),
    )
}
