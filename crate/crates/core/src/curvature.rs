//! Algebraic curvature tensors and the operators they induce on `∧²(V)` and `S²₀(V)`.
//!
//! A tensor is stored as the symmetric matrix of `R̂` on the lexicographic
//! basis `{e_i ∧ e_j}_{i<j}`, so `M[(ij),(kl)] = R_ijkl`. Sign convention:
//! `R_ijij` is the sectional curvature of the plane `e_i ∧ e_j`, which makes
//! the unit sphere `M = Id` and its operator of the second kind the identity.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{range_err, Error, Result};
use crate::sampling;
use crate::tensor_space::{
    odot_coefficients, standard_basis_s20, sym_pairs, wedge_index, wedge_pairs, wedge_vector, Dim,
};
use crate::tol;

/// Dense four-index array, used where loops over `R_ijkl` are clearer than
/// the `∧²` matrix.
#[derive(Debug, Clone)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Tensor4 {
            n,
            data: vec![0.0; n * n * n * n],
        }
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.offset(i, j, k, l)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let o = self.offset(i, j, k, l);
        self.data[o] = v;
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

#[inline]
fn oriented_pair(n: usize, i: usize, j: usize) -> Option<(usize, f64)> {
    match i.cmp(&j) {
        std::cmp::Ordering::Less => Some((wedge_index(n, i, j), 1.0)),
        std::cmp::Ordering::Greater => Some((wedge_index(n, j, i), -1.0)),
        std::cmp::Ordering::Equal => None,
    }
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

fn check_shape(m: &DMatrix<f64>, expected: usize) -> Result<()> {
    if m.nrows() != expected || m.ncols() != expected {
        return Err(Error::Shape {
            rows: m.nrows(),
            cols: m.ncols(),
            expected,
        });
    }
    Ok(())
}

/// An element of `S²_B(∧²V)`: pair-symmetric and satisfying the first Bianchi identity.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicCurvature {
    dim: Dim,
    matrix: DMatrix<f64>,
}

impl AlgebraicCurvature {
    /// Validates symmetry and the Bianchi identity (residual at most `1e-12`
    /// relative to the largest entry).
    pub fn new(dim: Dim, matrix: DMatrix<f64>) -> Result<Self> {
        check_shape(&matrix, dim.wedge2_dim())?;
        let scale = matrix.amax().max(1.0);
        let asym = max_asymmetry(&matrix);
        if asym > tol::EXACT * scale {
            return Err(Error::NotSymmetric(asym));
        }
        let r = AlgebraicCurvature { dim, matrix };
        let residual = r.bianchi_residual();
        if residual > tol::EXACT * scale {
            return Err(range_err("Bianchi residual", residual, "[0, 1e-12·max|R|]"));
        }
        Ok(r)
    }

    pub fn zero(dim: Dim) -> Self {
        let k = dim.wedge2_dim();
        AlgebraicCurvature {
            dim,
            matrix: DMatrix::zeros(k, k),
        }
    }

    /// Builds `M[(ij),(kl)] = f(i,j,k,l)` for `i<j`, `k<l` and validates it.
    pub fn from_components(
        dim: Dim,
        f: impl Fn(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let pairs = wedge_pairs(dim.n());
        let k = pairs.len();
        let matrix = DMatrix::from_fn(k, k, |a, b| {
            let (i, j) = pairs[a];
            let (p, q) = pairs[b];
            f(i, j, p, q)
        });
        Self::new(dim, matrix)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.dim.n()
    }

    /// Matrix of `R̂` on the lexicographic `∧²` basis.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `R_ijkl`.
    #[inline]
    pub fn r(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n();
        match (oriented_pair(n, i, j), oriented_pair(n, k, l)) {
            (Some((a, sa)), Some((b, sb))) => sa * sb * self.matrix[(a, b)],
            _ => 0.0,
        }
    }

    /// `R(u, v, w, x)` for arbitrary vectors.
    pub fn eval(&self, u: &[f64], v: &[f64], w: &[f64], x: &[f64]) -> f64 {
        let uv = wedge_vector(u, v);
        let wx = wedge_vector(w, x);
        uv.dot(&(&self.matrix * wx))
    }

    pub fn to_tensor4(&self) -> Tensor4 {
        let n = self.n();
        let mut t = Tensor4::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        t.set(i, j, k, l, self.r(i, j, k, l));
                    }
                }
            }
        }
        t
    }

    /// `max |R_ijkl + R_iklj + R_iljk|`.
    pub fn bianchi_residual(&self) -> f64 {
        let n = self.n();
        let t = self.to_tensor4();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let s = t.get(i, j, k, l) + t.get(i, k, l, j) + t.get(i, l, j, k);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Frobenius norm of the `∧²` matrix.
    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn scaled(&self, s: f64) -> Self {
        AlgebraicCurvature {
            dim: self.dim,
            matrix: &self.matrix * s,
        }
    }

    /// Sum of two tensors on the same space.
    pub fn plus(&self, other: &AlgebraicCurvature) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        AlgebraicCurvature {
            dim: self.dim,
            matrix: &self.matrix + &other.matrix,
        }
    }

    /// `Ric_ij = Σ_k R_kikj`; the unit sphere gives `(n-1) Id`.
    pub fn ricci(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, j| (0..n).map(|k| self.r(k, i, k, j)).sum())
    }

    pub fn scalar(&self) -> f64 {
        self.ricci().trace()
    }

    /// `R_ijij`.
    pub fn sectional(&self, i: usize, j: usize) -> Result<f64> {
        let n = self.n();
        for idx in [i, j] {
            if idx >= n {
                return Err(Error::IndexOutOfRange { index: idx, n });
            }
        }
        if i == j {
            return Err(Error::DegeneratePlane(i));
        }
        Ok(self.r(i, j, i, j))
    }

    /// Sectional curvature of the plane spanned by orthonormal `u`, `v`.
    pub fn sectional_plane(&self, u: &[f64], v: &[f64]) -> f64 {
        let uv = wedge_vector(u, v);
        uv.dot(&(&self.matrix * &uv))
    }

    /// `G[(ij),(kl)] = R̊(e_i ⊙ e_j, e_k ⊙ e_l) = 2(R_iklj + R_ilkj)` over
    /// lexicographic pairs `i <= j`, `k <= l`.
    pub fn odot_gram(&self) -> DMatrix<f64> {
        let pairs = sym_pairs(self.n());
        let k = pairs.len();
        DMatrix::from_fn(k, k, |a, b| {
            let (i, j) = pairs[a];
            let (p, q) = pairs[b];
            2.0 * (self.r(i, p, q, j) + self.r(i, q, p, j))
        })
    }

    /// The bilinear form of `R̊` on `S²₀(V)`.
    pub fn second_kind_form(&self) -> SecondKindForm {
        SecondKindForm {
            gram: self.odot_gram(),
        }
    }

    /// `R̄(A, B) = Σ R_iklj A_kl B_ij`, contracted directly (no `⊙` expansion).
    pub fn rbar_form(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        let n = self.n();
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                if b[(i, j)] == 0.0 {
                    continue;
                }
                let mut inner = 0.0;
                for k in 0..n {
                    for l in 0..n {
                        inner += self.r(i, k, l, j) * a[(k, l)];
                    }
                }
                total += inner * b[(i, j)];
            }
        }
        total
    }
}

/// Evaluates `R̊(A, B)` for traceless symmetric `A`, `B` from the `⊙` expansion.
///
/// For tensors with a trace part this returns `R̄(A, B)`.
#[derive(Debug, Clone)]
pub struct SecondKindForm {
    gram: DMatrix<f64>,
}

impl SecondKindForm {
    pub fn eval(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        let ca = odot_coefficients(a);
        let cb = odot_coefficients(b);
        ca.dot(&(&self.gram * cb))
    }

    pub fn quad(&self, a: &DMatrix<f64>) -> f64 {
        self.eval(a, a)
    }
}

/// Bianchi projection `S²(∧²V) → S²_B(∧²V)`: removes the totally
/// antisymmetric part `(R_ijkl + R_iklj + R_iljk)/3`.
pub fn bianchi_project(dim: Dim, m: &DMatrix<f64>) -> Result<AlgebraicCurvature> {
    check_shape(m, dim.wedge2_dim())?;
    let asym = max_asymmetry(m);
    if asym > tol::EXACT * m.amax().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let raw = AlgebraicCurvature {
        dim,
        matrix: (m + m.transpose()) * 0.5,
    };
    let t = raw.to_tensor4();
    let n = dim.n();
    let pairs = wedge_pairs(n);
    let k = pairs.len();
    let matrix = DMatrix::from_fn(k, k, |a, b| {
        let (i, j) = pairs[a];
        let (p, q) = pairs[b];
        let anti = (t.get(i, j, p, q) + t.get(i, p, q, j) + t.get(i, q, j, p)) / 3.0;
        t.get(i, j, p, q) - anti
    });
    // Restore exact symmetry lost to rounding in the two triangle evaluations.
    let matrix = (&matrix + matrix.transpose()) * 0.5;
    Ok(AlgebraicCurvature { dim, matrix })
}

/// Gaussian symmetric matrix on `∧²` with entry scale `scale`, Bianchi-projected.
/// Deterministic in `seed`.
pub fn random_curvature(dim: Dim, seed: u64, scale: f64) -> AlgebraicCurvature {
    let mut rng = sampling::rng(seed);
    random_curvature_with(dim, scale, &mut rng)
}

pub fn random_curvature_with(
    dim: Dim,
    scale: f64,
    rng: &mut sampling::SampleRng,
) -> AlgebraicCurvature {
    let m = sampling::gaussian_symmetric(dim.wedge2_dim(), scale, rng);
    bianchi_project(dim, &m).expect("generated matrix is symmetric")
}

/// `R̊` on the ordered orthonormal basis of `S²₀(V)`, with its spectrum.
#[derive(Debug, Clone)]
pub struct SecondKindOperator {
    dim: Dim,
    matrix: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    mean: f64,
}

impl SecondKindOperator {
    /// Wraps an arbitrary symmetric `N x N` matrix; the spectrum is computed once here.
    pub fn from_matrix(dim: Dim, matrix: DMatrix<f64>) -> Result<Self> {
        check_shape(&matrix, dim.traceless_dim())?;
        let asym = max_asymmetry(&matrix);
        if asym > tol::EXACT * matrix.amax().max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        let matrix = (&matrix + matrix.transpose()) * 0.5;
        let size = matrix.nrows();
        let eig = SymmetricEigen::new(matrix.clone());
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&a| eig.eigenvalues[a]).collect();
        let eigenvectors = DMatrix::from_fn(size, size, |r, c| eig.eigenvectors[(r, order[c])]);
        let mean = matrix.trace() / size as f64;
        Ok(SecondKindOperator {
            dim,
            matrix,
            eigenvalues,
            eigenvectors,
            mean,
        })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Columns are unit eigenvectors in standard-basis coordinates, ordered like
    /// [`eigenvalues`](Self::eigenvalues).
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// Mean eigenvalue `λ̄ = tr / N`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn negated(&self) -> Self {
        let eigenvalues: Vec<f64> = self.eigenvalues.iter().rev().map(|v| -v).collect();
        let size = self.eigenvectors.ncols();
        let eigenvectors =
            DMatrix::from_fn(size, size, |r, c| self.eigenvectors[(r, size - 1 - c)]);
        SecondKindOperator {
            dim: self.dim,
            matrix: -&self.matrix,
            eigenvalues,
            eigenvectors,
            mean: -self.mean,
        }
    }

    /// `R̊ + t·id`.
    pub fn shifted(&self, t: f64) -> Self {
        let size = self.matrix.nrows();
        SecondKindOperator {
            dim: self.dim,
            matrix: &self.matrix + DMatrix::identity(size, size) * t,
            eigenvalues: self.eigenvalues.iter().map(|v| v + t).collect(),
            eigenvectors: self.eigenvectors.clone(),
            mean: self.mean + t,
        }
    }

    /// Eigentensors as `n x n` matrices, in ascending eigenvalue order.
    pub fn eigentensors(&self) -> Vec<DMatrix<f64>> {
        let basis = standard_basis_s20(self.dim);
        (0..self.eigenvectors.ncols())
            .map(|c| {
                let n = self.dim.n();
                let mut t = DMatrix::zeros(n, n);
                for (a, b) in basis.iter().enumerate() {
                    t += b.matrix() * self.eigenvectors[(a, c)];
                }
                t
            })
            .collect()
    }

    /// `‖R̊v − λv‖` for a unit coordinate vector `v` and its Rayleigh quotient `λ`.
    pub fn eigen_residual(&self, v: &DVector<f64>) -> (f64, f64) {
        let mv = &self.matrix * v;
        let lambda = v.dot(&mv) / v.dot(v);
        ((mv - v * lambda).norm(), lambda)
    }
}

/// `S[a][b] = R̊(B_a, B_b)` on the standard basis, from `R̊(e_i⊙e_j, e_k⊙e_l) = 2(R_iklj + R_ilkj)`.
pub fn induce_second_kind(r: &AlgebraicCurvature) -> SecondKindOperator {
    let dim = r.dim();
    let basis = standard_basis_s20(dim);
    let coeffs: Vec<DVector<f64>> = basis
        .iter()
        .map(|b| odot_coefficients(b.matrix()))
        .collect();
    let sym = dim.sym_dim();
    let c = DMatrix::from_fn(sym, coeffs.len(), |p, a| coeffs[a][p]);
    let s = c.transpose() * r.odot_gram() * &c;
    SecondKindOperator::from_matrix(dim, s).expect("CᵀGC is symmetric")
}

/// Ordered orthonormal vectors in `V`, stored as the columns of an `n x k` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    vectors: DMatrix<f64>,
}

impl Frame {
    pub fn new(vectors: DMatrix<f64>) -> Result<Self> {
        let k = vectors.ncols();
        if k < 2 || k > vectors.nrows() {
            return Err(Error::FrameSize {
                got: k,
                expected: vectors.nrows().min(k.max(2)),
            });
        }
        let defect = (vectors.transpose() * &vectors - DMatrix::identity(k, k)).amax();
        if defect > tol::EXACT {
            return Err(Error::FrameNotOrthonormal(defect));
        }
        Ok(Frame { vectors })
    }

    /// The first `k` columns of an orthogonal matrix.
    pub fn from_orthogonal(q: &DMatrix<f64>, k: usize) -> Result<Self> {
        Self::new(q.columns(0, k).into_owned())
    }

    /// `{e_i}` for the given indices.
    pub fn coordinate(n: usize, indices: &[usize]) -> Result<Self> {
        let mut m = DMatrix::zeros(n, indices.len());
        for (c, &i) in indices.iter().enumerate() {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            m[(i, c)] = 1.0;
        }
        Self::new(m)
    }

    pub fn len(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.ncols() == 0
    }

    pub fn ambient(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i).iter().copied().collect()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    fn require_four(&self, r: &AlgebraicCurvature) -> Result<()> {
        if self.len() != 4 {
            return Err(Error::FrameSize {
                got: self.len(),
                expected: 4,
            });
        }
        if self.ambient() != r.n() {
            return Err(Error::Shape {
                rows: self.ambient(),
                cols: 4,
                expected: r.n(),
            });
        }
        Ok(())
    }
}

/// `R_1313 + R_1414 + R_2323 + R_2424 - 2 R_1234` on the frame.
pub fn isotropic_expression(r: &AlgebraicCurvature, frame: &Frame) -> Result<f64> {
    frame_quadratic(r, frame, 1.0)
}

/// `R_1313 + λ² R_1414 + R_2323 + λ² R_2424 - 2λ R_1234` on the frame.
pub fn frame_quadratic(r: &AlgebraicCurvature, frame: &Frame, lambda: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&lambda) {
        return Err(range_err("lambda", lambda, "[-1, 1]"));
    }
    frame.require_four(r)?;
    let e: Vec<Vec<f64>> = (0..4).map(|i| frame.vector(i)).collect();
    let sec = |a: usize, b: usize| r.sectional_plane(&e[a], &e[b]);
    let r1234 = r.eval(&e[0], &e[1], &e[2], &e[3]);
    let l2 = lambda * lambda;
    Ok(sec(0, 2) + l2 * sec(0, 3) + sec(1, 2) + l2 * sec(1, 3) - 2.0 * lambda * r1234)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: usize) -> Dim {
        Dim::new(n).unwrap()
    }

    fn sphere(n: usize) -> AlgebraicCurvature {
        let k = dim(n).wedge2_dim();
        AlgebraicCurvature::new(dim(n), DMatrix::identity(k, k)).unwrap()
    }

    #[test]
    fn sphere_components() {
        let r = sphere(4);
        assert_eq!(r.r(0, 1, 0, 1), 1.0);
        assert_eq!(r.r(0, 1, 1, 0), -1.0);
        assert_eq!(r.r(0, 1, 2, 3), 0.0);
        assert_eq!(r.sectional(2, 3).unwrap(), 1.0);
        assert!(matches!(r.sectional(1, 1), Err(Error::DegeneratePlane(1))));
    }

    #[test]
    fn sphere_ricci_and_scalar() {
        let r = sphere(4);
        assert!((r.ricci() - DMatrix::identity(4, 4) * 3.0).amax() < 1e-15);
        assert_eq!(r.scalar(), 12.0);
    }

    #[test]
    fn sphere_second_kind_is_identity() {
        for n in 3..=7 {
            let op = induce_second_kind(&sphere(n));
            let size = dim(n).traceless_dim();
            assert!((op.matrix() - DMatrix::identity(size, size)).amax() < 1e-12);
        }
    }

    #[test]
    fn zero_tensor_gives_zero_operator() {
        let op = induce_second_kind(&AlgebraicCurvature::zero(dim(5)));
        assert_eq!(op.matrix().amax(), 0.0);
        assert!(op.eigenvalues().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bianchi_projection_in_dim3_is_identity() {
        let m = DMatrix::identity(3, 3);
        let r = bianchi_project(dim(3), &m).unwrap();
        assert!((r.matrix() - m).amax() < 1e-15);
    }

    #[test]
    fn bianchi_projection_fixes_algebraic_tensors() {
        let r = random_curvature(dim(5), 2, 1.0);
        let again = bianchi_project(dim(5), r.matrix()).unwrap();
        assert!((again.matrix() - r.matrix()).amax() < 1e-14);
    }

    #[test]
    fn bianchi_projection_residual_random_seed1() {
        let mut rng = sampling::rng(1);
        let m = sampling::gaussian_symmetric(6, 1.0, &mut rng);
        let r = bianchi_project(dim(4), &m).unwrap();
        assert!(r.bianchi_residual() <= 1e-12);
        // In dimension four ∧⁴ is one-dimensional, spanned by the R_0123 direction;
        // a generic matrix does have a component there.
        let raw = AlgebraicCurvature {
            dim: dim(4),
            matrix: m,
        };
        assert!(raw.bianchi_residual() > 1e-3);
    }

    #[test]
    fn bianchi_rejects_nonsymmetric() {
        let mut m = DMatrix::zeros(6, 6);
        m[(0, 1)] = 1.0;
        assert!(matches!(
            bianchi_project(dim(4), &m),
            Err(Error::NotSymmetric(_))
        ));
    }

    #[test]
    fn random_curvature_is_deterministic() {
        let a = random_curvature(dim(4), 7, 1.0);
        let b = random_curvature(dim(4), 7, 1.0);
        assert_eq!(a.matrix().as_slice(), b.matrix().as_slice());
        assert!(a.bianchi_residual() <= 1e-12);
        assert_ne!(random_curvature(dim(4), 8, 1.0), a);
    }

    #[test]
    fn constructor_rejects_non_bianchi() {
        let m = DMatrix::from_fn(6, 6, |i, j| if i + j == 5 { 1.0 } else { 0.0 });
        assert!(AlgebraicCurvature::new(dim(4), m).is_err());
    }

    #[test]
    fn odot_route_matches_rbar_contraction() {
        let r = random_curvature(dim(5), 11, 1.0);
        let form = r.second_kind_form();
        let basis = standard_basis_s20(dim(5));
        let op = induce_second_kind(&r);
        for (a, x) in basis.iter().enumerate() {
            for (b, y) in basis.iter().enumerate() {
                let direct = r.rbar_form(x.matrix(), y.matrix());
                assert!((form.eval(x.matrix(), y.matrix()) - direct).abs() < 1e-12);
                assert!((op.matrix()[(a, b)] - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn trace_identity_random() {
        for n in 3..=6 {
            for seed in 0..20 {
                let r = random_curvature(dim(n), seed, 1.0);
                let op = induce_second_kind(&r);
                let s = r.scalar();
                let nf = n as f64;
                assert!((op.trace() - (nf + 2.0) / (2.0 * nf) * s).abs() < 1e-9);
                assert!((op.mean() - s / (nf * (nf - 1.0))).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn negation_and_shift_track_spectrum() {
        let op = induce_second_kind(&random_curvature(dim(4), 3, 1.0));
        let neg = op.negated();
        let direct = SecondKindOperator::from_matrix(dim(4), -op.matrix().clone()).unwrap();
        for (a, b) in neg.eigenvalues().iter().zip(direct.eigenvalues()) {
            assert!((a - b).abs() < 1e-12);
        }
        let shifted = op.shifted(0.5);
        assert!((shifted.mean() - op.mean() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn eigentensors_are_eigenvectors() {
        let r = random_curvature(dim(4), 5, 1.0);
        let op = induce_second_kind(&r);
        let form = r.second_kind_form();
        for (t, &lambda) in op.eigentensors().iter().zip(op.eigenvalues()) {
            assert!((form.quad(t) - lambda).abs() < 1e-10);
            assert!((t.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn isotropic_on_sphere_and_flat() {
        let mut rng = sampling::rng(2);
        let q = sampling::haar_orthogonal(5, &mut rng);
        let frame = Frame::from_orthogonal(&q, 4).unwrap();
        assert!((isotropic_expression(&sphere(5), &frame).unwrap() - 4.0).abs() < 1e-12);
        let flat = AlgebraicCurvature::zero(dim(5));
        assert_eq!(isotropic_expression(&flat, &frame).unwrap(), 0.0);
    }

    #[test]
    fn frame_quadratic_cases() {
        let r = random_curvature(dim(4), 9, 1.0);
        let mut rng = sampling::rng(4);
        let q = sampling::haar_orthogonal(4, &mut rng);
        let frame = Frame::from_orthogonal(&q, 4).unwrap();
        let iso = isotropic_expression(&r, &frame).unwrap();
        assert!((frame_quadratic(&r, &frame, 1.0).unwrap() - iso).abs() < 1e-14);

        let mut flipped = q.clone();
        flipped.column_mut(3).neg_mut();
        let flipped = Frame::from_orthogonal(&flipped, 4).unwrap();
        let a = frame_quadratic(&r, &frame, -1.0).unwrap();
        let b = frame_quadratic(&r, &flipped, 1.0).unwrap();
        assert!((a - b).abs() < 1e-12);

        assert!((frame_quadratic(&sphere(4), &frame, 0.0).unwrap() - 2.0).abs() < 1e-12);
        assert!(frame_quadratic(&r, &frame, 1.5).is_err());
    }

    #[test]
    fn frame_validation() {
        let m = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(Frame::new(m), Err(Error::FrameNotOrthonormal(_))));
        let three = Frame::coordinate(4, &[0, 1, 2]).unwrap();
        assert!(isotropic_expression(&sphere(4), &three).is_err());
    }

    #[test]
    fn eval_matches_components() {
        let r = random_curvature(dim(4), 13, 1.0);
        let e = |i: usize| {
            let mut v = vec![0.0; 4];
            v[i] = 1.0;
            v
        };
        for (i, j, k, l) in [(0, 1, 2, 3), (1, 3, 0, 2), (2, 1, 2, 0)] {
            assert!((r.eval(&e(i), &e(j), &e(k), &e(l)) - r.r(i, j, k, l)).abs() < 1e-15);
        }
    }
}
