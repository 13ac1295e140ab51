//! Exterior `p`-forms and the curvature term of the Bochner formula written
//! through the eigentensors of `R̊`, together with the estimates used to make
//! it nonnegative.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::cones::{cone_margin, partial_sum, ConeParams, ConeVerdict};
use crate::curvature::{induce_second_kind, AlgebraicCurvature, Frame, SecondKindOperator};
use crate::error::{range_err, Error, Result};
use crate::implications::{smallest_eigen_sum, ImplicationReport};
use crate::sampling::{gaussian, SampleRng};
use crate::tensor_space::{standard_basis_s20, symmetric_product_vec, wedge_pairs, Dim};
use crate::tol;

/// Strictly increasing multi-indices of length `p` in `{0, …, n-1}`, in lexicographic order.
#[derive(Debug, Clone)]
pub struct MultiIndexSpace {
    n: usize,
    p: usize,
    indices: Vec<Vec<usize>>,
    position: Vec<usize>,
}

impl MultiIndexSpace {
    pub fn new(n: usize, p: usize) -> Result<Self> {
        let dim = Dim::new(n)?;
        if p > dim.n() {
            return Err(range_err("p", p as f64, format!("[0, {n}]")));
        }
        let mut indices = Vec::new();
        let mut current = Vec::with_capacity(p);
        fn walk(
            n: usize,
            p: usize,
            start: usize,
            current: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if current.len() == p {
                out.push(current.clone());
                return;
            }
            for i in start..n {
                current.push(i);
                walk(n, p, i + 1, current, out);
                current.pop();
            }
        }
        walk(n, p, 0, &mut current, &mut indices);
        let mut position = vec![usize::MAX; 1 << n];
        for (pos, idx) in indices.iter().enumerate() {
            position[mask(idx)] = pos;
        }
        Ok(MultiIndexSpace {
            n,
            p,
            indices,
            position,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[Vec<usize>] {
        &self.indices
    }

    /// Sign and position of an arbitrary index tuple, `None` on a repeated index.
    pub fn locate(&self, tuple: &[usize]) -> Option<(f64, usize)> {
        let m = tuple.iter().try_fold(0usize, |m, &i| {
            let bit = 1 << i;
            (m & bit == 0).then_some(m | bit)
        })?;
        // Parity of the sorting permutation from the inversion count.
        let mut inversions = 0;
        for a in 0..tuple.len() {
            for b in a + 1..tuple.len() {
                if tuple[a] > tuple[b] {
                    inversions += 1;
                }
            }
        }
        let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        Some((sign, self.position[m]))
    }

    /// Matrix of the derivation `(Aω)(X_1, …, X_p) = Σ_k ω(X_1, …, A X_k, …, X_p)`
    /// for an arbitrary `n x n` matrix `A`, acting on coefficient vectors.
    pub fn derivation(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        let len = self.len();
        let mut out = DMatrix::zeros(len, len);
        let mut tuple = vec![0; self.p];
        for (row, idx) in self.indices.iter().enumerate() {
            for k in 0..self.p {
                tuple.copy_from_slice(idx);
                for j in 0..self.n {
                    let coeff = a[(j, idx[k])];
                    if coeff == 0.0 {
                        continue;
                    }
                    tuple[k] = j;
                    if let Some((sign, col)) = self.locate(&tuple) {
                        out[(row, col)] += sign * coeff;
                    }
                }
            }
        }
        out
    }
}

fn mask(idx: &[usize]) -> usize {
    idx.iter().fold(0, |m, &i| m | (1 << i))
}

/// A `p`-form stored by its coefficients `ω_I` on increasing multi-indices;
/// `|ω|² = Σ_I ω_I²`.
#[derive(Debug, Clone, PartialEq)]
pub struct PForm {
    n: usize,
    p: usize,
    coeffs: DVector<f64>,
}

impl PForm {
    pub fn new(n: usize, p: usize, coeffs: DVector<f64>) -> Result<Self> {
        let expected = binomial(n, p);
        if coeffs.len() != expected {
            return Err(Error::Shape {
                rows: coeffs.len(),
                cols: 1,
                expected,
            });
        }
        Dim::new(n)?;
        Ok(PForm { n, p, coeffs })
    }

    pub fn zero(n: usize, p: usize) -> Result<Self> {
        Self::new(n, p, DVector::zeros(binomial(n, p)))
    }

    /// `e^{i_1} ∧ … ∧ e^{i_p}` for any ordering of distinct indices (sign included).
    pub fn basis(space: &MultiIndexSpace, indices: &[usize]) -> Result<Self> {
        if indices.len() != space.p() {
            return Err(range_err(
                "degree",
                indices.len() as f64,
                format!("{}", space.p()),
            ));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= space.n()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                n: space.n(),
            });
        }
        let (sign, pos) = space
            .locate(indices)
            .ok_or_else(|| range_err("repeated index", indices[0] as f64, "distinct indices"))?;
        let mut coeffs = DVector::zeros(space.len());
        coeffs[pos] = sign;
        Ok(PForm {
            n: space.n(),
            p: space.p(),
            coeffs,
        })
    }

    pub fn random(n: usize, p: usize, rng: &mut SampleRng) -> Result<Self> {
        let len = binomial(n, p);
        Self::new(n, p, DVector::from_fn(len, |_, _| gaussian(rng)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn coefficients(&self) -> &DVector<f64> {
        &self.coeffs
    }

    /// `ω(e_{i_1}, …, e_{i_p})` for an arbitrary tuple, extended alternatingly.
    pub fn get(&self, space: &MultiIndexSpace, tuple: &[usize]) -> f64 {
        match space.locate(tuple) {
            Some((sign, pos)) => sign * self.coeffs[pos],
            None => 0.0,
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.coeffs.norm_squared()
    }

    pub fn inner(&self, other: &PForm) -> f64 {
        self.coeffs.dot(&other.coeffs)
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `(Sω)(X_1, …, X_p) = Σ_k ω(X_1, …, S X_k, …, X_p)`.
pub fn s_action(s: &DMatrix<f64>, omega: &PForm) -> Result<PForm> {
    if s.nrows() != omega.n || s.ncols() != omega.n {
        return Err(Error::Shape {
            rows: s.nrows(),
            cols: s.ncols(),
            expected: omega.n,
        });
    }
    let space = MultiIndexSpace::new(omega.n, omega.p)?;
    let coeffs = space.derivation(s) * &omega.coeffs;
    PForm::new(omega.n, omega.p, coeffs)
}

/// `(|ω|², 2n/(p(n-p)(n+2)) Σ_α |S_α ω|²)` over the standard orthonormal basis of `S²₀`.
pub fn norm_identity_check(omega: &PForm) -> Result<(f64, f64)> {
    let (n, p) = (omega.n, omega.p);
    if p == 0 || p >= n {
        return Err(range_err("p", p as f64, format!("[1, {}]", n - 1)));
    }
    let space = MultiIndexSpace::new(n, p)?;
    let total: f64 = standard_basis_s20(Dim::new(n)?)
        .iter()
        .map(|b| (space.derivation(b.matrix()) * &omega.coeffs).norm_squared())
        .sum();
    let (nf, pf) = (n as f64, p as f64);
    Ok((
        omega.norm_squared(),
        2.0 * nf / (pf * (nf - pf) * (nf + 2.0)) * total,
    ))
}

/// Symmetric matrix of the quadratic form `ω ↦ (3/2) g(Ric_L(ω), ω)` on
/// coefficient vectors of `p`-forms.
#[derive(Debug, Clone)]
pub struct CurvatureTermOperator {
    pub n: usize,
    pub p: usize,
    pub matrix: DMatrix<f64>,
}

impl CurvatureTermOperator {
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        e.sort_by(f64::total_cmp);
        e
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn quad(&self, omega: &PForm) -> f64 {
        omega.coeffs.dot(&(&self.matrix * &omega.coeffs))
    }

    pub fn max_difference(&self, other: &CurvatureTermOperator) -> f64 {
        (&self.matrix - &other.matrix).amax()
    }
}

fn check_degree(n: usize, p: usize) -> Result<()> {
    if p == 0 || p >= n {
        return Err(range_err("p", p as f64, format!("[1, {}]", n - 1)));
    }
    Ok(())
}

/// `Σ_α w_α L_αᵀ L_α` for eigentensors `S_α` with weights `w_α`, where `L_α` is the derivation matrix.
fn weighted_eigentensor_form(
    op: &SecondKindOperator,
    space: &MultiIndexSpace,
    weights: &[f64],
) -> DMatrix<f64> {
    let len = space.len();
    let mut out = DMatrix::zeros(len, len);
    for (t, &w) in op.eigentensors().iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        let l = space.derivation(t);
        out += l.transpose() * &l * w;
    }
    out
}

/// `Ric(ω, ω) = (1/p) Σ_{j,k} R_jk ⟨ι_j ω, ι_k ω⟩` as a matrix; equals
/// `(1/p)·(derivation by Ric)`.
pub fn ricci_form(r: &AlgebraicCurvature, space: &MultiIndexSpace) -> DMatrix<f64> {
    let d = space.derivation(&r.ricci());
    (&d + d.transpose()) * (0.5 / space.p() as f64)
}

/// `Σ λ_α |S_α ω|² + p(n-2p)/n Ric(ω, ω) + p²/n² S |ω|²`, with `{S_α}` any
/// orthonormal eigenbasis of `R̊`.
pub fn curvature_term(r: &AlgebraicCurvature, p: usize) -> Result<CurvatureTermOperator> {
    let op = induce_second_kind(r);
    curvature_term_with(r, &op, p)
}

pub fn curvature_term_with(
    r: &AlgebraicCurvature,
    op: &SecondKindOperator,
    p: usize,
) -> Result<CurvatureTermOperator> {
    let n = r.n();
    check_degree(n, p)?;
    let space = MultiIndexSpace::new(n, p)?;
    let (nf, pf) = (n as f64, p as f64);
    let mut m = weighted_eigentensor_form(op, &space, op.eigenvalues());
    m += ricci_form(r, &space) * (pf * (nf - 2.0 * pf) / nf);
    let len = space.len();
    m += DMatrix::identity(len, len) * (pf * pf / (nf * nf) * r.scalar());
    Ok(CurvatureTermOperator {
        n,
        p,
        matrix: (&m + m.transpose()) * 0.5,
    })
}

/// `(3/2)` times the classical Weitzenböck term `Σ_{a,b} R̂_ab ⟨Ξ_a ω, Ξ_b ω⟩`,
/// where `Ξ_a` runs over `e_i ∧ e_j` acting on `V` as `v ↦ ⟨e_i,v⟩e_j - ⟨e_j,v⟩e_i`
/// and then on forms as a derivation.
pub fn weitzenbock_oracle(r: &AlgebraicCurvature, p: usize) -> Result<CurvatureTermOperator> {
    let n = r.n();
    check_degree(n, p)?;
    let space = MultiIndexSpace::new(n, p)?;
    let xi: Vec<DMatrix<f64>> = wedge_pairs(n)
        .into_iter()
        .map(|(i, j)| {
            let mut a = DMatrix::zeros(n, n);
            a[(j, i)] = 1.0;
            a[(i, j)] = -1.0;
            space.derivation(&a)
        })
        .collect();
    let len = space.len();
    let mut m = DMatrix::zeros(len, len);
    let rhat = r.matrix();
    for (a, xa) in xi.iter().enumerate() {
        for (b, xb) in xi.iter().enumerate() {
            let w = rhat[(a, b)];
            if w != 0.0 {
                m += xa.transpose() * xb * w;
            }
        }
    }
    m *= 1.5;
    Ok(CurvatureTermOperator {
        n,
        p,
        matrix: (&m + m.transpose()) * 0.5,
    })
}

/// `Σ_α (λ_α + β λ̄) L_αᵀ L_α`, the form the weight principle bounds from below.
pub fn weighted_form(op: &SecondKindOperator, beta: f64, p: usize) -> Result<DMatrix<f64>> {
    let n = op.dim().n();
    check_degree(n, p)?;
    let space = MultiIndexSpace::new(n, p)?;
    let shift = beta * op.mean();
    let weights: Vec<f64> = op.eigenvalues().iter().map(|l| l + shift).collect();
    Ok(weighted_eigentensor_form(op, &space, &weights))
}

/// If `R̊ + βλ̄·id` is `(n+2)/2`-nonnegative, `Σ_α (λ_α + βλ̄)|S_α ω|² >= 0` on `p`-forms.
pub fn weight_principle_check(
    r: &AlgebraicCurvature,
    beta: f64,
    p: usize,
    tol: f64,
) -> Result<ImplicationReport> {
    let op = induce_second_kind(r);
    let nf = r.n() as f64;
    let shifted: Vec<f64> = op
        .eigenvalues()
        .iter()
        .map(|l| l + beta * op.mean())
        .collect();
    let hyp = partial_sum(&shifted, 0.5 * (nf + 2.0))?;
    let form = weighted_form(&op, beta, p)?;
    let min = form
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(ImplicationReport::classify(hyp, min, tol, false))
}

fn q_tensors(frame: &Frame) -> (Vec<Vec<DMatrix<f64>>>, Vec<DMatrix<f64>>) {
    let n = frame.len();
    let e: Vec<_> = (0..n)
        .map(|i| frame.matrix().column(i).into_owned())
        .collect();
    let phi = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| symmetric_product_vec(&e[i], &e[j]) * std::f64::consts::FRAC_1_SQRT_2)
                .collect()
        })
        .collect();
    let psi = (0..n - 1)
        .map(|k| {
            // One-based k+1: coefficient (n-k-1) on e_k⊙e_k.
            let rest = (n - k - 1) as f64;
            let mut t = symmetric_product_vec(&e[k], &e[k]) * rest;
            for el in &e[k + 1..] {
                t -= symmetric_product_vec(el, el);
            }
            t / (2.0 * (rest * (rest + 1.0)).sqrt())
        })
        .collect();
    (phi, psi)
}

/// `Q` from its definition
/// `2(n-p+1) Σ_{i<j<=p} a_ij + (n-p) Σ_{i<=p<j} a_ij + (n-p) Σ_{k<=p} b_k`
/// and from `(n-p+2) Σ_{i<=p} R_ii - (n-1) p λ̄`, in the given orthonormal basis.
pub fn q_quantity(r: &AlgebraicCurvature, frame: &Frame, p: usize) -> Result<(f64, f64)> {
    let n = r.n();
    if frame.len() != n || frame.ambient() != n {
        return Err(Error::FrameSize {
            got: frame.len(),
            expected: n,
        });
    }
    if p == 0 || 2 * p > n {
        return Err(range_err("p", p as f64, format!("[1, {}]", n / 2)));
    }
    let (phi, psi) = q_tensors(frame);
    let a = |i: usize, j: usize| r.rbar_form(&phi[i][j], &phi[i][j]);
    let (nf, pf) = (n as f64, p as f64);
    let mut inner = 0.0;
    for i in 0..p {
        for j in i + 1..p {
            inner += a(i, j);
        }
    }
    let mut cross = 0.0;
    for i in 0..p {
        for j in p..n {
            cross += a(i, j);
        }
    }
    let b: f64 = psi[..p].iter().map(|t| r.rbar_form(t, t)).sum();
    let definition = 2.0 * (nf - pf + 1.0) * inner + (nf - pf) * (cross + b);
    let ricci = r.ricci();
    let trace_p: f64 = (0..p)
        .map(|i| {
            let v = frame.matrix().column(i);
            v.dot(&(&ricci * v))
        })
        .sum();
    let lambda_bar = r.scalar() / (nf * (nf - 1.0));
    let closed = (nf - pf + 2.0) * trace_p - (nf - 1.0) * pf * lambda_bar;
    Ok((definition, closed))
}

/// `(Q, 2(n-p+1)·(λ_1 + … + λ_{(n-1)p/2}))` for the given basis; the claim is `Q >= bound`.
pub fn q_lower_bound_check(
    r: &AlgebraicCurvature,
    op: &SecondKindOperator,
    frame: &Frame,
    p: usize,
) -> Result<(f64, f64)> {
    let n = r.n();
    if p < 2 || 2 * p > n {
        return Err(range_err("p", p as f64, format!("[2, {}]", n / 2)));
    }
    let (q, _) = q_quantity(r, frame, p)?;
    let (nf, pf) = (n as f64, p as f64);
    let bound = 2.0 * (nf - pf + 1.0) * partial_sum(op.eigenvalues(), (nf - 1.0) * pf / 2.0)?;
    Ok((q, bound))
}

/// `R̊ ∈ C((n-1)p/2, θ) ⇒ Σ_{i<=p} R_ii >= (n-1)p/(n-p+2)·(1-(n-p+1)θ)·λ̄`
/// for every orthonormal basis. The minimum over bases is the sum of the `p`
/// smallest Ricci eigenvalues, so the conclusion margin is exact.
pub fn p_ricci_check(
    r: &AlgebraicCurvature,
    p: usize,
    theta: f64,
    tol: f64,
) -> Result<ImplicationReport> {
    let n = r.n();
    if p == 0 || 2 * p > n {
        return Err(range_err("p", p as f64, format!("[1, {}]", n / 2)));
    }
    let (nf, pf) = (n as f64, p as f64);
    let op = induce_second_kind(r);
    let params = ConeParams::new((nf - 1.0) * pf / 2.0, theta)?;
    let hyp = cone_margin(op.eigenvalues(), op.mean(), params)?;
    let coeff = (nf - 1.0) * pf / (nf - pf + 2.0) * (1.0 - (nf - pf + 1.0) * theta);
    let concl = smallest_eigen_sum(&r.ricci(), p) - coeff * op.mean();
    Ok(ImplicationReport::classify(hyp, concl, tol, false))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Definiteness {
    Positive,
    Semidefinite,
    Indefinite,
}

impl std::fmt::Display for Definiteness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Definiteness::Positive => "positive",
            Definiteness::Semidefinite => "semidefinite",
            Definiteness::Indefinite => "indefinite",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BettiCertificate {
    pub p: usize,
    pub class: Definiteness,
    pub min_eigenvalue: f64,
    /// Membership of `R̊` in `C((n+2)/2, θ)`.
    pub cone: ConeVerdict,
    pub tol: f64,
}

/// Sign class of the curvature term on `p`-forms, with the `(n+2)/2` cone verdict at `θ`.
pub fn betti_certificate(r: &AlgebraicCurvature, p: usize, theta: f64) -> Result<BettiCertificate> {
    let n = r.n();
    if n < 5 {
        return Err(Error::Dimension {
            n,
            min: 5,
            max: usize::MAX,
        });
    }
    if p < 2 || 2 * p > n {
        return Err(range_err("p", p as f64, format!("[2, {}]", n / 2)));
    }
    let op = induce_second_kind(r);
    let term = curvature_term_with(r, &op, p)?;
    let min = term.min_eigenvalue();
    let tol = tol::KAHLER_INPUT * term.matrix.amax().max(1.0);
    let class = if min > tol {
        Definiteness::Positive
    } else if min >= -tol {
        Definiteness::Semidefinite
    } else {
        Definiteness::Indefinite
    };
    let params = ConeParams::new(0.5 * (n as f64 + 2.0), theta)?;
    let cone = crate::cones::cone_membership(&op, params)?;
    Ok(BettiCertificate {
        p,
        class,
        min_eigenvalue: min,
        cone,
        tol,
    })
}
