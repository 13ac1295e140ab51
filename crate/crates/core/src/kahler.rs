//! Complex structures, the `E⁺ ⊕ E⁻` splitting of `S²₀`, the constant
//! holomorphic sectional curvature model, and the pointwise Kähler cone diagnostic.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::cones::{b_m_alpha, cone_membership, ConeParams, ConeVerdict};
use crate::curvature::{
    bianchi_project, induce_second_kind, random_curvature_with, AlgebraicCurvature, Frame,
};
use crate::error::{range_err, Error, Result};
use crate::models::{constant_hsc_component, standard_j};
use crate::sampling::{unit_vector, SampleRng};
use crate::tensor_space::{symmetric_product_vec, wedge_pairs, wedge_vector, Dim};
use crate::tol;

/// An orthogonal `J` with `J² = -Id` on `R^{2m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStructure {
    j: DMatrix<f64>,
}

impl ComplexStructure {
    pub fn new(j: DMatrix<f64>) -> Result<Self> {
        let n = j.nrows();
        if j.ncols() != n || !n.is_multiple_of(2) || n < 2 {
            return Err(Error::Shape {
                rows: j.nrows(),
                cols: j.ncols(),
                expected: n + n % 2,
            });
        }
        let id = DMatrix::<f64>::identity(n, n);
        let square = (&j * &j + &id).amax();
        let orth = (j.transpose() * &j - &id).amax();
        let defect = square.max(orth);
        if defect > tol::EXACT {
            return Err(Error::InvalidComplexStructure(defect));
        }
        Ok(ComplexStructure { j })
    }

    /// `J e_i = e_{m+i}`, `J e_{m+i} = -e_i`.
    pub fn standard(m: usize) -> Self {
        let n = 2 * m;
        ComplexStructure {
            j: DMatrix::from_fn(n, n, |a, b| standard_j(m, a, b)),
        }
    }

    /// `Q J Qᵀ` for an orthogonal `Q`.
    pub fn conjugated(&self, q: &DMatrix<f64>) -> Result<Self> {
        Self::new(q * &self.j * q.transpose())
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.j
    }

    pub fn m(&self) -> usize {
        self.j.nrows() / 2
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.j * v
    }

    /// `J₂(u ∧ v) = Ju ∧ Jv` on the lexicographic `∧²` basis.
    pub fn on_two_forms(&self) -> DMatrix<f64> {
        let n = self.j.nrows();
        let pairs = wedge_pairs(n);
        let mut out = DMatrix::zeros(pairs.len(), pairs.len());
        for (c, &(k, l)) in pairs.iter().enumerate() {
            let jk: Vec<f64> = self.j.column(k).iter().copied().collect();
            let jl: Vec<f64> = self.j.column(l).iter().copied().collect();
            out.set_column(c, &wedge_vector(&jk, &jl));
        }
        out
    }

    /// A frame `{e_1, …, e_m, Je_1, …, Je_m}` built from the coordinate axes.
    pub fn adapted_frame(&self) -> Frame {
        let n = self.j.nrows();
        let m = n / 2;
        let mut chosen: Vec<DVector<f64>> = Vec::with_capacity(n);
        let mut axis = 0;
        while chosen.len() < n {
            let mut v = DVector::zeros(n);
            v[axis] = 1.0;
            axis += 1;
            for c in &chosen {
                v -= c * c.dot(&v);
            }
            let norm = v.norm();
            if norm < 1e-6 {
                continue;
            }
            v /= norm;
            let jv = self.apply(&v);
            chosen.push(v);
            chosen.push(jv);
        }
        let mut cols = Vec::with_capacity(n);
        cols.extend((0..m).map(|i| chosen[2 * i].clone()));
        cols.extend((0..m).map(|i| chosen[2 * i + 1].clone()));
        Frame::new(DMatrix::from_columns(&cols)).expect("Gram-Schmidt output is orthonormal")
    }

    /// `max |e_{m+i} - J e_i|` over the frame.
    pub fn adaptation_defect(&self, frame: &Frame) -> f64 {
        let m = self.m();
        (0..m)
            .map(|i| {
                let e = frame.matrix().column(i).into_owned();
                (frame.matrix().column(m + i) - self.apply(&e)).amax()
            })
            .fold(0.0, f64::max)
    }
}

/// The orthonormal bases of `E⁻` (`m² - 1` tensors) and `E⁺` (`m(m+1)` tensors)
/// built on a `J`-adapted frame; pair-indexed families are listed over `i < j`
/// lexicographically.
#[derive(Debug, Clone)]
pub struct KahlerBases {
    pub m: usize,
    pub phi_minus: Vec<DMatrix<f64>>,
    pub psi_minus: Vec<DMatrix<f64>>,
    pub eta: Vec<DMatrix<f64>>,
    pub phi_plus: Vec<DMatrix<f64>>,
    pub psi_plus: Vec<DMatrix<f64>>,
    pub theta: Vec<DMatrix<f64>>,
}

impl KahlerBases {
    pub fn minus(&self) -> Vec<&DMatrix<f64>> {
        self.phi_minus
            .iter()
            .chain(&self.psi_minus)
            .chain(&self.eta)
            .collect()
    }

    pub fn plus(&self) -> Vec<&DMatrix<f64>> {
        self.phi_plus
            .iter()
            .chain(&self.psi_plus)
            .chain(&self.theta)
            .collect()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let m = self.m;
        (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .collect()
    }
}

/// `φ^∓_ij = ½(e_i⊙e_j ± Je_i⊙Je_j)`, `ψ^∓_ij = ½(e_i⊙Je_j ∓ Je_i⊙e_j)`,
/// `η_k`, `θ_i = (e_i⊙e_i - Je_i⊙Je_i)/(2√2)`, `θ_{m+i} = e_i⊙Je_i/√2`.
pub fn build_kahler_bases(frame: &Frame, j: &ComplexStructure) -> Result<KahlerBases> {
    let n = j.matrix().nrows();
    if frame.len() != n || frame.ambient() != n {
        return Err(Error::FrameSize {
            got: frame.len(),
            expected: n,
        });
    }
    let defect = j.adaptation_defect(frame);
    if defect > tol::EXACT {
        return Err(Error::NotJAdapted(defect));
    }
    let m = n / 2;
    let e: Vec<DVector<f64>> = (0..m)
        .map(|i| frame.matrix().column(i).into_owned())
        .collect();
    let je: Vec<DVector<f64>> = (0..m)
        .map(|i| frame.matrix().column(m + i).into_owned())
        .collect();
    let sp = symmetric_product_vec;
    let mut bases = KahlerBases {
        m,
        phi_minus: Vec::new(),
        psi_minus: Vec::new(),
        eta: Vec::new(),
        phi_plus: Vec::new(),
        psi_plus: Vec::new(),
        theta: Vec::new(),
    };
    for a in 0..m {
        for b in a + 1..m {
            bases
                .phi_minus
                .push((sp(&e[a], &e[b]) + sp(&je[a], &je[b])) * 0.5);
            bases
                .psi_minus
                .push((sp(&e[a], &je[b]) - sp(&je[a], &e[b])) * 0.5);
            bases
                .phi_plus
                .push((sp(&e[a], &e[b]) - sp(&je[a], &je[b])) * 0.5);
            bases
                .psi_plus
                .push((sp(&e[a], &je[b]) + sp(&je[a], &e[b])) * 0.5);
        }
    }
    for k in 1..m {
        let kf = k as f64;
        let scale = 1.0 / (8.0 * kf * (kf + 1.0)).sqrt();
        let mut t = (sp(&e[k], &e[k]) + sp(&je[k], &je[k])) * (kf * scale);
        for i in 0..k {
            t -= (sp(&e[i], &e[i]) + sp(&je[i], &je[i])) * scale;
        }
        bases.eta.push(t);
    }
    let s2 = 2.0 * std::f64::consts::SQRT_2;
    for i in 0..m {
        bases
            .theta
            .push((sp(&e[i], &e[i]) - sp(&je[i], &je[i])) / s2);
    }
    for i in 0..m {
        bases
            .theta
            .push(sp(&e[i], &je[i]) * std::f64::consts::FRAC_1_SQRT_2);
    }
    Ok(bases)
}

/// Constant holomorphic sectional curvature `c` on `C^m` with the standard `J`.
pub fn constant_hsc(m: usize, c: f64) -> Result<(AlgebraicCurvature, ComplexStructure)> {
    if m < 1 {
        return Err(range_err("m", m as f64, "[1, ∞)"));
    }
    let dim = Dim::new(2 * m)?;
    let r = AlgebraicCurvature::from_components(dim, |i, j, k, l| {
        constant_hsc_component(m, c, i, j, k, l)
    })?;
    Ok((r, ComplexStructure::standard(m)))
}

/// `max |R(X,Y,JZ,JW) - R(X,Y,Z,W)|`, i.e. `‖M J₂ - M‖_max`.
pub fn kahler_residual(r: &AlgebraicCurvature, j: &ComplexStructure) -> Result<f64> {
    if j.matrix().nrows() != r.n() {
        return Err(Error::Shape {
            rows: j.matrix().nrows(),
            cols: j.matrix().ncols(),
            expected: r.n(),
        });
    }
    Ok((r.matrix() * j.on_two_forms() - r.matrix()).amax())
}

/// `R(X, JX, X, JX) / |X|⁴`.
pub fn holomorphic_sectional(
    r: &AlgebraicCurvature,
    j: &ComplexStructure,
    x: &DVector<f64>,
) -> f64 {
    let jx = j.apply(x);
    let xs: Vec<f64> = x.iter().copied().collect();
    let jxs: Vec<f64> = jx.iter().copied().collect();
    r.eval(&xs, &jxs, &xs, &jxs) / x.norm_squared().powi(2)
}

/// Mean and population variance of the holomorphic sectional curvature over `samples` random unit vectors.
pub fn hsc_statistics(
    r: &AlgebraicCurvature,
    j: &ComplexStructure,
    samples: usize,
    rng: &mut SampleRng,
) -> (f64, f64) {
    let values: Vec<f64> = (0..samples.max(1))
        .map(|_| holomorphic_sectional(r, j, &unit_vector(r.n(), rng)))
        .collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
    (mean, var)
}

/// Orthogonal projection of an algebraic curvature tensor onto the Kähler ones:
/// alternates `M ↦ P M P` (`P = (I + J₂)/2`) with the Bianchi projection.
/// Returns the tensor and the number of rounds used.
pub fn kahler_project(
    r: &AlgebraicCurvature,
    j: &ComplexStructure,
    max_rounds: usize,
) -> Result<(AlgebraicCurvature, usize)> {
    let k = r.dim().wedge2_dim();
    let p = (DMatrix::identity(k, k) + j.on_two_forms()) * 0.5;
    let mut current = r.clone();
    for round in 1..=max_rounds {
        let m = &p * current.matrix() * &p;
        current = bianchi_project(r.dim(), &((&m + m.transpose()) * 0.5))?;
        let scale = current.matrix().amax().max(1.0);
        if kahler_residual(&current, j)? <= tol::EXACT * scale {
            return Ok((current, round));
        }
    }
    Err(Error::NotKahler(kahler_residual(&current, j)?))
}

/// Random rounds cap for [`kahler_project`] when generating corpora.
pub const KAHLER_ROUNDS: usize = 200;

/// Random Kähler curvature tensor for the standard `J` on `C^m`.
pub fn random_kahler(m: usize, scale: f64, rng: &mut SampleRng) -> Result<AlgebraicCurvature> {
    let dim = Dim::new(2 * m)?;
    let j = ComplexStructure::standard(m);
    let r = random_curvature_with(dim, scale, rng);
    Ok(kahler_project(&r, &j, KAHLER_ROUNDS)?.0)
}

/// Residuals of the four trace identities on a `J`-adapted frame:
/// `R̊(φ⁻_ij) + R̊(ψ⁻_ij) = -2R(e_i,Je_i,e_j,Je_j)`;
/// `R̊(θ_i) = R̊(θ_{m+i}) = R(e_i,Je_i,e_i,Je_i)`;
/// `Σ_{E⁺} R̊ = 2m(2m-1)λ̄`; `Σ_{E⁻} R̊ = -(m-1)(2m-1)λ̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceIdentityResiduals {
    pub pair_sum: f64,
    pub theta: f64,
    pub plus_trace: f64,
    pub minus_trace: f64,
}

impl TraceIdentityResiduals {
    pub fn max(&self) -> f64 {
        self.pair_sum
            .max(self.theta)
            .max(self.plus_trace)
            .max(self.minus_trace)
    }
}

fn require_kahler(r: &AlgebraicCurvature, j: &ComplexStructure) -> Result<()> {
    let residual = kahler_residual(r, j)?;
    if residual > tol::KAHLER_INPUT * r.matrix().amax().max(1.0) {
        return Err(Error::NotKahler(residual));
    }
    Ok(())
}

fn frame_cols(frame: &Frame) -> Vec<Vec<f64>> {
    (0..frame.len()).map(|i| frame.vector(i)).collect()
}

pub fn trace_identities(
    r: &AlgebraicCurvature,
    j: &ComplexStructure,
    frame: &Frame,
) -> Result<TraceIdentityResiduals> {
    require_kahler(r, j)?;
    let bases = build_kahler_bases(frame, j)?;
    let m = bases.m;
    let q = |t: &DMatrix<f64>| r.rbar_form(t, t);
    let v = frame_cols(frame);
    let hol = |a: usize, b: usize| r.eval(&v[a], &v[m + a], &v[b], &v[m + b]);
    let mut pair_sum: f64 = 0.0;
    for (idx, &(a, b)) in bases.pairs().iter().enumerate() {
        let lhs = q(&bases.phi_minus[idx]) + q(&bases.psi_minus[idx]);
        pair_sum = pair_sum.max((lhs + 2.0 * hol(a, b)).abs());
    }
    let mut theta: f64 = 0.0;
    for i in 0..m {
        let h = hol(i, i);
        theta = theta
            .max((q(&bases.theta[i]) - h).abs())
            .max((q(&bases.theta[m + i]) - h).abs());
    }
    let mf = m as f64;
    let nf = 2.0 * mf;
    let lambda_bar = r.scalar() / (nf * (nf - 1.0));
    let plus: f64 = bases.plus().into_iter().map(q).sum();
    let minus: f64 = bases.minus().into_iter().map(q).sum();
    Ok(TraceIdentityResiduals {
        pair_sum,
        theta,
        plus_trace: (plus - 2.0 * mf * (2.0 * mf - 1.0) * lambda_bar).abs(),
        minus_trace: (minus + (mf - 1.0) * (2.0 * mf - 1.0) * lambda_bar).abs(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct KahlerDiagnostic {
    pub m: usize,
    pub b_m_alpha: f64,
    /// `R̊ ∈ C(α, θ)`.
    pub positive: ConeVerdict,
    /// `-R̊ ∈ C(α, θ)`.
    pub negative: ConeVerdict,
    pub norm: f64,
    pub hsc_mean: f64,
    pub hsc_variance: f64,
    /// Largest deviation from `R(e_i,Je_i,e_j,Je_j) = (2m-1)/(m+1)·λ̄` (`i < j`) and
    /// `R(e_i,Je_i,e_i,Je_i) = 2(2m-1)/(m+1)·λ̄` on the adapted frame.
    pub equality_residual: f64,
    /// Set when `θ < B_{m,α}` and a sign is a member: whether `‖R‖ <= 1e-7`.
    pub flatness: Option<bool>,
    /// Set when `θ = B_{m,α}`, `α ≠ m² - 1`, and a sign is a member: whether the
    /// HSC variance and equality residual are within `1e-6`.
    pub constant_hsc: Option<bool>,
}

impl KahlerDiagnostic {
    pub fn passed(&self) -> bool {
        self.flatness.unwrap_or(true) && self.constant_hsc.unwrap_or(true)
    }
}

/// Pointwise algebraic content of the Kähler rigidity statement at `(α, θ)`.
pub fn kahler_cone_diagnostic(
    r: &AlgebraicCurvature,
    j: &ComplexStructure,
    alpha: f64,
    theta: f64,
    hsc_samples: usize,
    rng: &mut SampleRng,
) -> Result<KahlerDiagnostic> {
    require_kahler(r, j)?;
    let m = j.m();
    let b = b_m_alpha(m, alpha)?;
    let params = ConeParams::new(alpha, theta)?;
    let op = induce_second_kind(r);
    let positive = cone_membership(&op, params)?;
    let negative = cone_membership(&op.negated(), params)?;
    let member = positive.class.is_member() || negative.class.is_member();
    let norm = r.norm();
    let (hsc_mean, hsc_variance) = hsc_statistics(r, j, hsc_samples, rng);

    let mf = m as f64;
    let lambda_bar = op.mean();
    let mixed = (2.0 * mf - 1.0) / (mf + 1.0) * lambda_bar;
    let frame = j.adapted_frame();
    let v = frame_cols(&frame);
    let mut equality_residual: f64 = 0.0;
    for a in 0..m {
        for c in a..m {
            let value = r.eval(&v[a], &v[m + a], &v[c], &v[m + c]);
            let want = if a == c { 2.0 * mixed } else { mixed };
            equality_residual = equality_residual.max((value - want).abs());
        }
    }

    let band = tol::BOUNDARY;
    let flatness = (member && theta < b - band).then_some(norm <= tol::FLAT);
    let knee = mf * mf - 1.0;
    let constant_hsc = (member && (theta - b).abs() <= band && (alpha - knee).abs() > band)
        .then_some(hsc_variance <= tol::HSC_VARIANCE && equality_residual <= tol::HSC_VARIANCE);
    Ok(KahlerDiagnostic {
        m,
        b_m_alpha: b,
        positive,
        negative,
        norm,
        hsc_mean,
        hsc_variance,
        equality_residual,
        flatness,
        constant_hsc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build, ModelSpec};
    use crate::sampling::{haar_orthogonal, rng};
    use crate::tensor_space::gram_matrix;

    #[test]
    fn standard_structure_is_valid() {
        for m in 1..=4 {
            let j = ComplexStructure::standard(m);
            assert!(ComplexStructure::new(j.matrix().clone()).is_ok());
            let f = j.adapted_frame();
            assert!(j.adaptation_defect(&f) < 1e-15);
            assert_eq!(f.matrix(), &DMatrix::identity(2 * m, 2 * m));
        }
        assert!(ComplexStructure::new(DMatrix::identity(4, 4)).is_err());
    }

    #[test]
    fn bases_are_orthonormal_and_split() {
        for m in 2..=4 {
            let j = ComplexStructure::standard(m);
            let b = build_kahler_bases(&j.adapted_frame(), &j).unwrap();
            assert_eq!(b.minus().len(), m * m - 1);
            assert_eq!(b.plus().len(), m * (m + 1));
            let all: Vec<DMatrix<f64>> = b.minus().into_iter().chain(b.plus()).cloned().collect();
            let n = 2 * m;
            assert_eq!(all.len(), Dim::new(n).unwrap().traceless_dim());
            let g = gram_matrix(&all);
            assert!((g - DMatrix::identity(all.len(), all.len())).amax() < 1e-12);
            assert!(all.iter().all(|t| t.trace().abs() < 1e-14));
        }
    }

    #[test]
    fn bases_on_conjugated_structure() {
        let q = haar_orthogonal(6, &mut rng(5));
        let j = ComplexStructure::standard(3).conjugated(&q).unwrap();
        let f = j.adapted_frame();
        let b = build_kahler_bases(&f, &j).unwrap();
        let all: Vec<DMatrix<f64>> = b.minus().into_iter().chain(b.plus()).cloned().collect();
        assert!((gram_matrix(&all) - DMatrix::identity(20, 20)).amax() < 1e-12);
        let bad = Frame::coordinate(6, &[0, 1, 2, 3, 4, 5]).unwrap();
        assert!(matches!(
            build_kahler_bases(&bad, &j),
            Err(Error::NotJAdapted(_))
        ));
    }

    #[test]
    fn cp_eigenspaces_are_e_minus_and_e_plus() {
        for m in 2..=4 {
            let (r, j) = constant_hsc(m, 4.0).unwrap();
            let b = build_kahler_bases(&j.adapted_frame(), &j).unwrap();
            let form = r.second_kind_form();
            for t in b.minus() {
                assert!((form.quad(t) + 2.0).abs() < 1e-9);
            }
            for t in b.plus() {
                assert!((form.quad(t) - 4.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn constant_hsc_examples() {
        let (r, j) = constant_hsc(2, 4.0).unwrap();
        let cp2 = build(&ModelSpec::CpFubiniStudy { m: 2, c: 4.0 }).unwrap();
        assert_eq!(r.matrix(), cp2.matrix());
        assert!(kahler_residual(&r, &j).unwrap() < 1e-12);
        let (mean, var) = hsc_statistics(&r, &j, 200, &mut rng(1));
        assert!((mean - 4.0).abs() < 1e-12 && var < 1e-20);
        let (flat, _) = constant_hsc(3, 0.0).unwrap();
        assert_eq!(flat.norm(), 0.0);
        let (r, _) = constant_hsc(3, 4.0).unwrap();
        let op = induce_second_kind(&r);
        let n = 6.0;
        assert!((op.trace() - (n + 2.0) / (2.0 * n) * r.scalar()).abs() < 1e-9);
    }

    #[test]
    fn projection_produces_kahler_tensors() {
        let mut g = rng(3);
        for m in 2..=3 {
            let r = random_kahler(m, 1.0, &mut g).unwrap();
            let j = ComplexStructure::standard(m);
            assert!(kahler_residual(&r, &j).unwrap() <= 1e-12 * r.matrix().amax().max(1.0));
            assert!(r.bianchi_residual() <= 1e-12);
            assert!(r.norm() > 0.1);
        }
    }

    #[test]
    fn trace_identities_on_models() {
        for m in 2..=3 {
            let (r, j) = constant_hsc(m, 4.0).unwrap();
            let res = trace_identities(&r, &j, &j.adapted_frame()).unwrap();
            assert!(res.max() < 1e-10, "{res:?}");
        }
        let j = ComplexStructure::standard(2);
        let flat = AlgebraicCurvature::zero(Dim::new(4).unwrap());
        assert_eq!(
            trace_identities(&flat, &j, &j.adapted_frame())
                .unwrap()
                .max(),
            0.0
        );
        let sphere = build(&ModelSpec::Sphere { n: 4, kappa: 1.0 }).unwrap();
        assert!(matches!(
            trace_identities(&sphere, &j, &j.adapted_frame()),
            Err(Error::NotKahler(_))
        ));
    }

    #[test]
    fn cp_on_boundary_has_constant_hsc() {
        let mut g = rng(9);
        for m in 2..=3 {
            let (r, j) = constant_hsc(m, 4.0).unwrap();
            let upper = ((2 * m - 1) * (m + 1)) as f64;
            for alpha in [1.0, (m * m - 1) as f64 - 0.5, (m * m) as f64, upper - 0.5] {
                let b = b_m_alpha(m, alpha).unwrap();
                let d = kahler_cone_diagnostic(&r, &j, alpha, b, 500, &mut g).unwrap();
                assert_eq!(
                    d.positive.class,
                    crate::cones::ConeClass::Boundary,
                    "m={m} α={alpha}"
                );
                assert_eq!(d.constant_hsc, Some(true));
                assert!(d.passed());
            }
        }
    }

    #[test]
    fn negative_model_mirrors() {
        let (r, j) = constant_hsc(2, -4.0).unwrap();
        let d = kahler_cone_diagnostic(&r, &j, 2.0, b_m_alpha(2, 2.0).unwrap(), 200, &mut rng(1))
            .unwrap();
        assert_eq!(d.negative.class, crate::cones::ConeClass::Boundary);
        assert!(!d.positive.class.is_member());
        assert_eq!(d.constant_hsc, Some(true));
    }

    #[test]
    fn cp1_cp1_witnesses_the_excluded_alpha() {
        let r = build(&ModelSpec::CpProduct { m: 2, k: 1, c: 4.0 }).unwrap();
        let j = ComplexStructure::standard(2);
        let d = kahler_cone_diagnostic(&r, &j, 3.0, 1.0, 500, &mut rng(2)).unwrap();
        assert_eq!(d.positive.class, crate::cones::ConeClass::Boundary);
        assert_eq!(d.constant_hsc, None);
        assert!(d.hsc_variance > 1e-2);
    }
}
