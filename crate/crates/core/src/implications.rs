//! Certification of curvature conclusions drawn from cone conditions on `R̊`:
//! Ricci lower bounds, nonnegative isotropic curvature in dimension four, the
//! spectral positivity criteria, and the frame identities behind them.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::cones::{cone_margin, partial_sum, ConeParams};
use crate::curvature::{induce_second_kind, AlgebraicCurvature, Frame, SecondKindOperator};
use crate::error::{range_err, Error, Result};
use crate::sampling::{self, FrameSearch, SampleRng};
use crate::tensor_space::{symmetric_product_vec, Dim};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Certified,
    Violated,
    HypothesisNotMet,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Certified => "certified",
            Verdict::Violated => "violated",
            Verdict::HypothesisNotMet => "hypothesis-not-met",
        })
    }
}

/// Outcome of testing one conditional claim on one tensor.
///
/// `Violated` requires the hypothesis to hold strictly (margin `> tol`) and
/// the conclusion to fail strictly (margin `< -tol`); a boundary-band
/// hypothesis with a failing conclusion is reported as not met.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImplicationReport {
    pub hypothesis_margin: f64,
    pub conclusion_margin: f64,
    pub verdict: Verdict,
    /// `true` when the conclusion margin comes from sampled frames and is only an upper estimate.
    pub sampled: bool,
    pub tol: f64,
}

impl ImplicationReport {
    pub fn classify(
        hypothesis_margin: f64,
        conclusion_margin: f64,
        tol: f64,
        sampled: bool,
    ) -> Self {
        let verdict = if hypothesis_margin < -tol {
            Verdict::HypothesisNotMet
        } else if conclusion_margin >= -tol {
            Verdict::Certified
        } else if hypothesis_margin > tol {
            Verdict::Violated
        } else {
            Verdict::HypothesisNotMet
        };
        ImplicationReport {
            hypothesis_margin,
            conclusion_margin,
            verdict,
            sampled,
            tol,
        }
    }
}

/// Coefficient `c(n, α, θ)` of the Ricci lower bound `Ric >= c·λ̄·g` for `R̊ ∈ C(α, θ)`.
pub fn ricci_bound(n: usize, alpha: f64, theta: f64) -> Result<f64> {
    let dim = Dim::new(n)?;
    let big_n = dim.traceless_dim() as f64;
    if !(alpha >= 1.0 && alpha < big_n) {
        return Err(range_err("alpha", alpha, format!("[1, {big_n})")));
    }
    let nf = n as f64;
    if alpha <= nf {
        Ok((nf - 1.0) / (alpha + 1.0) * (1.0 - alpha * theta))
    } else {
        let num = nf * nf - nf * (alpha * theta + alpha - 1.0) + 2.0 * (alpha * theta - 1.0);
        let den = nf * nf + nf - 2.0 * (alpha + 1.0);
        Ok((nf - 1.0) * num / den)
    }
}

fn smallest_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Sum of the `p` smallest eigenvalues of a symmetric matrix: the exact minimum
/// of `Σ_{i<=p} M(e_i, e_i)` over orthonormal `p`-frames.
pub fn smallest_eigen_sum(m: &DMatrix<f64>, p: usize) -> f64 {
    let mut eigs: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    eigs.sort_by(f64::total_cmp);
    eigs[..p.min(eigs.len())].iter().sum()
}

/// `R̊ ∈ C(α, θ) ⇒ Ric >= ricci_bound(n, α, θ)·λ̄`.
pub fn verify_prop_ricci(
    r: &AlgebraicCurvature,
    alpha: f64,
    theta: f64,
    tol: f64,
) -> Result<ImplicationReport> {
    let op = induce_second_kind(r);
    verify_prop_ricci_with(r, &op, alpha, theta, tol)
}

pub fn verify_prop_ricci_with(
    r: &AlgebraicCurvature,
    op: &SecondKindOperator,
    alpha: f64,
    theta: f64,
    tol: f64,
) -> Result<ImplicationReport> {
    let params = ConeParams::new(alpha, theta)?;
    let c = ricci_bound(r.n(), alpha, theta)?;
    let hyp = cone_margin(op.eigenvalues(), op.mean(), params)?;
    let concl = smallest_eigenvalue(&r.ricci()) - c * op.mean();
    Ok(ImplicationReport::classify(hyp, concl, tol, false))
}

/// Both sides of the two frame identities of the cylinder argument, in a
/// frame `{e_i}` with distinguished vector `e_1 = frame[e1]`:
/// `R̊(φ_1, φ_1) = 2R_11/(n-1) - λ̄` and `Σ_{i≠1} R̊(φ_i, φ_i) = Σ_{i≠1} R_1i1i = R_11`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CylinderIdentities {
    pub lhs1: f64,
    pub rhs1: f64,
    pub lhs2: f64,
    pub rhs2: f64,
    /// `Ric(e_1, e_1)`, which the second identity also equals.
    pub ricci11: f64,
}

impl CylinderIdentities {
    pub fn max_residual(&self) -> f64 {
        (self.lhs1 - self.rhs1)
            .abs()
            .max((self.lhs2 - self.rhs2).abs())
            .max((self.rhs2 - self.ricci11).abs())
    }
}

/// `φ_1 = ((n-1) e_1⊙e_1 - Σ_{p≠1} e_p⊙e_p) / (2√(n(n-1)))` and
/// `φ_i = e_1⊙e_i / √2`, evaluated through the `R̄` contraction.
pub fn cylinder_frame_identities(
    r: &AlgebraicCurvature,
    frame: &Frame,
    e1: usize,
) -> Result<CylinderIdentities> {
    let n = r.n();
    if frame.len() != n || frame.ambient() != n {
        return Err(Error::FrameSize {
            got: frame.len(),
            expected: n,
        });
    }
    if e1 >= n {
        return Err(Error::IndexOutOfRange { index: e1, n });
    }
    let nf = n as f64;
    let e: Vec<_> = (0..n)
        .map(|i| frame.matrix().column(i).into_owned())
        .collect();
    let mut phi1 = symmetric_product_vec(&e[e1], &e[e1]) * (nf - 1.0);
    for (p, ep) in e.iter().enumerate() {
        if p != e1 {
            phi1 -= symmetric_product_vec(ep, ep);
        }
    }
    phi1 /= 2.0 * (nf * (nf - 1.0)).sqrt();
    let lhs1 = r.rbar_form(&phi1, &phi1);
    let ricci = r.ricci();
    let ricci11 = e[e1].dot(&(&ricci * &e[e1]));
    let lambda_bar = r.scalar() / (nf * (nf - 1.0));
    let rhs1 = 2.0 * ricci11 / (nf - 1.0) - lambda_bar;
    let (mut lhs2, mut rhs2) = (0.0, 0.0);
    let u = frame.vector(e1);
    for (i, ei) in e.iter().enumerate() {
        if i == e1 {
            continue;
        }
        let phi = symmetric_product_vec(&e[e1], ei) * std::f64::consts::FRAC_1_SQRT_2;
        lhs2 += r.rbar_form(&phi, &phi);
        rhs2 += r.sectional_plane(&u, &frame.vector(i));
    }
    Ok(CylinderIdentities {
        lhs1,
        rhs1,
        lhs2,
        rhs2,
        ricci11,
    })
}

/// The three traceless tensors of the four-dimensional isotropic argument:
/// `φ_1 = ¼(e_1⊙e_1 + e_2⊙e_2 - e_3⊙e_3 - e_4⊙e_4)`, `φ_2 = ½(e_1⊙e_4 - e_2⊙e_3)`,
/// `φ_3 = ½(e_1⊙e_3 + e_2⊙e_4)`.
pub fn cp2_frame_tensors(frame: &Frame) -> Result<[DMatrix<f64>; 3]> {
    if frame.len() != 4 || frame.ambient() != 4 {
        return Err(Error::FrameSize {
            got: frame.len(),
            expected: 4,
        });
    }
    let e: Vec<_> = (0..4)
        .map(|i| frame.matrix().column(i).into_owned())
        .collect();
    let sp = symmetric_product_vec;
    let phi1 = (sp(&e[0], &e[0]) + sp(&e[1], &e[1]) - sp(&e[2], &e[2]) - sp(&e[3], &e[3])) * 0.25;
    let phi2 = (sp(&e[0], &e[3]) - sp(&e[1], &e[2])) * 0.5;
    let phi3 = (sp(&e[0], &e[2]) + sp(&e[1], &e[3])) * 0.5;
    Ok([phi1, phi2, phi3])
}

/// `Σ R̊(φ_i, φ_i)` against `R_1313 + R_1414 + R_2323 + R_2424 - ½(R_1212 + R_3434) - 3R_1234`.
pub fn cp2_frame_identity(r: &AlgebraicCurvature, frame: &Frame) -> Result<(f64, f64)> {
    if r.n() != 4 {
        return Err(Error::Dimension {
            n: r.n(),
            min: 4,
            max: 4,
        });
    }
    let phis = cp2_frame_tensors(frame)?;
    let lhs = phis.iter().map(|p| r.rbar_form(p, p)).sum();
    let e: Vec<Vec<f64>> = (0..4).map(|i| frame.vector(i)).collect();
    let sec = |a: usize, b: usize| r.sectional_plane(&e[a], &e[b]);
    let rhs = sec(0, 2) + sec(0, 3) + sec(1, 2) + sec(1, 3)
        - 0.5 * (sec(0, 1) + sec(2, 3))
        - 3.0 * r.eval(&e[0], &e[1], &e[2], &e[3]);
    Ok((lhs, rhs))
}

/// `θ` of the four-dimensional isotropic cone: `1` for `α <= 3`, `9/α - 2` for `3 <= α < 9`.
pub fn pic_theta(alpha: f64) -> Result<f64> {
    if !(1.0..9.0).contains(&alpha) {
        return Err(range_err("alpha", alpha, "[1, 9)"));
    }
    Ok(if alpha <= 3.0 { 1.0 } else { 9.0 / alpha - 2.0 })
}

fn wedge_into(n: usize, u: &[f64], v: &[f64], out: &mut [f64]) {
    let mut idx = 0;
    for i in 0..n {
        for j in i + 1..n {
            out[idx] = u[i] * v[j] - u[j] * v[i];
            idx += 1;
        }
    }
}

fn quadratic(m: &DMatrix<f64>, x: &[f64]) -> f64 {
    let k = x.len();
    let data = m.as_slice();
    let mut total = 0.0;
    for (c, &xc) in x.iter().enumerate() {
        if xc == 0.0 {
            continue;
        }
        let col = &data[c * k..(c + 1) * k];
        total += xc * col.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
    }
    total
}

/// Isotropic expression on the first four columns of a column-major frame buffer,
/// as `aᵀMa + bᵀMb` with `a = e_1∧e_3 - e_2∧e_4`, `b = e_1∧e_4 + e_2∧e_3`.
pub fn isotropic_on_columns(r: &AlgebraicCurvature, frame: &[f64]) -> f64 {
    let n = r.n();
    let k = n * (n - 1) / 2;
    let col = |c: usize| &frame[c * n..(c + 1) * n];
    let mut a = vec![0.0; k];
    let mut b = vec![0.0; k];
    let mut t = vec![0.0; k];
    wedge_into(n, col(0), col(2), &mut a);
    wedge_into(n, col(1), col(3), &mut t);
    a.iter_mut().zip(&t).for_each(|(x, y)| *x -= y);
    wedge_into(n, col(0), col(3), &mut b);
    wedge_into(n, col(1), col(2), &mut t);
    b.iter_mut().zip(&t).for_each(|(x, y)| *x += y);
    quadratic(r.matrix(), &a) + quadratic(r.matrix(), &b)
}

/// Sectional curvature of the plane spanned by the first two columns.
pub fn sectional_on_columns(r: &AlgebraicCurvature, frame: &[f64]) -> f64 {
    let n = r.n();
    let mut w = vec![0.0; n * (n - 1) / 2];
    wedge_into(n, &frame[..n], &frame[n..2 * n], &mut w);
    quadratic(r.matrix(), &w)
}

/// Sampled minimum of the isotropic expression over orthonormal four-frames.
pub fn sampled_isotropic_minimum(
    r: &AlgebraicCurvature,
    search: FrameSearch,
    rng: &mut SampleRng,
) -> Result<(f64, Frame)> {
    let n = r.n();
    if n < 4 {
        return Err(Error::Dimension {
            n,
            min: 4,
            max: usize::MAX,
        });
    }
    let found = sampling::sampled_frame_minimum(n, 4, search, rng, |f| isotropic_on_columns(r, f));
    let frame = Frame::new(DMatrix::from_column_slice(n, 4, &found.frame))?;
    Ok((found.value, frame))
}

/// Sampled minimum of the sectional curvature over planes.
pub fn sampled_sectional_minimum(
    r: &AlgebraicCurvature,
    search: FrameSearch,
    rng: &mut SampleRng,
) -> f64 {
    let n = r.n();
    sampling::sampled_frame_minimum(n, 2, search, rng, |f| sectional_on_columns(r, f)).value
}

/// In dimension four, `R̊ ∈ C(α, 1)` (`α <= 3`) or `R̊ ∈ C(α, 9/α - 2)` (`3 <= α < 9`)
/// implies nonnegative isotropic curvature. The conclusion margin is a sampled minimum.
pub fn verify_prop_pic(
    r: &AlgebraicCurvature,
    alpha: f64,
    search: FrameSearch,
    rng: &mut SampleRng,
    tol: f64,
) -> Result<ImplicationReport> {
    if r.n() != 4 {
        return Err(Error::Dimension {
            n: r.n(),
            min: 4,
            max: 4,
        });
    }
    let params = ConeParams::new(alpha, pic_theta(alpha)?)?;
    let op = induce_second_kind(r);
    let hyp = cone_margin(op.eigenvalues(), op.mean(), params)?;
    let (min, _) = sampled_isotropic_minimum(r, search, rng)?;
    Ok(ImplicationReport::classify(hyp, min, tol, true))
}

/// Two-positivity of `R̊` implies positive sectional curvature (sampled planes).
pub fn verify_two_positive_sectional(
    r: &AlgebraicCurvature,
    search: FrameSearch,
    rng: &mut SampleRng,
    tol: f64,
) -> Result<ImplicationReport> {
    let op = induce_second_kind(r);
    let hyp = partial_sum(op.eigenvalues(), 2.0)?;
    let min = sampled_sectional_minimum(r, search, rng);
    Ok(ImplicationReport::classify(hyp, min, tol, true))
}

/// `4¼`-positivity of `R̊` implies positive isotropic curvature (`n >= 4`, sampled frames).
pub fn verify_fractional_pic(
    r: &AlgebraicCurvature,
    search: FrameSearch,
    rng: &mut SampleRng,
    tol: f64,
) -> Result<ImplicationReport> {
    let op = induce_second_kind(r);
    let hyp = partial_sum(op.eigenvalues(), 4.25)?;
    let (min, _) = sampled_isotropic_minimum(r, search, rng)?;
    Ok(ImplicationReport::classify(hyp, min, tol, true))
}

/// `(n + (n-2)/n)`-positivity of `R̊` implies positive Ricci curvature (exact).
pub fn verify_ricci_positive(r: &AlgebraicCurvature, tol: f64) -> Result<ImplicationReport> {
    let op = induce_second_kind(r);
    let nf = r.n() as f64;
    let hyp = partial_sum(op.eigenvalues(), nf + (nf - 2.0) / nf)?;
    let min = smallest_eigenvalue(&r.ricci());
    Ok(ImplicationReport::classify(hyp, min, tol, false))
}

/// Draws tensors whose `R̊` sits near `∂C(α, θ)`.
///
/// A base tensor (Gaussian, or `anchor` plus Gaussian noise) is shifted by a
/// multiple of the unit-sphere tensor, which moves `R̊` by `t·id`; `t` is chosen
/// so the cone margin lands on a uniform draw from `band`.
#[derive(Debug, Clone)]
pub struct BiasedGenerator {
    pub dim: Dim,
    pub params: ConeParams,
    pub anchor: Option<AlgebraicCurvature>,
    pub noise: f64,
    pub band: (f64, f64),
}

impl BiasedGenerator {
    pub fn new(dim: Dim, params: ConeParams) -> Self {
        BiasedGenerator {
            dim,
            params,
            anchor: None,
            noise: 1.0,
            band: (-0.02, 0.1),
        }
    }

    pub fn with_anchor(mut self, anchor: AlgebraicCurvature, noise: f64) -> Self {
        self.anchor = Some(anchor);
        self.noise = noise;
        self
    }

    pub fn with_band(mut self, lo: f64, hi: f64) -> Self {
        self.band = (lo, hi);
        self
    }

    pub fn sample(&self, rng: &mut SampleRng) -> Result<AlgebraicCurvature> {
        let noise = crate::curvature::random_curvature_with(self.dim, self.noise, rng);
        let base = match &self.anchor {
            Some(a) => a.plus(&noise),
            None => noise,
        };
        let u: f64 = rand::Rng::random(rng);
        let target = self.band.0 + u * (self.band.1 - self.band.0);
        shift_to_margin(&base, self.params, target)
    }
}

/// `R + t·(unit sphere)` with `t` chosen so the `C(α, θ)` margin of its `R̊` equals `target`.
pub fn shift_to_margin(
    r: &AlgebraicCurvature,
    params: ConeParams,
    target: f64,
) -> Result<AlgebraicCurvature> {
    let op = induce_second_kind(r);
    let m0 = cone_margin(op.eigenvalues(), op.mean(), params)?;
    let t = (target - m0) / (1.0 + params.theta);
    let k = r.dim().wedge2_dim();
    let shifted = r.matrix() + DMatrix::identity(k, k) * t;
    AlgebraicCurvature::new(r.dim(), shifted)
}

/// Default tolerance for implication verdicts on unit-scale tensors.
pub const IMPLICATION_TOL: f64 = tol::BOUNDARY;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::theta_cylinder;
    use crate::curvature::random_curvature;
    use crate::models::{build, ModelSpec};
    use crate::sampling::{haar_orthogonal, rng};

    fn dim(n: usize) -> Dim {
        Dim::new(n).unwrap()
    }

    fn sphere(n: usize) -> AlgebraicCurvature {
        build(&ModelSpec::Sphere { n, kappa: 1.0 }).unwrap()
    }

    #[test]
    fn ricci_bound_examples() {
        for n in 3..=8 {
            let nf = n as f64;
            let c = ricci_bound(n, nf, 0.0).unwrap();
            assert!((c - (nf - 1.0) / (nf + 1.0)).abs() < 1e-15);
        }
        assert!(ricci_bound(4, 3.0, 1.0 / 3.0).unwrap().abs() < 1e-15);
        assert!(ricci_bound(4, 9.0, 0.0).is_err());
        assert!(ricci_bound(4, 0.5, 0.0).is_err());
    }

    #[test]
    fn ricci_bound_branches_meet_at_n() {
        for n in 3..=10 {
            let nf = n as f64;
            for theta in [-0.5, 0.0, 0.1, 0.3, 1.0] {
                let left = (nf - 1.0) / (nf + 1.0) * (1.0 - nf * theta);
                let right = ricci_bound(n, nf, theta).unwrap();
                let beyond = ricci_bound(n, nf + 1e-9, theta).unwrap();
                assert!((left - right).abs() < 1e-12);
                assert!((beyond - right).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn cylinder_is_tight_for_ricci() {
        for n in 3..=7 {
            let r = build(&ModelSpec::Cylinder { n }).unwrap();
            let big_n = dim(n).traceless_dim() as f64;
            for alpha in [1.0, 2.5, n as f64, 0.5 * (n as f64 + big_n)] {
                let theta = theta_cylinder(n, alpha).unwrap();
                let rep = verify_prop_ricci(&r, alpha, theta, 1e-9).unwrap();
                assert_eq!(rep.verdict, Verdict::Certified);
                assert!(rep.hypothesis_margin.abs() < 1e-9);
                assert!(
                    rep.conclusion_margin.abs() < 1e-9,
                    "n={n} α={alpha}: {rep:?}"
                );
            }
        }
    }

    #[test]
    fn sphere_ricci_is_certified_with_slack() {
        let r = sphere(5);
        let rep = verify_prop_ricci(&r, 3.0, 0.2, 1e-9).unwrap();
        assert_eq!(rep.verdict, Verdict::Certified);
        let c = ricci_bound(5, 3.0, 0.2).unwrap();
        assert!((rep.conclusion_margin - (4.0 - c)).abs() < 1e-12);
    }

    #[test]
    fn verdict_rules() {
        assert_eq!(
            ImplicationReport::classify(1.0, -1.0, 1e-9, false).verdict,
            Verdict::Violated
        );
        assert_eq!(
            ImplicationReport::classify(0.0, -1.0, 1e-9, false).verdict,
            Verdict::HypothesisNotMet
        );
        assert_eq!(
            ImplicationReport::classify(-1.0, -1.0, 1e-9, false).verdict,
            Verdict::HypothesisNotMet
        );
        assert_eq!(
            ImplicationReport::classify(0.0, 0.0, 1e-9, false).verdict,
            Verdict::Certified
        );
    }

    #[test]
    fn cylinder_identities_examples() {
        let s = sphere(5);
        let id = cylinder_frame_identities(&s, &Frame::coordinate(5, &[0, 1, 2, 3, 4]).unwrap(), 0)
            .unwrap();
        assert!((id.lhs1 - 1.0).abs() < 1e-12 && (id.rhs1 - 1.0).abs() < 1e-12);
        let flat = AlgebraicCurvature::zero(dim(5));
        let id =
            cylinder_frame_identities(&flat, &Frame::coordinate(5, &[0, 1, 2, 3, 4]).unwrap(), 2)
                .unwrap();
        assert_eq!([id.lhs1, id.rhs1, id.lhs2, id.rhs2], [0.0; 4]);
        let r = random_curvature(dim(5), 3, 1.0);
        let q = haar_orthogonal(5, &mut rng(3));
        let id = cylinder_frame_identities(&r, &Frame::from_orthogonal(&q, 5).unwrap(), 1).unwrap();
        assert!(id.max_residual() < 1e-10, "{id:?}");
    }

    #[test]
    fn cp2_identity_examples() {
        let frame = Frame::coordinate(4, &[0, 1, 2, 3]).unwrap();
        let (l, r) = cp2_frame_identity(&sphere(4), &frame).unwrap();
        assert!((l - 3.0).abs() < 1e-12 && (r - 3.0).abs() < 1e-12);
        let (l, r) = cp2_frame_identity(&AlgebraicCurvature::zero(dim(4)), &frame).unwrap();
        assert_eq!((l, r), (0.0, 0.0));
        let t = random_curvature(dim(4), 9, 1.0);
        let (l, r) = cp2_frame_identity(&t, &frame).unwrap();
        assert!((l - r).abs() < 1e-10);
        assert!(
            cp2_frame_identity(&sphere(5), &Frame::coordinate(5, &[0, 1, 2, 3]).unwrap()).is_err()
        );
    }

    #[test]
    fn cp2_individual_terms() {
        let t = random_curvature(dim(4), 4, 1.0);
        let frame = Frame::coordinate(4, &[0, 1, 2, 3]).unwrap();
        let [p1, p2, p3] = cp2_frame_tensors(&frame).unwrap();
        let r = |a, b, c, d| t.r(a, b, c, d);
        let want1 = -r(0, 1, 0, 1) - r(2, 3, 2, 3)
            + r(0, 2, 0, 2)
            + r(1, 3, 1, 3)
            + r(0, 3, 0, 3)
            + r(1, 2, 1, 2);
        let want2 = r(0, 3, 0, 3) + r(1, 2, 1, 2) - 2.0 * r(0, 1, 2, 3) + 2.0 * r(0, 2, 3, 1);
        let want3 = r(0, 2, 0, 2) + r(1, 3, 1, 3) - 2.0 * r(0, 1, 2, 3) + 2.0 * r(0, 3, 1, 2);
        assert!((2.0 * t.rbar_form(&p1, &p1) - want1).abs() < 1e-12);
        assert!((2.0 * t.rbar_form(&p2, &p2) - want2).abs() < 1e-12);
        assert!((2.0 * t.rbar_form(&p3, &p3) - want3).abs() < 1e-12);
        for (a, pa) in [&p1, &p2, &p3].iter().enumerate() {
            assert!(pa.trace().abs() < 1e-15);
            for (b, pb) in [&p1, &p2, &p3].iter().enumerate() {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((pa.dot(pb) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn isotropic_column_path_matches_frame_path() {
        let r = random_curvature(dim(5), 12, 1.0);
        let q = haar_orthogonal(5, &mut rng(1));
        let frame = Frame::from_orthogonal(&q, 4).unwrap();
        let direct = crate::curvature::isotropic_expression(&r, &frame).unwrap();
        let fast = isotropic_on_columns(&r, frame.matrix().as_slice());
        assert!((direct - fast).abs() < 1e-12);
        let sec = sectional_on_columns(&r, frame.matrix().as_slice());
        assert!((sec - r.sectional_plane(&frame.vector(0), &frame.vector(1))).abs() < 1e-12);
    }

    #[test]
    fn sphere_pic_sampled_minimum_is_four() {
        let rep =
            verify_prop_pic(&sphere(4), 2.0, FrameSearch::default(), &mut rng(1), 1e-6).unwrap();
        assert_eq!(rep.verdict, Verdict::Certified);
        assert!((rep.conclusion_margin - 4.0).abs() < 1e-9);
        assert!(rep.sampled);
    }

    #[test]
    fn pic_theta_branches() {
        assert_eq!(pic_theta(2.0).unwrap(), 1.0);
        assert_eq!(pic_theta(3.0).unwrap(), 1.0);
        assert!((pic_theta(4.5).unwrap()).abs() < 1e-15);
        assert!(pic_theta(9.0).is_err());
    }

    #[test]
    fn shift_lands_on_target_margin() {
        let params = ConeParams::new(2.5, 0.3).unwrap();
        let r = random_curvature(dim(5), 21, 1.0);
        let s = shift_to_margin(&r, params, 0.0).unwrap();
        let op = induce_second_kind(&s);
        assert!(
            cone_margin(op.eigenvalues(), op.mean(), params)
                .unwrap()
                .abs()
                < 1e-10
        );
        let generator = BiasedGenerator::new(dim(5), params).with_band(0.01, 0.02);
        let mut g = rng(4);
        for _ in 0..20 {
            let t = generator.sample(&mut g).unwrap();
            let op = induce_second_kind(&t);
            let m = cone_margin(op.eigenvalues(), op.mean(), params).unwrap();
            assert!((0.01 - 1e-10..=0.02 + 1e-10).contains(&m));
        }
    }
}
