//! Eigenvalue cones `C(α, θ)`: operators whose average of the smallest `α`
//! eigenvalues is at least `-θ λ̄`, plus the closed-form boundary thresholds.

use serde::Serialize;

use crate::curvature::SecondKindOperator;
use crate::error::{range_err, Error, Result};
use crate::tol;

/// `f(A, x) = a_1 + … + a_⌊x⌋ + (x - ⌊x⌋) a_{⌊x⌋+1}` over ascending `values`.
pub fn partial_sum(values: &[f64], x: f64) -> Result<f64> {
    let len = values.len();
    if !(x >= 1.0 && x <= len as f64) {
        return Err(range_err("x", x, format!("[1, {len}]")));
    }
    if values.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Unsorted);
    }
    let whole = x.floor() as usize;
    let frac = x - whole as f64;
    let mut sum: f64 = values[..whole].iter().sum();
    if whole < len && frac > 0.0 {
        sum += frac * values[whole];
    }
    Ok(sum)
}

/// Parameters `(α, θ)` with `α >= 1` and `θ > -1`. The upper limit `α < N`
/// depends on the dimension and is checked on use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeParams {
    pub alpha: f64,
    pub theta: f64,
}

impl ConeParams {
    pub fn new(alpha: f64, theta: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 1.0 {
            return Err(range_err("alpha", alpha, "[1, N)"));
        }
        if !theta.is_finite() || theta <= -1.0 {
            return Err(range_err("theta", theta, "(-1, ∞)"));
        }
        Ok(ConeParams { alpha, theta })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeClass {
    Interior,
    Boundary,
    Outside,
}

impl ConeClass {
    pub fn from_margin(margin: f64, tol: f64) -> Self {
        if margin > tol {
            ConeClass::Interior
        } else if margin < -tol {
            ConeClass::Outside
        } else {
            ConeClass::Boundary
        }
    }

    /// Interior or boundary.
    pub fn is_member(self) -> bool {
        self != ConeClass::Outside
    }
}

impl std::fmt::Display for ConeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ConeClass::Interior => "interior",
            ConeClass::Boundary => "boundary",
            ConeClass::Outside => "outside",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeVerdict {
    pub params: ConeParams,
    /// `α⁻¹(λ_1 + … + λ_α) + θ λ̄`, unrounded.
    pub margin: f64,
    pub class: ConeClass,
    pub tol: f64,
}

/// Classifies the spectrum of `op` against `C(α, θ)` with the default boundary band.
pub fn cone_membership(op: &SecondKindOperator, p: ConeParams) -> Result<ConeVerdict> {
    cone_membership_tol(op, p, tol::BOUNDARY)
}

pub fn cone_membership_tol(
    op: &SecondKindOperator,
    p: ConeParams,
    tol: f64,
) -> Result<ConeVerdict> {
    let margin = cone_margin(op.eigenvalues(), op.mean(), p)?;
    Ok(ConeVerdict {
        params: p,
        margin,
        class: ConeClass::from_margin(margin, tol),
        tol,
    })
}

/// Margin for an ascending spectrum with mean `mean`; rejects `α >= N`.
pub fn cone_margin(eigenvalues: &[f64], mean: f64, p: ConeParams) -> Result<f64> {
    let size = eigenvalues.len();
    if p.alpha >= size as f64 {
        return Err(range_err("alpha", p.alpha, format!("[1, {size})")));
    }
    Ok(partial_sum(eigenvalues, p.alpha)? / p.alpha + p.theta * mean)
}

/// Smallest `θ` putting the spectrum in `C(α, θ)`; `None` when `λ̄ <= 0`
/// (then no `θ > -1` works unless the operator vanishes).
pub fn critical_theta(op: &SecondKindOperator, alpha: f64) -> Result<Option<f64>> {
    let avg = cone_margin(
        op.eigenvalues(),
        op.mean(),
        ConeParams { alpha, theta: 0.0 },
    )?;
    if op.mean() <= 0.0 {
        return Ok(None);
    }
    Ok(Some(-avg / op.mean()))
}

fn traceless_dim(n: usize) -> usize {
    (n - 1) * (n + 2) / 2
}

/// `Θ̄_{n,α}`: the cone parameter on whose boundary `S^{n-1} × S¹` sits.
pub fn theta_cylinder(n: usize, alpha: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::Dimension {
            n,
            min: 3,
            max: usize::MAX,
        });
    }
    let big_n = traceless_dim(n) as f64;
    if !(alpha >= 1.0 && alpha < big_n) {
        return Err(range_err("alpha", alpha, format!("[1, {big_n})")));
    }
    let nf = n as f64;
    if alpha <= nf {
        Ok(1.0 / alpha)
    } else {
        Ok(1.0 / alpha + nf * (nf - alpha) / ((nf - 2.0) * alpha))
    }
}

/// `A_{n,p}` for `n >= 5`, `2 <= p <= n/2`.
pub fn a_np(n: usize, p: usize) -> Result<f64> {
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
    let (n, p) = (n as f64, p as f64);
    let num = 2.0 * (n - 1.0) * (n * p + n - p * p);
    let den = 2.0 * (n - 1.0) * (n - 2.0 * p) * (n - p + 1.0) + (n - p) * (n + 2.0) * (n - p + 2.0);
    Ok(num / den)
}

/// `A_{n,2}` in the reduced form `2(n-1)(3n-4) / (3n³ - 12n² + 14n - 8)`.
pub fn a_n2_reduced(n: usize) -> f64 {
    let n = n as f64;
    2.0 * (n - 1.0) * (3.0 * n - 4.0) / (3.0 * n.powi(3) - 12.0 * n * n + 14.0 * n - 8.0)
}

/// `B_{m,α}`: the cone parameter on whose boundary `CP^m` (Fubini–Study) sits.
pub fn b_m_alpha(m: usize, alpha: f64) -> Result<f64> {
    if m < 2 {
        return Err(range_err("m", m as f64, "[2, ∞)"));
    }
    let mf = m as f64;
    let upper = (2.0 * mf - 1.0) * (mf + 1.0);
    if !(alpha >= 1.0 && alpha < upper) {
        return Err(range_err("alpha", alpha, format!("[1, {upper})")));
    }
    let base = (2.0 * mf - 1.0) / (mf + 1.0);
    let knee = mf * mf - 1.0;
    if alpha <= knee {
        Ok(base)
    } else {
        Ok(base * (3.0 * knee - 2.0 * alpha) / alpha)
    }
}

/// `true` unless `op ∈ C(α₁, θ₁)` while `op ∉ C(α₂, θ₂)` for `α₁ <= α₂`, `θ₁ <= θ₂`.
///
/// The hypothesis uses the exact cone (margin `>= 0`); the conclusion allows the
/// default boundary band.
pub fn cone_monotonicity_check(
    op: &SecondKindOperator,
    alpha1: f64,
    alpha2: f64,
    theta1: f64,
    theta2: f64,
) -> Result<bool> {
    if alpha1 > alpha2 || theta1 > theta2 {
        return Err(Error::Config(format!(
            "monotonicity needs α₁ <= α₂ and θ₁ <= θ₂, got ({alpha1}, {theta1}) and ({alpha2}, {theta2})"
        )));
    }
    let first = cone_membership(op, ConeParams::new(alpha1, theta1)?)?;
    if first.margin < 0.0 {
        return Ok(true);
    }
    let second = cone_membership(op, ConeParams::new(alpha2, theta2)?)?;
    Ok(second.margin >= -tol::BOUNDARY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{induce_second_kind, random_curvature, AlgebraicCurvature};
    use crate::tensor_space::Dim;
    use nalgebra::DMatrix;

    #[test]
    fn partial_sum_examples() {
        assert_eq!(partial_sum(&[1.0, 2.0, 3.0], 2.0).unwrap(), 3.0);
        assert_eq!(partial_sum(&[1.0, 2.0, 3.0], 1.5).unwrap(), 2.0);
        assert_eq!(partial_sum(&[1.0, 2.0, 3.0], 3.0).unwrap(), 6.0);
        assert!(partial_sum(&[1.0, 2.0, 3.0], 0.5).is_err());
        assert!(partial_sum(&[1.0, 2.0, 3.0], 3.5).is_err());
        assert!(matches!(
            partial_sum(&[2.0, 1.0], 1.0),
            Err(Error::Unsorted)
        ));
    }

    #[test]
    fn theta_cylinder_examples() {
        assert!((theta_cylinder(4, 3.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(theta_cylinder(3, 10.0 / 3.0).unwrap().abs() < 1e-15);
        for n in 3..=8 {
            let nf = n as f64;
            let left = 1.0 / nf;
            let right = 1.0 / nf + nf * (nf - nf) / ((nf - 2.0) * nf);
            assert!((theta_cylinder(n, nf).unwrap() - left).abs() < 1e-15);
            assert!((left - right).abs() < 1e-15);
            assert!((theta_cylinder(n, nf + 1e-9).unwrap() - left).abs() < 1e-8);
        }
        assert!(theta_cylinder(3, 5.0).is_err());
        assert!(theta_cylinder(3, 0.5).is_err());
    }

    #[test]
    fn a_np_examples() {
        assert!((a_np(5, 2).unwrap() - 88.0 / 137.0).abs() < 1e-15);
        assert!((a_n2_reduced(5) - 88.0 / 137.0).abs() < 1e-15);
        for n in [6usize, 8, 10, 12] {
            let nf = n as f64;
            assert!((a_np(n, n / 2).unwrap() - 2.0 * (nf - 1.0) / (nf + 2.0)).abs() < 1e-14);
        }
        for n in 5..=12 {
            assert!((a_np(n, 2).unwrap() - a_n2_reduced(n)).abs() < 1e-14);
            for p in 2..n / 2 {
                assert!(a_np(n, p + 1).unwrap() > a_np(n, p).unwrap());
            }
        }
        assert!(a_np(4, 2).is_err());
        assert!(a_np(7, 4).is_err());
        assert!(a_np(7, 1).is_err());
    }

    #[test]
    fn b_m_alpha_examples() {
        for i in 0..60 {
            let alpha = 3.0 + 6.0 * i as f64 / 60.0;
            assert!((b_m_alpha(2, alpha).unwrap() - (9.0 - 2.0 * alpha) / alpha).abs() < 1e-14);
        }
        for m in 2..=5 {
            let mf = m as f64;
            assert!((b_m_alpha(m, 1.0).unwrap() - (2.0 * mf - 1.0) / (mf + 1.0)).abs() < 1e-15);
            assert!(b_m_alpha(m, 1.5 * (mf * mf - 1.0)).unwrap().abs() < 1e-14);
            let knee = mf * mf - 1.0;
            let above = b_m_alpha(m, knee + 1e-10).unwrap();
            assert!((above - b_m_alpha(m, knee).unwrap()).abs() < 1e-8);
        }
        assert!(b_m_alpha(1, 1.0).is_err());
        assert!(b_m_alpha(2, 9.0).is_err());
    }

    #[test]
    fn sphere_is_interior_everywhere() {
        let dim = Dim::new(4).unwrap();
        let op =
            induce_second_kind(&AlgebraicCurvature::new(dim, DMatrix::identity(6, 6)).unwrap());
        for &(alpha, theta) in &[(1.0, 0.0), (4.5, -0.5), (8.9, 3.0)] {
            let v = cone_membership(&op, ConeParams::new(alpha, theta).unwrap()).unwrap();
            assert_eq!(v.class, ConeClass::Interior);
            assert!((v.margin - (1.0 + theta)).abs() < 1e-12);
        }
        assert!(cone_membership(&op, ConeParams::new(9.0, 0.0).unwrap()).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(ConeParams::new(0.9, 0.0).is_err());
        assert!(ConeParams::new(1.0, -1.0).is_err());
        assert!(ConeParams::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn monotonicity_on_random_operators() {
        let dim = Dim::new(4).unwrap();
        for seed in 0..200 {
            let op = induce_second_kind(&random_curvature(dim, seed, 1.0));
            // Shift into the nonnegative cone so the hypothesis is exercised.
            let op = op.shifted(-op.eigenvalues()[0] + 0.01 * seed as f64);
            assert!(cone_monotonicity_check(&op, 1.0, 2.0, 0.0, 0.0).unwrap());
            for &(a1, a2, t1, t2) in &[
                (1.0, 3.5, 0.0, 0.2),
                (2.5, 2.5, -0.5, 0.1),
                (3.0, 8.0, 0.3, 0.3),
            ] {
                assert!(cone_monotonicity_check(&op, a1, a2, t1, t2).unwrap());
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn partial_sum_matches_brute_force_and_average_bound(
                mut values in proptest::collection::vec(-10.0f64..10.0, 2..30),
                t in 0.0f64..1.0,
            ) {
                values.sort_by(f64::total_cmp);
                let len = values.len();
                let x = 1.0 + t * (len as f64 - 1.0);
                let f = partial_sum(&values, x).unwrap();
                // Oracle: integrate the step function k ↦ a_k over [0, x].
                let mut oracle = 0.0;
                let mut left = x;
                for &v in &values {
                    let take = left.min(1.0);
                    if take <= 0.0 { break; }
                    oracle += take * v;
                    left -= take;
                }
                prop_assert!((f - oracle).abs() < 1e-9);
                let mean = values.iter().sum::<f64>() / len as f64;
                prop_assert!(f <= x * mean + 1e-9);
            }

            #[test]
            fn partial_sum_is_convex_in_x(
                mut values in proptest::collection::vec(-10.0f64..10.0, 3..20),
                a in 0.0f64..1.0, b in 0.0f64..1.0,
            ) {
                values.sort_by(f64::total_cmp);
                let hi = values.len() as f64;
                let x = 1.0 + a * (hi - 1.0);
                let y = 1.0 + b * (hi - 1.0);
                let mid = 0.5 * (x + y);
                let fx = partial_sum(&values, x).unwrap();
                let fy = partial_sum(&values, y).unwrap();
                let fm = partial_sum(&values, mid).unwrap();
                prop_assert!(fm <= 0.5 * (fx + fy) + 1e-9);
                let lip = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                prop_assert!((fx - fy).abs() <= lip * (x - y).abs() + 1e-9);
            }
        }
    }
}
