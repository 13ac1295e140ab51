//! Model curvature tensors with closed-form second-kind spectra: spheres,
//! `S^{n-1} × S¹`, `S^k × S^{n-k}`, `CP^m`, `CP^k × CP^{m-k}`, and flat space.

use serde::{Deserialize, Serialize};

use crate::cones::{b_m_alpha, theta_cylinder, ConeParams};
use crate::curvature::AlgebraicCurvature;
use crate::error::{Error, Result};
use crate::tensor_space::Dim;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// `S^n(κ)`.
    Sphere {
        n: usize,
        kappa: f64,
    },
    /// `S^{n-1} × S¹` with the unit round factor; the circle is a flat block.
    Cylinder {
        n: usize,
    },
    /// `S^k(κ₁) × S^{n-k}(κ₂)`.
    SphereProduct {
        n: usize,
        k: usize,
        kappa1: f64,
        kappa2: f64,
    },
    /// `CP^m` with constant holomorphic sectional curvature `c` (Fubini–Study at `c = 4`).
    CpFubiniStudy {
        m: usize,
        c: f64,
    },
    /// `CP^k × CP^{m-k}`, both factors with holomorphic sectional curvature `c`.
    CpProduct {
        m: usize,
        k: usize,
        c: f64,
    },
    Flat {
        n: usize,
    },
}

impl ModelSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelSpec::Sphere { .. } => "sphere",
            ModelSpec::Cylinder { .. } => "cylinder",
            ModelSpec::SphereProduct { .. } => "sphere_product",
            ModelSpec::CpFubiniStudy { .. } => "cp_fubini_study",
            ModelSpec::CpProduct { .. } => "cp_product",
            ModelSpec::Flat { .. } => "flat",
        }
    }

    /// Real dimension of the model.
    pub fn n(&self) -> usize {
        match *self {
            ModelSpec::Sphere { n, .. }
            | ModelSpec::Cylinder { n }
            | ModelSpec::SphereProduct { n, .. }
            | ModelSpec::Flat { n } => n,
            ModelSpec::CpFubiniStudy { m, .. } | ModelSpec::CpProduct { m, .. } => 2 * m,
        }
    }

    pub fn is_kahler(&self) -> bool {
        matches!(
            self,
            ModelSpec::CpFubiniStudy { .. } | ModelSpec::CpProduct { .. }
        )
    }

    pub fn validate(&self) -> Result<Dim> {
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        match *self {
            ModelSpec::Sphere { n, kappa } if !kappa.is_finite() => {
                bad(format!("sphere(n={n}) needs a finite κ, got {kappa}"))
            }
            ModelSpec::Cylinder { n } if n < 3 => bad(format!("cylinder needs n >= 3, got {n}")),
            ModelSpec::SphereProduct {
                n,
                k,
                kappa1,
                kappa2,
            } => {
                if k < 2 || k + 2 > n {
                    return bad(format!(
                        "sphere_product needs 2 <= k <= n-2, got k={k}, n={n}"
                    ));
                }
                if !(kappa1 > 0.0 && kappa2 > 0.0) {
                    return bad(format!(
                        "sphere_product needs positive curvatures, got κ₁={kappa1}, κ₂={kappa2}"
                    ));
                }
                Dim::new(n)
            }
            ModelSpec::CpFubiniStudy { m, c } => {
                if m < 2 {
                    return bad(format!("cp_fubini_study needs m >= 2, got {m}"));
                }
                if !c.is_finite() {
                    return bad(format!("cp_fubini_study needs a finite c, got {c}"));
                }
                Dim::new(2 * m)
            }
            ModelSpec::CpProduct { m, k, c } => {
                if m < 2 || k < 1 || k >= m {
                    return bad(format!(
                        "cp_product needs m >= 2 and 1 <= k <= m-1, got m={m}, k={k}"
                    ));
                }
                if !c.is_finite() {
                    return bad(format!("cp_product needs a finite c, got {c}"));
                }
                Dim::new(2 * m)
            }
            _ => Dim::new(self.n()),
        }
        .map_err(|e| Error::InvalidModel(e.to_string()))
    }
}

/// Constant sectional curvature `κ` on `R^n`: `R_ijkl = κ(δ_ik δ_jl - δ_il δ_jk)`.
pub fn constant_curvature_component(kappa: f64, i: usize, j: usize, k: usize, l: usize) -> f64 {
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    kappa * (d(i, k) * d(j, l) - d(i, l) * d(j, k))
}

/// Entry `J[a][b] = g(e_a, J e_b)` of the standard complex structure on `R^{2m}`
/// (`J e_i = e_{m+i}`, `J e_{m+i} = -e_i`).
#[inline]
pub fn standard_j(m: usize, a: usize, b: usize) -> f64 {
    if a == b + m && b < m {
        1.0
    } else if b == a + m && a < m {
        -1.0
    } else {
        0.0
    }
}

/// Constant holomorphic sectional curvature `c` on `C^m` with the standard `J`:
/// `R(X,Y,Z,W) = c/4 [g(X,Z)g(Y,W) - g(X,W)g(Y,Z) + g(X,JZ)g(Y,JW) - g(X,JW)g(Y,JZ) + 2 g(X,JY)g(Z,JW)]`.
pub fn constant_hsc_component(m: usize, c: f64, i: usize, j: usize, k: usize, l: usize) -> f64 {
    let j_ = |a: usize, b: usize| standard_j(m, a, b);
    c / 4.0
        * (constant_curvature_component(1.0, i, j, k, l) + j_(i, k) * j_(j, l)
            - j_(i, l) * j_(j, k)
            + 2.0 * j_(i, j) * j_(k, l))
}

/// Product tensor: block sum of factors placed on the given coordinate indices,
/// mixed components zero.
fn block_sum(n: usize, factors: &[(AlgebraicCurvature, Vec<usize>)]) -> Result<AlgebraicCurvature> {
    let mut owner = vec![None; n];
    for (f, (_, map)) in factors.iter().enumerate() {
        for (local, &global) in map.iter().enumerate() {
            owner[global] = Some((f, local));
        }
    }
    let dim = Dim::new(n)?;
    AlgebraicCurvature::from_components(dim, |i, j, k, l| {
        match (owner[i], owner[j], owner[k], owner[l]) {
            (Some((a, i)), Some((b, j)), Some((c, k)), Some((d, l)))
                if a == b && b == c && c == d =>
            {
                factors[a].0.r(i, j, k, l)
            }
            _ => 0.0,
        }
    })
}

fn sphere_tensor(n: usize, kappa: f64) -> Result<AlgebraicCurvature> {
    let dim = Dim::with_limit(n, usize::MAX)?;
    AlgebraicCurvature::from_components(dim, |i, j, k, l| {
        constant_curvature_component(kappa, i, j, k, l)
    })
}

fn hsc_tensor(m: usize, c: f64) -> Result<AlgebraicCurvature> {
    let dim = Dim::with_limit(2 * m, usize::MAX)?;
    AlgebraicCurvature::from_components(dim, |i, j, k, l| constant_hsc_component(m, c, i, j, k, l))
}

/// Curvature tensor of a model space.
pub fn build(spec: &ModelSpec) -> Result<AlgebraicCurvature> {
    let dim = spec.validate()?;
    let n = dim.n();
    match *spec {
        ModelSpec::Sphere { kappa, .. } => sphere_tensor(n, kappa),
        ModelSpec::Flat { .. } => Ok(AlgebraicCurvature::zero(dim)),
        ModelSpec::Cylinder { .. } => {
            let round = sphere_tensor(n - 1, 1.0)?;
            block_sum(n, &[(round, (0..n - 1).collect())])
        }
        ModelSpec::SphereProduct {
            k, kappa1, kappa2, ..
        } => {
            let first = sphere_tensor(k, kappa1)?;
            let second = sphere_tensor(n - k, kappa2)?;
            block_sum(n, &[(first, (0..k).collect()), (second, (k..n).collect())])
        }
        ModelSpec::CpFubiniStudy { m, c } => hsc_tensor(m, c),
        ModelSpec::CpProduct { m, k, c } => {
            // Factor coordinates e_1..e_k, Je_1..Je_k map into the ambient
            // standard complex frame so that the product J is the standard one.
            let first = hsc_tensor(k, c)?;
            let second = hsc_tensor(m - k, c)?;
            let map1: Vec<usize> = (0..k).chain(m..m + k).collect();
            let map2: Vec<usize> = (k..m).chain(m + k..2 * m).collect();
            block_sum(n, &[(first, map1), (second, map2)])
        }
    }
}

/// Closed-form spectrum of `R̊` as ascending `(eigenvalue, multiplicity)` pairs.
pub fn expected_spectrum(spec: &ModelSpec) -> Result<Vec<(f64, usize)>> {
    let dim = spec.validate()?;
    let n = dim.n();
    let nf = n as f64;
    let big_n = dim.traceless_dim();
    let raw: Vec<(f64, usize)> = match *spec {
        ModelSpec::Sphere { kappa, .. } => vec![(kappa, big_n)],
        ModelSpec::Flat { .. } => vec![(0.0, big_n)],
        ModelSpec::Cylinder { .. } => vec![
            (-(nf - 2.0) / nf, 1),
            (0.0, n - 1),
            (1.0, (n - 2) * (n + 1) / 2),
        ],
        ModelSpec::SphereProduct {
            k, kappa1, kappa2, ..
        } => {
            let kf = k as f64;
            vec![
                (
                    -(kf * (nf - kf - 1.0) * kappa2 + (nf - kf) * (kf - 1.0) * kappa1) / nf,
                    1,
                ),
                (0.0, k * (n - k)),
                (kappa1, (k - 1) * (k + 2) / 2),
                (kappa2, (n - k - 1) * (n - k + 2) / 2),
            ]
        }
        ModelSpec::CpFubiniStudy { m, c } => {
            let s = c / 4.0;
            vec![(-2.0 * s, m * m - 1), (4.0 * s, m * (m + 1))]
        }
        ModelSpec::CpProduct { m, k, c } => {
            let s = c / 4.0;
            let (kf, mf) = (k as f64, m as f64);
            vec![
                (s * (-2.0 - 4.0 * kf * (mf - kf) / mf), 1),
                (-2.0 * s, k * k + (m - k) * (m - k) - 2),
                (0.0, 4 * k * (m - k)),
                (4.0 * s, k * (k + 1) + (m - k) * (m - k + 1)),
            ]
        }
    };
    let mut merged: Vec<(f64, usize)> = Vec::new();
    let mut sorted: Vec<(f64, usize)> = raw.into_iter().filter(|&(_, mult)| mult > 0).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (value, mult) in sorted {
        match merged.last_mut() {
            Some(last) if (last.0 - value).abs() < 1e-12 => last.1 += mult,
            _ => merged.push((value, mult)),
        }
    }
    debug_assert_eq!(merged.iter().map(|e| e.1).sum::<usize>(), big_n);
    Ok(merged)
}

/// `S^k × S^{n-k}` with `(k-1)κ₁ = (n-k-1)κ₂` (Einstein) and scalar curvature
/// `n(n-1)`, i.e. `κ₁ = (n-1)/(k-1)` and `κ₂ = (n-1)/(n-k-1)`.
pub fn einstein_sphere_product(n: usize, k: usize) -> Result<ModelSpec> {
    if k < 2 || k + 2 > n {
        return Err(Error::InvalidModel(format!(
            "Einstein sphere product needs 2 <= k <= n-2, got k={k}, n={n}"
        )));
    }
    let nf = n as f64;
    let spec = ModelSpec::SphereProduct {
        n,
        k,
        kappa1: (nf - 1.0) / (k as f64 - 1.0),
        kappa2: (nf - 1.0) / ((n - k) as f64 - 1.0),
    };
    spec.validate()?;
    Ok(spec)
}

/// Groups an ascending spectrum into `(mean, multiplicity)` clusters split at gaps larger than `gap`.
pub fn cluster_spectrum(eigenvalues: &[f64], gap: f64) -> Vec<(f64, usize)> {
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for &v in eigenvalues {
        match clusters.last_mut() {
            Some(c) if v - c[c.len() - 1] <= gap => c.push(v),
            _ => clusters.push(vec![v]),
        }
    }
    clusters
        .into_iter()
        .map(|c| (c.iter().sum::<f64>() / c.len() as f64, c.len()))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumComparison {
    pub computed: Vec<(f64, usize)>,
    pub expected: Vec<(f64, usize)>,
    /// Largest `|λ_i(computed) - λ_i(expected)|` over the sorted, expanded lists.
    pub max_error: f64,
    pub multiplicities_match: bool,
}

impl SpectrumComparison {
    pub fn passes(&self, tol: f64) -> bool {
        self.multiplicities_match && self.max_error <= tol
    }
}

pub fn compare_spectrum(
    eigenvalues: &[f64],
    expected: &[(f64, usize)],
    gap: f64,
) -> SpectrumComparison {
    let computed = cluster_spectrum(eigenvalues, gap);
    let expanded: Vec<f64> = expected
        .iter()
        .flat_map(|&(v, m)| std::iter::repeat_n(v, m))
        .collect();
    let max_error = if expanded.len() == eigenvalues.len() {
        eigenvalues
            .iter()
            .zip(&expanded)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let multiplicities_match =
        computed.len() == expected.len() && computed.iter().zip(expected).all(|(c, e)| c.1 == e.1);
    SpectrumComparison {
        computed,
        expected: expected.to_vec(),
        max_error,
        multiplicities_match,
    }
}

/// Cone parameters at which the model is claimed to lie on the boundary.
pub fn model_boundaries(spec: &ModelSpec) -> Result<Vec<ConeParams>> {
    let dim = spec.validate()?;
    let n = dim.n();
    let big_n = dim.traceless_dim() as f64;
    let nf = n as f64;
    let mut out = Vec::new();
    match *spec {
        ModelSpec::Cylinder { .. } => {
            for alpha in [1.0, 0.5 * (nf + 2.0), nf, 0.5 * (nf + big_n)] {
                if alpha < big_n {
                    out.push(ConeParams::new(alpha, theta_cylinder(n, alpha)?)?);
                }
            }
        }
        ModelSpec::CpFubiniStudy { m, c } if c > 0.0 => {
            let knee = (m * m - 1) as f64;
            for alpha in [1.0, knee, 1.5 * knee, 0.5 * (knee + big_n)] {
                out.push(ConeParams::new(alpha, b_m_alpha(m, alpha)?)?);
            }
        }
        ModelSpec::SphereProduct {
            k, kappa1, kappa2, ..
        } if ((k as f64 - 1.0) * kappa1 - ((n - k) as f64 - 1.0) * kappa2).abs() < 1e-12 => {
            out.push(ConeParams::new(
                0.5 * (nf + 2.0),
                2.0 * (nf - 1.0) / (nf + 2.0),
            )?);
        }
        ModelSpec::CpProduct { m, c, .. } if c > 0.0 => {
            let mf = m as f64;
            out.push(ConeParams::new(
                mf * mf - 1.0,
                (2.0 * mf - 1.0) / (mf + 1.0),
            )?);
        }
        _ => {}
    }
    Ok(out)
}
