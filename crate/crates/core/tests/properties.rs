//! Property tests for curvature, cones, models, implications, Bochner and Kähler invariants.

use nalgebra::DMatrix;
use proptest::prelude::*;
use secondkind::bochner::{
    curvature_term_with, norm_identity_check, q_quantity, weight_principle_check,
    weitzenbock_oracle, PForm,
};
use secondkind::claims::kahler_instance;
use secondkind::cones::{b_m_alpha, cone_margin, ConeParams};
use secondkind::curvature::random_curvature_with;
use secondkind::implications::{
    cp2_frame_identity, cylinder_frame_identities, shift_to_margin, verify_prop_ricci, Verdict,
};
use secondkind::io::TensorFile;
use secondkind::kahler::{kahler_cone_diagnostic, trace_identities, ComplexStructure};
use secondkind::models::{build, ModelSpec};
use secondkind::sampling::{haar_orthogonal, rng, rng_for};
use secondkind::tensor_space::standard_basis_s20;
use secondkind::{induce_second_kind, AlgebraicCurvature, Dim, Frame};

fn tensor(n: usize, seed: u64) -> AlgebraicCurvature {
    random_curvature_with(Dim::new(n).unwrap(), 1.0, &mut rng(seed))
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn trace_identity_and_mean(n in 3usize..=6, seed in any::<u64>()) {
        let r = tensor(n, seed);
        let op = induce_second_kind(&r);
        let nf = n as f64;
        let s = r.scalar();
        prop_assert!((op.trace() - (nf + 2.0) / (2.0 * nf) * s).abs() <= 1e-9 * s.abs().max(1.0));
        prop_assert!((op.mean() - s / (nf * (nf - 1.0))).abs() <= 1e-12 * s.abs().max(1.0));
    }

    #[test]
    fn second_kind_matrix_matches_direct_contraction(n in 3usize..=6, seed in any::<u64>()) {
        let r = tensor(n, seed);
        let op = induce_second_kind(&r);
        let basis = standard_basis_s20(r.dim());
        for (a, ba) in basis.iter().enumerate() {
            for (b, bb) in basis.iter().enumerate().skip(a) {
                let direct = r.rbar_form(ba.matrix(), bb.matrix());
                prop_assert!((op.matrix()[(a, b)] - direct).abs() <= 1e-12 * r.matrix().amax().max(1.0) * 10.0);
            }
        }
    }

    #[test]
    fn scalar_sign_dichotomy(n in 3usize..=6, seed in any::<u64>(), alpha_frac in 0.0f64..0.99, theta in -0.5f64..2.0, target in 0.0f64..0.5) {
        let r = tensor(n, seed);
        let big_n = Dim::new(n).unwrap().traceless_dim() as f64;
        let params = ConeParams::new(1.0 + alpha_frac * (big_n - 1.0), theta).unwrap();
        for sign in [1.0, -1.0] {
            let shifted = shift_to_margin(&r.scaled(sign), params, target).unwrap();
            let op = induce_second_kind(&shifted);
            prop_assert!(cone_margin(op.eigenvalues(), op.mean(), params).unwrap() >= -1e-9);
            prop_assert!(shifted.scalar() >= -1e-9);
        }
    }

    #[test]
    fn proof_frame_identities(n in 3usize..=6, seed in any::<u64>()) {
        let r = tensor(n, seed);
        let mut g = rng_for(seed, 1);
        let frame = Frame::new(haar_orthogonal(n, &mut g)).unwrap();
        let scale = r.matrix().amax().max(1.0);
        prop_assert!(cylinder_frame_identities(&r, &frame, seed as usize % n).unwrap().max_residual() <= 1e-10 * scale);
        let p = 1 + seed as usize % (n / 2);
        let (def, closed) = q_quantity(&r, &frame, p).unwrap();
        prop_assert!((def - closed).abs() <= 1e-10 * scale * 10.0);
        if n == 4 {
            let (lhs, rhs) = cp2_frame_identity(&r, &frame).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn ricci_bound_never_violated(n in 3usize..=7, seed in any::<u64>(), alpha_frac in 0.0f64..0.999, target in -0.01f64..0.05) {
        let big_n = Dim::new(n).unwrap().traceless_dim() as f64;
        let alpha = 1.0 + alpha_frac * (big_n - 1.0);
        let theta = secondkind::cones::theta_cylinder(n, alpha).unwrap();
        let r = shift_to_margin(&tensor(n, seed), ConeParams::new(alpha, theta).unwrap(), target).unwrap();
        let rep = verify_prop_ricci(&r, alpha, theta, 1e-9).unwrap();
        prop_assert_ne!(rep.verdict, Verdict::Violated);
    }

    #[test]
    fn tensor_file_round_trip_is_bit_exact(n in 3usize..=8, seed in any::<u64>(), scale in 1e-6f64..1e6) {
        let r = tensor(n, seed).scaled(scale);
        let text = serde_json::to_string(&TensorFile::from_curvature(&r)).unwrap();
        let back: TensorFile = serde_json::from_str(&text).unwrap();
        let r2 = back.to_curvature().unwrap();
        for (a, b) in r.matrix().iter().zip(r2.matrix().iter()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn norm_identity(n in 3usize..=6, p_seed in any::<usize>(), seed in any::<u64>()) {
        let p = 1 + p_seed % (n - 1);
        let omega = PForm::random(n, p, &mut rng(seed)).unwrap();
        let (lhs, rhs) = norm_identity_check(&omega).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(1.0));
    }

    #[test]
    fn curvature_term_matches_oracle(n in 3usize..=6, p_seed in any::<usize>(), seed in any::<u64>()) {
        let p = 1 + p_seed % (n / 2);
        let r = tensor(n, seed);
        let term = curvature_term_with(&r, &induce_second_kind(&r), p).unwrap();
        prop_assert!(term.max_difference(&weitzenbock_oracle(&r, p).unwrap()) <= 1e-9);
    }

    #[test]
    fn weight_principle(n in 3usize..=6, p_seed in any::<usize>(), seed in any::<u64>(), beta in 0.0f64..2.0, target in 0.0f64..0.1) {
        let p = 1 + p_seed % (n / 2);
        let params = ConeParams::new(0.5 * (n as f64 + 2.0), beta).unwrap();
        let r = shift_to_margin(&tensor(n, seed), params, target).unwrap();
        let rep = weight_principle_check(&r, beta, p, 1e-9).unwrap();
        prop_assert_eq!(rep.verdict, Verdict::Certified);
    }

    #[test]
    fn kahler_trace_identities_and_soundness(m in 2usize..=3, seed in any::<u64>(), alpha_frac in 0.0f64..0.99, gap in 0.01f64..1.0) {
        let mut g = rng(seed);
        let r = kahler_instance(m, &mut g).unwrap();
        let j = ComplexStructure::standard(m);
        let res = trace_identities(&r, &j, &j.adapted_frame()).unwrap();
        prop_assert!(res.max() <= 1e-10 * r.matrix().amax().max(1.0));
        let upper = ((2 * m - 1) * (m + 1)) as f64;
        let alpha = 1.0 + alpha_frac * (upper - 1.0);
        let theta = b_m_alpha(m, alpha).unwrap() - gap;
        prop_assume!(theta > -1.0);
        let d = kahler_cone_diagnostic(&r, &j, alpha, theta, 50, &mut g).unwrap();
        let member = d.positive.class.is_member() || d.negative.class.is_member();
        prop_assert!(!member || d.norm <= 1e-7);
    }
}

#[test]
fn unit_sphere_has_identity_operator() {
    for n in 3..=8 {
        let r = build(&ModelSpec::Sphere { n, kappa: 1.0 }).unwrap();
        let op = induce_second_kind(&r);
        let k = op.matrix().nrows();
        assert!((op.matrix() - DMatrix::identity(k, k)).amax() <= 1e-9);
    }
}

#[test]
fn product_blocks_have_no_mixed_components() {
    let specs = [
        ModelSpec::Cylinder { n: 5 },
        ModelSpec::SphereProduct {
            n: 6,
            k: 2,
            kappa1: 2.0,
            kappa2: 0.5,
        },
        ModelSpec::CpProduct { m: 3, k: 1, c: 4.0 },
    ];
    for spec in specs {
        let r = build(&spec).unwrap();
        let n = r.n();
        let blocks: Vec<usize> = match spec {
            ModelSpec::Cylinder { n } => (0..n).map(|i| usize::from(i == n - 1)).collect(),
            ModelSpec::SphereProduct { k, .. } => (0..n).map(|i| usize::from(i >= k)).collect(),
            ModelSpec::CpProduct { m, k, .. } => (0..n).map(|i| usize::from(i % m >= k)).collect(),
            _ => unreachable!(),
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let same = blocks[i] == blocks[j]
                            && blocks[j] == blocks[k]
                            && blocks[k] == blocks[l];
                        if !same {
                            assert_eq!(r.r(i, j, k, l), 0.0, "{spec:?} R_{i}{j}{k}{l}");
                        }
                    }
                }
            }
        }
    }
}
