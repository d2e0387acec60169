mod common;

use common::*;
use gcs::curve_model::{random_convex_support, Point};
use gcs::equidistants::{
    chord_transform, equidistant, equidistant_hausdorff, extended_front, front_lambdas, inverse_chord_transform,
    pullback_residual, singular_locus, singular_residual, sing_tolerance, wigner_caustic, EquidistantField,
};
use gcs::error::Error;
use gcs::parallel_chords::{find_bitangent_pairs, find_parallel_branches};
use proptest::prelude::*;

#[test]
fn circle_equidistants_are_concentric_circles() {
    let c = unit_circle();
    let branches = find_parallel_branches(&c, 256).unwrap();
    for lambda in [-0.4, 0.1, 0.3, 0.8, 1.7] {
        for b in equidistant(&c, lambda, &branches) {
            for s in &b.samples {
                assert!((s.point.norm() - (2.0 * lambda - 1.0f64).abs()).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn circle_wigner_caustic_is_its_center() {
    let c = unit_circle();
    let branches = find_parallel_branches(&c, 256).unwrap();
    let w = wigner_caustic(&c, &branches);
    assert!(w.iter().all(|b| b.fully_degenerate));
    assert!(w[0].samples[0].point.norm() < 1e-12);
}

#[test]
fn degenerate_lambdas_rejected_by_chord_transform() {
    let (a, b) = (Point::new(1.0, 0.0), Point::new(0.0, 1.0));
    assert!(matches!(chord_transform(0.0, &a, &b), Err(Error::DegenerateLambda(_))));
    assert!(matches!(inverse_chord_transform(1.0, &a, &b), Err(Error::DegenerateLambda(_))));
}

#[test]
fn trefoil_singular_points_satisfy_curvature_balance() {
    let c = trefoil();
    let branches = find_parallel_branches(&c, 512).unwrap();
    for lambda in [0.2, 0.35, 0.65] {
        let points = singular_locus(&c, &branches, lambda).unwrap();
        assert!(!points.is_empty());
        for p in &points {
            // ρ(t)/ρ(s) = λ/(1−λ) on the trefoil, with ρ = 1 − 0.8 cos 3θ
            let rho = |t: f64| 1.0 - 0.8 * (3.0 * t).cos();
            assert!((rho(p.pair.t) * (1.0 - lambda) - rho(p.pair.s) * lambda).abs() < 1e-8);
            assert!(singular_residual(&c, p.pair.s, p.pair.t, lambda).abs() < 1e3 * sing_tolerance(&c));
        }
    }
}

#[test]
fn front_lambda_grid_is_refined_near_half() {
    let grid = front_lambdas(-0.5, 1.5, 201);
    assert!(grid.windows(2).all(|w| w[0] < w[1]));
    assert!(grid.iter().any(|l| (l - 0.5).abs() < 1e-12));
    let near: Vec<f64> = grid.iter().copied().filter(|l| (l - 0.5).abs() < 0.01).collect();
    assert!(near.len() >= 10);
}

#[test]
fn extended_front_marks_peanut_bitangent_tangency() {
    let c = peanut();
    let branches = find_parallel_branches(&c, 512).unwrap();
    let bitangents = find_bitangent_pairs(&c, &branches);
    let front = extended_front(&c, &branches, &bitangents, 0.1, 0.9, 9);
    let tangent: usize = front.iter().flatten().filter(|s| s.fiber_tangency_order > 0).count();
    assert!(tangent >= 2 * 9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn chord_transform_round_trip(lambda in -3.0..4.0f64, ax in -5.0..5.0f64, ay in -5.0..5.0f64, bx in -5.0..5.0f64, by in -5.0..5.0f64) {
        prop_assume!(lambda.abs() > 1e-3 && (lambda - 1.0).abs() > 1e-3);
        let (a, b) = (Point::new(ax, ay), Point::new(bx, by));
        let cc = chord_transform(lambda, &a, &b).unwrap();
        let (a2, b2) = inverse_chord_transform(lambda, &cc.x, &cc.xdot).unwrap();
        prop_assert!((a - a2).norm() < 1e-9 * (1.0 + a.norm()) / lambda.abs().min(1.0));
        prop_assert!((b - b2).norm() < 1e-9 * (1.0 + b.norm()) / (1.0 - lambda).abs().min(1.0));
    }

    #[test]
    fn pullback_identity(lambda in -5.0..5.0f64) {
        prop_assert!(pullback_residual(lambda) < 1e-12 * (1.0 + lambda * lambda));
    }

    #[test]
    fn lambda_reflection_symmetry(seed in any::<u64>(), lambda in 0.05..0.45f64) {
        let c = random_convex_support(&mut rng(seed), 3..=7, 0.15);
        let branches = find_parallel_branches(&c, 256).unwrap();
        let a = EquidistantField::new(&c, &branches, lambda);
        let b = EquidistantField::new(&c, &branches, 1.0 - lambda);
        prop_assert!(equidistant_hausdorff(&a, &b) < 1e-9);
    }

    #[test]
    fn wigner_caustic_is_half_equidistant(seed in any::<u64>()) {
        let c = random_convex_support(&mut rng(seed), 3..=7, 0.15);
        let branches = find_parallel_branches(&c, 256).unwrap();
        let w: Vec<Point> = wigner_caustic(&c, &branches).iter().flat_map(|b| b.points()).collect();
        let e: Vec<Point> = equidistant(&c, 0.5, &branches).iter().flat_map(|b| b.points()).collect();
        prop_assert_eq!(w, e);
    }

    #[test]
    fn samples_are_lambda_points(seed in any::<u64>(), lambda in -0.5..1.5f64) {
        let c = random_convex_support(&mut rng(seed), 3..=7, 0.15);
        let branches = find_parallel_branches(&c, 128).unwrap();
        for b in equidistant(&c, lambda, &branches).iter().filter(|b| !b.fully_degenerate) {
            for s in &b.samples {
                let x = c.eval(s.s) * lambda + c.eval(s.t) * (1.0 - lambda);
                prop_assert!((x - s.point).norm() < 1e-12);
            }
        }
    }
}
