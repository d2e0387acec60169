mod common;

use common::*;
use gcs::curve_model::{random_convex_support, Point};
use gcs::equidistants::{front_lambdas, grid_pitch};
use gcs::gcs_analysis::{
    assemble_gcs, classify_point, css_envelope, curvature_ratio_profile, middle_axes, ratio_at, sigma_prime_sweep,
    wigner_cusps, GcsLabel, GcsOptions,
};
use gcs::numeric::hausdorff;
use gcs::parallel_chords::{find_bitangent_pairs, find_parallel_branches, ParallelPair};
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn label_strings() {
    assert_eq!(GcsLabel::A2Ak(1).to_string(), "A2_A1");
    assert_eq!(GcsLabel::A2Bk(2).to_string(), "A2_B2");
    assert_eq!(GcsLabel::Unstable.to_string(), "UNSTABLE");
    assert_eq!(serde_json::to_string(&GcsLabel::FullyDegenerate).unwrap(), "\"FULLY_DEGENERATE\"");
}

#[test]
fn ellipse_cusp_sets_are_fully_degenerate() {
    let c = ellipse();
    let branches = find_parallel_branches(&c, 256).unwrap();
    let w = wigner_cusps(&c, &branches);
    assert!(w.fully_degenerate && w.count() == 0 && !w.parity_ok);
    let gcs = assemble_gcs(&c, &GcsOptions { grid_n: 256, ..Default::default() }).unwrap();
    assert!(gcs.fully_degenerate);
    assert!(gcs.reports.iter().all(|r| r.label == GcsLabel::FullyDegenerate));
}

#[test]
fn trefoil_css_cusps_are_ratio_extrema() {
    let c = trefoil();
    let branches = find_parallel_branches(&c, 512).unwrap();
    for cusp in css_envelope(&c, &branches).cusps.cusps {
        let direction = branches[cusp.source_branch].direction_at(&c, cusp.u, cusp.pair.s, cusp.pair.t);
        let (_, dr) = ratio_at(&c, cusp.pair.s, cusp.pair.t, direction);
        assert!(dr.abs() < 1e-8, "ratio derivative {dr}");
    }
}

#[test]
fn trefoil_sweep_traces_css() {
    let c = trefoil();
    let branches = find_parallel_branches(&c, 512).unwrap();
    let sweep = sigma_prime_sweep(&c, &branches, &front_lambdas(0.05, 0.95, 201));
    assert!(sweep.outside.iter().all(|l| l.is_empty()));
    let css: Vec<Point> = css_envelope(&c, &branches).polylines.concat();
    let d = hausdorff(&sweep.inside_points(), &css);
    assert!(d < 2.0 * grid_pitch(&c, 512), "sweep vs envelope {d}");
}

#[test]
fn trefoil_has_three_middle_axes_through_center() {
    let c = trefoil();
    let branches = find_parallel_branches(&c, 512).unwrap();
    let axes = middle_axes(&c, &branches, &front_lambdas(-0.5, 1.5, 201));
    assert_eq!(axes.len(), 3);
    for axis in &axes {
        let closest = axis.iter().map(|p| p.norm()).fold(f64::INFINITY, f64::min);
        assert!(closest < 0.05, "axis misses the centre by {closest}");
    }
}

#[test]
fn peanut_decomposition_reports() {
    let c = peanut();
    let gcs = assemble_gcs(&c, &GcsOptions::default()).unwrap();
    assert_eq!(gcs.bitangents.len(), 2);
    assert_eq!(gcs.criminant.len(), 2);
    let b2 = gcs.reports.iter().filter(|r| r.label == GcsLabel::A2Bk(2)).count();
    assert_eq!(b2, 2);
    assert!(gcs.wigner_cusps.parity_ok);
}

#[test]
fn near_singular_wigner_point_fails_a2_condition() {
    let c = trefoil();
    // κ(s) = κ(s + π) at cos 3s = 0: the Wigner A₂ condition degenerates
    let s = PI / 6.0;
    let err = classify_point(&c, &ParallelPair::new(&c, s, s + PI), 0.5).unwrap_err();
    assert!(matches!(err, gcs::error::Error::A2ConditionFailed { .. }));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn convex_cusp_parity(seed in any::<u64>()) {
        let c = random_convex_support(&mut rng(seed), 3..=9, 0.1);
        let branches = find_parallel_branches(&c, 512).unwrap();
        let w = wigner_cusps(&c, &branches);
        let css = css_envelope(&c, &branches);
        prop_assert!(w.parity_ok && css.cusps.parity_ok);
        prop_assert!(w.count() <= css.cusps.count());
    }

    #[test]
    fn wigner_cusps_sit_at_unit_ratio(seed in any::<u64>()) {
        let c = random_convex_support(&mut rng(seed), 3..=7, 0.15);
        let branches = find_parallel_branches(&c, 512).unwrap();
        for cusp in wigner_cusps(&c, &branches).cusps {
            let ratio = c.curvature(cusp.pair.s) / c.curvature(cusp.pair.t);
            prop_assert!((ratio - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn ratio_profile_matches_curvatures(seed in any::<u64>()) {
        let c = random_convex_support(&mut rng(seed), 3..=7, 0.15);
        let branches = find_parallel_branches(&c, 128).unwrap();
        for s in curvature_ratio_profile(&c, &branches[0]).samples {
            prop_assert!((s.ratio - c.curvature(s.s) / c.curvature(s.t)).abs() < 1e-9 * s.ratio.abs().max(1.0));
        }
    }

    #[test]
    fn generic_convex_wigner_points_are_a2_b1(seed in any::<u64>(), s in 0.0..(2.0 * PI)) {
        let c = random_convex_support(&mut rng(seed), 3..=7, 0.15);
        let branches = find_parallel_branches(&c, 256).unwrap();
        prop_assume!(find_bitangent_pairs(&c, &branches).is_empty());
        let pair = branches[0].pair_at(&c, s / (2.0 * PI) * branches[0].len() as f64);
        match classify_point(&c, &pair, 0.5) {
            Ok(r) => prop_assert_eq!(r.label, GcsLabel::A2Bk(1)),
            Err(gcs::error::Error::A2ConditionFailed { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}
