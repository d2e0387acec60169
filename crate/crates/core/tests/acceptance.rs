//! Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

mod common;

use std::f64::consts::TAU;
use std::io::Write;
use std::process::Command;
use std::time::Instant;

use common::*;
use gcs::cli_io::{emit_svg, equidistant_polylines, Layer, Scene};
use gcs::curve_model::{random_convex_support, AffineMap, PlaneCurve, Point};
use gcs::equidistants::{
    equidistant, gensing_scan, grid_pitch, pullback_residual, wigner_caustic, EquidistantField,
};
use gcs::gcs_analysis::{
    classify_point, criminant, css_envelope, fiber_tangency_order_at_front, fiber_tangency_order_numeric,
    search_cusp_class, wigner_cusps, GcsLabel,
};
use gcs::generating_family::{
    corank, corank_at, count_section_cusps, fit_local_jets, realization_spec, realized_caustic, wl_membership,
    CausticOptions, GeneratingFamily, RealizationLabel,
};
use gcs::numeric::hausdorff;
use gcs::parallel_chords::{find_bitangent_pairs, find_parallel_branches, lambda_point, Chord, ParallelPair};
use rand::Rng;

const GRID: usize = 512;

fn report(id: u32, name: &str, passed: bool, detail: &str) {
    let line = format!("{} criterion {id:02} {name}: {detail}\n", if passed { "PASS" } else { "FAIL" });
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    assert!(passed, "criterion {id} {name} failed: {detail}");
}

/// Max of both one-sided distances between `E_λ` and the scaled curve, each
/// measured against the continuous other side.
fn scaling_law_error(curve: &PlaneCurve, lambda: f64) -> (f64, f64) {
    let start = Instant::now();
    let branches = find_parallel_branches(curve, GRID).unwrap();
    let eq = equidistant(curve, lambda, &branches);
    let elapsed = start.elapsed().as_secs_f64();
    let k = (2.0 * lambda - 1.0).abs();
    let center = Point::zeros();
    let mut err: f64 = 0.0;
    for s in eq.iter().flat_map(|b| b.samples.iter()) {
        err = err.max(curve.distance_to(&(center + (s.point - center) / k)) * k);
    }
    let field = EquidistantField::new(curve, &branches, lambda);
    for p in scaled_curve_samples(curve, center, k, 400) {
        err = err.max(field.distance(&p));
    }
    (err, elapsed)
}

#[test]
fn criterion_01_scaling_law() {
    let mut worst: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    for curve in [unit_circle(), ellipse()] {
        for lambda in [0.1, 0.25, 0.75] {
            let (err, secs) = scaling_law_error(&curve, lambda);
            worst = worst.max(err);
            slowest = slowest.max(secs);
        }
    }
    report(
        1,
        "scaling law",
        worst < 1e-6 && slowest < 1.0,
        &format!("max hausdorff {worst:.3e} (< 1e-6), slowest {slowest:.3}s per lambda (< 1s)"),
    );
}

#[test]
fn criterion_02_wigner_degenerate_ellipse() {
    let curve = ellipse();
    let branches = find_parallel_branches(&curve, GRID).unwrap();
    let mut spread: f64 = 0.0;
    for b in &branches {
        for p in &b.pairs {
            let x = lambda_point(&Chord::new(&curve, *p), 0.5);
            spread = spread.max(x.norm());
        }
    }
    let wigner = wigner_caustic(&curve, &branches);
    let collapsed = wigner.iter().all(|b| b.fully_degenerate && b.samples.len() == 1);
    report(
        2,
        "wigner degenerate",
        spread < 1e-8 && collapsed,
        &format!("max sample spread {spread:.3e} (< 1e-8), collapsed = {collapsed}"),
    );
}

#[test]
fn criterion_03_cusp_parity_ensemble() {
    let start = Instant::now();
    let mut rng = rng(3);
    let mut failures = Vec::new();
    for i in 0..50 {
        let curve = random_convex_support(&mut rng, 3..=9, 0.1);
        let branches = find_parallel_branches(&curve, GRID).unwrap();
        let w = wigner_cusps(&curve, &branches).count();
        let c = css_envelope(&curve, &branches).cusps.count();
        if !(w % 2 == 1 && w >= 3 && c % 2 == 1 && c >= 3 && w <= c) {
            failures.push((i, w, c));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        3,
        "cusp parity",
        failures.is_empty() && secs < 60.0,
        &format!("{} / 50 curves satisfy odd >= 3 and wigner <= css, {secs:.1}s (< 60s), failures {failures:?}", 50 - failures.len()),
    );
}

#[test]
fn criterion_04_trefoil_cusp_counts() {
    let curve = trefoil();
    let branches = find_parallel_branches(&curve, GRID).unwrap();
    let w = wigner_cusps(&curve, &branches);
    let css = css_envelope(&curve, &branches);
    let param_error = |cusps: &[gcs::gcs_analysis::Cusp], roots: &[f64]| {
        cusps
            .iter()
            .flat_map(|c| [c.pair.s, c.pair.t])
            .map(|t| roots.iter().map(|r| circular_distance(t, *r)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    let we = param_error(&w.cusps, &cos3_roots());
    let ce = param_error(&css.cusps.cusps, &sin3_roots());
    report(
        4,
        "trefoil cusp counts",
        w.count() == 3 && css.cusps.count() == 3 && we < 1e-8 && ce < 1e-8,
        &format!(
            "wigner {} cusps (err {we:.2e}), css {} cusps (err {ce:.2e}); expected 3 and 3 within 1e-8",
            w.count(),
            css.cusps.count()
        ),
    );
}

#[test]
fn criterion_05_figure_classes() {
    let dir = tempfile::tempdir().unwrap();
    let mut found = Vec::new();
    let mut svgs = Vec::new();
    for target in [(3, 5), (5, 5)] {
        let mut rng = rng(11);
        let Some(curve) = search_cusp_class(&mut rng, target, 5, 200, GRID) else { continue };
        found.push(target);
        let branches = find_parallel_branches(&curve, GRID).unwrap();
        let mut scene = Scene::default();
        let mut outline = Layer::new("curve", "curve");
        outline.polylines.push(gcs::cli_io::curve_polyline(&curve, 512));
        scene.push(outline);
        let mut wl = Layer::new("wigner", "wigner");
        wl.polylines = equidistant_polylines(&wigner_caustic(&curve, &branches));
        scene.push(wl);
        let mut cl = Layer::new("css", "css");
        cl.polylines = css_envelope(&curve, &branches).polylines;
        scene.push(cl);
        let path = dir.path().join(format!("class_{}_{}.svg", target.0, target.1));
        emit_svg(&scene, &path).unwrap();
        if std::fs::metadata(&path).map(|m| m.len() > 0).unwrap_or(false) {
            svgs.push(path);
        }
    }
    report(
        5,
        "figure classes",
        found.len() == 2 && svgs.len() == 2,
        &format!("found (wigner, css) classes {found:?} of [(3, 5), (5, 5)], {} svg files", svgs.len()),
    );
}

#[test]
fn criterion_06_critical_set_agreement() {
    let mut worst_ratio: f64 = 0.0;
    let mut details = Vec::new();
    for (name, curve) in [("ellipse", ellipse()), ("trefoil", trefoil())] {
        let branches = find_parallel_branches(&curve, GRID).unwrap();
        let pitch = grid_pitch(&curve, GRID);
        for lambda in [0.3, 0.5, 0.7] {
            let scan = gensing_scan(&curve, lambda, GRID).unwrap();
            let field = EquidistantField::new(&curve, &branches, lambda);
            let d = hausdorff(&scan, field.samples());
            worst_ratio = worst_ratio.max(d / (2.0 * pitch));
            details.push(format!("{name}@{lambda}: {d:.2e}"));
        }
    }
    report(
        6,
        "critical set vs equidistant",
        worst_ratio < 1.0,
        &format!("hausdorff / (2 pitch) max {worst_ratio:.3} (< 1); {}", details.join(", ")),
    );
}

#[test]
fn criterion_07_front_membership() {
    let lambda = 0.3;
    let mut rng = rng(7);
    let mut summary = Vec::new();
    let mut ok = true;
    for (name, curve) in [("trefoil", trefoil()), ("ellipse", ellipse()), ("peanut", peanut())] {
        let branches = find_parallel_branches(&curve, GRID).unwrap();
        let samples: Vec<_> = equidistant(&curve, lambda, &branches).into_iter().flat_map(|b| b.samples).collect();
        let mut passed = 0;
        let mut worst: f64 = 0.0;
        for s in &samples {
            let pair = ParallelPair::new(&curve, s.s, s.t);
            let Ok(jets) = fit_local_jets(&curve, &pair) else { continue };
            let family = GeneratingFamily::new(&jets.family_spec(lambda)).unwrap();
            let (p, q) = jets.frame.coordinates(&s.point);
            let m = wl_membership(&family, &[p, q], &[jets.chord_seed(lambda)], jets.scale);
            worst = worst.max(m.gradient_residual.max(m.hessian_residual));
            if m.member {
                passed += 1;
            }
        }
        let diameter = curve.scale().diameter;
        let mut rejected = 0;
        for _ in 0..50 {
            let s = &samples[rng.gen_range(0..samples.len())];
            let jets = fit_local_jets(&curve, &ParallelPair::new(&curve, s.s, s.t)).unwrap();
            let family = GeneratingFamily::new(&jets.family_spec(lambda)).unwrap();
            let angle = rng.gen_range(0.0..TAU);
            let x = Point::new(angle.cos(), angle.sin()) * diameter * rng.gen_range(2.0..4.0);
            let (p, q) = jets.frame.coordinates(&x);
            if !wl_membership(&family, &[p, q], &[jets.chord_seed(lambda)], jets.scale).member {
                rejected += 1;
            }
        }
        ok &= passed >= 200 && rejected == 50;
        summary.push(format!(
            "{name}: {passed}/{} members (worst residual {worst:.1e}), {rejected}/50 exterior rejected",
            samples.len()
        ));
    }
    report(7, "front membership", ok, &summary.join("; "));
}

#[test]
fn criterion_08_criminant() {
    let mut rng = rng(8);
    let mut convex_with_bitangents = 0;
    for _ in 0..20 {
        let curve = random_convex_support(&mut rng, 3..=9, 0.1);
        let branches = find_parallel_branches(&curve, GRID).unwrap();
        let bitangents = find_bitangent_pairs(&curve, &branches);
        if !criminant(&curve, &bitangents, (-0.5, 1.5)).is_empty() {
            convex_with_bitangents += 1;
        }
    }
    let curve = peanut();
    let branches = find_parallel_branches(&curve, GRID).unwrap();
    let bitangents = find_bitangent_pairs(&curve, &branches);
    let lines = criminant(&curve, &bitangents, (-0.5, 1.5));
    let mut worst: f64 = 0.0;
    for pair in &bitangents {
        let (a, b) = (curve.eval(pair.s), curve.eval(pair.t));
        for lambda in [0.2, 0.5, 0.8] {
            let x = a * lambda + b * (1.0 - lambda);
            let d = lines.iter().map(|l| polyline_distance(&x, l)).fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
    }
    report(
        8,
        "criminant",
        convex_with_bitangents == 0 && bitangents.len() >= 2 && worst < 1e-9,
        &format!(
            "convex curves with criminant {convex_with_bitangents}/20, peanut bitangents {} (>= 2), max lambda-point offset {worst:.2e} (< 1e-9)",
            bitangents.len()
        ),
    );
}

#[test]
fn criterion_09_classification_table() {
    let mut rows = Vec::new();
    let mut ok = true;
    let mut expect = |name: &str, got: GcsLabel, want: GcsLabel| {
        ok &= got == want;
        rows.push(format!("{name}: {got} (want {want})"));
    };

    let tre = trefoil();
    let generic = classify_point(&tre, &ParallelPair::new(&tre, 0.3, 0.3 + std::f64::consts::PI), 0.5).unwrap();
    expect("generic wigner point", generic.label, GcsLabel::A2Bk(1));

    let pea = peanut();
    let pea_branches = find_parallel_branches(&pea, GRID).unwrap();
    let bitangent = find_bitangent_pairs(&pea, &pea_branches)[0];
    expect("(1,1) bitangent at 1/2", classify_point(&pea, &bitangent, 0.5).unwrap().label, GcsLabel::A2Bk(2));
    expect("(1,1) bitangent at 0.3", classify_point(&pea, &bitangent, 0.3).unwrap().label, GcsLabel::A2Ak(1));

    let (eng, eng_pair) = engineered_flex_bitangent();
    expect("(1,2) bitangent", classify_point(&eng, &eng_pair, 0.5).unwrap().label, GcsLabel::Unstable);

    let eng_branches = find_parallel_branches(&eng, GRID).unwrap();
    for (name, curve, branches, pair) in
        [("peanut", &pea, &pea_branches, bitangent), ("engineered", &eng, &eng_branches, eng_pair)]
    {
        let geometric = fiber_tangency_order_at_front(curve, &pair, 0.3).unwrap();
        let (numeric, slope) = fiber_tangency_order_numeric(curve, branches, &pair, 0.3).unwrap();
        ok &= geometric == numeric;
        rows.push(format!("{name} fiber tangency geometric {geometric} numeric {numeric} (slope {slope:.3})"));
    }
    report(9, "classification table", ok, &rows.join("; "));
}

#[test]
fn criterion_10_realized_caustics() {
    let mut rows = Vec::new();
    let mut ok = true;

    let a3 = realization_spec(&"A3".parse().unwrap(), 1, 0.5).unwrap();
    let caustic = realized_caustic(&a3, &CausticOptions::for_spec(&a3)).unwrap();
    let pts: Vec<(f64, f64)> = caustic.points.iter().map(|c| (c.x[0], c.x[1])).collect();
    let (exponent, levels) = cusp_width_exponent(&pts, 0.2);
    ok &= (exponent - 1.5).abs() <= 0.075 && levels >= 10;
    rows.push(format!("A3 exponent {exponent:.4} over {levels} levels (1.5 +- 0.075)"));

    let a2 = realization_spec(&"A2".parse().unwrap(), 1, 0.5).unwrap();
    let caustic = realized_caustic(&a2, &CausticOptions::for_spec(&a2)).unwrap();
    let curvature = max_discrete_curvature(&caustic.points.iter().map(|c| Point::new(c.x[0], c.x[1])).collect::<Vec<_>>(), 0.3);
    // at λ = 1/2 the fold locus is the parabola p = −4.5 q², vertex curvature 9
    ok &= curvature <= 9.0 * 1.05;
    rows.push(format!("A2 max discrete curvature {curvature:.3} near base (parabola oracle 9, +5%)"));

    let d4 = realization_spec(&"D4minus".parse().unwrap(), 2, 0.3).unwrap();
    let mut options = CausticOptions::for_spec(&d4);
    options.section = Some(vec![0.0, 0.3]);
    let caustic = realized_caustic(&d4, &options).unwrap();
    let cusps = count_section_cusps(&d4, &caustic).unwrap();
    ok &= cusps == 3;
    rows.push(format!("D4minus section cusps {cusps} (3)"));

    let mut curve_coranks = Vec::new();
    let tre = trefoil();
    for s in [0.0, 0.4, 1.3, 2.9] {
        let pair = ParallelPair::new(&tre, s, s + std::f64::consts::PI);
        let jets = fit_local_jets(&tre, &pair).unwrap();
        let lambda = 0.3;
        let x = lambda_point(&Chord::new(&tre, pair), lambda);
        let (p, q) = jets.frame.coordinates(&x);
        curve_coranks.push(corank_at(&jets.family_spec(lambda), &[p, q], &[jets.chord_seed(lambda)]).unwrap());
    }
    for label in ["A2", "A3"] {
        curve_coranks.push(corank(&realization_spec(&label.parse().unwrap(), 1, 0.4).unwrap()).unwrap());
    }
    let d_coranks: Vec<usize> = ["D4plus", "D4minus", "D5"]
        .iter()
        .map(|l| corank(&realization_spec(&l.parse::<RealizationLabel>().unwrap(), 2, 0.4).unwrap()).unwrap())
        .collect();
    ok &= curve_coranks.iter().all(|&c| c == 1) && d_coranks.iter().all(|&c| c == 2);
    rows.push(format!("curve coranks {curve_coranks:?} (all 1), D coranks {d_coranks:?} (all 2)"));
    report(10, "realized caustics", ok, &rows.join("; "));
}

/// Largest `|Δ²x| / |Δx|²` along nearest-neighbour order within `radius` of the origin.
fn max_discrete_curvature(points: &[Point], radius: f64) -> f64 {
    let mut pts: Vec<Point> = points.iter().filter(|p| p.norm() < radius).copied().collect();
    pts.sort_by(|a, b| a.y.total_cmp(&b.y));
    pts.dedup_by(|a, b| (*a - *b).norm() < 1e-3);
    pts.windows(3)
        .map(|w| {
            let (d1, d2) = (w[1] - w[0], w[2] - w[1]);
            let h = 0.5 * (d1.norm() + d2.norm());
            let t1 = d1.normalize();
            let t2 = d2.normalize();
            (t2 - t1).norm() / h
        })
        .fold(0.0, f64::max)
}

#[test]
fn criterion_11_symplectic_identities() {
    let mut rng = rng(11);
    let mut worst_pullback: f64 = 0.0;
    for _ in 0..100 {
        let mut lambda: f64 = rng.gen_range(-2.0..3.0);
        if lambda.abs() < 1e-3 || (lambda - 1.0f64).abs() < 1e-3 {
            lambda += 0.01;
        }
        worst_pullback = worst_pullback.max(pullback_residual(lambda));
    }

    let lambda = 0.3;
    let base = trefoil();
    let base_branches = find_parallel_branches(&base, GRID).unwrap();
    let base_field = EquidistantField::new(&base, &base_branches, lambda);
    let pea = peanut();
    let bitangent = find_bitangent_pairs(&pea, &find_parallel_branches(&pea, GRID).unwrap())[0];
    let probes = [
        (trefoil(), ParallelPair::new(&base, 0.3, 0.3 + std::f64::consts::PI), 0.5),
        (peanut(), bitangent, 0.5),
        (peanut(), bitangent, 0.3),
    ];
    let mut worst_hausdorff: f64 = 0.0;
    let mut label_mismatches = 0;
    for _ in 0..20 {
        let map = AffineMap::random_symplectic(&mut rng);
        let inverse = map.linear.try_inverse().unwrap();
        let image = base.affine_image(&map).unwrap();
        let branches = find_parallel_branches(&image, GRID).unwrap();
        let field = EquidistantField::new(&image, &branches, lambda);
        let norm = map.linear.norm();
        for p in field.samples() {
            let back = inverse * (p - map.translation);
            worst_hausdorff = worst_hausdorff.max(base_field.distance(&back) * norm);
        }
        for p in base_field.samples() {
            worst_hausdorff = worst_hausdorff.max(field.distance(&map.apply(p)));
        }
        for (curve, pair, l) in &probes {
            let mapped = curve.affine_image(&map).unwrap();
            let before = classify_point(curve, pair, *l).unwrap().label;
            let after = classify_point(&mapped, &ParallelPair::new(&mapped, pair.s, pair.t), *l).unwrap().label;
            if before != after {
                label_mismatches += 1;
            }
        }
    }
    report(
        11,
        "symplectic identities",
        worst_pullback < 1e-12 && worst_hausdorff < 1e-9 && label_mismatches == 0,
        &format!(
            "pullback residual {worst_pullback:.2e} (< 1e-12), equivariance hausdorff {worst_hausdorff:.2e} (< 1e-9), label mismatches {label_mismatches}/60"
        ),
    );
}

#[test]
fn criterion_12_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let curve_path = dir.path().join("trefoil.json");
    std::fs::write(&curve_path, r#"{"form":"support","h_cos":[1,0,0,0.1]}"#).unwrap();
    let run = |tag: &str, threads: &str| -> Vec<Vec<u8>> {
        let csv = dir.path().join(format!("w_{tag}.csv"));
        let svg = dir.path().join(format!("g_{tag}.svg"));
        let caustic = dir.path().join(format!("c_{tag}.csv"));
        let bin = env!("CARGO_BIN_EXE_gcs");
        let status = |args: &[&str]| {
            Command::new(bin).args(args).env("GCS_THREADS", threads).status().unwrap().success()
        };
        assert!(status(&["wigner", "--curve", curve_path.to_str().unwrap(), "--out", csv.to_str().unwrap()]));
        assert!(status(&[
            "gcs",
            "--curve",
            curve_path.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
            "--lambda-range",
            "-0.5:1.5:201",
        ]));
        assert!(status(&["realize", "--label", "A3", "--m", "1", "--lambda", "0.5", "--out", caustic.to_str().unwrap()]));
        [csv, svg, caustic].iter().map(|p| std::fs::read(p).unwrap()).collect()
    };
    let first = run("a", "4");
    let second = run("b", "4");
    let single = run("c", "1");
    let identical = first == second && first == single;
    let sizes: Vec<usize> = first.iter().map(|f| f.len()).collect();
    report(
        12,
        "cli determinism",
        identical && sizes.iter().all(|&s| s > 0),
        &format!("three runs (4, 4, 1 threads) byte-identical = {identical}, sizes {sizes:?}"),
    );
}
