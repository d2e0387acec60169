#![allow(dead_code)]

use gcs::curve_model::{cross, PlaneCurve, Point, TrigSeries};
use gcs::parallel_chords::ParallelPair;
use nalgebra::{Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `h = 1 + 0.1 cos 3θ`.
pub fn trefoil() -> PlaneCurve {
    PlaneCurve::from_support(TrigSeries::new(vec![1.0, 0.0, 0.0, 0.1], vec![])).unwrap()
}

pub fn unit_circle() -> PlaneCurve {
    PlaneCurve::circle(1.0, Point::zeros()).unwrap()
}

pub fn ellipse() -> PlaneCurve {
    PlaneCurve::ellipse(2.0, 1.0).unwrap()
}

/// Waisted curve `x = cos t + 0.1 cos 2t`, `y = sin t (w + (1−w) cos² t) + 0.05 cos 2t`.
pub fn waist(w: f64) -> PlaneCurve {
    PlaneCurve::from_fourier(
        TrigSeries::new(vec![0.0, 1.0, 0.1], vec![]),
        TrigSeries::new(vec![0.0, 0.0, 0.05], vec![0.0, w + (1.0 - w) / 4.0, 0.0, (1.0 - w) / 4.0]),
    )
    .unwrap()
}

pub fn peanut() -> PlaneCurve {
    waist(0.3)
}

/// Conditions of a bitangent pair whose `t` endpoint sits at an inflection.
fn flex_bitangent_residual(w: f64, s: f64, t: f64) -> Vector3<f64> {
    let c = waist(w);
    let [xs, dxs] = c.derivs::<2>(s);
    let [xt, dxt, ddxt] = c.derivs::<3>(t);
    Vector3::new(cross(&dxs, &dxt), cross(&(xt - xs), &dxs), cross(&dxt, &ddxt))
}

/// Waist parameter and pair at which a bitangent meets an inflection: contact orders (1, 2).
pub fn engineered_flex_bitangent() -> (PlaneCurve, ParallelPair) {
    let mut z = Vector3::new(0.105, 4.086, 1.049);
    let h = 1e-7;
    for _ in 0..50 {
        let r = flex_bitangent_residual(z[0], z[1], z[2]);
        if r.amax() < 1e-14 {
            break;
        }
        let mut j = Matrix3::zeros();
        for k in 0..3 {
            let mut zp = z;
            let mut zm = z;
            zp[k] += h;
            zm[k] -= h;
            let d = (flex_bitangent_residual(zp[0], zp[1], zp[2]) - flex_bitangent_residual(zm[0], zm[1], zm[2]))
                / (2.0 * h);
            j.set_column(k, &d);
        }
        z -= j.lu().solve(&r).expect("nonsingular Jacobian");
    }
    let curve = waist(z[0]);
    let pair = ParallelPair::new(&curve, z[1].rem_euclid(TAU), z[2].rem_euclid(TAU));
    (curve, pair)
}

/// Dense sample of the curve `X ↦ c + k (X − c)`.
pub fn scaled_curve_samples(curve: &PlaneCurve, center: Point, k: f64, n: usize) -> Vec<Point> {
    (0..n)
        .map(|i| {
            let x = curve.eval(TAU * i as f64 / n as f64);
            center + (x - center) * k
        })
        .collect()
}

/// Brute-force symmetric Hausdorff distance.
pub fn brute_hausdorff(a: &[Point], b: &[Point]) -> f64 {
    let directed = |p: &[Point], q: &[Point]| {
        p.iter()
            .map(|x| q.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

/// Distance from `p` to the polyline, by segments.
pub fn polyline_distance(p: &Point, line: &[Point]) -> f64 {
    line.windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            let s = ((p - w[0]).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
            (w[0] + d * s - p).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Roots of `cos 3θ` in `[0, 2π)`.
pub fn cos3_roots() -> Vec<f64> {
    (0..6).map(|k| PI / 6.0 + k as f64 * PI / 3.0).collect()
}

/// Roots of `sin 3θ` in `[0, 2π)`.
pub fn sin3_roots() -> Vec<f64> {
    (0..6).map(|k| k as f64 * PI / 3.0).collect()
}

pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Half-width exponent of a cusp opening along `−q`: for each q level carrying
/// two caustic points, `log(|p₊ − p₋| / 2)` against `log|q|`.
pub fn cusp_width_exponent(points: &[(f64, f64)], q_max: f64) -> (f64, usize) {
    let mut levels: std::collections::BTreeMap<i64, Vec<f64>> = Default::default();
    for &(p, q) in points {
        if q < 0.0 && -q <= q_max {
            levels.entry((q * 1e9).round() as i64).or_default().push(p);
        }
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (key, ps) in levels {
        if ps.len() != 2 {
            continue;
        }
        let width = (ps[0] - ps[1]).abs() / 2.0;
        if width > 0.0 {
            xs.push((-(key as f64) * 1e-9).ln());
            ys.push(width.ln());
        }
    }
    (slope(&xs, &ys), xs.len())
}
