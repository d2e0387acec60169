//! Global centre symmetry set: Wigner caustic, centre symmetry set and middle
//! axes, criminant, cusp detection by curvature ratios, and pointwise labels.

use std::collections::HashMap;
use std::fmt;

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::curve_model::{cross, random_convex_support, PlaneCurve, Point};
use crate::equidistants::{
    adapted_curvatures, equidistant, front_lambdas, singular_locus, singular_residual, sing_tolerance,
    wigner_caustic, EquidistantBranch, OrientedBranch,
};
use crate::error::{Error, Result};
use crate::numeric::{dedup_points, fit_slope, golden_min, segment_intersection};
use crate::parallel_chords::{
    bitangent_residual, find_bitangent_pairs, find_parallel_branches, lambda_point, pair_tolerance,
    parallel_residual, tangency_order, torus_distance, Chord, ParallelBranch, ParallelPair,
};

pub type Polyline = Vec<Point>;

/// Adapted curvatures and their derivatives along the unnormalized zero-set
/// direction `(−∂g/∂t, ∂g/∂s)` of `g = cross(X′(s), X′(t))`.
fn curvature_terms(curve: &PlaneCurve, s: f64, t: f64) -> (f64, f64, f64, f64) {
    let ds = curve.derivs::<3>(s);
    let dt = curve.derivs::<3>(t);
    let gs = cross(&ds[2], &dt[1]);
    let gt = cross(&ds[1], &dt[2]);
    let sign = if ds[1].dot(&dt[1]) >= 0.0 { 1.0 } else { -1.0 };
    let (kp, dkp) = curve.curvature_with_derivative(s);
    let (km, dkm) = curve.curvature_with_derivative(t);
    (kp, sign * km, dkp * -gt, sign * dkm * gs)
}

/// Zero exactly where the curvature ratio equals 1.
pub fn wigner_cusp_function(curve: &PlaneCurve, s: f64, t: f64) -> f64 {
    let (kp, km) = adapted_curvatures(curve, s, t);
    kp + km
}

/// Zero exactly where the curvature ratio is stationary along the branch.
pub fn css_cusp_function(curve: &PlaneCurve, s: f64, t: f64) -> f64 {
    let (kp, km, dkp, dkm) = curvature_terms(curve, s, t);
    dkp * km - kp * dkm
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioSample {
    pub s: f64,
    pub t: f64,
    pub u: f64,
    /// `−κ̃⁺/κ̃⁻`; NaN where `κ̃⁻ = 0`.
    pub ratio: f64,
    /// Derivative along the branch with respect to torus arclength.
    pub ratio_derivative: f64,
    pub defined: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureRatioProfile {
    pub branch: usize,
    pub samples: Vec<RatioSample>,
}

pub fn ratio_at(curve: &PlaneCurve, s: f64, t: f64, direction: (f64, f64)) -> (f64, f64) {
    let (kp, km) = adapted_curvatures(curve, s, t);
    let (_, dkp) = curve.curvature_with_derivative(s);
    let (_, dkm) = curve.curvature_with_derivative(t);
    let sign = if curve.tangent(s).dot(&curve.tangent(t)) >= 0.0 { 1.0 } else { -1.0 };
    let kp_u = dkp * direction.0;
    let km_u = sign * dkm * direction.1;
    (-kp / km, -(kp_u * km - kp * km_u) / (km * km))
}

pub fn curvature_ratio_profile(curve: &PlaneCurve, branch: &ParallelBranch) -> CurvatureRatioProfile {
    let samples = branch
        .pairs
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let dir = branch.direction_at(curve, i as f64, p.s, p.t);
            let (ratio, d) = ratio_at(curve, p.s, p.t, dir);
            let (_, km) = adapted_curvatures(curve, p.s, p.t);
            let defined = km.abs() > sing_tolerance(curve);
            RatioSample {
                s: p.s,
                t: p.t,
                u: i as f64,
                ratio: if defined { ratio } else { f64::NAN },
                ratio_derivative: if defined { d } else { f64::NAN },
                defined,
            }
        })
        .collect();
    CurvatureRatioProfile { branch: branch.id, samples }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cusp {
    pub point: Point,
    pub pair: ParallelPair,
    pub source_branch: usize,
    pub u: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CuspSet {
    pub cusps: Vec<Cusp>,
    /// The cusp function vanishes identically (centrally symmetric input).
    pub fully_degenerate: bool,
    /// Count is odd and at least 3.
    pub parity_ok: bool,
}

impl CuspSet {
    pub fn count(&self) -> usize {
        self.cusps.len()
    }
}

fn parity_ok(n: usize) -> bool {
    n % 2 == 1 && n >= 3
}

fn dedup_cusps(curve: &PlaneCurve, cusps: Vec<Cusp>) -> Vec<Cusp> {
    let points: Vec<Point> = cusps.iter().map(|c| c.point).collect();
    let keep = dedup_points(&points, 1e-6 * curve.scale().diameter);
    keep.into_iter().map(|i| cusps[i].clone()).collect()
}

/// Cusps of the Wigner caustic: midpoints of pairs with curvature ratio 1.
pub fn wigner_cusps(curve: &PlaneCurve, branches: &[ParallelBranch]) -> CuspSet {
    let tol = sing_tolerance(curve);
    let mut cusps = Vec::new();
    let mut degenerate = true;
    for branch in branches {
        let ob = OrientedBranch { branch, swapped: false };
        if branch.pairs.iter().any(|p| wigner_cusp_function(curve, p.s, p.t).abs() >= tol) {
            degenerate = false;
        } else {
            continue;
        }
        for u in ob.roots(curve, |s, t| wigner_cusp_function(curve, s, t)) {
            let pair = branch.pair_at(curve, u);
            let point = (curve.eval(pair.s) + curve.eval(pair.t)) * 0.5;
            cusps.push(Cusp { point, pair, source_branch: branch.id, u });
        }
    }
    let cusps = if degenerate { Vec::new() } else { dedup_cusps(curve, cusps) };
    let n = cusps.len();
    CuspSet { cusps, fully_degenerate: degenerate, parity_ok: !degenerate && parity_ok(n) }
}

/// Point where the chord through `X(s), X(t)` touches its envelope.
fn envelope_point(curve: &PlaneCurve, s: f64, t: f64) -> Option<Point> {
    let ds = curve.derivs::<3>(s);
    let dt = curve.derivs::<3>(t);
    let su = -cross(&ds[1], &dt[2]);
    let tu = cross(&ds[2], &dt[1]);
    let a = ds[0];
    let a_u = ds[1] * su;
    let b_u = dt[1] * tu;
    let chord = dt[0] - a;
    let n = Point::new(-chord.y, chord.x);
    let dn = {
        let d = b_u - a_u;
        Point::new(-d.y, d.x)
    };
    let m = nalgebra::Matrix2::new(n.x, n.y, dn.x, dn.y);
    let det = m.determinant();
    if !det.is_finite() || det.abs() <= 1e-12 * n.norm() * dn.norm() || dn.norm() == 0.0 {
        return None;
    }
    let rhs = nalgebra::Vector2::new(n.dot(&a), dn.dot(&a) + n.dot(&a_u));
    m.try_inverse().map(|inv| inv * rhs)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CssEnvelope {
    pub polylines: Vec<Polyline>,
    pub cusps: CuspSet,
    /// Samples where the chord family is momentarily stationary.
    pub dropped: usize,
}

/// Envelope of the chord family along every branch, with cusps at stationary curvature ratio.
pub fn css_envelope(curve: &PlaneCurve, branches: &[ParallelBranch]) -> CssEnvelope {
    let mut polylines = Vec::new();
    let mut dropped = 0;
    let mut cusps = Vec::new();
    let diameter = curve.scale().diameter;
    let mut all_points = Vec::new();
    for branch in branches {
        let mut current: Polyline = Vec::new();
        for p in &branch.pairs {
            match envelope_point(curve, p.s, p.t) {
                Some(x) => current.push(x),
                None => {
                    dropped += 1;
                    log::debug!("envelope degenerate at ({}, {})", p.s, p.t);
                    if current.len() > 1 {
                        polylines.push(std::mem::take(&mut current));
                    }
                    current.clear();
                }
            }
        }
        if branch.closed_loop && dropped == 0 && !current.is_empty() {
            current.push(current[0]);
        }
        all_points.extend(current.iter().copied());
        if current.len() > 1 {
            polylines.push(current);
        }
        let ob = OrientedBranch { branch, swapped: false };
        for u in ob.roots(curve, |s, t| css_cusp_function(curve, s, t)) {
            let pair = branch.pair_at(curve, u);
            if let Some(point) = envelope_point(curve, pair.s, pair.t) {
                cusps.push(Cusp { point, pair, source_branch: branch.id, u });
            }
        }
    }
    let c = all_points.iter().fold(Point::zeros(), |a, p| a + p) / all_points.len().max(1) as f64;
    let degenerate =
        !all_points.is_empty() && all_points.iter().all(|p| (p - c).norm() < 1e-9 * diameter);
    let cusps = if degenerate { Vec::new() } else { dedup_cusps(curve, cusps) };
    let n = cusps.len();
    CssEnvelope {
        polylines,
        cusps: CuspSet { cusps, fully_degenerate: degenerate, parity_ok: !degenerate && parity_ok(n) },
        dropped,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SigmaPrime {
    /// Singular points of `E_λ` for `λ ∈ (0,1)`, ordered along their source branch.
    pub inside: Vec<Polyline>,
    /// Singular points for `λ ∉ [0,1]`.
    pub outside: Vec<Polyline>,
    /// Double points of `E_λ` for `λ < 1/2`, linked across λ.
    pub middle_axes: Vec<Polyline>,
}

impl SigmaPrime {
    pub fn inside_points(&self) -> Vec<Point> {
        self.inside.iter().flatten().copied().collect()
    }
}

fn polyline_double_points(lines: &[(Polyline, bool)], cell: f64) -> Vec<Point> {
    let mut segments: Vec<(usize, usize, Point, Point)> = Vec::new();
    for (l, (pts, closed)) in lines.iter().enumerate() {
        let n = pts.len();
        let count = if *closed { n } else { n.saturating_sub(1) };
        for i in 0..count {
            segments.push((l, i, pts[i], pts[(i + 1) % n]));
        }
    }
    let key = |p: &Point| ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (k, seg) in segments.iter().enumerate() {
        let (a, b) = (key(&seg.2), key(&seg.3));
        for x in a.0.min(b.0)..=a.0.max(b.0) {
            for y in a.1.min(b.1)..=a.1.max(b.1) {
                grid.entry((x, y)).or_default().push(k);
            }
        }
    }
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for bucket in grid.values() {
        for (x, &i) in bucket.iter().enumerate() {
            for &j in &bucket[x + 1..] {
                let (a, b) = (i.min(j), i.max(j));
                let (si, sj) = (&segments[a], &segments[b]);
                if si.0 == sj.0 {
                    let n = lines[si.0].0.len();
                    let gap = si.1.abs_diff(sj.1);
                    let gap = if lines[si.0].1 { gap.min(n - gap) } else { gap };
                    if gap <= 1 {
                        continue;
                    }
                }
                if !seen.insert((a, b)) {
                    continue;
                }
                if let Some(p) = segment_intersection(&si.2, &si.3, &sj.2, &sj.3) {
                    out.push(p);
                }
            }
        }
    }
    out.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    out
}

fn link_tracks(levels: &[Vec<Point>], radius: f64) -> Vec<Polyline> {
    let mut finished: Vec<Polyline> = Vec::new();
    let mut active: Vec<Polyline> = Vec::new();
    for level in levels {
        let mut next: Vec<Polyline> = Vec::new();
        let mut taken = vec![false; level.len()];
        for track in active.drain(..) {
            let last = *track.last().unwrap();
            let predicted = if track.len() > 1 { last * 2.0 - track[track.len() - 2] } else { last };
            let best = level
                .iter()
                .enumerate()
                .filter(|(k, p)| !taken[*k] && (*p - last).norm() <= radius)
                .min_by(|a, b| (a.1 - predicted).norm().total_cmp(&(b.1 - predicted).norm()));
            match best {
                Some((k, p)) => {
                    taken[k] = true;
                    let mut track = track;
                    track.push(*p);
                    next.push(track);
                }
                None => finished.push(track),
            }
        }
        for (k, p) in level.iter().enumerate() {
            if !taken[k] {
                next.push(vec![*p]);
            }
        }
        active = next;
    }
    finished.extend(active);
    finished.retain(|t| t.len() > 1);
    finished
}

/// Σ′ as the λ-sweep of singular points of `E_λ`, plus middle axes from the
/// double points of `E_λ` for `λ < 1/2`.
pub fn sigma_prime_sweep(curve: &PlaneCurve, branches: &[ParallelBranch], lambdas: &[f64]) -> SigmaPrime {
    let mut grouped: HashMap<(usize, bool), Vec<(f64, bool, Point)>> = HashMap::new();
    for &lambda in lambdas {
        if lambda == 0.0 || lambda == 1.0 {
            continue;
        }
        let inside = lambda > 0.0 && lambda < 1.0;
        for sp in singular_locus(curve, branches, lambda).unwrap_or_default() {
            grouped.entry((sp.source_branch, sp.mirrored)).or_default().push((sp.u, inside, sp.point));
        }
    }
    let mut keys: Vec<(usize, bool)> = grouped.keys().copied().collect();
    keys.sort();
    let mut out = SigmaPrime::default();
    for key in keys {
        let mut pts = grouped.remove(&key).unwrap();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut run: Polyline = Vec::new();
        let mut run_inside = pts.first().map_or(true, |p| p.1);
        for (_, inside, p) in pts {
            if inside != run_inside && !run.is_empty() {
                let done = std::mem::take(&mut run);
                if run_inside { out.inside.push(done) } else { out.outside.push(done) }
            }
            run_inside = inside;
            run.push(p);
        }
        if !run.is_empty() {
            if run_inside { out.inside.push(run) } else { out.outside.push(run) }
        }
    }
    out.middle_axes = middle_axes(curve, branches, lambdas);
    out
}

/// Double points of `E_λ` for `0 < λ < 1/2`, linked into tracks across λ.
pub fn middle_axes(curve: &PlaneCurve, branches: &[ParallelBranch], lambdas: &[f64]) -> Vec<Polyline> {
    let diameter = curve.scale().diameter;
    let levels: Vec<Vec<Point>> = lambdas
        .iter()
        .filter(|&&l| l > 0.0 && l < 0.5)
        .map(|&lambda| {
            let slices = equidistant(curve, lambda, branches);
            let lines: Vec<(Polyline, bool)> = slices
                .iter()
                .filter(|b| !b.fully_degenerate)
                .map(|b| (b.points(), b.closed))
                .collect();
            let pts = polyline_double_points(&lines, diameter / 64.0);
            let keep = dedup_points(&pts, 1e-6 * diameter);
            keep.into_iter().map(|i| pts[i]).collect()
        })
        .collect();
    link_tracks(&levels, 0.05 * diameter)
}

/// Chord segments of bitangent pairs between the λ-points at the window ends.
pub fn criminant(curve: &PlaneCurve, bitangents: &[ParallelPair], window: (f64, f64)) -> Vec<Polyline> {
    bitangents
        .iter()
        .map(|p| {
            let chord = Chord::new(curve, *p);
            vec![lambda_point(&chord, window.0), lambda_point(&chord, window.1)]
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GcsLabel {
    /// `A₂^{A_k}`: stable germ away from the Wigner slice.
    A2Ak(u8),
    /// `A₂^{B_k}`: stable germ on the Wigner slice.
    A2Bk(u8),
    Unstable,
    FullyDegenerate,
    /// Regular point of the front with no GCS germ.
    RegularFront,
}

impl fmt::Display for GcsLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GcsLabel::A2Ak(k) => write!(f, "A2_A{k}"),
            GcsLabel::A2Bk(k) => write!(f, "A2_B{k}"),
            GcsLabel::Unstable => f.write_str("UNSTABLE"),
            GcsLabel::FullyDegenerate => f.write_str("FULLY_DEGENERATE"),
            GcsLabel::RegularFront => f.write_str("REGULAR"),
        }
    }
}

impl Serialize for GcsLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub parallel_residual: f64,
    /// `(1−λ)κ̃⁺ + λκ̃⁻`.
    pub a2_residual: f64,
    pub bitangent_residual: f64,
    pub contact_orders: Option<(u8, u8)>,
    pub fiber_tangency: Option<u8>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularityReport {
    pub point: Point,
    pub pair: ParallelPair,
    pub lambda: f64,
    pub label: GcsLabel,
    pub diagnostics: Diagnostics,
}

const BITANGENT_TOL: f64 = 1e-7;

fn is_half(lambda: f64) -> bool {
    (lambda - 0.5).abs() < 1e-12
}

/// Fiber tangency order of the front at the λ-point of `pair`, from the contact orders.
pub fn fiber_tangency_order_at_front(curve: &PlaneCurve, pair: &ParallelPair, lambda: f64) -> Result<u8> {
    let residual = singular_residual(curve, pair.s, pair.t, lambda);
    let tol = sing_tolerance(curve);
    if residual.abs() < tol {
        return Err(Error::A2ConditionFailed { residual, tol });
    }
    if bitangent_residual(curve, pair.s, pair.t).abs() > BITANGENT_TOL {
        return Ok(0);
    }
    let (a, b) = tangency_order(curve, pair)?;
    Ok(a.max(b))
}

/// Fiber tangency order estimated from how fast `E_{λ+δ}` leaves the λ-point:
/// distance `~ δ^(k+1)` for order `k`. Returns the order and the fitted exponent.
pub fn fiber_tangency_order_numeric(
    curve: &PlaneCurve,
    branches: &[ParallelBranch],
    pair: &ParallelPair,
    lambda: f64,
) -> Result<(u8, f64)> {
    let oriented = OrientedBranch::all(branches);
    let mut best: Option<(usize, usize, f64)> = None;
    for (k, ob) in oriented.iter().enumerate() {
        for i in 0..ob.len() {
            let d = torus_distance(ob.params(i), (pair.s, pair.t));
            if best.map_or(true, |b| d < b.2) {
                best = Some((k, i, d));
            }
        }
    }
    let (k, i, _) = best.ok_or_else(|| Error::BranchLinkFailure("no parallel branches".into()))?;
    let ob = oriented[k];
    let span = |u: f64| -> (f64, f64) {
        if ob.branch.closed_loop {
            (u - 2.0, u + 2.0)
        } else {
            ((u - 2.0).max(0.0), (u + 2.0).min(ob.branch.parameter_span()))
        }
    };
    let (lo, hi) = span(i as f64);
    let (u0, _) = golden_min(|u| torus_distance(ob.params_at(curve, u), (pair.s, pair.t)), lo, hi, 1e-13);
    let target = lambda_point(&Chord::new(curve, *pair), lambda);
    let deltas = [4e-3, 2e-3, 1e-3, 5e-4];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &delta in &deltas {
        let l = lambda + delta;
        let dist = |u: f64| {
            let (s, t) = ob.params_at(curve, u);
            (curve.eval(s) * l + curve.eval(t) * (1.0 - l) - target).norm()
        };
        let (lo, hi) = span(u0);
        let coarse = (0..=64)
            .map(|j| lo + (hi - lo) * j as f64 / 64.0)
            .min_by(|a, b| dist(*a).total_cmp(&dist(*b)))
            .unwrap();
        let step = (hi - lo) / 64.0;
        let (_, d) = golden_min(dist, coarse - step, coarse + step, 1e-14);
        xs.push(delta.ln());
        ys.push(d.max(f64::MIN_POSITIVE).ln());
    }
    let slope = fit_slope(&xs, &ys);
    Ok(((slope - 1.0).round().max(0.0) as u8, slope))
}

/// Label of the GCS germ at the λ-point of `pair`.
pub fn classify_point(curve: &PlaneCurve, pair: &ParallelPair, lambda: f64) -> Result<SingularityReport> {
    let g = parallel_residual(curve, pair.s, pair.t);
    if g.abs() > 1e3 * pair_tolerance(curve) {
        return Err(Error::NotParallel { s: pair.s, t: pair.t, residual: g });
    }
    let a2 = singular_residual(curve, pair.s, pair.t, lambda);
    let tol = sing_tolerance(curve);
    if a2.abs() < tol {
        return Err(Error::A2ConditionFailed { residual: a2, tol });
    }
    let b = bitangent_residual(curve, pair.s, pair.t);
    let mut diagnostics =
        Diagnostics { parallel_residual: g, a2_residual: a2, bitangent_residual: b, ..Default::default() };
    let label = if b.abs() > BITANGENT_TOL {
        diagnostics.fiber_tangency = Some(0);
        if is_half(lambda) {
            GcsLabel::A2Bk(1)
        } else {
            GcsLabel::RegularFront
        }
    } else {
        let orders = tangency_order(curve, pair)?;
        diagnostics.contact_orders = Some(orders);
        diagnostics.fiber_tangency = Some(orders.0.max(orders.1));
        match (orders, is_half(lambda)) {
            ((1, 1), true) => GcsLabel::A2Bk(2),
            ((1, 1), false) => GcsLabel::A2Ak(1),
            _ => GcsLabel::Unstable,
        }
    };
    Ok(SingularityReport {
        point: lambda_point(&Chord::new(curve, *pair), lambda),
        pair: *pair,
        lambda,
        label,
        diagnostics,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GcsOptions {
    pub grid_n: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_steps: usize,
    pub criminant_window: (f64, f64),
}

impl Default for GcsOptions {
    fn default() -> Self {
        GcsOptions { grid_n: 512, lambda_min: -0.5, lambda_max: 1.5, lambda_steps: 201, criminant_window: (-0.5, 1.5) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GcsDecomposition {
    pub branches: Vec<ParallelBranch>,
    pub wigner: Vec<EquidistantBranch>,
    pub wigner_cusps: CuspSet,
    pub css: CssEnvelope,
    pub sweep: SigmaPrime,
    pub bitangents: Vec<ParallelPair>,
    pub criminant: Vec<Polyline>,
    pub reports: Vec<SingularityReport>,
    pub fully_degenerate: bool,
}

pub fn assemble_gcs(curve: &PlaneCurve, options: &GcsOptions) -> Result<GcsDecomposition> {
    let branches = find_parallel_branches(curve, options.grid_n)?;
    let bitangents = find_bitangent_pairs(curve, &branches);
    let wigner = wigner_caustic(curve, &branches);
    let wigner_cusps = wigner_cusps(curve, &branches);
    let css = css_envelope(curve, &branches);
    let lambdas = front_lambdas(options.lambda_min, options.lambda_max, options.lambda_steps);
    let sweep = sigma_prime_sweep(curve, &branches, &lambdas);
    let criminant = criminant(curve, &bitangents, options.criminant_window);
    let fully_degenerate = !wigner.is_empty() && wigner.iter().all(|b| b.fully_degenerate);

    let mut reports = Vec::new();
    for w in &wigner {
        let first = &w.samples[0];
        let pair = ParallelPair::new(curve, first.s, first.t);
        if w.fully_degenerate {
            reports.push(SingularityReport {
                point: first.point,
                pair,
                lambda: 0.5,
                label: GcsLabel::FullyDegenerate,
                diagnostics: Diagnostics {
                    parallel_residual: parallel_residual(curve, pair.s, pair.t),
                    a2_residual: singular_residual(curve, pair.s, pair.t, 0.5),
                    bitangent_residual: bitangent_residual(curve, pair.s, pair.t),
                    ..Default::default()
                },
            });
            continue;
        }
        let most_regular = w
            .samples
            .iter()
            .filter(|s| bitangent_residual(curve, s.s, s.t).abs() > BITANGENT_TOL)
            .max_by(|a, b| {
                singular_residual(curve, a.s, a.t, 0.5)
                    .abs()
                    .total_cmp(&singular_residual(curve, b.s, b.t, 0.5).abs())
            });
        if let Some(sample) = most_regular {
            reports.push(classify_point(curve, &ParallelPair::new(curve, sample.s, sample.t), 0.5)?);
        }
    }
    for pair in &bitangents {
        match classify_point(curve, pair, 0.5) {
            Ok(r) => reports.push(r),
            Err(e) => log::warn!("bitangent pair ({}, {}) not classified: {e}", pair.s, pair.t),
        }
    }
    Ok(GcsDecomposition {
        branches,
        wigner,
        wigner_cusps,
        css,
        sweep,
        bitangents,
        criminant,
        reports,
        fully_degenerate,
    })
}

/// `(Wigner cusps, CSS cusps)` of a curve.
pub fn cusp_counts(curve: &PlaneCurve, grid_n: usize) -> Result<(usize, usize)> {
    let branches = find_parallel_branches(curve, grid_n)?;
    Ok((wigner_cusps(curve, &branches).count(), css_envelope(curve, &branches).cusps.count()))
}

/// Random convex support curves with harmonics 3..=`top` until one has the
/// requested `(Wigner, CSS)` cusp counts.
pub fn search_cusp_class<R: Rng>(
    rng: &mut R,
    target: (usize, usize),
    top_harmonic: usize,
    attempts: usize,
    grid_n: usize,
) -> Option<PlaneCurve> {
    for _ in 0..attempts {
        let curve = random_convex_support(rng, 3..=top_harmonic, 0.15);
        if cusp_counts(&curve, grid_n).ok() == Some(target) {
            return Some(curve);
        }
    }
    None
}
