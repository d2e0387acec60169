//! Affine λ-equidistants, the Wigner caustic, the extended front and the
//! chord transformation.

use std::f64::consts::TAU;

use nalgebra::Matrix4;
use rayon::prelude::*;
use serde::Serialize;

use crate::curve_model::{cross, wrap_pi, PlaneCurve, Point};
use crate::error::{Error, Result};
use crate::numeric::{brent, golden_min, PointIndex};
use crate::parallel_chords::{
    bitangent_residual, lambda_point, tangency_order, Chord, ParallelBranch, ParallelPair, MIN_GRID,
};

/// `x = λx⁺ + (1−λ)x⁻` together with `ẋ = λx⁺ − (1−λ)x⁻`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChordCoordinates {
    pub x: Point,
    pub xdot: Point,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda == 0.0 || lambda == 1.0 || !lambda.is_finite() {
        return Err(Error::DegenerateLambda(lambda));
    }
    Ok(())
}

pub fn chord_transform(lambda: f64, x_plus: &Point, x_minus: &Point) -> Result<ChordCoordinates> {
    check_lambda(lambda)?;
    Ok(ChordCoordinates {
        x: x_plus * lambda + x_minus * (1.0 - lambda),
        xdot: x_plus * lambda - x_minus * (1.0 - lambda),
    })
}

pub fn inverse_chord_transform(lambda: f64, x: &Point, xdot: &Point) -> Result<(Point, Point)> {
    check_lambda(lambda)?;
    Ok(((x + xdot) / (2.0 * lambda), (x - xdot) / (2.0 * (1.0 - lambda))))
}

/// Matrix of the chord transformation on `(p⁺, q⁺, p⁻, q⁻) ↦ (p, q, ṗ, q̇)`.
pub fn chord_transform_matrix(lambda: f64) -> Matrix4<f64> {
    let mu = 1.0 - lambda;
    Matrix4::new(
        lambda, 0.0, mu, 0.0, //
        0.0, lambda, 0.0, mu, //
        lambda, 0.0, -mu, 0.0, //
        0.0, lambda, 0.0, -mu,
    )
}

/// Gram matrix of `2λ²ω ⊖ 2(1−λ)²ω` with `ω = dp∧dq` on each factor.
pub fn weighted_form_matrix(lambda: f64) -> Matrix4<f64> {
    let a = 2.0 * lambda * lambda;
    let b = 2.0 * (1.0 - lambda) * (1.0 - lambda);
    Matrix4::new(
        0.0, a, 0.0, 0.0, //
        -a, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, -b, //
        0.0, 0.0, b, 0.0,
    )
}

/// Gram matrix of `dṗ∧dq + dp∧dq̇` in the coordinates `(p, q, ṗ, q̇)`.
pub fn dot_form_matrix() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0,
    )
}

/// Largest entry of `Φᵀ·Ω̇·Φ − Ω_λ`.
pub fn pullback_residual(lambda: f64) -> f64 {
    let phi = chord_transform_matrix(lambda);
    (phi.transpose() * dot_form_matrix() * phi - weighted_form_matrix(lambda)).amax()
}

/// Curvatures of both endpoints in the frame of the shared tangent line:
/// `κ̃⁺ = κ(s)` and `κ̃⁻ = ±κ(t)`, negated when the tangents are opposite.
pub fn adapted_curvatures(curve: &PlaneCurve, s: f64, t: f64) -> (f64, f64) {
    let sign = if curve.tangent(s).dot(&curve.tangent(t)) >= 0.0 { 1.0 } else { -1.0 };
    (curve.curvature(s), sign * curve.curvature(t))
}

/// `(1−λ)κ̃⁺ + λκ̃⁻`, i.e. `λ(1−λ)` times `κ̃⁺/λ + κ̃⁻/(1−λ)`.
pub fn singular_residual(curve: &PlaneCurve, s: f64, t: f64, lambda: f64) -> f64 {
    let (kp, km) = adapted_curvatures(curve, s, t);
    (1.0 - lambda) * kp + lambda * km
}

pub fn sing_tolerance(curve: &PlaneCurve) -> f64 {
    1e-9 * curve.scale().max_curvature
}

/// A parallel branch walked with its pairs in stored or swapped order.
#[derive(Clone, Copy, Debug)]
pub struct OrientedBranch<'a> {
    pub branch: &'a ParallelBranch,
    pub swapped: bool,
}

impl<'a> OrientedBranch<'a> {
    /// Each branch once, plus the swapped copy of branches that do not contain their mirror.
    pub fn all(branches: &'a [ParallelBranch]) -> Vec<OrientedBranch<'a>> {
        let mut out = Vec::new();
        for b in branches {
            out.push(OrientedBranch { branch: b, swapped: false });
            if !b.self_mirror {
                out.push(OrientedBranch { branch: b, swapped: true });
            }
        }
        out
    }

    pub fn params(&self, i: usize) -> (f64, f64) {
        let p = &self.branch.pairs[i];
        if self.swapped {
            (p.t, p.s)
        } else {
            (p.s, p.t)
        }
    }

    pub fn params_at(&self, curve: &PlaneCurve, u: f64) -> (f64, f64) {
        let (s, t) = self.branch.params_at(curve, u);
        if self.swapped {
            (t, s)
        } else {
            (s, t)
        }
    }

    pub fn pair_at(&self, curve: &PlaneCurve, u: f64) -> ParallelPair {
        let (s, t) = self.params_at(curve, u);
        ParallelPair::new(curve, s, t)
    }

    /// Unit `(ds/du, dt/du)` in this orientation.
    pub fn direction_at(&self, curve: &PlaneCurve, u: f64) -> (f64, f64) {
        let (s, t) = self.branch.params_at(curve, u);
        let (ds, dt) = self.branch.direction_at(curve, u, s, t);
        if self.swapped {
            (dt, ds)
        } else {
            (ds, dt)
        }
    }

    pub fn len(&self) -> usize {
        self.branch.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branch.is_empty()
    }

    /// Roots of `f(s, t)` along the branch, bracketed between consecutive samples.
    pub fn roots<F: Fn(f64, f64) -> f64>(&self, curve: &PlaneCurve, f: F) -> Vec<f64> {
        let values: Vec<f64> = (0..self.len())
            .map(|i| {
                let (s, t) = self.params(i);
                f(s, t)
            })
            .collect();
        let mut out = Vec::new();
        for i in 0..self.branch.segment_count() {
            let j = (i + 1) % self.len();
            if values[i] == 0.0 {
                out.push(i as f64);
                continue;
            }
            if (values[i] > 0.0) == (values[j] > 0.0) || values[j] == 0.0 {
                continue;
            }
            let g = |u: f64| {
                let (s, t) = self.params_at(curve, u);
                f(s, t)
            };
            if let Some(u) = brent(g, i as f64, i as f64 + 1.0, 1e-13) {
                out.push(u);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquidistantSample {
    pub s: f64,
    pub t: f64,
    /// Position along the source branch in sample-index units.
    pub u: f64,
    pub point: Point,
    pub regular: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquidistantBranch {
    pub lambda: f64,
    pub source_branch: usize,
    /// Pairs taken in `(t, s)` order.
    pub mirrored: bool,
    pub closed: bool,
    /// Every pair maps to the same point; `samples` holds that single point.
    pub fully_degenerate: bool,
    pub samples: Vec<EquidistantSample>,
}

impl EquidistantBranch {
    pub fn points(&self) -> Vec<Point> {
        self.samples.iter().map(|s| s.point).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularPoint {
    pub pair: ParallelPair,
    pub point: Point,
    pub source_branch: usize,
    pub mirrored: bool,
    pub u: f64,
}

/// Singular points of `E_λ`: roots of `(1−λ)κ̃⁺ + λκ̃⁻` along every oriented branch.
pub fn singular_locus(curve: &PlaneCurve, branches: &[ParallelBranch], lambda: f64) -> Result<Vec<SingularPoint>> {
    check_lambda(lambda)?;
    let tol = sing_tolerance(curve);
    let mut out = Vec::new();
    for ob in OrientedBranch::all(branches) {
        let degenerate = (0..ob.len()).all(|i| {
            let (s, t) = ob.params(i);
            singular_residual(curve, s, t, lambda).abs() < tol
        });
        if degenerate {
            continue;
        }
        for u in ob.roots(curve, |s, t| singular_residual(curve, s, t, lambda)) {
            let pair = ob.pair_at(curve, u);
            let point = lambda_point(&Chord::new(curve, pair), lambda);
            out.push(SingularPoint { pair, point, source_branch: ob.branch.id, mirrored: ob.swapped, u });
        }
    }
    Ok(out)
}

fn spread(points: &[Point]) -> f64 {
    let c = points.iter().fold(Point::zeros(), |a, p| a + p) / points.len() as f64;
    points.iter().map(|p| (p - c).norm()).fold(0.0, f64::max)
}

/// `E_λ` traced along every branch, including swapped copies of non-self-mirror branches.
pub fn equidistant(curve: &PlaneCurve, lambda: f64, branches: &[ParallelBranch]) -> Vec<EquidistantBranch> {
    let tol = sing_tolerance(curve);
    let interior = lambda != 0.0 && lambda != 1.0;
    let diameter = curve.scale().diameter;
    OrientedBranch::all(branches)
        .into_iter()
        .map(|ob| {
            let mut samples: Vec<EquidistantSample> = (0..ob.len())
                .map(|i| {
                    let (s, t) = ob.params(i);
                    let point = curve.eval(s) * lambda + curve.eval(t) * (1.0 - lambda);
                    let regular = !interior || singular_residual(curve, s, t, lambda).abs() >= tol;
                    EquidistantSample { s, t, u: i as f64, point, regular }
                })
                .collect();
            let points: Vec<Point> = samples.iter().map(|s| s.point).collect();
            let collapsed = spread(&points) < 1e-9 * diameter;
            if collapsed {
                let c = points.iter().fold(Point::zeros(), |a, p| a + p) / points.len() as f64;
                let first = &samples[0];
                samples = vec![EquidistantSample { s: first.s, t: first.t, u: 0.0, point: c, regular: false }];
            } else if interior {
                for u in ob.roots(curve, |s, t| singular_residual(curve, s, t, lambda)) {
                    let (s, t) = ob.params_at(curve, u);
                    let point = curve.eval(s) * lambda + curve.eval(t) * (1.0 - lambda);
                    samples.push(EquidistantSample { s, t, u, point, regular: false });
                }
                samples.sort_by(|a, b| a.u.total_cmp(&b.u));
            }
            EquidistantBranch {
                lambda,
                source_branch: ob.branch.id,
                mirrored: ob.swapped,
                closed: ob.branch.closed_loop,
                fully_degenerate: collapsed,
                samples,
            }
        })
        .collect()
}

pub fn wigner_caustic(curve: &PlaneCurve, branches: &[ParallelBranch]) -> Vec<EquidistantBranch> {
    equidistant(curve, 0.5, branches)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrontSample {
    pub lambda: f64,
    pub point: Point,
    pub s: f64,
    pub t: f64,
    pub fiber_tangency_order: u8,
    pub regular: bool,
}

/// Uniform λ grid, refined tenfold inside the grid cells adjacent to `λ = 1/2`.
pub fn front_lambdas(lambda_min: f64, lambda_max: f64, steps: usize) -> Vec<f64> {
    if steps < 2 {
        return vec![lambda_min];
    }
    let h = (lambda_max - lambda_min) / (steps - 1) as f64;
    let mut out: Vec<f64> = (0..steps).map(|i| lambda_min + h * i as f64).collect();
    if lambda_min < 0.5 && lambda_max > 0.5 {
        for k in -9..=9 {
            let l = 0.5 + k as f64 * h / 10.0;
            if l > lambda_min && l < lambda_max {
                out.push(l);
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * h.max(1e-300));
    }
    out
}

/// Fiber tangency order from the contact orders of a bitangent pair:
/// 0 for transversal fibers, otherwise the largest contact order.
pub fn fiber_tangency_from_geometry(curve: &PlaneCurve, pair: &ParallelPair) -> Result<u8> {
    if bitangent_residual(curve, pair.s, pair.t).abs() > 1e-7 {
        return Ok(0);
    }
    let (a, b) = tangency_order(curve, pair)?;
    Ok(a.max(b))
}

/// `{λ} × E_λ` stacked over a λ grid; bitangent pairs are inserted into every slice.
pub fn extended_front(
    curve: &PlaneCurve,
    branches: &[ParallelBranch],
    bitangents: &[ParallelPair],
    lambda_min: f64,
    lambda_max: f64,
    lambda_steps: usize,
) -> Result<Vec<FrontSample>> {
    let lambdas = front_lambdas(lambda_min, lambda_max, lambda_steps);
    let orders: Vec<u8> = bitangents.iter().map(|p| fiber_tangency_from_geometry(curve, p)).collect::<Result<_>>()?;
    let tol = sing_tolerance(curve);
    let slices: Vec<Vec<FrontSample>> = lambdas
        .par_iter()
        .map(|&lambda| {
            let mut out: Vec<FrontSample> = equidistant(curve, lambda, branches)
                .into_iter()
                .flat_map(|b| b.samples)
                .map(|s| FrontSample {
                    lambda,
                    point: s.point,
                    s: s.s,
                    t: s.t,
                    fiber_tangency_order: 0,
                    regular: s.regular,
                })
                .collect();
            for (pair, &order) in bitangents.iter().zip(&orders) {
                let regular = lambda == 0.0
                    || lambda == 1.0
                    || singular_residual(curve, pair.s, pair.t, lambda).abs() >= tol;
                out.push(FrontSample {
                    lambda,
                    point: lambda_point(&Chord::new(curve, *pair), lambda),
                    s: pair.s,
                    t: pair.t,
                    fiber_tangency_order: if regular { order } else { 0 },
                    regular,
                });
            }
            out
        })
        .collect();
    Ok(slices.into_iter().flatten().collect())
}

/// Critical values of `(s, t) ↦ λX(s) + (1−λ)X(t)`, found by bisecting sign
/// changes of its Jacobian determinant on the parameter grid.
pub fn gensing_scan(curve: &PlaneCurve, lambda: f64, grid_n: usize) -> Result<Vec<Point>> {
    check_lambda(lambda)?;
    if grid_n < MIN_GRID {
        return Err(Error::GridTooSmall(grid_n));
    }
    let n = grid_n;
    let h = TAU / n as f64;
    let weight = lambda * (1.0 - lambda);
    let jac = |s: f64, t: f64| weight * cross(&curve.tangent(s), &curve.tangent(t));
    let tangents: Vec<Point> = (0..n).map(|i| curve.tangent(i as f64 * h)).collect();
    let at = |i: usize, j: usize| weight * cross(&tangents[i % n], &tangents[j % n]);
    let bisect = |mut a: (f64, f64), mut b: (f64, f64)| {
        let fa = jac(a.0, a.1);
        for _ in 0..64 {
            let m = (0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1));
            if (jac(m.0, m.1) >= 0.0) == (fa >= 0.0) {
                a = m;
            } else {
                b = m;
            }
        }
        (0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1))
    };
    let rows: Vec<Vec<Point>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            for j in 0..n {
                if i == j {
                    continue;
                }
                let here = at(i, j) >= 0.0;
                let (s0, t0) = (i as f64 * h, j as f64 * h);
                let mut edges = Vec::new();
                if (i + 1) % n != j && (at(i + 1, j) >= 0.0) != here {
                    edges.push((s0 + h, t0));
                }
                if (j + 1) % n != i && (at(i, j + 1) >= 0.0) != here {
                    edges.push((s0, t0 + h));
                }
                for end in edges {
                    let (s, t) = bisect((s0, t0), end);
                    if wrap_pi(s - t).abs() >= h {
                        out.push(curve.eval(s) * lambda + curve.eval(t) * (1.0 - lambda));
                    }
                }
            }
            out
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Spacing of grid samples mapped into the plane: `max|X′|·2π/grid_n`.
pub fn grid_pitch(curve: &PlaneCurve, grid_n: usize) -> f64 {
    curve.scale().max_speed * TAU / grid_n as f64
}

/// Continuous `E_λ` for distance queries.
pub struct EquidistantField<'a> {
    curve: &'a PlaneCurve,
    lambda: f64,
    oriented: Vec<OrientedBranch<'a>>,
    samples: Vec<Point>,
    owners: Vec<(usize, usize)>,
    cell: f64,
}

impl<'a> EquidistantField<'a> {
    pub fn new(curve: &'a PlaneCurve, branches: &'a [ParallelBranch], lambda: f64) -> Self {
        let oriented = OrientedBranch::all(branches);
        let mut samples = Vec::new();
        let mut owners = Vec::new();
        for (k, ob) in oriented.iter().enumerate() {
            for i in 0..ob.len() {
                let (s, t) = ob.params(i);
                samples.push(curve.eval(s) * lambda + curve.eval(t) * (1.0 - lambda));
                owners.push((k, i));
            }
        }
        let cell = (curve.scale().diameter / 128.0).max(f64::MIN_POSITIVE);
        EquidistantField { curve, lambda, oriented, samples, owners, cell }
    }

    pub fn point_at(&self, branch: usize, u: f64) -> Point {
        let (s, t) = self.oriented[branch].params_at(self.curve, u);
        self.curve.eval(s) * self.lambda + self.curve.eval(t) * (1.0 - self.lambda)
    }

    pub fn samples(&self) -> &[Point] {
        &self.samples
    }

    /// Distance from `p` to the continuous equidistant.
    pub fn distance(&self, p: &Point) -> f64 {
        let index = PointIndex::new(&self.samples, self.cell);
        self.distance_with(&index, p)
    }

    pub fn distance_with(&self, index: &PointIndex, p: &Point) -> f64 {
        let Some((k, d0)) = index.nearest(p) else { return f64::INFINITY };
        let (b, i) = self.owners[k];
        let ob = &self.oriented[b];
        let (lo, hi) = if ob.branch.closed_loop {
            (i as f64 - 1.0, i as f64 + 1.0)
        } else {
            ((i as f64 - 1.0).max(0.0), (i as f64 + 1.0).min(ob.branch.parameter_span()))
        };
        if hi <= lo {
            return d0;
        }
        let (_, d) = golden_min(|u| (self.point_at(b, u) - p).norm(), lo, hi, 1e-12);
        d.min(d0)
    }

    pub fn index(&self) -> PointIndex<'_> {
        PointIndex::new(&self.samples, self.cell)
    }
}

/// Hausdorff distance between two continuous equidistants, probed at the samples of each.
pub fn equidistant_hausdorff(a: &EquidistantField, b: &EquidistantField) -> f64 {
    let ia = a.index();
    let ib = b.index();
    let ab = a.samples().par_iter().map(|p| b.distance_with(&ib, p)).reduce(|| 0.0, f64::max);
    let ba = b.samples().par_iter().map(|p| a.distance_with(&ia, p)).reduce(|| 0.0, f64::max);
    ab.max(ba)
}
