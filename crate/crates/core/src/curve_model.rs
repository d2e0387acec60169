//! Smooth closed planar curves given by finite trigonometric series.
//!
//! Two input forms are supported:
//! - Fourier-parametric: `x(t)`, `y(t)` as cosine/sine series in `t ∈ [0, 2π)`.
//! - Support function: `h(θ)` of a convex curve, parametrized by the normal angle `θ`.
//!
//! Support curves are converted exactly into Fourier form
//! (`X = h·u + h′·u⊥` is again a trigonometric polynomial), so every derivative
//! is evaluated term by term from the series.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix2, Vector2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = Vector2<f64>;

/// Rotation by +π/2.
#[inline]
pub fn perp(v: &Point) -> Point {
    Point::new(-v.y, v.x)
}

#[inline]
pub fn cross(a: &Point, b: &Point) -> f64 {
    a.x * b.y - a.y * b.x
}

/// `f(t) = Σ cos[k]·cos(kt) + sin[k]·sin(kt)`; index is the harmonic.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrigSeries {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigSeries {
    pub fn new(cos: Vec<f64>, sin: Vec<f64>) -> Self {
        TrigSeries { cos, sin }
    }

    pub fn degree(&self) -> usize {
        self.cos.len().max(self.sin.len()).saturating_sub(1)
    }

    fn coeff(&self, k: usize) -> (f64, f64) {
        (
            self.cos.get(k).copied().unwrap_or(0.0),
            if k == 0 { 0.0 } else { self.sin.get(k).copied().unwrap_or(0.0) },
        )
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.derivatives::<1>(t)[0]
    }

    /// `[f, f′, …, f^(N−1)]` at `t`.
    pub fn derivatives<const N: usize>(&self, t: f64) -> [f64; N] {
        let mut out = [0.0; N];
        for k in 0..=self.degree() {
            let (a, b) = self.coeff(k);
            if a == 0.0 && b == 0.0 {
                continue;
            }
            if k == 0 {
                out[0] += a;
                continue;
            }
            let kf = k as f64;
            let (s, c) = (kf * t).sin_cos();
            let mut scale = 1.0;
            for (n, slot) in out.iter_mut().enumerate() {
                // d^n/dt^n of cos(kt), sin(kt) is k^n·cos, sin shifted by nπ/2.
                let (cn, sn) = match n % 4 {
                    0 => (c, s),
                    1 => (-s, c),
                    2 => (-c, -s),
                    _ => (s, -c),
                };
                *slot += scale * (a * cn + b * sn);
                scale *= kf;
            }
        }
        out
    }

    pub fn derivative(&self) -> TrigSeries {
        let n = self.degree() + 1;
        let mut cos = vec![0.0; n];
        let mut sin = vec![0.0; n];
        for k in 1..n {
            let (a, b) = self.coeff(k);
            cos[k] = k as f64 * b;
            sin[k] = -(k as f64) * a;
        }
        TrigSeries { cos, sin }
    }

    fn padded(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut cos = vec![0.0; n];
        let mut sin = vec![0.0; n];
        for k in 0..=self.degree() {
            let (a, b) = self.coeff(k);
            cos[k] = a;
            sin[k] = b;
        }
        (cos, sin)
    }

    /// `f(t)·cos t`.
    pub fn mul_cos(&self) -> TrigSeries {
        let n = self.degree() + 2;
        let (a, b) = self.padded(n);
        let mut cos = vec![0.0; n];
        let mut sin = vec![0.0; n];
        cos[1] += a[0];
        for k in 1..n - 1 {
            cos[k - 1] += 0.5 * a[k];
            cos[k + 1] += 0.5 * a[k];
            sin[k + 1] += 0.5 * b[k];
            if k > 1 {
                sin[k - 1] += 0.5 * b[k];
            }
        }
        TrigSeries { cos, sin }
    }

    /// `f(t)·sin t`.
    pub fn mul_sin(&self) -> TrigSeries {
        let n = self.degree() + 2;
        let (a, b) = self.padded(n);
        let mut cos = vec![0.0; n];
        let mut sin = vec![0.0; n];
        sin[1] += a[0];
        for k in 1..n - 1 {
            sin[k + 1] += 0.5 * a[k];
            if k > 1 {
                sin[k - 1] -= 0.5 * a[k];
            }
            cos[k - 1] += 0.5 * b[k];
            cos[k + 1] -= 0.5 * b[k];
        }
        TrigSeries { cos, sin }
    }

    pub fn add(&self, other: &TrigSeries) -> TrigSeries {
        let n = self.degree().max(other.degree()) + 1;
        let (a, b) = self.padded(n);
        let (c, d) = other.padded(n);
        TrigSeries {
            cos: a.iter().zip(&c).map(|(x, y)| x + y).collect(),
            sin: b.iter().zip(&d).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn scaled(&self, f: f64) -> TrigSeries {
        TrigSeries {
            cos: self.cos.iter().map(|c| c * f).collect(),
            sin: self.sin.iter().map(|c| c * f).collect(),
        }
    }

    fn all_finite(&self) -> bool {
        self.cos.iter().chain(&self.sin).all(|c| c.is_finite())
    }
}

/// JSON curve description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase", deny_unknown_fields)]
pub enum CurveSpec {
    Fourier {
        #[serde(default)]
        x_cos: Vec<f64>,
        #[serde(default)]
        x_sin: Vec<f64>,
        #[serde(default)]
        y_cos: Vec<f64>,
        #[serde(default)]
        y_sin: Vec<f64>,
    },
    Support {
        #[serde(default)]
        h_cos: Vec<f64>,
        #[serde(default)]
        h_sin: Vec<f64>,
    },
}

/// Scale quantities sampled once at construction; used for scale-free tolerances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveScale {
    pub diameter: f64,
    pub length: f64,
    pub max_speed: f64,
    pub min_speed: f64,
    pub max_curvature: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveJet {
    pub point: Point,
    /// `X′, X″, …` up to the requested order.
    pub derivatives: Vec<Point>,
    pub signed_curvature: f64,
    pub tangent_angle: f64,
}

#[derive(Clone, Debug)]
pub struct PlaneCurve {
    spec: CurveSpec,
    x: TrigSeries,
    y: TrigSeries,
    support: Option<TrigSeries>,
    scale: CurveScale,
}

const SCALE_SAMPLES: usize = 2048;
const DIAMETER_SAMPLES: usize = 512;

impl PlaneCurve {
    pub fn from_spec(spec: CurveSpec) -> Result<PlaneCurve> {
        match &spec {
            CurveSpec::Fourier { x_cos, x_sin, y_cos, y_sin } => {
                let x = TrigSeries::new(x_cos.clone(), x_sin.clone());
                let y = TrigSeries::new(y_cos.clone(), y_sin.clone());
                Self::build(spec, x, y, None)
            }
            CurveSpec::Support { h_cos, h_sin } => {
                let h = TrigSeries::new(h_cos.clone(), h_sin.clone());
                if !h.all_finite() {
                    return Err(Error::InvalidCurve("non-finite coefficient".into()));
                }
                check_support_convex(&h)?;
                let hp = h.derivative();
                let x = h.mul_cos().add(&hp.mul_sin().scaled(-1.0));
                let y = h.mul_sin().add(&hp.mul_cos());
                Self::build(spec, x, y, Some(h))
            }
        }
    }

    pub fn from_fourier(x: TrigSeries, y: TrigSeries) -> Result<PlaneCurve> {
        let spec = CurveSpec::Fourier {
            x_cos: x.cos.clone(),
            x_sin: x.sin.clone(),
            y_cos: y.cos.clone(),
            y_sin: y.sin.clone(),
        };
        Self::build(spec, x, y, None)
    }

    pub fn from_support(h: TrigSeries) -> Result<PlaneCurve> {
        Self::from_spec(CurveSpec::Support { h_cos: h.cos, h_sin: h.sin })
    }

    pub fn circle(radius: f64, center: Point) -> Result<PlaneCurve> {
        Self::from_fourier(
            TrigSeries::new(vec![center.x, radius], vec![]),
            TrigSeries::new(vec![center.y], vec![0.0, radius]),
        )
    }

    pub fn ellipse(a: f64, b: f64) -> Result<PlaneCurve> {
        Self::from_fourier(
            TrigSeries::new(vec![0.0, a], vec![]),
            TrigSeries::new(vec![], vec![0.0, b]),
        )
    }

    fn build(spec: CurveSpec, x: TrigSeries, y: TrigSeries, support: Option<TrigSeries>) -> Result<PlaneCurve> {
        if !x.all_finite() || !y.all_finite() {
            return Err(Error::InvalidCurve("non-finite coefficient".into()));
        }
        if x.degree() == 0 && y.degree() == 0 {
            return Err(Error::InvalidCurve("constant curve".into()));
        }
        let mut curve = PlaneCurve {
            spec,
            x,
            y,
            support,
            scale: CurveScale { diameter: 0.0, length: 0.0, max_speed: 0.0, min_speed: 0.0, max_curvature: 0.0 },
        };
        curve.scale = curve.measure()?;
        Ok(curve)
    }

    fn measure(&self) -> Result<CurveScale> {
        let n = SCALE_SAMPLES.max(64 * (self.x.degree().max(self.y.degree()) + 1));
        let mut length = 0.0;
        let mut max_speed: f64 = 0.0;
        let mut min_speed = f64::INFINITY;
        let mut min_at = 0.0;
        let mut max_curvature: f64 = 0.0;
        for i in 0..n {
            let t = TAU * i as f64 / n as f64;
            let d = self.derivs::<3>(t);
            let speed = d[1].norm();
            length += speed * TAU / n as f64;
            max_speed = max_speed.max(speed);
            if speed < min_speed {
                min_speed = speed;
                min_at = t;
            }
            if speed > 0.0 {
                max_curvature = max_curvature.max((cross(&d[1], &d[2]) / speed.powi(3)).abs());
            }
        }
        let pts: Vec<Point> = (0..DIAMETER_SAMPLES)
            .map(|i| self.eval(TAU * i as f64 / DIAMETER_SAMPLES as f64))
            .collect();
        let mut diameter: f64 = 0.0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                diameter = diameter.max((pts[i] - pts[j]).norm());
            }
        }
        if min_speed <= 1e-8 * diameter {
            return Err(Error::Irregular { t: min_at, speed: min_speed });
        }
        Ok(CurveScale { diameter, length, max_speed, min_speed, max_curvature })
    }

    pub fn spec(&self) -> &CurveSpec {
        &self.spec
    }

    pub fn scale(&self) -> &CurveScale {
        &self.scale
    }

    pub fn support_function(&self) -> Option<&TrigSeries> {
        self.support.as_ref()
    }

    pub fn is_support_form(&self) -> bool {
        self.support.is_some()
    }

    pub fn x_series(&self) -> &TrigSeries {
        &self.x
    }

    pub fn y_series(&self) -> &TrigSeries {
        &self.y
    }

    pub fn eval(&self, t: f64) -> Point {
        Point::new(self.x.eval(t), self.y.eval(t))
    }

    /// `[X, X′, …, X^(N−1)]` at `t`.
    pub fn derivs<const N: usize>(&self, t: f64) -> [Point; N] {
        let dx = self.x.derivatives::<N>(t);
        let dy = self.y.derivatives::<N>(t);
        let mut out = [Point::zeros(); N];
        for i in 0..N {
            out[i] = Point::new(dx[i], dy[i]);
        }
        out
    }

    pub fn tangent(&self, t: f64) -> Point {
        self.derivs::<2>(t)[1]
    }

    pub fn jet(&self, t: f64, order: usize) -> Result<CurveJet> {
        if !(1..=4).contains(&order) {
            return Err(Error::JetOrder(order));
        }
        let d = self.derivs::<5>(t);
        let speed = d[1].norm();
        if speed <= 1e-8 * self.scale.diameter {
            return Err(Error::Irregular { t, speed });
        }
        let (signed_curvature, tangent_angle) = if order >= 2 {
            (cross(&d[1], &d[2]) / speed.powi(3), d[1].y.atan2(d[1].x).rem_euclid(TAU))
        } else {
            (f64::NAN, d[1].y.atan2(d[1].x).rem_euclid(TAU))
        };
        Ok(CurveJet { point: d[0], derivatives: d[1..=order].to_vec(), signed_curvature, tangent_angle })
    }

    pub fn curvature(&self, t: f64) -> f64 {
        let d = self.derivs::<3>(t);
        cross(&d[1], &d[2]) / d[1].norm().powi(3)
    }

    /// Signed curvature and its derivative with respect to the curve parameter.
    pub fn curvature_with_derivative(&self, t: f64) -> (f64, f64) {
        let d = self.derivs::<4>(t);
        let v2 = d[1].norm_squared();
        let v = v2.sqrt();
        let c12 = cross(&d[1], &d[2]);
        let k = c12 / (v2 * v);
        let dk = cross(&d[1], &d[3]) / (v2 * v) - 3.0 * c12 * d[1].dot(&d[2]) / (v2 * v2 * v);
        (k, dk)
    }

    /// Radius of curvature `ρ = h + h″` of a support-form curve.
    pub fn radius_of_curvature(&self, theta: f64) -> Option<f64> {
        self.support.as_ref().map(|h| {
            let d = h.derivatives::<3>(theta);
            d[0] + d[2]
        })
    }

    /// Coefficients `(c2, c3, c4)` of the local graph `p = c2 q² + c3 q³ + c4 q⁴`
    /// of the curve at `X(t)` in the orthonormal frame whose q-axis is `dir`
    /// (a unit vector parallel to the tangent) and p-axis is `perp(dir)`.
    pub fn local_graph(&self, t: f64, dir: &Point) -> [f64; 3] {
        let d = self.derivs::<5>(t);
        let n = perp(dir);
        let fact = [1.0, 1.0, 2.0, 6.0, 24.0];
        let a: Vec<f64> = (0..5).map(|k| dir.dot(&d[k]) / fact[k]).collect();
        let p: Vec<f64> = (0..5).map(|k| n.dot(&d[k]) / fact[k]).collect();
        let b1 = 1.0 / a[1];
        let b2 = -a[2] * b1.powi(3);
        let b3 = (2.0 * a[2] * a[2] - a[1] * a[3]) * b1.powi(5);
        let c2 = p[2] * b1 * b1;
        let c3 = 2.0 * p[2] * b1 * b2 + p[3] * b1.powi(3);
        let c4 = p[2] * (b2 * b2 + 2.0 * b1 * b3) + 3.0 * p[3] * b1 * b1 * b2 + p[4] * b1.powi(4);
        [c2, c3, c4]
    }

    /// Image under `X ↦ A·X + b`, returned in Fourier form with the same parametrization.
    pub fn affine_image(&self, map: &AffineMap) -> Result<PlaneCurve> {
        let a = &map.linear;
        let x = self.x.scaled(a[(0, 0)]).add(&self.y.scaled(a[(0, 1)]));
        let y = self.x.scaled(a[(1, 0)]).add(&self.y.scaled(a[(1, 1)]));
        let shift = |s: TrigSeries, c: f64| {
            let mut s = s;
            if s.cos.is_empty() {
                s.cos.push(0.0);
            }
            s.cos[0] += c;
            s
        };
        Self::from_fourier(shift(x, map.translation.x), shift(y, map.translation.y))
    }

    /// Euclidean distance from `p` to the curve, minimized over the continuous parameter.
    pub fn distance_to(&self, p: &Point) -> f64 {
        const COARSE: usize = 1024;
        let h = TAU / COARSE as f64;
        let best = (0..COARSE)
            .map(|i| (i, (self.eval(i as f64 * h) - p).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let t0 = best.0 as f64 * h;
        crate::numeric::golden_min(|t| (self.eval(t) - p).norm(), t0 - h, t0 + h, 1e-13).1
    }

    /// True iff `max |X(t) + X(t*) − 2c| < tol` where `t*` is the antiparallel
    /// partner of `t` (tangent angle + π) that best matches the reflection.
    pub fn is_centrally_symmetric(&self, center: &Point, tol: f64) -> bool {
        const N: usize = 256;
        let ts: Vec<f64> = (0..N).map(|i| TAU * i as f64 / N as f64).collect();
        let tangents: Vec<Point> = ts.iter().map(|&t| self.tangent(t)).collect();
        for i in 0..N {
            let ti = ts[i];
            let xi = self.eval(ti);
            let di = tangents[i];
            let mut best = f64::INFINITY;
            for j in 0..N {
                let j1 = (j + 1) % N;
                let g0 = cross(&di, &tangents[j]);
                let g1 = cross(&di, &tangents[j1]);
                if g0 * g1 > 0.0 || di.dot(&tangents[j]) >= 0.0 {
                    continue;
                }
                let (mut lo, mut hi) = (ts[j], ts[j] + TAU / N as f64);
                let mut glo = g0;
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    let gm = cross(&di, &self.tangent(mid));
                    if gm * glo <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        glo = gm;
                    }
                }
                let r = (xi + self.eval(0.5 * (lo + hi)) - 2.0 * center).norm();
                best = best.min(r);
            }
            if best >= tol {
                return false;
            }
        }
        true
    }
}

fn check_support_convex(h: &TrigSeries) -> Result<()> {
    let n = 4096.max(64 * (h.degree() + 1));
    let mut worst = (f64::INFINITY, 0.0);
    for i in 0..n {
        let th = TAU * i as f64 / n as f64;
        let d = h.derivatives::<3>(th);
        let rho = d[0] + d[2];
        if rho < worst.0 {
            worst = (rho, th);
        }
    }
    if worst.0 <= 0.0 {
        return Err(Error::NonConvexSupport { theta: worst.1, rho: worst.0 });
    }
    Ok(())
}

/// `X ↦ linear·X + translation`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineMap {
    pub linear: Matrix2<f64>,
    pub translation: Point,
}

impl AffineMap {
    pub fn apply(&self, p: &Point) -> Point {
        self.linear * p + self.translation
    }

    /// Random map with `det = 1` built from rotation, squeeze and shear.
    pub fn random_symplectic<R: Rng>(rng: &mut R) -> AffineMap {
        let rot = |a: f64| Matrix2::new(a.cos(), -a.sin(), a.sin(), a.cos());
        let squeeze = rng.gen_range(-0.7..0.7f64).exp();
        let shear = rng.gen_range(-1.0..1.0);
        let linear = rot(rng.gen_range(0.0..TAU))
            * Matrix2::new(squeeze, 0.0, 0.0, 1.0 / squeeze)
            * Matrix2::new(1.0, shear, 0.0, 1.0)
            * rot(rng.gen_range(0.0..TAU));
        let translation = Point::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        AffineMap { linear, translation }
    }
}

/// Random convex support curve `h = 1 + Σ_{k ∈ harmonics} (a_k cos kθ + b_k sin kθ)`
/// scaled so that `min ρ` equals a random value in `[min_rho, 0.6]`.
pub fn random_convex_support<R: Rng>(rng: &mut R, harmonics: std::ops::RangeInclusive<usize>, min_rho: f64) -> PlaneCurve {
    let top = *harmonics.end();
    loop {
        let mut cos = vec![0.0; top + 1];
        let mut sin = vec![0.0; top + 1];
        for k in harmonics.clone() {
            let amp = 1.0 / (k * k) as f64;
            cos[k] = rng.gen_range(-1.0..1.0) * amp;
            sin[k] = rng.gen_range(-1.0..1.0) * amp;
        }
        let variation = TrigSeries::new(cos, sin);
        let n = 4096;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let d = variation.derivatives::<3>(TAU * i as f64 / n as f64);
            worst = worst.min(d[0] + d[2]);
        }
        if worst >= 0.0 {
            continue;
        }
        let target = rng.gen_range(min_rho..0.6f64.max(min_rho + 0.05));
        let mut h = variation.scaled((1.0 - target) / -worst);
        h.cos[0] = 1.0;
        if let Ok(c) = PlaneCurve::from_support(h) {
            return c;
        }
    }
}

/// Wrap an angle difference into `(−π, π]`.
#[inline]
pub fn wrap_pi(a: f64) -> f64 {
    let r = (a + PI).rem_euclid(TAU) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}
