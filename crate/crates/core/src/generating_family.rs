//! Generating families `F_λ` built from polynomial jets `S⁺`, `S⁻`: evaluation
//! and exact derivatives, membership in the extended front, Hessian corank,
//! explicit A/D realizations, sampled caustics and local jet fitting.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::curve_model::{perp, PlaneCurve, Point};
use crate::error::{Error, Result};
use crate::parallel_chords::ParallelPair;

/// Multivariate polynomial with exponent-vector keys.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Poly {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Poly {
        Poly::monomial(vec![0; nvars], c)
    }

    pub fn var(nvars: usize, i: usize) -> Poly {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly::monomial(e, 1.0)
    }

    pub fn monomial(exponents: Vec<u32>, c: f64) -> Poly {
        let mut p = Poly::zero(exponents.len());
        if c != 0.0 {
            p.terms.insert(exponents, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &f64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn add_term(&mut self, e: Vec<u32>, c: f64) {
        let v = self.terms.entry(e).or_insert(0.0);
        *v += c;
        if *v == 0.0 {
            self.terms.retain(|_, c| *c != 0.0);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> Poly {
        if c == 0.0 {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::constant(self.nvars, 1.0);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn diff(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[i] -= 1;
            out.add_term(d, c * e[i] as f64);
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(&k, &v)| v.powi(k as i32)).product::<f64>())
            .sum()
    }

    /// Substitute `subs[i]` for variable `i`.
    pub fn compose(&self, subs: &[Poly]) -> Poly {
        let target = subs.first().map_or(0, |p| p.nvars);
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(target, *c);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = term.mul(&subs[i].pow(k));
                }
            }
            out = out.add(&term);
        }
        out
    }
}

fn determinant(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    match n {
        0 => Poly::zero(0),
        1 => m[0][0].clone(),
        _ => {
            let mut out = Poly::zero(m[0][0].nvars());
            for j in 0..n {
                let minor: Vec<Vec<Poly>> = (1..n)
                    .map(|r| (0..n).filter(|&c| c != j).map(|c| m[r][c].clone()).collect())
                    .collect();
                let term = m[0][j].mul(&determinant(&minor));
                out = if j % 2 == 0 { out.add(&term) } else { out.sub(&term) };
            }
            out
        }
    }
}

/// Polynomial germ `S(w)` in `m` variables, expanded about `base`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyJet {
    pub poly: Poly,
    pub base: Vec<f64>,
    /// The quadratic part vanishes at the base point.
    pub adapted: bool,
}

impl PolyJet {
    pub fn new(poly: Poly) -> PolyJet {
        let base = vec![0.0; poly.nvars()];
        let adapted = poly.terms().all(|(e, _)| e.iter().sum::<u32>() != 2);
        PolyJet { poly, base, adapted }
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    pub fn eval(&self, w: &[f64]) -> f64 {
        self.poly.eval(w)
    }

    /// Third derivative in the first variable at the base point.
    pub fn third_derivative(&self) -> f64 {
        self.poly.diff(0).diff(0).diff(0).eval(&vec![0.0; self.nvars()])
    }
}

fn monomial_key(e: &[u32]) -> String {
    let parts: Vec<String> = e.iter().map(|k| k.to_string()).collect();
    format!("({})", parts.join(","))
}

fn parse_monomial_key(key: &str) -> std::result::Result<Vec<u32>, String> {
    let inner = key.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
    inner
        .split(',')
        .map(|s| s.trim().parse::<u32>().map_err(|e| format!("monomial key {key:?}: {e}")))
        .collect()
}

impl Serialize for PolyJet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<String, f64> = self.poly.terms().map(|(e, c)| (monomial_key(e), *c)).collect();
        map.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PolyJet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let map: BTreeMap<String, f64> = BTreeMap::deserialize(deserializer)?;
        let mut nvars = None;
        let mut terms = Vec::new();
        for (k, c) in map {
            let e = parse_monomial_key(&k).map_err(D::Error::custom)?;
            if *nvars.get_or_insert(e.len()) != e.len() {
                return Err(D::Error::custom("monomial keys have different lengths"));
            }
            terms.push((e, c));
        }
        let mut poly = Poly::zero(nvars.unwrap_or(0));
        for (e, c) in terms {
            poly = poly.add(&Poly::monomial(e, c));
        }
        Ok(PolyJet::new(poly))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub m: usize,
    pub k: usize,
    pub lambda: f64,
    #[serde(rename = "Splus")]
    pub splus: PolyJet,
    #[serde(rename = "Sminus")]
    pub sminus: PolyJet,
}

impl FamilySpec {
    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.m) || self.k < 1 || self.k > self.m {
            return Err(Error::InvalidFamily(format!("need 1 ≤ k ≤ m ≤ 2, got m = {}, k = {}", self.m, self.k)));
        }
        let compatible = |j: &PolyJet| j.nvars() == self.m || j.poly.is_zero();
        if !compatible(&self.splus) || !compatible(&self.sminus) {
            return Err(Error::InvalidFamily(format!("jets must have {} variables", self.m)));
        }
        if self.splus.poly.degree() > 6 || self.sminus.poly.degree() > 6 {
            return Err(Error::InvalidFamily("jet degree exceeds 6".into()));
        }
        if self.lambda == 0.0 || self.lambda == 1.0 || !self.lambda.is_finite() {
            return Err(Error::DegenerateLambda(self.lambda));
        }
        Ok(())
    }

    pub fn kappa_dim(&self) -> usize {
        2 * self.m - self.k
    }
}

/// `F_λ` in the variables `(p_1..p_m, q_1..q_m, κ_1..κ_{2m−k})` with
/// `κ = (α_{k+1..m}, β_1..β_m)`, together with its κ-gradient, κ-Hessian and
/// Hessian determinant.
#[derive(Clone, Debug)]
pub struct GeneratingFamily {
    pub spec: FamilySpec,
    pub f: Poly,
    pub grad: Vec<Poly>,
    pub hess: Vec<Vec<Poly>>,
    pub det_hess: Poly,
}

impl GeneratingFamily {
    pub fn new(spec: &FamilySpec) -> Result<GeneratingFamily> {
        spec.validate()?;
        let (m, k, lambda) = (spec.m, spec.k, spec.lambda);
        let nk = spec.kappa_dim();
        let n = 2 * m + nk;
        let p = |i: usize| Poly::var(n, i);
        let q = |i: usize| Poly::var(n, m + i);
        let alpha = |j: usize| Poly::var(n, 2 * m + (j - k));
        let beta = |i: usize| Poly::var(n, 2 * m + (m - k) + i);
        let mu = 1.0 - lambda;

        let plus_args: Vec<Poly> = (0..m)
            .map(|i| q(i).add(&beta(i)).scale(0.5 / lambda).sub(&Poly::constant(n, spec.splus.base.get(i).copied().unwrap_or(0.0))))
            .collect();
        let minus_args: Vec<Poly> = (0..m)
            .map(|i| {
                let a = if i < k { q(i).sub(&beta(i)) } else { p(i).sub(&alpha(i)) };
                a.scale(0.5 / mu).sub(&Poly::constant(n, spec.sminus.base.get(i).copied().unwrap_or(0.0)))
            })
            .collect();
        let mut f = spec
            .splus
            .poly
            .compose(&plus_args)
            .scale(2.0 * lambda * lambda)
            .sub(&spec.sminus.poly.compose(&minus_args).scale(2.0 * mu * mu));
        for i in 0..k {
            f = f.sub(&p(i).mul(&beta(i)));
        }
        for j in k..m {
            let bilinear = q(j)
                .mul(&alpha(j))
                .sub(&p(j).mul(&beta(j)))
                .sub(&alpha(j).mul(&beta(j)))
                .sub(&p(j).mul(&q(j)));
            f = f.add(&bilinear.scale(0.5));
        }
        let grad: Vec<Poly> = (0..nk).map(|a| f.diff(2 * m + a)).collect();
        let hess: Vec<Vec<Poly>> = (0..nk).map(|a| (0..nk).map(|b| grad[a].diff(2 * m + b)).collect()).collect();
        let det_hess = determinant(&hess);
        Ok(GeneratingFamily { spec: spec.clone(), f, grad, hess, det_hess })
    }

    pub fn m(&self) -> usize {
        self.spec.m
    }

    pub fn kappa_dim(&self) -> usize {
        self.spec.kappa_dim()
    }

    fn point(&self, x: &[f64], kappa: &[f64]) -> Vec<f64> {
        let mut v = x.to_vec();
        v.extend_from_slice(kappa);
        v
    }

    pub fn eval(&self, x: &[f64], kappa: &[f64]) -> f64 {
        self.f.eval(&self.point(x, kappa))
    }

    /// Mixed partial derivative; indices address `(p, q, κ)` in that order.
    pub fn derivative(&self, indices: &[usize], x: &[f64], kappa: &[f64]) -> f64 {
        let mut d = self.f.clone();
        for &i in indices {
            d = d.diff(i);
        }
        d.eval(&self.point(x, kappa))
    }

    pub fn kappa_gradient(&self, x: &[f64], kappa: &[f64]) -> DVector<f64> {
        let v = self.point(x, kappa);
        DVector::from_iterator(self.grad.len(), self.grad.iter().map(|g| g.eval(&v)))
    }

    pub fn kappa_hessian(&self, x: &[f64], kappa: &[f64]) -> DMatrix<f64> {
        let v = self.point(x, kappa);
        let n = self.hess.len();
        DMatrix::from_fn(n, n, |a, b| self.hess[a][b].eval(&v))
    }

    pub fn hessian_determinant(&self, x: &[f64], kappa: &[f64]) -> f64 {
        self.det_hess.eval(&self.point(x, kappa))
    }
}

pub fn family_eval(spec: &FamilySpec, x: &[f64], kappa: &[f64]) -> Result<f64> {
    Ok(GeneratingFamily::new(spec)?.eval(x, kappa))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// `|∂F/∂κ| / scale` at the best κ.
    pub gradient_residual: f64,
    /// `|det ∂²F/∂κ²|` at the best κ.
    pub hessian_residual: f64,
    pub kappa: Vec<f64>,
    pub iterations: usize,
    pub diverged: bool,
}

const MEMBERSHIP_TOL: f64 = 1e-6;

/// Is `x` on the front: does some κ solve `∂F/∂κ = 0` and `det ∂²F/∂κ² = 0`?
/// Levenberg–Marquardt from `seed`.
pub fn wl_membership(family: &GeneratingFamily, x: &[f64], seed: &[f64], scale: f64) -> Membership {
    let nk = family.kappa_dim();
    let m = family.m();
    let residual = |kappa: &[f64]| -> DVector<f64> {
        let g = family.kappa_gradient(x, kappa) / scale;
        let mut r = DVector::zeros(nk + 1);
        r.rows_mut(0, nk).copy_from(&g);
        r[nk] = family.hessian_determinant(x, kappa);
        r
    };
    let jacobian = |kappa: &[f64]| -> DMatrix<f64> {
        let v = family.point(x, kappa);
        DMatrix::from_fn(nk + 1, nk, |r, c| {
            if r < nk {
                family.hess[r][c].eval(&v) / scale
            } else {
                family.det_hess.diff(2 * m + c).eval(&v)
            }
        })
    };
    let mut kappa = seed.to_vec();
    let mut r = residual(&kappa);
    let mut damping = 1e-3;
    let mut iterations = 0;
    let mut diverged = false;
    for it in 0..100 {
        iterations = it + 1;
        if r.amax() < 1e-14 {
            break;
        }
        let j = jacobian(&kappa);
        let jt = j.transpose();
        let mut accepted = false;
        for _ in 0..20 {
            let mut a = &jt * &j;
            for d in 0..nk {
                a[(d, d)] += damping * (1.0 + a[(d, d)]);
            }
            let Some(step) = a.lu().solve(&(&jt * &r)) else { break };
            let trial: Vec<f64> = kappa.iter().zip(step.iter()).map(|(k, s)| k - s).collect();
            let rt = residual(&trial);
            if rt.norm() < r.norm() {
                kappa = trial;
                r = rt;
                damping = (damping * 0.3).max(1e-12);
                accepted = true;
                break;
            }
            damping *= 10.0;
        }
        if !accepted || kappa.iter().any(|k| !k.is_finite() || k.abs() > 1e6 * scale.max(1.0)) {
            diverged = !accepted && r.amax() > MEMBERSHIP_TOL;
            break;
        }
    }
    let gradient_residual = r.rows(0, nk).norm();
    let hessian_residual = r[nk].abs();
    Membership {
        member: gradient_residual < MEMBERSHIP_TOL && hessian_residual < MEMBERSHIP_TOL && !diverged,
        gradient_residual,
        hessian_residual,
        kappa,
        iterations,
        diverged,
    }
}

/// `2m − k − rank ∂²F/∂κ²` at the base point `x = 0, κ = 0`.
pub fn corank(spec: &FamilySpec) -> Result<usize> {
    let nk = spec.kappa_dim();
    corank_at(spec, &vec![0.0; 2 * spec.m], &vec![0.0; nk])
}

/// Corank of the κ-Hessian at `(x, κ)`, with singular values below
/// `1e−10` times the norm of the full Hessian of `F` counted as zero.
pub fn corank_at(spec: &FamilySpec, x: &[f64], kappa: &[f64]) -> Result<usize> {
    let family = GeneratingFamily::new(spec)?;
    let nk = family.kappa_dim();
    let point = family.point(x, kappa);
    let n = point.len();
    let full = DMatrix::from_fn(n, n, |a, b| family.f.diff(a).diff(b).eval(&point));
    let h = family.kappa_hessian(x, kappa);
    let rank = h.singular_values().iter().filter(|&&s| s > 1e-10 * full.norm()).count();
    Ok(nk - rank)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RealizationKind {
    A(u8),
    D(u8),
}

/// Normal-form label with the sign of its top-order term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RealizationLabel {
    pub kind: RealizationKind,
    pub sign: i8,
}

impl fmt::Display for RealizationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.sign >= 0 { "plus" } else { "minus" };
        match self.kind {
            RealizationKind::A(k) => write!(f, "A{k}{}", if self.sign >= 0 { "" } else { "minus" }),
            RealizationKind::D(k) => write!(f, "D{k}{sign}"),
        }
    }
}

impl FromStr for RealizationLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let (body, sign) = if let Some(b) = lower.strip_suffix("minus").or_else(|| lower.strip_suffix('-')) {
            (b, -1)
        } else if let Some(b) = lower.strip_suffix("plus").or_else(|| lower.strip_suffix('+')) {
            (b, 1)
        } else {
            (lower.as_str(), 1)
        };
        let bad = || Error::Schema(format!("unknown realization label {s:?}"));
        let (letter, digits) = body.split_at(1);
        let order: u8 = digits.parse().map_err(|_| bad())?;
        let kind = match letter {
            "a" if (2..=5).contains(&order) => RealizationKind::A(order),
            "d" if (4..=5).contains(&order) => RealizationKind::D(order),
            "e" if (6..=8).contains(&order) => {
                return Err(Error::UnrealizableAtDimension { label: s.to_string(), m: 2 })
            }
            _ => return Err(bad()),
        };
        Ok(RealizationLabel { kind, sign })
    }
}

impl RealizationLabel {
    pub fn min_dimension(&self) -> usize {
        match self.kind {
            RealizationKind::A(k) if k <= 3 => 1,
            _ => 2,
        }
    }

    pub fn parallelism_degree(&self) -> usize {
        match self.kind {
            RealizationKind::A(_) => 1,
            RealizationKind::D(_) => 2,
        }
    }
}

/// The explicit cubic-plus-top-term jets realizing `label` in dimension `m`.
pub fn realization_spec(label: &RealizationLabel, m: usize, lambda: f64) -> Result<FamilySpec> {
    if m < label.min_dimension() || m > 2 {
        return Err(Error::UnrealizableAtDimension { label: label.to_string(), m });
    }
    if lambda == 0.0 || lambda == 1.0 || !lambda.is_finite() {
        return Err(Error::DegenerateLambda(lambda));
    }
    let sign = label.sign as f64;
    let mono = |e: &[u32], c: f64| -> Poly {
        let mut v = e.to_vec();
        v.resize(m, 0);
        Poly::monomial(v, c)
    };
    let mu = 1.0 - lambda;
    let (splus, sminus) = match label.kind {
        RealizationKind::A(order) => {
            let top = mono(&[order as u32 + 1], sign);
            let mut plus = mono(&[3], lambda).add(&top);
            let mut minus = mono(&[3], -mu);
            if order >= 4 {
                plus = plus.add(&mono(&[3, 1], 1.0));
            }
            if order == 5 {
                minus = minus.add(&mono(&[4, 1], 1.0));
            }
            (plus, minus)
        }
        RealizationKind::D(order) => {
            let top = if order == 4 { mono(&[0, 3], sign) } else { mono(&[0, 4], sign) };
            let plus = mono(&[3, 0], lambda).add(&mono(&[2, 1], 1.0)).add(&top).add(&mono(&[0, 3], lambda));
            let minus = mono(&[3, 0], -mu).add(&mono(&[0, 3], -mu));
            (plus, minus)
        }
    };
    Ok(FamilySpec {
        m,
        k: label.parallelism_degree(),
        lambda,
        splus: PolyJet::new(splus),
        sminus: PolyJet::new(sminus),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CausticOptions {
    /// Grid points per κ axis over `[−box_half, box_half]`.
    pub kappa_points: usize,
    /// Grid points per free q axis when no section is fixed.
    pub q_points: usize,
    pub box_half: f64,
    /// Fixed values of `q_1..q_k`; when absent they are swept.
    pub section: Option<Vec<f64>>,
}

impl CausticOptions {
    pub fn for_spec(spec: &FamilySpec) -> CausticOptions {
        CausticOptions {
            kappa_points: 201,
            q_points: if spec.m == 1 { 201 } else { 9 },
            box_half: 1.0,
            section: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CausticPoint {
    /// `(p_1..p_m, q_1..q_m)`.
    pub x: Vec<f64>,
    pub kappa: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealizedCaustic {
    pub points: Vec<CausticPoint>,
    /// Index chains through `points` for two-dimensional scans.
    pub contours: Vec<Vec<usize>>,
}

struct ScanAxis {
    values: Vec<f64>,
    /// Position in the κ vector, or in `q_1..q_k` when `is_q`.
    slot: usize,
    is_q: bool,
}

/// Solve `∂F/∂κ = 0` for `(p_1..p_m, q_{k+1}..q_m)` with `κ` and `q_1..q_k` fixed.
fn solve_determined(family: &GeneratingFamily, q_fixed: &[f64], kappa: &[f64], seed: &[f64]) -> Option<Vec<f64>> {
    let m = family.m();
    let k = family.spec.k;
    let nk = family.kappa_dim();
    let assemble = |unknowns: &[f64]| -> Vec<f64> {
        let mut x = vec![0.0; 2 * m];
        x[..m].copy_from_slice(&unknowns[..m]);
        x[m..m + k].copy_from_slice(q_fixed);
        x[m + k..].copy_from_slice(&unknowns[m..]);
        x
    };
    let unknown_index = |u: usize| if u < m { u } else { m + k + (u - m) };
    let mut z = seed.to_vec();
    for _ in 0..40 {
        let x = assemble(&z);
        let v = family.point(&x, kappa);
        let r = DVector::from_iterator(nk, family.grad.iter().map(|g| g.eval(&v)));
        if r.amax() < 1e-14 {
            return Some(x);
        }
        let j = DMatrix::from_fn(nk, nk, |a, b| family.grad[a].diff(unknown_index(b)).eval(&v));
        let step = j.lu().solve(&r)?;
        for (zi, s) in z.iter_mut().zip(step.iter()) {
            *zi -= s;
        }
        if z.iter().any(|v| !v.is_finite()) {
            return None;
        }
        if step.amax() < 1e-15 {
            return Some(assemble(&z));
        }
    }
    let x = assemble(&z);
    let v = family.point(&x, kappa);
    let ok = family.grad.iter().all(|g| g.eval(&v).abs() < 1e-10);
    ok.then_some(x)
}

/// Caustic samples: points `x` with `∂F/∂κ = 0` and `det ∂²F/∂κ² = 0`,
/// found on a regular grid in `(κ, q_1..q_k)` by bisecting sign changes of the
/// Hessian determinant along grid edges.
pub fn realized_caustic(spec: &FamilySpec, options: &CausticOptions) -> Result<RealizedCaustic> {
    let family = GeneratingFamily::new(spec)?;
    let k = spec.k;
    let nk = family.kappa_dim();
    let grid = |n: usize| -> Vec<f64> {
        (0..n).map(|i| -options.box_half + 2.0 * options.box_half * i as f64 / (n - 1).max(1) as f64).collect()
    };
    let mut axes: Vec<ScanAxis> = (0..nk).map(|a| ScanAxis { values: grid(options.kappa_points), slot: a, is_q: false }).collect();
    let fixed_q = match &options.section {
        Some(q) if q.len() == k => Some(q.clone()),
        Some(q) => return Err(Error::InvalidFamily(format!("section needs {k} values, got {}", q.len()))),
        None => {
            for i in 0..k {
                axes.push(ScanAxis { values: grid(options.q_points), slot: i, is_q: true });
            }
            None
        }
    };
    let dims: Vec<usize> = axes.iter().map(|a| a.values.len()).collect();
    let total: usize = dims.iter().product();
    let unpack = |mut idx: usize| -> Vec<usize> {
        let mut out = vec![0; dims.len()];
        for (d, &n) in dims.iter().enumerate().rev() {
            out[d] = idx % n;
            idx /= n;
        }
        out
    };
    let coords = |ix: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let mut kappa = vec![0.0; nk];
        let mut q = fixed_q.clone().unwrap_or_else(|| vec![0.0; k]);
        for (a, v) in axes.iter().zip(ix) {
            if a.is_q {
                q[a.slot] = *v;
            } else {
                kappa[a.slot] = *v;
            }
        }
        (kappa, q)
    };
    let seed = vec![0.0; nk];
    let node_value = |idx: usize| -> Option<(Vec<f64>, f64)> {
        let ix = unpack(idx);
        let vals: Vec<f64> = ix.iter().zip(&axes).map(|(&i, a)| a.values[i]).collect();
        let (kappa, q) = coords(&vals);
        let x = solve_determined(&family, &q, &kappa, &seed)?;
        let d = family.hessian_determinant(&x, &kappa);
        Some((x, d))
    };
    let nodes: Vec<Option<f64>> = (0..total).into_par_iter().map(|i| node_value(i).map(|v| v.1)).collect();

    let strides: Vec<usize> = (0..dims.len()).map(|d| dims[d + 1..].iter().product()).collect();
    let edges: Vec<(usize, usize)> = (0..total)
        .flat_map(|i| {
            let ix = unpack(i);
            (0..dims.len())
                .filter(|&d| ix[d] + 1 < dims[d])
                .map(|d| (i, i + strides[d]))
                .collect::<Vec<_>>()
        })
        .filter(|&(a, b)| match (nodes[a], nodes[b]) {
            (Some(x), Some(y)) => (x > 0.0) != (y > 0.0),
            _ => false,
        })
        .collect();

    let located: Vec<Option<(CausticPoint, Vec<f64>)>> = edges
        .par_iter()
        .map(|&(a, b)| {
            let va: Vec<f64> = unpack(a).iter().zip(&axes).map(|(&i, ax)| ax.values[i]).collect();
            let vb: Vec<f64> = unpack(b).iter().zip(&axes).map(|(&i, ax)| ax.values[i]).collect();
            let at = |w: f64| -> Vec<f64> { va.iter().zip(&vb).map(|(x, y)| x + w * (y - x)).collect() };
            let value = |w: f64| -> Option<(Vec<f64>, Vec<f64>, f64)> {
                let (kappa, q) = coords(&at(w));
                let x = solve_determined(&family, &q, &kappa, &seed)?;
                let d = family.hessian_determinant(&x, &kappa);
                Some((x, kappa, d))
            };
            let (mut lo, mut hi) = (0.0, 1.0);
            let positive_lo = nodes[a]? > 0.0;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let (_, _, d) = value(mid)?;
                if (d > 0.0) == positive_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let w = 0.5 * (lo + hi);
            let (x, kappa, _) = value(w)?;
            Some((CausticPoint { x, kappa }, at(w)))
        })
        .collect();
    let mut points = Vec::new();
    let mut grid_coords = Vec::new();
    for (p, g) in located.into_iter().flatten() {
        points.push(p);
        grid_coords.push(g);
    }
    let contours = if dims.len() == 2 {
        let h = 2.0 * options.box_half / (options.kappa_points.max(2) - 1) as f64;
        chain_points(&grid_coords, 2.5 * h)
    } else {
        Vec::new()
    };
    Ok(RealizedCaustic { points, contours })
}

/// Greedy nearest-neighbour chains through planar points.
fn chain_points(coords: &[Vec<f64>], radius: f64) -> Vec<Vec<usize>> {
    let n = coords.len();
    let dist = |a: usize, b: usize| (coords[a][0] - coords[b][0]).hypot(coords[a][1] - coords[b][1]);
    let mut used = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut chain = vec![start];
        for reverse in [false, true] {
            let mut cur = start;
            loop {
                let next = (0..n)
                    .filter(|&j| !used[j] && dist(cur, j) <= radius)
                    .min_by(|&a, &b| dist(cur, a).total_cmp(&dist(cur, b)));
                let Some(j) = next else { break };
                used[j] = true;
                if reverse {
                    chain.insert(0, j);
                } else {
                    chain.push(j);
                }
                cur = j;
            }
        }
        out.push(chain);
    }
    out
}

/// Cusps along the ordered contours of a two-dimensional κ-section: sign
/// changes of `v·∇_κ det H`, with `v` spanning the kernel of the κ-Hessian.
pub fn count_section_cusps(spec: &FamilySpec, caustic: &RealizedCaustic) -> Result<usize> {
    let family = GeneratingFamily::new(spec)?;
    let m = spec.m;
    let nk = family.kappa_dim();
    let kernel = |p: &CausticPoint| -> DVector<f64> {
        let svd = family.kappa_hessian(&p.x, &p.kappa).svd(false, true);
        let vt = svd.v_t.expect("requested V^T");
        let (idx, _) = svd.singular_values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("nonempty");
        vt.row(idx).transpose()
    };
    let mut total = 0;
    for contour in &caustic.contours {
        if contour.len() < 3 {
            continue;
        }
        let mut vectors: Vec<DVector<f64>> = Vec::with_capacity(contour.len());
        let mut values = Vec::with_capacity(contour.len());
        for &i in contour {
            let p = &caustic.points[i];
            let mut v = kernel(p);
            if let Some(prev) = vectors.last() {
                if v.dot(prev) < 0.0 {
                    v = -v;
                }
            }
            let point = family.point(&p.x, &p.kappa);
            values.push((0..nk).map(|a| v[a] * family.det_hess.diff(2 * m + a).eval(&point)).sum::<f64>());
            vectors.push(v);
        }
        for w in values.windows(2) {
            if (w[0] > 0.0) != (w[1] > 0.0) {
                total += 1;
            }
        }
        let first = &caustic.points[contour[0]];
        let last = &caustic.points[*contour.last().expect("nonempty")];
        let gap = first.kappa.iter().zip(&last.kappa).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let step = first.kappa.iter().zip(&caustic.points[contour[1]].kappa).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if gap < 4.0 * step {
            let flip = if vectors[0].dot(vectors.last().expect("nonempty")) < 0.0 { -1.0 } else { 1.0 };
            if (values[values.len() - 1] > 0.0) != (flip * values[0] > 0.0) {
                total += 1;
            }
        }
    }
    Ok(total)
}

/// Orthonormal frame: `q` along `e`, `p` along `perp(e)`, origin at `origin`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdaptedFrame {
    pub origin: Point,
    pub e: Point,
}

impl AdaptedFrame {
    /// `(p, q)` coordinates of `x`.
    pub fn coordinates(&self, x: &Point) -> (f64, f64) {
        let d = x - self.origin;
        (perp(&self.e).dot(&d), self.e.dot(&d))
    }

    pub fn to_world(&self, p: f64, q: f64) -> Point {
        self.origin + self.e * q + perp(&self.e) * p
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalJets {
    pub splus: PolyJet,
    pub sminus: PolyJet,
    pub frame: AdaptedFrame,
    /// `(p, q)` of both endpoints in the frame.
    pub a_plus: (f64, f64),
    pub a_minus: (f64, f64),
    /// Curve length scale used for scale-free residuals.
    pub scale: f64,
}

impl LocalJets {
    pub fn family_spec(&self, lambda: f64) -> FamilySpec {
        FamilySpec { m: 1, k: 1, lambda, splus: self.splus.clone(), sminus: self.sminus.clone() }
    }

    /// `β` of the chord through both base points: `λq⁺ − (1−λ)q⁻`.
    pub fn chord_seed(&self, lambda: f64) -> f64 {
        lambda * self.a_plus.1 - (1.0 - lambda) * self.a_minus.1
    }
}

const FIT_NODES: usize = 24;

/// Least-squares graph `p − p_a = Σ_{k=2..5} c_k (q − q_a)^k` of the curve near `X(t0)`.
fn fit_graph(curve: &PlaneCurve, frame: &AdaptedFrame, t0: f64) -> Result<(f64, f64, [f64; 4])> {
    let (pa, qa) = frame.coordinates(&curve.eval(t0));
    let length = curve.scale().length;
    let kappa = curve.curvature(t0).abs();
    let mut half = if kappa > 0.0 { (length / 20.0).min(0.01 / kappa) } else { length / 20.0 };
    let speed = curve.tangent(t0).norm();
    for _ in 0..12 {
        let dt = half / speed;
        let nodes: Vec<f64> = (0..FIT_NODES)
            .map(|i| t0 + dt * (std::f64::consts::PI * (i as f64 + 0.5) / FIT_NODES as f64).cos())
            .collect();
        let coords: Vec<(f64, f64)> = nodes.iter().map(|&t| frame.coordinates(&curve.eval(t))).collect();
        let increasing = coords.windows(2).all(|w| w[1].1 < w[0].1);
        let decreasing = coords.windows(2).all(|w| w[1].1 > w[0].1);
        if !(increasing || decreasing) {
            half *= 0.5;
            continue;
        }
        let a = DMatrix::from_fn(FIT_NODES, 4, |r, c| (coords[r].1 - qa).powi(c as i32 + 2));
        let b = DVector::from_iterator(FIT_NODES, coords.iter().map(|(p, _)| p - pa));
        let svd = a.svd(true, true);
        let c = svd.solve(&b, 1e-14).map_err(|_| Error::FitWindowTooSmall { t: t0 })?;
        return Ok((pa, qa, [c[0], c[1], c[2], c[3]]));
    }
    Err(Error::FitWindowTooSmall { t: t0 })
}

fn jet_from_graph(pa: f64, qa: f64, c: &[f64; 4]) -> PolyJet {
    let mut poly = Poly::monomial(vec![1], pa);
    for (i, ck) in c.iter().enumerate() {
        let k = i as u32 + 2;
        poly = poly.add(&Poly::monomial(vec![k + 1], ck / (k + 1) as f64));
    }
    PolyJet { poly, base: vec![qa], adapted: true }
}

/// Jets `S±` with `p = dS±/dq` locally describing the curve at both ends of
/// the pair, in the frame at `X(s)` whose q-axis is the common tangent.
pub fn fit_local_jets(curve: &PlaneCurve, pair: &ParallelPair) -> Result<LocalJets> {
    let frame = AdaptedFrame { origin: curve.eval(pair.s), e: curve.tangent(pair.s).normalize() };
    let (pp, qp, cp) = fit_graph(curve, &frame, pair.s)?;
    let (pm, qm, cm) = fit_graph(curve, &frame, pair.t)?;
    Ok(LocalJets {
        splus: jet_from_graph(pp, qp, &cp),
        sminus: jet_from_graph(pm, qm, &cm),
        frame,
        a_plus: (pp, qp),
        a_minus: (pm, qm),
        scale: curve.scale().diameter,
    })
}
