//! Parallel tangent pairs on a closed curve, their chords, and bitangent chords.
//!
//! Pairs `(s, t)` with `cross(X′(s), X′(t)) = 0` form curves on the parameter
//! torus. They are located as sign changes of that cross product along grid
//! edges, refined on the edge, and chained into branches by nearest-neighbour
//! continuation.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve_model::{cross, wrap_pi, PlaneCurve, Point};
use crate::error::{Error, Result};
use crate::numeric::{brent, golden_min};

pub const MIN_GRID: usize = 64;
const LINK_RADIUS_STEPS: f64 = 4.0;
const NEWTON_CAP: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParallelPair {
    pub s: f64,
    pub t: f64,
    /// 0 when the tangents point the same way, π when opposite.
    pub tangent_angle_gap: f64,
    /// Unit vector from `X(t)` to `X(s)`.
    pub chord_direction: [f64; 2],
}

impl ParallelPair {
    pub fn new(curve: &PlaneCurve, s: f64, t: f64) -> ParallelPair {
        let s = s.rem_euclid(TAU);
        let t = t.rem_euclid(TAU);
        let gap = if curve.tangent(s).dot(&curve.tangent(t)) >= 0.0 { 0.0 } else { PI };
        let d = curve.eval(s) - curve.eval(t);
        let n = d.norm();
        let dir = if n > 0.0 { d / n } else { Point::zeros() };
        ParallelPair { s, t, tangent_angle_gap: gap, chord_direction: [dir.x, dir.y] }
    }

    pub fn swapped(&self) -> ParallelPair {
        ParallelPair {
            s: self.t,
            t: self.s,
            tangent_angle_gap: self.tangent_angle_gap,
            chord_direction: [-self.chord_direction[0], -self.chord_direction[1]],
        }
    }

    /// `+1` for equally oriented tangents, `−1` for opposite ones.
    pub fn orientation_sign(&self) -> f64 {
        if self.tangent_angle_gap == 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Torus distance between the pairs, ignoring the order of the parameters.
    pub fn unordered_distance(&self, other: &ParallelPair) -> f64 {
        let direct = torus_distance((self.s, self.t), (other.s, other.t));
        let swapped = torus_distance((self.s, self.t), (other.t, other.s));
        direct.min(swapped)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParallelBranch {
    pub id: usize,
    pub pairs: Vec<ParallelPair>,
    pub closed_loop: bool,
    /// The loop carries each unordered pair twice, once per ordering.
    pub self_mirror: bool,
}

impl ParallelBranch {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Range of the continuous branch parameter `u` (sample index units).
    pub fn parameter_span(&self) -> f64 {
        if self.closed_loop {
            self.pairs.len() as f64
        } else {
            self.pairs.len().saturating_sub(1) as f64
        }
    }

    /// Number of consecutive-sample intervals.
    pub fn segment_count(&self) -> usize {
        if self.closed_loop {
            self.pairs.len()
        } else {
            self.pairs.len().saturating_sub(1)
        }
    }

    fn interpolate(&self, u: f64) -> (f64, f64, (f64, f64)) {
        let n = self.pairs.len();
        let (i, j, f) = if self.closed_loop {
            let u = u.rem_euclid(n as f64);
            let i = (u.floor() as usize).min(n - 1);
            (i, (i + 1) % n, u - i as f64)
        } else {
            let u = u.clamp(0.0, (n - 1) as f64);
            let i = (u.floor() as usize).min(n.saturating_sub(2));
            (i, (i + 1).min(n - 1), u - i as f64)
        };
        let a = &self.pairs[i];
        let b = &self.pairs[j];
        let ds = wrap_pi(b.s - a.s);
        let dt = wrap_pi(b.t - a.t);
        (a.s + f * ds, a.t + f * dt, (ds, dt))
    }

    /// Parallel pair at continuous parameter `u`, projected onto the zero set.
    pub fn pair_at(&self, curve: &PlaneCurve, u: f64) -> ParallelPair {
        let (s, t) = self.params_at(curve, u);
        ParallelPair::new(curve, s, t)
    }

    pub fn params_at(&self, curve: &PlaneCurve, u: f64) -> (f64, f64) {
        let (s, t, _) = self.interpolate(u);
        project_to_parallel(curve, s, t)
    }

    /// Unit torus tangent `(ds/du, dt/du)` oriented along increasing `u`.
    pub fn direction_at(&self, curve: &PlaneCurve, u: f64, s: f64, t: f64) -> (f64, f64) {
        let (_, _, hint) = self.interpolate(u);
        zero_set_tangent(curve, s, t, hint)
    }
}

/// Both endpoints of a chord.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Chord {
    pub pair: ParallelPair,
    pub a_plus: Point,
    pub a_minus: Point,
}

impl Chord {
    pub fn new(curve: &PlaneCurve, pair: ParallelPair) -> Chord {
        Chord { pair, a_plus: curve.eval(pair.s), a_minus: curve.eval(pair.t) }
    }
}

pub fn lambda_point(chord: &Chord, lambda: f64) -> Point {
    chord.a_plus * lambda + chord.a_minus * (1.0 - lambda)
}

pub fn torus_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    wrap_pi(a.0 - b.0).hypot(wrap_pi(a.1 - b.1))
}

/// `cross(X′(s), X′(t))`.
pub fn parallel_residual(curve: &PlaneCurve, s: f64, t: f64) -> f64 {
    cross(&curve.tangent(s), &curve.tangent(t))
}

pub fn pair_tolerance(curve: &PlaneCurve) -> f64 {
    1e-10 * curve.scale().max_speed.powi(2)
}

/// Newton steps along the gradient of `cross(X′(s), X′(t))`.
pub fn project_to_parallel(curve: &PlaneCurve, mut s: f64, mut t: f64) -> (f64, f64) {
    let floor = 1e-15 * curve.scale().max_speed.powi(2);
    for _ in 0..NEWTON_CAP {
        let ds = curve.derivs::<3>(s);
        let dt = curve.derivs::<3>(t);
        let g = cross(&ds[1], &dt[1]);
        if g.abs() <= floor {
            break;
        }
        let gs = cross(&ds[2], &dt[1]);
        let gt = cross(&ds[1], &dt[2]);
        let n2 = gs * gs + gt * gt;
        if n2 == 0.0 {
            break;
        }
        s -= g * gs / n2;
        t -= g * gt / n2;
    }
    (s.rem_euclid(TAU), t.rem_euclid(TAU))
}

fn zero_set_tangent(curve: &PlaneCurve, s: f64, t: f64, hint: (f64, f64)) -> (f64, f64) {
    let ds = curve.derivs::<3>(s);
    let dt = curve.derivs::<3>(t);
    let gs = cross(&ds[2], &dt[1]);
    let gt = cross(&ds[1], &dt[2]);
    let n = gs.hypot(gt);
    if n == 0.0 {
        let h = hint.0.hypot(hint.1).max(f64::MIN_POSITIVE);
        return (hint.0 / h, hint.1 / h);
    }
    let (a, b) = (-gt / n, gs / n);
    if a * hint.0 + b * hint.1 >= 0.0 {
        (a, b)
    } else {
        (-a, -b)
    }
}

struct Crossing {
    s: f64,
    t: f64,
    dir: (f64, f64),
}

/// Root of `cross(X′(s), X′(t))` on the grid edge from `(s0,t0)` along one axis.
fn refine_on_edge(curve: &PlaneCurve, fixed: f64, lo: f64, hi: f64, vary_s: bool) -> f64 {
    let eval = |x: f64| -> (f64, f64) {
        let (a, b) = if vary_s { (x, fixed) } else { (fixed, x) };
        let da = curve.derivs::<3>(a);
        let db = curve.derivs::<3>(b);
        let g = cross(&da[1], &db[1]);
        let dg = if vary_s { cross(&da[2], &db[1]) } else { cross(&da[1], &db[2]) };
        (g, dg)
    };
    let (mut a, mut b) = (lo, hi);
    let (ga, _) = eval(a);
    let (gb, _) = eval(b);
    if ga == 0.0 || (ga > 0.0) == (gb > 0.0) && ga.abs() <= gb.abs() {
        return a;
    }
    if gb == 0.0 || (ga > 0.0) == (gb > 0.0) {
        return b;
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..NEWTON_CAP {
        let (g, dg) = eval(x);
        if g == 0.0 {
            return x;
        }
        if (g > 0.0) == (ga > 0.0) {
            a = x;
        } else {
            b = x;
        }
        let newton = x - g / dg;
        let next = if dg != 0.0 && newton > a.min(b) && newton < a.max(b) { newton } else { 0.5 * (a + b) };
        if (next - x).abs() <= 1e-15 * (1.0 + x.abs()) {
            return next;
        }
        x = next;
    }
    brent(|x| eval(x).0, a, b, 1e-15).unwrap_or(x)
}

fn grid_crossings(curve: &PlaneCurve, n: usize) -> Vec<Crossing> {
    let h = TAU / n as f64;
    let tangents: Vec<Point> = (0..n).map(|i| curve.tangent(i as f64 * h)).collect();
    let sep = h;
    let g = |i: usize, j: usize| cross(&tangents[i % n], &tangents[j % n]);
    let positive = |v: f64| v >= 0.0;

    let rows: Vec<Vec<Crossing>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            for j in 0..n {
                if i == j {
                    continue;
                }
                let here = g(i, j);
                // edge to (i+1, j)
                if (i + 1) % n != j {
                    let there = g(i + 1, j);
                    if positive(here) != positive(there) {
                        let s = refine_on_edge(curve, j as f64 * h, i as f64 * h, (i + 1) as f64 * h, true);
                        out.push((s, j as f64 * h));
                    }
                }
                // edge to (i, j+1)
                if (j + 1) % n != i {
                    let there = g(i, j + 1);
                    if positive(here) != positive(there) {
                        let t = refine_on_edge(curve, i as f64 * h, j as f64 * h, (j + 1) as f64 * h, false);
                        out.push((i as f64 * h, t));
                    }
                }
            }
            out.into_iter()
                .filter(|&(s, t)| wrap_pi(s - t).abs() >= sep)
                .map(|(s, t)| {
                    let (s, t) = (s.rem_euclid(TAU), t.rem_euclid(TAU));
                    Crossing { s, t, dir: zero_set_tangent(curve, s, t, (1.0, 0.0)) }
                })
                .collect()
        })
        .collect();
    rows.into_iter().flatten().collect()
}

/// A step that jumps over the excluded band around `s = t`.
fn crosses_diagonal(a: (f64, f64), b: (f64, f64)) -> bool {
    let da = wrap_pi(a.0 - a.1);
    let db = wrap_pi(b.0 - b.1);
    da.abs() < PI / 2.0 && db.abs() < PI / 2.0 && (da > 0.0) != (db > 0.0)
}

struct TorusBuckets {
    n: usize,
    h: f64,
    cells: HashMap<(usize, usize), Vec<usize>>,
}

impl TorusBuckets {
    fn new(points: &[(f64, f64)], n: usize) -> Self {
        let h = TAU / n as f64;
        let mut cells: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (k, p) in points.iter().enumerate() {
            cells.entry(Self::cell(p, h, n)).or_default().push(k);
        }
        TorusBuckets { n, h, cells }
    }

    fn cell(p: &(f64, f64), h: f64, n: usize) -> (usize, usize) {
        (((p.0 / h).floor() as usize) % n, ((p.1 / h).floor() as usize) % n)
    }

    fn near(&self, p: &(f64, f64), radius_cells: usize) -> Vec<usize> {
        let (ci, cj) = Self::cell(p, self.h, self.n);
        let r = radius_cells as i64;
        let mut out = Vec::new();
        for di in -r..=r {
            for dj in -r..=r {
                let key = (
                    (ci as i64 + di).rem_euclid(self.n as i64) as usize,
                    (cj as i64 + dj).rem_euclid(self.n as i64) as usize,
                );
                if let Some(v) = self.cells.get(&key) {
                    out.extend_from_slice(v);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// All parallel-pair branches of `curve`, with the `(s,t) ↔ (t,s)` mirror removed.
pub fn find_parallel_branches(curve: &PlaneCurve, grid_n: usize) -> Result<Vec<ParallelBranch>> {
    if grid_n < MIN_GRID {
        return Err(Error::GridTooSmall(grid_n));
    }
    let h = TAU / grid_n as f64;
    let crossings = grid_crossings(curve, grid_n);
    let points: Vec<(f64, f64)> = crossings.iter().map(|c| (c.s, c.t)).collect();
    let buckets = TorusBuckets::new(&points, grid_n);
    let radius = LINK_RADIUS_STEPS * h;
    let radius_cells = LINK_RADIUS_STEPS.ceil() as usize + 1;
    let mut used = vec![false; crossings.len()];

    let delta = |a: usize, b: usize| -> (f64, f64) {
        (wrap_pi(points[b].0 - points[a].0), wrap_pi(points[b].1 - points[a].1))
    };
    let walk = |start: usize, dir: (f64, f64), used: &mut Vec<bool>, allow_close: bool| -> (Vec<usize>, bool) {
        let mut path = vec![start];
        let mut cur = start;
        let mut d = dir;
        loop {
            let mut best: Option<(usize, f64)> = None;
            for cand in buckets.near(&points[cur], radius_cells) {
                let closing = allow_close && cand == start && path.len() >= 3;
                if cand == cur || (used[cand] && !closing) {
                    continue;
                }
                let (ds, dt) = delta(cur, cand);
                let dist = ds.hypot(dt);
                if dist < 1e-9 * h {
                    if !closing {
                        used[cand] = true;
                    }
                    continue;
                }
                if dist > radius || ds * d.0 + dt * d.1 <= 0.0 || crosses_diagonal(points[cur], points[cand]) {
                    continue;
                }
                let lateral = (d.0 * dt - d.1 * ds).abs();
                let score = dist + lateral;
                if best.map_or(true, |(_, b)| score < b) {
                    best = Some((cand, score));
                }
            }
            match best {
                None => return (path, false),
                Some((next, _)) if next == start => return (path, true),
                Some((next, _)) => {
                    let (ds, dt) = delta(cur, next);
                    let c = crossings[next].dir;
                    d = if c.0 * ds + c.1 * dt >= 0.0 { c } else { (-c.0, -c.1) };
                    used[next] = true;
                    path.push(next);
                    cur = next;
                }
            }
        }
    };

    let near_band = |k: usize| wrap_pi(points[k].0 - points[k].1).abs() < h + (LINK_RADIUS_STEPS + 2.0) * h;
    let mut chains: Vec<(Vec<usize>, bool)> = Vec::new();
    for start in 0..crossings.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let dir = crossings[start].dir;
        let (forward, closed) = walk(start, dir, &mut used, true);
        if closed {
            chains.push((forward, true));
            continue;
        }
        let (backward, _) = walk(start, (-dir.0, -dir.1), &mut used, false);
        let mut chain: Vec<usize> = backward.into_iter().skip(1).rev().collect();
        chain.extend(forward);
        let (first, last) = (chain[0], *chain.last().unwrap());
        if chain.len() < 2 {
            if near_band(first) {
                continue;
            }
            return Err(Error::BranchLinkFailure(format!(
                "isolated parallel pair at ({:.6}, {:.6})",
                points[first].0, points[first].1
            )));
        }
        for end in [first, last] {
            if !near_band(end) {
                return Err(Error::BranchLinkFailure(format!(
                    "open branch end at ({:.6}, {:.6}) away from the diagonal",
                    points[end].0, points[end].1
                )));
            }
        }
        chains.push((chain, false));
    }

    let owner: Vec<usize> = {
        let mut o = vec![usize::MAX; points.len()];
        for (b, (chain, _)) in chains.iter().enumerate() {
            for &k in chain {
                o[k] = b;
            }
        }
        o
    };
    let mut removed = vec![false; chains.len()];
    let mut self_mirror = vec![false; chains.len()];
    for b in 0..chains.len() {
        if removed[b] {
            continue;
        }
        let chain = &chains[b].0;
        let probe = *chain
            .iter()
            .max_by(|&&x, &&y| {
                wrap_pi(points[x].0 - points[x].1).abs().total_cmp(&wrap_pi(points[y].0 - points[y].1).abs())
            })
            .unwrap();
        let mirrored = (points[probe].1, points[probe].0);
        let nearest = buckets
            .near(&mirrored, radius_cells)
            .into_iter()
            .filter(|&k| owner[k] != usize::MAX)
            .min_by(|&x, &y| torus_distance(points[x], mirrored).total_cmp(&torus_distance(points[y], mirrored)));
        match nearest {
            Some(k) if owner[k] == b => self_mirror[b] = true,
            Some(k) if torus_distance(points[k], mirrored) < 2.0 * h => removed[owner[k]] = true,
            _ => {
                return Err(Error::BranchLinkFailure(format!(
                    "no mirror branch for pair ({:.6}, {:.6})",
                    points[probe].0, points[probe].1
                )))
            }
        }
    }

    let mut out = Vec::new();
    for (b, (chain, closed)) in chains.into_iter().enumerate() {
        if removed[b] {
            continue;
        }
        let pairs = chain.iter().map(|&k| ParallelPair::new(curve, points[k].0, points[k].1)).collect();
        out.push(ParallelBranch { id: out.len(), pairs, closed_loop: closed, self_mirror: self_mirror[b] });
    }
    log::debug!("{} crossings linked into {} branches", points.len(), out.len());
    Ok(out)
}

/// `cross(X(s) − X(t), X′(s)) / (|X′(s)|·diameter)`; zero for a bitangent chord.
pub fn bitangent_residual(curve: &PlaneCurve, s: f64, t: f64) -> f64 {
    let d = curve.derivs::<2>(s);
    cross(&(d[0] - curve.eval(t)), &d[1]) / (d[1].norm() * curve.scale().diameter)
}

/// Newton on the pair `{parallel, aligned}` from a nearby seed.
fn polish_bitangent(curve: &PlaneCurve, mut s: f64, mut t: f64) -> (f64, f64) {
    for _ in 0..NEWTON_CAP {
        let ds = curve.derivs::<3>(s);
        let dt = curve.derivs::<3>(t);
        let chord = ds[0] - dt[0];
        let g = cross(&ds[1], &dt[1]);
        let b = cross(&chord, &ds[1]);
        let j = nalgebra::Matrix2::new(
            cross(&ds[2], &dt[1]),
            cross(&ds[1], &dt[2]),
            cross(&chord, &ds[2]),
            -cross(&dt[1], &ds[1]),
        );
        let Some(inv) = j.try_inverse() else { break };
        let step = inv * nalgebra::Vector2::new(g, b);
        s -= step.x;
        t -= step.y;
        if step.norm() < 1e-15 {
            break;
        }
    }
    (s.rem_euclid(TAU), t.rem_euclid(TAU))
}

/// Parallel pairs whose chord lies along the common tangent line.
pub fn find_bitangent_pairs(curve: &PlaneCurve, branches: &[ParallelBranch]) -> Vec<ParallelPair> {
    let mut found: Vec<ParallelPair> = Vec::new();
    for branch in branches {
        let values: Vec<f64> = branch.pairs.iter().map(|p| bitangent_residual(curve, p.s, p.t)).collect();
        for i in 0..branch.segment_count() {
            let j = (i + 1) % branch.len();
            if (values[i] > 0.0) == (values[j] > 0.0) {
                continue;
            }
            let f = |u: f64| {
                let (s, t) = branch.params_at(curve, u);
                bitangent_residual(curve, s, t)
            };
            let Some(u) = brent(f, i as f64, i as f64 + 1.0, 1e-13) else { continue };
            let (s, t) = branch.params_at(curve, u);
            let (s, t) = polish_bitangent(curve, s, t);
            let pair = ParallelPair::new(curve, s, t);
            if found.iter().all(|q| q.unordered_distance(&pair) > 1e-6) {
                found.push(pair);
            }
        }
        // double roots: the residual touches zero without changing sign
        let n = branch.len();
        for i in 0..n {
            if !branch.closed_loop && (i == 0 || i + 1 == n) {
                continue;
            }
            let (prev, next) = (values[(i + n - 1) % n], values[(i + 1) % n]);
            let here = values[i];
            let same_sign = (prev > 0.0) == (here > 0.0) && (next > 0.0) == (here > 0.0);
            if !same_sign || here.abs() > prev.abs() || here.abs() > next.abs() {
                continue;
            }
            let f = |u: f64| {
                let (s, t) = branch.params_at(curve, u);
                bitangent_residual(curve, s, t).abs()
            };
            let (u, r) = golden_min(f, i as f64 - 1.0, i as f64 + 1.0, 1e-14);
            if r > 1e-12 {
                continue;
            }
            let pair = branch.pair_at(curve, u);
            if found.iter().all(|q| q.unordered_distance(&pair) > 1e-6) {
                found.push(pair);
            }
        }
    }
    found
}

/// Contact order of the tangent line with the curve at `X(t)`.
pub fn contact_order(curve: &PlaneCurve, t: f64) -> Result<u8> {
    let dir = curve.tangent(t).normalize();
    let c = curve.local_graph(t, &dir);
    let d = curve.scale().diameter;
    for (k, ck) in c.iter().enumerate() {
        if ck.abs() * d.powi(k as i32 + 1) >= 1e-7 {
            return Ok(k as u8 + 1);
        }
    }
    Err(Error::DegenerateContact { t })
}

/// Contact orders of the chord line at both endpoints of a bitangent pair.
pub fn tangency_order(curve: &PlaneCurve, pair: &ParallelPair) -> Result<(u8, u8)> {
    let g = parallel_residual(curve, pair.s, pair.t);
    if g.abs() > 1e3 * pair_tolerance(curve) {
        return Err(Error::NotParallel { s: pair.s, t: pair.t, residual: g });
    }
    let b = bitangent_residual(curve, pair.s, pair.t);
    if b.abs() > 1e-7 {
        return Err(Error::NotBitangent { s: pair.s, t: pair.t, residual: b });
    }
    Ok((contact_order(curve, pair.s)?, contact_order(curve, pair.t)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve_model::TrigSeries;

    #[test]
    fn lambda_point_examples() {
        let pair = ParallelPair { s: 0.0, t: PI, tangent_angle_gap: PI, chord_direction: [1.0, 0.0] };
        let chord = Chord { pair, a_plus: Point::new(1.0, 0.0), a_minus: Point::new(-1.0, 0.0) };
        assert_eq!(lambda_point(&chord, 0.5), Point::new(0.0, 0.0));
        assert_eq!(lambda_point(&chord, 0.0), Point::new(-1.0, 0.0));
        let chord = Chord { pair, a_plus: Point::new(2.0, 0.0), a_minus: Point::new(0.0, 0.0) };
        assert_eq!(lambda_point(&chord, 0.25), Point::new(0.5, 0.0));
    }

    #[test]
    fn circle_has_one_antipodal_loop() {
        let c = PlaneCurve::circle(1.0, Point::zeros()).unwrap();
        let branches = find_parallel_branches(&c, 128).unwrap();
        assert_eq!(branches.len(), 1);
        let b = &branches[0];
        assert!(b.closed_loop && b.self_mirror);
        for p in &b.pairs {
            assert!(wrap_pi(p.t - p.s - PI).abs() < 1e-9);
            assert_eq!(p.tangent_angle_gap, PI);
        }
    }

    #[test]
    fn small_grid_rejected() {
        let c = PlaneCurve::circle(1.0, Point::zeros()).unwrap();
        assert!(matches!(find_parallel_branches(&c, 32), Err(Error::GridTooSmall(32))));
    }

    #[test]
    fn pair_at_stays_on_zero_set() {
        let c = PlaneCurve::from_support(TrigSeries::new(vec![1.0, 0.0, 0.0, 0.1], vec![])).unwrap();
        let b = &find_parallel_branches(&c, 128).unwrap()[0];
        for k in 0..50 {
            let u = k as f64 * 2.37;
            let p = b.pair_at(&c, u);
            assert!(parallel_residual(&c, p.s, p.t).abs() < pair_tolerance(&c));
        }
    }

    #[test]
    fn convex_curves_have_no_bitangents() {
        let c = PlaneCurve::ellipse(2.0, 1.0).unwrap();
        let b = find_parallel_branches(&c, 128).unwrap();
        assert!(find_bitangent_pairs(&c, &b).is_empty());
    }

    #[test]
    fn circle_contact_is_simple() {
        let c = PlaneCurve::circle(1.0, Point::zeros()).unwrap();
        assert_eq!(contact_order(&c, 0.4).unwrap(), 1);
    }
}
