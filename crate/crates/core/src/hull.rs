//! Downward closure, convex hull and the separation hull in the invariant plane.
//!
//! Separation by `f_{y0} = 4(q² - q0²) - 3(p - p0)²` does not depend on `q0`
//! (it only shifts both sides), so a point `y*` is cut off by the family iff
//!
//! ```text
//! 4 q*² > min_w S(w),   S(w) = max_H [4q² - 3u² + 6 w u],   u = p - p*,
//! ```
//!
//! and `S` is convex in `w`. Likewise the convex-hull envelope at `p*` is
//! `min_s max_H [q + s u]`. Both minimizations are one-dimensional and are
//! solved by bisection on the sign of the maximizing `u`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, SdqcError};
use crate::invariants::{separator_value, PQPoint, SQRT3};
use crate::planar::{segment_height, PlanarSet};
use crate::region::{Grid, Region};

/// Relative tolerance used when none is given.
pub const DEFAULT_REL_TOL: f64 = 1e-9;
pub const DEFAULT_GRID: usize = 512;
/// Slope bound on the hull boundary for full tensor characterization.
pub const SLOPE_BOUND: f64 = SQRT3 / 4.0;

const SEARCH_CAP: f64 = 1e7;

/// Minimizes a convex function given by `eval(x) = (value, u)`, where the sign
/// of `u` is the sign of a subgradient. Returns `(min value, argmin)`.
fn dual_min(eval: impl Fn(f64) -> (f64, f64), unit: f64) -> (f64, f64) {
    let cap = SEARCH_CAP * unit;
    let mut lo = -unit;
    let mut hi = unit;
    while lo > -cap && eval(lo).1 > 0.0 {
        lo *= 2.0;
    }
    while hi < cap && eval(hi).1 < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let u = eval(mid).1;
        if u > 0.0 {
            hi = mid;
        } else if u < 0.0 {
            lo = mid;
        } else {
            lo = mid;
            hi = mid;
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    [lo, mid, hi]
        .into_iter()
        .map(|x| (eval(x).0, x))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap()
}

/// Separating functional returned by [`is_separable`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `a(p, q) = b p + c q + d` with `c >= 0`.
    Affine { b: f64, c: f64, d: f64 },
    /// Translated Tartar quadratic centred at `y0`.
    Tartar { p0: f64, q0: f64 },
}

impl Witness {
    pub fn value(&self, y: &PQPoint) -> f64 {
        match *self {
            Witness::Affine { b, c, d } => b * y.p + c * y.q + d,
            Witness::Tartar { p0, q0 } => separator_value(&PQPoint { p: p0, q: q0 }, y),
        }
    }

    /// Exact maximum over `H` (and hence over its downward closure).
    pub fn max_over(&self, set: &PlanarSet) -> f64 {
        match *self {
            Witness::Affine { b, c, d } => set.support_affine(b, c) + d,
            Witness::Tartar { p0, q0 } => set.support_tartar(0.0, p0).0 - 4.0 * q0 * q0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Separation {
    pub separable: bool,
    pub witness: Option<Witness>,
    /// `witness(y*) - max_H witness` for the best witness found.
    pub margin: f64,
}

/// Exact envelope evaluation for a fixed planar set.
#[derive(Clone, Debug)]
pub struct HullModel<'a> {
    set: &'a PlanarSet,
    pub pmin: f64,
    pub pmax: f64,
    /// Diameter of the convex hull's bounding box (1 for a single point on q = 0).
    pub scale: f64,
    /// Absolute tolerance in q units.
    pub tol: f64,
}

impl<'a> HullModel<'a> {
    /// `rel_tol` is scaled by the diameter of the convex hull.
    pub fn new(set: &'a PlanarSet, rel_tol: f64) -> Result<Self> {
        let (pmin, pmax) = set.p_range()?;
        let qmax = set.q_max();
        let mut scale = (pmax - pmin).hypot(qmax);
        if scale == 0.0 {
            scale = 1.0;
        }
        Ok(HullModel { set, pmin, pmax, scale, tol: rel_tol * scale })
    }

    pub fn set(&self) -> &PlanarSet {
        self.set
    }

    fn in_range(&self, p: f64) -> bool {
        p >= self.pmin && p <= self.pmax
    }

    /// Upper envelope of the convex hull at `p` and the optimal dual slope.
    fn conv_dual(&self, p: f64) -> (f64, f64) {
        dual_min(|s| self.set.support_q(s, p), 1.0)
    }

    pub fn conv_top(&self, p: f64) -> Option<f64> {
        if !self.in_range(p) {
            return None;
        }
        let fib = self.set.fiber_max(p).unwrap_or(0.0);
        if p == self.pmin || p == self.pmax {
            // vertical supporting line: only H itself lies above the end points
            return Some(fib);
        }
        Some(self.conv_dual(p).0.max(fib).max(0.0))
    }

    /// `min_w S(w)` at `p` and the minimizing `w`.
    fn tartar_dual(&self, p: f64) -> (f64, f64) {
        dual_min(|w| self.set.support_tartar(w, p), self.scale)
    }

    /// `ψ_sep(p)²`, negative when even `(p, 0)` is cut off.
    pub fn separation_level(&self, p: f64) -> f64 {
        self.tartar_dual(p).0 / 4.0
    }

    /// Envelope of the separation hull at `p`; `None` outside the projection
    /// or where the whole column is cut off.
    pub fn top(&self, p: f64) -> Option<f64> {
        let conv = self.conv_top(p)?;
        let lvl = self.separation_level(p);
        if lvl < -self.tol * self.scale {
            return None;
        }
        let fib = self.set.fiber_max(p).unwrap_or(0.0);
        Some(conv.min(lvl.max(0.0).sqrt()).max(fib))
    }

    pub fn is_separable(&self, y: &PQPoint) -> Separation {
        let tol = self.tol;
        if y.p < self.pmin - tol {
            return Separation {
                separable: true,
                witness: Some(Witness::Affine { b: -1.0, c: 0.0, d: self.pmin }),
                margin: self.pmin - y.p,
            };
        }
        if y.p > self.pmax + tol {
            return Separation {
                separable: true,
                witness: Some(Witness::Affine { b: 1.0, c: 0.0, d: -self.pmax }),
                margin: y.p - self.pmax,
            };
        }
        let p = y.p.clamp(self.pmin, self.pmax);
        let (g, s) = self.conv_dual(p);
        if y.q > g + tol {
            let w = Witness::Affine { b: s, c: 1.0, d: -s * p - g };
            return Separation { separable: true, witness: Some(w), margin: y.q - g };
        }
        let (smin, w) = self.tartar_dual(y.p);
        let margin = 4.0 * y.q * y.q - smin;
        let p0 = y.p + w;
        let m = smin - 3.0 * w * w;
        let q0 = (m.max(0.0) / 4.0).sqrt();
        Separation {
            separable: margin > tol * self.scale,
            witness: Some(Witness::Tartar { p0, q0 }),
            margin,
        }
    }
}

/// Column envelope of `H` on `grid`. Points (and primitives too short to cover
/// a node) snap to the nearest node; segments and arcs are evaluated exactly
/// at the nodes they span.
pub fn downward_closure_on(set: &PlanarSet, grid: Grid) -> Region {
    let mut psi: Vec<Option<f64>> = vec![None; grid.len()];
    let h = grid.step();
    let mut put = |i: usize, q: f64| {
        psi[i] = Some(psi[i].map_or(q, |v: f64| v.max(q)));
    };
    let covers = |p: f64| p >= grid.pmin - 0.5 * h && p <= grid.pmax + 0.5 * h;
    for y in &set.points {
        if covers(y.p) {
            put(grid.nearest(y.p), y.q);
        }
    }
    for (a, b) in &set.segments {
        let (lo, hi) = (a.p.min(b.p), a.p.max(b.p));
        // endpoints snap like points so steep segments keep their tops
        for y in [a, b] {
            if covers(y.p) {
                put(grid.nearest(y.p), y.q);
            }
        }
        for i in grid.range(lo, hi) {
            if let Some(q) = segment_height(a, b, grid.node(i)) {
                put(i, q);
            }
        }
    }
    for arc in &set.arcs {
        let range = grid.range(arc.center_p - arc.radius, arc.center_p + arc.radius);
        if range.is_empty() {
            if covers(arc.center_p) {
                put(grid.nearest(arc.center_p), arc.radius);
            }
        } else {
            for i in range {
                if let Some(q) = arc.height(grid.node(i)) {
                    put(i, q);
                }
            }
        }
    }
    Region::new(grid, psi)
}

/// The grid spanning the projection of `H` with `n` nodes.
pub fn grid_for(set: &PlanarSet, n: usize) -> Result<Grid> {
    let (lo, hi) = set.p_range()?;
    Grid::new(lo, hi, n)
}

pub fn downward_closure(set: &PlanarSet, n: usize) -> Result<Region> {
    Ok(downward_closure_on(set, grid_for(set, n)?))
}

pub fn convex_hull(region: &Region) -> Region {
    region.convex_hull()
}

/// Separation test of a single point, `rel_tol` relative to the hull diameter.
pub fn is_separable(y: &PQPoint, set: &PlanarSet, rel_tol: f64) -> Result<Separation> {
    Ok(HullModel::new(set, rel_tol)?.is_separable(y))
}

#[derive(Clone, Debug)]
pub struct HullResult {
    pub region: Region,
    /// Downward closure of `H` on the same grid.
    pub hhat: Region,
    /// Exact convex-hull envelope sampled on the same grid.
    pub conv: Region,
    pub connected: bool,
    /// Absolute q tolerance used.
    pub tol: f64,
}

impl HullResult {
    /// `Some("outer bound only")` when the projection has a gap.
    pub fn label(&self) -> Option<&'static str> {
        (!self.connected).then_some("outer bound only")
    }

    /// `DisconnectedResult` warning text, if any.
    pub fn warning(&self) -> Option<String> {
        (!self.connected).then(|| {
            "DisconnectedResult: hull projection has gaps; region is an outer bound only".to_string()
        })
    }
}

/// Separation hull of `H` sampled on `grid`. Nodes outside the projection of
/// `H` are left undefined. Columns are exact evaluations, so they may sit below
/// `hhat` where a point of `H` was snapped onto a neighbouring node.
pub fn hsdqc_on(set: &PlanarSet, grid: Grid, rel_tol: f64) -> Result<HullResult> {
    let model = HullModel::new(set, rel_tol)?;
    let cols: Vec<(Option<f64>, Option<f64>)> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let p = grid.node(i);
            (model.top(p), model.conv_top(p))
        })
        .collect();
    let hhat = downward_closure_on(set, grid);
    let region = Region::new(grid, cols.iter().map(|c| c.0).collect());
    let conv = Region::new(grid, cols.iter().map(|c| c.1).collect());
    let connected = !region.has_gap();
    Ok(HullResult { region, hhat, conv, connected, tol: model.tol })
}

pub fn hsdqc(set: &PlanarSet, n: usize, rel_tol: f64) -> Result<HullResult> {
    hsdqc_on(set, grid_for(set, n)?, rel_tol)
}

/// Outcome of the boundary slope test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlopeReport {
    pub held: bool,
    /// Largest finite-difference slope seen at boundary nodes outside `Ĥ`.
    pub worst_slope: f64,
    /// Node index of the worst slope, if any node was tested.
    pub worst_node: Option<usize>,
}

/// Finite-difference slope test on the part of the boundary of `region` that
/// lies strictly above `hhat`.
pub fn slope_report(region: &Region, hhat: &Region, tol: f64) -> SlopeReport {
    assert_eq!(region.grid, hhat.grid);
    let g = region.grid;
    let h = g.step();
    let mut worst: f64 = 0.0;
    let mut worst_node = None;
    if h > 0.0 {
        for i in 0..g.len() {
            let Some(top) = region.psi[i] else { continue };
            if let Some(base) = hhat.psi[i] {
                if top <= base + tol {
                    continue;
                }
            }
            let left = i.checked_sub(1).and_then(|j| region.psi[j]);
            let right = region.psi.get(i + 1).copied().flatten();
            let slope = match (left, right) {
                (Some(l), Some(r)) => (r - l) / (2.0 * h),
                (Some(l), None) => (top - l) / h,
                (None, Some(r)) => (r - top) / h,
                (None, None) => continue,
            };
            if slope.abs() > worst {
                worst = slope.abs();
                worst_node = Some(i);
            }
        }
    }
    SlopeReport { held: worst <= SLOPE_BOUND + tol, worst_slope: worst, worst_node }
}

pub fn slope_condition(region: &Region, hhat: &Region, tol: f64) -> bool {
    slope_report(region, hhat, tol).held
}

/// A function of p describing a closed-form region.
pub trait Envelope {
    fn top(&self, p: f64) -> Option<f64>;

    fn sample(&self, grid: Grid) -> Region {
        Region::from_fn(grid, |p| self.top(p))
    }
}

impl Envelope for HullModel<'_> {
    fn top(&self, p: f64) -> Option<f64> {
        HullModel::top(self, p)
    }
}

/// Two points `(±p1, q1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoPointHull {
    pub p1: f64,
    pub q1: f64,
}

pub fn two_point_hull(p1: f64, q1: f64) -> Result<TwoPointHull> {
    if !(p1.is_finite() && q1.is_finite()) || p1 <= 0.0 || q1 <= 0.0 {
        return Err(SdqcError::DomainError(format!("need p1 > 0 and q1 > 0, got ({p1}, {q1})")));
    }
    if p1 >= 2.0 * q1 / SQRT3 {
        return Err(SdqcError::DomainError(format!(
            "p1 = {p1} >= 2 q1 / sqrt(3) = {}",
            2.0 * q1 / SQRT3
        )));
    }
    Ok(TwoPointHull { p1, q1 })
}

impl TwoPointHull {
    pub fn set(&self) -> PlanarSet {
        PlanarSet::from_points(&[(-self.p1, self.q1), (self.p1, self.q1)]).expect("valid points")
    }
}

impl Envelope for TwoPointHull {
    fn top(&self, p: f64) -> Option<f64> {
        (p.abs() <= self.p1)
            .then(|| (self.q1 * self.q1 + 0.75 * (p * p - self.p1 * self.p1)).max(0.0).sqrt())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum CirclePointClass {
    /// Hyperbola `q² = q0² + ¾(p - p0)²` through D, tangent to the arc at `p_t`.
    #[serde(rename = "region_I")]
    RegionI { p0: f64, q0: f64, p_t: f64 },
    /// The hull equals the convex hull.
    #[serde(rename = "region_II")]
    RegionII,
    Unclassified,
}

/// Upper half-disc centred at `(pc, 0)` with radius `r`, plus the point D.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CirclePointHull {
    pub pc: f64,
    pub r: f64,
    pub pd: f64,
    pub qd: f64,
    pub class: CirclePointClass,
}

const TANGENCY_TOL: f64 = 1e-9;

pub fn circle_point_hull(pc: f64, r: f64, pd: f64, qd: f64) -> Result<CirclePointHull> {
    if ![pc, r, pd, qd].iter().all(|v| v.is_finite()) {
        return Err(SdqcError::NonFinite("circle/point parameters".into()));
    }
    if r <= 0.0 || qd < 0.0 {
        return Err(SdqcError::DomainError(format!("need r > 0 and qD >= 0, got r={r}, qD={qd}")));
    }
    if (pd - pc).hypot(qd) <= r {
        return Err(SdqcError::DomainError("D lies in the closed disc".into()));
    }
    let k = 0.5 * SQRT3;
    let px = pc - (7.0f64 / 3.0).sqrt() * r;
    let py = pc + (7.0f64 / 3.0).sqrt() * r;
    let qz = 0.5 * 7f64.sqrt() * r;
    let class = if pd < pc - r && k * (pd - px).abs() < qd && qd < k * (pd - py).abs() {
        tangent_hyperbola(pc, r, pd, qd)?
    } else if qd - qz >= k * (pd - pc).abs() {
        CirclePointClass::RegionII
    } else {
        CirclePointClass::Unclassified
    };
    Ok(CirclePointHull { pc, r, pd, qd, class })
}

/// Double-root condition of the hyperbola/circle intersection, as a quadratic
/// in `p0`: `(9/4) p0² + (6 pc - (21/2) pd) p0 + (21/4) pd² - 3 pc² - 7 qd² + 7 r² = 0`.
fn tangent_hyperbola(pc: f64, r: f64, pd: f64, qd: f64) -> Result<CirclePointClass> {
    let a = 2.25;
    let b = 6.0 * pc - 10.5 * pd;
    let c = 5.25 * pd * pd - 3.0 * pc * pc - 7.0 * qd * qd + 7.0 * r * r;
    let disc = b * b - 4.0 * a * c;
    let scale = b * b + (4.0 * a * c).abs();
    if disc < -TANGENCY_TOL * scale {
        return Err(SdqcError::DegenerateTangency(format!("discriminant {disc:e} < 0")));
    }
    let sq = disc.max(0.0).sqrt();
    // stable roots
    let t = -0.5 * (b + b.signum() * sq);
    let mut roots = vec![];
    if t != 0.0 {
        roots.push(t / a);
        roots.push(c / t);
    } else {
        roots.push(0.0);
    }
    let tol = TANGENCY_TOL * (1.0 + r + pd.abs() + pc.abs() + qd);
    let mut best: Option<CirclePointClass> = None;
    for p0 in roots {
        let q0sq = qd * qd - 0.75 * (pd - p0) * (pd - p0);
        let p_t = (3.0 * p0 + 4.0 * pc) / 7.0;
        if q0sq < -tol || p_t < pc - r - tol || p_t > pc + r + tol {
            continue;
        }
        let cand = CirclePointClass::RegionI { p0, q0: q0sq.max(0.0).sqrt(), p_t: p_t.clamp(pc - r, pc + r) };
        // keep the root whose tangent point is nearest to D
        best = match best {
            Some(CirclePointClass::RegionI { p_t: old, .. }) if old <= p_t => best,
            _ => Some(cand),
        };
    }
    best.ok_or_else(|| {
        SdqcError::DegenerateTangency("no root with q0² >= 0 and tangent point on the arc".into())
    })
}

impl CirclePointHull {
    pub fn set(&self) -> PlanarSet {
        PlanarSet {
            points: vec![PQPoint { p: self.pd, q: self.qd }],
            arcs: vec![crate::planar::Arc { center_p: self.pc, radius: self.r }],
            ..Default::default()
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.pd.min(self.pc - self.r), self.pd.max(self.pc + self.r))
    }

    fn arc(&self, p: f64) -> Option<f64> {
        let d = p - self.pc;
        (d.abs() <= self.r).then(|| ((self.r - d) * (self.r + d)).max(0.0).sqrt())
    }

    /// Upper envelope of the convex hull of the half-disc and the column under D,
    /// from the tangent lines through D.
    pub fn conv_top(&self, p: f64) -> Option<f64> {
        let (lo, hi) = self.domain();
        if p < lo || p > hi {
            return None;
        }
        let (dx, dy) = (self.pd - self.pc, self.qd);
        let d = dx.hypot(dy);
        let alpha = dy.atan2(dx);
        let beta = (self.r / d).acos();
        let pi = std::f64::consts::PI;
        let corner = |th: f64| (self.pc + self.r * th.cos(), self.r * th.sin().max(0.0));
        let (lp, lq) = if alpha + beta <= pi { corner(alpha + beta) } else { (self.pc - self.r, 0.0) };
        let (rp, rq) = if alpha - beta >= 0.0 { corner(alpha - beta) } else { (self.pc + self.r, 0.0) };
        let line = |ap: f64, aq: f64| {
            if ap == self.pd {
                self.qd
            } else {
                self.qd + (aq - self.qd) * (p - self.pd) / (ap - self.pd)
            }
        };
        let v = if p <= self.pd {
            if lp < self.pd && p >= lp {
                line(lp, lq)
            } else {
                self.arc(p).unwrap_or(self.qd)
            }
        } else if rp > self.pd && p <= rp {
            line(rp, rq)
        } else {
            self.arc(p).unwrap_or(0.0)
        };
        Some(v.max(self.arc(p).unwrap_or(0.0)))
    }
}

impl Envelope for CirclePointHull {
    fn top(&self, p: f64) -> Option<f64> {
        match self.class {
            CirclePointClass::RegionI { p0, q0, p_t } => {
                let (lo, hi) = self.domain();
                if p < lo || p > hi {
                    return None;
                }
                let arc = self.arc(p).unwrap_or(0.0);
                if p <= p_t {
                    Some((q0 * q0 + 0.75 * (p - p0) * (p - p0)).sqrt().max(arc))
                } else {
                    Some(arc)
                }
            }
            CirclePointClass::RegionII => self.conv_top(p),
            CirclePointClass::Unclassified => None,
        }
    }
}
