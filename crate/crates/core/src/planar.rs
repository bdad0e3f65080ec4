//! Compact sets in the invariant half-plane and their exact per-primitive maxima.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SdqcError};
use crate::invariants::PQPoint;

/// Closed upper half-disc of radius `radius` centred at `(center_p, 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub center_p: f64,
    pub radius: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PlanarSet {
    pub points: Vec<PQPoint>,
    pub segments: Vec<(PQPoint, PQPoint)>,
    pub arcs: Vec<Arc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArcJson {
    center: [f64; 2],
    radius: f64,
    half: String,
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct PlanarSetJson {
    #[serde(default)]
    points: Vec<PQPoint>,
    #[serde(default)]
    segments: Vec<[PQPoint; 2]>,
    #[serde(default)]
    arcs: Vec<ArcJson>,
}

impl Arc {
    pub fn new(center_p: f64, radius: f64) -> Result<Self> {
        if !center_p.is_finite() || !radius.is_finite() {
            return Err(SdqcError::NonFinite(format!("arc centre {center_p}, radius {radius}")));
        }
        if radius <= 0.0 {
            return Err(SdqcError::InvalidPrimitive(format!("arc radius {radius} <= 0")));
        }
        Ok(Arc { center_p, radius })
    }

    /// Height of the arc at `p`, if `p` is under it.
    pub fn height(&self, p: f64) -> Option<f64> {
        let r = self.radius;
        if p < self.center_p - r || p > self.center_p + r {
            return None;
        }
        let d = (p - self.center_p).clamp(-r, r);
        Some(((r - d) * (r + d)).max(0.0).sqrt())
    }

    /// End points relative to `p_ref`, rounded the same way as the p-range so
    /// that they are exactly 0 at `p_ref = pmin` or `pmax`.
    fn offsets(&self, p_ref: f64) -> (f64, f64) {
        ((self.center_p - self.radius) - p_ref, (self.center_p + self.radius) - p_ref)
    }
}

impl PlanarSet {
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        let points = points.iter().map(|&(p, q)| PQPoint::new(p, q)).collect::<Result<_>>()?;
        Ok(PlanarSet { points, ..Default::default() })
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.segments.is_empty() && self.arcs.is_empty()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: PlanarSetJson =
            serde_json::from_str(s).map_err(|e| SdqcError::Parse(e.to_string()))?;
        let mut arcs = Vec::with_capacity(raw.arcs.len());
        for a in raw.arcs {
            if a.half != "upper" {
                return Err(SdqcError::InvalidPrimitive(format!("arc half {:?}", a.half)));
            }
            if a.center[1] != 0.0 {
                return Err(SdqcError::InvalidPrimitive(format!(
                    "arc centre must lie on q = 0, got q = {}",
                    a.center[1]
                )));
            }
            arcs.push(Arc::new(a.center[0], a.radius)?);
        }
        let set = PlanarSet {
            points: raw.points,
            segments: raw.segments.into_iter().map(|[a, b]| (a, b)).collect(),
            arcs,
        };
        if set.is_empty() {
            return Err(SdqcError::EmptySet);
        }
        Ok(set)
    }

    pub fn to_json(&self) -> String {
        let raw = PlanarSetJson {
            points: self.points.clone(),
            segments: self.segments.iter().map(|&(a, b)| [a, b]).collect(),
            arcs: self
                .arcs
                .iter()
                .map(|a| ArcJson { center: [a.center_p, 0.0], radius: a.radius, half: "upper".into() })
                .collect(),
        };
        serde_json::to_string(&raw).expect("planar set serializes")
    }

    /// Projection of `H` onto the p-axis.
    pub fn p_range(&self) -> Result<(f64, f64)> {
        if self.is_empty() {
            return Err(SdqcError::EmptySet);
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut take = |p: f64| {
            lo = lo.min(p);
            hi = hi.max(p);
        };
        self.points.iter().for_each(|y| take(y.p));
        for (a, b) in &self.segments {
            take(a.p);
            take(b.p);
        }
        for a in &self.arcs {
            take(a.center_p - a.radius);
            take(a.center_p + a.radius);
        }
        Ok((lo, hi))
    }

    pub fn q_max(&self) -> f64 {
        let pts = self.points.iter().map(|y| y.q);
        let segs = self.segments.iter().map(|(a, b)| a.q.max(b.q));
        let arcs = self.arcs.iter().map(|a| a.radius);
        pts.chain(segs).chain(arcs).fold(0.0, f64::max)
    }

    /// Largest `q` of `H` exactly above `p` (the downward closure's envelope).
    pub fn fiber_max(&self, p: f64) -> Option<f64> {
        let mut best: Option<f64> = None;
        let mut take = |q: f64| best = Some(best.map_or(q, |b: f64| b.max(q)));
        for y in &self.points {
            if y.p == p {
                take(y.q);
            }
        }
        for (a, b) in &self.segments {
            if let Some(q) = segment_height(a, b, p) {
                take(q);
            }
        }
        for arc in &self.arcs {
            if let Some(q) = arc.height(p) {
                take(q);
            }
        }
        best
    }

    /// `max_H [q + s (p - p_ref)]` and the offset `p - p_ref` of a maximizer.
    pub fn support_q(&self, s: f64, p_ref: f64) -> (f64, f64) {
        let mut best = Best::new();
        for y in &self.points {
            let u = y.p - p_ref;
            best.take(y.q + s * u, u);
        }
        for (a, b) in &self.segments {
            for y in [a, b] {
                let u = y.p - p_ref;
                best.take(y.q + s * u, u);
            }
        }
        for arc in &self.arcs {
            let uc = arc.center_p - p_ref;
            let r = arc.radius;
            let (ulo, uhi) = arc.offsets(p_ref);
            let root = (1.0 + s * s).sqrt();
            // s*uc + r*sqrt(1+s²), written to avoid cancellation for large |s|.
            let v = if s < 0.0 { s * ulo + r / (root - s) } else { s * uhi + r / (root + s) };
            best.take(v, (uc + r * s / root).clamp(ulo, uhi));
        }
        best.get()
    }

    /// `max_H [4q² - 3u² + 6 w u]` with `u = p - p_ref`, and the maximizing `u`.
    ///
    /// With `w = p0 - p_ref` this is `max_H f_{(p0,0)} + 3 w²`.
    pub fn support_tartar(&self, w: f64, p_ref: f64) -> (f64, f64) {
        let val = |q: f64, u: f64| 4.0 * q * q - 3.0 * u * u + 6.0 * w * u;
        let mut best = Best::new();
        for y in &self.points {
            let u = y.p - p_ref;
            best.take(val(y.q, u), u);
        }
        for (a, b) in &self.segments {
            let ua = a.p - p_ref;
            let ub = b.p - p_ref;
            best.take(val(a.q, ua), ua);
            best.take(val(b.q, ub), ub);
            // interior vertex of the quadratic in the segment parameter
            let du = ub - ua;
            let dq = b.q - a.q;
            let c2 = 4.0 * dq * dq - 3.0 * du * du;
            if c2 < 0.0 {
                let c1 = 8.0 * a.q * dq - 6.0 * ua * du + 6.0 * w * du;
                let tau = -c1 / (2.0 * c2);
                if tau > 0.0 && tau < 1.0 {
                    let u = ua + tau * du;
                    best.take(val(a.q + tau * dq, u), u);
                }
            }
        }
        for arc in &self.arcs {
            let uc = arc.center_p - p_ref;
            let r = arc.radius;
            let (ulo, uhi) = arc.offsets(p_ref);
            let u = ((4.0 * uc + 3.0 * w) / 7.0).clamp(ulo, uhi);
            let d = (u - uc).clamp(-r, r);
            let q2 = ((r - d) * (r + d)).max(0.0);
            best.take(4.0 * q2 - 3.0 * u * u + 6.0 * w * u, u);
        }
        best.get()
    }

    /// `max_H [b p + c q]`.
    pub fn support_affine(&self, b: f64, c: f64) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for y in &self.points {
            m = m.max(b * y.p + c * y.q);
        }
        for (x, y) in &self.segments {
            m = m.max(b * x.p + c * x.q).max(b * y.p + c * y.q);
        }
        for arc in &self.arcs {
            let top = if c >= 0.0 { b.hypot(c) } else { b.abs() };
            m = m.max(b * arc.center_p + arc.radius * top);
        }
        m
    }

    /// Samples every primitive densely (segments and arcs at `per_unit` points
    /// per unit length, at least 2). Used by tests and the SVG writer.
    pub fn sample(&self, per_unit: f64) -> Vec<PQPoint> {
        let mut out = self.points.clone();
        for (a, b) in &self.segments {
            let len = (b.p - a.p).hypot(b.q - a.q);
            let k = ((len * per_unit).ceil() as usize).max(2);
            for i in 0..=k {
                let t = i as f64 / k as f64;
                out.push(PQPoint { p: a.p + t * (b.p - a.p), q: a.q + t * (b.q - a.q) });
            }
        }
        for arc in &self.arcs {
            let k = ((std::f64::consts::PI * arc.radius * per_unit).ceil() as usize).max(2);
            for i in 0..=k {
                let th = std::f64::consts::PI * i as f64 / k as f64;
                out.push(PQPoint {
                    p: arc.center_p + arc.radius * th.cos(),
                    q: arc.radius * th.sin(),
                });
            }
        }
        out
    }

    /// Image under `(p, q) -> (alpha p + beta, alpha q)`, `alpha > 0`.
    pub fn affine_image(&self, alpha: f64, beta: f64) -> PlanarSet {
        let m = |y: &PQPoint| PQPoint { p: alpha * y.p + beta, q: alpha * y.q };
        PlanarSet {
            points: self.points.iter().map(m).collect(),
            segments: self.segments.iter().map(|(a, b)| (m(a), m(b))).collect(),
            arcs: self
                .arcs
                .iter()
                .map(|a| Arc { center_p: alpha * a.center_p + beta, radius: alpha * a.radius })
                .collect(),
        }
    }

    pub fn union(&self, other: &PlanarSet) -> PlanarSet {
        let mut u = self.clone();
        u.points.extend_from_slice(&other.points);
        u.segments.extend_from_slice(&other.segments);
        u.arcs.extend_from_slice(&other.arcs);
        u
    }
}

pub(crate) fn segment_height(a: &PQPoint, b: &PQPoint, p: f64) -> Option<f64> {
    let (lo, hi) = if a.p <= b.p { (a, b) } else { (b, a) };
    if p < lo.p || p > hi.p {
        return None;
    }
    if hi.p == lo.p {
        return Some(lo.q.max(hi.q));
    }
    let t = (p - lo.p) / (hi.p - lo.p);
    Some(lo.q + t * (hi.q - lo.q))
}

struct Best {
    v: f64,
    u: f64,
}

impl Best {
    fn new() -> Self {
        Best { v: f64::NEG_INFINITY, u: 0.0 }
    }

    fn take(&mut self, v: f64, u: f64) {
        if v > self.v {
            self.v = v;
            self.u = u;
        }
    }

    fn get(&self) -> (f64, f64) {
        (self.v, self.u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_schema() {
        let s = r#"{"points":[[0.5,1]],"segments":[[[0,0],[1,1]]],
                    "arcs":[{"center":[0,0],"radius":1,"half":"upper"}]}"#;
        let h = PlanarSet::from_json(s).unwrap();
        assert_eq!(h.points.len(), 1);
        assert_eq!(h.segments.len(), 1);
        assert_eq!(h.arcs[0], Arc { center_p: 0.0, radius: 1.0 });
        assert_eq!(PlanarSet::from_json(&h.to_json()).unwrap(), h);

        assert_eq!(PlanarSet::from_json("{}"), Err(SdqcError::EmptySet));
        for bad in [
            r#"{"points":[[0,-1]]}"#,
            r#"{"arcs":[{"center":[0,1],"radius":1,"half":"upper"}]}"#,
            r#"{"arcs":[{"center":[0,0],"radius":0,"half":"upper"}]}"#,
            r#"{"arcs":[{"center":[0,0],"radius":1,"half":"lower"}]}"#,
            r#"{"pts":[]}"#,
            "[",
        ] {
            assert!(PlanarSet::from_json(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn arc_support_matches_sampling() {
        let h = PlanarSet { arcs: vec![Arc { center_p: 0.3, radius: 1.7 }], ..Default::default() };
        let pts = h.sample(4000.0);
        for &s in &[-30.0, -1.0, 0.0, 0.4, 7.0] {
            let (v, _) = h.support_q(s, 0.1);
            let m = pts.iter().map(|y| y.q + s * (y.p - 0.1)).fold(f64::MIN, f64::max);
            assert!((v - m).abs() < 1e-4 * (1.0 + s.abs()), "s={s}: {v} vs {m}");
            assert!(v >= m - 1e-12);
        }
        for &w in &[-5.0, -0.2, 0.0, 0.9, 4.0] {
            let (v, _) = h.support_tartar(w, -0.4);
            let m = pts
                .iter()
                .map(|y| {
                    let u = y.p + 0.4;
                    4.0 * y.q * y.q - 3.0 * u * u + 6.0 * w * u
                })
                .fold(f64::MIN, f64::max);
            assert!(v >= m - 1e-12 && v - m < 1e-4, "w={w}: {v} vs {m}");
        }
    }

    #[test]
    fn segment_tartar_support_is_exact() {
        let a = PQPoint { p: -1.0, q: 0.2 };
        let b = PQPoint { p: 2.0, q: 1.1 };
        let h = PlanarSet { segments: vec![(a, b)], ..Default::default() };
        let pts = h.sample(100_000.0);
        for &w in &[-3.0, 0.0, 0.5, 2.0] {
            let (v, _) = h.support_tartar(w, 0.25);
            let m = pts
                .iter()
                .map(|y| {
                    let u = y.p - 0.25;
                    4.0 * y.q * y.q - 3.0 * u * u + 6.0 * w * u
                })
                .fold(f64::MIN, f64::max);
            assert!(v >= m - 1e-12 && v - m < 1e-8, "w={w}: {v} vs {m}");
        }
    }
}
