//! Rank-two curves through a point of the invariant plane and their tensor lifts.
//!
//! Through `y = (p*, q*)` with tangent `e`, steep directions give the reflected
//! line `Π(y + e t)` (a "V-line" `q = b|p - p0|`), shallow ones the hyperbola
//! `q² = q0² + ¾(p - p0)²`. Both are images of straight matrix lines with a
//! rank-deficient direction.

use serde::Serialize;

use crate::error::{Result, SdqcError};
use crate::invariants::{phi, Direction, PQPoint, SQRT3};
use crate::tensor::{Matrix, SymMatrix};

/// `q0²` below this fraction of `q*²` is rounding noise at the junction directions.
const JUNCTION_SNAP: f64 = 64.0 * f64::EPSILON;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveKind {
    /// `q = b |p - p0|`; `b = ∞` is the vertical line `p = p0`.
    VLine { p0: f64, b: f64 },
    /// `q² = q0² + ¾ (p - p0)²`.
    Hyperbola { p0: f64, q0: f64 },
}

/// A member of the curve family through `base` with unit tangent `dir` there,
/// parametrized by arc length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankTwoCurve {
    pub kind: CurveKind,
    pub base: PQPoint,
    pub dir: Direction,
}

fn check_base(y: &PQPoint) -> Result<()> {
    if y.q > 0.0 && y.q.is_finite() && y.p.is_finite() {
        Ok(())
    } else {
        Err(SdqcError::DegenerateBase(y.q))
    }
}

/// Curve through `y` with tangent `e`: reflected line for steep `e`, hyperbola otherwise.
pub fn gamma(y: &PQPoint, e: &Direction) -> Result<RankTwoCurve> {
    if e.in_s1_plus() {
        gamma_plus(y, e)
    } else {
        gamma_minus(y, e)
    }
}

/// The reflected-line construction `Π(y + e t)`.
pub fn gamma_plus(y: &PQPoint, e: &Direction) -> Result<RankTwoCurve> {
    check_base(y)?;
    let kind = if e.e1 == 0.0 {
        CurveKind::VLine { p0: y.p, b: f64::INFINITY }
    } else {
        let k = e.e2 / e.e1;
        CurveKind::VLine { p0: y.p - y.q / k, b: k.abs() }
    };
    Ok(RankTwoCurve { kind, base: *y, dir: *e })
}

/// The hyperbola construction; needs `e1 != 0`.
pub fn gamma_minus(y: &PQPoint, e: &Direction) -> Result<RankTwoCurve> {
    check_base(y)?;
    if e.e1 == 0.0 {
        return Err(SdqcError::SlopeOutOfRange(f64::INFINITY));
    }
    let t_star = 2.0 * y.q * e.e2 / e.e1;
    let mut q0sq = y.q * y.q - t_star * t_star / 3.0;
    if q0sq.abs() <= JUNCTION_SNAP * y.q * y.q {
        q0sq = 0.0;
    }
    if q0sq < 0.0 {
        return Err(SdqcError::SlopeOutOfRange((e.e2 / e.e1).abs()));
    }
    let kind = CurveKind::Hyperbola { p0: y.p - 2.0 * t_star / 3.0, q0: q0sq.sqrt() };
    Ok(RankTwoCurve { kind, base: *y, dir: *e })
}

/// `|c'(τ)|` for `c(τ) = (p0 + 2τ/3, sqrt(q0² + τ²/3))`.
fn hyperbola_speed(q0: f64, tau: f64) -> f64 {
    let num = 4.0 * q0 * q0 + 7.0 / 3.0 * tau * tau;
    let den = q0 * q0 + tau * tau / 3.0;
    if den == 0.0 {
        return 7f64.sqrt() / 3.0;
    }
    (num / den).sqrt() / 3.0
}

/// Arc length of the hyperbola between parameters `a` and `b` (signed).
fn hyperbola_length(q0: f64, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if q0 == 0.0 {
        return 7f64.sqrt() / 3.0 * (b - a);
    }
    let piece = |lo: f64, hi: f64| {
        quadrature::integrate(|u| hyperbola_speed(q0, u), lo, hi, 1e-15).integral
    };
    // split at the vertex, where the integrand bends sharply
    if (a < 0.0 && b > 0.0) || (b < 0.0 && a > 0.0) {
        piece(a, 0.0) + piece(0.0, b)
    } else {
        piece(a, b)
    }
}

impl RankTwoCurve {
    /// Point at signed arc length `t` from the base, moving along `dir` for `t > 0`.
    pub fn point(&self, t: f64) -> PQPoint {
        match self.kind {
            CurveKind::VLine { .. } => PQPoint {
                p: self.base.p + self.dir.e1 * t,
                q: (self.base.q + self.dir.e2 * t).abs(),
            },
            CurveKind::Hyperbola { p0, q0 } => {
                let tau = self.tau_at(t);
                PQPoint { p: p0 + 2.0 * tau / 3.0, q: (q0 * q0 + tau * tau / 3.0).sqrt() }
            }
        }
    }

    /// Hyperbola parameter of the base point.
    fn tau_base(&self) -> f64 {
        match self.kind {
            CurveKind::Hyperbola { p0, .. } => 1.5 * (self.base.p - p0),
            CurveKind::VLine { .. } => 0.0,
        }
    }

    /// Hyperbola parameter at arc length `t` (Newton on the arc-length integral).
    fn tau_at(&self, t: f64) -> f64 {
        let CurveKind::Hyperbola { q0, .. } = self.kind else { return 0.0 };
        let tau0 = self.tau_base();
        let sign = if self.dir.e1 >= 0.0 { 1.0 } else { -1.0 };
        let target = sign * t;
        if q0 == 0.0 {
            return tau0 + target * 3.0 / 7f64.sqrt();
        }
        let mut tau = tau0 + target * 1.5;
        for _ in 0..60 {
            let f = hyperbola_length(q0, tau0, tau) - target;
            let step = f / hyperbola_speed(q0, tau);
            tau -= step;
            if step.abs() <= 1e-15 * (1.0 + tau.abs()) {
                break;
            }
        }
        tau
    }

    /// q of the curve's graph above `p` (`None` off the vertical line).
    pub fn q_at(&self, p: f64) -> Option<f64> {
        match self.kind {
            CurveKind::VLine { p0, b } if b.is_infinite() => (p == p0).then_some(self.base.q),
            CurveKind::VLine { p0, b } => Some(b * (p - p0).abs()),
            CurveKind::Hyperbola { p0, q0 } => Some((q0 * q0 + 0.75 * (p - p0) * (p - p0)).sqrt()),
        }
    }

    /// Straight matrix line whose image under `phi` is this curve's graph.
    pub fn lift(&self) -> MatrixPath {
        lift_line(&self.kind)
    }
}

/// `ξ(τ) = base + τ dir`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatrixPath {
    pub base: SymMatrix,
    pub dir: SymMatrix,
}

impl MatrixPath {
    pub fn at(&self, tau: f64) -> SymMatrix {
        self.base.axpy(tau, &self.dir)
    }
}

/// Diagonal matrix line tracing the graph of `kind` (n = 3).
pub fn lift_line(kind: &CurveKind) -> MatrixPath {
    let d = |v: [f64; 3]| SymMatrix::diag(&v).expect("finite diagonal");
    match *kind {
        CurveKind::VLine { p0, b } if b.is_infinite() => MatrixPath {
            base: d([p0, p0, p0]),
            dir: d([1.0, -1.0, 0.0]),
        },
        CurveKind::VLine { p0, b } => {
            let a = ((4.0 * b * b / 3.0 - 1.0) / 3.0).max(0.0).sqrt();
            MatrixPath { base: d([p0, p0, p0]), dir: d([1.0 + a, 1.0 - a, 0.0]) }
        }
        CurveKind::Hyperbola { p0, q0 } => MatrixPath {
            base: d([p0 + q0, p0 - q0, p0]),
            dir: d([1.0, 1.0, 0.0]),
        },
    }
}

/// Matrix line through `σ*` in direction `±(Id - g⊗g)` whose image is tangent
/// to `e` at `phi(σ*)`, for shallow `e` with `|e2| <= (√3/4)|e1|`.
pub fn lift_through_matrix(sigma: &SymMatrix, e: &Direction) -> Result<(MatrixPath, [f64; 3])> {
    if sigma.dim() != 3 {
        return Err(SdqcError::InvalidDimension(sigma.dim()));
    }
    let y = phi(sigma);
    check_base(&y)?;
    if e.e2.abs() > 0.25 * SQRT3 * e.e1.abs() + 1e-12 {
        let slope = if e.e1 == 0.0 { f64::INFINITY } else { (e.e2 / e.e1).abs() };
        return Err(SdqcError::SlopeOutOfRange(slope));
    }
    let s = e.e2 / e.e1;
    let target = -4.0 * y.q * s / 3.0;
    let eig = sigma.deviator().eigen3();
    let (l1, l3) = (eig.values[0], eig.values[2]);
    let (v1, v3) = (eig.vectors[0], eig.vectors[2]);
    // g = cos θ v1 + sin θ v3 gives g·σ_D g = λ1 cos²θ + λ3 sin²θ
    let sin2 = ((target - l1) / (l3 - l1)).clamp(0.0, 1.0);
    let (st, ct) = (sin2.sqrt(), (1.0 - sin2).sqrt());
    let g = [ct * v1[0] + st * v3[0], ct * v1[1] + st * v3[1], ct * v1[2] + st * v3[2]];
    let b = SymMatrix::identity(3)?.sub(&Matrix::outer(&g, &g)?.sym_part());
    let sign = if e.e1 >= 0.0 { 1.0 } else { -1.0 };
    Ok((MatrixPath { base: *sigma, dir: b.scale(sign) }, g))
}

/// Convex hull of two matrices with respect to the divergence constraint.
#[derive(Clone, Debug, PartialEq)]
pub enum TwoMatrixHull {
    /// `A - B` is singular: the whole segment.
    Segment { a: SymMatrix, b: SymMatrix, rank: usize },
    /// `A - B` invertible: only the endpoints, certified by `witness`.
    Pair { a: SymMatrix, b: SymMatrix, witness: PairWitness },
}

/// `g(ξ) = ((n-1)|ξ'|² - (Tr ξ' D)² + n)_+` with `ξ' = P ξ Pᵀ + C`, where the
/// affine map sends `A` to `D` and `B` to `-D`, `D = diag(±1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairWitness {
    pub p: Matrix,
    pub c: SymMatrix,
    pub d: Vec<f64>,
}

impl PairWitness {
    pub fn transform(&self, xi: &SymMatrix) -> SymMatrix {
        xi.congruence(&self.p).add(&self.c)
    }

    pub fn value(&self, xi: &SymMatrix) -> f64 {
        let x = self.transform(xi);
        let n = x.dim() as f64;
        let tr: f64 = (0..x.dim()).map(|i| self.d[i] * x.get(i, i)).sum();
        ((n - 1.0) * x.norm_sq() - tr * tr + n).max(0.0)
    }
}

pub fn two_matrix_hull(a: &SymMatrix, b: &SymMatrix) -> Result<TwoMatrixHull> {
    if a.dim() != b.dim() {
        return Err(SdqcError::InvalidDimension(b.dim()));
    }
    let diff = a.sub(b);
    let norm = diff.norm();
    if norm == 0.0 {
        return Err(SdqcError::DomainError("A equals B".into()));
    }
    let (vals, vecs) = diff.eigen();
    let n = a.dim();
    let rank = vals.iter().filter(|l| l.abs() > 1e-10 * norm).count();
    if rank < n {
        return Ok(TwoMatrixHull::Segment { a: *a, b: *b, rank });
    }
    let mut p = Matrix::zeros(n)?;
    for (k, (l, v)) in vals.iter().zip(&vecs).enumerate() {
        let f = (2.0 / l.abs()).sqrt();
        for j in 0..n {
            p.set(k, j, f * v[j]);
        }
    }
    let mid = a.add(b).scale(0.5);
    let c = mid.congruence(&p).scale(-1.0);
    let d = vals.iter().map(|l| l.signum()).collect();
    Ok(TwoMatrixHull::Pair { a: *a, b: *b, witness: PairWitness { p, c, d } })
}
