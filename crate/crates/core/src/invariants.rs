//! The pressure/shear invariant map and the translated Tartar quadratics.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SdqcError};
use crate::tensor::{Matrix, SymMatrix};

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// A point of the invariant half-plane `q >= 0`. Serialized as `[p, q]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct PQPoint {
    pub p: f64,
    pub q: f64,
}

impl PQPoint {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !p.is_finite() || !q.is_finite() {
            return Err(SdqcError::NonFinite(format!("point ({p}, {q})")));
        }
        if q < 0.0 {
            return Err(SdqcError::InvalidPrimitive(format!("point ({p}, {q}) has q < 0")));
        }
        Ok(PQPoint { p, q })
    }
}

impl TryFrom<[f64; 2]> for PQPoint {
    type Error = SdqcError;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        PQPoint::new(v[0], v[1])
    }
}

impl From<PQPoint> for [f64; 2] {
    fn from(y: PQPoint) -> Self {
        [y.p, y.q]
    }
}

/// Unit vector in the (p, q) plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    pub e1: f64,
    pub e2: f64,
}

impl Direction {
    pub fn new(e1: f64, e2: f64) -> Result<Self> {
        let n = e1.hypot(e2);
        if !n.is_finite() || (n - 1.0).abs() > 1e-12 {
            return Err(SdqcError::NotUnit(n));
        }
        Ok(Direction { e1, e2 })
    }

    pub fn from_angle(theta: f64) -> Self {
        Direction { e1: theta.cos(), e2: theta.sin() }
    }

    pub fn neg(&self) -> Self {
        Direction { e1: -self.e1, e2: -self.e2 }
    }

    /// `|e2| >= (√3/2)|e1|`: steep directions, handled by reflected lines.
    pub fn in_s1_plus(&self) -> bool {
        self.e2.abs() >= 0.5 * SQRT3 * self.e1.abs()
    }

    /// `|e2| <= (√3/2)|e1|`: shallow directions, handled by hyperbolas.
    pub fn in_s1_minus(&self) -> bool {
        self.e2.abs() <= 0.5 * SQRT3 * self.e1.abs()
    }
}

/// `(p, q) = (Tr σ / n, |σ - p Id| / √2)`.
pub fn phi(sigma: &SymMatrix) -> PQPoint {
    let p = sigma.mean();
    let q = sigma.deviator().norm() / std::f64::consts::SQRT_2;
    PQPoint { p, q }
}

/// `(n-1)|F|² - (Tr F)²`, defined for any square matrix.
pub fn tartar_f(m: &Matrix) -> f64 {
    let n = m.dim() as f64;
    (n - 1.0) * m.norm_sq() - m.trace().powi(2)
}

pub fn tartar_sym(sigma: &SymMatrix) -> f64 {
    tartar_f(sigma.as_matrix())
}

/// `4(q² - q0²) - 3(p - p0)²`.
pub fn separator_value(y0: &PQPoint, y: &PQPoint) -> f64 {
    4.0 * (y.q * y.q - y0.q * y0.q) - 3.0 * (y.p - y0.p).powi(2)
}

/// Ascending eigenvalues of the deviator `σ - p Id` (n = 3 only).
pub fn deviator_eigen(sigma: &SymMatrix) -> Result<[f64; 3]> {
    if sigma.dim() != 3 {
        return Err(SdqcError::InvalidDimension(sigma.dim()));
    }
    Ok(sigma.deviator().eigen3().values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pqpoint_json_shape() {
        let y: PQPoint = serde_json::from_str("[0.5, 2]").unwrap();
        assert_eq!(y, PQPoint { p: 0.5, q: 2.0 });
        assert_eq!(serde_json::to_string(&y).unwrap(), "[0.5,2.0]");
        assert!(serde_json::from_str::<PQPoint>("[0.5, -1]").is_err());
    }

    #[test]
    fn direction_classes_overlap_at_junction() {
        let j = Direction::new(2.0 / 7f64.sqrt(), SQRT3 / 7f64.sqrt()).unwrap();
        assert!(j.in_s1_plus() || j.in_s1_minus());
        assert!(Direction::new(1.0, 0.0).unwrap().in_s1_minus());
        assert!(Direction::new(0.0, -1.0).unwrap().in_s1_plus());
        assert!(Direction::new(1.0, 1.0).is_err());
    }
}
