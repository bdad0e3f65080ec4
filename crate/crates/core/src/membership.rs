//! Tensor membership through the planar hull.

use serde::Serialize;

use crate::error::{Result, SdqcError};
use crate::hull::{hsdqc, slope_report, HullModel, HullResult, SlopeReport, Witness};
use crate::invariants::{phi, PQPoint};
use crate::planar::PlanarSet;
use crate::tensor::SymMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Member,
    /// `φ(σ)` lies in the planar hull but the tensor characterization is not
    /// available (slope condition violated or hull disconnected).
    PhiMemberOnly,
    NotMember,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipVerdict {
    pub verdict: Verdict,
    pub phi: PQPoint,
    /// Slope condition on the hull boundary, and connectedness of the hull.
    pub slope_condition_held: bool,
    pub connected: bool,
    pub witness: Option<Witness>,
    pub slope: SlopeReport,
}

/// Verdict for `sigma` against the hull sampled on `n` nodes.
pub fn membership(sigma: &SymMatrix, set: &PlanarSet, n: usize, rel_tol: f64) -> Result<MembershipVerdict> {
    let hull = hsdqc(set, n, rel_tol)?;
    membership_with(sigma, set, &hull, rel_tol)
}

/// As [`membership`], reusing an already computed hull of `set`.
pub fn membership_with(
    sigma: &SymMatrix,
    set: &PlanarSet,
    hull: &HullResult,
    rel_tol: f64,
) -> Result<MembershipVerdict> {
    // the planar hull describes 3x3 stresses only
    if sigma.dim() != 3 {
        return Err(SdqcError::InvalidDimension(sigma.dim()));
    }
    let model = HullModel::new(set, rel_tol)?;
    let y = phi(sigma);
    let slope = slope_report(&hull.region, &hull.hhat, hull.tol.max(1e-9));
    let held = slope.held && hull.connected;
    let mk = |verdict, witness| MembershipVerdict {
        verdict,
        phi: y,
        slope_condition_held: held,
        connected: hull.connected,
        witness,
        slope,
    };
    let sep = model.is_separable(&y);
    if sep.separable {
        return Ok(mk(Verdict::NotMember, sep.witness));
    }
    // below a point of H, or on the base segment: reachable by a rank-two line
    // of constant pressure
    let below = set.fiber_max(y.p).is_some_and(|top| y.q <= top + model.tol)
        || set.points.iter().any(|h| (h.p - y.p).abs() <= model.tol && y.q <= h.q + model.tol);
    let on_base = y.q <= model.tol && y.p >= model.pmin - model.tol && y.p <= model.pmax + model.tol;
    if below || on_base || held {
        Ok(mk(Verdict::Member, None))
    } else {
        Ok(mk(Verdict::PhiMemberOnly, None))
    }
}
