//! Inner bound by iterated lamination along rank-two curves.
//!
//! Start from `Ĥ ∪ A×{0}` (columns on the grid plus the exact base segment)
//! and keep adding grid points `y` through which some curve of the family meets
//! the current set on both sides of `y`. For each family the set of curve
//! parameters hitting the set on one side is an interval (or a union of
//! intervals for the reflected branch), so the test is exact in the direction
//! and linear in the number of columns.

use rayon::prelude::*;

use crate::error::{Result, SdqcError};
use crate::hull::{downward_closure_on, grid_for};
use crate::invariants::SQRT3;
use crate::planar::PlanarSet;
use crate::region::{Grid, Region};

pub const DEFAULT_MAX_ITER: usize = 200;

const REFINE_STEPS: usize = 40;

#[derive(Clone, Debug)]
pub struct LaminationResult {
    pub region: Region,
    /// Sweeps performed, the last one adding nothing.
    pub sweeps: usize,
    /// Spacing of the tested q levels.
    pub q_step: f64,
}

struct Snapshot<'a> {
    ps: &'a [f64],
    tops: &'a [f64],
    a_lo: f64,
    a_hi: f64,
    eps: f64,
}

const K0: f64 = 0.5 * SQRT3;

impl Snapshot<'_> {
    /// Whether some curve through `(ps[i], q)` meets the set on both sides.
    fn both_sides(&self, i: usize, q: f64) -> bool {
        self.hyperbola(i, q) || self.rising(i, q) || self.falling(i, q)
    }

    fn defined(&self, j: usize) -> bool {
        self.tops[j] >= 0.0
    }

    /// Hyperbolas through `y` indexed by `w = p0 - p*` in `[-W, W]`.
    fn hyperbola(&self, i: usize, q: f64) -> bool {
        let p = self.ps[i];
        let wmax = 2.0 * q / SQRT3;
        let eps = self.eps;
        // forward hits: w >= L_j; backward hits: w <= U_j
        let bound = |j: usize| {
            let d = self.ps[j] - p;
            let t = self.tops[j];
            0.5 * (d - 4.0 * (t * t - q * q) / (3.0 * d))
        };
        let min_l = (i + 1..self.ps.len())
            .filter(|&j| self.defined(j))
            .map(bound)
            .fold(f64::INFINITY, f64::min);
        let max_u = (0..i).filter(|&j| self.defined(j)).map(bound).fold(f64::NEG_INFINITY, f64::max);
        let fwd_lo = if min_l <= wmax + eps {
            min_l.max(-wmax)
        } else if p + wmax <= self.a_hi + eps {
            wmax
        } else {
            return false;
        };
        let bwd_hi = if max_u >= -wmax - eps {
            max_u.min(wmax)
        } else if p - wmax >= self.a_lo - eps {
            -wmax
        } else {
            return false;
        };
        fwd_lo <= bwd_hi + eps
    }

    /// Lines `q = q* + k (p - p*)`, `k >= √3/2`, reflected at `q = 0`.
    fn rising(&self, i: usize, q: f64) -> bool {
        let p = self.ps[i];
        let kf = (i + 1..self.ps.len())
            .filter(|&j| self.defined(j))
            .map(|j| (self.tops[j] - q) / (self.ps[j] - p))
            .fold(f64::NEG_INFINITY, f64::max);
        if kf < K0 - self.eps {
            return false;
        }
        self.reflected_side(q, kf, (0..i).rev(), p, self.a_lo)
    }

    fn falling(&self, i: usize, q: f64) -> bool {
        let p = self.ps[i];
        let kb = (0..i)
            .filter(|&j| self.defined(j))
            .map(|j| (self.tops[j] - q) / (p - self.ps[j]))
            .fold(f64::NEG_INFINITY, f64::max);
        if kb < K0 - self.eps {
            return false;
        }
        self.reflected_side(q, kb, i + 1..self.ps.len(), p, self.a_hi)
    }

    /// On the descending side a slope `k` meets column `j` iff
    /// `(q - ψ_j)/|d_j| <= k <= (q + ψ_j)/|d_j|`, and meets the base iff the
    /// reflection point `p* ∓ q/k` stays inside `A`.
    fn reflected_side(
        &self,
        q: f64,
        kmax: f64,
        cols: impl Iterator<Item = usize>,
        p: f64,
        edge: f64,
    ) -> bool {
        let eps = self.eps;
        let reach = (p - edge).abs();
        if reach > 0.0 {
            let kb = q / reach;
            if kb.max(K0) <= kmax + eps {
                return true;
            }
        }
        for j in cols {
            if !self.defined(j) {
                continue;
            }
            let d = (self.ps[j] - p).abs();
            let lo = ((q - self.tops[j]) / d).max(K0);
            let hi = ((q + self.tops[j]) / d).min(kmax);
            if lo <= hi + eps {
                return true;
            }
        }
        false
    }
}

/// Bisects between a passing and a failing level of column `i`.
fn refine(snap: &Snapshot, i: usize, mut pass: f64, mut fail: f64) -> f64 {
    for _ in 0..REFINE_STEPS {
        let mid = 0.5 * (pass + fail);
        if mid <= pass || mid >= fail {
            break;
        }
        if snap.both_sides(i, mid) {
            pass = mid;
        } else {
            fail = mid;
        }
    }
    pass
}

pub fn lamination_closure(set: &PlanarSet, n: usize, max_iter: usize) -> Result<LaminationResult> {
    lamination_closure_on(set, grid_for(set, n)?, max_iter)
}

/// Fixpoint on `grid`; nodes outside the projection of `H` stay undefined.
pub fn lamination_closure_on(set: &PlanarSet, grid: Grid, max_iter: usize) -> Result<LaminationResult> {
    let (a_lo, a_hi) = set.p_range()?;
    let hhat = downward_closure_on(set, grid);
    let ps = grid.nodes();
    let mut tops: Vec<f64> = (0..grid.len())
        .map(|i| match hhat.psi[i] {
            Some(q) => q,
            None if ps[i] >= a_lo && ps[i] <= a_hi => 0.0,
            None => -1.0,
        })
        .collect();
    let start = Region::new(grid, tops.iter().map(|&t| (t >= 0.0).then_some(t)).collect());
    let ceiling: Vec<f64> =
        start.convex_hull().psi.iter().map(|v| v.unwrap_or(-1.0)).collect();
    let qmax = ceiling.iter().copied().fold(0.0, f64::max);
    let q_step = grid.step().max(qmax / (grid.len().max(2) - 1) as f64);
    let scale = (a_hi - a_lo).hypot(qmax).max(f64::MIN_POSITIVE);
    let eps = 1e-12 * scale.max(1.0);

    if grid.len() < 2 || q_step == 0.0 {
        return Ok(LaminationResult { region: start, sweeps: 0, q_step });
    }

    for sweep in 1..=max_iter {
        let snap = Snapshot { ps: &ps, tops: &tops, a_lo, a_hi, eps };
        let next: Vec<f64> = (0..ps.len())
            .into_par_iter()
            .map(|i| {
                let cur = tops[i];
                let ceil = ceiling[i];
                if cur < 0.0 || ceil <= cur {
                    return cur;
                }
                // test the ceiling, then the q levels below it, top down
                if snap.both_sides(i, ceil) {
                    return ceil;
                }
                let mut m = (ceil / q_step).floor();
                if m * q_step >= ceil {
                    m -= 1.0;
                }
                let mut fail = ceil;
                while m * q_step > cur && m > 0.0 {
                    let q = m * q_step;
                    if snap.both_sides(i, q) {
                        return refine(&snap, i, q, fail);
                    }
                    fail = q;
                    m -= 1.0;
                }
                cur
            })
            .collect();
        // refined levels may creep by tiny amounts; those do not count
        let changed = next.iter().zip(&tops).any(|(a, b)| (a - b).abs() > 1e-3 * q_step);
        tops = next;
        if !changed {
            let region = Region::new(grid, tops.iter().map(|&t| (t >= 0.0).then_some(t)).collect());
            return Ok(LaminationResult { region, sweeps: sweep, q_step });
        }
    }
    Err(SdqcError::NotConverged { iterations: max_iter })
}
