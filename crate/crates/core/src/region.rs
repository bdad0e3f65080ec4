//! Vertically downward-closed regions stored as an upper envelope on a uniform p-grid.

use crate::error::{Result, SdqcError};

/// Uniform grid over `[pmin, pmax]`. A zero-width interval collapses to one node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub pmin: f64,
    pub pmax: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(pmin: f64, pmax: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(SdqcError::GridTooSmall(n));
        }
        if !(pmin.is_finite() && pmax.is_finite()) || pmax < pmin {
            return Err(SdqcError::DomainError(format!("grid interval [{pmin}, {pmax}]")));
        }
        let n = if pmax == pmin { 1 } else { n };
        Ok(Grid { pmin, pmax, n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Node spacing (zero for a single node).
    pub fn step(&self) -> f64 {
        if self.n <= 1 {
            0.0
        } else {
            (self.pmax - self.pmin) / (self.n - 1) as f64
        }
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == 0 || self.n <= 1 {
            self.pmin
        } else if i == self.n - 1 {
            self.pmax
        } else {
            self.pmin + (self.pmax - self.pmin) * (i as f64 / (self.n - 1) as f64)
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Index of the node nearest to `p` (clamped to the grid).
    pub fn nearest(&self, p: f64) -> usize {
        if self.n <= 1 {
            return 0;
        }
        let x = (p - self.pmin) / self.step();
        (x.round().max(0.0) as usize).min(self.n - 1)
    }

    /// Indices of nodes inside `[lo, hi]`.
    pub fn range(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        if self.n <= 1 {
            return if lo <= self.pmin && self.pmin <= hi { 0..1 } else { 0..0 };
        }
        if hi < self.pmin || lo > self.pmax || lo > hi {
            return 0..0;
        }
        let h = self.step();
        let last = self.n - 1;
        let guess = |x: f64| (((x - self.pmin) / h).round().max(0.0) as usize).min(last);
        // start from rounded guesses, then settle on exact node comparisons
        let mut a = guess(lo);
        while a > 0 && self.node(a - 1) >= lo {
            a -= 1;
        }
        while a <= last && self.node(a) < lo {
            a += 1;
        }
        let mut b = guess(hi);
        while b < last && self.node(b + 1) <= hi {
            b += 1;
        }
        while b > 0 && self.node(b) > hi {
            b -= 1;
        }
        if a > b || self.node(b) > hi {
            0..0
        } else {
            a..b + 1
        }
    }
}

/// `{(p, q): p a grid node with psi defined, 0 <= q <= psi(p)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub grid: Grid,
    pub psi: Vec<Option<f64>>,
}

impl Region {
    pub fn new(grid: Grid, psi: Vec<Option<f64>>) -> Self {
        assert_eq!(grid.len(), psi.len(), "psi must have one entry per node");
        Region { grid, psi }
    }

    pub fn empty(grid: Grid) -> Self {
        Region { psi: vec![None; grid.len()], grid }
    }

    pub fn step(&self) -> f64 {
        self.grid.step()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.psi.iter().enumerate().filter_map(|(i, v)| v.map(|q| (self.grid.node(i), q)))
    }

    pub fn defined_count(&self) -> usize {
        self.psi.iter().filter(|v| v.is_some()).count()
    }

    pub fn q_max(&self) -> f64 {
        self.nodes().map(|(_, q)| q).fold(0.0, f64::max)
    }

    /// Smallest and largest p with psi defined.
    pub fn p_extent(&self) -> Option<(f64, f64)> {
        let first = self.psi.iter().position(|v| v.is_some())?;
        let last = self.psi.iter().rposition(|v| v.is_some())?;
        Some((self.grid.node(first), self.grid.node(last)))
    }

    /// True if some undefined node sits between two defined ones.
    pub fn has_gap(&self) -> bool {
        let (Some(a), Some(b)) = (
            self.psi.iter().position(|v| v.is_some()),
            self.psi.iter().rposition(|v| v.is_some()),
        ) else {
            return false;
        };
        self.psi[a..=b].iter().any(|v| v.is_none())
    }

    /// Node-wise membership with an absolute tolerance on q.
    pub fn contains_at(&self, i: usize, q: f64, tol: f64) -> bool {
        matches!(self.psi[i], Some(top) if q >= -tol && q <= top + tol)
    }

    /// Union of column segments of a region sharing this grid.
    pub fn max_with(&self, other: &Region) -> Region {
        assert_eq!(self.grid, other.grid);
        let psi = self
            .psi
            .iter()
            .zip(&other.psi)
            .map(|(a, b)| match (a, b) {
                (Some(x), Some(y)) => Some(x.max(*y)),
                (x, None) => *x,
                (None, y) => *y,
            })
            .collect();
        Region::new(self.grid, psi)
    }

    /// Largest amount by which `self` sticks out of `other` at shared nodes
    /// (`INFINITY` if a defined node of `self` is undefined in `other`).
    pub fn excess_over(&self, other: &Region) -> f64 {
        assert_eq!(self.grid, other.grid);
        let mut worst: f64 = 0.0;
        for (a, b) in self.psi.iter().zip(&other.psi) {
            match (a, b) {
                (Some(x), Some(y)) => worst = worst.max(x - y),
                (Some(_), None) => return f64::INFINITY,
                _ => {}
            }
        }
        worst
    }

    /// Largest |psi_a - psi_b| over nodes where both are defined; `INFINITY` if
    /// the defined sets differ.
    pub fn max_column_deviation(&self, other: &Region) -> f64 {
        assert_eq!(self.grid, other.grid);
        let mut worst: f64 = 0.0;
        for (a, b) in self.psi.iter().zip(&other.psi) {
            match (a, b) {
                (Some(x), Some(y)) => worst = worst.max((x - y).abs()),
                (None, None) => {}
                _ => return f64::INFINITY,
            }
        }
        worst
    }

    /// Distance from `(p, q)` to the union of the column segments.
    pub fn distance_to(&self, p: f64, q: f64) -> f64 {
        let n = self.grid.len();
        let start = self.grid.nearest(p);
        let mut best = f64::INFINITY;
        let dist = |j: usize| -> Option<f64> {
            self.psi[j].map(|top| {
                let dp = p - self.grid.node(j);
                let dq = if q > top { q - top } else if q < 0.0 { -q } else { 0.0 };
                dp.hypot(dq)
            })
        };
        // walk outward from the nearest node; stop once |dp| alone exceeds best
        for j in (0..=start).rev() {
            if (p - self.grid.node(j)).abs() >= best {
                break;
            }
            if let Some(d) = dist(j) {
                best = best.min(d);
            }
        }
        for j in (start + 1)..n {
            if (self.grid.node(j) - p).abs() >= best {
                break;
            }
            if let Some(d) = dist(j) {
                best = best.min(d);
            }
        }
        best
    }

    /// Directed Hausdorff distance `sup_{x in self} d(x, other)`. Distance to a
    /// downward-closed union grows with q, so column tops are enough.
    pub fn directed_hausdorff(&self, other: &Region) -> f64 {
        self.nodes().map(|(p, q)| other.distance_to(p, q)).fold(0.0, f64::max)
    }

    pub fn hausdorff(&self, other: &Region) -> f64 {
        self.directed_hausdorff(other).max(other.directed_hausdorff(self))
    }

    /// Upper envelope of the planar convex hull of the columns.
    pub fn convex_hull(&self) -> Region {
        let pts: Vec<(f64, f64)> = self.nodes().collect();
        if pts.is_empty() {
            return self.clone();
        }
        // monotone chain, upper part; columns share p so keep the top of each
        let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
        for &pt in &pts {
            while hull.len() >= 2 {
                let (ax, ay) = hull[hull.len() - 2];
                let (bx, by) = hull[hull.len() - 1];
                let cross = (bx - ax) * (pt.1 - ay) - (by - ay) * (pt.0 - ax);
                if cross >= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(pt);
        }
        let (lo, hi) = (pts[0].0, pts[pts.len() - 1].0);
        let mut psi = vec![None; self.grid.len()];
        let mut k = 0;
        for (i, slot) in psi.iter_mut().enumerate() {
            let p = self.grid.node(i);
            if p < lo || p > hi {
                continue;
            }
            while k + 1 < hull.len() && hull[k + 1].0 < p {
                k += 1;
            }
            let v = if hull.len() == 1 || p <= hull[0].0 {
                hull[0].1
            } else if k + 1 >= hull.len() {
                hull[hull.len() - 1].1
            } else {
                let (ax, ay) = hull[k];
                let (bx, by) = hull[k + 1];
                ay + (by - ay) * (p - ax) / (bx - ax)
            };
            *slot = Some(match self.psi[i] {
                Some(own) => v.max(own),
                None => v,
            });
        }
        Region::new(self.grid, psi)
    }

    /// CSV with header `p,psi`, 17 significant digits, empty field when undefined.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("p,psi\n");
        for (i, v) in self.psi.iter().enumerate() {
            let p = self.grid.node(i);
            match v {
                Some(q) => s.push_str(&format!("{p:.16e},{q:.16e}\n")),
                None => s.push_str(&format!("{p:.16e},\n")),
            }
        }
        s
    }

    /// Samples a function on this region's grid (nodes where `f` is `None` stay undefined).
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Option<f64>) -> Region {
        Region::new(grid, grid.nodes().into_iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_range_and_nearest() {
        let g = Grid::new(0.0, 1.0, 11).unwrap();
        assert_eq!(g.range(0.25, 0.55), 3..6);
        assert_eq!(g.range(0.5, 0.5), 5..6);
        assert_eq!(g.range(0.31, 0.39), 0..0);
        assert_eq!(g.range(-5.0, 5.0), 0..11);
        assert_eq!(g.nearest(0.34), 3);
        assert_eq!(g.nearest(-1.0), 0);
        assert_eq!(g.node(10), 1.0);
        let single = Grid::new(2.0, 2.0, 512).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single.step(), 0.0);
        assert!(Grid::new(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn hull_of_two_columns_is_a_rectangle() {
        let g = Grid::new(-0.5, 0.5, 5).unwrap();
        let r = Region::new(g, vec![Some(1.0), None, None, None, Some(1.0)]);
        let c = r.convex_hull();
        assert_eq!(c.psi, vec![Some(1.0); 5]);
        assert!(r.has_gap());
        assert!(!c.has_gap());
    }

    #[test]
    fn hull_of_triangle_columns() {
        let g = Grid::new(0.0, 1.0, 5).unwrap();
        let r = Region::new(g, vec![Some(0.0), None, None, None, Some(0.8)]);
        let c = r.convex_hull();
        for (i, v) in c.psi.iter().enumerate() {
            assert!((v.unwrap() - 0.2 * i as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn hausdorff_between_shifted_columns() {
        let g = Grid::new(0.0, 1.0, 3).unwrap();
        let a = Region::new(g, vec![Some(1.0), Some(1.0), Some(1.0)]);
        let b = Region::new(g, vec![Some(1.0), Some(0.7), Some(1.0)]);
        assert!((a.hausdorff(&b) - 0.3).abs() < 1e-15);
        assert_eq!(b.directed_hausdorff(&a), 0.0);
        let c = Region::new(g, vec![Some(1.0), None, None]);
        assert!((a.directed_hausdorff(&c) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn csv_format() {
        let g = Grid::new(0.0, 1.0, 2).unwrap();
        let r = Region::new(g, vec![Some(0.1), None]);
        assert_eq!(r.to_csv(), "p,psi\n0.0000000000000000e0,1.0000000000000001e-1\n1.0000000000000000e0,\n");
    }
}
