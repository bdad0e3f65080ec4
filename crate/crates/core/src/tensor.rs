//! Small dense matrices (n = 2 or 3) and a closed-form symmetric eigen solver.

use std::fmt;
use std::str::FromStr;

use crate::error::{Result, SdqcError};

/// Largest asymmetry accepted by [`SymMatrix`] constructors.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// General square matrix, stored in a fixed 3x3 block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    a: [[f64; 3]; 3],
}

/// Real symmetric matrix with exactly symmetric storage.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymMatrix(Matrix);

fn check_dim(n: usize) -> Result<()> {
    if n == 2 || n == 3 {
        Ok(())
    } else {
        Err(SdqcError::InvalidDimension(n))
    }
}

impl Matrix {
    pub fn zeros(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Matrix { n, a: [[0.0; 3]; 3] })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        check_dim(n)?;
        let mut a = [[0.0; 3]; 3];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(SdqcError::NotSquare { row: i, len: row.len(), expected: n });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(SdqcError::NonFinite(format!("entry [{i}][{j}] = {v}")));
                }
                a[i][j] = v;
            }
        }
        Ok(Matrix { n, a })
    }

    /// Outer product `v ⊗ w`.
    pub fn outer(v: &[f64], w: &[f64]) -> Result<Self> {
        let n = v.len();
        check_dim(n)?;
        if w.len() != n {
            return Err(SdqcError::InvalidDimension(w.len()));
        }
        let mut a = [[0.0; 3]; 3];
        for i in 0..n {
            for j in 0..n {
                a[i][j] = v[i] * w[j];
            }
        }
        Ok(Matrix { n, a })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i][j] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.a[i][i]).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self.a[i][j] * self.a[i][j];
            }
        }
        s
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                t.a[i][j] = self.a[j][i];
            }
        }
        t
    }

    /// Symmetric part `(F + Fᵀ)/2`.
    pub fn sym_part(&self) -> SymMatrix {
        let mut s = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                s.a[i][j] = 0.5 * (self.a[i][j] + self.a[j][i]);
            }
        }
        SymMatrix(s)
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        let mut r = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                r.a[i][j] += o.a[i][j];
            }
        }
        r
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        self.add(&o.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Matrix {
        let mut r = *self;
        for row in r.a.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        r
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        let mut r = Matrix { n: self.n, a: [[0.0; 3]; 3] };
        for i in 0..self.n {
            for j in 0..self.n {
                r.a[i][j] = (0..self.n).map(|k| self.a[i][k] * o.a[k][j]).sum();
            }
        }
        r
    }

    pub fn mul_vec(&self, v: &[f64]) -> [f64; 3] {
        let mut r = [0.0; 3];
        for i in 0..self.n {
            r[i] = (0..self.n).map(|j| self.a[i][j] * v[j]).sum();
        }
        r
    }

    pub fn det(&self) -> f64 {
        let a = &self.a;
        match self.n {
            2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
            _ => {
                a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                    - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                    + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
            }
        }
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.a[i][..self.n].to_vec()).collect()
    }
}

impl SymMatrix {
    /// Builds a symmetric matrix; asymmetry above [`SYMMETRY_TOL`] (relative to
    /// the largest entry, floored at 1) is rejected, smaller gaps are averaged out.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = Matrix::from_rows(rows)?;
        let n = m.n;
        let big = m.a.iter().flatten().fold(1.0f64, |acc, v| acc.max(v.abs()));
        for i in 0..n {
            for j in (i + 1)..n {
                let gap = (m.a[i][j] - m.a[j][i]).abs();
                if gap > SYMMETRY_TOL * big {
                    return Err(SdqcError::NotSymmetric { i, j, gap });
                }
            }
        }
        Ok(m.sym_part())
    }

    pub fn diag(d: &[f64]) -> Result<Self> {
        let n = d.len();
        let mut m = Matrix::zeros(n)?;
        for (i, &v) in d.iter().enumerate() {
            if !v.is_finite() {
                return Err(SdqcError::NonFinite(format!("diagonal entry {i} = {v}")));
            }
            m.a[i][i] = v;
        }
        Ok(SymMatrix(m))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::diag(&vec![1.0; n])
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Matrix::zeros(n).map(SymMatrix)
    }

    /// `v ⊗ w + w ⊗ v` scaled by `1/2`.
    pub fn sym_outer(v: &[f64], w: &[f64]) -> Result<Self> {
        Ok(Matrix::outer(v, w)?.sym_part())
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.a[i][j]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.norm_sq()
    }

    pub fn det(&self) -> f64 {
        self.0.det()
    }

    pub fn add(&self, o: &SymMatrix) -> SymMatrix {
        SymMatrix(self.0.add(&o.0))
    }

    pub fn sub(&self, o: &SymMatrix) -> SymMatrix {
        SymMatrix(self.0.sub(&o.0))
    }

    pub fn scale(&self, s: f64) -> SymMatrix {
        SymMatrix(self.0.scale(s))
    }

    /// `self + t * dir`.
    pub fn axpy(&self, t: f64, dir: &SymMatrix) -> SymMatrix {
        self.add(&dir.scale(t))
    }

    pub fn mean(&self) -> f64 {
        self.trace() / self.dim() as f64
    }

    pub fn deviator(&self) -> SymMatrix {
        let p = self.mean();
        let mut d = *self;
        for i in 0..self.dim() {
            d.0.a[i][i] -= p;
        }
        d
    }

    /// `g · σ g`.
    pub fn quad(&self, g: &[f64]) -> f64 {
        let s = self.0.mul_vec(g);
        (0..self.dim()).map(|i| g[i] * s[i]).sum()
    }

    /// `Q σ Qᵀ` for an orthogonal (or arbitrary) `Q`.
    pub fn congruence(&self, q: &Matrix) -> SymMatrix {
        q.mul(&self.0).mul(&q.transpose()).sym_part()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.0.rows()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        match self.dim() {
            2 => {
                let a = &self.0.a;
                let m = 0.5 * (a[0][0] + a[1][1]);
                let r = (0.5 * (a[0][0] - a[1][1])).hypot(a[0][1]);
                vec![m - r, m + r]
            }
            _ => self.eigen3().values.to_vec(),
        }
    }

    /// Eigen-decomposition of a 3x3 matrix. For `n = 2` the matrix is embedded
    /// with a zero third row and column.
    pub fn eigen3(&self) -> SymEigen {
        eigen3(&self.0.a)
    }

    /// Ascending eigenvalues and unit eigenvectors (length `n` each) for n = 2 or 3.
    pub fn eigen(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        if self.dim() == 3 {
            let e = self.eigen3();
            return (e.values.to_vec(), e.vectors.iter().map(|v| v.to_vec()).collect());
        }
        let a = &self.0.a;
        let th = 0.5 * (2.0 * a[0][1]).atan2(a[0][0] - a[1][1]);
        let (c, s) = (th.cos(), th.sin());
        let l1 = c * c * a[0][0] + 2.0 * c * s * a[0][1] + s * s * a[1][1];
        let l2 = s * s * a[0][0] - 2.0 * c * s * a[0][1] + c * c * a[1][1];
        let (v1, v2) = (vec![c, s], vec![-s, c]);
        if l1 <= l2 {
            (vec![l1, l2], vec![v1, v2])
        } else {
            (vec![l2, l1], vec![v2, v1])
        }
    }
}

impl fmt::Display for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| r.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{}", rows.join(";"))
    }
}

/// Parses the row-major literal `"a,b,c;d,e,f;g,h,i"`.
impl FromStr for SymMatrix {
    type Err = SdqcError;

    fn from_str(s: &str) -> Result<Self> {
        let rows = s
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|v| {
                        v.trim()
                            .parse::<f64>()
                            .map_err(|e| SdqcError::Parse(format!("matrix entry {:?}: {e}", v.trim())))
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        SymMatrix::from_rows(&rows)
    }
}

/// Ascending eigenvalues with matching orthonormal eigenvectors (`vectors[k]`
/// belongs to `values[k]`).
#[derive(Clone, Copy, Debug)]
pub struct SymEigen {
    pub values: [f64; 3],
    pub vectors: [[f64; 3]; 3],
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize(v: [f64; 3]) -> Option<[f64; 3]> {
    let n = dot(&v, &v).sqrt();
    if n > 0.0 && n.is_finite() {
        Some([v[0] / n, v[1] / n, v[2] / n])
    } else {
        None
    }
}

/// Any unit vector orthogonal to the unit vector `v`.
fn orthogonal_to(v: &[f64; 3]) -> [f64; 3] {
    let k = (0..3).min_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs())).unwrap();
    let mut e = [0.0; 3];
    e[k] = 1.0;
    normalize(cross(v, &e)).unwrap()
}

/// Null vector of `a - λ I` via the largest cross product of its rows.
fn null_vector(a: &[[f64; 3]; 3], lambda: f64) -> Option<[f64; 3]> {
    let mut r = *a;
    for (i, row) in r.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    let c = [cross(&r[0], &r[1]), cross(&r[0], &r[2]), cross(&r[1], &r[2])];
    let best = c.iter().max_by(|x, y| dot(x, x).total_cmp(&dot(y, y))).unwrap();
    let scale = r.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if dot(best, best).sqrt() <= 1e-12 * scale * scale {
        return None;
    }
    normalize(*best)
}

/// Trigonometric roots of the characteristic cubic, eigenvectors from cross
/// products, then Jacobi sweeps on `Vᵀ A V` to clean up near-degenerate cases.
fn eigen3(a: &[[f64; 3]; 3]) -> SymEigen {
    let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    let mut vals;
    let mut vecs = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    if off == 0.0 {
        vals = [a[0][0], a[1][1], a[2][2]];
    } else {
        let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
        let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * off;
        let p = (p2 / 6.0).sqrt();
        let mut b = *a;
        for (i, row) in b.iter_mut().enumerate() {
            row[i] -= q;
            for v in row.iter_mut() {
                *v /= p;
            }
        }
        let detb = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
            - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
            + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
        let r = (0.5 * detb).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let hi = q + 2.0 * p * phi.cos();
        let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
        vals = [lo, 3.0 * q - hi - lo, hi];

        // Eigenvector of the most isolated eigenvalue first, the rest from the
        // orthogonal complement.
        let gap_lo = vals[1] - vals[0];
        let gap_hi = vals[2] - vals[1];
        let (iso, others) = if gap_lo >= gap_hi { (0, [1, 2]) } else { (2, [0, 1]) };
        let v_iso = null_vector(a, vals[iso]).unwrap_or(vecs[iso]);
        let v_mid = null_vector(a, vals[others[0]])
            .map(|v| {
                let d = dot(&v, &v_iso);
                [v[0] - d * v_iso[0], v[1] - d * v_iso[1], v[2] - d * v_iso[2]]
            })
            .and_then(normalize)
            .unwrap_or_else(|| orthogonal_to(&v_iso));
        let v_last = cross(&v_iso, &v_mid);
        vecs[iso] = v_iso;
        vecs[others[0]] = v_mid;
        vecs[others[1]] = v_last;
    }
    jacobi_polish(a, &mut vals, &mut vecs);
    sort_eigen(&mut vals, &mut vecs);
    SymEigen { values: vals, vectors: vecs }
}

fn jacobi_polish(a: &[[f64; 3]; 3], vals: &mut [f64; 3], vecs: &mut [[f64; 3]; 3]) {
    // d = Vᵀ A V with columns of V the current eigenvectors.
    let mut d = [[0.0; 3]; 3];
    for i in 0..3 {
        let av = [dot(&a[0], &vecs[i]), dot(&a[1], &vecs[i]), dot(&a[2], &vecs[i])];
        for j in 0..3 {
            d[j][i] = dot(&vecs[j], &av);
        }
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            let s = 0.5 * (d[i][j] + d[j][i]);
            d[i][j] = s;
            d[j][i] = s;
        }
    }
    let scale = d.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for _sweep in 0..12 {
        let off = d[0][1].abs() + d[0][2].abs() + d[1][2].abs();
        if off <= 1e-18 * scale || off == 0.0 {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if d[p][q] == 0.0 {
                continue;
            }
            let theta = (d[q][q] - d[p][p]) / (2.0 * d[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            // d <- Jᵀ d J
            for k in 0..3 {
                let dkp = d[k][p];
                let dkq = d[k][q];
                d[k][p] = c * dkp - s * dkq;
                d[k][q] = s * dkp + c * dkq;
            }
            for k in 0..3 {
                let dpk = d[p][k];
                let dqk = d[q][k];
                d[p][k] = c * dpk - s * dqk;
                d[q][k] = s * dpk + c * dqk;
            }
            let vp = vecs[p];
            let vq = vecs[q];
            for k in 0..3 {
                vecs[p][k] = c * vp[k] - s * vq[k];
                vecs[q][k] = s * vp[k] + c * vq[k];
            }
        }
    }
    for i in 0..3 {
        vals[i] = d[i][i];
    }
    // Re-orthonormalize (Gram-Schmidt) to absorb rounding from the rotations.
    vecs[0] = normalize(vecs[0]).unwrap_or([1.0, 0.0, 0.0]);
    let d01 = dot(&vecs[1], &vecs[0]);
    vecs[1] = normalize([
        vecs[1][0] - d01 * vecs[0][0],
        vecs[1][1] - d01 * vecs[0][1],
        vecs[1][2] - d01 * vecs[0][2],
    ])
    .unwrap_or_else(|| orthogonal_to(&vecs[0]));
    let c = cross(&vecs[0], &vecs[1]);
    vecs[2] = if dot(&c, &vecs[2]) < 0.0 { [-c[0], -c[1], -c[2]] } else { c };
}

fn sort_eigen(vals: &mut [f64; 3], vecs: &mut [[f64; 3]; 3]) {
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let v = *vals;
    let e = *vecs;
    for (k, &i) in idx.iter().enumerate() {
        vals[k] = v[i];
        vecs[k] = e[i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_roundtrip() {
        let s: SymMatrix = "1,0,0;0,0.25,0;0,0,0.25".parse().unwrap();
        assert_eq!(s, SymMatrix::diag(&[1.0, 0.25, 0.25]).unwrap());
        let back: SymMatrix = s.to_string().parse().unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn rejects_asymmetry_and_bad_shapes() {
        assert!(matches!(
            "1,2;0,1".parse::<SymMatrix>(),
            Err(SdqcError::NotSymmetric { .. })
        ));
        assert!(matches!("1,2,3;4,5".parse::<SymMatrix>(), Err(SdqcError::NotSquare { .. })));
        assert!(matches!("1".parse::<SymMatrix>(), Err(SdqcError::InvalidDimension(1))));
        assert!(matches!("1,x;0,1".parse::<SymMatrix>(), Err(SdqcError::Parse(_))));
        assert!(SymMatrix::diag(&[f64::NAN, 1.0]).is_err());
        // tiny asymmetry is absorbed and stored exactly symmetric
        let s: SymMatrix = "1,1e-12;0,1".parse().unwrap();
        assert_eq!(s.get(0, 1), s.get(1, 0));
    }

    #[test]
    fn eigen_of_degenerate_rotated_matrix() {
        let c = 0.6f64;
        let s = 0.8f64;
        let q = Matrix::from_rows(&[vec![c, -s, 0.0], vec![s, c, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let m = SymMatrix::diag(&[1.0, 0.25, 0.25]).unwrap().congruence(&q);
        let e = m.eigen3();
        assert!((e.values[0] - 0.25).abs() < 1e-14);
        assert!((e.values[1] - 0.25).abs() < 1e-14);
        assert!((e.values[2] - 1.0).abs() < 1e-14);
        for k in 0..3 {
            let mv = m.as_matrix().mul_vec(&e.vectors[k]);
            for i in 0..3 {
                assert!((mv[i] - e.values[k] * e.vectors[k][i]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn eigen_triple_root() {
        let e = SymMatrix::identity(3).unwrap().scale(2.0).eigen3();
        assert_eq!(e.values, [2.0, 2.0, 2.0]);
    }
}
