//! Periodic divergence-free matrix fields on the unit torus, stored by Fourier
//! coefficients, and their fourth-order stress potentials.
//!
//! A field is `φ(x) = Σ_k ŵ(k) e^{i λ·x}` with `λ = 2π k`, `k ∈ Zⁿ`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Result, SdqcError};
use crate::tensor::{Matrix, SymMatrix};

/// Integer frequency; components past the dimension are zero.
pub type Freq = [i32; 3];

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn neg(k: &Freq) -> Freq {
    [-k[0], -k[1], -k[2]]
}

fn lambda(k: &Freq) -> [f64; 3] {
    [2.0 * PI * k[0] as f64, 2.0 * PI * k[1] as f64, 2.0 * PI * k[2] as f64]
}

fn is_zero(k: &Freq) -> bool {
    *k == [0, 0, 0]
}

/// Complex n×n coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat {
    pub n: usize,
    pub a: [[Complex64; 3]; 3],
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat { n, a: [[ZERO; 3]; 3] }
    }

    pub fn from_real(m: &Matrix) -> Self {
        let mut c = CMat::zeros(m.dim());
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                c.a[i][j] = Complex64::new(m.get(i, j), 0.0);
            }
        }
        c
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut c = *self;
        c.a.iter_mut().flatten().for_each(|v| *v *= s);
        c
    }

    pub fn add(&self, o: &CMat) -> Self {
        let mut c = *self;
        for i in 0..3 {
            for j in 0..3 {
                c.a[i][j] += o.a[i][j];
            }
        }
        c
    }

    pub fn sub(&self, o: &CMat) -> Self {
        self.add(&o.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn conj(&self) -> Self {
        let mut c = *self;
        c.a.iter_mut().flatten().for_each(|v| *v = v.conj());
        c
    }

    pub fn transpose(&self) -> Self {
        let mut c = *self;
        for i in 0..3 {
            for j in 0..3 {
                c.a[i][j] = self.a[j][i];
            }
        }
        c
    }

    pub fn norm_sq(&self) -> f64 {
        self.a.iter().flatten().map(|v| v.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.a[i][i]).sum()
    }

    /// `S λ` for a real vector `λ`.
    pub fn mul_real(&self, v: &[f64; 3]) -> [Complex64; 3] {
        let mut r = [ZERO; 3];
        for i in 0..self.n {
            r[i] = (0..self.n).map(|j| self.a[i][j] * v[j]).sum();
        }
        r
    }

    /// Row-major flattening of the leading n×n block.
    pub fn vec(&self) -> Vec<Complex64> {
        (0..self.n).flat_map(|i| (0..self.n).map(move |j| self.a[i][j])).collect()
    }
}

/// Finite Fourier series of a real matrix field.
pub trait PeriodicField: Sync {
    fn dim(&self) -> usize;
    fn modes(&self) -> &BTreeMap<Freq, CMat>;

    /// Largest |k_i| over the support.
    fn max_index(&self) -> i32 {
        self.modes().keys().flat_map(|k| k.iter().map(|v| v.abs())).max().unwrap_or(0)
    }

    /// Real value at `x` (the imaginary parts cancel in conjugate pairs).
    fn value_at(&self, x: &[f64]) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(n).expect("valid dimension");
        for (k, c) in self.modes() {
            let l = lambda(k);
            let phase: f64 = (0..n).map(|i| l[i] * x[i]).sum();
            let e = Complex64::from_polar(1.0, phase);
            for i in 0..n {
                for j in 0..n {
                    m.set(i, j, m.get(i, j) + (c.a[i][j] * e).re);
                }
            }
        }
        m
    }

    /// Values on the uniform periodic grid with `g` points per axis.
    fn sample(&self, g: usize) -> Vec<Matrix> {
        let n = self.dim();
        let total = g.pow(n as u32);
        (0..total)
            .into_par_iter()
            .map(|idx| {
                let mut x = [0.0; 3];
                let mut r = idx;
                for xi in x.iter_mut().take(n) {
                    *xi = (r % g) as f64 / g as f64;
                    r /= g;
                }
                self.value_at(&x[..n])
            })
            .collect()
    }

    /// Largest `|ŵ(-k) - conj ŵ(k)|`.
    fn reality_defect(&self) -> f64 {
        let modes = self.modes();
        modes
            .iter()
            .map(|(k, c)| match modes.get(&neg(k)) {
                Some(m) => m.sub(&c.conj()).norm(),
                None => c.norm(),
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|ŵ(k) λ| / (|ŵ(k)| |λ|)` over nonzero modes.
    fn divergence_defect(&self) -> f64 {
        self.modes()
            .iter()
            .filter(|(k, c)| !is_zero(k) && c.norm() > 0.0)
            .map(|(k, c)| {
                let l = lambda(k);
                let r = c.mul_real(&l);
                let rn = r.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                let ln = l.iter().map(|v| v * v).sum::<f64>().sqrt();
                rn / (c.norm() * ln)
            })
            .fold(0.0, f64::max)
    }
}

fn check_modes(n: usize, modes: &BTreeMap<Freq, CMat>) -> Result<()> {
    if n != 2 && n != 3 {
        return Err(SdqcError::InvalidDimension(n));
    }
    for (k, c) in modes {
        if c.n != n {
            return Err(SdqcError::InvalidField(format!("mode {k:?} has dimension {}", c.n)));
        }
        if k[n..].iter().any(|&v| v != 0) {
            return Err(SdqcError::InvalidField(format!("mode {k:?} exceeds dimension {n}")));
        }
        if c.a.iter().flatten().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(SdqcError::NonFinite(format!("mode {k:?}")));
        }
    }
    Ok(())
}

/// Symmetric, divergence-free field (`ŵ(λ) λ = 0`, `ŵ` symmetric, real-valued).
#[derive(Clone, Debug, PartialEq)]
pub struct FourierField {
    n: usize,
    modes: BTreeMap<Freq, CMat>,
}

impl PeriodicField for FourierField {
    fn dim(&self) -> usize {
        self.n
    }

    fn modes(&self) -> &BTreeMap<Freq, CMat> {
        &self.modes
    }
}

/// Projection of a complex matrix onto `{S symmetric : S λ = 0}`.
fn project_mode(c: &CMat, l: &[f64; 3]) -> CMat {
    let n = c.n;
    let sym = c.add(&c.transpose()).scale(Complex64::new(0.5, 0.0));
    let ln2: f64 = l.iter().map(|v| v * v).sum();
    let mut p = [[0.0; 3]; 3];
    for i in 0..n {
        for j in 0..n {
            p[i][j] = if i == j { 1.0 } else { 0.0 } - l[i] * l[j] / ln2;
        }
    }
    let mut out = CMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut s = ZERO;
            for a in 0..n {
                for b in 0..n {
                    s += sym.a[a][b] * (p[i][a] * p[b][j]);
                }
            }
            out.a[i][j] = s;
        }
    }
    // exact symmetry after rounding
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (out.a[i][j] + out.a[j][i]) * 0.5;
            out.a[i][j] = v;
            out.a[j][i] = v;
        }
    }
    out
}

/// Projects raw coefficients onto symmetric divergence-free, real fields. The
/// mean mode keeps the real symmetric part of its coefficient; a missing
/// partner `-k` counts as zero when pairing conjugates.
pub fn project_divfree(n: usize, raw: &BTreeMap<Freq, CMat>) -> Result<FourierField> {
    check_modes(n, raw)?;
    if raw.keys().all(is_zero) {
        return Err(SdqcError::InvalidField("support is empty or only the mean mode".into()));
    }
    let mut modes = BTreeMap::new();
    for (k, c) in raw {
        if is_zero(k) {
            let mut m = CMat::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    m.a[i][j] = Complex64::new(0.5 * (c.a[i][j].re + c.a[j][i].re), 0.0);
                }
            }
            modes.insert(*k, m);
            continue;
        }
        let nk = neg(k);
        if modes.contains_key(k) {
            continue;
        }
        let partner = raw.get(&nk).copied().unwrap_or(CMat::zeros(n));
        let paired = c.add(&partner.conj()).scale(Complex64::new(0.5, 0.0));
        let w = project_mode(&paired, &lambda(k));
        modes.insert(*k, w);
        modes.insert(nk, w.conj());
    }
    Ok(FourierField { n, modes })
}

impl FourierField {
    /// Random field with all nonzero modes `|k|_∞ <= kmax`, entries uniform in
    /// `[-1, 1]`, projected; zero mean.
    pub fn random(n: usize, kmax: i32, rng: &mut impl Rng) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(SdqcError::InvalidDimension(n));
        }
        let mut raw = BTreeMap::new();
        for k in frequency_box(n, kmax) {
            if is_zero(&k) || raw.contains_key(&neg(&k)) {
                continue;
            }
            let mut c = CMat::zeros(n);
            for i in 0..n {
                for j in i..n {
                    let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    c.a[i][j] = v;
                    c.a[j][i] = v;
                }
            }
            raw.insert(k, c.scale(Complex64::new(2.0, 0.0)));
        }
        project_divfree(n, &raw)
    }

    pub fn seeded(n: usize, kmax: i32, seed: u64) -> Result<Self> {
        Self::random(n, kmax, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// Sum of `ŵ(λ)` norms squared over nonzero modes.
    pub fn energy(&self) -> f64 {
        self.modes.iter().filter(|(k, _)| !is_zero(k)).map(|(_, c)| c.norm_sq()).sum()
    }

    /// Largest entry asymmetry over all modes.
    pub fn symmetry_defect(&self) -> f64 {
        self.modes.values().map(|c| c.sub(&c.transpose()).norm()).fold(0.0, f64::max)
    }

    pub fn mean(&self) -> CMat {
        self.modes.get(&[0, 0, 0]).copied().unwrap_or(CMat::zeros(self.n))
    }
}

/// All frequencies with `|k_i| <= kmax` for `i < n`.
pub fn frequency_box(n: usize, kmax: i32) -> Vec<Freq> {
    let r = -kmax..=kmax;
    let mut out = vec![];
    for a in r.clone() {
        for b in r.clone() {
            if n == 2 {
                out.push([a, b, 0]);
                continue;
            }
            for c in r.clone() {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// General (not necessarily symmetric) real field with row-wise zero divergence.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixField {
    n: usize,
    modes: BTreeMap<Freq, CMat>,
}

impl MatrixField {
    /// Checks reality and `ŵ(λ) λ = 0` to 1e-12 relative.
    pub fn new(n: usize, modes: BTreeMap<Freq, CMat>) -> Result<Self> {
        check_modes(n, &modes)?;
        let f = MatrixField { n, modes };
        let scale = f.modes.values().map(|c| c.norm()).fold(0.0, f64::max);
        if f.reality_defect() > 1e-12 * scale {
            return Err(SdqcError::InvalidField("coefficients are not conjugate-paired".into()));
        }
        if f.divergence_defect() > 1e-12 {
            return Err(SdqcError::InvalidField("field is not divergence-free".into()));
        }
        Ok(f)
    }

    /// `e1 ⊗ e2 sin(2π x1)` in two dimensions.
    pub fn shear_mode() -> Self {
        let mut c = CMat::zeros(2);
        c.a[0][1] = Complex64::new(0.0, -0.5);
        let mut modes = BTreeMap::new();
        modes.insert([1, 0, 0], c);
        modes.insert([-1, 0, 0], c.conj());
        MatrixField::new(2, modes).expect("shear mode is admissible")
    }
}

impl PeriodicField for MatrixField {
    fn dim(&self) -> usize {
        self.n
    }

    fn modes(&self) -> &BTreeMap<Freq, CMat> {
        &self.modes
    }
}

/// Fourth-order coefficient with index `((i*3 + j)*3 + h)*3 + k`.
pub type Coeff4 = [Complex64; 81];

#[inline]
pub fn idx4(i: usize, j: usize, h: usize, k: usize) -> usize {
    ((i * 3 + j) * 3 + h) * 3 + k
}

/// Stress potential: `σ = DivDiv a`.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    n: usize,
    modes: BTreeMap<Freq, Box<Coeff4>>,
}

impl Potential {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn modes(&self) -> &BTreeMap<Freq, Box<Coeff4>> {
        &self.modes
    }

    /// Largest violation of `a_ijhk = a_jikh = -a_ihjk`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for a in self.modes.values() {
            for i in 0..n {
                for j in 0..n {
                    for h in 0..n {
                        for k in 0..n {
                            let v = a[idx4(i, j, h, k)];
                            worst = worst
                                .max((v - a[idx4(j, i, k, h)]).norm())
                                .max((v + a[idx4(i, h, j, k)]).norm());
                        }
                    }
                }
            }
        }
        worst
    }

    /// Real value at `x`, as a flat array with [`idx4`] indexing.
    pub fn value_at(&self, x: &[f64]) -> [f64; 81] {
        let n = self.n;
        let mut out = [0.0; 81];
        for (k, a) in &self.modes {
            let l = lambda(k);
            let phase: f64 = (0..n).map(|i| l[i] * x[i]).sum();
            let e = Complex64::from_polar(1.0, phase);
            for (o, c) in out.iter_mut().zip(a.iter()) {
                *o += (c * e).re;
            }
        }
        out
    }
}

/// Potential with `divdiv(potential_of(w)) = w`:
/// `â_ijhk = -(ŵ_ij λhλk + ŵ_hk λiλj - ŵ_ih λjλk - ŵ_jk λiλh) / |λ|⁴`.
pub fn potential_of(w: &FourierField) -> Result<Potential> {
    let mean = w.mean().norm();
    if mean > 0.0 {
        return Err(SdqcError::NonzeroMean(mean));
    }
    let n = w.n;
    let mut modes = BTreeMap::new();
    for (k, c) in &w.modes {
        if is_zero(k) {
            continue;
        }
        let l = lambda(k);
        let l2: f64 = l.iter().map(|v| v * v).sum();
        let inv = -1.0 / (l2 * l2);
        let mut a: Box<Coeff4> = Box::new([ZERO; 81]);
        for i in 0..n {
            for j in 0..n {
                for h in 0..n {
                    for kk in 0..n {
                        a[idx4(i, j, h, kk)] = (c.a[i][j] * (l[h] * l[kk])
                            + c.a[h][kk] * (l[i] * l[j])
                            - c.a[i][h] * (l[j] * l[kk])
                            - c.a[j][kk] * (l[i] * l[h]))
                            * inv;
                    }
                }
            }
        }
        modes.insert(*k, a);
    }
    Ok(Potential { n, modes })
}

/// `(DivDiv a)_ij = Σ_hk ∂h ∂k a_ijhk`, i.e. `-Σ λhλk â_ijhk` per mode.
pub fn divdiv(a: &Potential) -> FourierField {
    let n = a.n;
    let mut modes = BTreeMap::new();
    for (k, c) in &a.modes {
        let l = lambda(k);
        let mut w = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut s = ZERO;
                for h in 0..n {
                    for kk in 0..n {
                        s += c[idx4(i, j, h, kk)] * (l[h] * l[kk]);
                    }
                }
                w.a[i][j] = -s;
            }
        }
        modes.insert(*k, w);
    }
    FourierField { n, modes }
}

/// Largest coefficient difference relative to the largest coefficient of `a`.
pub fn coefficient_distance(a: &FourierField, b: &FourierField) -> f64 {
    let scale = a.modes.values().map(|c| c.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let keys: std::collections::BTreeSet<_> = a.modes.keys().chain(b.modes.keys()).collect();
    keys.into_iter()
        .map(|k| {
            let x = a.modes.get(k).copied().unwrap_or(CMat::zeros(a.n));
            let y = b.modes.get(k).copied().unwrap_or(CMat::zeros(a.n));
            x.sub(&y).norm() / scale
        })
        .fold(0.0, f64::max)
}

/// Quadratic potential `a^M(x)_ijhk = (M_ij x_h x_k + M_hk x_i x_j - M_ih x_j x_k - M_kj x_h x_i) / (n(n-1))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticPotential {
    pub m: SymMatrix,
}

pub fn quadratic_potential(m: &SymMatrix) -> QuadraticPotential {
    QuadraticPotential { m: *m }
}

impl QuadraticPotential {
    fn c(&self) -> f64 {
        let n = self.m.dim() as f64;
        1.0 / (n * (n - 1.0))
    }

    pub fn value(&self, x: &[f64]) -> [f64; 81] {
        let n = self.m.dim();
        let m = |i, j| self.m.get(i, j);
        let mut out = [0.0; 81];
        for i in 0..n {
            for j in 0..n {
                for h in 0..n {
                    for k in 0..n {
                        out[idx4(i, j, h, k)] = self.c()
                            * (m(i, j) * x[h] * x[k] + m(h, k) * x[i] * x[j]
                                - m(i, h) * x[j] * x[k]
                                - m(k, j) * x[h] * x[i]);
                    }
                }
            }
        }
        out
    }

    /// `∂_l a_ijhk`, flat index `idx4(i,j,h,k) * 3 + l`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let n = self.m.dim();
        let m = |i, j| self.m.get(i, j);
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let mut out = vec![0.0; 243];
        for i in 0..n {
            for j in 0..n {
                for h in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            out[idx4(i, j, h, k) * 3 + l] = self.c()
                                * (m(i, j) * (d(l, h) * x[k] + x[h] * d(l, k))
                                    + m(h, k) * (d(l, i) * x[j] + x[i] * d(l, j))
                                    - m(i, h) * (d(l, j) * x[k] + x[j] * d(l, k))
                                    - m(k, j) * (d(l, h) * x[i] + x[h] * d(l, i)));
                        }
                    }
                }
            }
        }
        out
    }

    /// `∂_m ∂_l a_ijhk` (constant in x), flat index `(idx4 * 3 + l) * 3 + m`.
    pub fn hessian(&self) -> Vec<f64> {
        let n = self.m.dim();
        let mm = |i, j| self.m.get(i, j);
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let mut out = vec![0.0; 729];
        for i in 0..n {
            for j in 0..n {
                for h in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            for m in 0..n {
                                out[(idx4(i, j, h, k) * 3 + l) * 3 + m] = self.c()
                                    * (mm(i, j) * (d(l, h) * d(m, k) + d(m, h) * d(l, k))
                                        + mm(h, k) * (d(l, i) * d(m, j) + d(m, i) * d(l, j))
                                        - mm(i, h) * (d(l, j) * d(m, k) + d(m, j) * d(l, k))
                                        - mm(k, j) * (d(l, h) * d(m, i) + d(m, h) * d(l, i)));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_kernel_examples() {
        let e2e2 = CMat::from_real(&Matrix::outer(&[0.0, 1.0, 0.0], &[0.0, 1.0, 0.0]).unwrap());
        let e1e1 = CMat::from_real(&Matrix::outer(&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap());
        let mut raw = BTreeMap::new();
        raw.insert([1, 0, 0], e2e2);
        raw.insert([-1, 0, 0], e2e2);
        let f = project_divfree(3, &raw).unwrap();
        assert_eq!(f.modes()[&[1, 0, 0]], e2e2);
        let mut raw = BTreeMap::new();
        raw.insert([1, 0, 0], e1e1);
        let f = project_divfree(3, &raw).unwrap();
        assert_eq!(f.modes()[&[1, 0, 0]].norm(), 0.0);
        let mut raw = BTreeMap::new();
        raw.insert([0, 0, 0], e1e1);
        assert!(project_divfree(3, &raw).is_err());
    }
}
