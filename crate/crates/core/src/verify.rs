//! Numerical checks of integral inequalities `f(⟨φ⟩) <= ⟨f(φ)⟩` over periodic
//! divergence-free fields, and the fixed test suites run by `sdqc verify`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, SdqcError};
use crate::fields::{
    coefficient_distance, divdiv, potential_of, quadratic_potential, FourierField, MatrixField,
    PeriodicField,
};
use crate::invariants::tartar_f;
use crate::tensor::{Matrix, SymMatrix};

/// Real quadratic form `vec(F)ᵀ C vec(F)` on row-major flattened n×n matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticForm {
    pub n: usize,
    pub c: Vec<f64>,
}

impl QuadraticForm {
    fn m(&self) -> usize {
        self.n * self.n
    }

    /// `Σ v̄ᵀ C v` for a complex vector.
    pub fn hermitian(&self, v: &[num_complex::Complex64]) -> f64 {
        let m = self.m();
        let mut s = 0.0;
        for a in 0..m {
            for b in 0..m {
                s += self.c[a * m + b] * (v[a].conj() * v[b]).re;
            }
        }
        s
    }

    pub fn tartar(n: usize) -> Self {
        let m = n * n;
        let mut c = vec![0.0; m * m];
        for a in 0..m {
            c[a * m + a] = (n - 1) as f64;
        }
        for i in 0..n {
            for j in 0..n {
                c[(i * n + i) * m + j * n + j] -= 1.0;
            }
        }
        QuadraticForm { n, c }
    }

    /// `det((F + Fᵀ)/2)` for n = 2.
    pub fn sym_det2() -> Self {
        let mut c = vec![0.0; 16];
        c[3] = 0.5;
        c[12] = 0.5;
        for a in [1, 2] {
            for b in [1, 2] {
                c[a * 4 + b] = -0.25;
            }
        }
        QuadraticForm { n: 2, c }
    }
}

/// Integrand under test. Only candidates exposing a quadratic form get the
/// Plancherel comparison.
pub trait Candidate: Sync {
    fn name(&self) -> String;
    fn eval(&self, m: &Matrix) -> f64;
    fn quadratic_form(&self, _n: usize) -> Option<QuadraticForm> {
        None
    }
}

/// `(n-1)|F|² - (Tr F)²`.
pub struct Tartar;

impl Candidate for Tartar {
    fn name(&self) -> String {
        "tartar".into()
    }
    fn eval(&self, m: &Matrix) -> f64 {
        tartar_f(m)
    }
    fn quadratic_form(&self, n: usize) -> Option<QuadraticForm> {
        Some(QuadraticForm::tartar(n))
    }
}

/// `det((F + Fᵀ)/2)`.
pub struct SymDet;

impl Candidate for SymDet {
    fn name(&self) -> String {
        "sym-det".into()
    }
    fn eval(&self, m: &Matrix) -> f64 {
        m.sym_part().det()
    }
    fn quadratic_form(&self, n: usize) -> Option<QuadraticForm> {
        (n == 2).then(QuadraticForm::sym_det2)
    }
}

/// `|F|²`.
pub struct NormSq;

impl Candidate for NormSq {
    fn name(&self) -> String {
        "norm-sq".into()
    }
    fn eval(&self, m: &Matrix) -> f64 {
        m.norm_sq()
    }
    fn quadratic_form(&self, n: usize) -> Option<QuadraticForm> {
        let m = n * n;
        let mut c = vec![0.0; m * m];
        (0..m).for_each(|a| c[a * m + a] = 1.0);
        Some(QuadraticForm { n, c })
    }
}

/// Arbitrary closure.
pub struct FnCandidate<F> {
    pub name: String,
    pub f: F,
}

impl<F: Fn(&Matrix) -> f64 + Sync> Candidate for FnCandidate<F> {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn eval(&self, m: &Matrix) -> f64 {
        (self.f)(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub violated: bool,
    /// `rhs - lhs` predicted from the coefficients, when a quadratic form is known.
    pub plancherel: Option<f64>,
}

impl InequalityReport {
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }

    /// `|rhs - lhs - plancherel|` relative to `max(1, |plancherel|)`.
    pub fn plancherel_error(&self) -> Option<f64> {
        self.plancherel.map(|e| (self.margin() - e).abs() / e.abs().max(1.0))
    }
}

pub fn test_inequality(
    f: &dyn Candidate,
    field: &dyn PeriodicField,
    mean: &Matrix,
    g: usize,
) -> Result<InequalityReport> {
    let n = field.dim();
    if mean.dim() != n {
        return Err(SdqcError::InvalidDimension(mean.dim()));
    }
    let required = 2 * field.max_index() as usize + 1;
    if g < required {
        return Err(SdqcError::GridTooCoarse { grid: g, required });
    }
    let samples = field.sample(g);
    let vals: Vec<f64> = samples.par_iter().map(|s| f.eval(&s.add(mean))).collect();
    let count = vals.len() as f64;
    let rhs = vals.iter().sum::<f64>() / count;
    let lhs = f.eval(mean);
    let mag = vals.iter().map(|v| v.abs()).sum::<f64>() / count;
    let scale = 1f64.max(lhs.abs()).max(mag);
    let plancherel = f.quadratic_form(n).map(|qf| {
        field
            .modes()
            .iter()
            .filter(|(k, _)| **k != [0, 0, 0])
            .map(|(_, c)| qf.hermitian(&c.vec()))
            .sum()
    });
    Ok(InequalityReport { lhs, rhs, violated: lhs > rhs + 1e-9 * scale, plancherel })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirectionCheck {
    pub holds: bool,
    /// `(λ, f(λA + (1-λ)B) - λ f(A) - (1-λ) f(B))` at the worst sample.
    pub witness: Option<(f64, f64)>,
}

/// Convexity of `f` along `[B, A]` at `λ_i = i / (samples + 1)`.
pub fn lambda_direction_check(
    f: &dyn Fn(&SymMatrix) -> f64,
    a: &SymMatrix,
    b: &SymMatrix,
    samples: usize,
) -> Result<DirectionCheck> {
    let d = a.sub(b);
    let n = d.dim() as i32;
    let det = d.det();
    if det.abs() > 1e-10 * d.norm().powi(n).max(f64::MIN_POSITIVE) {
        return Err(SdqcError::NotRankDeficient(det));
    }
    let (fa, fb) = (f(a), f(b));
    let scale = 1f64.max(fa.abs()).max(fb.abs());
    let mut worst: Option<(f64, f64)> = None;
    for i in 1..=samples {
        let l = i as f64 / (samples + 1) as f64;
        let gap = f(&b.axpy(l, &d)) - l * fa - (1.0 - l) * fb;
        if gap > 1e-12 * scale && worst.is_none_or(|(_, w)| gap > w) {
            worst = Some((l, gap));
        }
    }
    Ok(DirectionCheck { holds: worst.is_none(), witness: worst })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Tartar,
    DetCounterexample,
    Potentials,
    Cone,
}

impl std::str::FromStr for Suite {
    type Err = SdqcError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tartar" => Ok(Suite::Tartar),
            "det-counterexample" => Ok(Suite::DetCounterexample),
            "potentials" => Ok(Suite::Potentials),
            "cone" => Ok(Suite::Cone),
            _ => Err(SdqcError::Parse(format!("unknown suite {s:?}"))),
        }
    }
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Tartar => "tartar",
            Suite::DetCounterexample => "det-counterexample",
            Suite::Potentials => "potentials",
            Suite::Cone => "cone",
        }
    }

    pub fn expects_violation(&self) -> bool {
        matches!(self, Suite::DetCounterexample)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub candidate: String,
    pub trials: usize,
    pub violations: usize,
    /// Smallest slack over all trials; negative means a failed check.
    pub worst_margin: f64,
    pub plancherel_max_error: Option<f64>,
    pub expected_violation: bool,
    pub passed: bool,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
}

impl VerificationReport {
    fn finish(mut self) -> Self {
        self.passed = (self.violations > 0) == self.expected_violation;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn run_suite(suite: Suite, seed: u64, trials: usize) -> Result<VerificationReport> {
    match suite {
        Suite::Tartar => tartar_suite(seed, trials),
        Suite::DetCounterexample => det_suite(),
        Suite::Potentials => potentials_suite(seed, trials),
        Suite::Cone => cone_suite(seed, trials),
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn random_sym(n: usize, rng: &mut impl Rng, amp: f64) -> SymMatrix {
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-amp..amp);
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    SymMatrix::from_rows(&rows).expect("symmetric by construction")
}

fn unit_vector(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if r > 1e-3 && r <= 1.0 {
            return [v[0] / r, v[1] / r, v[2] / r];
        }
    }
}

/// Random fields in three dimensions, `|k|_∞ <= 2`, sampled on a 5³ grid.
fn tartar_suite(seed: u64, trials: usize) -> Result<VerificationReport> {
    let results: Vec<InequalityReport> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let field = FourierField::random(3, 2, &mut rng)?;
            let mean = random_sym(3, &mut rng, 1.0);
            test_inequality(&Tartar, &field, mean.as_matrix(), 5)
        })
        .collect::<Result<_>>()?;
    let violations = results.iter().filter(|r| r.violated).count();
    let worst_margin = results.iter().map(|r| r.margin()).fold(f64::INFINITY, f64::min);
    let perr = results.iter().filter_map(|r| r.plancherel_error()).fold(0.0, f64::max);
    Ok(VerificationReport {
        suite: Suite::Tartar.name().into(),
        candidate: Tartar.name(),
        trials,
        violations,
        worst_margin,
        plancherel_max_error: Some(perr),
        expected_violation: false,
        passed: false,
        details: BTreeMap::new(),
    }
    .finish())
}

fn det_suite() -> Result<VerificationReport> {
    let field = MatrixField::shear_mode();
    let mean = Matrix::zeros(2)?;
    let r = test_inequality(&SymDet, &field, &mean, 8)?;
    let mut details = BTreeMap::new();
    details.insert("lhs".into(), r.lhs);
    details.insert("rhs".into(), r.rhs);
    Ok(VerificationReport {
        suite: Suite::DetCounterexample.name().into(),
        candidate: SymDet.name(),
        trials: 1,
        violations: r.violated as usize,
        worst_margin: r.margin(),
        plancherel_max_error: r.plancherel_error(),
        expected_violation: true,
        passed: false,
        details,
    }
    .finish())
}

/// Potential roundtrip and symmetries on random fields, plus the quadratic
/// potential's second differences and growth bounds at random points.
fn potentials_suite(seed: u64, trials: usize) -> Result<VerificationReport> {
    let per_field: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let n = if t % 2 == 0 { 3 } else { 2 };
            let w = FourierField::random(n, 2, &mut rng)?;
            let a = potential_of(&w)?;
            Ok((coefficient_distance(&w, &divdiv(&a)), a.symmetry_defect()))
        })
        .collect::<Result<_>>()?;
    let roundtrip = per_field.iter().map(|r| r.0).fold(0.0, f64::max);
    let symmetry = per_field.iter().map(|r| r.1).fold(0.0, f64::max);

    let mut rng = trial_rng(seed, usize::MAX >> 1);
    let mut divdiv_err: f64 = 0.0;
    let mut slack = f64::INFINITY;
    let mut failures = 0;
    for i in 0..1000 {
        let n = if i % 2 == 0 { 3 } else { 2 };
        let m = random_sym(n, &mut rng, 2.0);
        let qp = quadratic_potential(&m);
        let x = random_point(n, 10.0, &mut rng);
        divdiv_err = divdiv_err.max(second_difference_error(&qp, &x));
        let s = potential_bound_slack(&qp, &x);
        slack = slack.min(s);
        failures += (s < 0.0) as usize;
    }
    let bad_roundtrip = per_field.iter().filter(|r| r.0 >= 1e-12 || r.1 >= 1e-12).count();
    failures += bad_roundtrip + (divdiv_err >= 1e-9) as usize;
    let mut details = BTreeMap::new();
    details.insert("roundtrip_max_error".into(), roundtrip);
    details.insert("symmetry_max_error".into(), symmetry);
    details.insert("divdiv_max_error".into(), divdiv_err);
    Ok(VerificationReport {
        suite: Suite::Potentials.name().into(),
        candidate: "stress-potential".into(),
        trials,
        violations: failures,
        worst_margin: slack,
        plancherel_max_error: None,
        expected_violation: false,
        passed: false,
        details,
    }
    .finish())
}

pub fn random_point(n: usize, radius: f64, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-radius..radius)).collect();
        if x.iter().map(|v| v * v).sum::<f64>() <= radius * radius {
            return x;
        }
    }
}

/// Largest `|Σ_hk Δh Δk a_ijhk - M_ij|` with unit central differences, which
/// are exact on quadratics.
pub fn second_difference_error(qp: &crate::fields::QuadraticPotential, x: &[f64]) -> f64 {
    use crate::fields::idx4;
    let n = x.len();
    let shifted = |h: usize, sh: f64, k: usize, sk: f64| {
        let mut y = x.to_vec();
        y[h] += sh;
        y[k] += sk;
        qp.value(&y)
    };
    let mut dd = [[0.0; 3]; 3];
    for h in 0..n {
        for k in 0..n {
            let pp = shifted(h, 1.0, k, 1.0);
            let pm = shifted(h, 1.0, k, -1.0);
            let mp = shifted(h, -1.0, k, 1.0);
            let mm = shifted(h, -1.0, k, -1.0);
            for i in 0..n {
                for j in 0..n {
                    let id = idx4(i, j, h, k);
                    dd[i][j] += (pp[id] - pm[id] - mp[id] + mm[id]) / 4.0;
                }
            }
        }
    }
    let mut err: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            err = err.max((dd[i][j] - qp.m.get(i, j)).abs());
        }
    }
    err
}

/// Smallest slack of `|a| <= 2|x|²|M|`, `|Da| <= 4|x||M|`, `|D²a| <= 4|M|`.
pub fn potential_bound_slack(qp: &crate::fields::QuadraticPotential, x: &[f64]) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let xm = norm(x);
    let mm = qp.m.norm();
    let tol = 1e-12 * (1.0 + xm * xm) * mm;
    let a = 2.0 * xm * xm * mm - norm(&qp.value(x)) + tol;
    let da = 4.0 * xm * mm - norm(&qp.gradient(x)) + tol;
    let d2 = 4.0 * mm - norm(&qp.hessian()) + tol;
    a.min(da).min(d2)
}

/// Characteristic cone in three dimensions: `{S : S w = 0}` has dimension 3 and
/// consists of singular matrices; `F = v⊗w + w⊗v - (v·w) w⊗w` solves `F w = v`.
fn cone_suite(seed: u64, trials: usize) -> Result<VerificationReport> {
    let rows: Vec<(f64, f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let w = unit_vector(&mut rng);
            let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let rank_err = (cone_dimension(&w) - 3.0).abs();
            let x = random_sym(3, &mut rng, 1.0);
            let s = project_onto_kernel(&x, &w);
            let det_rel = s.det().abs() / s.norm().powi(3).max(f64::MIN_POSITIVE);
            let vw: f64 = (0..3).map(|i| v[i] * w[i]).sum();
            let f = SymMatrix::sym_outer(&v, &w)
                .expect("dimension 3")
                .sub(&SymMatrix::sym_outer(&w, &w).expect("dimension 3").scale(0.5 * vw))
                .scale(2.0);
            let fw = f.as_matrix().mul_vec(&w);
            let surj = (0..3).map(|i| (fw[i] - v[i]).abs()).fold(0.0, f64::max);
            (rank_err, det_rel, surj)
        })
        .collect();
    let rank = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let det = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let surj = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let violations = rows.iter().filter(|r| r.0 > 1e-9 || r.1 > 1e-12 || r.2 > 1e-12).count();
    let mut details = BTreeMap::new();
    details.insert("dimension_max_error".into(), rank);
    details.insert("det_max_relative".into(), det);
    details.insert("surjectivity_max_error".into(), surj);
    Ok(VerificationReport {
        suite: Suite::Cone.name().into(),
        candidate: "characteristic-cone".into(),
        trials,
        violations,
        worst_margin: 1e-12 - det.max(surj),
        plancherel_max_error: None,
        expected_violation: false,
        passed: false,
        details,
    }
    .finish())
}

fn kernel_projector(w: &[f64; 3]) -> Matrix {
    let mut p = Matrix::zeros(3).expect("dimension 3");
    for i in 0..3 {
        for j in 0..3 {
            p.set(i, j, if i == j { 1.0 } else { 0.0 } - w[i] * w[j]);
        }
    }
    p
}

fn project_onto_kernel(x: &SymMatrix, w: &[f64; 3]) -> SymMatrix {
    x.congruence(&kernel_projector(w))
}

/// Trace of `S ↦ P S P` in an orthonormal basis of symmetric matrices, which is
/// the dimension of its range since the map is an orthogonal projection.
fn cone_dimension(w: &[f64; 3]) -> f64 {
    let p = kernel_projector(w);
    let mut tr = 0.0;
    for i in 0..3 {
        for j in i..3 {
            let e = if i == j {
                let mut d = [0.0; 3];
                d[i] = 1.0;
                SymMatrix::diag(&d).expect("dimension 3")
            } else {
                let mut a = [0.0; 3];
                let mut b = [0.0; 3];
                a[i] = 1.0;
                b[j] = 1.0;
                SymMatrix::sym_outer(&a, &b).expect("dimension 3").scale(std::f64::consts::SQRT_2)
            };
            let pe = e.congruence(&p);
            tr += (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).map(|(a, b)| pe.get(a, b) * e.get(a, b)).sum::<f64>();
        }
    }
    tr
}
