//! Property checks driven by a seed; shared by the proptest suite and the
//! acceptance harness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdqc_core::curves::{gamma, gamma_minus, gamma_plus};
use sdqc_core::hull::{hsdqc, HullModel};
use sdqc_core::{Direction, PQPoint, PlanarSet};

use super::random_set;

const TOL: f64 = 1e-9;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sample_p(m: &HullModel, rng: &mut impl Rng) -> f64 {
    if m.pmax > m.pmin {
        rng.gen_range(m.pmin..=m.pmax)
    } else {
        m.pmin
    }
}

/// `H ⊆ H'` implies the hull of `H` lies under the hull of `H'`.
pub fn monotonicity(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let a = random_set(&mut r);
    let u = a.union(&random_set(&mut r));
    let ma = HullModel::new(&a, TOL).unwrap();
    let mu = HullModel::new(&u, TOL).unwrap();
    let tol = 1e-7 * mu.scale;
    for _ in 0..40 {
        let p = sample_p(&ma, &mut r);
        match (ma.top(p), mu.top(p)) {
            (Some(x), Some(y)) if x > y + tol => return Err(format!("p={p}: {x} > {y}")),
            (Some(x), None) => return Err(format!("p={p}: {x} vs undefined")),
            _ => {}
        }
    }
    Ok(())
}

/// The hull of sampled hull points reproduces the hull.
pub fn idempotence(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let a = random_set(&mut r);
    let h = hsdqc(&a, 48, TOL).unwrap();
    let pts: Vec<(f64, f64)> = h.region.nodes().collect();
    let b = PlanarSet::from_points(&pts).unwrap();
    let ma = HullModel::new(&a, TOL).unwrap();
    let mb = HullModel::new(&b, TOL).unwrap();
    let tol = 1e-6 * ma.scale;
    for &(p, q) in &pts {
        match mb.top(p) {
            Some(v) if v >= q - tol => {}
            v => return Err(format!("node p={p}: {v:?} below {q}")),
        }
    }
    for _ in 0..40 {
        let p = sample_p(&mb, &mut r);
        if let Some(v) = mb.top(p) {
            match ma.top(p) {
                Some(w) if v <= w + tol => {}
                w => return Err(format!("p={p}: rehull {v} above {w:?}")),
            }
        }
    }
    Ok(())
}

/// Hull of `(αp + β, αq)`-image equals the image of the hull.
pub fn equivariance(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let a = random_set(&mut r);
    let alpha = r.gen_range(0.25..4.0);
    let beta = r.gen_range(-2.0..2.0);
    let b = a.affine_image(alpha, beta);
    let ma = HullModel::new(&a, TOL).unwrap();
    let mb = HullModel::new(&b, TOL).unwrap();
    let tol = 1e-7 * mb.scale;
    for _ in 0..40 {
        let p = sample_p(&ma, &mut r);
        let (x, y) = (ma.top(p), mb.top(alpha * p + beta));
        match (x, y) {
            (Some(x), Some(y)) if (alpha * x - y).abs() <= tol => {}
            // definedness may flip within the tolerance band at gap edges
            (Some(x), None) | (None, Some(x)) if x <= 1e-4 * ma.scale.max(mb.scale) => {}
            (None, None) => {}
            _ => return Err(format!("alpha={alpha} beta={beta} p={p}: {x:?} vs {y:?}")),
        }
    }
    Ok(())
}

/// Along any rank-two curve, an arc whose endpoints are in the hull stays in it.
pub fn rank_two_convexity(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let a = random_set(&mut r);
    let m = HullModel::new(&a, TOL).unwrap();
    let tol = 1e-7 * m.scale;
    for _ in 0..8 {
        let p = sample_p(&m, &mut r);
        let Some(top) = m.top(p) else { continue };
        let y = PQPoint { p, q: top * r.gen_range(0.05..1.0) };
        let e = Direction::from_angle(r.gen_range(0.0..std::f64::consts::TAU));
        let Ok(c) = gamma(&y, &e) else { continue };
        let (mut t1, mut t2) = (-r.gen_range(0.0..0.6), r.gen_range(0.0..0.6));
        let mut ok = false;
        for _ in 0..12 {
            let (in1, in2) = (!m.is_separable(&c.point(t1)).separable, !m.is_separable(&c.point(t2)).separable);
            if in1 && in2 {
                ok = true;
                break;
            }
            if !in1 {
                t1 *= 0.5;
            }
            if !in2 {
                t2 *= 0.5;
            }
        }
        if !ok {
            continue;
        }
        for k in 1..16 {
            let t = t1 + (t2 - t1) * k as f64 / 16.0;
            let s = m.is_separable(&c.point(t));
            if s.separable && s.margin > tol {
                return Err(format!("base {y:?} dir {e:?}: t={t} separable by {}", s.margin));
            }
        }
    }
    Ok(())
}

/// The four directions where the reflected-line and hyperbola families meet.
pub fn junction_directions() -> [Direction; 4] {
    let (a, b) = (2.0 / 7f64.sqrt(), 3f64.sqrt() / 7f64.sqrt());
    [
        Direction { e1: a, e2: b },
        Direction { e1: a, e2: -b },
        Direction { e1: -a, e2: b },
        Direction { e1: -a, e2: -b },
    ]
}

/// Both constructions agree at the junction directions, and `gamma` is
/// continuous across them. The hyperbola vertex height grows like the square
/// root of the angle offset, so the jump is bounded by `C √δ`.
pub fn gamma_continuity(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let y = PQPoint { p: r.gen_range(-2.0..2.0), q: r.gen_range(0.05..2.0) };
    for e in junction_directions() {
        let plus = gamma_plus(&y, &e).map_err(|x| x.to_string())?;
        let minus = gamma_minus(&y, &e).map_err(|x| x.to_string())?;
        let theta = e.e2.atan2(e.e1);
        const DELTA: f64 = 1e-10;
        let near = [-DELTA, DELTA].map(|d| gamma(&y, &Direction::from_angle(theta + d)).unwrap());
        for k in 0..=20 {
            let t = -1.0 + 0.1 * k as f64;
            let (u, v) = (plus.point(t), minus.point(t));
            let d = (u.p - v.p).hypot(u.q - v.q);
            if d > 1e-9 {
                return Err(format!("y={y:?} e={e:?} t={t}: families differ by {d}"));
            }
            for c in &near {
                let w = c.point(t);
                let d = (u.p - w.p).hypot(u.q - w.q);
                if d > 10.0 * DELTA.sqrt() * (1.0 + y.q) {
                    return Err(format!("y={y:?} e={e:?} t={t}: jump {d} across the junction"));
                }
            }
        }
    }
    Ok(())
}

pub type Property = fn(u64) -> Result<(), String>;

pub const ALL: [(&str, Property); 5] = [
    ("monotonicity", monotonicity),
    ("idempotence", idempotence),
    ("equivariance", equivariance),
    ("rank-two convexity", rank_two_convexity),
    ("gamma continuity", gamma_continuity),
];
