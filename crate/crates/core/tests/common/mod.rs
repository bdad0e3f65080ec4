#![allow(dead_code)]

pub mod props;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdqc_core::hull::hsdqc;
use sdqc_core::{Arc, PQPoint, PlanarSet};

fn point(rng: &mut impl Rng) -> PQPoint {
    PQPoint::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.0..1.5)).unwrap()
}

/// One to three random primitives (points, segments, upper half-circles).
pub fn random_set(rng: &mut impl Rng) -> PlanarSet {
    let mut set = PlanarSet::default();
    for _ in 0..rng.gen_range(1..=3) {
        match rng.gen_range(0..3) {
            0 => set.points.push(point(rng)),
            1 => set.segments.push((point(rng), point(rng))),
            _ => set.arcs.push(Arc::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.2..1.0)).unwrap()),
        }
    }
    set
}

/// Random sets whose hull on `n` nodes is connected, from a seeded stream.
pub fn connected_sets(seed: u64, count: usize, n: usize) -> Vec<PlanarSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![];
    while out.len() < count {
        let s = random_set(&mut rng);
        if hsdqc(&s, n, 1e-9).map(|h| h.connected).unwrap_or(false) {
            out.push(s);
        }
    }
    out
}
