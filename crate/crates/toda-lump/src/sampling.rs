//! Seeded sampling of lattice sites and plane points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::SitePoint;

pub const DEFAULT_SEED: u64 = 20_240_917;

/// Box `[-half_width, half_width]²` times an inclusive site range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleBox {
    pub half_width: f64,
    pub n_lo: i64,
    pub n_hi: i64,
}

impl SampleBox {
    pub fn new(half_width: f64, n_lo: i64, n_hi: i64) -> Self {
        SampleBox { half_width, n_lo, n_hi }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sample_points(seed: u64, count: usize, b: SampleBox) -> Vec<SitePoint> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let n = r.random_range(b.n_lo..=b.n_hi);
            let x = r.random_range(-b.half_width..=b.half_width);
            let y = r.random_range(-b.half_width..=b.half_width);
            SitePoint::new(n, x, y)
        })
        .collect()
}
