//! Seeded sample points for the sampled checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::pl::{Affine, PlMap};
use crate::order::rational::{int, rat, Rational};

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// A rational in `[lo, hi]`; integers, halves and small denominators are over-represented
    /// because breakpoints tend to live there.
    pub fn rational(&mut self, lo: i64, hi: i64) -> Rational {
        let den: i64 = match self.rng.gen_range(0..10) {
            0 | 1 => 1,
            2 => 2,
            3 | 4 => self.rng.gen_range(3..13),
            _ => self.rng.gen_range(13..2000),
        };
        let n = self.rng.gen_range(lo * den..=hi * den);
        Rational::new(n.into(), den.into())
    }

    /// A rational strictly inside `(-1, 1)`.
    pub fn unit(&mut self) -> Rational {
        let den: i64 = self.rng.gen_range(2..5000);
        let n = self.rng.gen_range(1 - den..den);
        Rational::new(n.into(), den.into())
    }

    pub fn rationals(&mut self, count: usize, lo: i64, hi: i64) -> Vec<Rational> {
        (0..count).map(|_| self.rational(lo, hi)).collect()
    }

    pub fn pick(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    /// A continuous PL bijection of Q with at most `max_breaks` breakpoints in `[-20, 20]`
    /// and slopes in `[1/3, 3]`.
    pub fn pl(&mut self, max_breaks: usize) -> PlMap {
        let slope = |rng: &mut ChaCha8Rng| rat(rng.gen_range(1..4), rng.gen_range(1..4));
        let start = int(self.rng.gen_range(-20..0));
        let shift = rat(self.rng.gen_range(-6..7), 2);
        let mut pieces = vec![Affine::new(slope(&mut self.rng), shift)];
        let mut breaks = Vec::new();
        let mut b = start;
        for _ in 0..self.rng.gen_range(0..=max_breaks) {
            b += rat(self.rng.gen_range(1..12), 2);
            let y = pieces.last().expect("nonempty").apply(&b);
            let s = slope(&mut self.rng);
            let c = y - &s * &b;
            breaks.push(b.clone());
            pieces.push(Affine::new(s, c));
        }
        PlMap::new(breaks, pieces).expect("continuous and increasing")
    }
}

/// `count` seeded rationals in `[lo, hi]`.
pub fn sample_rationals(seed: u64, count: usize, lo: i64, hi: i64) -> Vec<Rational> {
    Sampler::new(seed).rationals(count, lo, hi)
}

/// Every `k/den` in `[lo, hi]`; a dense deterministic grid.
pub fn grid(lo: i64, hi: i64, den: i64) -> Vec<Rational> {
    (lo * den..=hi * den).map(|k| Rational::new(k.into(), den.into())).collect()
}
