//! G(n, p) with exact rational p.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::graph::SimpleGraph;

/// Bernoulli(p) for rational p, exact: a uniform real in [0, 1) is drawn 64
/// bits at a time and compared with the binary expansion of p, extending
/// only on ties.
#[derive(Clone, Debug)]
pub struct ExactBernoulli {
    p: BigRational,
    first: u64,
    /// p * 2^64 - first, in [0, 1).
    rest: BigRational,
    always: Option<bool>,
}

impl ExactBernoulli {
    pub fn new(p: &BigRational) -> Self {
        if p <= &BigRational::zero() || p >= &BigRational::one() {
            return ExactBernoulli {
                p: p.clone(),
                first: 0,
                rest: BigRational::zero(),
                always: Some(p >= &BigRational::one()),
            };
        }
        let (first, rest) = next_digit(p);
        ExactBernoulli { p: p.clone(), first, rest, always: None }
    }

    pub fn p(&self) -> &BigRational {
        &self.p
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> bool {
        if let Some(a) = self.always {
            return a;
        }
        let w: u64 = rng.gen();
        if w != self.first {
            return w < self.first;
        }
        let mut frac = self.rest.clone();
        loop {
            if frac.is_zero() {
                // p is exhausted; the uniform draw is at least p.
                return false;
            }
            let (d, r) = next_digit(&frac);
            let w: u64 = rng.gen();
            if w != d {
                return w < d;
            }
            frac = r;
        }
    }
}

/// Next 64 binary digits of x in [0, 1) and the remaining fraction.
fn next_digit(x: &BigRational) -> (u64, BigRational) {
    let scaled = x * BigRational::from_integer(BigInt::one() << 64u32);
    let d = scaled.floor();
    let digit = d.to_integer().to_u64().expect("below 2^64");
    (digit, scaled - d)
}

/// Each of the C(n, 2) pairs independently with probability p, pairs drawn
/// in lexicographic order.
pub fn sample_gnp<R: Rng + ?Sized>(n: usize, p: &BigRational, rng: &mut R) -> SimpleGraph {
    let coin = ExactBernoulli::new(p);
    let mut g = SimpleGraph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if coin.sample(rng) {
                g.add_edge(u, v).expect("fresh pair");
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trivial_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample_gnp(20, &ratio(0, 1), &mut rng).m(), 0);
        assert_eq!(sample_gnp(20, &ratio(1, 1), &mut rng).m(), 190);
    }

    #[test]
    fn half_edge_counts() {
        // 4950 pairs at p = 1/2: mean 2475, sd ~35.2.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sd = (4950.0f64 * 0.25).sqrt();
        let mut total = 0.0;
        for _ in 0..50 {
            let m = sample_gnp(100, &ratio(1, 2), &mut rng).m() as f64;
            assert!((m - 2475.0).abs() < 4.0 * sd);
            total += m;
        }
        assert!((total / 50.0 - 2475.0).abs() < 4.0 * sd / 50f64.sqrt());
    }

    #[test]
    fn tie_extension_is_exact() {
        // p = 1/3 has an infinite expansion; p = 2^-70 needs a second word.
        let third = ExactBernoulli::new(&ratio(1, 3));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let hits = (0..30000).filter(|_| third.sample(&mut rng)).count();
        assert!((hits as f64 / 30000.0 - 1.0 / 3.0).abs() < 0.015);
        let tiny = ExactBernoulli::new(&crate::rational::pow2(-70));
        assert!((0..10000).all(|_| !tiny.sample(&mut rng)));
    }
}
