//! Continued fractions, the dyadic Liouville-type construction
//! x = sum 2^-U_t driven by a decreasing function phi, approximation checks
//! and the (v, e, n) schedule derived from the convergents p_t / q_t.
//!
//! Exponents are kept as big integers; rationals are only materialized while
//! their denominators stay below `MAX_BITS` bits. Every verdict is exact.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::rational::{parse_rational, pow2};

/// Largest binary exponent materialized as an explicit rational.
pub const MAX_BITS: u64 = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiophantineError {
    #[error("phi must be below 1 at q = 2^{0}")]
    PhiNotBelowOne(String),
    #[error("exponent gaps stop increasing at term {t}: U = {prev} then {next}")]
    NotFastEnough { t: usize, prev: String, next: String },
    #[error("term {t} has a denominator too large to materialize")]
    TooLarge { t: usize },
    #[error("term {t} is outside the computed range 1..={terms}")]
    OutOfRange { t: usize, terms: usize },
    #[error("no computed term gives precision 2^-{0}")]
    PrecisionUnavailable(u64),
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("the approximation inequality fails at term {t}")]
    InequalityFails { t: usize },
    #[error("alpha must lie strictly between 0 and 1")]
    AlphaRange,
    #[error("exponent d must be positive")]
    BadExponent,
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

fn small(u: &BigUint) -> Option<u64> {
    u.to_u64().filter(|&b| b <= MAX_BITS)
}

/// Integer functions g used as phi = 1/g and to size the schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GFunction {
    /// g(q) = 2^q
    TwoPow,
    /// g(q) = q^k
    Power(u32),
}

impl GFunction {
    pub fn eval(&self, q: &BigUint) -> Option<BigUint> {
        match self {
            GFunction::TwoPow => small(q).map(|b| BigUint::one() << b),
            GFunction::Power(k) => {
                if q.bits() * u64::from(*k) > MAX_BITS {
                    None
                } else {
                    Some(num_traits::pow(q.clone(), *k as usize))
                }
            }
        }
    }

    /// ceil(log2 g(2^u)).
    pub fn ceil_log2_at_pow2(&self, u: &BigUint) -> Option<BigUint> {
        match self {
            GFunction::TwoPow => small(u).map(|b| BigUint::one() << b),
            GFunction::Power(k) => Some(u * big(u64::from(*k))),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            GFunction::TwoPow => "2^q".into(),
            GFunction::Power(k) => format!("q^{k}"),
        }
    }

    pub fn parse(s: &str) -> Result<Self, DiophantineError> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "2^q" {
            return Ok(GFunction::TwoPow);
        }
        if let Some(k) = s.strip_prefix("q^") {
            if let Ok(k) = k.parse::<u32>() {
                return Ok(GFunction::Power(k));
            }
        }
        Err(DiophantineError::Parse(s))
    }
}

/// Decreasing approximation functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Phi {
    /// phi(q) = q^-d, d > 0 rational
    PowerNeg(BigRational),
    /// phi(q) = 1 / g(q)
    InverseG(GFunction),
}

impl Phi {
    /// Accepts `q^-D` (D rational), `2^-q` and `1/g` with g in {`2^q`, `q^K`}.
    pub fn parse(s: &str) -> Result<Self, DiophantineError> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "2^-q" {
            return Ok(Phi::InverseG(GFunction::TwoPow));
        }
        if let Some(d) = t.strip_prefix("q^-") {
            let d = parse_rational(d.trim_start_matches('(').trim_end_matches(')'))
                .map_err(|_| DiophantineError::Parse(s.into()))?;
            if !d.is_positive() {
                return Err(DiophantineError::BadExponent);
            }
            return Ok(Phi::PowerNeg(d));
        }
        if let Some(g) = t.strip_prefix("1/") {
            return Ok(Phi::InverseG(GFunction::parse(g)?));
        }
        Err(DiophantineError::Parse(s.into()))
    }

    pub fn describe(&self) -> String {
        match self {
            Phi::PowerNeg(d) if d.is_integer() => format!("q^-{}", d.numer()),
            Phi::PowerNeg(d) => format!("q^-({}/{})", d.numer(), d.denom()),
            Phi::InverseG(GFunction::TwoPow) => "2^-q".into(),
            Phi::InverseG(g) => format!("1/{}", g.describe()),
        }
    }

    /// ceil(-log2 phi(2^u)).
    pub fn ceil_neg_log2_at_pow2(&self, u: &BigUint) -> Option<BigUint> {
        match self {
            Phi::PowerNeg(d) => {
                let num = u * d.numer().to_biguint()?;
                let den = d.denom().to_biguint()?;
                Some(num.div_ceil(&den))
            }
            Phi::InverseG(g) => g.ceil_log2_at_pow2(u),
        }
    }

    /// Whether 0 <= x <= phi(q), decided exactly; `None` when the numbers
    /// involved are too large.
    pub fn bound_holds(&self, q: &BigUint, x: &BigRational) -> Option<bool> {
        if x.is_negative() {
            return Some(true);
        }
        if x.is_zero() {
            return Some(true);
        }
        let a = x.numer().to_biguint()?;
        let b = x.denom().to_biguint()?;
        match self {
            Phi::PowerNeg(d) => {
                // x <= q^(-s/r)  <=>  a^r q^s <= b^r
                let s = d.numer().to_usize()?;
                let r = d.denom().to_usize()?;
                if (q.bits() * s as u64).max(a.bits().max(b.bits()) * r as u64) > MAX_BITS {
                    return None;
                }
                let lhs = num_traits::pow(a, r) * num_traits::pow(q.clone(), s);
                Some(lhs <= num_traits::pow(b, r))
            }
            Phi::InverseG(g) => {
                if let GFunction::TwoPow = g {
                    // a * 2^q <= b fails once q reaches the bit length of b.
                    if q >= &big(b.bits()) {
                        return Some(false);
                    }
                }
                let gq = g.eval(q)?;
                Some(a * gq <= b)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LiouvilleOptions {
    /// Raise exponents when phi alone would not make the gaps strictly
    /// increase. Equivalent to replacing phi by a smaller function.
    pub sharpen: bool,
}

/// x = sum_t 2^-U_t, known through its first exponents plus one look-ahead
/// exponent bounding the tail.
#[derive(Clone, Debug)]
pub struct LiouvilleNumber {
    pub phi: Phi,
    pub exponents: Vec<BigUint>,
    /// U_{terms+1}, when it could be computed.
    pub next_exponent: Option<BigUint>,
    pub sharpened: bool,
}

pub fn construct_liouville(phi: Phi, terms: usize, opts: LiouvilleOptions) -> Result<LiouvilleNumber, DiophantineError> {
    let mut exps = vec![BigUint::one()];
    let mut sharpened = false;
    let mut next_exponent = None;
    for t in 1..=terms {
        let u = exps[t - 1].clone();
        let next = match phi.ceil_neg_log2_at_pow2(&u) {
            Some(l) if l.is_zero() => return Err(DiophantineError::PhiNotBelowOne(u.to_string())),
            Some(l) => l + 1u32,
            None if t == terms => break,
            None => return Err(DiophantineError::TooLarge { t: t + 1 }),
        };
        let mut next = next;
        let min_next = if t >= 2 {
            let gap = &u - &exps[t - 2];
            &u + gap + 1u32
        } else {
            &u + 1u32
        };
        if next < min_next {
            if !opts.sharpen {
                return Err(DiophantineError::NotFastEnough {
                    t: t + 1,
                    prev: u.to_string(),
                    next: next.to_string(),
                });
            }
            next = min_next;
            sharpened = true;
        }
        if t == terms {
            next_exponent = Some(next);
        } else {
            exps.push(next);
        }
    }
    Ok(LiouvilleNumber {
        phi,
        exponents: exps,
        next_exponent,
        sharpened,
    })
}

impl LiouvilleNumber {
    pub fn terms(&self) -> usize {
        self.exponents.len()
    }

    /// U_t for 1 <= t <= terms + 1.
    pub fn exponent(&self, t: usize) -> Option<&BigUint> {
        if t == 0 {
            None
        } else if t <= self.terms() {
            Some(&self.exponents[t - 1])
        } else if t == self.terms() + 1 {
            self.next_exponent.as_ref()
        } else {
            None
        }
    }

    fn check_t(&self, t: usize) -> Result<(), DiophantineError> {
        if t == 0 || t > self.terms() {
            Err(DiophantineError::OutOfRange { t, terms: self.terms() })
        } else {
            Ok(())
        }
    }

    /// (p_t, q_t) with q_t = 2^U_t and p_t = sum_{i<=t} 2^(U_t - U_i).
    pub fn convergent(&self, t: usize) -> Result<(BigUint, BigUint), DiophantineError> {
        self.check_t(t)?;
        let ut = small(&self.exponents[t - 1]).ok_or(DiophantineError::TooLarge { t })?;
        let mut p = BigUint::zero();
        for u in &self.exponents[..t] {
            let ui = u.to_u64().expect("smaller than U_t");
            p.set_bit(ut - ui, true);
        }
        Ok((p, BigUint::one() << ut))
    }

    pub fn partial_sum(&self, t: usize) -> Result<BigRational, DiophantineError> {
        let (p, q) = self.convergent(t)?;
        Ok(BigRational::new(p.into(), q.into()))
    }

    /// Exponent k with x - S_t <= 2^-k, namely U_{t+1} - 1.
    pub fn tail_exponent(&self, t: usize) -> Option<BigUint> {
        self.exponent(t + 1).map(|u| u - 1u32)
    }

    /// An exact interval [lo, hi] containing x, from the last materializable
    /// partial sum.
    pub fn interval(&self) -> Result<(BigRational, BigRational), DiophantineError> {
        let t = (1..=self.terms())
            .rev()
            .find(|&t| small(&self.exponents[t - 1]).is_some())
            .ok_or(DiophantineError::TooLarge { t: 1 })?;
        let lo = self.partial_sum(t)?;
        let k = self.tail_exponent(t).ok_or(DiophantineError::TooLarge { t: t + 1 })?;
        let k = k.to_u64().unwrap_or(MAX_BITS).min(MAX_BITS);
        let hi = &lo + pow2(-(k as i64));
        Ok((lo, hi))
    }

    /// Partial sum within 2^-bits of x.
    pub fn value_at_precision(&self, bits: u64) -> Result<BigRational, DiophantineError> {
        for t in 1..=self.terms() {
            match self.tail_exponent(t) {
                Some(k) if k >= big(bits) => return self.partial_sum(t),
                _ => {}
            }
        }
        Err(DiophantineError::PrecisionUnavailable(bits))
    }

    /// Gap sequence U_{t+1} - U_t strictly increasing over all known terms.
    pub fn gaps_strictly_increase(&self) -> bool {
        let all: Vec<&BigUint> = self.exponents.iter().chain(self.next_exponent.as_ref()).collect();
        let gaps: Vec<BigUint> = all.windows(2).map(|w| w[1] - w[0]).collect();
        all.windows(2).all(|w| w[0] < w[1]) && gaps.windows(2).all(|w| w[0] < w[1])
    }
}

/// Exact check of 0 < x - p_t/q_t <= phi(q_t).
///
/// The difference is the tail sum_{i>t} 2^-U_i, which is positive and at
/// most 2^-(U_{t+1} - 1) because exponents strictly increase; the bound is
/// then compared with phi(q_t) through ceil(-log2 phi(q_t)).
pub fn verify_approximation(x: &LiouvilleNumber, t: usize) -> Result<bool, DiophantineError> {
    x.check_t(t)?;
    let k = x.tail_exponent(t).ok_or(DiophantineError::TooLarge { t: t + 1 })?;
    let l = x
        .phi
        .ceil_neg_log2_at_pow2(&x.exponents[t - 1])
        .ok_or(DiophantineError::TooLarge { t })?;
    let increasing = x.exponents.iter().chain(x.next_exponent.as_ref()).collect::<Vec<_>>().windows(2).all(|w| w[0] < w[1]);
    Ok(increasing && k >= l)
}

/// Same check for an arbitrary numerator over q_t. `None` when the exact
/// comparison is out of reach.
pub fn verify_candidate(x: &LiouvilleNumber, t: usize, p: &BigUint) -> Result<Option<bool>, DiophantineError> {
    let (pt, qt) = x.convergent(t)?;
    if p == &pt {
        return verify_approximation(x, t).map(Some);
    }
    if p > &pt {
        // The tail is below 1/q_t, so x < p/q_t.
        return Ok(Some(false));
    }
    let lower = BigRational::new(BigInt::from(&pt - p), BigInt::from(qt.clone()));
    if x.phi.bound_holds(&qt, &lower) == Some(false) {
        return Ok(Some(false));
    }
    let k = x.tail_exponent(t).ok_or(DiophantineError::TooLarge { t: t + 1 })?;
    let k = k.to_u64().unwrap_or(MAX_BITS).min(MAX_BITS);
    let upper = lower + pow2(-(k as i64));
    Ok(match x.phi.bound_holds(&qt, &upper) {
        Some(true) => Some(true),
        _ => None,
    })
}

/// Partial quotients of a rational, [a0; a1, a2, ...].
pub fn continued_fraction(x: &BigRational) -> Vec<BigInt> {
    let mut out = Vec::new();
    let (mut a, mut b) = (x.numer().clone(), x.denom().clone());
    while !b.is_zero() {
        let (q, r) = a.div_mod_floor(&b);
        out.push(q);
        a = b;
        b = r;
    }
    out
}

/// The first `count` convergents of x, starting with the one from a0.
pub fn convergents(x: &BigRational, count: usize) -> Vec<BigRational> {
    convergent_pairs(&continued_fraction(x))
        .into_iter()
        .take(count)
        .map(|(p, q)| BigRational::new(p, q))
        .collect()
}

fn convergent_pairs(cf: &[BigInt]) -> Vec<(BigInt, BigInt)> {
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::zero(), BigInt::one());
    let mut out = Vec::new();
    for a in cf {
        let p = a * &p0 + &p1;
        let q = a * &q0 + &q1;
        p1 = std::mem::replace(&mut p0, p.clone());
        q1 = std::mem::replace(&mut q0, q.clone());
        out.push((p, q));
    }
    out
}

/// floor(((sqrt 5) - 1)/2 * 2^bits) / 2^bits.
pub fn golden_surrogate(bits: u64) -> BigRational {
    let scale = BigUint::one() << bits;
    let five = big(5) * &scale * &scale;
    let root = five.sqrt();
    let num = (root - &scale) >> 1u32;
    BigRational::new(num.into(), scale.into())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessCandidate {
    pub p: String,
    pub q: String,
    /// |surrogate - p/q| as an exact fraction.
    pub residual: String,
    pub convergent: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WitnessSearch {
    pub hits: Vec<WitnessCandidate>,
    /// Candidates whose verdict depends on digits the surrogate lacks.
    pub undecided: Vec<WitnessCandidate>,
    pub misses: usize,
    /// Set when the intermediate-fraction scan stopped at its cap.
    pub truncated: bool,
}

/// Cap on intermediate fractions examined between two convergents.
pub const SEMICONVERGENT_CAP: u64 = 1_000;

/// All p/q with q <= q_max among the convergents and intermediate fractions
/// of the interval midpoint such that |alpha - p/q| <= q^-d for every alpha
/// in [lo, hi].
pub fn irrationality_witness_search(
    lo: &BigRational,
    hi: &BigRational,
    d: &BigRational,
    q_max: &BigUint,
) -> Result<WitnessSearch, DiophantineError> {
    if !d.is_positive() {
        return Err(DiophantineError::BadExponent);
    }
    let zero = BigRational::zero();
    let one = BigRational::one();
    if lo <= &zero || hi >= &one || lo > hi {
        return Err(DiophantineError::AlphaRange);
    }
    let phi = Phi::PowerNeg(d.clone());
    let mid = (lo + hi) / BigRational::from_integer(2.into());
    let cf = continued_fraction(&mid);
    let pairs = convergent_pairs(&cf);
    let q_max = BigInt::from(q_max.clone());
    let mut out = WitnessSearch::default();
    let classify = |p: &BigInt, q: &BigInt, convergent: bool, out: &mut WitnessSearch| {
        let c = BigRational::new(p.clone(), q.clone());
        let near = (&mid - &c).abs();
        let (low, high) = if &c >= lo && &c <= hi {
            (zero.clone(), (hi - &c).max(&c - lo))
        } else {
            let a = (lo - &c).abs();
            let b = (hi - &c).abs();
            (a.clone().min(b.clone()), a.max(b))
        };
        let qu = q.to_biguint().expect("positive denominator");
        let cand = WitnessCandidate {
            p: p.to_string(),
            q: q.to_string(),
            residual: format!("{}/{}", near.numer(), near.denom()),
            convergent,
        };
        match (phi.bound_holds(&qu, &high), phi.bound_holds(&qu, &low)) {
            (Some(true), _) => out.hits.push(cand),
            (_, Some(false)) => out.misses += 1,
            _ => out.undecided.push(cand),
        }
    };
    for k in 0..pairs.len() {
        let (p, q) = &pairs[k];
        if q > &q_max {
            break;
        }
        // Intermediate fractions between convergent k-1 and k+1.
        if k + 1 < cf.len() {
            let (pm, qm) = if k == 0 { (BigInt::one(), BigInt::zero()) } else { pairs[k - 1].clone() };
            let a_next = &cf[k + 1];
            let mut j = BigInt::one();
            let mut seen = 0u64;
            while &j < a_next {
                let qj = &qm + &j * q;
                if qj > q_max || legendre_excludes(&qj, d) {
                    break;
                }
                if seen == SEMICONVERGENT_CAP {
                    out.truncated = true;
                    break;
                }
                classify(&(&pm + &j * p), &qj, false, &mut out);
                j += 1;
                seen += 1;
            }
        }
        classify(p, q, true, &mut out);
    }
    Ok(out)
}

/// True when q^-d < 1/(2 q^2). Any p/q that close to alpha is a convergent
/// (Legendre), so intermediate fractions with this denominator cannot hit.
fn legendre_excludes(q: &BigInt, d: &BigRational) -> bool {
    let (a, b) = match (d.numer().to_u64(), d.denom().to_u64()) {
        (Some(a), Some(b)) => (a, b),
        _ => return false,
    };
    if a <= 2 * b {
        return false;
    }
    let e = a - 2 * b;
    if q.bits().saturating_mul(e) > MAX_BITS || b > MAX_BITS {
        return q.bits() > b;
    }
    num_traits::pow(q.clone(), e as usize) > (BigInt::one() << b)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OddVPolicy {
    /// Keep odd v_t and mark them.
    #[default]
    Flag,
    Skip,
    /// Replace (p, q) by (2p, 2q), giving up coprimality.
    Double,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScheduleEntry {
    pub t: usize,
    pub v: String,
    pub e: String,
    pub n: String,
    pub odd_v: bool,
    pub doubled: bool,
    pub coprime: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Schedule {
    pub entries: Vec<ScheduleEntry>,
    /// Whether q/g(q) strictly decreases for q in 1..=G_RATIO_RANGE.
    pub g_ratio_decreasing: bool,
}

pub const G_RATIO_RANGE: u64 = 64;

/// (v_t, e_t, n_t) = (p_t, q_t, g(p_t)), after checking
/// 0 < x - p_t/q_t <= 1/g(q_t) exactly for every t.
pub fn schedule_subsequence(x: &LiouvilleNumber, g: &GFunction, terms: usize, policy: OddVPolicy) -> Result<Schedule, DiophantineError> {
    let check = Phi::InverseG(g.clone());
    let mut entries = Vec::new();
    let mut last_n: Option<BigUint> = None;
    for t in 1..=terms {
        x.check_t(t)?;
        let k = x.tail_exponent(t).ok_or(DiophantineError::TooLarge { t: t + 1 })?;
        let l = check.ceil_neg_log2_at_pow2(&x.exponents[t - 1]).ok_or(DiophantineError::TooLarge { t })?;
        if k < l {
            return Err(DiophantineError::InequalityFails { t });
        }
        let (p, q) = x.convergent(t)?;
        let odd = p.is_odd();
        let (v, e, doubled) = match (odd, policy) {
            (true, OddVPolicy::Skip) => continue,
            (true, OddVPolicy::Double) => (&p << 1u32, &q << 1u32, true),
            _ => (p, q, false),
        };
        let n = g.eval(&v).ok_or(DiophantineError::TooLarge { t })?;
        if let Some(prev) = &last_n {
            if &n <= prev {
                return Err(DiophantineError::InequalityFails { t });
            }
        }
        last_n = Some(n.clone());
        entries.push(ScheduleEntry {
            t,
            coprime: v.gcd(&e).is_one(),
            v: v.to_string(),
            e: e.to_string(),
            n: n.to_string(),
            odd_v: v.is_odd(),
            doubled,
        });
    }
    let ratio = |q: u64| BigRational::new(BigInt::from(q), BigInt::from(g.eval(&big(q)).expect("small argument")));
    let g_ratio_decreasing = (1..G_RATIO_RANGE).all(|q| ratio(q + 1) < ratio(q));
    Ok(Schedule { entries, g_ratio_decreasing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn us(x: &LiouvilleNumber) -> Vec<String> {
        x.exponents.iter().map(|u| u.to_string()).collect()
    }

    #[test]
    fn exponent_sequences() {
        let x = construct_liouville(Phi::parse("q^-10").unwrap(), 5, Default::default()).unwrap();
        assert_eq!(us(&x), ["1", "11", "111", "1111", "11111"]);
        assert_eq!(x.next_exponent, Some(big(111111)));
        let y = construct_liouville(Phi::parse("2^-q").unwrap(), 4, Default::default()).unwrap();
        assert_eq!(us(&y)[..3], ["1", "3", "9"]);
        assert_eq!(us(&y)[3], "513");
        assert_eq!(y.partial_sum(2).unwrap(), ratio(5, 8));
        assert_eq!(y.next_exponent, Some((BigUint::one() << 513u32) + 1u32));
        assert!(x.gaps_strictly_increase() && y.gaps_strictly_increase());
        let z = construct_liouville(Phi::parse("2^-q").unwrap(), 1, Default::default()).unwrap();
        assert_eq!(z.partial_sum(1).unwrap(), ratio(1, 2));
    }

    #[test]
    fn every_term_verifies() {
        for (phi, terms) in [("q^-10", 5), ("2^-q", 4), ("q^-3/2", 6), ("1/q^4", 6)] {
            let x = construct_liouville(Phi::parse(phi).unwrap(), terms, LiouvilleOptions { sharpen: true }).unwrap();
            for t in 1..=terms {
                assert!(verify_approximation(&x, t).unwrap(), "{phi} t={t}");
            }
            assert!(verify_approximation(&x, terms + 1).is_err());
            assert!(verify_approximation(&x, 0).is_err());
        }
    }

    #[test]
    fn dyadic_interval_check() {
        // 0 < x - 5/8 <= 2^-8 with x bracketed by the t = 4 partial sum.
        let y = construct_liouville(Phi::parse("2^-q").unwrap(), 4, Default::default()).unwrap();
        let s4 = y.partial_sum(4).unwrap();
        let diff = &s4 - ratio(5, 8);
        assert!(diff.is_positive());
        let (lo, hi) = y.interval().unwrap();
        assert_eq!(lo, s4);
        assert!(&hi - ratio(5, 8) <= pow2(-8));
    }

    #[test]
    fn perturbed_numerator_fails() {
        let x = construct_liouville(Phi::parse("q^-10").unwrap(), 4, Default::default()).unwrap();
        for t in 1..=3 {
            let (p, _) = x.convergent(t).unwrap();
            assert_eq!(verify_candidate(&x, t, &(&p + 1u32)).unwrap(), Some(false));
            assert_eq!(verify_candidate(&x, t, &(&p - 1u32)).unwrap(), Some(false));
            assert_eq!(verify_candidate(&x, t, &p).unwrap(), Some(true));
        }
    }

    #[test]
    fn slow_phi_rejected_or_sharpened() {
        let phi = Phi::parse("q^-1").unwrap();
        assert!(matches!(construct_liouville(phi.clone(), 4, Default::default()), Err(DiophantineError::NotFastEnough { .. })));
        let x = construct_liouville(phi, 4, LiouvilleOptions { sharpen: true }).unwrap();
        assert!(x.sharpened && x.gaps_strictly_increase());
    }

    #[test]
    fn golden_convergents() {
        let g = golden_surrogate(64);
        let c = convergents(&g, 12);
        let expect = [(0, 1), (1, 1), (1, 2), (2, 3), (3, 5), (5, 8), (8, 13), (13, 21)];
        for (i, &(p, q)) in expect.iter().enumerate() {
            assert_eq!(c[i], ratio(p, q));
        }
        let c = convergents(&ratio(5, 8), 10);
        assert_eq!(c.last(), Some(&ratio(5, 8)));
    }

    #[test]
    fn convergent_bounds() {
        let x = golden_surrogate(128) * ratio(7, 9);
        let cs = convergents(&x, 1000);
        for w in cs.windows(2) {
            let (c, next) = (&w[0], &w[1]);
            assert!(c.numer().gcd(c.denom()).is_one());
            let bound = BigRational::new(BigInt::one(), c.denom() * next.denom());
            if next == &x {
                assert_eq!((&x - c).abs(), bound);
            } else {
                assert!((&x - c).abs() < bound);
            }
            assert!(next.denom() > c.denom() || c.denom().is_one());
            assert!((&x - next).abs() < (&x - c).abs());
        }
    }

    #[test]
    fn witness_search_examples() {
        let g = golden_surrogate(128);
        let eps = pow2(-128);
        let r = irrationality_witness_search(&g, &(&g + &eps), &ratio(5, 2), &big(1000)).unwrap();
        assert!(!r.hits.is_empty());
        assert!(r.hits.iter().all(|h| h.q.parse::<u64>().unwrap() <= 5));
        assert!(r.undecided.is_empty());

        let r = irrationality_witness_search(&g, &(&g + &eps), &ratio(1, 1), &big(1_000_000)).unwrap();
        let convs: Vec<_> = r.hits.iter().filter(|h| h.convergent).collect();
        assert!(convs.len() >= 25);

        let x = construct_liouville(Phi::parse("q^-10").unwrap(), 4, Default::default()).unwrap();
        let (lo, hi) = x.interval().unwrap();
        let q_max = BigUint::one() << 1111u32;
        let r = irrationality_witness_search(&lo, &hi, &ratio(9, 1), &q_max).unwrap();
        for t in 1..=4 {
            let (p, q) = x.convergent(t).unwrap();
            assert!(r.hits.iter().any(|h| h.p == p.to_string() && h.q == q.to_string()), "t={t}");
        }
    }

    #[test]
    fn schedule_from_two_pow() {
        let x = construct_liouville(Phi::parse("1/2^q").unwrap(), 3, Default::default()).unwrap();
        let s = schedule_subsequence(&x, &GFunction::TwoPow, 3, OddVPolicy::Flag).unwrap();
        assert_eq!(s.entries.len(), 3);
        let ns: Vec<BigUint> = s.entries.iter().map(|e| e.n.parse().unwrap()).collect();
        assert!(ns.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(ns[0], big(2));
        assert!(s.entries.iter().all(|e| e.coprime && e.odd_v));
        // |v - alpha e| <= e / g(e), i.e. x - v/e <= 1/g(e).
        for e in &s.entries {
            let v: BigUint = e.v.parse().unwrap();
            assert_eq!(verify_candidate(&x, e.t, &v).unwrap(), Some(true));
        }
        let skipped = schedule_subsequence(&x, &GFunction::TwoPow, 3, OddVPolicy::Skip).unwrap();
        assert!(skipped.entries.is_empty());
        let doubled = schedule_subsequence(&x, &GFunction::TwoPow, 3, OddVPolicy::Double).unwrap();
        assert!(doubled.entries.iter().all(|e| e.doubled && !e.coprime && !e.odd_v));
        let y = construct_liouville(Phi::parse("q^-10").unwrap(), 3, Default::default()).unwrap();
        let mismatch = schedule_subsequence(&y, &GFunction::TwoPow, 3, OddVPolicy::Flag);
        assert_eq!(mismatch, Err(DiophantineError::InequalityFails { t: 2 }));
    }

    #[test]
    fn phi_parsing() {
        assert_eq!(Phi::parse("q^-10").unwrap().describe(), "q^-10");
        assert_eq!(Phi::parse("2^-q").unwrap().describe(), "2^-q");
        assert_eq!(Phi::parse("1/q^3").unwrap().describe(), "1/q^3");
        assert_eq!(Phi::parse("q^-5/2").unwrap().describe(), "q^-(5/2)");
        assert!(Phi::parse("q^-0").is_err());
        assert!(Phi::parse("sin q").is_err());
    }
}
