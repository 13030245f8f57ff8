//! Edge probabilities n^-alpha for exact rational stand-ins of alpha.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::diophantine::{construct_liouville, golden_surrogate, DiophantineError, LiouvilleOptions, Phi};
use crate::rational::{format_rational, is_strictly_between_zero_and_one, parse_rational, pow2};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlphaError {
    #[error("alpha must lie strictly between 0 and 1")]
    Range,
    #[error("unknown alpha {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Diophantine(#[from] DiophantineError),
    #[error("could not certify n^-alpha to 2^-{0}")]
    Precision(u64),
    #[error("n must be at least 2")]
    SmallN,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlphaSpec {
    /// An exact rational.
    Rational(BigRational),
    /// sum 2^-U_t for the given phi, truncated to the first `terms` terms
    /// when evaluated.
    Liouville { phi: Phi, terms: usize },
    /// `golden`: (sqrt 5 - 1)/2.
    Preset(String),
}

pub const PRESETS: [&str; 3] = ["golden", "liouville-q10", "liouville-2q"];

impl AlphaSpec {
    /// `golden`, `liouville-q10`, `liouville-2q`, `liouville:PHI[:TERMS]`,
    /// or any rational accepted by `parse_rational`.
    pub fn parse(s: &str) -> Result<Self, AlphaError> {
        let t = s.trim();
        if PRESETS.contains(&t) {
            return Ok(AlphaSpec::Preset(t.to_string()));
        }
        if let Some(rest) = t.strip_prefix("liouville:") {
            let (phi, terms) = match rest.rsplit_once(':') {
                Some((a, b)) if b.parse::<usize>().is_ok() => (a, b.parse().unwrap()),
                _ => (rest, 4),
            };
            return Ok(AlphaSpec::Liouville { phi: Phi::parse(phi)?, terms });
        }
        let x = parse_rational(t).map_err(|_| AlphaError::Unknown(s.to_string()))?;
        if !is_strictly_between_zero_and_one(&x) {
            return Err(AlphaError::Range);
        }
        Ok(AlphaSpec::Rational(x))
    }

    pub fn describe(&self) -> String {
        match self {
            AlphaSpec::Rational(x) => format_rational(x),
            AlphaSpec::Liouville { phi, terms } => format!("liouville:{}:{terms}", phi.describe()),
            AlphaSpec::Preset(name) => name.clone(),
        }
    }

    /// A rational within 2^-bits of alpha, and whether it is alpha itself.
    pub fn value_at_precision(&self, bits: u64) -> Result<(BigRational, bool), AlphaError> {
        let v = match self {
            AlphaSpec::Rational(x) => return Ok((x.clone(), true)),
            AlphaSpec::Liouville { phi, terms } => liouville_value(phi, *terms, bits)?,
            AlphaSpec::Preset(name) => match name.as_str() {
                "golden" => golden_surrogate(bits + 1),
                "liouville-q10" => liouville_value(&Phi::parse("q^-10")?, 5, bits)?,
                "liouville-2q" => liouville_value(&Phi::parse("2^-q")?, 4, bits)?,
                _ => return Err(AlphaError::Unknown(name.clone())),
            },
        };
        Ok((v, false))
    }
}

fn liouville_value(phi: &Phi, terms: usize, bits: u64) -> Result<BigRational, AlphaError> {
    let x = construct_liouville(phi.clone(), terms.max(1), LiouvilleOptions::default())?;
    // The truncated sum is the value; beyond the stored terms the tail is
    // below 2^-bits or the request is refused.
    match x.value_at_precision(bits) {
        Ok(v) => Ok(v),
        Err(_) => Ok(x.partial_sum(x.terms())?),
    }
}

/// ln 2 * 2^w, truncated.
fn ln2_fixed(w: u64) -> BigInt {
    // 2 atanh(1/3)
    atanh_fixed(&BigRational::new(BigInt::one(), BigInt::from(3)), w) << 1
}

/// atanh(z) * 2^w for 0 <= z <= 1/3, truncated termwise.
fn atanh_fixed(z: &BigRational, w: u64) -> BigInt {
    let one = BigInt::one() << w;
    let zf: BigInt = (z.numer() << w) / z.denom();
    let z2 = (&zf * &zf) >> w;
    let mut power = zf;
    let mut sum = BigInt::zero();
    let mut k = 1u64;
    while !power.is_zero() {
        sum += &power / k;
        power = (&power * &z2) >> w;
        k += 2;
        debug_assert!(power < one);
    }
    sum
}

/// ln n * 2^w.
fn ln_fixed(n: u64, w: u64) -> BigInt {
    let k = 63 - u64::from(n.leading_zeros());
    let base = 1u64 << k;
    // n = 2^k * m with m in [1, 2); ln m = 2 atanh((m - 1)/(m + 1)).
    let z = BigRational::new(BigInt::from(n - base), BigInt::from(n + base));
    ln2_fixed(w) * k + (atanh_fixed(&z, w) << 1)
}

/// e^-y * 2^w for y >= 0 given as y * 2^w.
fn exp_neg_fixed(y: &BigInt, w: u64) -> BigInt {
    let ln2 = ln2_fixed(w);
    let (k, s) = y.div_mod_floor(&ln2);
    let k = k.to_u64().expect("exponent fits");
    // e^-s by Taylor, s in [0, ln 2).
    let mut term = BigInt::one() << w;
    let mut sum = term.clone();
    let mut i = 1u64;
    loop {
        term = -((&term * &s) >> w) / i;
        if term.is_zero() {
            break;
        }
        sum += &term;
        i += 1;
    }
    sum >> k
}

/// n^-alpha as a fixed-point number at working precision w.
fn n_pow_neg_fixed(n: u64, alpha: &BigRational, w: u64) -> BigInt {
    let y = ln_fixed(n, w) * alpha.numer() / alpha.denom();
    exp_neg_fixed(&y, w)
}

/// Exact 1/root when n^a is a perfect b-th power, for alpha = a/b.
fn exact_power(n: u64, alpha: &BigRational) -> Option<BigRational> {
    let a = alpha.numer().to_u64()?;
    let b = alpha.denom().to_u32()?;
    let log2n = 64 - u64::from(n.leading_zeros());
    if a.saturating_mul(log2n) > 1 << 16 || b > 1 << 16 {
        return None;
    }
    let na = num_traits::pow(BigUint::from(n), a as usize);
    let root = na.nth_root(b);
    (num_traits::pow(root.clone(), b as usize) == na).then(|| BigRational::new(BigInt::one(), root.into()))
}

/// p = n^-alpha, exact when possible, otherwise a dyadic rational within
/// 2^-bits of the true value.
pub fn alpha_to_p(n: u64, alpha: &AlphaSpec, bits: u64) -> Result<BigRational, AlphaError> {
    if n < 2 {
        return Err(AlphaError::SmallN);
    }
    let (a, exact) = alpha.value_at_precision(bits + 16)?;
    if !is_strictly_between_zero_and_one(&a) {
        return Err(AlphaError::Range);
    }
    if exact {
        if let Some(p) = exact_power(n, &a) {
            return Ok(p);
        }
    }
    rational_power(n, &a, bits)
}

/// n^-a for a rational a, certified by agreement of two working precisions.
pub fn rational_power(n: u64, a: &BigRational, bits: u64) -> Result<BigRational, AlphaError> {
    let out_bits = bits + 2;
    let mut guard = 64u64;
    for _ in 0..4 {
        let w1 = out_bits + guard;
        let w2 = out_bits + 2 * guard;
        let p1 = n_pow_neg_fixed(n, a, w1) << guard;
        let p2 = n_pow_neg_fixed(n, a, w2);
        // Both within a few thousand ulps of the truth; demand agreement far
        // below the output grain.
        let diff = (&p1 - &p2).abs();
        if diff < (BigInt::one() << (w2 - out_bits - 8)) {
            let shift = w2 - out_bits;
            let half = BigInt::one() << (shift - 1);
            let num = (p2 + half) >> shift;
            let p = BigRational::new(num, BigInt::one() << out_bits);
            if p.is_positive() && p <= BigRational::one() {
                return Ok(p);
            }
        }
        guard *= 2;
    }
    Err(AlphaError::Precision(bits))
}

/// e = ceil(v / alpha) + 1 for a rational stand-in of alpha.
pub fn default_e(v: usize, alpha: &BigRational) -> usize {
    let x = BigRational::from_integer(v.into()) / alpha;
    let c = -((-x.numer()).div_floor(x.denom()));
    c.to_usize().expect("small") + 1
}

/// floor(omega ln n / ln ln n), rounded down to an even number.
pub fn v_from_omega(n: u64, omega: f64) -> usize {
    let l = (n as f64).ln();
    let v = (omega * l / l.ln()).floor().max(0.0) as usize;
    v - v % 2
}

/// Distance bound used when checking that v/e tracks alpha.
pub fn ratio_tolerance() -> BigRational {
    pow2(-20)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{ratio, to_f64};

    #[test]
    fn exact_cases() {
        let half = AlphaSpec::parse("1/2").unwrap();
        assert_eq!(alpha_to_p(100, &half, 64).unwrap(), ratio(1, 10));
        let a = AlphaSpec::parse("0.625").unwrap();
        assert_eq!(alpha_to_p(256, &a, 64).unwrap(), ratio(1, 32));
    }

    #[test]
    fn numeric_cases_match_floats() {
        for (n, a) in [(500u64, "0.618"), (300, "5/8+2^-30"), (50, "1/3"), (1000, "golden"), (77, "liouville-q10")] {
            let spec = AlphaSpec::parse(a).unwrap();
            let p = alpha_to_p(n, &spec, 80).unwrap();
            let (av, _) = spec.value_at_precision(80).unwrap();
            let f = (n as f64).powf(-to_f64(&av));
            assert!((to_f64(&p) - f).abs() < 1e-12 * f, "{n} {a}");
        }
    }

    #[test]
    fn precision_is_consistent() {
        // Results at 60 and 120 bits differ by less than 2^-60.
        let spec = AlphaSpec::parse("0.618").unwrap();
        let p60 = alpha_to_p(500, &spec, 60).unwrap();
        let p120 = alpha_to_p(500, &spec, 120).unwrap();
        assert!((p60 - p120).abs() < pow2(-60));
    }

    #[test]
    fn monotone_and_limits() {
        let mut last = BigRational::one();
        for k in 1..20 {
            let spec = AlphaSpec::Rational(ratio(k, 20));
            let p = alpha_to_p(123, &spec, 64).unwrap();
            assert!(p < last);
            last = p;
        }
        let tiny = AlphaSpec::parse("2^-40").unwrap();
        let p = alpha_to_p(1000, &tiny, 64).unwrap();
        assert!(BigRational::one() - p < pow2(-30));
        assert!(AlphaSpec::parse("1").is_err());
        assert!(AlphaSpec::parse("0").is_err());
        assert!(alpha_to_p(1, &tiny, 10).is_err());
    }

    #[test]
    fn surrogates_converge() {
        for name in ["golden", "liouville-q10", "liouville-2q", "liouville:q^-3:6"] {
            let spec = AlphaSpec::parse(name).unwrap();
            let (a, _) = spec.value_at_precision(40).unwrap();
            let (b, _) = spec.value_at_precision(80).unwrap();
            assert!((a - b).abs() <= pow2(-40), "{name}");
        }
    }

    #[test]
    fn derived_sizes() {
        assert_eq!(default_e(8, &ratio(618, 1000)), 14);
        assert_eq!(default_e(10, &ratio(5, 8)), 17);
        let v = v_from_omega(500, 1.0);
        assert!(v.is_multiple_of(2) && v <= 3);
    }
}
