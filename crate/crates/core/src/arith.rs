//! Exact-arithmetic helpers: primes, rational utilities, the van der Corput
//! sequence.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

/// The first `count` primes, in order.
pub fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while out.len() < count {
        if out.iter().take_while(|&&p| p * p <= candidate).all(|&p| !candidate.is_multiple_of(p)) {
            out.push(candidate);
        }
        candidate += 1;
    }
    out
}

/// The `n`-th prime, 1-based (`nth_prime(1) == 2`).
pub fn nth_prime(n: usize) -> u64 {
    assert!(n >= 1, "primes are indexed from 1");
    primes(n)[n - 1]
}

pub fn big_pow(base: u64, exp: u32) -> BigUint {
    num_traits::pow(BigUint::from(base), exp as usize)
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_from_big(num: &BigUint, den: &BigUint) -> Rational {
    Rational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

/// Reduce into `[0, 1)`.
pub fn frac(r: &Rational) -> Rational {
    r - Rational::from_integer(r.floor().to_integer())
}

/// Correctly rounded `f64` for a rational of any size.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(x) = r.to_f64() {
        if x.is_finite() {
            return x;
        }
    }
    // Fall back to a scaled long division for huge components.
    let (n, d) = (r.numer(), r.denom());
    let shift = n.bits() as i64 - d.bits() as i64 - 60;
    let (n2, d2) =
        if shift > 0 { (n.clone(), d.clone() << shift as usize) } else { (n.clone() << (-shift) as usize, d.clone()) };
    let q = (n2 / d2).to_f64().unwrap_or(f64::NAN);
    q * 2f64.powi(shift as i32)
}

/// Exact value of a finite float.
pub fn rational_from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("finite float")
}

/// Render as `"num/den"`.
pub fn rational_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse `"num/den"` or a bare integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// `num / den` as a pair of machine integers when both fit.
pub fn small_fraction(r: &Rational) -> Option<(u64, u64)> {
    if r.is_negative() {
        return None;
    }
    Some((r.numer().to_u64()?, r.denom().to_u64()?))
}

/// Base-2 radical inverse of `n`: 1/2, 1/4, 3/4, 1/8, ...
pub fn van_der_corput(mut n: u64) -> Rational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    while n > 0 {
        den *= 2;
        num = num * 2 + BigInt::from(n & 1);
        n >>= 1;
    }
    Rational::new(num, den)
}

/// `value mod modulus` in `0..modulus` for a possibly negative big integer.
pub fn big_mod_u64(value: &BigInt, modulus: u64) -> u64 {
    let m = BigInt::from(modulus);
    value.mod_floor(&m).to_u64().expect("residue fits")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_primes() {
        assert_eq!(primes(6), vec![2, 3, 5, 7, 11, 13]);
        assert_eq!(nth_prime(5), 11);
    }

    #[test]
    fn van_der_corput_prefix() {
        let got: Vec<_> = (1..=7).map(van_der_corput).map(|r| rational_to_string(&r)).collect();
        assert_eq!(got, ["1/2", "1/4", "3/4", "1/8", "5/8", "3/8", "7/8"]);
    }

    #[test]
    fn frac_handles_negatives() {
        assert_eq!(frac(&rational(-1, 3)), rational(2, 3));
        assert_eq!(frac(&rational(7, 3)), rational(1, 3));
    }

    #[test]
    fn huge_rational_to_f64() {
        let n = BigInt::from(10).pow(400) * 3;
        let d = BigInt::from(10).pow(400);
        assert!((rational_to_f64(&Rational::new(n, d)) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn parse_round_trip() {
        let r = parse_rational("-6/8").unwrap();
        assert_eq!(rational_to_string(&r), "-3/4");
        assert_eq!(parse_rational("5").unwrap(), rational(5, 1));
        assert!(parse_rational("1/0").is_none());
    }
}
