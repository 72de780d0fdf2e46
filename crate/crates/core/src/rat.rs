//! Exact rational scalar used for every coordinate and squared distance.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Error;

pub type Rat = BigRational;

pub fn int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `-12`, `3.25`, `1e-3`, `-0.5E2` or `7/3` into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a decimal literal: {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(n, d));
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{ip}{fp}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let mut r = Rat::from_integer(num);
    if scale >= 0 {
        r *= Rat::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= Rat::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -r } else { r })
}

/// Canonical exact text form: `n` or `n/d`.
pub fn rat_str(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Huge numerators: scale both parts down together.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Decimal rendering of `sqrt(r)` with `sig` significant digits, round-half-even.
pub fn sqrt_decimal(r: &Rat, sig: usize) -> String {
    assert!(!r.is_negative(), "sqrt of negative");
    if r.is_zero() {
        return "0".to_string();
    }
    // floor(sqrt(r * 100^p)) for p large enough to keep sig+2 digits.
    let mut p: i64 = 0;
    let hundred = Rat::from_integer(BigInt::from(100));
    let mut scaled = r.clone();
    let lo = Rat::from_integer(num_traits::pow(BigInt::from(10), 2 * (sig + 2)));
    while scaled < lo {
        scaled *= &hundred;
        p += 1;
    }
    let hi = &lo * &hundred * &hundred;
    while scaled >= hi {
        scaled /= &hundred;
        p -= 1;
    }
    let q = scaled.numer() / scaled.denom();
    let root = q.sqrt();
    let exact = &root * &root == q && (scaled.numer() % scaled.denom()).is_zero();
    let digits = root.to_string();
    // value = root * 10^-p  (root has sig+2 or sig+3 digits)
    let keep = sig.min(digits.len());
    let (head, tail) = digits.split_at(keep);
    let mut head_num: BigInt = head.parse().unwrap();
    let first_tail = tail.chars().next().map(|c| c.to_digit(10).unwrap()).unwrap_or(0);
    let rest_nonzero = tail.chars().skip(1).any(|c| c != '0') || !exact;
    let round_up = match first_tail.cmp(&5) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => rest_nonzero || (&head_num % 2u32) == BigInt::one(),
    };
    if round_up {
        head_num += 1;
    }
    // decimal exponent of the last kept digit
    let mut exp10 = tail.len() as i64 - p;
    let mut s = head_num.to_string();
    if s.len() > keep {
        // carry overflowed into a new digit
        s.pop();
        exp10 += 1;
    }
    place_decimal(&s, exp10)
}

fn place_decimal(digits: &str, exp10: i64) -> String {
    let trimmed_end;
    let (digits, exp10) = if exp10 < 0 {
        let t = digits.trim_end_matches('0');
        let removed = (digits.len() - t.len()) as i64;
        let removed = removed.min(-exp10);
        trimmed_end = &digits[..digits.len() - removed as usize];
        (trimmed_end, exp10 + removed)
    } else {
        (digits, exp10)
    };
    if exp10 >= 0 {
        format!("{}{}", digits, "0".repeat(exp10 as usize))
    } else {
        let frac_len = (-exp10) as usize;
        if digits.len() > frac_len {
            let (a, b) = digits.split_at(digits.len() - frac_len);
            format!("{a}.{b}")
        } else {
            format!("0.{}{}", "0".repeat(frac_len - digits.len()), digits)
        }
    }
}

pub fn abs(r: &Rat) -> Rat {
    r.abs()
}
