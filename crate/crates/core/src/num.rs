//! Scalar types and small helpers. `Q` is the value group of the whole
//! artifact; every coordinate, offset and density in the crate is a `Q`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Z = BigInt;
pub type Q = BigRational;

pub fn zi(v: i64) -> Z {
    Z::from(v)
}

pub fn qi(v: i64) -> Q {
    Q::from_integer(Z::from(v))
}

pub fn qr(num: i64, den: i64) -> Q {
    assert!(den != 0, "zero denominator");
    Q::new(Z::from(num), Z::from(den))
}

/// Parse "p/q" or "p". Rejects zero denominators rather than panicking.
pub fn parse_q(s: &str) -> Result<Q, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let n: Z = num
        .parse()
        .map_err(|_| format!("bad rational numerator in {s:?}"))?;
    let d: Z = den
        .parse()
        .map_err(|_| format!("bad rational denominator in {s:?}"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Q::new(n, d))
}

/// Canonical "p/q" form ("p" when the denominator is one).
pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Least common multiple of two positive integers.
pub fn lcm(a: &Z, b: &Z) -> Z {
    num_integer::Integer::lcm(a, b)
}

/// Floor of a rational as a BigInt.
pub fn floor_q(x: &Q) -> Z {
    x.floor().to_integer()
}

/// |x| for rationals.
pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/4", "-7/2", "5", "0", "-12/36"] {
            let q = parse_q(s).unwrap();
            let q2 = parse_q(&format_q(&q)).unwrap();
            assert_eq!(q, q2);
        }
        assert_eq!(format_q(&parse_q("-12/36").unwrap()), "-1/3");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(parse_q("1/0").is_err());
    }
}
