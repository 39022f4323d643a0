//! Exact complex numbers with rational real and imaginary parts.
//!
//! These are the value type for periodic functions: every identity check
//! in the crate runs in this domain so that equality means equality, not
//! closeness. Conversion to floating point happens only at output edges.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::{Error, Result};

/// A complex number whose components are arbitrary-precision rationals.
pub type GaussRational = Complex<BigRational>;

/// Builds a Gaussian integer `re + im·i` as an exact value.
pub fn gauss_int(re: i64, im: i64) -> GaussRational {
    Complex::new(
        BigRational::from_integer(BigInt::from(re)),
        BigRational::from_integer(BigInt::from(im)),
    )
}

/// |z|² as an exact rational.
pub fn abs_sqr(z: &GaussRational) -> BigRational {
    z.norm_sqr()
}

/// Parses an exact rational written as `num` or `num/den` with optional
/// sign, e.g. `-3/4`. Rejects a zero denominator.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let mut parts = s.splitn(2, '/');
    let numer: BigInt = parts
        .next()
        .unwrap_or("")
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    let denom: BigInt = match parts.next() {
        None => BigInt::from(1),
        Some(d) => d
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?,
    };
    if denom.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(numer, denom))
}

/// Parses a complex value from separate real and imaginary fields.
pub fn parse_gauss(re: &str, im: &str) -> Result<GaussRational> {
    Ok(Complex::new(parse_rational(re)?, parse_rational(im)?))
}

/// The exact rational value of a finite `f64` (every finite float is a
/// dyadic rational). `None` for NaN or infinities.
pub fn rational_from_f64(v: f64) -> Option<BigRational> {
    BigRational::from_float(v)
}

/// Nearest-`f64` approximation of an exact rational.
pub fn rational_to_f64(v: &BigRational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Approximates an exact complex value in `f64` components.
pub fn gauss_to_f64(z: &GaussRational) -> Complex<f64> {
    Complex::new(rational_to_f64(&z.re), rational_to_f64(&z.im))
}
