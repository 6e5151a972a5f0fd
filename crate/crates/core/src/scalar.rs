//! Coefficient types.
//!
//! Every model in this crate is generic over a [`Scalar`]. The analysis
//! pipeline (posiform, implication network, persistencies) needs exact
//! capacities, so each scalar must be able to report its value as an exact
//! [`Rational`]. Integers and rationals always can; finite floats can too,
//! because every finite `f32`/`f64` is a dyadic rational. Values that do not
//! fit an `i64` numerator/denominator are rejected instead of rounded.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact rational used for bounds and for the default coefficient type.
pub type Rational = Ratio<i64>;

pub trait Scalar:
    Signed + Copy + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    fn from_int(v: i64) -> Self;

    /// Exact value, or `None` for non-finite or unrepresentable values.
    fn to_rational(&self) -> Option<Rational>;

    /// `self / d` if the quotient is exactly representable in `Self`.
    fn exact_div(&self, d: i64) -> Option<Self>;

    /// Parse a coefficient from text: integers, decimals (`-2.5`) and
    /// fractions (`3/4`) where the type can hold them.
    fn parse_text(s: &str) -> Option<Self>;

    /// Text form that [`Scalar::parse_text`] reads back to the same value.
    fn to_text(&self) -> String {
        self.to_string()
    }

    fn is_finite_value(&self) -> bool {
        true
    }

    /// Lossy conversion for reporting only.
    fn to_f64_lossy(&self) -> f64;
}

impl Scalar for i64 {
    fn from_int(v: i64) -> Self {
        v
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(Rational::from_integer(*self))
    }

    fn exact_div(&self, d: i64) -> Option<Self> {
        if d == 0 {
            return None;
        }
        let (q, r) = self.div_rem(&d);
        r.is_zero().then_some(q)
    }

    fn parse_text(s: &str) -> Option<Self> {
        let r = parse_rational(s)?;
        r.is_integer().then(|| *r.numer())
    }

    fn to_f64_lossy(&self) -> f64 {
        *self as f64
    }
}

impl Scalar for Rational {
    fn from_int(v: i64) -> Self {
        Rational::from_integer(v)
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(*self)
    }

    fn exact_div(&self, d: i64) -> Option<Self> {
        (d != 0).then(|| *self / d)
    }

    fn parse_text(s: &str) -> Option<Self> {
        parse_rational(s)
    }

    fn to_text(&self) -> String {
        format_rational(self)
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_int(v: i64) -> Self {
                v as $t
            }

            fn to_rational(&self) -> Option<Rational> {
                dyadic_to_rational(*self as f64)
            }

            fn exact_div(&self, d: i64) -> Option<Self> {
                let q = *self / d as $t;
                (q * d as $t == *self && q.is_finite()).then_some(q)
            }

            fn parse_text(s: &str) -> Option<Self> {
                s.trim().parse::<$t>().ok().filter(|v| v.is_finite())
            }

            fn is_finite_value(&self) -> bool {
                self.is_finite()
            }

            fn to_f64_lossy(&self) -> f64 {
                *self as f64
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

/// Exact conversion of a finite float into `Ratio<i64>`.
fn dyadic_to_rational(v: f64) -> Option<Rational> {
    if !v.is_finite() {
        return None;
    }
    if v == 0.0 {
        return Some(Rational::zero());
    }
    let (mut mantissa, mut exponent, sign) = num_traits::float::FloatCore::integer_decode(v);
    let shift = mantissa.trailing_zeros();
    mantissa >>= shift;
    exponent += shift as i16;
    let m = i64::try_from(mantissa).ok()? * i64::from(sign);
    if exponent >= 0 {
        let factor = 1i64.checked_shl(exponent as u32).filter(|_| exponent < 63)?;
        Some(Rational::from_integer(m.checked_mul(factor)?))
    } else {
        let e = (-exponent) as u32;
        if e >= 63 {
            return None;
        }
        Some(Rational::new(m, 1i64 << e))
    }
}

/// Parses `12`, `-2.75`, `+0.5`, `3/4`, `-7/2`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let mut numer: i64 = 0;
    for b in int_part.bytes().chain(frac_part.bytes()) {
        numer = numer.checked_mul(10)?.checked_add(i64::from(b - b'0'))?;
    }
    let denom = 10i64.checked_pow(frac_part.len() as u32)?;
    let r = Rational::new(numer, denom);
    Some(if negative { -r } else { r })
}

/// Decimal form when the denominator divides a power of ten, `p/q` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let mut d = *r.denom();
    let (mut twos, mut fives) = (0u32, 0u32);
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    if d != 1 {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let digits = twos.max(fives);
    let Some(scale) = 10i64.checked_pow(digits) else {
        return format!("{}/{}", r.numer(), r.denom());
    };
    let Some(scaled) = r.numer().checked_mul(scale / r.denom()) else {
        return format!("{}/{}", r.numer(), r.denom());
    };
    let sign = if scaled < 0 { "-" } else { "" };
    let abs = scaled.unsigned_abs();
    let scale = scale as u64;
    format!(
        "{sign}{}.{:0width$}",
        abs / scale,
        abs % scale,
        width = digits as usize
    )
}

/// Least common multiple of denominators, `None` on overflow.
pub(crate) fn lcm_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Option<i64> {
    let mut acc: i64 = 1;
    for v in values {
        let d = *v.denom();
        let g = acc.gcd(&d);
        acc = (acc / g).checked_mul(d)?;
    }
    Some(acc)
}
