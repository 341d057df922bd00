use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Working precision for the arbitrary-precision solvers.
///
/// `tol` is an absolute tolerance in energy units; root brackets are refined
/// until their width drops below it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionCtx {
    mantissa_bits: u32,
    tol: f64,
}

impl PrecisionCtx {
    pub const MIN_BITS: u32 = 64;

    pub fn new(mantissa_bits: u32, tol: f64) -> Result<Self> {
        if mantissa_bits < Self::MIN_BITS {
            return Err(Error::InvalidInput(format!(
                "mantissa_bits must be at least {}, got {mantissa_bits}",
                Self::MIN_BITS
            )));
        }
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::InvalidInput(format!("tol must be positive, got {tol}")));
        }
        // a tolerance below a few ulps of O(1) energies cannot be met
        let floor = (4.0 - f64::from(mantissa_bits)).exp2();
        if tol < floor {
            return Err(Error::InvalidInput(format!(
                "tol {tol:e} is not resolvable at {mantissa_bits} bits (minimum {floor:e})"
            )));
        }
        Ok(Self { mantissa_bits, tol })
    }

    /// `bits` of mantissa with a tolerance it can resolve comfortably:
    /// 1e-20 at 256 bits and above, looser below.
    pub fn for_bits(bits: u32) -> Result<Self> {
        Self::new(bits, (8.0 - 0.75 * f64::from(bits)).exp2().max(1e-20))
    }

    pub fn mantissa_bits(&self) -> u32 {
        self.mantissa_bits
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn tol_float(&self) -> Float {
        Float::with_val(self.mantissa_bits, self.tol)
    }

    /// Same tolerance at twice the mantissa.
    pub fn doubled(&self) -> Self {
        Self { mantissa_bits: self.mantissa_bits * 2, tol: self.tol }
    }

    pub fn float(&self, value: f64) -> Float {
        Float::with_val(self.mantissa_bits, value)
    }

    pub fn zero(&self) -> Float {
        Float::new(self.mantissa_bits)
    }

    /// Parses a decimal literal at working precision, so that inputs such as
    /// `0.1` carry all their digits instead of the nearest double.
    pub fn parse(&self, literal: &str) -> Result<Float> {
        parse_float(self.mantissa_bits, literal)
    }
}

impl Default for PrecisionCtx {
    fn default() -> Self {
        Self { mantissa_bits: 256, tol: 1e-20 }
    }
}

pub fn parse_float(bits: u32, literal: &str) -> Result<Float> {
    let trimmed = literal.trim();
    let parsed = Float::parse(trimmed)
        .map_err(|e| Error::InvalidInput(format!("cannot parse '{trimmed}' as a real: {e}")))?;
    let value = Float::with_val(bits, parsed);
    if !value.is_finite() {
        return Err(Error::InvalidInput(format!("'{trimmed}' is not finite")));
    }
    Ok(value)
}

/// Plain decimal with `digits` significant digits, e.g. `0.179668484653553873`.
pub fn format_significant(x: &Float, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x.is_zero() {
        return format!("0.{}", "0".repeat(digits.saturating_sub(1).max(1)));
    }
    let (neg, mantissa, exp) = x.to_sign_string_exp(10, Some(digits.max(1)));
    place_point(neg, &mantissa, exp.unwrap_or(0))
}

/// Plain decimal rounded to `decimals` places after the point.
pub fn format_fixed(x: &Float, decimals: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let zero = || format!("0.{}", "0".repeat(decimals));
    if x.is_zero() {
        return zero();
    }
    let (_, _, exp) = x.to_sign_string_exp(10, None);
    let exp = exp.unwrap_or(0);
    let count = exp + decimals as i32;
    if count <= 0 {
        // below one unit of the last place; rounds to zero or to one unit
        let half = Float::with_val(x.prec().max(64), 10u32).pow(-(decimals as i32)) / 2u32;
        if Float::with_val(x.prec(), x.abs_ref()) < half {
            return zero();
        }
        let sign = if *x < 0 { "-" } else { "" };
        if decimals == 0 {
            return format!("{sign}1.0");
        }
        return format!("{sign}0.{}1", "0".repeat(decimals - 1));
    }
    let (neg, mut mantissa, e) = x.to_sign_string_exp(10, Some(count as usize));
    let e = e.unwrap_or(0);
    if e > exp {
        // rounding carried into a new leading digit: the value is a power of ten
        mantissa.push('0');
    }
    place_point(neg, &mantissa, e)
}

/// Inserts the decimal point into `0.mantissa x 10^exp`.
fn place_point(neg: bool, mantissa: &str, exp: i32) -> String {
    let mut out = String::with_capacity(mantissa.len() + 4);
    if neg {
        out.push('-');
    }
    let len = mantissa.len() as i32;
    if exp <= 0 {
        out.push_str("0.");
        out.push_str(&"0".repeat((-exp) as usize));
        out.push_str(mantissa);
    } else if exp >= len {
        out.push_str(mantissa);
        out.push_str(&"0".repeat((exp - len) as usize));
        out.push_str(".0");
    } else {
        out.push_str(&mantissa[..exp as usize]);
        out.push('.');
        out.push_str(&mantissa[exp as usize..]);
    }
    out
}
