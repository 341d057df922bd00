//! Bracketing root refinement in arbitrary precision.

use rug::Float;

use crate::error::Result;

/// A sign-change bracket `[lo, hi]` with the function values at both ends.
#[derive(Debug, Clone)]
pub struct Bracket {
    pub lo: Float,
    pub hi: Float,
    pub f_lo: Float,
    pub f_hi: Float,
}

impl Bracket {
    pub fn width(&self) -> Float {
        Float::with_val(self.lo.prec(), &self.hi - &self.lo)
    }

    pub fn midpoint(&self) -> Float {
        Float::with_val(self.lo.prec(), &self.lo + &self.hi) / 2u32
    }
}

pub fn opposite_signs(x: &Float, y: &Float) -> bool {
    !x.is_zero() && !y.is_zero() && x.is_sign_negative() != y.is_sign_negative()
}

/// Shrinks a sign-change bracket until its width is at most `tol`.
///
/// Steps are Illinois-modified regula falsi; a plain bisection step is forced
/// whenever two consecutive steps fail to halve the bracket, so the width
/// still contracts at least as fast as bisection every third evaluation.
pub fn refine<F>(mut f: F, mut br: Bracket, tol: &Float) -> Result<Bracket>
where
    F: FnMut(&Float) -> Result<Float>,
{
    let prec = br.lo.prec();
    let mut side = 0i8;
    let mut stalled = 0u32;
    for _ in 0..4 * prec {
        let width = br.width();
        if width <= *tol {
            break;
        }
        let mid = br.midpoint();
        if mid == br.lo || mid == br.hi {
            break;
        }
        let x = if stalled >= 2 {
            stalled = 0;
            mid
        } else {
            let num = Float::with_val(prec, &br.lo * &br.f_hi) - Float::with_val(prec, &br.hi * &br.f_lo);
            let den = Float::with_val(prec, &br.f_hi - &br.f_lo);
            let x = num / den;
            if x.is_finite() && x > br.lo && x < br.hi {
                x
            } else {
                mid
            }
        };
        let fx = f(&x)?;
        if fx.is_zero() {
            return Ok(Bracket { lo: x.clone(), hi: x, f_lo: fx.clone(), f_hi: fx });
        }
        if fx.is_sign_negative() == br.f_lo.is_sign_negative() {
            br.lo = x;
            br.f_lo = fx;
            if side == -1 {
                br.f_hi /= 2u32;
            }
            side = -1;
        } else {
            br.hi = x;
            br.f_hi = fx;
            if side == 1 {
                br.f_lo /= 2u32;
            }
            side = 1;
        }
        let new_width = br.width();
        if new_width * 2u32 > width {
            stalled += 1;
        } else {
            stalled = 0;
        }
    }
    Ok(br)
}
