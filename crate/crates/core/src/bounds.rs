//! Analytic energy bounds and critical-coupling estimates.
//!
//! Every bound here is the minimum over r of `K/r^2 - A/r + B r^2`. For
//! K > 0 and B > 0 the stationarity condition `2B r^4 + A r - 2K = 0` has
//! exactly one positive root, so the minimum is found by bracketing that root
//! and refining it at working precision.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::root::{self, Bracket};
use crate::types::{Confinement, LevelLabel, PotentialSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnvelopeVariant {
    /// Coulomb and oscillator terms both scaled by P1 = nu.
    LowerEnvelope,
    /// Both scaled by P2 = 2 nu - (l + 1/2).
    UpperEnvelope,
    /// Coulomb by P1, oscillator by P2; exact when a = 0 or b = 0.
    SumApprox,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeParams {
    pub p1: f64,
    pub p2: f64,
    pub variant: EnvelopeVariant,
}

impl EnvelopeParams {
    pub fn new(label: LevelLabel, variant: EnvelopeVariant) -> Self {
        let nu = f64::from(label.principal());
        Self { p1: nu, p2: 2.0 * nu - (f64::from(label.l) + 0.5), variant }
    }

    /// (P_a, P_b): the factors applied to the Coulomb and oscillator radii.
    pub fn factors(&self) -> (f64, f64) {
        match self.variant {
            EnvelopeVariant::LowerEnvelope => (self.p1, self.p1),
            EnvelopeVariant::UpperEnvelope => (self.p2, self.p2),
            EnvelopeVariant::SumApprox => (self.p1, self.p2),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnvelopeBound {
    pub value: Float,
    pub params: EnvelopeParams,
    /// Set for a <= 0: the tangent construction behind the bounds assumes an
    /// attractive Coulomb term, so the number is evaluated but not a proven
    /// bound.
    pub outside_derivation: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CriticalChoice {
    /// (P1, P1): b_c lies below this.
    UpperBound,
    /// (P2, P2): b_c lies above this.
    LowerBound,
    /// (nu, nu + 1/2) for the lowest state of each l.
    SumLower,
}

/// Minimum over 0 < r <= r_max of K/r^2 - A/r + B r^2, with K > 0, B >= 0.
/// Returns the minimum and its location (`None` when the infimum is only
/// approached as r -> inf).
pub fn minimize_radial(k: &Float, a: &Float, b: &Float, r_max: Option<&Float>) -> (Float, Option<Float>) {
    let prec = k.prec().max(a.prec()).max(b.prec());
    let value = |r: &Float| -> Float {
        let r2 = Float::with_val(prec, r.square_ref());
        Float::with_val(prec, k / &r2) - Float::with_val(prec, a / r) + Float::with_val(prec, b * &r2)
    };
    let stationary = if b.is_zero() {
        // K/r^2 - A/r: minimum at 2K/A if A > 0, otherwise decreasing to 0
        (*a > 0).then(|| Float::with_val(prec, k * 2u32) / a)
    } else {
        Some(stationary_root(k, a, b, prec))
    };
    match (stationary, r_max) {
        (Some(r), Some(cap)) if r > *cap => (value(cap), Some(Float::with_val(prec, cap))),
        (Some(r), _) => (value(&r), Some(r)),
        (None, Some(cap)) => (value(cap), Some(Float::with_val(prec, cap))),
        (None, None) => (Float::new(prec), None),
    }
}

/// Positive root of 2B r^4 + A r - 2K.
fn stationary_root(k: &Float, a: &Float, b: &Float, prec: u32) -> Float {
    let g = |r: &Float| -> Result<Float> {
        let r4 = Float::with_val(prec, r.square_ref()).square();
        Ok(Float::with_val(prec, b * 2u32) * r4 + Float::with_val(prec, a * r) - Float::with_val(prec, k * 2u32))
    };
    let lo = Float::new(prec);
    let mut hi = Float::with_val(prec, 1);
    while g(&hi).expect("finite") <= 0 {
        hi *= 2u32;
    }
    let f_lo = g(&lo).expect("finite");
    let f_hi = g(&hi).expect("finite");
    let tol = Float::with_val(prec, &hi >> (prec - 8));
    let br = root::refine(g, Bracket { lo, hi, f_lo, f_hi }, &tol).expect("polynomial evaluation is infallible");
    br.midpoint()
}

/// E > min over 0 < r <= R of 1/(8 r^2) - a/r + b r^2.
pub fn heisenberg_lower(spec: &PotentialSpec) -> Result<Float> {
    if spec.b < 0 {
        return Err(Error::InvalidInput("b must be non-negative".into()));
    }
    let prec = spec.a.prec().max(spec.b.prec());
    let k = Float::with_val(prec, 0.125);
    Ok(minimize_radial(&k, &spec.a, &spec.b, spec.confinement.radius()).0)
}

/// Envelope estimate min over r > 0 of 1/(2r^2) - a/(P_a r) + b (P_b r)^2.
pub fn envelope_bound(spec: &PotentialSpec, label: LevelLabel, variant: EnvelopeVariant) -> Result<EnvelopeBound> {
    if !matches!(spec.confinement, Confinement::Free) {
        return Err(Error::InvalidInput("envelope bounds are derived for free space only".into()));
    }
    if spec.b < 0 {
        return Err(Error::InvalidInput("b must be non-negative".into()));
    }
    if spec.b.is_zero() && spec.a <= 0 {
        return Err(Error::InvalidInput("no bound states for b = 0 and a <= 0".into()));
    }
    let params = EnvelopeParams::new(label, variant);
    let (pa, pb) = params.factors();
    let prec = spec.a.prec().max(spec.b.prec());
    let k = Float::with_val(prec, 0.5);
    let a_eff = Float::with_val(prec, &spec.a / pa);
    let b_eff = Float::with_val(prec, &spec.b * (pb * pb));
    let (value, _) = minimize_radial(&k, &a_eff, &b_eff, None);
    Ok(EnvelopeBound { value, params, outside_derivation: spec.a <= 0 })
}

/// Estimate (27/32) a^4 / (P_a^4 P_b^2) of the coupling b at which the
/// level crosses zero energy.
pub fn critical_b_estimate(a: &Float, label: LevelLabel, choice: CriticalChoice) -> Result<Float> {
    if *a <= 0 {
        return Err(Error::InvalidInput("critical couplings need a > 0".into()));
    }
    let env = |v| EnvelopeParams::new(label, v);
    let (pa, pb) = match choice {
        CriticalChoice::UpperBound => env(EnvelopeVariant::LowerEnvelope).factors(),
        CriticalChoice::LowerBound => env(EnvelopeVariant::UpperEnvelope).factors(),
        CriticalChoice::SumLower => {
            if label.n != 0 {
                return Err(Error::InvalidInput(format!(
                    "the sum estimate covers the lowest level of each l only, not {label}"
                )));
            }
            let nu = f64::from(label.principal());
            (nu, nu + 0.5)
        }
    };
    let prec = a.prec();
    let a4 = Float::with_val(prec, a.square_ref()).square();
    let denom = Float::with_val(prec, pa).square().square() * Float::with_val(prec, pb).square();
    Ok(a4 * 27u32 / 32u32 / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(x: f64) -> Float {
        Float::with_val(256, x)
    }

    #[test]
    fn heisenberg_pure_oscillator() {
        let v = heisenberg_lower(&PotentialSpec::free(0.0, 0.5)).unwrap();
        assert!(Float::with_val(256, v - 0.5).abs() < 1e-60);
    }

    #[test]
    fn heisenberg_below_ground_state() {
        let v = heisenberg_lower(&PotentialSpec::free(1.0, 0.5)).unwrap();
        assert!(v < 0.179668484653553873);
    }

    #[test]
    fn heisenberg_wall_clamps_minimiser() {
        // unconstrained minimiser of 1/(8r^2) - 1/r + r^2/2 lies near r = 0.25
        let free = PotentialSpec::free(1.0, 0.5);
        let (_, r_star) = minimize_radial(&f(0.125), &f(1.0), &f(0.5), None);
        let r_star = r_star.unwrap();
        assert!(r_star > 0.1);
        let boxed = heisenberg_lower(&PotentialSpec::wall(1.0, 0.5, 0.1)).unwrap();
        let at_wall = 0.125 / 0.01 - 1.0 / 0.1 + 0.5 * 0.01;
        assert!((boxed.to_f64() - at_wall).abs() < 1e-12);
        assert!(boxed > heisenberg_lower(&free).unwrap());
    }

    #[test]
    fn sum_approximation_edges() {
        let osc = envelope_bound(&PotentialSpec::free(0.0, 0.5), LevelLabel::new(0, 0), EnvelopeVariant::SumApprox).unwrap();
        assert!(Float::with_val(256, &osc.value - 1.5).abs() < 1e-60);
        assert!(osc.outside_derivation);
        let coul = envelope_bound(&PotentialSpec::free(1.0, 0.0), LevelLabel::new(0, 0), EnvelopeVariant::SumApprox).unwrap();
        assert!(Float::with_val(256, &coul.value + 0.5).abs() < 1e-60);
        assert!(!coul.outside_derivation);
    }

    #[test]
    fn envelope_sandwich_ground_state() {
        let spec = PotentialSpec::free(1.0, 0.5);
        let lo = envelope_bound(&spec, LevelLabel::new(0, 0), EnvelopeVariant::LowerEnvelope).unwrap();
        let hi = envelope_bound(&spec, LevelLabel::new(0, 0), EnvelopeVariant::UpperEnvelope).unwrap();
        assert!(lo.value < 0.179668484653553873);
        assert!(hi.value > 0.179668484653553873);
        assert!(envelope_bound(&PotentialSpec::wall(1.0, 0.5, 1.0), LevelLabel::new(0, 0), EnvelopeVariant::SumApprox).is_err());
    }

    #[test]
    fn critical_estimates() {
        let one_s = LevelLabel::new(0, 0);
        assert_eq!(critical_b_estimate(&f(1.0), one_s, CriticalChoice::SumLower).unwrap(), 0.375);
        assert_eq!(critical_b_estimate(&f(1.0), one_s, CriticalChoice::UpperBound).unwrap(), 0.84375);
        let lower = critical_b_estimate(&f(1.0), one_s, CriticalChoice::LowerBound).unwrap().to_f64();
        assert!((lower - 27.0 / 32.0 / 1.5f64.powi(6)).abs() < 1e-15);
        assert_eq!(critical_b_estimate(&f(2.0), one_s, CriticalChoice::SumLower).unwrap(), 6.0);
        assert!(critical_b_estimate(&f(1.0), LevelLabel::new(1, 0), CriticalChoice::SumLower).is_err());
        assert!(critical_b_estimate(&f(-1.0), one_s, CriticalChoice::UpperBound).is_err());
    }

    #[test]
    fn envelope_at_critical_estimate_is_zero() {
        // the lower envelope vanishes exactly at the UpperBound estimate
        let label = LevelLabel::new(1, 1);
        let b = critical_b_estimate(&f(1.0), label, CriticalChoice::UpperBound).unwrap();
        let spec = PotentialSpec::from_parts(f(1.0), b, Confinement::Free).unwrap();
        let env = envelope_bound(&spec, label, EnvelopeVariant::LowerEnvelope).unwrap();
        assert!(env.value.abs() < 1e-60);
    }

    #[test]
    fn bounds_scale_like_energies() {
        // bound(a, b) = sqrt(b) bound(a b^(-1/4), 1)
        let (a, b) = (0.7f64, 2.0f64);
        let label = LevelLabel::new(1, 2);
        for v in [EnvelopeVariant::LowerEnvelope, EnvelopeVariant::UpperEnvelope, EnvelopeVariant::SumApprox] {
            let direct = envelope_bound(&PotentialSpec::free(a, b), label, v).unwrap().value.to_f64();
            let scaled = envelope_bound(&PotentialSpec::free(a * b.powf(-0.25), 1.0), label, v).unwrap().value.to_f64();
            assert!((direct - b.sqrt() * scaled).abs() < 1e-13);
        }
    }
}
