//! Quasi-exact solutions.
//!
//! For special couplings the factor `f(r)` left after removing the asymptotic
//! behaviour is a polynomial of degree n. The energy is then fixed in closed
//! form and the couplings must satisfy algebraic constraints: a tridiagonal
//! determinant in free space, two polynomial equations under a wall.

mod confined;
mod free;

use std::fmt;
use std::str::FromStr;

use rug::Float;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::precision::parse_float;
use crate::types::{Confinement, LevelLabel, PotentialSpec};

pub use confined::{confined_constraints, confined_qes_energy, confined_qes_solve, dimensionless_solutions};
pub use free::{free_entries, free_qes_energy, free_qes_solve, tridiag_det, OdeCoeffs, TridiagEntries};

/// Largest polynomial degree accepted by the solvers.
pub const MAX_DEGREE: u32 = 8;

/// The coupling held fixed while the constraints are solved for the others.
#[derive(Debug, Clone, PartialEq)]
pub enum FixedParam {
    A(Float),
    B(Float),
    Radius(Float),
}

impl FixedParam {
    /// Fixes b through sqrt(2b), the form the closed-form energies use.
    pub fn sqrt_2b(s: Float) -> Self {
        let b = Float::with_val(s.prec(), s.square_ref()) / 2u32;
        FixedParam::B(b)
    }

    pub fn name(&self) -> &'static str {
        match self {
            FixedParam::A(_) => "a",
            FixedParam::B(_) => "b",
            FixedParam::Radius(_) => "R",
        }
    }

    pub fn value(&self) -> &Float {
        match self {
            FixedParam::A(v) | FixedParam::B(v) | FixedParam::Radius(v) => v,
        }
    }

    /// Parses `key=value` with key one of `a`, `b`, `R` (or `radius`), `s`
    /// (or `sqrt2b`), at `bits` of precision.
    pub fn parse(text: &str, bits: u32) -> Result<Self> {
        let (key, value) = text
            .split_once('=')
            .ok_or_else(|| Error::InvalidInput(format!("expected key=value, got '{text}'")))?;
        let v = parse_float(bits, value.trim())?;
        match key.trim() {
            "a" => Ok(FixedParam::A(v)),
            "b" => Ok(FixedParam::B(v)),
            "R" | "r" | "radius" => Ok(FixedParam::Radius(v)),
            "s" | "sqrt2b" => Ok(FixedParam::sqrt_2b(v)),
            other => Err(Error::InvalidInput(format!("unknown fixed parameter '{other}' (use a, b, R or sqrt2b)"))),
        }
    }
}

impl FromStr for FixedParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, 256)
    }
}

impl fmt::Display for FixedParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.name(), self.value().to_f64())
    }
}

/// One quasi-exact solution: couplings, closed-form energy and the
/// polynomial factor.
#[derive(Debug, Clone)]
pub struct QESCondition {
    /// Degree of the polynomial factor.
    pub n: u32,
    /// Node count and angular momentum of the resulting state.
    pub label: LevelLabel,
    pub a: Float,
    pub b: Float,
    /// `None` in free space.
    pub radius: Option<Float>,
    pub energy: Float,
    /// Values of the solvability constraints at (a, b, R).
    pub constraint_residuals: Vec<Float>,
    /// f_n(r), normalised to f_n(0) = 1.
    pub poly_coeffs: Poly,
    /// Roots of f_n strictly inside the domain.
    pub node_count: u32,
}

impl QESCondition {
    pub fn sqrt_2b(&self) -> Float {
        let two_b = Float::with_val(self.b.prec(), &self.b * 2u32);
        two_b.sqrt()
    }

    pub fn spec(&self) -> Result<PotentialSpec> {
        let confinement = match &self.radius {
            None => Confinement::Free,
            Some(r) => Confinement::Wall(r.clone()),
        };
        PotentialSpec::from_parts(self.a.clone(), self.b.clone(), confinement)
    }

    pub fn max_residual(&self) -> Float {
        let mut m = Float::new(self.energy.prec());
        for r in &self.constraint_residuals {
            let v = Float::with_val(self.energy.prec(), r.abs_ref());
            if v > m {
                m = v;
            }
        }
        m
    }

    /// Radial part up to the Gaussian: g(r) = r^(l+1) [(R - r)] f_n(r).
    pub fn prefactor_poly(&self) -> Poly {
        let g = self.poly_coeffs.shift(self.label.l as usize + 1);
        match &self.radius {
            Some(r) => g.mul_wall(r, 1),
            None => g,
        }
    }

    /// psi(r) = g(r) exp(-sqrt(b/2) r^2).
    pub fn psi(&self, r: &Float) -> Float {
        let prec = self.energy.prec();
        let alpha = Float::with_val(prec, self.sqrt_2b() / 2u32);
        let r2 = Float::with_val(prec, r.square_ref());
        let damp = Float::with_val(prec, -(alpha * r2)).exp();
        self.prefactor_poly().eval(r) * damp
    }

    /// Relative residual of the radial equation at `r`:
    /// |-psi''/2 + (V_eff - E) psi| / max(|psi''/2|, |V_eff psi|, |E psi|).
    /// The common Gaussian factor is divided out.
    pub fn eigenfunction_residual(&self, r: &Float) -> Result<Float> {
        let prec = self.energy.prec();
        if *r <= 0 || self.radius.as_ref().is_some_and(|w| r >= w) {
            return Err(Error::Domain { r: r.to_f64().to_string(), domain: "the open radial domain".into() });
        }
        let g = self.prefactor_poly();
        let g1 = g.derivative();
        let g2 = g1.derivative();
        let alpha = Float::with_val(prec, self.sqrt_2b() / 2u32);
        let gv = g.eval(r);
        let r2 = Float::with_val(prec, r.square_ref());
        // psi'' e^{alpha r^2} = g'' - 4 alpha r g' + (4 alpha^2 r^2 - 2 alpha) g
        let mut d2 = g2.eval(r);
        d2 -= Float::with_val(prec, &alpha * r) * g1.eval(r) * 4u32;
        let a2r2 = Float::with_val(prec, alpha.square_ref()) * &r2 * 4u32;
        d2 += Float::with_val(prec, a2r2 - Float::with_val(prec, &alpha * 2u32)) * &gv;
        let l = f64::from(self.label.l);
        let centrifugal = Float::with_val(prec, l * (l + 1.0)) / Float::with_val(prec, &r2 * 2u32);
        let coulomb = Float::with_val(prec, &self.a / r);
        let oscillator = Float::with_val(prec, &self.b * &r2);
        let v_eff = centrifugal - coulomb + oscillator;
        let kinetic = Float::with_val(prec, &d2 / 2u32);
        let potential = Float::with_val(prec, &v_eff * &gv);
        let energy = Float::with_val(prec, &self.energy * &gv);
        let residual = Float::with_val(prec, &potential - &kinetic) - &energy;
        let scale = kinetic.abs().max(&potential.abs()).max(&energy.abs());
        if scale.is_zero() {
            return Ok(residual.abs());
        }
        Ok(residual.abs() / scale)
    }
}

/// Distinct real roots of `poly` strictly inside (lo, hi); `hi = None` means
/// (lo, inf), handled with the Cauchy root bound. Sign-change scan on 1024
/// cells plus bisection; roots closer than a cell merge.
pub fn count_nodes(poly: &Poly, lo: &Float, hi: Option<&Float>) -> usize {
    let upper = match hi {
        Some(h) => h.clone(),
        None => match poly.root_bound() {
            Some(b) => b,
            None => return 0,
        },
    };
    if upper <= *lo {
        return 0;
    }
    poly.real_roots_in(lo, &upper, 1024)
        .into_iter()
        .filter(|x| x > lo && *x < upper)
        .count()
}

fn check_degree(n: u32) -> Result<()> {
    if n > MAX_DEGREE {
        return Err(Error::InvalidInput(format!("polynomial degree {n} above the supported maximum {MAX_DEGREE}")));
    }
    Ok(())
}
