use std::fmt;
use std::str::FromStr;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precision::{parse_float, PrecisionCtx};

/// Hard-wall boundary condition.
#[derive(Debug, Clone, PartialEq)]
pub enum Confinement {
    Free,
    /// Impenetrable sphere of radius R (atomic units).
    Wall(Float),
}

impl Confinement {
    pub fn radius(&self) -> Option<&Float> {
        match self {
            Confinement::Free => None,
            Confinement::Wall(r) => Some(r),
        }
    }

    pub fn radius_f64(&self) -> Option<f64> {
        self.radius().map(Float::to_f64)
    }

    pub fn is_free(&self) -> bool {
        matches!(self, Confinement::Free)
    }
}

/// V(r) = -a/r + b r^2, optionally confined to r < R.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub a: Float,
    pub b: Float,
    pub confinement: Confinement,
}

impl PotentialSpec {
    /// Builds a spec from doubles; fine whenever the doubles are the intended
    /// values (0.5, 1, 100 ...). Use [`PotentialSpec::parse`] for decimal
    /// inputs such as 0.1.
    pub fn new(a: f64, b: f64, radius: Option<f64>, bits: u32) -> Result<Self> {
        let confinement = match radius {
            None => Confinement::Free,
            Some(r) => Confinement::Wall(Float::with_val(bits, r)),
        };
        Self::from_parts(Float::with_val(bits, a), Float::with_val(bits, b), confinement)
    }

    pub fn free(a: f64, b: f64) -> Self {
        Self::new(a, b, None, 256).expect("finite couplings")
    }

    pub fn wall(a: f64, b: f64, radius: f64) -> Self {
        Self::new(a, b, Some(radius), 256).expect("positive radius")
    }

    pub fn parse(a: &str, b: &str, radius: Option<&str>, bits: u32) -> Result<Self> {
        let confinement = match radius {
            None => Confinement::Free,
            Some(r) => Confinement::Wall(parse_float(bits, r)?),
        };
        Self::from_parts(parse_float(bits, a)?, parse_float(bits, b)?, confinement)
    }

    pub fn from_parts(a: Float, b: Float, confinement: Confinement) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidInput("couplings must be finite".into()));
        }
        if b.is_sign_negative() && !b.is_zero() {
            return Err(Error::InvalidInput(format!("b must be non-negative, got {}", b.to_f64())));
        }
        if let Confinement::Wall(r) = &confinement {
            if !r.is_finite() || *r <= 0 {
                return Err(Error::InvalidInput(format!("wall radius must be positive, got {}", r.to_f64())));
            }
        }
        Ok(Self { a, b, confinement })
    }

    pub fn with_b(&self, b: Float) -> Result<Self> {
        Self::from_parts(self.a.clone(), b, self.confinement.clone())
    }

    pub fn with_a(&self, a: Float) -> Result<Self> {
        Self::from_parts(a, self.b.clone(), self.confinement.clone())
    }

    pub fn with_confinement(&self, confinement: Confinement) -> Result<Self> {
        Self::from_parts(self.a.clone(), self.b.clone(), confinement)
    }

    /// AIM and the quasi-exact machinery need a Gaussian tail.
    pub fn require_positive_b(&self) -> Result<()> {
        if self.b <= 0 {
            return Err(Error::InvalidInput(format!(
                "b must be strictly positive for this solver, got {}",
                self.b.to_f64()
            )));
        }
        Ok(())
    }

    /// sqrt(2b) at the precision of `b`.
    pub fn sqrt_2b(&self) -> Float {
        let two_b = Float::with_val(self.b.prec(), &self.b * 2u32);
        two_b.sqrt()
    }

    pub fn a_f64(&self) -> f64 {
        self.a.to_f64()
    }

    pub fn b_f64(&self) -> f64 {
        self.b.to_f64()
    }

    /// Raises every field to at least `bits` of mantissa.
    pub fn at_precision(&self, bits: u32) -> Self {
        let lift = |x: &Float| Float::with_val(bits.max(x.prec()), x);
        Self {
            a: lift(&self.a),
            b: lift(&self.b),
            confinement: match &self.confinement {
                Confinement::Free => Confinement::Free,
                Confinement::Wall(r) => Confinement::Wall(lift(r)),
            },
        }
    }
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a={} b={}", self.a.to_f64(), self.b.to_f64())?;
        match &self.confinement {
            Confinement::Free => write!(f, " R=inf"),
            Confinement::Wall(r) => write!(f, " R={}", r.to_f64()),
        }
    }
}

const ORBITAL_LETTERS: [char; 11] = ['s', 'p', 'd', 'f', 'g', 'h', 'i', 'k', 'l', 'm', 'n'];

/// A bound state labelled by radial node count and angular momentum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LevelLabel {
    pub n: u32,
    pub l: u32,
}

impl LevelLabel {
    pub const fn new(n: u32, l: u32) -> Self {
        Self { n, l }
    }

    /// Label from the principal number nu = n + l + 1.
    pub fn from_principal(nu: u32, l: u32) -> Result<Self> {
        if nu < l + 1 {
            return Err(Error::InvalidInput(format!("principal number {nu} too small for l = {l}")));
        }
        Ok(Self { n: nu - l - 1, l })
    }

    pub fn principal(&self) -> u32 {
        self.n + self.l + 1
    }

    pub fn letter(&self) -> Option<char> {
        ORBITAL_LETTERS.get(self.l as usize).copied()
    }

    /// Spectroscopic name such as `3d`.
    pub fn name(&self) -> String {
        match self.letter() {
            Some(c) => format!("{}{}", self.principal(), c),
            None => format!("{}[l={}]", self.principal(), self.l),
        }
    }

    /// All labels with principal number up to `max_nu` and l up to `max_l`,
    /// ordered by (nu, l).
    pub fn up_to(max_nu: u32, max_l: u32) -> Vec<Self> {
        let mut out = Vec::new();
        for nu in 1..=max_nu {
            for l in 0..nu.min(max_l + 1) {
                out.push(Self { n: nu - l - 1, l });
            }
        }
        out
    }
}

impl fmt::Display for LevelLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for LevelLabel {
    type Err = Error;

    /// Accepts spectroscopic names (`4f`) or `n,l` pairs (`1,0`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, l)) = s.split_once(',') {
            let n = n.trim().parse().map_err(|_| Error::InvalidInput(format!("bad node count in '{s}'")))?;
            let l = l.trim().parse().map_err(|_| Error::InvalidInput(format!("bad l in '{s}'")))?;
            return Ok(Self { n, l });
        }
        let letter = s.chars().last().ok_or_else(|| Error::InvalidInput("empty level label".into()))?;
        let l = ORBITAL_LETTERS
            .iter()
            .position(|&c| c == letter.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidInput(format!("unknown orbital letter in '{s}'")))? as u32;
        let nu: u32 = s[..s.len() - letter.len_utf8()]
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad principal number in '{s}'")))?;
        Self::from_principal(nu, l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolverKind {
    Aim,
    Exact,
    GridOracle,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Aim => "aim",
            SolverKind::Exact => "exact",
            SolverKind::GridOracle => "oracle",
        })
    }
}

/// A converged eigenvalue together with how it was obtained.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub energy: Float,
    pub label: Option<LevelLabel>,
    pub solver: SolverKind,
    /// AIM iteration count N, or the number of grid refinements.
    pub iterations: usize,
    pub precision_used: PrecisionCtx,
    pub bracket: (Float, Float),
}

impl EigenResult {
    pub fn energy_f64(&self) -> f64 {
        self.energy.to_f64()
    }

    pub fn bracket_width(&self) -> Float {
        Float::with_val(self.energy.prec(), &self.bracket.1 - &self.bracket.0)
    }
}
