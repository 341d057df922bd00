//! Exact rational functions whose only poles sit at r = 0 and at the wall
//! r = R. The AIM iterates live in this class: the recurrence only
//! differentiates, adds and multiplies, and none of those introduce new poles.

use std::ops::{Add, Mul, Neg, Sub};

use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::poly::Poly;

/// `N(r) / (r^p (R - r)^q)`, with `q = 0` whenever there is no wall.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFn {
    numerator: Poly,
    pole_origin: u32,
    pole_wall: u32,
    wall: Option<Float>,
}

impl RationalFn {
    pub fn new(numerator: Poly, pole_origin: u32, pole_wall: u32, wall: Option<Float>) -> Self {
        assert!(
            wall.is_some() || pole_wall == 0,
            "a pole at the wall needs a wall radius"
        );
        let mut f = Self { numerator, pole_origin, pole_wall, wall };
        f.canonicalize();
        f
    }

    pub fn polynomial(p: Poly, wall: Option<Float>) -> Self {
        Self::new(p, 0, 0, wall)
    }

    pub fn zero(prec: u32, wall: Option<Float>) -> Self {
        Self::new(Poly::zero(prec), 0, 0, wall)
    }

    pub fn numerator(&self) -> &Poly {
        &self.numerator
    }

    pub fn pole_order_origin(&self) -> u32 {
        self.pole_origin
    }

    pub fn pole_order_wall(&self) -> u32 {
        self.pole_wall
    }

    pub fn wall_radius(&self) -> Option<&Float> {
        self.wall.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.numerator.is_finite()
    }

    fn prec(&self) -> u32 {
        self.numerator.prec()
    }

    /// Cancels exact factors of r and (R - r) shared by numerator and
    /// denominator.
    fn canonicalize(&mut self) {
        if self.numerator.is_zero() {
            self.pole_origin = 0;
            self.pole_wall = 0;
            return;
        }
        let removed = self.numerator.strip_origin_factors(self.pole_origin as usize);
        self.pole_origin -= removed as u32;
        if let Some(wall) = &self.wall {
            while self.pole_wall > 0 {
                match self.numerator.try_divide_wall(wall) {
                    Some(q) => {
                        self.numerator = q;
                        self.pole_wall -= 1;
                    }
                    None => break,
                }
            }
        }
    }

    fn check_same_wall(&self, other: &Self) {
        assert!(
            self.wall == other.wall,
            "rational functions with different wall radii cannot be combined"
        );
    }

    /// Numerator rewritten over the larger denominator r^p (R - r)^q.
    fn lifted(&self, p: u32, q: u32) -> Poly {
        let shifted = self.numerator.shift((p - self.pole_origin) as usize);
        match &self.wall {
            Some(w) if q > self.pole_wall => shifted.mul_wall(w, (q - self.pole_wall) as usize),
            _ => shifted,
        }
    }

    /// Exact derivative. Each pole order grows by at most one.
    pub fn derivative(&self) -> Self {
        let p = self.pole_origin;
        let q = self.pole_wall;
        let n = &self.numerator;
        let mut dn = n.derivative();
        if p > 0 {
            dn = dn.shift(1);
        }
        let mut num = dn;
        if q > 0 {
            let wall = self.wall.as_ref().expect("wall pole without wall");
            num = num.mul_wall(wall, 1);
        }
        if p > 0 {
            // -p N (R - r)^[q>0]
            let mut term = n.scale_i64(-i64::from(p));
            if q > 0 {
                term = term.mul_wall(self.wall.as_ref().expect("wall"), 1);
            }
            num = num.add(&term);
        }
        if q > 0 {
            // +q N r^[p>0]
            let mut term = n.scale_i64(i64::from(q));
            if p > 0 {
                term = term.shift(1);
            }
            num = num.add(&term);
        }
        Self::new(num, p + u32::from(p > 0), q + u32::from(q > 0), self.wall.clone())
    }

    /// Evaluates at `r` inside (0, R), or (0, inf) without a wall.
    pub fn eval(&self, r: &Float) -> Result<Float> {
        let prec = self.prec().max(r.prec());
        if *r <= 0 || self.wall.as_ref().is_some_and(|w| r >= w) {
            return Err(Error::Domain {
                r: r.to_f64().to_string(),
                domain: match &self.wall {
                    Some(w) => format!("(0, {})", w.to_f64()),
                    None => "(0, inf)".into(),
                },
            });
        }
        let mut value = self.numerator.eval(r);
        if self.pole_origin > 0 {
            let rp = Float::with_val(prec, r.pow(self.pole_origin));
            value /= rp;
        }
        if self.pole_wall > 0 {
            let gap = Float::with_val(prec, self.wall.as_ref().expect("wall") - r);
            let gq = Float::with_val(prec, (&gap).pow(self.pole_wall));
            value /= gq;
        }
        Ok(value)
    }

    pub fn scale(&self, factor: &Float) -> Self {
        Self::new(self.numerator.scale(factor), self.pole_origin, self.pole_wall, self.wall.clone())
    }
}

impl Add for &RationalFn {
    type Output = RationalFn;

    fn add(self, rhs: &RationalFn) -> RationalFn {
        self.check_same_wall(rhs);
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        let p = self.pole_origin.max(rhs.pole_origin);
        let q = self.pole_wall.max(rhs.pole_wall);
        let num = self.lifted(p, q).add(&rhs.lifted(p, q));
        RationalFn::new(num, p, q, self.wall.clone())
    }
}

impl Neg for &RationalFn {
    type Output = RationalFn;

    fn neg(self) -> RationalFn {
        RationalFn { numerator: self.numerator.neg(), ..self.clone() }
    }
}

impl Sub for &RationalFn {
    type Output = RationalFn;

    fn sub(self, rhs: &RationalFn) -> RationalFn {
        self + &(-rhs)
    }
}

impl Mul for &RationalFn {
    type Output = RationalFn;

    fn mul(self, rhs: &RationalFn) -> RationalFn {
        self.check_same_wall(rhs);
        RationalFn::new(
            self.numerator.mul(&rhs.numerator),
            self.pole_origin + rhs.pole_origin,
            self.pole_wall + rhs.pole_wall,
            self.wall.clone(),
        )
    }
}

/// Free-function form of [`RationalFn::derivative`].
pub fn rf_derivative(f: &RationalFn) -> RationalFn {
    f.derivative()
}

/// Free-function form of [`RationalFn::eval`].
pub fn rf_eval(f: &RationalFn, r0: &Float) -> Result<Float> {
    f.eval(r0)
}
