//! Dense polynomials with arbitrary-precision coefficients, lowest degree first.

use rug::{Assign, Float};

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Float>,
    prec: u32,
}

impl Poly {
    pub fn zero(prec: u32) -> Self {
        Self { coeffs: Vec::new(), prec }
    }

    pub fn constant(value: &Float) -> Self {
        Self::new(vec![value.clone()], value.prec())
    }

    /// Takes ownership of `coeffs` (lowest degree first); coefficients are
    /// rounded to `prec` and trailing exact zeros dropped.
    pub fn new(coeffs: Vec<Float>, prec: u32) -> Self {
        let coeffs = coeffs
            .into_iter()
            .map(|c| if c.prec() == prec { c } else { Float::with_val(prec, c) })
            .collect();
        let mut p = Self { coeffs, prec };
        p.trim();
        p
    }

    pub fn from_f64(coeffs: &[f64], prec: u32) -> Self {
        Self::new(coeffs.iter().map(|&c| Float::with_val(prec, c)).collect(), prec)
    }

    /// The monomial r^k.
    pub fn monomial(k: usize, prec: u32) -> Self {
        let mut coeffs = vec![Float::new(prec); k + 1];
        coeffs[k].assign(1);
        Self { coeffs, prec }
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Float::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn coeffs(&self) -> &[Float] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Float> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Float {
        self.coeffs.get(k).cloned().unwrap_or_else(|| Float::new(self.prec))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(Float::is_finite)
    }

    /// Largest coefficient magnitude (zero for the zero polynomial).
    pub fn max_abs(&self) -> Float {
        let mut m = Float::new(self.prec);
        for c in &self.coeffs {
            let a = Float::with_val(self.prec, c.abs_ref());
            if a > m {
                m = a;
            }
        }
        m
    }

    pub fn eval(&self, x: &Float) -> Float {
        let prec = self.prec.max(x.prec());
        let mut acc = Float::new(prec);
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64())
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| Float::with_val(self.prec, c * (k as u32)))
            .collect();
        Self::new(coeffs, self.prec)
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let v = match (self.coeffs.get(k), other.coeffs.get(k)) {
                (Some(x), Some(y)) => Float::with_val(prec, x + y),
                (Some(x), None) => Float::with_val(prec, x),
                (None, Some(y)) => Float::with_val(prec, y),
                (None, None) => unreachable!(),
            };
            out.push(v);
        }
        Self::new(out, prec)
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| Float::with_val(self.prec, -c)).collect(), prec: self.prec }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, factor: &Float) -> Self {
        let prec = self.prec.max(factor.prec());
        Self::new(self.coeffs.iter().map(|c| Float::with_val(prec, c * factor)).collect(), prec)
    }

    pub fn scale_i64(&self, factor: i64) -> Self {
        Self::new(self.coeffs.iter().map(|c| Float::with_val(self.prec, c * factor)).collect(), self.prec)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.prec.max(other.prec));
        }
        let prec = self.prec.max(other.prec);
        let mut out = vec![Float::new(prec); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        Self::new(out, prec)
    }

    /// Multiplies by r^k.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut coeffs = vec![Float::new(self.prec); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs, prec: self.prec }
    }

    /// Multiplies by (wall - r)^k.
    pub fn mul_wall(&self, wall: &Float, k: usize) -> Self {
        let mut cur = self.clone();
        for _ in 0..k {
            if cur.is_zero() {
                break;
            }
            let prec = cur.prec.max(wall.prec());
            let mut out = vec![Float::new(prec); cur.coeffs.len() + 1];
            for (i, c) in cur.coeffs.iter().enumerate() {
                out[i] += c * wall;
                out[i + 1] -= c;
            }
            cur = Self::new(out, prec);
        }
        cur
    }

    /// Divides by r^k when the k lowest coefficients are exactly zero;
    /// returns the number of factors removed.
    pub fn strip_origin_factors(&mut self, max: usize) -> usize {
        let zeros = self.coeffs.iter().take(max).take_while(|c| c.is_zero()).count();
        if zeros > 0 && !self.is_zero() {
            self.coeffs.drain(..zeros);
        }
        if self.is_zero() {
            0
        } else {
            zeros
        }
    }

    /// Divides out one factor (wall - r) if `wall` is an exact root.
    pub fn try_divide_wall(&self, wall: &Float) -> Option<Self> {
        let n = self.coeffs.len();
        if n < 2 {
            return None;
        }
        // synthetic division by (r - wall): N(r) = (r - wall) Q(r) + rem
        let prec = self.prec.max(wall.prec());
        let mut q = vec![Float::new(prec); n - 1];
        let mut carry = Float::with_val(prec, &self.coeffs[n - 1]);
        for k in (0..n - 1).rev() {
            q[k].assign(&carry);
            carry *= wall;
            carry += &self.coeffs[k];
        }
        if !carry.is_zero() {
            return None;
        }
        // (R - r) Q' = -(r - R) Q' with Q' = -Q
        Some(Self::new(q.into_iter().map(|c| -c).collect(), prec))
    }

    /// Roots in the open interval (lo, hi), found by a sign-change scan on
    /// `samples` equal sub-intervals followed by bisection. Roots closer
    /// together than a grid cell merge; touching (even-multiplicity) roots
    /// are not detected.
    pub fn real_roots_in(&self, lo: &Float, hi: &Float, samples: usize) -> Vec<Float> {
        let mut roots = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return roots;
        }
        let prec = self.prec.max(lo.prec()).max(hi.prec());
        let width = Float::with_val(prec, hi - lo);
        let point = |i: usize| Float::with_val(prec, lo + Float::with_val(prec, &width * i as u32) / samples as u32);
        let mut x_prev = point(0);
        let mut f_prev = self.eval(&x_prev);
        for i in 1..=samples {
            let x = point(i);
            let f = self.eval(&x);
            let interior_hit = f.is_zero() && i < samples;
            if interior_hit {
                roots.push(x.clone());
            } else if !f_prev.is_zero() && !f.is_zero() && f_prev.is_sign_negative() != f.is_sign_negative() {
                roots.push(self.bisect(x_prev.clone(), x.clone(), f_prev.is_sign_negative()));
            }
            x_prev = x;
            f_prev = f;
        }
        roots
    }

    fn bisect(&self, mut lo: Float, mut hi: Float, lo_negative: bool) -> Float {
        let prec = lo.prec();
        for _ in 0..prec + 8 {
            let mid = Float::with_val(prec, &lo + &hi) / 2u32;
            if mid == lo || mid == hi {
                break;
            }
            let fm = self.eval(&mid);
            if fm.is_zero() {
                return mid;
            }
            if fm.is_sign_negative() == lo_negative {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Float::with_val(prec, &lo + &hi) / 2u32
    }

    /// Cauchy bound: every root satisfies |r| < 1 + max |c_k / c_n|.
    pub fn root_bound(&self) -> Option<Float> {
        let lead = self.coeffs.last()?;
        let mut m = Float::new(self.prec);
        for c in &self.coeffs[..self.coeffs.len() - 1] {
            let ratio = Float::with_val(self.prec, c / lead).abs();
            if ratio > m {
                m = ratio;
            }
        }
        Some(m + 1u32)
    }
}
