//! Asymptotic iteration method.
//!
//! After peeling off the asymptotic factor r^(l+1) exp(-sqrt(b/2) r^2) (and
//! (R - r) under a wall) the radial equation becomes `f'' = lambda0 f' + s0 f`.
//! The iterates
//!
//! ```text
//! lambda_n = lambda_{n-1}' + s_{n-1} + lambda0 lambda_{n-1}
//! s_n      = s_{n-1}'      + s0 lambda_{n-1}
//! ```
//!
//! are built exactly as [`RationalFn`]s for a numeric trial energy, and the
//! eigenvalues are the energies where `delta_n = lambda_n s_{n-1} - lambda_{n-1} s_n`
//! vanishes at the evaluation point r0.

use rug::Float;

use crate::error::{Error, Result};
use crate::oracle;
use crate::poly::Poly;
use crate::precision::PrecisionCtx;
use crate::rational::RationalFn;
use crate::root::{self, Bracket};
use crate::types::{Confinement, EigenResult, LevelLabel, PotentialSpec, SolverKind};

pub const DEFAULT_FREE_R0: f64 = 4.0;
pub const DEFAULT_MAX_ITER: usize = 200;
pub const DEFAULT_SUBDIVISIONS: usize = 64;

/// One radial AIM problem: a potential, an angular momentum, and where and
/// how hard to iterate.
#[derive(Debug, Clone)]
pub struct AimProblem {
    pub spec: PotentialSpec,
    pub l: u32,
    pub r0: Float,
    pub max_iter: usize,
    pub precision: PrecisionCtx,
    /// Sign-scan resolution over the search window.
    pub subdivisions: usize,
}

impl AimProblem {
    /// Default evaluation point: r0 = 4 in free space, R/2 under a wall.
    pub fn new(spec: &PotentialSpec, l: u32, precision: PrecisionCtx) -> Result<Self> {
        spec.require_positive_b()?;
        let bits = precision.mantissa_bits();
        let spec = spec.at_precision(bits);
        let r0 = match &spec.confinement {
            Confinement::Free => Float::with_val(bits, DEFAULT_FREE_R0),
            Confinement::Wall(r) => Float::with_val(bits, r / 2u32),
        };
        Ok(Self { spec, l, r0, max_iter: DEFAULT_MAX_ITER, precision, subdivisions: DEFAULT_SUBDIVISIONS })
    }

    pub fn with_r0(mut self, r0: Float) -> Result<Self> {
        let inside = r0 > 0 && self.spec.confinement.radius().map_or(true, |w| r0 < *w);
        if !inside {
            return Err(Error::Domain {
                r: r0.to_f64().to_string(),
                domain: match self.spec.confinement.radius() {
                    Some(w) => format!("(0, {})", w.to_f64()),
                    None => "(0, inf)".into(),
                },
            });
        }
        self.r0 = Float::with_val(self.precision.mantissa_bits(), r0);
        Ok(self)
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Result<Self> {
        if max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be positive".into()));
        }
        self.max_iter = max_iter;
        Ok(self)
    }

    pub fn with_subdivisions(mut self, subdivisions: usize) -> Self {
        self.subdivisions = subdivisions.max(1);
        self
    }

    fn bits(&self) -> u32 {
        self.precision.mantissa_bits()
    }

    fn f(&self, x: f64) -> Float {
        Float::with_val(self.bits(), x)
    }

    /// lambda0(r); independent of the trial energy.
    pub fn lambda0(&self) -> RationalFn {
        let bits = self.bits();
        let s = self.spec.sqrt_2b();
        let l1 = f64::from(self.l + 1);
        match &self.spec.confinement {
            Confinement::Free => {
                // (2 sqrt(2b) r^2 - 2(l+1)) / r
                let num = vec![self.f(-2.0 * l1), self.f(0.0), Float::with_val(bits, &s * 2u32)];
                RationalFn::new(Poly::new(num, bits), 1, 0, None)
            }
            Confinement::Wall(wall) => {
                // [-2(l+1)(R - r) + 2r + 2 sqrt(2b) r^2 (R - r)] / (r (R - r))
                let c0 = Float::with_val(bits, wall * (-2.0 * l1));
                let c1 = self.f(2.0 * l1 + 2.0);
                let c2 = Float::with_val(bits, &s * wall) * 2u32;
                let c3 = Float::with_val(bits, &s * -2i32);
                RationalFn::new(Poly::new(vec![c0, c1, c2, c3], bits), 1, 1, Some(wall.clone()))
            }
        }
    }

    /// s0(r) at trial energy `e`.
    pub fn s0(&self, e: &Float) -> RationalFn {
        let bits = self.bits();
        let s = self.spec.sqrt_2b();
        let a = &self.spec.a;
        let l = f64::from(self.l);
        match &self.spec.confinement {
            Confinement::Free => {
                // -[(2E - (2l+3) sqrt(2b)) r + 2a] / r
                let slope = Float::with_val(bits, e * 2u32) - Float::with_val(bits, &s * (2.0 * l + 3.0));
                let num = vec![Float::with_val(bits, a * -2i32), -slope];
                RationalFn::new(Poly::new(num, bits), 1, 0, None)
            }
            Confinement::Wall(wall) => {
                // -[c2 r^2 + c1 r + c0] / (r (R - r))
                let c2 = Float::with_val(bits, &s * (2.0 * l + 5.0)) - Float::with_val(bits, e * 2u32);
                let r_s = Float::with_val(bits, wall * &s);
                let c1 = Float::with_val(bits, wall * e) * 2u32
                    - Float::with_val(bits, &r_s * (3.0 + 2.0 * l))
                    - Float::with_val(bits, a * 2u32);
                let c0 = Float::with_val(bits, wall * a) * 2u32 - self.f(2.0 * (l + 1.0));
                let num = vec![-c0, -c1, -c2];
                RationalFn::new(Poly::new(num, bits), 1, 1, Some(wall.clone()))
            }
        }
    }

    fn energy(&self, e: &Float) -> Float {
        Float::with_val(self.bits(), e)
    }
}

/// delta_n(r0; E) at one iteration level.
#[derive(Debug, Clone)]
pub struct DeltaTrace {
    pub iteration: usize,
    pub delta_value: Float,
    pub sign: i8,
}

/// Streams (lambda_n, s_n) for a fixed trial energy.
struct Iterates<'a> {
    problem: &'a AimProblem,
    lambda0: RationalFn,
    s0: RationalFn,
    lambda: RationalFn,
    s: RationalFn,
    n: usize,
}

impl<'a> Iterates<'a> {
    fn new(problem: &'a AimProblem, e: &Float) -> Self {
        let lambda0 = problem.lambda0();
        let s0 = problem.s0(&problem.energy(e));
        Self { problem, lambda: lambda0.clone(), s: s0.clone(), lambda0, s0, n: 0 }
    }

    fn step(&mut self) -> Result<()> {
        let lambda = &(&self.lambda.derivative() + &self.s) + &(&self.lambda0 * &self.lambda);
        let s = &self.s.derivative() + &(&self.s0 * &self.lambda);
        self.n += 1;
        if !lambda.is_finite() || !s.is_finite() {
            return Err(Error::Overflow { iteration: self.n });
        }
        self.lambda = lambda;
        self.s = s;
        Ok(())
    }

    /// Advances one level and returns delta at r0 for the new level.
    fn step_delta(&mut self) -> Result<Float> {
        let r0 = &self.problem.r0;
        let lam_prev = self.lambda.eval(r0)?;
        let s_prev = self.s.eval(r0)?;
        self.step()?;
        let lam = self.lambda.eval(r0)?;
        let s = self.s.eval(r0)?;
        let bits = self.problem.bits();
        let delta = Float::with_val(bits, &lam * &s_prev) - Float::with_val(bits, &lam_prev * &s);
        if !delta.is_finite() {
            return Err(Error::Overflow { iteration: self.n });
        }
        Ok(delta)
    }
}

/// The exact iterates (lambda_n, s_n) at trial energy `e`.
pub fn aim_iterate(problem: &AimProblem, e: &Float, n_target: usize) -> Result<(RationalFn, RationalFn)> {
    if n_target > problem.max_iter {
        return Err(Error::InvalidInput(format!(
            "n_target {n_target} exceeds max_iter {}",
            problem.max_iter
        )));
    }
    if !e.is_finite() {
        return Err(Error::InvalidInput("trial energy must be finite".into()));
    }
    let mut it = Iterates::new(problem, e);
    for _ in 0..n_target {
        it.step()?;
    }
    Ok((it.lambda, it.s))
}

/// delta_n(r0; E) for n >= 1.
pub fn aim_delta(problem: &AimProblem, e: &Float, n: usize) -> Result<Float> {
    if n == 0 {
        return Err(Error::InvalidInput("delta_n needs n >= 1".into()));
    }
    if n > problem.max_iter {
        return Err(Error::InvalidInput(format!("n {n} exceeds max_iter {}", problem.max_iter)));
    }
    if !e.is_finite() {
        return Err(Error::InvalidInput("trial energy must be finite".into()));
    }
    let mut it = Iterates::new(problem, e);
    for _ in 1..n {
        it.step()?;
    }
    it.step_delta()
}

/// delta_1 .. delta_n in a single pass.
pub fn aim_delta_trace(problem: &AimProblem, e: &Float, n: usize) -> Result<Vec<DeltaTrace>> {
    let mut it = Iterates::new(problem, e);
    let mut out = Vec::with_capacity(n);
    for iteration in 1..=n.min(problem.max_iter) {
        let delta_value = it.step_delta()?;
        let sign = if delta_value.is_zero() {
            0
        } else if delta_value.is_sign_negative() {
            -1
        } else {
            1
        };
        out.push(DeltaTrace { iteration, delta_value, sign });
    }
    Ok(out)
}

/// Sign scan of delta_n over `window`, returning the `which`-th (1-based)
/// sign-change bracket in ascending order.
fn scan_window(problem: &AimProblem, n: usize, lo: &Float, hi: &Float, which: usize) -> Result<Option<Bracket>> {
    let bits = problem.bits();
    let m = problem.subdivisions as u32;
    let width = Float::with_val(bits, hi - lo);
    let mut x_prev = Float::with_val(bits, lo);
    let mut f_prev = aim_delta(problem, &x_prev, n)?;
    let mut found = 0;
    for i in 1..=m {
        let x = if i == m {
            Float::with_val(bits, hi)
        } else {
            Float::with_val(bits, lo + Float::with_val(bits, &width * i) / m)
        };
        let fx = aim_delta(problem, &x, n)?;
        if fx.is_zero() {
            // exact root on a grid node: report a degenerate bracket
            found += 1;
            if found == which {
                return Ok(Some(Bracket { lo: x.clone(), hi: x, f_lo: fx.clone(), f_hi: fx }));
            }
        } else if root::opposite_signs(&f_prev, &fx) {
            found += 1;
            if found == which {
                return Ok(Some(Bracket { lo: x_prev, hi: x, f_lo: f_prev, f_hi: fx }));
            }
        }
        x_prev = x;
        f_prev = fx;
    }
    Ok(None)
}

/// Looks for a sign change of delta_n in a small interval around `center`.
fn track(problem: &AimProblem, n: usize, center: &Float, half_width: &Float, window: (&Float, &Float)) -> Result<Option<Bracket>> {
    let bits = problem.bits();
    let mut w = Float::with_val(bits, half_width);
    for _ in 0..4 {
        let lo = Float::with_val(bits, center - &w).max(window.0);
        let hi = Float::with_val(bits, center + &w).min(window.1);
        let f_lo = aim_delta(problem, &lo, n)?;
        let f_hi = aim_delta(problem, &hi, n)?;
        if f_lo.is_zero() {
            return Ok(Some(Bracket { lo: lo.clone(), hi: lo, f_lo: f_lo.clone(), f_hi: f_lo }));
        }
        if f_hi.is_zero() {
            return Ok(Some(Bracket { lo: hi.clone(), hi, f_lo: f_hi.clone(), f_hi }));
        }
        if root::opposite_signs(&f_lo, &f_hi) {
            return Ok(Some(Bracket { lo, hi, f_lo, f_hi }));
        }
        w *= 8u32;
    }
    Ok(None)
}

/// The `which`-th eigenvalue (ascending, 1-based) of the termination
/// condition inside `window`.
///
/// For n = 1, 2, ... the root of delta_n is located (coarse sign scan, then
/// bracket refinement to well below `tol`); once the root has settled it is
/// tracked from one level to the next instead of rescanning. The solve stops
/// at the first level whose root moved by less than `tol`; the reported
/// iteration count is the smaller of the two levels.
pub fn aim_solve(problem: &AimProblem, window: (&Float, &Float), which: usize) -> Result<EigenResult> {
    let bits = problem.bits();
    let (lo, hi) = (Float::with_val(bits, window.0), Float::with_val(bits, window.1));
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::InvalidInput("search window must be a finite, non-empty interval".into()));
    }
    if which == 0 {
        return Err(Error::InvalidInput("root ordinal is 1-based".into()));
    }
    let tol = problem.precision.tol_float();
    let fine_tol = Float::with_val(bits, &tol / 16u32);
    let cell = Float::with_val(bits, &hi - &lo) / problem.subdivisions as u32;
    let lock = Float::with_val(bits, &cell / 4u32);

    let mut prev: Option<Float> = None;
    let mut prev_change: Option<Float> = None;
    let mut found_any = false;

    for n in 1..=problem.max_iter {
        let mut bracket = None;
        if let (Some(p), Some(ch)) = (&prev, &prev_change) {
            if *ch < lock {
                let half = Float::with_val(bits, ch * 4u32).max(&Float::with_val(bits, &tol * 4u32));
                bracket = track(problem, n, p, &half, (&lo, &hi))?;
            }
        }
        if bracket.is_none() {
            bracket = scan_window(problem, n, &lo, &hi, which)?;
        }
        let Some(bracket) = bracket else {
            prev = None;
            prev_change = None;
            continue;
        };
        found_any = true;
        let refined = root::refine(|e| aim_delta(problem, e, n), bracket, &fine_tol)?;
        let energy = refined.midpoint();
        if let Some(p) = &prev {
            let change = Float::with_val(bits, &energy - p).abs();
            if change < tol {
                return Ok(EigenResult {
                    energy,
                    label: None,
                    solver: SolverKind::Aim,
                    iterations: n - 1,
                    precision_used: problem.precision,
                    bracket: (refined.lo, refined.hi),
                });
            }
            prev_change = Some(change);
        }
        prev = Some(energy);
    }

    if found_any {
        Err(Error::PrecisionExhausted {
            iterations: problem.max_iter,
            last_change: prev_change.map_or_else(|| "n/a".into(), |c| format!("{:e}", c.to_f64())),
        })
    } else {
        Err(Error::NoRootFound { lo: lo.to_f64().to_string(), hi: hi.to_f64().to_string(), iterations: problem.max_iter })
    }
}

/// Knobs for [`aim_solve_level`].
#[derive(Debug, Clone)]
pub struct AimOptions {
    pub precision: PrecisionCtx,
    pub r0: Option<Float>,
    pub max_iter: usize,
    /// Explicit search window; by default a narrow window around the grid
    /// oracle's estimate of the requested level.
    pub window: Option<(Float, Float)>,
}

impl Default for AimOptions {
    fn default() -> Self {
        Self { precision: PrecisionCtx::default(), r0: None, max_iter: DEFAULT_MAX_ITER, window: None }
    }
}

/// Half-width of the AIM window around an oracle estimate.
fn seed_half_width(estimate: f64) -> f64 {
    1e-4 * estimate.abs().max(1.0)
}

/// Solves for a labelled level. Without an explicit window the grid oracle
/// supplies a double-precision estimate, and AIM looks for the single root of
/// the termination condition within 1e-4 (relative) of it.
pub fn aim_solve_level(spec: &PotentialSpec, label: LevelLabel, opts: &AimOptions) -> Result<EigenResult> {
    let mut problem = AimProblem::new(spec, label.l, opts.precision)?.with_max_iter(opts.max_iter)?;
    if let Some(r0) = &opts.r0 {
        problem = problem.with_r0(r0.clone())?;
    }
    let bits = opts.precision.mantissa_bits();
    let (lo, hi, which) = match &opts.window {
        Some((lo, hi)) => (Float::with_val(bits, lo), Float::with_val(bits, hi), 1),
        None => {
            let seed = oracle::solve_level(spec, label)?.energy_f64();
            let w = seed_half_width(seed);
            (Float::with_val(bits, seed - w), Float::with_val(bits, seed + w), 1)
        }
    };
    let mut result = aim_solve(&problem, (&lo, &hi), which)?;
    result.label = Some(label);
    Ok(result)
}
