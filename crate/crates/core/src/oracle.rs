//! Finite-difference reference solver in double precision.
//!
//! Three-point Laplacian on a uniform radial grid, Sturm-sequence bisection
//! for individual eigenvalues, and a Richardson table over grid doublings.
//! Accuracy is around 1e-9 absolute for well-resolved levels, which is what
//! the cross-checks against the arbitrary-precision solvers need.

use rug::Float;

use crate::error::{Error, Result};
use crate::precision::PrecisionCtx;
use crate::types::{Confinement, EigenResult, LevelLabel, PotentialSpec, SolverKind};

/// Radial problem restricted to (0, domain_end) with Dirichlet ends.
#[derive(Debug, Clone, PartialEq)]
pub struct GridProblem {
    pub a: f64,
    pub b: f64,
    pub l: u32,
    pub domain_end: f64,
    /// Interior grid points M; h = domain_end / (M + 1).
    pub points: usize,
}

impl GridProblem {
    pub fn new(spec: &PotentialSpec, l: u32, domain_end: f64, points: usize) -> Result<Self> {
        if !(domain_end.is_finite() && domain_end > 0.0) {
            return Err(Error::InvalidInput(format!("domain end must be positive, got {domain_end}")));
        }
        if points < 16 {
            return Err(Error::InvalidInput(format!("need at least 16 grid points, got {points}")));
        }
        Ok(Self { a: spec.a_f64(), b: spec.b_f64(), l, domain_end, points })
    }

    pub fn h(&self) -> f64 {
        self.domain_end / (self.points + 1) as f64
    }

    pub fn v_eff(&self, r: f64) -> f64 {
        let l = f64::from(self.l);
        l * (l + 1.0) / (2.0 * r * r) - self.a / r + self.b * r * r
    }
}

/// Symmetric tridiagonal matrix: `diag` of length M, `off` of length M - 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0f64;
        for i in 0..self.diag.len() {
            let e2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = self.diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs() + f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let m = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..m {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < m { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Solves (T - shift) x = rhs by Gaussian elimination without pivoting.
    fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Vec<f64> {
        let m = self.diag.len();
        let mut c = vec![0.0; m];
        let mut d = vec![0.0; m];
        let tiny = 1e-300;
        let mut piv = self.diag[0] - shift;
        if piv.abs() < tiny {
            piv = tiny;
        }
        c[0] = if m > 1 { self.off[0] / piv } else { 0.0 };
        d[0] = rhs[0] / piv;
        for i in 1..m {
            let mut piv = self.diag[i] - shift - self.off[i - 1] * c[i - 1];
            if piv.abs() < tiny {
                piv = tiny;
            }
            c[i] = if i + 1 < m { self.off[i] / piv } else { 0.0 };
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / piv;
        }
        let mut x = d;
        for i in (0..m - 1).rev() {
            let next = x[i + 1];
            x[i] -= c[i] * next;
        }
        x
    }
}

pub fn discretize(problem: &GridProblem) -> Tridiagonal {
    let h = problem.h();
    let inv_h2 = 1.0 / (h * h);
    let diag = (1..=problem.points).map(|i| inv_h2 + problem.v_eff(i as f64 * h)).collect();
    let off = vec![-0.5 * inv_h2; problem.points - 1];
    Tridiagonal { diag, off }
}

/// k-th smallest eigenvalue (1-based) by Sturm bisection.
pub fn eig_k(matrix: &Tridiagonal, k: usize) -> Result<f64> {
    if k == 0 || k > matrix.len() {
        return Err(Error::InvalidInput(format!("eigenvalue index {k} outside 1..={}", matrix.len())));
    }
    let (mut lo, mut hi) = matrix.gershgorin();
    let pad = 1e-12 * (lo.abs() + hi.abs()) + 1e-300;
    lo -= pad;
    hi += pad;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if matrix.count_below(mid) >= k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Eigenvector for an eigenvalue by inverse iteration, normalised to unit
/// maximum magnitude.
pub fn eigenvector(matrix: &Tridiagonal, eigenvalue: f64) -> Vec<f64> {
    let m = matrix.len();
    let scale = matrix.gershgorin().1.abs().max(1.0);
    let shift = eigenvalue + 1e-13 * scale;
    let mut x = vec![1.0; m];
    for _ in 0..4 {
        let mut y = matrix.solve_shifted(shift, &x);
        let norm = y.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if !(norm.is_finite() && norm > 0.0) {
            break;
        }
        y.iter_mut().for_each(|v| *v /= norm);
        x = y;
    }
    x
}

/// Interior sign changes of a grid function; entries below `1e-8` of the
/// peak are treated as zero so that decaying tails do not flicker.
pub fn count_sign_changes(v: &[f64]) -> usize {
    let peak = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let floor = 1e-8 * peak;
    let mut last = 0i8;
    let mut changes = 0;
    for &x in v {
        let s = if x > floor {
            1
        } else if x < -floor {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}

/// Richardson-extrapolated grid eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridEstimate {
    pub energy: f64,
    /// Difference between the two most refined extrapolants.
    pub error_estimate: f64,
    pub domain_end: f64,
    pub finest_points: usize,
    pub refinements: usize,
}

/// Tuning for [`solve_level_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Grid doublings in the Richardson table.
    pub levels: usize,
    /// Coarsest grid has at least this many intervals.
    pub min_intervals: usize,
    /// Accepted extrapolation error (relative to max(1, |E|)).
    pub tol: f64,
    /// Stop growing the free-space box once E moves less than this.
    pub domain_tol: f64,
    pub max_domain_doublings: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { levels: 4, min_intervals: 256, tol: 1e-7, domain_tol: 1e-9, max_domain_doublings: 6 }
    }
}

/// Coarsest spacing: resolve the Coulomb length 1/|a|, the oscillator length
/// b^(-1/4), the node spacing and the local wavelength at the energy scale.
fn coarse_spacing(a: f64, b: f64, n: u32, domain_end: f64, energy_scale: f64, opts: &OracleOptions) -> f64 {
    let mut h = domain_end / opts.min_intervals as f64;
    if a != 0.0 {
        h = h.min(0.05 / a.abs());
    }
    if b > 0.0 {
        h = h.min(0.05 * b.powf(-0.25));
    }
    h = h.min(domain_end / (32.0 * f64::from(n + 1)));
    if energy_scale > 0.0 {
        let k = (2.0 * energy_scale).sqrt();
        h = h.min(0.2 / k);
    }
    h
}

/// Richardson table over `levels` grids with (M + 1) doubling each time.
pub fn richardson(a: f64, b: f64, l: u32, k: usize, domain_end: f64, intervals: usize, levels: usize) -> Result<GridEstimate> {
    let levels = levels.max(2);
    let mut row = Vec::with_capacity(levels);
    let mut finest = 0;
    for i in 0..levels {
        let m = intervals * (1usize << i) - 1;
        let problem = GridProblem { a, b, l, domain_end, points: m };
        row.push(eig_k(&discretize(&problem), k)?);
        finest = m;
    }
    let mut table = vec![row];
    for j in 1..levels {
        let factor = 4f64.powi(j as i32);
        let prev = table.last().expect("non-empty");
        let next: Vec<f64> = prev.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
        table.push(next);
    }
    let last = table[levels - 1][0];
    let before = *table[levels - 2].last().expect("two entries");
    Ok(GridEstimate { energy: last, error_estimate: (last - before).abs(), domain_end, finest_points: finest, refinements: levels })
}

/// Distance beyond which a state of energy `e` has decayed by exp(-30)
/// under the WKB estimate, or `None` if `e` is not below the asymptote.
fn wkb_extent(a: f64, b: f64, l: u32, e: f64) -> Option<f64> {
    let lf = f64::from(l);
    let v = |r: f64| lf * (lf + 1.0) / (2.0 * r * r) - a / r + b * r * r;
    if b <= 0.0 && e >= 0.0 {
        return None;
    }
    // outermost classical turning point, bracketed on a geometric grid
    let mut last_inside = None;
    let mut r = 1e-4f64;
    while r < 1e7 {
        if v(r) < e {
            last_inside = Some(r);
        }
        r *= 1.05;
    }
    let mut lo = last_inside?;
    let mut hi = lo * 1.05;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if v(mid) < e {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let turning = hi;
    let step = turning.max(1.0) / 200.0;
    let mut action = 0.0;
    let mut x = turning;
    while action < 30.0 {
        let kappa = (2.0 * (v(x) - e)).max(0.0).sqrt();
        action += kappa * step;
        x += step;
        if x > 1e7 {
            return None;
        }
    }
    Some(x)
}

fn level_index(label: LevelLabel) -> usize {
    label.n as usize + 1
}

/// Oracle energy for one labelled level.
pub fn solve_level(spec: &PotentialSpec, label: LevelLabel) -> Result<EigenResult> {
    solve_level_with(spec, label, &OracleOptions::default())
}

pub fn solve_level_with(spec: &PotentialSpec, label: LevelLabel, opts: &OracleOptions) -> Result<EigenResult> {
    let est = estimate_level(spec, label, opts)?;
    Ok(to_result(est, label))
}

fn to_result(est: GridEstimate, label: LevelLabel) -> EigenResult {
    let bits = 64;
    let half = est.error_estimate.max(f64::EPSILON * est.energy.abs());
    let tol = (2.0 * half).max(1e-15);
    EigenResult {
        energy: Float::with_val(bits, est.energy),
        label: Some(label),
        solver: SolverKind::GridOracle,
        iterations: est.refinements,
        precision_used: PrecisionCtx::new(bits, tol).expect("valid oracle tolerance"),
        bracket: (Float::with_val(bits, est.energy - half), Float::with_val(bits, est.energy + half)),
    }
}

/// The extrapolated estimate with its grid metadata.
pub fn estimate_level(spec: &PotentialSpec, label: LevelLabel, opts: &OracleOptions) -> Result<GridEstimate> {
    let (a, b) = (spec.a_f64(), spec.b_f64());
    let l = label.l;
    let k = level_index(label);
    let check = |est: GridEstimate| -> Result<GridEstimate> {
        if !(est.error_estimate <= opts.tol * est.energy.abs().max(1.0)) {
            return Err(Error::NotConverged(format!(
                "level {label}: extrapolation residual {:.2e} at {} grid points",
                est.error_estimate, est.finest_points
            )));
        }
        Ok(est)
    };
    match &spec.confinement {
        Confinement::Wall(r) => {
            let r = r.to_f64();
            // kinetic scale of the box sets the wavelength to resolve
            let scale = (f64::from(label.n + 1) * std::f64::consts::PI / r).powi(2) + f64::from(l * (l + 1)) / (r * r);
            let h = coarse_spacing(a, b, label.n, r, scale, opts);
            let intervals = (r / h).ceil() as usize;
            check(richardson(a, b, l, k, r, intervals, opts.levels)?)
        }
        Confinement::Free => {
            if b <= 0.0 && a <= 0.0 {
                return Err(Error::NoSolution(format!("no bound states for a = {a}, b = {b}")));
            }
            let mut domain = initial_free_domain(a, b, label)?;
            let mut prev: Option<GridEstimate> = None;
            for _ in 0..=opts.max_domain_doublings {
                let energy_scale = prev.map_or(0.0, |p| p.energy.abs());
                let h = coarse_spacing(a, b, label.n, domain, energy_scale, opts);
                let intervals = (domain / h).ceil() as usize;
                let est = richardson(a, b, l, k, domain, intervals, opts.levels)?;
                if let Some(p) = prev {
                    if (est.energy - p.energy).abs() < opts.domain_tol {
                        return check(est);
                    }
                }
                prev = Some(est);
                domain *= 2.0;
            }
            Err(Error::NotConverged(format!("level {label}: energy still moving as the box grows past r = {domain}")))
        }
    }
}

/// Box size from a coarse solve and the WKB decay length at that energy.
fn initial_free_domain(a: f64, b: f64, label: LevelLabel) -> Result<f64> {
    let nu = f64::from(label.principal());
    let mut domain = if b > 0.0 { 4.0 * b.powf(-0.25) * nu.sqrt() } else { 4.0 * nu * nu / a };
    if a > 0.0 {
        domain = domain.max(2.0 * nu * nu / a);
    }
    for _ in 0..20 {
        let m = 800usize.max(64 * (label.n as usize + 1));
        let problem = GridProblem { a, b, l: label.l, domain_end: domain, points: m };
        let e = eig_k(&discretize(&problem), level_index(label))?;
        match wkb_extent(a, b, label.l, e) {
            Some(extent) if extent <= domain => return Ok(domain),
            Some(extent) => domain = 1.2 * extent,
            None => domain *= 2.0,
        }
    }
    Err(Error::NotConverged(format!("could not size a box for level {label}")))
}
