//! Conditions under a hard wall.
//!
//! Matching powers of r in the reduced equation with E = (n + l + 5/2) s,
//! s = sqrt(2b), gives for every m
//!
//! ```text
//! R(m+1)(m+2l+2) c_{m+1} + [2Ra - (m+1)(m+2l+2)] c_m
//!     + [2Rs(n-m+2) - 2a] c_{m-1} - 2s(n-m+2) c_{m-2} = 0.
//! ```
//!
//! Rows 0..n-1 fix c_1..c_n from c_0 = 1; rows n and n+1 are the two
//! constraints on (a, b, R). Written in x = aR and y = sR^2 they no longer
//! depend on R, so they are solved once in the (x, y) plane and mapped back
//! to whichever coupling is held fixed.

use rug::Float;

use super::{check_degree, count_nodes, FixedParam, QESCondition};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::precision::PrecisionCtx;
use crate::types::LevelLabel;

/// Energy of a degree-n confined quasi-exact state: (n + l + 5/2) sqrt(2b).
pub fn confined_qes_energy(n: u32, l: u32, b: &Float) -> Result<Float> {
    if *b <= 0 {
        return Err(Error::InvalidInput("b must be positive".into()));
    }
    let s = Float::with_val(b.prec(), b * 2u32).sqrt();
    Ok(s * (f64::from(n + l) + 2.5))
}

fn row_coeffs(m: u32, n: u32, l: u32) -> (f64, i64) {
    let lead = f64::from((m + 1) * (m + 2 * l + 2));
    (lead, i64::from(n) - i64::from(m) + 2)
}

/// Dimensionless residuals (rows n and n+1) in double precision.
fn residuals_f64(x: f64, y: f64, n: u32, l: u32) -> [f64; 2] {
    let mut d = vec![1.0f64];
    let at = |d: &[f64], k: i64| if k >= 0 && (k as usize) < d.len() { d[k as usize] } else { 0.0 };
    let mut out = [0.0; 2];
    for m in 0..=n + 1 {
        let (lead, w) = row_coeffs(m, n, l);
        let mi = i64::from(m);
        let w = w as f64;
        let rest = (2.0 * x - lead) * at(&d, mi) + (2.0 * y * w - 2.0 * x) * at(&d, mi - 1) - 2.0 * y * w * at(&d, mi - 2);
        if m < n {
            d.push(-rest / lead);
        } else {
            out[(m - n) as usize] = rest;
        }
    }
    out
}

/// Dimensionless residuals and their Jacobian at working precision.
struct Eval {
    f: [Float; 2],
    jac: [[Float; 2]; 2],
}

fn evaluate(x: &Float, y: &Float, n: u32, l: u32) -> Eval {
    let prec = x.prec().max(y.prec());
    let zero = || Float::new(prec);
    let mut d = vec![Float::with_val(prec, 1)];
    let mut dx = vec![zero()];
    let mut dy = vec![zero()];
    let get = |v: &[Float], k: i64| -> Float {
        if k >= 0 && (k as usize) < v.len() {
            v[k as usize].clone()
        } else {
            Float::new(prec)
        }
    };
    let mut f = [zero(), zero()];
    let mut jac = [[zero(), zero()], [zero(), zero()]];
    for m in 0..=n + 1 {
        let (lead, w) = row_coeffs(m, n, l);
        let mi = i64::from(m);
        let b_m = Float::with_val(prec, x * 2u32) - lead;
        let c_m = Float::with_val(prec, y * (2 * w)) - Float::with_val(prec, x * 2u32);
        let d_m = Float::with_val(prec, y * (-2 * w));
        let (d0, d1, d2) = (get(&d, mi), get(&d, mi - 1), get(&d, mi - 2));
        let (x0, x1, x2) = (get(&dx, mi), get(&dx, mi - 1), get(&dx, mi - 2));
        let (y0, y1, y2) = (get(&dy, mi), get(&dy, mi - 1), get(&dy, mi - 2));
        let rest = Float::with_val(prec, &b_m * &d0) + Float::with_val(prec, &c_m * &d1) + Float::with_val(prec, &d_m * &d2);
        // partial derivatives: dB/dx = 2, dC/dx = -2, dC/dy = 2w, dD/dy = -2w
        let rest_x = Float::with_val(prec, &b_m * &x0)
            + Float::with_val(prec, &c_m * &x1)
            + Float::with_val(prec, &d_m * &x2)
            + Float::with_val(prec, &d0 * 2u32)
            - Float::with_val(prec, &d1 * 2u32);
        let rest_y = Float::with_val(prec, &b_m * &y0)
            + Float::with_val(prec, &c_m * &y1)
            + Float::with_val(prec, &d_m * &y2)
            + Float::with_val(prec, &d1 * (2 * w))
            - Float::with_val(prec, &d2 * (2 * w));
        if m < n {
            d.push(-rest / lead);
            dx.push(-rest_x / lead);
            dy.push(-rest_y / lead);
        } else {
            let i = (m - n) as usize;
            f[i] = rest;
            jac[i] = [rest_x, rest_y];
        }
    }
    Eval { f, jac }
}

/// Damped Newton on the two dimensionless constraints.
fn newton(x0: f64, y0: f64, n: u32, l: u32, bits: u32) -> Option<(Float, Float)> {
    let mut x = Float::with_val(bits, x0);
    let mut y = Float::with_val(bits, y0);
    let eps = Float::with_val(bits, 1) >> (bits - 12);
    for _ in 0..200 {
        let ev = evaluate(&x, &y, n, l);
        let [[j00, j01], [j10, j11]] = &ev.jac;
        let det = Float::with_val(bits, j00 * j11) - Float::with_val(bits, j01 * j10);
        if det.is_zero() || !det.is_finite() {
            return None;
        }
        let sx = (Float::with_val(bits, j11 * &ev.f[0]) - Float::with_val(bits, j01 * &ev.f[1])) / &det;
        let sy = (Float::with_val(bits, j00 * &ev.f[1]) - Float::with_val(bits, j10 * &ev.f[0])) / &det;
        let norm0 = Float::with_val(bits, ev.f[0].abs_ref()) + Float::with_val(bits, ev.f[1].abs_ref());
        // halve the step until the residual does not grow and y stays positive
        let mut t = Float::with_val(bits, 1);
        let mut accepted = false;
        for _ in 0..40 {
            let xn = Float::with_val(bits, &x - Float::with_val(bits, &sx * &t));
            let yn = Float::with_val(bits, &y - Float::with_val(bits, &sy * &t));
            if yn > 0 {
                let evn = evaluate(&xn, &yn, n, l);
                let norm = Float::with_val(bits, evn.f[0].abs_ref()) + Float::with_val(bits, evn.f[1].abs_ref());
                if norm <= norm0 || t < 1e-6 {
                    x = xn;
                    y = yn;
                    accepted = true;
                    break;
                }
            }
            t /= 2u32;
        }
        if !accepted {
            return None;
        }
        let step = Float::with_val(bits, sx.abs_ref()) + Float::with_val(bits, sy.abs_ref());
        let scale = Float::with_val(bits, x.abs_ref()) + Float::with_val(bits, y.abs_ref()) + 1u32;
        if step * t <= Float::with_val(bits, &eps * &scale) {
            let ev = evaluate(&x, &y, n, l);
            let tiny = Float::with_val(bits, &eps * 1e6) * scale;
            let ok = ev.f.iter().all(|v| Float::with_val(bits, v.abs_ref()) < tiny);
            return ok.then_some((x, y));
        }
    }
    None
}

/// All solutions (x, y) = (aR, sqrt(2b) R^2) with y > 0 of the degree-n
/// constraints, ordered by x.
///
/// Candidates come from a grid over |x| <= 3 (n + l + 2)^2 and
/// 1e-3 <= y <= 2 (n + l + 2)^2 (logarithmic in y): every cell in which both
/// constraints change sign seeds a Newton solve at working precision.
pub fn dimensionless_solutions(n: u32, l: u32, bits: u32) -> Result<Vec<(Float, Float)>> {
    check_degree(n)?;
    let span = f64::from((n + l + 2) * (n + l + 2));
    let (x_max, y_min, y_max) = (3.0 * span, 1e-3, 2.0 * span);
    let nx = 1200usize;
    let ny = 600usize;
    let xs: Vec<f64> = (0..=nx).map(|i| -x_max + 2.0 * x_max * i as f64 / nx as f64).collect();
    let ys: Vec<f64> = (0..=ny).map(|j| y_min * (y_max / y_min).powf(j as f64 / ny as f64)).collect();
    let grid: Vec<Vec<[f64; 2]>> = xs.iter().map(|&x| ys.iter().map(|&y| residuals_f64(x, y, n, l)).collect()).collect();

    let mut found: Vec<(Float, Float)> = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            let corners = [grid[i][j], grid[i + 1][j], grid[i][j + 1], grid[i + 1][j + 1]];
            let crosses = |k: usize| {
                let lo = corners.iter().map(|c| c[k]).fold(f64::INFINITY, f64::min);
                let hi = corners.iter().map(|c| c[k]).fold(f64::NEG_INFINITY, f64::max);
                lo <= 0.0 && hi >= 0.0
            };
            if !(crosses(0) && crosses(1)) {
                continue;
            }
            let (x0, y0) = (0.5 * (xs[i] + xs[i + 1]), (ys[j] * ys[j + 1]).sqrt());
            let Some((x, y)) = newton(x0, y0, n, l, bits) else { continue };
            let duplicate = found.iter().any(|(fx, fy)| {
                let dx = Float::with_val(bits, fx - &x).abs().to_f64();
                let dy = Float::with_val(bits, fy - &y).abs().to_f64();
                dx + dy < 1e-12 * (1.0 + x.to_f64().abs() + y.to_f64())
            });
            if !duplicate {
                found.push((x, y));
            }
        }
    }
    found.sort_by(|p, q| p.0.partial_cmp(&q.0).expect("finite"));
    Ok(found)
}

/// Residuals of the two constraint rows at physical (a, b, R).
pub fn confined_constraints(n: u32, l: u32, a: &Float, b: &Float, radius: &Float) -> [Float; 2] {
    physical(n, l, a, b, radius).2
}

/// Coefficients c_k and the two residual rows in physical units.
fn physical(n: u32, l: u32, a: &Float, b: &Float, radius: &Float) -> (Float, Vec<Float>, [Float; 2]) {
    let prec = a.prec().max(b.prec()).max(radius.prec());
    let s = Float::with_val(prec, b * 2u32).sqrt();
    let ra2 = Float::with_val(prec, radius * a) * 2u32;
    let mut c = vec![Float::with_val(prec, 1)];
    let get = |c: &[Float], k: i64| -> Float {
        if k >= 0 && (k as usize) < c.len() {
            c[k as usize].clone()
        } else {
            Float::new(prec)
        }
    };
    let mut res = [Float::new(prec), Float::new(prec)];
    for m in 0..=n + 1 {
        let (lead, w) = row_coeffs(m, n, l);
        let mi = i64::from(m);
        let b_m = Float::with_val(prec, &ra2 - lead);
        let c_m = Float::with_val(prec, &s * radius) * (2 * w) - Float::with_val(prec, a * 2u32);
        let d_m = Float::with_val(prec, &s * (-2 * w));
        let rest = Float::with_val(prec, &b_m * get(&c, mi))
            + Float::with_val(prec, &c_m * get(&c, mi - 1))
            + Float::with_val(prec, &d_m * get(&c, mi - 2));
        if m < n {
            let lead_r = Float::with_val(prec, radius * lead);
            c.push(-rest / lead_r);
        } else {
            res[(m - n) as usize] = rest;
        }
    }
    (s, c, res)
}

fn build(n: u32, l: u32, a: Float, b: Float, radius: Float) -> Result<QESCondition> {
    let prec = a.prec().max(b.prec()).max(radius.prec());
    let (_, coeffs, res) = physical(n, l, &a, &b, &radius);
    let poly = Poly::new(coeffs, prec);
    let node_count = count_nodes(&poly, &Float::new(prec), Some(&radius)) as u32;
    Ok(QESCondition {
        n,
        label: LevelLabel::new(node_count, l),
        energy: confined_qes_energy(n, l, &b)?,
        a,
        b,
        radius: Some(radius),
        constraint_residuals: res.to_vec(),
        poly_coeffs: poly,
        node_count,
    })
}

/// All confined quasi-exact solutions of degree n with one of a, b, R fixed.
pub fn confined_qes_solve(n: u32, l: u32, fixed: &FixedParam, ctx: &PrecisionCtx) -> Result<Vec<QESCondition>> {
    check_degree(n)?;
    let bits = ctx.mantissa_bits();
    match fixed {
        FixedParam::B(b) if *b <= 0 => {
            return Err(Error::DegenerateInput("b = 0 admits no confined quasi-exact solution".into()));
        }
        FixedParam::Radius(r) if *r <= 0 => {
            return Err(Error::InvalidInput("wall radius must be positive".into()));
        }
        _ => {}
    }
    let points = dimensionless_solutions(n, l, bits)?;
    let zero_x = |x: &Float| x.clone().abs() < Float::with_val(bits, 1) >> (bits / 2);
    let mut out = Vec::new();
    for (x, y) in &points {
        let (a, radius) = match fixed {
            FixedParam::A(a) => {
                let a = Float::with_val(bits, a);
                if a.is_zero() {
                    if zero_x(x) {
                        return Err(Error::DegenerateInput(format!(
                            "a = 0 leaves the wall radius undetermined at degree {n}; fix b or R"
                        )));
                    }
                    continue;
                }
                if zero_x(x) || x.is_sign_negative() != a.is_sign_negative() {
                    continue;
                }
                let radius = Float::with_val(bits, x / &a);
                (a, radius)
            }
            FixedParam::B(b) => {
                let s = Float::with_val(bits, b * 2u32).sqrt();
                let radius = Float::with_val(bits, y / &s).sqrt();
                (Float::with_val(bits, x / &radius), radius)
            }
            FixedParam::Radius(r) => {
                let radius = Float::with_val(bits, r);
                (Float::with_val(bits, x / &radius), radius)
            }
        };
        let s = Float::with_val(bits, y / Float::with_val(bits, radius.square_ref()));
        let b = Float::with_val(bits, s.square_ref()) / 2u32;
        out.push(build(n, l, a, b, radius)?);
    }
    if out.is_empty() {
        return Err(Error::NoSolution(format!("no degree-{n} confined solution with l = {l} and {fixed}")));
    }
    Ok(out)
}
