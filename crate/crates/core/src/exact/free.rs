//! Free-space conditions.
//!
//! With f(r) = sum c_k r^k the reduced equation
//! `r f'' + (2(l+1) - 2 sqrt(2b) r^2) f' + [(2E - (2l+3) sqrt(2b)) r + 2a] f = 0`
//! is an instance of the general form
//! `(a30 x^3 + a31 x^2 + a32 x + a33) y'' + (a20 x^2 + a21 x + a22) y' - (t10 x + t11) y = 0`,
//! whose degree-n polynomial solutions require t10 = n(n-1) a30 + n a20 and a
//! vanishing (n+1) x (n+1) determinant.

use rug::Float;

use super::{check_degree, count_nodes, FixedParam, QESCondition};
use crate::error::{Error, Result};
use crate::oracle::{eig_k, Tridiagonal};
use crate::poly::Poly;
use crate::precision::PrecisionCtx;
use crate::root::{self, Bracket};
use crate::types::LevelLabel;

/// Coefficients of the general second-order equation with polynomial
/// coefficients of degree 3, 2 and 1.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeCoeffs {
    /// a30, a31, a32, a33
    pub p3: [Float; 4],
    /// a20, a21, a22
    pub p2: [Float; 3],
    /// t10, t11
    pub tau: [Float; 2],
}

/// Determinant entries: `beta[j]` for j = 0..=n, `alpha[j-1]`, `gamma[j-1]`
/// and `eta[j-1]` for j = 1..=n.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagEntries {
    pub beta: Vec<Float>,
    pub alpha: Vec<Float>,
    pub gamma: Vec<Float>,
    pub eta: Vec<Float>,
}

impl OdeCoeffs {
    /// The reduced free-space equation at energy `e`.
    pub fn free(a: &Float, b: &Float, l: u32, e: &Float) -> Self {
        let prec = a.prec().max(b.prec()).max(e.prec());
        let s = Float::with_val(prec, b * 2u32).sqrt();
        let z = || Float::new(prec);
        let t10 = -(Float::with_val(prec, e * 2u32) - Float::with_val(prec, &s * (2 * l + 3)));
        Self {
            p3: [z(), z(), Float::with_val(prec, 1), z()],
            p2: [Float::with_val(prec, &s * -2i32), z(), Float::with_val(prec, 2 * (l + 1))],
            tau: [t10, Float::with_val(prec, a * -2i32)],
        }
    }

    /// t10 required for a degree-n solution.
    pub fn required_tau10(&self, n: u32) -> Float {
        let prec = self.p3[0].prec();
        let nn = Float::with_val(prec, &self.p3[0] * (n * n.saturating_sub(1)));
        nn + Float::with_val(prec, &self.p2[0] * n)
    }

    /// Determinant entries for a degree-n solution.
    pub fn entries(&self, n: u32) -> TridiagEntries {
        let prec = self.p3[0].prec();
        let [a30, a31, a32, a33] = &self.p3;
        let [a20, a21, a22] = &self.p2;
        let [t10, t11] = &self.tau;
        let beta = (0..=n)
            .map(|j| {
                let jm1 = i64::from(j) - 1;
                let inner = Float::with_val(prec, a31 * jm1) + a21;
                Float::with_val(prec, t11 - Float::with_val(prec, inner * j))
            })
            .collect();
        let alpha = (1..=n)
            .map(|j| {
                let inner = Float::with_val(prec, a32 * (j - 1)) + a22;
                -Float::with_val(prec, inner * j)
            })
            .collect();
        let gamma = (1..=n)
            .map(|j| {
                let jm2 = i64::from(j) - 2;
                let inner = Float::with_val(prec, a30 * jm2) + a20;
                Float::with_val(prec, t10 - Float::with_val(prec, inner * (j - 1)))
            })
            .collect();
        let eta = (1..=n).map(|j| -Float::with_val(prec, a33 * (j * (j + 1)))).collect();
        TridiagEntries { beta, alpha, gamma, eta }
    }
}

/// Closed-form entries for the free problem with a degree-n factor:
/// beta = -2a, alpha_j = -j(j + 2l + 1), gamma_j = 2(j - 1 - n) sqrt(2b).
pub fn free_entries(n: u32, l: u32, a: &Float, b: &Float) -> TridiagEntries {
    let prec = a.prec().max(b.prec());
    let s = Float::with_val(prec, b * 2u32).sqrt();
    let beta = (0..=n).map(|_| Float::with_val(prec, a * -2i32)).collect();
    let alpha = (1..=n).map(|j| Float::with_val(prec, -i64::from(j * (j + 2 * l + 1)))).collect();
    let gamma = (1..=n)
        .map(|j| Float::with_val(prec, &s * (2 * (i64::from(j) - 1 - i64::from(n)))))
        .collect();
    let eta = (1..=n).map(|_| Float::new(prec)).collect();
    TridiagEntries { beta, alpha, gamma, eta }
}

/// Tridiagonal determinant by D_j = beta_j D_{j-1} - alpha_j gamma_j D_{j-2}.
pub fn tridiag_det(beta: &[Float], alpha: &[Float], gamma: &[Float]) -> Result<Float> {
    let n = beta.len();
    if n == 0 || alpha.len() + 1 != n || gamma.len() + 1 != n {
        return Err(Error::InvalidInput(format!(
            "tridiagonal entries need lengths n+1, n, n; got {}, {}, {}",
            beta.len(),
            alpha.len(),
            gamma.len()
        )));
    }
    let prec = beta[0].prec();
    let mut d_prev = Float::with_val(prec, 1);
    let mut d = beta[0].clone();
    for j in 1..n {
        let coupling = Float::with_val(prec, &alpha[j - 1] * &gamma[j - 1]);
        let next = Float::with_val(prec, &beta[j] * &d) - coupling * &d_prev;
        d_prev = d;
        d = next;
    }
    Ok(d)
}

/// Energy of a degree-n free quasi-exact state: (n + l + 3/2) sqrt(2b).
pub fn free_qes_energy(n: u32, l: u32, b: &Float) -> Result<Float> {
    if *b <= 0 {
        return Err(Error::InvalidInput("b must be positive".into()));
    }
    let prec = b.prec();
    let s = Float::with_val(prec, b * 2u32).sqrt();
    Ok(s * (f64::from(n + l) + 1.5))
}

/// c_0 = 1 and c_{m+1} = -(beta_m c_m + gamma_m c_{m-1}) / alpha_{m+1}.
fn factor_coefficients(entries: &TridiagEntries) -> Poly {
    let n = entries.beta.len() - 1;
    let prec = entries.beta[0].prec();
    let mut c = vec![Float::with_val(prec, 1)];
    for m in 0..n {
        let mut rhs = Float::with_val(prec, &entries.beta[m] * &c[m]);
        if m >= 1 {
            rhs += Float::with_val(prec, &entries.gamma[m - 1] * &c[m - 1]);
        }
        c.push(-rhs / &entries.alpha[m]);
    }
    Poly::new(c, prec)
}

/// Eigenvalues of the zero-diagonal symmetric matrix with off-diagonal
/// sqrt(2j(j + 2l + 1)(n + 1 - j)); twice the admissible a / sqrt(sqrt(2b)).
fn scaled_couplings(n: u32, l: u32, bits: u32) -> Result<Vec<Float>> {
    let p: Vec<u64> = (1..=u64::from(n))
        .map(|j| 2 * j * (j + 2 * u64::from(l) + 1) * (u64::from(n) + 1 - j))
        .collect();
    let charpoly = |mu: &Float| -> Result<Float> {
        let mut prev = Float::with_val(bits, 1);
        let mut cur = Float::with_val(bits, mu);
        for &pj in &p {
            let next = Float::with_val(bits, mu * &cur) - Float::with_val(bits, &prev * pj);
            prev = cur;
            cur = next;
        }
        Ok(cur)
    };
    let t = Tridiagonal { diag: vec![0.0; n as usize + 1], off: p.iter().map(|&v| (v as f64).sqrt()).collect() };
    let tol = Float::with_val(bits, 1) >> (bits - 8);
    let mut out = Vec::with_capacity(n as usize + 1);
    for k in 1..=n as usize + 1 {
        let seed = eig_k(&t, k)?;
        let mut w = 1e-9 * seed.abs().max(1.0);
        let mut found = None;
        for _ in 0..20 {
            let lo = Float::with_val(bits, seed - w);
            let hi = Float::with_val(bits, seed + w);
            let f_lo = charpoly(&lo)?;
            let f_hi = charpoly(&hi)?;
            if f_lo.is_zero() || f_hi.is_zero() || root::opposite_signs(&f_lo, &f_hi) {
                found = Some(Bracket { lo, hi, f_lo, f_hi });
                break;
            }
            w *= 4.0;
        }
        let bracket = found.ok_or_else(|| Error::NoSolution(format!("could not isolate coupling root {k}")))?;
        let mu = if bracket.f_lo.is_zero() {
            bracket.lo
        } else if bracket.f_hi.is_zero() {
            bracket.hi
        } else {
            let exact_zero = charpoly(&Float::with_val(bits, 0))?.is_zero() && seed.abs() < 1e-6;
            if exact_zero {
                Float::new(bits)
            } else {
                root::refine(charpoly, bracket, &tol)?.midpoint()
            }
        };
        out.push(mu);
    }
    Ok(out)
}

fn build(n: u32, l: u32, a: Float, b: Float) -> Result<QESCondition> {
    let prec = a.prec().max(b.prec());
    let entries = free_entries(n, l, &a, &b);
    let det = tridiag_det(&entries.beta, &entries.alpha, &entries.gamma)?;
    let poly = factor_coefficients(&entries);
    // the row that the forward recurrence does not enforce
    let nn = n as usize;
    let mut last_row = Float::with_val(prec, &entries.beta[nn] * &poly.coeff(nn));
    if n >= 1 {
        last_row += Float::with_val(prec, &entries.gamma[nn - 1] * &poly.coeff(nn - 1));
    }
    let node_count = count_nodes(&poly, &Float::new(prec), None) as u32;
    Ok(QESCondition {
        n,
        label: LevelLabel::new(node_count, l),
        energy: free_qes_energy(n, l, &b)?,
        a,
        b,
        radius: None,
        constraint_residuals: vec![det, last_row],
        poly_coeffs: poly,
        node_count,
    })
}

/// All free-space quasi-exact solutions of degree n with one coupling fixed,
/// ordered by the free coupling.
pub fn free_qes_solve(n: u32, l: u32, fixed: &FixedParam, ctx: &PrecisionCtx) -> Result<Vec<QESCondition>> {
    check_degree(n)?;
    let bits = ctx.mantissa_bits();
    let mus = scaled_couplings(n, l, bits)?;
    let mut out = Vec::new();
    match fixed {
        FixedParam::Radius(_) => {
            return Err(Error::InvalidInput("free-space solutions have no radius; fix a or b".into()));
        }
        FixedParam::B(b) => {
            if *b <= 0 {
                return Err(Error::DegenerateInput("b must be positive for a quasi-exact solution".into()));
            }
            let b = Float::with_val(bits, b);
            let root_s = Float::with_val(bits, &b * 2u32).sqrt().sqrt();
            for mu in &mus {
                let a = Float::with_val(bits, mu * &root_s) / 2u32;
                out.push(build(n, l, a, b.clone())?);
            }
        }
        FixedParam::A(a) => {
            let a = Float::with_val(bits, a);
            if a.is_zero() {
                if n % 2 == 0 {
                    return Err(Error::DegenerateInput(format!(
                        "a = 0 satisfies the degree-{n} condition for every b; fix b instead"
                    )));
                }
                return Err(Error::NoSolution(format!("no degree-{n} solution with a = 0")));
            }
            for mu in mus.iter().filter(|m| !m.is_zero() && m.is_sign_negative() == a.is_sign_negative()) {
                // a = mu sqrt(s) / 2  =>  s = (2a / mu)^2, b = s^2 / 2
                let ratio = Float::with_val(bits, &a * 2u32) / mu;
                let s = ratio.square();
                let b = Float::with_val(bits, s.square_ref()) / 2u32;
                out.push(build(n, l, a.clone(), b)?);
            }
            out.sort_by(|x, y| x.b.partial_cmp(&y.b).expect("finite couplings"));
        }
    }
    if out.is_empty() {
        return Err(Error::NoSolution(format!("no degree-{n} solution with {fixed}")));
    }
    Ok(out)
}
