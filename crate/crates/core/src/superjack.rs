//! Super-Jack functions: Jack functions in two alphabets, evaluated at
//! points.  The primary computation route substitutes
//! phi_alpha(p_k) = p_k(x) + (-1)^{k-1} alpha p_k(y) into the power-sum
//! expansion of Q_lambda; the skew-sum route
//! Qhat_lambda(x;y) = sum_nu Q_{lambda/nu}(x) P_{nu'}^{(1/alpha)}(y)
//! is kept as an independent cross-check and as the evaluator for weights
//! beyond the symbolic cache (it only needs branching, not weight-space
//! Gram-Schmidt).

use crate::num::{AlphaParam, Scalar};
use crate::partition::{partitions_of_weight, EnumBounds, Partition};
use crate::symfun::branching::{g_values, jack_p_at, skew_q_at};
use crate::symfun::{JackCtx, SymfunError};
use num::complex::Complex64;
use num::{One, Zero};

/// Two alphabets of evaluation points.
#[derive(Clone, Debug, PartialEq)]
pub struct BiPointSet<S> {
    pub x: Vec<S>,
    pub y: Vec<S>,
}

impl<S: Scalar> BiPointSet<S> {
    pub fn new(x: Vec<S>, y: Vec<S>) -> Self {
        BiPointSet { x, y }
    }

    pub fn empty() -> Self {
        BiPointSet {
            x: Vec::new(),
            y: Vec::new(),
        }
    }

    pub fn swapped(&self) -> Self {
        BiPointSet {
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }
}

/// phi_alpha(p_k) = p_k(x) + (-1)^{k-1} alpha p_k(y).
pub fn phi_powersum<S: Scalar>(k: u32, pts: &BiPointSet<S>, alpha: &AlphaParam) -> S {
    debug_assert!(k >= 1);
    let px = pts
        .x
        .iter()
        .fold(S::zero(), |acc, v| acc + v.powi(k as i64));
    let py = pts
        .y
        .iter()
        .fold(S::zero(), |acc, v| acc + v.powi(k as i64));
    let sign = if k % 2 == 1 {
        alpha.value().clone()
    } else {
        -alpha.value().clone()
    };
    px + S::from_rat(&sign) * py
}

/// Qhat_lambda^{(alpha)}(x; y) through the phi_alpha substitution.  Requires
/// the symbolic power-sum expansion, so the weight must be within the cache
/// bound of `ctx`.
pub fn super_q_phi_route<S: Scalar>(
    ctx: &JackCtx,
    lambda: &Partition,
    pts: &BiPointSet<S>,
    alpha: &AlphaParam,
) -> Result<S, SymfunError> {
    let q = ctx.jack_q(lambda, alpha)?;
    let qp = ctx.to_basis(&q, crate::symfun::Basis::PowerSum, Some(alpha))?;
    let mut total = S::zero();
    let mut cache: std::collections::HashMap<u32, S> = std::collections::HashMap::new();
    for (rho, c) in qp.terms() {
        let mut term = S::from_rat(c);
        for r in rho.parts() {
            let v = cache
                .entry(*r)
                .or_insert_with(|| phi_powersum(*r, pts, alpha))
                .clone();
            if v.is_zero() {
                term = S::zero();
                break;
            }
            term = term * v;
        }
        total = total + term;
    }
    Ok(total)
}

/// Qhat_lambda^{(alpha)}(x; y) through the skew sum
/// sum_nu Q_{lambda/nu}^{(alpha)}(x) P_{nu'}^{(1/alpha)}(y).  Branching-based,
/// so it works at any weight; cost scales with the number of nu below lambda
/// with nu_1 <= |y|.
pub fn super_q_skew_route<S: Scalar>(
    lambda: &Partition,
    pts: &BiPointSet<S>,
    alpha: &AlphaParam,
) -> S {
    let p = pts.x.len();
    let q = pts.y.len() as u32;
    if !lambda.is_fat_hook(p, q) {
        return S::zero();
    }
    let inv = alpha.inverse();
    let mut total = S::zero();
    for w in 0..=lambda.weight() {
        for nu in partitions_of_weight(
            w,
            EnumBounds {
                max_part: Some(lambda.part(0).min(q)),
                max_length: Some(lambda.len()),
                max_weight: Some(w),
            },
        ) {
            if !nu.contained_in(lambda) {
                continue;
            }
            let py = jack_p_at(&nu.conjugate(), &inv, &pts.y);
            if py.is_zero() {
                continue;
            }
            let qx = skew_q_at(lambda, &nu, alpha, &pts.x);
            if qx.is_zero() {
                continue;
            }
            total = total + qx * py;
        }
    }
    total
}

/// Qhat_lambda^{(alpha)}(x; y): phi route within the symbolic cache bound,
/// skew route beyond it.
pub fn super_q<S: Scalar>(
    ctx: &JackCtx,
    lambda: &Partition,
    pts: &BiPointSet<S>,
    alpha: &AlphaParam,
) -> S {
    if !lambda.is_fat_hook(pts.x.len(), pts.y.len() as u32) {
        return S::zero();
    }
    if lambda.weight() <= ctx.weight_cap() {
        super_q_phi_route(ctx, lambda, pts, alpha).expect("weight within cap")
    } else {
        super_q_skew_route(lambda, pts, alpha)
    }
}

/// Phat_lambda = Qhat_lambda / b_lambda.
pub fn super_p<S: Scalar>(
    ctx: &JackCtx,
    lambda: &Partition,
    pts: &BiPointSet<S>,
    alpha: &AlphaParam,
) -> S {
    let b = lambda.b_value(alpha.value());
    super_q(ctx, lambda, pts, alpha) / S::from_rat(&b)
}

/// ghat_k(x; y) = sum_{l=0}^{k} g_l^{(alpha)}(x) e_{k-l}(y); zero for k < 0.
pub fn g_hat<S: Scalar>(k: i64, pts: &BiPointSet<S>, alpha: &AlphaParam) -> S {
    if k < 0 {
        return S::zero();
    }
    g_hat_values(k as usize, pts, alpha).pop().unwrap()
}

/// Values ghat_0..ghat_kmax; shares the g and e tables across subscripts.
pub fn g_hat_values<S: Scalar>(kmax: usize, pts: &BiPointSet<S>, alpha: &AlphaParam) -> Vec<S> {
    let g = g_values(kmax, alpha, &pts.x);
    let e = elementary_values(kmax, &pts.y);
    (0..=kmax)
        .map(|k| {
            let mut acc = S::zero();
            for l in 0..=k {
                if g[l].is_zero() || e[k - l].is_zero() {
                    continue;
                }
                acc = acc + g[l].clone() * e[k - l].clone();
            }
            acc
        })
        .collect()
}

/// Elementary symmetric polynomial values e_0..e_kmax at the points.
pub fn elementary_values<S: Scalar>(kmax: usize, pts: &[S]) -> Vec<S> {
    let mut e = vec![S::zero(); kmax + 1];
    e[0] = S::one();
    for x in pts {
        for j in (1..=kmax).rev() {
            let add = e[j - 1].clone() * x.clone();
            e[j] = e[j].clone() + add;
        }
    }
    e
}

/// Deformed two-alphabet Jack value: expand P_lambda in power sums and
/// substitute p_k -> p_k(x) + (-1)^{k-1} p_k(y) (the alpha-independent twist
/// on the second alphabet).  For alpha = 1/p with integer p this equals
/// Phat_lambda^{(alpha)}(x; y repeated p times).
pub fn deformed_p<S: Scalar>(
    ctx: &JackCtx,
    lambda: &Partition,
    pts: &BiPointSet<S>,
    alpha: &AlphaParam,
) -> Result<S, SymfunError> {
    let jp = ctx.jack_p(lambda, alpha)?;
    let pp = ctx.to_basis(&jp, crate::symfun::Basis::PowerSum, Some(alpha))?;
    let one = AlphaParam::from_parts(1, 1);
    let mut cache: std::collections::HashMap<u32, S> = std::collections::HashMap::new();
    let mut total = S::zero();
    for (rho, c) in pp.terms() {
        let mut term = S::from_rat(c);
        for r in rho.parts() {
            let v = cache
                .entry(*r)
                .or_insert_with(|| phi_powersum(*r, pts, &one))
                .clone();
            if v.is_zero() {
                term = S::zero();
                break;
            }
            term = term * v;
        }
        total = total + term;
    }
    Ok(total)
}

/// The four-alphabet Cauchy kernel
/// prod (1-x_i y_j)^{-1/alpha} prod (1+x_i v_j) prod (1+u_i y_j)
/// prod (1-u_i v_j)^{-alpha}.
/// Fractional powers use the principal branch; a vanishing base in either
/// fractional factor is a pole and is rejected.
pub fn super_cauchy_product(
    x: &[Complex64],
    u: &[Complex64],
    y: &[Complex64],
    v: &[Complex64],
    alpha: f64,
) -> Result<Complex64, String> {
    let mut log_sum = Complex64::zero();
    let mut poly = Complex64::one();
    for a in x {
        for b in y {
            let w = Complex64::one() - a * b;
            if w.norm() == 0.0 {
                return Err(format!("pole: 1 - x*y vanishes at x={a}, y={b}"));
            }
            log_sum += -w.ln() / alpha;
        }
    }
    for a in u {
        for b in v {
            let w = Complex64::one() - a * b;
            if w.norm() == 0.0 {
                return Err(format!("pole: 1 - u*v vanishes at u={a}, v={b}"));
            }
            log_sum += -w.ln() * alpha;
        }
    }
    for a in x {
        for b in v {
            poly *= Complex64::one() + a * b;
        }
    }
    for a in u {
        for b in y {
            poly *= Complex64::one() + a * b;
        }
    }
    Ok(log_sum.exp() * poly)
}
