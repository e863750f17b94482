//! Pointwise evaluation of Jack, skew Jack, and one-row g functions at small
//! alphabets via the branching rule (one variable at a time over horizontal
//! strips).  Unlike the symbolic engine in the parent module, cost here scales
//! with the number of strip chains, not with the dimension of the weight
//! space, so thin partitions of large weight are cheap.  Coefficients use the
//! standard arm/leg product formulas; the unit tests pin them against the
//! Gram-Schmidt construction.

use crate::num::{pochhammer, AlphaParam, Rat, Scalar};
use crate::partition::Partition;
use num::{One, Zero};
use std::collections::HashMap;

/// True when lambda/mu is a horizontal strip (mu inside lambda, at most one
/// cell per column): lambda_1 >= mu_1 >= lambda_2 >= mu_2 >= ...
pub fn is_horizontal_strip(lambda: &Partition, mu: &Partition) -> bool {
    for i in 0..lambda.len() {
        if mu.part(i) > lambda.part(i) || lambda.part(i + 1) > mu.part(i) {
            return false;
        }
    }
    mu.len() <= lambda.len()
}

/// (alpha a(s) + l(s) + 1) / (alpha a(s) + l(s) + alpha) for a cell of `nu`.
fn b_cell(nu: &Partition, conj: &Partition, i: usize, j: u32, alpha: &Rat) -> Rat {
    let a = Rat::from_integer(((nu.part(i - 1) - j) as i64).into());
    let l = Rat::from_integer(((conj.part(j as usize - 1) as i64) - i as i64).into());
    (alpha.clone() * a.clone() + l.clone() + Rat::one()) / (alpha.clone() * a + l + alpha.clone())
}

/// Branching coefficient psi_{lambda/mu} for the P-normalization: product of
/// b_mu(s)/b_lambda(s) over cells of mu in rows meeting the strip but columns
/// not meeting it.
pub fn psi_coeff(lambda: &Partition, mu: &Partition, alpha: &Rat) -> Rat {
    let lc = lambda.conjugate();
    let mc = mu.conjugate();
    let mut r = Rat::one();
    for i in 1..=mu.len() {
        if lambda.part(i - 1) == mu.part(i - 1) {
            continue; // row does not meet the strip
        }
        for j in 1..=mu.part(i - 1) {
            // column meets the strip iff some row grew past j
            let col_in_strip = mc.part(j as usize - 1) != lc.part(j as usize - 1);
            if col_in_strip {
                continue;
            }
            r *= b_cell(mu, &mc, i, j, alpha) / b_cell(lambda, &lc, i, j, alpha);
        }
    }
    r
}

/// Branching coefficient phi_{lambda/mu} for the Q-normalization: product of
/// b_lambda(s)/b_mu(s) over cells of lambda in columns meeting the strip,
/// with b_mu(s) = 1 for cells outside mu.
pub fn phi_coeff(lambda: &Partition, mu: &Partition, alpha: &Rat) -> Rat {
    let lc = lambda.conjugate();
    let mc = mu.conjugate();
    let mut r = Rat::one();
    for i in 1..=lambda.len() {
        for j in 1..=lambda.part(i - 1) {
            let col_in_strip = mc.part(j as usize - 1) != lc.part(j as usize - 1);
            if !col_in_strip {
                continue;
            }
            r *= b_cell(lambda, &lc, i, j, alpha);
            if i <= mu.len() && j <= mu.part(i - 1) {
                r /= b_cell(mu, &mc, i, j, alpha);
            }
        }
    }
    r
}

enum Normalization {
    P,
    Q,
}

/// Evaluator for skew Jack functions at a fixed point list, memoized over
/// (shape, number of variables).
struct SkewEvaluator<'a, S: Scalar> {
    alpha: Rat,
    pts: &'a [S],
    nu: Partition,
    norm: Normalization,
    memo: HashMap<(Partition, usize), S>,
}

impl<'a, S: Scalar> SkewEvaluator<'a, S> {
    fn eval(&mut self, kappa: &Partition, m: usize) -> S {
        if m == 0 {
            return if kappa == &self.nu { S::one() } else { S::zero() };
        }
        if !self.nu.contained_in(kappa) {
            return S::zero();
        }
        if let Some(v) = self.memo.get(&(kappa.clone(), m)) {
            return v.clone();
        }
        let mut acc = S::zero();
        for tau in horizontal_strip_predecessors(kappa, &self.nu) {
            let coeff = match self.norm {
                Normalization::P => psi_coeff(kappa, &tau, &self.alpha),
                Normalization::Q => phi_coeff(kappa, &tau, &self.alpha),
            };
            if coeff.is_zero() {
                continue;
            }
            let deg = (kappa.weight() - tau.weight()) as i64;
            let inner = self.eval(&tau, m - 1);
            if inner.is_zero() {
                continue;
            }
            let xpow = self.pts[m - 1].powi(deg);
            acc = acc + S::from_rat(&coeff) * xpow * inner;
        }
        self.memo.insert((kappa.clone(), m), acc.clone());
        acc
    }
}

/// All tau with nu ⊆ tau ⊆ kappa and kappa/tau a horizontal strip.
fn horizontal_strip_predecessors(kappa: &Partition, nu: &Partition) -> Vec<Partition> {
    let n = kappa.len();
    let mut out = Vec::new();
    let mut cur: Vec<u32> = Vec::with_capacity(n);
    fn rec(i: usize, kappa: &Partition, nu: &Partition, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if i == kappa.len() {
            out.push(Partition::new(cur.clone()));
            return;
        }
        let hi = kappa.part(i);
        let lo = kappa.part(i + 1).max(nu.part(i));
        if lo > hi {
            return;
        }
        for v in lo..=hi {
            cur.push(v);
            rec(i + 1, kappa, nu, cur, out);
            cur.pop();
        }
    }
    rec(0, kappa, nu, &mut cur, &mut out);
    out
}

/// P_lambda^{(alpha)}(x_1..x_m) by branching.
pub fn jack_p_at<S: Scalar>(lambda: &Partition, alpha: &AlphaParam, pts: &[S]) -> S {
    skew_p_at(lambda, &Partition::empty(), alpha, pts)
}

/// Q_lambda^{(alpha)}(x_1..x_m) by branching.
pub fn jack_q_at<S: Scalar>(lambda: &Partition, alpha: &AlphaParam, pts: &[S]) -> S {
    skew_q_at(lambda, &Partition::empty(), alpha, pts)
}

/// Skew P_{lambda/nu}^{(alpha)}(x_1..x_m).
pub fn skew_p_at<S: Scalar>(
    lambda: &Partition,
    nu: &Partition,
    alpha: &AlphaParam,
    pts: &[S],
) -> S {
    let mut ev = SkewEvaluator {
        alpha: alpha.value().clone(),
        pts,
        nu: nu.clone(),
        norm: Normalization::P,
        memo: HashMap::new(),
    };
    ev.eval(lambda, pts.len())
}

/// Skew Q_{lambda/nu}^{(alpha)}(x_1..x_m).
pub fn skew_q_at<S: Scalar>(
    lambda: &Partition,
    nu: &Partition,
    alpha: &AlphaParam,
    pts: &[S],
) -> S {
    let mut ev = SkewEvaluator {
        alpha: alpha.value().clone(),
        pts,
        nu: nu.clone(),
        norm: Normalization::Q,
        memo: HashMap::new(),
    };
    ev.eval(lambda, pts.len())
}

/// Values g_0, ..., g_kmax at the given points, by the one-variable recursion
/// of the generating function prod_i (1 - x_i z)^{-1/alpha}.
pub fn g_values<S: Scalar>(kmax: usize, alpha: &AlphaParam, pts: &[S]) -> Vec<S> {
    let ia = Rat::one() / alpha.value().clone();
    // c_t = (1/alpha)_t / t!
    let mut c = Vec::with_capacity(kmax + 1);
    let mut fact = Rat::one();
    for t in 0..=kmax {
        if t > 0 {
            fact *= Rat::from_integer((t as i64).into());
        }
        c.push(pochhammer(&ia, t as u32) / fact.clone());
    }
    let mut g = vec![S::zero(); kmax + 1];
    g[0] = S::one();
    for x in pts {
        let mut next = vec![S::zero(); kmax + 1];
        let mut xpow = vec![S::one()];
        for _ in 1..=kmax {
            xpow.push(xpow.last().unwrap().clone() * x.clone());
        }
        for (j, nj) in next.iter_mut().enumerate() {
            let mut acc = S::zero();
            for t in 0..=j {
                if g[j - t].is_zero() {
                    continue;
                }
                acc = acc + S::from_rat(&c[t]) * xpow[t].clone() * g[j - t].clone();
            }
            *nj = acc;
        }
        g = next;
    }
    g
}

/// Single g_k value; negative k gives zero.
pub fn g_at<S: Scalar>(k: i64, alpha: &AlphaParam, pts: &[S]) -> S {
    if k < 0 {
        return S::zero();
    }
    g_values(k as usize, alpha, pts).pop().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rat, rat_one};
    use crate::partition::{partitions_of_weight, EnumBounds};
    use crate::symfun::{Basis, JackCtx};

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec())
    }

    fn a(n: i64, d: i64) -> AlphaParam {
        AlphaParam::from_parts(n, d)
    }

    #[test]
    fn branching_matches_symbolic_eval() {
        let ctx = JackCtx::new();
        let pts = [rat(1, 2), rat(-1, 3), rat(2, 5)];
        for alpha in [a(1, 2), a(1, 1), a(2, 1), a(4, 3)] {
            for w in 0..=6u32 {
                for lam in partitions_of_weight(w, EnumBounds::weight(w)) {
                    for m in 0..=3usize {
                        let sym = ctx.jack_p(&lam, &alpha).unwrap();
                        let want: Rat = ctx.eval(&sym, &pts[..m]).unwrap();
                        let got = jack_p_at(&lam, &alpha, &pts[..m]);
                        assert_eq!(got, want, "P_{lam} alpha {alpha} m={m}");
                        let symq = ctx.jack_q(&lam, &alpha).unwrap();
                        let wantq: Rat = ctx.eval(&symq, &pts[..m]).unwrap();
                        let gotq = jack_q_at(&lam, &alpha, &pts[..m]);
                        assert_eq!(gotq, wantq, "Q_{lam} alpha {alpha} m={m}");
                    }
                }
            }
        }
    }

    #[test]
    fn skew_branching_matches_symbolic() {
        let ctx = JackCtx::new();
        let pts = [rat(1, 2), rat(1, 3)];
        for alpha in [a(1, 2), a(2, 1)] {
            for (lam, nu) in [
                (p(&[2]), p(&[1])),
                (p(&[2, 1]), p(&[1])),
                (p(&[3, 1]), p(&[1, 1])),
                (p(&[2, 2]), p(&[1])),
                (p(&[3, 2, 1]), p(&[2, 1])),
            ] {
                let sym = ctx.skew_q(&lam, &nu, &alpha).unwrap();
                let want: Rat = ctx
                    .eval(&ctx.to_basis(&sym, Basis::PowerSum, Some(&alpha)).unwrap(), &pts)
                    .unwrap();
                let got = skew_q_at(&lam, &nu, &alpha, &pts);
                assert_eq!(got, want, "Q_{{{lam}/{nu}}} alpha {alpha}");
                let symp = ctx.skew_p(&lam, &nu, &alpha).unwrap();
                let wantp: Rat = ctx
                    .eval(&ctx.to_basis(&symp, Basis::PowerSum, Some(&alpha)).unwrap(), &pts)
                    .unwrap();
                let gotp = skew_p_at(&lam, &nu, &alpha, &pts);
                assert_eq!(gotp, wantp, "P_{{{lam}/{nu}}} alpha {alpha}");
            }
        }
    }

    #[test]
    fn phi_psi_ratio() {
        // psi_{lambda/mu} = (b_mu / b_lambda) phi_{lambda/mu}
        for alpha in [rat(1, 2), rat(2, 1), rat(5, 3)] {
            for (lam, mu) in [
                (p(&[2]), p(&[1])),
                (p(&[3, 1]), p(&[2, 1])),
                (p(&[4, 2]), p(&[3, 1])),
                (p(&[3, 3]), p(&[3, 1])),
            ] {
                if !is_horizontal_strip(&lam, &mu) {
                    continue;
                }
                let psi = psi_coeff(&lam, &mu, &alpha);
                let phi = phi_coeff(&lam, &mu, &alpha);
                let ratio = mu.b_value(&alpha) / lam.b_value(&alpha);
                assert_eq!(psi, ratio * phi, "lambda {lam} mu {mu}");
            }
        }
    }

    #[test]
    fn one_row_q_single_variable_is_g() {
        // Q_(k)(x) = ((1/alpha)_k / k!) x^k
        let alpha = a(1, 2);
        let x = rat(1, 3);
        for k in 0..=5u32 {
            let got: Rat = jack_q_at(&p(&[k]), &alpha, &[x.clone()]);
            let ia = rat_one() / alpha.value().clone();
            let want = pochhammer(&ia, k) / crate::num::factorial(k)
                * num::pow::pow(x.clone(), k as usize);
            assert_eq!(got, want, "k={k}");
        }
    }

    #[test]
    fn g_values_match_jack_q_one_row() {
        let alpha = a(2, 3);
        let pts = [rat(1, 2), rat(-1, 4), rat(1, 5)];
        let g = g_values(6, &alpha, &pts);
        for (k, gk) in g.iter().enumerate() {
            let want: Rat = jack_q_at(&p(&[k as u32]), &alpha, &pts);
            assert_eq!(gk, &want, "k={k}");
        }
        assert_eq!(g_at::<Rat>(-3, &alpha, &pts), Rat::zero());
    }

    #[test]
    fn high_weight_thin_partition_is_cheap() {
        // weight 24, two rows: exercised by the truncated series routes
        let alpha = a(1, 2);
        let lam = p(&[13, 11]);
        let v: Rat = jack_p_at(&lam, &alpha, &[rat(1, 3), rat(1, 4)]);
        assert!(!v.is_zero());
        // vanishing beyond the alphabet length
        let v1: Rat = jack_p_at(&lam, &alpha, &[rat(1, 3)]);
        assert_eq!(v1, Rat::zero());
    }
}
