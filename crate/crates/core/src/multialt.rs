//! Multi-alternating sums: the hyperdeterminant of an even-order array, the
//! Pfaffian of an antisymmetric matrix, and the rectangular-Jack closed forms
//! built from ghat entries (hyperdeterminant at alpha = 1/p, Pfaffian at
//! alpha = 1/2 with the zero-padded index sequence).
//!
//! The hyperdeterminant enumeration fixes the first permutation to the
//! identity (the multi-alternating symmetry makes this exact and drops the
//! 1/N! prefactor), walks the remaining 2p-1 permutations in lexicographic
//! order with precomputed parities, and abandons a product as soon as a
//! factor vanishes.  Entry values are expected to be cheap lookups; the
//! rectangular-Jack wrappers cache every ghat subscript up front.

use crate::num::{double_factorial_odd, factorial, AlphaParam, Scalar};
use crate::partition::Partition;
use crate::superjack::{g_hat_values, BiPointSet};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MultialtError {
    #[error("hyperdeterminant work {needed} products exceeds the budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("Pfaffian needs an even dimension, got {0}")]
    OddDimension(usize),
    #[error("hyperdeterminant order must be even and >= 2, got {0}")]
    BadOrder(usize),
    #[error("partition {0} is not rectangular")]
    NonRectangular(Partition),
    #[error("padding length {n} is below the partition length {len}")]
    PaddingTooShort { n: usize, len: usize },
}

/// Default cap on the number of signed products a hyperdeterminant may
/// enumerate.  Overridable per call (the CLI wires CBETA_WORK_BUDGET here).
pub const DEFAULT_WORK_BUDGET: u64 = 10_000_000;

/// Even-order multi-dimensional array given by an entry callback over
/// 0-based indices.
pub struct HyperArray<'a, S> {
    pub order: usize,
    pub dim: usize,
    pub entry: &'a dyn Fn(&[usize]) -> S,
}

fn permutations_with_sign(n: usize) -> Vec<(Vec<usize>, i8)> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let sign = permutation_sign(&idx);
        out.push((idx.clone(), sign));
        if !next_permutation(&mut idx) {
            break;
        }
    }
    out
}

fn permutation_sign(perm: &[usize]) -> i8 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1i8;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

fn next_permutation(arr: &mut [usize]) -> bool {
    let n = arr.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && arr[i - 1] >= arr[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while arr[j] <= arr[i - 1] {
        j -= 1;
    }
    arr.swap(i - 1, j);
    arr[i..].reverse();
    true
}

/// Hyperdeterminant of an order-2p array: the signed sum over 2p-tuples of
/// permutations, with the first fixed to the identity.  For p = 1 this is the
/// ordinary determinant.
pub fn hyperdet<S: Scalar>(array: &HyperArray<S>, budget: u64) -> Result<S, MultialtError> {
    let order = array.order;
    if order < 2 || order % 2 != 0 {
        return Err(MultialtError::BadOrder(order));
    }
    let n = array.dim;
    if n == 0 {
        return Ok(S::one());
    }
    let nfact: u128 = (1..=n as u128).product();
    let needed = nfact
        .checked_pow((order - 1) as u32)
        .unwrap_or(u128::MAX)
        .saturating_mul(n as u128);
    if needed > budget as u128 {
        return Err(MultialtError::BudgetExceeded { needed, budget });
    }
    let perms = permutations_with_sign(n);
    let k = order - 1; // free permutation slots
    let mut total = S::zero();
    let mut odometer = vec![0usize; k];
    let mut index_buf = vec![0usize; order];
    loop {
        let mut sign = 1i8;
        for &pi in &odometer {
            sign *= perms[pi].1;
        }
        let mut prod = S::one();
        let mut dead = false;
        for i in 0..n {
            index_buf[0] = i;
            for (slot, &pi) in odometer.iter().enumerate() {
                index_buf[slot + 1] = perms[pi].0[i];
            }
            let e = (array.entry)(&index_buf);
            if e.is_zero() {
                dead = true;
                break;
            }
            prod = prod * e;
        }
        if !dead {
            if sign < 0 {
                total = total - prod;
            } else {
                total = total + prod;
            }
        }
        let mut slot = k;
        loop {
            if slot == 0 {
                return Ok(total);
            }
            slot -= 1;
            odometer[slot] += 1;
            if odometer[slot] < perms.len() {
                break;
            }
            odometer[slot] = 0;
        }
    }
}

/// Antisymmetric matrix described by its strict upper triangle.
pub struct SkewMatrix<S> {
    dim: usize,
    upper: Vec<S>, // row-major strict upper triangle
}

impl<S: Scalar> SkewMatrix<S> {
    /// Builds from a callback giving b_{ij} for 0-based i < j.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> S) -> Result<Self, MultialtError> {
        if dim % 2 != 0 {
            return Err(MultialtError::OddDimension(dim));
        }
        let mut upper = Vec::with_capacity(dim * (dim.saturating_sub(1)) / 2);
        for i in 0..dim {
            for j in (i + 1)..dim {
                upper.push(f(i, j));
            }
        }
        Ok(SkewMatrix { dim, upper })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Signed entry b_{ij} for any i != j.
    pub fn entry(&self, i: usize, j: usize) -> S {
        debug_assert!(i != j);
        if i < j {
            let idx = i * self.dim - i * (i + 1) / 2 + (j - i - 1);
            self.upper[idx].clone()
        } else {
            -self.entry(j, i)
        }
    }
}

/// Pfaffian as the signed perfect-matching sum, by expansion along the lowest
/// remaining index with memoization on the index subset.  Pf(B)^2 = det(B).
pub fn pfaffian<S: Scalar>(b: &SkewMatrix<S>) -> S {
    let n = b.dim();
    if n == 0 {
        return S::one();
    }
    let full: u32 = (1u32 << n) - 1;
    let mut memo: HashMap<u32, S> = HashMap::new();
    pf_rec(b, full, &mut memo)
}

fn pf_rec<S: Scalar>(b: &SkewMatrix<S>, mask: u32, memo: &mut HashMap<u32, S>) -> S {
    if mask == 0 {
        return S::one();
    }
    if let Some(v) = memo.get(&mask) {
        return v.clone();
    }
    let i = mask.trailing_zeros() as usize;
    let rest = mask & !(1 << i);
    let mut acc = S::zero();
    let mut sign_pos = true;
    let mut m = rest;
    while m != 0 {
        let j = m.trailing_zeros() as usize;
        m &= m - 1;
        let e = b.entry(i, j);
        if !e.is_zero() {
            let sub = pf_rec(b, rest & !(1 << j), memo);
            let term = e * sub;
            acc = if sign_pos { acc + term } else { acc - term };
        }
        sign_pos = !sign_pos;
    }
    memo.insert(mask, acc.clone());
    acc
}

/// Determinant by Laplace recursion over column subsets; exact for rational
/// scalars.  The independent check for Pf^2 = det and the p = 1 hyperdet.
pub fn determinant<S: Scalar>(dim: usize, entry: impl Fn(usize, usize) -> S) -> S {
    fn rec<S: Scalar, F: Fn(usize, usize) -> S>(
        row: usize,
        mask: u32,
        dim: usize,
        entry: &F,
        memo: &mut HashMap<u32, S>,
    ) -> S {
        if row == dim {
            return S::one();
        }
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let mut acc = S::zero();
        let mut sign_pos = true;
        for j in 0..dim {
            if mask & (1 << j) != 0 {
                continue;
            }
            let e = entry(row, j);
            if !e.is_zero() {
                let sub = rec(row + 1, mask | (1 << j), dim, entry, memo);
                let term = e * sub;
                acc = if sign_pos { acc + term } else { acc - term };
            }
            sign_pos = !sign_pos;
        }
        memo.insert(mask, acc.clone());
        acc
    }
    let mut memo: HashMap<u32, S> = HashMap::new();
    rec(0, 0, dim, &entry, &mut memo)
}

/// Rectangular Jack Q_{(a^b)}^{(1/p)} on two alphabets via the order-2p
/// hyperdeterminant of ghat values:
/// (b! (p!)^b / (pb)!) Det^{(2p)}(ghat_{a + i_1+..+i_p - i_{p+1}-..-i_{2p}}).
pub fn rect_jack_hyperdet<S: Scalar>(
    a: u32,
    b: u32,
    p: u32,
    pts: &BiPointSet<S>,
    budget: u64,
) -> Result<S, MultialtError> {
    assert!(a >= 1 && b >= 1 && p >= 1, "positive integers required");
    let alpha = AlphaParam::from_parts(1, p as i64);
    // subscript range: a - p(b-1) .. a + p(b-1); negatives give 0
    let max_sub = a as usize + (p as usize) * (b as usize - 1);
    let ghat = g_hat_values(max_sub, pts, &alpha);
    let offset = a as i64;
    let entry = move |idx: &[usize]| -> S {
        let mut sub = offset;
        for (slot, &i) in idx.iter().enumerate() {
            // 0-based indices; the closed form uses 1-based
            let v = (i + 1) as i64;
            if slot < p as usize {
                sub += v;
            } else {
                sub -= v;
            }
        }
        if sub < 0 || sub as usize > max_sub {
            S::zero()
        } else {
            ghat[sub as usize].clone()
        }
    };
    let arr = HyperArray {
        order: 2 * p as usize,
        dim: b as usize,
        entry: &entry,
    };
    let det = hyperdet(&arr, budget)?;
    let pref = factorial(b) * num::pow::pow(factorial(p), b as usize) / factorial(p * b);
    Ok(S::from_rat(&pref) * det)
}

/// Rectangular (zero-padded) Jack Q_lambda^{(1/2)} on two alphabets via the
/// 2n x 2n Pfaffian with the palindromic padded index sequence
/// gamma = (lambda_n, ..., lambda_1, lambda_1, ..., lambda_n), n >= l(lambda):
/// Q = Pf((j - i) ghat_{gamma_j + 2n + 1 - i - j}) / (2n-1)!!.
pub fn rect_jack_pfaffian<S: Scalar>(
    lambda: &Partition,
    n: usize,
    pts: &BiPointSet<S>,
) -> Result<S, MultialtError> {
    if lambda.as_rectangle().is_none() {
        return Err(MultialtError::NonRectangular(lambda.clone()));
    }
    if n < lambda.len() {
        return Err(MultialtError::PaddingTooShort {
            n,
            len: lambda.len(),
        });
    }
    pfaffian_padded(lambda, n, pts)
}

/// The Pfaffian evaluation without the rectangularity guard; the two-row
/// test vectors reuse it directly.
pub(crate) fn pfaffian_padded<S: Scalar>(
    lambda: &Partition,
    n: usize,
    pts: &BiPointSet<S>,
) -> Result<S, MultialtError> {
    let half = AlphaParam::from_parts(1, 2);
    let mut gamma: Vec<i64> = Vec::with_capacity(2 * n);
    for i in (0..n).rev() {
        gamma.push(lambda.part(i) as i64);
    }
    for i in 0..n {
        gamma.push(lambda.part(i) as i64);
    }
    let max_sub = (lambda.part(0) as usize) + 2 * n - 1;
    let ghat = g_hat_values(max_sub, pts, &half);
    let gval = |sub: i64| -> S {
        if sub < 0 || sub as usize > max_sub {
            S::zero()
        } else {
            ghat[sub as usize].clone()
        }
    };
    let b = SkewMatrix::from_fn(2 * n, |i, j| {
        // 1-based formula: (j - i) ghat_{gamma_j + 2n + 1 - i - j}
        let (i1, j1) = (i as i64 + 1, j as i64 + 1);
        let sub = gamma[j] + 2 * n as i64 + 1 - i1 - j1;
        S::from_rat(&crate::num::rat_int(j1 - i1)) * gval(sub)
    })?;
    let pf = pfaffian(&b);
    let norm = double_factorial_odd(n as u32);
    Ok(pf / S::from_rat(&norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rat, rat_int, rat_one, Rat};
    use num::Zero;
    use crate::superjack::super_q;
    use crate::symfun::JackCtx;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec())
    }

    #[test]
    fn hyperdet_p1_is_determinant() {
        let vals = [[rat_int(1), rat_int(2)], [rat_int(3), rat_int(4)]];
        let entry = |idx: &[usize]| vals[idx[0]][idx[1]].clone();
        let arr = HyperArray {
            order: 2,
            dim: 2,
            entry: &entry,
        };
        assert_eq!(hyperdet(&arr, 1000).unwrap(), rat_int(-2));
    }

    #[test]
    fn hyperdet_single_entry() {
        let entry = |_: &[usize]| rat(7, 3);
        let arr = HyperArray {
            order: 6,
            dim: 1,
            entry: &entry,
        };
        assert_eq!(hyperdet(&arr, 1000).unwrap(), rat(7, 3));
    }

    #[test]
    fn hyperdet_matches_determinant_on_random_matrices() {
        let mut seed = 12345u64;
        let mut next = move || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            rat(((seed >> 33) % 19) as i64 - 9, 7)
        };
        for dim in 1..=5usize {
            let vals: Vec<Vec<Rat>> = (0..dim)
                .map(|_| (0..dim).map(|_| next()).collect())
                .collect();
            let entry = |idx: &[usize]| vals[idx[0]][idx[1]].clone();
            let arr = HyperArray {
                order: 2,
                dim,
                entry: &entry,
            };
            let hd = hyperdet(&arr, 10_000_000).unwrap();
            let det = determinant(dim, |i, j| vals[i][j].clone());
            assert_eq!(hd, det, "dim {dim}");
        }
    }

    #[test]
    fn hyperdet_alternating_in_each_slot() {
        // transposing two values in any one index slot negates the result
        for dim in [2usize, 3] {
            let mut seed = 999u64;
            let mut next = move || {
                seed = seed
                    .wrapping_mul(2862933555777941757)
                    .wrapping_add(3037000493);
                rat(((seed >> 30) % 11) as i64 - 5, 3)
            };
            let order = 4usize;
            let size = dim.pow(order as u32);
            let vals: Vec<Rat> = (0..size).map(|_| next()).collect();
            let flat = |idx: &[usize]| -> usize { idx.iter().fold(0, |acc, &i| acc * dim + i) };
            let entry = |idx: &[usize]| vals[flat(idx)].clone();
            let arr = HyperArray {
                order,
                dim,
                entry: &entry,
            };
            let base = hyperdet(&arr, 10_000_000).unwrap();
            for slot in 0..order {
                let swapped = |idx: &[usize]| {
                    let mut idx2 = idx.to_vec();
                    if idx2[slot] == 0 {
                        idx2[slot] = 1;
                    } else if idx2[slot] == 1 {
                        idx2[slot] = 0;
                    }
                    vals[flat(&idx2)].clone()
                };
                let arr2 = HyperArray {
                    order,
                    dim,
                    entry: &swapped,
                };
                let neg = hyperdet(&arr2, 10_000_000).unwrap();
                assert_eq!(neg, -base.clone(), "slot {slot} dim {dim}");
            }
        }
    }

    #[test]
    fn hyperdet_budget_guard() {
        let entry = |_: &[usize]| rat_one();
        let arr = HyperArray {
            order: 4,
            dim: 5,
            entry: &entry,
        };
        assert!(matches!(
            hyperdet(&arr, 1000),
            Err(MultialtError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn pfaffian_two_by_two() {
        let b = SkewMatrix::from_fn(2, |_, _| rat(5, 2)).unwrap();
        assert_eq!(pfaffian(&b), rat(5, 2));
    }

    #[test]
    fn pfaffian_dim_four_formula() {
        // Pf = b12 b34 - b13 b24 + b14 b23
        let vals = [
            [rat_int(0), rat_int(2), rat_int(3), rat_int(5)],
            [rat_int(0), rat_int(0), rat_int(7), rat_int(11)],
            [rat_int(0), rat_int(0), rat_int(0), rat_int(13)],
        ];
        let b = SkewMatrix::from_fn(4, |i, j| vals[i][j].clone()).unwrap();
        let want = rat_int(2 * 13 - 3 * 11 + 5 * 7);
        assert_eq!(pfaffian(&b), want);
    }

    #[test]
    fn pfaffian_odd_dimension_rejected() {
        assert!(matches!(
            SkewMatrix::from_fn(3, |_, _| rat_one()),
            Err(MultialtError::OddDimension(3))
        ));
    }

    #[test]
    fn pfaffian_squared_is_determinant() {
        let mut seed = 4242u64;
        let mut next = move || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            rat(((seed >> 33) % 23) as i64 - 11, 5)
        };
        for dim in [2usize, 4, 6, 8] {
            let b = SkewMatrix::from_fn(dim, |_, _| next()).unwrap();
            let pf = pfaffian(&b);
            let det = determinant(dim, |i, j| {
                if i == j {
                    Rat::zero()
                } else {
                    b.entry(i, j)
                }
            });
            assert_eq!(pf.clone() * pf, det, "dim {dim}");
        }
    }

    #[test]
    fn rect_hyperdet_p1_is_jacobi_trudi() {
        // a=2, b=2, x=(1/2,1/3), y={}: s_(2,2)(x) = (x1 x2)^2 = 1/36
        let pts = BiPointSet::new(vec![rat(1, 2), rat(1, 3)], vec![]);
        let v: Rat = rect_jack_hyperdet(2, 2, 1, &pts, 1_000_000).unwrap();
        assert_eq!(v, rat(1, 36));
    }

    #[test]
    fn rect_hyperdet_matches_super_q() {
        let ctx = JackCtx::new();
        let pts = BiPointSet::new(vec![rat(1, 2), rat(-1, 3), rat(1, 5)], vec![rat(1, 4)]);
        for pp in 1..=2u32 {
            let alpha = AlphaParam::from_parts(1, pp as i64);
            for a in 1..=3u32 {
                for b in 1..=3u32 {
                    let got: Rat = rect_jack_hyperdet(a, b, pp, &pts, 10_000_000).unwrap();
                    let want: Rat = super_q(&ctx, &Partition::rectangle(a, b), &pts, &alpha);
                    assert_eq!(got, want, "a={a} b={b} p={pp}");
                }
            }
        }
    }

    #[test]
    fn rect_hyperdet_vanishing_cross_check() {
        // p=2, a=1, b=2, one variable: Q_{(1,1)}^{(1/2)}(x) = 0
        let pts = BiPointSet::new(vec![rat(1, 2)], vec![]);
        let v: Rat = rect_jack_hyperdet(1, 2, 2, &pts, 1_000_000).unwrap();
        assert_eq!(v, Rat::zero());
    }

    #[test]
    fn rect_pfaffian_matches_super_q_with_both_paddings() {
        let ctx = JackCtx::new();
        let half = AlphaParam::from_parts(1, 2);
        let pts = BiPointSet::new(vec![rat(1, 3), rat(-1, 4)], vec![rat(1, 5)]);
        for (a, b) in [
            (1u32, 1u32),
            (2, 1),
            (1, 2),
            (2, 2),
            (3, 2),
            (2, 3),
            (4, 2),
            (8, 1),
            (1, 8),
            (4, 1),
        ] {
            let lam = Partition::rectangle(a, b);
            if lam.weight() > 8 {
                continue;
            }
            let want: Rat = super_q(&ctx, &lam, &pts, &half);
            for pad in [lam.len(), lam.len() + 1] {
                let got: Rat = rect_jack_pfaffian(&lam, pad, &pts).unwrap();
                assert_eq!(got, want, "lam {lam} pad {pad}");
            }
        }
    }

    #[test]
    fn rect_pfaffian_one_box() {
        // Q_(1)^{(1/2)} = 2 m_1 at a point, via the n=1 2x2 Pfaffian
        let pts = BiPointSet::new(vec![rat(2, 7)], vec![]);
        let v: Rat = rect_jack_pfaffian(&p(&[1]), 1, &pts).unwrap();
        assert_eq!(v, rat(4, 7));
    }

    #[test]
    fn rect_pfaffian_rejects_non_rectangles() {
        let pts: BiPointSet<Rat> = BiPointSet::new(vec![rat(1, 2)], vec![]);
        assert!(matches!(
            rect_jack_pfaffian(&p(&[2, 1]), 2, &pts),
            Err(MultialtError::NonRectangular(_))
        ));
        assert!(matches!(
            rect_jack_pfaffian(&p(&[2, 2]), 1, &pts),
            Err(MultialtError::PaddingTooShort { .. })
        ));
    }

    #[test]
    fn two_row_three_term_formula() {
        // Q^{(1/2)}_{(l1,l2)} = g_{l1} g_{l2}
        //   - 2 (l1-l2+2)/(l1-l2+3) g_{l1+1} g_{l2-1}
        //   + (l1-l2+1)/(l1-l2+3) g_{l1+2} g_{l2-2}
        let ctx = JackCtx::new();
        let half = AlphaParam::from_parts(1, 2);
        let pts = BiPointSet::new(vec![rat(1, 3), rat(1, 4), rat(-2, 7)], vec![]);
        for (l1, l2) in [(1u32, 1u32), (2, 1), (3, 1), (3, 2), (4, 2), (5, 3)] {
            let lam = p(&[l1, l2]);
            let want: Rat = super_q(&ctx, &lam, &pts, &half);
            let gh = g_hat_values((l1 + 2) as usize, &pts, &half);
            let g = |k: i64| -> Rat {
                if k < 0 {
                    Rat::zero()
                } else {
                    gh[k as usize].clone()
                }
            };
            let d = rat_int((l1 - l2) as i64);
            let got = g(l1 as i64) * g(l2 as i64)
                - rat_int(2) * (d.clone() + rat_int(2)) / (d.clone() + rat_int(3))
                    * g(l1 as i64 + 1)
                    * g(l2 as i64 - 1)
                + (d.clone() + rat_one()) / (d + rat_int(3)) * g(l1 as i64 + 2) * g(l2 as i64 - 2);
            assert_eq!(got, want, "two-row ({l1},{l2})");
        }
    }

    #[test]
    fn two_row_pfaffian_form() {
        // the 4x4 Pfaffian wrapping of the three-term expansion
        let ctx = JackCtx::new();
        let half = AlphaParam::from_parts(1, 2);
        let pts = BiPointSet::new(vec![rat(1, 3), rat(2, 5)], vec![rat(1, 6)]);
        for (l1, l2) in [(2u32, 1u32), (3, 1), (4, 2)] {
            let lam = p(&[l1, l2]);
            let want: Rat = super_q(&ctx, &lam, &pts, &half);
            let gh = g_hat_values((l1 + 2) as usize, &pts, &half);
            let g = |k: i64| -> Rat {
                if k < 0 {
                    Rat::zero()
                } else {
                    gh[k as usize].clone()
                }
            };
            let d = (l1 - l2) as i64;
            let (a1, a2) = (l1 as i64, l2 as i64);
            let rows: [[Rat; 4]; 3] = [
                [
                    Rat::zero(),
                    g(a1 + 2),
                    rat_int(2) * g(a1 + 1),
                    rat_int(d + 3) * g(a2),
                ],
                [
                    Rat::zero(),
                    Rat::zero(),
                    g(a1),
                    rat_int(d + 2) * g(a2 - 1),
                ],
                [
                    Rat::zero(),
                    Rat::zero(),
                    Rat::zero(),
                    rat_int(d + 1) * g(a2 - 2),
                ],
            ];
            let b = SkewMatrix::from_fn(4, |i, j| rows[i][j].clone()).unwrap();
            let got = pfaffian(&b) / rat_int(d + 3);
            assert_eq!(got, want, "two-row Pfaffian ({l1},{l2})");
        }
    }
}
