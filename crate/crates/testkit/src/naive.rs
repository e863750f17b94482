//! A deliberately naive dense multivariate polynomial over exact rationals,
//! used to rebuild Jack polynomials from their defining properties without
//! touching the symmetric-function engine.  Slow by design; auditability
//! beats speed here.

use cbeta_core::num::Rat;
use cbeta_core::Partition;
use num::{One, Zero};
use std::collections::BTreeMap;

/// Polynomial in a fixed number of variables, exponent vector -> coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct NaivePoly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, Rat>,
}

impl NaivePoly {
    pub fn zero(nvars: usize) -> Self {
        NaivePoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut t = BTreeMap::new();
        if !c.is_zero() {
            t.insert(vec![0; nvars], c);
        }
        NaivePoly { nvars, terms: t }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The monomial symmetric polynomial m_lambda in `nvars` variables:
    /// the sum over all distinct permutations of the padded exponent vector.
    pub fn monomial_symmetric(lambda: &Partition, nvars: usize) -> Self {
        assert!(lambda.len() <= nvars, "partition longer than the alphabet");
        let mut exps: Vec<u32> = (0..nvars).map(|i| lambda.part(i)).collect();
        exps.sort_unstable();
        let mut terms = BTreeMap::new();
        loop {
            terms.insert(exps.clone(), Rat::one());
            if !next_permutation_u32(&mut exps) {
                break;
            }
        }
        NaivePoly { nvars, terms }
    }

    /// The power sum p_k in `nvars` variables.
    pub fn power_sum(k: u32, nvars: usize) -> Self {
        let mut terms = BTreeMap::new();
        for i in 0..nvars {
            let mut e = vec![0u32; nvars];
            e[i] = k;
            terms.insert(e, Rat::one());
        }
        NaivePoly { nvars, terms }
    }

    /// The product p_rho = p_{rho_1} p_{rho_2} ... in `nvars` variables.
    pub fn power_sum_product(rho: &Partition, nvars: usize) -> Self {
        let mut acc = NaivePoly::constant(nvars, Rat::one());
        for r in rho.parts() {
            acc = acc.mul(&NaivePoly::power_sum(*r, nvars));
        }
        acc
    }

    pub fn add(&self, other: &NaivePoly) -> NaivePoly {
        assert_eq!(self.nvars, other.nvars);
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let slot = terms.entry(e.clone()).or_insert_with(Rat::zero);
            *slot += c;
        }
        terms.retain(|_, c| !c.is_zero());
        NaivePoly {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn scale(&self, c: &Rat) -> NaivePoly {
        if c.is_zero() {
            return NaivePoly::zero(self.nvars);
        }
        NaivePoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.clone(), v * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &NaivePoly) -> NaivePoly {
        assert_eq!(self.nvars, other.nvars);
        let mut terms: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let slot = terms.entry(e).or_insert_with(Rat::zero);
                *slot += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        NaivePoly {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn eval(&self, pts: &[Rat]) -> Rat {
        assert!(pts.len() >= self.nvars);
        let mut total = Rat::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, &k) in e.iter().enumerate() {
                term *= num::pow::pow(pts[i].clone(), k as usize);
            }
            total += term;
        }
        total
    }

    /// Set every variable beyond `keep` to zero.
    pub fn truncate_vars(&self, keep: usize) -> NaivePoly {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[keep..].iter().all(|&k| k == 0) {
                terms.insert(e[..keep].to_vec(), c.clone());
            }
        }
        NaivePoly {
            nvars: keep,
            terms,
        }
    }

    /// Symmetry spot check: invariance under a transposition and the full
    /// cycle of the variables.
    pub fn is_symmetric(&self) -> bool {
        let permuted = |perm: &dyn Fn(usize) -> usize| -> BTreeMap<Vec<u32>, Rat> {
            self.terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = vec![0u32; self.nvars];
                    for (i, &k) in e.iter().enumerate() {
                        e2[perm(i)] = k;
                    }
                    (e2, c.clone())
                })
                .collect()
        };
        if self.nvars < 2 {
            return true;
        }
        let swap = permuted(&|i| match i {
            0 => 1,
            1 => 0,
            other => other,
        });
        let cycle = permuted(&|i| (i + 1) % self.nvars);
        swap == self.terms && cycle == self.terms
    }
}

fn next_permutation_u32(arr: &mut [u32]) -> bool {
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

#[cfg(test)]
mod tests {
    use super::*;
    use cbeta_core::num::rat;

    #[test]
    fn monomial_orbit_counts() {
        let m = NaivePoly::monomial_symmetric(&Partition::new(vec![2, 1]), 3);
        assert_eq!(m.terms.len(), 6);
        let e = NaivePoly::monomial_symmetric(&Partition::new(vec![1, 1]), 3);
        assert_eq!(e.terms.len(), 3);
    }

    #[test]
    fn newton_identity_p1_squared() {
        let p1 = NaivePoly::power_sum(1, 3);
        let sq = p1.mul(&p1);
        let m2 = NaivePoly::monomial_symmetric(&Partition::new(vec![2]), 3);
        let m11 = NaivePoly::monomial_symmetric(&Partition::new(vec![1, 1]), 3);
        assert_eq!(sq, m2.add(&m11.scale(&rat(2, 1))));
    }

    #[test]
    fn symmetry_check() {
        let m = NaivePoly::monomial_symmetric(&Partition::new(vec![3, 1]), 3);
        assert!(m.is_symmetric());
        let mut asym = m.clone();
        asym.terms.insert(vec![5, 0, 0], rat(1, 1));
        assert!(!asym.is_symmetric());
    }
}
