//! Integer partitions (Young diagrams) and the diagram statistics consumed by
//! the Jack-polynomial formulas: conjugation, dominance order, arm/leg data,
//! hook products, generalized Pochhammer symbols, and bounded enumeration.

use crate::num::{rat_int, Rat};
use num::One;
use serde::de::{SeqAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// A partition stored as weakly decreasing positive parts, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Canonicalizes the input: sorts descending and strips zeros.
    pub fn new(parts: impl Into<Vec<u32>>) -> Self {
        let mut parts = parts.into();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Partition { parts }
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// Rectangle (a^b): b rows of length a.
    pub fn rectangle(a: u32, b: u32) -> Self {
        if a == 0 {
            return Partition::empty();
        }
        Partition {
            parts: vec![a; b as usize],
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// i-th part (0-based), zero beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Transposed diagram.
    pub fn conjugate(&self) -> Partition {
        if self.parts.is_empty() {
            return Partition::empty();
        }
        let cols = self.parts[0] as usize;
        let mut out = Vec::with_capacity(cols);
        for j in 1..=cols as u32 {
            out.push(self.parts.iter().filter(|&&p| p >= j).count() as u32);
        }
        Partition { parts: out }
    }

    /// Containment of diagrams: self_i <= other_i for all i.
    pub fn contained_in(&self, other: &Partition) -> bool {
        (0..self.len()).all(|i| self.part(i) <= other.part(i))
    }

    /// Number of rows of length exactly k.
    pub fn multiplicity(&self, k: u32) -> u32 {
        self.parts.iter().filter(|&&p| p == k).count() as u32
    }

    /// z_lambda = prod_k k^{m_k} m_k!.
    pub fn z_value(&self) -> Rat {
        let mut z = Rat::one();
        let mut i = 0;
        while i < self.parts.len() {
            let k = self.parts[i];
            let mut m = 0i64;
            while i < self.parts.len() && self.parts[i] == k {
                m += 1;
                i += 1;
            }
            for j in 1..=m {
                z *= rat_int(k as i64 * j);
            }
        }
        z
    }

    /// Arm length of the square (i, j), 1-based.
    pub fn arm(&self, i: usize, j: u32) -> u32 {
        self.part(i - 1) - j
    }

    /// Leg length of the square (i, j), 1-based.
    pub fn leg(&self, i: usize, j: u32) -> u32 {
        self.parts.iter().filter(|&&p| p >= j).count() as u32 - i as u32
    }

    /// Iterates over the squares (i, j) of the diagram, 1-based.
    pub fn squares(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (1..=p).map(move |j| (i + 1, j)))
    }

    /// Hook products (c_lambda, c'_lambda, b_lambda) at the given alpha.
    pub fn hook_products(&self, alpha: &Rat) -> (Rat, Rat, Rat) {
        let conj = self.conjugate();
        let mut c = Rat::one();
        let mut cp = Rat::one();
        for (i, j) in self.squares() {
            let a = rat_int(self.arm(i, j) as i64);
            let l = rat_int((conj.part(j as usize - 1) as i64) - i as i64);
            c *= alpha.clone() * a.clone() + l.clone() + Rat::one();
            cp *= alpha.clone() * a + l + alpha.clone();
        }
        let b = c.clone() / cp.clone();
        (c, cp, b)
    }

    /// b_lambda = c_lambda / c'_lambda.
    pub fn b_value(&self, alpha: &Rat) -> Rat {
        self.hook_products(alpha).2
    }

    /// Generalized Pochhammer symbol [u]_lambda^(alpha) =
    /// prod_{(i,j) in lambda} (u - (i-1)/alpha + (j-1)).
    pub fn gen_pochhammer(&self, u: &Rat, alpha: &Rat) -> Rat {
        let mut r = Rat::one();
        for (i, row) in self.parts.iter().enumerate() {
            let shift = u - rat_int(i as i64) / alpha.clone();
            for j in 0..*row {
                r *= shift.clone() + rat_int(j as i64);
            }
        }
        r
    }

    /// Row-wise sum (lambda + mu)_i = lambda_i + mu_i.
    pub fn diagram_sum(&self, other: &Partition) -> Partition {
        let n = self.len().max(other.len());
        let parts: Vec<u32> = (0..n).map(|i| self.part(i) + other.part(i)).collect();
        Partition::new(parts)
    }

    /// Multiset union of rows, sorted descending.
    pub fn diagram_union(&self, other: &Partition) -> Partition {
        let mut parts = self.parts.clone();
        parts.extend_from_slice(&other.parts);
        Partition::new(parts)
    }

    /// Fat (p, q)-hook test: lambda_{p+1} <= q.
    pub fn is_fat_hook(&self, p: usize, q: u32) -> bool {
        self.part(p) <= q
    }

    /// True when the diagram is a rectangle (a^b); returns (a, b), with
    /// (0, 0) for the empty diagram.
    pub fn as_rectangle(&self) -> Option<(u32, u32)> {
        if self.parts.is_empty() {
            return Some((0, 0));
        }
        let a = self.parts[0];
        if self.parts.iter().all(|&p| p == a) {
            Some((a, self.parts.len() as u32))
        } else {
            None
        }
    }
}

/// Dominance order: mu <= lambda iff equal weights and all prefix sums of mu
/// are bounded by those of lambda.
pub fn dominance_leq(mu: &Partition, lambda: &Partition) -> bool {
    if mu.weight() != lambda.weight() {
        return false;
    }
    let mut sm = 0u64;
    let mut sl = 0u64;
    for i in 0..mu.len().max(lambda.len()) {
        sm += mu.part(i) as u64;
        sl += lambda.part(i) as u64;
        if sm > sl {
            return false;
        }
    }
    true
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.parts.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Partition;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an array of weakly decreasing nonnegative integers")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Partition, A::Error> {
                let mut parts = Vec::new();
                while let Some(x) = seq.next_element::<u32>()? {
                    parts.push(x);
                }
                Ok(Partition::new(parts))
            }
        }
        d.deserialize_seq(V)
    }
}

/// Bounds for [`enumerate_partitions`]; at least one of `max_weight` or the
/// pair (`max_part`, `max_length`) must be finite.
#[derive(Clone, Copy, Debug, Default)]
pub struct EnumBounds {
    pub max_part: Option<u32>,
    pub max_length: Option<usize>,
    pub max_weight: Option<u32>,
}

impl EnumBounds {
    pub fn weight(w: u32) -> Self {
        EnumBounds {
            max_weight: Some(w),
            ..Default::default()
        }
    }

    fn effective_weight(&self) -> Option<u32> {
        match (self.max_weight, self.max_part, self.max_length) {
            (Some(w), _, _) => Some(w),
            (None, Some(p), Some(l)) => Some(p.saturating_mul(l as u32)),
            _ => None,
        }
    }
}

/// Streams every partition within the bounds exactly once, ordered by weight
/// and then descending-lexicographically within each weight, starting with
/// the empty partition.  Returns an error when all bounds are absent.
pub fn enumerate_partitions(
    bounds: EnumBounds,
) -> Result<impl Iterator<Item = Partition>, String> {
    let total = bounds
        .effective_weight()
        .ok_or_else(|| "unbounded partition enumeration rejected".to_string())?;
    Ok((0..=total).flat_map(move |w| partitions_of_weight(w, bounds).into_iter()))
}

/// All partitions of exact weight `w` within the bounds, in descending
/// lexicographic order.
pub fn partitions_of_weight(w: u32, bounds: EnumBounds) -> Vec<Partition> {
    let max_part = bounds.max_part.unwrap_or(w).min(w);
    let max_len = bounds.max_length.unwrap_or(w as usize);
    let mut out = Vec::new();
    let mut stack = Vec::new();
    fn rec(
        rem: u32,
        max_part: u32,
        slots: usize,
        stack: &mut Vec<u32>,
        out: &mut Vec<Partition>,
    ) {
        if rem == 0 {
            out.push(Partition {
                parts: stack.clone(),
            });
            return;
        }
        if slots == 0 || max_part == 0 {
            return;
        }
        let hi = rem.min(max_part);
        let lo = rem.div_ceil(slots as u32);
        for p in (lo..=hi).rev() {
            stack.push(p);
            rec(rem - p, p, slots - 1, stack, out);
            stack.pop();
        }
    }
    if w == 0 {
        return vec![Partition::empty()];
    }
    rec(w, max_part, max_len, &mut stack, &mut out);
    out
}
