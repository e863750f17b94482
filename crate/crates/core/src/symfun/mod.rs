//! Exact symmetric-function algebra at a fixed rational alpha.
//!
//! Everything here is coefficient-exact over the rationals.  The power-sum
//! basis is the conversion hub: the alpha-inner product, the omega involution
//! and the two-alphabet substitutions are all diagonal or termwise there.
//! Jack P-polynomials are built lazily per partition by Gram-Schmidt over the
//! dominance-lower monomials, and cached per (alpha, partition).
//!
//! Pointwise evaluation of Jack and skew Jack functions at small alphabets
//! (any weight, used by the series routes) lives in [`branching`].

pub mod branching;

use crate::num::{rat_int, AlphaParam, Rat, Scalar};
use crate::partition::{dominance_leq, partitions_of_weight, EnumBounds, Partition};
use num::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};
use thiserror::Error;

/// Coefficient map over partition-labelled basis elements of one basis.
pub type TermMap = BTreeMap<Partition, Rat>;

pub const DEFAULT_WEIGHT_CAP: u32 = 14;

#[derive(Debug, Error)]
pub enum SymfunError {
    #[error("weight {weight} exceeds the symbolic weight cap {cap}")]
    WeightCap { weight: u32, cap: u32 },
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("{0}")]
    Invalid(String),
}

/// Basis tag for a [`SymPoly`].
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
pub enum Basis {
    #[serde(rename = "monomial")]
    Monomial,
    #[serde(rename = "powersum")]
    PowerSum,
    #[serde(rename = "jackP")]
    JackP,
    #[serde(rename = "jackQ")]
    JackQ,
    #[serde(rename = "gBasis")]
    G,
}

impl Basis {
    pub fn needs_alpha(self) -> bool {
        matches!(self, Basis::JackP | Basis::JackQ | Basis::G)
    }
}

/// A finite linear combination of basis elements with exact rational
/// coefficients.  All labels share one basis tag and, for alpha-dependent
/// bases, one alpha.
#[derive(Clone, PartialEq, Debug)]
pub struct SymPoly {
    basis: Basis,
    alpha: Option<AlphaParam>,
    terms: TermMap,
}

impl SymPoly {
    pub fn new(basis: Basis, alpha: Option<AlphaParam>, terms: TermMap) -> Self {
        debug_assert!(!basis.needs_alpha() || alpha.is_some());
        let terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        SymPoly { basis, alpha, terms }
    }

    pub fn zero(basis: Basis, alpha: Option<AlphaParam>) -> Self {
        SymPoly::new(basis, alpha, TermMap::new())
    }

    pub fn constant(c: Rat, basis: Basis, alpha: Option<AlphaParam>) -> Self {
        let mut t = TermMap::new();
        if !c.is_zero() {
            t.insert(Partition::empty(), c);
        }
        SymPoly::new(basis, alpha, t)
    }

    /// m_lambda.
    pub fn monomial(lambda: Partition) -> Self {
        let mut t = TermMap::new();
        t.insert(lambda, Rat::one());
        SymPoly::new(Basis::Monomial, None, t)
    }

    /// p_lambda.
    pub fn power_sum(lambda: Partition) -> Self {
        let mut t = TermMap::new();
        t.insert(lambda, Rat::one());
        SymPoly::new(Basis::PowerSum, None, t)
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn alpha(&self) -> Option<&AlphaParam> {
        self.alpha.as_ref()
    }

    pub fn terms(&self) -> &TermMap {
        &self.terms
    }

    pub fn coeff(&self, lambda: &Partition) -> Rat {
        self.terms.get(lambda).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_weight(&self) -> u32 {
        self.terms.keys().map(|l| l.weight()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rat) -> SymPoly {
        if c.is_zero() {
            return SymPoly::zero(self.basis, self.alpha.clone());
        }
        SymPoly {
            basis: self.basis,
            alpha: self.alpha.clone(),
            terms: self
                .terms
                .iter()
                .map(|(l, v)| (l.clone(), v * c))
                .collect(),
        }
    }

    pub fn add(&self, other: &SymPoly) -> Result<SymPoly, SymfunError> {
        if self.basis != other.basis || self.alpha != other.alpha {
            return Err(SymfunError::BasisMismatch(
                "cannot add polynomials in different bases".into(),
            ));
        }
        let mut terms = self.terms.clone();
        for (l, c) in &other.terms {
            let e = terms.entry(l.clone()).or_insert_with(Rat::zero);
            *e += c;
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(SymPoly {
            basis: self.basis,
            alpha: self.alpha.clone(),
            terms,
        })
    }

    pub fn sub(&self, other: &SymPoly) -> Result<SymPoly, SymfunError> {
        self.add(&other.scale(&-Rat::one()))
    }
}

impl fmt::Display for SymPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let tag = match self.basis {
            Basis::Monomial => "m",
            Basis::PowerSum => "p",
            Basis::JackP => "P",
            Basis::JackQ => "Q",
            Basis::G => "g",
        };
        for (i, (l, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{tag}{l}")?;
        }
        Ok(())
    }
}

/// Per-weight transition data between the monomial and power-sum bases.
/// Alpha-independent, so shared across all alphas.
struct WeightTables {
    /// All partitions of the weight in lex-ascending order (a linear
    /// extension of dominance: lower partitions come first).
    parts: Vec<Partition>,
    index: HashMap<Partition, usize>,
    /// Row rho: p_rho expanded in the monomial basis.
    p2m: Vec<Vec<(usize, Rat)>>,
    /// Row kappa: m_kappa expanded in the power-sum basis.
    m2p: Vec<Vec<(usize, Rat)>>,
}

/// Multiply an m-basis vector by p_r.
fn mul_by_power_sum(vec: &TermMap, r: u32) -> TermMap {
    let mut out = TermMap::new();
    for (lam, c) in vec {
        // candidate results: add r to one row (one representative per distinct
        // part value, plus a fresh row)
        let mut cands: Vec<Partition> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut spots: Vec<usize> = Vec::new();
        for i in 0..lam.len() {
            if i == 0 || lam.part(i) != lam.part(i - 1) {
                spots.push(i);
            }
        }
        for idx in spots {
            let mut p = lam.parts().to_vec();
            p[idx] += r;
            let mu = Partition::new(p);
            if seen.insert(mu.clone()) {
                cands.push(mu);
            }
        }
        {
            let mut p = lam.parts().to_vec();
            p.push(r);
            let mu = Partition::new(p);
            if seen.insert(mu.clone()) {
                cands.push(mu);
            }
        }
        for mu in cands {
            // count rows j of mu whose reduction by r recovers lambda
            let mut cnt = 0i64;
            for j in 0..mu.len() {
                if mu.part(j) < r {
                    continue;
                }
                let mut p = mu.parts().to_vec();
                p[j] -= r;
                if &Partition::new(p) == lam {
                    cnt += 1;
                }
            }
            if cnt > 0 {
                let e = out.entry(mu).or_insert_with(Rat::zero);
                *e += c * rat_int(cnt);
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

impl WeightTables {
    fn build(d: u32) -> WeightTables {
        let mut parts = partitions_of_weight(d, EnumBounds::weight(d));
        parts.sort(); // lex ascending on the part vectors
        let index: HashMap<Partition, usize> = parts
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        let n = parts.len();

        let mut p2m = Vec::with_capacity(n);
        for rho in &parts {
            let mut vec = TermMap::new();
            vec.insert(Partition::empty(), Rat::one());
            for r in rho.parts() {
                vec = mul_by_power_sum(&vec, *r);
            }
            let mut row: Vec<(usize, Rat)> =
                vec.into_iter().map(|(mu, c)| (index[&mu], c)).collect();
            row.sort_by_key(|(i, _)| *i);
            p2m.push(row);
        }

        // m_kappa in p: triangular solve, lowest partitions first.  p_rho has
        // monomial support only at partitions >= rho in dominance, so after
        // eliminating position rho the residual lives strictly above it.
        let mut m2p = Vec::with_capacity(n);
        for kappa in 0..n {
            let mut rem = vec![Rat::zero(); n];
            rem[kappa] = Rat::one();
            let mut coeffs: Vec<(usize, Rat)> = Vec::new();
            for rho in 0..n {
                if rem[rho].is_zero() {
                    continue;
                }
                let diag = p2m[rho]
                    .iter()
                    .find(|(i, _)| *i == rho)
                    .map(|(_, c)| c.clone())
                    .expect("p2m diagonal entry");
                let t = rem[rho].clone() / diag;
                for (i, c) in &p2m[rho] {
                    rem[*i] -= t.clone() * c;
                }
                coeffs.push((rho, t));
            }
            debug_assert!(rem.iter().all(|c| c.is_zero()));
            m2p.push(coeffs);
        }

        WeightTables {
            parts,
            index,
            p2m,
            m2p,
        }
    }
}

/// Cached Jack data for one (alpha, lambda): the monomial expansion, the
/// power-sum expansion, and the squared norm.
struct JackData {
    mvec: TermMap,
    pvec: TermMap,
    norm: Rat,
}

/// Shared context owning all symbolic caches.  Cheap to share behind a
/// reference; all methods take `&self` and the caches are internally locked.
/// After a value is built it is immutable.
pub struct JackCtx {
    weight_cap: u32,
    tables: Mutex<HashMap<u32, Arc<WeightTables>>>,
    jack: Mutex<HashMap<(AlphaParam, Partition), Arc<JackData>>>,
    /// Cached expansion of P_mu * P_nu in the Jack-P basis.
    fprod: Mutex<HashMap<(AlphaParam, Partition, Partition), Arc<TermMap>>>,
    /// Cached per-(alpha, weight) expansion of every g_lambda in power sums,
    /// used to invert the g-basis.
    g2p: Mutex<HashMap<(AlphaParam, u32), Arc<Vec<TermMap>>>>,
}

impl Default for JackCtx {
    fn default() -> Self {
        JackCtx::new()
    }
}

impl JackCtx {
    pub fn new() -> Self {
        JackCtx::with_weight_cap(DEFAULT_WEIGHT_CAP)
    }

    pub fn with_weight_cap(cap: u32) -> Self {
        JackCtx {
            weight_cap: cap,
            tables: Mutex::new(HashMap::new()),
            jack: Mutex::new(HashMap::new()),
            fprod: Mutex::new(HashMap::new()),
            g2p: Mutex::new(HashMap::new()),
        }
    }

    pub fn weight_cap(&self) -> u32 {
        self.weight_cap
    }

    fn weight_tables(&self, d: u32) -> Result<Arc<WeightTables>, SymfunError> {
        if d > self.weight_cap {
            return Err(SymfunError::WeightCap {
                weight: d,
                cap: self.weight_cap,
            });
        }
        if let Some(t) = self.tables.lock().unwrap().get(&d) {
            return Ok(t.clone());
        }
        let built = Arc::new(WeightTables::build(d));
        self.tables
            .lock()
            .unwrap()
            .entry(d)
            .or_insert_with(|| built.clone());
        Ok(built)
    }

    /// m-basis vector -> p-basis vector, degree by degree.
    fn mvec_to_pvec(&self, mvec: &TermMap) -> Result<TermMap, SymfunError> {
        let mut out = TermMap::new();
        for (kappa, c) in mvec {
            let t = self.weight_tables(kappa.weight())?;
            let ki = t.index[kappa];
            for (ri, x) in &t.m2p[ki] {
                let e = out.entry(t.parts[*ri].clone()).or_insert_with(Rat::zero);
                *e += c * x;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// p-basis vector -> m-basis vector.
    fn pvec_to_mvec(&self, pvec: &TermMap) -> Result<TermMap, SymfunError> {
        let mut out = TermMap::new();
        for (rho, c) in pvec {
            let t = self.weight_tables(rho.weight())?;
            let ri = t.index[rho];
            for (mi, x) in &t.p2m[ri] {
                let e = out.entry(t.parts[*mi].clone()).or_insert_with(Rat::zero);
                *e += c * x;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// The diagonal alpha-inner product of two p-basis vectors:
    /// <p_lambda, p_mu> = delta alpha^{l(lambda)} z_lambda.
    fn pvec_inner(a: &TermMap, b: &TermMap, alpha: &AlphaParam) -> Rat {
        let mut s = Rat::zero();
        for (rho, ca) in a {
            if let Some(cb) = b.get(rho) {
                let mut t = ca * cb * rho.z_value();
                t *= num::pow::pow(alpha.value().clone(), rho.len());
                s += t;
            }
        }
        s
    }

    fn jack_data(
        &self,
        lambda: &Partition,
        alpha: &AlphaParam,
    ) -> Result<Arc<JackData>, SymfunError> {
        let key = (alpha.clone(), lambda.clone());
        if let Some(j) = self.jack.lock().unwrap().get(&key) {
            return Ok(j.clone());
        }
        let d = lambda.weight();
        let tables = self.weight_tables(d)?;

        // Partitions strictly below lambda in dominance, lowest first, so the
        // recursion only ever descends.
        let lower: Vec<Partition> = tables
            .parts
            .iter()
            .filter(|mu| *mu != lambda && dominance_leq(mu, lambda))
            .cloned()
            .collect();

        let mut mvec = TermMap::new();
        mvec.insert(lambda.clone(), Rat::one());
        let mut pvec = self.mvec_to_pvec(&mvec)?;

        for mu in &lower {
            let jmu = self.jack_data(mu, alpha)?;
            let t = Self::pvec_inner(&pvec, &jmu.pvec, alpha) / jmu.norm.clone();
            if t.is_zero() {
                continue;
            }
            for (l, c) in &jmu.mvec {
                let e = mvec.entry(l.clone()).or_insert_with(Rat::zero);
                *e -= t.clone() * c;
            }
            for (l, c) in &jmu.pvec {
                let e = pvec.entry(l.clone()).or_insert_with(Rat::zero);
                *e -= t.clone() * c;
            }
        }
        mvec.retain(|_, c| !c.is_zero());
        pvec.retain(|_, c| !c.is_zero());
        let norm = Self::pvec_inner(&pvec, &pvec, alpha);
        let data = Arc::new(JackData { mvec, pvec, norm });
        self.jack
            .lock()
            .unwrap()
            .entry(key)
            .or_insert_with(|| data.clone());
        Ok(data)
    }

    /// Jack P-polynomial in the monomial basis.
    pub fn jack_p(&self, lambda: &Partition, alpha: &AlphaParam) -> Result<SymPoly, SymfunError> {
        let j = self.jack_data(lambda, alpha)?;
        Ok(SymPoly::new(
            Basis::Monomial,
            Some(alpha.clone()),
            j.mvec.clone(),
        ))
    }

    /// Jack Q-polynomial Q = b_lambda P in the monomial basis.
    pub fn jack_q(&self, lambda: &Partition, alpha: &AlphaParam) -> Result<SymPoly, SymfunError> {
        let b = lambda.b_value(alpha.value());
        Ok(self.jack_p(lambda, alpha)?.scale(&b))
    }

    /// <P_lambda, P_lambda>_alpha, computed by Gram-Schmidt (equals 1/b_lambda).
    pub fn jack_norm(&self, lambda: &Partition, alpha: &AlphaParam) -> Result<Rat, SymfunError> {
        Ok(self.jack_data(lambda, alpha)?.norm.clone())
    }

    /// Bilinear extension of <p_lambda, p_mu>_alpha = delta alpha^l z.
    pub fn inner_product(
        &self,
        f: &SymPoly,
        g: &SymPoly,
        alpha: &AlphaParam,
    ) -> Result<Rat, SymfunError> {
        let fp = self.to_basis(f, Basis::PowerSum, Some(alpha))?;
        let gp = self.to_basis(g, Basis::PowerSum, Some(alpha))?;
        Ok(Self::pvec_inner(fp.terms(), gp.terms(), alpha))
    }

    /// Expansion of P_mu * P_nu in the Jack-P basis (all coefficients).
    fn p_product_expansion(
        &self,
        mu: &Partition,
        nu: &Partition,
        alpha: &AlphaParam,
    ) -> Result<Arc<TermMap>, SymfunError> {
        let key = (alpha.clone(), mu.clone(), nu.clone());
        if let Some(v) = self.fprod.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let jm = self.jack_data(mu, alpha)?;
        let jn = self.jack_data(nu, alpha)?;
        // multiply in the power-sum basis: p_rho p_sigma = p_{rho union sigma}
        let mut prod = TermMap::new();
        for (r1, c1) in &jm.pvec {
            for (r2, c2) in &jn.pvec {
                let key = r1.diagram_union(r2);
                let e = prod.entry(key).or_insert_with(Rat::zero);
                *e += c1 * c2;
            }
        }
        let mut mvec = self.pvec_to_mvec(&prod)?;
        // unitriangular back-substitution against Jack leading terms, from the
        // dominance-highest monomial down
        let mut coeffs = TermMap::new();
        while let Some((kappa, c)) = mvec.iter().next_back().map(|(k, v)| (k.clone(), v.clone())) {
            // BTreeMap order is lex on parts; the last key is dominance-maximal
            // among remaining ones (lex-ascending extends dominance).
            let jk = self.jack_data(&kappa, alpha)?;
            for (l, x) in &jk.mvec {
                let e = mvec.entry(l.clone()).or_insert_with(Rat::zero);
                *e -= c.clone() * x;
            }
            mvec.retain(|_, v| !v.is_zero());
            coeffs.insert(kappa, c);
        }
        let arc = Arc::new(coeffs);
        self.fprod
            .lock()
            .unwrap()
            .entry(key)
            .or_insert_with(|| arc.clone());
        Ok(arc)
    }

    /// Structure coefficient f^lambda_{mu nu}(alpha): the coefficient of
    /// P_lambda in P_mu P_nu.  Zero unless |lambda| = |mu| + |nu| and lambda
    /// contains both mu and nu.
    pub fn f_coeff(
        &self,
        mu: &Partition,
        nu: &Partition,
        lambda: &Partition,
        alpha: &AlphaParam,
    ) -> Result<Rat, SymfunError> {
        if lambda.weight() != mu.weight() + nu.weight()
            || !mu.contained_in(lambda)
            || !nu.contained_in(lambda)
        {
            return Ok(Rat::zero());
        }
        let exp = self.p_product_expansion(mu, nu, alpha)?;
        Ok(exp.get(lambda).cloned().unwrap_or_else(Rat::zero))
    }

    /// Skew Jack Q_{lambda/mu} = sum_nu f^lambda_{mu nu} Q_nu, as a SymPoly in
    /// the Jack-Q basis.  Zero when mu is not contained in lambda.
    pub fn skew_q(
        &self,
        lambda: &Partition,
        mu: &Partition,
        alpha: &AlphaParam,
    ) -> Result<SymPoly, SymfunError> {
        let mut terms = TermMap::new();
        if mu.contained_in(lambda) && mu.weight() <= lambda.weight() {
            let w = lambda.weight() - mu.weight();
            for nu in partitions_of_weight(w, EnumBounds::weight(w)) {
                if !nu.contained_in(lambda) {
                    continue;
                }
                let f = self.f_coeff(mu, &nu, lambda, alpha)?;
                if !f.is_zero() {
                    terms.insert(nu, f);
                }
            }
        }
        Ok(SymPoly::new(Basis::JackQ, Some(alpha.clone()), terms))
    }

    /// Skew Jack P_{lambda/mu} = (b_mu / b_lambda) Q_{lambda/mu}, in the
    /// Jack-P basis.
    pub fn skew_p(
        &self,
        lambda: &Partition,
        mu: &Partition,
        alpha: &AlphaParam,
    ) -> Result<SymPoly, SymfunError> {
        let q = self.skew_q(lambda, mu, alpha)?;
        let scale = mu.b_value(alpha.value()) / lambda.b_value(alpha.value());
        // Reinterpret Q-basis coefficients in the P basis: Q_nu = b_nu P_nu.
        let mut terms = TermMap::new();
        for (nu, c) in q.terms() {
            terms.insert(nu.clone(), c * nu.b_value(alpha.value()) * scale.clone());
        }
        Ok(SymPoly::new(Basis::JackP, Some(alpha.clone()), terms))
    }

    /// The automorphism omega_alpha: p_r -> (-1)^{r-1} alpha p_r, applied
    /// termwise in the power-sum basis.  The result is returned in the
    /// power-sum basis.
    pub fn omega(&self, f: &SymPoly, alpha: &AlphaParam) -> Result<SymPoly, SymfunError> {
        let fp = self.to_basis(f, Basis::PowerSum, f.alpha())?;
        let mut terms = TermMap::new();
        for (rho, c) in fp.terms() {
            let sign = if (rho.weight() as usize + rho.len()) % 2 == 0 {
                Rat::one()
            } else {
                -Rat::one()
            };
            let factor = sign * num::pow::pow(alpha.value().clone(), rho.len());
            terms.insert(rho.clone(), c * factor);
        }
        Ok(SymPoly::new(Basis::PowerSum, None, terms))
    }

    /// g_k^{(alpha)} = Q_{(k)}^{(alpha)} in the power-sum basis:
    /// sum over rho of p_rho / (z_rho alpha^{l(rho)}).  Zero for k < 0.
    pub fn g_poly(&self, k: i64, alpha: &AlphaParam) -> SymPoly {
        let mut terms = TermMap::new();
        if k >= 0 {
            for rho in partitions_of_weight(k as u32, EnumBounds::weight(k as u32)) {
                let denom = rho.z_value() * num::pow::pow(alpha.value().clone(), rho.len());
                terms.insert(rho, Rat::one() / denom);
            }
        }
        SymPoly::new(Basis::PowerSum, None, terms)
    }

    /// g_lambda = prod_i g_{lambda_i} in the power-sum basis.
    fn g_product_pvec(&self, lambda: &Partition, alpha: &AlphaParam) -> TermMap {
        let mut acc = TermMap::new();
        acc.insert(Partition::empty(), Rat::one());
        for part in lambda.parts() {
            let gk = self.g_poly(*part as i64, alpha);
            let mut next = TermMap::new();
            for (r1, c1) in &acc {
                for (r2, c2) in gk.terms() {
                    let key = r1.diagram_union(r2);
                    let e = next.entry(key).or_insert_with(Rat::zero);
                    *e += c1 * c2;
                }
            }
            acc = next;
        }
        acc
    }

    /// Coefficient-exact change of basis.  Conversions route through the
    /// power-sum hub; conversions into Jack bases additionally back-solve the
    /// unitriangular monomial system.
    pub fn to_basis(
        &self,
        f: &SymPoly,
        target: Basis,
        alpha: Option<&AlphaParam>,
    ) -> Result<SymPoly, SymfunError> {
        let alpha = alpha.or(f.alpha()).cloned();
        if (target.needs_alpha() || f.basis().needs_alpha()) && alpha.is_none() {
            return Err(SymfunError::Invalid(
                "alpha required for alpha-dependent bases".into(),
            ));
        }
        if f.basis() == target {
            return Ok(f.clone());
        }
        let a = alpha.clone();

        // Step 1: express f in the power-sum basis.
        let pvec: TermMap = match f.basis() {
            Basis::PowerSum => f.terms().clone(),
            Basis::Monomial => self.mvec_to_pvec(f.terms())?,
            Basis::JackP | Basis::JackQ => {
                let al = a.clone().unwrap();
                let mut out = TermMap::new();
                for (lam, c) in f.terms() {
                    let j = self.jack_data(lam, &al)?;
                    let c = if f.basis() == Basis::JackQ {
                        c * lam.b_value(al.value())
                    } else {
                        c.clone()
                    };
                    for (rho, x) in &j.pvec {
                        let e = out.entry(rho.clone()).or_insert_with(Rat::zero);
                        *e += c.clone() * x;
                    }
                }
                out.retain(|_, c| !c.is_zero());
                out
            }
            Basis::G => {
                let al = a.clone().unwrap();
                let mut out = TermMap::new();
                for (lam, c) in f.terms() {
                    for (rho, x) in self.g_product_pvec(lam, &al) {
                        let e = out.entry(rho).or_insert_with(Rat::zero);
                        *e += c * x;
                    }
                }
                out.retain(|_, c| !c.is_zero());
                out
            }
        };

        // Step 2: express the p-vector in the target basis.
        let terms: TermMap = match target {
            Basis::PowerSum => pvec,
            Basis::Monomial => self.pvec_to_mvec(&pvec)?,
            Basis::JackP | Basis::JackQ => {
                let al = a.clone().unwrap();
                let mut mvec = self.pvec_to_mvec(&pvec)?;
                let mut coeffs = TermMap::new();
                while let Some((kappa, c)) =
                    mvec.iter().next_back().map(|(k, v)| (k.clone(), v.clone()))
                {
                    let jk = self.jack_data(&kappa, &al)?;
                    for (l, x) in &jk.mvec {
                        let e = mvec.entry(l.clone()).or_insert_with(Rat::zero);
                        *e -= c.clone() * x;
                    }
                    mvec.retain(|_, v| !v.is_zero());
                    coeffs.insert(kappa, c);
                }
                if target == Basis::JackQ {
                    coeffs = coeffs
                        .into_iter()
                        .map(|(l, c)| {
                            let b = l.b_value(al.value());
                            (l, c / b)
                        })
                        .collect();
                }
                coeffs
            }
            Basis::G => {
                let al = a.clone().unwrap();
                // solve per weight: express the weight-d slice of pvec in the
                // g_lambda products
                let mut coeffs = TermMap::new();
                let mut by_weight: BTreeMap<u32, TermMap> = BTreeMap::new();
                for (rho, c) in pvec {
                    by_weight.entry(rho.weight()).or_default().insert(rho, c);
                }
                for (d, slice) in by_weight {
                    let sol = self.solve_g_basis(d, &slice, &al)?;
                    coeffs.extend(sol);
                }
                coeffs
            }
        };
        let alpha_out = if target.needs_alpha() { a } else { None };
        Ok(SymPoly::new(target, alpha_out, terms))
    }

    /// Express a weight-d p-vector in the products g_lambda by dense Gaussian
    /// elimination over the weight-d power-sum coordinates.
    fn solve_g_basis(
        &self,
        d: u32,
        pvec: &TermMap,
        alpha: &AlphaParam,
    ) -> Result<TermMap, SymfunError> {
        let tables = self.weight_tables(d)?;
        let n = tables.parts.len();
        let rows = {
            let key = (alpha.clone(), d);
            let cached = self.g2p.lock().unwrap().get(&key).cloned();
            match cached {
                Some(r) => r,
                None => {
                    let r: Vec<TermMap> = tables
                        .parts
                        .iter()
                        .map(|lam| self.g_product_pvec(lam, alpha))
                        .collect();
                    let arc = Arc::new(r);
                    self.g2p
                        .lock()
                        .unwrap()
                        .entry(key)
                        .or_insert_with(|| arc.clone());
                    arc
                }
            }
        };
        // dense solve: columns = g_lambda, rows = p_rho coordinates
        let mut mat = vec![vec![Rat::zero(); n + 1]; n];
        for (col, row_map) in rows.iter().enumerate() {
            for (rho, c) in row_map {
                mat[tables.index[rho]][col] = c.clone();
            }
        }
        for (rho, c) in pvec {
            mat[tables.index[rho]][n] = c.clone();
        }
        // Gaussian elimination with exact pivoting
        let mut pivot_of_col = vec![usize::MAX; n];
        let mut used = vec![false; n];
        for col in 0..n {
            let Some(pr) = (0..n).find(|&r| !used[r] && !mat[r][col].is_zero()) else {
                continue;
            };
            used[pr] = true;
            pivot_of_col[col] = pr;
            let inv = Rat::one() / mat[pr][col].clone();
            for j in 0..=n {
                mat[pr][j] = mat[pr][j].clone() * inv.clone();
            }
            for r in 0..n {
                if r != pr && !mat[r][col].is_zero() {
                    let factor = mat[r][col].clone();
                    for j in 0..=n {
                        let sub = factor.clone() * mat[pr][j].clone();
                        mat[r][j] -= sub;
                    }
                }
            }
        }
        let mut out = TermMap::new();
        for col in 0..n {
            let pr = pivot_of_col[col];
            if pr == usize::MAX {
                continue;
            }
            let c = mat[pr][n].clone();
            if !c.is_zero() {
                out.insert(tables.parts[col].clone(), c);
            }
        }
        Ok(out)
    }

    /// Evaluate at finitely many points (x_1..x_n, 0, 0, ...), exactly when
    /// the points are rational.  Works in the power-sum basis, so vanishing
    /// for partitions longer than the alphabet comes out exactly.
    pub fn eval<S: Scalar>(&self, f: &SymPoly, points: &[S]) -> Result<S, SymfunError> {
        let fp = self.to_basis(f, Basis::PowerSum, f.alpha())?;
        let mut total = S::zero();
        // cache p_k values
        let mut pk: HashMap<u32, S> = HashMap::new();
        for (rho, c) in fp.terms() {
            let mut term = S::from_rat(c);
            for r in rho.parts() {
                let v = pk
                    .entry(*r)
                    .or_insert_with(|| {
                        points
                            .iter()
                            .fold(S::zero(), |acc, x| acc + x.powi(*r as i64))
                    })
                    .clone();
                term = term * v;
            }
            total = total + term;
        }
        Ok(total)
    }
}

/// Diagonal table of the alpha-inner product on power sums, mirroring the
/// cached-norm view of the scalar product.
pub struct InnerProductTable {
    alpha: AlphaParam,
    cache: Mutex<HashMap<Partition, Rat>>,
}

impl InnerProductTable {
    pub fn new(alpha: AlphaParam) -> Self {
        InnerProductTable {
            alpha,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// <p_lambda, p_lambda>_alpha = alpha^{l(lambda)} z_lambda.
    pub fn diagonal(&self, lambda: &Partition) -> Rat {
        if let Some(v) = self.cache.lock().unwrap().get(lambda) {
            return v.clone();
        }
        let v = num::pow::pow(self.alpha.value().clone(), lambda.len()) * lambda.z_value();
        self.cache
            .lock()
            .unwrap()
            .insert(lambda.clone(), v.clone());
        v
    }
}

#[cfg(test)]
mod tests;
