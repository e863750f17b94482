//! Evaluation routes for averages of products and ratios of characteristic
//! polynomials over the circular beta-ensemble, each behind a shared
//! [`RatioQuery`].
//!
//! A query fixes the raw point lists; what average a route computes depends
//! on its numerator convention.  Routes tagged [`Target::ConjInverted`]
//! evaluate
//!
//! ```text
//! < prod_l Psi(conj z; 1/x_l) prod_k Psi(z; x_{L+k})
//!   / prod_s Psi(conj z; -u_s)^{beta/2} prod_t Psi(z; -v_t)^{beta/2} >
//! ```
//!
//! while [`Target::ConjDirect`] routes take the conjugated numerator points
//! as given, `Psi(conj z; x_l)`.  The power-one target replaces the
//! denominator exponent beta/2 by 1.  Cross-checks must therefore only ever
//! compare routes sharing a target; [`cross_check`] groups accordingly and
//! pairs each group with its own quadrature.
//!
//! All algebraic routes run exactly over the rationals whenever every point
//! in the query is rational; otherwise they run over complex doubles.
//! Infinite partition series are truncated by total weight under a
//! [`TruncationPolicy`] and report per-degree partial sums.

use crate::ensemble::{
    quadrature_average, EnsembleError, EnsembleParams, PsiFactor, QuadratureConfig,
};
use crate::multialt::{hyperdet, HyperArray, MultialtError, SkewMatrix, DEFAULT_WORK_BUDGET};
use crate::num::{
    all_rational, factorial, point_inverse, rat_int, rat_to_f64, to_complex_vec, to_rat_vec,
    AlphaParam, PointVal, Rat, Scalar,
};
use crate::partition::{partitions_of_weight, EnumBounds, Partition};
use crate::superjack::{
    deformed_p, g_hat_values, super_cauchy_product, super_p, super_q, BiPointSet,
};
use crate::symfun::branching::{jack_p_at, jack_q_at};
use crate::symfun::{JackCtx, SymfunError};
use num::complex::Complex64;
use num::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RatioError {
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("route {route} does not apply: {reason}")]
    RouteInapplicable { route: &'static str, reason: String },
    #[error("series for route {route} did not converge within max weight {max_weight}")]
    Convergence {
        route: &'static str,
        max_weight: u32,
        report: TruncationReport,
    },
    #[error(transparent)]
    Symfun(#[from] SymfunError),
    #[error(transparent)]
    Multialt(#[from] MultialtError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
}

/// An average specification: ensemble parameters plus the four point lists.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioQuery {
    pub params: EnsembleParams,
    /// Conjugated numerator points x_1..x_L (nonzero).
    pub x_conj: Vec<PointVal>,
    /// Plain numerator points x_{L+1}..x_{L+K}.
    pub x_plain: Vec<PointVal>,
    /// Conjugated denominator points u_1..u_S, inside the open unit disc.
    pub u: Vec<PointVal>,
    /// Plain denominator points v_1..v_T, inside the open unit disc.
    pub v: Vec<PointVal>,
}

impl RatioQuery {
    pub fn new(
        params: EnsembleParams,
        x_conj: Vec<PointVal>,
        x_plain: Vec<PointVal>,
        u: Vec<PointVal>,
        v: Vec<PointVal>,
    ) -> Result<Self, RatioError> {
        let q = RatioQuery {
            params,
            x_conj,
            x_plain,
            u,
            v,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<(), RatioError> {
        for (i, p) in self.x_conj.iter().enumerate() {
            if p.is_zero() {
                return Err(RatioError::InvalidQuery(format!(
                    "conjugated numerator point {} is zero",
                    i + 1
                )));
            }
        }
        for (name, list) in [("u", &self.u), ("v", &self.v)] {
            for (i, p) in list.iter().enumerate() {
                if !p.in_open_disc() {
                    return Err(RatioError::InvalidQuery(format!(
                        "denominator point {name}[{}] has modulus {} >= 1",
                        i + 1,
                        p.modulus()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn l(&self) -> usize {
        self.x_conj.len()
    }

    pub fn k(&self) -> usize {
        self.x_plain.len()
    }

    pub fn s(&self) -> usize {
        self.u.len()
    }

    pub fn t(&self) -> usize {
        self.v.len()
    }

    /// True when every point in the query is an exact rational.
    pub fn is_rational(&self) -> bool {
        all_rational(&[&self.x_conj, &self.x_plain, &self.u, &self.v])
    }

    /// Quadrature factor list for the given target.
    pub fn factors(&self, target: Target) -> Vec<PsiFactor> {
        let beta = self.params.beta_f64();
        let denom_power = match target {
            Target::ConjInvertedPowerOne => 1.0,
            _ => beta / 2.0,
        };
        let mut fs = Vec::new();
        for p in &self.x_conj {
            let pt = match target {
                Target::ConjDirect => p.to_complex(),
                _ => point_inverse(p).to_complex(),
            };
            fs.push(PsiFactor::numerator(pt, true));
        }
        for p in &self.x_plain {
            fs.push(PsiFactor::numerator(p.to_complex(), false));
        }
        for p in &self.u {
            fs.push(PsiFactor::new(-p.to_complex(), true, -denom_power));
        }
        for p in &self.v {
            fs.push(PsiFactor::new(-p.to_complex(), false, -denom_power));
        }
        fs
    }
}

/// Weight cutoff and the convergence window for truncated partition series.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub max_weight: u32,
    /// Number of consecutive degrees whose combined contribution must fall
    /// below the tolerance before the series is accepted.
    pub convergence_window: usize,
    pub rel_tol: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            max_weight: 24,
            convergence_window: 3,
            rel_tol: 1e-10,
        }
    }
}

/// Per-degree partial sums of a truncated series.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TruncationReport {
    pub partials: Vec<DegreePartial>,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DegreePartial {
    pub degree: u32,
    pub partial: [f64; 2],
    pub increment: f64,
}

/// Result of one route evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum AverageValue {
    Exact(Rat),
    Numeric {
        value: Complex64,
        err_est: f64,
        truncation: Option<TruncationReport>,
    },
}

impl AverageValue {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            AverageValue::Exact(r) => Complex64::new(rat_to_f64(r), 0.0),
            AverageValue::Numeric { value, .. } => *value,
        }
    }

    pub fn err_est(&self) -> f64 {
        match self {
            AverageValue::Exact(_) => 0.0,
            AverageValue::Numeric { err_est, .. } => *err_est,
        }
    }

    pub fn as_exact(&self) -> Option<&Rat> {
        match self {
            AverageValue::Exact(r) => Some(r),
            _ => None,
        }
    }
}

/// Physical average a route computes for a given query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    /// Conjugated numerator points appear through their inverses.
    #[serde(rename = "conj-inverted")]
    ConjInverted,
    /// Conjugated numerator points appear as given.
    #[serde(rename = "conj-direct")]
    ConjDirect,
    /// Inverted convention with denominator power 1 instead of beta/2.
    #[serde(rename = "conj-inverted-power-one")]
    ConjInvertedPowerOne,
}

/// Evaluation routes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Route {
    /// Rectangular-Jack product formula (no denominators).
    #[serde(rename = "product")]
    Product,
    /// Exact super-Jack closed form for S = 0.
    #[serde(rename = "super")]
    Super,
    /// Rectangle-anchored super-Jack series (inverted numerator convention).
    #[serde(rename = "series-rect")]
    SeriesRect,
    /// Generalized-Cauchy super-Jack series (direct numerator convention).
    #[serde(rename = "series-cauchy")]
    SeriesCauchy,
    /// Hyperdeterminant closed form for even beta = 2p.
    #[serde(rename = "hyperdet")]
    Hyperdet,
    /// Hyperdeterminant closed form for beta = 2/p.
    #[serde(rename = "hyperdet-dual")]
    HyperdetDual,
    /// Pfaffian closed forms for beta = 1 and beta = 4.
    #[serde(rename = "pfaffian")]
    Pfaffian,
    /// Terminating hypergeometric sum for the product average.
    #[serde(rename = "f21-product")]
    HypergeomProduct,
    /// Hypergeometric series for the inverse-power average.
    #[serde(rename = "f21-inverse")]
    HypergeomInverse,
    /// Deformed super-Jack form with denominator power 1.
    #[serde(rename = "power-one")]
    PowerOne,
    /// The n -> infinity product limit (not compared at finite n).
    #[serde(rename = "asymptotic")]
    Asymptotic,
    /// Torus quadrature oracle.
    #[serde(rename = "quadrature")]
    Quadrature,
}

pub const ALL_ROUTES: [Route; 12] = [
    Route::Product,
    Route::Super,
    Route::SeriesRect,
    Route::SeriesCauchy,
    Route::Hyperdet,
    Route::HyperdetDual,
    Route::Pfaffian,
    Route::HypergeomProduct,
    Route::HypergeomInverse,
    Route::PowerOne,
    Route::Asymptotic,
    Route::Quadrature,
];

impl Route {
    pub fn name(&self) -> &'static str {
        match self {
            Route::Product => "product",
            Route::Super => "super",
            Route::SeriesRect => "series-rect",
            Route::SeriesCauchy => "series-cauchy",
            Route::Hyperdet => "hyperdet",
            Route::HyperdetDual => "hyperdet-dual",
            Route::Pfaffian => "pfaffian",
            Route::HypergeomProduct => "f21-product",
            Route::HypergeomInverse => "f21-inverse",
            Route::PowerOne => "power-one",
            Route::Asymptotic => "asymptotic",
            Route::Quadrature => "quadrature",
        }
    }

    pub fn parse(s: &str) -> Option<Route> {
        ALL_ROUTES.iter().copied().find(|r| r.name() == s)
    }

    /// Which physical average the route computes.  The quadrature route has
    /// no intrinsic convention; the harness assigns it per group.
    pub fn target(&self) -> Target {
        match self {
            Route::SeriesCauchy
            | Route::HypergeomProduct
            | Route::HypergeomInverse
            | Route::Asymptotic => Target::ConjDirect,
            Route::PowerOne => Target::ConjInvertedPowerOne,
            _ => Target::ConjInverted,
        }
    }

    /// Whether the value participates in finite-n agreement checks.
    pub fn comparable(&self) -> bool {
        !matches!(self, Route::Asymptotic)
    }

    /// Checks the route's hypotheses against the query, naming the violated
    /// one on failure.
    pub fn applicable(&self, q: &RatioQuery) -> Result<(), RatioError> {
        let fail = |reason: String| -> Result<(), RatioError> {
            Err(RatioError::RouteInapplicable {
                route: self.name(),
                reason,
            })
        };
        let need_s0 = |what: &str| -> Result<(), RatioError> {
            if q.s() != 0 {
                return Err(RatioError::RouteInapplicable {
                    route: self.name(),
                    reason: format!("{what} requires no conjugated denominator points (S = 0)"),
                });
            }
            Ok(())
        };
        match self {
            Route::Product => {
                if q.s() != 0 || q.t() != 0 {
                    return fail(
                        "the product formula requires an empty denominator (S = T = 0)".into(),
                    );
                }
                Ok(())
            }
            Route::Super => need_s0("the exact super-Jack form"),
            Route::SeriesRect | Route::SeriesCauchy | Route::Quadrature => Ok(()),
            Route::Hyperdet => {
                need_s0("the hyperdeterminant form")?;
                if even_half(&q.params).is_none() {
                    return fail(format!(
                        "beta = {} is not an even integer 2p",
                        crate::num::rat_to_string(&q.params.beta)
                    ));
                }
                Ok(())
            }
            Route::HyperdetDual => {
                need_s0("the dual hyperdeterminant form")?;
                if dual_even_half(&q.params).is_none() {
                    return fail(format!(
                        "4/beta is not an even integer 2p for beta = {}",
                        crate::num::rat_to_string(&q.params.beta)
                    ));
                }
                Ok(())
            }
            Route::Pfaffian => {
                need_s0("the Pfaffian form")?;
                let beta = &q.params.beta;
                if *beta != rat_int(1) && *beta != rat_int(4) {
                    return fail(format!(
                        "the Pfaffian form needs beta in {{1, 4}}, got {}",
                        crate::num::rat_to_string(beta)
                    ));
                }
                Ok(())
            }
            Route::HypergeomProduct => {
                if q.s() != 0 || q.t() != 0 {
                    return fail("the product hypergeometric form requires S = T = 0".into());
                }
                if q.l() != q.params.n || q.k() != q.params.n {
                    return fail(format!(
                        "the product hypergeometric form takes two alphabets of length n = {}",
                        q.params.n
                    ));
                }
                Ok(())
            }
            Route::HypergeomInverse => {
                if q.l() != 0 || q.k() != 0 {
                    return fail(
                        "the inverse hypergeometric form requires an empty numerator".into(),
                    );
                }
                if q.s() != q.params.n || q.t() != q.params.n {
                    return fail(format!(
                        "the inverse hypergeometric form takes two alphabets of length n = {}",
                        q.params.n
                    ));
                }
                Ok(())
            }
            Route::PowerOne => need_s0("the power-one deformed form"),
            Route::Asymptotic => {
                for (name, list) in [("x_conj", &q.x_conj), ("x_plain", &q.x_plain)] {
                    for p in list {
                        if !p.in_open_disc() {
                            return fail(format!(
                                "the asymptotic product needs every {name} point inside the unit disc"
                            ));
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

/// Some(p) when beta = 2p with p a positive integer.
fn even_half(params: &EnsembleParams) -> Option<u32> {
    params.half_beta_integer().filter(|p| *p >= 1)
}

/// Some(p) when beta = 2/p with p a positive integer.
fn dual_even_half(params: &EnsembleParams) -> Option<u32> {
    use num::ToPrimitive;
    let two_over = rat_int(2) / params.beta.clone();
    if two_over.denom().is_one() {
        two_over.numer().to_u32().filter(|p| *p >= 1)
    } else {
        None
    }
}

fn product_of<S: Scalar>(pts: &[S]) -> S {
    pts.iter().fold(S::one(), |acc, p| acc * p.clone())
}

// ---------------------------------------------------------------------------
// generic route bodies

/// Product average: (x_1..x_L)^{-n} P_{(n^L)}^{(beta/2)}(x).
fn product_average_impl<S: Scalar>(q: &RatioQuery, xc: &[S], xp: &[S]) -> S {
    let n = q.params.n;
    let half_beta = q.params.alpha().inverse();
    let mut pts: Vec<S> = xc.to_vec();
    pts.extend_from_slice(xp);
    let rect = Partition::rectangle(n as u32, q.l() as u32);
    let jack: S = jack_p_at(&rect, &half_beta, &pts);
    product_of(xc).powi(-(n as i64)) * jack
}

/// Exact S = 0 form: (x_1..x_L)^{-n} Phat_{(n^L)}^{(beta/2)}(x; v).
fn super_exact_impl<S: Scalar>(ctx: &JackCtx, q: &RatioQuery, xc: &[S], xp: &[S], v: &[S]) -> S {
    let n = q.params.n;
    let half_beta = q.params.alpha().inverse();
    let mut pts: Vec<S> = xc.to_vec();
    pts.extend_from_slice(xp);
    let rect = Partition::rectangle(n as u32, q.l() as u32);
    let bi = BiPointSet::new(pts, v.to_vec());
    let val: S = super_p(ctx, &rect, &bi, &half_beta);
    product_of(xc).powi(-(n as i64)) * val
}

/// The same value through the transposed rectangle:
/// (x_1..x_L)^{-n} Qhat_{(L^n)}^{(2/beta)}(v; x).
pub(crate) fn super_exact_transposed_impl<S: Scalar>(
    ctx: &JackCtx,
    q: &RatioQuery,
    xc: &[S],
    xp: &[S],
    v: &[S],
) -> S {
    let n = q.params.n;
    let alpha = q.params.alpha();
    let mut pts: Vec<S> = xc.to_vec();
    pts.extend_from_slice(xp);
    let rect = Partition::rectangle(q.l() as u32, n as u32);
    let bi = BiPointSet::new(v.to_vec(), pts);
    let val: S = super_q(ctx, &rect, &bi, &alpha);
    product_of(xc).powi(-(n as i64)) * val
}

struct SeriesOutcome<S> {
    value: S,
    report: TruncationReport,
    finite: bool,
}

/// Shared series driver: sums degree-by-degree increments, watching the
/// combined contribution of the trailing window.
fn drive_series<S: Scalar>(
    trunc: &TruncationPolicy,
    finite_bound: Option<u32>,
    mut degree_sum: impl FnMut(u32) -> S,
) -> SeriesOutcome<S> {
    let cap = finite_bound
        .map(|b| b.min(trunc.max_weight))
        .unwrap_or(trunc.max_weight);
    let finite = finite_bound.map(|b| b <= trunc.max_weight).unwrap_or(false);
    let mut value = S::zero();
    let mut partials = Vec::new();
    let mut window: Vec<f64> = Vec::new();
    let mut converged = finite;
    for d in 0..=cap {
        let inc = degree_sum(d);
        let inc_norm = inc.abs_f64();
        value = value + inc;
        let approx = value.abs_f64();
        partials.push(DegreePartial {
            degree: d,
            partial: to_pair(&value),
            increment: inc_norm,
        });
        if !finite {
            window.push(inc_norm);
            if window.len() > trunc.convergence_window {
                window.remove(0);
            }
            if window.len() == trunc.convergence_window
                && window.iter().sum::<f64>() <= trunc.rel_tol * approx.max(1.0)
            {
                converged = true;
                break;
            }
        }
    }
    SeriesOutcome {
        value,
        report: TruncationReport {
            partials,
            converged,
        },
        finite,
    }
}

fn to_pair<S: Scalar>(v: &S) -> [f64; 2] {
    let c = complex_of(v);
    [c.re, c.im]
}

fn complex_of<S: Scalar>(v: &S) -> Complex64 {
    // the two instantiations in this crate are Rat and Complex64
    let any: &dyn std::any::Any = v;
    if let Some(c) = any.downcast_ref::<Complex64>() {
        *c
    } else if let Some(r) = any.downcast_ref::<Rat>() {
        Complex64::new(rat_to_f64(r), 0.0)
    } else {
        Complex64::new(f64::NAN, f64::NAN)
    }
}

/// Rectangle-anchored series over mu with mu_1 <= min(n, S):
/// (x..)^{-n} pre sum_mu c_mu Qhat_{(n^L) cup mu}^{(beta/2)}(x; v)
/// Q_{mu'}^{(2/beta)}(u).
fn series_rect_impl<S: Scalar>(
    ctx: &JackCtx,
    q: &RatioQuery,
    xc: &[S],
    xp: &[S],
    u: &[S],
    v: &[S],
    trunc: &TruncationPolicy,
) -> SeriesOutcome<S> {
    let n = q.params.n;
    let (l, k, s, t) = (q.l(), q.k(), q.s(), q.t());
    let alpha = q.params.alpha();
    let a = alpha.value().clone();
    let inv = alpha.inverse();
    let rect = Partition::rectangle(n as u32, l as u32);
    let mut pts: Vec<S> = xc.to_vec();
    pts.extend_from_slice(xp);

    // prefactor [-n]_{(n^L)}^{(beta/2)} / [-n+1-alpha]_{(n^L)}^{(beta/2)}
    let neg_n = rat_int(-(n as i64));
    let pre = rect.gen_pochhammer(&neg_n, inv.value())
        / rect.gen_pochhammer(&(neg_n.clone() + Rat::one() - a.clone()), inv.value());
    let max_part = (n as u32).min(s as u32);

    // S = 0 collapses the sum to mu = {}; T = 0 forces l(mu) <= K through
    // the fat hook, so the sum is finite there as well
    let finite_bound = if s == 0 {
        Some(0)
    } else if t == 0 {
        Some(max_part * k as u32)
    } else {
        None
    };

    let u_num = neg_n.clone() - a.clone() * rat_int(l as i64);
    let u_den = neg_n + Rat::one() - a.clone() * rat_int(l as i64 + 1);
    let prefactor = product_of(xc).powi(-(n as i64)) * S::from_rat(&pre);

    let outcome = drive_series(trunc, finite_bound, |d| {
        let mut acc = S::zero();
        if max_part == 0 && d > 0 {
            return acc;
        }
        for mu in partitions_of_weight(
            d,
            EnumBounds {
                max_part: Some(max_part.max(1)),
                max_weight: Some(d),
                max_length: None,
            },
        ) {
            if mu.part(0) > max_part {
                continue;
            }
            let lam = rect.diagram_union(&mu);
            if !lam.is_fat_hook(l + k, t as u32) {
                continue;
            }
            let qu: S = jack_q_at(&mu.conjugate(), &alpha, u);
            if qu.is_zero() {
                continue;
            }
            let coeff =
                mu.gen_pochhammer(&u_num, inv.value()) / mu.gen_pochhammer(&u_den, inv.value());
            let qhat: S = super_q(ctx, &lam, &BiPointSet::new(pts.clone(), v.to_vec()), &inv);
            if qhat.is_zero() {
                continue;
            }
            acc = acc + S::from_rat(&coeff) * qhat * qu;
        }
        acc
    });
    SeriesOutcome {
        value: prefactor * outcome.value,
        report: outcome.report,
        finite: outcome.finite,
    }
}

/// Generalized-Cauchy series:
/// sum over lambda_1 <= n of pre_lambda Phat_lambda^{(beta/2)}(xc; u)
/// Qhat_lambda^{(beta/2)}(xp; v), direct numerator convention.
fn series_cauchy_impl<S: Scalar>(
    ctx: &JackCtx,
    q: &RatioQuery,
    xc: &[S],
    xp: &[S],
    u: &[S],
    v: &[S],
    trunc: &TruncationPolicy,
) -> SeriesOutcome<S> {
    let n = q.params.n;
    let (l, k, s, t) = (q.l(), q.k(), q.s(), q.t());
    let alpha = q.params.alpha();
    let a = alpha.value().clone();
    let inv = alpha.inverse();
    let neg_n = rat_int(-(n as i64));
    let u_den = neg_n.clone() + Rat::one() - a;
    let finite_bound = if s == 0 && t == 0 {
        Some((n * l.min(k)) as u32)
    } else {
        None
    };
    let left = BiPointSet::new(xc.to_vec(), u.to_vec());
    let right = BiPointSet::new(xp.to_vec(), v.to_vec());
    drive_series(trunc, finite_bound, |d| {
        let mut acc = S::zero();
        for lam in partitions_of_weight(
            d,
            EnumBounds {
                max_part: Some((n as u32).max(1)),
                max_weight: Some(d),
                max_length: None,
            },
        ) {
            if lam.part(0) as usize > n {
                continue;
            }
            if !lam.is_fat_hook(l, s as u32) || !lam.is_fat_hook(k, t as u32) {
                continue;
            }
            let ph: S = super_p(ctx, &lam, &left, &inv);
            if ph.is_zero() {
                continue;
            }
            let qh: S = super_q(ctx, &lam, &right, &inv);
            if qh.is_zero() {
                continue;
            }
            let coeff =
                lam.gen_pochhammer(&neg_n, inv.value()) / lam.gen_pochhammer(&u_den, inv.value());
            acc = acc + S::from_rat(&coeff) * ph * qh;
        }
        acc
    })
}

/// Shared prefactored ghat hyperdeterminant:
/// dim! (p!)^dim / (p dim)! * Det^{(2p)}(ghat_{base + i_1+..+i_p - ...}).
fn hyperdet_ghat<S: Scalar>(
    base: i64,
    dim: usize,
    p: u32,
    pts: &BiPointSet<S>,
    budget: u64,
) -> Result<S, MultialtError> {
    if dim == 0 {
        return Ok(S::one());
    }
    let alpha = AlphaParam::from_parts(1, p as i64);
    let max_sub = base + (p as i64) * (dim as i64 - 1);
    let ghat = if max_sub >= 0 {
        g_hat_values(max_sub as usize, pts, &alpha)
    } else {
        Vec::new()
    };
    let entry = |idx: &[usize]| -> S {
        let mut sub = base;
        for (slot, &i) in idx.iter().enumerate() {
            let val = (i + 1) as i64;
            if slot < p as usize {
                sub += val;
            } else {
                sub -= val;
            }
        }
        if sub < 0 || sub > max_sub {
            S::zero()
        } else {
            ghat[sub as usize].clone()
        }
    };
    let arr = HyperArray {
        order: 2 * p as usize,
        dim,
        entry: &entry,
    };
    let det = hyperdet(&arr, budget)?;
    let pref =
        factorial(dim as u32) * num::pow::pow(factorial(p), dim) / factorial(p * dim as u32);
    Ok(S::from_rat(&pref) * det)
}

/// Even-beta hyperdeterminant route (beta = 2p, S = 0):
/// (x..)^{-n} [n! (p!)^n / (pn)!] Det^{(2p)}(ghat_{L+...}(v; x))_{n}.
fn hyperdet_impl<S: Scalar>(
    q: &RatioQuery,
    p: u32,
    xc: &[S],
    xp: &[S],
    v: &[S],
    budget: u64,
) -> Result<S, MultialtError> {
    let n = q.params.n;
    let mut pts: Vec<S> = xc.to_vec();
    pts.extend_from_slice(xp);
    let bi = BiPointSet::new(v.to_vec(), pts);
    let det = hyperdet_ghat(q.l() as i64, n, p, &bi, budget)?;
    Ok(product_of(xc).powi(-(n as i64)) * det)
}

/// Dual hyperdeterminant route (beta = 2/p, S = 0):
/// b_{(L^n)}^{(p)} (x..)^{-n} [L! (p!)^L / (pL)!]
/// Det^{(2p)}(ghat_{n+...}(x; v))_{L}.
fn hyperdet_dual_impl<S: Scalar>(
    q: &RatioQuery,
    p: u32,
    xc: &[S],
    xp: &[S],
    v: &[S],
    budget: u64,
) -> Result<S, MultialtError> {
    let n = q.params.n;
    let l = q.l();
    let mut pts: Vec<S> = xc.to_vec();
    pts.extend_from_slice(xp);
    let bi = BiPointSet::new(pts, v.to_vec());
    let det = hyperdet_ghat(n as i64, l, p, &bi, budget)?;
    let b = Partition::rectangle(l as u32, n as u32).b_value(&rat_int(p as i64));
    Ok(S::from_rat(&b) * product_of(xc).powi(-(n as i64)) * det)
}

/// Pfaffian routes for beta = 1 (orthogonal, denominator power 1/2) and
/// beta = 4 (symplectic, denominator power 2), S = 0.
fn pfaffian_impl<S: Scalar>(q: &RatioQuery, xc: &[S], xp: &[S], v: &[S]) -> Result<S, RatioError> {
    let n = q.params.n;
    let l = q.l();
    let half = AlphaParam::from_parts(1, 2);
    let mut pts: Vec<S> = xc.to_vec();
    pts.extend_from_slice(xp);
    let beta_is_one = q.params.beta == rat_int(1);
    let value = if beta_is_one {
        // prod_{j<L} (n+2j+1)^{-1} Pf((j-i) ghat_{n+2L+1-i-j}(x; v))_{2L}
        let bi = BiPointSet::new(pts, v.to_vec());
        let max_sub = n as i64 + 2 * l as i64 - 1;
        let ghat = if max_sub >= 0 {
            g_hat_values(max_sub as usize, &bi, &half)
        } else {
            Vec::new()
        };
        let gv = |sub: i64| -> S {
            if sub < 0 || sub > max_sub {
                S::zero()
            } else {
                ghat[sub as usize].clone()
            }
        };
        let b = SkewMatrix::from_fn(2 * l, |i, j| {
            let (i1, j1) = (i as i64 + 1, j as i64 + 1);
            S::from_rat(&rat_int(j1 - i1)) * gv(n as i64 + 2 * l as i64 + 1 - i1 - j1)
        })?;
        let pf = crate::multialt::pfaffian(&b);
        let mut pre = Rat::one();
        for j in 0..l as i64 {
            pre *= rat_int(n as i64 + 2 * j + 1);
        }
        pf / S::from_rat(&pre)
    } else {
        // (1/(2n-1)!!) Pf((j-i) ghat_{L+2n+1-i-j}(v; x))_{2n}
        let bi = BiPointSet::new(v.to_vec(), pts);
        let max_sub = l as i64 + 2 * n as i64 - 1;
        let ghat = if max_sub >= 0 {
            g_hat_values(max_sub as usize, &bi, &half)
        } else {
            Vec::new()
        };
        let gv = |sub: i64| -> S {
            if sub < 0 || sub > max_sub {
                S::zero()
            } else {
                ghat[sub as usize].clone()
            }
        };
        let b = SkewMatrix::from_fn(2 * n, |i, j| {
            let (i1, j1) = (i as i64 + 1, j as i64 + 1);
            S::from_rat(&rat_int(j1 - i1)) * gv(l as i64 + 2 * n as i64 + 1 - i1 - j1)
        })?;
        let pf = crate::multialt::pfaffian(&b);
        pf / S::from_rat(&crate::num::double_factorial_odd(n as u32))
    };
    Ok(product_of(xc).powi(-(n as i64)) * value)
}

/// Deformed power-one route: (x..)^{-n} Ptilde_{(n^L)}^{(beta/2)}(x; v).
fn power_one_impl<S: Scalar>(
    ctx: &JackCtx,
    q: &RatioQuery,
    xc: &[S],
    xp: &[S],
    v: &[S],
) -> Result<S, SymfunError> {
    let n = q.params.n;
    let half_beta = q.params.alpha().inverse();
    let mut pts: Vec<S> = xc.to_vec();
    pts.extend_from_slice(xp);
    let rect = Partition::rectangle(n as u32, q.l() as u32);
    let bi = BiPointSet::new(pts, v.to_vec());
    let val = deformed_p(ctx, &rect, &bi, &half_beta)?;
    Ok(product_of(xc).powi(-(n as i64)) * val)
}

/// Terminating hypergeometric sum for the product average, direct
/// convention: parameters (-n, 2n/beta; -n+1-2/beta) at alpha = beta/2.
fn hypergeom_product_impl<S: Scalar>(q: &RatioQuery, x: &[S], y: &[S]) -> S {
    let n = q.params.n;
    let half_beta = q.params.alpha().inverse();
    let hb = half_beta.value().clone();
    let a1 = rat_int(-(n as i64));
    let a2 = rat_int(n as i64) / hb.clone();
    let b1 = rat_int(-(n as i64)) + Rat::one() - Rat::one() / hb.clone();
    let nn = rat_int(n as i64) / hb.clone();
    let mut total = S::zero();
    for d in 0..=(n * n) as u32 {
        for lam in partitions_of_weight(
            d,
            EnumBounds {
                max_part: Some(n as u32),
                max_length: Some(n),
                max_weight: Some(d),
            },
        ) {
            let num = lam.gen_pochhammer(&a1, &hb) * lam.gen_pochhammer(&a2, &hb);
            if num.is_zero() {
                continue;
            }
            let den = lam.gen_pochhammer(&b1, &hb) * lam.gen_pochhammer(&nn, &hb);
            let px: S = jack_p_at(&lam, &half_beta, x);
            if px.is_zero() {
                continue;
            }
            let qy: S = jack_q_at(&lam, &half_beta, y);
            if qy.is_zero() {
                continue;
            }
            total = total + S::from_rat(&(num / den)) * px * qy;
        }
    }
    total
}

/// Hypergeometric series for the pure inverse average, truncated by weight:
/// parameters (n beta/2, n beta/2; beta(n-1)/2 + 1) at alpha = 2/beta.
fn hypergeom_inverse_impl<S: Scalar>(
    q: &RatioQuery,
    u: &[S],
    v: &[S],
    trunc: &TruncationPolicy,
) -> SeriesOutcome<S> {
    let n = q.params.n;
    let alpha = q.params.alpha();
    let a = alpha.value().clone();
    let beta = q.params.beta.clone();
    let a1 = rat_int(n as i64) * beta.clone() / rat_int(2);
    let b1 = beta.clone() * rat_int(n as i64 - 1) / rat_int(2) + Rat::one();
    let nn = rat_int(n as i64) / a;
    drive_series(trunc, None, |d| {
        let mut acc = S::zero();
        for lam in partitions_of_weight(
            d,
            EnumBounds {
                max_length: Some(n),
                max_weight: Some(d),
                max_part: None,
            },
        ) {
            let pu: S = jack_p_at(&lam, &alpha, u);
            if pu.is_zero() {
                continue;
            }
            let qv: S = jack_q_at(&lam, &alpha, v);
            if qv.is_zero() {
                continue;
            }
            let num = lam.gen_pochhammer(&a1, alpha.value());
            let coeff = num.clone() * num
                / (lam.gen_pochhammer(&b1, alpha.value())
                    * lam.gen_pochhammer(&nn, alpha.value()));
            acc = acc + S::from_rat(&coeff) * pu * qv;
        }
        acc
    })
}

// ---------------------------------------------------------------------------
// public route API

/// Evaluation context: the symbolic cache plus series and work-budget knobs.
pub struct Evaluator<'a> {
    pub ctx: &'a JackCtx,
    pub trunc: TruncationPolicy,
    pub quad: QuadratureConfig,
    pub budget: u64,
}

impl<'a> Evaluator<'a> {
    pub fn new(ctx: &'a JackCtx) -> Self {
        Evaluator {
            ctx,
            trunc: TruncationPolicy::default(),
            quad: QuadratureConfig::default(),
            budget: DEFAULT_WORK_BUDGET,
        }
    }

    pub fn evaluate(&self, q: &RatioQuery, route: Route) -> Result<AverageValue, RatioError> {
        q.validate()?;
        route.applicable(q)?;
        if q.is_rational() && route != Route::Quadrature && route != Route::Asymptotic {
            self.eval_dispatch::<Rat>(
                q,
                route,
                &to_rat_vec(&q.x_conj),
                &to_rat_vec(&q.x_plain),
                &to_rat_vec(&q.u),
                &to_rat_vec(&q.v),
                true,
            )
        } else {
            self.eval_dispatch::<Complex64>(
                q,
                route,
                &to_complex_vec(&q.x_conj),
                &to_complex_vec(&q.x_plain),
                &to_complex_vec(&q.u),
                &to_complex_vec(&q.v),
                false,
            )
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn eval_dispatch<S: Scalar>(
        &self,
        q: &RatioQuery,
        route: Route,
        xc: &[S],
        xp: &[S],
        u: &[S],
        v: &[S],
        rational: bool,
    ) -> Result<AverageValue, RatioError> {
        let exact = |s: S| -> AverageValue {
            if rational {
                AverageValue::Exact(rat_of(&s))
            } else {
                AverageValue::Numeric {
                    value: complex_of(&s),
                    err_est: 1e-13,
                    truncation: None,
                }
            }
        };
        match route {
            Route::Product => Ok(exact(product_average_impl(q, xc, xp))),
            Route::Super => Ok(exact(super_exact_impl(self.ctx, q, xc, xp, v))),
            Route::SeriesRect => {
                let out = series_rect_impl(self.ctx, q, xc, xp, u, v, &self.trunc);
                self.series_value(route, out, rational)
            }
            Route::SeriesCauchy => {
                let out = series_cauchy_impl(self.ctx, q, xc, xp, u, v, &self.trunc);
                self.series_value(route, out, rational)
            }
            Route::Hyperdet => {
                let p = even_half(&q.params).expect("applicability checked");
                Ok(exact(hyperdet_impl(q, p, xc, xp, v, self.budget)?))
            }
            Route::HyperdetDual => {
                let p = dual_even_half(&q.params).expect("applicability checked");
                Ok(exact(hyperdet_dual_impl(q, p, xc, xp, v, self.budget)?))
            }
            Route::Pfaffian => Ok(exact(pfaffian_impl(q, xc, xp, v)?)),
            Route::HypergeomProduct => Ok(exact(hypergeom_product_impl(q, xc, xp))),
            Route::HypergeomInverse => {
                let out = hypergeom_inverse_impl(q, u, v, &self.trunc);
                self.series_value(route, out, rational)
            }
            Route::PowerOne => Ok(exact(power_one_impl(self.ctx, q, xc, xp, v)?)),
            Route::Asymptotic => {
                let val = super_cauchy_product(
                    &to_complex_list(xc),
                    &to_complex_list(u),
                    &to_complex_list(xp),
                    &to_complex_list(v),
                    rat_to_f64(&q.params.beta) / 2.0,
                )
                .map_err(RatioError::InvalidQuery)?;
                Ok(AverageValue::Numeric {
                    value: val,
                    err_est: 1e-13 * (1.0 + val.norm()),
                    truncation: None,
                })
            }
            Route::Quadrature => self.quadrature_for(q, Target::ConjInverted),
        }
    }

    fn series_value<S: Scalar>(
        &self,
        route: Route,
        out: SeriesOutcome<S>,
        rational: bool,
    ) -> Result<AverageValue, RatioError> {
        if !out.report.converged {
            return Err(RatioError::Convergence {
                route: route.name(),
                max_weight: self.trunc.max_weight,
                report: out.report,
            });
        }
        if out.finite && rational {
            return Ok(AverageValue::Exact(rat_of(&out.value)));
        }
        let tail: f64 = out
            .report
            .partials
            .iter()
            .rev()
            .take(self.trunc.convergence_window)
            .map(|p| p.increment)
            .sum();
        let value = complex_of(&out.value);
        let err = if out.finite {
            1e-13 * (1.0 + value.norm())
        } else {
            tail + 1e-13 * (1.0 + value.norm())
        };
        Ok(AverageValue::Numeric {
            value,
            err_est: err,
            truncation: Some(out.report),
        })
    }

    /// Quadrature oracle for an explicit target convention.
    pub fn quadrature_for(
        &self,
        q: &RatioQuery,
        target: Target,
    ) -> Result<AverageValue, RatioError> {
        let factors = q.factors(target);
        let r = quadrature_average(&factors, &q.params, &self.quad)?;
        Ok(AverageValue::Numeric {
            value: r.value_c(),
            err_est: r.err_est,
            truncation: None,
        })
    }
}

fn rat_of<S: Scalar>(v: &S) -> Rat {
    let any: &dyn std::any::Any = v;
    any.downcast_ref::<Rat>()
        .cloned()
        .expect("rational path produced a non-rational value")
}

fn to_complex_list<S: Scalar>(pts: &[S]) -> Vec<Complex64> {
    pts.iter().map(complex_of).collect()
}

// ---------------------------------------------------------------------------
// duality and cross-checks

/// Both sides of the beta <-> 4/beta duality:
/// b_{(n^m)}^{(beta/2)} (x_1..x_m)^n <...>_{CbetaE_n} and
/// (v_1..v_n)^m <...>_{Cbeta'E_m}, which must agree exactly.
pub struct DualityPair {
    pub left: AverageValue,
    pub right: AverageValue,
}

/// Evaluates the duality with numerator points `x` (length m + K, first m
/// conjugated-inverted on the left) and denominator points `v` (length
/// n + T).  All points must lie in the open unit disc and the inverted
/// prefixes must be nonzero.
pub fn duality_pair(
    ctx: &JackCtx,
    beta: &Rat,
    n: usize,
    m: usize,
    x: &[PointVal],
    v: &[PointVal],
) -> Result<DualityPair, RatioError> {
    if x.len() < m || v.len() < n {
        return Err(RatioError::InvalidQuery(format!(
            "duality shape needs at least m = {m} x-points and n = {n} v-points"
        )));
    }
    for (name, list) in [("x", x), ("v", v)] {
        for p in list {
            if !p.in_open_disc() {
                return Err(RatioError::InvalidQuery(format!(
                    "duality requires every {name} point inside the unit disc"
                )));
            }
        }
    }
    for p in &x[..m] {
        if p.is_zero() {
            return Err(RatioError::InvalidQuery(
                "inverted x-prefix contains zero".into(),
            ));
        }
    }
    for p in &v[..n] {
        if p.is_zero() {
            return Err(RatioError::InvalidQuery(
                "inverted v-prefix contains zero".into(),
            ));
        }
    }
    let beta_dual = rat_int(4) / beta.clone();
    let left_q = RatioQuery::new(
        EnsembleParams::new(n, beta.clone())?,
        x[..m].to_vec(),
        x[m..].to_vec(),
        vec![],
        v.to_vec(),
    )?;
    let right_q = RatioQuery::new(
        EnsembleParams::new(m, beta_dual)?,
        v[..n].to_vec(),
        v[n..].to_vec(),
        vec![],
        x.to_vec(),
    )?;
    let ev = Evaluator::new(ctx);
    let base_left = ev.evaluate(&left_q, Route::Super)?;
    let base_right = ev.evaluate(&right_q, Route::Super)?;
    let half_beta =
        AlphaParam::new(beta.clone() / rat_int(2)).map_err(RatioError::InvalidQuery)?;
    let b = Partition::rectangle(n as u32, m as u32).b_value(half_beta.value());
    let left = scale_average(base_left, &x[..m], n, Some(&b));
    let right = scale_average(base_right, &v[..n], m, None);
    Ok(DualityPair { left, right })
}

fn scale_average(
    val: AverageValue,
    pts: &[PointVal],
    power: usize,
    extra: Option<&Rat>,
) -> AverageValue {
    match val {
        AverageValue::Exact(r) => {
            let mut f = Rat::one();
            for p in pts {
                f *= p.as_rat().expect("rational duality points").clone();
            }
            let mut out = r * num::pow::pow(f, power);
            if let Some(e) = extra {
                out *= e.clone();
            }
            AverageValue::Exact(out)
        }
        AverageValue::Numeric {
            value,
            err_est,
            truncation,
        } => {
            let mut f = Complex64::one();
            for p in pts {
                f *= p.to_complex();
            }
            let mut out = value * f.powi(power as i32);
            if let Some(e) = extra {
                out *= rat_to_f64(e);
            }
            AverageValue::Numeric {
                value: out,
                err_est: err_est * (1.0 + out.norm()),
                truncation,
            }
        }
    }
}

/// One route's contribution to a cross-check report.
#[derive(Clone, Debug)]
pub struct RouteResult {
    pub route: Route,
    pub target: Target,
    pub value: Result<AverageValue, String>,
    pub millis: u128,
}

/// Agreement summary across the requested routes.
#[derive(Clone, Debug)]
pub struct CrossCheck {
    pub results: Vec<RouteResult>,
    /// All comparable exact values within each target agree exactly.
    pub agree_exact: bool,
    /// Largest |difference| between comparable pairs within a target.
    pub max_float_discrepancy: f64,
    /// Float disagreements stay within combined error estimates + tol.
    pub within_tolerance: bool,
}

/// Evaluates every requested route and checks agreement within each target
/// group.  The quadrature route is evaluated once per target represented
/// among the other requested routes (or the inverted target if alone).
pub fn cross_check(ev: &Evaluator, q: &RatioQuery, routes: &[Route], tol: f64) -> CrossCheck {
    let mut results: Vec<RouteResult> = Vec::new();
    let mut quad_targets: Vec<Target> = Vec::new();
    if routes.contains(&Route::Quadrature) {
        for r in routes {
            if *r != Route::Quadrature && r.comparable() {
                let t = r.target();
                if !quad_targets.contains(&t) {
                    quad_targets.push(t);
                }
            }
        }
        if quad_targets.is_empty() {
            quad_targets.push(Target::ConjInverted);
        }
    }
    for route in routes {
        if *route == Route::Quadrature {
            for t in &quad_targets {
                let start = std::time::Instant::now();
                let value = ev.quadrature_for(q, *t).map_err(|e| e.to_string());
                results.push(RouteResult {
                    route: *route,
                    target: *t,
                    value,
                    millis: start.elapsed().as_millis(),
                });
            }
            continue;
        }
        let start = std::time::Instant::now();
        let value = ev.evaluate(q, *route).map_err(|e| e.to_string());
        results.push(RouteResult {
            route: *route,
            target: route.target(),
            value,
            millis: start.elapsed().as_millis(),
        });
    }
    let mut agree_exact = true;
    let mut max_disc = 0.0f64;
    let mut within = true;
    for t in [
        Target::ConjInverted,
        Target::ConjDirect,
        Target::ConjInvertedPowerOne,
    ] {
        let group: Vec<&RouteResult> = results
            .iter()
            .filter(|r| r.target == t && r.route.comparable())
            .collect();
        let exacts: Vec<&Rat> = group
            .iter()
            .filter_map(|r| r.value.as_ref().ok().and_then(|v| v.as_exact()))
            .collect();
        for w in exacts.windows(2) {
            if w[0] != w[1] {
                agree_exact = false;
            }
        }
        for i in 0..group.len() {
            for j in (i + 1)..group.len() {
                if let (Ok(a), Ok(b)) = (&group[i].value, &group[j].value) {
                    let d = (a.to_complex() - b.to_complex()).norm();
                    max_disc = max_disc.max(d);
                    let allowed = tol.max(a.err_est() + b.err_est());
                    if d > allowed {
                        within = false;
                    }
                }
            }
        }
    }
    CrossCheck {
        results,
        agree_exact,
        max_float_discrepancy: max_disc,
        within_tolerance: within,
    }
}
