//! JSON wire formats: queries, symmetric-function expansions, route values,
//! and the cross-check run report.  Rational scalars travel as `p/q` strings
//! (plain integers allowed), complex scalars as `[re, im]` pairs.

use crate::ensemble::EnsembleParams;
use crate::num::{rat_from_str, rat_to_string, PointVal, Rat};
use crate::ratioavg::{
    AverageValue, CrossCheck, RatioError, RatioQuery, Route, Target, TruncationReport,
};
use crate::symfun::SymPoly;
use num::complex::Complex64;
use serde::{Deserialize, Serialize};

/// One point on the wire: `"p/q"`, a bare integer, or `[re, im]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointWire {
    Str(String),
    Pair([f64; 2]),
    Int(i64),
}

impl PointWire {
    pub fn to_point(&self) -> Result<PointVal, String> {
        match self {
            PointWire::Str(s) => Ok(PointVal::Rat(rat_from_str(s)?)),
            PointWire::Pair([re, im]) => Ok(PointVal::Complex(Complex64::new(*re, *im))),
            PointWire::Int(i) => Ok(PointVal::Rat(crate::num::rat_int(*i))),
        }
    }

    pub fn from_point(p: &PointVal) -> PointWire {
        match p {
            PointVal::Rat(r) => PointWire::Str(rat_to_string(r)),
            PointVal::Complex(c) => PointWire::Pair([c.re, c.im]),
        }
    }
}

/// Query file schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QueryJson {
    pub n: usize,
    pub beta: String,
    #[serde(default)]
    pub x_conj: Vec<PointWire>,
    #[serde(default)]
    pub x_plain: Vec<PointWire>,
    #[serde(default)]
    pub u: Vec<PointWire>,
    #[serde(default)]
    pub v: Vec<PointWire>,
}

impl QueryJson {
    pub fn to_query(&self) -> Result<RatioQuery, RatioError> {
        let beta = rat_from_str(&self.beta).map_err(RatioError::InvalidQuery)?;
        let conv = |pts: &[PointWire]| -> Result<Vec<PointVal>, RatioError> {
            pts.iter()
                .map(|p| p.to_point().map_err(RatioError::InvalidQuery))
                .collect()
        };
        RatioQuery::new(
            EnsembleParams::new(self.n, beta)?,
            conv(&self.x_conj)?,
            conv(&self.x_plain)?,
            conv(&self.u)?,
            conv(&self.v)?,
        )
    }

    pub fn from_query(q: &RatioQuery) -> QueryJson {
        QueryJson {
            n: q.params.n,
            beta: rat_to_string(&q.params.beta),
            x_conj: q.x_conj.iter().map(PointWire::from_point).collect(),
            x_plain: q.x_plain.iter().map(PointWire::from_point).collect(),
            u: q.u.iter().map(PointWire::from_point).collect(),
            v: q.v.iter().map(PointWire::from_point).collect(),
        }
    }
}

/// Route value on the wire.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ValueJson {
    #[serde(rename = "exact")]
    Exact { value: String },
    #[serde(rename = "numeric")]
    Numeric {
        value: [f64; 2],
        err_est: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        truncation: Option<TruncationReport>,
    },
}

impl ValueJson {
    pub fn from_value(v: &AverageValue) -> ValueJson {
        match v {
            AverageValue::Exact(r) => ValueJson::Exact {
                value: rat_to_string(r),
            },
            AverageValue::Numeric {
                value,
                err_est,
                truncation,
            } => ValueJson::Numeric {
                value: [value.re, value.im],
                err_est: *err_est,
                truncation: truncation.clone(),
            },
        }
    }

    pub fn to_value(&self) -> Result<AverageValue, String> {
        match self {
            ValueJson::Exact { value } => Ok(AverageValue::Exact(rat_from_str(value)?)),
            ValueJson::Numeric {
                value,
                err_est,
                truncation,
            } => Ok(AverageValue::Numeric {
                value: Complex64::new(value[0], value[1]),
                err_est: *err_est,
                truncation: truncation.clone(),
            }),
        }
    }
}

/// Per-route entry of a run report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RouteEntry {
    pub route: Route,
    pub target: Target,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<ValueJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u128>,
}

/// Full machine-readable report for a cross-check run.  Byte-identical
/// across runs for exact routes when timings are suppressed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub query: QueryJson,
    pub routes: Vec<RouteEntry>,
    pub agree_exact: bool,
    pub max_float_discrepancy: f64,
    pub within_tolerance: bool,
}

impl RunReport {
    pub fn from_cross_check(q: &RatioQuery, cc: &CrossCheck, with_timings: bool) -> RunReport {
        RunReport {
            version: env!("CARGO_PKG_VERSION").to_string(),
            query: QueryJson::from_query(q),
            routes: cc
                .results
                .iter()
                .map(|r| RouteEntry {
                    route: r.route,
                    target: r.target,
                    value: r.value.as_ref().ok().map(ValueJson::from_value),
                    error: r.value.as_ref().err().cloned(),
                    millis: with_timings.then_some(r.millis),
                })
                .collect(),
            agree_exact: cc.agree_exact,
            max_float_discrepancy: cc.max_float_discrepancy,
            within_tolerance: cc.within_tolerance,
        }
    }
}

/// Symmetric-function expansion on the wire:
/// {"basis": ..., "alpha": "p/q", "terms": [{"part": [...], "coeff": "p/q"}]}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymPolyJson {
    pub basis: crate::symfun::Basis,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub part: crate::partition::Partition,
    pub coeff: String,
}

impl SymPolyJson {
    pub fn from_poly(f: &SymPoly) -> SymPolyJson {
        SymPolyJson {
            basis: f.basis(),
            alpha: f.alpha().map(|a| rat_to_string(a.value())),
            terms: f
                .terms()
                .iter()
                .map(|(part, coeff)| TermJson {
                    part: part.clone(),
                    coeff: rat_to_string(coeff),
                })
                .collect(),
        }
    }
}

pub fn rat_json(r: &Rat) -> String {
    rat_to_string(r)
}
