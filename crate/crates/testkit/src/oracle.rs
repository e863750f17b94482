//! Independent oracles: a from-scratch Jack construction over dense naive
//! polynomials, and a Richardson-extrapolated midpoint trapezoid integrator
//! for ensemble averages.  Neither shares code with the engine paths it
//! checks: the Jack oracle derives the monomial-to-power-sum data by linear
//! algebra on explicit polynomials, and the integrator uses offset grids,
//! compensated summation, and power-law extrapolation instead of the
//! density-Fourier representation.

use crate::naive::NaivePoly;
use cbeta_core::num::{rat_to_f64, AlphaParam, Kahan, KahanC, Rat};
use cbeta_core::partition::{dominance_leq, partitions_of_weight, EnumBounds};
use cbeta_core::ratioavg::{RatioQuery, Target};
use cbeta_core::Partition;
use num::complex::Complex64;
use num::{One, Zero};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Gram-Schmidt over the dominance order in the dense monomial realization:
/// P_lambda as an explicit polynomial in max(nvars, |lambda|) variables,
/// truncated back to `nvars`.
pub fn oracle_jack(lambda: &Partition, alpha: &AlphaParam, nvars: usize) -> NaivePoly {
    assert!(lambda.weight() <= 8, "oracle capped at weight 8");
    assert!(nvars >= lambda.len(), "alphabet shorter than the partition");
    let d = lambda.weight();
    if d == 0 {
        return NaivePoly::constant(nvars, Rat::one());
    }
    // work with enough variables that the degree-d power sums stay
    // independent, then truncate
    let work_vars = nvars.max(d as usize);
    let rhos = partitions_of_weight(d, EnumBounds::weight(d));
    let p_polys: Vec<NaivePoly> = rhos
        .iter()
        .map(|rho| NaivePoly::power_sum_product(rho, work_vars))
        .collect();

    // express a symmetric polynomial in the p_rho by exact elimination on
    // monomial coordinates
    let rows: Vec<Vec<u32>> = {
        let mut set = std::collections::BTreeSet::new();
        for p in &p_polys {
            set.extend(p.terms.keys().cloned());
        }
        set.into_iter().collect()
    };
    let row_index: BTreeMap<Vec<u32>, usize> = rows
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, r)| (r, i))
        .collect();
    let ncols = p_polys.len();
    let mut mat = vec![vec![Rat::zero(); ncols]; rows.len()];
    for (j, p) in p_polys.iter().enumerate() {
        for (e, c) in &p.terms {
            mat[row_index[e]][j] = c.clone();
        }
    }
    // Gauss-Jordan once to find a set of pivot rows; those rows of the
    // original matrix form an invertible square subsystem.
    let pivots: Vec<usize> = {
        let mut reduced = mat.clone();
        let mut pivots = Vec::with_capacity(ncols);
        let mut used = vec![false; rows.len()];
        for col in 0..ncols {
            let pr = (0..rows.len())
                .find(|&r| !used[r] && !reduced[r][col].is_zero())
                .expect("power sums are independent");
            used[pr] = true;
            pivots.push(pr);
            let inv = Rat::one() / reduced[pr][col].clone();
            for c in 0..ncols {
                reduced[pr][c] = reduced[pr][c].clone() * inv.clone();
            }
            for r in 0..rows.len() {
                if r != pr && !reduced[r][col].is_zero() {
                    let f = reduced[r][col].clone();
                    for c in 0..ncols {
                        let sub = f.clone() * reduced[pr][c].clone();
                        reduced[r][c] -= sub;
                    }
                }
            }
        }
        pivots
    };
    let a_piv: Vec<Vec<Rat>> = pivots.iter().map(|&r| mat[r].clone()).collect();
    let to_p_coords = |poly: &NaivePoly| -> Vec<Rat> {
        // solve the square pivot subsystem, then verify against the full
        // polynomial so a bad pivot cannot slip through silently
        let mut aug: Vec<Vec<Rat>> = a_piv.clone();
        for (slot, &pr) in pivots.iter().enumerate() {
            let key = &rows[pr];
            aug[slot].push(poly.terms.get(key).cloned().unwrap_or_else(Rat::zero));
        }
        for col in 0..ncols {
            let pr = (col..ncols)
                .find(|&r| !aug[r][col].is_zero())
                .expect("pivot subsystem is invertible");
            aug.swap(col, pr);
            let inv = Rat::one() / aug[col][col].clone();
            for c in col..=ncols {
                aug[col][c] = aug[col][c].clone() * inv.clone();
            }
            for r in 0..ncols {
                if r != col && !aug[r][col].is_zero() {
                    let f = aug[r][col].clone();
                    for c in col..=ncols {
                        let sub = f.clone() * aug[col][c].clone();
                        aug[r][c] -= sub;
                    }
                }
            }
        }
        let x: Vec<Rat> = (0..ncols).map(|r| aug[r][ncols].clone()).collect();
        // full verification: sum x_j p_j == poly
        let mut rebuilt = NaivePoly::zero(work_vars);
        for (j, c) in x.iter().enumerate() {
            if !c.is_zero() {
                rebuilt = rebuilt.add(&p_polys[j].scale(c));
            }
        }
        assert_eq!(&rebuilt, poly, "power-sum expansion failed to verify");
        x
    };

    let inner = |a: &[Rat], b: &[Rat]| -> Rat {
        let mut s = Rat::zero();
        for (j, rho) in rhos.iter().enumerate() {
            if a[j].is_zero() || b[j].is_zero() {
                continue;
            }
            s += a[j].clone()
                * b[j].clone()
                * rho.z_value()
                * num::pow::pow(alpha.value().clone(), rho.len());
        }
        s
    };

    // candidates below lambda in dominance, lowest first
    let mut kappas: Vec<Partition> = partitions_of_weight(d, EnumBounds::weight(d))
        .into_iter()
        .filter(|k| k.len() <= work_vars && dominance_leq(k, lambda))
        .collect();
    kappas.sort();

    let mut built: Vec<(NaivePoly, Vec<Rat>, Rat)> = Vec::new(); // (poly, p-coords, norm)
    let mut result: Option<NaivePoly> = None;
    for kappa in &kappas {
        let mut poly = NaivePoly::monomial_symmetric(kappa, work_vars);
        let mut coords = to_p_coords(&poly);
        for (bp, bc, bn) in &built {
            let t = inner(&coords, bc) / bn.clone();
            if t.is_zero() {
                continue;
            }
            poly = poly.add(&bp.scale(&-t.clone()));
            for (c, b) in coords.iter_mut().zip(bc) {
                *c -= t.clone() * b;
            }
        }
        let norm = inner(&coords, &coords);
        if kappa == lambda {
            result = Some(poly.clone());
        }
        built.push((poly, coords, norm));
    }
    result
        .expect("lambda is in its own lower set")
        .truncate_vars(nvars)
}

/// Midpoint-grid trapezoid value of the normalized average at one grid size.
fn midpoint_level(q: &RatioQuery, target: Target, m: usize) -> Complex64 {
    let beta = q.params.beta_f64();
    let n = q.params.n;
    let factors = q.factors(target);
    // per-variable factor values on the midpoint grid
    let t: Vec<Complex64> = (0..m)
        .map(|k| {
            let th = 2.0 * PI * (k as f64 + 0.5) / m as f64;
            let z = Complex64::new(th.cos(), th.sin());
            factors
                .iter()
                .fold(Complex64::one(), |acc, f| acc * f.value_at(z))
        })
        .collect();
    let g: Vec<f64> = (0..m)
        .map(|d| (2.0 * (PI * d as f64 / m as f64).sin().abs()).powf(beta))
        .collect();
    let mut num = KahanC::default();
    let mut den = Kahan::default();
    match n {
        0 => return Complex64::one(),
        1 => {
            for k in 0..m {
                num.add(t[k]);
                den.add(1.0);
            }
        }
        2 => {
            for k1 in 0..m {
                for k2 in 0..m {
                    let w = g[(m + k1 - k2) % m];
                    num.add(t[k1] * t[k2] * w);
                    den.add(w);
                }
            }
        }
        3 => {
            for k1 in 0..m {
                for k2 in 0..m {
                    let g12 = g[(m + k1 - k2) % m];
                    if g12 == 0.0 {
                        continue;
                    }
                    let t12 = t[k1] * t[k2];
                    for k3 in 0..m {
                        let w = g12 * g[(m + k1 - k3) % m] * g[(m + k2 - k3) % m];
                        num.add(t12 * t[k3] * w);
                        den.add(w);
                    }
                }
            }
        }
        _ => panic!("oracle supports n <= 3"),
    }
    num.value() / den.value()
}

/// Independent quadrature oracle: midpoint grids, Kahan accumulation, and
/// power-law Richardson extrapolation with exponents beta+1, beta+2, ...
/// matched to the density's cusp order.  Returns (value, error estimate).
pub fn oracle_average(q: &RatioQuery, target: Target) -> Result<(Complex64, f64), String> {
    let n = q.params.n;
    if n > 3 {
        return Err(format!("oracle_average supports n <= 3, got {n}"));
    }
    let beta = q.params.beta_f64();
    let even = q.params.half_beta_integer().is_some();
    if n <= 1 || even {
        let a = midpoint_level(q, target, 32);
        let b = midpoint_level(q, target, 64);
        return Ok((b, (a - b).norm() + 1e-13 * (1.0 + b.norm())));
    }
    let ladder: Vec<usize> = if n == 3 {
        vec![64, 128, 256, 512]
    } else {
        vec![32, 64, 128, 256]
    };
    let mut vals: Vec<Complex64> = ladder
        .iter()
        .map(|&m| midpoint_level(q, target, m))
        .collect();
    let raw_diff = (vals[vals.len() - 1] - vals[vals.len() - 2]).norm();
    let mut last_stage_diff = raw_diff;
    for stage in 1..vals.len() {
        let e = beta + stage as f64;
        let f = (2.0f64).powf(e) - 1.0;
        let next: Vec<Complex64> = (0..vals.len() - 1)
            .map(|i| vals[i + 1] + (vals[i + 1] - vals[i]) / f)
            .collect();
        if next.len() >= 2 {
            last_stage_diff = (next[next.len() - 1] - next[next.len() - 2]).norm();
        }
        vals = next;
    }
    let value = vals[0];
    // residual after eliminating three power terms, bounded by the last
    // stage's level difference
    let err = last_stage_diff + 1e-12 * (1.0 + value.norm());
    Ok((value, err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use cbeta_core::num::{rat, PointVal};
    use cbeta_core::symfun::JackCtx;
    use cbeta_core::EnsembleParams;

    #[test]
    fn oracle_jack_one_column_is_elementary() {
        let alpha = AlphaParam::from_parts(3, 5);
        let e3 = oracle_jack(&Partition::new(vec![1, 1, 1]), &alpha, 3);
        assert_eq!(e3.terms.len(), 1);
        assert_eq!(e3.terms[&vec![1, 1, 1]], rat(1, 1));
    }

    #[test]
    fn oracle_jack_row_two_alpha_one_is_h2() {
        let alpha = AlphaParam::from_parts(1, 1);
        let p2 = oracle_jack(&Partition::new(vec![2]), &alpha, 2);
        // h_2 = m_2 + m_11
        assert_eq!(p2.terms[&vec![2, 0]], rat(1, 1));
        assert_eq!(p2.terms[&vec![1, 1]], rat(1, 1));
    }

    #[test]
    fn oracle_jack_matches_engine_at_points() {
        let ctx = JackCtx::new();
        let pts = [rat(1, 2), rat(-1, 3), rat(2, 7)];
        for alpha in [
            AlphaParam::from_parts(1, 2),
            AlphaParam::from_parts(1, 1),
            AlphaParam::from_parts(2, 1),
        ] {
            for w in 0..=6u32 {
                for lam in partitions_of_weight(w, EnumBounds::weight(w)) {
                    if lam.len() > 3 {
                        continue;
                    }
                    let naive = oracle_jack(&lam, &alpha, 3);
                    assert!(naive.is_symmetric(), "lambda {lam}");
                    let got = naive.eval(&pts);
                    let sym = ctx.jack_p(&lam, &alpha).unwrap();
                    let want: Rat = ctx.eval(&sym, &pts).unwrap();
                    assert_eq!(got, want, "lambda {lam} alpha {alpha}");
                }
            }
        }
    }

    #[test]
    fn oracle_average_reproduces_exact_values() {
        // the worked product example: beta=2, n=1 -> 7/6
        let q = RatioQuery::new(
            EnsembleParams::new(1, rat(2, 1)).unwrap(),
            vec![PointVal::Rat(rat(2, 1))],
            vec![PointVal::Rat(rat(1, 3))],
            vec![],
            vec![],
        )
        .unwrap();
        let (v, err) = oracle_average(&q, Target::ConjInverted).unwrap();
        assert!((v.re - 7.0 / 6.0).abs() < 1e-12, "err {err}");
        // beta=1, n=2, L=K=1 at 1/2: 10/3 with the cusped density
        let q = RatioQuery::new(
            EnsembleParams::new(2, rat(1, 1)).unwrap(),
            vec![PointVal::Rat(rat(1, 2))],
            vec![PointVal::Rat(rat(1, 2))],
            vec![],
            vec![],
        )
        .unwrap();
        let (v, err) = oracle_average(&q, Target::ConjInverted).unwrap();
        assert!(
            (v.re - 10.0 / 3.0).abs() < 1e-8,
            "got {v}, err est {err}"
        );
    }
}
