use super::*;
use crate::num::{rat, rat_one};

fn p(parts: &[u32]) -> Partition {
    Partition::new(parts.to_vec())
}

fn a(n: i64, d: i64) -> AlphaParam {
    AlphaParam::from_parts(n, d)
}

#[test]
fn power_sum_one_in_monomials() {
    let ctx = JackCtx::new();
    let f = SymPoly::power_sum(p(&[1]));
    let m = ctx.to_basis(&f, Basis::Monomial, None).unwrap();
    assert_eq!(m.coeff(&p(&[1])), rat_one());
    assert_eq!(m.terms().len(), 1);
}

#[test]
fn monomial_11_in_power_sums() {
    // m_{(1,1)} = (p_1^2 - p_2)/2
    let ctx = JackCtx::new();
    let f = SymPoly::monomial(p(&[1, 1]));
    let ps = ctx.to_basis(&f, Basis::PowerSum, None).unwrap();
    assert_eq!(ps.coeff(&p(&[1, 1])), rat(1, 2));
    assert_eq!(ps.coeff(&p(&[2])), rat(-1, 2));
}

#[test]
fn g1_is_p1_over_alpha() {
    let ctx = JackCtx::new();
    let alpha = a(3, 2);
    let g1 = ctx.g_poly(1, &alpha);
    assert_eq!(g1.coeff(&p(&[1])), rat(2, 3));
    assert_eq!(g1.terms().len(), 1);
}

#[test]
fn g2_power_sum_expansion() {
    // g_2 = p_1^2/(2 alpha^2) + p_2/(2 alpha)
    let ctx = JackCtx::new();
    let alpha = a(1, 2);
    let g2 = ctx.g_poly(2, &alpha);
    assert_eq!(g2.coeff(&p(&[1, 1])), rat(2, 1));
    assert_eq!(g2.coeff(&p(&[2])), rat(1, 1));
}

#[test]
fn g_at_alpha_one_is_complete_homogeneous() {
    let ctx = JackCtx::new();
    let g2 = ctx.g_poly(2, &a(1, 1));
    let m = ctx.to_basis(&g2, Basis::Monomial, Some(&a(1, 1))).unwrap();
    assert_eq!(m.coeff(&p(&[2])), rat_one());
    assert_eq!(m.coeff(&p(&[1, 1])), rat_one());
    // negative index is the zero polynomial
    assert!(ctx.g_poly(-2, &a(1, 1)).is_zero());
    // g_0 = 1
    assert_eq!(ctx.g_poly(0, &a(1, 1)).coeff(&Partition::empty()), rat_one());
}

#[test]
fn inner_product_examples() {
    let ctx = JackCtx::new();
    let alpha = a(5, 3);
    let p2 = SymPoly::power_sum(p(&[2]));
    let p11 = SymPoly::power_sum(p(&[1, 1]));
    assert_eq!(
        ctx.inner_product(&p2, &p2, &alpha).unwrap(),
        rat(2, 1) * alpha.value().clone()
    );
    assert_eq!(ctx.inner_product(&p11, &p2, &alpha).unwrap(), Rat::zero());
    // <P_(2), Q_(2)> = 1
    let pp = ctx.jack_p(&p(&[2]), &alpha).unwrap();
    let qq = ctx.jack_q(&p(&[2]), &alpha).unwrap();
    assert_eq!(ctx.inner_product(&pp, &qq, &alpha).unwrap(), rat_one());
}

#[test]
fn jack_one_column_is_elementary() {
    let ctx = JackCtx::new();
    for alpha in [a(1, 2), a(2, 1), a(7, 3)] {
        for k in 1..=4u32 {
            let lam = Partition::rectangle(1, k);
            let jp = ctx.jack_p(&lam, &alpha).unwrap();
            assert_eq!(jp.terms().len(), 1, "P_(1^{k}) = e_{k}");
            assert_eq!(jp.coeff(&lam), rat_one());
        }
    }
}

#[test]
fn jack_row_two() {
    // P_(2) = m_2 + 2/(alpha+1) m_11
    let ctx = JackCtx::new();
    for alpha in [a(1, 2), a(1, 1), a(3, 1)] {
        let jp = ctx.jack_p(&p(&[2]), &alpha).unwrap();
        let expect = rat(2, 1) / (alpha.value().clone() + rat_one());
        assert_eq!(jp.coeff(&p(&[1, 1])), expect);
        assert_eq!(jp.coeff(&p(&[2])), rat_one());
    }
}

#[test]
fn jack_alpha_one_is_schur() {
    let ctx = JackCtx::new();
    let jp = ctx.jack_p(&p(&[2, 1]), &a(1, 1)).unwrap();
    assert_eq!(jp.coeff(&p(&[2, 1])), rat_one());
    assert_eq!(jp.coeff(&p(&[1, 1, 1])), rat(2, 1));
}

#[test]
fn jack_21_general_alpha_anchor() {
    // P_(2,1)^(alpha) = m_21 + 6/(alpha+2) m_111; frozen at alpha = 1/2.
    let ctx = JackCtx::new();
    let jp = ctx.jack_p(&p(&[2, 1]), &a(1, 2)).unwrap();
    assert_eq!(jp.coeff(&p(&[1, 1, 1])), rat(12, 5));
}

#[test]
fn jack_31_half_anchor() {
    let ctx = JackCtx::new();
    let jp = ctx.jack_p(&p(&[3, 1]), &a(1, 2)).unwrap();
    assert_eq!(jp.coeff(&p(&[2, 2])), rat(4, 3));
    assert_eq!(jp.coeff(&p(&[2, 1, 1])), rat(26, 9));
    assert_eq!(jp.coeff(&p(&[1, 1, 1, 1])), rat(16, 3));
}

#[test]
fn jack_q_examples() {
    let ctx = JackCtx::new();
    let alpha = a(2, 3);
    // Q_(1) = (1/alpha) m_1
    let q1 = ctx.jack_q(&p(&[1]), &alpha).unwrap();
    assert_eq!(q1.coeff(&p(&[1])), rat(3, 2));
    // Q_(k) = g_k
    for k in 1..=4 {
        let qk = ctx.jack_q(&p(&[k]), &alpha).unwrap();
        let gk = ctx
            .to_basis(&ctx.g_poly(k as i64, &alpha), Basis::Monomial, Some(&alpha))
            .unwrap();
        assert_eq!(qk.terms(), gk.terms(), "k={k}");
    }
    // Q at alpha=1 is Schur: b_lambda(1) = 1
    let one = a(1, 1);
    let q = ctx.jack_q(&p(&[2, 1]), &one).unwrap();
    let pp = ctx.jack_p(&p(&[2, 1]), &one).unwrap();
    assert_eq!(q.terms(), pp.terms());
}

#[test]
fn jack_norm_matches_hook_products() {
    let ctx = JackCtx::new();
    for alpha in [a(1, 2), a(1, 1), a(2, 1), a(3, 2)] {
        for w in 1..=6u32 {
            for lam in partitions_of_weight(w, EnumBounds::weight(w)) {
                let norm = ctx.jack_norm(&lam, &alpha).unwrap();
                let b = lam.b_value(alpha.value());
                assert_eq!(norm * b, rat_one(), "lambda {lam} alpha {alpha}");
            }
        }
    }
}

#[test]
fn triangularity_and_orthogonality_weight_le_6() {
    let ctx = JackCtx::new();
    for alpha in [a(1, 3), a(1, 2), a(1, 1), a(2, 1), a(3, 1)] {
        for w in 1..=6u32 {
            let parts = partitions_of_weight(w, EnumBounds::weight(w));
            for lam in &parts {
                let jp = ctx.jack_p(lam, &alpha).unwrap();
                assert_eq!(jp.coeff(lam), rat_one());
                for mu in jp.terms().keys() {
                    assert!(
                        dominance_leq(mu, lam),
                        "support {mu} not below {lam} (alpha {alpha})"
                    );
                }
            }
            for (i, lam) in parts.iter().enumerate() {
                let fl = ctx.jack_p(lam, &alpha).unwrap();
                for mu in parts.iter().skip(i + 1) {
                    let fm = ctx.jack_p(mu, &alpha).unwrap();
                    assert_eq!(
                        ctx.inner_product(&fl, &fm, &alpha).unwrap(),
                        Rat::zero(),
                        "<P_{lam}, P_{mu}> != 0"
                    );
                }
            }
        }
    }
}

#[test]
fn f_coeff_examples() {
    let ctx = JackCtx::new();
    let alpha = a(1, 2);
    let one = p(&[1]);
    assert_eq!(ctx.f_coeff(&one, &one, &p(&[2]), &alpha).unwrap(), rat_one());
    // f^{(1,1)}_{(1)(1)} = 2 alpha / (alpha + 1)
    let expect = rat(2, 1) * alpha.value().clone() / (alpha.value().clone() + rat_one());
    assert_eq!(ctx.f_coeff(&one, &one, &p(&[1, 1]), &alpha).unwrap(), expect);
    // Littlewood-Richardson at alpha = 1
    let oa = a(1, 1);
    assert_eq!(
        ctx.f_coeff(&p(&[1]), &p(&[2]), &p(&[2, 1]), &oa).unwrap(),
        rat_one()
    );
    // vanishing outside containment / weight
    assert_eq!(
        ctx.f_coeff(&p(&[3]), &one, &p(&[2, 2]), &alpha).unwrap(),
        Rat::zero()
    );
    assert_eq!(
        ctx.f_coeff(&one, &one, &p(&[2, 1]), &alpha).unwrap(),
        Rat::zero()
    );
}

#[test]
fn f_coeff_symmetry_and_conjugation() {
    let ctx = JackCtx::new();
    let alpha = a(2, 3);
    let inv = alpha.inverse();
    for (mu, nu, lam) in [
        (p(&[1]), p(&[2]), p(&[2, 1])),
        (p(&[2]), p(&[2]), p(&[3, 1])),
        (p(&[2, 1]), p(&[1]), p(&[2, 2])),
        (p(&[2]), p(&[1, 1]), p(&[2, 1, 1])),
    ] {
        let f1 = ctx.f_coeff(&mu, &nu, &lam, &alpha).unwrap();
        let f2 = ctx.f_coeff(&nu, &mu, &lam, &alpha).unwrap();
        assert_eq!(f1, f2, "symmetry");
        // f^lambda_{mu nu}(alpha) = f^{lambda'}_{mu' nu'}(1/alpha) b_lambda/(b_mu b_nu)
        let fc = ctx
            .f_coeff(&mu.conjugate(), &nu.conjugate(), &lam.conjugate(), &inv)
            .unwrap();
        let ratio = lam.b_value(alpha.value())
            / (mu.b_value(alpha.value()) * nu.b_value(alpha.value()));
        assert_eq!(f1, fc * ratio, "conjugation relation");
    }
}

#[test]
fn skew_examples() {
    let ctx = JackCtx::new();
    let alpha = a(1, 2);
    // Q_{lambda/lambda} = 1
    let q = ctx.skew_q(&p(&[2, 1]), &p(&[2, 1]), &alpha).unwrap();
    assert_eq!(q.coeff(&Partition::empty()), rat_one());
    assert_eq!(q.terms().len(), 1);
    // Q_{(2)/(1)} = Q_(1)
    let q = ctx.skew_q(&p(&[2]), &p(&[1]), &alpha).unwrap();
    assert_eq!(q.coeff(&p(&[1])), rat_one());
    assert_eq!(q.terms().len(), 1);
    // mu not contained in lambda
    let q = ctx.skew_q(&p(&[2, 2]), &p(&[3]), &alpha).unwrap();
    assert!(q.is_zero());
    // Q_{lambda/empty} = Q_lambda
    let q = ctx.skew_q(&p(&[2, 1]), &Partition::empty(), &alpha).unwrap();
    assert_eq!(q.coeff(&p(&[2, 1])), rat_one());
    assert_eq!(q.terms().len(), 1);
}

#[test]
fn skew_q_vs_p_ratio() {
    // Q_{lambda/mu} = (b_lambda / b_mu) P_{lambda/mu}
    let ctx = JackCtx::new();
    let alpha = a(3, 4);
    let (lam, mu) = (p(&[3, 1]), p(&[1]));
    let q = ctx
        .to_basis(
            &ctx.skew_q(&lam, &mu, &alpha).unwrap(),
            Basis::Monomial,
            Some(&alpha),
        )
        .unwrap();
    let pp = ctx
        .to_basis(
            &ctx.skew_p(&lam, &mu, &alpha).unwrap(),
            Basis::Monomial,
            Some(&alpha),
        )
        .unwrap();
    let scale = lam.b_value(alpha.value()) / mu.b_value(alpha.value());
    assert_eq!(q.terms(), pp.scale(&scale).terms());
}

#[test]
fn omega_examples() {
    let ctx = JackCtx::new();
    let alpha = a(1, 2);
    // omega(p_2) = -alpha p_2
    let w = ctx.omega(&SymPoly::power_sum(p(&[2])), &alpha).unwrap();
    assert_eq!(w.coeff(&p(&[2])), -alpha.value().clone());
    // omega_1(h_2) = e_2
    let one = a(1, 1);
    let h2 = ctx.g_poly(2, &one);
    let w = ctx.omega(&h2, &one).unwrap();
    let m = ctx.to_basis(&w, Basis::Monomial, None).unwrap();
    assert_eq!(m.coeff(&p(&[1, 1])), rat_one());
    assert_eq!(m.coeff(&p(&[2])), Rat::zero());
    // omega_alpha(P_(2)^(alpha)) = Q_(1,1)^(1/alpha)
    let jp = ctx.jack_p(&p(&[2]), &alpha).unwrap();
    let lhs = ctx.omega(&jp, &alpha).unwrap();
    let rhs = ctx
        .to_basis(
            &ctx.jack_q(&p(&[1, 1]), &alpha.inverse()).unwrap(),
            Basis::PowerSum,
            Some(&alpha.inverse()),
        )
        .unwrap();
    assert_eq!(lhs.terms(), rhs.terms());
}

#[test]
fn omega_duality_sweep() {
    let ctx = JackCtx::new();
    for alpha in [a(1, 2), a(2, 1), a(3, 2)] {
        let inv = alpha.inverse();
        for w in 1..=5u32 {
            for lam in partitions_of_weight(w, EnumBounds::weight(w)) {
                let jp = ctx.jack_p(&lam, &alpha).unwrap();
                let lhs = ctx.omega(&jp, &alpha).unwrap();
                let rhs = ctx
                    .to_basis(
                        &ctx.jack_q(&lam.conjugate(), &inv).unwrap(),
                        Basis::PowerSum,
                        Some(&inv),
                    )
                    .unwrap();
                assert_eq!(lhs.terms(), rhs.terms(), "lambda {lam} alpha {alpha}");
            }
        }
    }
}

#[test]
fn omega_composition_is_identity() {
    let ctx = JackCtx::new();
    let alpha = a(5, 2);
    let f = ctx.jack_p(&p(&[3, 1]), &a(1, 2)).unwrap();
    let once = ctx.omega(&f, &alpha).unwrap();
    let twice = ctx.omega(&once, &alpha.inverse()).unwrap();
    let fp = ctx.to_basis(&f, Basis::PowerSum, f.alpha()).unwrap();
    assert_eq!(twice.terms(), fp.terms());
}

#[test]
fn eval_vanishing_and_special_value() {
    let ctx = JackCtx::new();
    let alpha = a(1, 2);
    // P_(3,1)(x1) = 0 in one variable
    let jp = ctx.jack_p(&p(&[3, 1]), &alpha).unwrap();
    let v: Rat = ctx.eval(&jp, &[rat(2, 3)]).unwrap();
    assert_eq!(v, Rat::zero());
    // P_lambda(1^n) = alpha^{|lambda|} [n/alpha]_lambda / c_lambda
    let lam = p(&[2, 1]);
    let jp = ctx.jack_p(&lam, &alpha).unwrap();
    let ones = vec![rat_one(); 3];
    let v: Rat = ctx.eval(&jp, &ones).unwrap();
    let u = rat(3, 1) / alpha.value().clone();
    let (c, _, _) = lam.hook_products(alpha.value());
    let expect =
        num::pow::pow(alpha.value().clone(), lam.weight() as usize) * lam.gen_pochhammer(&u, alpha.value()) / c;
    assert_eq!(v, expect);
    assert_eq!(v, rat(42, 5));
}

#[test]
fn eval_reduction_formula() {
    // P_(2,1)(x1,x2) = x1 x2 P_(1)(x1,x2) for full-length partitions
    let ctx = JackCtx::new();
    let alpha = a(1, 2);
    let lhs = ctx.jack_p(&p(&[2, 1]), &alpha).unwrap();
    let rhs = ctx.jack_p(&p(&[1]), &alpha).unwrap();
    for (x1, x2) in [(rat(1, 2), rat(1, 3)), (rat(-2, 5), rat(3, 7))] {
        let l: Rat = ctx.eval(&lhs, &[x1.clone(), x2.clone()]).unwrap();
        let r: Rat = ctx.eval(&rhs, &[x1.clone(), x2.clone()]).unwrap();
        assert_eq!(l, x1 * x2 * r);
    }
}

#[test]
fn basis_round_trips() {
    let ctx = JackCtx::new();
    let alpha = a(2, 1);
    let f = ctx.jack_p(&p(&[2, 1]), &alpha).unwrap();
    for b in [Basis::PowerSum, Basis::Monomial, Basis::G, Basis::JackQ, Basis::JackP] {
        let g = ctx.to_basis(&f, b, Some(&alpha)).unwrap();
        let back = ctx.to_basis(&g, Basis::Monomial, Some(&alpha)).unwrap();
        assert_eq!(back.terms(), f.terms(), "round trip through {b:?}");
    }
}

#[test]
fn jack_basis_expansion_of_product() {
    // to_basis into JackP recovers f-coefficients
    let ctx = JackCtx::new();
    let alpha = a(1, 2);
    let p1 = ctx.jack_p(&p(&[1]), &alpha).unwrap();
    let pvec1 = ctx.to_basis(&p1, Basis::PowerSum, Some(&alpha)).unwrap();
    // square it in the power-sum basis
    let mut sq = TermMap::new();
    for (r1, c1) in pvec1.terms() {
        for (r2, c2) in pvec1.terms() {
            let e = sq.entry(r1.diagram_union(r2)).or_insert_with(Rat::zero);
            *e += c1 * c2;
        }
    }
    let prod = SymPoly::new(Basis::PowerSum, None, sq);
    let in_p = ctx.to_basis(&prod, Basis::JackP, Some(&alpha)).unwrap();
    assert_eq!(in_p.coeff(&p(&[2])), rat_one());
    let expect = rat(2, 1) * alpha.value().clone() / (alpha.value().clone() + rat_one());
    assert_eq!(in_p.coeff(&p(&[1, 1])), expect);
}

#[test]
fn weight_cap_enforced() {
    let ctx = JackCtx::with_weight_cap(4);
    let err = ctx.jack_p(&p(&[5]), &a(1, 1));
    assert!(matches!(err, Err(SymfunError::WeightCap { .. })));
}

#[test]
fn low_and_high_temperature_limits() {
    // alpha -> infinity: P -> m_lambda; alpha -> 0: P -> e_{lambda'}
    let ctx = JackCtx::new();
    let lam = p(&[3, 1]);
    let big = AlphaParam::from_parts(1_000_000, 1);
    let jp = ctx.jack_p(&lam, &big).unwrap();
    for (mu, c) in jp.terms() {
        let cf = crate::num::rat_to_f64(c);
        if mu == &lam {
            assert!((cf - 1.0).abs() < 1e-4);
        } else {
            assert!(cf.abs() < 1e-4, "coefficient at {mu} should vanish, got {cf}");
        }
    }
    let small = AlphaParam::from_parts(1, 1_000_000);
    let jp = ctx.jack_p(&lam, &small).unwrap();
    // e_{lambda'} for lambda = (3,1): e_2 * e_1 * e_1 expanded in monomials
    let e2e1e1 = {
        let mut v = TermMap::new();
        v.insert(Partition::empty(), rat_one());
        // e_1 = m_1 is multiplication by p_1; e_2 = m_11
        let m11 = ctx
            .to_basis(&SymPoly::monomial(p(&[1, 1])), Basis::PowerSum, None)
            .unwrap();
        let m1 = ctx
            .to_basis(&SymPoly::monomial(p(&[1])), Basis::PowerSum, None)
            .unwrap();
        let mut acc = TermMap::new();
        for (r1, c1) in m11.terms() {
            for (r2, c2) in m1.terms() {
                for (r3, c3) in m1.terms() {
                    let k = r1.diagram_union(r2).diagram_union(r3);
                    let e = acc.entry(k).or_insert_with(Rat::zero);
                    *e += c1 * c2 * c3;
                }
            }
        }
        ctx.to_basis(&SymPoly::new(Basis::PowerSum, None, acc), Basis::Monomial, None)
            .unwrap()
    };
    for (mu, c) in jp.terms() {
        let want = crate::num::rat_to_f64(&e2e1e1.coeff(mu));
        let got = crate::num::rat_to_f64(c);
        assert!((got - want).abs() < 1e-4, "mu {mu}: got {got}, want {want}");
    }
}

#[test]
fn inner_product_table_diagonal() {
    let t = InnerProductTable::new(a(2, 1));
    assert_eq!(t.diagonal(&p(&[2])), rat(4, 1)); // alpha * z_2 = 2*2
    assert_eq!(t.diagonal(&p(&[1, 1])), rat(8, 1)); // alpha^2 * 2
}
