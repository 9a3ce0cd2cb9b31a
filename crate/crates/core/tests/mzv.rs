use proptest::prelude::*;
use qzv_core::mzv::*;
use qzv_core::qkit::q_int;
use qzv_core::series::{Layout, Mono, Rational, TruncSeries, TruncSpec};

fn idx(s: &str) -> Index {
    s.parse().unwrap()
}

fn qt(n: i32) -> TruncSpec {
    TruncSpec::new(n, 0, 0)
}

/// Independent nested-loop oracle using series arithmetic only.
fn zeta_oracle(parts: &[u32], n: i32, star: bool) -> TruncSeries {
    let layout = Layout::qt();
    let spec = qt(n);
    let mut acc = TruncSeries::zero(&layout, &spec);
    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        upper: i64,
        parts: &[u32],
        star: bool,
        cur: TruncSeries,
        acc: &mut TruncSeries,
        layout: &std::sync::Arc<Layout>,
        spec: &TruncSpec,
    ) {
        if i == parts.len() {
            *acc = &*acc + &cur;
            return;
        }
        let hi = if i == 0 {
            spec.q_order as i64
        } else if star {
            upper
        } else {
            upper - 1
        };
        for m in 1..=hi {
            let qi = q_int(m, layout, spec).unwrap();
            let w = &TruncSeries::q_pow(layout, spec, ((parts[i] as i64 - 1) * m) as i16)
                * &qi.pow(parts[i]).try_inverse().unwrap();
            go(i + 1, m, parts, star, &cur * &w, acc, layout, spec);
        }
    }
    go(0, 0, parts, star, TruncSeries::one(&layout, &spec), &mut acc, &layout, &spec);
    acc
}

fn admissible_up_to(w: u32) -> Vec<Index> {
    let mut out = Vec::new();
    for k in 2..=w {
        for l in 1..k {
            for h1 in 0..=l {
                let sig = IndexSignature { k, l, h: vec![h1], j: 0 };
                out.extend(enumerate_indices(&sig));
            }
        }
    }
    out
}

#[test]
fn index_statistics() {
    let k = idx("3,1,2");
    assert_eq!(k.weight(), 6);
    assert_eq!(k.depth(), 3);
    assert_eq!(k.height(1), 2);
    assert_eq!(k.height(2), 1);
    assert!(k.is_admissible());
    assert!(k.in_level(1));
    assert!(!k.in_level(2));
    assert_eq!(k.to_string(), "3,1,2");
    assert!("0,1".parse::<Index>().is_err());
    assert!("".parse::<Index>().is_err());
}

#[test]
fn enumeration_examples() {
    let s = IndexSignature { k: 3, l: 2, h: vec![1], j: 0 };
    assert_eq!(enumerate_indices(&s), vec![idx("2,1")]);
    let s = IndexSignature { k: 4, l: 2, h: vec![2], j: 0 };
    assert_eq!(enumerate_indices(&s), vec![idx("2,2")]);
    // when every part is ≥ 2, all indices are admissible
    for k in 2..9 {
        for l in 1..=k / 2 {
            let all = enumerate_indices(&IndexSignature { k, l, h: vec![l], j: -1 });
            let adm = enumerate_indices(&IndexSignature { k, l, h: vec![l], j: 0 });
            assert_eq!(all, adm);
        }
    }
}

#[test]
fn enumeration_matches_filter_of_compositions() {
    // brute force over bit patterns of compositions
    for k in 1..=9u32 {
        let mut comps: Vec<Vec<u32>> = Vec::new();
        for mask in 0..(1u32 << (k - 1)) {
            let mut parts = vec![1u32];
            for b in 0..k - 1 {
                if mask & (1 << b) != 0 {
                    parts.push(1);
                } else {
                    *parts.last_mut().unwrap() += 1;
                }
            }
            comps.push(parts);
        }
        for l in 1..=k {
            for h1 in 0..=l {
                for h2 in 0..=h1 {
                    for j in -1..=1 {
                        let sig = IndexSignature { k, l, h: vec![h1, h2], j };
                        let mut want: Vec<Index> = comps
                            .iter()
                            .filter(|p| {
                                p.len() == l as usize
                                    && p[0] as i32 >= j + 2
                                    && p.iter().filter(|&&x| x >= 2).count() == h1 as usize
                                    && p.iter().filter(|&&x| x >= 3).count() == h2 as usize
                            })
                            .map(|p| Index::new(p.clone()).unwrap())
                            .collect();
                        want.sort();
                        assert_eq!(enumerate_indices(&sig), want, "{sig:?}");
                    }
                }
            }
        }
    }
}

#[test]
fn zeta_examples() {
    // q + q^2/(1+q)^2 + q^3 + O(q^4)
    let z2 = zeta_q(&idx("2"), 3).unwrap();
    let want = TruncSeries::parse_text(&Layout::qt(), &qt(3), "1 q\n1 q^2\n-1 q^3").unwrap();
    assert_eq!(z2, want);
    assert_eq!(zeta_q(&idx("2,1"), 14).unwrap(), zeta_q(&idx("3"), 14).unwrap());
    let n = 12;
    let lhs = &zeta_star_q(&idx("2,1"), n).unwrap() - &zeta_q(&idx("2,1"), n).unwrap();
    let omq = TruncSeries::one_minus_q(&Layout::qt(), &qt(n));
    let rhs = &zeta_q(&idx("3"), n).unwrap() + &(&omq * &zeta_q(&idx("2"), n).unwrap());
    assert_eq!(lhs, rhs);
    assert!(zeta_q(&idx("1,2"), 5).is_err());
}

#[test]
fn zeta_matches_nested_loop_oracle() {
    for s in ["2", "3", "2,1", "3,1", "2,2", "2,1,1", "4,1", "3,2,1"] {
        let k = idx(s);
        for star in [false, true] {
            let got = if star { zeta_star_q(&k, 10) } else { zeta_q(&k, 10) }.unwrap();
            assert_eq!(got, zeta_oracle(k.parts(), 10, star), "({s}) star={star}");
        }
    }
}

#[test]
fn zeta_t_examples() {
    let n = 12;
    for k in 2..7 {
        let i = Index::new(vec![k]).unwrap();
        assert_eq!(zeta_t_q(&i, &qt(n)).unwrap(), zeta_q(&i, n).unwrap());
    }
    let layout = Layout::qt();
    let spec = qt(n);
    let t = TruncSeries::t(&layout, &spec);
    let omq = TruncSeries::one_minus_q(&layout, &spec);
    let inner = &zeta_q(&idx("3"), n).unwrap() + &(&omq * &zeta_q(&idx("2"), n).unwrap());
    let want = &zeta_q(&idx("2,1"), n).unwrap() + &(&t * &inner);
    assert_eq!(zeta_t_q(&idx("2,1"), &spec).unwrap(), want);
}

#[test]
fn zeta_t_interpolates_zeta_and_zeta_star() {
    let n = 8;
    for k in admissible_up_to(7) {
        let at0 = zeta_t_q(&k, &qt(n).with_t_value(Rational::ZERO)).unwrap();
        let at1 = zeta_t_q(&k, &qt(n).with_t_value(Rational::ONE)).unwrap();
        let at = |s: TruncSeries, t: Rational| {
            TruncSeries::from_terms(&Layout::qt(), &qt(n).with_t_value(t), s.terms().iter().cloned()).unwrap()
        };
        assert_eq!(at0, at(zeta_q(&k, n).unwrap(), Rational::ZERO), "t=0 at ({k})");
        assert_eq!(at1, at(zeta_star_q(&k, n).unwrap(), Rational::ONE), "t=1 at ({k})");
    }
}

fn li_depth_one(k: u32, spec: &TruncSpec) -> TruncSeries {
    let layout = Layout::qtz();
    let mut acc = TruncSeries::zero(&layout, spec);
    for m in 1..=spec.z_order {
        let zm = TruncSeries::var_pow(&layout, spec, layout.z(), m as i16);
        let w = q_int(m as i64, &layout, spec).unwrap().pow(k).try_inverse().unwrap();
        acc = &acc + &(&zm * &w);
    }
    acc
}

#[test]
fn polylog_examples() {
    let spec = TruncSpec::new(8, 0, 6);
    for k in 1..4 {
        assert_eq!(li_q(&Index::new(vec![k]).unwrap(), &spec).unwrap(), li_depth_one(k, &spec));
    }
    let layout = Layout::qtz();
    let t = TruncSeries::t(&layout, &spec);
    let want = &li_q(&idx("1,1"), &spec).unwrap() + &(&t * &li_q(&idx("2"), &spec).unwrap());
    assert_eq!(li_t_q(&idx("1,1"), &spec).unwrap(), want);
}

#[test]
fn polylog_t_zero_is_plain() {
    let spec = TruncSpec::new(6, 0, 6);
    let spec0 = spec.clone().with_t_value(Rational::ZERO);
    for w in 1..=5u32 {
        for l in 1..=w {
            for h1 in 0..=l {
                for k in enumerate_indices(&IndexSignature { k: w, l, h: vec![h1], j: -1 }) {
                    let a = li_t_q(&k, &spec0).unwrap();
                    let b = li_q(&k, &spec0).unwrap();
                    assert_eq!(a, b, "({k})");
                }
            }
        }
    }
}

#[test]
fn polylog_at_q() {
    let n = 10;
    let spec = qt(n);
    assert_eq!(li_t_at_q(&idx("2"), &spec).unwrap(), zeta_q(&idx("2"), n).unwrap());
    // Σ z^m/[m]^2 at z = q against direct ζ_q(2)
    let s = li_q(&idx("2"), &TruncSpec::new(n, 0, n)).unwrap().subst_z_to_q().unwrap();
    assert_eq!(s.relayout(&Layout::qt()).unwrap(), zeta_q(&idx("2"), n).unwrap());
    let omq = TruncSeries::one_minus_q(&Layout::qt(), &spec);
    let li3 = li_q(&idx("3"), &TruncSpec::new(n, 0, n)).unwrap().subst_z_to_q().unwrap();
    let want = &zeta_q(&idx("3"), n).unwrap() + &(&omq * &zeta_q(&idx("2"), n).unwrap());
    assert_eq!(li3.relayout(&Layout::qt()).unwrap(), want);
    assert_eq!(li_t_at_q(&idx("2,1"), &spec).unwrap(), li_at_q_binomial_sum(&idx("2,1"), &spec).unwrap());
    assert_eq!(li_at_q_binomial_sum(&idx("2"), &spec).unwrap(), zeta_t_q(&idx("2"), &spec).unwrap());
    let want = &zeta_t_q(&idx("3"), &spec).unwrap() + &(&omq * &zeta_t_q(&idx("2"), &spec).unwrap());
    assert_eq!(li_at_q_binomial_sum(&idx("3"), &spec).unwrap(), want);
}

#[test]
fn polylog_at_q_is_binomial_combination() {
    let spec = qt(7);
    for k in admissible_up_to(6) {
        let a = li_t_at_q(&k, &spec).unwrap();
        let b = li_at_q_binomial_sum(&k, &spec).unwrap();
        assert_eq!(a, b, "({k})");
    }
}

#[test]
fn difference_operator_examples() {
    let layout = Layout::qtz();
    let spec = TruncSpec::new(10, 0, 8);
    for n in 1..6i16 {
        let zn = TruncSeries::var_pow(&layout, &spec, layout.z(), n);
        let qn = q_int(n as i64, &layout, &spec).unwrap();
        assert_eq!(theta_q(&zn).unwrap(), &qn * &zn);
        let zn1 = TruncSeries::var_pow(&layout, &spec, layout.z(), n - 1);
        assert_eq!(d_q(&zn).unwrap(), &qn * &zn1);
    }
    // a nonzero constant still cancels in f(z) - f(qz)
    assert!(d_q(&TruncSeries::one(&layout, &spec)).unwrap().is_zero());
    let l21 = li_t_q(&idx("2,1"), &spec).unwrap();
    let l11 = li_t_q(&idx("1,1"), &spec).unwrap();
    let want = l11.exact_div(layout.z(), 1).unwrap();
    assert_eq!(d_q(&l21).unwrap().first_difference(&want).unwrap(), None);
}

#[test]
fn polylog_difference_system() {
    let spec = TruncSpec::new(8, 0, 8);
    for w in 1..=5u32 {
        for l in 1..=w {
            for h1 in 0..=l {
                for k in enumerate_indices(&IndexSignature { k: w, l, h: vec![h1], j: -1 }) {
                    assert_eq!(polylog_difference_relation(&k, &spec).unwrap(), None, "({k})");
                }
            }
        }
    }
}

#[test]
fn generating_function_difference_system() {
    let spec = TruncSpec::new(8, 3, 8);
    for r in 1..=2usize {
        let mut eng = MzvEngine::new(spec.q_order, spec.z_order);
        let mut checked = 0;
        for sig in signatures(r, -1, spec.u_degree, None) {
            let mut clauses = vec![GClause::TopLevel, GClause::Bottom];
            clauses.extend((0..r as i32 - 1).map(GClause::Consecutive));
            for c in clauses {
                if g_clause_applies(c, &sig) {
                    let got = g_difference_relation(&mut eng, c, &sig, &spec).unwrap();
                    assert_eq!(got, None, "r={r} {c:?} {sig:?}");
                    checked += 1;
                }
            }
        }
        assert!(checked > 10);
    }
}

#[test]
fn top_generating_function_difference_equation() {
    for r in 1..=2 {
        let spec = TruncSpec::new(6, 3, 6);
        assert_eq!(top_level_equation_relation(r, &spec).unwrap(), None, "r={r}");
    }
}

#[test]
fn generating_function_corner_cases() {
    let spec = TruncSpec::new(6, 0, 6);
    let empty = IndexSignature { k: 0, l: 0, h: vec![0], j: -1 };
    assert_eq!(g_brute(&empty, &spec).unwrap(), TruncSeries::one(&Layout::qtz(), &spec));
    // empty index sets give zero
    let none = IndexSignature { k: 2, l: 3, h: vec![0], j: -1 };
    assert!(g_brute(&none, &spec).unwrap().is_zero());
    assert!(phi_brute(1, 1, &spec, true).is_err());
}

#[test]
fn psi_coefficients_are_signature_sums() {
    let n = 6;
    let spec = TruncSpec::new(n, 3, 0);
    let psi = psi0_brute(1, &spec, None).unwrap();
    let layout = psi.layout().clone();
    let u = |i| layout.block_var(i);
    // u2 u3 carries (k,l,h) = (3,2,1)
    let c = psi.coeff(&[(u(1), 0), (u(2), 1), (u(3), 1)]);
    let want = zeta_t_q(&idx("2,1"), &qt(n)).unwrap();
    assert_eq!(c.relayout(&Layout::qt()).unwrap(), want);
    // u1 u2 is (k,l,h) = (2,1,0) and no admissible index has height 0 there
    assert!(psi.coeff(&[(u(1), 1), (u(2), 1), (u(3), 0)]).is_zero());
    // u1 u3 is the single index (3)
    let c = psi.coeff(&[(u(1), 1), (u(2), 0), (u(3), 1)]);
    assert_eq!(c.relayout(&Layout::qt()).unwrap(), zeta_q(&idx("3"), n).unwrap());
}

#[test]
fn psi_weight_bound_is_sound() {
    for r in 1..=2usize {
        let spec = TruncSpec::new(5, 3, 0);
        let plain = psi0_brute(r, &spec, None).unwrap();
        let cap = (r as u32 + 1) * 3 + 2;
        let wide = psi0_brute(r, &spec, Some(cap)).unwrap();
        assert_eq!(plain, wide, "r={r}");
    }
}

#[test]
fn level_difference_needs_first_part_two() {
    let spec = TruncSpec::new(6, 3, 6);
    let d = &phi_brute(2, 0, &spec, true).unwrap() - &phi_brute(2, 1, &spec, true).unwrap();
    let layout = d.layout().clone();
    // every surviving term comes from an index with k1 = 2, so some height h1 > h2
    for (m, _) in d.terms() {
        let e: Vec<i16> = (1..=4).map(|i| m.0[layout.block_var(i).0]).collect();
        assert!(e[2] > 0 || e[1] > 0, "{m:?}");
    }
    assert!(!d.is_zero());
}

fn arb_z_series() -> impl Strategy<Value = TruncSeries> {
    let layout = Layout::qtz();
    let spec = TruncSpec::new(6, 0, 6);
    proptest::collection::vec((0i16..4, 0i16..2, 0i16..7, -5i64..6), 1..8).prop_map(move |v| {
        let zs = layout.z().0;
        let terms = v.into_iter().map(|(q, t, z, c)| (Mono::ONE.with(0, q).with(1, t).with(zs, z), Rational::from(c)));
        TruncSeries::from_terms(&layout, &spec, terms).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn theta_powers_expand_through_stirling_numbers(f in arb_z_series(), n in 0usize..=5) {
        prop_assert_eq!(theta_stirling_relation(n, &f).unwrap(), None);
    }
}
