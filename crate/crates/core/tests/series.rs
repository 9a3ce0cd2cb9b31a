use std::sync::Arc;

use proptest::prelude::*;
use qzv_core::series::{newton_power_sums, Layout, Mono, Rational, TruncSeries, TruncSpec};
use qzv_core::Error;

fn r(n: i64) -> Rational {
    Rational::from(n)
}

fn parse(layout: &Arc<Layout>, spec: &TruncSpec, text: &str) -> TruncSeries {
    TruncSeries::parse_text(layout, spec, &text.replace(';', "\n")).unwrap()
}

#[test]
fn ring_examples() {
    let l = Layout::qt();
    let spec = TruncSpec::new(5, 0, 0);
    let q = TruncSeries::q(&l, &spec);
    let one = TruncSeries::one(&l, &spec);
    assert_eq!(&(&one + &q) * &(&one - &q), &one - &q.pow(2));
    assert_eq!((&one + &q).pow(0), one);
    assert!((&q.pow(5) * &q).is_zero());
}

#[test]
fn inverse_examples() {
    let l = Layout::u(1);
    let spec = TruncSpec::new(6, 4, 0);
    let one = TruncSeries::one(&l, &spec);
    let q = TruncSeries::q(&l, &spec);
    let geo = (&one - &q).try_inverse().unwrap();
    let expect = (0..=6).fold(TruncSeries::zero(&l, &spec), |acc, k| &acc + &q.pow(k));
    assert_eq!(geo, expect);

    let u1 = TruncSeries::var(&l, &spec, l.block_var(1));
    let d = &one + &(&TruncSeries::one_minus_q(&l, &spec) * &u1);
    assert_eq!(&d * &d.try_inverse().unwrap(), one);

    assert!(matches!(q.try_inverse(), Err(Error::NonInvertible(_))));
    let t = TruncSeries::t(&l, &spec);
    assert!(matches!((&one + &t).try_inverse(), Err(Error::NonInvertible(_))));
}

#[test]
fn monomial_div_examples() {
    let l = Layout::u(1);
    let spec = TruncSpec::new(6, 4, 0);
    let one = TruncSeries::one(&l, &spec);
    let u = |i| TruncSeries::var(&l, &spec, l.block_var(i));
    let q1 = TruncSeries::one_minus_q(&l, &spec);
    let inv = (&one + &(&q1 * &u(1))).try_inverse().unwrap();
    let a = &(&(&u(1) * &u(2)) - &u(3)) + &(&u(3) * &inv);
    let got = a.exact_div(l.block_var(1), 1).unwrap();
    let expect = &u(2) - &(&(&q1 * &u(3)) * &inv);
    assert_eq!(got.first_difference(&expect).unwrap(), None);
    assert_eq!(got.spec().u_degree, 3);

    let cube = u(1).pow(3);
    assert_eq!(cube.monomial_div(l.block_var(1), 2, true).unwrap().series, u(1));
    assert!(matches!(u(2).monomial_div(l.block_var(2), 2, true), Err(Error::Divisibility(_))));
    let lenient = u(2).monomial_div(l.block_var(2), 2, false).unwrap();
    assert!(!lenient.exact && lenient.series.is_zero());
}

#[test]
fn laurent_products_track_precision() {
    let l = Layout::u(1);
    let spec = TruncSpec::new(3, 3, 0).with_floor(-3);
    let u1 = l.block_var(1);
    let inv_u1 = TruncSeries::var_pow(&l, &spec, u1, -1);
    let x = TruncSeries::var(&l, &spec, l.block_var(3));
    let lau = &inv_u1 * &x;
    assert_eq!(lau.spec().u_degree, 2);
    let lau2 = &inv_u1 * &inv_u1;
    assert_eq!(lau2.spec().u_degree, 2);
    let y = &lau2 * &TruncSeries::var(&l, &spec, l.block_var(2));
    assert_eq!(y.spec().u_degree, 1);
}

#[test]
fn exp_log_examples() {
    let l = Layout::qtz();
    let spec = TruncSpec::new(4, 0, 6);
    let zero = TruncSeries::zero(&l, &spec);
    assert_eq!(zero.exp().unwrap(), TruncSeries::one(&l, &spec));
    let z = TruncSeries::var(&l, &spec, l.z());
    let one = TruncSeries::one(&l, &spec);
    let lg = (&one - &z).try_inverse().unwrap().log().unwrap();
    let expect =
        TruncSeries::from_terms(&l, &spec, (1..=6).map(|k| (Mono::ONE.with(l.z().0, k as i16), Rational::new(1, k))))
            .unwrap();
    assert_eq!(lg, expect);

    let lu = Layout::u(0);
    let su = TruncSpec::new(5, 5, 0);
    let a = &(&TruncSeries::one(&lu, &su) + &TruncSeries::q(&lu, &su)) + &TruncSeries::var(&lu, &su, lu.block_var(2));
    assert_eq!(a.log().unwrap().exp().unwrap(), a);
    assert!(matches!(TruncSeries::q(&lu, &su).log(), Err(Error::Domain(_))));
    assert!(matches!(TruncSeries::one(&lu, &su).exp(), Err(Error::Domain(_))));
}

#[test]
fn newton_examples_and_root_oracle() {
    let l = Layout::new(vec!["s".into(), "p".into()], false, false);
    let spec = TruncSpec::new(0, 12, 0);
    let s = TruncSeries::var(&l, &spec, l.block_var(1));
    let p = TruncSeries::var(&l, &spec, l.block_var(2));
    let ps = newton_power_sums(&[s.clone(), p.clone()], 2);
    assert_eq!(ps[1], &s.pow(2) - &p.scale_i(2));

    // roots y1, y2 of y^2 - e1 y + e2: p_K = y1^K + y2^K directly
    let ly = Layout::new(vec!["y1".into(), "y2".into()], false, false);
    let y1 = TruncSeries::var(&ly, &spec, ly.block_var(1));
    let y2 = TruncSeries::var(&ly, &spec, ly.block_var(2));
    let e = [&y1 + &y2, &y1 * &y2];
    let ps = newton_power_sums(&e, 6);
    for (k, pk) in ps.iter().enumerate() {
        assert_eq!(*pk, &y1.pow(k as u32 + 1) + &y2.pow(k as u32 + 1));
    }

    // cubic data through the same oracle
    let lc = Layout::new(vec!["y1".into(), "y2".into(), "y3".into()], false, false);
    let ys: Vec<_> = (1..=3).map(|i| TruncSeries::var(&lc, &spec, lc.block_var(i))).collect();
    let e = [
        &(&ys[0] + &ys[1]) + &ys[2],
        &(&(&ys[0] * &ys[1]) + &(&ys[0] * &ys[2])) + &(&ys[1] * &ys[2]),
        &(&ys[0] * &ys[1]) * &ys[2],
    ];
    for (k, pk) in newton_power_sums(&e, 5).iter().enumerate() {
        let direct = ys.iter().fold(TruncSeries::zero(&lc, &spec), |a, y| &a + &y.pow(k as u32 + 1));
        assert_eq!(*pk, direct);
    }
}

#[test]
fn newton_p3_of_full_height_data() {
    let l = Layout::u(1);
    let spec = TruncSpec::new(6, 6, 0);
    let one = TruncSeries::one(&l, &spec);
    let t = TruncSeries::t(&l, &spec);
    let q1 = TruncSeries::one_minus_q(&l, &spec);
    let u1 = TruncSeries::var(&l, &spec, l.block_var(1));
    let u3 = TruncSeries::var(&l, &spec, l.block_var(3));
    let e1 = &u1 - &(&(&(&one - &t) * &q1) * &u3);
    let e2 = &(&one - &t) * &u3;
    let p = newton_power_sums(&[e1.clone(), e2.clone()], 3);
    assert_eq!(p[0], e1);
    // p3 = e1^3 - 3 e1 e2, from y1^3 + y2^3 = (y1+y2)^3 - 3 y1 y2 (y1+y2)
    let ls = Layout::new(vec!["y1".into(), "y2".into()], false, false);
    let sp = TruncSpec::new(0, 6, 0);
    let y1 = TruncSeries::var(&ls, &sp, ls.block_var(1));
    let y2 = TruncSeries::var(&ls, &sp, ls.block_var(2));
    let s = &y1 + &y2;
    let pr = &y1 * &y2;
    assert_eq!(&y1.pow(3) + &y2.pow(3), &s.pow(3) - &(&s * &pr).scale_i(3));
    assert_eq!(p[2], &e1.pow(3) - &(&e1 * &e2).scale_i(3));
}

#[test]
fn subst_z_to_q_examples() {
    let l = Layout::qtz();
    let spec = TruncSpec::new(6, 0, 6);
    let z = TruncSeries::var(&l, &spec, l.z());
    let q = TruncSeries::q(&l, &spec);
    assert_eq!((&z + &z.pow(2)).subst_z_to_q().unwrap(), &q + &q.pow(2));
    let c = TruncSeries::int(&l, &spec, 7);
    assert_eq!(c.subst_z_to_q().unwrap(), c);
    let short = TruncSeries::zero(&l, &TruncSpec::new(6, 0, 5));
    assert!(matches!(short.subst_z_to_q(), Err(Error::InsufficientTruncation(_))));
}

#[test]
fn coeff_examples() {
    let l = Layout::u(0);
    let spec = TruncSpec::new(4, 4, 0);
    let a = parse(&l, &spec, "1 1;3 q*u2");
    assert_eq!(a.coeff(&[(l.block_var(2), 1)]), parse(&l, &spec, "3 q"));
    assert!(TruncSeries::zero(&l, &spec).coeff(&[(l.block_var(1), 2)]).is_zero());
    assert_eq!(a.coeff_at(&Mono::ONE), r(1));
}

#[test]
fn text_format() {
    let l = Layout::u(1);
    let spec = TruncSpec::new(4, 4, 0).with_floor(-2);
    let a = parse(&l, &spec, "2 q^3*u1^-1*t^2;-1/3 u2;5 1");
    assert_eq!(a.to_text(), "5 1\n-1/3 u2\n2 q^3*t^2*u1^-1\n");
    assert!(TruncSeries::parse_text(&l, &spec, "2 w").is_err());
    assert!(TruncSeries::parse_text(&l, &spec, "x u1").is_err());
}

#[test]
fn mismatched_layouts_are_config_errors() {
    let spec = TruncSpec::new(3, 3, 0);
    let a = TruncSeries::one(&Layout::u(1), &spec);
    let b = TruncSeries::one(&Layout::u(2), &spec);
    assert!(matches!(a.try_add(&b), Err(Error::Config(_))));
    let c = TruncSeries::one(&Layout::u(1), &spec.clone().with_t_value(r(0)));
    assert!(matches!(a.try_mul(&c), Err(Error::Config(_))));
}

#[test]
fn t_value_substitution() {
    let l = Layout::qt();
    let spec = TruncSpec::new(3, 0, 0).with_t_value(Rational::new(1, 2));
    let t = TruncSeries::t(&l, &spec);
    assert_eq!(t.pow(2), TruncSeries::constant(&l, &spec, Rational::new(1, 4)));
}

#[test]
fn compose_identity() {
    let l = Layout::u(1);
    let spec = TruncSpec::new(4, 4, 0);
    let vars: Vec<_> = (1..=3).map(|i| TruncSeries::var(&l, &spec, l.block_var(i))).collect();
    let a = parse(&l, &spec, "1 1;2 q*u1*u2;-1 t*u3^2;3 u1^4");
    assert_eq!(a.compose(&vars).unwrap(), a);
}

// ---- property tests ------------------------------------------------------

fn arb_series(layout: Arc<Layout>, spec: TruncSpec, laurent: bool) -> impl Strategy<Value = TruncSeries> {
    let nb = layout.nblock();
    let lo = if laurent { -1i16 } else { 0 };
    prop::collection::vec((0i16..4, 0i16..3, prop::collection::vec(0i16..3, nb), lo..1, -4i64..5, 1i64..4), 0..7)
        .prop_map(move |raw| {
            let terms = raw.into_iter().map(|(q, t, b, l1, n, d)| {
                let mut m = Mono::ONE.with(0, q).with(1, t);
                for (i, e) in b.iter().enumerate() {
                    m.0[2 + i] = *e;
                }
                if nb > 0 {
                    m.0[2] += l1;
                    if m.0[2] < 0 && nb > 1 {
                        m.0[3] += 1;
                    }
                }
                (m, Rational::new(n, d))
            });
            TruncSeries::from_terms(&layout, &spec, terms).unwrap()
        })
}

fn arb_unit(layout: Arc<Layout>, spec: TruncSpec) -> impl Strategy<Value = TruncSeries> {
    (arb_series(layout.clone(), spec.clone(), false), 1i64..5).prop_map(move |(s, c)| {
        // drop pure-t terms so the constant part is a rational
        let kept = s.terms().iter().filter(|(m, _)| m.0[0] != 0 || m.block_degree(layout.nblock()) != 0).cloned();
        let base = TruncSeries::from_terms(&layout, &spec, kept).unwrap();
        let c0 = TruncSeries::int(&layout, &spec, c);
        &(&base - &TruncSeries::constant(&layout, &spec, base.constant_term())) + &c0
    })
}

fn small() -> (Arc<Layout>, TruncSpec) {
    (Layout::u(1), TruncSpec::new(4, 3, 0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(
        a in arb_series(small().0, small().1, false),
        b in arb_series(small().0, small().1, false),
        c in arb_series(small().0, small().1, false),
    ) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
    }

    #[test]
    fn laurent_ring_axioms(
        a in arb_series(small().0, small().1.with_floor(-3), true),
        b in arb_series(small().0, small().1.with_floor(-3), true),
    ) {
        let ab = &a * &b;
        let ba = &b * &a;
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn text_round_trip(a in arb_series(small().0, small().1.with_floor(-3), true)) {
        let back = TruncSeries::parse_text(a.layout(), a.spec(), &a.to_text()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn exp_log_round_trip(b in arb_series(small().0, small().1, false)) {
        let spec = small().1;
        let l = small().0;
        let b0 = &b - &TruncSeries::constant(&l, &spec, b.constant_term());
        let b0 = TruncSeries::from_terms(&l, &spec, b0.terms().iter().filter(|(m, _)| m.0[0] != 0 || m.block_degree(3) != 0).cloned()).unwrap();
        prop_assert_eq!(b0.exp().unwrap().log().unwrap(), b0.clone());
        let a = &TruncSeries::one(&l, &spec) + &b0;
        prop_assert_eq!(a.log().unwrap().exp().unwrap(), a);
    }

    #[test]
    fn truncation_monotone(
        a in arb_series(Layout::u(1), TruncSpec::new(6, 5, 0), false),
        b in arb_unit(Layout::u(1), TruncSpec::new(6, 5, 0)),
    ) {
        let lo = TruncSpec::new(3, 2, 0);
        let al = a.retruncate(&lo).unwrap();
        let bl = b.retruncate(&lo).unwrap();
        prop_assert_eq!((&a * &b).retruncate(&lo).unwrap(), &al * &bl);
        prop_assert_eq!((&a + &b).retruncate(&lo).unwrap(), &al + &bl);
        prop_assert_eq!(b.try_inverse().unwrap().retruncate(&lo).unwrap(), bl.try_inverse().unwrap());
        prop_assert_eq!(b.pow(3).retruncate(&lo).unwrap(), bl.pow(3));
        let f = &b - &TruncSeries::constant(b.layout(), b.spec(), b.constant_term());
        let fl = f.retruncate(&lo).unwrap();
        prop_assert_eq!(f.exp().unwrap().retruncate(&lo).unwrap(), fl.exp().unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn inverse_is_inverse(a in arb_unit(small().0, small().1)) {
        let one = TruncSeries::one(&small().0, &small().1);
        prop_assert_eq!(&a * &a.try_inverse().unwrap(), one);
    }

    #[test]
    fn inverse_is_inverse_with_z(a in arb_unit(Layout::new(vec!["x1".into()], false, true), TruncSpec::new(3, 2, 3))) {
        let one = TruncSeries::one(a.layout(), a.spec());
        prop_assert_eq!(&a * &a.try_inverse().unwrap(), one);
    }
}
