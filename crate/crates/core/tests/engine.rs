use autq::engine::{
    certify_bound, certify_support, commutator, compose, conjugate, inverse, min_max, normalize_pl, power, to_pl,
    Affine, Automorphism, Extremum, PlMap, Region,
};
use autq::order::rational::{int, rat, Rational};
use autq::order::Point;
use autq::Error;
use proptest::prelude::*;

fn kink() -> Automorphism {
    Automorphism::pl(PlMap::new(vec![int(0)], vec![Affine::new(int(1), int(0)), Affine::new(int(2), int(0))]).unwrap())
}

fn doubling() -> Automorphism {
    Automorphism::pl(PlMap::affine(Affine::new(int(2), int(0))))
}

fn t(r: Rational) -> Automorphism {
    Automorphism::translation(r)
}

fn at(g: &Automorphism, x: Rational) -> Rational {
    g.apply_q(&x).unwrap()
}

#[test]
fn evaluation_examples() {
    assert_eq!(at(&t(int(1)), rat(5, 2)), rat(7, 2));
    assert_eq!(at(&kink(), int(3)), int(6));
    assert_eq!(kink().apply_q_inv(&int(6)).unwrap(), int(3));
    let m = min_max(&[t(int(1)), t(int(-1))], Extremum::Min).unwrap();
    assert_eq!(at(&m, int(0)), int(-1));
}

#[test]
fn algebra_examples() {
    // f^-1 g f with f = 2x applied first-to-last: 0 -> 0 -> 1 -> 2, i.e. translation by 2
    let c = conjugate(&t(int(1)), &doubling()).unwrap();
    assert_eq!(at(&c, int(0)), int(2));
    assert_eq!(at(&c, int(5)), int(7));
    let c = conjugate(&t(int(1)), &inverse(&doubling())).unwrap();
    assert_eq!(at(&c, int(0)), rat(1, 2));
    let g = kink();
    let gg = commutator(&g, &g).unwrap();
    for k in -50..50 {
        assert_eq!(at(&gg, rat(k, 7)), rat(k, 7));
    }
}

#[test]
fn extremum_examples() {
    let f = kink();
    let ff = min_max(&[f.clone(), f.clone()], Extremum::Min).unwrap();
    for k in -20..20 {
        assert_eq!(at(&ff, rat(k, 3)), at(&f, rat(k, 3)));
    }
    let m = min_max(&[t(int(1)), doubling()], Extremum::Min).unwrap();
    assert_eq!(at(&inverse(&m), int(2)), int(1));
    let dual = min_max(&[t(int(-1)), inverse(&doubling())], Extremum::Max).unwrap();
    assert_eq!(at(&dual, int(2)), int(1));
    let n = min_max(&[Automorphism::identity(autq::order::Universe::QLine), doubling()], Extremum::Min).unwrap();
    assert_eq!(at(&n, int(-2)), int(-4));
}

#[test]
fn normalize_examples() {
    let s = normalize_pl(&compose(&[t(int(1)), t(int(2))]).unwrap());
    assert_eq!(at(&s, int(0)), int(3));
    let inv = to_pl(&inverse(&kink())).unwrap();
    let want = PlMap::new(vec![int(0)], vec![Affine::new(int(1), int(0)), Affine::new(rat(1, 2), int(0))]).unwrap();
    assert_eq!(inv, want);
    let m = min_max(&[t(int(1)), doubling()], Extremum::Min).unwrap();
    let p = to_pl(&m).unwrap();
    assert_eq!(p.breaks(), &[int(1)]);
    assert_eq!(p.pieces()[0], Affine::new(int(2), int(0)));
    assert_eq!(p.pieces()[1], Affine::new(int(1), int(1)));
    for k in -50..50 {
        assert_eq!(p.apply(&rat(k, 9)), at(&m, rat(k, 9)));
    }
}

#[test]
fn normalize_leaves_other_kinds_alone() {
    let w = Automorphism::window(kink(), 4, 0).unwrap();
    assert!(to_pl(&w).is_none());
    assert!(normalize_pl(&w).same(&w));
}

#[test]
fn certificate_examples() {
    let samples: Vec<Rational> = (-20..20).map(|k| rat(k, 5)).collect();
    assert!(certify_bound(&t(rat(1, 3)), &rat(1, 3), &samples, "translation").is_ok());
    match certify_bound(&t(int(1)), &rat(1, 2), &samples, "translation") {
        Err(Error::Certificate { witness, .. }) => assert_eq!(witness, "-4/1"),
        other => panic!("expected a certificate failure, got {other:?}"),
    }
    match certify_bound(&t(int(1)), &rat(1, 2), &[int(0)], "translation") {
        Err(Error::Certificate { witness, .. }) => assert_eq!(witness, "0/1"),
        other => panic!("expected a certificate failure, got {other:?}"),
    }
    let pts: Vec<Point> = samples.iter().map(|x| Point::Q(x.clone())).collect();
    let w = Automorphism::window(kink(), 4, 0).unwrap();
    assert!(certify_support(&w, &Region::periodic_closed(4, 0, 2), &pts, "window").is_ok());
}

#[test]
fn universe_mismatch_is_reported() {
    let o = Automorphism::identity(autq::order::Universe::Omega4);
    let named = power(&o, 2);
    let r = compose(&[t(int(1)), kink(), Automorphism::window(kink(), 4, 1).unwrap()]);
    assert!(r.is_ok());
    let bad = min_max(&[t(int(1)), named], Extremum::Max);
    assert!(matches!(bad, Err(Error::UniverseMismatch(_))));
}

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-400i64..400, 1i64..40).prop_map(|(n, d)| rat(n, d))
}

/// Random PL automorphism: increasing breakpoints with positive slopes.
fn arb_pl() -> impl Strategy<Value = Automorphism> {
    (
        arb_rational(),
        proptest::collection::vec((1i64..30, 1i64..6, 1i64..6), 0..4),
        1i64..5,
        1i64..5,
    )
        .prop_map(|(start, steps, s0n, s0d)| {
            let mut breaks = Vec::new();
            let mut slopes = vec![rat(s0n, s0d)];
            let mut b = start;
            for (gap, sn, sd) in steps {
                b = b + rat(gap, 4);
                breaks.push(b.clone());
                slopes.push(rat(sn, sd));
            }
            let mut pieces = vec![Affine::new(slopes[0].clone(), int(0))];
            for (i, br) in breaks.iter().enumerate() {
                let prev = &pieces[i];
                let y = prev.apply(br);
                let s = slopes[i + 1].clone();
                let c = y - &s * br;
                pieces.push(Affine::new(s, c));
            }
            Automorphism::pl(PlMap::new(breaks, pieces).unwrap())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monotone_and_round_trip(g in arb_pl(), x in arb_rational(), y in arb_rational()) {
        let (gx, gy) = (at(&g, x.clone()), at(&g, y.clone()));
        prop_assert_eq!(x.cmp(&y), gx.cmp(&gy));
        prop_assert_eq!(g.apply_q_inv(&gx).unwrap(), x);
    }

    #[test]
    fn commutator_conjugation_law(g in arb_pl(), h in arb_pl(), f in arb_pl(), x in arb_rational()) {
        let lhs = conjugate(&commutator(&g, &h).unwrap(), &f).unwrap();
        let rhs = commutator(&conjugate(&g, &f).unwrap(), &conjugate(&h, &f).unwrap()).unwrap();
        prop_assert_eq!(at(&lhs, x.clone()), at(&rhs, x));
    }

    #[test]
    fn normalize_preserves_values(g in arb_pl(), h in arb_pl(), k in -3i64..4, x in arb_rational()) {
        let e = compose(&[power(&g, k), min_max(&[h.clone(), g.clone()], Extremum::Max).unwrap(), inverse(&h)]).unwrap();
        prop_assert_eq!(at(&normalize_pl(&e), x.clone()), at(&e, x));
    }

    #[test]
    fn min_inverse_is_max_of_inverses(g in arb_pl(), h in arb_pl(), x in arb_rational()) {
        let m = min_max(&[g.clone(), h.clone()], Extremum::Min).unwrap();
        let d = min_max(&[inverse(&g), inverse(&h)], Extremum::Max).unwrap();
        prop_assert_eq!(at(&inverse(&m), x.clone()), at(&d, x.clone()));
        let y = at(&m, x.clone());
        prop_assert_eq!(m.apply_q_inv(&y).unwrap(), x);
    }

    #[test]
    fn memo_is_transparent(g in arb_pl(), xs in proptest::collection::vec(arb_rational(), 1..20)) {
        let w = Automorphism::window(compose(&[g.clone(), inverse(&g)]).unwrap(), 6, 1).unwrap();
        let m = min_max(&[g.clone(), kink()], Extremum::Min).unwrap();
        let warm: Vec<Rational> = xs.iter().map(|x| at(&m, x.clone())).collect();
        m.clear_memo();
        w.clear_memo();
        for (x, y) in xs.iter().zip(warm) {
            prop_assert_eq!(at(&m, x.clone()), y);
            prop_assert_eq!(at(&w, x.clone()), x.clone());
        }
    }
}
