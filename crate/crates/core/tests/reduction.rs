use autq::engine::{
    certify_bound, certify_support, compose, extend_by_identity, conjugate, min_max, normalize_pl, Affine, Automorphism, Extremum, PlMap,
    Region,
};
use autq::order::rational::{abs, int, rat, Rational};
use autq::order::{Point, Universe};
use autq::reduction::{
    bounded_factorize, reduce, split_even_stab, split_interval_stab, support_samples, taming_conjugator, Direction,
};
use autq::sampling::sample_rationals;
use autq::word::{chunk_ranges, word_chunk, word_decorate, Word};
use autq::Error;
use proptest::prelude::*;

fn samples(n: usize) -> Vec<Rational> {
    sample_rationals(7, n, -40, 40)
}

fn pl(breaks: &[Rational], pieces: &[(Rational, Rational)]) -> Automorphism {
    Automorphism::pl(
        PlMap::new(breaks.to_vec(), pieces.iter().map(|(s, c)| Affine::new(s.clone(), c.clone())).collect()).unwrap(),
    )
}

fn doubling() -> Automorphism {
    pl(&[], &[(int(2), int(0))])
}

/// Clamp into `B_r`.
fn clamp(g: &Automorphism, r: Rational) -> Automorphism {
    let up = Automorphism::translation(r.clone());
    let down = Automorphism::translation(-r);
    normalize_pl(
        &min_max(&[min_max(&[g.clone(), up].to_vec(), Extremum::Min).unwrap(), down], Extremum::Max).unwrap(),
    )
}

fn agree(a: &Automorphism, b: &Automorphism, xs: &[Rational]) {
    for x in xs {
        assert_eq!(a.apply_q(x).unwrap(), b.apply_q(x).unwrap(), "at {x}");
    }
}

#[test]
fn taming_identity_and_translation() {
    let id = Automorphism::identity(Universe::QLine);
    let t = taming_conjugator(&[id.clone(), id], &samples(50)).unwrap();
    for m in -20..20 {
        assert_eq!(t.sigma.value(m, &mut Default::default()).unwrap(), m.into());
    }
    assert!(t.p.is_identity());

    let t = taming_conjugator(&[Automorphism::translation(int(5))], &samples(50)).unwrap();
    assert_eq!(t.sigma.value(1, &mut Default::default()).unwrap(), 6.into());
}

#[test]
fn taming_doubling() {
    let xs = samples(100);
    let t = taming_conjugator(&[doubling()], &xs).unwrap();
    assert_eq!(t.certificates.len(), 1);
    assert_eq!(t.direction, Direction::PInverse);
    for x in &xs {
        let y = t.tamed[0].apply_q(x).unwrap();
        assert!(abs(&(y - x)) <= int(2));
    }
    // sigma strictly increasing, p round-trips
    let mut prev = t.sigma.value(-15, &mut Default::default()).unwrap();
    for m in -14..15 {
        let v = t.sigma.value(m, &mut Default::default()).unwrap();
        assert!(v > prev);
        prev = v;
    }
    for x in &xs {
        assert_eq!(t.p.apply_q_inv(&t.p.apply_q(x).unwrap()).unwrap(), *x);
    }
    // untaming the tamed map gives back the original
    let back = t.untame(&t.tamed[0]).unwrap();
    agree(&back, &doubling(), &xs);
}

#[test]
fn factorization_examples() {
    let xs = samples(100);
    let id = Automorphism::identity(Universe::QLine);
    let cert = certify_bound(&id, &int(0), &xs, "test").unwrap();
    let chain = bounded_factorize(&id, &int(1), 3, Some(&cert), &xs).unwrap();
    assert!(chain.factors.iter().all(|f| f.is_identity()));

    let g = Automorphism::translation(int(2));
    let cert = certify_bound(&g, &int(2), &xs, "test").unwrap();
    let chain = bounded_factorize(&g, &int(1), 2, Some(&cert), &xs).unwrap();
    assert_eq!(chain.factors.len(), 2);
    for f in &chain.factors {
        agree(f, &Automorphism::translation(int(1)), &xs);
    }
    chain.verify(&xs).unwrap();

    assert!(matches!(bounded_factorize(&g, &int(1), 2, None, &xs), Err(Error::Precondition(_))));
    let other = certify_bound(&id, &int(2), &xs, "test").unwrap();
    assert!(matches!(bounded_factorize(&g, &int(1), 2, Some(&other), &xs), Err(Error::Precondition(_))));
    // radius too large for n factors of size r
    assert!(matches!(bounded_factorize(&g, &int(1), 1, Some(&cert), &xs), Err(Error::Precondition(_))));
}

#[test]
fn factorization_in_b2() {
    let xs = samples(100);
    let g = clamp(&pl(&[int(0), int(3)], &[(int(3), int(0)), (rat(1, 5), int(0)), (int(4), rat(-57, 5))]), int(2));
    let cert = certify_bound(&g, &int(2), &xs, "clamp").unwrap();
    let chain = bounded_factorize(&g, &rat(1, 3), 6, Some(&cert), &xs).unwrap();
    assert_eq!(chain.factors.len(), 6);
    assert_eq!(chain.bounds.len(), 6);
    chain.verify(&xs).unwrap();
}

#[test]
fn factorization_off_the_pl_path() {
    // not piecewise linear, so the peeled remainders stay lazy
    let psi = autq::iso::OrderIso::psi();
    let on_q = pl(&[int(0)], &[(int(1), int(0)), (int(5), int(0))]);
    let g = extend_by_identity(&Automorphism::transport(&psi.inverse(), &on_q).unwrap()).unwrap();
    let g = conjugate(&g, &pl(&[], &[(int(4), int(0))])).unwrap();
    let mut xs = samples(60);
    xs.extend((-160..160).map(|k| rat(k, 41)));
    let cert = certify_bound(&g, &int(2), &xs, "inside (-1,1)").unwrap();
    let chain = bounded_factorize(&g, &rat(1, 3), 6, Some(&cert), &xs).unwrap();
    chain.verify(&xs).unwrap();
    let mut sorted = xs.clone();
    sorted.sort();
    sorted.dedup();
    // a second chain has its own memo tables, so inverses are checked against fresh forwards
    let again = bounded_factorize(&g, &rat(1, 3), 6, Some(&cert), &xs).unwrap();
    for (f, fresh) in chain.factors.iter().zip(&again.factors) {
        let ys: Vec<Rational> = sorted.iter().map(|y| f.apply_q_inv(&(y + rat(1, 7))).unwrap()).collect();
        assert!(ys.windows(2).all(|w| w[0] < w[1]));
        for (x, y) in sorted.iter().zip(&ys) {
            assert_eq!(fresh.apply_q(y).unwrap(), x + rat(1, 7));
        }
    }
}

#[test]
fn even_split_examples() {
    let xs = samples(100);
    let id = Automorphism::identity(Universe::QLine);
    let cert = certify_bound(&id, &int(0), &xs, "test").unwrap();
    let s = split_even_stab(&id, Some(&cert), &xs).unwrap();
    assert!(s.h.is_identity() && s.rest.is_identity());

    let g = Automorphism::translation(rat(1, 3));
    let cert = certify_bound(&g, &rat(1, 3), &xs, "test").unwrap();
    let s = split_even_stab(&g, Some(&cert), &xs).unwrap();
    for n in -5..5 {
        assert_eq!(s.h.apply_q(&(int(2 * n) + rat(1, 3))).unwrap(), int(2 * n) + rat(1, 2));
        assert_eq!(s.h.apply_q(&(int(2 * n) + rat(2, 3))).unwrap(), int(2 * n + 1));
    }
    s.chain.verify(&xs).unwrap();
    assert_eq!(s.chain.supports.len(), 2);
    // g = h * shifted^f
    let f = Automorphism::translation(int(1));
    agree(&compose(&[s.h.clone(), conjugate(&s.shifted, &f).unwrap()]).unwrap(), &g, &xs);

    let g = Automorphism::translation(int(1));
    let cert = certify_bound(&g, &int(1), &xs, "test").unwrap();
    assert!(matches!(split_even_stab(&g, Some(&cert), &xs), Err(Error::Precondition(_))));
}

#[test]
fn interval_split_examples() {
    let xs = samples(200);
    let pts = support_samples(&xs);
    let id = Automorphism::identity(Universe::QLine);
    let cert = certify_support(&id, &Region::off_lattice(2, 0), &pts, "test").unwrap();
    let s = split_interval_stab(&id, 4, Some(&cert), &xs).unwrap();
    assert!(s.ks.iter().all(|k| k.is_identity()));

    let g = Automorphism::translation(rat(1, 3));
    let cert = certify_bound(&g, &rat(1, 3), &xs, "test").unwrap();
    let h = split_even_stab(&g, Some(&cert), &xs).unwrap().h;
    let cert = certify_support(&h, &Region::off_lattice(2, 0), &pts, "test").unwrap();
    let s = split_interval_stab(&h, 4, Some(&cert), &xs).unwrap();
    assert_eq!(s.ks.len(), 2);
    for x in &xs {
        let r = x - int(4) * Rational::from_integer((x / int(4)).floor().to_integer());
        let expect = if r >= int(2) { h.apply_q(x).unwrap() } else { x.clone() };
        assert_eq!(s.ks[0].apply_q(x).unwrap(), expect);
    }
    s.chain.verify(&xs).unwrap();
    assert_eq!(s.chain.supports.len(), 2);
    assert!(matches!(split_interval_stab(&h, 4, None, &xs), Err(Error::Precondition(_))));
    assert!(split_interval_stab(&h, 5, Some(&cert), &xs).is_err());
}

#[test]
fn chunks_and_frames() {
    let terms: Vec<Word> = (1..=30).map(|k| Word::letter_pow("u", k)).collect();
    let chunks = word_chunk(&terms, &[6, 12]).unwrap();
    assert_eq!(chunks[0].to_string(), "u u^2 u^3 u^4 u^5 u^6");
    assert!(chunks[1].to_string().starts_with("u^7 ") && chunks[1].to_string().ends_with(" u^18"));
    assert_eq!(chunk_ranges(&[2, 4, 6]).unwrap(), vec![(1, 2), (3, 6), (7, 12)]);
    assert!(word_chunk(&terms, &[0]).is_err());

    let frame = [Word::letter("x"), Word::letter("y")];
    let out = word_decorate(&terms[..1], &frame).unwrap();
    assert_eq!(out[0].to_string(), "x u y");
    assert!(word_decorate(&terms[..1], &[Word::letter("u"), Word::letter("y")]).is_err());
}

#[test]
fn chunk_lengths_match_outer_product() {
    // chunk n of lengths 6n spans 3n(n-1)+1 ..= 3n(n+1)
    let lengths: Vec<u64> = (1..=10).map(|n| 6 * n).collect();
    for (n, (a, b)) in chunk_ranges(&lengths).unwrap().into_iter().enumerate() {
        let n = n as u64 + 1;
        assert_eq!((a, b), (3 * n * (n - 1) + 1, 3 * n * (n + 1)));
    }
}

#[test]
fn pipeline_reassembles() {
    let xs = samples(40);
    let gs = vec![doubling(), pl(&[int(1)], &[(int(1), int(0)), (int(3), int(-2))])];
    let r = reduce(&gs, 4, &xs).unwrap();
    assert_eq!(r.v.len(), 6 + 12);
    assert_eq!(r.u.len(), 36);
    assert_eq!(r.z.len(), 72);
    let f = Automorphism::translation(int(1));
    let shift = |k: i64| Automorphism::translation(int(k));
    let few = &xs[..15];
    for q in 1..=r.v.len() {
        let lhs = compose(&[r.u[2 * q - 2].clone(), conjugate(&r.u[2 * q - 1], &f).unwrap()]).unwrap();
        agree(&lhs, &r.v[q - 1], few);
    }
    for (ri, u) in r.u.iter().enumerate() {
        let parts: Vec<Automorphism> =
            (1..=2).map(|j| conjugate(r.z(2 * ri + j as usize).unwrap(), &shift(2 * j)).unwrap()).collect();
        agree(&compose(&parts).unwrap(), u, few);
    }
    // the v's multiply back to the tamed maps
    let t1 = compose(&r.v[..6]).unwrap();
    agree(&t1, &r.taming.tamed[0], few);
    let outside = Region::outside_i(4);
    for z in &r.z {
        for k in -8..8 {
            let p = Point::Q(int(k) + rat(1, 2));
            if !outside.contains(&p) {
                assert_eq!(z.forward(&p).unwrap(), p);
            }
        }
    }
}

fn arb_pl() -> impl Strategy<Value = Automorphism> {
    (-20i64..20, proptest::collection::vec((1i64..12, 1i64..4, 1i64..4), 0..4), 1i64..4, 1i64..4).prop_map(
        |(start, steps, s0n, s0d)| {
            let mut breaks = Vec::new();
            let mut pieces = vec![Affine::new(rat(s0n, s0d), int(0))];
            let mut b = int(start);
            for (gap, sn, sd) in steps {
                b += rat(gap, 2);
                let y = pieces.last().unwrap().apply(&b);
                let s = rat(sn, sd);
                let c = y - &s * &b;
                breaks.push(b.clone());
                pieces.push(Affine::new(s, c));
            }
            Automorphism::pl(PlMap::new(breaks, pieces).unwrap())
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bounded_chains_reassemble(g in arb_pl(), seed in 0u64..1000) {
        let xs = sample_rationals(seed, 60, -30, 30);
        let g = clamp(&g, int(2));
        let cert = certify_bound(&g, &int(2), &xs, "clamp").unwrap();
        let chain = bounded_factorize(&g, &rat(1, 3), 6, Some(&cert), &xs).unwrap();
        chain.verify(&xs).unwrap();
        for f in &chain.factors {
            let cert = certify_bound(f, &rat(1, 3), &xs, "factor").unwrap();
            let s = split_even_stab(f, Some(&cert), &xs).unwrap();
            s.chain.verify(&xs).unwrap();
        }
    }

    #[test]
    fn taming_bounds_hold(g1 in arb_pl(), g2 in arb_pl(), seed in 0u64..1000) {
        let xs = sample_rationals(seed, 60, -30, 30);
        let t = taming_conjugator(&[g1, g2], &xs).unwrap();
        for (i, tg) in t.tamed.iter().enumerate() {
            let r = int(2 * (i as i64 + 1));
            for x in &xs {
                prop_assert!(abs(&(tg.apply_q(x).unwrap() - x)) <= r);
            }
        }
    }
}
