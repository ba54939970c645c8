use std::sync::Arc;

use autq::construction2::{
    build_bundle, emit_explicit_sequence, fibre_commutator, fibre_points, main_pipeline, omega4_points, omega_f,
    on_fibre, verify_identities, verify_main, word_2letter, word_2letter_fg,
};
use autq::engine::{commutator, compose, power, Affine, Automorphism, Ctx, PlMap, PointMap};
use autq::error::Result;
use autq::iso::OrderIso;
use autq::order::point::Star;
use autq::order::rational::{int, rat, Rational};
use autq::order::{Point, Universe};
use autq::sampling::{sample_rationals, Sampler};
use autq::synth::CommutatorWitnesses;
use autq::word::{words_w2, TwoLetterCode};

/// `h` on every fibre `Omega_12n`, identity elsewhere.
struct OnFibres(Automorphism);

impl OnFibres {
    fn act(&self, p: &Point, inv: bool, cx: &mut Ctx) -> Result<Point> {
        match on_fibre(p) {
            Some((i, x)) if i.rem_euclid(12) == 0 => {
                let y = self.0.eval(&Point::Q(x.clone()), inv, cx)?;
                Ok(Point::O4 { i, j: Star::Fin(0), m: Star::Fin(0), x: Star::Fin(y.as_q()?.clone()) })
            }
            _ => Ok(p.clone()),
        }
    }
}

impl PointMap for OnFibres {
    fn universe(&self) -> Universe {
        Universe::Omega4
    }

    fn name(&self) -> String {
        format!("fibres({})", self.0.describe())
    }

    fn forward(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        self.act(x, false, cx)
    }

    fn backward(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        self.act(x, true, cx)
    }
}

fn on_fibres(h: &Automorphism) -> Automorphism {
    Automorphism::custom(Arc::new(OnFibres(h.clone())))
}

fn unit(q: PlMap) -> Automorphism {
    Automorphism::transport(&OrderIso::psi().inverse(), &Automorphism::pl(q)).unwrap()
}

fn shift_unit() -> Automorphism {
    unit(PlMap::affine(Affine::new(int(1), int(1))))
}

fn steep_unit() -> Automorphism {
    unit(PlMap::new(vec![int(0)], vec![Affine::new(int(1), int(0)), Affine::new(int(3), int(0))]).unwrap())
}

fn doubling() -> Automorphism {
    Automorphism::pl(PlMap::affine(Affine::new(int(2), int(0))))
}

fn o4(i: i64, j: i64, m: i64, x: Rational) -> Point {
    Point::O4 { i, j: Star::Fin(j), m: Star::Fin(m), x: Star::Fin(x) }
}

#[test]
fn identity_targets() {
    let id = Automorphism::identity(Universe::Omega4);
    let bundle = build_bundle(&[id.clone(), id], None).unwrap();
    assert!(bundle.a.is_identity());
    let report = verify_identities(&bundle, 100, 1).unwrap();
    assert!(report.verdict, "{}", report.to_text());
    for m in 1..=2 {
        assert!(verify_main(&bundle, m, 40, 2).unwrap().verdict);
    }
}

#[test]
fn f4_shifts_the_first_coordinate() {
    let f4 = power(&omega_f(), 4);
    for p in omega4_points(1000, 9) {
        let Point::O4 { i, j, m, x } = p.clone() else { unreachable!() };
        assert_eq!(f4.forward(&p).unwrap(), Point::O4 { i: i + 1, j, m, x });
    }
}

#[test]
fn a_acts_by_kbar_on_even_layers() {
    let bundle = build_bundle(&[on_fibres(&shift_unit()), on_fibres(&steep_unit())], None).unwrap();
    for i in [-24, 0, 24] {
        for (j, m) in [(0, 1), (2, -2), (-4, 1), (0, 0)] {
            let k = bundle.kbar(m, i).unwrap();
            for n in -4..=4 {
                let x = rat(n, 5);
                let want = match &k {
                    Some(k) => k.forward(&Point::Q(x.clone())).unwrap().as_q().unwrap().clone(),
                    None => x.clone(),
                };
                assert_eq!(bundle.a.forward(&o4(i, j, m, x)).unwrap(), o4(i, j, m, want));
            }
        }
    }
}

#[test]
fn d_fixes_the_zero_layer() {
    let bundle = build_bundle(&[on_fibres(&shift_unit())], None).unwrap();
    for p in omega4_points(300, 4) {
        if let Point::O4 { j: Star::Fin(0), m: Star::Fin(0), .. } = &p {
            assert_eq!(bundle.d.forward(&p).unwrap(), p);
        }
    }
}

#[test]
fn identities_with_targets() {
    let bundle = build_bundle(&[on_fibres(&shift_unit()), on_fibres(&steep_unit())], None).unwrap();
    let report = verify_identities(&bundle, 200, 5).unwrap();
    assert!(report.verdict, "{}", report.to_text());
}

#[test]
fn ab_squared_on_odd_layer() {
    let bundle = build_bundle(&[on_fibres(&shift_unit())], None).unwrap();
    let ab2 = compose(&[bundle.ab.clone(), bundle.ab.clone()]).unwrap();
    let b2 = power(&bundle.b, 2);
    for n in -3..=3 {
        let p = o4(0, 1, 1, rat(n, 4));
        assert_eq!(ab2.forward(&p).unwrap(), b2.forward(&p).unwrap());
    }
}

#[test]
fn commutator_word_with_known_pair() {
    let v = shift_unit();
    let w = steep_unit();
    let h = commutator(&v, &w).unwrap();
    let pts: Vec<Point> = (-9..10).map(|k| Point::Q(rat(k, 10))).collect();
    let cw = CommutatorWitnesses::supplied(&h, &v, &w, &pts).unwrap();
    let bundle = build_bundle(&[on_fibres(&h)], Some(vec![cw])).unwrap();
    let report = verify_main(&bundle, 1, 100, 7).unwrap();
    assert!(report.verdict, "{}", report.to_text());
    let word = autq::word::evaluate(&words_w2(1), &bundle.assignment().unwrap()).unwrap();
    let direct = fibre_commutator(&bundle, 1).unwrap();
    for p in fibre_points(50, 8) {
        assert_eq!(word.forward(&p).unwrap(), direct.forward(&p).unwrap());
    }
}

#[test]
fn power_of_g_matches_iteration() {
    let bundle = build_bundle(&[on_fibres(&shift_unit())], None).unwrap();
    for k in [-3i64, -1, 2, 5] {
        let closed = power(&bundle.g, k);
        let step = if k < 0 { autq::engine::inverse(&bundle.g) } else { bundle.g.clone() };
        for p in omega4_points(60, 12) {
            let mut q = p.clone();
            for _ in 0..k.abs() {
                q = step.forward(&q).unwrap();
            }
            assert_eq!(closed.forward(&p).unwrap(), q, "k = {k} at {p}");
        }
    }
}

#[test]
fn identity_pipeline() {
    let xs = sample_rationals(3, 40, -20, 20);
    let out = main_pipeline(&[Automorphism::identity(Universe::QLine)], &xs).unwrap();
    let report = out.verify(&xs, 3).unwrap();
    assert!(report.verdict, "{}", report.to_text());
}

#[test]
fn translation_and_doubling() {
    let xs = sample_rationals(1, 100, -20, 20);
    let out = main_pipeline(&[Automorphism::translation(int(1)), doubling()], &xs).unwrap();
    let report = out.verify(&xs, 1).unwrap();
    assert!(report.verdict, "{}", report.to_text());
    // before the taming conjugation F is the unit translation
    let f = out.tamed_assignment.get("F").unwrap();
    for x in &xs {
        assert_eq!(f.apply_q(x).unwrap(), x + int(1));
    }
}

#[test]
fn words_are_positive_over_two_letters() {
    let code = TwoLetterCode::default();
    for n in 1..=3 {
        let w = word_2letter(&code, n);
        assert!(w.is_positive());
        let letters: Vec<String> = w.letters().iter().map(|l| l.to_string()).collect();
        assert_eq!(letters, ["F", "H"]);
    }
}

#[test]
fn words_do_not_depend_on_targets() {
    let xs = sample_rationals(2, 10, -5, 5);
    let one = main_pipeline(&[Automorphism::translation(int(1)), doubling()], &xs).unwrap();
    let two = main_pipeline(&[Automorphism::pl(Sampler::new(3).pl(2)), Automorphism::identity(Universe::QLine)], &xs).unwrap();
    for (a, b) in one.words.iter().zip(&two.words) {
        assert_eq!(a.to_string(), b.to_string());
    }
}

#[test]
fn explicit_sequence_lengths() {
    let listing = emit_explicit_sequence(2);
    assert_eq!(listing[0].1.length, 304452288);
    assert_eq!(listing[0].1.letters, 2);
    assert!(listing[1].1.length > listing[0].1.length);
    assert_eq!(listing[0].0.length(), word_2letter(&TwoLetterCode::default(), 1).length());
    assert!(word_2letter_fg(1).letters().iter().all(|l| ["f", "g"].contains(&&**l)));
}
