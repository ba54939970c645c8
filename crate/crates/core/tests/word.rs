use std::collections::BTreeMap;

use autq::construction2::{build_bundle, omega4_points};
use autq::engine::{compose, conjugate, Affine, Automorphism, PlMap};
use autq::order::rational::{int, rat, Rational};
use autq::order::{Point, Universe};
use autq::word::{evaluate, substitute, t_range, two_letter_encode, words_t, words_w2, Assignment, Word};
use autq::Error;
use proptest::prelude::*;

fn samples() -> Vec<Point> {
    (0..60).map(|k| Point::Q(rat(k * 29 % 241 - 120, 9))).collect()
}

fn agree(f: &Automorphism, g: &Automorphism, pts: &[Point]) -> bool {
    pts.iter().all(|p| f.forward(p).unwrap() == g.forward(p).unwrap())
}

fn pl(slope: i64, shift: i64) -> Automorphism {
    Automorphism::pl(PlMap::new(vec![int(0)], vec![Affine::new(int(1), int(shift)), Affine::new(int(slope), int(shift))]).unwrap())
}

#[test]
fn evaluate_examples() {
    let asg = Assignment::new()
        .with("a", Automorphism::translation(int(1)))
        .unwrap()
        .with("b", Automorphism::translation(int(2)))
        .unwrap();
    let ab = evaluate(&Word::parse("a b").unwrap(), &asg).unwrap();
    assert!(agree(&ab, &Automorphism::translation(int(3)), &samples()));

    let same = Assignment::new().with("a", pl(3, 1)).unwrap().with("b", pl(3, 1)).unwrap();
    assert!(evaluate(&Word::parse("[a, b]").unwrap(), &same).unwrap().forward(&Point::Q(rat(5, 7))).unwrap() == Point::Q(rat(5, 7)));

    let asg = Assignment::new().with("a", pl(2, 0)).unwrap().with("b", pl(5, -1)).unwrap();
    let c = evaluate(&Word::parse("a^b").unwrap(), &asg).unwrap();
    let direct = conjugate(asg.get("a").unwrap(), asg.get("b").unwrap()).unwrap();
    assert!(agree(&c, &direct, &samples()));
}

#[test]
fn unassigned_letter() {
    let asg = Assignment::new().with("a", pl(2, 0)).unwrap();
    assert!(matches!(evaluate(&Word::parse("a c").unwrap(), &asg), Err(Error::Unassigned(_))));
}

#[test]
fn substitution_examples() {
    let mut rules = BTreeMap::new();
    rules.insert("g".to_string(), Word::parse("F^48 H").unwrap());
    assert_eq!(substitute(&Word::letter("g"), &rules).to_string(), "F^48 H");
    let mut rules = BTreeMap::new();
    rules.insert("f".to_string(), Word::parse("H H F^48 H F^96 H F^47").unwrap());
    let w = substitute(&Word::letter("f"), &rules);
    assert_eq!(w.to_string(), "H H F^48 H F^96 H F^47");
    assert!(w.is_positive());
    let w2 = words_w2(3);
    assert_eq!(substitute(&w2, &BTreeMap::new()).to_string(), w2.to_string());
}

#[test]
fn encode_examples() {
    assert_eq!(two_letter_encode(&Word::letter("g")).to_string(), "F^48 H");
    assert_eq!(two_letter_encode(&Word::letter_pow("f", -1)).to_string(), "H H F^48 H F^96 H F^47");
    assert_eq!(two_letter_encode(&Word::letter_pow("g", -1)).to_string(), "H F^48 H F^96 H");
    assert!(two_letter_encode(&words_w2(2)).is_positive());
}

#[test]
fn w2_display() {
    assert_eq!(words_w2(1).to_string(), "[(g g^(f^-12))^(g^(f^-4) g^(f^-28)), (g g^(f^-12))^((g^(f^-4))^-1)]");
    assert_eq!(words_w2(2).to_string(), "[(g g^(f^-12))^((g^(f^-4))^2 g^(f^-28)), (g g^(f^-12))^((g^(f^-4))^-2)]");
    for n in 1..6 {
        let w = words_w2(n);
        assert_eq!(w.free_reduce().reduced_syllables(), w.reduced_syllables());
        let letters: Vec<String> = w.letters().iter().map(|l| l.to_string()).collect();
        assert_eq!(letters, ["f", "g"]);
    }
}

#[test]
fn t_words_ranges() {
    assert_eq!(t_range(1), 0..=5);
    assert_eq!(t_range(2), 6..=17);
    let w = words_t(1, &|k| Word::letter_pow("x", k as i64));
    assert!(w.to_string().starts_with("x^(f^2) (x^2)^(f^4) (x^3)^(f^3) (x^4)^(f^5) (x^5)^(f^2) "));
    assert!(w.to_string().ends_with("(x^24)^(f^5)"));
    assert_eq!(w.reduced_syllables().iter().filter(|(l, _)| &**l == "x").count(), 24);
}

#[test]
fn relator_for_the_constructed_g() {
    let bundle = build_bundle(&[Automorphism::identity(Universe::Omega4)], None).unwrap();
    let asg = bundle.encoded_assignment().unwrap();
    let relator = Word::parse("H F^48 H F^96 H F^48 H").unwrap();
    let r = evaluate(&relator, &asg).unwrap();
    for p in omega4_points(200, 3) {
        assert_eq!(r.forward(&p).unwrap(), p);
    }
}

fn arb_word() -> impl Strategy<Value = Word> {
    prop::collection::vec((prop::sample::select(vec!["f", "g"]), prop::sample::select(vec![-2i64, -1, 1, 2, 3])), 1..6)
        .prop_map(|v| Word::seq(v.into_iter().map(|(l, e)| Word::letter_pow(l, e)).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn evaluation_is_a_homomorphism(u in arb_word(), v in arb_word()) {
        let asg = Assignment::new().with("f", pl(3, 1)).unwrap().with("g", pl(2, -2)).unwrap();
        let joined = evaluate(&Word::seq(vec![u.clone(), v.clone()]), &asg).unwrap();
        let apart = compose(&[evaluate(&u, &asg).unwrap(), evaluate(&v, &asg).unwrap()]).unwrap();
        prop_assert!(agree(&joined, &apart, &samples()));
    }

    #[test]
    fn encoding_preserves_evaluation(w in arb_word()) {
        let bundle = build_bundle(&[Automorphism::identity(Universe::Omega4)], None).unwrap();
        let plain = evaluate(&w, &bundle.assignment().unwrap()).unwrap();
        let encoded = two_letter_encode(&w);
        prop_assert!(encoded.is_positive());
        let enc = evaluate(&encoded, &bundle.encoded_assignment().unwrap()).unwrap();
        let pts = omega4_points(100, 17);
        prop_assert!(pts.iter().all(|p| plain.forward(p).unwrap() == enc.forward(p).unwrap()));
    }

    #[test]
    fn exponents_add(k in -6i64..6, j in -6i64..6, x in -50i64..50) {
        let asg = Assignment::new().with("f", pl(3, 1)).unwrap();
        let w = Word::seq(vec![Word::letter_pow("f", k), Word::letter_pow("f", j)]);
        let x: Rational = rat(x, 3);
        let lhs = evaluate(&w, &asg).unwrap().apply_q(&x).unwrap();
        let rhs = evaluate(&Word::letter_pow("f", k + j), &asg).unwrap().apply_q(&x).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
