use std::time::Instant;

use autq::construction8::{assemble_8letter, build_abc, off_fibre_points, verify_thm8, word_8letter};
use autq::engine::{conjugate, inverse, power, Affine, Automorphism, PlMap};
use autq::iso::OrderIso;
use autq::order::point::Star;
use autq::order::rational::{int, rat, Rational};
use autq::order::{Point, Universe};
use autq::sampling::sample_rationals;
use autq::word::words_w8;

fn psi_translation() -> Automorphism {
    Automorphism::transport(&OrderIso::psi().inverse(), &Automorphism::translation(int(1))).unwrap()
}

fn fibre(i: i64, x: Rational) -> Point {
    Point::O3 { i, j: Star::Fin(0), x: Star::Fin(x) }
}

fn display_pattern(n: u64) -> String {
    let mut parts = Vec::new();
    for i in 3 * n * (n - 1)..3 * n * (n + 1) {
        let i = i as i64;
        for (k, e) in [(1, 2), (3, 4), (5, 3), (7, 5)] {
            parts.push(format!("[a^(b^{}), a^(b^{} c)]^(f^{})", -8 * i - k, 8 * i + k + 1, e));
        }
    }
    parts.join(" ")
}

#[test]
fn w8_golden() {
    assert_eq!(words_w8(1).to_string(), "[a^(b^-1), a^(b^2 c)]");
    assert_eq!(words_w8(2).to_string(), "[a^(b^-3), a^(b^4 c)]");
    for n in 1..=8i64 {
        assert_eq!(words_w8(n as u64).to_string(), format!("[a^(b^{}), a^(b^{} c)]", 1 - 2 * n, 2 * n));
    }
}

#[test]
fn t_words_follow_the_display() {
    for n in 1..=4 {
        assert_eq!(word_8letter(n).to_string(), display_pattern(n));
    }
}

#[test]
fn identity_targets() {
    let id = Automorphism::identity(Universe::UnitInterval);
    let bundle = build_abc(&[id.clone(), id], None).unwrap();
    assert!(bundle.a.is_identity());
    let report = verify_thm8(&bundle, 2, 50, 3).unwrap();
    assert!(report.verdict);
}

#[test]
fn fibre_chain() {
    let g = psi_translation();
    let bundle = build_abc(&[g.clone()], None).unwrap();
    let (v, w) = (&bundle.witnesses[0].v, &bundle.witnesses[0].w);
    let b = &bundle.b;
    let c = &bundle.c;
    let first = conjugate(&bundle.a, &power(b, -1)).unwrap();
    let second = conjugate(&bundle.a, &autq::engine::compose(&[power(b, 2), c.clone()]).unwrap()).unwrap();
    for k in -9..10 {
        let x = rat(k, 10);
        let hx = v.forward(&Point::Q(x.clone())).unwrap();
        assert_eq!(first.forward(&fibre(0, x.clone())).unwrap(), fibre(0, hx.as_q().unwrap().clone()));
        let hx = w.forward(&Point::Q(x.clone())).unwrap();
        assert_eq!(second.forward(&fibre(0, x.clone())).unwrap(), fibre(0, hx.as_q().unwrap().clone()));
    }
    // the two conjugates have disjoint supports off the fibre
    for p in off_fibre_points(300, 11) {
        let moved1 = first.forward(&p).unwrap() != p;
        let moved2 = second.forward(&p).unwrap() != p;
        assert!(!(moved1 && moved2), "both move {p}");
    }
}

#[test]
fn words_match_targets_on_the_fibre() {
    let g1 = psi_translation();
    let on_q = Automorphism::pl(PlMap::new(vec![int(0)], vec![Affine::new(int(1), int(0)), Affine::new(int(3), int(0))]).unwrap());
    let g2 = Automorphism::transport(&OrderIso::psi().inverse(), &on_q).unwrap();
    let bundle = build_abc(&[g1, Automorphism::identity(Universe::UnitInterval), g2], None).unwrap();
    for n in 1..=3 {
        let report = verify_thm8(&bundle, n, 100, 5).unwrap();
        assert!(report.verdict, "{}", report.to_text());
        assert_eq!(report.checks.len(), 200);
    }
}

#[test]
fn letters_are_automorphisms() {
    let bundle = build_abc(&[psi_translation()], None).unwrap();
    let mut pts = off_fibre_points(500, 2);
    pts.extend((0..500).map(|k| fibre(0, rat(k - 250, 251))));
    for g in [&bundle.a, &bundle.b, &bundle.c] {
        let gi = inverse(g);
        let mut images: Vec<(Point, Point)> = pts.iter().map(|p| (p.clone(), g.forward(p).unwrap())).collect();
        for (p, y) in &images {
            assert_eq!(&gi.forward(y).unwrap(), p);
        }
        images.sort();
        assert!(images.windows(2).all(|w| w[0].1 <= w[1].1));
    }
}

#[test]
fn end_to_end_translation() {
    let xs = sample_rationals(1, 30, -20, 20);
    let t = Instant::now();
    let out = assemble_8letter(&[Automorphism::translation(int(1))], &xs).unwrap();
    let built = t.elapsed();
    let report = out.verify(&xs, 1).unwrap();
    eprintln!("build {:?}, verify {:?}", built, t.elapsed() - built);
    assert!(report.verdict, "{}", report.to_text());
}
