//! Two letters: fibre maps `a, b, c, d` on Omega4, the generator
//! `g = ab c^(f^4) (b^-1)^(f^12) d^(f^28)`, and the positive encoding over `F = f`, `H = f^-48 g`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use num_traits::Signed;
use parking_lot::Mutex;

use crate::engine::cert::{certify_support, Region, SupportCertificate};
use crate::engine::{commutator, compose, conjugate, inverse, power, Automorphism, Ctx, PointMap};
use crate::error::{Error, Result};
use crate::iso::{phi_main, OrderIso};
use crate::order::point::Star;
use crate::order::rational::{int, one, Rational};
use crate::order::{Point, Universe};
use crate::reduction::{reduce, Reduction};
use crate::report::VerificationReport;
use crate::sampling::Sampler;
use crate::synth::{witnesses_in_interval, CommutatorWitnesses};
use crate::word::{evaluate, evaluate_with, words_t_m, words_w2, Assignment, TwoLetterCode, Word, WordStats};

/// Window size of the reduction feeding the two-letter construction.
pub const M: u64 = 48;

/// The shared `phi`, so that transports through it merge.
pub fn omega_phi() -> OrderIso {
    static PHI: OnceLock<OrderIso> = OnceLock::new();
    PHI.get_or_init(phi_main).clone()
}

/// `f`: the unit translation seen through `phi`; `f^4` shifts the first coordinate.
pub fn omega_f() -> Automorphism {
    static F: OnceLock<Automorphism> = OnceLock::new();
    F.get_or_init(|| Automorphism::transport(&omega_phi(), &Automorphism::translation(int(1))).expect("Q to Omega4"))
        .clone()
}

/// `x -> x - 1` then `phi`; carries `Stab(I_48)` onto the maps supported on the fibres `Omega_{12n}`.
pub fn omega_rho() -> OrderIso {
    static RHO: OnceLock<OrderIso> = OnceLock::new();
    RHO.get_or_init(|| OrderIso::compose(&[OrderIso::shift(int(-1)), omega_phi()]).expect("Q to Q to Omega4"))
        .clone()
}

fn rho_inverse() -> OrderIso {
    static INV: OnceLock<OrderIso> = OnceLock::new();
    INV.get_or_init(|| omega_rho().inverse()).clone()
}

/// `Some(true)` on `24Z`, `Some(false)` on `24Z + 12`.
fn class(i: i64) -> Option<bool> {
    match i.rem_euclid(24) {
        0 => Some(true),
        12 => Some(false),
        _ => None,
    }
}

fn o4_parts(p: &Point) -> Result<(i64, &Star<i64>, &Star<i64>, &Star<Rational>)> {
    match p {
        Point::O4 { i, j, m, x } => Ok((*i, j, m, x)),
        other => Err(Error::Domain(format!("{other} is not in Omega4"))),
    }
}

/// Points of the distinguished fibre `{n} x {0} x {0} x (-1,1)`.
pub fn on_fibre(p: &Point) -> Option<(i64, &Rational)> {
    match p {
        Point::O4 { i, j: Star::Fin(0), m: Star::Fin(0), x: Star::Fin(x) } if x.abs() < one() => Some((*i, x)),
        _ => None,
    }
}

/// The union of the fibres `Omega_n`, `n` in `12Z`.
pub fn fibres12() -> Region {
    Region::new("U Omega_12n", |p| matches!(on_fibre(p), Some((i, _)) if i.rem_euclid(12) == 0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Coord {
    J,
    M,
    X,
}

/// `b^k`, `c^k` or `d^k`: a signed step in one coordinate on `12Z`, opposite signs on `24Z` and `24Z+12`.
struct Step {
    coord: Coord,
    by: i64,
}

impl Step {
    fn act(&self, p: &Point, inv: bool) -> Result<Point> {
        let (i, j, m, x) = o4_parts(p)?;
        let Some(pos) = class(i) else { return Ok(p.clone()) };
        let by = if pos != inv { self.by } else { -self.by };
        let (j, m, x) = match self.coord {
            Coord::J => (j.shift(by), m.clone(), x.clone()),
            Coord::M => (j.clone(), m.shift(by), x.clone()),
            Coord::X if (j, m) == (&Star::Fin(0), &Star::Fin(0)) => return Ok(p.clone()),
            Coord::X => (j.clone(), m.clone(), x.map(|v| v + int(2 * by))),
        };
        Ok(Point::O4 { i, j, m, x })
    }
}

impl PointMap for Step {
    fn universe(&self) -> Universe {
        Universe::Omega4
    }

    fn name(&self) -> String {
        let l = match self.coord {
            Coord::J => "b",
            Coord::M => "c",
            Coord::X => "d",
        };
        if self.by == 1 {
            l.into()
        } else {
            format!("{l}^{}", self.by)
        }
    }

    fn forward(&self, x: &Point, _cx: &mut Ctx) -> Result<Point> {
        self.act(x, false)
    }

    fn backward(&self, x: &Point, _cx: &mut Ctx) -> Result<Point> {
        self.act(x, true)
    }

    fn power(&self, k: i64) -> Option<Automorphism> {
        Some(step(self.coord, self.by * k))
    }
}

fn step(coord: Coord, by: i64) -> Automorphism {
    if by == 0 {
        return Automorphism::identity(Universe::Omega4);
    }
    Automorphism::custom(Arc::new(Step { coord, by }))
}

/// `h|Omega_n` as a map of (-1,1).
struct Restriction {
    h: Automorphism,
    n: i64,
}

impl Restriction {
    fn act(&self, x: &Point, inv: bool, cx: &mut Ctx) -> Result<Point> {
        Universe::UnitInterval.check(x)?;
        let p = Point::O4 { i: self.n, j: Star::Fin(0), m: Star::Fin(0), x: Star::Fin(x.as_q()?.clone()) };
        let y = self.h.eval(&p, inv, cx)?;
        match on_fibre(&y) {
            Some((i, v)) if i == self.n => Ok(Point::Q(v.clone())),
            _ => Err(Error::Certificate {
                claim: format!("{} preserves Omega_{}", self.h.describe(), self.n),
                witness: p.to_string(),
            }),
        }
    }
}

impl PointMap for Restriction {
    fn universe(&self) -> Universe {
        Universe::UnitInterval
    }

    fn name(&self) -> String {
        format!("{}|Omega_{}", self.h.describe(), self.n)
    }

    fn forward(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        self.act(x, false, cx)
    }

    fn backward(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        self.act(x, true, cx)
    }

    fn memoize(&self) -> bool {
        true
    }
}

/// `kbar_{m,n}` for `n` in `12Z`: `[kbar_{-m,n}, kbar_{m,n}] = h_m|Omega_n`, `kbar_{0,n} = id`.
/// Synthesized on first use and cached.
pub struct KTable {
    targets: Vec<Automorphism>,
    supplied: Option<Vec<CommutatorWitnesses>>,
    cache: Mutex<HashMap<(u64, i64), Option<(Automorphism, Automorphism)>>>,
}

impl KTable {
    fn pair(&self, m: u64, n: i64) -> Result<Option<(Automorphism, Automorphism)>> {
        if let Some(v) = self.cache.lock().get(&(m, n)) {
            return Ok(v.clone());
        }
        let out = match m.checked_sub(1).and_then(|i| self.targets.get(i as usize)) {
            None => None,
            Some(h) if h.is_identity() => None,
            Some(h) => {
                let u = Automorphism::custom(Arc::new(Restriction { h: h.clone(), n }));
                let cw = match &self.supplied {
                    Some(ws) => {
                        let cw = &ws[(m - 1) as usize];
                        CommutatorWitnesses::supplied(&u, &cw.v, &cw.w, &unit_points(50, n as u64))?
                    }
                    None => witnesses_in_interval(&u)?,
                };
                Some((cw.v, cw.w))
            }
        };
        self.cache.lock().insert((m, n), out.clone());
        Ok(out)
    }

    /// `kbar_{m,n}`; `None` is the identity.
    pub fn get(&self, m: i64, n: i64) -> Result<Option<Automorphism>> {
        if m == 0 || n.rem_euclid(12) != 0 {
            return Ok(None);
        }
        Ok(self.pair(m.unsigned_abs(), n)?.map(|(v, w)| if m < 0 { v } else { w }))
    }
}

/// `a^k`: `kbar_{m,i}^(+-k)` on `(i, j, m, (-1,1))` for `i` in `12Z`, sign by the parity of `j`,
/// `m` negated on `24Z+12`.
struct FibreA {
    table: Arc<KTable>,
    power: i64,
}

impl FibreA {
    fn act(&self, p: &Point, inv: bool, cx: &mut Ctx) -> Result<Point> {
        let (i, j, m, x) = o4_parts(p)?;
        let (Some(pos), Star::Fin(j), Star::Fin(m), Star::Fin(x)) = (class(i), j, m, x) else {
            return Ok(p.clone());
        };
        if x.abs() >= one() {
            return Ok(p.clone());
        }
        let key = if pos { *m } else { -m };
        let Some(k) = self.table.get(key, i)? else { return Ok(p.clone()) };
        let e = if j.rem_euclid(2) == 0 { self.power } else { -self.power };
        let y = power(&k, e).eval(&Point::Q(x.clone()), inv, cx)?;
        Ok(Point::O4 { i, j: Star::Fin(*j), m: Star::Fin(*m), x: Star::Fin(y.as_q()?.clone()) })
    }
}

impl PointMap for FibreA {
    fn universe(&self) -> Universe {
        Universe::Omega4
    }

    fn name(&self) -> String {
        if self.power == 1 {
            "a".into()
        } else {
            format!("a^{}", self.power)
        }
    }

    fn forward(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        self.act(x, false, cx)
    }

    fn backward(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        self.act(x, true, cx)
    }

    fn power(&self, k: i64) -> Option<Automorphism> {
        Some(Automorphism::custom(Arc::new(FibreA { table: self.table.clone(), power: self.power * k })))
    }

    fn memoize(&self) -> bool {
        true
    }
}

/// `ab`, with `(ab)^(2q+r) = b^(2q) (ab)^r`.
struct Ab {
    ab: Automorphism,
    b: Automorphism,
}

impl PointMap for Ab {
    fn universe(&self) -> Universe {
        Universe::Omega4
    }

    fn name(&self) -> String {
        "ab".into()
    }

    fn forward(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        self.ab.forward_in(x, cx)
    }

    fn backward(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        self.ab.backward_in(x, cx)
    }

    fn power(&self, k: i64) -> Option<Automorphism> {
        let (q, r) = (k.div_euclid(2), k.rem_euclid(2));
        let even = power(&self.b, 2 * q);
        Some(if r == 0 { even } else { compose(&[even, self.ab.clone()]).expect("Omega4") })
    }
}

/// A product of commuting parts with disjoint supports, powered part by part.
struct Disjoint {
    name: String,
    parts: Vec<Automorphism>,
    product: Automorphism,
}

fn disjoint(name: String, parts: Vec<Automorphism>) -> Result<Automorphism> {
    let product = compose(&parts)?;
    Ok(Automorphism::custom(Arc::new(Disjoint { name, parts, product })))
}

impl PointMap for Disjoint {
    fn universe(&self) -> Universe {
        Universe::Omega4
    }

    fn name(&self) -> String {
        self.name.clone()
    }

    fn forward(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        self.product.forward_in(x, cx)
    }

    fn backward(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        self.product.backward_in(x, cx)
    }

    fn power(&self, k: i64) -> Option<Automorphism> {
        let parts = self.parts.iter().map(|p| power(p, k)).collect();
        disjoint(format!("{}^{k}", self.name), parts).ok()
    }

    fn memoize(&self) -> bool {
        true
    }
}

pub struct TwoLetterBundle {
    pub f: Automorphism,
    pub a: Automorphism,
    pub b: Automorphism,
    pub c: Automorphism,
    pub d: Automorphism,
    pub ab: Automorphism,
    /// `ab`, `c^(f^4)`, `(b^-1)^(f^12)`, `d^(f^28)`.
    pub parts: Vec<Automorphism>,
    pub g: Automorphism,
    pub targets: Vec<Automorphism>,
    pub table: Arc<KTable>,
    pub certificates: Vec<SupportCertificate>,
}

impl TwoLetterBundle {
    pub fn assignment(&self) -> Result<Assignment> {
        Assignment::new().with("f", self.f.clone())?.with("g", self.g.clone())
    }

    /// `F -> f`, `H -> f^-48 g`.
    pub fn encoded_assignment(&self) -> Result<Assignment> {
        Assignment::new().with("F", self.f.clone())?.with("H", compose(&[power(&self.f, -48), self.g.clone()])?)
    }

    pub fn kbar(&self, m: i64, n: i64) -> Result<Option<Automorphism>> {
        self.table.get(m, n)
    }
}

fn conj_f(g: &Automorphism, k: i64) -> Result<Automorphism> {
    conjugate(g, &power(&omega_f(), k))
}

fn unit_points(n: usize, seed: u64) -> Vec<Point> {
    let mut s = Sampler::new(seed);
    let mut pts = vec![Point::Q(int(0))];
    pts.extend((1..n).map(|_| Point::Q(s.unit())));
    pts
}

/// Targets on Omega4, each certified to fix every sampled point off the fibres `Omega_12n`.
/// Witnesses, when supplied, are used on every fibre and checked there on first use.
pub fn build_bundle(targets: &[Automorphism], witnesses: Option<Vec<CommutatorWitnesses>>) -> Result<TwoLetterBundle> {
    if let Some(ws) = &witnesses {
        if ws.len() != targets.len() {
            return Err(Error::Precondition("one witness pair per target".into()));
        }
    }
    let region = fibres12();
    let pts = omega4_points(200, 0x0b5e);
    let mut certificates = Vec::new();
    for h in targets {
        if h.universe() != &Universe::Omega4 {
            return Err(Error::UniverseMismatch(format!("targets live on Omega4, got {}", h.universe())));
        }
        certificates.push(certify_support(h, &region, &pts, "fixes Omega off the 12Z fibres")?);
    }
    let table = Arc::new(KTable { targets: targets.to_vec(), supplied: witnesses, cache: Mutex::new(HashMap::new()) });
    let a = if targets.iter().all(|h| h.is_identity()) {
        Automorphism::identity(Universe::Omega4)
    } else {
        Automorphism::custom(Arc::new(FibreA { table: table.clone(), power: 1 }))
    };
    let (b, c, d) = (step(Coord::J, 1), step(Coord::M, 1), step(Coord::X, 1));
    let ab = Automorphism::custom(Arc::new(Ab { ab: compose(&[a.clone(), b.clone()])?, b: b.clone() }));
    let parts = vec![ab.clone(), conj_f(&c, 4)?, conj_f(&inverse(&b), 12)?, conj_f(&d, 28)?];
    let g = disjoint("g".into(), parts.clone())?;
    Ok(TwoLetterBundle { f: omega_f(), a, b, c, d, ab, parts, g, targets: targets.to_vec(), table, certificates })
}

/// Seeded Omega4 points: first coordinates near the multiples of 12, small or infinite
/// `j`, `m`, and `x` inside, on the edge of, and outside (-1,1).
pub fn omega4_points(n: usize, seed: u64) -> Vec<Point> {
    let mut s = Sampler::new(seed);
    let small = |s: &mut Sampler| match s.pick(10) {
        0 => Star::Inf,
        1..=4 => Star::Fin(0),
        v => Star::Fin(v as i64 - 7),
    };
    (0..n)
        .map(|_| {
            let i = match s.pick(3) {
                0 => 12 * (s.pick(7) as i64 - 3),
                _ => s.pick(73) as i64 - 36,
            };
            let (j, m) = (small(&mut s), small(&mut s));
            let x = match s.pick(8) {
                0 => Star::Inf,
                1 => Star::Fin(if s.pick(2) == 0 { one() } else { -one() }),
                2..=4 => Star::Fin(s.unit()),
                _ => Star::Fin(s.rational(-5, 5)),
            };
            Point::O4 { i, j, m, x }
        })
        .collect()
}

/// Points of the fibres `Omega_n`, `n` in `12Z`.
pub fn fibre_points(n: usize, seed: u64) -> Vec<Point> {
    let mut s = Sampler::new(seed);
    (0..n)
        .map(|_| Point::O4 { i: 12 * (s.pick(7) as i64 - 3), j: Star::Fin(0), m: Star::Fin(0), x: Star::Fin(s.unit()) })
        .collect()
}

/// The bundle identities at `samples` seeded points each.
pub fn verify_identities(bundle: &TwoLetterBundle, samples: usize, seed: u64) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(seed, samples);
    let mut pts = omega4_points(samples, seed);
    pts.truncate(samples.saturating_sub(samples / 4));
    pts.extend(fibre_points(samples - pts.len(), seed ^ 0xf1b));
    let (b, c, d, g) = (&bundle.b, &bundle.c, &bundle.d, &bundle.g);
    let square = |x: &Automorphism| compose(&[x.clone(), x.clone()]);
    report.compare("(ab)^2 = b^2", &square(&bundle.ab)?, &square(b)?, &pts);
    let g2 = square(g)?;
    let relator = compose(&[conj_f(&g2, 48)?, g2])?;
    report.fixes("(g^2)^(f^48) g^2 = 1", &relator, &pts);
    for (l, x) in [("b", b), ("c", c), ("d", d)] {
        report.compare(&format!("{l}^(f^48) = {l}^-1"), &conj_f(x, 48)?, &inverse(x), &pts);
    }
    report.compare("bc = cb", &compose(&[b.clone(), c.clone()])?, &compose(&[c.clone(), b.clone()])?, &pts);
    for p in &pts {
        let mut moved = 0;
        for part in &bundle.parts {
            if &part.forward(p)? != p {
                moved += 1;
            }
        }
        report.note("disjoint supports", p, format!("{moved} parts move"), moved <= 1);
    }
    Ok(report)
}

/// `[a^(c^m d), a^(c^-m)]`
pub fn fibre_commutator(bundle: &TwoLetterBundle, m: i64) -> Result<Automorphism> {
    let left = conjugate(&bundle.a, &compose(&[power(&bundle.c, m), bundle.d.clone()])?)?;
    let right = conjugate(&bundle.a, &power(&bundle.c, -m))?;
    commutator(&left, &right)
}

/// `w_m`, `[a^(c^m d), a^(c^-m)]` and `h_m` agree on fibre samples; the first two fix the rest.
pub fn verify_main(bundle: &TwoLetterBundle, m: u64, samples: usize, seed: u64) -> Result<VerificationReport> {
    if m == 0 {
        return Err(Error::Precondition("w_m needs m >= 1".into()));
    }
    let mut report = VerificationReport::new(seed, samples);
    let w = evaluate(&words_w2(m), &bundle.assignment()?)?;
    let v = fibre_commutator(bundle, m as i64)?;
    let h = bundle.targets.get(m as usize - 1).cloned().unwrap_or_else(|| Automorphism::identity(Universe::Omega4));
    let on = fibre_points(samples, seed);
    report.compare(&format!("w{m} = h{m} on the fibres"), &w, &h, &on);
    report.compare(&format!("[a^(c^{m} d), a^(c^-{m})] = h{m} on the fibres"), &v, &h, &on);
    let region = fibres12();
    let off: Vec<Point> = omega4_points(samples * 2, seed ^ 0x0ff).into_iter().filter(|p| !region.contains(p)).take(samples).collect();
    report.fixes(&format!("w{m} off the fibres"), &w, &off);
    report.fixes(&format!("[a^(c^{m} d), a^(c^-{m})] off the fibres"), &v, &off);
    Ok(report)
}

/// The word for the `n`-th target over `{f, g}`, before encoding.
pub fn word_2letter_fg(n: u64) -> Word {
    words_t_m(n, M, &|k| words_w2(k))
}

/// The positive word over `{F, H}` for the `n`-th target.
pub fn word_2letter(code: &TwoLetterCode, n: u64) -> Word {
    code.encode(&word_2letter_fg(n))
}

pub struct TwoLetterResult {
    pub reduction: Reduction,
    pub bundle: TwoLetterBundle,
    pub code: TwoLetterCode,
    pub words: Vec<Word>,
    /// `F`, `H` on Q before the taming conjugation.
    pub tamed_assignment: Assignment,
    /// `F`, `H` on Q; the words evaluate to the original targets.
    pub assignment: Assignment,
}

/// The whole chain for targets on Q: reduction with windows of size 48, transport of each
/// `z_k` onto the fibres `Omega_12n`, the bundle, and the encoded words.
pub fn main_pipeline(gs: &[Automorphism], cert_samples: &[Rational]) -> Result<TwoLetterResult> {
    let reduction = reduce(gs, M as i64, cert_samples)?;
    let rho = omega_rho();
    let targets = reduction
        .z
        .iter()
        .map(|z| Automorphism::transport(&rho, z))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.at_stage("transport"))?;
    let bundle = build_bundle(&targets, None).map_err(|e| e.at_stage("bundle"))?;
    let back = rho_inverse();
    let mut tamed_assignment = Assignment::new();
    let mut assignment = Assignment::new();
    for (l, x) in bundle.encoded_assignment()?.letters() {
        let on_q = Automorphism::transport(&back, x)?;
        assignment.insert(l, reduction.taming.untame(&on_q)?)?;
        tamed_assignment.insert(l, on_q)?;
    }
    let code = TwoLetterCode::default();
    let words = (1..=gs.len() as u64).map(|n| word_2letter(&code, n)).collect();
    Ok(TwoLetterResult { reduction, bundle, code, words, tamed_assignment, assignment })
}

impl TwoLetterResult {
    /// Values of the encoded `f^-1` and `g^-1` blocks. They equal the inverses of `F` and of
    /// `F^48 H` by the relator; [`Self::verify_blocks`] checks this at samples.
    pub fn known_blocks(&self, asg: &Assignment) -> Result<Vec<(Word, Automorphism)>> {
        let f = asg.get("F").ok_or_else(|| Error::Unassigned("F".into()))?;
        let g = evaluate(&self.code.g, asg)?;
        Ok(vec![(self.code.f_inv.clone(), inverse(f)), (self.code.g_inv.clone(), inverse(&g))])
    }

    /// `n`-th word under the final assignment.
    pub fn evaluate_word(&self, n: usize) -> Result<Automorphism> {
        let w = self.words.get(n).ok_or_else(|| Error::Precondition(format!("no word {}", n + 1)))?;
        evaluate_with(w, &self.assignment, &self.known_blocks(&self.assignment)?)
    }

    /// Literal evaluation of the `f^-1` and `g^-1` blocks against the inverses.
    pub fn verify_blocks(&self, pts: &[Rational], seed: u64) -> Result<VerificationReport> {
        let mut report = VerificationReport::new(seed, pts.len());
        let pts: Vec<Point> = pts.iter().cloned().map(Point::Q).collect();
        for (w, g) in self.known_blocks(&self.assignment)? {
            report.compare(&format!("{w} = inverse"), &evaluate(&w, &self.assignment)?, &g, &pts);
        }
        Ok(report)
    }

    /// Each word against its target at the given points of Q.
    pub fn verify(&self, pts: &[Rational], seed: u64) -> Result<VerificationReport> {
        let mut report = self.verify_blocks(pts, seed)?;
        let qs: Vec<Point> = pts.iter().cloned().map(Point::Q).collect();
        for n in 0..self.words.len() {
            let w = self.evaluate_word(n)?;
            report.compare(&format!("word {}", n + 1), &w, &self.reduction.taming.targets[n], &qs);
        }
        Ok(report)
    }
}

/// The encoded words for `n = 1..=n_max` with their statistics.
pub fn emit_explicit_sequence(n_max: u64) -> Vec<(Word, WordStats)> {
    let code = TwoLetterCode::default();
    (1..=n_max)
        .map(|n| {
            let w = word_2letter(&code, n);
            let stats = w.stats();
            (w, stats)
        })
        .collect()
}
