//! Eight letters `a, b, c, f` (and inverses): fibre maps on Omega3, one copy per
//! block `(4i-1, 4i+3)` of Q, glued into automorphisms of Q.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::Signed;
use parking_lot::Mutex;

use crate::engine::{power, Automorphism, Ctx, PointMap};
use crate::error::{Error, Result};
use crate::iso::{phi_blocks8, OrderIso};
use crate::order::point::Star;
use crate::order::rational::{floor_int, int, one, Rational};
use crate::order::{Point, Universe};
use crate::reduction::{reduce, Reduction};
use crate::report::VerificationReport;
use crate::sampling::Sampler;
use crate::synth::{witnesses_in_interval, CommutatorWitnesses};
use crate::word::{evaluate, words_t, words_w8, Assignment, Word};

/// Commutator witnesses `(h_{2k-1}, h_{2k})` on (-1,1) for the `k`-th target; `None` means identity.
pub trait WitnessSource: Send + Sync {
    fn witness(&self, k: u64) -> Result<Option<(Automorphism, Automorphism)>>;
}

struct Fixed(Vec<CommutatorWitnesses>);

impl WitnessSource for Fixed {
    fn witness(&self, k: u64) -> Result<Option<(Automorphism, Automorphism)>> {
        Ok(k.checked_sub(1)
            .and_then(|i| self.0.get(i as usize))
            .filter(|cw| !cw.target.is_identity())
            .map(|cw| (cw.v.clone(), cw.w.clone())))
    }
}

/// `h_{2k-1}` on fibre `(2k-1, 0, .)`, `h_{2k}` on fibre `(-2k, 0, .)`, identity elsewhere.
struct FibreA {
    src: Arc<dyn WitnessSource>,
}

impl FibreA {
    fn act(&self, p: &Point, inv: bool, cx: &mut Ctx) -> Result<Point> {
        let (i, x) = match p {
            Point::O3 { i, j: Star::Fin(0), x: Star::Fin(x) } if *i != 0 && x.abs() < one() => (*i, x),
            Point::O3 { .. } => return Ok(p.clone()),
            other => return Err(Error::UniverseMismatch(format!("{other} is not in Omega3"))),
        };
        let (k, first) = if i > 0 && i % 2 == 1 {
            ((i as u64 + 1) / 2, true)
        } else if i < 0 && i % 2 == 0 {
            (i.unsigned_abs() / 2, false)
        } else {
            return Ok(p.clone());
        };
        let Some((v, w)) = self.src.witness(k)? else { return Ok(p.clone()) };
        let h = if first { v } else { w };
        let y = h.eval(&Point::Q(x.clone()), inv, cx)?;
        Ok(Point::O3 { i, j: Star::Fin(0), x: Star::Fin(y.as_q()?.clone()) })
    }
}

impl PointMap for FibreA {
    fn universe(&self) -> Universe {
        Universe::Omega3
    }

    fn name(&self) -> String {
        "a".into()
    }

    fn forward(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        self.act(x, false, cx)
    }

    fn backward(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        self.act(x, true, cx)
    }
}

/// `(i, j, x) -> (i + k, j, x)`
struct ShiftB(i64);

impl PointMap for ShiftB {
    fn universe(&self) -> Universe {
        Universe::Omega3
    }

    fn name(&self) -> String {
        if self.0 == 1 {
            "b".into()
        } else {
            format!("b^{}", self.0)
        }
    }

    fn forward(&self, x: &Point, _cx: &mut Ctx) -> Result<Point> {
        Universe::Omega3.check(x)?;
        Ok(x.shift_first(self.0))
    }

    fn backward(&self, x: &Point, _cx: &mut Ctx) -> Result<Point> {
        Universe::Omega3.check(x)?;
        Ok(x.shift_first(-self.0))
    }

    fn power(&self, k: i64) -> Option<Automorphism> {
        Some(Automorphism::custom(Arc::new(ShiftB(self.0 * k))))
    }

    fn block_shift(&self) -> Option<i64> {
        Some(self.0)
    }
}

/// `(i, j, x) -> (i, j + k, x)` off the slab `i = 0`.
struct StepC(i64);

impl StepC {
    fn act(&self, p: &Point, by: i64) -> Result<Point> {
        match p {
            Point::O3 { i, j, x } if *i != 0 => Ok(Point::O3 { i: *i, j: j.shift(by), x: x.clone() }),
            Point::O3 { .. } => Ok(p.clone()),
            other => Err(Error::UniverseMismatch(format!("{other} is not in Omega3"))),
        }
    }
}

impl PointMap for StepC {
    fn universe(&self) -> Universe {
        Universe::Omega3
    }

    fn name(&self) -> String {
        if self.0 == 1 {
            "c".into()
        } else {
            format!("c^{}", self.0)
        }
    }

    fn forward(&self, x: &Point, _cx: &mut Ctx) -> Result<Point> {
        self.act(x, self.0)
    }

    fn backward(&self, x: &Point, _cx: &mut Ctx) -> Result<Point> {
        self.act(x, -self.0)
    }

    fn power(&self, k: i64) -> Option<Automorphism> {
        Some(Automorphism::custom(Arc::new(StepC(self.0 * k))))
    }
}

pub fn fibre_a(src: Arc<dyn WitnessSource>) -> Automorphism {
    Automorphism::custom(Arc::new(FibreA { src }))
}

pub fn shift_b() -> Automorphism {
    Automorphism::custom(Arc::new(ShiftB(1)))
}

pub fn step_c() -> Automorphism {
    Automorphism::custom(Arc::new(StepC(1)))
}

pub struct EightLetterBundle {
    pub a: Automorphism,
    pub b: Automorphism,
    pub c: Automorphism,
    pub targets: Vec<Automorphism>,
    pub witnesses: Vec<CommutatorWitnesses>,
}

impl EightLetterBundle {
    pub fn assignment(&self) -> Result<Assignment> {
        Assignment::new().with("a", self.a.clone())?.with("b", self.b.clone())?.with("c", self.c.clone())
    }
}

fn unit_points(n: usize, seed: u64) -> Vec<Point> {
    let mut s = Sampler::new(seed);
    let mut pts: Vec<Point> = vec![Point::Q(int(0))];
    pts.extend((1..n).map(|_| Point::Q(s.unit())));
    pts
}

/// Targets on (-1,1); witnesses are synthesized when not supplied and checked when they are.
pub fn build_abc(targets: &[Automorphism], witnesses: Option<Vec<CommutatorWitnesses>>) -> Result<EightLetterBundle> {
    for t in targets {
        if t.universe() != &Universe::UnitInterval {
            return Err(Error::UniverseMismatch(format!("targets live on (-1,1), got {}", t.universe())));
        }
    }
    let witnesses = match witnesses {
        Some(ws) => {
            if ws.len() != targets.len() {
                return Err(Error::Precondition("one witness pair per target".into()));
            }
            let pts = unit_points(100, 0);
            for (cw, t) in ws.iter().zip(targets) {
                CommutatorWitnesses::supplied(t, &cw.v, &cw.w, &pts)?;
            }
            ws
        }
        None => targets.iter().map(witnesses_in_interval).collect::<Result<_>>()?,
    };
    let a = if targets.iter().all(|t| t.is_identity()) {
        Automorphism::identity(Universe::Omega3)
    } else {
        fibre_a(Arc::new(Fixed(witnesses.clone())))
    };
    Ok(EightLetterBundle { a, b: shift_b(), c: step_c(), targets: targets.to_vec(), witnesses })
}

/// Points of Omega3 off the fibre `{0} x {0} x (-1,1)`.
pub fn off_fibre_points(n: usize, seed: u64) -> Vec<Point> {
    let mut s = Sampler::new(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let i = s.pick(13) as i64 - 6;
        let j = match s.pick(9) {
            8 => Star::Inf,
            v => Star::Fin(v as i64 - 4),
        };
        let x = match s.pick(8) {
            0 => Star::Inf,
            1 => Star::Fin(if s.pick(2) == 0 { one() } else { -one() }),
            2 => Star::Fin(s.unit()),
            _ => Star::Fin(s.rational(-5, 5)),
        };
        let p = Point::O3 { i, j, x };
        if !on_fibre(&p) {
            out.push(p);
        }
    }
    out
}

fn on_fibre(p: &Point) -> bool {
    matches!(p, Point::O3 { i: 0, j: Star::Fin(0), x: Star::Fin(x) } if x.abs() < one())
}

/// `w_n` under the bundle equals `g_n` on the fibre and fixes everything else.
pub fn verify_thm8(bundle: &EightLetterBundle, n: u64, samples: usize, seed: u64) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(seed, samples);
    let g = bundle
        .targets
        .get((n as usize).wrapping_sub(1))
        .ok_or_else(|| Error::Precondition(format!("no target {n}")))?;
    let w = evaluate(&words_w8(n), &bundle.assignment()?)?;
    for p in unit_points(samples, seed) {
        let lhs = w.forward(&Point::O3 { i: 0, j: Star::Fin(0), x: Star::Fin(p.as_q()?.clone()) });
        let rhs = g.forward(&p).and_then(|y| Ok(Point::O3 { i: 0, j: Star::Fin(0), x: Star::Fin(y.as_q()?.clone()) }));
        report.record(&format!("w{n} on fibre"), &p, lhs, rhs);
    }
    report.fixes(&format!("w{n} off fibre"), &w, &off_fibre_points(samples, seed ^ 0x5eed));
    Ok(report)
}

/// `z_k` seen on block `i` as a map of (-1,1): `x -> (x + 4i + 1)z - 4i - 1`.
struct BlockTarget {
    z: Automorphism,
    centre: Rational,
}

impl BlockTarget {
    fn act(&self, x: &Point, inv: bool, cx: &mut Ctx) -> Result<Point> {
        Universe::UnitInterval.check(x)?;
        let y = self.z.eval(&Point::Q(x.as_q()? + &self.centre), inv, cx)?;
        Ok(Point::Q(y.as_q()? - &self.centre))
    }
}

impl PointMap for BlockTarget {
    fn universe(&self) -> Universe {
        Universe::UnitInterval
    }

    fn name(&self) -> String {
        format!("{}|block", self.z.describe())
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

/// Witnesses for the restrictions of `z_k` to one block, synthesized on first use.
struct BlockSource {
    z: Arc<Vec<Automorphism>>,
    block: i64,
    cache: Mutex<HashMap<u64, Option<(Automorphism, Automorphism)>>>,
}

impl WitnessSource for BlockSource {
    fn witness(&self, k: u64) -> Result<Option<(Automorphism, Automorphism)>> {
        if let Some(v) = self.cache.lock().get(&k) {
            return Ok(v.clone());
        }
        let out = match k.checked_sub(1).and_then(|i| self.z.get(i as usize)) {
            None => None,
            Some(z) if z.is_identity() => None,
            Some(z) => {
                let u = Automorphism::custom(Arc::new(BlockTarget { z: z.clone(), centre: int(4 * self.block + 1) }));
                let cw = witnesses_in_interval(&u)?;
                Some((cw.v, cw.w))
            }
        };
        self.cache.lock().insert(k, out.clone());
        Ok(out)
    }
}

enum Inner {
    Uniform(Automorphism),
    PerBlock { z: Arc<Vec<Automorphism>>, cache: Mutex<HashMap<i64, Automorphism>> },
}

/// An automorphism of Q acting on each block `(4i-1, 4i+3)` through `phi_blocks8`;
/// the points `4i+3` are fixed.
struct Blockwise {
    name: String,
    inner: Inner,
    phi: OrderIso,
}

impl Blockwise {
    fn inner_for(&self, block: i64) -> Automorphism {
        match &self.inner {
            Inner::Uniform(g) => g.clone(),
            Inner::PerBlock { z, cache } => cache
                .lock()
                .entry(block)
                .or_insert_with(|| {
                    fibre_a(Arc::new(BlockSource { z: z.clone(), block, cache: Mutex::new(HashMap::new()) }))
                })
                .clone(),
        }
    }

    fn act(&self, x: &Point, inv: bool, cx: &mut Ctx) -> Result<Point> {
        let x = x.as_q()?;
        let block: i64 = (&floor_int(&((x + int(1)) / int(4))))
            .try_into()
            .map_err(|_| Error::Domain("block index overflows".into()))?;
        let base = int(4 * block);
        let local = x - &base;
        if local == int(-1) {
            return Ok(Point::Q(x.clone()));
        }
        let y = self.phi.forward(&Point::Q(local), cx)?;
        let z = self.inner_for(block).eval(&y, inv, cx)?;
        let back = self.phi.backward(&z, cx)?;
        Ok(Point::Q(back.as_q()? + base))
    }
}

impl PointMap for Blockwise {
    fn universe(&self) -> Universe {
        Universe::QLine
    }

    fn name(&self) -> String {
        self.name.clone()
    }

    fn forward(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        self.act(x, false, cx)
    }

    fn backward(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        self.act(x, true, cx)
    }

    fn power(&self, k: i64) -> Option<Automorphism> {
        match &self.inner {
            Inner::Uniform(g) => Some(Automorphism::custom(Arc::new(Blockwise {
                name: format!("{}^{k}", self.name),
                inner: Inner::Uniform(power(g, k)),
                phi: self.phi.clone(),
            }))),
            Inner::PerBlock { .. } => None,
        }
    }

    fn memoize(&self) -> bool {
        true
    }
}

/// `a`, `b`, `c` on Q: every block carries its own copy of the Omega3 maps.
pub fn blockwise_letters(z: Arc<Vec<Automorphism>>) -> (Automorphism, Automorphism, Automorphism) {
    let phi = phi_blocks8(0);
    let a = if z.iter().all(|g| g.is_identity()) {
        Automorphism::identity(Universe::QLine)
    } else {
        Automorphism::custom(Arc::new(Blockwise {
            name: "a".into(),
            inner: Inner::PerBlock { z, cache: Mutex::new(HashMap::new()) },
            phi: phi.clone(),
        }))
    };
    let uniform = |name: &str, g: Automorphism| {
        Automorphism::custom(Arc::new(Blockwise { name: name.into(), inner: Inner::Uniform(g), phi: phi.clone() }))
    };
    (a, uniform("b", shift_b()), uniform("c", step_c()))
}

pub struct EightLetterResult {
    pub reduction: Reduction,
    /// `t_n` over `{a, b, c, f}` for each target.
    pub words: Vec<Word>,
    /// Letters before the final conjugation; `t_n` evaluates to the tamed targets.
    pub tamed_assignment: Assignment,
    /// Letters after conjugation by the taming map; `t_n` evaluates to `g_n`.
    pub assignment: Assignment,
}

/// The 8-letter word `t_n`.
pub fn word_8letter(n: u64) -> Word {
    words_t(n, &|k| words_w8(k))
}

pub fn assemble_8letter(gs: &[Automorphism], cert_samples: &[Rational]) -> Result<EightLetterResult> {
    let reduction = reduce(gs, 4, cert_samples)?;
    let z = Arc::new(reduction.z.clone());
    let (a, b, c) = blockwise_letters(z);
    let f = Automorphism::translation(int(1));
    let tamed_assignment = Assignment::new().with("a", a)?.with("b", b)?.with("c", c)?.with("f", f)?;
    let mut assignment = Assignment::new();
    for (l, g) in tamed_assignment.letters() {
        assignment.insert(l, reduction.taming.untame(g)?)?;
    }
    let words = (1..=gs.len() as u64).map(word_8letter).collect();
    Ok(EightLetterResult { reduction, words, tamed_assignment, assignment })
}

impl EightLetterResult {
    /// `t_n` against `g_n` at the given points of Q.
    pub fn verify(&self, pts: &[Rational], seed: u64) -> Result<VerificationReport> {
        let mut report = VerificationReport::new(seed, pts.len());
        let pts: Vec<Point> = pts.iter().cloned().map(Point::Q).collect();
        for (n, w) in self.words.iter().enumerate() {
            let lhs = evaluate(w, &self.assignment)?;
            report.compare(&format!("t{}", n + 1), &lhs, &self.reduction.taming.targets[n], &pts);
        }
        Ok(report)
    }
}
