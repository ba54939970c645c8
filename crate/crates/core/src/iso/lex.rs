//! Closed-form isos from rational intervals onto lexicographic sums.
//!
//! Everything is assembled from three pieces:
//! - `QStar`: a half-open interval `(lo, hi]` onto `Q* = Q + {inf}`, sending `hi` to `inf`.
//! - `ZSeq`: an increasing Z-indexed cut sequence splitting an open interval.
//! - `TMap`: `(alpha, beta]` onto `Z* x Q*`, i.e. a Z-sum of `QStar`s plus a top `QStar`.
//!
//! Irrational cuts are quadratic surds `a + w*sqrt(2)`, approached by rationals of
//! polynomially growing denominator so that deep indices stay cheap.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use super::{IsoMap, OrderIso};
use crate::engine::Ctx;
use crate::error::{Error, Result};
use crate::order::rational::{ceil_int, floor_int, int, is_integer, rat, Rational};
use crate::order::{Point, Star, Universe};

/// The irrational `a + w*sqrt(2)`, `w > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurdCut {
    pub a: Rational,
    pub w: Rational,
}

/// floor(x + y*sqrt(2)) for y > 0.
fn floor_surd(x: &Rational, y: &Rational) -> BigInt {
    let s = y * y * int(2);
    let le = |n: &BigInt| {
        let d = Rational::from_integer(n.clone()) - x;
        !d.is_positive() || d.clone() * d < s
    };
    let mut n = floor_int(x) + floor_int(&s).sqrt();
    while !le(&n) {
        n -= 1;
    }
    while le(&(&n + 1)) {
        n += 1;
    }
    n
}

impl SurdCut {
    pub fn new(a: Rational, w: Rational) -> SurdCut {
        assert!(w.is_positive(), "surd weight must be positive");
        SurdCut { a, w }
    }

    /// Ordering of `u` relative to the cut; never `Equal`.
    pub fn cmp_rat(&self, u: &Rational) -> Ordering {
        let d = u - &self.a;
        if !d.is_positive() {
            return Ordering::Less;
        }
        if d.clone() * d < self.w.clone() * &self.w * int(2) {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    fn den(k: u64) -> Rational {
        Rational::from_integer(BigInt::from(4u64) * (k + 1) * (k + 2))
    }

    /// Strictly increasing in `k`, below the cut, converging to it.
    pub fn lower(&self, k: u64) -> Rational {
        let d = Self::den(k);
        let x = (&self.a - Rational::one() / int(k as i64 + 1)) * &d;
        Rational::from_integer(floor_surd(&x, &(&self.w * &d))) / d
    }

    /// Strictly decreasing in `k`, above the cut, converging to it.
    pub fn upper(&self, k: u64) -> Rational {
        let d = Self::den(k);
        let x = (&self.a + Rational::one() / int(k as i64 + 1)) * &d;
        Rational::from_integer(floor_surd(&x, &(&self.w * &d)) + 1) / d
    }
}

#[derive(Clone, Debug)]
pub enum Cut {
    Rat(Rational),
    Surd(SurdCut),
}

impl Cut {
    /// Ordering of `u` relative to the cut.
    fn cmp_rat(&self, u: &Rational) -> Ordering {
        match self {
            Cut::Rat(r) => u.cmp(r),
            Cut::Surd(s) => s.cmp_rat(u),
        }
    }
}

/// Smallest `k >= start` with `pred(k)`, for monotone `pred` that is eventually true.
fn first_true(start: u64, pred: impl Fn(u64) -> bool) -> Result<u64> {
    if pred(start) {
        return Ok(start);
    }
    let mut lo = start;
    let mut step = 1u64;
    let hi = loop {
        let probe = start.checked_add(step).filter(|p| *p < (1u64 << 62)).ok_or_else(|| {
            Error::Domain("cut index overflows".into())
        })?;
        if pred(probe) {
            break probe;
        }
        lo = probe;
        step *= 2;
    };
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn to_i64(v: &BigInt) -> Result<i64> {
    v.to_i64().ok_or_else(|| Error::Domain("cut index overflows i64".into()))
}

/// Cuts `c_m`, m in Z, strictly increasing from `left` to `right`; piece `m` is `(c_{m-1}, c_m]`.
#[derive(Clone, Debug)]
pub struct ZSeq {
    left: Cut,
    right: Cut,
    cm1: Rational,
    c0: Rational,
    roff: u64,
    loff: u64,
}

impl ZSeq {
    pub fn new(left: Cut, right: Cut, cm1: Rational, c0: Rational) -> ZSeq {
        debug_assert!(left.cmp_rat(&cm1) == Ordering::Greater && cm1 < c0 && right.cmp_rat(&c0) == Ordering::Less);
        let roff = match &right {
            Cut::Surd(s) => first_true(0, |k| s.lower(k + 1) > c0).expect("cut converges"),
            Cut::Rat(_) => 0,
        };
        let loff = match &left {
            Cut::Surd(s) => first_true(0, |k| s.upper(k + 1) < cm1).expect("cut converges"),
            Cut::Rat(_) => 0,
        };
        ZSeq { left, right, cm1, c0, roff, loff }
    }

    pub fn cut(&self, m: i64) -> Rational {
        match m {
            0 => self.c0.clone(),
            -1 => self.cm1.clone(),
            m if m > 0 => match &self.right {
                Cut::Rat(b) => b - (b - &self.c0) / int(m + 1),
                Cut::Surd(s) => s.lower(self.roff + m as u64),
            },
            m => {
                let t = (-1 - m) as u64;
                match &self.left {
                    Cut::Rat(a) => a + (&self.cm1 - a) / int(t as i64 + 1),
                    Cut::Surd(s) => s.upper(self.loff + t),
                }
            }
        }
    }

    /// Index of the piece containing `u`; `u` must lie strictly between the ends.
    pub fn locate(&self, u: &Rational) -> Result<i64> {
        if u > &self.c0 {
            match &self.right {
                Cut::Rat(b) => {
                    let m = ceil_int(&((b - &self.c0) / (b - u))) - 1;
                    Ok(to_i64(&m)?.max(1))
                }
                Cut::Surd(_) => Ok(first_true(1, |m| &self.cut(m as i64) >= u)? as i64),
            }
        } else if u > &self.cm1 {
            Ok(0)
        } else {
            match &self.left {
                Cut::Rat(a) => {
                    let t = floor_int(&((&self.cm1 - a) / (u - a))) - 1;
                    Ok(-1 - to_i64(&t)?)
                }
                Cut::Surd(_) => {
                    let t = first_true(1, |t| &self.cut(-1 - t as i64) < u)?;
                    Ok(-(t as i64))
                }
            }
        }
    }

    fn inside(&self, u: &Rational) -> bool {
        self.left.cmp_rat(u) == Ordering::Greater && self.right.cmp_rat(u) == Ordering::Less
    }
}

/// `(lo, hi]` onto `Q*`: `hi -> inf`, `[c - rho, c + rho] -> u - c`, Moebius tails elsewhere.
#[derive(Clone, Debug)]
pub struct QStar {
    lo: Cut,
    hi: Rational,
    c: Rational,
    rho: Rational,
    /// For a surd `lo`: offset so that `e_t = upper(toff + t)` for `t >= 1`.
    toff: u64,
}

impl QStar {
    /// `window = Some(c)` fixes the identity strip `[c-1, c+1]`, which must sit inside `(lo, hi)`.
    pub fn new(lo: Cut, hi: Rational, window: Option<Rational>) -> QStar {
        let (c, rho) = match (window, &lo) {
            (Some(c), _) => (c, int(1)),
            (None, Cut::Rat(a)) => ((a + &hi) / int(2), int(0)),
            (None, Cut::Surd(s)) => {
                let k = first_true(0, |k| s.upper(k) < hi).expect("cut converges");
                ((s.upper(k) + &hi) / int(2), int(0))
            }
        };
        let e0 = &c - &rho;
        let toff = match &lo {
            Cut::Surd(s) => first_true(0, |k| s.upper(k + 1) < e0).expect("cut converges"),
            Cut::Rat(_) => 0,
        };
        QStar { lo, hi, c, rho, toff }
    }

    fn e(&self, t: u64, s: &SurdCut) -> Rational {
        if t == 0 {
            &self.c - &self.rho
        } else {
            s.upper(self.toff + t)
        }
    }

    pub fn forward(&self, u: &Rational) -> Result<Star<Rational>> {
        if u == &self.hi {
            return Ok(Star::Inf);
        }
        let d = u - &self.c;
        if d.abs() <= self.rho {
            return Ok(Star::Fin(d));
        }
        if d > self.rho {
            return Ok(Star::Fin(&self.rho + (&d - &self.rho) / (&self.hi - u)));
        }
        match &self.lo {
            Cut::Rat(a) => Ok(Star::Fin(-&self.rho - (&self.c - &self.rho - u) / (u - a))),
            Cut::Surd(s) => {
                let t = first_true(1, |t| &self.e(t, s) < u)?;
                let (hi, lo) = (self.e(t - 1, s), self.e(t, s));
                Ok(Star::Fin(-&self.rho - int(t as i64 - 1) - (&hi - u) / (hi - lo)))
            }
        }
    }

    pub fn backward(&self, y: &Star<Rational>) -> Result<Rational> {
        let y = match y {
            Star::Inf => return Ok(self.hi.clone()),
            Star::Fin(y) => y,
        };
        if y.abs() <= self.rho {
            return Ok(&self.c + y);
        }
        let one = Rational::one();
        if y > &self.rho {
            let z = y - &self.rho;
            return Ok((&self.c + &self.rho + &z * &self.hi) / (one + z));
        }
        let z = -y - &self.rho;
        match &self.lo {
            Cut::Rat(a) => Ok((&self.c - &self.rho + &z * a) / (one + z)),
            Cut::Surd(s) => {
                let t = floor_int(&z);
                let tu = t.to_u64().ok_or_else(|| Error::Domain("cut index overflows".into()))?;
                let (hi, lo) = (self.e(tu, s), self.e(tu + 1, s));
                Ok(&hi - (z - Rational::from_integer(t)) * (&hi - lo))
            }
        }
    }
}

/// `(alpha, beta]` onto `Z* x Q*`: finite first coordinate below the surd `gamma`, `inf` above.
#[derive(Clone, Debug)]
pub struct TMap {
    zs: ZSeq,
    gamma: SurdCut,
    beta: Rational,
    window: Option<Rational>,
    top: QStar,
}

impl TMap {
    pub fn new(alpha: Cut, beta: Rational, gamma: SurdCut, cm1: Rational, c0: Rational, window: Option<Rational>) -> TMap {
        let top = QStar::new(Cut::Surd(gamma.clone()), beta.clone(), None);
        let zs = ZSeq::new(alpha, Cut::Surd(gamma.clone()), cm1, c0);
        TMap { zs, gamma, beta, window, top }
    }

    /// Generic shape on a rational interval.
    pub fn plain(alpha: Rational, beta: Rational) -> TMap {
        let l = &beta - &alpha;
        let gamma = SurdCut::new(&alpha + &l / int(2), &l / int(8));
        let cm1 = &alpha + &l / int(4);
        let c0 = &alpha + &l / int(2);
        TMap::new(Cut::Rat(alpha), beta, gamma, cm1, c0, None)
    }

    fn piece(&self, m: i64) -> QStar {
        let w = if m == 0 { self.window.clone() } else { None };
        QStar::new(Cut::Rat(self.zs.cut(m - 1)), self.zs.cut(m), w)
    }

    pub fn forward(&self, u: &Rational) -> Result<(Star<i64>, Star<Rational>)> {
        if u == &self.beta {
            return Ok((Star::Inf, Star::Inf));
        }
        if self.gamma.cmp_rat(u) == Ordering::Greater {
            return Ok((Star::Inf, self.top.forward(u)?));
        }
        let m = self.zs.locate(u)?;
        Ok((Star::Fin(m), self.piece(m).forward(u)?))
    }

    pub fn backward(&self, j: &Star<i64>, x: &Star<Rational>) -> Result<Rational> {
        match j {
            Star::Inf => self.top.backward(x),
            Star::Fin(m) => self.piece(*m).backward(x),
        }
    }
}

/// Generic `TMap`s on the pieces of a `ZSeq`, built once per index.
#[derive(Default)]
struct PlainCache(Mutex<HashMap<i64, Arc<TMap>>>);

impl PlainCache {
    fn get(&self, zs: &ZSeq, j: i64) -> Arc<TMap> {
        if let Some(t) = self.0.lock().get(&j) {
            return t.clone();
        }
        let t = Arc::new(TMap::plain(zs.cut(j - 1), zs.cut(j)));
        self.0.lock().insert(j, t.clone());
        t
    }
}

/// The slab `(-2, 2]` onto `Z* x Z* x Q*`, with `[-1, 1]` sent to `(0, 0, u)`.
struct Slab {
    zs: ZSeq,
    delta: SurdCut,
    core: Arc<TMap>,
    top: TMap,
    plain: PlainCache,
}

impl Slab {
    fn new() -> Slab {
        let delta = SurdCut::new(rat(3, 2), rat(1, 8));
        let zs = ZSeq::new(Cut::Rat(int(-2)), Cut::Surd(delta.clone()), rat(-3, 2), rat(3, 2));
        let core = Arc::new(TMap::new(
            Cut::Rat(rat(-3, 2)),
            rat(3, 2),
            SurdCut::new(rat(5, 4), rat(1, 8)),
            rat(-5, 4),
            rat(5, 4),
            Some(int(0)),
        ));
        let top = TMap::new(
            Cut::Surd(delta.clone()),
            int(2),
            SurdCut::new(rat(3, 2), rat(1, 4)),
            rat(7, 4),
            rat(29, 16),
            None,
        );
        Slab { zs, delta, core, top, plain: PlainCache::default() }
    }

    fn tmap(&self, j: i64) -> Arc<TMap> {
        if j == 0 {
            self.core.clone()
        } else {
            self.plain.get(&self.zs, j)
        }
    }

    fn forward(&self, v: &Rational) -> Result<(Star<i64>, Star<i64>, Star<Rational>)> {
        if self.delta.cmp_rat(v) == Ordering::Greater {
            let (m, x) = self.top.forward(v)?;
            return Ok((Star::Inf, m, x));
        }
        let j = self.zs.locate(v)?;
        let (m, x) = self.tmap(j).forward(v)?;
        Ok((Star::Fin(j), m, x))
    }

    fn backward(&self, j: &Star<i64>, m: &Star<i64>, x: &Star<Rational>) -> Result<Rational> {
        match j {
            Star::Inf => self.top.backward(m, x),
            Star::Fin(j) => self.tmap(*j).backward(m, x),
        }
    }
}

/// Q onto Omega4, `(4n-2, 4n+2]` onto the slab with first coordinate `n`.
struct PhiMain {
    slab: Slab,
}

impl IsoMap for PhiMain {
    fn domain(&self) -> Universe {
        Universe::QLine
    }

    fn codomain(&self) -> Universe {
        Universe::Omega4
    }

    fn name(&self) -> String {
        "phi".into()
    }

    fn forward(&self, x: &Point, _cx: &mut Ctx) -> Result<Point> {
        let u = x.as_q()?;
        let n = to_i64(&ceil_int(&((u - int(2)) / int(4))))?;
        let (j, m, x) = self.slab.forward(&(u - int(4 * n)))?;
        Ok(Point::O4 { i: n, j, m, x })
    }

    fn backward(&self, y: &Point, _cx: &mut Ctx) -> Result<Point> {
        match y {
            Point::O4 { i, j, m, x } => Ok(Point::Q(int(4 * i) + self.slab.backward(j, m, x)?)),
            other => Err(Error::Domain(format!("{other} is not in Omega4"))),
        }
    }

    fn block_shift(&self, r: &Rational) -> Option<i64> {
        let q = r / int(4);
        is_integer(&q).then(|| q.to_integer().to_i64()).flatten()
    }
}

/// The open block `(4i-1, 4i+3)` onto Omega3, with `[4i, 4i+2]` sent to `(0, 0, u-4i-1)`.
struct Block8 {
    index: i64,
    zs: ZSeq,
    core: Arc<TMap>,
    plain: PlainCache,
}

impl Block8 {
    fn new(index: i64) -> Block8 {
        let zs = ZSeq::new(Cut::Rat(int(-2)), Cut::Rat(int(2)), rat(-3, 2), rat(3, 2));
        let core = Arc::new(TMap::new(
            Cut::Rat(rat(-3, 2)),
            rat(3, 2),
            SurdCut::new(rat(5, 4), rat(1, 8)),
            rat(-5, 4),
            rat(5, 4),
            Some(int(0)),
        ));
        Block8 { index, zs, core, plain: PlainCache::default() }
    }

    fn centre(&self) -> Rational {
        int(4 * self.index + 1)
    }
}

impl IsoMap for Block8 {
    fn domain(&self) -> Universe {
        let c = self.centre();
        Universe::Sub(Box::new(Universe::QLine), Point::Q(&c - int(2)), Point::Q(c + int(2)))
    }

    fn codomain(&self) -> Universe {
        Universe::Omega3
    }

    fn name(&self) -> String {
        format!("phi8[{}]", self.index)
    }

    fn forward(&self, x: &Point, _cx: &mut Ctx) -> Result<Point> {
        let v = x.as_q()? - self.centre();
        if !self.zs.inside(&v) {
            return Err(Error::Domain(format!("{x} is outside block {}", self.index)));
        }
        let k = self.zs.locate(&v)?;
        let t = if k == 0 { self.core.clone() } else { self.plain.get(&self.zs, k) };
        let (j, x) = t.forward(&v)?;
        Ok(Point::O3 { i: k, j, x })
    }

    fn backward(&self, y: &Point, _cx: &mut Ctx) -> Result<Point> {
        match y {
            Point::O3 { i, j, x } => {
                let t = if *i == 0 { self.core.clone() } else { self.plain.get(&self.zs, *i) };
                Ok(Point::Q(self.centre() + t.backward(j, x)?))
            }
            other => Err(Error::Domain(format!("{other} is not in Omega3"))),
        }
    }
}

/// Q onto Omega4; block-periodic, so translation by 4 becomes a first-coordinate shift.
pub fn phi_main() -> OrderIso {
    OrderIso::custom(std::sync::Arc::new(PhiMain { slab: Slab::new() }), true)
}

/// Block `i` of the 8-letter encoding: `(4i-1, 4i+3)` onto Omega3.
pub fn phi_blocks8(index: i64) -> OrderIso {
    OrderIso::custom(std::sync::Arc::new(Block8::new(index)), true)
}
