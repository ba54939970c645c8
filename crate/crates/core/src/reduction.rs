//! From an arbitrary sequence down to `Stab(I_m)` material:
//! taming into `B_{2n}`, factoring into `B_{1/3}`, then splitting through `Stab(2Z)`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Signed;
use parking_lot::Mutex;

use crate::engine::{
    certify_bound, certify_support, compose, conjugate, inverse, min_max, normalize_pl, to_pl, Automorphism,
    BoundCertificate, Ctx, Extremum, PointMap, Region, SupportCertificate,
};
use crate::error::{Error, Result};
use crate::order::rational::{ceil_int, floor_int, fmt_rational, int, parse_rational, rat, Rational};
use crate::order::{Point, Universe};

pub use crate::word::{word_chunk, word_decorate};

/// `sigma: Z -> Z`, extended on demand from 0 in both directions.
pub struct Sigma {
    gs: Vec<Automorphism>,
    /// `up[m] = sigma(m)`, `down[k] = sigma(-1-k)`.
    table: Mutex<(Vec<BigInt>, Vec<BigInt>)>,
}

impl Sigma {
    pub fn new(gs: Vec<Automorphism>) -> Sigma {
        Sigma { gs, table: Mutex::new((vec![BigInt::from(0)], Vec::new())) }
    }

    /// Values `s`, `(s)g_n`, `(s)g_n^-1` for `n <= |m| + 1`. Admitting `g_n` one step early
    /// leaves at most `2n - 2` integers between `x` and `(x)g_n'`, so the `2n` bound holds.
    fn candidates(&self, m: i64, s: &BigInt) -> Result<Vec<Rational>> {
        let x = Rational::from_integer(s.clone());
        let mut out = vec![x.clone()];
        let k = (m.unsigned_abs() as usize + 1).min(self.gs.len());
        for g in &self.gs[..k] {
            out.push(g.apply_q(&x)?);
            out.push(g.apply_q_inv(&x)?);
        }
        Ok(out)
    }

    pub fn value(&self, m: i64, cx: &mut Ctx) -> Result<BigInt> {
        let mut t = self.table.lock();
        if m >= 0 {
            while t.0.len() <= m as usize {
                cx.spend(|| "sigma".to_string())?;
                let cur = (t.0.len() - 1) as i64;
                let s = t.0.last().expect("seeded").clone();
                let top = self.candidates(cur, &s)?.into_iter().max().expect("non-empty");
                t.0.push(floor_int(&top) + 1);
            }
            Ok(t.0[m as usize].clone())
        } else {
            let k = (-m - 1) as usize;
            while t.1.len() <= k {
                cx.spend(|| "sigma".to_string())?;
                let cur = -(t.1.len() as i64);
                let s = t.1.last().cloned().unwrap_or_else(|| t.0[0].clone());
                let bottom = self.candidates(cur, &s)?.into_iter().min().expect("non-empty");
                t.1.push(ceil_int(&bottom) - 1);
            }
            Ok(t.1[k].clone())
        }
    }
}

/// Affine interpolation of `sigma` between consecutive integers.
struct Interp {
    sigma: Arc<Sigma>,
}

impl PointMap for Interp {
    fn universe(&self) -> Universe {
        Universe::QLine
    }

    fn name(&self) -> String {
        "p".into()
    }

    fn forward(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        let x = x.as_q()?;
        let n = floor_int(x);
        let ni: i64 = (&n).try_into().map_err(|_| Error::Domain("interpolation index overflows".into()))?;
        let a = Rational::from_integer(self.sigma.value(ni, cx)?);
        let b = Rational::from_integer(self.sigma.value(ni + 1, cx)?);
        Ok(Point::Q(&a + (x - Rational::from_integer(n)) * (b - &a)))
    }

    fn backward(&self, y: &Point, cx: &mut Ctx) -> Result<Point> {
        let y = y.as_q()?;
        let yi = floor_int(y);
        let mut n = 0i64;
        if !y.is_negative() {
            while self.sigma.value(n + 1, cx)? <= yi {
                n += 1;
            }
        } else {
            n = -1;
            while self.sigma.value(n, cx)? > yi {
                n -= 1;
            }
        }
        let a = Rational::from_integer(self.sigma.value(n, cx)?);
        let b = Rational::from_integer(self.sigma.value(n + 1, cx)?);
        Ok(Point::Q(int(n) + (y - &a) / (b - a)))
    }

    fn memoize(&self) -> bool {
        true
    }
}

/// Which conjugate of `g_n` is bounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Direction {
    /// `g^{p^-1} = p g p^-1`
    PInverse,
    /// `g^p = p^-1 g p`
    P,
}

pub struct TamingResult {
    pub sigma: Arc<Sigma>,
    pub p: Automorphism,
    pub direction: Direction,
    pub targets: Vec<Automorphism>,
    pub tamed: Vec<Automorphism>,
    pub certificates: Vec<BoundCertificate>,
}

impl TamingResult {
    /// The assignment change that turns words for the tamed targets into words for the originals.
    pub fn untame(&self, x: &Automorphism) -> Result<Automorphism> {
        match self.direction {
            Direction::PInverse => conjugate(x, &self.p),
            Direction::P => conjugate(x, &inverse(&self.p)),
        }
    }
}

fn conj_dir(g: &Automorphism, p: &Automorphism, d: Direction) -> Result<Automorphism> {
    match d {
        Direction::PInverse => compose(&[p.clone(), g.clone(), inverse(p)]),
        Direction::P => compose(&[inverse(p), g.clone(), p.clone()]),
    }
}

/// Builds `p` from `sigma` and certifies `|(x)g_n' - x| <= 2n` at the samples, for
/// the first conjugation direction under which every target passes.
pub fn taming_conjugator(gs: &[Automorphism], samples: &[Rational]) -> Result<TamingResult> {
    for g in gs {
        if g.universe() != &Universe::QLine {
            return Err(Error::UniverseMismatch(format!("taming needs maps of Q, got {}", g.universe())));
        }
    }
    let sigma = Arc::new(Sigma::new(gs.to_vec()));
    let p = if gs.iter().all(|g| g.is_identity()) {
        Automorphism::identity(Universe::QLine)
    } else {
        Automorphism::custom(Arc::new(Interp { sigma: sigma.clone() }))
    };
    let mut failure = None;
    for d in [Direction::PInverse, Direction::P] {
        let mut tamed = Vec::new();
        let mut certs = Vec::new();
        let mut ok = true;
        for (i, g) in gs.iter().enumerate() {
            let t = conj_dir(g, &p, d)?;
            match certify_bound(&t, &int(2 * (i as i64 + 1)), samples, "taming conjugator") {
                Ok(c) => certs.push(c),
                Err(e) => {
                    failure = Some(e);
                    ok = false;
                    break;
                }
            }
            tamed.push(t);
        }
        if ok {
            return Ok(TamingResult { sigma, p, direction: d, targets: gs.to_vec(), tamed, certificates: certs });
        }
    }
    Err(failure.expect("a failure was recorded"))
}

/// Factors with their certificates; composing `factors` in order gives `target`.
#[derive(Clone, Debug)]
pub struct FactorChain {
    pub target: Automorphism,
    pub factors: Vec<Automorphism>,
    pub bounds: Vec<BoundCertificate>,
    pub supports: Vec<SupportCertificate>,
}

impl FactorChain {
    pub fn product(&self) -> Result<Automorphism> {
        compose(&self.factors)
    }

    /// Exact sampled check of `product = target`.
    pub fn verify(&self, samples: &[Rational]) -> Result<()> {
        let p = self.product()?;
        for x in samples {
            if p.apply_q(x)? != self.target.apply_q(x)? {
                return Err(Error::Certificate { claim: "factor product equals target".into(), witness: fmt_rational(x) });
            }
        }
        Ok(())
    }
}

fn check_bound_cert(g: &Automorphism, cert: Option<&BoundCertificate>, r: &Rational) -> Result<()> {
    let cert = cert.ok_or_else(|| Error::Precondition(format!("no bound certificate for {}", g.describe())))?;
    if cert.subject_id != g.id() {
        return Err(Error::Precondition("bound certificate belongs to another map".into()));
    }
    if parse_rational(&cert.radius)? > *r {
        return Err(Error::Precondition(format!("certified radius {} exceeds {}", cert.radius, fmt_rational(r))));
    }
    Ok(())
}

/// `h1 g` for `h1 = max{min{x+r, g^-1}, x-r}`, evaluated as `median((x-r)g, x, (x+r)g)`.
/// Only `g` in one direction is needed, so a chain of these costs `O(j^2)` memoized
/// evaluations instead of `2^j`.
struct Median {
    prev: Automorphism,
    r: Rational,
}

impl Median {
    /// `median((x-r)g, x, (x+r)g)`.
    fn act(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        let x = x.as_q()?;
        let lo = self.prev.forward_in(&Point::Q(x - &self.r), cx)?.as_q()?.clone();
        if &lo >= x {
            return Ok(Point::Q(lo));
        }
        let hi = self.prev.forward_in(&Point::Q(x + &self.r), cx)?.as_q()?.clone();
        Ok(Point::Q(if &hi <= x { hi } else { x.clone() }))
    }

    /// `y` clamped to `[(y)g^-1 - r, (y)g^-1 + r]`.
    fn back(&self, y: &Point, cx: &mut Ctx) -> Result<Point> {
        let y = y.as_q()?;
        let x = self.prev.backward_in(&Point::Q(y.clone()), cx)?.as_q()?.clone();
        let lo = &x - &self.r;
        let hi = &x + &self.r;
        Ok(Point::Q(if y < &lo { lo } else if y > &hi { hi } else { y.clone() }))
    }
}

impl PointMap for Median {
    fn universe(&self) -> Universe {
        Universe::QLine
    }

    fn name(&self) -> String {
        format!("median({}, {})", self.prev.describe(), fmt_rational(&self.r))
    }

    fn forward(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        self.act(x, cx)
    }

    fn backward(&self, y: &Point, cx: &mut Ctx) -> Result<Point> {
        self.back(y, cx)
    }

    fn memoize(&self) -> bool {
        true
    }
}

/// `g in B_{rn}` as `n` factors in `B_r`, peeling `h1 = max{min{x+r, g^-1}, x-r}`.
pub fn bounded_factorize(
    g: &Automorphism,
    r: &Rational,
    n: usize,
    cert: Option<&BoundCertificate>,
    samples: &[Rational],
) -> Result<FactorChain> {
    if n == 0 {
        return Err(Error::Precondition("factor count must be positive".into()));
    }
    check_bound_cert(g, cert, &(r * int(n as i64)))?;
    let up = Automorphism::translation(r.clone());
    let down = Automorphism::translation(-r.clone());
    let mut rem = g.clone();
    let mut factors = Vec::with_capacity(n);
    for _ in 1..n {
        let h1 = normalize_pl(&min_max(
            &[min_max(&[up.clone(), inverse(&rem)], Extremum::Min)?, down.clone()],
            Extremum::Max,
        )?);
        factors.push(inverse(&h1));
        rem = if to_pl(&rem).is_some() {
            normalize_pl(&compose(&[h1, rem])?)
        } else {
            Automorphism::custom(Arc::new(Median { prev: rem, r: r.clone() }))
        };
    }
    factors.push(rem);
    let mut bounds = Vec::with_capacity(n);
    for f in &factors {
        bounds.push(certify_bound(f, r, samples, "bounded factor")?);
    }
    Ok(FactorChain { target: g.clone(), factors, bounds, supports: Vec::new() })
}

/// `h` in `Stab(2Z)` with `(2n+1)h^-1 = (2n+1)g^-1`: two affine pieces on each `[2n, 2n+2]`.
struct EvenStab {
    g: Automorphism,
}

impl EvenStab {
    fn node(&self, n: &BigInt, cx: &mut Ctx) -> Result<(Rational, Rational)> {
        let lo = Rational::from_integer(n * 2);
        let t = self.g.backward_in(&Point::Q(&lo + int(1)), cx)?.as_q()?.clone();
        if t <= lo || t >= &lo + int(2) {
            return Err(Error::Precondition(format!(
                "(2n+1)g^-1 = {} leaves ({}, {})",
                fmt_rational(&t),
                fmt_rational(&lo),
                fmt_rational(&(&lo + int(2)))
            )));
        }
        Ok((lo, t))
    }
}

impl PointMap for EvenStab {
    fn universe(&self) -> Universe {
        Universe::QLine
    }

    fn name(&self) -> String {
        format!("even({})", self.g.describe())
    }

    fn forward(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        let x = x.as_q()?;
        let n = floor_int(&(x / int(2)));
        let (lo, t) = self.node(&n, cx)?;
        let y = if x <= &t {
            &lo + (x - &lo) / (&t - &lo)
        } else {
            &lo + int(1) + (x - &t) / (&lo + int(2) - &t)
        };
        Ok(Point::Q(y))
    }

    fn backward(&self, y: &Point, cx: &mut Ctx) -> Result<Point> {
        let y = y.as_q()?;
        let n = floor_int(&(y / int(2)));
        let (lo, t) = self.node(&n, cx)?;
        let mid = &lo + int(1);
        let x = if y <= &mid { &lo + (y - &lo) * (&t - &lo) } else { &t + (y - &mid) * (&lo + int(2) - &t) };
        Ok(Point::Q(x))
    }

    fn memoize(&self) -> bool {
        true
    }
}

/// `g = h * (h^-1 g)` with `h` in `Stab(2Z)` and `h^-1 g` in `Stab(2Z+1)`.
pub struct EvenSplit {
    pub chain: FactorChain,
    pub h: Automorphism,
    pub rest: Automorphism,
    /// `rest^{f^-1}`, in `Stab(2Z)`, so that `g = h * shifted^f`.
    pub shifted: Automorphism,
}

pub fn split_even_stab(g: &Automorphism, cert: Option<&BoundCertificate>, samples: &[Rational]) -> Result<EvenSplit> {
    check_bound_cert(g, cert, &rat(1, 3))?;
    let h = if g.is_identity() { g.clone() } else { Automorphism::custom(Arc::new(EvenStab { g: g.clone() })) };
    let rest = compose(&[inverse(&h), g.clone()])?;
    let f = Automorphism::translation(int(1));
    let shifted = conjugate(&rest, &inverse(&f))?;
    let pts = support_samples(samples);
    let supports = vec![
        certify_support(&h, &Region::off_lattice(2, 0), &pts, "interpolation fixes 2Z")?,
        certify_support(&rest, &Region::off_lattice(2, 1), &pts, "h^-1 g fixes 2Z+1")?,
    ];
    Ok(EvenSplit {
        chain: FactorChain { target: g.clone(), factors: vec![h.clone(), rest.clone()], bounds: Vec::new(), supports },
        h,
        rest,
        shifted,
    })
}

/// Sample points plus every integer in a window, so lattice-fixing claims get exercised.
pub fn support_samples(samples: &[Rational]) -> Vec<Point> {
    let mut pts: Vec<Point> = (-24..=24).map(|k| Point::Q(int(k))).collect();
    pts.extend(samples.iter().map(|x| Point::Q(x.clone())));
    pts
}

/// `h = k_1 ... k_{n/2}`, `k_i` = `h` on `[nj+2i, nj+2i+2]`; `z_i = k_i^{f^{-2i}}` fixes `I_n`.
pub struct IntervalSplit {
    pub chain: FactorChain,
    pub ks: Vec<Automorphism>,
    pub zs: Vec<Automorphism>,
}

pub fn split_interval_stab(
    h: &Automorphism,
    n: i64,
    cert: Option<&SupportCertificate>,
    samples: &[Rational],
) -> Result<IntervalSplit> {
    if n <= 2 || n % 2 != 0 {
        return Err(Error::Precondition(format!("interval splitting needs even n > 2, got {n}")));
    }
    let cert = cert.ok_or_else(|| Error::Precondition(format!("no Stab(2Z) certificate for {}", h.describe())))?;
    if cert.subject_id != h.id() {
        return Err(Error::Precondition("support certificate belongs to another map".into()));
    }
    let mut ks = Vec::new();
    let mut zs = Vec::new();
    for i in 1..=n / 2 {
        let k = Automorphism::window(h.clone(), n, i)?;
        zs.push(conjugate(&k, &Automorphism::translation(int(-2 * i)))?);
        ks.push(k);
    }
    let pts = support_samples(samples);
    let region = Region::outside_i(n);
    let mut supports = Vec::new();
    for z in &zs {
        supports.push(certify_support(z, &region, &pts, "window restriction")?);
    }
    Ok(IntervalSplit { chain: FactorChain { target: h.clone(), factors: ks.clone(), bounds: Vec::new(), supports }, ks, zs })
}

/// The whole funnel for a finite sequence: `z_k` in `Stab(I_m)` with
/// `v_q = u_{2q-1} u_{2q}^f`, `u_r = prod_i z_{m(r-1)/2+i}^{f^{2i}}` and `t_n = prod v_{3n(n-1)+i}`.
pub struct Reduction {
    pub m: i64,
    pub taming: TamingResult,
    pub chains: Vec<FactorChain>,
    /// 1-based in the formulas; index 0 here.
    pub v: Vec<Automorphism>,
    pub u: Vec<Automorphism>,
    pub z: Vec<Automorphism>,
    pub certificates: usize,
}

impl Reduction {
    pub fn z(&self, k: usize) -> Option<&Automorphism> {
        k.checked_sub(1).and_then(|i| self.z.get(i))
    }
}

pub fn reduce(gs: &[Automorphism], m: i64, samples: &[Rational]) -> Result<Reduction> {
    let taming = taming_conjugator(gs, samples).map_err(|e| e.at_stage("taming"))?;
    let third = rat(1, 3);
    let mut chains = Vec::new();
    let mut v = Vec::new();
    for (i, t) in taming.tamed.iter().enumerate() {
        let n = i + 1;
        let chain = bounded_factorize(t, &third, 6 * n, Some(&taming.certificates[i]), samples)
            .map_err(|e| e.at_stage("bounded factorization"))?;
        v.extend(chain.factors.iter().cloned());
        chains.push(chain);
    }
    let mut certificates = taming.certificates.len() + chains.iter().map(|c| c.bounds.len()).sum::<usize>();
    let mut u = Vec::new();
    let mut bound_iter = chains.iter().flat_map(|c| c.bounds.iter());
    for q in &v {
        let cert = bound_iter.next();
        let split = split_even_stab(q, cert, samples).map_err(|e| e.at_stage("Stab(2Z) splitting"))?;
        certificates += split.chain.supports.len();
        u.push(split.h);
        u.push(split.shifted);
    }
    let pts = support_samples(samples);
    let mut z = Vec::new();
    for r in &u {
        let cert = certify_support(r, &Region::off_lattice(2, 0), &pts, "fixes 2Z")?;
        let split = split_interval_stab(r, m, Some(&cert), samples).map_err(|e| e.at_stage("Stab(I_m) splitting"))?;
        certificates += 1 + split.chain.supports.len();
        z.extend(split.zs);
    }
    Ok(Reduction { m, taming, chains, v, u, z, certificates })
}
