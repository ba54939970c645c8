//! Explicit commutator witnesses: every automorphism of Q is `[v, w]` for computable `v`, `w`.
//!
//! Scheme: dominate `u` by an escaping `b`, so `a = u b^-1` escapes downwards; conjugate
//! `b` and `a^-1` to the unit translation `s`; then `u = [a^-1, d^-1 c]`.

use std::sync::Arc;

use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

use crate::engine::{
    commutator, compose, conjugate, inverse, min_max, normalize_pl, Affine, Automorphism, Ctx, Extremum, Kind,
    PlMap, PointMap,
};
use crate::error::{Error, Result};
use crate::iso::OrderIso;
use crate::order::rational::{floor_int, fmt_rational, int, Rational};
use crate::order::{Point, Universe};

/// Evidence that `(y)b >= y + 1` everywhere.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EscapeCertificate {
    pub subject: u64,
    pub provenance: String,
    pub samples: usize,
}

/// Samples the escape law `(y)b >= y + 1`.
pub fn certify_escape(b: &Automorphism, samples: &[Rational], provenance: &str) -> Result<EscapeCertificate> {
    for y in samples {
        if b.apply_q(y)? < y + int(1) {
            return Err(Error::Certificate {
                claim: format!("{} escapes by 1", b.describe()),
                witness: fmt_rational(y),
            });
        }
    }
    Ok(EscapeCertificate { subject: b.id(), provenance: provenance.into(), samples: samples.len() })
}

fn default_samples() -> Vec<Rational> {
    (-40..=40).map(|k| Rational::new(k.into(), 3.into())).collect()
}

/// `(y)b = max{(y+1)u, y+1}`; the escape law holds by construction.
pub fn dominating_positive(u: &Automorphism) -> Result<(Automorphism, EscapeCertificate)> {
    if u.universe() != &Universe::QLine {
        return Err(Error::UniverseMismatch(format!("dominating map needs Q, got {}", u.universe())));
    }
    let s = Automorphism::translation(int(1));
    let b = if u.is_identity() {
        s
    } else {
        normalize_pl(&min_max(&[compose(&[s.clone(), u.clone()])?, s], Extremum::Max)?)
    };
    let cert = certify_escape(&b, &default_samples(), "max{(y+1)u, y+1}")?;
    Ok((b, cert))
}

/// `(x)c = ((x - n)c0) b^n` with `n = floor(x)` and `c0` the affine map of `[0,1)` onto `[base, (base)b)`.
struct Conjugator {
    b: Automorphism,
    base: Rational,
    width: Rational,
    /// `beta_n` for `n >= 0` and `n < 0`, extended on demand.
    orbit: Mutex<(Vec<Rational>, Vec<Rational>)>,
}

impl Conjugator {
    fn beta(&self, n: i64, cx: &mut Ctx) -> Result<Rational> {
        let mut o = self.orbit.lock();
        if n >= 0 {
            while o.0.len() <= n as usize {
                cx.spend(|| self.name())?;
                let last = o.0.last().expect("seeded").clone();
                o.0.push(self.b.apply_q(&last)?);
            }
            Ok(o.0[n as usize].clone())
        } else {
            let k = (-n - 1) as usize;
            while o.1.len() <= k {
                cx.spend(|| self.name())?;
                let last = o.1.last().cloned().unwrap_or_else(|| self.base.clone());
                o.1.push(self.b.apply_q_inv(&last)?);
            }
            Ok(o.1[k].clone())
        }
    }

    fn step(&self, y: Rational, n: i64, cx: &mut Ctx) -> Result<Rational> {
        let mut p = Point::Q(y);
        for _ in 0..n.unsigned_abs() {
            cx.spend(|| self.name())?;
            p = self.b.eval(&p, n < 0, cx)?;
        }
        Ok(p.as_q()?.clone())
    }
}

impl PointMap for Conjugator {
    fn universe(&self) -> Universe {
        Universe::QLine
    }

    fn name(&self) -> String {
        format!("conj({}, {})", self.b.describe(), fmt_rational(&self.base))
    }

    fn forward(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        let x = x.as_q()?;
        let n = floor_int(x);
        let t = x - Rational::from_integer(n.clone());
        let n: i64 = n.try_into().map_err(|_| Error::Domain("orbit index overflows".into()))?;
        let y0 = &self.base + t * &self.width;
        Ok(Point::Q(self.step(y0, n, cx)?))
    }

    fn backward(&self, y: &Point, cx: &mut Ctx) -> Result<Point> {
        let y = y.as_q()?;
        // beta_n <= y < beta_{n+1}
        let mut n = 0i64;
        if y >= &self.base {
            while &self.beta(n + 1, cx)? <= y {
                n += 1;
            }
        } else {
            n = -1;
            while &self.beta(n, cx)? > y {
                n -= 1;
            }
        }
        let z = self.step(y.clone(), -n, cx)?;
        Ok(Point::Q(int(n) + (z - &self.base) / &self.width))
    }

    fn memoize(&self) -> bool {
        true
    }
}

/// `c` with `c^-1 s c = b` for `s = x + 1`. Refuses without an escape certificate for `b`.
pub fn translation_conjugator(b: &Automorphism, cert: Option<&EscapeCertificate>, base: Rational) -> Result<Automorphism> {
    let cert = cert.ok_or_else(|| Error::Precondition(format!("no escape certificate for {}", b.describe())))?;
    if cert.subject != b.id() {
        return Err(Error::Precondition(format!("escape certificate does not belong to {}", b.describe())));
    }
    if let Kind::Translation(r) = b.kind() {
        return Ok(Automorphism::pl(PlMap::affine(Affine::new(r.clone(), base))));
    }
    let next = b.apply_q(&base)?;
    let width = &next - &base;
    Ok(Automorphism::custom(Arc::new(Conjugator {
        b: b.clone(),
        base: base.clone(),
        width,
        orbit: Mutex::new((vec![base, next], Vec::new())),
    })))
}

#[derive(Clone, Debug)]
pub struct CommutatorWitnesses {
    pub target: Automorphism,
    pub v: Automorphism,
    pub w: Automorphism,
    pub provenance: String,
}

impl CommutatorWitnesses {
    /// `[v, w]` as an automorphism.
    pub fn product(&self) -> Result<Automorphism> {
        commutator(&self.v, &self.w)
    }

    /// Caller-supplied witnesses, accepted after a sampled check of `[v, w] = target`.
    pub fn supplied(target: &Automorphism, v: &Automorphism, w: &Automorphism, samples: &[Point]) -> Result<Self> {
        let cw = CommutatorWitnesses {
            target: target.clone(),
            v: v.clone(),
            w: w.clone(),
            provenance: "supplied".into(),
        };
        cw.check(samples)?;
        Ok(cw)
    }

    /// Exact sampled check of `[v, w] = target`.
    pub fn check(&self, samples: &[Point]) -> Result<()> {
        let p = self.product()?;
        for x in samples {
            if p.forward(x)? != self.target.forward(x)? {
                return Err(Error::Certificate { claim: "[v, w] = u".into(), witness: x.to_string() });
            }
        }
        Ok(())
    }
}

/// Witnesses on Q: `v = s^d` (equal to `a^-1`), `w = d^-1 c`.
pub fn commutator_witnesses(u: &Automorphism) -> Result<CommutatorWitnesses> {
    let uni = u.universe().clone();
    if uni != Universe::QLine {
        return Err(Error::UniverseMismatch(format!("commutator synthesis needs Q, got {uni}")));
    }
    if u.is_identity() {
        let id = Automorphism::identity(uni);
        return Ok(CommutatorWitnesses { target: u.clone(), v: id.clone(), w: id, provenance: "identity".into() });
    }
    let (b, bcert) = dominating_positive(u)?;
    let a = normalize_pl(&compose(&[u.clone(), inverse(&b)])?);
    let a_inv = inverse(&a);
    let acert = certify_escape(&a_inv, &default_samples(), "a = u b^-1 drops by 1")?;
    let c = translation_conjugator(&b, Some(&bcert), int(0))?;
    let d = translation_conjugator(&a_inv, Some(&acert), int(0))?;
    let w = compose(&[inverse(&d), c])?;
    Ok(CommutatorWitnesses { target: u.clone(), v: a_inv, w, provenance: "dominate-and-conjugate".into() })
}

/// `s^d` for the same `d` the synthesis uses; equals `v` by construction.
pub fn translation_conjugate_form(u: &Automorphism) -> Result<Automorphism> {
    let (b, _) = dominating_positive(u)?;
    let a_inv = inverse(&normalize_pl(&compose(&[u.clone(), inverse(&b)])?));
    let acert = certify_escape(&a_inv, &default_samples(), "a = u b^-1 drops by 1")?;
    let d = translation_conjugator(&a_inv, Some(&acert), int(0))?;
    conjugate(&Automorphism::translation(int(1)), &d)
}

/// Witnesses for an automorphism of (-1, 1), computed on Q through psi and carried back.
pub fn witnesses_in_interval(u: &Automorphism) -> Result<CommutatorWitnesses> {
    if u.universe() != &Universe::UnitInterval {
        return Err(Error::UniverseMismatch(format!("expected (-1,1), got {}", u.universe())));
    }
    let psi = OrderIso::psi();
    let back = psi.inverse();
    let on_q = Automorphism::transport(&psi, u)?;
    let cw = commutator_witnesses(&on_q)?;
    Ok(CommutatorWitnesses {
        target: u.clone(),
        v: Automorphism::transport(&back, &cw.v)?,
        w: Automorphism::transport(&back, &cw.w)?,
        provenance: format!("{} through psi", cw.provenance),
    })
}
