use std::fmt;

use num_traits::Signed;

use super::point::{Coord, Point, Star};
use super::rational::{enumerate_q, int, midpoint, one, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Universe {
    QLine,
    /// (-1, 1) inside Q.
    UnitInterval,
    /// Z x Z* x Z* x Q*
    Omega4,
    /// Z x Z* x Q*
    Omega3,
    /// Open interval of a parent universe between two of its points.
    Sub(Box<Universe>, Point, Point),
}

impl fmt::Display for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Universe::QLine => write!(f, "Q"),
            Universe::UnitInterval => write!(f, "(-1,1)"),
            Universe::Omega4 => write!(f, "Omega4"),
            Universe::Omega3 => write!(f, "Omega3"),
            Universe::Sub(u, lo, hi) => write!(f, "{u}|({lo}, {hi})"),
        }
    }
}

fn mismatch(u: &Universe, p: &Point) -> Error {
    Error::UniverseMismatch(format!("{p} is not a point of {u}"))
}

impl Universe {
    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (Universe::QLine, Point::Q(_)) => true,
            (Universe::UnitInterval, Point::Q(x)) => x.abs() < one(),
            (Universe::Omega4, Point::O4 { .. }) => true,
            (Universe::Omega3, Point::O3 { .. }) => true,
            (Universe::Sub(parent, lo, hi), p) => parent.contains(p) && lo < p && p < hi,
            _ => false,
        }
    }

    pub fn check(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(mismatch(self, p))
        }
    }

    /// Strict total order of the universe.
    pub fn compare(&self, p: &Point, q: &Point) -> Result<std::cmp::Ordering> {
        self.check(p)?;
        self.check(q)?;
        super::point::compare(p, q)
    }

    /// Canonical point strictly between `p < q`.
    pub fn between(&self, p: &Point, q: &Point) -> Result<Point> {
        self.check(p)?;
        self.check(q)?;
        if p >= q {
            return Err(Error::Precondition(format!("between needs {p} < {q}")));
        }
        Ok(between_lex(p, q))
    }

    pub fn above(&self, p: &Point) -> Result<Point> {
        self.check(p)?;
        Ok(match self {
            Universe::UnitInterval => Point::Q(midpoint(p.as_q()?, &one())),
            Universe::Sub(_, _, hi) => between_lex(p, hi),
            _ => above_tail(p, 0).expect("first coordinate is never the top"),
        })
    }

    pub fn below(&self, p: &Point) -> Result<Point> {
        self.check(p)?;
        Ok(match self {
            Universe::UnitInterval => Point::Q(midpoint(p.as_q()?, &(-one()))),
            Universe::Sub(_, lo, _) => between_lex(lo, p),
            _ => below_last(p),
        })
    }

    /// Injective, surjective, deterministic enumeration. Sub-intervals scan the
    /// parent enumeration and give up after `scan_limit` parent indices.
    pub fn enumerate(&self, k: u64) -> Result<Point> {
        match self {
            Universe::QLine => Ok(Point::Q(enumerate_q(k))),
            Universe::UnitInterval => {
                let y = enumerate_q(k);
                let d = one() + y.abs();
                Ok(Point::Q(y / d))
            }
            Universe::Omega4 => {
                let v = unpair_n(k, 4);
                Ok(Point::O4 { i: zigzag(v[0]), j: zstar(v[1]), m: zstar(v[2]), x: qstar(v[3]) })
            }
            Universe::Omega3 => {
                let v = unpair_n(k, 3);
                Ok(Point::O3 { i: zigzag(v[0]), j: zstar(v[1]), x: qstar(v[2]) })
            }
            Universe::Sub(..) => self.enumerate_scan(k, 1_000_000),
        }
    }

    pub fn enumerate_scan(&self, k: u64, scan_limit: u64) -> Result<Point> {
        let Universe::Sub(parent, ..) = self else {
            return self.enumerate(k);
        };
        let mut seen = 0u64;
        for idx in 0..scan_limit {
            let p = parent.enumerate(idx)?;
            if self.contains(&p) {
                if seen == k {
                    return Ok(p);
                }
                seen += 1;
            }
        }
        Err(Error::Fuel { node: format!("enumeration of {self}") })
    }
}

/// Rightmost non-top coordinate at index >= `from` goes up by one; later ones reset to 0.
fn above_tail(p: &Point, from: usize) -> Option<Point> {
    let mut c = p.coords();
    for idx in (from..c.len()).rev() {
        let bumped = match &c[idx] {
            Coord::Int(v) => Some(Coord::Int(v + 1)),
            Coord::SInt(Star::Fin(v)) => Some(Coord::SInt(Star::Fin(v + 1))),
            Coord::SRat(Star::Fin(v)) => Some(Coord::SRat(Star::Fin(v + one()))),
            _ => None,
        };
        if let Some(b) = bumped {
            c[idx] = b;
            for later in c.iter_mut().skip(idx + 1) {
                *later = zero_like(later);
            }
            return Some(Point::from_coords(p, c));
        }
    }
    None
}

fn below_last(p: &Point) -> Point {
    let mut c = p.coords();
    let last = c.len() - 1;
    c[last] = match &c[last] {
        Coord::SRat(Star::Fin(v)) => Coord::SRat(Star::Fin(v - one())),
        Coord::SRat(Star::Inf) => Coord::SRat(Star::Fin(int(0))),
        _ => unreachable!("last coordinate is rational"),
    };
    Point::from_coords(p, c)
}

fn zero_like(c: &Coord) -> Coord {
    match c {
        Coord::Int(_) => Coord::Int(0),
        Coord::SInt(_) => Coord::SInt(Star::Fin(0)),
        Coord::SRat(_) => Coord::SRat(Star::Fin(int(0))),
    }
}

fn strictly_between(lo: &Coord, hi: &Coord) -> Option<Coord> {
    let ints = |a: i64, b: &Star<i64>| match b {
        Star::Inf => Some(a + 1),
        Star::Fin(b) if b - a >= 2 => Some(a + (b - a) / 2),
        Star::Fin(_) => None,
    };
    match (lo, hi) {
        (Coord::Int(a), Coord::Int(b)) => ints(*a, &Star::Fin(*b)).map(Coord::Int),
        (Coord::SInt(Star::Fin(a)), Coord::SInt(b)) => ints(*a, b).map(|v| Coord::SInt(Star::Fin(v))),
        (Coord::SRat(Star::Fin(a)), Coord::SRat(Star::Fin(b))) => Some(Coord::SRat(Star::Fin(midpoint(a, b)))),
        (Coord::SRat(Star::Fin(a)), Coord::SRat(Star::Inf)) => Some(Coord::SRat(Star::Fin(a + one()))),
        _ => None,
    }
}

/// Assumes p < q and both of the same shape.
fn between_lex(p: &Point, q: &Point) -> Point {
    let (cp, cq) = (p.coords(), q.coords());
    let d = (0..cp.len()).find(|&i| cp[i] != cq[i]).expect("p < q differ somewhere");
    if let Some(v) = strictly_between(&cp[d], &cq[d]) {
        let mut c = cp[..d].to_vec();
        c.push(v);
        c.extend(cp[d + 1..].iter().map(zero_like));
        return Point::from_coords(p, c);
    }
    above_tail(p, d + 1).unwrap_or_else(|| below_last(q))
}

fn zigzag(n: u64) -> i64 {
    if n % 2 == 0 {
        (n / 2) as i64
    } else {
        -(n.div_ceil(2) as i64)
    }
}

fn zstar(n: u64) -> Star<i64> {
    if n == 0 {
        Star::Inf
    } else {
        Star::Fin(zigzag(n - 1))
    }
}

fn qstar(n: u64) -> Star<Rational> {
    if n == 0 {
        Star::Inf
    } else {
        Star::Fin(enumerate_q(n - 1))
    }
}

fn unpair(z: u64) -> (u64, u64) {
    let w = ((((8 * z as u128 + 1) as f64).sqrt() as u128).saturating_sub(1) / 2) as u64;
    // correct the float estimate
    let mut w = w;
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    while w * (w + 1) / 2 > z {
        w -= 1;
    }
    let t = w * (w + 1) / 2;
    let y = z - t;
    (w - y, y)
}

fn unpair_n(z: u64, n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut rest = z;
    for _ in 0..n - 1 {
        let (a, b) = unpair(rest);
        out.push(a);
        rest = b;
    }
    out.push(rest);
    out
}
