use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{fmt_rational, parse_rational, Rational};
use crate::error::{Error, Result};

/// A base value or the adjoined maximum. Variant order gives `Fin(_) < Inf`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Star<T> {
    Fin(T),
    Inf,
}

impl<T> Star<T> {
    pub fn fin(&self) -> Option<&T> {
        match self {
            Star::Fin(v) => Some(v),
            Star::Inf => None,
        }
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, Star::Inf)
    }

    /// Applies `f` to finite values; the top element is fixed.
    pub fn map<U>(&self, f: impl FnOnce(&T) -> U) -> Star<U> {
        match self {
            Star::Fin(v) => Star::Fin(f(v)),
            Star::Inf => Star::Inf,
        }
    }
}

impl Star<i64> {
    pub fn shift(&self, by: i64) -> Star<i64> {
        self.map(|v| v + by)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Q(Rational),
    O3 {
        i: i64,
        j: Star<i64>,
        x: Star<Rational>,
    },
    O4 {
        i: i64,
        j: Star<i64>,
        m: Star<i64>,
        x: Star<Rational>,
    },
}

pub fn q(r: Rational) -> Point {
    Point::Q(r)
}

pub fn o4(i: i64, j: i64, m: i64, x: Rational) -> Point {
    Point::O4 { i, j: Star::Fin(j), m: Star::Fin(m), x: Star::Fin(x) }
}

pub fn o3(i: i64, j: i64, x: Rational) -> Point {
    Point::O3 { i, j: Star::Fin(j), x: Star::Fin(x) }
}

/// One coordinate of a lexicographic tuple.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Coord {
    Int(i64),
    SInt(Star<i64>),
    SRat(Star<Rational>),
}

impl Point {
    pub fn kind(&self) -> &'static str {
        match self {
            Point::Q(_) => "rational",
            Point::O3 { .. } => "Omega3",
            Point::O4 { .. } => "Omega4",
        }
    }

    pub fn as_q(&self) -> Result<&Rational> {
        match self {
            Point::Q(r) => Ok(r),
            other => Err(Error::UniverseMismatch(format!("expected a rational, got {other}"))),
        }
    }

    pub fn first(&self) -> Option<i64> {
        match self {
            Point::Q(_) => None,
            Point::O3 { i, .. } | Point::O4 { i, .. } => Some(*i),
        }
    }

    /// Same point with the first coordinate moved by `by`.
    pub fn shift_first(&self, by: i64) -> Point {
        match self {
            Point::Q(r) => Point::Q(r.clone()),
            Point::O3 { i, j, x } => Point::O3 { i: i + by, j: j.clone(), x: x.clone() },
            Point::O4 { i, j, m, x } => Point::O4 { i: i + by, j: j.clone(), m: m.clone(), x: x.clone() },
        }
    }

    pub(crate) fn coords(&self) -> Vec<Coord> {
        match self {
            Point::Q(r) => vec![Coord::SRat(Star::Fin(r.clone()))],
            Point::O3 { i, j, x } => vec![Coord::Int(*i), Coord::SInt(j.clone()), Coord::SRat(x.clone())],
            Point::O4 { i, j, m, x } => vec![
                Coord::Int(*i),
                Coord::SInt(j.clone()),
                Coord::SInt(m.clone()),
                Coord::SRat(x.clone()),
            ],
        }
    }

    pub(crate) fn from_coords(template: &Point, c: Vec<Coord>) -> Point {
        let int = |c: &Coord| match c {
            Coord::Int(v) => *v,
            _ => unreachable!("coordinate shape"),
        };
        let sint = |c: &Coord| match c {
            Coord::SInt(v) => v.clone(),
            _ => unreachable!("coordinate shape"),
        };
        let srat = |c: &Coord| match c {
            Coord::SRat(v) => v.clone(),
            _ => unreachable!("coordinate shape"),
        };
        match template {
            Point::Q(_) => match srat(&c[0]) {
                Star::Fin(r) => Point::Q(r),
                Star::Inf => unreachable!("rational line has no top"),
            },
            Point::O3 { .. } => Point::O3 { i: int(&c[0]), j: sint(&c[1]), x: srat(&c[2]) },
            Point::O4 { .. } => Point::O4 { i: int(&c[0]), j: sint(&c[1]), m: sint(&c[2]), x: srat(&c[3]) },
        }
    }

    fn same_shape(&self, other: &Point) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }
}

/// Lexicographic comparison, with the top element maximal in every coordinate.
pub fn compare(p: &Point, q: &Point) -> Result<Ordering> {
    if !p.same_shape(q) {
        return Err(Error::UniverseMismatch(format!("cannot compare {p} with {q}")));
    }
    Ok(p.cmp(q))
}

fn fmt_star_int(v: &Star<i64>) -> String {
    match v {
        Star::Fin(n) => n.to_string(),
        Star::Inf => "inf".into(),
    }
}

fn fmt_star_rat(v: &Star<Rational>) -> String {
    match v {
        Star::Fin(r) => fmt_rational(r),
        Star::Inf => "inf".into(),
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Q(r) => write!(f, "{}", fmt_rational(r)),
            Point::O3 { i, j, x } => write!(f, "({}, {}, {})", i, fmt_star_int(j), fmt_star_rat(x)),
            Point::O4 { i, j, m, x } => {
                write!(f, "({}, {}, {}, {})", i, fmt_star_int(j), fmt_star_int(m), fmt_star_rat(x))
            }
        }
    }
}

fn parse_star_int(s: &str) -> Result<Star<i64>> {
    let s = s.trim();
    if s == "inf" {
        return Ok(Star::Inf);
    }
    s.parse().map(Star::Fin).map_err(|_| Error::parse(0, format!("bad integer coordinate `{s}`")))
}

fn parse_star_rat(s: &str) -> Result<Star<Rational>> {
    let s = s.trim();
    if s == "inf" {
        return Ok(Star::Inf);
    }
    parse_rational(s).map(Star::Fin)
}

impl std::str::FromStr for Point {
    type Err = Error;

    fn from_str(s: &str) -> Result<Point> {
        let s = s.trim();
        let Some(inner) = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')) else {
            return parse_rational(s).map(Point::Q);
        };
        let parts: Vec<&str> = inner.split(',').collect();
        let first = |t: &str| -> Result<i64> {
            t.trim().parse().map_err(|_| Error::parse(0, format!("bad first coordinate `{t}`")))
        };
        match parts.len() {
            3 => Ok(Point::O3 { i: first(parts[0])?, j: parse_star_int(parts[1])?, x: parse_star_rat(parts[2])? }),
            4 => Ok(Point::O4 {
                i: first(parts[0])?,
                j: parse_star_int(parts[1])?,
                m: parse_star_int(parts[2])?,
                x: parse_star_rat(parts[3])?,
            }),
            n => Err(Error::parse(0, format!("expected 3 or 4 coordinates, found {n}"))),
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Point, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::rational::{int, rat};

    fn p4(i: i64, j: Star<i64>, m: Star<i64>, x: Star<Rational>) -> Point {
        Point::O4 { i, j, m, x }
    }

    #[test]
    fn lex_examples() {
        let a = o4(0, 0, 0, rat(1, 2));
        let b = o4(0, 0, 0, rat(3, 4));
        assert_eq!(compare(&a, &b).unwrap(), Ordering::Less);
        let c = p4(0, Star::Fin(0), Star::Fin(0), Star::Inf);
        let d = o4(0, 0, 1, int(-100));
        assert_eq!(compare(&c, &d).unwrap(), Ordering::Less);
        let e = p4(1, Star::Fin(-5), Star::Inf, Star::Inf);
        let f = p4(0, Star::Inf, Star::Inf, Star::Inf);
        assert_eq!(compare(&e, &f).unwrap(), Ordering::Greater);
    }

    #[test]
    fn mismatch_is_an_error() {
        assert!(compare(&q(int(0)), &o3(0, 0, int(0))).is_err());
    }

    #[test]
    fn text_round_trip() {
        for s in ["(1, -5, inf, inf)", "(0, 0, 2/3)", "-7/2"] {
            let p: Point = s.parse().unwrap();
            let back: Point = p.to_string().parse().unwrap();
            assert_eq!(p, back);
        }
        assert_eq!("(0, 0, 0, 1/2)".parse::<Point>().unwrap().to_string(), "(0, 0, 0, 1/2)");
    }
}
