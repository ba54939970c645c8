use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::order::rational::{fmt_rational, int, parse_rational, Rational};

/// Affine piece `x -> slope * x + intercept`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Affine {
    pub slope: Rational,
    pub intercept: Rational,
}

impl Affine {
    pub fn new(slope: Rational, intercept: Rational) -> Self {
        Affine { slope, intercept }
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        &self.slope * x + &self.intercept
    }

    pub fn invert(&self) -> Affine {
        let s = Rational::one() / &self.slope;
        Affine { intercept: -(&self.intercept * &s), slope: s }
    }

    /// self first, then other.
    pub fn then(&self, other: &Affine) -> Affine {
        Affine { slope: &self.slope * &other.slope, intercept: other.apply(&self.intercept) }
    }
}

/// Piecewise-linear bijection of Q: `pieces[t]` acts on `[breaks[t-1], breaks[t]]`,
/// with unbounded end rays.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlMap {
    breaks: Vec<Rational>,
    pieces: Vec<Affine>,
}

impl PlMap {
    pub fn new(breaks: Vec<Rational>, pieces: Vec<Affine>) -> Result<Self> {
        if pieces.len() != breaks.len() + 1 {
            return Err(Error::Invalid(format!(
                "{} breakpoints need {} segments, found {}",
                breaks.len(),
                breaks.len() + 1,
                pieces.len()
            )));
        }
        for w in breaks.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Invalid(format!(
                    "breakpoints not increasing at {}",
                    fmt_rational(&w[1])
                )));
            }
        }
        for (t, p) in pieces.iter().enumerate() {
            if p.slope <= Rational::zero() {
                return Err(Error::Invalid(format!("segment {t} has non-positive slope")));
            }
        }
        for (t, b) in breaks.iter().enumerate() {
            if pieces[t].apply(b) != pieces[t + 1].apply(b) {
                return Err(Error::Invalid(format!("discontinuity at {}", fmt_rational(b))));
            }
        }
        Ok(PlMap { breaks, pieces }.simplified())
    }

    pub fn identity() -> Self {
        Self::affine(Affine::new(int(1), int(0)))
    }

    pub fn affine(a: Affine) -> Self {
        PlMap { breaks: vec![], pieces: vec![a] }
    }

    pub fn translation(r: Rational) -> Self {
        Self::affine(Affine::new(int(1), r))
    }

    pub fn breaks(&self) -> &[Rational] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Affine] {
        &self.pieces
    }

    fn piece_at(&self, x: &Rational) -> &Affine {
        let idx = self.breaks.partition_point(|b| b <= x);
        &self.pieces[idx]
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        self.piece_at(x).apply(x)
    }

    pub fn image_breaks(&self) -> Vec<Rational> {
        self.breaks.iter().enumerate().map(|(t, b)| self.pieces[t].apply(b)).collect()
    }

    pub fn inverse(&self) -> PlMap {
        PlMap { breaks: self.image_breaks(), pieces: self.pieces.iter().map(Affine::invert).collect() }
    }

    pub fn apply_inverse(&self, y: &Rational) -> Rational {
        let imgs = self.image_breaks();
        let idx = imgs.partition_point(|b| b <= y);
        self.pieces[idx].invert().apply(y)
    }

    /// Merges neighbouring equal pieces.
    fn simplified(self) -> PlMap {
        let mut breaks = Vec::new();
        let mut pieces = vec![self.pieces[0].clone()];
        for (t, b) in self.breaks.into_iter().enumerate() {
            let next = self.pieces[t + 1].clone();
            if pieces.last() != Some(&next) {
                breaks.push(b);
                pieces.push(next);
            }
        }
        PlMap { breaks, pieces }
    }

    /// Builds a map from a sorted break list by sampling one interior point per interval.
    fn from_sampler(mut breaks: Vec<Rational>, piece: impl Fn(&Rational) -> Affine) -> PlMap {
        breaks.sort();
        breaks.dedup();
        let mut pieces = Vec::with_capacity(breaks.len() + 1);
        for t in 0..=breaks.len() {
            let probe = match (t.checked_sub(1).map(|i| &breaks[i]), breaks.get(t)) {
                (None, None) => int(0),
                (None, Some(b)) => b - int(1),
                (Some(a), None) => a + int(1),
                (Some(a), Some(b)) => (a + b) / int(2),
            };
            pieces.push(piece(&probe));
        }
        PlMap { breaks, pieces }.simplified()
    }

    /// self first, then other.
    pub fn then(&self, other: &PlMap) -> PlMap {
        let mut breaks = self.breaks.clone();
        breaks.extend(other.breaks.iter().map(|b| self.apply_inverse(b)));
        PlMap::from_sampler(breaks, |x| self.piece_at(x).then(other.piece_at(&self.apply(x))))
    }

    pub fn power(&self, k: i64) -> PlMap {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = PlMap::identity();
        for _ in 0..k.unsigned_abs() {
            acc = acc.then(&base);
        }
        acc
    }

    /// Pointwise minimum (`want_min`) or maximum of a family.
    pub fn extremum(maps: &[PlMap], want_min: bool) -> PlMap {
        let mut breaks: Vec<Rational> = maps.iter().flat_map(|m| m.breaks.iter().cloned()).collect();
        breaks.sort();
        breaks.dedup();
        // crossing points of every pair of active pieces on every interval
        let mut extra = Vec::new();
        let bounds: Vec<(Option<Rational>, Option<Rational>)> = (0..=breaks.len())
            .map(|t| (t.checked_sub(1).map(|i| breaks[i].clone()), breaks.get(t).cloned()))
            .collect();
        for (lo, hi) in &bounds {
            let probe = match (lo, hi) {
                (None, None) => int(0),
                (None, Some(b)) => b - int(1),
                (Some(a), None) => a + int(1),
                (Some(a), Some(b)) => (a + b) / int(2),
            };
            let active: Vec<&Affine> = maps.iter().map(|m| m.piece_at(&probe)).collect();
            for i in 0..active.len() {
                for j in i + 1..active.len() {
                    let ds = &active[i].slope - &active[j].slope;
                    if ds.is_zero() {
                        continue;
                    }
                    let x = (&active[j].intercept - &active[i].intercept) / ds;
                    let inside = lo.as_ref().is_none_or(|a| &x > a) && hi.as_ref().is_none_or(|b| &x < b);
                    if inside {
                        extra.push(x);
                    }
                }
            }
        }
        breaks.extend(extra);
        PlMap::from_sampler(breaks, |x| {
            let mut best = maps[0].piece_at(x);
            for m in &maps[1..] {
                let p = m.piece_at(x);
                let better = if want_min { p.apply(x) < best.apply(x) } else { p.apply(x) > best.apply(x) };
                if better {
                    best = p;
                }
            }
            best.clone()
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let bs: Vec<String> = self.breaks.iter().map(fmt_rational).collect();
        let _ = writeln!(s, "  breaks {}", bs.join(" "));
        for p in &self.pieces {
            let _ = writeln!(s, "  segment {} {}", fmt_rational(&p.slope), fmt_rational(&p.intercept));
        }
        s
    }

    /// Parses the body lines of a PL block (`breaks ...` then `segment slope intercept` lines).
    /// `first_line` is the 1-based line number of `lines[0]`, used in diagnostics.
    pub fn parse_body(lines: &[&str], first_line: usize) -> Result<PlMap> {
        let mut breaks = None;
        let mut pieces = Vec::new();
        for (off, raw) in lines.iter().enumerate() {
            let line_no = first_line + off;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            let head = words.next().unwrap_or("");
            let rat = |w: &str| {
                parse_rational(w).map_err(|e| match e {
                    Error::Parse { msg, .. } => Error::parse(line_no, msg),
                    other => other,
                })
            };
            match head {
                "breaks" => {
                    let bs: Result<Vec<Rational>> = words.map(rat).collect();
                    breaks = Some(bs?);
                }
                "segment" => {
                    let vals: Vec<&str> = words.collect();
                    if vals.len() != 2 {
                        return Err(Error::parse(line_no, "segment needs slope and intercept"));
                    }
                    pieces.push(Affine::new(rat(vals[0])?, rat(vals[1])?));
                }
                other => return Err(Error::parse(line_no, format!("unknown keyword `{other}`"))),
            }
        }
        let breaks = breaks.unwrap_or_default();
        PlMap::new(breaks, pieces).map_err(|e| Error::parse(first_line, e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::rational::rat;

    fn kink() -> PlMap {
        PlMap::new(vec![int(0)], vec![Affine::new(int(1), int(0)), Affine::new(int(2), int(0))]).unwrap()
    }

    #[test]
    fn forward_and_inverse() {
        let g = kink();
        assert_eq!(g.apply(&int(3)), int(6));
        assert_eq!(g.apply_inverse(&int(6)), int(3));
        assert_eq!(g.inverse().apply(&int(6)), int(3));
        assert_eq!(g.apply(&int(-3)), int(-3));
    }

    #[test]
    fn rejects_bad_maps() {
        assert!(PlMap::new(vec![int(0)], vec![Affine::new(int(1), int(0)), Affine::new(int(2), int(1))]).is_err());
        assert!(PlMap::new(vec![], vec![Affine::new(int(-1), int(0))]).is_err());
    }

    #[test]
    fn min_of_shift_and_doubling() {
        let t = PlMap::translation(int(1));
        let d = PlMap::affine(Affine::new(int(2), int(0)));
        let m = PlMap::extremum(&[t, d], true);
        assert_eq!(m.breaks(), &[int(1)]);
        assert_eq!(m.apply(&int(0)), int(0));
        assert_eq!(m.apply(&int(3)), int(4));
    }

    #[test]
    fn composition() {
        let g = kink();
        let t = PlMap::translation(int(1));
        let c = g.then(&t);
        for x in [-3, -1, 0, 1, 5] {
            assert_eq!(c.apply(&int(x)), g.apply(&int(x)) + int(1));
        }
        assert_eq!(g.then(&g.inverse()), PlMap::identity());
        assert_eq!(g.power(2).apply(&rat(1, 2)), int(2));
    }

    #[test]
    fn text_round_trip() {
        let g = kink();
        let text = g.to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(PlMap::parse_body(&lines, 1).unwrap(), g);
    }
}
