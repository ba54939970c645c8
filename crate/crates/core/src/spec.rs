//! Sequence spec files.
//!
//! ```text
//! # comment
//! letters 2
//! samples 100
//! seed 7
//! target shift
//!   breaks
//!   segment 1 1
//! target double
//!   breaks
//!   segment 2 0
//! ```
//!
//! Indented lines after `target NAME` are the PL body; an empty body is the identity.

use crate::engine::{Automorphism, PlMap};
use crate::error::{Error, Result};
use crate::order::Rational;
use crate::order::Universe;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub letters: u8,
    pub samples: usize,
    pub seed: u64,
    pub n_max: Option<u64>,
    pub fuel: Option<u64>,
}

impl Default for Options {
    fn default() -> Self {
        Options { letters: 2, samples: 100, seed: 1, n_max: None, fuel: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Target {
    pub name: String,
    /// `None` is the identity.
    pub map: Option<PlMap>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceSpec {
    pub options: Options,
    pub targets: Vec<Target>,
}

fn number<T: std::str::FromStr>(line: usize, key: &str, v: Option<&str>) -> Result<T> {
    let v = v.ok_or_else(|| Error::parse(line, format!("`{key}` needs a value")))?;
    v.parse().map_err(|_| Error::parse(line, format!("bad value `{v}` for `{key}`")))
}

impl SequenceSpec {
    pub fn parse(text: &str) -> Result<SequenceSpec> {
        let lines: Vec<&str> = text.lines().collect();
        let mut options = Options::default();
        let mut targets = Vec::new();
        let mut k = 0;
        while k < lines.len() {
            let line_no = k + 1;
            let line = lines[k].split('#').next().unwrap_or("").trim();
            k += 1;
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            let key = words.next().unwrap_or("");
            let value = words.next();
            if words.next().is_some() {
                return Err(Error::parse(line_no, format!("trailing text after `{key}`")));
            }
            match key {
                "letters" => {
                    options.letters = number(line_no, key, value)?;
                    if !matches!(options.letters, 2 | 8) {
                        return Err(Error::parse(line_no, "letters must be 2 or 8"));
                    }
                }
                "samples" => options.samples = number(line_no, key, value)?,
                "seed" => options.seed = number(line_no, key, value)?,
                "n_max" => options.n_max = Some(number(line_no, key, value)?),
                "fuel" => options.fuel = Some(number(line_no, key, value)?),
                "target" => {
                    let name = value.ok_or_else(|| Error::parse(line_no, "target needs a name"))?.to_string();
                    if targets.iter().any(|t: &Target| t.name == name) {
                        return Err(Error::parse(line_no, format!("duplicate target `{name}`")));
                    }
                    let start = k;
                    while k < lines.len() && lines[k].starts_with(char::is_whitespace) {
                        k += 1;
                    }
                    let body = &lines[start..k];
                    let empty = body.iter().all(|l| l.split('#').next().unwrap_or("").trim().is_empty());
                    let map = if empty { None } else { Some(PlMap::parse_body(body, start + 1)?) };
                    targets.push(Target { name, map });
                }
                other => return Err(Error::parse(line_no, format!("unknown keyword `{other}`"))),
            }
        }
        if targets.is_empty() {
            return Err(Error::parse(lines.len().max(1), "no targets"));
        }
        Ok(SequenceSpec { options, targets })
    }

    /// Canonical text; parses back to the same spec.
    pub fn to_text(&self) -> String {
        let o = &self.options;
        let mut s = format!("letters {}\nsamples {}\nseed {}\n", o.letters, o.samples, o.seed);
        if let Some(n) = o.n_max {
            s.push_str(&format!("n_max {n}\n"));
        }
        if let Some(f) = o.fuel {
            s.push_str(&format!("fuel {f}\n"));
        }
        for t in &self.targets {
            s.push_str(&format!("target {}\n", t.name));
            if let Some(m) = &t.map {
                s.push_str(&m.to_text());
            }
        }
        s
    }

    pub fn automorphisms(&self) -> Vec<Automorphism> {
        self.targets
            .iter()
            .map(|t| match &t.map {
                Some(m) => Automorphism::pl(m.clone()),
                None => Automorphism::identity(Universe::QLine),
            })
            .collect()
    }

    /// Every breakpoint of the targets, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut bs: Vec<Rational> = self.targets.iter().filter_map(|t| t.map.as_ref()).flat_map(|m| m.breaks().to_vec()).collect();
        bs.sort();
        bs.dedup();
        bs
    }
}
