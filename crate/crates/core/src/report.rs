//! Sampled exact-equality reports.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::engine::Automorphism;
use crate::error::{Error, Result};
use crate::order::Point;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub point: String,
    pub lhs: String,
    pub rhs: String,
    pub equal: bool,
}

/// Per-check records and the conjunction verdict. Timings are kept out of the
/// serialized form so equal seeds give byte-identical files.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<Check>,
    pub verdict: bool,
    #[serde(skip)]
    pub timings: Vec<(String, Duration)>,
}

fn show(r: &Result<Point>) -> String {
    match r {
        Ok(p) => p.to_string(),
        Err(e) => format!("error: {e}"),
    }
}

impl VerificationReport {
    pub fn new(seed: u64, samples: usize) -> VerificationReport {
        VerificationReport { seed, samples, checks: Vec::new(), verdict: true, timings: Vec::new() }
    }

    pub fn record(&mut self, label: &str, point: &Point, lhs: Result<Point>, rhs: Result<Point>) -> bool {
        let equal = matches!((&lhs, &rhs), (Ok(a), Ok(b)) if a == b);
        self.verdict &= equal;
        self.checks.push(Check { label: label.into(), point: point.to_string(), lhs: show(&lhs), rhs: show(&rhs), equal });
        equal
    }

    /// A check that is not a point equation; `detail` goes in the lhs column.
    pub fn note(&mut self, label: &str, point: &Point, detail: String, ok: bool) -> bool {
        self.verdict &= ok;
        self.checks.push(Check { label: label.into(), point: point.to_string(), lhs: detail, rhs: "ok".into(), equal: ok });
        ok
    }

    /// `(x)f = (x)g` at every point.
    pub fn compare(&mut self, label: &str, f: &Automorphism, g: &Automorphism, pts: &[Point]) {
        for p in pts {
            self.record(label, p, f.forward(p), g.forward(p));
        }
    }

    /// `(x)f = x` at every point.
    pub fn fixes(&mut self, label: &str, f: &Automorphism, pts: &[Point]) {
        for p in pts {
            self.record(label, p, f.forward(p), Ok(p.clone()));
        }
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.verdict &= other.verdict;
        self.checks.extend(other.checks);
        self.timings.extend(other.timings);
    }

    pub fn timed<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.timings.push((stage.to_string(), t.elapsed()));
        out
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.equal)
    }

    pub fn count(&self, label: &str) -> usize {
        self.checks.iter().filter(|c| c.label == label).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<VerificationReport> {
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "seed {}\nsamples {}\nchecks {}\nfailures {}\nverdict {}\n",
            self.seed,
            self.samples,
            self.checks.len(),
            self.failures().count(),
            if self.verdict { "all-equal" } else { "FAILED" }
        );
        for c in self.failures().take(20) {
            s.push_str(&format!("  {} at {}: {} != {}\n", c.label, c.point, c.lhs, c.rhs));
        }
        s
    }
}
