//! Deterministic, memoized back-and-forth between countable dense orders.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use parking_lot::Mutex;

use super::{IsoMap, OrderIso};
use crate::engine::Ctx;
use crate::error::{Error, Result};
use crate::order::{Point, Universe};

#[derive(Default)]
struct State {
    fwd: BTreeMap<Point, Point>,
    bwd: BTreeMap<Point, Point>,
    /// Every pair in the order it was fixed; anchors first.
    log: Vec<(Point, Point)>,
    dom_cursor: u64,
    cod_cursor: u64,
    cod_turn: bool,
}

/// Extends the anchors one enumerated element at a time, alternating sides. Targets
/// are the canonical `between`/`above`/`below` of the neighbours' images.
pub struct BackAndForth {
    dom: Universe,
    cod: Universe,
    state: Mutex<State>,
}

fn image(table: &BTreeMap<Point, Point>, x: &Point, target: &Universe) -> Result<Point> {
    let below = table.range(..x.clone()).next_back().map(|(_, y)| y);
    let above = table.range(x.clone()..).next().map(|(_, y)| y);
    match (below, above) {
        (Some(p), Some(s)) => target.between(p, s),
        (Some(p), None) => target.above(p),
        (None, Some(s)) => target.below(s),
        (None, None) => target.enumerate(0),
    }
}

impl BackAndForth {
    pub fn new(dom: Universe, cod: Universe, anchors: &[(Point, Point)]) -> Result<Arc<BackAndForth>> {
        let mut st = State::default();
        for (x, y) in anchors {
            dom.check(x)?;
            cod.check(y)?;
            if st.fwd.contains_key(x) || st.bwd.contains_key(y) {
                return Err(Error::Construction(format!("anchor {x} -> {y} repeats a point")));
            }
            let lo = st.fwd.range(..x.clone()).next_back().map(|(_, v)| v);
            let hi = st.fwd.range(x.clone()..).next().map(|(_, v)| v);
            if lo.is_some_and(|v| v >= y) || hi.is_some_and(|v| v <= y) {
                return Err(Error::Construction(format!("anchor {x} -> {y} breaks monotonicity")));
            }
            st.fwd.insert(x.clone(), y.clone());
            st.bwd.insert(y.clone(), x.clone());
            st.log.push((x.clone(), y.clone()));
        }
        Ok(Arc::new(BackAndForth { dom, cod, state: Mutex::new(st) }))
    }

    /// Rebuilds from an exported table; agrees with the exporter on every exported pair.
    pub fn import(dom: Universe, cod: Universe, text: &str) -> Result<Arc<BackAndForth>> {
        let mut anchors = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (a, b) = line
                .split_once("->")
                .ok_or_else(|| Error::parse(n + 1, "expected `x -> y`"))?;
            let x: Point = a.trim().parse().map_err(|e: Error| Error::parse(n + 1, e.to_string()))?;
            let y: Point = b.trim().parse().map_err(|e: Error| Error::parse(n + 1, e.to_string()))?;
            anchors.push((x, y));
        }
        Self::new(dom, cod, &anchors)
    }

    pub fn export(&self) -> String {
        let st = self.state.lock();
        let mut s = String::new();
        for (x, y) in &st.log {
            let _ = writeln!(s, "{x} -> {y}");
        }
        s
    }

    pub fn len(&self) -> usize {
        self.state.lock().log.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iso(self: &Arc<Self>) -> OrderIso {
        OrderIso::custom(self.clone(), false)
    }

    fn step(&self, st: &mut State) -> Result<()> {
        if st.cod_turn {
            let mut y = self.cod.enumerate(st.cod_cursor)?;
            while st.bwd.contains_key(&y) {
                st.cod_cursor += 1;
                y = self.cod.enumerate(st.cod_cursor)?;
            }
            let x = image(&st.bwd, &y, &self.dom)?;
            st.fwd.insert(x.clone(), y.clone());
            st.bwd.insert(y.clone(), x.clone());
            st.log.push((x, y));
        } else {
            let mut x = self.dom.enumerate(st.dom_cursor)?;
            while st.fwd.contains_key(&x) {
                st.dom_cursor += 1;
                x = self.dom.enumerate(st.dom_cursor)?;
            }
            let y = image(&st.fwd, &x, &self.cod)?;
            st.fwd.insert(x.clone(), y.clone());
            st.bwd.insert(y.clone(), x.clone());
            st.log.push((x, y));
        }
        st.cod_turn = !st.cod_turn;
        Ok(())
    }

    fn run(&self, p: &Point, inverse: bool, cx: &mut Ctx) -> Result<Point> {
        let (src, _) = if inverse { (&self.cod, &self.dom) } else { (&self.dom, &self.cod) };
        src.check(p)?;
        let mut st = self.state.lock();
        loop {
            let table = if inverse { &st.bwd } else { &st.fwd };
            if let Some(v) = table.get(p) {
                return Ok(v.clone());
            }
            cx.spend(|| format!("back-and-forth {} -> {}", self.dom, self.cod))?;
            self.step(&mut st)?;
        }
    }
}

impl IsoMap for BackAndForth {
    fn domain(&self) -> Universe {
        self.dom.clone()
    }

    fn codomain(&self) -> Universe {
        self.cod.clone()
    }

    fn name(&self) -> String {
        format!("bnf({} -> {})", self.dom, self.cod)
    }

    fn forward(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        self.run(x, false, cx)
    }

    fn backward(&self, y: &Point, cx: &mut Ctx) -> Result<Point> {
        self.run(y, true, cx)
    }
}

pub fn back_and_forth(dom: Universe, cod: Universe, anchors: &[(Point, Point)]) -> Result<OrderIso> {
    Ok(BackAndForth::new(dom, cod, anchors)?.iso())
}
