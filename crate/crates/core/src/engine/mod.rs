//! Immutable expression DAG of order-automorphisms with exact lazy evaluation.
//!
//! Right action throughout: `compose([f, g])` applies `f` first, and
//! `conjugate(g, f)` is `f^-1 g f`.

pub mod cert;
pub mod pl;

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

use num_traits::Zero;
use parking_lot::Mutex;

use crate::error::{Error, Result};
use crate::iso::OrderIso;
use crate::order::rational::{floor_int, int, Rational};
use crate::order::{Point, Universe};
pub use cert::{certify_bound, certify_support, BoundCertificate, Region, SupportCertificate};
pub use pl::{Affine, PlMap};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);
static DEFAULT_FUEL: AtomicU64 = AtomicU64::new(1_000_000);

pub(crate) fn fresh_id() -> u64 {
    NEXT_ID.fetch_add(1, AtomicOrdering::Relaxed)
}

/// Sets the per-query orbit-search budget used by `forward`/`backward`.
pub fn set_default_fuel(fuel: u64) {
    DEFAULT_FUEL.store(fuel, AtomicOrdering::Relaxed);
}

pub fn default_fuel() -> u64 {
    DEFAULT_FUEL.load(AtomicOrdering::Relaxed)
}

/// Evaluation budget. Only orbit searches spend fuel.
#[derive(Debug)]
pub struct Ctx {
    pub fuel: u64,
}

impl Default for Ctx {
    fn default() -> Self {
        Ctx { fuel: default_fuel() }
    }
}

impl Ctx {
    pub fn spend(&mut self, node: impl FnOnce() -> String) -> Result<()> {
        if self.fuel == 0 {
            return Err(Error::Fuel { node: node() });
        }
        self.fuel -= 1;
        Ok(())
    }
}

/// First-coordinate residues outside of which a map of a product universe is the
/// identity. Maps reporting this also preserve the first coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blocks {
    pub modulus: i64,
    pub residues: Vec<i64>,
}

impl Blocks {
    pub fn contains(&self, i: i64) -> bool {
        self.residues.contains(&i.rem_euclid(self.modulus))
    }

    fn shifted(&self, by: i64) -> Blocks {
        let mut r: Vec<i64> = self.residues.iter().map(|v| (v + by).rem_euclid(self.modulus)).collect();
        r.sort();
        r.dedup();
        Blocks { modulus: self.modulus, residues: r }
    }
}

/// Hook for node kinds defined outside the engine (fiber actions, conjugators, interpolations).
pub trait PointMap: Send + Sync {
    fn universe(&self) -> Universe;
    fn name(&self) -> String;
    fn forward(&self, x: &Point, cx: &mut Ctx) -> Result<Point>;
    fn backward(&self, x: &Point, cx: &mut Ctx) -> Result<Point>;
    /// Closed form for the k-th power, when one exists.
    fn power(&self, _k: i64) -> Option<Automorphism> {
        None
    }
    fn blocks(&self) -> Option<Blocks> {
        None
    }
    fn memoize(&self) -> bool {
        false
    }
    /// Pure first-coordinate shift by this amount, if that is what the map is.
    fn block_shift(&self) -> Option<i64> {
        None
    }
}

pub enum Kind {
    Identity,
    Translation(Rational),
    Pl(PlMap),
    Min(Vec<Automorphism>),
    Max(Vec<Automorphism>),
    Compose(Vec<Automorphism>),
    Inverse(Automorphism),
    Power(Automorphism, i64),
    /// Acts as `inner` on every `[n*j + 2i, n*j + 2i + 2]` and fixes everything else.
    Window { inner: Automorphism, modulus: i64, index: i64 },
    /// `inner` lives on the iso's domain; the node acts on its codomain.
    Transport { iso: OrderIso, inner: Automorphism },
    Custom(Arc<dyn PointMap>),
}

const MEMO_CAP: usize = 1 << 10;

#[derive(Default)]
struct Memo {
    fwd: HashMap<Point, Point>,
    bwd: HashMap<Point, Point>,
}

pub struct Node {
    id: u64,
    universe: Universe,
    kind: Kind,
    label: Option<String>,
    memo: Option<Mutex<Memo>>,
    blocks: Option<Blocks>,
    shift: Option<i64>,
}

#[derive(Clone)]
pub struct Automorphism(Arc<Node>);

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Automorphism#{}({})", self.0.id, self.describe())
    }
}

fn same_universe(gs: &[Automorphism]) -> Result<Universe> {
    let u = gs[0].universe().clone();
    for g in &gs[1..] {
        if g.universe() != &u {
            return Err(Error::UniverseMismatch(format!("{} vs {}", u, g.universe())));
        }
    }
    Ok(u)
}

impl Automorphism {
    fn build(universe: Universe, kind: Kind) -> Automorphism {
        let memo = match &kind {
            Kind::Custom(m) if m.memoize() => Some(Mutex::new(Memo::default())),
            Kind::Min(_) | Kind::Max(_) | Kind::Window { .. } => {
                Some(Mutex::new(Memo::default()))
            }
            _ => None,
        };
        let blocks = blocks_of(&kind);
        let shift = shift_of(&kind);
        Automorphism(Arc::new(Node { id: fresh_id(), universe, kind, label: None, memo, blocks, shift }))
    }

    pub fn identity(u: Universe) -> Automorphism {
        Self::build(u, Kind::Identity)
    }

    pub fn translation(r: Rational) -> Automorphism {
        if r.is_zero() {
            return Self::identity(Universe::QLine);
        }
        Self::build(Universe::QLine, Kind::Translation(r))
    }

    pub fn pl(p: PlMap) -> Automorphism {
        if p == PlMap::identity() {
            return Self::identity(Universe::QLine);
        }
        Self::build(Universe::QLine, Kind::Pl(p))
    }

    pub fn custom(m: Arc<dyn PointMap>) -> Automorphism {
        Self::build(m.universe(), Kind::Custom(m))
    }

    /// Acts as `inner` on the windows `[n*j + 2i, n*j + 2i + 2]`. `inner` must fix 2Z.
    pub fn window(inner: Automorphism, modulus: i64, index: i64) -> Result<Automorphism> {
        if inner.universe() != &Universe::QLine {
            return Err(Error::UniverseMismatch("window restriction lives on Q".into()));
        }
        if inner.is_identity() {
            return Ok(inner);
        }
        Ok(Self::build(Universe::QLine, Kind::Window { inner, modulus, index }))
    }

    pub fn transport(iso: &OrderIso, inner: &Automorphism) -> Result<Automorphism> {
        if inner.universe() != iso.domain() {
            return Err(Error::UniverseMismatch(format!(
                "transport of a map on {} through an iso from {}",
                inner.universe(),
                iso.domain()
            )));
        }
        if inner.is_identity() {
            return Ok(Self::identity(iso.codomain().clone()));
        }
        Ok(Self::build(iso.codomain().clone(), Kind::Transport { iso: iso.clone(), inner: inner.clone() }))
    }

    /// Attaches a display name (used in diagnostics and fuel errors).
    pub fn named(self, label: &str) -> Automorphism {
        let node = &self.0;
        let kind = match &node.kind {
            Kind::Identity => Kind::Identity,
            Kind::Translation(r) => Kind::Translation(r.clone()),
            Kind::Pl(p) => Kind::Pl(p.clone()),
            Kind::Min(v) => Kind::Min(v.clone()),
            Kind::Max(v) => Kind::Max(v.clone()),
            Kind::Compose(v) => Kind::Compose(v.clone()),
            Kind::Inverse(g) => Kind::Inverse(g.clone()),
            Kind::Power(g, k) => Kind::Power(g.clone(), *k),
            Kind::Window { inner, modulus, index } => {
                Kind::Window { inner: inner.clone(), modulus: *modulus, index: *index }
            }
            Kind::Transport { iso, inner } => Kind::Transport { iso: iso.clone(), inner: inner.clone() },
            Kind::Custom(m) => Kind::Custom(m.clone()),
        };
        let mut out = Self::build(node.universe.clone(), kind);
        Arc::get_mut(&mut out.0).expect("fresh node").label = Some(label.to_string());
        out
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn universe(&self) -> &Universe {
        &self.0.universe
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.0.kind, Kind::Identity)
    }

    pub fn blocks(&self) -> Option<&Blocks> {
        self.0.blocks.as_ref()
    }

    /// First-coordinate shift, when the node is a pure block shift.
    pub fn block_shift(&self) -> Option<i64> {
        self.0.shift
    }

    pub fn same(&self, other: &Automorphism) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn describe(&self) -> String {
        if let Some(l) = &self.0.label {
            return l.clone();
        }
        match &self.0.kind {
            Kind::Identity => "id".into(),
            Kind::Translation(r) => format!("x+{}", crate::order::fmt_rational(r)),
            Kind::Pl(p) => format!("pl[{} breaks]", p.breaks().len()),
            Kind::Min(v) => format!("min[{}]", v.len()),
            Kind::Max(v) => format!("max[{}]", v.len()),
            Kind::Compose(v) => format!("compose[{}]", v.len()),
            Kind::Inverse(g) => format!("({})^-1", g.describe()),
            Kind::Power(g, k) => format!("({})^{}", g.describe(), k),
            Kind::Window { inner, modulus, index } => {
                format!("window({}, n={}, i={})", inner.describe(), modulus, index)
            }
            Kind::Transport { inner, .. } => format!("transport({})", inner.describe()),
            Kind::Custom(m) => m.name(),
        }
    }

    pub fn forward(&self, x: &Point) -> Result<Point> {
        self.eval(x, false, &mut Ctx::default())
    }

    pub fn backward(&self, x: &Point) -> Result<Point> {
        self.eval(x, true, &mut Ctx::default())
    }

    pub fn forward_in(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        self.eval(x, false, cx)
    }

    pub fn backward_in(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        self.eval(x, true, cx)
    }

    /// Forward evaluation on Q, returning the rational.
    pub fn apply_q(&self, x: &Rational) -> Result<Rational> {
        Ok(self.forward(&Point::Q(x.clone()))?.as_q()?.clone())
    }

    pub fn apply_q_inv(&self, x: &Rational) -> Result<Rational> {
        Ok(self.backward(&Point::Q(x.clone()))?.as_q()?.clone())
    }

    pub fn clear_memo(&self) {
        if let Some(m) = &self.0.memo {
            let mut m = m.lock();
            m.fwd.clear();
            m.bwd.clear();
        }
    }

    pub fn eval(&self, x: &Point, inv: bool, cx: &mut Ctx) -> Result<Point> {
        if let Some(memo) = &self.0.memo {
            let m = memo.lock();
            let table = if inv { &m.bwd } else { &m.fwd };
            if let Some(y) = table.get(x) {
                return Ok(y.clone());
            }
        }
        let y = self.eval_raw(x, inv, cx)?;
        if let Some(memo) = &self.0.memo {
            let mut m = memo.lock();
            if m.fwd.len() > MEMO_CAP {
                m.fwd.clear();
                m.bwd.clear();
            }
            let (a, b) = if inv { (y.clone(), x.clone()) } else { (x.clone(), y.clone()) };
            m.fwd.insert(a.clone(), b.clone());
            m.bwd.insert(b, a);
        }
        Ok(y)
    }

    fn eval_raw(&self, x: &Point, inv: bool, cx: &mut Ctx) -> Result<Point> {
        if let Some(s) = self.0.shift {
            return Ok(x.shift_first(if inv { -s } else { s }));
        }
        match &self.0.kind {
            Kind::Identity => Ok(x.clone()),
            Kind::Translation(r) => {
                let v = x.as_q()?;
                Ok(Point::Q(if inv { v - r } else { v + r }))
            }
            Kind::Pl(p) => {
                let v = x.as_q()?;
                Ok(Point::Q(if inv { p.apply_inverse(v) } else { p.apply(v) }))
            }
            Kind::Min(gs) | Kind::Max(gs) => {
                // min{f,g}^-1 = max{f^-1, g^-1}
                let want_min = matches!(self.0.kind, Kind::Min(_)) != inv;
                let mut best: Option<Point> = None;
                for g in gs {
                    let y = g.eval(x, inv, cx)?;
                    best = Some(match best {
                        None => y,
                        Some(b) => {
                            if (y < b) == want_min && y != b {
                                y
                            } else {
                                b
                            }
                        }
                    });
                }
                Ok(best.expect("non-empty extremum"))
            }
            Kind::Compose(gs) => {
                let mut y = x.clone();
                if inv {
                    for g in gs.iter().rev() {
                        y = g.eval(&y, true, cx)?;
                    }
                } else {
                    for g in gs {
                        y = g.eval(&y, false, cx)?;
                    }
                }
                Ok(y)
            }
            Kind::Inverse(g) => g.eval(x, !inv, cx),
            Kind::Power(g, k) => {
                let k = if inv { -*k } else { *k };
                power_eval(g, k, x, cx)
            }
            Kind::Window { inner, modulus, index } => {
                let v = x.as_q()?;
                let start = Rational::from_integer(floor_int(&((v - int(2 * index)) / int(*modulus))))
                    * int(*modulus)
                    + int(2 * index);
                if v >= &start && v <= &(&start + int(2)) {
                    inner.eval(x, inv, cx)
                } else {
                    Ok(x.clone())
                }
            }
            Kind::Transport { iso, inner } => {
                let a = iso.backward(x, cx)?;
                let b = inner.eval(&a, inv, cx)?;
                iso.forward(&b, cx)
            }
            Kind::Custom(m) => {
                if inv {
                    m.backward(x, cx)
                } else {
                    m.forward(x, cx)
                }
            }
        }
    }
}

fn blocks_of(kind: &Kind) -> Option<Blocks> {
    match kind {
        Kind::Identity => None,
        Kind::Custom(m) => m.blocks(),
        Kind::Inverse(g) | Kind::Power(g, _) => g.blocks().cloned(),
        Kind::Compose(gs) => {
            // parts between block shifts act on shifted blocks
            let mut offset = 0i64;
            let mut acc: Option<Blocks> = None;
            for g in gs {
                if let Some(s) = g.block_shift() {
                    offset += s;
                    continue;
                }
                if g.is_identity() {
                    continue;
                }
                let b = g.blocks()?.shifted(-offset);
                acc = Some(match acc {
                    None => b,
                    Some(a) if a.modulus == b.modulus => {
                        let mut r = a.residues;
                        r.extend(b.residues);
                        r.sort();
                        r.dedup();
                        Blocks { modulus: a.modulus, residues: r }
                    }
                    Some(_) => return None,
                });
            }
            if offset != 0 {
                return None;
            }
            acc
        }
        _ => None,
    }
}

fn shift_of(kind: &Kind) -> Option<i64> {
    match kind {
        Kind::Transport { iso, inner } => match inner.kind() {
            Kind::Translation(r) => iso.block_shift(r),
            _ => None,
        },
        Kind::Custom(m) => m.block_shift(),
        _ => None,
    }
}

/// Evaluates `g^k` at `x`, dispatching to the active block when `g` is block-local.
fn power_eval(g: &Automorphism, k: i64, x: &Point, cx: &mut Ctx) -> Result<Point> {
    if k == 0 {
        return Ok(x.clone());
    }
    if let Kind::Custom(m) = g.kind() {
        if let Some(p) = m.power(k) {
            return p.eval(x, false, cx);
        }
    }
    if let (Some(blocks), Some(i)) = (g.blocks(), x.first()) {
        if !blocks.contains(i) {
            return Ok(x.clone());
        }
        if let Kind::Compose(parts) = g.kind() {
            if let Some(r) = restrict_to_block(parts, i) {
                return power_of_restricted(&r, k, x, cx);
            }
        }
    }
    iterate(g, k, x, cx)
}

fn iterate(g: &Automorphism, k: i64, x: &Point, cx: &mut Ctx) -> Result<Point> {
    let inv = k < 0;
    let mut y = x.clone();
    for step in 0..k.unsigned_abs() {
        let z = g.eval(&y, inv, cx)?;
        if step == 0 && z == y {
            return Ok(y);
        }
        y = z;
    }
    Ok(y)
}

/// Parts of a block-local composite that act on block `i`, with shifts merged.
fn restrict_to_block(parts: &[Automorphism], i: i64) -> Option<Vec<Automorphism>> {
    let mut offset = 0i64;
    let mut out: Vec<Automorphism> = Vec::new();
    let mut pending_shift = 0i64;
    let mut shift_nodes: Vec<(i64, Automorphism)> = Vec::new();
    for g in parts {
        if let Some(s) = g.block_shift() {
            offset += s;
            pending_shift += s;
            shift_nodes.push((s, g.clone()));
            continue;
        }
        let b = g.blocks()?;
        if !b.contains(i + offset) {
            continue;
        }
        if pending_shift != 0 {
            out.push(shift_node(pending_shift, &shift_nodes)?);
            pending_shift = 0;
        }
        out.push(g.clone());
    }
    if pending_shift != 0 {
        out.push(shift_node(pending_shift, &shift_nodes)?);
    }
    Some(out)
}

/// A block shift by `s`, built from one of the shift nodes seen in the composite.
fn shift_node(s: i64, seen: &[(i64, Automorphism)]) -> Option<Automorphism> {
    let (base_s, node) = seen.iter().find(|(v, _)| *v != 0)?;
    if s % base_s == 0 {
        return Some(power(node, s / base_s));
    }
    let unit = seen.iter().find(|(v, _)| v.abs() == 1).map(|(v, n)| (*v, n.clone()));
    if let Some((v, n)) = unit {
        return Some(power(&n, s * v));
    }
    match node.kind() {
        Kind::Transport { iso, inner } => match inner.kind() {
            Kind::Translation(r) => {
                let unit = r / int(*base_s);
                Automorphism::transport(iso, &Automorphism::translation(unit * int(s))).ok()
            }
            _ => None,
        },
        _ => None,
    }
}

fn power_of_restricted(parts: &[Automorphism], k: i64, x: &Point, cx: &mut Ctx) -> Result<Point> {
    match parts {
        [] => Ok(x.clone()),
        [single] => power_eval(single, k, x, cx),
        [s, inner, t] if s.block_shift().is_some() && s.block_shift().map(|v| -v) == t.block_shift() => {
            let y = s.eval(x, false, cx)?;
            let z = power_eval(inner, k, &y, cx)?;
            t.eval(&z, false, cx)
        }
        _ => {
            let g = compose(parts).map_err(|e| Error::Construction(e.to_string()))?;
            iterate(&g, k, x, cx)
        }
    }
}

fn base_exp(g: &Automorphism) -> (Automorphism, i64) {
    match g.kind() {
        Kind::Power(b, k) => (b.clone(), *k),
        Kind::Inverse(b) => (b.clone(), -1),
        _ => (g.clone(), 1),
    }
}

fn try_merge(a: &Automorphism, b: &Automorphism) -> Option<Automorphism> {
    match (a.kind(), b.kind()) {
        (Kind::Translation(r), Kind::Translation(s)) => return Some(Automorphism::translation(r + s)),
        (Kind::Transport { iso: i1, inner: x1 }, Kind::Transport { iso: i2, inner: x2 }) if i1.same(i2) => {
            let inner = compose(&[x1.clone(), x2.clone()]).ok()?;
            return Automorphism::transport(i1, &inner).ok();
        }
        _ => {}
    }
    let (ba, ka) = base_exp(a);
    let (bb, kb) = base_exp(b);
    if ba.same(&bb) {
        return Some(power(&ba, ka + kb));
    }
    None
}

/// Composite applying `gs[0]` first. Flattens, drops identities and merges
/// neighbouring powers of one base, translations and same-iso transports.
pub fn compose(gs: &[Automorphism]) -> Result<Automorphism> {
    if gs.is_empty() {
        return Err(Error::Precondition("compose of an empty list".into()));
    }
    let u = same_universe(gs)?;
    let mut stack: Vec<Automorphism> = Vec::new();
    let mut flat: Vec<Automorphism> = Vec::new();
    for g in gs {
        match g.kind() {
            Kind::Compose(inner) if g.0.label.is_none() => flat.extend(inner.iter().cloned()),
            _ => flat.push(g.clone()),
        }
    }
    for g in flat {
        if g.is_identity() {
            continue;
        }
        let mut cur = g;
        loop {
            match stack.last() {
                Some(top) => match try_merge(top, &cur) {
                    Some(m) => {
                        stack.pop();
                        if m.is_identity() {
                            break;
                        }
                        cur = m;
                    }
                    None => {
                        stack.push(cur);
                        break;
                    }
                },
                None => {
                    stack.push(cur);
                    break;
                }
            }
        }
    }
    let items = stack;
    Ok(match items.len() {
        0 => Automorphism::identity(u),
        1 => items.into_iter().next().expect("one item"),
        _ => Automorphism::build(u, Kind::Compose(items)),
    })
}

pub fn compose2(f: &Automorphism, g: &Automorphism) -> Result<Automorphism> {
    compose(&[f.clone(), g.clone()])
}

pub fn inverse(g: &Automorphism) -> Automorphism {
    let u = g.universe().clone();
    match g.kind() {
        Kind::Identity => g.clone(),
        Kind::Translation(r) => Automorphism::translation(-r.clone()),
        Kind::Pl(p) => Automorphism::pl(p.inverse()),
        Kind::Inverse(h) => h.clone(),
        Kind::Power(h, k) => power(h, -k),
        Kind::Transport { iso, inner } => {
            Automorphism::transport(iso, &inverse(inner)).expect("same universes as the original")
        }
        Kind::Min(v) => Automorphism::build(u, Kind::Max(v.iter().map(inverse).collect())),
        Kind::Max(v) => Automorphism::build(u, Kind::Min(v.iter().map(inverse).collect())),
        Kind::Compose(v) if g.0.label.is_none() => {
            let parts: Vec<Automorphism> = v.iter().rev().map(inverse).collect();
            compose(&parts).expect("non-empty, same universe")
        }
        _ => Automorphism::build(u, Kind::Inverse(g.clone())),
    }
}

pub fn power(g: &Automorphism, k: i64) -> Automorphism {
    if k == 0 {
        return Automorphism::identity(g.universe().clone());
    }
    if k == 1 {
        return g.clone();
    }
    match g.kind() {
        Kind::Identity => g.clone(),
        Kind::Translation(r) => Automorphism::translation(r * int(k)),
        Kind::Power(h, j) => power(h, j * k),
        Kind::Inverse(h) => power(h, -k),
        Kind::Transport { iso, inner } => {
            Automorphism::transport(iso, &power(inner, k)).expect("same universes as the original")
        }
        Kind::Custom(m) => match m.power(k) {
            Some(p) => p,
            None => Automorphism::build(g.universe().clone(), Kind::Power(g.clone(), k)),
        },
        // (q^-1 x q)^k = q^-1 x^k q, so the inner node's own power applies
        Kind::Compose(fs) if fs.len() == 3 && inverse_pair(&fs[0], &fs[2]) => {
            conjugate(&power(&fs[1], k), &fs[2]).expect("same universes as the original")
        }
        _ if k == -1 => inverse(g),
        _ => Automorphism::build(g.universe().clone(), Kind::Power(g.clone(), k)),
    }
}

fn inverse_pair(a: &Automorphism, b: &Automorphism) -> bool {
    match (a.kind(), b.kind()) {
        (Kind::Inverse(h), _) if h.same(b) => true,
        (_, Kind::Inverse(h)) if h.same(a) => true,
        (Kind::Translation(r), Kind::Translation(s)) => *r == -s,
        (Kind::Identity, Kind::Identity) => true,
        (Kind::Transport { iso: i, inner: x }, Kind::Transport { iso: j, inner: y }) => i.same(j) && inverse_pair(x, y),
        _ => false,
    }
}

/// `f^-1 g f`
pub fn conjugate(g: &Automorphism, f: &Automorphism) -> Result<Automorphism> {
    compose(&[inverse(f), g.clone(), f.clone()])
}

/// `f^-1 g^-1 f g`
pub fn commutator(f: &Automorphism, g: &Automorphism) -> Result<Automorphism> {
    compose(&[inverse(f), inverse(g), f.clone(), g.clone()])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremum {
    Min,
    Max,
}

/// Pointwise minimum or maximum.
pub fn min_max(gs: &[Automorphism], mode: Extremum) -> Result<Automorphism> {
    if gs.is_empty() {
        return Err(Error::Precondition("extremum of an empty family".into()));
    }
    let u = same_universe(gs)?;
    if gs.len() == 1 {
        return Ok(gs[0].clone());
    }
    Ok(Automorphism::build(
        u,
        match mode {
            Extremum::Min => Kind::Min(gs.to_vec()),
            Extremum::Max => Kind::Max(gs.to_vec()),
        },
    ))
}

/// Collapses a subtree of PL-closed kinds into one PL map; other subtrees come back unchanged.
pub fn normalize_pl(g: &Automorphism) -> Automorphism {
    match to_pl(g) {
        Some(p) => Automorphism::pl(p),
        None => g.clone(),
    }
}

pub fn to_pl(g: &Automorphism) -> Option<PlMap> {
    if g.universe() != &Universe::QLine {
        return None;
    }
    match g.kind() {
        Kind::Identity => Some(PlMap::identity()),
        Kind::Translation(r) => Some(PlMap::translation(r.clone())),
        Kind::Pl(p) => Some(p.clone()),
        Kind::Compose(v) => {
            let mut acc = PlMap::identity();
            for h in v {
                acc = acc.then(&to_pl(h)?);
            }
            Some(acc)
        }
        Kind::Inverse(h) => Some(to_pl(h)?.inverse()),
        Kind::Power(h, k) => Some(to_pl(h)?.power(*k)),
        Kind::Min(v) | Kind::Max(v) => {
            let maps: Option<Vec<PlMap>> = v.iter().map(to_pl).collect();
            Some(PlMap::extremum(&maps?, matches!(g.kind(), Kind::Min(_))))
        }
        _ => None,
    }
}

/// `x -> x + r` on Q.
pub fn shift(r: Rational) -> Automorphism {
    Automorphism::translation(r)
}

pub fn identity_q() -> Automorphism {
    Automorphism::identity(Universe::QLine)
}

struct UnitExtension(Automorphism);

impl UnitExtension {
    fn apply(&self, x: &Point, inv: bool, cx: &mut Ctx) -> Result<Point> {
        if !Universe::UnitInterval.contains(x) {
            return Ok(x.clone());
        }
        if inv {
            self.0.backward_in(x, cx)
        } else {
            self.0.forward_in(x, cx)
        }
    }
}

impl PointMap for UnitExtension {
    fn universe(&self) -> Universe {
        Universe::QLine
    }

    fn name(&self) -> String {
        format!("ext({})", self.0.describe())
    }

    fn forward(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        self.apply(x, false, cx)
    }

    fn backward(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        self.apply(x, true, cx)
    }

    fn power(&self, k: i64) -> Option<Automorphism> {
        Some(extend_by_identity(&power(&self.0, k)).expect("unit interval"))
    }
}

/// An automorphism of `(-1, 1)` acting on Q, fixing everything outside.
pub fn extend_by_identity(g: &Automorphism) -> Result<Automorphism> {
    if g.universe() != &Universe::UnitInterval {
        return Err(Error::UniverseMismatch(format!("{} vs (-1,1)", g.universe())));
    }
    if g.is_identity() {
        return Ok(identity_q());
    }
    Ok(Automorphism::custom(Arc::new(UnitExtension(g.clone()))))
}
