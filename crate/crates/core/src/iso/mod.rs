//! Lazy order-isomorphisms between universes.

pub mod bnf;
pub mod lex;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed};
use parking_lot::Mutex;

use crate::engine::{fresh_id, Automorphism, Ctx};
use crate::error::{Error, Result};
use crate::order::rational::{fmt_rational, Rational};
use crate::order::{Point, Universe};

const MEMO_CAP: usize = 1 << 12;

pub use bnf::{back_and_forth, BackAndForth};
pub use lex::{phi_blocks8, phi_main, SurdCut};

/// Hook for closed-form and search-based isos defined in submodules.
pub trait IsoMap: Send + Sync {
    fn domain(&self) -> Universe;
    fn codomain(&self) -> Universe;
    fn name(&self) -> String;
    fn forward(&self, x: &Point, cx: &mut Ctx) -> Result<Point>;
    fn backward(&self, y: &Point, cx: &mut Ctx) -> Result<Point>;
    /// If conjugating `x -> x + r` through this iso is a pure first-coordinate shift, its size.
    fn block_shift(&self, _r: &Rational) -> Option<i64> {
        None
    }
}

pub enum IsoKind {
    /// x -> x / (1 - |x|) from (-1,1) onto Q.
    Psi,
    /// x -> x + r on Q.
    Shift(Rational),
    /// An automorphism read as an iso of its own universe.
    Auto(Automorphism),
    /// Applies `isos[0]` first.
    Compose(Vec<OrderIso>),
    Inverse(OrderIso),
    Custom(Arc<dyn IsoMap>),
}

struct IsoNode {
    id: u64,
    domain: Universe,
    codomain: Universe,
    kind: IsoKind,
    memo: Option<Mutex<(HashMap<Point, Point>, HashMap<Point, Point>)>>,
}

#[derive(Clone)]
pub struct OrderIso(Arc<IsoNode>);

impl fmt::Debug for OrderIso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrderIso#{}({} -> {})", self.0.id, self.0.domain, self.0.codomain)
    }
}

impl OrderIso {
    fn build(domain: Universe, codomain: Universe, kind: IsoKind, memo: bool) -> OrderIso {
        OrderIso(Arc::new(IsoNode {
            id: fresh_id(),
            domain,
            codomain,
            kind,
            memo: memo.then(|| Mutex::new((HashMap::new(), HashMap::new()))),
        }))
    }

    pub fn psi() -> OrderIso {
        Self::build(Universe::UnitInterval, Universe::QLine, IsoKind::Psi, false)
    }

    pub fn shift(r: Rational) -> OrderIso {
        Self::build(Universe::QLine, Universe::QLine, IsoKind::Shift(r), false)
    }

    pub fn from_auto(g: &Automorphism) -> OrderIso {
        let u = g.universe().clone();
        Self::build(u.clone(), u, IsoKind::Auto(g.clone()), false)
    }

    pub fn custom(m: Arc<dyn IsoMap>, memo: bool) -> OrderIso {
        Self::build(m.domain(), m.codomain(), IsoKind::Custom(m), memo)
    }

    /// Applies `isos[0]` first.
    pub fn compose(isos: &[OrderIso]) -> Result<OrderIso> {
        let first = isos.first().ok_or_else(|| Error::Precondition("empty iso chain".into()))?;
        for w in isos.windows(2) {
            if w[0].codomain() != w[1].domain() {
                return Err(Error::UniverseMismatch(format!(
                    "iso chain {} -> {} then {} -> {}",
                    w[0].domain(),
                    w[0].codomain(),
                    w[1].domain(),
                    w[1].codomain()
                )));
            }
        }
        if isos.len() == 1 {
            return Ok(first.clone());
        }
        let last = isos.last().expect("non-empty");
        Ok(Self::build(first.domain().clone(), last.codomain().clone(), IsoKind::Compose(isos.to_vec()), true))
    }

    pub fn inverse(&self) -> OrderIso {
        if let IsoKind::Inverse(inner) = &self.0.kind {
            return inner.clone();
        }
        Self::build(self.codomain().clone(), self.domain().clone(), IsoKind::Inverse(self.clone()), false)
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn same(&self, other: &OrderIso) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn domain(&self) -> &Universe {
        &self.0.domain
    }

    pub fn codomain(&self) -> &Universe {
        &self.0.codomain
    }

    pub fn kind(&self) -> &IsoKind {
        &self.0.kind
    }

    pub fn block_shift(&self, r: &Rational) -> Option<i64> {
        match &self.0.kind {
            IsoKind::Custom(m) => m.block_shift(r),
            // translations of Q commute with the leading shifts
            IsoKind::Compose(v) => {
                let (last, init) = v.split_last()?;
                if init.iter().all(|i| matches!(i.kind(), IsoKind::Shift(_))) {
                    last.block_shift(r)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        self.forward(x, &mut Ctx::default())
    }

    pub fn unapply(&self, y: &Point) -> Result<Point> {
        self.backward(y, &mut Ctx::default())
    }

    pub fn forward(&self, x: &Point, cx: &mut Ctx) -> Result<Point> {
        self.eval(x, false, cx)
    }

    pub fn backward(&self, y: &Point, cx: &mut Ctx) -> Result<Point> {
        self.eval(y, true, cx)
    }

    fn eval(&self, x: &Point, inv: bool, cx: &mut Ctx) -> Result<Point> {
        if let Some(m) = &self.0.memo {
            let m = m.lock();
            let t = if inv { &m.1 } else { &m.0 };
            if let Some(y) = t.get(x) {
                return Ok(y.clone());
            }
        }
        let y = self.eval_raw(x, inv, cx)?;
        if let Some(m) = &self.0.memo {
            let mut m = m.lock();
            if m.0.len() > MEMO_CAP {
                m.0.clear();
                m.1.clear();
            }
            let (a, b) = if inv { (y.clone(), x.clone()) } else { (x.clone(), y.clone()) };
            m.0.insert(a.clone(), b.clone());
            m.1.insert(b, a);
        }
        Ok(y)
    }

    fn eval_raw(&self, x: &Point, inv: bool, cx: &mut Ctx) -> Result<Point> {
        let source = if inv { self.codomain() } else { self.domain() };
        if !source.contains(x) {
            return Err(Error::Domain(format!("{x} is not in {source}")));
        }
        match &self.0.kind {
            IsoKind::Psi => {
                let v = x.as_q()?;
                let one = Rational::one();
                Ok(Point::Q(if inv { v / (&one + v.abs()) } else { v / (&one - v.abs()) }))
            }
            IsoKind::Shift(r) => {
                let v = x.as_q()?;
                Ok(Point::Q(if inv { v - r } else { v + r }))
            }
            IsoKind::Auto(g) => g.eval(x, inv, cx),
            IsoKind::Compose(v) => {
                let mut y = x.clone();
                if inv {
                    for i in v.iter().rev() {
                        y = i.eval(&y, true, cx)?;
                    }
                } else {
                    for i in v {
                        y = i.eval(&y, false, cx)?;
                    }
                }
                Ok(y)
            }
            IsoKind::Inverse(i) => i.eval(x, !inv, cx),
            IsoKind::Custom(m) => {
                if inv {
                    m.backward(x, cx)
                } else {
                    m.forward(x, cx)
                }
            }
        }
    }

    pub fn describe(&self) -> String {
        match &self.0.kind {
            IsoKind::Psi => "psi".into(),
            IsoKind::Shift(r) => format!("shift({})", fmt_rational(r)),
            IsoKind::Auto(g) => format!("auto({})", g.describe()),
            IsoKind::Compose(v) => v.iter().map(|i| i.describe()).collect::<Vec<_>>().join(" ; "),
            IsoKind::Inverse(i) => format!("({})^-1", i.describe()),
            IsoKind::Custom(m) => m.name(),
        }
    }
}

/// Transport between (-1,1) and Q: forward x/(1-|x|), backward y/(1+|y|).
pub fn psi() -> OrderIso {
    OrderIso::psi()
}
