//! Group and semigroup words as shared trees, their evaluation, and the fixed word families.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::engine::{commutator, compose, conjugate, power, Automorphism};
use crate::error::{Error, Result};
use crate::order::Universe;

#[derive(Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Letter(Arc<str>, i64),
    Seq(Vec<Word>),
    Pow(Word, i64),
    /// `x^y = y^-1 x y`
    Conj(Word, Word),
    /// `[x, y] = x^-1 y^-1 x y`
    Comm(Word, Word),
}

/// A word; subtrees are shared, nothing is reduced unless asked.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word(Arc<Node>);

impl Word {
    pub fn empty() -> Word {
        Word(Arc::new(Node::Seq(Vec::new())))
    }

    pub fn letter(name: &str) -> Word {
        Word::letter_pow(name, 1)
    }

    pub fn letter_pow(name: &str, exp: i64) -> Word {
        if exp == 0 {
            return Word::empty();
        }
        Word(Arc::new(Node::Letter(name.into(), exp)))
    }

    pub fn seq(parts: Vec<Word>) -> Word {
        let parts: Vec<Word> = parts.into_iter().filter(|w| !w.is_empty()).collect();
        if parts.len() == 1 {
            return parts.into_iter().next().expect("one part");
        }
        Word(Arc::new(Node::Seq(parts)))
    }

    pub fn pow(&self, k: i64) -> Word {
        match (&*self.0, k) {
            (_, 1) => self.clone(),
            (_, 0) => Word::empty(),
            (Node::Letter(l, e), _) if e.checked_mul(k).is_some() => Word::letter_pow(l, e * k),
            _ if self.is_empty() => self.clone(),
            _ => Word(Arc::new(Node::Pow(self.clone(), k))),
        }
    }

    pub fn conj(&self, by: &Word) -> Word {
        Word(Arc::new(Node::Conj(self.clone(), by.clone())))
    }

    pub fn comm(&self, other: &Word) -> Word {
        Word(Arc::new(Node::Comm(self.clone(), other.clone())))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        matches!(&*self.0, Node::Seq(v) if v.is_empty())
    }

    /// The inverse as a tree: letters flip, sequences reverse, `[x,y]^-1 = [y,x]`.
    pub fn inv(&self) -> Word {
        match &*self.0 {
            Node::Letter(l, e) => Word::letter_pow(l, -e),
            Node::Seq(v) => Word::seq(v.iter().rev().map(Word::inv).collect()),
            Node::Pow(x, k) => Word(Arc::new(Node::Pow(x.clone(), -k))),
            Node::Conj(x, y) => x.inv().conj(y),
            Node::Comm(x, y) => y.comm(x),
        }
    }

    /// Letter/exponent pairs in order, without merging or cancelling.
    pub fn syllables(&self) -> Vec<(Arc<str>, i64)> {
        let mut out = Vec::new();
        self.push_syllables(false, &mut out);
        out
    }

    fn push_syllables(&self, inverted: bool, out: &mut Vec<(Arc<str>, i64)>) {
        let sub = |w: &Word, inv: bool, out: &mut Vec<(Arc<str>, i64)>| w.push_syllables(inv, out);
        match &*self.0 {
            Node::Letter(l, e) => out.push((l.clone(), if inverted { -e } else { *e })),
            Node::Seq(v) => {
                if inverted {
                    v.iter().rev().for_each(|w| sub(w, true, out));
                } else {
                    v.iter().for_each(|w| sub(w, false, out));
                }
            }
            Node::Pow(x, k) => {
                let inv = inverted ^ (*k < 0);
                for _ in 0..k.unsigned_abs() {
                    sub(x, inv, out);
                }
            }
            Node::Conj(x, y) => {
                sub(y, true, out);
                sub(x, inverted, out);
                sub(y, false, out);
            }
            Node::Comm(x, y) => {
                let (p, q) = if inverted { (y, x) } else { (x, y) };
                sub(p, true, out);
                sub(q, true, out);
                sub(p, false, out);
                sub(q, false, out);
            }
        }
    }

    /// Number of letters counted with multiplicity, without expanding.
    pub fn length(&self) -> u128 {
        let mut memo = HashMap::new();
        self.length_memo(&mut memo)
    }

    fn length_memo(&self, memo: &mut HashMap<*const Node, u128>) -> u128 {
        let key = Arc::as_ptr(&self.0);
        if let Some(v) = memo.get(&key) {
            return *v;
        }
        let v = match &*self.0 {
            Node::Letter(_, e) => e.unsigned_abs() as u128,
            Node::Seq(v) => v.iter().map(|w| w.length_memo(memo)).sum(),
            Node::Pow(x, k) => x.length_memo(memo) * k.unsigned_abs() as u128,
            Node::Conj(x, y) => x.length_memo(memo) + 2 * y.length_memo(memo),
            Node::Comm(x, y) => 2 * (x.length_memo(memo) + y.length_memo(memo)),
        };
        memo.insert(key, v);
        v
    }

    /// True when every letter occurs with positive exponent once conjugations are expanded.
    pub fn is_positive(&self) -> bool {
        self.positive_under(false)
    }

    fn positive_under(&self, inverted: bool) -> bool {
        match &*self.0 {
            Node::Letter(_, e) => (*e > 0) != inverted,
            Node::Seq(v) => v.iter().all(|w| w.positive_under(inverted)),
            Node::Pow(x, k) => x.positive_under(inverted ^ (*k < 0)),
            Node::Conj(x, y) => y.is_empty() && x.positive_under(inverted),
            Node::Comm(x, y) => x.is_empty() && y.is_empty(),
        }
    }

    pub fn letters(&self) -> Vec<Arc<str>> {
        let mut seen = BTreeMap::new();
        self.collect_letters(&mut seen);
        seen.into_keys().collect()
    }

    fn collect_letters(&self, out: &mut BTreeMap<Arc<str>, ()>) {
        match &*self.0 {
            Node::Letter(l, _) => {
                out.insert(l.clone(), ());
            }
            Node::Seq(v) => v.iter().for_each(|w| w.collect_letters(out)),
            Node::Pow(x, _) => x.collect_letters(out),
            Node::Conj(x, y) | Node::Comm(x, y) => {
                x.collect_letters(out);
                y.collect_letters(out);
            }
        }
    }

    /// Flat form like `HHF⁴⁸HF⁹⁶HF⁴⁷`.
    pub fn to_superscript(&self) -> String {
        let mut s = String::new();
        for (l, e) in self.syllables() {
            s.push_str(&l);
            if e != 1 {
                s.push_str(&superscript(e));
            }
        }
        s
    }

    /// Flat form like `F^48 H`.
    pub fn to_flat(&self) -> String {
        self.syllables()
            .iter()
            .map(|(l, e)| if *e == 1 { l.to_string() } else { format!("{l}^{e}") })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn stats(&self) -> WordStats {
        let mut nodes = HashMap::new();
        let depth = self.depth_count(&mut nodes);
        WordStats { length: self.length(), distinct_nodes: nodes.len(), depth, letters: self.letters().len() }
    }

    fn depth_count(&self, seen: &mut HashMap<*const Node, usize>) -> usize {
        let key = Arc::as_ptr(&self.0);
        if let Some(d) = seen.get(&key) {
            return *d;
        }
        let d = 1 + match &*self.0 {
            Node::Letter(..) => 0,
            Node::Seq(v) => v.iter().map(|w| w.depth_count(seen)).max().unwrap_or(0),
            Node::Pow(x, _) => x.depth_count(seen),
            Node::Conj(x, y) | Node::Comm(x, y) => x.depth_count(seen).max(y.depth_count(seen)),
        };
        seen.insert(key, d);
        d
    }

    /// Cancels and merges neighbouring letters inside each sequence; the tree shape is kept.
    pub fn free_reduce(&self) -> Word {
        match &*self.0 {
            Node::Letter(..) => self.clone(),
            Node::Seq(v) => {
                let mut out: Vec<Word> = Vec::new();
                for w in v.iter().map(Word::free_reduce) {
                    let flat = match &*w.0 {
                        Node::Seq(inner) => inner.clone(),
                        _ => vec![w.clone()],
                    };
                    for w in flat {
                        if let (Some(Node::Letter(l1, e1)), Node::Letter(l2, e2)) =
                            (out.last().map(|t| &*t.0), &*w.0)
                        {
                            if l1 == l2 {
                                let merged = Word::letter_pow(l1, e1 + e2);
                                out.pop();
                                if !merged.is_empty() {
                                    out.push(merged);
                                }
                                continue;
                            }
                        }
                        out.push(w);
                    }
                }
                if out.len() == v.len() && out.iter().zip(v).all(|(a, b)| a == b) {
                    self.clone()
                } else {
                    Word::seq(out)
                }
            }
            Node::Pow(x, k) => x.free_reduce().pow(*k),
            Node::Conj(x, y) => {
                let (x, y) = (x.free_reduce(), y.free_reduce());
                if y.is_empty() {
                    x
                } else {
                    x.conj(&y)
                }
            }
            Node::Comm(x, y) => {
                let (x, y) = (x.free_reduce(), y.free_reduce());
                if x.is_empty() || y.is_empty() {
                    Word::empty()
                } else {
                    x.comm(&y)
                }
            }
        }
    }

    /// Fully reduced letter/exponent pairs.
    pub fn reduced_syllables(&self) -> Vec<(Arc<str>, i64)> {
        let mut out: Vec<(Arc<str>, i64)> = Vec::new();
        for (l, e) in self.syllables() {
            match out.last_mut() {
                Some((l0, e0)) if *l0 == l => {
                    *e0 += e;
                    if *e0 == 0 {
                        out.pop();
                    }
                }
                _ => out.push((l, e)),
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Word> {
        let mut p = Parser { chars: text.chars().collect(), pos: 0 };
        let w = p.word()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(Error::parse(1, format!("unexpected `{}` at column {}", p.chars[p.pos], p.pos + 1)));
        }
        Ok(w)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct WordStats {
    pub length: u128,
    pub distinct_nodes: usize,
    pub depth: usize,
    pub letters: usize,
}

fn superscript(e: i64) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    let mut s = String::new();
    if e < 0 {
        s.push('⁻');
    }
    for c in e.unsigned_abs().to_string().chars() {
        s.push(DIGITS[c.to_digit(10).expect("digit") as usize]);
    }
    s
}

fn from_superscript(c: char) -> Option<u32> {
    "⁰¹²³⁴⁵⁶⁷⁸⁹".chars().position(|d| d == c).map(|p| p as u32)
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Letter(l, 1) => write!(f, "{l}"),
            Node::Letter(l, e) => write!(f, "{l}^{e}"),
            Node::Seq(v) if v.is_empty() => write!(f, "1"),
            Node::Seq(v) => {
                for (i, w) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{w}")?;
                }
                Ok(())
            }
            Node::Pow(x, k) => write!(f, "({x})^{k}"),
            Node::Conj(x, y) => {
                if x.is_atomic() {
                    write!(f, "{x}^({y})")
                } else {
                    write!(f, "({x})^({y})")
                }
            }
            Node::Comm(x, y) => write!(f, "[{x}, {y}]"),
        }
    }
}

impl Word {
    fn is_atomic(&self) -> bool {
        matches!(&*self.0, Node::Letter(_, 1) | Node::Comm(..))
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && (self.chars[self.pos].is_whitespace() || "·*".contains(self.chars[self.pos])) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn err(&self, msg: &str) -> Error {
        Error::parse(1, format!("{msg} at column {}", self.pos + 1))
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{c}`")))
        }
    }

    fn word(&mut self) -> Result<Word> {
        let mut parts = Vec::new();
        while let Some(c) = self.peek() {
            if c.is_alphabetic() || c == '(' || c == '[' || c == '{' || c == '1' {
                parts.push(self.factor()?);
            } else {
                break;
            }
        }
        Ok(Word::seq(parts))
    }

    fn atom(&mut self) -> Result<Word> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let w = self.word()?;
                self.expect(')')?;
                Ok(w)
            }
            Some('{') => {
                self.pos += 1;
                let w = self.word()?;
                self.expect('}')?;
                Ok(w)
            }
            Some('[') => {
                self.pos += 1;
                let x = self.word()?;
                self.expect(',')?;
                let y = self.word()?;
                self.expect(']')?;
                Ok(x.comm(&y))
            }
            Some('1') => {
                self.pos += 1;
                Ok(Word::empty())
            }
            Some(c) if c.is_alphabetic() => {
                self.pos += 1;
                Ok(Word::letter(&c.to_string()))
            }
            _ => Err(self.err("expected a letter, `(` or `[`")),
        }
    }

    fn integer(&mut self) -> Result<i64> {
        let neg = if matches!(self.peek(), Some('-') | Some('⁻')) {
            self.pos += 1;
            true
        } else {
            false
        };
        let start = self.pos;
        let mut v: i64 = 0;
        while let Some(c) = self.chars.get(self.pos).copied() {
            let d = c.to_digit(10).or_else(|| from_superscript(c));
            match d {
                Some(d) => {
                    v = v.checked_mul(10).and_then(|v| v.checked_add(d as i64)).ok_or_else(|| self.err("exponent overflows"))?;
                    self.pos += 1;
                }
                None => break,
            }
        }
        if self.pos == start {
            return Err(self.err("expected an exponent"));
        }
        Ok(if neg { -v } else { v })
    }

    fn factor(&mut self) -> Result<Word> {
        let mut w = self.atom()?;
        loop {
            match self.chars.get(self.pos).copied() {
                Some(c) if c == '⁻' || from_superscript(c).is_some() => {
                    let k = self.integer()?;
                    w = w.pow(k);
                }
                Some('^') => {
                    self.pos += 1;
                    match self.peek() {
                        Some(c) if c == '-' || c.is_ascii_digit() => {
                            let k = self.integer()?;
                            w = w.pow(k);
                        }
                        _ => {
                            let by = self.atom()?;
                            w = w.conj(&by);
                        }
                    }
                }
                _ => return Ok(w),
            }
        }
    }
}

/// Letters mapped to automorphisms of one universe.
#[derive(Clone, Default)]
pub struct Assignment {
    map: BTreeMap<String, Automorphism>,
}

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn with(mut self, letter: &str, g: Automorphism) -> Result<Assignment> {
        self.insert(letter, g)?;
        Ok(self)
    }

    pub fn insert(&mut self, letter: &str, g: Automorphism) -> Result<()> {
        if let Some(u) = self.universe() {
            if u != g.universe() {
                return Err(Error::UniverseMismatch(format!("letter {letter} acts on {}, others on {u}", g.universe())));
            }
        }
        self.map.insert(letter.to_string(), g);
        Ok(())
    }

    pub fn get(&self, letter: &str) -> Option<&Automorphism> {
        self.map.get(letter)
    }

    pub fn universe(&self) -> Option<&Universe> {
        self.map.values().next().map(|g| g.universe())
    }

    pub fn letters(&self) -> impl Iterator<Item = (&String, &Automorphism)> {
        self.map.iter()
    }
}

/// The composite the word denotes; shared subtrees evaluate to shared nodes.
pub fn evaluate(w: &Word, asg: &Assignment) -> Result<Automorphism> {
    let u = asg.universe().cloned().ok_or_else(|| match w.letters().first() {
        Some(l) => Error::Unassigned(l.to_string()),
        None => Error::Precondition("empty assignment".into()),
    })?;
    let mut memo = HashMap::new();
    eval_memo(w, asg, &u, &mut memo)
}

/// As [`evaluate`], with the given subwords (matched by node identity) bound to fixed values.
pub fn evaluate_with(w: &Word, asg: &Assignment, known: &[(Word, Automorphism)]) -> Result<Automorphism> {
    let u = asg.universe().cloned().ok_or_else(|| Error::Precondition("empty assignment".into()))?;
    let mut memo: HashMap<*const Node, Automorphism> =
        known.iter().map(|(k, g)| (Arc::as_ptr(&k.0), g.clone())).collect();
    eval_memo(w, asg, &u, &mut memo)
}

fn eval_memo(
    w: &Word,
    asg: &Assignment,
    u: &Universe,
    memo: &mut HashMap<*const Node, Automorphism>,
) -> Result<Automorphism> {
    let key = Arc::as_ptr(&w.0);
    if let Some(g) = memo.get(&key) {
        return Ok(g.clone());
    }
    let g = match &*w.0 {
        Node::Letter(l, e) => power(asg.get(l).ok_or_else(|| Error::Unassigned(l.to_string()))?, *e),
        Node::Seq(v) if v.is_empty() => Automorphism::identity(u.clone()),
        Node::Seq(v) => {
            let parts = v.iter().map(|x| eval_memo(x, asg, u, memo)).collect::<Result<Vec<_>>>()?;
            compose(&parts)?
        }
        Node::Pow(x, k) => power(&eval_memo(x, asg, u, memo)?, *k),
        Node::Conj(x, y) => conjugate(&eval_memo(x, asg, u, memo)?, &eval_memo(y, asg, u, memo)?)?,
        Node::Comm(x, y) => commutator(&eval_memo(x, asg, u, memo)?, &eval_memo(y, asg, u, memo)?)?,
    };
    memo.insert(key, g.clone());
    Ok(g)
}

/// Replaces each letter `l^e` by `rule(l)^e`; letters without a rule stay.
pub fn substitute(w: &Word, rules: &BTreeMap<String, Word>) -> Word {
    let mut memo = HashMap::new();
    subst_memo(w, &|l: &str, e: i64| rules.get(l).map(|r| r.pow(e)), &mut memo)
}

fn subst_memo(w: &Word, rule: &dyn Fn(&str, i64) -> Option<Word>, memo: &mut HashMap<*const Node, Word>) -> Word {
    let key = Arc::as_ptr(&w.0);
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let out = match &*w.0 {
        Node::Letter(l, e) => rule(l, *e).unwrap_or_else(|| w.clone()),
        Node::Seq(v) => Word::seq(v.iter().map(|x| subst_memo(x, rule, memo)).collect()),
        Node::Pow(x, k) => subst_memo(x, rule, memo).pow(*k),
        Node::Conj(x, y) => subst_memo(x, rule, memo).conj(&subst_memo(y, rule, memo)),
        Node::Comm(x, y) => subst_memo(x, rule, memo).comm(&subst_memo(y, rule, memo)),
    };
    memo.insert(key, out.clone());
    out
}

/// The four substitution blocks over `F = f`, `H = f^-48 g`. Encoded words share these
/// nodes, so an evaluator can recognise them by identity.
#[derive(Clone, Debug)]
pub struct TwoLetterCode {
    pub f: Word,
    pub f_inv: Word,
    pub g: Word,
    pub g_inv: Word,
}

impl Default for TwoLetterCode {
    fn default() -> Self {
        let h = Word::letter("H");
        let f48 = Word::letter_pow("F", 48);
        let f96 = Word::letter_pow("F", 96);
        TwoLetterCode {
            f: Word::letter("F"),
            f_inv: Word::seq(vec![
                h.clone(),
                h.clone(),
                f48.clone(),
                h.clone(),
                f96.clone(),
                h.clone(),
                Word::letter_pow("F", 47),
            ]),
            g: Word::seq(vec![f48.clone(), h.clone()]),
            g_inv: Word::seq(vec![h.clone(), f48, h.clone(), f96, h]),
        }
    }
}

impl TwoLetterCode {
    /// Positive word over `{F, H}`: `f -> F`, `g -> F^48 H`, and the inverses through the
    /// relator `(g^2)^(f^48) g^2 = 1`. Powers stay powers.
    pub fn encode(&self, w: &Word) -> Word {
        let mut memo = HashMap::new();
        encode(w, false, &|l, neg| match (l, neg) {
            ("f", false) => Some(self.f.clone()),
            ("f", true) => Some(self.f_inv.clone()),
            ("g", false) => Some(self.g.clone()),
            ("g", true) => Some(self.g_inv.clone()),
            _ => None,
        }, &mut memo)
    }
}

pub fn two_letter_encode(w: &Word) -> Word {
    TwoLetterCode::default().encode(w)
}

fn encode(
    w: &Word,
    inverted: bool,
    rule: &dyn Fn(&str, bool) -> Option<Word>,
    memo: &mut HashMap<(*const Node, bool), Word>,
) -> Word {
    let key = (Arc::as_ptr(&w.0), inverted);
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let out = match &*w.0 {
        Node::Letter(l, e) => {
            let neg = (*e < 0) != inverted;
            match rule(l, neg) {
                // F^k stays a single syllable
                Some(r) => r.pow(e.abs()),
                None => Word::letter_pow(l, if inverted { -e } else { *e }),
            }
        }
        Node::Seq(v) => {
            let mut parts: Vec<Word> = v.iter().map(|x| encode(x, inverted, rule, memo)).collect();
            if inverted {
                parts.reverse();
            }
            Word::seq(parts)
        }
        Node::Pow(x, k) => {
            encode(x, inverted ^ (*k < 0), rule, memo).pow(k.abs())
        }
        Node::Conj(x, y) => Word::seq(vec![
            encode(y, true, rule, memo),
            encode(x, inverted, rule, memo),
            encode(y, false, rule, memo),
        ]),
        Node::Comm(x, y) => {
            let (p, q) = if inverted { (y, x) } else { (x, y) };
            Word::seq(vec![
                encode(p, true, rule, memo),
                encode(q, true, rule, memo),
                encode(p, false, rule, memo),
                encode(q, false, rule, memo),
            ])
        }
    };
    memo.insert(key, out.clone());
    out
}

/// `F -> f`, `H -> f^-48 g`.
pub fn two_letter_decode(w: &Word) -> Word {
    let mut rules = BTreeMap::new();
    rules.insert("F".to_string(), Word::letter("f"));
    rules.insert("H".to_string(), Word::seq(vec![Word::letter_pow("f", -48), Word::letter("g")]));
    substitute(w, &rules)
}

/// `[a^(b^(1-2n)), a^(b^(2n) c)]`
pub fn words_w8(n: u64) -> Word {
    let n = n as i64;
    let a = Word::letter("a");
    let left = a.conj(&Word::letter_pow("b", 1 - 2 * n));
    let right = a.conj(&Word::seq(vec![Word::letter_pow("b", 2 * n), Word::letter("c")]));
    left.comm(&right)
}

/// `[(g g^(f^-12))^((g^(f^-4))^n g^(f^-28)), (g g^(f^-12))^((g^(f^-4))^-n)]`
pub fn words_w2(n: u64) -> Word {
    let n = n as i64;
    let g = Word::letter("g");
    let gg = Word::seq(vec![g.clone(), g.conj(&Word::letter_pow("f", -12))]);
    let g4 = g.conj(&Word::letter_pow("f", -4));
    let left = gg.conj(&Word::seq(vec![g4.pow(n), g.conj(&Word::letter_pow("f", -28))]));
    let right = gg.conj(&g4.pow(-n));
    left.comm(&right)
}

/// Outer index range `3n(n-1) ..= 3n(n+1)-1`.
pub fn t_range(n: u64) -> std::ops::RangeInclusive<u64> {
    3 * n * (n - 1)..=3 * n * (n + 1) - 1
}

/// `prod_i prod_j inner(m i + j)^(f^(2j)) * prod_j inner(m(2i+1)/2 + j)^(f^(2j+1))`.
/// For `m = 4` this is `w_{4i+1}^(f^2) w_{4i+2}^(f^4) w_{4i+3}^(f^3) w_{4i+4}^(f^5)`.
pub fn words_t_m(n: u64, m: u64, inner: &dyn Fn(u64) -> Word) -> Word {
    assert!(n >= 1 && m >= 2 && m % 2 == 0, "n >= 1 and even m");
    let half = m / 2;
    let mut parts = Vec::new();
    for i in t_range(n) {
        for j in 1..=half {
            parts.push(inner(m * i + j).conj(&Word::letter_pow("f", 2 * j as i64)));
        }
        for j in 1..=half {
            parts.push(inner(m * (2 * i + 1) / 2 + j).conj(&Word::letter_pow("f", 2 * j as i64 + 1)));
        }
    }
    Word::seq(parts)
}

pub fn words_t(n: u64, inner: &dyn Fn(u64) -> Word) -> Word {
    words_t_m(n, 4, inner)
}

/// Frame letters around consecutive terms: output `n` is `w_1 u_{mn+1} w_2 ... w_m u_{mn+m} w_{m+1}`.
pub fn word_decorate(terms: &[Word], frame: &[Word]) -> Result<Vec<Word>> {
    if frame.len() < 2 {
        return Err(Error::Precondition("a frame needs at least two words".into()));
    }
    let m = frame.len() - 1;
    let frame_letters: Vec<Arc<str>> = frame.iter().flat_map(|w| w.letters()).collect();
    if terms.iter().any(|t| t.letters().iter().any(|l| frame_letters.contains(l))) {
        return Err(Error::Precondition("frame and terms share a letter".into()));
    }
    Ok(terms
        .chunks_exact(m)
        .map(|chunk| {
            let mut parts = vec![frame[0].clone()];
            for (u, w) in chunk.iter().zip(&frame[1..]) {
                parts.push(u.clone());
                parts.push(w.clone());
            }
            Word::seq(parts)
        })
        .collect())
}

/// 1-based inclusive index ranges of consecutive chunks of the given lengths.
pub fn chunk_ranges(lengths: &[u64]) -> Result<Vec<(u64, u64)>> {
    let mut start = 1;
    let mut out = Vec::with_capacity(lengths.len());
    for &l in lengths {
        if l == 0 {
            return Err(Error::Precondition("chunk lengths must be positive".into()));
        }
        out.push((start, start + l - 1));
        start += l;
    }
    Ok(out)
}

/// Products of consecutive chunks of `terms` (term 1 is `terms[0]`).
pub fn word_chunk(terms: &[Word], lengths: &[u64]) -> Result<Vec<Word>> {
    let ranges = chunk_ranges(lengths)?;
    ranges
        .into_iter()
        .map(|(a, b)| {
            if b as usize > terms.len() {
                return Err(Error::Precondition(format!("chunk {a}..{b} needs {b} terms, have {}", terms.len())));
            }
            Ok(Word::seq(terms[a as usize - 1..b as usize].to_vec()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for s in ["[a^(b^-3), a^(b^4 c)]", "a b^-1 c", "(a b)^3", "F^48 H", "1"] {
            assert_eq!(Word::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(Word::parse("HHF⁴⁸HF⁹⁶HF⁴⁷").unwrap().to_superscript(), "HHF⁴⁸HF⁹⁶HF⁴⁷");
        assert_eq!(Word::parse("a^{b}").unwrap().to_flat(), "b^-1 a b");
        assert!(Word::parse("a^").is_err());
        assert!(Word::parse("[a b").is_err());
    }

    #[test]
    fn lengths_without_expansion() {
        let w = words_w8(3);
        assert_eq!(w.length(), w.syllables().iter().map(|(_, e)| e.unsigned_abs() as u128).sum());
        let big = Word::letter("a").pow(1 << 40).pow(1 << 40);
        assert_eq!(big.length(), 1u128 << 80);
    }
}
