//! Finite unions of convex subsets of the reals with rational endpoints.
//!
//! An [`IntervalUnion`] is always kept in its minimal partition into convex
//! subsets: parts are sorted, pairwise disjoint and no two of them have a
//! convex union. Every operation returns a normalized value, so structural
//! equality is set equality.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use smallvec::{smallvec, SmallVec};
use thiserror::Error;

use crate::rat::Rat;

/// One endpoint of an interval.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    NegInf,
    PosInf,
    Finite { value: Rat, closed: bool },
}

impl Bound {
    pub fn closed(value: impl Into<Rat>) -> Self {
        Bound::Finite { value: value.into(), closed: true }
    }

    pub fn open(value: impl Into<Rat>) -> Self {
        Bound::Finite { value: value.into(), closed: false }
    }

    pub fn value(&self) -> Option<&Rat> {
        match self {
            Bound::Finite { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self, Bound::Finite { closed: true, .. })
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Bound::Finite { .. })
    }

    fn negate(&self) -> Bound {
        match self {
            Bound::NegInf => Bound::PosInf,
            Bound::PosInf => Bound::NegInf,
            Bound::Finite { value, closed } => Bound::Finite { value: -value, closed: *closed },
        }
    }
}

/// Order of bounds used as lower endpoints: `[a` starts before `(a`.
fn cmp_lower(a: &Bound, b: &Bound) -> Ordering {
    match (a, b) {
        (Bound::NegInf, Bound::NegInf) => Ordering::Equal,
        (Bound::NegInf, _) => Ordering::Less,
        (_, Bound::NegInf) => Ordering::Greater,
        (Bound::Finite { value: x, closed: cx }, Bound::Finite { value: y, closed: cy }) => {
            x.cmp(y).then_with(|| cy.cmp(cx))
        }
        _ => unreachable!("PosInf is never a lower endpoint"),
    }
}

/// Order of bounds used as upper endpoints: `a)` ends before `a]`.
fn cmp_upper(a: &Bound, b: &Bound) -> Ordering {
    match (a, b) {
        (Bound::PosInf, Bound::PosInf) => Ordering::Equal,
        (Bound::PosInf, _) => Ordering::Greater,
        (_, Bound::PosInf) => Ordering::Less,
        (Bound::Finite { value: x, closed: cx }, Bound::Finite { value: y, closed: cy }) => {
            x.cmp(y).then_with(|| cx.cmp(cy))
        }
        _ => unreachable!("NegInf is never an upper endpoint"),
    }
}

/// True when a part ending at `hi` and a later part starting at `lo` have a
/// convex union (they overlap or touch with at least one closed side).
fn reaches(hi: &Bound, lo: &Bound) -> bool {
    match (hi, lo) {
        (Bound::PosInf, _) | (_, Bound::NegInf) => true,
        (Bound::Finite { value: b, closed: cb }, Bound::Finite { value: a, closed: ca }) => {
            a < b || (a == b && (*cb || *ca))
        }
        _ => unreachable!(),
    }
}

fn non_empty(lo: &Bound, hi: &Bound) -> bool {
    match (lo, hi) {
        (Bound::NegInf, Bound::NegInf) | (Bound::PosInf, _) | (_, Bound::NegInf) => false,
        (Bound::NegInf, _) | (_, Bound::PosInf) => true,
        (Bound::Finite { value: a, closed: ca }, Bound::Finite { value: b, closed: cb }) => {
            a < b || (a == b && *ca && *cb)
        }
    }
}

fn add_bounds(a: &Bound, b: &Bound, infinite: Bound) -> Bound {
    match (a, b) {
        (Bound::Finite { value: x, closed: cx }, Bound::Finite { value: y, closed: cy }) => {
            Bound::Finite { value: x + y, closed: *cx && *cy }
        }
        _ => infinite,
    }
}

/// A non-empty convex subset of the reals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Bound,
    hi: Bound,
}

impl Interval {
    /// Builds `lo..hi`, returning `None` for an empty or malformed pair.
    pub fn new(lo: Bound, hi: Bound) -> Option<Interval> {
        if matches!(lo, Bound::PosInf) || matches!(hi, Bound::NegInf) {
            return None;
        }
        non_empty(&lo, &hi).then_some(Interval { lo, hi })
    }

    pub fn closed(a: impl Into<Rat>, b: impl Into<Rat>) -> Interval {
        Interval::new(Bound::closed(a), Bound::closed(b)).expect("empty interval")
    }

    pub fn point(a: impl Into<Rat>) -> Interval {
        let a = a.into();
        Interval { lo: Bound::closed(a.clone()), hi: Bound::closed(a) }
    }

    pub fn universal() -> Interval {
        Interval { lo: Bound::NegInf, hi: Bound::PosInf }
    }

    pub fn lo(&self) -> &Bound {
        &self.lo
    }

    pub fn hi(&self) -> &Bound {
        &self.hi
    }

    pub fn is_singleton(&self) -> bool {
        matches!((&self.lo, &self.hi), (Bound::Finite { value: a, .. }, Bound::Finite { value: b, .. }) if a == b)
    }

    pub fn contains(&self, x: &Rat) -> bool {
        let above = match &self.lo {
            Bound::NegInf => true,
            Bound::Finite { value, closed } => x > value || (*closed && x == value),
            Bound::PosInf => false,
        };
        let below = match &self.hi {
            Bound::PosInf => true,
            Bound::Finite { value, closed } => x < value || (*closed && x == value),
            Bound::NegInf => false,
        };
        above && below
    }

    pub fn converse(&self) -> Interval {
        Interval { lo: self.hi.negate(), hi: self.lo.negate() }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = if cmp_lower(&self.lo, &other.lo) == Ordering::Less { &other.lo } else { &self.lo };
        let hi = if cmp_upper(&self.hi, &other.hi) == Ordering::Greater { &other.hi } else { &self.hi };
        non_empty(lo, hi).then(|| Interval { lo: lo.clone(), hi: hi.clone() })
    }

    /// Minkowski sum: lower bounds add, upper bounds add, an endpoint stays
    /// closed only if both operand endpoints are closed.
    pub fn compose(&self, other: &Interval) -> Interval {
        Interval {
            lo: add_bounds(&self.lo, &other.lo, Bound::NegInf),
            hi: add_bounds(&self.hi, &other.hi, Bound::PosInf),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_singleton() {
            return write!(f, "{{{}}}", self.lo.value().unwrap());
        }
        match &self.lo {
            Bound::NegInf => write!(f, "(-inf,")?,
            Bound::Finite { value, closed } => write!(f, "{}{},", if *closed { '[' } else { '(' }, value)?,
            Bound::PosInf => unreachable!(),
        }
        match &self.hi {
            Bound::PosInf => write!(f, "+inf)"),
            Bound::Finite { value, closed } => write!(f, "{}{}", value, if *closed { ']' } else { ')' }),
            Bound::NegInf => unreachable!(),
        }
    }
}

/// Most labels are convex, so one part is stored inline.
type Parts = SmallVec<[Interval; 1]>;

/// A normalized finite union of intervals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntervalUnion {
    parts: Parts,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion { parts: Parts::new() }
    }

    pub fn universal() -> Self {
        IntervalUnion { parts: smallvec![Interval::universal()] }
    }

    pub fn point(a: impl Into<Rat>) -> Self {
        IntervalUnion { parts: smallvec![Interval::point(a)] }
    }

    pub fn closed(a: impl Into<Rat>, b: impl Into<Rat>) -> Self {
        IntervalUnion { parts: smallvec![Interval::closed(a, b)] }
    }

    pub fn single(part: Interval) -> Self {
        IntervalUnion { parts: smallvec![part] }
    }

    /// Normalizes an arbitrary collection of intervals into its minimal
    /// partition into convex subsets.
    pub fn from_parts(parts: impl IntoIterator<Item = Interval>) -> Self {
        let mut parts: Parts = parts.into_iter().collect();
        if parts.len() <= 1 {
            return IntervalUnion { parts };
        }
        parts.sort_by(|a, b| cmp_lower(&a.lo, &b.lo).then_with(|| cmp_upper(&a.hi, &b.hi)));
        let mut out = Parts::with_capacity(parts.len());
        for part in parts {
            match out.last_mut() {
                Some(last) if reaches(&last.hi, &part.lo) => {
                    if cmp_upper(&part.hi, &last.hi) == Ordering::Greater {
                        last.hi = part.hi;
                    }
                }
                _ => out.push(part),
            }
        }
        IntervalUnion { parts: out }
    }

    /// The minimal partition into convex subsets, ascending.
    pub fn mpcs(&self) -> &[Interval] {
        &self.parts
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_universal(&self) -> bool {
        self.parts.len() == 1 && self.parts[0] == Interval::universal()
    }

    pub fn is_convex(&self) -> bool {
        self.parts.len() <= 1
    }

    pub fn is_singleton(&self) -> bool {
        self.parts.len() == 1 && self.parts[0].is_singleton()
    }

    pub fn singleton_value(&self) -> Option<&Rat> {
        if self.is_singleton() {
            self.parts[0].lo.value()
        } else {
            None
        }
    }

    pub fn lower_bound(&self) -> Option<&Bound> {
        self.parts.first().map(|p| &p.lo)
    }

    pub fn upper_bound(&self) -> Option<&Bound> {
        self.parts.last().map(|p| &p.hi)
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.parts.iter().any(|p| p.contains(x))
    }

    pub fn is_subset_of(&self, other: &IntervalUnion) -> bool {
        self.intersect(other) == *self
    }

    pub fn converse(&self) -> IntervalUnion {
        if let [p] = self.parts.as_slice() {
            return IntervalUnion { parts: smallvec![p.converse()] };
        }
        IntervalUnion { parts: self.parts.iter().rev().map(Interval::converse).collect() }
    }

    pub fn intersect(&self, other: &IntervalUnion) -> IntervalUnion {
        let (mut a, mut b) = (0, 0);
        let mut out = Parts::new();
        while a < self.parts.len() && b < other.parts.len() {
            let (p, q) = (&self.parts[a], &other.parts[b]);
            if let Some(r) = p.intersect(q) {
                out.push(r);
            }
            if cmp_upper(&p.hi, &q.hi) == Ordering::Less {
                a += 1;
            } else {
                b += 1;
            }
        }
        // pieces of two separated, sorted partitions are separated and sorted
        IntervalUnion { parts: out }
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        IntervalUnion::from_parts(self.parts.iter().chain(other.parts.iter()).cloned())
    }

    pub fn compose(&self, other: &IntervalUnion) -> IntervalUnion {
        if self.is_empty() || other.is_empty() {
            return IntervalUnion::empty();
        }
        if let ([p], [q]) = (self.parts.as_slice(), other.parts.as_slice()) {
            return IntervalUnion::single(p.compose(q));
        }
        let sums = self.parts.iter().flat_map(|p| other.parts.iter().map(move |q| p.compose(q)));
        IntervalUnion::from_parts(sums)
    }

    pub fn convex_closure(&self) -> IntervalUnion {
        match (self.parts.first(), self.parts.last()) {
            (Some(first), Some(last)) => {
                IntervalUnion { parts: smallvec![Interval { lo: first.lo.clone(), hi: last.hi.clone() }] }
            }
            _ => IntervalUnion::empty(),
        }
    }

    /// Composition of the convex closures of both operands.
    pub fn weak_compose(&self, other: &IntervalUnion) -> IntervalUnion {
        self.convex_closure().compose(&other.convex_closure())
    }
}

impl From<Interval> for IntervalUnion {
    fn from(part: Interval) -> Self {
        IntervalUnion::single(part)
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("{}");
        }
        for (k, part) in self.parts.iter().enumerate() {
            if k > 0 {
                f.write_str(" u ")?;
            }
            write!(f, "{part}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: {message}")]
pub struct LabelParseError {
    /// 1-based character column inside the label text.
    pub column: usize,
    pub message: String,
}

impl FromStr for IntervalUnion {
    type Err = LabelParseError;

    /// Parses `[-6,-4] u (1,3] u [8,+inf)`, `{5}`, `{}` (empty) and `R`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LabelParser { chars: s.chars().collect(), pos: 0 }.parse()
    }
}

struct LabelParser {
    chars: Vec<char>,
    pos: usize,
}

impl LabelParser {
    fn error<T>(&self, message: impl Into<String>) -> Result<T, LabelParseError> {
        Err(LabelParseError { column: self.pos + 1, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<IntervalUnion, LabelParseError> {
        self.skip_ws();
        match self.peek() {
            None => return self.error("empty label text"),
            Some('R') | Some('ℝ') => {
                self.pos += 1;
                self.skip_ws();
                if self.peek().is_some() {
                    return self.error("unexpected text after universal label");
                }
                return Ok(IntervalUnion::universal());
            }
            Some('∅') => {
                self.pos += 1;
                self.skip_ws();
                if self.peek().is_some() {
                    return self.error("unexpected text after empty label");
                }
                return Ok(IntervalUnion::empty());
            }
            _ => {}
        }
        let mut parts = Vec::new();
        let mut empty_literal = false;
        loop {
            self.skip_ws();
            match self.part()? {
                Some(p) => parts.push(p),
                None => empty_literal = true,
            }
            self.skip_ws();
            match self.peek() {
                None => break,
                Some('u') | Some('U') | Some('∪') => self.pos += 1,
                Some(c) => return self.error(format!("expected `u` between parts, found `{c}`")),
            }
        }
        if empty_literal && !parts.is_empty() {
            return self.error("`{}` cannot be combined with other parts");
        }
        Ok(IntervalUnion::from_parts(parts))
    }

    /// One part; `Ok(None)` for the empty literal `{}`.
    fn part(&mut self) -> Result<Option<Interval>, LabelParseError> {
        let start = self.pos;
        match self.peek() {
            Some('{') => {
                self.pos += 1;
                self.skip_ws();
                if self.peek() == Some('}') {
                    self.pos += 1;
                    return Ok(None);
                }
                let v = self.number(&['}'])?;
                self.expect('}')?;
                Ok(Some(Interval::point(v)))
            }
            Some(open @ ('[' | '(')) => {
                self.pos += 1;
                let lo = self.bound(&[','], open == '[', true)?;
                self.expect(',')?;
                let hi_text_start = self.pos;
                let hi_tok = self.token(&[']', ')'])?;
                let close = match self.peek() {
                    Some(c @ (']' | ')')) => c,
                    _ => return self.error("expected `]` or `)`"),
                };
                let hi = {
                    let saved = self.pos;
                    self.pos = hi_text_start;
                    let b = self.bound_from(&hi_tok, close == ']', false)?;
                    self.pos = saved;
                    b
                };
                self.pos += 1;
                match Interval::new(lo, hi) {
                    Some(p) => Ok(Some(p)),
                    None => {
                        self.pos = start;
                        self.error("interval is empty")
                    }
                }
            }
            Some(c) => self.error(format!("expected `[`, `(` or `{{`, found `{c}`")),
            None => self.error("expected an interval"),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), LabelParseError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected `{c}`"))
        }
    }

    fn token(&mut self, stops: &[char]) -> Result<String, LabelParseError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if stops.contains(&c) || c.is_whitespace() {
                break;
            }
            self.pos += 1;
        }
        let tok: String = self.chars[start..self.pos].iter().collect();
        self.skip_ws();
        if tok.is_empty() {
            return self.error("missing bound");
        }
        Ok(tok)
    }

    fn number(&mut self, stops: &[char]) -> Result<Rat, LabelParseError> {
        let at = self.pos;
        let tok = self.token(stops)?;
        tok.parse().or_else(|_| {
            self.pos = at;
            self.skip_ws();
            self.error(format!("invalid number `{tok}`"))
        })
    }

    fn bound(&mut self, stops: &[char], closed: bool, lower: bool) -> Result<Bound, LabelParseError> {
        let at = self.pos;
        let tok = self.token(stops)?;
        let saved = self.pos;
        self.pos = at;
        let b = self.bound_from(&tok, closed, lower)?;
        self.pos = saved;
        Ok(b)
    }

    fn bound_from(&mut self, tok: &str, closed: bool, lower: bool) -> Result<Bound, LabelParseError> {
        self.skip_ws();
        let infinite = match tok {
            "-inf" | "-∞" => Some(Bound::NegInf),
            "+inf" | "inf" | "+∞" | "∞" => Some(Bound::PosInf),
            _ => None,
        };
        if let Some(b) = infinite {
            let ok = if lower { b == Bound::NegInf } else { b == Bound::PosInf };
            if !ok {
                return self.error(format!("`{tok}` cannot be a {} bound", if lower { "lower" } else { "upper" }));
            }
            if closed {
                return self.error("an infinite bound must be open");
            }
            return Ok(b);
        }
        match tok.parse::<Rat>() {
            Ok(value) => Ok(Bound::Finite { value, closed }),
            Err(_) => self.error(format!("invalid number `{tok}`")),
        }
    }
}
