use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;

use crate::exact::{quadratic_roots, rational_between, ExtSurd, Surd};

use super::monomap::{MonoMap, Piece};

/// Interval of the real line; infinite ends are always open.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: ExtSurd,
    pub lo_closed: bool,
    pub hi: ExtSurd,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: ExtSurd, hi: ExtSurd) -> Self {
        let lo_closed = lo.is_finite();
        let hi_closed = hi.is_finite();
        Interval {
            lo,
            lo_closed,
            hi,
            hi_closed,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self.lo.cmp(&self.hi) {
            Ordering::Less => false,
            Ordering::Equal => !(self.lo_closed && self.hi_closed && self.lo.is_finite()),
            Ordering::Greater => true,
        }
    }

    pub fn contains(&self, x: &Surd) -> bool {
        let x = ExtSurd::Finite(x.clone());
        let above = match self.lo.cmp(&x) {
            Ordering::Less => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Greater => false,
        };
        let below = match x.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Greater => false,
        };
        above && below
    }

    fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            Ordering::Less => (other.lo.clone(), other.lo_closed),
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (other.hi.clone(), other.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        Interval {
            lo,
            lo_closed,
            hi,
            hi_closed,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// Finite union of disjoint intervals in increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full() -> Self {
        IntervalSet {
            parts: vec![Interval::closed(ExtSurd::NegInf, ExtSurd::PosInf)],
        }
    }

    pub fn interval(i: Interval) -> Self {
        let parts = if i.is_empty() { Vec::new() } else { vec![i] };
        IntervalSet { parts }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, x: &Surd) -> bool {
        self.parts.iter().any(|p| p.contains(x))
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut parts = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                let c = a.intersect(b);
                if !c.is_empty() {
                    parts.push(c);
                }
            }
        }
        IntervalSet { parts }
    }

    /// Supremum and whether it belongs to the set.
    pub fn sup(&self) -> Option<(ExtSurd, bool)> {
        self.parts.last().map(|p| (p.hi.clone(), p.hi_closed))
    }

    /// The maximum when it exists, otherwise a rational inside the topmost
    /// interval.
    pub fn pick_high(&self) -> Option<Surd> {
        let top = self.parts.last()?;
        if let (true, ExtSurd::Finite(h)) = (top.hi_closed, &top.hi) {
            return Some(h.clone());
        }
        Some(Surd::rational(rational_between(&top.lo, &top.hi)))
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅");
        }
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Lt,
    Le,
    Ge,
    Gt,
}

impl Cmp {
    pub fn holds(self, a: &ExtSurd, b: &ExtSurd) -> bool {
        match self {
            Cmp::Lt => a < b,
            Cmp::Le => a <= b,
            Cmp::Ge => a >= b,
            Cmp::Gt => a > b,
        }
    }
}

/// The set of reals `u` with `m(σu) cmp τu`, for signs `σ, τ ∈ {1, −1}`.
pub fn line_region(m: &MonoMap, sigma: i8, tau: i8, cmp: Cmp) -> IntervalSet {
    let flip = |s: &Surd, sign: i8| if sign < 0 { -s } else { s.clone() };
    let mut points: Vec<Surd> = m.breaks().iter().map(|b| flip(b, sigma)).collect();
    let st = BigInt::from(sigma * tau);
    for p in m.pieces() {
        match p {
            Piece::Map(f) => {
                let [a, b, c, d] = f.coeffs();
                // aσu + b = τu(cσu + d)
                let qa = &st * c;
                let qb = BigInt::from(tau) * d - BigInt::from(sigma) * a;
                let qc = -b.clone();
                if let Some(roots) = quadratic_roots(&qa, &qb, &qc) {
                    points.extend(roots);
                }
            }
            Piece::Const(ExtSurd::Finite(v)) => points.push(flip(v, tau)),
            Piece::Const(_) => {}
        }
    }
    points.sort();
    points.dedup();

    let holds = |u: &Surd| {
        let lhs = m.eval_finite(&flip(u, sigma));
        cmp.holds(&lhs, &ExtSurd::Finite(flip(u, tau)))
    };
    let mut parts: Vec<Interval> = Vec::new();
    let mut extend = |lo: ExtSurd, lo_closed: bool, hi: ExtSurd, hi_closed: bool| match parts.last_mut() {
        Some(last) if last.hi == lo && (last.hi_closed || lo_closed) => {
            last.hi = hi;
            last.hi_closed = hi_closed;
        }
        _ => parts.push(Interval {
            lo,
            lo_closed,
            hi,
            hi_closed,
        }),
    };
    let mut lo = ExtSurd::NegInf;
    for p in points.iter().map(|p| ExtSurd::Finite(p.clone())).chain([ExtSurd::PosInf]) {
        let s = Surd::rational(rational_between(&lo, &p));
        if holds(&s) {
            extend(lo.clone(), false, p.clone(), false);
        }
        if let ExtSurd::Finite(x) = &p {
            if holds(x) {
                extend(p.clone(), true, p.clone(), true);
            }
        }
        lo = p;
    }
    IntervalSet { parts }
}
