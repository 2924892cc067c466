use std::fmt;

use crate::exact::{ExtSurd, FracLin, Surd};

/// Behaviour of a [`MonoMap`] on one open cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Piece {
    /// Increasing fractional-linear map, pole outside the open cell.
    Map(FracLin),
    /// Constant, possibly infinite.
    Const(ExtSurd),
}

impl Piece {
    pub fn eval(&self, x: &Surd) -> ExtSurd {
        match self {
            Piece::Map(f) => ExtSurd::Finite(f.apply(x).expect("pole outside cell")),
            Piece::Const(v) => v.clone(),
        }
    }

    pub fn limit(&self, x: &ExtSurd, from_left: bool) -> ExtSurd {
        match self {
            Piece::Map(f) => f.limit(x, from_left),
            Piece::Const(v) => v.clone(),
        }
    }

    pub fn as_map(&self) -> Option<&FracLin> {
        match self {
            Piece::Map(f) => Some(f),
            Piece::Const(_) => None,
        }
    }

    fn bits(&self) -> u64 {
        match self {
            Piece::Map(f) => f.bits(),
            Piece::Const(v) => v.bits(),
        }
    }
}

/// Nondecreasing map of the extended line, split by finite breakpoints into
/// open cells that each carry a [`Piece`], with an explicit value at every
/// breakpoint.
///
/// This is the closure of increasing piecewise fractional-linear functions
/// under composition, pointwise minimum and the iteration limit, so values at
/// breakpoints need not agree with either neighbouring piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoMap {
    breaks: Vec<Surd>,
    pieces: Vec<Piece>,
    at: Vec<ExtSurd>,
}

impl MonoMap {
    /// Builds and simplifies a map. Panics on mismatched lengths; use
    /// [`MonoMap::check`] for monotonicity.
    pub fn from_parts(breaks: Vec<Surd>, pieces: Vec<Piece>, at: Vec<ExtSurd>) -> Self {
        assert_eq!(pieces.len(), breaks.len() + 1, "piece count");
        assert_eq!(at.len(), breaks.len(), "breakpoint values");
        debug_assert!(breaks.windows(2).all(|w| w[0] < w[1]));
        let mut m = MonoMap { breaks, pieces, at };
        m.simplify();
        m
    }

    pub fn identity() -> Self {
        Self::total(FracLin::identity())
    }

    /// A single increasing map on the whole line; it must be affine.
    pub fn total(f: FracLin) -> Self {
        debug_assert!(f.is_affine() && f.is_increasing());
        MonoMap {
            breaks: Vec::new(),
            pieces: vec![Piece::Map(f)],
            at: Vec::new(),
        }
    }

    pub fn constant(v: ExtSurd) -> Self {
        MonoMap {
            breaks: Vec::new(),
            pieces: vec![Piece::Const(v)],
            at: Vec::new(),
        }
    }

    pub fn breaks(&self) -> &[Surd] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn at(&self) -> &[ExtSurd] {
        &self.at
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_step(&self) -> bool {
        self.pieces.iter().all(|p| matches!(p, Piece::Const(_)))
    }

    pub fn bits(&self) -> u64 {
        let b = self.breaks.iter().map(Surd::bits);
        let p = self.pieces.iter().map(Piece::bits);
        let a = self.at.iter().map(ExtSurd::bits);
        b.chain(p).chain(a).max().unwrap_or(0)
    }

    /// Open cell `i` as `(lower, upper)`.
    pub fn cell(&self, i: usize) -> (ExtSurd, ExtSurd) {
        let lo = if i == 0 {
            ExtSurd::NegInf
        } else {
            ExtSurd::Finite(self.breaks[i - 1].clone())
        };
        let hi = self
            .breaks
            .get(i)
            .cloned()
            .map_or(ExtSurd::PosInf, ExtSurd::Finite);
        (lo, hi)
    }

    /// Index of the open cell containing `x`, or `Err(j)` when `x` is
    /// breakpoint `j`.
    pub fn locate(&self, x: &Surd) -> Result<usize, usize> {
        match self.breaks.binary_search(x) {
            Ok(j) => Err(j),
            Err(i) => Ok(i),
        }
    }

    pub fn eval(&self, x: &ExtSurd) -> ExtSurd {
        match x {
            ExtSurd::NegInf => self.pieces[0].limit(x, false),
            ExtSurd::PosInf => self.pieces[self.pieces.len() - 1].limit(x, true),
            ExtSurd::Finite(s) => self.eval_finite(s),
        }
    }

    pub fn eval_finite(&self, x: &Surd) -> ExtSurd {
        match self.locate(x) {
            Ok(i) => self.pieces[i].eval(x),
            Err(j) => self.at[j].clone(),
        }
    }

    /// Limit of the piece of cell `i` at its lower end.
    pub fn lower_limit(&self, i: usize) -> ExtSurd {
        self.pieces[i].limit(&self.cell(i).0, false)
    }

    /// Limit of the piece of cell `i` at its upper end.
    pub fn upper_limit(&self, i: usize) -> ExtSurd {
        self.pieces[i].limit(&self.cell(i).1, true)
    }

    /// Checks that pieces are increasing without interior poles and that the
    /// map is nondecreasing across breakpoints.
    pub fn check(&self) -> Result<(), String> {
        if self.pieces.len() != self.breaks.len() + 1 || self.at.len() != self.breaks.len() {
            return Err("length mismatch".into());
        }
        if !self.breaks.windows(2).all(|w| w[0] < w[1]) {
            return Err("unsorted breakpoints".into());
        }
        for (i, p) in self.pieces.iter().enumerate() {
            let (lo, hi) = self.cell(i);
            if let Piece::Map(f) = p {
                if !f.is_increasing() {
                    return Err(format!("piece {i} decreasing"));
                }
                if let Some(pole) = f.pole() {
                    let pole = ExtSurd::rational(pole);
                    if lo < pole && pole < hi {
                        return Err(format!("pole inside cell {i}"));
                    }
                }
            }
            if i > 0 && self.lower_limit(i) < self.at[i - 1] {
                return Err(format!("drop after breakpoint {}", i - 1));
            }
            if i < self.breaks.len() && self.upper_limit(i) > self.at[i] {
                return Err(format!("drop before breakpoint {i}"));
            }
        }
        Ok(())
    }

    /// Drops breakpoints that separate identical behaviour.
    pub fn simplify(&mut self) {
        let mut breaks = Vec::with_capacity(self.breaks.len());
        let mut at = Vec::with_capacity(self.at.len());
        let mut pieces = Vec::with_capacity(self.pieces.len());
        let old_pieces = std::mem::take(&mut self.pieces);
        let mut iter = old_pieces.into_iter();
        pieces.push(iter.next().expect("at least one piece"));
        for ((b, v), next) in self.breaks.drain(..).zip(self.at.drain(..)).zip(iter) {
            let last = pieces.last().expect("nonempty");
            let seamless = *last == next && last.limit(&ExtSurd::Finite(b.clone()), true) == v;
            if !seamless {
                breaks.push(b);
                at.push(v);
                pieces.push(next);
            }
        }
        self.breaks = breaks;
        self.at = at;
        self.pieces = pieces;
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: &MonoMap, inner: &MonoMap) -> MonoMap {
        let mut breaks = Vec::new();
        let mut pieces = Vec::new();
        let mut at = Vec::new();
        for (i, piece) in inner.pieces.iter().enumerate() {
            if i > 0 {
                breaks.push(inner.breaks[i - 1].clone());
                at.push(outer.eval(&inner.at[i - 1]));
            }
            match piece {
                Piece::Const(v) => pieces.push(Piece::Const(outer.eval(v))),
                Piece::Map(g) => {
                    let (l, r) = inner.cell(i);
                    let lo = g.limit(&l, false);
                    let hi = g.limit(&r, true);
                    let mut k = match &lo {
                        ExtSurd::NegInf => 0,
                        ExtSurd::PosInf => outer.breaks.len(),
                        ExtSurd::Finite(s) => outer.breaks.partition_point(|b| b <= s),
                    };
                    let ginv = g.inverse();
                    loop {
                        pieces.push(match &outer.pieces[k] {
                            Piece::Map(h) => Piece::Map(h.compose(g)),
                            Piece::Const(v) => Piece::Const(v.clone()),
                        });
                        match outer.breaks.get(k) {
                            Some(b) if ExtSurd::Finite(b.clone()) < hi => {
                                breaks.push(ginv.apply(b).expect("breakpoint in image"));
                                at.push(outer.at[k].clone());
                                k += 1;
                            }
                            _ => break,
                        }
                    }
                }
            }
        }
        MonoMap::from_parts(breaks, pieces, at)
    }

    /// Applies a nondecreasing function to the values of a step map.
    pub fn map_values(&self, f: impl Fn(&ExtSurd) -> ExtSurd) -> MonoMap {
        assert!(self.is_step(), "map_values on a non-step map");
        let pieces = self
            .pieces
            .iter()
            .map(|p| match p {
                Piece::Const(v) => Piece::Const(f(v)),
                Piece::Map(_) => unreachable!(),
            })
            .collect();
        let at = self.at.iter().map(&f).collect();
        MonoMap::from_parts(self.breaks.clone(), pieces, at)
    }

    /// Floating-point evaluation, for the numeric oracle.
    pub fn eval_f64(&self, x: f64) -> f64 {
        let i = self.breaks.partition_point(|b| b.to_f64() < x);
        if i < self.breaks.len() && self.breaks[i].to_f64() == x {
            return self.at[i].to_f64();
        }
        match &self.pieces[i] {
            Piece::Map(f) => f.eval_float(x),
            Piece::Const(v) => v.to_f64(),
        }
    }
}

impl fmt::Display for MonoMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                write!(f, " | @{}={} | ", self.breaks[i - 1], self.at[i - 1])?;
            }
            match p {
                Piece::Map(m) => write!(f, "{m}")?,
                Piece::Const(v) => write!(f, "{v}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn fl(a: i64, b: i64, c: i64, d: i64) -> FracLin {
        FracLin::from_i64(a, b, c, d).unwrap()
    }

    fn s(v: i64) -> Surd {
        Surd::from_int(v)
    }

    fn e(v: i64) -> ExtSurd {
        ExtSurd::from_int(v)
    }

    /// `x` below 0, `2x` above.
    fn kinked() -> MonoMap {
        MonoMap::from_parts(
            vec![s(0)],
            vec![Piece::Map(FracLin::identity()), Piece::Map(fl(2, 0, 0, 1))],
            vec![e(0)],
        )
    }

    #[test]
    fn eval_at_breaks_and_ends() {
        let m = kinked();
        assert_eq!(m.eval(&e(-3)), e(-3));
        assert_eq!(m.eval(&e(3)), e(6));
        assert_eq!(m.eval(&e(0)), e(0));
        assert_eq!(m.eval(&ExtSurd::PosInf), ExtSurd::PosInf);
        assert!(m.check().is_ok());
    }

    #[test]
    fn simplify_merges_seamless_breaks() {
        let m = MonoMap::from_parts(
            vec![s(1), s(2)],
            vec![
                Piece::Map(FracLin::identity()),
                Piece::Map(FracLin::identity()),
                Piece::Map(fl(2, -2, 0, 1)),
            ],
            vec![e(1), e(2)],
        );
        assert_eq!(m.breaks(), &[s(2)]);
        assert!(m.check().is_ok());
    }

    #[test]
    fn compose_splits_at_preimages() {
        let m = kinked();
        let shift = MonoMap::total(fl(1, -1, 0, 1));
        // kinked(x - 1): break moves to 1
        let c = MonoMap::compose(&m, &shift);
        assert_eq!(c.breaks(), &[s(1)]);
        assert_eq!(c.eval(&e(3)), e(4));
        assert_eq!(c.eval(&e(0)), e(-1));
        let c2 = MonoMap::compose(&m, &m);
        assert_eq!(c2.eval(&e(3)), e(12));
        assert_eq!(c2.eval(&e(-3)), e(-3));
    }

    #[test]
    fn compose_with_steps() {
        let step = MonoMap::from_parts(
            vec![s(0)],
            vec![Piece::Const(ExtSurd::NegInf), Piece::Const(e(5))],
            vec![e(5)],
        );
        let c = MonoMap::compose(&kinked(), &step);
        assert_eq!(c.eval(&e(-1)), ExtSurd::NegInf);
        assert_eq!(c.eval(&e(0)), e(10));
        let c = MonoMap::compose(&step, &MonoMap::total(fl(1, 3, 0, 1)));
        assert_eq!(c.breaks(), &[s(-3)]);
        assert_eq!(c.eval(&ExtSurd::rational(rat(-7, 2))), ExtSurd::NegInf);
        assert!(c.check().is_ok());
    }
}
