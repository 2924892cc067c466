use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{ExtSurd, FracLin, Rational, Surd};

use super::monomap::{MonoMap, Piece};
use super::PflDefect;

/// Continuous increasing piecewise fractional-linear bijection of the line.
///
/// `pieces[i]` applies on `[breaks[i-1], breaks[i]]`; the two unbounded end
/// pieces are affine, so the function is onto.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pfl {
    breaks: Vec<Surd>,
    pieces: Vec<FracLin>,
}

impl Pfl {
    pub fn new(breaks: Vec<Surd>, pieces: Vec<FracLin>) -> Result<Self> {
        let f = Pfl { breaks, pieces };
        f.validate()?;
        Ok(f)
    }

    pub fn identity() -> Self {
        Pfl {
            breaks: Vec::new(),
            pieces: vec![FracLin::identity()],
        }
    }

    /// `x ↦ x + shift`.
    pub fn shift(shift: &Rational) -> Self {
        Pfl {
            breaks: Vec::new(),
            pieces: vec![FracLin::affine(&Rational::from_integer(1.into()), shift).expect("unit slope")],
        }
    }

    /// `f` on `[lo, hi]`, continued by slope-one lines outside.
    pub fn with_unit_slope_ends(f: FracLin, lo: &Rational, hi: &Rational) -> Result<Self> {
        let one = Rational::from_integer(1.into());
        let end = |x: &Rational| -> Result<FracLin> {
            let y = f.apply(&Surd::rational(x.clone()))?;
            let y = y.as_rational().expect("rational image of a rational").clone();
            FracLin::affine(&one, &(y - x))
        };
        let left = end(lo)?;
        let right = end(hi)?;
        Pfl::new(
            vec![Surd::rational(lo.clone()), Surd::rational(hi.clone())],
            vec![left, f, right],
        )
        .map(Pfl::simplified)
    }

    fn validate(&self) -> std::result::Result<(), PflDefect> {
        let (nb, np) = (self.breaks.len(), self.pieces.len());
        if np != nb + 1 {
            return Err(PflDefect::PieceCount { breaks: nb, pieces: np });
        }
        if let Some(i) = self.breaks.windows(2).position(|w| w[0] >= w[1]) {
            return Err(PflDefect::UnsortedBreaks(i + 1));
        }
        if !self.pieces[0].is_affine() || !self.pieces[np - 1].is_affine() {
            return Err(PflDefect::NonAffineEnd);
        }
        for (i, f) in self.pieces.iter().enumerate() {
            if !f.is_increasing() {
                return Err(PflDefect::NotIncreasing(i));
            }
            if let Some(pole) = f.pole() {
                let pole = Surd::rational(pole);
                let above = i == 0 || self.breaks[i - 1] <= pole;
                let below = i == nb || pole <= self.breaks[i];
                if above && below {
                    return Err(PflDefect::PoleInPiece(i));
                }
            }
        }
        for (i, b) in self.breaks.iter().enumerate() {
            let l = self.pieces[i].apply(b).expect("pole excluded");
            let r = self.pieces[i + 1].apply(b).expect("pole excluded");
            if l != r {
                return Err(PflDefect::Discontinuous(i));
            }
        }
        Ok(())
    }

    fn simplified(self) -> Self {
        Pfl::from_monomap(&self.to_monomap()).expect("simplifying keeps validity")
    }

    pub fn breaks(&self) -> &[Surd] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[FracLin] {
        &self.pieces
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn bits(&self) -> u64 {
        let b = self.breaks.iter().map(Surd::bits);
        b.chain(self.pieces.iter().map(FracLin::bits)).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &Surd) -> Surd {
        let i = self.breaks.partition_point(|b| b < x);
        self.pieces[i].apply(x).expect("pole excluded")
    }

    pub fn eval_ext(&self, x: &ExtSurd) -> ExtSurd {
        match x {
            ExtSurd::Finite(s) => ExtSurd::Finite(self.eval(s)),
            ExtSurd::NegInf => ExtSurd::NegInf,
            ExtSurd::PosInf => ExtSurd::PosInf,
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let i = self.breaks.partition_point(|b| b.to_f64() < x);
        self.pieces[i].eval_float(x)
    }

    pub fn to_monomap(&self) -> MonoMap {
        let at = self
            .breaks
            .iter()
            .enumerate()
            .map(|(i, b)| ExtSurd::Finite(self.pieces[i].apply(b).expect("pole excluded")))
            .collect();
        let pieces = self.pieces.iter().cloned().map(Piece::Map).collect();
        MonoMap::from_parts(self.breaks.clone(), pieces, at)
    }

    /// Converts back a map made only of continuous increasing pieces.
    pub fn from_monomap(m: &MonoMap) -> Result<Self> {
        let pieces = m
            .pieces()
            .iter()
            .map(|p| p.as_map().cloned())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Internal("constant piece in a bijection".into()))?;
        for (i, v) in m.at().iter().enumerate() {
            if m.upper_limit(i) != *v || m.lower_limit(i + 1) != *v {
                return Err(PflDefect::Discontinuous(i).into());
            }
        }
        Pfl::new(m.breaks().to_vec(), pieces)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Pfl) -> Pfl {
        let m = MonoMap::compose(&self.to_monomap(), &inner.to_monomap());
        Pfl::from_monomap(&m).expect("composition of bijections")
    }

    pub fn inverse(&self) -> Pfl {
        let breaks = self
            .breaks
            .iter()
            .enumerate()
            .map(|(i, b)| self.pieces[i].apply(b).expect("pole excluded"))
            .collect();
        let pieces = self.pieces.iter().map(FracLin::inverse).collect();
        Pfl { breaks, pieces }
    }

    /// `x ↦ −f(−x)`.
    pub fn reflect(&self) -> Pfl {
        Pfl {
            breaks: self.breaks.iter().rev().map(|b| -b).collect(),
            pieces: self.pieces.iter().rev().map(FracLin::reflect).collect(),
        }
    }

    /// The map of the contrapositive constraint: `x ≤ f(y)` holds exactly
    /// when `−y ≤ dual(f)(−x)`.
    pub fn dual(&self) -> Pfl {
        self.inverse().reflect()
    }

    pub fn min(fs: &[Pfl]) -> Pfl {
        let maps: Vec<MonoMap> = fs.iter().map(Pfl::to_monomap).collect();
        Pfl::from_monomap(&MonoMap::envelope_min(&maps)).expect("minimum of bijections")
    }
}

impl fmt::Display for Pfl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                write!(f, " |{}| ", self.breaks[i - 1])?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn fl(a: i64, b: i64, c: i64, d: i64) -> FracLin {
        FracLin::from_i64(a, b, c, d).unwrap()
    }

    /// `(2x+2)/(x+2)` on `[-3/2, 2]`, slope one outside.
    fn sample() -> Pfl {
        Pfl::with_unit_slope_ends(fl(2, 2, 1, 2), &rat(-3, 2), &int(2)).unwrap()
    }

    #[test]
    fn construction_and_eval() {
        let f = sample();
        assert_eq!(f.piece_count(), 3);
        assert_eq!(f.eval(&Surd::from_int(0)), Surd::from_int(1));
        assert_eq!(f.eval(&Surd::from_int(2)), Surd::rational(rat(3, 2)));
        assert_eq!(f.eval(&Surd::from_int(4)), Surd::rational(rat(7, 2)));
        assert_eq!(f.eval(&Surd::from_int(-2)), Surd::rational(rat(-5, 2)));
    }

    #[test]
    fn defects_are_reported() {
        let s = |v| Surd::from_int(v);
        let id = FracLin::identity();
        assert_eq!(
            Pfl::new(vec![s(0)], vec![id.clone()]),
            Err(PflDefect::PieceCount { breaks: 1, pieces: 1 }.into())
        );
        assert_eq!(
            Pfl::new(vec![s(0)], vec![id.clone(), fl(1, 1, 0, 1)]),
            Err(PflDefect::Discontinuous(0).into())
        );
        assert_eq!(
            Pfl::new(vec![s(-1), s(1)], vec![id.clone(), fl(0, -1, 1, 0), id.clone()]),
            Err(PflDefect::PoleInPiece(1).into())
        );
        assert_eq!(
            Pfl::new(vec![], vec![fl(-1, 0, 0, 1)]),
            Err(PflDefect::NotIncreasing(0).into())
        );
        assert_eq!(
            Pfl::new(vec![], vec![fl(1, 2, 1, 1)]),
            Err(PflDefect::NonAffineEnd.into())
        );
    }

    #[test]
    fn inverse_and_dual_round_trip() {
        let f = sample();
        let id = Pfl::identity();
        assert_eq!(f.compose(&f.inverse()), id);
        assert_eq!(f.inverse().compose(&f), id);
        assert_eq!(f.dual().dual(), f);
        let x = Surd::sqrt_of(int(1), 3.into()).unwrap();
        // x ≤ f(y) with equality: y = f⁻¹(x) and the dual sends −x to −y
        let y = f.inverse().eval(&x);
        assert_eq!(f.dual().eval(&-&x), -y);
    }

    #[test]
    fn min_is_pointwise() {
        let f = sample();
        let g = Pfl::shift(&rat(-1, 2));
        let m = Pfl::min(&[f.clone(), g.clone()]);
        for k in -8..8 {
            let x = Surd::rational(rat(k, 3));
            assert_eq!(m.eval(&x), f.eval(&x).min(g.eval(&x)));
        }
    }
}
