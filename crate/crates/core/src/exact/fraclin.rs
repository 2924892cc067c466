use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Float, FromPrimitive, Signed, ToPrimitive, Zero};

use super::{scale_to_integers, ExtSurd, Rational, Surd};
use crate::error::{Error, Result};

/// The map `x ↦ (ax + b)/(cx + d)` with integer coefficients and nonzero
/// determinant `ad − bc`.
///
/// Coefficients are kept with unit gcd and the first nonzero coefficient
/// positive, so proportional matrices are stored identically and derived
/// equality is equality of maps. Pieces of constraint functions additionally
/// have positive determinant (increasing away from the pole).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FracLin {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixedPoints {
    /// The identity: every point is fixed.
    All,
    /// Zero, one or two fixed points in increasing order.
    Points(Vec<Surd>),
}

impl FracLin {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        if &a * &d == &b * &c {
            return Err(Error::Singular);
        }
        Ok(Self::normalized(a, b, c, d))
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    fn normalized(mut a: BigInt, mut b: BigInt, mut c: BigInt, mut d: BigInt) -> Self {
        let g = a.gcd(&b).gcd(&c).gcd(&d);
        if g > BigInt::from(1) {
            a /= &g;
            b /= &g;
            c /= &g;
            d /= &g;
        }
        let lead = [&a, &b, &c, &d]
            .into_iter()
            .find(|v| !v.is_zero())
            .map(|v| v.is_negative())
            .unwrap_or(false);
        if lead {
            a = -a;
            b = -b;
            c = -c;
            d = -d;
        }
        FracLin { a, b, c, d }
    }

    pub fn identity() -> Self {
        FracLin {
            a: 1.into(),
            b: 0.into(),
            c: 0.into(),
            d: 1.into(),
        }
    }

    /// `x ↦ slope·x + intercept`; `slope` must be nonzero.
    pub fn affine(slope: &Rational, intercept: &Rational) -> Result<Self> {
        let ints = scale_to_integers(&[slope.clone(), intercept.clone(), Rational::from_integer(1.into())]);
        let [a, b, d]: [BigInt; 3] = ints.try_into().expect("three coefficients");
        Self::new(a, b, BigInt::zero(), d)
    }

    /// Map with rational coefficients, scaled to integers.
    pub fn from_rationals(a: &Rational, b: &Rational, c: &Rational, d: &Rational) -> Result<Self> {
        let ints = scale_to_integers(&[a.clone(), b.clone(), c.clone(), d.clone()]);
        let [a, b, c, d]: [BigInt; 4] = ints.try_into().expect("four coefficients");
        Self::new(a, b, c, d)
    }

    pub fn coeffs(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn is_increasing(&self) -> bool {
        self.det().is_positive()
    }

    pub fn is_identity(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d
    }

    pub fn is_affine(&self) -> bool {
        self.c.is_zero()
    }

    /// `-d/c`, when `c ≠ 0`.
    pub fn pole(&self) -> Option<Rational> {
        (!self.c.is_zero()).then(|| Rational::new(-self.d.clone(), self.c.clone()))
    }

    /// Largest coefficient bit length.
    pub fn bits(&self) -> u64 {
        self.coeffs().iter().map(|v| v.abs().bits()).max().unwrap_or(0)
    }

    /// Exact value at a surd, keeping the radicand: multiplies by the
    /// conjugate of the denominator, whose norm is `(cp+d)² − c²q²r`.
    pub fn apply(&self, x: &Surd) -> Result<Surd> {
        let (a, b, c, d) = (
            Rational::from_integer(self.a.clone()),
            Rational::from_integer(self.b.clone()),
            Rational::from_integer(self.c.clone()),
            Rational::from_integer(self.d.clone()),
        );
        let (p, q) = (x.p(), x.q());
        let r = Rational::from_integer(x.r().clone());
        let num_p = &a * p + &b;
        let den_p = &c * p + &d;
        if x.is_rational() {
            if den_p.is_zero() {
                return Err(Error::Pole(x.to_string()));
            }
            return Ok(Surd::rational(num_p / den_p));
        }
        let norm = &den_p * &den_p - &c * &c * q * q * &r;
        if norm.is_zero() {
            // √r is irrational, so the norm vanishes only at the pole itself
            return Err(Error::Pole(x.to_string()));
        }
        let new_p = (&num_p * &den_p - &a * &c * q * q * &r) / &norm;
        let new_q = Rational::from_integer(self.det()) * q / &norm;
        Surd::new(new_p, new_q, x.r().clone())
    }

    /// Value at a point of the extended line; at ±∞ this is the limit.
    pub fn apply_ext(&self, x: &ExtSurd) -> Result<ExtSurd> {
        match x {
            ExtSurd::Finite(s) => self.apply(s).map(ExtSurd::Finite),
            inf => Ok(self.limit_at_infinity(matches!(inf, ExtSurd::PosInf))),
        }
    }

    fn limit_at_infinity(&self, positive: bool) -> ExtSurd {
        if !self.c.is_zero() {
            return ExtSurd::rational(Rational::new(self.a.clone(), self.c.clone()));
        }
        // affine: slope a/d
        let rising = self.a.is_positive() == self.d.is_positive();
        if rising == positive {
            ExtSurd::PosInf
        } else {
            ExtSurd::NegInf
        }
    }

    /// One-sided limit at `x` (from the left when `from_left`); infinite at
    /// the pole.
    pub fn limit(&self, x: &ExtSurd, from_left: bool) -> ExtSurd {
        if let (ExtSurd::Finite(s), Some(pole)) = (x, self.pole()) {
            if s.as_rational() == Some(&pole) {
                let up = from_left == self.is_increasing();
                return if up { ExtSurd::PosInf } else { ExtSurd::NegInf };
            }
        }
        self.apply_ext(x).expect("pole handled above")
    }

    /// `self ∘ inner`: the product of coefficient matrices.
    pub fn compose(&self, inner: &FracLin) -> FracLin {
        let (a1, b1, c1, d1) = (&self.a, &self.b, &self.c, &self.d);
        let (a2, b2, c2, d2) = (&inner.a, &inner.b, &inner.c, &inner.d);
        Self::normalized(
            a1 * a2 + b1 * c2,
            a1 * b2 + b1 * d2,
            c1 * a2 + d1 * c2,
            c1 * b2 + d1 * d2,
        )
    }

    /// Adjugate: `(dx − b)/(−cx + a)`.
    pub fn inverse(&self) -> FracLin {
        Self::normalized(
            self.d.clone(),
            -self.b.clone(),
            -self.c.clone(),
            self.a.clone(),
        )
    }

    /// `x ↦ −f(−x)`; preserves the determinant.
    pub fn reflect(&self) -> FracLin {
        Self::normalized(
            self.a.clone(),
            -self.b.clone(),
            -self.c.clone(),
            self.d.clone(),
        )
    }

    /// `x ↦ f(−x)`; negates the determinant.
    pub fn negate_input(&self) -> FracLin {
        Self::normalized(
            -self.a.clone(),
            self.b.clone(),
            -self.c.clone(),
            self.d.clone(),
        )
    }

    /// `x ↦ −f(x)`; negates the determinant.
    pub fn negate_output(&self) -> FracLin {
        Self::normalized(
            -self.a.clone(),
            -self.b.clone(),
            self.c.clone(),
            self.d.clone(),
        )
    }

    /// Roots of `cx² + (d − a)x − b = 0`.
    pub fn fixed_points(&self) -> FixedPoints {
        match quadratic_roots(&self.c, &(&self.d - &self.a), &(-self.b.clone())) {
            None => FixedPoints::All,
            Some(roots) => FixedPoints::Points(roots),
        }
    }

    /// Real points where `self` and `other` agree, poles excluded.
    pub fn intersections(&self, other: &FracLin) -> Vec<Surd> {
        let (a1, b1, c1, d1) = (&self.a, &self.b, &self.c, &self.d);
        let (a2, b2, c2, d2) = (&other.a, &other.b, &other.c, &other.d);
        let qa = a1 * c2 - a2 * c1;
        let qb = a1 * d2 + b1 * c2 - a2 * d1 - b2 * c1;
        let qc = b1 * d2 - b2 * d1;
        let Some(roots) = quadratic_roots(&qa, &qb, &qc) else {
            return Vec::new();
        };
        let poles = [self.pole(), other.pole()];
        roots
            .into_iter()
            .filter(|x| {
                !poles
                    .iter()
                    .flatten()
                    .any(|p| x.as_rational() == Some(p))
            })
            .collect()
    }

    /// Floating-point evaluation, for the numeric oracle.
    pub fn eval_float<F: Float + FromPrimitive>(&self, x: F) -> F {
        let to = |v: &BigInt| F::from_f64(v.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(F::nan);
        (to(&self.a) * x + to(&self.b)) / (to(&self.c) * x + to(&self.d))
    }
}

/// Real roots of `ax² + bx + c` in increasing order, or `None` when the
/// polynomial vanishes identically.
pub fn quadratic_roots(a: &BigInt, b: &BigInt, c: &BigInt) -> Option<Vec<Surd>> {
    if a.is_zero() {
        if b.is_zero() {
            return if c.is_zero() { None } else { Some(Vec::new()) };
        }
        return Some(vec![Surd::rational(Rational::new(-c.clone(), b.clone()))]);
    }
    let disc = b * b - BigInt::from(4) * a * c;
    let two_a = BigInt::from(2) * a;
    let center = Rational::new(-b.clone(), two_a.clone());
    match disc.cmp(&BigInt::zero()) {
        Ordering::Less => Some(Vec::new()),
        Ordering::Equal => Some(vec![Surd::rational(center)]),
        Ordering::Greater => {
            let half = Rational::new(1.into(), two_a).abs();
            let lo = Surd::new(center.clone(), -half.clone(), disc.clone()).expect("positive radicand");
            let hi = Surd::new(center, half, disc).expect("positive radicand");
            Some(vec![lo, hi])
        }
    }
}

impl fmt::Display for FracLin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}x + {})/({}x + {})", self.a, self.b, self.c, self.d)
    }
}
