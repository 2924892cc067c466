use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{ceil_rational, floor_rational, format_rational, rational_bits, Rational};
use crate::error::{Error, Result};

/// Square factors of primes below this bound are pulled out of radicands.
const SQUARE_SIEVE_BOUND: usize = 1 << 12;

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut sieve = vec![true; SQUARE_SIEVE_BOUND];
        let mut primes = Vec::new();
        for i in 2..SQUARE_SIEVE_BOUND {
            if sieve[i] {
                primes.push(i as u64);
                let mut j = i * i;
                while j < SQUARE_SIEVE_BOUND {
                    sieve[j] = false;
                    j += i;
                }
            }
        }
        primes
    })
}

/// A real number `p + q√r` with rational `p`, `q` and integer `r ≥ 0`.
///
/// The radicand never is a perfect square, so `√r` is irrational whenever
/// `q ≠ 0`; rationals are stored with `q = 0` and `r = 0`. Square factors
/// of small primes are moved into `q`. Equality and ordering are by value,
/// so two surds with differently-reduced radicands still compare correctly.
#[derive(Clone, Debug)]
pub struct Surd {
    p: Rational,
    q: Rational,
    r: BigInt,
}

impl Surd {
    pub fn new(p: Rational, q: Rational, r: BigInt) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::NegativeRadicand(r.to_string()));
        }
        Ok(Self::normalize(p, q, r))
    }

    fn normalize(p: Rational, mut q: Rational, mut r: BigInt) -> Self {
        if q.is_zero() || r.is_zero() {
            return Self::rational(p);
        }
        let root = r.sqrt();
        if &root * &root == r {
            return Self::rational(p + q * Rational::from_integer(root));
        }
        for &prime in small_primes() {
            let sq = BigInt::from(prime * prime);
            if sq > r {
                break;
            }
            while (&r % &sq).is_zero() {
                r /= &sq;
                q *= Rational::from_integer(BigInt::from(prime));
            }
        }
        let root = r.sqrt();
        if &root * &root == r {
            return Self::rational(p + q * Rational::from_integer(root));
        }
        Surd { p, q, r }
    }

    pub fn rational(p: Rational) -> Self {
        Surd {
            p,
            q: Rational::zero(),
            r: BigInt::zero(),
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::rational(Rational::from_integer(BigInt::from(v)))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    /// `q√r`
    pub fn sqrt_of(q: Rational, r: BigInt) -> Result<Self> {
        Self::new(Rational::zero(), q, r)
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn r(&self) -> &BigInt {
        &self.r
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.p)
    }

    /// Largest bit length among the numerators, denominators and radicand.
    pub fn bits(&self) -> u64 {
        rational_bits(&self.p)
            .max(rational_bits(&self.q))
            .max(self.r.bits())
    }

    pub fn to_f64(&self) -> f64 {
        let p = self.p.to_f64().unwrap_or(f64::NAN);
        if self.is_rational() {
            return p;
        }
        let q = self.q.to_f64().unwrap_or(f64::NAN);
        let r = self.r.to_f64().unwrap_or(f64::NAN);
        p + q * r.sqrt()
    }

    pub fn signum(&self) -> Ordering {
        sign_lin(&self.p, &self.q, &self.r)
    }

    /// Sum with a rational.
    pub fn add_rational(&self, v: &Rational) -> Surd {
        Surd {
            p: &self.p + v,
            q: self.q.clone(),
            r: self.r.clone(),
        }
    }

    /// Product with a rational.
    pub fn mul_rational(&self, v: &Rational) -> Surd {
        if v.is_zero() {
            return Surd::zero();
        }
        Surd {
            p: &self.p * v,
            q: &self.q * v,
            r: self.r.clone(),
        }
    }

    /// Conjugate `p - q√r`.
    pub fn conjugate(&self) -> Surd {
        Surd {
            p: self.p.clone(),
            q: -&self.q,
            r: self.r.clone(),
        }
    }

    /// Rational bounds `lo ≤ self ≤ hi` with `hi - lo ≤ 2^-k`.
    pub fn enclosure(&self, k: u32) -> (Rational, Rational) {
        if self.is_rational() {
            return (self.p.clone(), self.p.clone());
        }
        // |q|√r = √(n·d)/d with q²r = n/d
        let t = &self.q * &self.q * Rational::from_integer(self.r.clone());
        let (n, d) = (t.numer().clone(), t.denom().clone());
        let scale = BigInt::one() << k;
        let floor = (&n * &d * &scale * &scale).sqrt();
        let den = &d * &scale;
        let below = Rational::new(floor.clone(), den.clone());
        let above = Rational::new(floor + 1, den);
        if self.q.is_positive() {
            (&self.p + below, &self.p + above)
        } else {
            (&self.p - above, &self.p - below)
        }
    }
}

/// Sign of `a + b√r`.
fn sign_lin(a: &Rational, b: &Rational, r: &BigInt) -> Ordering {
    if b.is_zero() || r.is_zero() {
        return a.cmp(&Rational::zero());
    }
    let sa = a.cmp(&Rational::zero());
    let sb = b.cmp(&Rational::zero());
    if sa == Ordering::Equal || sa == sb {
        return sb;
    }
    // opposite signs: compare a² with b²r
    let lhs = a * a;
    let rhs = b * b * Rational::from_integer(r.clone());
    match lhs.cmp(&rhs) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => Ordering::Equal,
    }
}

/// Sign of `a + b√r1 + c√r2`; at most two squarings.
fn sign_two(a: &Rational, b: &Rational, r1: &BigInt, c: &Rational, r2: &BigInt) -> Ordering {
    let sx = sign_lin(a, b, r1);
    let sy = if r2.is_zero() {
        Ordering::Equal
    } else {
        c.cmp(&Rational::zero())
    };
    if sy == Ordering::Equal {
        return sx;
    }
    if sx == Ordering::Equal || sx == sy {
        return sy;
    }
    let r1q = Rational::from_integer(r1.clone());
    let r2q = Rational::from_integer(r2.clone());
    let rest = a * a + b * b * &r1q - c * c * &r2q;
    let cross = Rational::from_integer(BigInt::from(2)) * a * b;
    match sign_lin(&rest, &cross, r1) {
        Ordering::Greater => sx,
        Ordering::Less => sy,
        Ordering::Equal => Ordering::Equal,
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        let dp = &self.p - &other.p;
        if self.r == other.r || other.q.is_zero() {
            let dq = if other.q.is_zero() {
                self.q.clone()
            } else {
                &self.q - &other.q
            };
            return sign_lin(&dp, &dq, &self.r);
        }
        if self.q.is_zero() {
            return sign_lin(&dp, &(-&other.q), &other.r);
        }
        sign_two(&dp, &self.q, &self.r, &(-&other.q), &other.r)
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Surd {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Surd {}

impl std::ops::Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            p: -self.p,
            q: -self.q,
            r: self.r,
        }
    }
}

impl std::ops::Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        -(self.clone())
    }
}

impl From<Rational> for Surd {
    fn from(p: Rational) -> Self {
        Surd::rational(p)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", format_rational(&self.p));
        }
        if self.p.is_zero() {
            write!(f, "{}√{}", format_rational(&self.q), self.r)
        } else {
            write!(
                f,
                "{} + {}√{}",
                format_rational(&self.p),
                format_rational(&self.q),
                self.r
            )
        }
    }
}

/// A surd or one of the two infinities.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExtSurd {
    NegInf,
    Finite(Surd),
    PosInf,
}

impl ExtSurd {
    pub fn rational(v: Rational) -> Self {
        ExtSurd::Finite(Surd::rational(v))
    }

    pub fn from_int(v: i64) -> Self {
        ExtSurd::Finite(Surd::from_int(v))
    }

    pub fn finite(&self) -> Option<&Surd> {
        match self {
            ExtSurd::Finite(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtSurd::Finite(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtSurd::NegInf => f64::NEG_INFINITY,
            ExtSurd::Finite(s) => s.to_f64(),
            ExtSurd::PosInf => f64::INFINITY,
        }
    }

    pub fn bits(&self) -> u64 {
        self.finite().map_or(0, Surd::bits)
    }
}

impl From<Surd> for ExtSurd {
    fn from(s: Surd) -> Self {
        ExtSurd::Finite(s)
    }
}

impl std::ops::Neg for ExtSurd {
    type Output = ExtSurd;
    fn neg(self) -> ExtSurd {
        match self {
            ExtSurd::NegInf => ExtSurd::PosInf,
            ExtSurd::Finite(s) => ExtSurd::Finite(-s),
            ExtSurd::PosInf => ExtSurd::NegInf,
        }
    }
}

impl std::ops::Neg for &ExtSurd {
    type Output = ExtSurd;
    fn neg(self) -> ExtSurd {
        -(self.clone())
    }
}

impl fmt::Display for ExtSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtSurd::NegInf => write!(f, "-inf"),
            ExtSurd::Finite(s) => write!(f, "{s}"),
            ExtSurd::PosInf => write!(f, "inf"),
        }
    }
}

/// A rational strictly between `lo` and `hi`; prefers integers and short
/// dyadics. Requires `lo < hi`.
pub fn rational_between(lo: &ExtSurd, hi: &ExtSurd) -> Rational {
    debug_assert!(lo < hi, "empty interval ({lo}, {hi})");
    match (lo, hi) {
        (ExtSurd::NegInf, ExtSurd::PosInf) => Rational::zero(),
        (ExtSurd::NegInf, ExtSurd::Finite(h)) => {
            let (below, _) = h.enclosure(0);
            Rational::from_integer(floor_rational(&below) - 1)
        }
        (ExtSurd::Finite(l), ExtSurd::PosInf) => {
            let (_, above) = l.enclosure(0);
            Rational::from_integer(ceil_rational(&above) + 1)
        }
        (ExtSurd::Finite(l), ExtSurd::Finite(h)) => between_finite(l, h),
        _ => panic!("rational_between called on an empty interval"),
    }
}

fn between_finite(l: &Surd, h: &Surd) -> Rational {
    let mut k = 4u32;
    loop {
        let (_, l_hi) = l.enclosure(k);
        let (h_lo, _) = h.enclosure(k);
        if l_hi < h_lo {
            // l ≤ l_hi < h_lo ≤ h
            for j in 0..=k + 1 {
                let scale = Rational::from_integer(BigInt::one() << j);
                let cand = Rational::from_integer(floor_rational(&(&l_hi * &scale)) + 1) / &scale;
                if cand < h_lo {
                    return cand;
                }
            }
            return (&l_hi + &h_lo) / Rational::from_integer(BigInt::from(2));
        }
        k = k.saturating_mul(2);
    }
}
