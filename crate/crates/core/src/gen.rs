//! Seeded random PFLs and instances.

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exact::{Rational, Surd};
use crate::exact::FracLin;
use crate::pfl::Pfl;
use crate::solver::{Constraint, Instance, Literal, Variable};

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub vars: usize,
    pub constraints: usize,
    /// Maximum pieces per constraint function.
    pub pieces: usize,
    /// Breakpoints and ranges lie in `[-magnitude, magnitude]`.
    pub magnitude: i64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            vars: 3,
            constraints: 4,
            pieces: 3,
            magnitude: 4,
        }
    }
}

impl GenConfig {
    /// Constraint count near the satisfiability threshold for `vars`
    /// variables, varied by seed so both verdicts occur.
    pub fn balanced(vars: usize, pieces: usize, seed: u64) -> Self {
        GenConfig {
            vars,
            constraints: vars.max(2) - 1 + (seed % 3) as usize,
            pieces,
            ..GenConfig::default()
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// A rational in `[-m, m]` with denominator at most 4.
pub fn small_rational(rng: &mut impl Rng, m: i64) -> Rational {
    let d = rng.gen_range(1..=4);
    ratio(rng.gen_range(-m * d..=m * d), d)
}

fn positive(rng: &mut impl Rng) -> Rational {
    ratio(rng.gen_range(1..=8), rng.gen_range(1..=4))
}

/// `k` distinct sorted rationals in `[-m, m]`.
fn sorted_points(rng: &mut impl Rng, k: usize, m: i64) -> Vec<Rational> {
    let mut pts: Vec<Rational> = Vec::with_capacity(k);
    while pts.len() < k {
        let p = small_rational(rng, m);
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    pts.sort();
    pts
}

/// The increasing fractional-linear map through `(x0, y0)` and `(x1, y1)`
/// whose shape is `t ↦ t / (t + μ(1 − t))` on the unit interval.
fn through(x0: &Rational, y0: &Rational, x1: &Rational, y1: &Rational, mu: &Rational) -> FracLin {
    let one = Rational::from_integer(1.into());
    let zero = Rational::from_integer(0.into());
    let to_unit = FracLin::affine(&(&one / (x1 - x0)), &(-x0 / (x1 - x0))).expect("distinct points");
    let shape = FracLin::from_rationals(&one, &zero, &(&one - mu), mu).expect("μ > 0");
    let from_unit = FracLin::affine(&(y1 - y0), y0).expect("increasing values");
    from_unit.compose(&shape.compose(&to_unit))
}

/// A random PFL with between one and `max_pieces` pieces.
pub fn random_pfl(rng: &mut impl Rng, max_pieces: usize, m: i64) -> Pfl {
    let k = rng.gen_range(1..=max_pieces.max(1));
    if k == 1 {
        let f = FracLin::affine(&positive(rng), &small_rational(rng, m)).expect("nonzero slope");
        return Pfl::new(Vec::new(), vec![f]).expect("affine");
    }
    let xs = sorted_points(rng, k - 1, m);
    let ys = sorted_points(rng, k - 1, m);
    let mut pieces = Vec::with_capacity(k);
    pieces.push(FracLin::affine(&positive(rng), &Rational::from_integer(0.into())).expect("slope"));
    for i in 0..k - 2 {
        let mu = if rng.gen_bool(0.3) {
            Rational::from_integer(1.into())
        } else {
            positive(rng)
        };
        pieces.push(through(&xs[i], &ys[i], &xs[i + 1], &ys[i + 1], &mu));
    }
    pieces.push(FracLin::affine(&positive(rng), &Rational::from_integer(0.into())).expect("slope"));
    // shift the end lines onto the stitching points
    let first = &pieces[0];
    let [a, _, _, d] = first.coeffs();
    let slope = Rational::new(a.clone(), d.clone());
    pieces[0] = FracLin::affine(&slope, &(&ys[0] - &slope * &xs[0])).expect("slope");
    let last = &pieces[k - 1];
    let [a, _, _, d] = last.coeffs();
    let slope = Rational::new(a.clone(), d.clone());
    pieces[k - 1] = FracLin::affine(&slope, &(&ys[k - 2] - &slope * &xs[k - 2])).expect("slope");
    let breaks = xs.into_iter().map(Surd::rational).collect();
    Pfl::new(breaks, pieces).expect("stitched continuously")
}

pub fn random_literal(rng: &mut impl Rng, vars: usize) -> Literal {
    let v = rng.gen_range(0..vars);
    if rng.gen_bool(0.5) {
        Literal::pos(v)
    } else {
        Literal::neg(v)
    }
}

pub fn random_instance(rng: &mut impl Rng, cfg: &GenConfig) -> Instance {
    let vars = (0..cfg.vars)
        .map(|i| {
            let mut lo = small_rational(rng, cfg.magnitude);
            let mut hi = small_rational(rng, cfg.magnitude);
            if lo > hi {
                std::mem::swap(&mut lo, &mut hi);
            }
            Variable {
                name: format!("v{i}"),
                lo: Surd::rational(lo),
                hi: Surd::rational(hi),
            }
        })
        .collect();
    let constraints = (0..cfg.constraints)
        .map(|_| Constraint {
            lesser: random_literal(rng, cfg.vars),
            greater: random_literal(rng, cfg.vars),
            f: random_pfl(rng, cfg.pieces, cfg.magnitude),
        })
        .collect();
    Instance::new(vars, constraints).expect("generated instance is valid")
}

/// The instance determined by `seed`.
pub fn seeded_instance(seed: u64, cfg: &GenConfig) -> Instance {
    random_instance(&mut rng(seed), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pfls_are_valid_and_reproducible() {
        let mut r = rng(7);
        for _ in 0..300 {
            let f = random_pfl(&mut r, 4, 5);
            assert!(f.piece_count() <= 4);
        }
        let a = seeded_instance(3, &GenConfig::default());
        let b = seeded_instance(3, &GenConfig::default());
        assert_eq!(a, b);
    }
}
