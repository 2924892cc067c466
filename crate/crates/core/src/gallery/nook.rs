use crate::error::Result;
use crate::exact::{FracLin, Rational};

use super::geometry::{line_intersection, Point};

/// Points `a·t + b` of a line, with `t ∈ [0, 1]` on an edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeFrame {
    pub a: Point<Rational>,
    pub b: Point<Rational>,
}

impl EdgeFrame {
    /// The frame running from `start` (t = 0) to `end` (t = 1).
    pub fn between(start: &Point<Rational>, end: &Point<Rational>) -> Self {
        EdgeFrame {
            a: end - start,
            b: start.clone(),
        }
    }

    pub fn at(&self, t: &Rational) -> Point<Rational> {
        &self.a.scale(t) + &self.b
    }
}

/// Coefficients `(a, b, c, d)` with
/// `(g.a·x + g.b − v) × (t.a·y + t.b − v) ≥ 0  ⇔  x(cy + d) ≥ ay + b`.
pub fn visibility_coeffs(guard: &EdgeFrame, target: &EdgeFrame, v: &Point<Rational>) -> [Rational; 4] {
    let bv = &guard.b - v;
    let dv = &target.b - v;
    [
        -bv.cross(&target.a),
        -bv.cross(&dv),
        guard.a.cross(&target.a),
        guard.a.cross(&dv),
    ]
}

/// The map `y ↦ x` sending a target parameter to the guard parameter whose
/// sightline passes through `v`.
pub fn projection(guard: &EdgeFrame, target: &EdgeFrame, v: &Point<Rational>) -> Result<FracLin> {
    let [a, b, c, d] = visibility_coeffs(guard, target, v);
    FracLin::from_rationals(&a, &b, &c, &d)
}

/// Builds a nook sending parameters `xs` on one line to `ys` on another and
/// returns its threshold map `y = f(g(x))`.
///
/// The `x` line is the horizontal axis, the `y` line the vertical line
/// through `(3, 0)`. `P` lies beyond `Y(ys[0])` on the line from
/// `X(xs[0])`, the auxiliary line `ℓ` is vertical through `X(xs[0])`, and
/// `Q` joins the projections of `ys[1]`, `ys[2]` back to `xs[1]`, `xs[2]`.
pub fn nook_threshold(xs: &[Rational; 3], ys: &[Rational; 3]) -> Result<FracLin> {
    let zero = Rational::from_integer(0.into());
    let one = Rational::from_integer(1.into());
    let xline = EdgeFrame {
        a: Point::new(one.clone(), zero.clone()),
        b: Point::new(zero.clone(), zero.clone()),
    };
    let yline = EdgeFrame {
        a: Point::new(zero.clone(), one.clone()),
        b: Point::new(Rational::from_integer(3.into()), zero.clone()),
    };
    let x = |t: &Rational| xline.at(t);
    let y = |t: &Rational| yline.at(t);
    let two = Rational::from_integer(2.into());
    let p = x(&xs[0]).lerp(&y(&ys[0]), &two);
    let ell = EdgeFrame {
        a: Point::new(zero.clone(), one.clone()),
        b: x(&xs[0]),
    };
    let ell_far = ell.at(&one);
    let cut = |from: &Point<Rational>| {
        line_intersection(from, &p, &ell.b, &ell_far).ok_or_else(|| {
            crate::error::Error::InvalidPolygon("nook construction degenerates".into())
        })
    };
    let i = cut(&y(&ys[1]))?;
    let j = cut(&y(&ys[2]))?;
    let q = line_intersection(&i, &x(&xs[1]), &j, &x(&xs[2]))
        .ok_or_else(|| crate::error::Error::InvalidPolygon("nook construction degenerates".into()))?;
    let g = projection(&ell, &xline, &q)?;
    let f = projection(&yline, &ell, &p)?;
    Ok(f.compose(&g))
}
