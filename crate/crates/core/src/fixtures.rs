//! Small instances with known answers.

use crate::exact::{int, FracLin, Surd};
use crate::pfl::Pfl;
use crate::solver::{Constraint, Instance, Literal, Variable};

fn var(name: &str, lo: i64, hi: i64) -> Variable {
    Variable {
        name: name.into(),
        lo: Surd::from_int(lo),
        hi: Surd::from_int(hi),
    }
}

fn piece(a: i64, b: i64, c: i64, d: i64, lo: i64, hi: i64) -> Pfl {
    let f = FracLin::from_i64(a, b, c, d).expect("nonsingular");
    Pfl::with_unit_slope_ends(f, &int(lo), &int(hi)).expect("valid on the interval")
}

/// One variable `x ∈ [0, 2]` with `x ≤ (x+2)/(x+1)` and `x ≥ (x+2)/(x+1)`,
/// written as `x ≤ g(−x)` and `−x ≤ h(x)` for increasing `g, h`. The only
/// solution is `x = √2`.
pub fn sqrt_two() -> Instance {
    let x = Literal::pos(0);
    let upper = Constraint {
        lesser: x,
        greater: x.negate(),
        f: piece(1, -2, 1, -1, -2, 0),
    };
    let lower = Constraint {
        lesser: x.negate(),
        greater: x,
        f: piece(-1, -2, 1, 1, 0, 2),
    };
    Instance::new(vec![var("x", 0, 2)], vec![upper, lower]).expect("valid")
}

/// Three guards on `[1, 2]` with `z ≥ x`, `y ≥ z`, `y ≤ (4x+2)/(x+4)` and
/// `y ≤ (4x−2)/(−x+4)`. The only solution is `x = y = z = √2`.
pub fn three_guards() -> Instance {
    let (x, y, z) = (Literal::pos(0), Literal::pos(1), Literal::pos(2));
    let c = |lesser, greater, f| Constraint { lesser, greater, f };
    Instance::new(
        vec![var("x", 1, 2), var("y", 1, 2), var("z", 1, 2)],
        vec![
            c(x, z, Pfl::identity()),
            c(z, y, Pfl::identity()),
            c(y, x, piece(4, 2, 1, 4, 1, 2)),
            c(y, x, piece(4, -2, -1, 4, 1, 2)),
        ],
    )
    .expect("valid")
}

/// `x ∈ [1, 2]`, `y ∈ [0, 1]`, `x ≤ y − 5`.
pub fn shifted_below() -> Instance {
    let c = Constraint {
        lesser: Literal::pos(0),
        greater: Literal::pos(1),
        f: Pfl::shift(&int(-5)),
    };
    Instance::new(vec![var("x", 1, 2), var("y", 0, 1)], vec![c]).expect("valid")
}
