//! Independent checking of solver output: exact witness evaluation and
//! step-by-step replay of refutations.

use std::fmt;

use crate::exact::{ExtSurd, FixedPoints, Surd};
use crate::pfl::Pfl;
use crate::solver::{Instance, Literal};

/// One derivation step. Function steps produce a constraint
/// `lesser ≤ f(greater)`; bound steps produce `literal ≤ value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    /// Instance constraint `index`, or its dual.
    Constraint { index: usize, dual: bool },
    /// `x ≤ f(y)` and `y ≤ g(z)` give `x ≤ f(g(z))`.
    Compose { outer: usize, inner: usize },
    /// Pointwise minimum of constraints between the same literals.
    Min { of: Vec<usize> },
    /// `x ≤ max range(x)`.
    RangeBound { literal: Literal },
    /// Assumed `x ≤ value`; only usable inside a case split.
    Hypothesis { literal: Literal, value: Surd },
    /// `x ≤ f(y)` and `y ≤ t` give `x ≤ f(t) = value`.
    Apply {
        function: usize,
        bound: usize,
        value: ExtSurd,
    },
    /// Loop `x ≤ ℓ(x)` and `x ≤ entry` with `ℓ(entry) < entry` give
    /// `x ≤ fixed_point`, the nearest fixed point below `entry`.
    LoopClose {
        function: usize,
        bound: usize,
        entry: ExtSurd,
        fixed_point: ExtSurd,
    },
}

/// How a refutation ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Conclusion {
    /// A bound derived from ranges alone falls below the literal's range.
    RangeViolation {
        bound: usize,
        literal: Literal,
        value: ExtSurd,
        min: Surd,
    },
    /// Both `variable ≥ c` and `variable ≤ c` lead to contradictions: from
    /// hypothesis `−v ≤ −c` the bound `upper` gives `v < c`, and from
    /// hypothesis `v ≤ c` the bound `lower` gives `−v < −c`.
    CrossViolation {
        variable: usize,
        c: Surd,
        upper: usize,
        lower: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub steps: Vec<Step>,
    pub conclusion: Conclusion,
}

/// Why a witness or certificate was rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rejection {
    /// Offending step, when the failure is inside the transcript.
    pub step: Option<usize>,
    pub reason: String,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.step {
            Some(i) => write!(f, "step {i}: {}", self.reason),
            None => write!(f, "{}", self.reason),
        }
    }
}

impl std::error::Error for Rejection {}

fn reject<T>(step: Option<usize>, reason: impl Into<String>) -> Result<T, Rejection> {
    Err(Rejection {
        step,
        reason: reason.into(),
    })
}

/// Checks ranges and every constraint exactly.
pub fn verify_sat(inst: &Instance, witness: &[Surd]) -> Result<(), Rejection> {
    if witness.len() != inst.var_count() {
        return reject(
            None,
            format!("{} values for {} variables", witness.len(), inst.var_count()),
        );
    }
    for (v, x) in inst.variables.iter().zip(witness) {
        if *x < v.lo || *x > v.hi {
            return reject(None, format!("{} = {x} outside [{}, {}]", v.name, v.lo, v.hi));
        }
    }
    for (i, c) in inst.constraints.iter().enumerate() {
        let lhs = c.lesser.value(witness);
        let rhs = c.f.eval(&c.greater.value(witness));
        if lhs > rhs {
            return reject(
                None,
                format!(
                    "constraint {i} ({} ≤ f({})) fails: {lhs} > {rhs}",
                    inst.literal_name(c.lesser),
                    inst.literal_name(c.greater)
                ),
            );
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
enum Root {
    Range,
    Hypothesis(Literal, Surd),
}

enum Item {
    Function {
        lesser: Literal,
        greater: Literal,
        f: Pfl,
    },
    Bound {
        literal: Literal,
        value: ExtSurd,
        root: Root,
    },
}

struct Replay<'a> {
    inst: &'a Instance,
    items: Vec<Item>,
}

impl<'a> Replay<'a> {
    fn function(&self, i: usize, at: usize) -> Result<(Literal, Literal, &Pfl), Rejection> {
        match self.items.get(i) {
            Some(Item::Function { lesser, greater, f }) if i < at => Ok((*lesser, *greater, f)),
            _ => reject(Some(at), format!("reference {i} is not an earlier constraint")),
        }
    }

    fn bound(&self, i: usize, at: usize) -> Result<(Literal, &ExtSurd, &Root), Rejection> {
        match self.items.get(i) {
            Some(Item::Bound {
                literal,
                value,
                root,
            }) if i < at => Ok((*literal, value, root)),
            _ => reject(Some(at), format!("reference {i} is not an earlier bound")),
        }
    }

    fn check_literal(&self, l: Literal, at: usize) -> Result<(), Rejection> {
        if l.var() >= self.inst.var_count() {
            return reject(Some(at), "unknown literal");
        }
        Ok(())
    }

    fn step(&self, at: usize, step: &Step) -> Result<Item, Rejection> {
        Ok(match step {
            Step::Constraint { index, dual } => {
                let Some(c) = self.inst.constraints.get(*index) else {
                    return reject(Some(at), format!("no constraint {index}"));
                };
                let c = if *dual { c.dual() } else { c.clone() };
                Item::Function {
                    lesser: c.lesser,
                    greater: c.greater,
                    f: c.f,
                }
            }
            Step::Compose { outer, inner } => {
                let (x, y, f) = self.function(*outer, at)?;
                let (y2, z, g) = self.function(*inner, at)?;
                if y != y2 {
                    return reject(Some(at), "composed constraints do not share a literal");
                }
                Item::Function {
                    lesser: x,
                    greater: z,
                    f: f.compose(g),
                }
            }
            Step::Min { of } => {
                let mut fs = Vec::with_capacity(of.len());
                let mut ends = None;
                for &i in of {
                    let (x, y, f) = self.function(i, at)?;
                    if ends.get_or_insert((x, y)) != &(x, y) {
                        return reject(Some(at), "minimum over different literal pairs");
                    }
                    fs.push(f.clone());
                }
                let Some((lesser, greater)) = ends else {
                    return reject(Some(at), "empty minimum");
                };
                Item::Function {
                    lesser,
                    greater,
                    f: Pfl::min(&fs),
                }
            }
            Step::RangeBound { literal } => {
                self.check_literal(*literal, at)?;
                Item::Bound {
                    literal: *literal,
                    value: ExtSurd::Finite(self.inst.hi(*literal)),
                    root: Root::Range,
                }
            }
            Step::Hypothesis { literal, value } => {
                self.check_literal(*literal, at)?;
                Item::Bound {
                    literal: *literal,
                    value: ExtSurd::Finite(value.clone()),
                    root: Root::Hypothesis(*literal, value.clone()),
                }
            }
            Step::Apply {
                function,
                bound,
                value,
            } => {
                let (x, y, f) = self.function(*function, at)?;
                let (l, t, root) = self.bound(*bound, at)?;
                if l != y {
                    return reject(Some(at), "bound is on a different literal");
                }
                let image = f.eval_ext(t);
                if image != *value {
                    return reject(Some(at), format!("claimed {value}, evaluates to {image}"));
                }
                Item::Bound {
                    literal: x,
                    value: image,
                    root: root.clone(),
                }
            }
            Step::LoopClose {
                function,
                bound,
                entry,
                fixed_point,
            } => {
                let (x, y, f) = self.function(*function, at)?;
                let (l, t, root) = self.bound(*bound, at)?;
                if x != y || l != x {
                    return reject(Some(at), "not a loop on the bounded literal");
                }
                if t != entry {
                    return reject(Some(at), format!("entry {entry} differs from bound {t}"));
                }
                check_loop_close(f, entry, fixed_point).map_err(|r| Rejection {
                    step: Some(at),
                    reason: r,
                })?;
                Item::Bound {
                    literal: x,
                    value: fixed_point.clone(),
                    root: root.clone(),
                }
            }
        })
    }
}

/// Conditions under which `x ≤ ℓ(x)` and `x ≤ c₀` force `x ≤ d`: `ℓ` stays
/// strictly below the diagonal on `(d, c₀]`.
fn check_loop_close(l: &Pfl, entry: &ExtSurd, d: &ExtSurd) -> Result<(), String> {
    let ExtSurd::Finite(c0) = entry else {
        return Err("loop entry must be finite".into());
    };
    let drop = l.eval(c0);
    if drop >= *c0 {
        return Err(format!("loop does not descend at {c0}: value {drop}"));
    }
    if d >= entry {
        return Err("fixed point must lie below the entry".into());
    }
    if let ExtSurd::Finite(df) = d {
        if l.eval(df) != *df {
            return Err(format!("{df} is not a fixed point"));
        }
    }
    let n = l.pieces().len();
    for (i, piece) in l.pieces().iter().enumerate() {
        let lo = if i == 0 {
            ExtSurd::NegInf
        } else {
            ExtSurd::Finite(l.breaks()[i - 1].clone())
        };
        let hi = if i + 1 == n {
            ExtSurd::PosInf
        } else {
            ExtSurd::Finite(l.breaks()[i].clone())
        };
        // piece interval [lo, hi] against the open interval (d, c₀)
        if hi <= *d || lo >= *entry {
            continue;
        }
        match piece.fixed_points() {
            FixedPoints::All => return Err(format!("piece {i} is the identity inside the interval")),
            FixedPoints::Points(ps) => {
                for p in ps {
                    let p = ExtSurd::Finite(p);
                    if lo <= p && p <= hi && *d < p && p < *entry {
                        return Err(format!("fixed point {p} lies between {d} and {entry}"));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Replays every step and checks the final contradiction.
pub fn verify_unsat(inst: &Instance, cert: &Certificate) -> Result<(), Rejection> {
    let mut replay = Replay {
        inst,
        items: Vec::with_capacity(cert.steps.len()),
    };
    for (i, s) in cert.steps.iter().enumerate() {
        let item = replay.step(i, s)?;
        replay.items.push(item);
    }
    let end = cert.steps.len();
    match &cert.conclusion {
        Conclusion::RangeViolation {
            bound,
            literal,
            value,
            min,
        } => {
            let (l, v, root) = replay.bound(*bound, end)?;
            if *root != Root::Range {
                return reject(None, "range violation derived from a hypothesis");
            }
            if l != *literal || v != value {
                return reject(None, "conclusion does not match its bound");
            }
            if *min != inst.lo(l) {
                return reject(None, format!("range minimum of {} is not {min}", inst.literal_name(l)));
            }
            if *v >= ExtSurd::Finite(min.clone()) {
                return reject(None, format!("{v} is not below {min}"));
            }
        }
        Conclusion::CrossViolation {
            variable,
            c,
            upper,
            lower,
        } => {
            if *variable >= inst.var_count() {
                return reject(None, "unknown variable");
            }
            let (pos, neg) = (Literal::pos(*variable), Literal::neg(*variable));
            let (l, v, root) = replay.bound(*upper, end)?;
            if l != pos || *root != Root::Hypothesis(neg, -c) {
                return reject(None, "upper chain must start from the hypothesis −v ≤ −c and end at v");
            }
            if *v >= ExtSurd::Finite(c.clone()) {
                return reject(None, format!("upper chain gives {v}, not below {c}"));
            }
            let (l, v, root) = replay.bound(*lower, end)?;
            if l != neg || *root != Root::Hypothesis(pos, c.clone()) {
                return reject(None, "lower chain must start from the hypothesis v ≤ c and end at −v");
            }
            if *v >= ExtSurd::Finite(-c) {
                return reject(None, format!("lower chain gives {v}, not below {}", -c));
            }
        }
    }
    Ok(())
}
