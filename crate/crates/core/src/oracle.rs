//! Floating-point differential oracle: interval narrowing with
//! branch-and-prune. Used for testing only; never authoritative.

use num_traits::{Float, FromPrimitive};

use crate::pfl::Pfl;
use crate::solver::{Instance, Literal};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    Sat,
    Unsat,
    /// The answer hinges on values within tolerance of a boundary, or the
    /// search budget ran out.
    Marginal,
}

/// Narrowing passes per box before giving up on a fixpoint.
pub const NARROW_CAP: usize = 1000;
const NODE_CAP: usize = 4000;

#[derive(Clone, Debug)]
struct FloatPfl<F> {
    breaks: Vec<F>,
    pieces: Vec<[F; 4]>,
}

impl<F: Float + FromPrimitive> FloatPfl<F> {
    fn new(f: &Pfl) -> Self {
        let to = |v: f64| F::from_f64(v).unwrap_or_else(F::nan);
        let pieces = f
            .pieces()
            .iter()
            .map(|p| {
                let c = p.coeffs().map(|v| num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::NAN));
                c.map(to)
            })
            .collect();
        FloatPfl {
            breaks: f.breaks().iter().map(|b| to(b.to_f64())).collect(),
            pieces,
        }
    }

    fn eval(&self, x: F) -> F {
        if x.is_infinite() {
            return x;
        }
        let i = self.breaks.partition_point(|b| *b < x);
        let [a, b, c, d] = self.pieces[i];
        (a * x + b) / (c * x + d)
    }
}

/// One directed bound rule `x ≤ f(y)`.
struct Rule<F> {
    lesser: usize,
    greater: usize,
    f: FloatPfl<F>,
}

pub struct Oracle<F> {
    vars: usize,
    rules: Vec<Rule<F>>,
    /// Exact-form constraints for the final slack check.
    checks: Vec<Rule<F>>,
    lo: Vec<F>,
    hi: Vec<F>,
    tol: F,
}

/// Upper bounds indexed by literal: `hi[pos v] = max v`, `hi[neg v] = −min v`.
type Bounds<F> = Vec<F>;

impl<F: Float + FromPrimitive> Oracle<F> {
    pub fn new(inst: &Instance, tolerance: F) -> Self {
        let mut rules = Vec::new();
        let mut checks = Vec::new();
        for c in &inst.constraints {
            let d = c.dual();
            for con in [c, &d] {
                rules.push(Rule {
                    lesser: con.lesser.index(),
                    greater: con.greater.index(),
                    f: FloatPfl::new(&con.f),
                });
            }
            checks.push(Rule {
                lesser: c.lesser.index(),
                greater: c.greater.index(),
                f: FloatPfl::new(&c.f),
            });
        }
        let to = |v: f64| F::from_f64(v).unwrap_or_else(F::nan);
        Oracle {
            vars: inst.var_count(),
            rules,
            checks,
            lo: inst.variables.iter().map(|v| to(v.lo.to_f64())).collect(),
            hi: inst.variables.iter().map(|v| to(v.hi.to_f64())).collect(),
            tol: tolerance,
        }
    }

    fn initial(&self, slack: F) -> Bounds<F> {
        let mut b = vec![F::zero(); 2 * self.vars];
        for v in 0..self.vars {
            b[Literal::pos(v).index()] = self.hi[v] + slack;
            b[Literal::neg(v).index()] = -self.lo[v] + slack;
        }
        b
    }

    fn empty(&self, b: &Bounds<F>) -> bool {
        (0..self.vars).any(|v| b[Literal::pos(v).index()] + b[Literal::neg(v).index()] < F::zero())
    }

    /// Propagates every rule with `slack` added to each image. Returns
    /// whether a fixpoint was reached.
    fn narrow(&self, b: &mut Bounds<F>, slack: F) -> bool {
        let eps = F::from_f64(1e-13).unwrap_or_else(F::epsilon);
        for _ in 0..NARROW_CAP {
            let mut changed = false;
            for r in &self.rules {
                let t = r.f.eval(b[r.greater]) + slack;
                if t < b[r.lesser] - eps * (F::one() + t.abs()) {
                    b[r.lesser] = t;
                    changed = true;
                }
            }
            if self.empty(b) || !changed {
                return true;
            }
        }
        false
    }

    /// Least constraint or range slack of a full assignment.
    fn slack(&self, x: &[F]) -> F {
        let val = |l: usize| {
            let v = x[l / 2];
            if l % 2 == 1 {
                -v
            } else {
                v
            }
        };
        let mut s = F::infinity();
        for v in 0..self.vars {
            s = s.min(x[v] - self.lo[v]).min(self.hi[v] - x[v]);
        }
        for r in &self.checks {
            s = s.min(r.f.eval(val(r.greater)) - val(r.lesser));
        }
        s
    }

    /// Greedy assignment inside `b`: each variable in turn at its current
    /// maximum, re-narrowing after each choice.
    fn greedy(&self, b: &Bounds<F>) -> Option<Vec<F>> {
        let mut b = b.clone();
        let mut x = Vec::with_capacity(self.vars);
        for v in 0..self.vars {
            let (p, n) = (Literal::pos(v).index(), Literal::neg(v).index());
            let val = b[p];
            if !val.is_finite() || val + b[n] < F::zero() {
                return None;
            }
            b[n] = -val;
            x.push(val);
            self.narrow(&mut b, F::zero());
        }
        Some(x)
    }

    pub fn run(&self) -> OracleVerdict {
        let mut stack = vec![(self.initial(self.tol), self.initial(F::zero()))];
        let mut nodes = 0;
        let mut undecided = false;
        while let Some((mut relaxed, mut tight)) = stack.pop() {
            nodes += 1;
            if nodes > NODE_CAP {
                return OracleVerdict::Marginal;
            }
            let settled = self.narrow(&mut relaxed, self.tol);
            if self.empty(&relaxed) {
                continue;
            }
            let _ = self.narrow(&mut tight, F::zero());
            if !self.empty(&tight) {
                if let Some(x) = self.greedy(&tight) {
                    if self.slack(&x) >= self.tol {
                        return OracleVerdict::Sat;
                    }
                }
            }
            // split the widest variable of the relaxed box
            let mut best = None;
            let mut width = F::zero();
            for v in 0..self.vars {
                let w = relaxed[Literal::pos(v).index()] + relaxed[Literal::neg(v).index()];
                if w > width {
                    width = w;
                    best = Some(v);
                }
            }
            let Some(v) = best.filter(|_| settled && width > self.tol) else {
                undecided = true;
                continue;
            };
            let (p, n) = (Literal::pos(v).index(), Literal::neg(v).index());
            let two = F::one() + F::one();
            let mid = (relaxed[p] - relaxed[n]) / two;
            let mut low = (relaxed.clone(), tight.clone());
            low.0[p] = mid;
            low.1[p] = low.1[p].min(mid);
            let mut high = (relaxed, tight);
            high.0[n] = -mid;
            high.1[n] = high.1[n].min(-mid);
            stack.push(low);
            stack.push(high);
        }
        if undecided {
            OracleVerdict::Marginal
        } else {
            OracleVerdict::Unsat
        }
    }
}

/// Runs the oracle in double precision.
pub fn numeric_oracle(inst: &Instance, tolerance: f64) -> OracleVerdict {
    Oracle::<f64>::new(inst, tolerance).run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fixtures() {
        assert_eq!(numeric_oracle(&fixtures::shifted_below(), 1e-6), OracleVerdict::Unsat);
        let v = numeric_oracle(&fixtures::sqrt_two(), 1e-6);
        assert_ne!(v, OracleVerdict::Unsat);
        let free = Instance::new(
            vec![crate::solver::Variable {
                name: "a".into(),
                lo: crate::exact::Surd::from_int(0),
                hi: crate::exact::Surd::from_int(1),
            }],
            vec![],
        )
        .unwrap();
        assert_eq!(numeric_oracle(&free, 1e-6), OracleVerdict::Sat);
    }

    #[test]
    fn single_precision_agrees_on_the_easy_case() {
        let v = Oracle::<f32>::new(&fixtures::shifted_below(), 1e-3).run();
        assert_eq!(v, OracleVerdict::Unsat);
    }
}
