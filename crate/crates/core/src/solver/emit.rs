use std::collections::BTreeMap;

use crate::certify::{Certificate, Conclusion, Step};
use crate::exact::{ExtSurd, Surd};

use super::instance::{Instance, Literal};
use super::reach::{Reach, Route};
use super::table::Origin;

/// Writes refutations as replayable step lists.
pub(crate) struct Emitter<'a> {
    inst: &'a Instance,
    reach: &'a Reach,
    steps: Vec<Step>,
    functions: BTreeMap<(usize, Literal, Literal), usize>,
    constraints: BTreeMap<(usize, bool), usize>,
}

impl<'a> Emitter<'a> {
    pub fn new(inst: &'a Instance, reach: &'a Reach) -> Self {
        Emitter {
            inst,
            reach,
            steps: Vec::new(),
            functions: BTreeMap::new(),
            constraints: BTreeMap::new(),
        }
    }

    fn push(&mut self, s: Step) -> usize {
        self.steps.push(s);
        self.steps.len() - 1
    }

    fn constraint(&mut self, index: usize, dual: bool) -> usize {
        if let Some(&i) = self.constraints.get(&(index, dual)) {
            return i;
        }
        let i = self.push(Step::Constraint { index, dual });
        self.constraints.insert((index, dual), i);
        i
    }

    /// Derivation of the table entry for `(x, y)` at `round`.
    fn table_entry(&mut self, round: usize, x: Literal, y: Literal) -> usize {
        if let Some(&i) = self.functions.get(&(round, x, y)) {
            return i;
        }
        let table = self.reach.table();
        let i = match table.origin(round, x, y).clone() {
            Origin::Constraints(list) => {
                let parts: Vec<usize> = list.iter().map(|&(c, d)| self.constraint(c, d)).collect();
                if parts.len() == 1 {
                    parts[0]
                } else {
                    self.push(Step::Min { of: parts })
                }
            }
            Origin::Unchanged => self.table_entry(round - 1, x, y),
            Origin::Combined { keep, via } => {
                let mut parts = Vec::with_capacity(via.len() + 1);
                if keep {
                    parts.push(self.table_entry(round - 1, x, y));
                }
                for z in via {
                    let outer = self.table_entry(round - 1, x, z);
                    let inner = self.table_entry(round - 1, z, y);
                    parts.push(self.push(Step::Compose { outer, inner }));
                }
                self.push(Step::Min { of: parts })
            }
        };
        self.functions.insert((round, x, y), i);
        i
    }

    fn final_entry(&mut self, x: Literal, y: Literal) -> usize {
        let r = self.reach.table().rounds_run();
        self.table_entry(r, x, y)
    }

    /// Moves the bound `(at, step, value)` to `x` along `f_{x→at}`.
    fn apply(&mut self, x: Literal, at: Literal, bound: usize, value: &ExtSurd) -> (usize, ExtSurd) {
        let f = self.final_entry(x, at);
        let image = self.reach.map(x, at).expect("edge in table").eval(value);
        let s = self.push(Step::Apply {
            function: f,
            bound,
            value: image.clone(),
        });
        (s, image)
    }

    /// Closes the loop at `x` when it pulls the bound down.
    fn close(&mut self, x: Literal, bound: usize, value: ExtSurd) -> (usize, ExtSurd) {
        let (Some(l), Some(raw)) = (self.reach.loop_limit(x), self.reach.map(x, x)) else {
            return (bound, value);
        };
        if !value.is_finite() || raw.eval(&value) >= value {
            return (bound, value);
        }
        let d = l.eval(&value);
        let f = self.final_entry(x, x);
        let s = self.push(Step::LoopClose {
            function: f,
            bound,
            entry: value,
            fixed_point: d.clone(),
        });
        (s, d)
    }

    /// Realizes `min_{x→y}(value)` starting from the bound step on `y`. The
    /// derived value never exceeds the one the route promises.
    fn realize(&mut self, x: Literal, y: Literal, bound: usize, value: ExtSurd) -> (usize, ExtSurd) {
        let (_, route) = self
            .reach
            .eval_min_route(x, y, &value)
            .expect("route exists for a finite violation");
        let (mut b, mut v) = (bound, value.clone());
        match route {
            Route::Direct => {
                if x != y {
                    (b, v) = self.apply(x, y, b, &v);
                }
            }
            Route::Via { w, z } => {
                let lw = self.reach.loop_limit(w).expect("loop at entry");
                let d = if w == y {
                    lw.eval(&value)
                } else {
                    lw.eval(&self.reach.map(w, y).expect("entry edge").eval(&value))
                };
                let path = self.reach.graph_path(z, w, &d).expect("graph path");
                if w != y {
                    (b, v) = self.apply(w, y, b, &v);
                }
                (b, v) = self.close(w, b, v);
                for pair in path.windows(2).rev() {
                    let (to, from) = (pair[0].0, pair[1].0);
                    (b, v) = self.apply(to, from, b, &v);
                    (b, v) = self.close(to, b, v);
                }
                if z != x {
                    (b, v) = self.apply(x, z, b, &v);
                }
            }
        }
        self.close(x, b, v)
    }

    pub fn range_violation(mut self, x: Literal, y: Literal) -> Certificate {
        let start = self.push(Step::RangeBound { literal: y });
        let hi = ExtSurd::Finite(self.inst.hi(y));
        let (b, v) = self.realize(x, y, start, hi);
        Certificate {
            steps: self.steps,
            conclusion: Conclusion::RangeViolation {
                bound: b,
                literal: x,
                value: v,
                min: self.inst.lo(x),
            },
        }
    }

    pub fn cross_violation(mut self, var: usize, c: Surd) -> Certificate {
        let (pos, neg) = (Literal::pos(var), Literal::neg(var));
        let h = self.push(Step::Hypothesis {
            literal: neg,
            value: -&c,
        });
        let (upper, _) = self.realize(pos, neg, h, ExtSurd::Finite(-&c));
        let h = self.push(Step::Hypothesis {
            literal: pos,
            value: c.clone(),
        });
        let (lower, _) = self.realize(neg, pos, h, ExtSurd::Finite(c.clone()));
        Certificate {
            steps: self.steps,
            conclusion: Conclusion::CrossViolation {
                variable: var,
                c,
                upper,
                lower,
            },
        }
    }
}
