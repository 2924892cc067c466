use crate::error::Result;
use crate::exact::{Rational, Surd};
use crate::solver::{solve, Instance, Verdict};

use super::geometry::Polygon;
use super::plan::{BreakSpec, EdgePlan, GuardPlan, GuardSpec};
use super::reduce::reduce;

/// Limits on the plans [`enumerate_plans`] produces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Breaks per edge, so at most `max_breaks + 1` intervals.
    pub max_breaks: usize,
    /// Each edge is cut into this many cells; a guard is placed in one cell.
    pub guard_positions: usize,
    /// Stop after this many plans.
    pub max_plans: Option<usize>,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_breaks: 1,
            guard_positions: 2,
            max_plans: Some(100_000),
        }
    }
}

fn r(n: usize, d: usize) -> Rational {
    Rational::new((n as i64).into(), (d as i64).into())
}

/// Owner sequences for one edge: consecutive owners differ, fewest breaks
/// first.
fn edge_options(guards: usize, max_breaks: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0..guards).map(|g| vec![g]).collect();
    let mut layer = out.clone();
    for _ in 0..max_breaks {
        let mut next = Vec::new();
        for seq in &layer {
            let last = *seq.last().expect("nonempty");
            for g in (0..guards).filter(|&g| g != last) {
                let mut s = seq.clone();
                s.push(g);
                next.push(s);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Lazily walks every plan within the caps in a fixed order: guard
/// placements as nondecreasing sequences of (edge, cell) slots, then the
/// per-edge owner choices as a mixed-radix counter.
pub struct PlanIter {
    n: usize,
    positions: usize,
    slots: Option<Vec<usize>>,
    options: Vec<Vec<usize>>,
    counter: Vec<usize>,
    produced: usize,
    limit: Option<usize>,
    truncated: bool,
}

impl PlanIter {
    /// Whether the plan limit cut the enumeration short.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    fn advance_counter(&mut self) -> bool {
        for c in self.counter.iter_mut() {
            *c += 1;
            if *c < self.options.len() {
                return true;
            }
            *c = 0;
        }
        false
    }

    fn advance_slots(&mut self) {
        let total = self.n * self.positions;
        let Some(s) = self.slots.as_mut() else { return };
        let mut i = s.len();
        while i > 0 {
            i -= 1;
            if s[i] + 1 < total {
                let v = s[i] + 1;
                for x in s[i..].iter_mut() {
                    *x = v;
                }
                return;
            }
        }
        self.slots = None;
    }

    fn build(&self, slots: &[usize]) -> GuardPlan {
        let p = self.positions;
        let guards = slots
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let cell = s % p;
                let (lo, hi) = (r(cell, p), r(cell + 1, p));
                let reference = (&lo + &hi) / Rational::from_integer(2.into());
                GuardSpec {
                    name: format!("g{i}"),
                    edge: s / p,
                    lo,
                    hi,
                    reference,
                }
            })
            .collect();
        let edges = (0..self.n)
            .map(|e| {
                let owners = self.options[self.counter[e]].clone();
                let k = owners.len();
                let breaks = (1..k)
                    .map(|i| BreakSpec {
                        name: format!("e{e}b{i}"),
                        lo: r(0, 1),
                        hi: r(1, 1),
                        reference: r(i, k),
                    })
                    .collect();
                EdgePlan { edge: e, breaks, owners }
            })
            .collect();
        GuardPlan { guards, edges }
    }
}

impl Iterator for PlanIter {
    type Item = GuardPlan;

    fn next(&mut self) -> Option<GuardPlan> {
        let slots = self.slots.clone()?;
        if self.limit.is_some_and(|l| self.produced >= l) {
            self.truncated = true;
            return None;
        }
        let plan = self.build(&slots);
        self.produced += 1;
        if !self.advance_counter() {
            self.advance_slots();
        }
        Some(plan)
    }
}

pub fn enumerate_plans<T>(poly: &Polygon<T>, guards: usize, caps: &Caps) -> PlanIter
where
    T: super::geometry::Scalar,
{
    let n = poly.len();
    let positions = caps.guard_positions.max(1);
    PlanIter {
        n,
        positions,
        slots: (guards > 0).then(|| vec![0; guards]),
        options: edge_options(guards, caps.max_breaks),
        counter: vec![0; n],
        produced: 0,
        limit: caps.max_plans,
        truncated: false,
    }
}

/// The result of trying plans in order.
#[derive(Clone, Debug)]
pub enum Search {
    Sat {
        index: usize,
        plan: GuardPlan,
        instance: Instance,
        witness: Vec<Surd>,
    },
    /// No plan worked; `complete` is false when the plan limit was hit.
    Unsat { tried: usize, complete: bool },
}

/// Reduces and solves one plan.
pub fn solve_plan(poly: &Polygon<Rational>, plan: &GuardPlan) -> Result<(Instance, Verdict)> {
    let inst = reduce(poly, plan)?;
    let v = solve(&inst)?;
    Ok((inst, v))
}

/// Sequential first-SAT search over [`enumerate_plans`].
pub fn solve_any(poly: &Polygon<Rational>, guards: usize, caps: &Caps) -> Result<Search> {
    let mut it = enumerate_plans(poly, guards, caps);
    let mut tried = 0;
    for plan in it.by_ref() {
        let (instance, v) = solve_plan(poly, &plan)?;
        if let Verdict::Sat(witness) = v {
            return Ok(Search::Sat {
                index: tried,
                plan,
                instance,
                witness,
            });
        }
        tried += 1;
    }
    Ok(Search::Unsat {
        tried,
        complete: !it.truncated(),
    })
}
