use crate::certify::{verify_sat, verify_unsat, Certificate};
use crate::error::{Error, Result};
use crate::exact::{ExtSurd, Surd};
use crate::pfl::{line_region, Cmp, Interval, IntervalSet, MonoMap};

use super::emit::Emitter;
use super::instance::{Instance, Literal};
use super::reach::Reach;
use super::table::PathTable;

/// What makes an instance unsatisfiable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    /// `min_{x→y}(max range(y))` lies below `min range(x)`.
    Range { x: Literal, y: Literal, value: ExtSurd },
    /// Both `var ≥ c` and `var ≤ c` are refuted.
    Cross { var: usize, c: Surd },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat(Vec<Surd>),
    Unsat(Certificate),
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat(_))
    }
}

/// The closed table of an instance with the per-variable minimum maps the
/// decision needs. Depends only on the constraints, so it stays valid when
/// ranges shrink.
pub struct Analysis {
    reach: Reach,
    /// `[min_{v→−v}, min_{−v→v}, min_{v→v}]` per variable.
    own: Vec<[MonoMap; 3]>,
}

impl Analysis {
    pub fn new(inst: &Instance) -> Self {
        Self::from_table(PathTable::build(inst))
    }

    pub fn from_table(table: PathTable) -> Self {
        let reach = Reach::new(table);
        let vars = reach.literal_count() / 2;
        let own = (0..vars)
            .map(|v| {
                let (p, n) = (Literal::pos(v), Literal::neg(v));
                [
                    reach.min_function(p, n),
                    reach.min_function(n, p),
                    reach.min_function(p, p),
                ]
            })
            .collect();
        Analysis { reach, own }
    }

    pub fn reach(&self) -> &Reach {
        &self.reach
    }

    pub fn table(&self) -> &PathTable {
        self.reach.table()
    }

    /// Values `c` for which both case splits on `var` fail.
    pub fn cross_region(&self, var: usize) -> IntervalSet {
        let [pn, np, _] = &self.own[var];
        let above = line_region(pn, -1, 1, Cmp::Lt);
        let below = line_region(np, 1, -1, Cmp::Lt);
        above.intersect(&below)
    }

    pub fn find_violation(&self, inst: &Instance) -> Option<Evidence> {
        for x in inst.literals() {
            let lo = ExtSurd::Finite(inst.lo(x));
            for y in inst.literals() {
                let value = self.reach.eval_min(x, y, &ExtSurd::Finite(inst.hi(y)));
                if value < lo {
                    return Some(Evidence::Range { x, y, value });
                }
            }
        }
        for var in 0..inst.var_count() {
            let v = &inst.variables[var];
            let range = IntervalSet::interval(Interval::closed(
                ExtSurd::Finite(v.lo.clone()),
                ExtSurd::Finite(v.hi.clone()),
            ));
            if let Some(c) = self.cross_region(var).intersect(&range).pick_high() {
                return Some(Evidence::Cross { var, c });
            }
        }
        None
    }

    pub fn certificate(&self, inst: &Instance, evidence: &Evidence) -> Certificate {
        let e = Emitter::new(inst, &self.reach);
        match evidence {
            Evidence::Range { x, y, .. } => e.range_violation(*x, *y),
            Evidence::Cross { var, c } => e.cross_violation(*var, c.clone()),
        }
    }

    /// Values of `var` compatible with the bounds every other literal
    /// imposes under the ranges of `inst`.
    pub fn feasible_set(&self, inst: &Instance, var: usize) -> IntervalSet {
        let (p, n) = (Literal::pos(var), Literal::neg(var));
        let v = &inst.variables[var];
        let mut lo = ExtSurd::Finite(v.lo.clone());
        let mut hi = ExtSurd::Finite(v.hi.clone());
        for x in inst.literals().filter(|x| x.var() != var) {
            let t = ExtSurd::Finite(inst.hi(x));
            hi = hi.min(self.reach.eval_min(p, x, &t));
            lo = lo.max(-self.reach.eval_min(n, x, &t));
        }
        let [pn, np, pp] = &self.own[var];
        IntervalSet::interval(Interval::closed(lo, hi))
            .intersect(&line_region(pn, -1, 1, Cmp::Ge))
            .intersect(&line_region(np, 1, -1, Cmp::Ge))
            .intersect(&line_region(pp, 1, 1, Cmp::Ge))
    }

    /// Fixes variables in order, each to the largest feasible value.
    pub fn extract_witness(&self, inst: &Instance) -> Result<Vec<Surd>> {
        let mut cur = inst.clone();
        let mut out = Vec::with_capacity(inst.var_count());
        for var in 0..inst.var_count() {
            let set = self.feasible_set(&cur, var);
            let c = set.pick_high().ok_or_else(|| {
                Error::Internal(format!("no feasible value for {}", inst.variables[var].name))
            })?;
            cur = cur.fix(var, c.clone());
            out.push(c);
        }
        Ok(out)
    }
}

/// Decides `inst`, checking the answer before returning it.
pub fn solve(inst: &Instance) -> Result<Verdict> {
    inst.validate()?;
    let analysis = Analysis::new(inst);
    decide(inst, &analysis)
}

/// [`solve`] over a prebuilt analysis of the same constraints.
pub fn decide(inst: &Instance, analysis: &Analysis) -> Result<Verdict> {
    if let Some(e) = analysis.find_violation(inst) {
        let cert = analysis.certificate(inst, &e);
        verify_unsat(inst, &cert)
            .map_err(|r| Error::Internal(format!("emitted certificate rejected: {r}")))?;
        return Ok(Verdict::Unsat(cert));
    }
    let w = analysis.extract_witness(inst)?;
    verify_sat(inst, &w).map_err(|r| Error::Internal(format!("extracted witness rejected: {r}")))?;
    Ok(Verdict::Sat(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::Conclusion;
    use crate::exact::int;
    use crate::fixtures;

    fn sqrt2() -> Surd {
        Surd::sqrt_of(int(1), 2.into()).unwrap()
    }

    #[test]
    fn single_irrational_solution() {
        let inst = fixtures::sqrt_two();
        let a = Analysis::new(&inst);
        let set = a.feasible_set(&inst, 0);
        assert_eq!(set.parts().len(), 1);
        assert_eq!(set.parts()[0], Interval::closed(ExtSurd::Finite(sqrt2()), ExtSurd::Finite(sqrt2())));
        assert_eq!(solve(&inst).unwrap(), Verdict::Sat(vec![sqrt2()]));
    }

    #[test]
    fn three_guards_meet_at_sqrt_two() {
        let inst = fixtures::three_guards();
        assert_eq!(solve(&inst).unwrap(), Verdict::Sat(vec![sqrt2(); 3]));
    }

    #[test]
    fn range_refutation() {
        let inst = fixtures::shifted_below();
        let Verdict::Unsat(cert) = solve(&inst).unwrap() else {
            panic!("expected a refutation");
        };
        assert!(matches!(cert.conclusion, Conclusion::RangeViolation { .. }));
    }

    #[test]
    fn only_ranges() {
        let inst = Instance::new(
            vec![crate::solver::Variable {
                name: "a".into(),
                lo: Surd::from_int(-3),
                hi: Surd::from_int(4),
            }],
            vec![],
        )
        .unwrap();
        assert_eq!(solve(&inst).unwrap(), Verdict::Sat(vec![Surd::from_int(4)]));
    }

    #[test]
    fn shrinking_range_is_refuted() {
        // x ≤ √2 and x ≥ √2 with x ∈ [0, 1]
        let mut inst = fixtures::sqrt_two();
        inst.variables[0].hi = Surd::from_int(1);
        assert!(!solve(&inst).unwrap().is_sat());
    }
}
