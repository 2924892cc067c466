use std::fmt;

use crate::error::{Error, Result};
use crate::exact::Surd;
use crate::pfl::Pfl;

/// A variable or its negation, packed as `2·variable + negated`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal(usize);

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal(2 * var)
    }

    pub fn neg(var: usize) -> Self {
        Literal(2 * var + 1)
    }

    pub fn from_index(i: usize) -> Self {
        Literal(i)
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn var(self) -> usize {
        self.0 / 2
    }

    pub fn is_negated(self) -> bool {
        self.0 % 2 == 1
    }

    pub fn negate(self) -> Self {
        Literal(self.0 ^ 1)
    }

    /// Value of the literal under `witness`.
    pub fn value(self, witness: &[Surd]) -> Surd {
        let v = &witness[self.var()];
        if self.is_negated() {
            -v
        } else {
            v.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub lo: Surd,
    pub hi: Surd,
}

/// `lesser ≤ f(greater)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub lesser: Literal,
    pub greater: Literal,
    pub f: Pfl,
}

impl Constraint {
    /// The equivalent constraint `−greater ≤ f̃(−lesser)`.
    pub fn dual(&self) -> Constraint {
        Constraint {
            lesser: self.greater.negate(),
            greater: self.lesser.negate(),
            f: self.f.dual(),
        }
    }

    pub fn holds(&self, witness: &[Surd]) -> bool {
        self.lesser.value(witness) <= self.f.eval(&self.greater.value(witness))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub metadata: Option<serde_json::Value>,
}

impl Instance {
    pub fn new(variables: Vec<Variable>, constraints: Vec<Constraint>) -> Result<Self> {
        let inst = Instance {
            variables,
            constraints,
            metadata: None,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, v) in self.variables.iter().enumerate() {
            if v.lo > v.hi {
                return Err(Error::InvalidInstance(format!(
                    "variable {} has empty range [{}, {}]",
                    v.name, v.lo, v.hi
                )));
            }
            if self.variables[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::InvalidInstance(format!("duplicate variable {}", v.name)));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.lesser.var() >= self.variables.len() || c.greater.var() >= self.variables.len() {
                return Err(Error::InvalidInstance(format!(
                    "constraint {i} refers to an unknown variable"
                )));
            }
        }
        Ok(())
    }

    pub fn var_count(&self) -> usize {
        self.variables.len()
    }

    pub fn literal_count(&self) -> usize {
        2 * self.variables.len()
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> {
        (0..self.literal_count()).map(Literal::from_index)
    }

    /// Largest value of the literal's range.
    pub fn hi(&self, l: Literal) -> Surd {
        let v = &self.variables[l.var()];
        if l.is_negated() {
            -&v.lo
        } else {
            v.hi.clone()
        }
    }

    /// Smallest value of the literal's range.
    pub fn lo(&self, l: Literal) -> Surd {
        let v = &self.variables[l.var()];
        if l.is_negated() {
            -&v.hi
        } else {
            v.lo.clone()
        }
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn literal_name(&self, l: Literal) -> String {
        let name = &self.variables[l.var()].name;
        if l.is_negated() {
            format!("-{name}")
        } else {
            name.clone()
        }
    }

    /// Adds the dual of every constraint whose dual is not already present.
    pub fn symmetrize(&self) -> Instance {
        let mut out = self.clone();
        for c in &self.constraints {
            let d = c.dual();
            if !out.constraints.contains(&d) {
                out.constraints.push(d);
            }
        }
        out
    }

    /// Copy with variable `var` pinned to `value`.
    pub fn fix(&self, var: usize, value: Surd) -> Instance {
        let mut out = self.clone();
        out.variables[var].lo = value.clone();
        out.variables[var].hi = value;
        out
    }

    /// Largest coefficient or breakpoint bit length in the input.
    pub fn bits(&self) -> u64 {
        let ranges = self
            .variables
            .iter()
            .flat_map(|v| [v.lo.bits(), v.hi.bits()]);
        let fs = self.constraints.iter().map(|c| c.f.bits());
        ranges.chain(fs).max().unwrap_or(0)
    }

    pub fn max_pieces(&self) -> usize {
        self.constraints.iter().map(|c| c.f.piece_count()).max().unwrap_or(1)
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.variables {
            writeln!(f, "{} ∈ [{}, {}]", v.name, v.lo, v.hi)?;
        }
        for c in &self.constraints {
            writeln!(
                f,
                "{} ≤ f({})  f = {}",
                self.literal_name(c.lesser),
                self.literal_name(c.greater),
                c.f
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    fn var(name: &str, lo: i64, hi: i64) -> Variable {
        Variable {
            name: name.into(),
            lo: Surd::from_int(lo),
            hi: Surd::from_int(hi),
        }
    }

    #[test]
    fn literal_packing() {
        let l = Literal::neg(3);
        assert_eq!(l.var(), 3);
        assert!(l.is_negated());
        assert_eq!(l.negate(), Literal::pos(3));
        assert_eq!(l.negate().negate(), l);
    }

    #[test]
    fn negated_ranges() {
        let inst = Instance::new(vec![var("x", 1, 2)], vec![]).unwrap();
        assert_eq!(inst.hi(Literal::neg(0)), Surd::from_int(-1));
        assert_eq!(inst.lo(Literal::neg(0)), Surd::from_int(-2));
    }

    #[test]
    fn symmetrize_adds_duals_once() {
        let c = Constraint {
            lesser: Literal::pos(0),
            greater: Literal::pos(1),
            f: Pfl::shift(&int(1)),
        };
        let inst = Instance::new(vec![var("x", 0, 1), var("y", 0, 1)], vec![c]).unwrap();
        let s = inst.symmetrize();
        assert_eq!(s.constraints.len(), 2);
        let d = &s.constraints[1];
        assert_eq!((d.lesser, d.greater), (Literal::neg(1), Literal::neg(0)));
        assert_eq!(d.f, Pfl::shift(&int(1)));
        assert_eq!(s.symmetrize(), s);
        let empty = Instance::new(vec![], vec![]).unwrap();
        assert_eq!(empty.symmetrize(), empty);
    }

    #[test]
    fn validation() {
        assert!(Instance::new(vec![var("x", 2, 1)], vec![]).is_err());
        assert!(Instance::new(vec![var("x", 0, 1), var("x", 0, 1)], vec![]).is_err());
        let c = Constraint {
            lesser: Literal::pos(0),
            greater: Literal::pos(4),
            f: Pfl::identity(),
        };
        assert!(Instance::new(vec![var("x", 0, 1)], vec![c]).is_err());
    }
}
