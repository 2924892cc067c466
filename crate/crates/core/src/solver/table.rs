use crate::pfl::Pfl;

use super::instance::{Instance, Literal};

/// Piece counts observed while building a [`PathTable`].
#[derive(Clone, Debug, Default)]
pub struct PieceStats {
    /// `(pieces(f), pieces(g), pieces(f ∘ g))` per composition.
    pub compositions: Vec<[usize; 3]>,
    /// `(j, k, pieces)` per envelope of `j` maps with at most `k` pieces each.
    pub envelopes: Vec<[usize; 3]>,
}

/// Where a table entry of some round came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    /// Round 0: the listed instance constraints, each possibly dualized.
    Constraints(Vec<(usize, bool)>),
    /// Same map as the previous round.
    Unchanged,
    /// Minimum of the previous entry (if any) and compositions through the
    /// listed middle literals.
    Combined { keep: bool, via: Vec<Literal> },
}

/// The strongest constraint `x ≤ f(y)` known for every ordered literal pair
/// after repeated composition-and-minimum rounds.
#[derive(Clone, Debug)]
pub struct PathTable {
    lits: usize,
    rounds: Vec<Vec<Option<Pfl>>>,
    origins: Vec<Vec<Origin>>,
    pub stats: PieceStats,
}

/// Number of rounds that covers every non-repeating path: `⌈log₂ n⌉ + 1`.
pub fn round_count(vars: usize) -> usize {
    let mut m = 1;
    while (1usize << (m - 1)) < vars.max(1) {
        m += 1;
    }
    m
}

impl PathTable {
    pub fn build(inst: &Instance) -> PathTable {
        Self::build_rounds(inst, round_count(inst.var_count()), true)
    }

    /// Runs exactly `rounds` rounds, or stops at the first round that
    /// changes nothing when `early_stop` is set.
    pub fn build_rounds(inst: &Instance, rounds: usize, early_stop: bool) -> PathTable {
        let lits = inst.literal_count();
        let mut stats = PieceStats::default();
        let mut first: Vec<Vec<Pfl>> = vec![Vec::new(); lits * lits];
        let mut origin0: Vec<Vec<(usize, bool)>> = vec![Vec::new(); lits * lits];
        for (i, c) in inst.constraints.iter().enumerate() {
            let d = c.dual();
            for (con, dual) in [(c, false), (&d, true)] {
                let k = con.lesser.index() * lits + con.greater.index();
                if !first[k].contains(&con.f) {
                    first[k].push(con.f.clone());
                    origin0[k].push((i, dual));
                }
            }
        }
        let t0: Vec<Option<Pfl>> = first
            .iter()
            .map(|fs| {
                if fs.is_empty() {
                    return None;
                }
                let m = Pfl::min(fs);
                stats.envelopes.push(envelope_record(fs, &m));
                Some(m)
            })
            .collect();
        let mut table = PathTable {
            lits,
            rounds: vec![t0],
            origins: vec![origin0.into_iter().map(Origin::Constraints).collect()],
            stats,
        };
        for _ in 0..rounds {
            let changed = table.step();
            if early_stop && !changed {
                break;
            }
        }
        table
    }

    fn step(&mut self) -> bool {
        let n = self.lits;
        let prev = self.rounds.last().expect("round 0");
        let mut next = Vec::with_capacity(n * n);
        let mut origins = Vec::with_capacity(n * n);
        let mut changed = false;
        for x in 0..n {
            for y in 0..n {
                let mut cands = Vec::new();
                let mut via = Vec::new();
                let keep = prev[x * n + y].is_some();
                if let Some(f) = &prev[x * n + y] {
                    cands.push(f.clone());
                }
                for z in (0..n).filter(|&z| z != x && z != y) {
                    if let (Some(f), Some(g)) = (&prev[x * n + z], &prev[z * n + y]) {
                        let h = f.compose(g);
                        self.stats
                            .compositions
                            .push([f.piece_count(), g.piece_count(), h.piece_count()]);
                        cands.push(h);
                        via.push(Literal::from_index(z));
                    }
                }
                let entry = if cands.is_empty() {
                    None
                } else {
                    let m = Pfl::min(&cands);
                    self.stats.envelopes.push(envelope_record(&cands, &m));
                    Some(m)
                };
                if entry == prev[x * n + y] {
                    origins.push(Origin::Unchanged);
                } else {
                    changed = true;
                    origins.push(Origin::Combined { keep, via });
                }
                next.push(entry);
            }
        }
        self.rounds.push(next);
        self.origins.push(origins);
        changed
    }

    pub fn literal_count(&self) -> usize {
        self.lits
    }

    /// Rounds computed after round 0.
    pub fn rounds_run(&self) -> usize {
        self.rounds.len() - 1
    }

    pub fn get(&self, x: Literal, y: Literal) -> Option<&Pfl> {
        self.at_round(self.rounds_run(), x, y)
    }

    pub fn at_round(&self, round: usize, x: Literal, y: Literal) -> Option<&Pfl> {
        self.rounds[round][x.index() * self.lits + y.index()].as_ref()
    }

    pub fn origin(&self, round: usize, x: Literal, y: Literal) -> &Origin {
        &self.origins[round][x.index() * self.lits + y.index()]
    }

    /// Largest coefficient bit length in the final table.
    pub fn bits(&self) -> u64 {
        let last = self.rounds.last().expect("round 0");
        last.iter().flatten().map(Pfl::bits).max().unwrap_or(0)
    }
}

fn envelope_record(inputs: &[Pfl], out: &Pfl) -> [usize; 3] {
    let k = inputs.iter().map(Pfl::piece_count).max().unwrap_or(0);
    [inputs.len(), k, out.piece_count()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, Surd};
    use crate::solver::instance::{Constraint, Variable};

    fn chain() -> Instance {
        let var = |n: &str| Variable {
            name: n.into(),
            lo: Surd::from_int(0),
            hi: Surd::from_int(1),
        };
        let c = |a, b, s| Constraint {
            lesser: Literal::pos(a),
            greater: Literal::pos(b),
            f: Pfl::shift(&int(s)),
        };
        Instance::new(
            vec![var("x"), var("y"), var("z")],
            vec![c(0, 1, 1), c(1, 2, 2), c(0, 1, 3)],
        )
        .unwrap()
    }

    #[test]
    fn rounds_for_sizes() {
        assert_eq!(round_count(1), 1);
        assert_eq!(round_count(2), 2);
        assert_eq!(round_count(3), 3);
        assert_eq!(round_count(4), 3);
        assert_eq!(round_count(5), 4);
    }

    #[test]
    fn chain_composes_and_folds() {
        let t = PathTable::build(&chain());
        let (x, y, z) = (Literal::pos(0), Literal::pos(1), Literal::pos(2));
        assert_eq!(t.get(x, y), Some(&Pfl::shift(&int(1))));
        assert_eq!(t.get(x, z), Some(&Pfl::shift(&int(3))));
        assert_eq!(t.get(z.negate(), x.negate()), Some(&Pfl::shift(&int(3))));
        assert_eq!(t.get(z, x), None);
        assert!(t.rounds_run() <= 3);
    }
}
