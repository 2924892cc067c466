use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::exact::ExtSurd;
use crate::pfl::{attracting_points, inf_power, MonoMap};

use super::instance::Literal;
use super::table::PathTable;

/// One way a value of `min_{x→y}` arises.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Route {
    /// The table entry `f_{x→y}` (the loop closure when `x = y`).
    Direct,
    /// Enter at `w` (from `y`, then close `w`'s loop), walk back through the
    /// attracting-point graph to `z`, then take `f_{x→z}` (nothing when
    /// `z = x`).
    Via { w: Literal, z: Literal },
}

/// Loops, attracting points and the attracting-point graph over a finished
/// [`PathTable`]; evaluates `min_{x→y}`, the least bound on `x` implied by a
/// bound on `y` along tight paths.
pub struct Reach {
    table: PathTable,
    lits: usize,
    maps: Vec<Option<MonoMap>>,
    loops: Vec<Option<MonoMap>>,
    nodes: Vec<Vec<ExtSurd>>,
    /// For each node `(w, d)`: the least `c` per literal `z` such that
    /// `(z, c)` reaches `(w, d)`.
    sources: BTreeMap<(Literal, ExtSurd), Vec<Option<ExtSurd>>>,
}

impl Reach {
    pub fn new(table: PathTable) -> Self {
        let lits = table.literal_count();
        let mut maps = Vec::with_capacity(lits * lits);
        for x in 0..lits {
            for y in 0..lits {
                let f = table.get(Literal::from_index(x), Literal::from_index(y));
                maps.push(f.map(|f| f.to_monomap()));
            }
        }
        let mut loops = Vec::with_capacity(lits);
        let mut nodes = Vec::with_capacity(lits);
        for x in 0..lits {
            match &maps[x * lits + x] {
                Some(f) => {
                    loops.push(Some(inf_power(f)));
                    nodes.push(attracting_points(f));
                }
                None => {
                    loops.push(None);
                    nodes.push(Vec::new());
                }
            }
        }
        let mut reach = Reach {
            table,
            lits,
            maps,
            loops,
            nodes,
            sources: BTreeMap::new(),
        };
        let all: Vec<(Literal, ExtSurd)> = reach.all_nodes().collect();
        for node in all {
            let best = reach.backward(&node).0;
            reach.sources.insert(node, best);
        }
        reach
    }

    pub fn table(&self) -> &PathTable {
        &self.table
    }

    pub fn literal_count(&self) -> usize {
        self.lits
    }

    fn all_nodes(&self) -> impl Iterator<Item = (Literal, ExtSurd)> + '_ {
        (0..self.lits).flat_map(move |x| {
            self.nodes[x]
                .iter()
                .map(move |c| (Literal::from_index(x), c.clone()))
        })
    }

    /// `f_{x→y}` from the table, as a map.
    pub fn map(&self, x: Literal, y: Literal) -> Option<&MonoMap> {
        self.maps[x.index() * self.lits + y.index()].as_ref()
    }

    /// `f_{x→x}^∞`, when `x` has a loop.
    pub fn loop_limit(&self, x: Literal) -> Option<&MonoMap> {
        self.loops[x.index()].as_ref()
    }

    /// Values of `f_{x→x}^∞`, the graph nodes at `x`.
    pub fn attracting(&self, x: Literal) -> &[ExtSurd] {
        &self.nodes[x.index()]
    }

    /// Edge of the loop-closed formula: the table entry, or the loop limit
    /// on the diagonal.
    fn edge(&self, x: Literal, y: Literal) -> Option<&MonoMap> {
        if x == y {
            self.loop_limit(x)
        } else {
            self.map(x, y)
        }
    }

    /// Graph predecessors of `(y, d)`: `(x, f^∞_{x→x}(f_{x→y}(d)))`.
    fn predecessors<'a>(&'a self, y: Literal, d: &'a ExtSurd) -> impl Iterator<Item = (Literal, ExtSurd)> + 'a {
        (0..self.lits).filter_map(move |x| {
            let x = Literal::from_index(x);
            if x == y {
                return None;
            }
            let l = self.loop_limit(x)?;
            let f = self.map(x, y)?;
            Some((x, l.eval(&f.eval(d))))
        })
    }

    /// Reverse search from `target`: the least source value per literal and
    /// the parent links (towards `target`) of every reached node.
    #[allow(clippy::type_complexity)]
    fn backward(
        &self,
        target: &(Literal, ExtSurd),
    ) -> (Vec<Option<ExtSurd>>, BTreeMap<(Literal, ExtSurd), (Literal, ExtSurd)>) {
        let mut best: Vec<Option<ExtSurd>> = vec![None; self.lits];
        let mut parent = BTreeMap::new();
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(target.clone());
        queue.push_back(target.clone());
        while let Some((y, d)) = queue.pop_front() {
            let slot = &mut best[y.index()];
            if slot.as_ref().map_or(true, |b| d < *b) {
                *slot = Some(d.clone());
            }
            for node in self.predecessors(y, &d) {
                if seen.insert(node.clone()) {
                    parent.insert(node.clone(), (y, d.clone()));
                    queue.push_back(node);
                }
            }
        }
        (best, parent)
    }

    /// `G(z → (w, d))`, when some node at `z` reaches `(w, d)`.
    pub fn graph_min(&self, z: Literal, w: Literal, d: &ExtSurd) -> Option<&ExtSurd> {
        self.sources.get(&(w, d.clone()))?[z.index()].as_ref()
    }

    /// Nodes from `(z, G(z → (w, d)))` to `(w, d)` inclusive.
    pub fn graph_path(&self, z: Literal, w: Literal, d: &ExtSurd) -> Option<Vec<(Literal, ExtSurd)>> {
        let target = (w, d.clone());
        let (best, parent) = self.backward(&target);
        let mut node = (z, best[z.index()].clone()?);
        let mut path = vec![node.clone()];
        while node != target {
            node = parent.get(&node)?.clone();
            path.push(node.clone());
        }
        Some(path)
    }

    /// Candidate values of `min_{x→y}(c)` with the route producing each.
    fn candidates(&self, x: Literal, y: Literal, c: &ExtSurd) -> Vec<(ExtSurd, Route)> {
        let mut out = Vec::new();
        if let Some(f) = self.edge(x, y) {
            out.push((f.eval(c), Route::Direct));
        }
        for w in (0..self.lits).map(Literal::from_index) {
            let (Some(lw), Some(f)) = (self.loop_limit(w), self.edge(w, y)) else {
                continue;
            };
            let d = lw.eval(&f.eval(c));
            let Some(srcs) = self.sources.get(&(w, d)) else {
                continue;
            };
            for (zi, g) in srcs.iter().enumerate() {
                let (Some(g), z) = (g, Literal::from_index(zi)) else {
                    continue;
                };
                let v = if z == x {
                    g.clone()
                } else if let Some(h) = self.map(x, z) {
                    h.eval(g)
                } else {
                    continue;
                };
                out.push((v, Route::Via { w, z }));
            }
        }
        out
    }

    /// `min_{x→y}(c)`: `+∞` when no tight path leads from `y` to `x`.
    pub fn eval_min(&self, x: Literal, y: Literal, c: &ExtSurd) -> ExtSurd {
        self.eval_min_route(x, y, c)
            .map_or(ExtSurd::PosInf, |(v, _)| v)
    }

    /// `min_{x→y}(c)` with a route attaining it (first in enumeration order
    /// among ties).
    pub fn eval_min_route(&self, x: Literal, y: Literal, c: &ExtSurd) -> Option<(ExtSurd, Route)> {
        let mut best: Option<(ExtSurd, Route)> = None;
        for (v, r) in self.candidates(x, y, c) {
            if best.as_ref().map_or(true, |(b, _)| v < *b) {
                best = Some((v, r));
            }
        }
        // closing with x's own loop never lowers the value: every candidate's
        // image under f^∞_{x→x} is itself a candidate
        let (inner, route) = best?;
        let closed = match self.loop_limit(x) {
            Some(l) => l.eval(&inner).min(inner),
            None => inner,
        };
        Some((closed, route))
    }

    /// `min_{x→y}` as a map.
    pub fn min_function(&self, x: Literal, y: Literal) -> MonoMap {
        let mut parts = Vec::new();
        if let Some(f) = self.edge(x, y) {
            parts.push(f.clone());
        }
        for w in (0..self.lits).map(Literal::from_index) {
            let (Some(lw), Some(f)) = (self.loop_limit(w), self.edge(w, y)) else {
                continue;
            };
            let entry = MonoMap::compose(lw, f);
            for z in (0..self.lits).map(Literal::from_index) {
                if self.loop_limit(z).is_none() {
                    continue;
                }
                let tail = if z == x { None } else { self.map(x, z) };
                if z != x && tail.is_none() {
                    continue;
                }
                let step = entry.map_values(|d| {
                    self.graph_min(z, w, d)
                        .cloned()
                        .unwrap_or(ExtSurd::PosInf)
                });
                parts.push(match tail {
                    Some(h) => MonoMap::compose(h, &step),
                    None => step,
                });
            }
        }
        if parts.is_empty() {
            return MonoMap::constant(ExtSurd::PosInf);
        }
        MonoMap::envelope_min(&parts)
    }
}
