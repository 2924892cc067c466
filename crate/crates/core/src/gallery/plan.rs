use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, Rational};

use super::geometry::{Polygon, Scalar};

/// A guard standing somewhere on one polygon edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardSpec {
    pub name: String,
    pub edge: usize,
    pub lo: Rational,
    pub hi: Rational,
    /// Parameter used to fix sides and relevance; the midpoint by default.
    pub reference: Rational,
}

/// An interval endpoint variable on an edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BreakSpec {
    pub name: String,
    pub lo: Rational,
    pub hi: Rational,
    pub reference: Rational,
}

/// Partition of one edge: `breaks` cut it into `breaks.len() + 1` intervals,
/// and `owners[i]` is the index of the guard responsible for interval `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgePlan {
    pub edge: usize,
    pub breaks: Vec<BreakSpec>,
    pub owners: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardPlan {
    pub guards: Vec<GuardSpec>,
    pub edges: Vec<EdgePlan>,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidPlan(msg.into()))
}

impl GuardPlan {
    /// Checks the plan against the polygon: every edge partitioned exactly
    /// once, owners matching intervals, ranges inside `[0, 1]`, references
    /// inside their ranges and increasing along each edge.
    pub fn validate<T: Scalar>(&self, poly: &Polygon<T>) -> Result<()> {
        let n = poly.vertices().len();
        let zero = Rational::from_integer(0.into());
        let one = Rational::from_integer(1.into());
        let range_ok = |lo: &Rational, hi: &Rational, r: &Rational| {
            zero <= *lo && lo <= hi && *hi <= one && lo <= r && r <= hi
        };
        if self.guards.is_empty() {
            return invalid("no guards");
        }
        let mut names: Vec<&str> = Vec::new();
        for g in &self.guards {
            if g.edge >= n {
                return invalid(format!("guard {} on edge {} of a {n}-gon", g.name, g.edge));
            }
            if !range_ok(&g.lo, &g.hi, &g.reference) {
                return invalid(format!("guard {} has a bad range or reference", g.name));
            }
            names.push(&g.name);
        }
        let mut seen = vec![false; n];
        for e in &self.edges {
            if e.edge >= n {
                return invalid(format!("edge {} of a {n}-gon", e.edge));
            }
            if seen[e.edge] {
                return invalid(format!("edge {} is partitioned twice (overlap)", e.edge));
            }
            seen[e.edge] = true;
            if e.owners.len() != e.breaks.len() + 1 {
                return invalid(format!(
                    "edge {}: {} breaks need {} owners, got {}",
                    e.edge,
                    e.breaks.len(),
                    e.breaks.len() + 1,
                    e.owners.len()
                ));
            }
            if e.breaks.len() + 1 > n * n {
                return invalid(format!("edge {} has more than {} intervals", e.edge, n * n));
            }
            if let Some(&o) = e.owners.iter().find(|&&o| o >= self.guards.len()) {
                return invalid(format!("edge {}: owner {o} is not a guard", e.edge));
            }
            for b in &e.breaks {
                if !range_ok(&b.lo, &b.hi, &b.reference) {
                    return invalid(format!("break {} has a bad range or reference", b.name));
                }
                names.push(&b.name);
            }
            if e.breaks.windows(2).any(|w| w[0].reference >= w[1].reference) {
                return invalid(format!("edge {}: break references are not increasing", e.edge));
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return invalid(format!("edge {i} is not covered"));
        }
        let mut sorted = names.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return invalid(format!("duplicate name {}", w[0]));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGuard {
    name: String,
    edge: usize,
    #[serde(default = "unit_range")]
    range: [String; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reference: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBreak {
    name: String,
    #[serde(default = "unit_range")]
    range: [String; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reference: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    edge: usize,
    #[serde(default)]
    breaks: Vec<RawBreak>,
    owners: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlan {
    guards: Vec<RawGuard>,
    edges: Vec<RawEdge>,
}

fn unit_range() -> [String; 2] {
    ["0".into(), "1".into()]
}

fn range_of(range: &[String; 2], reference: &Option<String>) -> Result<(Rational, Rational, Rational)> {
    let lo = parse_rational(&range[0])?;
    let hi = parse_rational(&range[1])?;
    let r = match reference {
        Some(s) => parse_rational(s)?,
        None => (&lo + &hi) / Rational::from_integer(2.into()),
    };
    Ok((lo, hi, r))
}

pub fn parse_plan(text: &str) -> Result<GuardPlan> {
    let raw: RawPlan = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut guards = Vec::with_capacity(raw.guards.len());
    for g in raw.guards {
        let (lo, hi, reference) = range_of(&g.range, &g.reference)?;
        guards.push(GuardSpec {
            name: g.name,
            edge: g.edge,
            lo,
            hi,
            reference,
        });
    }
    let mut edges = Vec::with_capacity(raw.edges.len());
    for e in raw.edges {
        let mut breaks = Vec::with_capacity(e.breaks.len());
        for b in e.breaks {
            let (lo, hi, reference) = range_of(&b.range, &b.reference)?;
            breaks.push(BreakSpec {
                name: b.name,
                lo,
                hi,
                reference,
            });
        }
        let owners = e
            .owners
            .iter()
            .map(|o| {
                guards
                    .iter()
                    .position(|g| g.name == *o)
                    .ok_or_else(|| Error::InvalidPlan(format!("unknown guard {o}")))
            })
            .collect::<Result<Vec<_>>>()?;
        edges.push(EdgePlan {
            edge: e.edge,
            breaks,
            owners,
        });
    }
    Ok(GuardPlan { guards, edges })
}

pub fn write_plan(plan: &GuardPlan) -> String {
    let fr = format_rational;
    let raw = RawPlan {
        guards: plan
            .guards
            .iter()
            .map(|g| RawGuard {
                name: g.name.clone(),
                edge: g.edge,
                range: [fr(&g.lo), fr(&g.hi)],
                reference: Some(fr(&g.reference)),
            })
            .collect(),
        edges: plan
            .edges
            .iter()
            .map(|e| RawEdge {
                edge: e.edge,
                breaks: e
                    .breaks
                    .iter()
                    .map(|b| RawBreak {
                        name: b.name.clone(),
                        range: [fr(&b.lo), fr(&b.hi)],
                        reference: Some(fr(&b.reference)),
                    })
                    .collect(),
                owners: e.owners.iter().map(|&o| plan.guards[o].name.clone()).collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("plan serializes")
}

/// Parses a list of integer coordinate pairs into a polygon.
pub fn parse_polygon(text: &str) -> Result<Polygon<Rational>> {
    let pts: Vec<[i64; 2]> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    polygon_from_ints(&pts)
}

pub fn polygon_from_ints(pts: &[[i64; 2]]) -> Result<Polygon<Rational>> {
    let vs = pts
        .iter()
        .map(|&[x, y]| super::geometry::Point::new(Rational::from_integer(x.into()), Rational::from_integer(y.into())))
        .collect();
    Polygon::new(vs).map_err(Error::InvalidPolygon)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Polygon<Rational> {
        polygon_from_ints(&[[0, 0], [1, 0], [1, 1], [0, 1]]).unwrap()
    }

    const ONE_GUARD: &str = r#"{
        "guards": [{"name": "g", "edge": 0}],
        "edges": [
            {"edge": 0, "owners": ["g"]},
            {"edge": 1, "breaks": [{"name": "s", "reference": "1/3"}], "owners": ["g", "g"]},
            {"edge": 2, "owners": ["g"]},
            {"edge": 3, "owners": ["g"]}
        ]
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let p = parse_plan(ONE_GUARD).unwrap();
        p.validate(&square()).unwrap();
        assert_eq!(p.guards[0].reference, crate::exact::rat(1, 2));
        assert_eq!(p.edges[1].breaks[0].reference, crate::exact::rat(1, 3));
        assert_eq!(parse_plan(&write_plan(&p)).unwrap(), p);
    }

    #[test]
    fn diagnostics() {
        let mut p = parse_plan(ONE_GUARD).unwrap();
        p.edges.pop();
        let e = p.validate(&square()).unwrap_err();
        assert!(e.to_string().contains("not covered"), "{e}");
        let mut p = parse_plan(ONE_GUARD).unwrap();
        p.edges[3].edge = 2;
        let e = p.validate(&square()).unwrap_err();
        assert!(e.to_string().contains("overlap"), "{e}");
        let mut p = parse_plan(ONE_GUARD).unwrap();
        p.edges[1].owners.pop();
        assert!(p.validate(&square()).is_err());
        assert!(parse_plan(r#"{"guards": [], "edges": [{"edge": 0, "owners": ["h"]}]}"#).is_err());
        assert!(parse_polygon("[[0,0],[1,1],[2,2]]").is_err());
    }
}
