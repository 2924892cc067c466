use std::cmp::Ordering;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{format_rational, FracLin, Rational, Surd};
use crate::pfl::Pfl;
use crate::solver::{Constraint, Instance, Literal, Variable};

use super::geometry::{segments_meet, Point, Polygon};
use super::nook::{visibility_coeffs, EdgeFrame};
use super::plan::GuardPlan;

/// What one visibility condition turns into.
#[derive(Clone, Debug, PartialEq)]
pub enum Built {
    /// Holds on the whole box.
    Vacuous,
    /// Fails on the whole box.
    Infeasible,
    /// Bound on `x` alone: `x ≥ v` when `lower`, else `x ≤ v`.
    XBound { lower: bool, value: Rational },
    /// Bound on `y` alone.
    YBound { lower: bool, value: Rational },
    /// `lesser ≤ f(greater)` with the literals given as `(var, negated)`,
    /// `var` 0 for `x` and 1 for `y`.
    Constraint {
        lesser: (usize, bool),
        greater: (usize, bool),
        f: Pfl,
    },
}

fn zero() -> Rational {
    Rational::from_integer(0.into())
}

fn sign(r: &Rational) -> Ordering {
    r.cmp(&zero())
}

/// The condition `x(cy + d) ≥ ay + b` over `x ∈ xr`, `y ∈ yr`, with the
/// side of the pole of `y` fixed by `y_ref`. Returns the range restrictions
/// and at most one constraint in increasing literal form.
pub fn build_constraint(
    coeffs: &[Rational; 4],
    xr: (&Rational, &Rational),
    yr: (&Rational, &Rational),
    y_ref: &Rational,
) -> Result<Vec<Built>> {
    let [a, b, c, d] = coeffs;
    let denom = |y: &Rational| c * y + d;
    let s0 = sign(&denom(y_ref));
    let mut out = Vec::new();

    // y side of the pole where cy + d keeps the reference sign
    let (mut yl, mut yh) = (yr.0.clone(), yr.1.clone());
    if sign(c) != Ordering::Equal {
        let pole = -d / c;
        if s0 == Ordering::Equal {
            return Err(Error::InvalidPlan("reference sightline passes through a vertex".into()));
        }
        let above = (s0 == Ordering::Greater) == (sign(c) == Ordering::Greater);
        if above && pole >= yl {
            out.push(Built::YBound {
                lower: true,
                value: pole.clone(),
            });
            yl = pole;
        } else if !above && pole <= yh {
            out.push(Built::YBound {
                lower: false,
                value: pole.clone(),
            });
            yh = pole;
        }
    } else if s0 == Ordering::Equal {
        // 0 ≥ ay + b
        return Ok(match sign(a) {
            Ordering::Equal if sign(b) == Ordering::Greater => vec![Built::Infeasible],
            Ordering::Equal => vec![Built::Vacuous],
            s => vec![Built::YBound {
                lower: s == Ordering::Less,
                value: -b / a,
            }],
        });
    }
    let det = a * d - b * c;
    let lower = s0 == Ordering::Greater;
    if sign(&det) == Ordering::Equal {
        // constant threshold k with a = kc, b = kd
        let k = if sign(c) != Ordering::Equal { a / c } else { b / d };
        out.push(Built::XBound { lower, value: k });
        return Ok(out);
    }
    let f = FracLin::from_rationals(a, b, c, d)?;
    let at = |y: &Rational| -> Rational {
        f.apply(&Surd::rational(y.clone()))
            .ok()
            .and_then(|v| v.as_rational().cloned())
            .expect("no pole inside the side interval")
    };
    let pole = f.pole();
    let inv = f.inverse();
    let (xl, xh) = xr;
    let mut cands = vec![yl.clone(), yh.clone()];
    for x in [xl, xh] {
        if let Ok(y) = inv.apply(&Surd::rational(x.clone())) {
            cands.push(y.as_rational().expect("rational preimage").clone());
        }
    }
    let inside: Vec<Rational> = cands
        .into_iter()
        .filter(|y| yl <= *y && *y <= yh && Some(y) != pole.as_ref())
        .filter(|y| {
            let v = at(y);
            *xl <= v && v <= *xh
        })
        .collect();
    let (Some(j0), Some(j1)) = (inside.iter().min(), inside.iter().max()) else {
        // F misses the x range on the whole side interval
        let mut m = (&yl + &yh) / Rational::from_integer(2.into());
        if Some(&m) == pole.as_ref() {
            m = yl.clone();
        }
        let v = at(&m);
        let above = v > *xh;
        out.push(if above == lower { Built::Infeasible } else { Built::Vacuous });
        return Ok(out);
    };
    let increasing = f.is_increasing();
    let ext = |g: FracLin, lo: &Rational, hi: &Rational| -> Result<Pfl> {
        if lo == hi {
            let v = g
                .apply(&Surd::rational(lo.clone()))?
                .as_rational()
                .expect("rational image")
                .clone();
            Ok(Pfl::shift(&(v - lo)))
        } else {
            Pfl::with_unit_slope_ends(g, lo, hi)
        }
    };
    let (lesser, greater, g) = match (lower, increasing) {
        (false, true) => ((0, false), (1, false), ext(f, j0, j1)?),
        (true, true) => ((0, true), (1, true), ext(f.reflect(), &-j1, &-j0)?),
        (true, false) => ((0, true), (1, false), ext(f.negate_output(), j0, j1)?),
        (false, false) => ((0, false), (1, true), ext(f.negate_input(), &-j1, &-j0)?),
    };
    out.push(Built::Constraint {
        lesser,
        greater,
        f: g,
    });
    Ok(out)
}

/// Which side of the directed sightline `from → to` the vertex must stay on
/// (`Greater` = left), and whether the reflex cone decided it.
fn blocking_side(poly: &Polygon<Rational>, i: usize, from: &Point<Rational>, to: &Point<Rational>) -> (Ordering, bool) {
    let n = poly.len();
    let vs = poly.vertices();
    let v = &vs[i];
    let line = to - from;
    let c1 = sign(&line.cross(&(&vs[(i + n - 1) % n] - v)));
    let c2 = sign(&line.cross(&(&vs[(i + 1) % n] - v)));
    match (c1, c2) {
        (Ordering::Less, Ordering::Less) | (Ordering::Less, Ordering::Equal) | (Ordering::Equal, Ordering::Less) => {
            (Ordering::Less, true)
        }
        (Ordering::Greater, Ordering::Greater)
        | (Ordering::Greater, Ordering::Equal)
        | (Ordering::Equal, Ordering::Greater) => (Ordering::Greater, true),
        _ => {
            let o = sign(&line.cross(&(v - from)));
            (if o == Ordering::Equal { Ordering::Greater } else { o }, false)
        }
    }
}

/// Whether the segment from vertex `i` to `foot` misses every edge not
/// incident to it, so the sightline through `foot` passes `i` directly.
fn near(poly: &Polygon<Rational>, i: usize, foot: &Point<Rational>) -> bool {
    let n = poly.len();
    let v = &poly.vertices()[i];
    (0..n)
        .filter(|&e| e != i && (e + 1) % n != i)
        .all(|e| {
            let (a, b) = poly.edge(e);
            !segments_meet(v, foot, a, b)
        })
}

enum End {
    Fixed(Rational),
    Var(usize),
}

struct Ranges {
    lo: Vec<Rational>,
    hi: Vec<Rational>,
    reference: Vec<Rational>,
}

/// Translates a plan into an instance: one variable per guard and per break,
/// ordering constraints along each edge, and a visibility constraint for
/// each (guard, interval endpoint, blocking vertex) triple relevant at the
/// reference configuration.
pub fn reduce(poly: &Polygon<Rational>, plan: &GuardPlan) -> Result<Instance> {
    plan.validate(poly)?;
    let n = poly.len();
    let one = Rational::from_integer(1.into());
    let frame = |e: usize| {
        let (s, t) = poly.edge(e);
        EdgeFrame::between(s, t)
    };

    let mut names = Vec::new();
    let mut bx = Ranges {
        lo: Vec::new(),
        hi: Vec::new(),
        reference: Vec::new(),
    };
    for g in &plan.guards {
        names.push(g.name.clone());
        bx.lo.push(g.lo.clone());
        bx.hi.push(g.hi.clone());
        bx.reference.push(g.reference.clone());
    }
    let mut constraints = Vec::new();
    let mut meta = Vec::new();
    let mut adjustments = Vec::new();
    let mut contradictions = Vec::new();

    let mut edge_vars: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &plan.edges {
        for b in &e.breaks {
            edge_vars[e.edge].push(names.len());
            names.push(b.name.clone());
            bx.lo.push(b.lo.clone());
            bx.hi.push(b.hi.clone());
            bx.reference.push(b.reference.clone());
        }
    }
    let declared = (bx.lo.clone(), bx.hi.clone());
    for e in &plan.edges {
        for w in edge_vars[e.edge].windows(2) {
            constraints.push(Constraint {
                lesser: Literal::pos(w[0]),
                greater: Literal::pos(w[1]),
                f: Pfl::identity(),
            });
            meta.push(json!({"kind": "order", "edge": e.edge}));
        }
    }

    for e in &plan.edges {
        let target = frame(e.edge);
        let vars = &edge_vars[e.edge];
        for (k, &owner) in e.owners.iter().enumerate() {
            let guard = &plan.guards[owner];
            if guard.edge == e.edge {
                continue;
            }
            let gframe = frame(guard.edge);
            let gp = gframe.at(&guard.reference);
            let ends = [
                if k == 0 { End::Fixed(zero()) } else { End::Var(vars[k - 1]) },
                if k == vars.len() { End::Fixed(one.clone()) } else { End::Var(vars[k]) },
            ];
            for end in &ends {
                let (y_ref, label) = match end {
                    End::Fixed(t) => (t.clone(), format!("edge {} at {}", e.edge, format_rational(t))),
                    End::Var(j) => (bx.reference[*j].clone(), names[*j].clone()),
                };
                let ep = target.at(&y_ref);
                if ep == gp {
                    continue;
                }
                let line = &ep - &gp;
                let len2 = line.dot(&line);
                let skip = [guard.edge, (guard.edge + 1) % n, e.edge, (e.edge + 1) % n];
                for vi in 0..n {
                    if skip.contains(&vi) || !poly.is_reflex(vi) {
                        continue;
                    }
                    let v = &poly.vertices()[vi];
                    let proj = (v - &gp).dot(&line);
                    if proj <= zero() || proj >= len2 || !near(poly, vi, &gp.lerp(&ep, &(proj / &len2))) {
                        continue;
                    }
                    let (side, by_cone) = blocking_side(poly, vi, &gp, &ep);
                    let mut coeffs = visibility_coeffs(&gframe, &target, v);
                    if side == Ordering::Less {
                        coeffs = coeffs.map(|c| -c);
                    }
                    let info = |kind: &str| {
                        json!({
                            "kind": kind,
                            "guard": guard.name,
                            "guard_edge": guard.edge,
                            "endpoint": label,
                            "edge": e.edge,
                            "vertex": vi,
                            "at": [format_rational(&v.x), format_rational(&v.y)],
                            "side": if side == Ordering::Greater { "left" } else { "right" },
                            "side_from": if by_cone { "reflex cone" } else { "reference" },
                        })
                    };
                    let x = owner;
                    let built = match end {
                        End::Fixed(t) => {
                            let [a, b, c, d] = &coeffs;
                            let alpha = c * t + d;
                            let beta = a * t + b;
                            vec![match sign(&alpha) {
                                Ordering::Equal if beta > zero() => Built::Infeasible,
                                Ordering::Equal => Built::Vacuous,
                                s => Built::XBound {
                                    lower: s == Ordering::Greater,
                                    value: beta / alpha,
                                },
                            }]
                        }
                        End::Var(j) => build_constraint(
                            &coeffs,
                            (&declared.0[x], &declared.1[x]),
                            (&declared.0[*j], &declared.1[*j]),
                            &bx.reference[*j],
                        )?,
                    };
                    let y = match end {
                        End::Var(j) => Some(*j),
                        End::Fixed(_) => None,
                    };
                    for item in built {
                        match item {
                            Built::Vacuous => {}
                            Built::Infeasible => contradictions.push((x, info("contradiction"))),
                            Built::XBound { lower, value } => {
                                tighten(&mut bx, x, lower, value.clone());
                                adjustments.push(adjustment(&names[x], lower, &value, info("range")));
                            }
                            Built::YBound { lower, value } => {
                                let y = y.expect("bounds on y need a variable end");
                                tighten(&mut bx, y, lower, value.clone());
                                adjustments.push(adjustment(&names[y], lower, &value, info("range")));
                            }
                            Built::Constraint { lesser, greater, f } => {
                                let y = y.expect("constraints need a variable end");
                                let lit = |(which, neg): (usize, bool)| {
                                    let v = if which == 0 { x } else { y };
                                    if neg {
                                        Literal::neg(v)
                                    } else {
                                        Literal::pos(v)
                                    }
                                };
                                constraints.push(Constraint {
                                    lesser: lit(lesser),
                                    greater: lit(greater),
                                    f,
                                });
                                meta.push(info("visibility"));
                            }
                        }
                    }
                }
            }
        }
    }

    for v in 0..names.len() {
        if bx.lo[v] > bx.hi[v] {
            bx.lo[v] = declared.0[v].clone();
            bx.hi[v] = declared.1[v].clone();
            contradictions.push((v, json!({"kind": "contradiction", "variable": names[v], "reason": "empty range"})));
        }
    }
    for (v, info) in contradictions {
        constraints.push(Constraint {
            lesser: Literal::pos(v),
            greater: Literal::pos(v),
            f: Pfl::shift(&-one.clone()),
        });
        meta.push(info);
    }

    let variables = names
        .into_iter()
        .enumerate()
        .map(|(i, name)| Variable {
            name,
            lo: Surd::rational(bx.lo[i].clone()),
            hi: Surd::rational(bx.hi[i].clone()),
        })
        .collect();
    let mut inst = Instance::new(variables, constraints)?;
    inst.metadata = Some(json!({
        "assumption": "visibility structure and blocking sides are those of the reference configuration throughout the plan's cell",
        "constraints": meta,
        "range_adjustments": adjustments,
    }));
    Ok(inst)
}

fn tighten(bx: &mut Ranges, v: usize, lower: bool, value: Rational) {
    if lower {
        if value > bx.lo[v] {
            bx.lo[v] = value;
        }
    } else if value < bx.hi[v] {
        bx.hi[v] = value;
    }
}

fn adjustment(name: &str, lower: bool, value: &Rational, mut info: Value) -> Value {
    info["variable"] = json!(name);
    info["bound"] = json!(format!("{} {}", if lower { ">=" } else { "<=" }, format_rational(value)));
    info
}
