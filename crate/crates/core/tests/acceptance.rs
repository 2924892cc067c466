//! Acceptance suite. Prints one `[PASS]` or `[FAIL]` line per criterion and
//! exits nonzero when any criterion fails.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use m2sat::certify::{verify_sat, verify_unsat, Certificate, Conclusion, Step};
use m2sat::exact::{int, rat, ExtSurd, FixedPoints, FracLin, Rational, Surd};
use m2sat::fixtures;
use m2sat::gallery::nook::nook_threshold;
use m2sat::gallery::reduce::{build_constraint, Built};
use m2sat::gen::{random_pfl, rng, seeded_instance, small_rational, GenConfig};
use m2sat::oracle::{numeric_oracle, OracleVerdict};
use m2sat::pfl::{inf_power, MonoMap, Pfl};
use m2sat::solver::{decide, round_count, solve, Analysis, Constraint, Instance, Literal, PieceStats, Verdict};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration, what: &str) -> Result<f64, String> {
    let s = t.elapsed().as_secs_f64();
    ensure(t.elapsed() < limit, || format!("{what} took {s:.2}s, limit {:?}", limit))?;
    Ok(s)
}

fn sqrt2() -> Surd {
    Surd::sqrt_of(int(1), 2.into()).unwrap()
}

fn tight(c: &Constraint, w: &[Surd]) -> bool {
    c.lesser.value(w) == c.f.eval(&c.greater.value(w))
}

/// All literal pairs as constraints, duals included.
fn symmetric(inst: &Instance) -> Vec<Constraint> {
    inst.constraints.iter().flat_map(|c| [c.clone(), c.dual()]).collect()
}

fn ac1() -> Check {
    let inst = fixtures::sqrt_two();
    let t = Instant::now();
    let v = solve(&inst).map_err(|e| e.to_string())?;
    let secs = within(t, Duration::from_secs(1), "solve")?;
    let Verdict::Sat(w) = v else { return Err("UNSAT".into()) };
    ensure(w == vec![sqrt2()], || format!("witness {w:?}"))?;
    ensure(inst.constraints.iter().all(|c| tight(c, &w)), || "a constraint is slack".into())?;
    // the two rational functions as written also hold with equality at √2
    let up = FracLin::from_i64(1, 2, 1, 1).unwrap().apply(&w[0]).unwrap();
    let down = FracLin::from_i64(1, -2, -1, 1).unwrap().apply(&w[0]).unwrap();
    ensure(up == w[0] && down == w[0], || format!("{up} {down}"))?;
    verify_sat(&inst, &w).map_err(|e| e.to_string())?;
    Ok(format!("x = {} exactly, both constraints tight, {secs:.3}s", w[0]))
}

fn ac2() -> Check {
    let inst = fixtures::three_guards();
    for v in &inst.variables {
        ensure(v.lo <= sqrt2() && sqrt2() <= v.hi && -sqrt2() < v.lo, || "range".into())?;
    }
    let t = Instant::now();
    let v = solve(&inst).map_err(|e| e.to_string())?;
    let secs = within(t, Duration::from_secs(1), "solve")?;
    let Verdict::Sat(w) = v else { return Err("UNSAT".into()) };
    ensure(w == vec![sqrt2(); 3], || format!("witness {w:?}"))?;
    verify_sat(&inst, &w).map_err(|e| e.to_string())?;
    Ok(format!("x = y = z = {} exactly, {secs:.3}s", w[0]))
}

/// The map sending `xs` to `ys`, built from cross ratios.
fn through_three(xs: &[Rational; 3], ys: &[Rational; 3]) -> FracLin {
    let to_std = |p: &[Rational; 3]| {
        let (a, b) = (&p[1] - &p[2], &p[1] - &p[0]);
        FracLin::from_rationals(&a, &(-(&p[0] * &a)), &b, &(-(&p[2] * &b))).unwrap()
    };
    to_std(ys).inverse().compose(&to_std(xs))
}

fn ac3() -> Check {
    let xs = [int(0), int(1), int(2)];
    let ys = [rat(1, 2), rat(6, 5), rat(5, 3)];
    let f = nook_threshold(&xs, &ys).map_err(|e| e.to_string())?;
    for (x, y) in xs.iter().zip(&ys) {
        let got = f.apply(&Surd::rational(x.clone())).unwrap();
        ensure(got == Surd::rational(y.clone()), || format!("{x} ↦ {got}, want {y}"))?;
    }
    let expected = FracLin::from_i64(4, 2, 1, 4).unwrap();
    ensure(f == expected, || format!("threshold {f:?}"))?;
    ensure(through_three(&xs, &ys) == expected, || "cross-ratio construction disagrees".into())?;
    // a different map through two of the points differs at the third
    let other = FracLin::from_i64(7, 6, 0, 12).unwrap();
    ensure(
        other.apply(&Surd::zero()).unwrap() == Surd::rational(rat(1, 2))
            && other.apply(&Surd::from_int(2)).unwrap() == Surd::rational(rat(5, 3))
            && other.apply(&Surd::from_int(1)).unwrap() != Surd::rational(rat(6, 5)),
        || "control map".into(),
    )?;
    // X ≤ F(Y) as a visibility condition turns into the fixture's constraint
    let coeffs = [int(-4), int(-2), int(-1), int(-4)];
    let (one, two) = (int(1), int(2));
    let out = build_constraint(&coeffs, (&one, &two), (&one, &two), &rat(3, 2)).map_err(|e| e.to_string())?;
    let want = Pfl::with_unit_slope_ends(expected, &one, &two).unwrap();
    let fixture = &fixtures::three_guards().constraints[2];
    ensure(fixture.f == want, || "fixture constraint".into())?;
    match out.as_slice() {
        [Built::Constraint { lesser: (0, false), greater: (1, false), f }] if *f == want => {}
        other => return Err(format!("built {other:?}")),
    }
    Ok("0→1/2, 1→6/5, 2→5/3; map is (4x+2)/(x+4), pinned by three points".into())
}

fn sample_points(f: &Pfl, l: &MonoMap, rng: &mut impl Rng) -> Vec<Surd> {
    let mut pts: Vec<Surd> = Vec::new();
    for v in l.at().iter().chain(l.pieces().iter().filter_map(|p| match p {
        m2sat::pfl::Piece::Const(v) => Some(v),
        _ => None,
    })) {
        if let ExtSurd::Finite(s) = v {
            pts.push(s.clone());
        }
    }
    pts.extend(f.breaks().iter().cloned());
    for p in f.pieces() {
        if let FixedPoints::Points(ps) = p.fixed_points() {
            pts.extend(ps);
        }
    }
    pts.sort();
    pts.dedup();
    pts.shuffle(rng);
    pts.truncate(12);
    while pts.len() < 20 {
        pts.push(Surd::rational(small_rational(rng, 8)));
    }
    pts
}

fn small_coeffs(f: &Pfl) -> bool {
    let limit = num_bigint::BigInt::from(1000);
    f.pieces()
        .iter()
        .all(|p| p.coeffs().iter().all(|c| num_traits::Signed::abs(*c) <= limit))
}

fn ac4() -> Check {
    let t = Instant::now();
    let mut r = rng(4);
    let (mut count, mut checks, mut descents) = (0, 0, 0);
    while count < 200 {
        let f = random_pfl(&mut r, 4, 6);
        if !small_coeffs(&f) {
            continue;
        }
        count += 1;
        let m = f.to_monomap();
        let l = inf_power(&m);
        ensure(MonoMap::compose(&l, &l) == l, || format!("f^∞∘f^∞ ≠ f^∞ for {f:?}"))?;
        for x in sample_points(&f, &l, &mut r) {
            let fx = f.eval(&x);
            let lx = l.eval(&ExtSurd::Finite(x.clone()));
            let xe = ExtSurd::Finite(x.clone());
            ensure((x <= fx) == (xe <= lx), || format!("validity fails at {x} for {f:?}"))?;
            if fx < x {
                descents += 1;
                ensure(lx <= ExtSurd::Finite(fx.clone()), || format!("f^∞({x}) = {lx} > f({x}) = {fx}"))?;
            }
            ensure(l.eval(&lx) == lx, || format!("f^∞ not idempotent at {x}"))?;
            checks += 1;
        }
    }
    let secs = within(t, Duration::from_secs(30), "law suite")?;
    Ok(format!("{count} maps, {checks} points ({descents} with f(x) < x), {secs:.2}s"))
}

/// Non-repeating paths from every literal, as (start, end, functions).
fn simple_paths(cs: &[Constraint], lits: usize, cap: usize) -> Vec<(Literal, Literal, Vec<usize>)> {
    let mut out = Vec::new();
    fn walk(
        cs: &[Constraint],
        start: Literal,
        at: Literal,
        seen: &mut Vec<Literal>,
        path: &mut Vec<usize>,
        out: &mut Vec<(Literal, Literal, Vec<usize>)>,
        cap: usize,
    ) {
        for (i, c) in cs.iter().enumerate() {
            if out.len() >= cap || c.lesser != at {
                continue;
            }
            let next = c.greater;
            let closes = next == start;
            if seen.contains(&next) && !closes {
                continue;
            }
            path.push(i);
            out.push((start, next, path.clone()));
            if !closes {
                seen.push(next);
                walk(cs, start, next, seen, path, out, cap);
                seen.pop();
            }
            path.pop();
        }
    }
    for s in (0..lits).map(Literal::from_index) {
        walk(cs, s, s, &mut vec![s], &mut Vec::new(), &mut out, cap);
    }
    out
}

fn ac5() -> Check {
    let t = Instant::now();
    let results: Vec<Result<usize, String>> = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let vars = 1 + (seed % 4) as usize;
            let inst = seeded_instance(seed, &GenConfig::balanced(vars, 3, seed));
            let a = Analysis::new(&inst);
            let cs = symmetric(&inst);
            let mut r = rng(1000 + seed);
            let mut n = 0;
            for (x, y, path) in simple_paths(&cs, inst.literal_count(), 20_000) {
                let f = a
                    .table()
                    .get(x, y)
                    .ok_or_else(|| format!("seed {seed}: no entry for a path"))?;
                for _ in 0..5 {
                    let c = Surd::rational(small_rational(&mut r, 10));
                    let p = path.iter().rev().fold(c.clone(), |v, &i| cs[i].f.eval(&v));
                    ensure(f.eval(&c) <= p, || format!("seed {seed}: f(c) > p(c) at c = {c}"))?;
                    // a cycle is also bounded by the empty path
                    let mut m = a.reach().eval_min(x, y, &ExtSurd::Finite(c.clone()));
                    if x == y {
                        m = m.min(ExtSurd::Finite(c.clone()));
                    }
                    ensure(m <= ExtSurd::Finite(p.clone()), || format!("seed {seed}: min > p(c) at c = {c}"))?;
                    n += 1;
                }
            }
            Ok(n)
        })
        .collect();
    let mut total = 0;
    for r in results {
        total += r?;
    }
    let secs = within(t, Duration::from_secs(60), "sampling")?;
    Ok(format!("{total} path evaluations on 100 instances, {secs:.2}s"))
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Last {
    Start,
    Loop,
    Edge,
}

/// Least value of a tight path from `x` to `y` at `c`, by exhaustive
/// backward search over (literal, value, last step) states.
fn tight_min(a: &Analysis, lits: usize, x: Literal, y: Literal, c: &ExtSurd) -> ExtSurd {
    let reach = a.reach();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    let start = (y, c.clone(), Last::Start);
    seen.insert(start.clone());
    queue.push_back(start);
    let mut best = ExtSurd::PosInf;
    while let Some((u, d, last)) = queue.pop_front() {
        if u == x && last != Last::Start && d < best {
            best = d.clone();
        }
        let mut next = Vec::new();
        if last != Last::Loop {
            if let Some(l) = reach.loop_limit(u) {
                next.push((u, l.eval(&d), Last::Loop));
            }
        }
        if last != Last::Edge {
            for w in (0..lits).map(Literal::from_index).filter(|&w| w != u) {
                if let Some(f) = reach.map(w, u) {
                    next.push((w, f.eval(&d), Last::Edge));
                }
            }
        }
        for s in next {
            if seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
    }
    best
}

fn ac6() -> Check {
    let t = Instant::now();
    let results: Vec<Result<usize, String>> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let vars = 1 + (seed % 3) as usize;
            let inst = seeded_instance(500 + seed, &GenConfig::balanced(vars, 3, seed));
            let a = Analysis::new(&inst);
            let mut r = rng(2000 + seed);
            let lits = inst.literal_count();
            let mut n = 0;
            for x in (0..lits).map(Literal::from_index) {
                for y in (0..lits).map(Literal::from_index) {
                    let mut cs = vec![ExtSurd::Finite(inst.hi(y)), ExtSurd::Finite(inst.lo(y))];
                    cs.extend((0..3).map(|_| ExtSurd::Finite(Surd::rational(small_rational(&mut r, 6)))));
                    let whole = a.reach().min_function(x, y);
                    for c in cs {
                        let want = tight_min(&a, lits, x, y, &c);
                        let got = a.reach().eval_min(x, y, &c);
                        ensure(got == want, || format!("seed {seed}: eval_min = {got}, tight paths give {want}"))?;
                        ensure(whole.eval(&c) == got, || format!("seed {seed}: min_function disagrees"))?;
                        n += 1;
                    }
                }
            }
            Ok(n)
        })
        .collect();
    let mut total = 0;
    for r in results {
        total += r?;
    }
    let secs = within(t, Duration::from_secs(60), "oracle comparison")?;
    Ok(format!("{total} (x, y, c) triples on 50 instances, {secs:.2}s"))
}

struct Outcome {
    seed: u64,
    inst: Instance,
    verdict: Verdict,
    stats: PieceStats,
    checked: Result<(), String>,
    oracle: OracleVerdict,
}

fn run_suite() -> Result<(Vec<Outcome>, f64), String> {
    let t = Instant::now();
    let out: Vec<Result<Outcome, String>> = (0..1000u64)
        .into_par_iter()
        .map(|seed| {
            let vars = 1 + (seed % 5) as usize;
            let inst = seeded_instance(seed, &GenConfig::balanced(vars, 3, seed));
            let a = Analysis::new(&inst);
            let verdict = decide(&inst, &a).map_err(|e| format!("seed {seed}: {e}"))?;
            let checked = match &verdict {
                Verdict::Sat(w) => verify_sat(&inst, w),
                Verdict::Unsat(c) => verify_unsat(&inst, c),
            }
            .map_err(|e| e.to_string());
            let oracle = numeric_oracle(&inst, 1e-6);
            Ok(Outcome {
                seed,
                stats: a.table().stats.clone(),
                inst,
                verdict,
                checked,
                oracle,
            })
        })
        .collect();
    let out = out.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok((out, t.elapsed().as_secs_f64()))
}

fn ac7(suite: &[Outcome], secs: f64) -> Check {
    ensure(secs < 600.0, || format!("suite took {secs:.1}s"))?;
    let mut sat = 0;
    let mut marginal = 0;
    let mut disagree = Vec::new();
    for o in suite {
        o.checked.as_ref().map_err(|e| format!("seed {}: certify rejected: {e}", o.seed))?;
        sat += o.verdict.is_sat() as usize;
        match (o.oracle, o.verdict.is_sat()) {
            (OracleVerdict::Marginal, _) => marginal += 1,
            (OracleVerdict::Sat, false) | (OracleVerdict::Unsat, true) => disagree.push(o.seed),
            _ => {}
        }
    }
    ensure(disagree.is_empty(), || format!("disagreements at seeds {disagree:?}"))?;
    Ok(format!(
        "{} instances: {sat} SAT, {} UNSAT, {marginal} marginal, 0 disagreements, all certified, {secs:.1}s",
        suite.len(),
        suite.len() - sat
    ))
}

const WITNESS_C: u64 = 4;

fn witness_bound(inst: &Instance) -> u64 {
    let n = inst.var_count() as u64;
    3u64.pow(round_count(inst.var_count()) as u32) * inst.bits().max(1) * n * WITNESS_C
}

fn ac8(suite: &[Outcome]) -> Check {
    let mut worst: f64 = 0.0;
    let mut witnesses = 0;
    for o in suite {
        if let Verdict::Sat(w) = &o.verdict {
            let bound = witness_bound(&o.inst);
            for s in w {
                ensure(s.bits() <= bound, || format!("seed {}: {} bits > {bound}", o.seed, s.bits()))?;
                worst = worst.max(s.bits() as f64 / bound as f64 * WITNESS_C as f64);
            }
            witnesses += 1;
        }
    }
    let mut slowest: f64 = 0.0;
    for seed in 0..4 {
        let inst = seeded_instance(seed, &GenConfig::balanced(8, 3, seed));
        let t = Instant::now();
        let v = solve(&inst).map_err(|e| e.to_string())?;
        slowest = slowest.max(within(t, Duration::from_secs(60), "n = 8 smoke solve")?);
        if let Verdict::Sat(w) = &v {
            let bound = witness_bound(&inst);
            ensure(w.iter().all(|s| s.bits() <= bound), || format!("n = 8 seed {seed} over bound"))?;
        }
    }
    Ok(format!(
        "C = {WITNESS_C}; {witnesses} witnesses, largest ratio needs C ≥ {worst:.3}; n = 8 solves in ≤ {slowest:.2}s"
    ))
}

fn ac9(suite: &[Outcome]) -> Check {
    let (mut comps, mut envs) = (0, 0);
    let (mut worst_c, mut worst_e) = (0.0f64, 0.0f64);
    for o in suite {
        for &[f, g, out] in &o.stats.compositions {
            let k = f.max(g);
            ensure(out <= 2 * k, || format!("seed {}: composition {f}∘{g} has {out} pieces", o.seed))?;
            worst_c = worst_c.max(out as f64 / (2 * k) as f64);
            comps += 1;
        }
        for &[j, k, out] in &o.stats.envelopes {
            let bound = (2 * j * j * j + j) * k;
            ensure(out <= bound, || format!("seed {}: {j}-way envelope has {out} > {bound}", o.seed))?;
            worst_e = worst_e.max(out as f64 / bound as f64);
            envs += 1;
        }
    }
    Ok(format!(
        "{comps} compositions (max {:.0}% of bound), {envs} envelopes (max {:.0}% of bound)",
        worst_c * 100.0,
        worst_e * 100.0
    ))
}

fn live_steps(cert: &Certificate) -> Vec<usize> {
    let mut live = BTreeSet::new();
    let mut stack = match &cert.conclusion {
        Conclusion::RangeViolation { bound, .. } => vec![*bound],
        Conclusion::CrossViolation { upper, lower, .. } => vec![*upper, *lower],
    };
    while let Some(i) = stack.pop() {
        if i >= cert.steps.len() || !live.insert(i) {
            continue;
        }
        match &cert.steps[i] {
            Step::Compose { outer, inner } => stack.extend([*outer, *inner]),
            Step::Min { of } => stack.extend(of.iter().copied()),
            Step::Apply { function, bound, .. } | Step::LoopClose { function, bound, .. } => {
                stack.extend([*function, *bound])
            }
            Step::Constraint { .. } | Step::RangeBound { .. } | Step::Hypothesis { .. } => {}
        }
    }
    live.into_iter().collect()
}

/// A nonzero rational, large or tiny.
fn perturbation(r: &mut impl Rng) -> Rational {
    loop {
        let q = if r.gen_bool(0.5) {
            small_rational(r, 8)
        } else {
            let sign = if r.gen_bool(0.5) { 1 } else { -1 };
            rat(sign, 10i64.pow(r.gen_range(1..=9)))
        };
        if q != int(0) {
            return q;
        }
    }
}

fn perturb(v: &ExtSurd, by: &Rational) -> ExtSurd {
    match v {
        ExtSurd::Finite(s) => ExtSurd::Finite(s.add_rational(by)),
        _ => ExtSurd::rational(by.clone()),
    }
}

/// Adds a random rational to one value of the transcript: a claimed bound,
/// a loop entry or fixed point, a hypothesis, or a conclusion field.
fn perturb_certificate(cert: &Certificate, r: &mut impl Rng) -> (Certificate, String) {
    let mut out = cert.clone();
    let mut slots: Vec<(Option<usize>, u8)> = vec![(None, 0), (None, 1)];
    for i in live_steps(cert) {
        match &cert.steps[i] {
            Step::Apply { .. } | Step::Hypothesis { .. } => slots.push((Some(i), 0)),
            Step::LoopClose { .. } => slots.extend([(Some(i), 0), (Some(i), 1)]),
            _ => {}
        }
    }
    let (at, which) = *slots.choose(r).unwrap();
    let q = perturbation(r);
    let label = match at {
        Some(i) => {
            match &mut out.steps[i] {
                Step::Apply { value, .. } => *value = perturb(value, &q),
                Step::Hypothesis { value, .. } => *value = value.add_rational(&q),
                Step::LoopClose { entry, .. } if which == 0 => *entry = perturb(entry, &q),
                Step::LoopClose { fixed_point, .. } => *fixed_point = perturb(fixed_point, &q),
                _ => unreachable!(),
            }
            format!("step value {which}")
        }
        None => {
            match &mut out.conclusion {
                Conclusion::RangeViolation { value, .. } if which == 0 => *value = perturb(value, &q),
                Conclusion::RangeViolation { min, .. } => *min = min.add_rational(&q),
                Conclusion::CrossViolation { c, .. } => *c = c.add_rational(&q),
            }
            format!("conclusion value {which}")
        }
    };
    (out, label)
}

/// Index, literal and ordering edits, which often denote the same
/// derivation.
fn restructure_certificate(cert: &Certificate, m: usize, r: &mut impl Rng) -> (Certificate, String) {
    let mut out = cert.clone();
    let live = live_steps(cert);
    let i = *live.choose(r).expect("a live step");
    let coin = r.gen_bool(0.5);
    match r.gen_range(0..3) {
        0 => {
            match &mut out.steps[i] {
                Step::Constraint { index, dual } => {
                    if coin || m == 1 {
                        *dual = !*dual;
                    } else {
                        *index = (*index + 1) % m;
                    }
                }
                Step::Compose { outer, inner } => std::mem::swap(outer, inner),
                Step::Min { of } if of.len() > 1 => {
                    of.pop();
                }
                Step::Min { of } => of[0] = i,
                Step::RangeBound { literal } | Step::Hypothesis { literal, .. } => *literal = literal.negate(),
                Step::Apply { bound, function, .. } | Step::LoopClose { bound, function, .. } => {
                    std::mem::swap(bound, function)
                }
            }
            (out, "step reference".into())
        }
        1 => {
            out.steps.remove(i);
            (out, "deleted step".into())
        }
        _ => {
            let j = if i == 0 { 1.min(out.steps.len() - 1) } else { i - 1 };
            out.steps.swap(i, j);
            (out, "swapped steps".into())
        }
    }
}

fn perturb_witness(w: &[Surd], r: &mut impl Rng) -> (Vec<Surd>, String) {
    let mut out = w.to_vec();
    let v = r.gen_range(0..out.len());
    out[v] = out[v].add_rational(&perturbation(r));
    (out, "witness coordinate".into())
}

/// Exact evaluation of every range and constraint, written independently of
/// the checker.
fn satisfies(inst: &Instance, w: &[Surd]) -> bool {
    w.len() == inst.var_count()
        && inst.variables.iter().zip(w).all(|(v, x)| v.lo <= *x && *x <= v.hi)
        && inst.constraints.iter().all(|c| {
            let val = |l: Literal| if l.is_negated() { -w[l.var()].clone() } else { w[l.var()].clone() };
            val(c.lesser) <= c.f.eval(&val(c.greater))
        })
}

/// Meaning of a function step as (lesser, greater, map), recomputed from the
/// instance.
fn function_of(inst: &Instance, steps: &[Step], i: usize, depth: usize) -> Option<(Literal, Literal, Pfl)> {
    if depth > steps.len() {
        return None;
    }
    match steps.get(i)? {
        Step::Constraint { index, dual } => {
            let c = inst.constraints.get(*index)?;
            let c = if *dual { c.dual() } else { c.clone() };
            Some((c.lesser, c.greater, c.f))
        }
        Step::Compose { outer, inner } => {
            let (a, b, f) = function_of(inst, steps, *outer, depth + 1)?;
            let (b2, c, g) = function_of(inst, steps, *inner, depth + 1)?;
            (b == b2).then(|| (a, c, f.compose(&g)))
        }
        Step::Min { of } => {
            let parts: Option<Vec<_>> = of.iter().map(|&j| function_of(inst, steps, j, depth + 1)).collect();
            let parts = parts?;
            let (a, b) = (parts[0].0, parts[0].1);
            if parts.iter().any(|p| (p.0, p.1) != (a, b)) {
                return None;
            }
            let fs: Vec<Pfl> = parts.into_iter().map(|p| p.2).collect();
            Some((a, b, Pfl::min(&fs)))
        }
        _ => None,
    }
}

/// Literal and value of a bound step.
fn bound_of(inst: &Instance, steps: &[Step], i: usize) -> Option<(Literal, ExtSurd)> {
    match steps.get(i)? {
        Step::RangeBound { literal } => Some((*literal, ExtSurd::Finite(inst.hi(*literal)))),
        Step::Hypothesis { literal, value } => Some((*literal, ExtSurd::Finite(value.clone()))),
        Step::Apply { function, value, .. } => Some((function_of(inst, steps, *function, 0)?.0, value.clone())),
        Step::LoopClose { function, fixed_point, .. } => {
            Some((function_of(inst, steps, *function, 0)?.0, fixed_point.clone()))
        }
        _ => None,
    }
}

/// The bound claims in order, without the indices they cite.
fn claims(steps: &[Step]) -> Vec<String> {
    steps
        .iter()
        .filter_map(|s| match s {
            Step::Constraint { .. } | Step::Compose { .. } | Step::Min { .. } => None,
            Step::Apply { value, .. } => Some(format!("apply {value}")),
            Step::LoopClose { fixed_point, .. } => Some(format!("loop {fixed_point}")),
            other => Some(format!("{other:?}")),
        })
        .collect()
}

/// An accepted certificate mutant keeps its meaning when it draws the same
/// conclusion through the same chain of bound claims, and each claim is
/// true under an evaluation done here rather than by the checker. Loop
/// claims are checked against the limit map.
fn same_meaning(inst: &Instance, orig: &Certificate, mutant: &Certificate) -> bool {
    if orig.conclusion != mutant.conclusion || claims(&orig.steps) != claims(&mutant.steps) {
        return false;
    }
    let steps = &mutant.steps;
    steps.iter().all(|s| match s {
        Step::Apply { function, bound, value } => {
            match (function_of(inst, steps, *function, 0), bound_of(inst, steps, *bound)) {
                (Some((_, g, f)), Some((l, t))) => g == l && f.eval_ext(&t) == *value,
                _ => false,
            }
        }
        Step::LoopClose {
            function,
            bound,
            entry,
            fixed_point,
        } => match (function_of(inst, steps, *function, 0), bound_of(inst, steps, *bound)) {
            (Some((x, y, f)), Some((l, t))) => {
                x == y && y == l && t <= *entry && inf_power(&f.to_monomap()).eval(entry) <= *fixed_point
            }
            _ => false,
        },
        _ => true,
    })
}

#[derive(Default)]
struct Tally {
    total: usize,
    rejected: usize,
    preserved: usize,
}

impl Tally {
    fn rate(&self) -> f64 {
        self.rejected as f64 / self.total.max(1) as f64
    }
}

fn ac10(suite: &[Outcome]) -> Check {
    let mut r = rng(10);
    ensure(suite.iter().any(|o| o.verdict.is_sat()) && suite.iter().any(|o| !o.verdict.is_sat()), || {
        "suite lacks a verdict kind".into()
    })?;
    let mut bad: BTreeMap<String, usize> = BTreeMap::new();
    let mut record = |t: &mut Tally, accepted: bool, ok: bool, label: String| {
        t.total += 1;
        if !accepted {
            t.rejected += 1;
        } else if ok {
            t.preserved += 1;
        } else {
            *bad.entry(label).or_default() += 1;
        }
    };
    let (mut wit, mut cert) = (Tally::default(), Tally::default());
    for _ in 0..500 {
        let o = suite.choose(&mut r).unwrap();
        match &o.verdict {
            Verdict::Sat(w) => {
                let (m, label) = perturb_witness(w, &mut r);
                let accepted = verify_sat(&o.inst, &m).is_ok();
                record(&mut wit, accepted, satisfies(&o.inst, &m), label);
            }
            Verdict::Unsat(c) => {
                let (m, label) = perturb_certificate(c, &mut r);
                let accepted = verify_unsat(&o.inst, &m).is_ok();
                record(&mut cert, accepted, accepted && same_meaning(&o.inst, c, &m), label);
            }
        }
    }
    let mut edits = Tally::default();
    let unsats: Vec<&Outcome> = suite.iter().filter(|o| !o.verdict.is_sat()).collect();
    for _ in 0..200 {
        let o = unsats.choose(&mut r).unwrap();
        let Verdict::Unsat(c) = &o.verdict else { unreachable!() };
        let (m, label) = restructure_certificate(c, o.inst.constraints.len(), &mut r);
        let accepted = verify_unsat(&o.inst, &m).is_ok();
        record(&mut edits, accepted, accepted && same_meaning(&o.inst, c, &m), label);
    }
    ensure(bad.is_empty(), || format!("accepted mutants that change meaning: {bad:?}"))?;
    let rejected = wit.rejected + cert.rejected;
    let rate = rejected as f64 / 500.0;
    let detail = format!(
        "{rejected}/500 rejected ({:.1}%); certificate values {}/{} ({:.1}%), witness coordinates {}/{} ({:.1}%, \
         the {} accepted are still solutions); structural edits {}/{} rejected, {} equivalent",
        rate * 100.0,
        cert.rejected,
        cert.total,
        cert.rate() * 100.0,
        wit.rejected,
        wit.total,
        wit.rate() * 100.0,
        wit.preserved,
        edits.rejected,
        edits.total,
        edits.preserved
    );
    ensure(rate >= 0.99, || detail.clone())?;
    Ok(detail)
}

fn run(id: &str, title: &str, f: impl FnOnce() -> Check) -> bool {
    let t = Instant::now();
    let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let secs = t.elapsed().as_secs_f64();
    match &r {
        Ok(detail) => println!("[PASS] {id} {title}: {detail}"),
        Err(why) => println!("[FAIL] {id} {title}: {why} ({secs:.2}s)"),
    }
    r.is_ok()
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= run("AC1", "square-root example", ac1);
    ok &= run("AC2", "three-guard instance", ac2);
    ok &= run("AC3", "nook threshold", ac3);
    ok &= run("AC4", "limit laws", ac4);
    ok &= run("AC5", "path table completeness", ac5);
    ok &= run("AC6", "tight-path minimum", ac6);
    let suite = catch_unwind(run_suite).unwrap_or_else(|_| Err("suite panicked".into()));
    match suite {
        Ok((suite, secs)) => {
            ok &= run("AC7", "differential suite", || ac7(&suite, secs));
            ok &= run("AC8", "witness size", || ac8(&suite));
            ok &= run("AC9", "piece counts", || ac9(&suite));
            ok &= run("AC10", "mutation testing", || ac10(&suite));
        }
        Err(e) => {
            for (id, title) in [
                ("AC7", "differential suite"),
                ("AC8", "witness size"),
                ("AC9", "piece counts"),
                ("AC10", "mutation testing"),
            ] {
                ok &= run(id, title, || Err(e.clone()));
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
