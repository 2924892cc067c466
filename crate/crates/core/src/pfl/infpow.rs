use crate::exact::{rational_between, ExtSurd, FixedPoints, Surd};

use super::monomap::{MonoMap, Piece};

/// Maximal intervals on which `f(y) < y`, as `(inf, sup)` pairs in
/// increasing order.
fn descent_components(f: &MonoMap) -> Vec<(ExtSurd, ExtSurd)> {
    let mut points: Vec<Surd> = f.breaks().to_vec();
    for (i, p) in f.pieces().iter().enumerate() {
        let (lo, hi) = f.cell(i);
        let inside = |x: &Surd| {
            let x = ExtSurd::Finite(x.clone());
            lo < x && x < hi
        };
        match p {
            Piece::Map(g) => {
                if let FixedPoints::Points(fp) = g.fixed_points() {
                    points.extend(fp.into_iter().filter(|x| inside(x)));
                }
            }
            Piece::Const(ExtSurd::Finite(v)) if inside(v) => points.push(v.clone()),
            Piece::Const(_) => {}
        }
    }
    points.sort();
    points.dedup();

    // alternate open cells and points, tagging where f drops below the diagonal
    let mut elements: Vec<(ExtSurd, ExtSurd, bool)> = Vec::with_capacity(2 * points.len() + 1);
    let mut lo = ExtSurd::NegInf;
    for p in points.iter().map(|p| ExtSurd::Finite(p.clone())).chain([ExtSurd::PosInf]) {
        let s = Surd::rational(rational_between(&lo, &p));
        let below = f.eval_finite(&s) < ExtSurd::Finite(s);
        elements.push((lo.clone(), p.clone(), below));
        if let ExtSurd::Finite(x) = &p {
            elements.push((p.clone(), p.clone(), f.eval_finite(x) < p));
        }
        lo = p;
    }

    let mut out: Vec<(ExtSurd, ExtSurd)> = Vec::new();
    let mut open = false;
    for (lo, hi, below) in elements {
        match (below, open) {
            (true, true) => out.last_mut().expect("open component").1 = hi,
            (true, false) => {
                out.push((lo, hi));
                open = true;
            }
            (false, _) => open = false,
        }
    }
    out.retain(|(a, b)| a < b);
    out
}

/// Limit of the iterates of a loop bound: the step map sending `y` to the
/// lower end of the first descent component above `y`, or `+∞` past the
/// last one.
///
/// On a descent component the iterates `f^k(y)` fall to its lower end; below
/// it the value is at least `y`, so `min(y, f^∞(y))` is the tightest bound
/// the loop implies. A map with no descent anywhere, the identity included,
/// gives `+∞` everywhere.
pub fn inf_power(f: &MonoMap) -> MonoMap {
    let comps = descent_components(f);
    let mut breaks = Vec::new();
    let mut pieces = Vec::new();
    let mut at = Vec::new();
    for (alpha, beta) in &comps {
        pieces.push(Piece::Const(alpha.clone()));
        if let ExtSurd::Finite(b) = beta {
            breaks.push(b.clone());
        }
    }
    if comps.last().map_or(true, |(_, b)| b.is_finite()) {
        pieces.push(Piece::Const(ExtSurd::PosInf));
    }
    for i in 0..breaks.len() {
        at.push(match &pieces[i + 1] {
            Piece::Const(v) => v.clone(),
            Piece::Map(_) => unreachable!(),
        });
    }
    MonoMap::from_parts(breaks, pieces, at)
}

/// The values taken by [`inf_power`]: lower ends of descent components,
/// `−∞` when the first is unbounded below, and `+∞` when some point lies
/// above every descent component.
pub fn attracting_points(f: &MonoMap) -> Vec<ExtSurd> {
    let l = inf_power(f);
    let mut out: Vec<ExtSurd> = Vec::with_capacity(l.piece_count());
    for p in l.pieces() {
        if let Piece::Const(v) = p {
            if out.last() != Some(v) {
                out.push(v.clone());
            }
        }
    }
    out
}
