use crate::exact::{rational_between, ExtSurd, Surd};

use super::monomap::{MonoMap, Piece};

impl MonoMap {
    /// Pointwise minimum of nonempty `maps`.
    pub fn envelope_min(maps: &[MonoMap]) -> MonoMap {
        assert!(!maps.is_empty(), "envelope of no maps");
        if maps.len() == 1 {
            return maps[0].clone();
        }
        let mut grid: Vec<Surd> = maps.iter().flat_map(|m| m.breaks().iter().cloned()).collect();
        grid.sort();
        grid.dedup();

        let mut breaks = Vec::new();
        let mut pieces = Vec::new();
        for chunk in 0..=grid.len() {
            let lo = if chunk == 0 {
                ExtSurd::NegInf
            } else {
                ExtSurd::Finite(grid[chunk - 1].clone())
            };
            let hi = grid.get(chunk).cloned().map_or(ExtSurd::PosInf, ExtSurd::Finite);
            if chunk > 0 {
                breaks.push(grid[chunk - 1].clone());
            }
            let sample = Surd::rational(rational_between(&lo, &hi));
            let mut active: Vec<&Piece> = Vec::new();
            for m in maps {
                let p = &m.pieces()[m.locate(&sample).expect("sample avoids breakpoints")];
                if !active.contains(&p) {
                    active.push(p);
                }
            }
            let mut cuts = crossings(&active, &lo, &hi);
            cuts.sort();
            cuts.dedup();
            let mut sub_lo = lo;
            for cut in cuts.iter().map(|c| ExtSurd::Finite(c.clone())).chain([hi]) {
                let x = Surd::rational(rational_between(&sub_lo, &cut));
                let best = active
                    .iter()
                    .min_by(|p, q| p.eval(&x).cmp(&q.eval(&x)))
                    .expect("nonempty");
                pieces.push((*best).clone());
                if let ExtSurd::Finite(c) = &cut {
                    if cuts.contains(c) {
                        breaks.push(c.clone());
                    }
                }
                sub_lo = cut;
            }
        }
        let at = breaks
            .iter()
            .map(|b| {
                maps.iter()
                    .map(|m| m.eval_finite(b))
                    .min()
                    .expect("nonempty")
            })
            .collect();
        MonoMap::from_parts(breaks, pieces, at)
    }
}

/// Points strictly inside `(lo, hi)` where two of `pieces` agree.
fn crossings(pieces: &[&Piece], lo: &ExtSurd, hi: &ExtSurd) -> Vec<Surd> {
    let mut out = Vec::new();
    for (i, p) in pieces.iter().enumerate() {
        for q in &pieces[i + 1..] {
            let pts = match (p, q) {
                (Piece::Map(f), Piece::Map(g)) => f.intersections(g),
                (Piece::Map(f), Piece::Const(ExtSurd::Finite(v)))
                | (Piece::Const(ExtSurd::Finite(v)), Piece::Map(f)) => {
                    f.inverse().apply(v).into_iter().collect()
                }
                _ => Vec::new(),
            };
            out.extend(pts.into_iter().filter(|x| {
                let x = ExtSurd::Finite(x.clone());
                *lo < x && x < *hi
            }));
        }
    }
    out
}
