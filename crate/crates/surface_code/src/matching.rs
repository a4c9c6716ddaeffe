use serde::Serialize;

use crate::blossom::max_weight_matching;

/// Defect pairing: `pairs` join two defects, `boundary` lists defects matched
/// to the boundary. Indices refer to positions in the defect list.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub boundary: Vec<usize>,
    pub weight: u64,
}

/// Largest defect count solved by exact subset dynamic programming; larger
/// instances go to the blossom solver.
pub const DP_LIMIT: usize = 12;

/// Minimum-weight perfect matching of `n` defects where each defect may pair
/// with another (`pair(i, j)`) or with the boundary (`boundary(i)`, `None` if
/// unreachable). An infeasible instance yields `weight == u64::MAX`.
pub fn min_weight_matching(n: usize, pair: impl Fn(usize, usize) -> u64, boundary: impl Fn(usize) -> Option<u64>) -> Matching {
    if n <= DP_LIMIT {
        matching_dp(n, pair, boundary)
    } else {
        matching_blossom(n, pair, boundary)
    }
}

/// Exact subset DP. The lowest unmatched defect is paired first with the
/// lowest-index partner, then the boundary; strict improvement only, so
/// ties resolve toward the lowest index.
pub fn matching_dp(n: usize, pair: impl Fn(usize, usize) -> u64, boundary: impl Fn(usize) -> Option<u64>) -> Matching {
    assert!(n < 31, "subset DP limited to 30 defects");
    const INF: u64 = u64::MAX / 4;
    let full = (1usize << n) - 1;
    // best[mask] = cost to match the defects in `mask`; choice encodes the partner.
    let mut best = vec![INF; 1 << n];
    let mut choice = vec![usize::MAX; 1 << n];
    best[0] = 0;
    for mask in 1..=full {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut m = rest;
        while m != 0 {
            let j = m.trailing_zeros() as usize;
            m &= m - 1;
            let c = best[rest & !(1 << j)].saturating_add(pair(i, j));
            if c < best[mask] {
                best[mask] = c;
                choice[mask] = j;
            }
        }
        if let Some(b) = boundary(i) {
            let c = best[rest].saturating_add(b);
            if c < best[mask] {
                best[mask] = c;
                choice[mask] = n;
            }
        }
    }
    if best[full] >= INF {
        // No perfect matching: some defect can reach neither a partner nor the boundary.
        return Matching { weight: u64::MAX, ..Matching::default() };
    }
    let mut out = Matching { weight: best[full], ..Matching::default() };
    let mut mask = full;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        let j = choice[mask];
        if j == n {
            out.boundary.push(i);
            mask &= !(1 << i);
        } else {
            out.pairs.push((i, j));
            mask &= !((1 << i) | (1 << j));
        }
    }
    out
}

/// Blossom-based solver: defect `i` gets a boundary twin `n + i`; twins pair
/// freely among themselves, so a perfect matching always exists.
pub fn matching_blossom(n: usize, pair: impl Fn(usize, usize) -> u64, boundary: impl Fn(usize) -> Option<u64>) -> Matching {
    if n == 0 {
        return Matching::default();
    }
    let mut raw = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            raw.push((i, j, pair(i, j)));
            raw.push((n + i, n + j, 0));
        }
        if let Some(b) = boundary(i) {
            raw.push((i, n + i, b));
        }
    }
    let top = raw.iter().map(|e| e.2).max().unwrap_or(0) as i64 + 1;
    let edges: Vec<(usize, usize, i64)> = raw.iter().map(|&(i, j, w)| (i, j, top - w as i64)).collect();
    let mate = max_weight_matching(2 * n, &edges);
    let mut out = Matching::default();
    for i in 0..n {
        match mate[i] {
            Some(j) if j < n => {
                if i < j {
                    out.pairs.push((i, j));
                    out.weight += pair(i, j);
                }
            }
            Some(_) => {
                out.boundary.push(i);
                out.weight += boundary(i).expect("boundary edge exists");
            }
            None => return Matching { weight: u64::MAX, ..Matching::default() },
        }
    }
    out
}
