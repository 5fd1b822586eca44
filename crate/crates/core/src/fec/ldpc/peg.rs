use rand::seq::IndexedRandom;

use super::LdpcCode;
use crate::error::{Error, Result};
use crate::fec::gf2::BitMatrix;
use crate::numerics::SimRng;

/// Seed that produced the shipped n = 256 code.
pub const STANDARD_SEED: u64 = 0x5eed_1d9c;

/// Progressive edge growth for a regular code: `n` variables of degree
/// `var_degree`, `m` checks whose degrees are capped at `n * var_degree / m`.
///
/// Each new edge goes to the lowest-degree check that is farthest from the
/// variable in the current graph, ties broken by `rng`. Returns `None` when
/// the greedy placement paints itself into a corner.
pub fn peg_regular(n: usize, m: usize, var_degree: usize, rng: &mut SimRng) -> Option<Vec<Vec<usize>>> {
    if m == 0 || !(n * var_degree).is_multiple_of(m) || var_degree > m {
        return None;
    }
    let cap = n * var_degree / m;
    let mut check_adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut var_adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for j in 0..n {
        for _ in 0..var_degree {
            let open = |c: usize, check_adj: &Vec<Vec<usize>>, var_adj: &Vec<Vec<usize>>| {
                check_adj[c].len() < cap && !var_adj[j].contains(&c)
            };
            let mut candidates: Vec<usize> = Vec::new();
            if !var_adj[j].is_empty() {
                let mut reached = vec![false; m];
                var_adj[j].iter().for_each(|&c| reached[c] = true);
                loop {
                    let unreached: Vec<usize> = (0..m)
                        .filter(|&c| !reached[c] && open(c, &check_adj, &var_adj))
                        .collect();
                    let mut next = reached.clone();
                    for c in (0..m).filter(|&c| reached[c]) {
                        for &v in &check_adj[c] {
                            for &c2 in &var_adj[v] {
                                next[c2] = true;
                            }
                        }
                    }
                    let grew = next != reached;
                    let still_open = (0..m).any(|c| !next[c] && open(c, &check_adj, &var_adj));
                    if !grew || !still_open {
                        candidates = unreached;
                        break;
                    }
                    reached = next;
                }
            }
            if candidates.is_empty() {
                candidates = (0..m).filter(|&c| open(c, &check_adj, &var_adj)).collect();
            }
            let min_deg = candidates.iter().map(|&c| check_adj[c].len()).min()?;
            let best: Vec<usize> = candidates
                .into_iter()
                .filter(|&c| check_adj[c].len() == min_deg)
                .collect();
            let &c = best.choose(rng)?;
            check_adj[c].push(j);
            var_adj[j].push(c);
        }
    }
    Some(check_adj)
}

/// Rebuilds the shipped code: PEG (3,6) with n = 256 from `seed`, retried
/// with successive seeds until H has full rank, then columns reordered so the
/// information bits come first.
pub fn standard_code_from_seed(seed: u64) -> Result<LdpcCode> {
    let (n, m) = (256, 128);
    for attempt in 0..1000u64 {
        let mut rng = SimRng::new(seed.wrapping_add(attempt));
        let Some(checks) = peg_regular(n, m, 3, &mut rng) else {
            continue;
        };
        let mut h = BitMatrix::zeros(m, n);
        for (r, cols) in checks.iter().enumerate() {
            cols.iter().for_each(|&c| h.set(r, c, true));
        }
        let order: Vec<usize> = (0..n).rev().collect();
        let pivots = h.rref_in_order(&order);
        if pivots.len() < m {
            continue;
        }
        let mut is_pivot = vec![false; n];
        pivots.iter().for_each(|&p| is_pivot[p] = true);
        let mut new_order: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        new_order.extend((0..n).filter(|&c| is_pivot[c]));
        let mut position = vec![0; n];
        for (new, &old) in new_order.iter().enumerate() {
            position[old] = new;
        }
        let permuted = checks
            .iter()
            .map(|cols| {
                let mut v: Vec<usize> = cols.iter().map(|&c| position[c]).collect();
                v.sort_unstable();
                v
            })
            .collect();
        return LdpcCode::from_checks(n, permuted);
    }
    Err(Error::Numerical("no full-rank PEG code found".into()))
}
