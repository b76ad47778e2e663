//! Random systems and brute-force oracles shared by integration tests.
#![allow(dead_code)]

use chainscope_core::{Dyadic, FiniteSystem};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

/// `n` distinct points of `[0, 1]` on the grid `2^-6`, a random map and,
/// when `relation`, up to two extra successors per point.
pub fn random_system(rng: &mut TestRng, n: usize, relation: bool) -> FiniteSystem {
    let mut grid: Vec<i64> = (0..=64).collect();
    grid.shuffle(rng);
    let pos = &grid[..n];
    let dist: Vec<Vec<Dyadic>> = (0..n)
        .map(|i| (0..n).map(|j| Dyadic::new((pos[i] - pos[j]).abs(), 6)).collect())
        .collect();
    let image: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    let sys = FiniteSystem::from_table(&dist, image.clone()).unwrap();
    if !relation {
        return sys;
    }
    let succ = (0..n)
        .map(|i| {
            let mut s = vec![image[i]];
            for _ in 0..rng.gen_range(0..3) {
                s.push(rng.gen_range(0..n));
            }
            s
        })
        .collect();
    sys.with_successors(succ).unwrap()
}

/// A scale drawn from the distances of `sys`, or slightly off them.
pub fn random_scale(rng: &mut TestRng) -> Dyadic {
    Dyadic::new(rng.gen_range(0..24), 6)
}

/// δ-edge relation straight from the definition.
pub fn edges(sys: &FiniteSystem, delta: Dyadic) -> Vec<Vec<bool>> {
    let n = sys.size();
    (0..n)
        .map(|i| (0..n).map(|j| sys.successors(i).iter().any(|&e| sys.dist(e, j) <= delta)).collect())
        .collect()
}

/// Transitive closure (paths of length >= 1), Warshall.
pub fn closure(adj: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = adj.len();
    let mut r = adj.to_vec();
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

pub fn oracle_recurrent(reach: &[Vec<bool>]) -> Vec<usize> {
    (0..reach.len()).filter(|&x| reach[x][x]).collect()
}

/// Classes of mutual reachability among recurrent points, sorted.
pub fn oracle_components(reach: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let rec = oracle_recurrent(reach);
    let mut out: Vec<Vec<usize>> = Vec::new();
    for &x in &rec {
        if out.iter().any(|c| c.contains(&x)) {
            continue;
        }
        out.push(rec.iter().copied().filter(|&y| reach[x][y] && reach[y][x]).collect());
    }
    out.sort();
    out
}

pub fn oracle_class(reach: &[Vec<bool>], x: usize) -> Vec<usize> {
    (0..reach.len()).filter(|&y| y == x || reach[x][y]).collect()
}

/// Whether some walk of the successor relation stays within `eps` of `p`.
pub fn shadowed(sys: &FiniteSystem, p: &[usize], eps: Dyadic) -> bool {
    let n = sys.size();
    let mut cur: Vec<usize> = (0..n).filter(|&y| sys.dist(y, p[0]) <= eps).collect();
    for &x in &p[1..] {
        let mut next: Vec<usize> = cur.iter().flat_map(|&y| sys.successors(y).to_vec()).collect();
        next.sort_unstable();
        next.dedup();
        cur = next.into_iter().filter(|&y| sys.dist(y, x) <= eps).collect();
        if cur.is_empty() {
            return false;
        }
    }
    !cur.is_empty()
}

/// Least (by length, then lexicographically) δ-pseudo-orbit of at most
/// `max_len` points that no orbit ε-shadows.
pub fn oracle_counterexample(sys: &FiniteSystem, eps: Dyadic, delta: Dyadic, max_len: usize) -> Option<Vec<usize>> {
    let adj = edges(sys, delta);
    let n = sys.size();
    let mut layer: Vec<Vec<usize>> = (0..n).map(|x| vec![x]).collect();
    for len in 1..=max_len {
        if len > 1 {
            let mut next = Vec::new();
            for p in &layer {
                let last = *p.last().unwrap();
                for y in 0..n {
                    if adj[last][y] {
                        let mut q = p.clone();
                        q.push(y);
                        next.push(q);
                    }
                }
            }
            layer = next;
        }
        if let Some(p) = layer.iter().find(|p| !shadowed(sys, p, eps)) {
            return Some(p.clone());
        }
    }
    None
}
