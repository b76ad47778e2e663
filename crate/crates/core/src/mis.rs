//! Maximum independent sets in conflict graphs.
//!
//! Solved as maximum cliques of the complement with greedy-colouring
//! bounds. The graph is split into connected components first, and a
//! component whose conflict relation is an equivalence (a disjoint union of
//! cliques) is answered by counting classes.

use alloc::vec;
use alloc::vec::Vec;

use crate::nodeset::NodeSet;

/// Default bound on branch-and-bound expansions.
pub const DEFAULT_BUDGET: u64 = 5_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MisOutcome {
    /// Sorted member list.
    pub set: Vec<usize>,
    /// `false` when the budget ran out; `set` is then only a lower bound.
    pub exact: bool,
    pub expansions: u64,
}

/// `true` iff no two members of `set` conflict.
pub fn is_independent(conflict: &[NodeSet], set: &[usize]) -> bool {
    set.iter().enumerate().all(|(a, &u)| set[a + 1..].iter().all(|&v| !conflict[u].contains(v)))
}

/// Greedy by least index.
pub fn greedy_independent_set(conflict: &[NodeSet]) -> Vec<usize> {
    let n = conflict.len();
    let mut blocked = NodeSet::empty(n);
    let mut out = Vec::new();
    for v in 0..n {
        if !blocked.contains(v) {
            out.push(v);
            blocked.union_with(&conflict[v]);
        }
    }
    out
}

fn components(conflict: &[NodeSet]) -> Vec<Vec<usize>> {
    let n = conflict.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut k = 0;
        while k < comp.len() {
            let u = comp[k];
            k += 1;
            for v in conflict[u].iter() {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

fn is_clique(conflict: &[NodeSet], comp: &[usize]) -> bool {
    comp.iter().all(|&u| {
        let deg = conflict[u].count() - usize::from(conflict[u].contains(u));
        deg + 1 == comp.len()
    })
}

struct Search {
    adj: Vec<NodeSet>,
    best: Vec<usize>,
    budget: u64,
    expansions: u64,
    exhausted: bool,
}

impl Search {
    fn colour(&self, p: &NodeSet) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::new();
        let mut bounds = Vec::new();
        let mut uncoloured = p.clone();
        let mut colour = 0;
        while !uncoloured.is_empty() {
            colour += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = q.first() {
                q.remove(v);
                q.difference_with(&self.adj[v]);
                uncoloured.remove(v);
                order.push(v);
                bounds.push(colour);
            }
        }
        (order, bounds)
    }

    fn expand(&mut self, r: &mut Vec<usize>, mut p: NodeSet) {
        self.expansions += 1;
        if self.expansions > self.budget {
            self.exhausted = true;
            return;
        }
        let (order, bounds) = self.colour(&p);
        for k in (0..order.len()).rev() {
            if r.len() + bounds[k] <= self.best.len() || self.exhausted {
                return;
            }
            let v = order[k];
            r.push(v);
            let mut next = p.clone();
            next.intersect_with(&self.adj[v]);
            if next.is_empty() {
                if r.len() > self.best.len() {
                    self.best = r.clone();
                }
            } else {
                self.expand(r, next);
            }
            r.pop();
            p.remove(v);
        }
    }
}

/// Exact solve of one connected component, local indices.
fn solve_component(conflict: &[NodeSet], comp: &[usize], budget: u64) -> (Vec<usize>, bool, u64) {
    let m = comp.len();
    // compatibility graph, vertices relabelled by decreasing degree
    let mut order: Vec<usize> = (0..m).collect();
    let local: Vec<NodeSet> = comp
        .iter()
        .map(|&u| NodeSet::from_indices(m, (0..m).filter(|&j| comp[j] != u && !conflict[u].contains(comp[j]))))
        .collect();
    order.sort_by_key(|&i| (core::cmp::Reverse(local[i].count()), i));
    let mut pos = vec![0; m];
    for (k, &i) in order.iter().enumerate() {
        pos[i] = k;
    }
    let adj: Vec<NodeSet> = order
        .iter()
        .map(|&i| NodeSet::from_indices(m, local[i].iter().map(|j| pos[j])))
        .collect();
    let greedy: Vec<usize> = {
        let sub: Vec<NodeSet> = (0..m)
            .map(|k| {
                let mut c = NodeSet::full(m);
                c.difference_with(&adj[k]);
                c.remove(k);
                c
            })
            .collect();
        greedy_independent_set(&sub)
    };
    let mut search = Search { adj, best: greedy, budget, expansions: 0, exhausted: false };
    search.expand(&mut Vec::new(), NodeSet::full(m));
    let mut set: Vec<usize> = search.best.iter().map(|&k| comp[order[k]]).collect();
    set.sort_unstable();
    (set, !search.exhausted, search.expansions)
}

/// Maximum independent set; `conflict[u]` lists the vertices conflicting
/// with `u` (a self entry is ignored). The relation must be symmetric.
pub fn max_independent_set(conflict: &[NodeSet], budget: u64) -> MisOutcome {
    let mut set = Vec::new();
    let mut exact = true;
    let mut expansions = 0;
    for comp in components(conflict) {
        if is_clique(conflict, &comp) {
            set.push(comp[0]);
            continue;
        }
        let (part, ok, used) = solve_component(conflict, &comp, budget.saturating_sub(expansions));
        exact &= ok;
        expansions += used;
        set.extend(part);
    }
    set.sort_unstable();
    MisOutcome { set, exact, expansions }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Vec<NodeSet> {
        let mut g = vec![NodeSet::empty(n); n];
        for &(a, b) in edges {
            g[a].insert(b);
            g[b].insert(a);
        }
        g
    }

    #[test]
    fn path_and_cycle() {
        let path = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(max_independent_set(&path, DEFAULT_BUDGET).set.len(), 2);
        let c5 = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let out = max_independent_set(&c5, DEFAULT_BUDGET);
        assert_eq!(out.set.len(), 2);
        assert!(out.exact && is_independent(&c5, &out.set));
    }

    #[test]
    fn disjoint_cliques_are_counted() {
        let g = graph(6, &[(0, 1), (1, 2), (0, 2), (3, 4)]);
        assert_eq!(max_independent_set(&g, DEFAULT_BUDGET).set, vec![0, 3, 5]);
    }

    #[test]
    fn greedy_can_lose() {
        // star: greedy picks the centre 0
        let g = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(greedy_independent_set(&g), vec![0]);
        assert_eq!(max_independent_set(&g, DEFAULT_BUDGET).set, vec![1, 2, 3]);
    }
}
