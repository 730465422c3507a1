//! Exhaustive enumeration of connected cubic graphs up to isomorphism.
//!
//! Candidates are generated directly in breadth-first labeling (vertex `i`
//! is completed before `i + 1`, and newly discovered neighbors take the next
//! free labels), which makes every candidate connected. Isomorphic copies
//! are merged through a canonical code: the lexicographically smallest
//! sorted edge list over all breadth-first relabelings.

use std::collections::HashSet;

use super::{Graph, GraphError};

/// Largest order accepted by [`connected_cubic_graphs`].
pub const ENUMERATION_CAP: usize = 12;

type Code = Vec<(u8, u8)>;

/// All connected simple cubic graphs on `n` vertices, one per isomorphism
/// class, in canonical labeling and ascending code order.
pub fn connected_cubic_graphs(n: usize) -> Result<Vec<Graph>, GraphError> {
    if n < 4 || n % 2 == 1 {
        return Err(GraphError::InfeasibleRegular { n, degree: 3, reason: "need even n >= 4" });
    }
    if n > ENUMERATION_CAP {
        return Err(GraphError::AboveCap { n, cap: ENUMERATION_CAP });
    }
    let mut adj = vec![Vec::with_capacity(3); n];
    let mut classes = HashSet::new();
    extend(&mut adj, 0, 1, &mut classes);
    let mut codes: Vec<Code> = classes.into_iter().collect();
    codes.sort();
    codes
        .into_iter()
        .map(|code| Graph::new(n, code.into_iter().map(|(a, b)| (a as usize, b as usize))))
        .collect()
}

fn extend(adj: &mut Vec<Vec<usize>>, vertex: usize, next_new: usize, out: &mut HashSet<Code>) {
    let n = adj.len();
    if vertex == n {
        if next_new == n {
            out.insert(canonical_code(adj));
        }
        return;
    }
    if vertex >= next_new {
        return;
    }
    let need = 3 - adj[vertex].len();
    let existing: Vec<usize> = (vertex + 1..next_new)
        .filter(|&w| adj[w].len() < 3 && !adj[vertex].contains(&w))
        .collect();
    for old in 0..=need.min(existing.len()) {
        let fresh = need - old;
        if next_new + fresh > n {
            continue;
        }
        for_each_subset(&existing, old, &mut |chosen| {
            let mut added: Vec<usize> = chosen.to_vec();
            added.extend(next_new..next_new + fresh);
            for &w in &added {
                adj[vertex].push(w);
                adj[w].push(vertex);
            }
            extend(adj, vertex + 1, next_new + fresh, out);
            for &w in &added {
                adj[vertex].pop();
                adj[w].pop();
            }
        });
    }
}

fn for_each_subset(items: &[usize], k: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(items: &[usize], k: usize, start: usize, acc: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if acc.len() == k {
            f(acc);
            return;
        }
        for i in start..items.len() {
            acc.push(items[i]);
            go(items, k, i + 1, acc, f);
            acc.pop();
        }
    }
    go(items, k, 0, &mut Vec::with_capacity(k), f);
}

fn canonical_code(adj: &[Vec<usize>]) -> Code {
    let n = adj.len();
    let mut best: Option<Code> = None;
    let mut label = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    for root in 0..n {
        label[root] = 0;
        order.push(root);
        relabel(adj, 0, &mut label, &mut order, &mut best);
        order.pop();
        label[root] = usize::MAX;
    }
    best.expect("at least one labeling")
}

fn relabel(adj: &[Vec<usize>], pos: usize, label: &mut [usize], order: &mut Vec<usize>, best: &mut Option<Code>) {
    let n = adj.len();
    if pos == n {
        let mut code: Code = Vec::with_capacity(n * 3 / 2);
        for (u, nbrs) in adj.iter().enumerate() {
            for &w in nbrs {
                let (a, b) = (label[u], label[w]);
                if a < b {
                    code.push((a as u8, b as u8));
                }
            }
        }
        code.sort_unstable();
        if best.as_ref().map_or(true, |b| code < *b) {
            *best = Some(code);
        }
        return;
    }
    let v = order[pos];
    let fresh: Vec<usize> = adj[v].iter().copied().filter(|&w| label[w] == usize::MAX).collect();
    permute(&fresh, &mut |perm| {
        for &w in perm {
            label[w] = order.len();
            order.push(w);
        }
        relabel(adj, pos + 1, label, order, best);
        for &w in perm {
            order.pop();
            label[w] = usize::MAX;
        }
    });
}

fn permute(items: &[usize], f: &mut dyn FnMut(&[usize])) {
    fn go(items: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
        if k == items.len() {
            f(items);
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            go(items, k + 1, f);
            items.swap(k, i);
        }
    }
    go(&mut items.to_vec(), 0, f);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_counts_for_small_orders() {
        // connected cubic graphs: 1, 2, 5, 19 for n = 4, 6, 8, 10
        for (n, count) in [(4, 1), (6, 2), (8, 5), (10, 19)] {
            let graphs = connected_cubic_graphs(n).unwrap();
            assert_eq!(graphs.len(), count, "n = {n}");
            for g in &graphs {
                assert!(g.is_connected());
                assert!(g.degrees().iter().all(|&d| d == 3));
            }
        }
    }

    #[test]
    fn canonical_code_ignores_labeling() {
        let p = Graph::petersen();
        let shuffled: Vec<(usize, usize)> = p.edges().iter().map(|&(u, v)| ((u * 3) % 10, (v * 3) % 10)).collect();
        let q = Graph::new(10, shuffled).unwrap();
        assert_eq!(canonical_code(&p.adjacency()), canonical_code(&q.adjacency()));
        let prism = Graph::new(10, (0..5).flat_map(|i| [(i, (i + 1) % 5), (i, i + 5), (5 + i, 5 + (i + 1) % 5)])).unwrap();
        assert_ne!(canonical_code(&p.adjacency()), canonical_code(&prism.adjacency()));
    }

    #[test]
    fn rejects_odd_and_large_orders() {
        assert!(connected_cubic_graphs(7).is_err());
        assert!(connected_cubic_graphs(14).is_err());
    }
}
