//! Misra–Gries edge coloring with at most `Δ + 1` colors.
//!
//! Each color class is a matching, so all two-qubit gates of one class can
//! run in a single circuit layer; the number of classes is the depth of one
//! phase-separation layer.

use serde::{Deserialize, Serialize};

use super::Graph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeColoring {
    pub layers: Vec<Vec<(usize, usize)>>,
}

impl EdgeColoring {
    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    /// Checks that layers partition the edge set of `g` into matchings.
    pub fn is_proper_for(&self, g: &Graph) -> bool {
        let mut used = vec![false; g.m()];
        let index: std::collections::HashMap<(usize, usize), usize> =
            g.edges().iter().enumerate().map(|(i, &e)| (e, i)).collect();
        for layer in &self.layers {
            let mut touched = vec![false; g.n()];
            for &(u, v) in layer {
                let Some(&i) = index.get(&(u.min(v), u.max(v))) else {
                    return false;
                };
                if used[i] || touched[u] || touched[v] {
                    return false;
                }
                used[i] = true;
                touched[u] = true;
                touched[v] = true;
            }
        }
        used.into_iter().all(|u| u)
    }
}

struct Colors {
    n: usize,
    palette: usize,
    // color[u * n + v], symmetric
    color: Vec<Option<usize>>,
    adj: Vec<Vec<usize>>,
}

impl Colors {
    fn get(&self, u: usize, v: usize) -> Option<usize> {
        self.color[u * self.n + v]
    }

    fn set(&mut self, u: usize, v: usize, c: Option<usize>) {
        self.color[u * self.n + v] = c;
        self.color[v * self.n + u] = c;
    }

    fn is_free(&self, u: usize, c: usize) -> bool {
        self.adj[u].iter().all(|&w| self.get(u, w) != Some(c))
    }

    fn free_color(&self, u: usize) -> usize {
        (0..self.palette)
            .find(|&c| self.is_free(u, c))
            .expect("a vertex of degree <= Δ always has a free color among Δ + 1")
    }

    /// Maximal fan of `u` starting at `v`.
    fn fan(&self, u: usize, v: usize) -> Vec<usize> {
        let mut fan = vec![v];
        let mut in_fan = vec![false; self.n];
        in_fan[v] = true;
        loop {
            let last = *fan.last().unwrap();
            let next = self.adj[u].iter().copied().find(|&w| {
                !in_fan[w] && matches!(self.get(u, w), Some(c) if self.is_free(last, c))
            });
            match next {
                Some(w) => {
                    in_fan[w] = true;
                    fan.push(w);
                }
                None => return fan,
            }
        }
    }

    /// Swaps colors `c` and `d` along the alternating path leaving `u` on a
    /// `d` edge (`c` must be free on `u`).
    fn invert_path(&mut self, u: usize, c: usize, d: usize) {
        let mut path = Vec::new();
        let mut at = u;
        let mut want = d;
        let mut prev = usize::MAX;
        while let Some(w) = self.adj[at]
            .iter()
            .copied()
            .find(|&w| w != prev && self.get(at, w) == Some(want))
        {
            path.push((at, w));
            prev = at;
            at = w;
            want = if want == d { c } else { d };
        }
        for (a, b) in path {
            let swapped = if self.get(a, b) == Some(c) { d } else { c };
            self.set(a, b, Some(swapped));
        }
    }

    fn is_fan_prefix(&self, u: usize, fan: &[usize]) -> bool {
        fan.windows(2).all(|w| matches!(self.get(u, w[1]), Some(c) if self.is_free(w[0], c)))
    }
}

/// Proper edge coloring with at most `max_degree + 1` layers.
///
/// Layers are emitted in color order; edges inside a layer keep the order of
/// the graph's edge list.
pub fn edge_coloring(g: &Graph) -> EdgeColoring {
    let n = g.n();
    let delta = g.max_degree();
    let mut colors = Colors {
        n,
        palette: delta + 1,
        color: vec![None; n * n],
        adj: g.adjacency(),
    };

    for &(u, v) in g.edges() {
        let fan = colors.fan(u, v);
        let c = colors.free_color(u);
        let d = colors.free_color(*fan.last().unwrap());
        colors.invert_path(u, c, d);

        let w_idx = (0..fan.len())
            .find(|&i| colors.is_free(fan[i], d) && colors.is_fan_prefix(u, &fan[..=i]))
            .expect("Misra-Gries guarantees a fan vertex with d free");
        // rotate the fan prefix
        for i in 0..w_idx {
            let shifted = colors.get(u, fan[i + 1]);
            colors.set(u, fan[i], shifted);
        }
        colors.set(u, fan[w_idx], Some(d));
    }

    let mut layers: Vec<Vec<(usize, usize)>> = vec![Vec::new(); delta + 1];
    for &(u, v) in g.edges() {
        let c = colors.get(u, v).expect("every edge is colored");
        layers[c].push((u, v));
    }
    layers.retain(|l| !l.is_empty());
    EdgeColoring { layers }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_erdos_renyi, gen_random_regular};

    #[test]
    fn triangle_needs_three_layers() {
        let g = Graph::cycle(3).unwrap();
        let c = edge_coloring(&g);
        assert!(c.is_proper_for(&g));
        assert_eq!(c.num_layers(), 3);
        assert!(c.layers.iter().all(|l| l.len() == 1));
    }

    #[test]
    fn petersen_fits_in_four_layers() {
        let g = Graph::petersen();
        let c = edge_coloring(&g);
        assert!(c.is_proper_for(&g));
        // class-2 graph: exactly Δ + 1
        assert_eq!(c.num_layers(), 4);
    }

    #[test]
    fn perfect_matching_is_one_layer() {
        let g = Graph::new(6, [(0, 1), (2, 3), (4, 5)]).unwrap();
        let c = edge_coloring(&g);
        assert_eq!(c.num_layers(), 1);
        assert!(c.is_proper_for(&g));
    }

    #[test]
    fn random_graphs_stay_within_vizing_bound() {
        for seed in 0..40 {
            for g in [
                gen_erdos_renyi(12, 0.5, seed).unwrap(),
                gen_random_regular(14, 3, seed).unwrap(),
                gen_random_regular(12, 5, seed).unwrap(),
            ] {
                let c = edge_coloring(&g);
                assert!(c.is_proper_for(&g), "improper coloring for seed {seed}");
                assert!(c.num_layers() <= g.max_degree() + 1);
            }
        }
    }

    #[test]
    fn complete_graphs() {
        for n in 2..=9 {
            let g = Graph::complete(n).unwrap();
            let c = edge_coloring(&g);
            assert!(c.is_proper_for(&g));
            assert!(c.num_layers() <= n);
        }
    }

    #[test]
    fn detects_improper_layers() {
        let g = Graph::path(3).unwrap();
        let bad = EdgeColoring { layers: vec![vec![(0, 1), (1, 2)]] };
        assert!(!bad.is_proper_for(&g));
        let missing = EdgeColoring { layers: vec![vec![(0, 1)]] };
        assert!(!missing.is_proper_for(&g));
    }
}
