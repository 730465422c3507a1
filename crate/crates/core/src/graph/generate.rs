use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, GraphError};

/// Upper bound on rejection-sampling attempts for every generator.
pub const MAX_ATTEMPTS: usize = 10_000;

/// Derives the seed of one instance from a suite's master seed.
///
/// Streams are split by XOR with the instance index and fed to ChaCha8,
/// which gives identical sequences on every platform.
pub fn stream_seed(master: u64, instance: u64) -> u64 {
    master ^ instance
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected simple `degree`-regular graph from the pairing (configuration)
/// model; samples with loops, multi-edges or several components are rejected.
pub fn gen_random_regular(n: usize, degree: usize, seed: u64) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(GraphError::TooFewVertices(n));
    }
    if degree >= n {
        return Err(GraphError::InfeasibleRegular { n, degree, reason: "degree must be below n" });
    }
    if (n * degree) % 2 == 1 {
        return Err(GraphError::InfeasibleRegular { n, degree, reason: "n * degree is odd" });
    }
    if degree == 0 {
        return Err(GraphError::InfeasibleRegular { n, degree, reason: "degree 0 is disconnected" });
    }
    let mut rng = rng_for(seed);
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(degree)).collect();
    'attempt: for _ in 0..MAX_ATTEMPTS {
        points.shuffle(&mut rng);
        let mut pairs = Vec::with_capacity(points.len() / 2);
        let mut seen = std::collections::HashSet::with_capacity(points.len() / 2);
        for chunk in points.chunks_exact(2) {
            let (a, b) = (chunk[0].min(chunk[1]), chunk[0].max(chunk[1]));
            if a == b || !seen.insert((a, b)) {
                continue 'attempt;
            }
            pairs.push((a, b));
        }
        pairs.sort_unstable();
        let g = Graph::new(n, pairs)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(GraphError::RetriesExhausted(MAX_ATTEMPTS))
}

fn check_probability(p: f64) -> Result<(), GraphError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(GraphError::InvalidParameter(format!("edge probability must lie in (0, 1], got {p}")));
    }
    Ok(())
}

/// Connected G(n, p) sample; disconnected draws are resampled.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(GraphError::TooFewVertices(n));
    }
    check_probability(p)?;
    let mut rng = rng_for(seed);
    for _ in 0..MAX_ATTEMPTS {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::new(n, edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(GraphError::RetriesExhausted(MAX_ATTEMPTS))
}

/// Connected random bipartite graph with parts `0..n1` and `n1..n1+n2`;
/// each cross pair is present independently with probability `p`.
pub fn gen_bipartite(n1: usize, n2: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    if n1 == 0 || n2 == 0 {
        return Err(GraphError::InvalidParameter(format!("both parts must be nonempty, got ({n1}, {n2})")));
    }
    check_probability(p)?;
    let mut rng = rng_for(seed);
    for _ in 0..MAX_ATTEMPTS {
        let mut edges = Vec::new();
        for u in 0..n1 {
            for v in n1..n1 + n2 {
                if rng.gen::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::new(n1 + n2, edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(GraphError::RetriesExhausted(MAX_ATTEMPTS))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4_is_the_only_cubic_graph_on_four_vertices() {
        for seed in 0..5 {
            let g = gen_random_regular(4, 3, seed).unwrap();
            assert_eq!(g.sorted_edges(), Graph::complete(4).unwrap().sorted_edges());
        }
    }

    #[test]
    fn cubic_degrees_and_connectivity() {
        let g = gen_random_regular(10, 3, 7).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 3));
        assert!(g.is_connected());
        assert_eq!(g.m(), 15);
    }

    #[test]
    fn infeasible_regular_parameters() {
        assert!(matches!(gen_random_regular(5, 3, 0), Err(GraphError::InfeasibleRegular { .. })));
        assert!(matches!(gen_random_regular(4, 4, 0), Err(GraphError::InfeasibleRegular { .. })));
    }

    #[test]
    fn erdos_renyi_examples() {
        let g = gen_erdos_renyi(2, 1.0, 0).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
        let g = gen_erdos_renyi(12, 0.5, 1).unwrap();
        assert!(g.is_connected());
        assert!(g.m() > 0 && g.m() <= 66);
        assert_eq!(gen_erdos_renyi(10, 0.5, 3).unwrap(), gen_erdos_renyi(10, 0.5, 3).unwrap());
        assert!(gen_erdos_renyi(10, 0.0, 3).is_err());
        assert!(gen_erdos_renyi(10, 1.5, 3).is_err());
    }

    #[test]
    fn bipartite_examples() {
        assert_eq!(gen_bipartite(1, 1, 1.0, 0).unwrap().edges(), &[(0, 1)]);
        let k33 = gen_bipartite(3, 3, 1.0, 0).unwrap();
        assert_eq!(k33.m(), 9);
        for seed in 0..20 {
            let g = gen_bipartite(5, 4, 0.5, seed).unwrap();
            assert!(g.is_connected());
            assert!(g.edges().iter().all(|&(u, v)| u < 5 && v >= 5));
            assert!(g.is_bipartite());
        }
        assert!(gen_bipartite(0, 3, 0.5, 0).is_err());
    }

    #[test]
    fn different_seeds_usually_differ() {
        let a = gen_random_regular(12, 3, 1).unwrap();
        let b = gen_random_regular(12, 3, 2).unwrap();
        assert_ne!(a, b);
        assert_eq!(stream_seed(0b1010, 0b0110), 0b1100);
    }
}
