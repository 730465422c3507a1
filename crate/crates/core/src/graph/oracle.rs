use serde::{Deserialize, Serialize};

use super::{Graph, GraphError};
use crate::DEFAULT_STATE_CAP;

/// Exact Max-Cut value and every bitstring attaining it.
///
/// Bit `j` of a maximizer is the side of vertex `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutOracleResult {
    pub optimum: usize,
    pub maximizers: Vec<u64>,
}

impl CutOracleResult {
    pub fn first_maximizer(&self) -> u64 {
        self.maximizers[0]
    }
}

/// Exhaustive Max-Cut over all `2^n` bipartitions with the default cap.
pub fn brute_force_max_cut(g: &Graph) -> Result<CutOracleResult, GraphError> {
    brute_force_max_cut_capped(g, DEFAULT_STATE_CAP)
}

/// Exhaustive Max-Cut; counts crossing edges per configuration with one
/// XOR/popcount per edge.
pub fn brute_force_max_cut_capped(g: &Graph, cap: usize) -> Result<CutOracleResult, GraphError> {
    let n = g.n();
    if n > cap || n > 63 {
        return Err(GraphError::AboveCap { n, cap });
    }
    let masks: Vec<u64> = g.edges().iter().map(|&(u, v)| (1u64 << u) | (1u64 << v)).collect();
    let mut optimum = 0usize;
    let mut maximizers = Vec::new();
    for x in 0..(1u64 << n) {
        let cut = masks.iter().filter(|&&mask| (x & mask).count_ones() == 1).count();
        if cut > optimum {
            optimum = cut;
            maximizers.clear();
        }
        if cut == optimum {
            maximizers.push(x);
        }
    }
    Ok(CutOracleResult { optimum, maximizers })
}
