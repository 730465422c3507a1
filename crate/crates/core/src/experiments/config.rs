use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{io_err, ExperimentError};
use crate::dynamics::{Ansatz, BetaSpec, RunConfig};
use crate::graph::{
    connected_cubic_graphs, gen_bipartite, gen_erdos_renyi, gen_random_regular, stream_seed, Graph,
};
use crate::DEFAULT_STATE_CAP;

/// Brute force runs only up to this many vertices unless configured.
pub const DEFAULT_ORACLE_CAP: usize = 20;

/// Snapshot steps used when a config lists none (clipped to `[1, R]`).
pub const DEFAULT_SNAPSHOTS: [usize; 4] = [10, 100, 1_000, 10_000];

const ENUMERATION_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Regular3,
    #[serde(alias = "er")]
    ErdosRenyi,
    Bipartite,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Regular3 => "regular3",
            Family::ErdosRenyi => "erdos_renyi",
            Family::Bipartite => "bipartite",
        }
    }

    /// Samples one connected graph; bipartite parts are `ceil(n/2)` and `floor(n/2)`.
    pub fn generate(self, n: usize, p: f64, seed: u64) -> Result<Graph, ExperimentError> {
        Ok(match self {
            Family::Regular3 => gen_random_regular(n, 3, seed)?,
            Family::ErdosRenyi => gen_erdos_renyi(n, p, seed)?,
            Family::Bipartite => gen_bipartite(n.div_ceil(2), n / 2, p, seed)?,
        })
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "regular3" => Ok(Family::Regular3),
            "er" | "erdos_renyi" => Ok(Family::ErdosRenyi),
            "bipartite" => Ok(Family::Bipartite),
            other => Err(ExperimentError::InvalidSpec(format!("unknown family {other:?}"))),
        }
    }
}

/// Builds a graph from `regular3:N:SEED`, `er:N:P:SEED` or `bipartite:N:P:SEED`.
///
/// Returns `None` when `spec` does not name a known family, so callers can
/// fall back to reading a file.
pub fn graph_from_spec(spec: &str) -> Option<Result<Graph, ExperimentError>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let family = parts.first()?.parse::<Family>().ok()?;
    let bad = || ExperimentError::InvalidSpec(format!("malformed graph spec {spec:?}"));
    let parse = || -> Result<Graph, ExperimentError> {
        let n: usize = parts.get(1).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let (p, seed) = match (family, parts.len()) {
            (Family::Regular3, 3) => (0.5, parts[2]),
            (Family::ErdosRenyi | Family::Bipartite, 4) => (parts[2].parse().map_err(|_| bad())?, parts[3]),
            _ => return Err(bad()),
        };
        let seed: u64 = seed.parse().map_err(|_| bad())?;
        family.generate(n, p, seed)
    };
    Some(parse())
}

fn default_dt() -> f64 {
    0.08
}
fn default_rounds() -> usize {
    10_000
}
fn default_epsilon() -> f64 {
    1e-3
}
fn default_targets() -> Vec<f64> {
    vec![0.878, 0.9326]
}
fn default_p() -> f64 {
    0.5
}
fn default_true() -> bool {
    true
}
fn default_oracle_cap() -> usize {
    DEFAULT_ORACLE_CAP
}
fn default_state_cap() -> usize {
    DEFAULT_STATE_CAP
}
fn default_ansatz() -> Ansatz {
    Ansatz::QaoaFeedback
}

/// On-disk suite configuration (JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub family: Family,
    pub n_list: Vec<usize>,
    pub instances_per_n: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    #[serde(default)]
    pub beta: BetaSpec,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_ansatz")]
    pub ansatz: Ansatz,
    #[serde(default = "default_targets")]
    pub targets: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_steps: Option<Vec<usize>>,
    /// Edge probability for `erdos_renyi` and `bipartite`.
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default)]
    pub adaptive: bool,
    #[serde(default = "default_true")]
    pub lightcone_feedback: bool,
    /// Use every connected cubic graph instead of random samples.
    #[serde(default)]
    pub exhaustive: bool,
    #[serde(default = "default_oracle_cap")]
    pub oracle_cap: usize,
    #[serde(default = "default_state_cap")]
    pub state_cap: usize,
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_json(&text)
    }
}

/// One planned instance of a suite.
#[derive(Debug, Clone)]
pub(crate) struct InstancePlan {
    pub graph_id: String,
    pub n: usize,
    pub seed: u64,
    pub graph: Option<Graph>,
}

/// A validated experimental grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSpec {
    pub family: Family,
    pub n_list: Vec<usize>,
    pub instances_per_n: usize,
    pub run: RunConfig,
    pub targets: Vec<f64>,
    pub snapshot_steps: Vec<usize>,
    pub edge_probability: f64,
    pub exhaustive: bool,
    pub oracle_cap: usize,
}

impl SuiteSpec {
    pub fn new(family: Family, n_list: Vec<usize>, instances_per_n: usize, run: RunConfig) -> Result<Self, ExperimentError> {
        let snapshot_steps = default_snapshots(run.rounds);
        let spec = Self {
            family,
            n_list,
            instances_per_n,
            run,
            targets: default_targets(),
            snapshot_steps,
            edge_probability: default_p(),
            exhaustive: false,
            oracle_cap: DEFAULT_ORACLE_CAP,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_config(cfg: &SuiteConfig) -> Result<Self, ExperimentError> {
        let run = RunConfig {
            ansatz: cfg.ansatz,
            dt: cfg.dt,
            rounds: cfg.rounds,
            beta: cfg.beta,
            epsilon: cfg.epsilon,
            adaptive_dt: cfg.adaptive,
            lightcone_feedback: cfg.lightcone_feedback,
            seed: cfg.seed,
            state_cap: cfg.state_cap,
        };
        let snapshot_steps = match &cfg.snapshot_steps {
            Some(steps) => {
                let mut s: Vec<usize> = steps.iter().copied().filter(|&p| p >= 1 && p <= cfg.rounds).collect();
                s.sort_unstable();
                s.dedup();
                s
            }
            None => default_snapshots(cfg.rounds),
        };
        let spec = Self {
            family: cfg.family,
            n_list: cfg.n_list.clone(),
            instances_per_n: cfg.instances_per_n,
            run,
            targets: cfg.targets.clone(),
            snapshot_steps,
            edge_probability: cfg.p,
            exhaustive: cfg.exhaustive,
            oracle_cap: cfg.oracle_cap,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        Self::from_config(&SuiteConfig::load(path)?)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |msg: String| Err(ExperimentError::InvalidSpec(msg));
        if self.n_list.is_empty() {
            return bad("n_list is empty".into());
        }
        if self.instances_per_n == 0 {
            return bad("instances_per_n must be at least 1".into());
        }
        if let Some(t) = self.targets.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return bad(format!("target {t} outside (0, 1)"));
        }
        if !(self.edge_probability > 0.0 && self.edge_probability <= 1.0) {
            return bad(format!("edge probability {} outside (0, 1]", self.edge_probability));
        }
        for &n in &self.n_list {
            match self.family {
                Family::Regular3 if n < 4 || n % 2 == 1 => {
                    return bad(format!("no cubic graph on {n} vertices"));
                }
                _ if n < 2 => return bad(format!("n = {n} is too small")),
                _ => {}
            }
        }
        if self.exhaustive {
            if self.family != Family::Regular3 {
                return bad("exhaustive enumeration is only available for regular3".into());
            }
            if let Some(n) = self.n_list.iter().find(|&&n| n > ENUMERATION_LIMIT) {
                return bad(format!("exhaustive enumeration supports n <= {ENUMERATION_LIMIT}, got {n}"));
            }
        }
        self.run.validate()?;
        Ok(())
    }

    /// Instance list in output order; seeds come from a single running
    /// instance index over the whole suite.
    pub(crate) fn plan(&self) -> Result<Vec<InstancePlan>, ExperimentError> {
        let mut out = Vec::new();
        let mut index = 0u64;
        for &n in &self.n_list {
            if self.exhaustive {
                for (i, g) in connected_cubic_graphs(n)?.into_iter().enumerate() {
                    out.push(InstancePlan { graph_id: self.graph_id(n, i), n, seed: stream_seed(self.run.seed, index), graph: Some(g) });
                    index += 1;
                }
            } else {
                for i in 0..self.instances_per_n {
                    out.push(InstancePlan { graph_id: self.graph_id(n, i), n, seed: stream_seed(self.run.seed, index), graph: None });
                    index += 1;
                }
            }
        }
        Ok(out)
    }

    fn graph_id(&self, n: usize, i: usize) -> String {
        format!("{}-n{n:02}-{i:03}", self.family.name())
    }
}

fn default_snapshots(rounds: usize) -> Vec<usize> {
    DEFAULT_SNAPSHOTS.iter().copied().filter(|&p| p <= rounds).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_specs() {
        let g = graph_from_spec("regular3:10:7").unwrap().unwrap();
        assert_eq!((g.n(), g.m()), (10, 15));
        let g = graph_from_spec("bipartite:10:0.5:3").unwrap().unwrap();
        assert!(g.is_bipartite());
        assert_eq!(graph_from_spec("er:12:0.5:1").unwrap().unwrap().n(), 12);
        assert!(graph_from_spec("graphs/k4.txt").is_none());
        assert!(graph_from_spec("er:12:1").unwrap().is_err());
        assert!(graph_from_spec("regular3:x:1").unwrap().is_err());
    }

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = SuiteConfig::from_json(r#"{"family": "regular3", "n_list": [4, 6], "instances_per_n": 2}"#).unwrap();
        let spec = SuiteSpec::from_config(&cfg).unwrap();
        assert_eq!(spec.run.dt, 0.08);
        assert_eq!(spec.run.rounds, 10_000);
        assert_eq!(spec.snapshot_steps, vec![10, 100, 1_000, 10_000]);
        assert_eq!(spec.targets, vec![0.878, 0.9326]);
        assert_eq!(spec.oracle_cap, 20);
    }

    #[test]
    fn snapshots_are_clipped_to_rounds() {
        let cfg = SuiteConfig::from_json(
            r#"{"family": "er", "n_list": [5], "instances_per_n": 1, "rounds": 500, "snapshot_steps": [0, 600, 100, 10, 100]}"#,
        )
        .unwrap();
        let spec = SuiteSpec::from_config(&cfg).unwrap();
        assert_eq!(spec.family, Family::ErdosRenyi);
        assert_eq!(spec.snapshot_steps, vec![10, 100]);
    }

    #[test]
    fn rejects_bad_grids() {
        for json in [
            r#"{"family": "regular3", "n_list": [], "instances_per_n": 1}"#,
            r#"{"family": "regular3", "n_list": [5], "instances_per_n": 1}"#,
            r#"{"family": "bipartite", "n_list": [6], "instances_per_n": 0}"#,
            r#"{"family": "bipartite", "n_list": [6], "instances_per_n": 1, "targets": [1.2]}"#,
            r#"{"family": "er", "n_list": [6], "instances_per_n": 1, "exhaustive": true}"#,
            r#"{"family": "regular3", "n_list": [14], "instances_per_n": 1, "exhaustive": true}"#,
            r#"{"family": "er", "n_list": [6], "instances_per_n": 1, "dt": -1.0}"#,
        ] {
            let cfg = SuiteConfig::from_json(json).unwrap();
            assert!(SuiteSpec::from_config(&cfg).is_err(), "{json}");
        }
        assert!(SuiteConfig::from_json(r#"{"family": "regular3", "n_list": [4], "instances_per_n": 1, "bogus": 1}"#).is_err());
    }

    #[test]
    fn plan_uses_running_index() {
        let cfg = SuiteConfig::from_json(r#"{"family": "bipartite", "n_list": [4, 6], "instances_per_n": 2, "seed": 8}"#).unwrap();
        let plan = SuiteSpec::from_config(&cfg).unwrap().plan().unwrap();
        let seeds: Vec<u64> = plan.iter().map(|p| p.seed).collect();
        assert_eq!(seeds, vec![8, 9, 10, 11]);
        assert_eq!(plan[3].graph_id, "bipartite-n06-001");
    }

    #[test]
    fn exhaustive_plan_lists_all_classes() {
        let cfg = SuiteConfig::from_json(r#"{"family": "regular3", "n_list": [4, 6, 8], "instances_per_n": 1, "exhaustive": true}"#)
            .unwrap();
        let plan = SuiteSpec::from_config(&cfg).unwrap().plan().unwrap();
        assert_eq!(plan.len(), 1 + 2 + 5);
    }
}
