use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::plot::{emit_plot, loglog_series, PlotKind};
use super::stats::{fit_loglog_all, FitResult};
use super::{create_dir, write_atomic, ExperimentError, SuiteSpec};
use crate::dynamics::FeedbackSimulation;
use crate::graph::brute_force_max_cut_capped;
use crate::hamiltonian::MaxCutHamiltonian;

/// Rounds needed by one instance to reach one target; `None` if the run
/// ended first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub graph_id: String,
    pub n: usize,
    pub target: f64,
    pub rounds_to_target: Option<usize>,
}

impl ConvergenceRecord {
    pub fn reached(&self) -> bool {
        self.rounds_to_target.is_some()
    }
}

/// First step at which the true ratio reaches each target.
///
/// Runs stop as soon as every target is reached. Records come in suite
/// order, then target order.
pub fn convergence_experiment(spec: &SuiteSpec, targets: &[f64]) -> Result<Vec<ConvergenceRecord>, ExperimentError> {
    spec.validate()?;
    if targets.is_empty() {
        return Err(ExperimentError::Empty("no convergence targets"));
    }
    if let Some(t) = targets.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(ExperimentError::InvalidSpec(format!("target {t} must be positive")));
    }
    let plan = spec.plan()?;
    if let Some(p) = plan.iter().find(|p| p.n > spec.oracle_cap) {
        return Err(ExperimentError::MissingOracle { graph_id: p.graph_id.clone(), n: p.n, cap: spec.oracle_cap });
    }
    let per_instance: Vec<Vec<ConvergenceRecord>> = plan
        .par_iter()
        .map(|p| {
            let g = match &p.graph {
                Some(g) => g.clone(),
                None => spec.family.generate(p.n, spec.edge_probability, p.seed)?,
            };
            let h = MaxCutHamiltonian::new(&g, spec.run.state_cap)?;
            let oracle = brute_force_max_cut_capped(&g, spec.oracle_cap)?;
            let mut sim = FeedbackSimulation::new(&h, &spec.run, Some(&oracle))?;
            let mut hit: Vec<Option<usize>> = vec![None; targets.len()];
            for _ in 0..spec.run.rounds {
                let tr = sim.advance()?;
                let ratio = tr.true_ratio.expect("oracle supplied");
                for (slot, &t) in hit.iter_mut().zip(targets) {
                    if slot.is_none() && ratio >= t {
                        *slot = Some(tr.step);
                    }
                }
                if hit.iter().all(Option::is_some) {
                    break;
                }
            }
            Ok(targets
                .iter()
                .zip(hit)
                .map(|(&target, rounds)| ConvergenceRecord { graph_id: p.graph_id.clone(), n: p.n, target, rounds_to_target: rounds })
                .collect())
        })
        .collect::<Result<_, ExperimentError>>()?;
    Ok(per_instance.into_iter().flatten().collect())
}

/// Convergence records plus the fits that could be computed per target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub records: Vec<ConvergenceRecord>,
    pub fits: Vec<FitResult>,
    /// Targets whose fits failed, with the reason.
    pub fit_errors: Vec<(f64, String)>,
}

/// Writes `convergence.csv`, `fits.json` and one log-log plot per target.
pub fn write_convergence(records: &[ConvergenceRecord], out_dir: &Path) -> Result<ConvergenceReport, ExperimentError> {
    create_dir(out_dir)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["graph_id", "n", "target", "rounds_to_target"])?;
    for r in records {
        let rounds = r.rounds_to_target.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([r.graph_id.as_str(), &r.n.to_string(), &r.target.to_string(), &rounds])?;
    }
    let path = out_dir.join("convergence.csv");
    let bytes = w.into_inner().map_err(|e| ExperimentError::Io { path: path.clone(), source: e.into_error() })?;
    write_atomic(&path, &bytes)?;

    let mut targets: Vec<f64> = records.iter().map(|r| r.target).collect();
    targets.sort_by(f64::total_cmp);
    targets.dedup();

    let mut fits = Vec::new();
    let mut fit_errors = Vec::new();
    for &t in &targets {
        let subset: Vec<ConvergenceRecord> = records.iter().filter(|r| r.target == t).cloned().collect();
        match fit_loglog_all(&subset) {
            Ok(fs) => {
                let shown: Vec<FitResult> = fs.iter().take(2).cloned().collect();
                emit_plot(&loglog_series(&subset, &shown), PlotKind::LogLogScatter, &out_dir.join(format!("loglog_{t}.svg")))?;
                fits.extend(fs);
            }
            Err(e) => fit_errors.push((t, e.to_string())),
        }
    }
    let report = ConvergenceReport { records: records.to_vec(), fits, fit_errors };
    write_atomic(&out_dir.join("fits.json"), serde_json::to_string_pretty(&report)?.as_bytes())?;
    Ok(report)
}
