use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha1::{Digest, Sha1};

use super::config::InstancePlan;
use super::plot::{emit_plot, PlotKind, Series, SeriesStyle};
use super::{create_dir, io_err, temp_path, write_atomic, ExperimentError, Family, SuiteSpec};
use crate::dynamics::{Ansatz, DynamicsError, FeedbackSimulation, RunConfig, StepTrace};
use crate::graph::{brute_force_max_cut_capped, edge_coloring, Graph};
use crate::hamiltonian::MaxCutHamiltonian;

/// Exact header of every trace CSV.
pub const TRACE_HEADER: &str =
    "graph_id,n,m,step,t,beta,O,alpha,exp_hf,hf_over_m,lambda_lb,two_param_lb,true_ratio,violation";

/// One CSV row; `true_ratio` is an empty field when no optimum is known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub graph_id: String,
    pub n: usize,
    pub m: usize,
    pub step: usize,
    pub t: f64,
    pub beta: f64,
    #[serde(rename = "O")]
    pub o: f64,
    pub alpha: f64,
    pub exp_hf: f64,
    pub hf_over_m: f64,
    pub lambda_lb: f64,
    pub two_param_lb: f64,
    pub true_ratio: Option<f64>,
    pub violation: bool,
}

impl TraceRow {
    pub fn from_trace(graph_id: &str, n: usize, m: usize, tr: &StepTrace) -> Self {
        Self {
            graph_id: graph_id.to_string(),
            n,
            m,
            step: tr.step,
            t: tr.t,
            beta: tr.beta,
            o: tr.o,
            alpha: tr.alpha,
            exp_hf: tr.hf_exp,
            hf_over_m: tr.hf_over_m,
            lambda_lb: tr.lambda_lb,
            two_param_lb: tr.two_param_lb,
            true_ratio: tr.true_ratio,
            violation: tr.violation,
        }
    }
}

/// Parses a trace CSV written by this module.
pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>, ExperimentError> {
    let file = std::fs::File::open(path).map_err(io_err(path))?;
    let mut reader = csv::Reader::from_reader(std::io::BufReader::new(file));
    let header = reader.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != TRACE_HEADER {
        return Err(ExperimentError::InvalidSpec(format!("{}: unexpected trace header {header:?}", path.display())));
    }
    reader.deserialize().map(|r| r.map_err(ExperimentError::from)).collect()
}

/// Git blob hash of the graph's text form.
pub fn graph_hash(g: &Graph) -> String {
    let text = g.to_text();
    let mut hasher = Sha1::new();
    hasher.update(format!("blob {}\0", text.len()).as_bytes());
    hasher.update(text.as_bytes());
    format!("{:x}", hasher.finalize())
}

/// Labelled ansatz variant; light-cone suites run both coefficient modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunVariant {
    QaoaFeedback,
    LightConeFeedback,
    LightConeLiteral,
}

impl RunVariant {
    pub fn of(cfg: &RunConfig) -> Self {
        match (cfg.ansatz, cfg.lightcone_feedback) {
            (Ansatz::QaoaFeedback, _) => RunVariant::QaoaFeedback,
            (Ansatz::LightCone, true) => RunVariant::LightConeFeedback,
            (Ansatz::LightCone, false) => RunVariant::LightConeLiteral,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RunVariant::QaoaFeedback => "qaoa_feedback",
            RunVariant::LightConeFeedback => "light_cone_feedback",
            RunVariant::LightConeLiteral => "light_cone_literal",
        }
    }

    pub fn apply(self, cfg: &RunConfig) -> RunConfig {
        let mut cfg = cfg.clone();
        match self {
            RunVariant::QaoaFeedback => cfg.ansatz = Ansatz::QaoaFeedback,
            RunVariant::LightConeFeedback => {
                cfg.ansatz = Ansatz::LightCone;
                cfg.lightcone_feedback = true;
            }
            RunVariant::LightConeLiteral => {
                cfg.ansatz = Ansatz::LightCone;
                cfg.lightcone_feedback = false;
            }
        }
        cfg
    }

    fn for_suite(cfg: &RunConfig) -> Vec<Self> {
        match cfg.ansatz {
            Ansatz::QaoaFeedback => vec![RunVariant::QaoaFeedback],
            Ansatz::LightCone => vec![RunVariant::LightConeFeedback, RunVariant::LightConeLiteral],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalMetrics {
    pub step: usize,
    pub t: f64,
    pub exp_hf: f64,
    pub hf_over_m: f64,
    pub lambda_lb: f64,
    pub two_param_lb: f64,
    pub true_ratio: Option<f64>,
    pub lambda: f64,
    pub x: f64,
    pub y: f64,
    pub one_param_violations: usize,
    pub two_param_violations: usize,
    pub two_param_saturated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRow {
    pub step: usize,
    pub hf_over_m: f64,
    pub lambda_lb: f64,
    pub two_param_lb: f64,
    pub true_ratio: Option<f64>,
}

/// Trapezoid-rule integration of the continuous certificates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapezoidSummary {
    pub lambda_lb: f64,
    pub two_param_lb: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub graph_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    pub variant: RunVariant,
    pub n: usize,
    pub m: usize,
    pub graph_hash: String,
    pub edges: Vec<(usize, usize)>,
    /// Depth of one phase-separation layer after edge coloring.
    pub phase_layers: usize,
    pub optimum: Option<usize>,
    pub maximizer: Option<u64>,
    #[serde(rename = "final")]
    pub final_metrics: FinalMetrics,
    /// Smallest `true_ratio - lambda_lb` over all steps.
    pub min_lambda_margin: Option<f64>,
    /// Smallest `true_ratio - two_param_lb` over all steps.
    pub min_two_param_margin: Option<f64>,
    pub snapshots: Vec<SnapshotRow>,
    pub trapezoid: TrapezoidSummary,
    pub trace_file: String,
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedInstance {
    pub graph_id: String,
    pub variant: RunVariant,
    pub n: usize,
    pub reason: String,
}

/// Per-(variant, n, step) means of the four ratio quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub family: Family,
    pub variant: RunVariant,
    pub n: usize,
    pub step: usize,
    pub instances: usize,
    pub mean_hf_over_m: f64,
    pub mean_lambda_lb: f64,
    pub mean_two_param_lb: f64,
    pub mean_true_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub family: Family,
    pub n_list: Vec<usize>,
    pub config: RunConfig,
    pub instances: Vec<InstanceSummary>,
    pub skipped: Vec<SkippedInstance>,
    pub aggregates: Vec<AggregateRow>,
}

fn file_stem(graph_id: &str, variant: RunVariant) -> String {
    format!("{graph_id}_{}", variant.label())
}

/// Runs one graph end-to-end and writes `traces/<id>_<variant>.csv` and
/// `summaries/<id>_<variant>.json` under `out_dir`.
pub fn run_single(
    g: &Graph,
    graph_id: &str,
    family: Option<Family>,
    cfg: &RunConfig,
    oracle_cap: usize,
    snapshot_steps: &[usize],
    out_dir: &Path,
) -> Result<InstanceSummary, ExperimentError> {
    let variant = RunVariant::of(cfg);
    let h = MaxCutHamiltonian::new(g, cfg.state_cap)?;
    let oracle = if g.n() <= oracle_cap { Some(brute_force_max_cut_capped(g, oracle_cap)?) } else { None };
    if cfg.ansatz == Ansatz::LightCone && !g.is_connected() {
        return Err(DynamicsError::Disconnected.into());
    }
    let mut sim = FeedbackSimulation::new(&h, cfg, oracle.as_ref())?;

    let traces = out_dir.join("traces");
    let summaries = out_dir.join("summaries");
    create_dir(&traces)?;
    create_dir(&summaries)?;
    let stem = file_stem(graph_id, variant);
    let trace_path = traces.join(format!("{stem}.csv"));
    let tmp = temp_path(&trace_path);
    let file = std::fs::File::create(&tmp).map_err(io_err(&tmp))?;
    let mut writer = csv::Writer::from_writer(std::io::BufWriter::new(file));

    let (n, m) = (g.n(), g.m());
    let mut last = None;
    let mut min_lambda_margin: Option<f64> = None;
    let mut min_two_margin: Option<f64> = None;
    let mut snapshots = Vec::new();
    for _ in 0..cfg.rounds {
        let tr = sim.advance()?;
        writer.serialize(TraceRow::from_trace(graph_id, n, m, &tr))?;
        if let Some(r) = tr.true_ratio {
            min_lambda_margin = Some(min_lambda_margin.map_or(r - tr.lambda_lb, |v| v.min(r - tr.lambda_lb)));
            min_two_margin = Some(min_two_margin.map_or(r - tr.two_param_lb, |v| v.min(r - tr.two_param_lb)));
        }
        if snapshot_steps.contains(&tr.step) {
            snapshots.push(SnapshotRow {
                step: tr.step,
                hf_over_m: tr.hf_over_m,
                lambda_lb: tr.lambda_lb,
                two_param_lb: tr.two_param_lb,
                true_ratio: tr.true_ratio,
            });
        }
        last = Some(tr);
    }
    let mut inner = writer.into_inner().map_err(|e| ExperimentError::Io { path: tmp.clone(), source: e.into_error() })?;
    inner.flush().map_err(io_err(&tmp))?;
    drop(inner);
    std::fs::rename(&tmp, &trace_path).map_err(io_err(&trace_path))?;

    let last = last.expect("rounds >= 1 is validated");
    let one = sim.one_param();
    let two = sim.two_param();
    let summary = InstanceSummary {
        graph_id: graph_id.to_string(),
        family,
        variant,
        n,
        m,
        graph_hash: graph_hash(g),
        edges: g.edges().to_vec(),
        phase_layers: edge_coloring(g).num_layers(),
        optimum: oracle.as_ref().map(|o| o.optimum),
        maximizer: oracle.as_ref().map(|o| o.first_maximizer()),
        final_metrics: FinalMetrics {
            step: last.step,
            t: last.t,
            exp_hf: last.hf_exp,
            hf_over_m: last.hf_over_m,
            lambda_lb: last.lambda_lb,
            two_param_lb: last.two_param_lb,
            true_ratio: last.true_ratio,
            lambda: one.lambda(),
            x: two.x(),
            y: two.y(),
            one_param_violations: one.violations(),
            two_param_violations: two.violations(),
            two_param_saturated: two.is_saturated(),
        },
        min_lambda_margin,
        min_two_param_margin: min_two_margin,
        snapshots,
        trapezoid: TrapezoidSummary {
            lambda_lb: sim.trapezoid().lambda_bound(),
            two_param_lb: sim.trapezoid().two_param_bound(),
        },
        trace_file: format!("traces/{stem}.csv"),
        config: cfg.clone(),
    };
    let json = serde_json::to_string_pretty(&summary)?;
    write_atomic(&summaries.join(format!("{stem}.json")), json.as_bytes())?;
    Ok(summary)
}

enum Outcome {
    Done(Box<InstanceSummary>),
    Skipped(SkippedInstance),
}

fn run_planned(spec: &SuiteSpec, plan: &InstancePlan, variant: RunVariant, out_dir: &Path) -> Result<Outcome, ExperimentError> {
    let cfg = variant.apply(&spec.run);
    if plan.n > cfg.state_cap {
        return Ok(Outcome::Skipped(SkippedInstance {
            graph_id: plan.graph_id.clone(),
            variant,
            n: plan.n,
            reason: format!("n = {} exceeds state cap {}", plan.n, cfg.state_cap),
        }));
    }
    let g = match &plan.graph {
        Some(g) => g.clone(),
        None => spec.family.generate(plan.n, spec.edge_probability, plan.seed)?,
    };
    let summary = run_single(&g, &plan.graph_id, Some(spec.family), &cfg, spec.oracle_cap, &spec.snapshot_steps, out_dir)?;
    Ok(Outcome::Done(Box::new(summary)))
}

/// Runs every instance of `spec`, writing traces, summaries, aggregates and
/// bar plots under `out_dir`.
pub fn run_suite(spec: &SuiteSpec, out_dir: &Path) -> Result<SuiteReport, ExperimentError> {
    spec.validate()?;
    create_dir(out_dir)?;
    let plan = spec.plan()?;
    let jobs: Vec<(&InstancePlan, RunVariant)> =
        plan.iter().flat_map(|p| RunVariant::for_suite(&spec.run).into_iter().map(move |v| (p, v))).collect();
    let outcomes: Vec<Outcome> =
        jobs.par_iter().map(|(p, v)| run_planned(spec, p, *v, out_dir)).collect::<Result<_, _>>()?;

    let mut instances = Vec::new();
    let mut skipped = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Done(s) => instances.push(*s),
            Outcome::Skipped(s) => skipped.push(s),
        }
    }
    let aggregates = aggregate(spec.family, &instances, &spec.snapshot_steps);

    write_aggregates(&out_dir.join("aggregate.csv"), &aggregates)?;
    write_atomic(&out_dir.join("skipped.json"), serde_json::to_string_pretty(&skipped)?.as_bytes())?;
    let report = SuiteReport {
        family: spec.family,
        n_list: spec.n_list.clone(),
        config: spec.run.clone(),
        instances,
        skipped,
        aggregates,
    };
    write_atomic(&out_dir.join("suite.json"), serde_json::to_string_pretty(&report)?.as_bytes())?;
    emit_bar_plots(&report.aggregates, &out_dir.join("plots"))?;
    Ok(report)
}

fn aggregate(family: Family, instances: &[InstanceSummary], steps: &[usize]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<(RunVariant, usize), Vec<&InstanceSummary>> = BTreeMap::new();
    for s in instances {
        groups.entry((s.variant, s.n)).or_default().push(s);
    }
    let mut rows = Vec::new();
    for ((variant, n), members) in groups {
        for &step in steps {
            let snaps: Vec<&SnapshotRow> =
                members.iter().filter_map(|s| s.snapshots.iter().find(|r| r.step == step)).collect();
            if snaps.is_empty() {
                continue;
            }
            let k = snaps.len() as f64;
            let mean = |f: fn(&SnapshotRow) -> f64| snaps.iter().map(|r| f(r)).sum::<f64>() / k;
            let ratios: Vec<f64> = snaps.iter().filter_map(|r| r.true_ratio).collect();
            rows.push(AggregateRow {
                family,
                variant,
                n,
                step,
                instances: snaps.len(),
                mean_hf_over_m: mean(|r| r.hf_over_m),
                mean_lambda_lb: mean(|r| r.lambda_lb),
                mean_two_param_lb: mean(|r| r.two_param_lb),
                mean_true_ratio: (ratios.len() == snaps.len()).then(|| ratios.iter().sum::<f64>() / k),
            });
        }
    }
    rows
}

fn write_aggregates(path: &Path, rows: &[AggregateRow]) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record([
            "family",
            "variant",
            "n",
            "step",
            "instances",
            "mean_hf_over_m",
            "mean_lambda_lb",
            "mean_two_param_lb",
            "mean_true_ratio",
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| ExperimentError::Io { path: path.into(), source: e.into_error() })?;
    write_atomic(path, &bytes)
}

fn emit_bar_plots(rows: &[AggregateRow], dir: &Path) -> Result<(), ExperimentError> {
    let mut groups: BTreeMap<(RunVariant, usize), Vec<&AggregateRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.variant, r.n)).or_default().push(r);
    }
    if groups.is_empty() {
        return Ok(());
    }
    create_dir(dir)?;
    for ((variant, n), rs) in groups {
        let pick = |label: &str, f: &dyn Fn(&AggregateRow) -> Option<f64>| Series {
            label: label.to_string(),
            style: SeriesStyle::Bars,
            points: rs.iter().filter_map(|r| f(r).map(|v| (r.step as f64, v))).collect(),
        };
        let mut series = vec![
            pick("<H_f>/m", &|r| Some(r.mean_hf_over_m)),
            pick("lambda", &|r| Some(r.mean_lambda_lb)),
            pick("(y - y0)/x", &|r| Some(r.mean_two_param_lb)),
            pick("true ratio", &|r| r.mean_true_ratio),
        ];
        series.retain(|s| !s.points.is_empty());
        let path: PathBuf = dir.join(format!("ratio_bars_{}_n{n:02}.svg", variant.label()));
        emit_plot(&series, PlotKind::RatioBars, &path)?;
    }
    Ok(())
}
