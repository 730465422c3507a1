use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use lyapunov_maxcut::dynamics::{Ansatz, RunConfig};
use lyapunov_maxcut::experiments::{
    convergence_experiment, graph_from_spec, run_single, run_suite, write_convergence, ExperimentError, Family, SuiteSpec,
    DEFAULT_ORACLE_CAP, DEFAULT_SNAPSHOTS,
};
use lyapunov_maxcut::graph::{brute_force_max_cut, parse_graph, Graph};

#[derive(Parser)]
#[command(name = "lyapunov-maxcut", version, about = "Feedback quantum optimization for Max-Cut with certified ratio bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnsatzArg {
    Qaoa,
    Lightcone,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Regular3,
    Er,
    Bipartite,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Regular3 => Family::Regular3,
            FamilyArg::Er => Family::ErdosRenyi,
            FamilyArg::Bipartite => Family::Bipartite,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one graph and write its trace and summary.
    Run {
        /// Graph file, or a spec such as `regular3:10:7` or `er:12:0.5:1`.
        #[arg(long)]
        graph: String,
        #[arg(long, value_enum, default_value = "qaoa")]
        ansatz: AnsatzArg,
        #[arg(long, default_value_t = 0.08)]
        dt: f64,
        /// Defaults to 10000 for qaoa and 30 for lightcone.
        #[arg(long)]
        rounds: Option<usize>,
        /// Use the certified step-size bound (capped at --dt).
        #[arg(long)]
        adaptive: bool,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        /// Light cone: drop the measured observable from the rotation angle.
        #[arg(long)]
        no_lightcone_feedback: bool,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        oracle_cap: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a suite described by a JSON config.
    Suite {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rounds needed to reach each target ratio, with log-log fits.
    Convergence {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated; defaults to the config's targets.
        #[arg(long, value_delimiter = ',')]
        targets: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the exact optimum and one maximizer.
    Oracle {
        #[arg(long)]
        graph: String,
    },
    /// Sample a graph and write it (JSON if the file ends in .json).
    Gen {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_graph(arg: &str) -> Result<(Graph, String), ExperimentError> {
    if let Some(g) = graph_from_spec(arg) {
        return Ok((g?, arg.replace([':', '.'], "-")));
    }
    let path = Path::new(arg);
    let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io { path: path.into(), source })?;
    let (g, _) = parse_graph(&text)?;
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "graph".into());
    Ok((g, id))
}

fn execute(cmd: Command) -> Result<(), ExperimentError> {
    match cmd {
        Command::Run { graph, ansatz, dt, rounds, adaptive, epsilon, no_lightcone_feedback, oracle_cap, out } => {
            let (g, id) = load_graph(&graph)?;
            let base = match ansatz {
                AnsatzArg::Qaoa => RunConfig::default(),
                AnsatzArg::Lightcone => RunConfig::light_cone(),
            };
            let cfg = RunConfig {
                dt,
                rounds: rounds.unwrap_or(base.rounds),
                adaptive_dt: adaptive,
                epsilon,
                lightcone_feedback: !no_lightcone_feedback,
                ..base
            };
            let snapshots: Vec<usize> = DEFAULT_SNAPSHOTS.iter().copied().filter(|&s| s <= cfg.rounds).collect();
            let s = run_single(&g, &id, None, &cfg, oracle_cap, &snapshots, &out)?;
            let f = &s.final_metrics;
            let ansatz_name = if cfg.ansatz == Ansatz::QaoaFeedback { "qaoa" } else { "lightcone" };
            println!("{id}: n={} m={} ansatz={ansatz_name} steps={}", s.n, s.m, f.step);
            println!("  <H_f>/m       {:.6}", f.hf_over_m);
            println!("  lambda bound  {:.6}", f.lambda_lb);
            println!("  two-param     {:.6}", f.two_param_lb);
            match f.true_ratio {
                Some(r) => println!("  true ratio    {r:.6}"),
                None => println!("  true ratio    (n above oracle cap)"),
            }
            println!("  trace         {}", out.join(&s.trace_file).display());
        }
        Command::Suite { config, out } => {
            let spec = SuiteSpec::load(&config)?;
            let report = run_suite(&spec, &out)?;
            println!("{} runs, {} skipped -> {}", report.instances.len(), report.skipped.len(), out.display());
            for s in &report.skipped {
                eprintln!("skipped {}: {}", s.graph_id, s.reason);
            }
        }
        Command::Convergence { config, targets, out } => {
            let spec = SuiteSpec::load(&config)?;
            let targets = if targets.is_empty() { spec.targets.clone() } else { targets };
            let records = convergence_experiment(&spec, &targets)?;
            let report = write_convergence(&records, &out)?;
            for fit in &report.fits {
                println!("target {} {:?}: slope {:.4} ({} points, {} not reached)", fit.target, fit.which, fit.slope, fit.points_used, fit.excluded_not_reached);
            }
            for (t, e) in &report.fit_errors {
                eprintln!("target {t}: no fit ({e})");
            }
        }
        Command::Oracle { graph } => {
            let (g, _) = load_graph(&graph)?;
            let res = brute_force_max_cut(&g)?;
            let x = res.first_maximizer();
            let side: Vec<String> = (0..g.n()).filter(|&v| x >> v & 1 == 1).map(|v| v.to_string()).collect();
            println!("optimum {}", res.optimum);
            println!("maximizer {x:0width$b} (vertices on side 1: {})", side.join(" "), width = g.n());
        }
        Command::Gen { family, n, p, seed, out } => {
            let g = Family::from(family).generate(n, p, seed)?;
            let text = if out.extension().is_some_and(|e| e == "json") { g.to_json() + "\n" } else { g.to_text() };
            std::fs::write(&out, text).map_err(|source| ExperimentError::Io { path: out.clone(), source })?;
            println!("wrote {} (n={}, m={})", out.display(), g.n(), g.m());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
