//! The measurement-feedback evolution loop.
//!
//! Starting from `|+>^n`, each step `p` reads the feedback observable
//! measured at the end of step `p - 1`, sets the mixer strength from it,
//! applies one Trotter step and feeds the drive into both certificates.
//!
//! Two ansatzes are supported:
//!
//! - QAOA feedback: `exp(-i Δt H_f / m)` as diagonal phases, then
//!   `Π_j exp(-i α Δt X_j)` with `α = β(t) O(t)` and
//!   `O = <i[Σ X_j, H_f]>`.
//! - Light cone: no phase layer; `exp(-i θ Y_j Z_k)` for every edge oriented
//!   along a breadth-first order, applied sequentially in that order, with
//!   `θ = β(t) O(t) Δt` (or `β(t) Δt` with feedback disabled) and
//!   `O = <i[Σ Y_j Z_k, H_f]>`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{CutOracleResult, Graph};
use crate::hamiltonian::{error_constants, HamiltonianError, LayerTerm, MaxCutHamiltonian};
use crate::lyapunov::{max_step_size, LyapunovError, OneParamTracker, TrapezoidCertificate, TwoParamTracker};
use crate::quantum::{apply_rx, apply_ryz, feedback_observable, ObservableTerms, QuantumError, StateVector};
use crate::DEFAULT_STATE_CAP;

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("root vertex {root} out of range for {n} vertices")]
    BadRoot { root: usize, n: usize },
    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Lyapunov(#[from] LyapunovError),
}

// ---------------------------------------------------------------------------
// β schedule
// ---------------------------------------------------------------------------

/// `β(t) = c (floor (1 - exp(-(rate / R)(Δt R - t))) + offset)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaSpec {
    pub c: f64,
    pub floor: f64,
    pub rate: f64,
    /// Constant weight; defaults to `floor` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
}

impl Default for BetaSpec {
    fn default() -> Self {
        Self { c: 0.04, floor: 0.5, rate: 2.0, offset: None }
    }
}

impl BetaSpec {
    pub fn value(&self, t: f64, rounds: usize, dt: f64) -> f64 {
        let r = rounds as f64;
        let decay = 1.0 - (-(self.rate / r) * (dt * r - t)).exp();
        self.c * (self.floor * decay + self.offset.unwrap_or(self.floor))
    }
}

/// The default schedule `0.04 (0.5 (1 - e^{-(2/R)(Δt R - t)}) + 0.5)`.
pub fn beta_schedule(t: f64, rounds: usize, dt: f64) -> f64 {
    BetaSpec::default().value(t, rounds, dt)
}

// ---------------------------------------------------------------------------
// Breadth-first edge orientation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BfsOrder {
    /// `seq[v]` is the discovery index of vertex `v`.
    pub seq: Vec<usize>,
    /// Edges `(j, k)` with `seq[j] < seq[k]`, sorted by `(seq[j], seq[k])`.
    pub oriented_edges: Vec<(usize, usize)>,
}

/// BFS from `root`, visiting neighbors in ascending index.
pub fn bfs_order(g: &Graph, root: usize) -> Result<BfsOrder, DynamicsError> {
    let n = g.n();
    if root >= n {
        return Err(DynamicsError::BadRoot { root, n });
    }
    let adj = g.adjacency();
    let mut seq = vec![usize::MAX; n];
    seq[root] = 0;
    let mut next = 1;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if seq[w] == usize::MAX {
                seq[w] = next;
                next += 1;
                queue.push_back(w);
            }
        }
    }
    if next != n {
        return Err(DynamicsError::Disconnected);
    }
    let mut oriented_edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(u, v)| if seq[u] < seq[v] { (u, v) } else { (v, u) })
        .collect();
    oriented_edges.sort_by_key(|&(j, k)| (seq[j], seq[k]));
    Ok(BfsOrder { seq, oriented_edges })
}

// ---------------------------------------------------------------------------
// Configuration and traces
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ansatz {
    #[serde(alias = "qaoa")]
    QaoaFeedback,
    #[serde(alias = "lightcone")]
    LightCone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub ansatz: Ansatz,
    pub dt: f64,
    pub rounds: usize,
    pub beta: BetaSpec,
    pub epsilon: f64,
    /// Use the certified step bound (capped at `dt`) instead of fixed `dt`.
    pub adaptive_dt: bool,
    /// Light cone only: scale the mixer by the measured observable.
    pub lightcone_feedback: bool,
    pub seed: u64,
    pub state_cap: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            ansatz: Ansatz::QaoaFeedback,
            dt: 0.08,
            rounds: 10_000,
            beta: BetaSpec::default(),
            epsilon: 1e-3,
            adaptive_dt: false,
            lightcone_feedback: true,
            seed: 0,
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

impl RunConfig {
    pub fn light_cone() -> Self {
        Self { ansatz: Ansatz::LightCone, rounds: 30, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(DynamicsError::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if self.rounds == 0 {
            return Err(DynamicsError::InvalidConfig("rounds must be at least 1".into()));
        }
        if self.adaptive_dt && !(self.epsilon > 0.0) {
            return Err(DynamicsError::InvalidConfig(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        Ok(())
    }
}

/// Per-step record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepTrace {
    pub step: usize,
    pub t: f64,
    pub beta: f64,
    #[serde(rename = "O")]
    pub o: f64,
    pub alpha: f64,
    pub hf_exp: f64,
    pub hf_over_m: f64,
    pub lambda_lb: f64,
    pub two_param_lb: f64,
    pub true_ratio: Option<f64>,
    pub violation: bool,
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

enum Layer {
    Qaoa,
    LightCone { oriented: Vec<(usize, usize)> },
}

/// A feedback run advanced one step at a time.
pub struct FeedbackSimulation<'h> {
    h: &'h MaxCutHamiltonian,
    cfg: RunConfig,
    optimum: Option<f64>,
    layer: Layer,
    mixer: ObservableTerms,
    state: StateVector,
    one: OneParamTracker,
    two: TwoParamTracker,
    trapezoid: TrapezoidCertificate,
    hf_exp: f64,
    observable: f64,
    t: f64,
    step: usize,
    last_dt: f64,
}

impl<'h> FeedbackSimulation<'h> {
    pub fn new(h: &'h MaxCutHamiltonian, cfg: &RunConfig, oracle: Option<&CutOracleResult>) -> Result<Self, DynamicsError> {
        cfg.validate()?;
        let n = h.n();
        if h.m() == 0 {
            return Err(DynamicsError::InvalidConfig("graph has no edges".into()));
        }
        let state = StateVector::plus_capped(n, cfg.state_cap)?;
        let (layer, mixer) = match cfg.ansatz {
            Ansatz::QaoaFeedback => (Layer::Qaoa, ObservableTerms::x_mixer(n)),
            Ansatz::LightCone => {
                let order = bfs_order(h.graph(), 0)?;
                let mixer = ObservableTerms::yz_mixer(&order.oriented_edges)?;
                (Layer::LightCone { oriented: order.oriented_edges }, mixer)
            }
        };
        let hf_exp = h.expectation(&state)?;
        let observable = feedback_observable(&state, &mixer, h.diag())?;
        let mut sim = Self {
            h,
            cfg: cfg.clone(),
            optimum: oracle.map(|o| o.optimum as f64),
            layer,
            mixer,
            state,
            one: OneParamTracker::default(),
            two: TwoParamTracker::default(),
            trapezoid: TrapezoidCertificate::new(1.0, 1.0),
            hf_exp,
            observable,
            t: 0.0,
            step: 0,
            last_dt: 0.0,
        };
        let beta0 = sim.beta_at(0.0);
        let drive0 = sim.coefficient(beta0) * observable;
        let (q1, q2) = sim.q_values();
        sim.trapezoid.sample(0.0, drive0, q1, q2);
        Ok(sim)
    }

    fn beta_at(&self, t: f64) -> f64 {
        self.cfg.beta.value(t, self.cfg.rounds, self.cfg.dt)
    }

    /// Mixer coefficient for the current observable.
    fn coefficient(&self, beta: f64) -> f64 {
        match (&self.layer, self.cfg.lightcone_feedback) {
            (Layer::LightCone { .. }, false) => beta,
            _ => beta * self.observable,
        }
    }

    fn q_values(&self) -> (f64, f64) {
        let m = self.h.m() as f64;
        (m, m - self.hf_exp)
    }

    fn step_size(&self, coeff: f64, drive: f64) -> Result<f64, DynamicsError> {
        if !self.cfg.adaptive_dt {
            return Ok(self.cfg.dt);
        }
        let bounds = self.bounds_for(coeff);
        let dt_one = max_step_size(&bounds, self.cfg.epsilon, 1.0)?.min(self.cfg.dt);
        // x(t_{j+1}) grows with the step while the admissible step shrinks
        // with x, so the bound at the largest candidate x is admissible.
        let (_, q2) = self.q_values();
        let x_next = if self.two.is_saturated() || q2 <= 0.0 {
            self.two.x()
        } else {
            self.two.peek_x(drive, dt_one, q2, 1.0, 1.0).unwrap_or(self.two.x())
        };
        let dt_two = max_step_size(&bounds, self.cfg.epsilon, x_next)?;
        Ok(dt_one.min(dt_two))
    }

    /// Error constants of the current step.
    pub fn bounds_for(&self, coeff: f64) -> crate::hamiltonian::NormBounds {
        match &self.layer {
            Layer::Qaoa => {
                let phase = [LayerTerm::new(1.0 / self.h.m() as f64, self.h.norm())];
                let mixer = [LayerTerm::pauli_sum(coeff, &self.mixer)];
                error_constants(self.h, &phase, &mixer)
            }
            Layer::LightCone { oriented } => {
                let mixer: Vec<LayerTerm> = oriented.iter().map(|_| LayerTerm::new(coeff, 1.0)).collect();
                error_constants(self.h, &[], &mixer)
            }
        }
    }

    /// Advances one step and returns its trace.
    pub fn advance(&mut self) -> Result<StepTrace, DynamicsError> {
        let beta = self.beta_at(self.t);
        let o = self.observable;
        let coeff = self.coefficient(beta);
        let drive = coeff * o;
        let dt = self.step_size(coeff, drive)?;
        let (q1, q2) = self.q_values();

        let one = self.one.step_with_drive(drive, dt, q1)?;
        if !self.two.is_saturated() {
            if q2 <= 0.0 {
                self.two.freeze();
            } else {
                match self.two.step_with_drive(drive, dt, q2, 1.0, 1.0) {
                    Ok(_) => {}
                    Err(LyapunovError::DenominatorCollapse { .. }) => self.two.freeze(),
                    Err(e) => return Err(e.into()),
                }
            }
        }

        match &self.layer {
            Layer::Qaoa => {
                self.h.evolve(&mut self.state, dt / self.h.m() as f64)?;
                for q in 0..self.h.n() {
                    apply_rx(&mut self.state, q, coeff * dt)?;
                }
            }
            Layer::LightCone { oriented } => {
                for &(j, k) in oriented {
                    apply_ryz(&mut self.state, j, k, coeff * dt)?;
                }
            }
        }

        self.step += 1;
        self.t = if self.cfg.adaptive_dt { self.t + dt } else { self.step as f64 * self.cfg.dt };
        self.last_dt = dt;
        self.hf_exp = self.h.expectation(&self.state)?;
        self.observable = feedback_observable(&self.state, &self.mixer, self.h.diag())?;

        let next_drive = self.coefficient(self.beta_at(self.t)) * self.observable;
        let (q1n, q2n) = self.q_values();
        self.trapezoid.sample(self.t, next_drive, q1n, q2n);

        let m = self.h.m() as f64;
        Ok(StepTrace {
            step: self.step,
            t: self.t,
            beta,
            o,
            alpha: coeff,
            hf_exp: self.hf_exp,
            hf_over_m: self.hf_exp / m,
            lambda_lb: self.one.lower_bound(),
            two_param_lb: self.two.lower_bound(),
            true_ratio: self.optimum.map(|opt| self.hf_exp / opt),
            violation: one.violation,
        })
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn hf_exp(&self) -> f64 {
        self.hf_exp
    }

    /// Feedback observable at the current state.
    pub fn observable(&self) -> f64 {
        self.observable
    }

    pub fn one_param(&self) -> &OneParamTracker {
        &self.one
    }

    pub fn two_param(&self) -> &TwoParamTracker {
        &self.two
    }

    pub fn trapezoid(&self) -> &TrapezoidCertificate {
        &self.trapezoid
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn last_dt(&self) -> f64 {
        self.last_dt
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }
}

fn run_all(h: &MaxCutHamiltonian, cfg: &RunConfig, oracle: Option<&CutOracleResult>) -> Result<Vec<StepTrace>, DynamicsError> {
    let mut sim = FeedbackSimulation::new(h, cfg, oracle)?;
    (0..cfg.rounds).map(|_| sim.advance()).collect()
}

/// Runs the QAOA-feedback ansatz for `cfg.rounds` steps.
pub fn run_qaoa_feedback(
    h: &MaxCutHamiltonian,
    cfg: &RunConfig,
    oracle: Option<&CutOracleResult>,
) -> Result<Vec<StepTrace>, DynamicsError> {
    let cfg = RunConfig { ansatz: Ansatz::QaoaFeedback, ..cfg.clone() };
    run_all(h, &cfg, oracle)
}

/// Runs the light-cone ansatz for `cfg.rounds` steps.
pub fn run_light_cone(
    h: &MaxCutHamiltonian,
    cfg: &RunConfig,
    oracle: Option<&CutOracleResult>,
) -> Result<Vec<StepTrace>, DynamicsError> {
    if !h.graph().is_connected() {
        return Err(DynamicsError::Disconnected);
    }
    let cfg = RunConfig { ansatz: Ansatz::LightCone, ..cfg.clone() };
    run_all(h, &cfg, oracle)
}

/// Dispatches on `cfg.ansatz`.
pub fn run(h: &MaxCutHamiltonian, cfg: &RunConfig, oracle: Option<&CutOracleResult>) -> Result<Vec<StepTrace>, DynamicsError> {
    match cfg.ansatz {
        Ansatz::QaoaFeedback => run_qaoa_feedback(h, cfg, oracle),
        Ansatz::LightCone => run_light_cone(h, cfg, oracle),
    }
}
