//! Approximation-ratio certificates.
//!
//! Both trackers consume, per step, the feedback drive `Σ_k α_k O_k` (with
//! `α_k = β_k O_k` this is `Σ β_k O_k²`) and an upper bound `<Q>` on the
//! unknown optimum, and maintain a running lower bound on
//! `<H_f> / <ψ*|H_f|ψ*>`:
//!
//! - one parameter: `λ - λ₀`, with `λ += drive · Δt / <Q>`;
//! - two parameters: `(y - y₀) / x`, with `c = b<Q> - a · drive · Δt`,
//!   `x ← x · b<Q> / c` and `y ← y + x · drive · Δt / c`.
//!
//! A negative drive never enters a certificate: the increment is clamped to
//! zero and the step is counted as a violation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamiltonian::NormBounds;

#[derive(Debug, Error, PartialEq)]
pub enum LyapunovError {
    #[error("optimum bound <Q> must be positive, got {0}")]
    NonPositiveBound(f64),
    #[error("time step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("{alphas} coefficients but {observables} observables")]
    LengthMismatch { alphas: usize, observables: usize },
    #[error("two-parameter denominator collapsed: c = b<Q> - a·drive·dt = {b}·{q} - {a}·{drive}·{dt} = {c}")]
    DenominatorCollapse { q: f64, a: f64, b: f64, drive: f64, dt: f64, c: f64 },
    #[error("bound weights must be nonnegative with b > 0, got a = {a}, b = {b}")]
    InvalidWeights { a: f64, b: f64 },
    #[error("error budget must be positive, got {0}")]
    NonPositiveEpsilon(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    /// Applied increment (of `λ`, or of `y` for the two-parameter tracker).
    pub increment: f64,
    /// The raw drive was negative and was clamped to zero.
    pub violation: bool,
}

fn drive(alphas: &[f64], observables: &[f64]) -> Result<f64, LyapunovError> {
    if alphas.len() != observables.len() {
        return Err(LyapunovError::LengthMismatch { alphas: alphas.len(), observables: observables.len() });
    }
    Ok(alphas.iter().zip(observables).map(|(a, o)| a * o).sum())
}

fn check_step(dt: f64, q_exp: f64) -> Result<(), LyapunovError> {
    if !(dt > 0.0) {
        return Err(LyapunovError::NonPositiveStep(dt));
    }
    if !(q_exp > 0.0) {
        return Err(LyapunovError::NonPositiveBound(q_exp));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneParamTracker {
    lambda: f64,
    lambda0: f64,
    history: Vec<f64>,
    violations: usize,
}

impl Default for OneParamTracker {
    fn default() -> Self {
        Self::new(0.0)
    }
}

impl OneParamTracker {
    pub fn new(lambda0: f64) -> Self {
        Self { lambda: lambda0, lambda0, history: Vec::new(), violations: 0 }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn history(&self) -> &[f64] {
        &self.history
    }

    pub fn violations(&self) -> usize {
        self.violations
    }

    /// Certified ratio lower bound `λ - λ₀`.
    pub fn lower_bound(&self) -> f64 {
        self.lambda - self.lambda0
    }

    pub fn step(&mut self, alphas: &[f64], observables: &[f64], dt: f64, q_exp: f64) -> Result<StepOutcome, LyapunovError> {
        let d = drive(alphas, observables)?;
        self.step_with_drive(d, dt, q_exp)
    }

    pub fn step_with_drive(&mut self, drive: f64, dt: f64, q_exp: f64) -> Result<StepOutcome, LyapunovError> {
        check_step(dt, q_exp)?;
        let violation = drive < 0.0;
        let increment = if violation { 0.0 } else { (drive * dt) / q_exp };
        if violation {
            self.violations += 1;
        }
        self.lambda += increment;
        self.history.push(increment);
        Ok(StepOutcome { increment, violation })
    }

    /// One-parameter potential `<H_f> - λ · OPT`.
    pub fn potential(&self, hf_exp: f64, optimum: f64) -> f64 {
        hf_exp - self.lambda * optimum
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoParamTracker {
    x: f64,
    y: f64,
    x0: f64,
    y0: f64,
    history: Vec<(f64, f64)>,
    violations: usize,
    saturated: bool,
}

impl Default for TwoParamTracker {
    fn default() -> Self {
        Self::new(1.0, 0.0)
    }
}

impl TwoParamTracker {
    pub fn new(x0: f64, y0: f64) -> Self {
        assert!(x0 > 0.0, "x0 must be positive");
        Self { x: x0, y: y0, x0, y0, history: Vec::new(), violations: 0, saturated: false }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    /// Per-step `(Δx, Δy)`.
    pub fn history(&self) -> &[(f64, f64)] {
        &self.history
    }

    pub fn violations(&self) -> usize {
        self.violations
    }

    /// Set once the denominator collapses; a saturated tracker ignores
    /// further steps and keeps its last certificate.
    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    pub fn freeze(&mut self) {
        self.saturated = true;
    }

    /// Certified ratio lower bound `(y - y₀) / x`.
    pub fn lower_bound(&self) -> f64 {
        (self.y - self.y0) / self.x
    }

    /// Two-parameter potential `x <H_f> - y · OPT`.
    pub fn potential(&self, hf_exp: f64, optimum: f64) -> f64 {
        self.x * hf_exp - self.y * optimum
    }

    /// `x` after a step of length `dt`, without applying it.
    pub fn peek_x(&self, drive: f64, dt: f64, q_exp: f64, a: f64, b: f64) -> Option<f64> {
        let d = drive.max(0.0);
        let c = b * q_exp - a * d * dt;
        (c > 0.0).then(|| self.x * (b * q_exp) / c)
    }

    pub fn step(
        &mut self,
        alphas: &[f64],
        observables: &[f64],
        dt: f64,
        q_exp: f64,
        a: f64,
        b: f64,
    ) -> Result<StepOutcome, LyapunovError> {
        let d = drive(alphas, observables)?;
        self.step_with_drive(d, dt, q_exp, a, b)
    }

    /// Applies one update; on [`LyapunovError::DenominatorCollapse`] the
    /// tracker is left unchanged.
    pub fn step_with_drive(&mut self, drive: f64, dt: f64, q_exp: f64, a: f64, b: f64) -> Result<StepOutcome, LyapunovError> {
        check_step(dt, q_exp)?;
        if !(a >= 0.0 && b > 0.0) {
            return Err(LyapunovError::InvalidWeights { a, b });
        }
        if self.saturated {
            return Ok(StepOutcome { increment: 0.0, violation: false });
        }
        let violation = drive < 0.0;
        let d = if violation { 0.0 } else { drive };
        let bq = b * q_exp;
        let c = bq - a * d * dt;
        if !(c > 0.0) {
            return Err(LyapunovError::DenominatorCollapse { q: q_exp, a, b, drive: d, dt, c });
        }
        if violation {
            self.violations += 1;
        }
        let x_next = self.x * bq / c;
        let dy = self.x * (d * dt) / c;
        self.history.push((x_next - self.x, dy));
        self.x = x_next;
        self.y += dy;
        Ok(StepOutcome { increment: dy, violation })
    }
}

/// Upper bound `<Q>` on the optimum used by a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QBoundSpec {
    /// `<Q> = m`.
    ConstantM,
    /// `OPT ≤ a<H_f> + b<Q>` with `<Q> = (m - a<H_f>) / b`.
    MMinusHf { a: f64, b: f64 },
}

impl QBoundSpec {
    /// The two-parameter choice `a = b = 1`.
    pub fn m_minus_hf() -> Self {
        QBoundSpec::MMinusHf { a: 1.0, b: 1.0 }
    }

    pub fn weights(&self) -> (f64, f64) {
        match *self {
            QBoundSpec::ConstantM => (0.0, 1.0),
            QBoundSpec::MMinusHf { a, b } => (a, b),
        }
    }

    pub fn value(&self, m: f64, hf_exp: f64) -> f64 {
        match *self {
            QBoundSpec::ConstantM => m,
            QBoundSpec::MMinusHf { a, b } => (m - a * hf_exp) / b,
        }
    }
}

/// Admissible step `ε / (B x + C ε + sqrt(A x ε))`; pass `x_next = 1` for the
/// one-parameter certificate. A vanishing denominator yields `+∞`.
pub fn max_step_size(bounds: &NormBounds, epsilon: f64, x_next: f64) -> Result<f64, LyapunovError> {
    if !(epsilon > 0.0) {
        return Err(LyapunovError::NonPositiveEpsilon(epsilon));
    }
    let denom = bounds.b * x_next + bounds.c * epsilon + (bounds.a * x_next * epsilon).sqrt();
    if denom <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(epsilon / denom)
}

/// Trapezoidal integration of the continuous certificate formulas, kept as
/// a diagnostic next to the discrete trackers.
///
/// Each sample supplies the drive and both `<Q>` values at time `t`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrapezoidCertificate {
    a: f64,
    b: f64,
    last: Option<(f64, f64, f64, f64)>,
    lambda_integral: f64,
    log_x: f64,
    y: f64,
}

impl TrapezoidCertificate {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b, ..Default::default() }
    }

    /// Records the integrands at time `t`.
    pub fn sample(&mut self, t: f64, drive: f64, q_one: f64, q_two: f64) {
        let d = drive.max(0.0);
        let r1 = d / q_one;
        let r2 = d / q_two;
        let x_now = |log_x: f64| log_x.exp();
        if let Some((t0, r1_prev, r2_prev, x_prev)) = self.last {
            let h = t - t0;
            self.lambda_integral += 0.5 * h * (r1_prev + r1);
            self.log_x += 0.5 * h * (self.a / self.b) * (r2_prev + r2);
            let x = x_now(self.log_x);
            self.y += 0.5 * h * (x_prev * r2_prev + x * r2) / self.b;
            self.last = Some((t, r1, r2, x));
        } else {
            self.last = Some((t, r1, r2, x_now(self.log_x)));
        }
    }

    pub fn lambda_bound(&self) -> f64 {
        self.lambda_integral
    }

    pub fn two_param_bound(&self) -> f64 {
        self.y / self.log_x.exp()
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    #[test]
    fn zero_observables_do_nothing() {
        let mut t = OneParamTracker::default();
        let out = t.step(&[0.0, 0.0], &[0.0, 0.0], 0.08, 3.0).unwrap();
        assert_eq!(out.increment, 0.0);
        assert_eq!(t.lower_bound(), 0.0);
    }

    #[test]
    fn single_edge_increment() {
        let (beta, o, dt) = (0.02, 0.1597, 0.08);
        let mut t = OneParamTracker::default();
        let out = t.step(&[beta * o], &[o], dt, 1.0).unwrap();
        assert_abs_diff_eq!(out.increment, 4.0804e-5, epsilon = 1e-8);
        let mut t2 = OneParamTracker::default();
        let out2 = t2.step(&[2.0 * beta * o], &[o], dt, 1.0).unwrap();
        assert_abs_diff_eq!(out2.increment, 2.0 * out.increment, epsilon = 1e-18);
    }

    #[test]
    fn negative_drive_is_clamped_and_counted() {
        let mut t = OneParamTracker::default();
        let out = t.step(&[0.5], &[-1.0], 0.1, 1.0).unwrap();
        assert!(out.violation);
        assert_eq!(t.lambda(), 0.0);
        assert_eq!(t.violations(), 1);
    }

    #[test]
    fn one_param_errors() {
        let mut t = OneParamTracker::default();
        assert_eq!(t.step(&[1.0], &[1.0], 0.1, 0.0), Err(LyapunovError::NonPositiveBound(0.0)));
        assert_eq!(t.step(&[1.0], &[1.0], 0.0, 1.0), Err(LyapunovError::NonPositiveStep(0.0)));
        assert!(matches!(t.step(&[1.0], &[], 0.1, 1.0), Err(LyapunovError::LengthMismatch { .. })));
    }

    #[test]
    fn two_param_zero_drive_is_identity() {
        let mut t = TwoParamTracker::default();
        t.step(&[0.0], &[0.3], 0.08, 2.0, 1.0, 1.0).unwrap();
        assert_eq!((t.x(), t.y()), (1.0, 0.0));
        assert_eq!(t.lower_bound(), 0.0);
    }

    #[test]
    fn two_param_with_a_zero_scales_one_param_rule() {
        let mut t = TwoParamTracker::new(2.0, 0.0);
        let out = t.step_with_drive(0.3, 0.1, 1.5, 0.0, 2.0).unwrap();
        assert_eq!(t.x(), 2.0);
        assert_abs_diff_eq!(out.increment, 2.0 * 0.3 * 0.1 / (2.0 * 1.5), epsilon = 1e-16);
    }

    #[test]
    fn two_param_single_edge_example() {
        let drive = 0.02 * 0.1597f64.powi(2) * 0.08;
        let mut t = TwoParamTracker::default();
        t.step_with_drive(drive / 0.08, 0.08, 0.5, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(t.x(), 0.5 / (0.5 - drive), epsilon = 1e-15);
        assert_abs_diff_eq!(t.y(), drive / (0.5 - drive), epsilon = 1e-15);
    }

    #[test]
    fn degenerate_two_param_matches_one_param_bitwise() {
        let mut one = OneParamTracker::default();
        let mut two = TwoParamTracker::default();
        for k in 0..50 {
            let d = 0.001 * (k as f64).sin().abs() + 1e-4;
            let q = 3.0 + (k as f64) * 0.01;
            one.step_with_drive(d, 0.08, q).unwrap();
            two.step_with_drive(d, 0.08, q, 0.0, 1.0).unwrap();
            assert_eq!(one.lambda().to_bits(), two.y().to_bits());
            assert_eq!(two.x(), 1.0);
        }
    }

    #[test]
    fn denominator_collapse_leaves_tracker_unchanged() {
        let mut t = TwoParamTracker::default();
        let err = t.step_with_drive(10.0, 1.0, 1.0, 1.0, 1.0).unwrap_err();
        assert!(matches!(err, LyapunovError::DenominatorCollapse { .. }));
        assert_eq!((t.x(), t.y()), (1.0, 0.0));
        t.freeze();
        assert_eq!(t.step_with_drive(0.1, 0.1, 1.0, 1.0, 1.0).unwrap().increment, 0.0);
        assert_eq!(t.x(), 1.0);
    }

    #[test]
    fn potentials_at_the_gauge() {
        let one = OneParamTracker::default();
        let two = TwoParamTracker::default();
        assert_eq!(one.potential(3.5, 7.0), 3.5);
        assert_eq!(two.potential(3.5, 7.0), 3.5);
    }

    #[test]
    fn q_bounds() {
        assert_eq!(QBoundSpec::ConstantM.value(9.0, 4.0), 9.0);
        assert_eq!(QBoundSpec::m_minus_hf().value(9.0, 4.0), 5.0);
        assert_eq!(QBoundSpec::MMinusHf { a: 1.0, b: 2.0 }.value(9.0, 4.0), 2.5);
    }

    fn bounds(a: f64, b: f64, c: f64) -> NormBounds {
        NormBounds { hf_norm: 0.0, phase_norm: 0.0, mixer_norm: 0.0, full_norm: c, a, b, c }
    }

    #[test]
    fn step_size_reductions() {
        assert_abs_diff_eq!(max_step_size(&bounds(0.0, 1.0, 0.0), 1e-3, 1.0).unwrap(), 1e-3, epsilon = 1e-18);
        assert_eq!(max_step_size(&bounds(0.0, 0.0, 0.0), 1e-3, 1.0).unwrap(), f64::INFINITY);
        assert!(max_step_size(&bounds(1.0, 1.0, 1.0), 0.0, 1.0).is_err());
        // ε → 0 with A > 0 and B = 0: Δt ≈ sqrt(ε / A)
        let eps = 1e-14;
        let dt = max_step_size(&bounds(4.0, 0.0, 1.0), eps, 1.0).unwrap();
        assert_abs_diff_eq!(dt / (eps / 4.0f64).sqrt(), 1.0, epsilon = 1e-5);
    }

    #[test]
    fn step_size_shrinks_with_x() {
        let b = bounds(2.0, 3.0, 1.0);
        assert!(max_step_size(&b, 1e-3, 2.0).unwrap() < max_step_size(&b, 1e-3, 1.0).unwrap());
    }

    #[test]
    fn trapezoid_constant_rate() {
        let mut tr = TrapezoidCertificate::new(0.0, 1.0);
        for k in 0..=10 {
            tr.sample(k as f64 * 0.1, 2.0, 4.0, 4.0);
        }
        assert_abs_diff_eq!(tr.lambda_bound(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(tr.two_param_bound(), 0.5, epsilon = 1e-12);
    }
}
