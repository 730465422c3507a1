use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ConvergenceRecord, ExperimentError};

/// Linear-interpolation percentile between closest ranks, `q` in `[0, 100]`.
pub fn percentile(values: &[f64], q: f64) -> Result<f64, ExperimentError> {
    if values.is_empty() {
        return Err(ExperimentError::Empty("percentile of no values"));
    }
    if !(0.0..=100.0).contains(&q) {
        return Err(ExperimentError::PercentileRange(q));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    Ok(sorted[lo] + (sorted[hi] - sorted[lo]) * frac)
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn ols(xs: &[f64], ys: &[f64]) -> Result<(f64, f64), ExperimentError> {
    if xs.len() != ys.len() {
        return Err(ExperimentError::Degenerate(format!("{} x values vs {} y values", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(ExperimentError::Degenerate("need at least two points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(ExperimentError::Degenerate("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "q")]
pub enum FitKind {
    AllPoints,
    PerNMax,
    /// Fit through the per-`n` percentile `q`.
    PerNQuartile(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub which: FitKind,
    pub target: f64,
    pub points_used: usize,
    /// Records dropped because the target was never reached.
    pub excluded_not_reached: usize,
}

impl FitResult {
    /// Fitted `rounds(n) = 10^intercept * n^slope`.
    pub fn predict(&self, n: f64) -> f64 {
        10f64.powf(self.intercept) * n.powf(self.slope)
    }
}

/// Log-log fit of rounds-to-target against `n`.
///
/// All records must share one target. Not-reached records are excluded and
/// counted in the result.
pub fn fit_loglog(records: &[ConvergenceRecord], which: FitKind) -> Result<FitResult, ExperimentError> {
    let Some(first) = records.first() else {
        return Err(ExperimentError::Empty("fit over no records"));
    };
    let target = first.target;
    if records.iter().any(|r| r.target != target) {
        return Err(ExperimentError::Degenerate("records mix several targets".into()));
    }
    let mut by_n: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut excluded = 0;
    for r in records {
        match r.rounds_to_target {
            Some(rounds) => by_n.entry(r.n).or_default().push(rounds as f64),
            None => excluded += 1,
        }
    }
    if by_n.len() < 2 {
        return Err(ExperimentError::Degenerate(format!("{} distinct n values with reached targets", by_n.len())));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&n, rounds) in &by_n {
        let x = (n as f64).log10();
        match which {
            FitKind::AllPoints => {
                for r in rounds {
                    xs.push(x);
                    ys.push(r.log10());
                }
            }
            FitKind::PerNMax => {
                xs.push(x);
                ys.push(rounds.iter().copied().fold(f64::NEG_INFINITY, f64::max).log10());
            }
            FitKind::PerNQuartile(q) => {
                xs.push(x);
                ys.push(percentile(rounds, q)?.log10());
            }
        }
    }
    let (slope, intercept) = ols(&xs, &ys)?;
    Ok(FitResult { slope, intercept, which, target, points_used: xs.len(), excluded_not_reached: excluded })
}

/// Average, worst-case and interquartile fits for one target.
pub fn fit_loglog_all(records: &[ConvergenceRecord]) -> Result<Vec<FitResult>, ExperimentError> {
    [FitKind::AllPoints, FitKind::PerNMax, FitKind::PerNQuartile(25.0), FitKind::PerNQuartile(75.0)]
        .into_iter()
        .map(|k| fit_loglog(records, k))
        .collect()
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    fn rec(n: usize, rounds: Option<usize>) -> ConvergenceRecord {
        ConvergenceRecord { graph_id: format!("g{n}"), n, target: 0.878, rounds_to_target: rounds }
    }

    #[test]
    fn percentile_examples() {
        assert_eq!(percentile(&[1.0, 2.0, 3.0, 4.0], 50.0).unwrap(), 2.5);
        let v = [7.0, -2.0, 3.5, 11.0, 0.25];
        assert_eq!(percentile(&v, 0.0).unwrap(), -2.0);
        assert_eq!(percentile(&v, 100.0).unwrap(), 11.0);
        assert_eq!(percentile(&[4.0], 37.0).unwrap(), 4.0);
        assert_eq!(percentile(&[1.0, 2.0, 3.0, 4.0, 5.0], 25.0).unwrap(), 2.0);
        assert!(matches!(percentile(&[], 50.0), Err(ExperimentError::Empty(_))));
        assert!(percentile(&[1.0], 101.0).is_err());
    }

    #[test]
    fn power_laws_are_recovered() {
        for exp in [2u32, 3] {
            let recs: Vec<_> = (4..=14).step_by(2).map(|n| rec(n, Some(n.pow(exp)))).collect();
            for kind in [FitKind::AllPoints, FitKind::PerNMax, FitKind::PerNQuartile(25.0)] {
                let fit = fit_loglog(&recs, kind).unwrap();
                assert_abs_diff_eq!(fit.slope, exp as f64, epsilon = 1e-9);
                assert_abs_diff_eq!(fit.intercept, 0.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn not_reached_is_excluded_and_counted() {
        let recs = vec![rec(4, Some(16)), rec(4, None), rec(8, Some(64)), rec(8, None), rec(8, None)];
        let fit = fit_loglog(&recs, FitKind::AllPoints).unwrap();
        assert_eq!(fit.excluded_not_reached, 3);
        assert_eq!(fit.points_used, 2);
        assert_abs_diff_eq!(fit.slope, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_loglog(&[], FitKind::AllPoints).is_err());
        assert!(fit_loglog(&[rec(6, Some(10)), rec(6, Some(20))], FitKind::AllPoints).is_err());
        assert!(fit_loglog(&[rec(6, Some(10)), rec(8, None)], FitKind::AllPoints).is_err());
        let mut mixed = vec![rec(4, Some(3)), rec(6, Some(5))];
        mixed[1].target = 0.9;
        assert!(fit_loglog(&mixed, FitKind::AllPoints).is_err());
    }

    #[test]
    fn worst_case_fit_uses_maxima() {
        let recs = vec![rec(2, Some(1)), rec(2, Some(4)), rec(4, Some(3)), rec(4, Some(16))];
        let fit = fit_loglog(&recs, FitKind::PerNMax).unwrap();
        assert_abs_diff_eq!(fit.slope, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.predict(3.0), 9.0, epsilon = 1e-9);
    }
}
