//! Summary statistics over simulation trials.

use serde::Serialize;

use crate::harness::experiment::TrialReport;

/// Mean and sample standard deviation (`n - 1` denominator). A single value
/// has standard deviation 0; an empty slice gives NaN for both.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Median, averaging the two middle values for even lengths. NaN if empty.
pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// Per-assertion workload across trials.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssertionSummary {
    pub assertion: String,
    pub trials: usize,
    pub mean_ballots: f64,
    pub std_ballots: f64,
    pub mean_units: f64,
    pub std_units: f64,
    pub approval_rate: f64,
}

/// Groups assertion outcomes by label, in the order labels first appear.
pub fn assertion_stats(reports: &[TrialReport]) -> Vec<AssertionSummary> {
    let mut labels: Vec<&str> = Vec::new();
    for r in reports {
        for a in &r.outcome.assertions {
            if !labels.contains(&a.label.as_str()) {
                labels.push(&a.label);
            }
        }
    }
    labels
        .into_iter()
        .map(|label| {
            let rows: Vec<_> = reports
                .iter()
                .flat_map(|r| r.outcome.assertions.iter().filter(|a| a.label == label))
                .collect();
            let ballots: Vec<f64> = rows.iter().map(|a| a.ballots_examined as f64).collect();
            let units: Vec<f64> = rows.iter().map(|a| a.units_examined as f64).collect();
            let (mean_ballots, std_ballots) = mean_std(&ballots);
            let (mean_units, std_units) = mean_std(&units);
            AssertionSummary {
                assertion: label.to_string(),
                trials: rows.len(),
                mean_ballots,
                std_ballots,
                mean_units,
                std_units,
                approval_rate: rows.iter().filter(|a| a.approved).count() as f64 / rows.len() as f64,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_std() {
        let (m, s) = mean_std(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert_eq!(m, 5.0);
        assert!((s - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
        assert_eq!(mean_std(&[3.0]), (3.0, 0.0));
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }
}
