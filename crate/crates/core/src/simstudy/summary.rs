use serde::{Deserialize, Serialize};

use super::replicate::{Estimand, ReplicateResult};
use crate::error::{Error, Result};

pub const PERCENTILES: [f64; 5] = [0.025, 0.25, 0.5, 0.75, 0.975];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimandSummary {
    pub estimand: Estimand,
    pub mean: f64,
    pub p2_5: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub p97_5: f64,
}

impl EstimandSummary {
    pub fn median(&self) -> f64 {
        self.p50
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShrinkageSummary {
    pub estimands: Vec<EstimandSummary>,
    pub n_converged: usize,
    pub n_excluded: usize,
}

impl ShrinkageSummary {
    pub fn get(&self, e: Estimand) -> &EstimandSummary {
        self.estimands
            .iter()
            .find(|s| s.estimand == e)
            .expect("every estimand is summarised")
    }

    pub fn median(&self, e: Estimand) -> f64 {
        self.get(e).p50
    }
}

/// Percentile of sorted data by linear interpolation between order
/// statistics: position `(n − 1) p`.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize_values(estimand: Estimand, values: &[f64]) -> EstimandSummary {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
    let q: Vec<f64> = PERCENTILES.iter().map(|&p| percentile(&sorted, p)).collect();
    EstimandSummary {
        estimand,
        mean,
        p2_5: q[0],
        p25: q[1],
        p50: q[2],
        p75: q[3],
        p97_5: q[4],
    }
}

/// Median, mean, and percentiles per estimand over converged replicates.
pub fn summarize(results: &[ReplicateResult]) -> Result<ShrinkageSummary> {
    let kept: Vec<&ReplicateResult> = results.iter().filter(|r| r.converged).collect();
    let n_excluded = results.len() - kept.len();
    if kept.is_empty() {
        return Err(Error::EmptySummary { excluded: n_excluded });
    }
    let estimands = Estimand::ALL
        .iter()
        .map(|&e| {
            let values: Vec<f64> = kept.iter().map(|r| r.get(e)).collect();
            summarize_values(e, &values)
        })
        .collect();
    Ok(ShrinkageSummary {
        estimands,
        n_converged: kept.len(),
        n_excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(i: usize, v: f64) -> ReplicateResult {
        ReplicateResult {
            replicate: i,
            s_mn_21: v,
            s_mn_31: v,
            s_dl_21: v,
            s_dl_31: v,
            s_vh_mn: v,
            s_vh_dl_21: v,
            s_vh_dl_31: v,
            converged: true,
            failure: None,
        }
    }

    #[test]
    fn constant_inputs() {
        let rs: Vec<_> = (0..5).map(|i| result(i, 0.8)).collect();
        let s = summarize(&rs).unwrap();
        let e = s.get(Estimand::SMn21);
        for v in [e.p2_5, e.p25, e.p50, e.p75, e.p97_5, e.mean] {
            assert!((v - 0.8).abs() < 1e-15);
        }
    }

    #[test]
    fn two_values_median_is_mean() {
        let s = summarize(&[result(0, 0.6), result(1, 1.0)]).unwrap();
        assert!((s.median(Estimand::SDl31) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn single_replicate_passthrough() {
        let s = summarize(&[result(0, 0.77)]).unwrap();
        assert_eq!(s.median(Estimand::SVhMn), 0.77);
        assert_eq!(s.get(Estimand::SVhMn).p2_5, 0.77);
    }

    #[test]
    fn exclusions_counted() {
        let mut bad = result(1, f64::NAN);
        bad.converged = false;
        let s = summarize(&[result(0, 0.5), bad.clone()]).unwrap();
        assert_eq!((s.n_converged, s.n_excluded), (1, 1));
        assert!(matches!(summarize(&[bad]), Err(Error::EmptySummary { excluded: 1 })));
    }

    #[test]
    fn interpolated_percentiles() {
        let sorted = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(percentile(&sorted, 0.25), 2.0);
        assert_eq!(percentile(&sorted, 0.975), 4.9);
        assert_eq!(percentile(&sorted, 0.0), 1.0);
        let s = summarize_values(Estimand::SMn21, &[5.0, 1.0, 3.0, 2.0, 4.0]);
        assert!(s.p2_5 <= s.p25 && s.p25 <= s.p50 && s.p50 <= s.p75 && s.p75 <= s.p97_5);
    }
}
