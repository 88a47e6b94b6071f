//! Descriptive statistics and the rank-sum test used to mark heuristics that
//! are statistically equivalent to the best.

use std::collections::BTreeMap;

use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use super::RunRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("rank-sum test needs two non-empty samples")]
pub struct EmptySample;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSumResult {
    /// Sum of the (mid)ranks of the first sample in the pooled sample.
    pub statistic: f64,
    /// Two-sided p-value.
    pub p: f64,
    pub reject: bool,
}

/// Below this size in either sample, p-values are computed exactly.
pub const EXACT_BELOW: usize = 8;

/// Midranks (1-based) of `values`, and the tie-size list.
fn midranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        if j - i > 1 {
            ties.push(j - i);
        }
        i = j;
    }
    (ranks, ties)
}

/// Two-sided Wilcoxon rank-sum (Mann-Whitney) test with midranks for ties.
///
/// Uses the continuity-corrected normal approximation with tie-corrected
/// variance when both samples have at least [`EXACT_BELOW`] values, and the
/// exact permutation distribution of the midrank sum otherwise.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64], alpha: f64) -> Result<RankSumResult, EmptySample> {
    if a.is_empty() || b.is_empty() {
        return Err(EmptySample);
    }
    let (m, n) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let w: f64 = ranks[..m].iter().sum();

    let p = if m < EXACT_BELOW || n < EXACT_BELOW {
        exact_p(&ranks, m, w)
    } else {
        let total = (m + n) as f64;
        let (mf, nf) = (m as f64, n as f64);
        let u = w - mf * (mf + 1.0) / 2.0;
        let tie_term: f64 = ties
            .iter()
            .map(|&t| (t as f64).powi(3) - t as f64)
            .sum::<f64>()
            / (total * (total - 1.0));
        let var = mf * nf / 12.0 * ((total + 1.0) - tie_term);
        if var <= 0.0 {
            1.0
        } else {
            let z = ((u - mf * nf / 2.0).abs() - 0.5).max(0.0) / var.sqrt();
            let normal = Normal::standard();
            (2.0 * normal.sf(z)).min(1.0)
        }
    };
    Ok(RankSumResult {
        statistic: w,
        p,
        reject: p < alpha,
    })
}

/// Exact two-sided p-value: the share of all size-`m` subsets of the pooled
/// midranks whose sum is at least as far from its mean as `w`.
fn exact_p(ranks: &[f64], m: usize, w: f64) -> f64 {
    // Doubled midranks are integers.
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max_sum: usize = doubled.iter().sum();
    // counts[k][s]: number of k-subsets with doubled sum s.
    let mut counts = vec![vec![0.0f64; max_sum + 1]; m + 1];
    counts[0][0] = 1.0;
    for &r in &doubled {
        for k in (1..=m).rev() {
            for s in (r..=max_sum).rev() {
                counts[k][s] += counts[k - 1][s - r];
            }
        }
    }
    let mean2 = (m * (ranks.len() + 1)) as f64;
    let observed = (2.0 * w - mean2).abs();
    let total: f64 = counts[m].iter().sum();
    let extreme: f64 = counts[m]
        .iter()
        .enumerate()
        .filter(|&(s, _)| (s as f64 - mean2).abs() >= observed - 1e-9)
        .map(|(_, c)| c)
        .sum();
    (extreme / total).min(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub instance: String,
    pub heuristic: String,
    pub runs: usize,
    pub mean: f64,
    /// Sample standard deviation (zero for a single run).
    pub sd: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub mean_candidates: f64,
    pub mean_evaluations: f64,
    pub best_flag: bool,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub const ALPHA: f64 = 0.05;

/// Per (instance, heuristic) statistics of the post-processed values.
///
/// Within each instance the heuristic with the lowest mean is flagged, along
/// with every heuristic whose rank-sum test against it does not reject at
/// the 5% level. Rows come out sorted by instance, then heuristic.
pub fn summarise(records: &[RunRecord]) -> Vec<SummaryStats> {
    let mut groups: BTreeMap<(String, String), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.instance_label(), r.heuristic.clone()))
            .or_default()
            .push(r);
    }
    let mut out: Vec<SummaryStats> = Vec::new();
    let mut samples: Vec<Vec<f64>> = Vec::new();
    for ((instance, heuristic), rs) in &groups {
        let vals: Vec<f64> = rs.iter().map(|r| r.post_value).collect();
        let k = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / k;
        let sd = if vals.len() > 1 {
            (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
        } else {
            0.0
        };
        let mut sorted = vals.clone();
        sorted.sort_by(f64::total_cmp);
        out.push(SummaryStats {
            instance: instance.clone(),
            heuristic: heuristic.clone(),
            runs: vals.len(),
            mean,
            sd,
            median: quantile(&sorted, 0.5),
            q1: quantile(&sorted, 0.25),
            q3: quantile(&sorted, 0.75),
            mean_candidates: rs.iter().map(|r| r.candidates_visited as f64).sum::<f64>() / k,
            mean_evaluations: rs.iter().map(|r| r.evaluations_used as f64).sum::<f64>() / k,
            best_flag: false,
        });
        samples.push(vals);
    }

    let mut start = 0;
    while start < out.len() {
        let end = (start..out.len())
            .find(|&i| out[i].instance != out[start].instance)
            .unwrap_or(out.len());
        let best = (start..end)
            .min_by(|&a, &b| out[a].mean.total_cmp(&out[b].mean))
            .unwrap();
        for i in start..end {
            out[i].best_flag = i == best
                || !wilcoxon_rank_sum(&samples[i], &samples[best], ALPHA)
                    .expect("groups are non-empty")
                    .reject;
        }
        start = end;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn identical_samples() {
        let a: Vec<f64> = (0..20).map(|i| (i as f64).sin()).collect();
        let r = wilcoxon_rank_sum(&a, &a, 0.05).unwrap();
        assert!((r.p - 1.0).abs() < 1e-9);
        assert!(!r.reject);
    }

    #[test]
    fn complete_separation() {
        let a: Vec<f64> = (1..=10).map(f64::from).collect();
        let b: Vec<f64> = (101..=110).map(f64::from).collect();
        let r = wilcoxon_rank_sum(&a, &b, 0.05).unwrap();
        assert!(r.reject && r.p < 1e-3, "{}", r.p);
        assert_eq!(r.statistic, 55.0);
    }

    #[test]
    fn exact_small_samples() {
        // 3 vs 3 fully separated: 2 of the C(6,3) = 20 splits are this extreme.
        let r = wilcoxon_rank_sum(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], 0.05).unwrap();
        assert!((r.p - 0.1).abs() < 1e-12);
        assert!(!r.reject);
        let r = wilcoxon_rank_sum(
            &[1.0, 2.0, 3.0, 4.0, 5.0],
            &[6.0, 7.0, 8.0, 9.0, 10.0],
            0.05,
        )
        .unwrap();
        assert!((r.p - 2.0 / 252.0).abs() < 1e-12);
        // All tied.
        let r = wilcoxon_rank_sum(&[1.0, 1.0], &[1.0, 1.0, 1.0], 0.05).unwrap();
        assert!((r.p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_input() {
        assert_eq!(wilcoxon_rank_sum(&[], &[1.0], 0.05), Err(EmptySample));
    }

    #[test]
    fn midranks_with_ties() {
        let (r, t) = midranks(&[3.0, 1.0, 3.0, 2.0]);
        assert_eq!(r, vec![3.5, 1.0, 3.5, 2.0]);
        assert_eq!(t, vec![2]);
    }

    #[test]
    fn size_of_test() {
        let mut rng = RngStream::new(2024);
        let trials = 1000;
        let rejections = (0..trials)
            .filter(|_| {
                let a: Vec<f64> = (0..30).map(|_| rng.standard_normal()).collect();
                let b: Vec<f64> = (0..30).map(|_| rng.standard_normal()).collect();
                wilcoxon_rank_sum(&a, &b, 0.05).unwrap().reject
            })
            .count();
        let rate = rejections as f64 / trials as f64;
        assert!((rate - 0.05).abs() <= 0.02, "rejection rate {rate}");
    }

    #[test]
    fn quartiles() {
        let s = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&s, 0.5), 3.0);
        assert_eq!(quantile(&s, 0.25), 2.0);
        assert_eq!(quantile(&[1.0, 2.0], 0.5), 1.5);
    }
}
