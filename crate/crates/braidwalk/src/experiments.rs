//! The shuffling experiment and the three discriminator tests: shuffled and
//! position-sorted baselines, paired statistics, partial correlation,
//! matched-rate spread, and the DWS-sign Fisher ratio.

use crate::burau::{log_spectral_radius, triplet_word_product};
use crate::classify::DeploymentRecord;
use crate::rng::stream_rng;
use crate::stats::two_sided_p;
use crate::walk::BraidTrace;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("input vectors must have equal length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {min} observations, got {got}")]
    TooFewObservations { got: usize, min: usize },
    #[error("zero-variance differences: t statistic undefined")]
    ZeroVariance,
    #[error("constant control variable: residualization undefined")]
    ConstantControl,
    #[error("constant residuals: correlation undefined")]
    ConstantResiduals,
    #[error("both label classes must be non-empty and have at least 2 members")]
    DegenerateClasses,
    #[error("both class variances are zero: ratio undefined")]
    ZeroClassVariance,
}

/// The traces of one (SCC, WAR) pair.
#[derive(Debug, Clone)]
pub struct PairTraces {
    pub pair_id: u64,
    pub traces: Vec<BraidTrace>,
}

/// Pair-level shuffle outcome: per-walk log SRs averaged across the pair's
/// walks for the original order, the shuffled mean, and the position-sorted
/// order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShuffleResult {
    pub pair_id: u64,
    pub logsr_original: f64,
    pub logsr_shuffled_mean: f64,
    pub logsr_sorted: f64,
    /// Distinct injection positions pooled over the pair's walks.
    pub n_positions_distinct: usize,
    pub walks: usize,
    /// Walks with fewer than 2 triplets, where all three orders coincide.
    pub degenerate_walks: usize,
    /// Walks with at least 2 distinct positions.
    pub walks_multi_position: usize,
}

/// Replays a position sequence through the Burau algebra.
pub fn replay_log_sr(n_strands: usize, positions: &[u8]) -> f64 {
    if positions.is_empty() {
        return 0.0;
    }
    log_spectral_radius(&triplet_word_product(n_strands, positions))
}

/// For each pair: original log SR, the mean over `n_shuffles` uniform
/// permutations of the triplet list, and the stable position-sorted order.
/// Shuffle RNG is sub-streamed per (pair, walk, shuffle) so results are
/// independent of execution order.
pub fn shuffle_experiment(
    pairs: &[PairTraces],
    n_shuffles: usize,
    master_seed: u64,
) -> Vec<ShuffleResult> {
    pairs
        .par_iter()
        .map(|pair| {
            let walks = pair.traces.len();
            let mut orig_sum = 0.0;
            let mut shuf_sum = 0.0;
            let mut sort_sum = 0.0;
            let mut degenerate = 0;
            let mut multi = 0;
            let mut pooled = std::collections::BTreeSet::new();
            for (walk_idx, trace) in pair.traces.iter().enumerate() {
                let positions = trace.positions();
                pooled.extend(positions.iter().copied());
                if trace.distinct_positions() >= 2 {
                    multi += 1;
                }
                let original = replay_log_sr(trace.n_strands, &positions);
                orig_sum += original;
                if positions.len() < 2 {
                    degenerate += 1;
                    shuf_sum += original;
                    sort_sum += original;
                    continue;
                }
                let mut acc = 0.0;
                for shuffle_idx in 0..n_shuffles {
                    let mut rng = stream_rng(
                        master_seed,
                        &[pair.pair_id, walk_idx as u64, shuffle_idx as u64],
                    );
                    let mut perm = positions.clone();
                    perm.shuffle(&mut rng);
                    acc += replay_log_sr(trace.n_strands, &perm);
                }
                shuf_sum += acc / n_shuffles.max(1) as f64;
                let mut sorted = positions.clone();
                sorted.sort_by_key(|&p| p); // stable: equal positions keep temporal order
                sort_sum += replay_log_sr(trace.n_strands, &sorted);
            }
            let n = walks.max(1) as f64;
            ShuffleResult {
                pair_id: pair.pair_id,
                logsr_original: orig_sum / n,
                logsr_shuffled_mean: shuf_sum / n,
                logsr_sorted: sort_sum / n,
                n_positions_distinct: pooled.len(),
                walks,
                degenerate_walks: degenerate,
                walks_multi_position: multi,
            }
        })
        .collect()
}

/// Paired-comparison statistics on two equal-length samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedStats {
    /// Paired t statistic on the differences `a - b`; `None` when the
    /// differences have zero variance.
    pub t: Option<f64>,
    pub p: Option<f64>,
    /// Cohen's d: `mean(diff) / sd(diff)`.
    pub cohens_d: Option<f64>,
    pub fraction_a_lt_b: f64,
    /// Median of `|a - b| / |a|` over entries with nonzero `a`.
    pub median_abs_rel_diff: Option<f64>,
    pub n: usize,
}

pub fn paired_stats(a: &[f64], b: &[f64]) -> Result<PairedStats, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(StatsError::TooFewObservations { got: a.len(), min: 2 });
    }
    let n = a.len();
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let (t, p, d) = if var > 0.0 {
        let sd = var.sqrt();
        let t = mean / (sd / (n as f64).sqrt());
        (Some(t), Some(two_sided_p(t, (n - 1) as f64)), Some(mean / sd))
    } else {
        (None, None, None)
    };
    let fraction = a.iter().zip(b).filter(|(x, y)| x < y).count() as f64 / n as f64;
    let mut rels: Vec<f64> = a
        .iter()
        .zip(b)
        .filter(|(x, _)| **x != 0.0)
        .map(|(x, y)| ((x - y) / x).abs())
        .collect();
    let median_abs_rel_diff = if rels.is_empty() {
        None
    } else {
        rels.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let m = rels.len();
        Some(if m % 2 == 1 {
            rels[m / 2]
        } else {
            0.5 * (rels[m / 2 - 1] + rels[m / 2])
        })
    };
    Ok(PairedStats {
        t,
        p,
        cohens_d: d,
        fraction_a_lt_b: fraction,
        median_abs_rel_diff,
        n,
    })
}

/// Partial correlation `r(x, y | control)` with p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialCorrelation {
    pub r: f64,
    pub p: f64,
    pub n: usize,
}

/// Least-squares residualizes `x` and `y` on `control` (with intercept) and
/// returns the Pearson correlation of the residuals; p via the t-transform
/// with `n - 3` degrees of freedom.
pub fn partial_correlation(
    x: &[f64],
    y: &[f64],
    control: &[f64],
) -> Result<PartialCorrelation, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() != control.len() {
        return Err(StatsError::LengthMismatch(x.len(), control.len()));
    }
    let n = x.len();
    if n < 4 {
        return Err(StatsError::TooFewObservations { got: n, min: 4 });
    }
    let residualize = |v: &[f64]| -> Result<Vec<f64>, StatsError> {
        let nf = n as f64;
        let mean_c = control.iter().sum::<f64>() / nf;
        let mean_v = v.iter().sum::<f64>() / nf;
        let var_c: f64 = control.iter().map(|c| (c - mean_c).powi(2)).sum();
        if var_c == 0.0 {
            return Err(StatsError::ConstantControl);
        }
        let cov: f64 = control
            .iter()
            .zip(v)
            .map(|(c, val)| (c - mean_c) * (val - mean_v))
            .sum();
        let slope = cov / var_c;
        Ok(v.iter()
            .zip(control)
            .map(|(val, c)| val - (mean_v + slope * (c - mean_c)))
            .collect())
    };
    let rx = residualize(x)?;
    let ry = residualize(y)?;
    let ss = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>();
    let (sx, sy) = (ss(&rx), ss(&ry));
    if sx <= 0.0 || sy <= 0.0 {
        return Err(StatsError::ConstantResiduals);
    }
    let r = rx.iter().zip(&ry).map(|(a, b)| a * b).sum::<f64>() / (sx * sy).sqrt();
    let df = (n - 3) as f64;
    let r_clamped = r.clamp(-0.9999999999999999, 0.9999999999999999);
    let t = r_clamped * (df / (1.0 - r_clamped * r_clamped)).sqrt();
    Ok(PartialCorrelation {
        r,
        p: two_sided_p(t, df),
        n,
    })
}

/// One firing-rate bin: records whose mean triplet count falls within
/// `center +- halfwidth`, with the within-bin range of both LE variants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateBin {
    pub center: f64,
    pub count: usize,
    pub temporal_range: f64,
    pub counting_range: f64,
}

/// Greedy non-overlapping bins centered on observed triplet counts, in
/// ascending count order. Empty bins cannot occur by construction.
pub fn matched_rate_spread(records: &[DeploymentRecord], bin_halfwidth: f64) -> Vec<RateBin> {
    let mut sorted: Vec<&DeploymentRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.n_triplets.partial_cmp(&b.n_triplets).unwrap());
    let mut bins = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        // each bin spans [lo, lo + 2*halfwidth], i.e. +-halfwidth around its
        // midpoint, anchored at the smallest count not yet binned
        let lo = sorted[i].n_triplets;
        let hi = lo + 2.0 * bin_halfwidth;
        let mut les = Vec::new();
        let mut rates = Vec::new();
        while i < sorted.len() && sorted[i].n_triplets <= hi {
            les.push(sorted[i].le);
            rates.push(sorted[i].le_counting);
            i += 1;
        }
        let range = |v: &[f64]| {
            let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
            max - min
        };
        bins.push(RateBin {
            center: lo + bin_halfwidth,
            count: les.len(),
            temporal_range: range(&les),
            counting_range: range(&rates),
        });
    }
    bins
}

/// Fisher ratio `(mu1 - mu2)^2 / (s1^2 + s2^2)` with unbiased class
/// variances; `labels[i] == true` selects class 1.
pub fn fisher_ratio(values: &[f64], labels: &[bool]) -> Result<f64, StatsError> {
    if values.len() != labels.len() {
        return Err(StatsError::LengthMismatch(values.len(), labels.len()));
    }
    let class: Vec<f64> = values
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l)
        .map(|(v, _)| *v)
        .collect();
    let rest: Vec<f64> = values
        .iter()
        .zip(labels)
        .filter(|(_, &l)| !l)
        .map(|(v, _)| *v)
        .collect();
    if class.len() < 2 || rest.len() < 2 {
        return Err(StatsError::DegenerateClasses);
    }
    let stats = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
        (m, var)
    };
    let (m1, v1) = stats(&class);
    let (m2, v2) = stats(&rest);
    if v1 + v2 == 0.0 {
        return Err(StatsError::ZeroClassVariance);
    }
    Ok((m1 - m2).powi(2) / (v1 + v2))
}
