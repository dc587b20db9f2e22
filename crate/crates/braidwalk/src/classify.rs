//! Two-regime labeling, threshold calibration, and FD/DF disagreement
//! analysis between the Burau LE and the Abelian counting rate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Paper-constant regime boundary on temporal LE (corpus median).
pub const PAPER_THETA_LE: f64 = 0.5847;
/// Paper-constant regime boundary on the counting rate (corpus median).
pub const PAPER_THETA_RATE: f64 = 0.6586;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("corpus must contain at least 2 distinct SCCs, got {0}")]
    TooFewSccs(usize),
    #[error("empty corpus")]
    EmptyCorpus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdSource {
    PaperConstants,
    CorpusMedians,
}

impl std::fmt::Display for ThresholdSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::PaperConstants => write!(f, "paper_constants"),
            Self::CorpusMedians => write!(f, "corpus_medians"),
        }
    }
}

/// Regime boundaries for the two metrics, with their provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub theta_le: f64,
    pub theta_rate: f64,
    pub source: ThresholdSource,
}

impl Thresholds {
    pub fn paper() -> Self {
        Self {
            theta_le: PAPER_THETA_LE,
            theta_rate: PAPER_THETA_RATE,
            source: ThresholdSource::PaperConstants,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Focused,
    Dispersed,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Focused => write!(f, "focused"),
            Self::Dispersed => write!(f, "dispersed"),
        }
    }
}

/// Disagreement type between the two regime labels. FD: focused by Burau but
/// dispersed by rate (rate false alarm). DF: dispersed by Burau but focused
/// by rate (rate miss).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Disagreement {
    None,
    Fd,
    Df,
}

impl std::fmt::Display for Disagreement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::None => write!(f, "none"),
            Self::Fd => write!(f, "FD"),
            Self::Df => write!(f, "DF"),
        }
    }
}

impl std::str::FromStr for Disagreement {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Self::None),
            "FD" => Ok(Self::Fd),
            "DF" => Ok(Self::Df),
            other => Err(format!("unknown disagreement label {other:?}")),
        }
    }
}

/// One (SCC, WAR) row of the dataset: walk means, Abelian statistics and
/// regime labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeploymentRecord {
    pub scc_id: u64,
    pub war: Vec<u32>,
    pub le: f64,
    pub le_counting: f64,
    /// Mean gate firings per walk.
    pub n_triplets: f64,
    pub dws: i64,
    pub regime_burau: Regime,
    pub regime_rate: Regime,
    pub disagreement: Disagreement,
    pub overflow: bool,
}

impl DeploymentRecord {
    /// Cancellation factor `c = le / le_counting`; `None` when the counting
    /// rate is zero.
    pub fn cancellation_factor(&self) -> Option<f64> {
        (self.le_counting > 0.0).then(|| self.le / self.le_counting)
    }
}

/// Labels a record. Dispersed is inclusive: `le >= theta`.
pub fn classify_record(record: &mut DeploymentRecord, thresholds: &Thresholds) {
    let (burau, rate, disagreement) =
        classify(record.le, record.le_counting, thresholds);
    record.regime_burau = burau;
    record.regime_rate = rate;
    record.disagreement = disagreement;
}

/// Regime labels for a (temporal LE, counting LE) pair.
pub fn classify(le: f64, le_counting: f64, thresholds: &Thresholds) -> (Regime, Regime, Disagreement) {
    let burau = if le >= thresholds.theta_le {
        Regime::Dispersed
    } else {
        Regime::Focused
    };
    let rate = if le_counting >= thresholds.theta_rate {
        Regime::Dispersed
    } else {
        Regime::Focused
    };
    let disagreement = match (burau, rate) {
        (Regime::Focused, Regime::Dispersed) => Disagreement::Fd,
        (Regime::Dispersed, Regime::Focused) => Disagreement::Df,
        _ => Disagreement::None,
    };
    (burau, rate, disagreement)
}

/// Median of a sample; the mean of the two central values for even counts.
fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Corpus-median thresholds: per-SCC means of `le` and `le_counting` over
/// that SCC's WAR samples, then the median of those means across SCCs.
pub fn compute_thresholds(records: &[DeploymentRecord]) -> Result<Thresholds, ClassifyError> {
    if records.is_empty() {
        return Err(ClassifyError::EmptyCorpus);
    }
    let mut by_scc: std::collections::BTreeMap<u64, Vec<&DeploymentRecord>> =
        std::collections::BTreeMap::new();
    for r in records {
        by_scc.entry(r.scc_id).or_default().push(r);
    }
    if by_scc.len() < 2 {
        return Err(ClassifyError::TooFewSccs(by_scc.len()));
    }
    let mut le_means = Vec::with_capacity(by_scc.len());
    let mut rate_means = Vec::with_capacity(by_scc.len());
    for rows in by_scc.values() {
        let n = rows.len() as f64;
        le_means.push(rows.iter().map(|r| r.le).sum::<f64>() / n);
        rate_means.push(rows.iter().map(|r| r.le_counting).sum::<f64>() / n);
    }
    Ok(Thresholds {
        theta_le: median(&mut le_means),
        theta_rate: median(&mut rate_means),
        source: ThresholdSource::CorpusMedians,
    })
}

/// Per-SCC disagreement skew.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SccSkew {
    pub scc_id: u64,
    pub pairs: usize,
    pub fd: usize,
    pub df: usize,
}

/// Corpus-level FD/DF counts plus the per-SCC skew table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisagreementSummary {
    pub total: usize,
    pub fd: usize,
    pub df: usize,
    pub overflow_rows: usize,
    pub per_scc: Vec<SccSkew>,
}

impl DisagreementSummary {
    pub fn disagreements(&self) -> usize {
        self.fd + self.df
    }

    pub fn disagreement_rate(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.disagreements() as f64 / self.total as f64
        }
    }
}

pub fn disagreement_summary(records: &[DeploymentRecord]) -> DisagreementSummary {
    let mut per: std::collections::BTreeMap<u64, SccSkew> = std::collections::BTreeMap::new();
    let mut fd = 0;
    let mut df = 0;
    let mut overflow_rows = 0;
    for r in records {
        let entry = per.entry(r.scc_id).or_insert(SccSkew {
            scc_id: r.scc_id,
            pairs: 0,
            fd: 0,
            df: 0,
        });
        entry.pairs += 1;
        if r.overflow {
            overflow_rows += 1;
        }
        match r.disagreement {
            Disagreement::Fd => {
                fd += 1;
                entry.fd += 1;
            }
            Disagreement::Df => {
                df += 1;
                entry.df += 1;
            }
            Disagreement::None => {}
        }
    }
    DisagreementSummary {
        total: records.len(),
        fd,
        df,
        overflow_rows,
        per_scc: per.into_values().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(scc_id: u64, le: f64, rate: f64) -> DeploymentRecord {
        let mut r = DeploymentRecord {
            scc_id,
            war: vec![0; 6],
            le,
            le_counting: rate,
            n_triplets: 0.0,
            dws: 0,
            regime_burau: Regime::Focused,
            regime_rate: Regime::Focused,
            disagreement: Disagreement::None,
            overflow: false,
        };
        classify_record(&mut r, &Thresholds::paper());
        r
    }

    #[test]
    fn printed_case_rows_classify_as_printed() {
        assert_eq!(record(216, 0.460, 0.675).disagreement, Disagreement::Fd);
        assert_eq!(record(233, 0.587, 0.600).disagreement, Disagreement::Df);
        assert_eq!(record(0, 0.9, 0.9).disagreement, Disagreement::None);
    }

    #[test]
    fn boundary_is_inclusive_for_dispersed() {
        let r = record(0, PAPER_THETA_LE, PAPER_THETA_RATE);
        assert_eq!(r.regime_burau, Regime::Dispersed);
        assert_eq!(r.regime_rate, Regime::Dispersed);
        assert_eq!(r.disagreement, Disagreement::None);
    }

    #[test]
    fn fd_and_df_are_mutually_exclusive() {
        for le in [0.1, 0.5847, 0.9] {
            for rate in [0.1, 0.6586, 0.9] {
                let r = record(1, le, rate);
                let fd = r.disagreement == Disagreement::Fd;
                let df = r.disagreement == Disagreement::Df;
                assert!(!(fd && df));
                assert_eq!(
                    fd,
                    r.regime_burau == Regime::Focused && r.regime_rate == Regime::Dispersed
                );
                assert_eq!(
                    df,
                    r.regime_burau == Regime::Dispersed && r.regime_rate == Regime::Focused
                );
            }
        }
    }

    #[test]
    fn threshold_monotonicity() {
        // raising theta_le never converts focused-by-Burau to dispersed
        let mut th = Thresholds::paper();
        let base = record(0, 0.58, 0.5);
        assert_eq!(base.regime_burau, Regime::Focused);
        th.theta_le += 0.1;
        let (burau, _, _) = classify(base.le, base.le_counting, &th);
        assert_eq!(burau, Regime::Focused);
    }

    #[test]
    fn median_thresholds() {
        let records = vec![
            record(1, 0.4, 0.5),
            record(1, 0.4, 0.5),
            record(2, 0.8, 0.7),
        ];
        let th = compute_thresholds(&records).unwrap();
        assert_eq!(th.source, ThresholdSource::CorpusMedians);
        assert!((th.theta_le - 0.6).abs() < 1e-12);
        assert!((th.theta_rate - 0.6).abs() < 1e-12);

        // identical SCC copies: threshold equals the common mean
        let records = vec![record(1, 0.42, 0.61), record(2, 0.42, 0.61)];
        let th = compute_thresholds(&records).unwrap();
        assert!((th.theta_le - 0.42).abs() < 1e-12);

        assert!(compute_thresholds(&[]).is_err());
        assert!(compute_thresholds(&[record(1, 0.4, 0.4)]).is_err());
    }

    #[test]
    fn summary_counts_and_skew() {
        let records = vec![
            record(1, 0.4, 0.7), // FD
            record(1, 0.6, 0.6), // DF
            record(1, 0.7, 0.7), // none
            record(2, 0.4, 0.5), // none
        ];
        let s = disagreement_summary(&records);
        assert_eq!(s.total, 4);
        assert_eq!(s.fd, 1);
        assert_eq!(s.df, 1);
        assert_eq!(s.disagreements(), 2);
        assert_eq!(s.per_scc.len(), 2);
        assert_eq!(s.per_scc[0].fd, 1);
        assert_eq!(s.per_scc[0].df, 1);
        assert_eq!(s.per_scc[1].fd, 0);

        let all_agree = vec![record(1, 0.7, 0.7), record(2, 0.1, 0.1)];
        assert_eq!(disagreement_summary(&all_agree).disagreement_rate(), 0.0);
    }

    #[test]
    fn overflow_rows_never_disagree() {
        let mut r = record(5, 0.0, 0.0);
        r.overflow = true;
        classify_record(&mut r, &Thresholds::paper());
        assert_eq!(r.disagreement, Disagreement::None);
        assert_eq!(r.regime_burau, Regime::Focused);
    }
}
