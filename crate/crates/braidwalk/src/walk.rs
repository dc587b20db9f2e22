//! Gated multi-walker random walks that build braid traces.
//!
//! Per epoch every walker moves along a uniformly chosen out-arc; walkers are
//! then ranked by the WAR value of their landing vertex (ties by walker id),
//! and the gate is evaluated left-to-right over adjacent rank pairs with the
//! adjacent-pair guard. Each firing multiplies one injection-triplet matrix
//! into the exact running Burau product.

use crate::burau::{log_spectral_radius, ExactMatrix, LOG_SR_INJECTION};
use crate::graph::{PermissionGraph, WarAssignment};
use crate::rng::stream_rng;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WalkError {
    #[error("epochs must be even and at least 4, got {0}")]
    BadEpochs(usize),
    #[error("need at least 4 walkers, got {0}")]
    TooFewWalkers(usize),
    #[error("walks_per_pair must be at least 1")]
    NoWalks,
    #[error("graph is not a ratchet (no directed edge)")]
    NotRatchet,
    #[error("WAR assignment has {war_len} entries, graph has {vertices} vertices")]
    WarLengthMismatch { war_len: usize, vertices: usize },
}

/// Walk parameters. Defaults match the reference pipeline: one walker per
/// vertex of a 6-vertex SCC, 50 epochs, 64 walks per (SCC, WAR) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub n_walkers: usize,
    /// Total walk length T_high; the LE window is its second half.
    pub epochs: usize,
    pub walks_per_pair: usize,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            n_walkers: 6,
            epochs: 50,
            walks_per_pair: 64,
            seed: 0,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<(), WalkError> {
        if self.epochs < 4 || self.epochs % 2 != 0 {
            return Err(WalkError::BadEpochs(self.epochs));
        }
        if self.n_walkers < 4 {
            return Err(WalkError::TooFewWalkers(self.n_walkers));
        }
        if self.walks_per_pair == 0 {
            return Err(WalkError::NoWalks);
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// One gate firing: which injection position fired at which epoch (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Firing {
    pub epoch: u32,
    pub position: u8,
}

/// Ordered firing record of one walk plus its log-SR snapshots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BraidTrace {
    pub n_strands: usize,
    pub epochs: usize,
    pub firings: Vec<Firing>,
    pub log_sr_low: f64,
    pub log_sr_high: f64,
}

impl BraidTrace {
    pub fn positions(&self) -> Vec<u8> {
        self.firings.iter().map(|f| f.position).collect()
    }

    pub fn distinct_positions(&self) -> usize {
        let mut seen = [false; 256];
        let mut count = 0;
        for f in &self.firings {
            if !seen[f.position as usize] {
                seen[f.position as usize] = true;
                count += 1;
            }
        }
        count
    }

    /// Cumulative firing count at the end of the given epoch.
    pub fn cumulative_firings(&self, epoch: usize) -> usize {
        self.firings.iter().filter(|f| (f.epoch as usize) <= epoch).count()
    }

    /// Firing counts indexed by epoch (entry 0 unused; epochs are 1-based).
    pub fn per_epoch_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.epochs + 1];
        for f in &self.firings {
            counts[f.epoch as usize] += 1;
        }
        counts
    }

    /// Guard invariant: within one epoch, no two firings at adjacent
    /// positions.
    pub fn guard_holds(&self) -> bool {
        self.firings.windows(2).all(|w| {
            w[0].epoch != w[1].epoch || w[0].position.abs_diff(w[1].position) >= 2
        })
    }
}

/// Per-walk outputs: temporal LE, counting LE (windowed and whole-walk),
/// T-scaling ratio and the underlying trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkResult {
    pub le: f64,
    /// Counting LE over the same window as `le`.
    pub le_counting: f64,
    /// Whole-walk counting LE, `M_T log(2+sqrt(3)) / T`.
    pub le_counting_full: f64,
    /// Ratio of successive log-SR increments; `None` when the first window
    /// shows no growth.
    pub t_scaling: Option<f64>,
    pub n_triplets: usize,
    pub log_sr_low: f64,
    pub log_sr_high: f64,
    pub trace: BraidTrace,
}

/// One traversed arc of the current epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Traversal {
    pub from: usize,
    pub to: usize,
    pub directed: bool,
}

/// Total strand order: primary key WAR of the occupied vertex, secondary key
/// walker id. Returns walker ids from lowest rank to highest.
pub fn strand_order(positions: &[usize], w: &WarAssignment) -> Vec<usize> {
    let mut order: Vec<usize> = (0..positions.len()).collect();
    order.sort_by_key(|&walker| (w.get(positions[walker]), walker));
    order
}

/// Moves every walker independently along a uniformly chosen out-arc,
/// returning the traversals aligned with walker ids.
pub fn step_walkers<R: Rng>(
    g: &PermissionGraph,
    positions: &mut [usize],
    rng: &mut R,
) -> Vec<Traversal> {
    positions
        .iter_mut()
        .map(|pos| {
            let arcs = g.out_arcs(*pos);
            let arc = arcs[rng.random_range(0..arcs.len())];
            let t = Traversal {
                from: *pos,
                to: arc.to,
                directed: arc.directed,
            };
            *pos = arc.to;
            t
        })
        .collect()
}

/// Scans rank pairs left-to-right and returns the fired positions in scan
/// order. A pair fires iff both walkers traversed directed arcs with
/// strictly positive WAR flow; when position `p` fires, position `p+1` is
/// skipped (the adjacent-pair guard).
pub fn evaluate_gate(
    w: &WarAssignment,
    ranking: &[usize],
    traversals: &[Traversal],
) -> Vec<usize> {
    let n = ranking.len();
    if n < 3 {
        return Vec::new();
    }
    let ascending_directed = |walker: usize| {
        let t = &traversals[walker];
        t.directed && i64::from(w.get(t.to)) > i64::from(w.get(t.from))
    };
    let mut fired = Vec::new();
    let mut skip_next = false;
    for p in 0..=n - 3 {
        if skip_next {
            skip_next = false;
            continue;
        }
        if ascending_directed(ranking[p]) && ascending_directed(ranking[p + 1]) {
            fired.push(p);
            skip_next = true;
        }
    }
    fired
}

/// Runs one walk. `(config.seed, walk_index)` fully determines the outcome:
/// start positions are uniform, and each epoch moves, ranks, gates and
/// multiplies the fired triplets into the exact product in scan order.
pub fn simulate_walk(
    g: &PermissionGraph,
    w: &WarAssignment,
    config: &WalkConfig,
    walk_index: u64,
) -> WalkResult {
    debug_assert!(config.validate().is_ok());
    debug_assert_eq!(w.len(), g.n());
    let mut rng = stream_rng(config.seed, &[walk_index]);
    let n = config.n_walkers;
    let epochs = config.epochs;
    let t_quarter = epochs / 4;
    let t_low = epochs / 2;

    let mut positions: Vec<usize> = (0..n).map(|_| rng.random_range(0..g.n())).collect();
    let mut product = ExactMatrix::identity(n);
    let mut firings: Vec<Firing> = Vec::new();

    let mut log_sr_quarter = 0.0;
    let mut log_sr_low = 0.0;
    let mut m_low = 0usize;
    let mut log_sr_high = 0.0;

    for epoch in 1..=epochs {
        let traversals = step_walkers(g, &mut positions, &mut rng);
        let ranking = strand_order(&positions, w);
        for p in evaluate_gate(w, &ranking, &traversals) {
            product.right_mul_triplet(p);
            firings.push(Firing {
                epoch: epoch as u32,
                position: p as u8,
            });
        }
        if epoch == t_quarter {
            log_sr_quarter = log_spectral_radius(&product);
        }
        if epoch == t_low {
            log_sr_low = log_spectral_radius(&product);
            m_low = firings.len();
        }
        if epoch == epochs {
            log_sr_high = log_spectral_radius(&product);
        }
    }

    let m_high = firings.len();
    let window = (epochs - t_low) as f64;
    let le = (log_sr_high - log_sr_low) / window;
    let le_counting = (m_high - m_low) as f64 * LOG_SR_INJECTION / window;
    let le_counting_full = m_high as f64 * LOG_SR_INJECTION / epochs as f64;
    let delta_high = log_sr_high - log_sr_low;
    let delta_low = log_sr_low - log_sr_quarter;
    let t_scaling = (delta_low.abs() > 1e-12).then(|| delta_high / delta_low);

    WalkResult {
        le,
        le_counting,
        le_counting_full,
        t_scaling,
        n_triplets: m_high,
        log_sr_low,
        log_sr_high,
        trace: BraidTrace {
            n_strands: n,
            epochs,
            firings,
            log_sr_low,
            log_sr_high,
        },
    }
}

/// All walks of one (SCC, WAR) pair, in walk-index order. Walks run in
/// parallel; per-walk seeds derive from `(config.seed, walk_index)` so the
/// result is identical at any thread count.
pub fn run_walks(
    g: &PermissionGraph,
    w: &WarAssignment,
    config: &WalkConfig,
) -> Result<Vec<WalkResult>, WalkError> {
    config.validate()?;
    if !g.is_ratchet() {
        return Err(WalkError::NotRatchet);
    }
    if w.len() != g.n() {
        return Err(WalkError::WarLengthMismatch {
            war_len: w.len(),
            vertices: g.n(),
        });
    }
    Ok((0..config.walks_per_pair as u64)
        .into_par_iter()
        .map(|i| simulate_walk(g, w, config, i))
        .collect())
}

/// Means across the walks of one pair, aggregated in walk-index order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairAggregate {
    pub walks: usize,
    pub mean_le: f64,
    pub mean_le_counting: f64,
    pub mean_le_counting_full: f64,
    pub mean_n_triplets: f64,
    pub mean_log_sr_high: f64,
    /// Mean over walks whose T-scaling ratio is defined.
    pub mean_t_scaling: Option<f64>,
    pub t_scaling_defined: usize,
    /// Walks violating the counting-dominance bound `le <= le_counting`.
    pub walks_le_exceeding_counting: usize,
}

pub fn aggregate(results: &[WalkResult]) -> PairAggregate {
    let walks = results.len();
    let n = walks as f64;
    let mean = |f: &dyn Fn(&WalkResult) -> f64| results.iter().map(|r| f(r)).sum::<f64>() / n;
    let scalings: Vec<f64> = results.iter().filter_map(|r| r.t_scaling).collect();
    PairAggregate {
        walks,
        mean_le: mean(&|r| r.le),
        mean_le_counting: mean(&|r| r.le_counting),
        mean_le_counting_full: mean(&|r| r.le_counting_full),
        mean_n_triplets: mean(&|r| r.n_triplets as f64),
        mean_log_sr_high: mean(&|r| r.log_sr_high),
        mean_t_scaling: (!scalings.is_empty())
            .then(|| scalings.iter().sum::<f64>() / scalings.len() as f64),
        t_scaling_defined: scalings.len(),
        walks_le_exceeding_counting: results
            .iter()
            .filter(|r| r.le > r.le_counting + 1e-12)
            .count(),
    }
}

/// Runs `walks_per_pair` walks and returns their means.
pub fn run_pair(
    g: &PermissionGraph,
    w: &WarAssignment,
    config: &WalkConfig,
) -> Result<PairAggregate, WalkError> {
    Ok(aggregate(&run_walks(g, w, config)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::burau::triplet_word_product;

    fn ring_graph() -> PermissionGraph {
        // directed 3-cycle plus bidirectional chords; every vertex has
        // out-degree >= 2 so walks are not deterministic
        PermissionGraph::new(
            6,
            &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)],
            &[(0, 3), (1, 4), (2, 5)],
        )
        .unwrap()
    }

    fn scc216() -> PermissionGraph {
        PermissionGraph::new(
            6,
            &[
                (1, 0),
                (0, 2),
                (0, 3),
                (1, 2),
                (3, 1),
                (5, 1),
                (3, 4),
                (3, 5),
                (4, 5),
            ],
            &[(2, 4), (2, 5)],
        )
        .unwrap()
    }

    #[test]
    fn strand_order_tiebreaks_by_walker_id() {
        let w = WarAssignment::new(vec![3, 1, 2]);
        // all walkers on one vertex: pure id order
        assert_eq!(strand_order(&[1, 1, 1], &w), vec![0, 1, 2]);
        // walker i on vertex i with WAR (3,1,2): walker1 < walker2 < walker0
        assert_eq!(strand_order(&[0, 1, 2], &w), vec![1, 2, 0]);
    }

    #[test]
    fn single_out_arc_moves_deterministically() {
        let g = PermissionGraph::new(3, &[(0, 1), (1, 2), (2, 0)], &[]).unwrap();
        let mut rng = stream_rng(1, &[0]);
        let mut positions = vec![0, 1, 2];
        let ts = step_walkers(&g, &mut positions, &mut rng);
        assert_eq!(positions, vec![1, 2, 0]);
        assert!(ts.iter().all(|t| t.directed));
    }

    #[test]
    fn walkers_stay_on_graph_and_arcs_are_uniform() {
        let g = ring_graph();
        let mut rng = stream_rng(42, &[7]);
        let mut positions = vec![0; 1];
        let mut counts = std::collections::HashMap::new();
        let trials = 100_000;
        for _ in 0..trials {
            positions[0] = 0;
            let t = step_walkers(&g, &mut positions, &mut rng)[0];
            *counts.entry(t.to).or_insert(0usize) += 1;
        }
        // vertex 0 has arcs to 1 (directed) and 3 (bidirectional):
        // each frequency within 3 sigma of 1/2
        let sigma = (0.5 * 0.5 / trials as f64).sqrt();
        for (_, &c) in counts.iter() {
            let freq = c as f64 / trials as f64;
            assert!((freq - 0.5).abs() < 3.0 * sigma + 1e-9, "freq {freq}");
        }
        assert_eq!(counts.len(), 2);
    }

    #[test]
    fn gate_requires_directed_ascending_on_both() {
        let w = WarAssignment::new(vec![0, 1, 2, 3, 4, 5]);
        let ranking = vec![0, 1, 2, 3, 4, 5];
        let asc = |from, to| Traversal { from, to, directed: true };
        let bidir = |from, to| Traversal { from, to, directed: false };
        // both adjacent walkers ascend on directed arcs: fire at 0
        let ts = vec![asc(0, 1), asc(1, 2), bidir(2, 3), asc(3, 3), asc(4, 4), asc(5, 5)];
        assert_eq!(evaluate_gate(&w, &ranking, &ts), vec![0]);
        // one walker on a bidirectional arc blocks its pairs
        let ts = vec![bidir(0, 1), asc(1, 2), bidir(2, 3), bidir(3, 4), bidir(4, 5), bidir(5, 0)];
        assert_eq!(evaluate_gate(&w, &ranking, &ts), Vec::<usize>::new());
        // descending directed arcs do not fire
        let ts = vec![asc(1, 0), asc(2, 1), asc(3, 2), asc(4, 3), asc(5, 4), asc(5, 4)];
        assert_eq!(evaluate_gate(&w, &ranking, &ts), Vec::<usize>::new());
    }

    #[test]
    fn guard_skips_position_after_fire() {
        let w = WarAssignment::new(vec![0, 1, 2, 3, 4, 5]);
        let ranking = vec![0, 1, 2, 3, 4, 5];
        let asc = |from, to| Traversal { from, to, directed: true };
        // positions 0, 1, 2 all eligible: fires at 0 and 2 only
        let ts = vec![asc(0, 1), asc(1, 2), asc(2, 3), asc(3, 4), asc(4, 5), asc(4, 5)];
        let fired = evaluate_gate(&w, &ranking, &ts);
        assert_eq!(fired, vec![0, 2]);
    }

    #[test]
    fn no_ascending_edges_means_zero_triplets() {
        // all-flat WAR: the gate can never fire
        let g = scc216();
        let w = WarAssignment::new(vec![2; 6]);
        let cfg = WalkConfig {
            walks_per_pair: 4,
            seed: 9,
            ..WalkConfig::default()
        };
        for r in run_walks(&g, &w, &cfg).unwrap() {
            assert_eq!(r.n_triplets, 0);
            assert_eq!(r.le, 0.0);
            assert_eq!(r.le_counting, 0.0);
            assert_eq!(r.t_scaling, None);
        }
    }

    #[test]
    fn forced_single_position_trace_gives_injection_le() {
        // one firing at position 0 every epoch: le = log(2 + sqrt(3))
        let epochs = 20usize;
        let positions = vec![0u8; epochs];
        let prefix_low = triplet_word_product(6, &positions[..epochs / 2]);
        let full = triplet_word_product(6, &positions);
        let lsl = log_spectral_radius(&prefix_low);
        let lsh = log_spectral_radius(&full);
        let le = (lsh - lsl) / (epochs - epochs / 2) as f64;
        assert!((le - LOG_SR_INJECTION).abs() < 1e-9, "le = {le}");
    }

    #[test]
    fn monotone_log_sr_under_single_position_growth() {
        let mut prev = 0.0;
        for k in 1..=30 {
            let m = triplet_word_product(6, &vec![2u8; k]);
            let lsr = log_spectral_radius(&m);
            assert!(lsr >= prev - 1e-9, "k={k}: {lsr} < {prev}");
            prev = lsr;
        }
    }

    #[test]
    fn determinism_and_guard_invariant() {
        let g = scc216();
        let w = WarAssignment::new(vec![0, 2, 0, 0, 3, 4]);
        let cfg = WalkConfig {
            walks_per_pair: 8,
            seed: 1234,
            ..WalkConfig::default()
        };
        let a = run_walks(&g, &w, &cfg).unwrap();
        let b = run_walks(&g, &w, &cfg).unwrap();
        assert_eq!(a, b);
        for r in &a {
            assert!(r.trace.guard_holds());
            assert_eq!(r.n_triplets, r.trace.firings.len());
            assert!(r.le_counting >= 0.0);
        }
        // distinct walk indices give distinct traces (overwhelmingly)
        assert_ne!(a[0].trace, a[1].trace);
    }

    #[test]
    fn trace_replay_reconstructs_log_sr() {
        let g = scc216();
        let w = WarAssignment::new(vec![0, 2, 0, 0, 3, 4]);
        let cfg = WalkConfig {
            walks_per_pair: 4,
            seed: 77,
            ..WalkConfig::default()
        };
        for r in run_walks(&g, &w, &cfg).unwrap() {
            let m = triplet_word_product(r.trace.n_strands, &r.trace.positions());
            let replayed = log_spectral_radius(&m);
            assert!(
                (replayed - r.log_sr_high).abs() < 1e-9,
                "replayed {replayed} vs {}",
                r.log_sr_high
            );
        }
    }

    #[test]
    fn counting_window_matches_le_window() {
        let g = scc216();
        let w = WarAssignment::new(vec![0, 2, 0, 0, 3, 4]);
        let cfg = WalkConfig {
            walks_per_pair: 1,
            seed: 5,
            ..WalkConfig::default()
        };
        let r = &run_walks(&g, &w, &cfg).unwrap()[0];
        let m_low = r.trace.cumulative_firings(cfg.epochs / 2);
        let m_high = r.trace.cumulative_firings(cfg.epochs);
        let window = (cfg.epochs - cfg.epochs / 2) as f64;
        let expected = (m_high - m_low) as f64 * LOG_SR_INJECTION / window;
        assert!((r.le_counting - expected).abs() < 1e-12);
        let expected_full = m_high as f64 * LOG_SR_INJECTION / cfg.epochs as f64;
        assert!((r.le_counting_full - expected_full).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(WalkConfig::default().validate().is_ok());
        assert!(WalkConfig { epochs: 7, ..Default::default() }.validate().is_err());
        assert!(WalkConfig { epochs: 2, ..Default::default() }.validate().is_err());
        assert!(WalkConfig { n_walkers: 3, ..Default::default() }.validate().is_err());
        let oscillator = PermissionGraph::new(3, &[], &[(0, 1), (1, 2)]).unwrap();
        let w = WarAssignment::new(vec![0, 1, 2]);
        assert!(matches!(
            run_walks(&oscillator, &w, &WalkConfig::default()),
            Err(WalkError::NotRatchet)
        ));
    }

    #[test]
    fn walks_per_pair_one_equals_single_walk() {
        let g = scc216();
        let w = WarAssignment::new(vec![0, 3, 0, 0, 4, 5]);
        let cfg = WalkConfig {
            walks_per_pair: 1,
            seed: 3,
            ..WalkConfig::default()
        };
        let single = simulate_walk(&g, &w, &cfg, 0);
        let agg = run_pair(&g, &w, &cfg).unwrap();
        assert_eq!(agg.walks, 1);
        assert!((agg.mean_le - single.le).abs() < 1e-15);
        assert!((agg.mean_le_counting - single.le_counting).abs() < 1e-15);
        assert!((agg.mean_n_triplets - single.n_triplets as f64).abs() < 1e-15);
    }
}
