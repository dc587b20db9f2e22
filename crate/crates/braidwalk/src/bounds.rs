//! Topology-derived lower bounds on spoke-step probability, gate-firing rate
//! and counting LE, plus their empirical verification against simulation.

use crate::burau::LOG_SR_INJECTION;
use crate::graph::{detect_hubs, HubReport, PermissionGraph, WarAssignment};
use crate::rng::stream_rng;
use crate::walk::{evaluate_gate, run_walks, step_walkers, strand_order, WalkConfig, WalkError};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Spoke-step probability floors for one hub.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpokeBounds {
    /// `k / (N d_max^(diam+1))`: holds for every k-hub.
    pub p_universal: f64,
    /// `k / d_max^2` under full spoke coverage, `1 / d_max^2` under weak
    /// coverage, `None` when the hub is not spoke-covered.
    pub p_covered: Option<f64>,
}

/// Lower bounds on the per-walker spoke-step probability.
pub fn spoke_step_bound(hub: &HubReport, n_vertices: usize) -> SpokeBounds {
    let k = hub.k as f64;
    let d = hub.d_max as f64;
    let p_universal = k / (n_vertices as f64 * d.powi(hub.diameter as i32 + 1));
    let p_covered = if hub.fully_spoke_covered {
        Some(k / (d * d))
    } else if hub.spoke_covered {
        Some(1.0 / (d * d))
    } else {
        None
    };
    SpokeBounds {
        p_universal,
        p_covered,
    }
}

/// Expected gate-firing floor over `epochs` epochs:
/// `T floor((n-1)/2) p_h^2`.
pub fn firing_rate_bound(p_h: f64, n_walkers: usize, epochs: usize) -> f64 {
    epochs as f64 * ((n_walkers - 1) / 2) as f64 * p_h * p_h
}

/// Counting-LE floor for the pipeline's walker count (`floor((n-1)/2) = 2`
/// at n = 6): `2 p_h^2 log(2 + sqrt(3))`.
pub fn counting_le_bound(p_h: f64) -> f64 {
    2.0 * p_h * p_h * LOG_SR_INJECTION
}

/// Substituted universal closed form:
/// `k^2 log(2+sqrt(3)) / (2 N^2 d_max^(2(D+1)))`.
pub fn counting_le_bound_universal(
    k: usize,
    n_vertices: usize,
    diameter: usize,
    d_max: usize,
) -> f64 {
    let d = d_max as f64;
    (k * k) as f64 * LOG_SR_INJECTION
        / (2.0 * (n_vertices * n_vertices) as f64 * d.powi(2 * (diameter as i32 + 1)))
}

/// Substituted spoke-covered closed form, independent of `N` and `D`:
/// `k^2 log(2+sqrt(3)) / (2 d_max^4)`.
pub fn counting_le_bound_covered(k: usize, d_max: usize) -> f64 {
    let d = d_max as f64;
    (k * k) as f64 * LOG_SR_INJECTION / (2.0 * d.powi(4))
}

/// Per-bound verification flags: empirical value at least the floor, within
/// a 3-standard-error Monte Carlo margin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundChecks {
    pub spoke_universal_ok: bool,
    pub spoke_covered_ok: Option<bool>,
    pub firing_ok: bool,
    pub counting_le_ok: bool,
}

/// Empirical verification of the lower bounds on one (graph, WAR) fixture.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    /// Hub chosen for verification (max covered bound, ties by vertex id);
    /// `None` when the assignment has no k-hub and the bounds are vacuous.
    pub hub: Option<HubReport>,
    pub applicable: bool,
    pub p_universal: f64,
    pub p_covered: Option<f64>,
    /// Firing floor per epoch from the best applicable spoke bound.
    pub expected_firing_rate_lower: f64,
    pub le_count_lower: f64,
    pub empirical_spoke_rate: f64,
    pub empirical_firing_rate: f64,
    pub empirical_le_counting: f64,
    pub runs: usize,
    pub epochs_measured: usize,
    pub burn_in: usize,
    pub checks: Option<BoundChecks>,
    /// Mean of per-run `le / le_counting` over runs with positive counting
    /// rate; the counting-vs-temporal gap is directional (c <= 1).
    pub mean_cancellation_factor: Option<f64>,
}

/// Runs `runs` seeded simulations measuring the empirical spoke-step
/// frequency (after a burn-in of `10 N` epochs) and the gate-firing rate,
/// then checks them against the theoretical floors.
pub fn verify_bounds(
    g: &PermissionGraph,
    w: &WarAssignment,
    config: &WalkConfig,
    runs: usize,
) -> Result<BoundReport, WalkError> {
    config.validate()?;
    if !g.is_ratchet() {
        return Err(WalkError::NotRatchet);
    }
    let burn_in = 10 * g.n();
    let hubs = detect_hubs(g, w);
    // pick the hub maximizing the covered bound, falling back to the best
    // universal bound; ties broken by vertex id (detect_hubs order)
    let hub = hubs
        .iter()
        .max_by(|a, b| {
            let key = |h: &HubReport| {
                let b = spoke_step_bound(h, g.n());
                (
                    b.p_covered.unwrap_or(0.0),
                    b.p_universal,
                    std::cmp::Reverse(h.hub),
                )
            };
            key(a)
                .partial_cmp(&key(b))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .cloned();

    let Some(hub) = hub else {
        return Ok(BoundReport {
            hub: None,
            applicable: false,
            p_universal: 0.0,
            p_covered: None,
            expected_firing_rate_lower: 0.0,
            le_count_lower: 0.0,
            empirical_spoke_rate: 0.0,
            empirical_firing_rate: 0.0,
            empirical_le_counting: 0.0,
            runs,
            epochs_measured: config.epochs,
            burn_in,
            checks: None,
            mean_cancellation_factor: None,
        });
    };

    let bounds = spoke_step_bound(&hub, g.n());
    let p_floor = bounds.p_covered.unwrap_or(bounds.p_universal);
    let pair_coeff = ((config.n_walkers - 1) / 2) as f64;
    let firing_floor = pair_coeff * p_floor * p_floor;
    let le_floor = firing_floor * LOG_SR_INJECTION;

    // per-run measurement: spoke steps per walker-step and firings per epoch
    let spoke_edges: Vec<(usize, usize)> =
        hub.spokes.iter().map(|&s| (s, hub.hub)).collect();
    let per_run: Vec<(f64, f64, f64, f64)> = (0..runs as u64)
        .into_par_iter()
        .map(|run| {
            let mut rng = stream_rng(config.seed, &[run]);
            let n = config.n_walkers;
            let mut positions: Vec<usize> =
                (0..n).map(|_| rng.random_range(0..g.n())).collect();
            for _ in 0..burn_in {
                step_walkers(g, &mut positions, &mut rng);
            }
            let mut spoke_steps = 0usize;
            let mut firings = 0usize;
            let mut log_growth = 0.0;
            for _ in 0..config.epochs {
                let traversals = step_walkers(g, &mut positions, &mut rng);
                for t in &traversals {
                    if t.directed && spoke_edges.contains(&(t.from, t.to)) {
                        spoke_steps += 1;
                    }
                }
                let ranking = strand_order(&positions, w);
                let fired = evaluate_gate(w, &ranking, &traversals).len();
                firings += fired;
                log_growth += fired as f64 * LOG_SR_INJECTION;
            }
            let spoke_rate = spoke_steps as f64 / (n * config.epochs) as f64;
            let firing_rate = firings as f64 / config.epochs as f64;
            let le_counting = log_growth / config.epochs as f64;
            (spoke_rate, firing_rate, le_counting, firings as f64)
        })
        .collect();

    let nr = runs as f64;
    let mean = |f: &dyn Fn(&(f64, f64, f64, f64)) -> f64| {
        per_run.iter().map(|r| f(r)).sum::<f64>() / nr
    };
    let spoke_rate = mean(&|r| r.0);
    let firing_rate = mean(&|r| r.1);
    let le_counting = mean(&|r| r.2);

    // 3-standard-error margins from the run-to-run spread
    let se = |f: &dyn Fn(&(f64, f64, f64, f64)) -> f64, m: f64| {
        if runs < 2 {
            return 0.0;
        }
        let var = per_run.iter().map(|r| (f(r) - m).powi(2)).sum::<f64>() / (nr - 1.0);
        (var / nr).sqrt()
    };
    let spoke_se = se(&|r| r.0, spoke_rate);
    let firing_se = se(&|r| r.1, firing_rate);
    let le_se = se(&|r| r.2, le_counting);

    let checks = BoundChecks {
        spoke_universal_ok: spoke_rate + 3.0 * spoke_se >= bounds.p_universal,
        spoke_covered_ok: bounds
            .p_covered
            .map(|p| spoke_rate + 3.0 * spoke_se >= p),
        firing_ok: firing_rate + 3.0 * firing_se >= firing_floor,
        counting_le_ok: le_counting + 3.0 * le_se >= le_floor,
    };

    // counting-vs-temporal gap on full walks of the same fixture
    let cancellations: Vec<f64> = run_walks(g, w, config)?
        .iter()
        .filter(|r| r.le_counting > 0.0)
        .map(|r| r.le / r.le_counting)
        .collect();
    let mean_cancellation_factor = (!cancellations.is_empty())
        .then(|| cancellations.iter().sum::<f64>() / cancellations.len() as f64);

    Ok(BoundReport {
        hub: Some(hub),
        applicable: true,
        p_universal: bounds.p_universal,
        p_covered: bounds.p_covered,
        expected_firing_rate_lower: firing_floor,
        le_count_lower: le_floor,
        empirical_spoke_rate: spoke_rate,
        empirical_firing_rate: firing_rate,
        empirical_le_counting: le_counting,
        runs,
        epochs_measured: config.epochs,
        burn_in,
        checks: Some(checks),
        mean_cancellation_factor,
    })
}

/// Spoke-covered 3-hub fixture used by the verification suite: hub 5 with
/// spokes {0, 1, 2}, every non-hub vertex has an arc into the spoke set, and
/// the only ascending directed arcs are the spoke edges.
pub fn spoke_covered_fixture() -> (PermissionGraph, WarAssignment) {
    let g = PermissionGraph::new(
        6,
        &[
            (0, 5),
            (1, 5),
            (2, 5),
            (5, 3),
            (5, 4),
            (3, 0),
            (3, 1),
            (3, 2),
            (4, 0),
            (4, 1),
            (4, 2),
        ],
        &[(0, 1), (1, 2), (3, 4)],
    )
    .expect("fixture is valid");
    let w = WarAssignment::new(vec![0, 0, 0, 1, 1, 5]);
    (g, w)
}
