//! Mixed permission graphs: validation, WAR-flow statistics, hub structure,
//! and distance measures.
//!
//! A graph holds directed edges (irreversible transitions) and bidirectional
//! edges (reversible ones). Bidirectional edges expand to two arcs for walks,
//! degree counts and diameter, but are excluded from DWS and from gate
//! eligibility.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Raw edge lists as they appear in graph JSON:
/// `{"n": int, "directed": [[u,v],...], "bidirectional": [[u,v],...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphData {
    pub n: usize,
    pub directed: Vec<[usize; 2]>,
    pub bidirectional: Vec<[usize; 2]>,
}

/// Per-vertex privilege scalar (the WAR norm), serialized as `[w0,...,wn-1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WarAssignment {
    values: Vec<u32>,
}

impl WarAssignment {
    pub fn new(values: Vec<u32>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, vertex: usize) -> u32 {
        self.values[vertex]
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// Entrywise sum; DWS is linear under this addition.
    pub fn add(&self, other: &WarAssignment) -> WarAssignment {
        assert_eq!(self.len(), other.len());
        WarAssignment::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl From<Vec<u32>> for WarAssignment {
    fn from(values: Vec<u32>) -> Self {
        Self::new(values)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("edge ({0}, {1}) references a vertex outside 0..{2}")]
    VertexOutOfRange(usize, usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate directed edge ({0}, {1})")]
    DuplicateDirected(usize, usize),
    #[error("duplicate bidirectional edge {{{0}, {1}}}")]
    DuplicateBidirectional(usize, usize),
    #[error("reversible pair: both ({0}, {1}) and ({1}, {0}) submitted as directed")]
    ReversiblePair(usize, usize),
    #[error("pair {{{0}, {1}}} appears both as directed and bidirectional")]
    MixedPair(usize, usize),
}

/// Validation outcome: invariant violations plus connectivity/ratchet status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub strongly_connected: bool,
    /// At least one directed (irreversible) edge.
    pub ratchet: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty() && self.strongly_connected
    }

    pub fn is_valid_ratchet(&self) -> bool {
        self.is_valid() && self.ratchet
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "strongly_connected: {}", self.strongly_connected)?;
        writeln!(f, "ratchet: {}", self.ratchet)?;
        if self.violations.is_empty() {
            write!(f, "violations: none")
        } else {
            write!(f, "violations:")?;
            for v in &self.violations {
                write!(f, "\n  - {v}")?;
            }
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("edge ({0}, {1}) is not an arc of the graph")]
    NoSuchArc(usize, usize),
    #[error("WAR assignment has {war_len} entries, graph has {vertices} vertices")]
    WarLengthMismatch { war_len: usize, vertices: usize },
}

/// One usable out-arc of a vertex. Bidirectional edges contribute one arc in
/// each direction with `directed == false`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub to: usize,
    pub directed: bool,
}

/// Checks raw edge lists against the structural invariants and reports
/// strong-connectivity and ratchet status. Never panics on malformed input.
pub fn validate_graph(data: &GraphData) -> ValidationReport {
    let n = data.n;
    let mut violations = Vec::new();
    if n == 0 {
        violations.push(Violation::EmptyGraph);
    }
    let mut directed_seen: Vec<(usize, usize)> = Vec::new();
    let mut bidir_seen: Vec<(usize, usize)> = Vec::new();

    for &[u, v] in &data.directed {
        if u >= n || v >= n {
            violations.push(Violation::VertexOutOfRange(u, v, n));
            continue;
        }
        if u == v {
            violations.push(Violation::SelfLoop(u));
            continue;
        }
        if directed_seen.contains(&(u, v)) {
            violations.push(Violation::DuplicateDirected(u, v));
            continue;
        }
        if directed_seen.contains(&(v, u)) {
            violations.push(Violation::ReversiblePair(v, u));
            continue;
        }
        directed_seen.push((u, v));
    }
    for &[u, v] in &data.bidirectional {
        if u >= n || v >= n {
            violations.push(Violation::VertexOutOfRange(u, v, n));
            continue;
        }
        if u == v {
            violations.push(Violation::SelfLoop(u));
            continue;
        }
        let key = (u.min(v), u.max(v));
        if bidir_seen.contains(&key) {
            violations.push(Violation::DuplicateBidirectional(key.0, key.1));
            continue;
        }
        bidir_seen.push(key);
    }
    // directed and bidirectional sets must be disjoint as unordered pairs
    for &(u, v) in &directed_seen {
        let key = (u.min(v), u.max(v));
        if bidir_seen.contains(&key) {
            violations.push(Violation::MixedPair(key.0, key.1));
        }
    }

    let (strongly_connected, ratchet) = if n == 0 {
        (false, false)
    } else {
        let mut fwd = vec![Vec::new(); n];
        let mut rev = vec![Vec::new(); n];
        for &(u, v) in &directed_seen {
            fwd[u].push(v);
            rev[v].push(u);
        }
        for &(u, v) in &bidir_seen {
            fwd[u].push(v);
            fwd[v].push(u);
            rev[u].push(v);
            rev[v].push(u);
        }
        let sc = reaches_all(&fwd, 0) && reaches_all(&rev, 0);
        (sc, !directed_seen.is_empty())
    };

    ValidationReport {
        violations,
        strongly_connected,
        ratchet,
    }
}

fn reaches_all(adj: &[Vec<usize>], start: usize) -> bool {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == n
}

/// A validated mixed permission graph whose induced directed graph is
/// strongly connected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermissionGraph {
    n: usize,
    directed: Vec<(usize, usize)>,
    bidirectional: Vec<(usize, usize)>,
    arcs: Vec<Vec<Arc>>,
}

impl PermissionGraph {
    pub fn from_data(data: &GraphData) -> Result<Self, GraphError> {
        let report = validate_graph(data);
        if !report.is_valid() {
            return Err(GraphError::Invalid(report.to_string()));
        }
        let directed: Vec<(usize, usize)> = data.directed.iter().map(|&[u, v]| (u, v)).collect();
        let bidirectional: Vec<(usize, usize)> = data
            .bidirectional
            .iter()
            .map(|&[u, v]| (u.min(v), u.max(v)))
            .collect();
        let mut arcs = vec![Vec::new(); data.n];
        for &(u, v) in &directed {
            arcs[u].push(Arc { to: v, directed: true });
        }
        for &(u, v) in &bidirectional {
            arcs[u].push(Arc { to: v, directed: false });
            arcs[v].push(Arc { to: u, directed: false });
        }
        Ok(Self {
            n: data.n,
            directed,
            bidirectional,
            arcs,
        })
    }

    pub fn new(
        n: usize,
        directed: &[(usize, usize)],
        bidirectional: &[(usize, usize)],
    ) -> Result<Self, GraphError> {
        Self::from_data(&GraphData {
            n,
            directed: directed.iter().map(|&(u, v)| [u, v]).collect(),
            bidirectional: bidirectional.iter().map(|&(u, v)| [u, v]).collect(),
        })
    }

    pub fn to_data(&self) -> GraphData {
        GraphData {
            n: self.n,
            directed: self.directed.iter().map(|&(u, v)| [u, v]).collect(),
            bidirectional: self.bidirectional.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn directed_edges(&self) -> &[(usize, usize)] {
        &self.directed
    }

    pub fn bidirectional_edges(&self) -> &[(usize, usize)] {
        &self.bidirectional
    }

    pub fn is_ratchet(&self) -> bool {
        !self.directed.is_empty()
    }

    pub fn out_arcs(&self, vertex: usize) -> &[Arc] {
        &self.arcs[vertex]
    }

    /// Out-degree counting directed out-arcs plus one arc per incident
    /// bidirectional edge.
    pub fn out_degree(&self, vertex: usize) -> usize {
        self.arcs[vertex].len()
    }

    /// Looks up the arc `(from, to)`; `Some(true)` for a directed edge,
    /// `Some(false)` for a bidirectional traversal, `None` if absent.
    pub fn arc_kind(&self, from: usize, to: usize) -> Option<bool> {
        if from >= self.n {
            return None;
        }
        self.arcs[from]
            .iter()
            .find(|a| a.to == to)
            .map(|a| a.directed)
    }

    fn check_war(&self, w: &WarAssignment) -> Result<(), GraphError> {
        if w.len() != self.n {
            return Err(GraphError::WarLengthMismatch {
                war_len: w.len(),
                vertices: self.n,
            });
        }
        Ok(())
    }
}

/// WAR flow along an arc: `W(to) - W(from)`. Positive means ascending.
pub fn war_flow(
    g: &PermissionGraph,
    w: &WarAssignment,
    from: usize,
    to: usize,
) -> Result<i64, GraphError> {
    g.check_war(w)?;
    if g.arc_kind(from, to).is_none() {
        return Err(GraphError::NoSuchArc(from, to));
    }
    Ok(i64::from(w.get(to)) - i64::from(w.get(from)))
}

/// Directed WAR Sum: total flow over directed edges only. Bidirectional
/// edges are excluded; any directed cycle contributes exactly zero.
pub fn dws(g: &PermissionGraph, w: &WarAssignment) -> i64 {
    assert_eq!(w.len(), g.n(), "WAR length must match vertex count");
    g.directed_edges()
        .iter()
        .map(|&(u, v)| i64::from(w.get(v)) - i64::from(w.get(u)))
        .sum()
}

/// Ascending in-load of a vertex: sum of positive WAR flow over its directed
/// in-edges.
pub fn ascending_in_load(g: &PermissionGraph, w: &WarAssignment, vertex: usize) -> i64 {
    g.directed_edges()
        .iter()
        .filter(|&&(_, v)| v == vertex)
        .map(|&(u, v)| i64::from(w.get(v)) - i64::from(w.get(u)))
        .filter(|&d| d > 0)
        .sum()
}

/// Gini coefficient of a non-negative vector: `sum |a-b| / (2 n sum)`.
/// `None` when the total is not positive. 0 for constant vectors,
/// `(n-1)/n` for a one-hot vector.
pub fn gini(values: &[i64]) -> Option<f64> {
    let total: i64 = values.iter().sum();
    if total <= 0 || values.is_empty() {
        return None;
    }
    let mut num = 0i64;
    for &a in values {
        for &b in values {
            num += (a - b).abs();
        }
    }
    Some(num as f64 / (2.0 * values.len() as f64 * total as f64))
}

/// A k-hub: vertex with `k >= 2` ascending directed in-edges from distinct
/// spokes, plus graph-level degree/diameter context and coverage flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HubReport {
    pub hub: usize,
    pub k: usize,
    pub spokes: Vec<usize>,
    pub d_max: usize,
    pub diameter: usize,
    /// Every vertex other than the hub has at least one out-arc into the
    /// spoke set. (The hub itself can never have one: an arc from the hub to
    /// a spoke would contradict that spoke edge being directed.)
    pub spoke_covered: bool,
    /// Every vertex other than the hub has out-arcs to all spokes other than
    /// itself.
    pub fully_spoke_covered: bool,
}

/// All k-hubs (k >= 2) under the given WAR assignment, sorted by hub vertex.
pub fn detect_hubs(g: &PermissionGraph, w: &WarAssignment) -> Vec<HubReport> {
    assert_eq!(w.len(), g.n(), "WAR length must match vertex count");
    let (diameter, d_max) = diameter_and_dmax(g);
    let mut hubs = Vec::new();
    for h in 0..g.n() {
        let mut spokes: Vec<usize> = g
            .directed_edges()
            .iter()
            .filter(|&&(u, v)| v == h && w.get(h) > w.get(u))
            .map(|&(u, _)| u)
            .collect();
        spokes.sort_unstable();
        spokes.dedup();
        let k = spokes.len();
        if k < 2 {
            continue;
        }
        let mut covered = true;
        let mut fully = true;
        for u in 0..g.n() {
            if u == h {
                continue;
            }
            let reachable = spokes.iter().filter(|&&s| s != u).count();
            let hit = g.arcs[u]
                .iter()
                .filter(|a| spokes.binary_search(&a.to).is_ok())
                .count();
            if hit == 0 {
                covered = false;
            }
            if hit < reachable {
                fully = false;
            }
        }
        hubs.push(HubReport {
            hub: h,
            k,
            spokes,
            d_max,
            diameter,
            spoke_covered: covered,
            fully_spoke_covered: covered && fully,
        });
    }
    hubs
}

/// WAR-weighted centrality index H: per-vertex ascending in-load spread
/// normalised as `sum_{v,u} |l(v)-l(u)| / (2 n DWS)`, exactly as printed.
///
/// Returns `None` when `DWS <= 0` (H is undefined there). Note the printed
/// denominator equals `2 n sum(l)` only when no directed edge is descending;
/// with descending edges present and `DWS > 0`, H can exceed 1.
pub fn centrality_h(g: &PermissionGraph, w: &WarAssignment) -> Option<f64> {
    assert_eq!(w.len(), g.n(), "WAR length must match vertex count");
    let total = dws(g, w);
    if total <= 0 {
        return None;
    }
    let loads: Vec<i64> = (0..g.n()).map(|v| ascending_in_load(g, w, v)).collect();
    let mut num = 0i64;
    for &a in &loads {
        for &b in &loads {
            num += (a - b).abs();
        }
    }
    Some(num as f64 / (2.0 * g.n() as f64 * total as f64))
}

/// Directed diameter (bidirectional edges count as two arcs) and maximum
/// out-degree, via breadth-first search from every vertex.
pub fn diameter_and_dmax(g: &PermissionGraph) -> (usize, usize) {
    let n = g.n();
    let mut diameter = 0;
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for a in g.out_arcs(v) {
                if dist[a.to] == usize::MAX {
                    dist[a.to] = dist[v] + 1;
                    queue.push_back(a.to);
                }
            }
        }
        diameter = diameter.max(dist.into_iter().max().unwrap_or(0));
    }
    let d_max = (0..n).map(|v| g.out_degree(v)).max().unwrap_or(0);
    (diameter, d_max)
}

#[cfg(test)]
mod tests {
    use super::*;

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

    /// Star hub: spokes 1..=4 send directed ascending edges into hub 0;
    /// vertex 5 closes the cycle so the graph stays strongly connected
    /// without touching any spoke-hub pair.
    fn star_hub() -> (PermissionGraph, WarAssignment) {
        let g = PermissionGraph::new(
            6,
            &[(1, 0), (2, 0), (3, 0), (4, 0), (0, 5)],
            &[(5, 1), (5, 2), (5, 3), (5, 4)],
        )
        .unwrap();
        let w = WarAssignment::new(vec![5, 1, 1, 1, 1, 1]);
        (g, w)
    }

    #[test]
    fn bidirectional_cycle_is_connected_but_not_ratchet() {
        let data = GraphData {
            n: 6,
            directed: vec![],
            bidirectional: (0..6).map(|i| [i, (i + 1) % 6]).collect(),
        };
        let report = validate_graph(&data);
        assert!(report.violations.is_empty());
        assert!(report.strongly_connected);
        assert!(!report.ratchet);
        assert!(!report.is_valid_ratchet());
    }

    #[test]
    fn case_study_edge_list_is_valid_ratchet() {
        let g = scc216();
        let report = validate_graph(&g.to_data());
        assert!(report.is_valid_ratchet());
        assert_eq!(g.directed_edges().len(), 9);
        assert_eq!(g.bidirectional_edges().len(), 2);
    }

    #[test]
    fn reversible_pair_is_a_violation() {
        let data = GraphData {
            n: 3,
            directed: vec![[0, 1], [1, 0], [1, 2], [2, 0]],
            bidirectional: vec![],
        };
        let report = validate_graph(&data);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::ReversiblePair(0, 1))));
    }

    #[test]
    fn malformed_edges_reported_without_panic() {
        let data = GraphData {
            n: 3,
            directed: vec![[0, 7], [1, 1], [0, 1], [0, 1]],
            bidirectional: vec![[0, 1]],
        };
        let report = validate_graph(&data);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::VertexOutOfRange(0, 7, 3))));
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::SelfLoop(1))));
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::DuplicateDirected(0, 1))));
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::MixedPair(0, 1))));
    }

    #[test]
    fn war_flow_examples() {
        let g = PermissionGraph::new(3, &[(0, 1)], &[(1, 2), (2, 0)]).unwrap();
        let w = WarAssignment::new(vec![0, 2, 1]);
        assert_eq!(war_flow(&g, &w, 0, 1).unwrap(), 2);
        // bidirectional arcs work in both directions
        assert_eq!(war_flow(&g, &w, 1, 2).unwrap(), -1);
        assert_eq!(war_flow(&g, &w, 2, 1).unwrap(), 1);
        let flat = WarAssignment::new(vec![3, 3, 3]);
        assert_eq!(war_flow(&g, &flat, 0, 1).unwrap(), 0);
        assert!(matches!(
            war_flow(&g, &w, 1, 0),
            Err(GraphError::NoSuchArc(1, 0))
        ));
    }

    #[test]
    fn war_flow_scc233_first_edge_is_ascending() {
        let g = PermissionGraph::new(
            6,
            &[(0, 1), (4, 0), (5, 0), (3, 1), (1, 5), (5, 4)],
            &[(0, 3), (1, 2), (1, 4), (2, 4), (3, 5)],
        )
        .unwrap();
        let w = WarAssignment::new(vec![1, 4, 5, 2, 3, 3]);
        assert_eq!(war_flow(&g, &w, 0, 1).unwrap(), 3);
    }

    #[test]
    fn dws_of_directed_cycle_is_zero() {
        let g = PermissionGraph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], &[]).unwrap();
        for w in [
            WarAssignment::new(vec![0, 5, 2, 4]),
            WarAssignment::new(vec![3, 3, 3, 3]),
            WarAssignment::new(vec![5, 0, 5, 0]),
        ] {
            assert_eq!(dws(&g, &w), 0);
        }
    }

    #[test]
    fn dws_single_edge() {
        let g = PermissionGraph::new(3, &[(0, 1)], &[(1, 2), (2, 0)]).unwrap();
        let w = WarAssignment::new(vec![0, 5, 1]);
        assert_eq!(dws(&g, &w), 5);
    }

    #[test]
    fn dws_case_study_matches_hand_evaluation() {
        // deltas of the nine printed directed edges under (0,2,0,0,3,4)
        let g = scc216();
        let w = WarAssignment::new(vec![0, 2, 0, 0, 3, 4]);
        let deltas = [-2i64, 0, 0, -2, 2, -2, 3, 4, 1];
        assert_eq!(dws(&g, &w), deltas.iter().sum::<i64>());
        assert_eq!(dws(&g, &w), 4);
    }

    #[test]
    fn dws_is_linear_in_war() {
        let g = scc216();
        let w1 = WarAssignment::new(vec![0, 2, 0, 0, 3, 4]);
        let w2 = WarAssignment::new(vec![5, 1, 2, 0, 0, 3]);
        assert_eq!(dws(&g, &w1.add(&w2)), dws(&g, &w1) + dws(&g, &w2));
    }

    #[test]
    fn star_hub_detected_with_four_spokes() {
        let (g, w) = star_hub();
        let hubs = detect_hubs(&g, &w);
        assert_eq!(hubs.len(), 1);
        let hub = &hubs[0];
        assert_eq!(hub.hub, 0);
        assert_eq!(hub.k, 4);
        assert_eq!(hub.spokes, vec![1, 2, 3, 4]);
    }

    #[test]
    fn flat_war_has_no_hubs() {
        let g = scc216();
        let w = WarAssignment::new(vec![2; 6]);
        assert!(detect_hubs(&g, &w).is_empty());
    }

    #[test]
    fn full_spoke_coverage_flagged() {
        // hub 5, spokes {0, 1, 2}; spokes reach each other over a
        // bidirectional triangle, and 3, 4 reach all three spokes directly
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
            &[(0, 1), (1, 2), (0, 2), (3, 4)],
        )
        .unwrap();
        let w = WarAssignment::new(vec![0, 0, 0, 1, 1, 5]);
        let hubs = detect_hubs(&g, &w);
        let hub = hubs.iter().find(|h| h.hub == 5).unwrap();
        assert_eq!(hub.k, 3);
        assert!(hub.spoke_covered);
        assert!(hub.fully_spoke_covered);

        // dropping one spoke-to-spoke link keeps weak coverage but not full
        let g2 = PermissionGraph::new(
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
        .unwrap();
        let hub2 = detect_hubs(&g2, &w).into_iter().find(|h| h.hub == 5).unwrap();
        assert!(hub2.spoke_covered);
        assert!(!hub2.fully_spoke_covered);
    }

    #[test]
    fn gini_constant_and_one_hot() {
        assert_eq!(gini(&[7, 7, 7, 7]), Some(0.0));
        let g6 = gini(&[10, 0, 0, 0, 0, 0]).unwrap();
        assert!((g6 - 5.0 / 6.0).abs() < 1e-12);
        assert_eq!(gini(&[0, 0]), None);
    }

    #[test]
    fn centrality_one_hot_hub_is_n_minus_one_over_n() {
        // all ascending load lands on the hub and no directed edge descends,
        // so DWS equals the total load and H reduces to a one-hot Gini
        let (g, w) = star_hub();
        // flows: four spoke edges +4 each; (0,5): 1-5 = -4 descending... use
        // a WAR that keeps the exit flat instead
        let w_flat_exit = WarAssignment::new(vec![5, 1, 1, 1, 1, 5]);
        // spoke edges +4 each, exit edge (0,5) flat
        assert_eq!(dws(&g, &w_flat_exit), 16);
        assert_eq!(ascending_in_load(&g, &w_flat_exit, 0), 16);
        let h = centrality_h(&g, &w_flat_exit).unwrap();
        assert!((h - 5.0 / 6.0).abs() < 1e-12);
        drop(w);
    }

    #[test]
    fn centrality_undefined_for_nonpositive_dws() {
        let g = scc216();
        let w = WarAssignment::new(vec![4, 2, 1, 2, 4, 2]);
        assert_eq!(dws(&g, &w), -4);
        assert!(centrality_h(&g, &w).is_none());
    }

    #[test]
    fn centrality_in_unit_range_without_descending_edges() {
        // when no directed edge descends, DWS == sum of loads and H is a
        // true Gini in [0, 1]
        let (g, _) = star_hub();
        let w = WarAssignment::new(vec![5, 1, 0, 2, 3, 5]);
        let descending = g
            .directed_edges()
            .iter()
            .any(|&(u, v)| w.get(v) < w.get(u));
        assert!(!descending);
        let h = centrality_h(&g, &w).unwrap();
        assert!((0.0..=1.0).contains(&h), "H = {h}");
    }

    #[test]
    fn diameter_and_dmax_basics() {
        let cycle = PermissionGraph::new(
            6,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)],
            &[],
        )
        .unwrap();
        assert_eq!(diameter_and_dmax(&cycle), (5, 1));

        let mut bidir = Vec::new();
        for u in 0..6 {
            for v in u + 1..6 {
                bidir.push((u, v));
            }
        }
        let complete = PermissionGraph::new(6, &[], &bidir).unwrap();
        assert_eq!(diameter_and_dmax(&complete), (1, 5));
    }

    #[test]
    fn diameter_matches_floyd_warshall_oracle() {
        // SCC 207 edge list
        let g = PermissionGraph::new(
            6,
            &[
                (0, 2),
                (3, 0),
                (4, 0),
                (0, 5),
                (3, 1),
                (2, 3),
                (4, 2),
                (2, 5),
                (3, 5),
                (4, 5),
            ],
            &[(0, 1), (1, 2), (1, 5), (3, 4)],
        )
        .unwrap();
        let n = g.n();
        let inf = usize::MAX / 2;
        let mut d = vec![vec![inf; n]; n];
        for v in 0..n {
            d[v][v] = 0;
            for a in g.out_arcs(v) {
                d[v][a.to] = 1;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
                }
            }
        }
        let oracle = d.iter().flatten().copied().max().unwrap();
        let (diameter, d_max) = diameter_and_dmax(&g);
        assert_eq!(diameter, oracle);
        assert_eq!(d_max, (0..n).map(|v| g.out_degree(v)).max().unwrap());
    }

    #[test]
    fn graph_json_round_trip() {
        let g = scc216();
        let json = serde_json::to_string(&g.to_data()).unwrap();
        let back: GraphData = serde_json::from_str(&json).unwrap();
        assert_eq!(PermissionGraph::from_data(&back).unwrap(), g);
        let war_json = "[0,2,0,0,3,4]";
        let w: WarAssignment = serde_json::from_str(war_json).unwrap();
        assert_eq!(w.values(), &[0, 2, 0, 0, 3, 4]);
    }
}
