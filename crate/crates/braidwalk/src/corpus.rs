//! Random ratchet-SCC corpus generation, dataset build/persist, and the four
//! case-study fixtures.

use crate::classify::{classify_record, DeploymentRecord, Disagreement, Regime, Thresholds};
use crate::graph::{dws, validate_graph, GraphData, PermissionGraph, WarAssignment};
use crate::rng::{mix, stream_rng};
use crate::walk::{run_walks, WalkConfig, WalkError};
use rand::Rng;
use rayon::prelude::*;
use serde::Deserialize;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("edge-mix probabilities must be non-negative and sum to 1, got {0:?}")]
    BadEdgeMix(EdgeMix),
    #[error("retry budget exhausted after {0} attempts (pathological edge probabilities?)")]
    RetriesExhausted(usize),
    #[error("unknown case study {0:?}; expected one of scc216, scc207, scc126, scc233")]
    UnknownCaseStudy(String),
    #[error("walk error for scc {scc_id} war {war_index}: {source}")]
    Walk {
        scc_id: u64,
        war_index: usize,
        source: WalkError,
    },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("bad dataset CSV at line {line}: {reason}")]
    BadCsv { line: usize, reason: String },
    #[error("fixture parse error: {0}")]
    Fixture(String),
}

/// Per-vertex-pair edge category probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeMix {
    pub none: f64,
    pub directed: f64,
    pub bidirectional: f64,
}

impl Default for EdgeMix {
    /// Chosen so accepted 6-vertex graphs match the case-study density range
    /// (6-10 directed, 2-5 bidirectional edges).
    fn default() -> Self {
        Self {
            none: 0.22,
            directed: 0.55,
            bidirectional: 0.23,
        }
    }
}

/// Corpus generation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusConfig {
    pub n_sccs: usize,
    pub wars_per_scc: usize,
    pub n_vertices: usize,
    /// WAR entries are uniform in `0..=war_max`.
    pub war_max: u32,
    pub edge_mix: EdgeMix,
    pub master_seed: u64,
    /// Re-checks each row's product in 64-bit arithmetic and zeroes rows
    /// that would have saturated, mirroring the external dataset's artifact.
    pub overflow_emulation: bool,
    pub walk: WalkConfig,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            n_sccs: 1000,
            wars_per_scc: 50,
            n_vertices: 6,
            war_max: 5,
            edge_mix: EdgeMix::default(),
            master_seed: 0,
            overflow_emulation: false,
            walk: WalkConfig::default(),
        }
    }
}

impl CorpusConfig {
    pub fn validate(&self) -> Result<(), CorpusError> {
        let m = self.edge_mix;
        let sum = m.none + m.directed + m.bidirectional;
        if m.none < 0.0 || m.directed < 0.0 || m.bidirectional < 0.0 || (sum - 1.0).abs() > 1e-9 {
            return Err(CorpusError::BadEdgeMix(m));
        }
        Ok(())
    }
}

const RETRY_BUDGET: usize = 100_000;

/// Rejection-samples vertex-pair edge assignments until the result is
/// strongly connected with at least one directed edge.
pub fn generate_scc<R: Rng>(config: &CorpusConfig, rng: &mut R) -> Result<PermissionGraph, CorpusError> {
    config.validate()?;
    let n = config.n_vertices;
    for _ in 0..RETRY_BUDGET {
        let mut directed = Vec::new();
        let mut bidirectional = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                let x: f64 = rng.random();
                if x < config.edge_mix.directed {
                    if rng.random::<bool>() {
                        directed.push([u, v]);
                    } else {
                        directed.push([v, u]);
                    }
                } else if x < config.edge_mix.directed + config.edge_mix.bidirectional {
                    bidirectional.push([u, v]);
                }
            }
        }
        let data = GraphData {
            n,
            directed,
            bidirectional,
        };
        if validate_graph(&data).is_valid_ratchet() {
            return Ok(PermissionGraph::from_data(&data).expect("validated"));
        }
    }
    Err(CorpusError::RetriesExhausted(RETRY_BUDGET))
}

/// `wars_per_scc` independent uniform WAR vectors.
pub fn sample_wars<R: Rng>(config: &CorpusConfig, rng: &mut R) -> Vec<WarAssignment> {
    (0..config.wars_per_scc)
        .map(|_| {
            WarAssignment::new(
                (0..config.n_vertices)
                    .map(|_| rng.random_range(0..=config.war_max))
                    .collect(),
            )
        })
        .collect()
}

/// Replays a firing trace in checked 64-bit arithmetic; `true` when any
/// entry of the product would overflow an i64.
fn replay_saturates_i64(n_strands: usize, positions: &[u8]) -> bool {
    let n = n_strands;
    let mut m: Vec<i64> = vec![0; n * n];
    for i in 0..n {
        m[i * n + i] = 1;
    }
    let block = crate::burau::TRIPLET_BLOCK;
    for &p in positions {
        let p = p as usize;
        for r in 0..n {
            let base = r * n + p;
            let (c0, c1, c2) = (m[base], m[base + 1], m[base + 2]);
            let combine = |a: i64, ka: i64, b: i64, kb: i64, c: i64, kc: i64| -> Option<i64> {
                a.checked_mul(ka)?
                    .checked_add(b.checked_mul(kb)?)?
                    .checked_add(c.checked_mul(kc)?)
            };
            let n0 = combine(c0, block[0][0], c1, block[1][0], c2, block[2][0]);
            let n1 = combine(c0, block[0][1], c1, block[1][1], c2, block[2][1]);
            let n2 = combine(c0, block[0][2], c1, block[1][2], c2, block[2][2]);
            match (n0, n1, n2) {
                (Some(a), Some(b), Some(c)) => {
                    m[base] = a;
                    m[base + 1] = b;
                    m[base + 2] = c;
                }
                _ => return true,
            }
        }
    }
    false
}

/// One pair job: walks, means, Abelian statistics, regime labels.
fn build_record(
    g: &PermissionGraph,
    w: &WarAssignment,
    scc_id: u64,
    war_index: usize,
    config: &CorpusConfig,
    thresholds: &Thresholds,
) -> Result<DeploymentRecord, CorpusError> {
    let pair_seed = mix(config.master_seed, &[scc_id, war_index as u64]);
    let walk_cfg = WalkConfig {
        seed: pair_seed,
        ..config.walk
    };
    let results = run_walks(g, w, &walk_cfg).map_err(|source| CorpusError::Walk {
        scc_id,
        war_index,
        source,
    })?;
    let agg = crate::walk::aggregate(&results);
    // the dataset pipeline's fixed-width artifact: replay the row's first
    // walk and zero the row if it would have saturated
    let overflow = config.overflow_emulation
        && replay_saturates_i64(walk_cfg.n_walkers, &results[0].trace.positions());
    let (le, le_counting) = if overflow {
        (0.0, 0.0)
    } else {
        (agg.mean_le, agg.mean_le_counting)
    };
    let mut record = DeploymentRecord {
        scc_id,
        war: w.values().to_vec(),
        le,
        le_counting,
        n_triplets: agg.mean_n_triplets,
        dws: dws(g, w),
        regime_burau: Regime::Focused,
        regime_rate: Regime::Focused,
        disagreement: Disagreement::None,
        overflow,
    };
    classify_record(&mut record, thresholds);
    Ok(record)
}

/// Builds the full corpus: `n_sccs` generated ratchet SCCs, `wars_per_scc`
/// WAR samples each, one labeled record per pair. Pair jobs run in parallel;
/// records come back sorted by `(scc_id, war_index)` regardless of thread
/// count.
pub fn build_dataset(
    config: &CorpusConfig,
    thresholds: &Thresholds,
) -> Result<Vec<DeploymentRecord>, CorpusError> {
    config.validate()?;
    config
        .walk
        .validate()
        .map_err(|source| CorpusError::Walk {
            scc_id: 0,
            war_index: 0,
            source,
        })?;
    // generation is sequential per SCC (cheap); walk jobs are the parallel part
    let mut jobs = Vec::with_capacity(config.n_sccs * config.wars_per_scc);
    for scc_id in 0..config.n_sccs as u64 {
        let mut graph_rng = stream_rng(config.master_seed, &[scc_id, u64::MAX]);
        let g = generate_scc(config, &mut graph_rng)?;
        let mut war_rng = stream_rng(config.master_seed, &[scc_id, u64::MAX - 1]);
        let wars = sample_wars(config, &mut war_rng);
        for (war_index, w) in wars.into_iter().enumerate() {
            jobs.push((scc_id, war_index, g.clone(), w));
        }
    }
    jobs.into_par_iter()
        .map(|(scc_id, war_index, g, w)| {
            build_record(&g, &w, scc_id, war_index, config, thresholds)
        })
        .collect()
}

/// Dataset CSV header.
pub const CSV_HEADER: &str =
    "scc_id,war,le,le_counting,n_triplets,dws,regime_burau,regime_rate,disagreement,overflow";

fn format_record(r: &DeploymentRecord) -> String {
    let war = r
        .war
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(";");
    format!(
        "{},{},{:.6},{:.6},{:.6},{},{},{},{},{}",
        r.scc_id,
        war,
        r.le,
        r.le_counting,
        r.n_triplets,
        r.dws,
        r.regime_burau,
        r.regime_rate,
        r.disagreement,
        r.overflow
    )
}

/// Writes the dataset CSV (header plus one row per record).
pub fn write_csv<W: Write>(records: &[DeploymentRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", format_record(r))?;
    }
    Ok(())
}

pub fn write_csv_file(records: &[DeploymentRecord], path: &Path) -> Result<(), CorpusError> {
    let file = std::fs::File::create(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    write_csv(records, std::io::BufWriter::new(file)).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parses a dataset CSV produced by [`write_csv`].
pub fn read_csv(text: &str) -> Result<Vec<DeploymentRecord>, CorpusError> {
    let mut records = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            if line.trim() != CSV_HEADER {
                return Err(CorpusError::BadCsv {
                    line: 1,
                    reason: format!("unexpected header {line:?}"),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(CorpusError::BadCsv {
                line: idx + 1,
                reason: format!("expected 10 fields, got {}", fields.len()),
            });
        }
        let bad = |reason: String| CorpusError::BadCsv {
            line: idx + 1,
            reason,
        };
        let war: Vec<u32> = if fields[1].is_empty() {
            Vec::new()
        } else {
            fields[1]
                .split(';')
                .map(|v| v.parse().map_err(|e| bad(format!("war entry {v:?}: {e}"))))
                .collect::<Result<_, _>>()?
        };
        let parse_f = |s: &str, name: &str| {
            s.parse::<f64>()
                .map_err(|e| bad(format!("{name} {s:?}: {e}")))
        };
        let regime = |s: &str| match s {
            "focused" => Ok(Regime::Focused),
            "dispersed" => Ok(Regime::Dispersed),
            other => Err(bad(format!("unknown regime {other:?}"))),
        };
        records.push(DeploymentRecord {
            scc_id: fields[0]
                .parse()
                .map_err(|e| bad(format!("scc_id {:?}: {e}", fields[0])))?,
            war,
            le: parse_f(fields[2], "le")?,
            le_counting: parse_f(fields[3], "le_counting")?,
            n_triplets: parse_f(fields[4], "n_triplets")?,
            dws: fields[5]
                .parse()
                .map_err(|e| bad(format!("dws {:?}: {e}", fields[5])))?,
            regime_burau: regime(fields[6])?,
            regime_rate: regime(fields[7])?,
            disagreement: fields[8]
                .parse()
                .map_err(|reason| bad(reason))?,
            overflow: match fields[9] {
                "true" => true,
                "false" => false,
                other => return Err(bad(format!("overflow {other:?}"))),
            },
        });
    }
    Ok(records)
}

pub fn read_csv_file(path: &Path) -> Result<Vec<DeploymentRecord>, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_csv(&text)
}

/// One printed WAR row of a case study.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CaseStudyRow {
    pub war: Vec<u32>,
    /// LE reported for this row in the source tables.
    pub le: f64,
    /// Counting rate reported for this row.
    pub rate: f64,
    #[serde(rename = "type", deserialize_with = "deserialize_disagreement")]
    pub disagreement: Disagreement,
}

fn deserialize_disagreement<'de, D>(de: D) -> Result<Disagreement, D::Error>
where
    D: serde::Deserializer<'de>,
{
    let s = String::deserialize(de)?;
    s.parse().map_err(serde::de::Error::custom)
}

/// A case-study SCC: its graph and the printed disagreement WAR rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseStudy {
    pub name: &'static str,
    pub scc_id: u64,
    pub graph: PermissionGraph,
    pub rows: Vec<CaseStudyRow>,
}

macro_rules! fixture {
    ($name:literal) => {
        (
            include_str!(concat!("../fixtures/", $name, ".graph.json")),
            include_str!(concat!("../fixtures/", $name, ".wars.json")),
        )
    };
}

/// Loads one of the shipped case studies: scc216, scc207, scc126, scc233.
pub fn load_case_study(name: &str) -> Result<CaseStudy, CorpusError> {
    let (canonical, scc_id, graph_json, wars_json) = match name {
        "scc216" | "216" => {
            let (g, w) = fixture!("scc216");
            ("scc216", 216, g, w)
        }
        "scc207" | "207" => {
            let (g, w) = fixture!("scc207");
            ("scc207", 207, g, w)
        }
        "scc126" | "126" => {
            let (g, w) = fixture!("scc126");
            ("scc126", 126, g, w)
        }
        "scc233" | "233" => {
            let (g, w) = fixture!("scc233");
            ("scc233", 233, g, w)
        }
        other => return Err(CorpusError::UnknownCaseStudy(other.to_string())),
    };
    let data: GraphData =
        serde_json::from_str(graph_json).map_err(|e| CorpusError::Fixture(e.to_string()))?;
    let graph =
        PermissionGraph::from_data(&data).map_err(|e| CorpusError::Fixture(e.to_string()))?;
    let rows: Vec<CaseStudyRow> =
        serde_json::from_str(wars_json).map_err(|e| CorpusError::Fixture(e.to_string()))?;
    Ok(CaseStudy {
        name: canonical,
        scc_id,
        graph,
        rows,
    })
}

pub const CASE_STUDY_NAMES: [&str; 4] = ["scc216", "scc207", "scc126", "scc233"];
