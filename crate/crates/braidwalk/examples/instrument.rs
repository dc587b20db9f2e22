//! Activity-threshold sweep for the shuffle direction and discriminator
//! significance under the spec-faithful mechanics.

use braidwalk::corpus::{generate_scc, sample_wars, CorpusConfig};
use braidwalk::experiments::{paired_stats, partial_correlation, shuffle_experiment, PairTraces};
use braidwalk::graph::dws;
use braidwalk::rng::{mix, stream_rng};
use braidwalk::walk::{run_pair, run_walks, WalkConfig};

fn main() {
    let seed = 2026u64;
    let corpus_cfg = CorpusConfig::default();

    // shuffle population at the criterion protocol (10 walks x 60 epochs)
    let shuffle_walk = WalkConfig {
        epochs: 60,
        walks_per_pair: 10,
        ..WalkConfig::default()
    };
    struct PairInfo {
        traces: PairTraces,
        mean_triplets: f64,
    }
    let mut all = Vec::new();
    let mut pair_id = 0u64;
    for graph_idx in 0..400u64 {
        let g = generate_scc(&corpus_cfg, &mut stream_rng(seed, &[graph_idx, 0])).unwrap();
        let wars = sample_wars(&corpus_cfg, &mut stream_rng(seed, &[graph_idx, 1]));
        for w in wars.iter().take(2) {
            let cfg = WalkConfig {
                seed: mix(seed, &[graph_idx, pair_id]),
                ..shuffle_walk
            };
            let results = run_walks(&g, w, &cfg).unwrap();
            let mean_triplets: f64 =
                results.iter().map(|r| r.n_triplets as f64).sum::<f64>() / results.len() as f64;
            all.push(PairInfo {
                traces: PairTraces {
                    pair_id,
                    traces: results.into_iter().map(|r| r.trace).collect(),
                },
                mean_triplets,
            });
            pair_id += 1;
        }
    }
    for min_triplets in [2.0, 4.0, 8.0, 12.0, 16.0, 20.0] {
        let selected: Vec<PairTraces> = all
            .iter()
            .filter(|p| p.mean_triplets >= min_triplets)
            .map(|p| p.traces.clone())
            .collect();
        if selected.len() < 30 {
            println!("min_triplets {min_triplets}: only {} pairs", selected.len());
            continue;
        }
        let shuffled = shuffle_experiment(&selected, 20, mix(seed, &[7]));
        let orig: Vec<f64> = shuffled.iter().map(|s| s.logsr_original).collect();
        let shuf: Vec<f64> = shuffled.iter().map(|s| s.logsr_shuffled_mean).collect();
        let sorted: Vec<f64> = shuffled.iter().map(|s| s.logsr_sorted).collect();
        let st = paired_stats(&orig, &shuf).unwrap();
        let st2 = paired_stats(&orig, &sorted).unwrap();
        println!(
            "min_triplets {:>4}: pairs {:>4} | orig<shuf {:.3} t {:+.2} p {:.2e} | orig<sorted {:.3}",
            min_triplets,
            selected.len(),
            st.fraction_a_lt_b,
            st.t.unwrap_or(f64::NAN),
            st.p.unwrap_or(f64::NAN),
            st2.fraction_a_lt_b,
        );
    }

    // discriminator at w=64 with threshold sweep
    let disc_walk = WalkConfig {
        epochs: 50,
        walks_per_pair: 64,
        ..WalkConfig::default()
    };
    let mut rows = Vec::new();
    for g_idx in 10_000u64..10_450 {
        let g = generate_scc(&corpus_cfg, &mut stream_rng(seed, &[g_idx, 0])).unwrap();
        let wars = sample_wars(&corpus_cfg, &mut stream_rng(seed, &[g_idx, 1]));
        for (wi, w) in wars.iter().take(2).enumerate() {
            let cfg = WalkConfig {
                seed: mix(seed, &[g_idx, wi as u64]),
                ..disc_walk
            };
            let agg = run_pair(&g, w, &cfg).unwrap();
            rows.push((agg.mean_le, agg.mean_le_counting, dws(&g, w) as f64, agg.mean_n_triplets));
        }
    }
    for min_triplets in [2.0, 4.0, 8.0, 12.0] {
        let sel: Vec<&(f64, f64, f64, f64)> =
            rows.iter().filter(|r| r.3 >= min_triplets).collect();
        if sel.len() < 50 {
            continue;
        }
        let le: Vec<f64> = sel.iter().map(|r| r.0).collect();
        let rate: Vec<f64> = sel.iter().map(|r| r.1).collect();
        let dws_v: Vec<f64> = sel.iter().map(|r| r.2).collect();
        let trips: Vec<f64> = sel.iter().map(|r| r.3).collect();
        let pt = partial_correlation(&le, &dws_v, &trips).unwrap();
        let pc = partial_correlation(&rate, &dws_v, &trips).unwrap();
        println!(
            "disc min_triplets {:>4}: pairs {:>4} | temporal r {:+.4} p {:.2e} | counting r {:+.4} p {:.2e}",
            min_triplets,
            sel.len(),
            pt.r,
            pt.p,
            pc.r,
            pc.p
        );
    }
}
