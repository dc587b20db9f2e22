//! Prints observed vs printed case-study means across master seeds.

use braidwalk::corpus::{load_case_study, CASE_STUDY_NAMES};
use braidwalk::walk::{run_pair, WalkConfig};

fn main() {
    let seeds: Vec<u64> = (1..=10).collect();
    for name in CASE_STUDY_NAMES {
        let cs = load_case_study(name).unwrap();
        println!("== {name} ==");
        for row in &cs.rows {
            let w = braidwalk::WarAssignment::new(row.war.clone());
            let mut les = Vec::new();
            let mut rates = Vec::new();
            for &seed in &seeds {
                let cfg = WalkConfig {
                    seed: braidwalk::rng::mix(seed, &[cs.scc_id, 0]),
                    ..WalkConfig::default()
                };
                let agg = run_pair(&cs.graph, &w, &cfg).unwrap();
                les.push(agg.mean_le);
                rates.push(agg.mean_le_counting);
            }
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            let (mle, mrate) = (mean(&les), mean(&rates));
            println!(
                "war {:?}: printed le {:.3} rate {:.3} | observed le {:.3} rate {:.3} | dle {:+.3} drate {:+.3}",
                row.war, row.le, row.rate, mle, mrate, mle - row.le, mrate - row.rate,
            );
        }
    }
}
