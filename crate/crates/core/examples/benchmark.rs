//! Runs every recommender on the default synthetic corpus and prints the table.

use dishrec::evalx::{render_table, run_benchmark, synth_corpus, BenchCorpus, BenchmarkConfig, SynthConfig};

fn main() {
    let corpus = synth_corpus(&SynthConfig::default()).expect("default config is valid");
    let gold = corpus.gold_labels();
    let reports = run_benchmark(&BenchCorpus::from_synth(&corpus, &gold), &BenchmarkConfig::default())
        .expect("benchmark runs");
    print!("{}", render_table(&reports));
    println!("sentiment F on held-out fragments: {:.4}", reports[0].sentiment_f_score);
}
