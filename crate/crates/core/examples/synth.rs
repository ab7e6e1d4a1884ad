//! Generates a synthetic corpus, writes it to a directory and reads it back.

use dishrec::evalx::{synth_corpus, SynthConfig, SynthCorpus};

fn main() {
    let cfg = SynthConfig { n_users: 10, reviews_per_user: 3, ..SynthConfig::default() };
    let corpus = synth_corpus(&cfg).unwrap();
    for r in corpus.reviews.iter().take(4) {
        println!("{} {} {} {:.1}* {}", r.review_id, r.user_id, r.restaurant_id, r.stars.value(), r.text);
    }
    println!("{} gold fragments, {} gold ratings", corpus.gold_fragments.len(), corpus.gold_ratings.len());

    let dir = std::env::temp_dir().join(format!("dishrec-synth-{}", std::process::id()));
    corpus.write_dir(&dir).unwrap();
    let back = SynthCorpus::load_dir(&dir).unwrap();
    assert_eq!(back, corpus);
    println!("round trip through {} ok: {:?}", dir.display(), corpus.files().keys().collect::<Vec<_>>());
    std::fs::remove_dir_all(&dir).unwrap();
}
