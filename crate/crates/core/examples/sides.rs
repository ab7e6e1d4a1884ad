//! Side-dish mining: Louvain communities over dish co-mentions and LDA
//! topics over per-restaurant dish documents.

use dishrec::evalx::{synth_corpus, SynthConfig};
use dishrec::pipeline::{process_reviews, restaurant_of_review};
use dishrec::sides::{
    build_comention_graph, comention_sets, lda_train, louvain_with_trace, restaurant_documents,
    side_pairs_from_partition, top_words, LdaConfig,
};

fn main() {
    let synth = synth_corpus(&SynthConfig::default()).unwrap();
    let reviews = process_reviews(&synth.reviews, &synth.lexicons, &synth.items);
    let fragments: Vec<_> = reviews.iter().flat_map(|r| r.fragments.iter().cloned()).collect();

    let graph = build_comention_graph(&comention_sets(&fragments));
    let trace = louvain_with_trace(&graph).unwrap();
    println!("{} dishes, {} co-mention edges", graph.n_nodes(), graph.n_edges());
    println!("modularity by phase: {:?}", trace.phase_modularity);
    for (c, members) in trace.partition.communities().iter().enumerate() {
        let names: Vec<&str> = members.iter().map(|&i| synth.items.name(i).unwrap()).collect();
        println!("  community {c}: {}", names.join(", "));
    }
    println!("{} side pairs", side_pairs_from_partition(&trace.partition).len());

    let docs: Vec<Vec<String>> =
        restaurant_documents(&fragments, &restaurant_of_review(&reviews), &synth.items).into_values().collect();
    let model = lda_train(&docs, &LdaConfig { k: 3, ..LdaConfig::default() }).unwrap();
    for k in 0..model.k {
        let words: Vec<String> = top_words(&model, k, 4).iter().map(|(w, p)| format!("{w} {p:.2}")).collect();
        println!("topic {k}: {}", words.join(", "));
    }
}
