//! Builds the rating matrix from scored fragments, predicts with every
//! recommender and ranks restaurants for one dish.

use std::collections::BTreeMap;

use dishrec::cf::{
    recommend_top_k, Baseline, Eq1Center, ItemItemCf, RatingPredictor, SideAffinity, UserItemCf,
    DEFAULT_NEIGHBORHOOD, DEFAULT_SIDE_WEIGHT,
};
use dishrec::evalx::{synth_corpus, SynthConfig};
use dishrec::fm::{FmConfig, FmRecommender};
use dishrec::fragmenter::ItemId;
use dishrec::pipeline::{catalog, process_reviews, rating_matrix, score_fragments, DEFAULT_BLEND};
use dishrec::sentiment::{train_sentiment, ModelChoice, SentimentConfig};
use dishrec::sides::{build_comention_graph, comention_sets, louvain};

fn main() {
    let synth = synth_corpus(&SynthConfig::default()).unwrap();
    let gold = synth.gold_labels();
    let reviews = process_reviews(&synth.reviews, &synth.lexicons, &synth.items);

    let mut tokens = Vec::new();
    let mut labels = Vec::new();
    for f in reviews.iter().flat_map(|r| &r.fragments) {
        tokens.push(f.tokens.clone());
        labels.push(gold[&(f.review_id.clone(), f.item_id)]);
    }
    let model = train_sentiment(ModelChoice::NaiveBayes, &tokens, &labels, &SentimentConfig::default()).unwrap();
    let scored = score_fragments(&reviews, Some(&model));
    let matrix = rating_matrix(&scored, DEFAULT_BLEND).unwrap();
    println!(
        "{} users x {} columns, {} ratings, global mean {:.3}",
        matrix.n_users(),
        matrix.n_columns(),
        matrix.n_entries(),
        matrix.global_mean()
    );

    let fragments: Vec<_> = reviews.iter().flat_map(|r| r.fragments.iter().cloned()).collect();
    let groups: BTreeMap<ItemId, usize> = louvain(&build_comention_graph(&comention_sets(&fragments)))
        .map(|p| p.assignment().clone())
        .unwrap_or_default();
    let sides = SideAffinity::new(&groups, &scored);
    let catalog = catalog(&scored);

    let baseline = Baseline::fit(&scored);
    let user = UserItemCf::new(&matrix, DEFAULT_NEIGHBORHOOD, Eq1Center::User);
    let item = ItemItemCf::new(&matrix, DEFAULT_NEIGHBORHOOD);
    let fm = FmRecommender::fit(&matrix, Some(groups.clone()), &FmConfig::default()).unwrap();
    let predictors: [&dyn RatingPredictor; 4] = [&baseline, &user, &item, &fm];

    let dish = synth.items.resolve("pasta").unwrap();
    for p in predictors {
        let recs = recommend_top_k(p, &catalog, &sides, "u003", dish, 3, DEFAULT_SIDE_WEIGHT).unwrap();
        let row: Vec<String> = recs.iter().map(|r| format!("{} {:.2}", r.restaurant_id, r.score)).collect();
        println!("{:<9} {}", p.method().as_str(), row.join(" | "));
    }
    println!("\nfirst rows of the matrix export:\n{}", matrix.export_tsv().lines().take(4).collect::<Vec<_>>().join("\n"));
}
