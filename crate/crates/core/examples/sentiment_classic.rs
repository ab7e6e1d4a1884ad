//! Trains naive Bayes, bag-of-words logistic regression and the decision tree
//! on a synthetic fragment corpus, then round-trips one model through JSON.

use dishrec::corpus::Polarity;
use dishrec::document::ModelDocument;
use dishrec::evalx::{synth_sentiment_corpus, Confusion};
use dishrec::sentiment::{classify_fragment, train_sentiment, ModelChoice, SentimentConfig, SentimentModel};

fn main() {
    let corpus = synth_sentiment_corpus(7, 300);
    let (train, test) = corpus.split_at(240);
    let tokens: Vec<Vec<String>> = train.iter().map(|(t, _)| t.clone()).collect();
    let labels: Vec<Polarity> = train.iter().map(|(_, l)| *l).collect();
    let cfg = SentimentConfig::default();

    for choice in [ModelChoice::NaiveBayes, ModelChoice::BowLogistic, ModelChoice::BowTree] {
        let model = train_sentiment(choice, &tokens, &labels, &cfg).unwrap();
        let preds: Vec<Polarity> = test.iter().map(|(t, _)| classify_fragment(t, &model).polarity()).collect();
        let golds: Vec<Polarity> = test.iter().map(|(_, l)| *l).collect();
        let f = Confusion::from_pairs(&preds, &golds).unwrap().f1();
        println!("{:<7} F = {f:.4}", choice.as_str());
    }

    let model = train_sentiment(ModelChoice::NaiveBayes, &tokens, &labels, &cfg).unwrap();
    let json = ModelDocument::new(model.clone()).to_json();
    let back = ModelDocument::<SentimentModel>::from_json(&json).unwrap().model;
    let probe = ["pasta", "great"];
    assert_eq!(classify_fragment(&probe, &model), classify_fragment(&probe, &back));
    println!("\nmodel document: {} bytes, score({}) = {:.4}", json.len(), probe.join(" "), classify_fragment(&probe, &back).value());
}
