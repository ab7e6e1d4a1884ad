//! LSTM fragment classifier on the separable synthetic corpus.

use dishrec::corpus::Polarity;
use dishrec::evalx::{synth_sentiment_corpus, Confusion};
use dishrec::sentiment::{classify_fragment, train_sentiment, ModelChoice, SentimentConfig, SentimentModel};

fn main() {
    let corpus = synth_sentiment_corpus(42, 250);
    let (train, test) = corpus.split_at(200);
    let tokens: Vec<Vec<String>> = train.iter().map(|(t, _)| t.clone()).collect();
    let labels: Vec<Polarity> = train.iter().map(|(_, l)| *l).collect();

    let model = train_sentiment(ModelChoice::Lstm, &tokens, &labels, &SentimentConfig::default()).unwrap();
    if let SentimentModel::Lstm(m) = &model {
        let l = &m.epoch_losses;
        println!("epochs {}, loss {:.4} -> {:.4}", l.len(), l[0], l[l.len() - 1]);
    }
    let preds: Vec<Polarity> = test.iter().map(|(t, _)| classify_fragment(t, &model).polarity()).collect();
    let golds: Vec<Polarity> = test.iter().map(|(_, l)| *l).collect();
    println!("held-out F = {:.4}", Confusion::from_pairs(&preds, &golds).unwrap().f1());

    for probe in ["biryani really bland", "momos amazing POS_EMO", "fries"] {
        let t: Vec<&str> = probe.split(' ').collect();
        println!("{probe:<24} {:+.4}", classify_fragment(&t, &model).value());
    }
}
