//! Normalizes a few code-mixed reviews and builds a vocabulary from them.

use dishrec::corpus::{build_vocabulary, normalize, LexiconSet, NEG_EMO, POS_EMO};

fn main() {
    let lex = LexiconSet::new(
        ["the", "was", "is", "a"].map(String::from),
        [(":)".to_string(), POS_EMO.to_string()), (":(".to_string(), NEG_EMO.to_string())],
        [
            ("gr8".to_string(), vec!["great".to_string()]),
            ("ekdum".to_string(), vec!["very".to_string()]),
            ("bakwas".to_string(), vec!["awful".to_string()]),
        ],
    )
    .expect("no slang cycles");

    let reviews = [
        "The pasta was gr8 :)",
        "Biryani was ekdum spicy, but the raita was bakwas :(",
        "Paneer tikka is a must. Naan was cold!",
    ];
    let mut corpus = Vec::new();
    for text in reviews {
        let tokens = normalize(text, &lex);
        println!("{text:<55} -> {}", tokens.join(" "));
        corpus.push(tokens);
    }

    let vocab = build_vocabulary(&corpus, 1).expect("corpus is non-empty");
    println!("\n{} tokens, fingerprint {}", vocab.len(), vocab.fingerprint());
    for (i, t) in vocab.tokens().iter().enumerate().take(8) {
        println!("{i:>3} {t}");
    }
}
