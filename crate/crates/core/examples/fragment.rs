//! Splits reviews into per-dish fragments, first by clause heuristics and
//! then with a hand-written dependency parse.

use dishrec::corpus::{normalize, LexiconSet};
use dishrec::fragmenter::{find_mentions, scope_fragments, scope_fragments_with_arcs, Arc, ItemEntry, ItemId, ItemLexicon};

fn entry(id: u32, name: &str, aliases: &[&str]) -> ItemEntry {
    ItemEntry {
        item_id: ItemId(id),
        canonical_name: name.to_string(),
        aliases: aliases.iter().map(|a| a.split_whitespace().map(String::from).collect()).collect(),
    }
}

fn main() {
    let items = ItemLexicon::new(vec![
        entry(1, "butter_chicken", &["butter chicken"]),
        entry(2, "garlic_naan", &["garlic naan", "naan"]),
        entry(3, "gulab_jamun", &["gulab jamun"]),
    ])
    .unwrap();
    let lex = LexiconSet::new(["the", "was", "were"].map(String::from), [], []).unwrap();

    let text = "The butter chicken was rich and creamy but the naan was chewy. Gulab jamun were warm, loved them";
    let tokens = normalize(text, &lex);
    let mentions = find_mentions(&tokens, &items);
    println!("tokens: {}", tokens.join(" "));
    for f in scope_fragments("rev1", &tokens, &mentions) {
        println!("  {:<16} clause {} | {}", items.name(f.item_id).unwrap(), f.clause_index, f.tokens.join(" "));
    }

    // "naan soft , dal smoky" with a parse attaching each adjective to its noun
    let tokens: Vec<String> = "naan soft dal smoky".split(' ').map(String::from).collect();
    let items = ItemLexicon::new(vec![entry(2, "garlic_naan", &["naan"]), entry(4, "dal", &["dal"])]).unwrap();
    let arcs = [Arc::new(0, 1, "amod"), Arc::new(2, 3, "amod"), Arc::new(0, 2, "conj")];
    let mentions = find_mentions(&tokens, &items);
    println!("\nwith arcs:");
    for f in scope_fragments_with_arcs("rev2", &tokens, &mentions, &arcs).expect("arcs form a forest") {
        println!("  {:<16} {}", items.name(f.item_id).unwrap(), f.tokens.join(" "));
    }
}
