//! Evaluation helpers: error metrics, F-score, precision@k, Fleiss' kappa and
//! the seeded train/test split.

use std::collections::BTreeMap;

use dishrec::cf::ColumnKey;
use dishrec::corpus::Polarity::{Negative as N, Positive as P};
use dishrec::evalx::{fleiss_kappa, mae, precision_at_k, rmse, train_size, train_test_split, Confusion, Query, SplitRounding};
use dishrec::fragmenter::ItemId;

fn main() {
    let preds = [4.0, 3.5, 2.0, 5.0];
    let golds = [4.5, 3.0, 1.0, 5.0];
    println!("rmse {:.4}  mae {:.4}", rmse(&preds, &golds).unwrap(), mae(&preds, &golds).unwrap());

    let c = Confusion::from_pairs(&[P, P, N, N, P], &[P, N, N, P, P]).unwrap();
    println!("confusion {c:?}  F1 {:.4}", c.f1());

    let col = |r: &str| ColumnKey::new(r, ItemId(3));
    let held: BTreeMap<_, _> = [
        (("u1".to_string(), col("r1")), 5.0),
        (("u1".to_string(), col("r2")), 2.5),
    ]
    .into_iter()
    .collect();
    let q = Query { user_id: "u1".into(), recommended: vec![col("r1"), col("r2"), col("r9")] };
    println!("precision@3 {:.4}", precision_at_k(&[q], &held, 4.0).unwrap());

    let kappa = fleiss_kappa(&[vec![P, P, N], vec![P, P, P], vec![N, N, N], vec![P, N, N]]).unwrap();
    println!("Fleiss kappa {kappa:.4}");

    println!(
        "3131 reviews -> train {} (floor) / {} (round)",
        train_size(3131, 0.8, SplitRounding::Floor),
        train_size(3131, 0.8, SplitRounding::Round)
    );
    let (train, test) = train_test_split(&(0..10).collect::<Vec<_>>(), 0.8, 42, SplitRounding::Floor).unwrap();
    println!("seed 42 split of 0..10: train {train:?} test {test:?}");
}
