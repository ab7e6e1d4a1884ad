//! Drives the command line in-process: synth, ingest, train, recommend, evaluate.

use dishrec::cli::execute;

fn main() {
    let dir = std::env::temp_dir().join(format!("dishrec-cli-{}", std::process::id()));
    let p = |name: &str| dir.join(name).display().to_string();
    let steps: Vec<Vec<String>> = vec![
        vec!["synth".into(), "--users".into(), "30".into(), "--out".into(), p("data")],
        vec![
            "ingest".into(), "--reviews".into(), p("data/reviews.jsonl"), "--restaurants".into(),
            p("data/restaurants.jsonl"), "--lexicons".into(), p("data/lexicons"), "--out".into(), p("corpus.json"),
        ],
        vec![
            "train-sentiment".into(), "--model".into(), "bow-lr".into(), "--corpus".into(), p("corpus.json"),
            "--labels".into(), "threshold:3.0".into(), "--out".into(), p("lr.json"),
        ],
        vec![
            "recommend".into(), "--corpus".into(), p("corpus.json"), "--sentiment-model".into(), p("lr.json"),
            "--user".into(), "u002".into(), "--item".into(), "dosa".into(), "--method".into(), "item".into(),
        ],
        vec!["evaluate".into(), "--data".into(), p("data"), "--methods".into(), "baseline,fm".into(), "--out".into(), p("report.json")],
    ];
    for args in steps {
        println!("$ dishrec {}", args[0]);
        match execute(std::iter::once("dishrec".to_string()).chain(args)) {
            Ok(out) => print!("{out}"),
            Err(e) => {
                eprintln!("exit {}: {}", e.code, e.message);
                break;
            }
        }
    }
    std::fs::remove_dir_all(&dir).ok();
}
