//! Clustering user data from CSV: writes a three-class data set with a noise
//! dimension, loads it back through the CSV path and runs a short experiment on it.
//!
//! cargo run --release --example csv_ingest -- [horizon]

use antclust::config::RunConfig;
use antclust::datastream::{generate_synthetic, ingest_csv, write_items_csv, SyntheticSpec};
use antclust::runner;

fn main() -> antclust::Result<()> {
    let horizon = std::env::args().nth(1).unwrap_or_else(|| "300000".into());
    let dir = std::path::PathBuf::from("runs/csv");
    std::fs::create_dir_all(&dir).map_err(|e| antclust::Error::io(&dir, e))?;

    let spec = SyntheticSpec {
        means: vec![
            vec![0.1, 0.5, 0.5],
            vec![0.5, 0.9, 0.5],
            vec![0.9, 0.1, 0.5],
        ],
        spread: 0.08,
        items_per_class: 100,
        seed: 3,
    };
    let csv = dir.join("items.csv");
    write_items_csv(&csv, &generate_synthetic(&spec))?;
    let (items, space) = ingest_csv(&csv, Some(3))?;
    println!(
        "{} items, raw ranges {:?} .. {:?}",
        items.len(),
        space.mins,
        space.maxs
    );

    let pairs = [
        ("data.source", "csv"),
        ("data.csv", csv.to_str().unwrap()),
        ("data.features", "3"),
        ("run.horizon", &horizon),
        ("run.out", dir.to_str().unwrap()),
    ];
    let pairs: Vec<(String, String)> = pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    let cfg = RunConfig::from_pairs(&pairs, None)?;
    let outcome = runner::run(&cfg)?;
    for c in &outcome.simulation.checkpoints {
        if let Ok(r) = &c.report {
            println!(
                "t={:>7}  rate {:.3}  entropy {:.3}",
                c.step, r.mean_rate, c.entropy
            );
        }
    }
    Ok(())
}
