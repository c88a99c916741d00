//! Batch versus streaming on the same data, over several seeds. Seeds run in
//! parallel when cores are available.
//!
//! cargo run --release --example compare_feeds -- [n_seeds] [horizon]

use std::path::Path;

use antclust::config::RunConfig;
use antclust::runner;

fn main() -> antclust::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(4);
    let horizon = args.next().unwrap_or_else(|| "200000".into());
    let preset = Path::new(env!("CARGO_MANIFEST_DIR")).join("presets/sec4-stream.conf");
    let cfg = RunConfig::load(
        &preset,
        &[
            ("run.horizon".into(), horizon),
            ("run.checkpoints".into(), "log".into()),
            ("run.out".into(), "runs/compare".into()),
        ],
    )?;

    let seeds: Vec<u64> = (1..=n.max(2)).collect();
    let summary = runner::compare(&cfg, &seeds)?;
    print!("{}", summary.to_csv());
    let [_, _, (delta, sd)] = summary.aggregate();
    println!("streaming - batch: {delta:+.4} +/- {sd:.4}");
    Ok(())
}
