//! Batch clustering of the four-class synthetic set: all 800 items are dropped on the
//! 57x57 lattice at t=0 and the colony sorts them.
//!
//! cargo run --release --example batch_clustering -- [seed] [horizon]

use std::path::Path;

use antclust::config::RunConfig;
use antclust::runner;

fn main() -> antclust::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().unwrap_or_else(|| "1".into());
    let horizon = args.next().unwrap_or_else(|| "1000000".into());
    let preset = Path::new(env!("CARGO_MANIFEST_DIR")).join("presets/fig2-batch.conf");
    let cfg = RunConfig::load(
        &preset,
        &[("run.seed".into(), seed), ("run.horizon".into(), horizon)],
    )?;

    let outcome = runner::run(&cfg)?;
    println!(
        "{:>9}  {:>6}  {:>7}  {:>7}",
        "step", "rate", "entropy", "carried"
    );
    for c in &outcome.simulation.checkpoints {
        let rate = c.report.as_ref().map_or(f64::NAN, |r| r.mean_rate);
        println!(
            "{:>9}  {rate:>6.3}  {:>7.4}  {:>7}",
            c.step, c.entropy, c.carried
        );
    }
    println!("snapshots in {}", outcome.dir.join("snapshots").display());
    Ok(())
}
