//! Streaming feed: 244 items arrive in six groups between t=0 and t=50000, and the
//! classification rate is tracked as the colony absorbs each group.
//!
//! cargo run --release --example stream_feed -- [seed]

use std::path::Path;

use antclust::config::RunConfig;
use antclust::runner;

fn main() -> antclust::Result<()> {
    let seed = std::env::args().nth(1).unwrap_or_else(|| "1".into());
    let preset = Path::new(env!("CARGO_MANIFEST_DIR")).join("presets/sec4-stream.conf");
    let cfg = RunConfig::load(&preset, &[("run.seed".into(), seed)])?;

    let sim = runner::simulate(&cfg, |_, _| Ok(()))?;
    for c in &sim.checkpoints {
        match &c.report {
            Ok(r) => {
                let bar = "#".repeat((r.mean_rate * 50.0).round() as usize);
                println!(
                    "{:>8}  {:>3} items  {:.3} {bar}",
                    c.step, c.released, r.mean_rate
                );
            }
            Err(why) => println!("{:>8}  {:>3} items  -- {why}", c.step, c.released),
        }
    }
    Ok(())
}
