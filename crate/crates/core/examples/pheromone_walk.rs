//! Ants without items: deposits and evaporation alone turn a random walk into a
//! network of trails. Writes the field as a PGM image every 500 steps.
//!
//! cargo run --release --example pheromone_walk -- [out_dir]

use std::path::PathBuf;

use antclust::behavior::ThresholdParams;
use antclust::colony::{Colony, MovementParams};
use antclust::datastream::ItemStore;
use antclust::habitat::{Grid, PheromoneField};
use antclust::rng::{stream_rng, Stream};

fn main() -> antclust::Result<()> {
    let out = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "runs/trails".into()),
    );
    std::fs::create_dir_all(&out).map_err(|e| antclust::Error::io(&out, e))?;

    let mut grid = Grid::new(57, 57);
    let mut field = PheromoneField::new(57, 57);
    let mut colony = Colony::scatter(80, grid.dims(), stream_rng(7, Stream::Simulation));
    let items = ItemStore::new(Vec::new())?;
    let movement = MovementParams::default();
    let thresholds = ThresholdParams::default();

    for t in 1..=3000 {
        colony.step(&mut grid, &mut field, &items, &movement, &thresholds);
        if t % 500 == 0 {
            let (lo, mean, hi) = field.summary();
            // spread of the field: trails show up as max >> mean
            println!(
                "t={t:>5}  min {lo:.4}  mean {mean:.4}  max {hi:.4}  max/mean {:.1}",
                hi / mean
            );
            field.write_pgm(&out.join(format!("trail_{t}.pgm")))?;
        }
    }
    Ok(())
}
