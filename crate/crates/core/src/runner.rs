//! End-to-end experiments: build a world from a [`RunConfig`], run it to the horizon
//! while measuring at checkpoints, and write every output under one directory.
//!
//! Layout of a run directory `<out>/seed<seed>-<config hash>/`:
//!
//! * `manifest.txt`: the effective configuration (loadable as a config) followed by
//!   `#`-prefixed metadata lines (version, wall time, skipped checkpoints)
//! * `reports.csv`: `step,mean_rate,rate_1..rate_n`
//! * `entropy.csv`: `step,entropy`
//! * `snapshots/step_<t>.csv` (`x,y,item_id,label`) and `snapshots/step_<t>.pgm`
//! * `occupancy.csv`: `x,y,item_id` at the horizon

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::config::{DataSource, RunConfig, ScheduleSpec};
use crate::datastream::{
    build_schedule, generate_synthetic, ingest_csv, parse_schedule_file, ItemStore,
};
use crate::error::{Error, Result};
use crate::evaluation::{
    measure, reports_to_csv, CheckpointRecord, ClassificationReport, EntropyTrace,
};
use crate::habitat::ItemId;
use crate::rng::evaluation_rng;
use crate::world::World;

/// Builds the initial world for `cfg`: loads or generates items, partitions them
/// into release groups, and scatters the colony. Nothing is released yet.
pub fn build_world(cfg: &RunConfig) -> Result<World> {
    let errors = cfg.violations();
    if !errors.is_empty() {
        return Err(Error::Config(errors));
    }
    let items = match &cfg.data {
        DataSource::Synthetic { .. } => {
            generate_synthetic(&cfg.synthetic_spec().expect("synthetic data source"))
        }
        DataSource::Csv { path, features } => ingest_csv(path, *features)?.0,
    };
    let store = ItemStore::new(items)?;
    let n = store.len();
    if n > cfg.width * cfg.height {
        return Err(Error::Config(vec![format!(
            "{n} items do not fit on a {}x{} grid",
            cfg.width, cfg.height
        )]));
    }
    let ids: Vec<ItemId> = store.ids().collect();
    let (sizes, steps) = match &cfg.schedule {
        ScheduleSpec::Batch => (vec![n], vec![0]),
        ScheduleSpec::Groups { sizes, steps } => (sizes.clone(), steps.clone()),
        ScheduleSpec::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_schedule_file(&text)?
        }
    };
    let schedule = build_schedule(&ids, &sizes, &steps, cfg.horizon, cfg.seed)?;
    Ok(World::new(
        cfg.width,
        cfg.height,
        store,
        schedule,
        cfg.n_ants(n),
        cfg.movement.clone(),
        cfg.thresholds.clone(),
        cfg.seed,
    ))
}

/// Summary of one checkpoint, kept after the snapshot itself has been consumed.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointSummary {
    pub step: u64,
    pub report: std::result::Result<ClassificationReport, String>,
    pub entropy: f64,
    pub on_grid: usize,
    pub carried: usize,
    pub released: usize,
}

impl CheckpointSummary {
    /// Grid-resident plus carried items equal the released count.
    pub fn conserved(&self) -> bool {
        self.on_grid + self.carried == self.released
    }
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub checkpoints: Vec<CheckpointSummary>,
    pub world: World,
}

impl Simulation {
    pub fn reports(&self) -> Vec<ClassificationReport> {
        self.checkpoints
            .iter()
            .filter_map(|c| c.report.as_ref().ok().cloned())
            .collect()
    }

    pub fn entropy(&self) -> EntropyTrace {
        EntropyTrace(
            self.checkpoints
                .iter()
                .map(|c| (c.step, c.entropy))
                .collect(),
        )
    }

    /// Mean rate measured at the horizon, if a report could be produced there.
    pub fn final_rate(&self) -> Option<f64> {
        self.checkpoints
            .last()
            .and_then(|c| c.report.as_ref().ok())
            .map(|r| r.mean_rate)
    }
}

/// Runs `cfg` to its horizon without touching the filesystem (except to read input
/// data). `observe` sees the world and the full record at every checkpoint.
pub fn simulate(
    cfg: &RunConfig,
    mut observe: impl FnMut(&World, &CheckpointRecord) -> Result<()>,
) -> Result<Simulation> {
    let mut world = build_world(cfg)?;
    let checkpoints = cfg.checkpoint_steps();
    let mut next = checkpoints.iter().copied().peekable();
    let mut summaries = Vec::with_capacity(checkpoints.len());
    loop {
        let t = world.time();
        world.release_pending()?;
        if next.next_if_eq(&t).is_some() {
            let rec = measure(&world, &cfg.eval, &mut evaluation_rng(cfg.seed, t));
            observe(&world, &rec)?;
            summaries.push(CheckpointSummary {
                step: t,
                on_grid: rec.snapshot.items.len(),
                carried: rec.snapshot.carried.len(),
                released: rec.snapshot.released,
                report: rec.report,
                entropy: rec.entropy,
            });
        }
        if t >= cfg.horizon {
            break;
        }
        world.step()?;
    }
    Ok(Simulation {
        checkpoints: summaries,
        world,
    })
}

/// Where [`run`] puts the outputs of `cfg`.
pub fn run_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out_dir.join(format!("seed{}-{}", cfg.seed, cfg.hash()))
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub simulation: Simulation,
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Runs `cfg` and writes all outputs to [`run_dir`].
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let started = Instant::now();
    let dir = run_dir(cfg);
    let snaps = dir.join("snapshots");
    std::fs::create_dir_all(&snaps).map_err(|e| Error::io(&snaps, e))?;

    let simulation = simulate(cfg, |world, rec| {
        let t = rec.snapshot.step;
        write(&snaps.join(format!("step_{t}.csv")), rec.snapshot.to_csv())?;
        world.field.write_pgm(&snaps.join(format!("step_{t}.pgm")))
    })?;

    write(
        &dir.join("reports.csv"),
        reports_to_csv(&simulation.reports()),
    )?;
    write(&dir.join("entropy.csv"), simulation.entropy().to_csv())?;
    let mut occupancy = Vec::new();
    let world = &simulation.world;
    world
        .grid
        .write_occupancy_csv(&mut occupancy, |id| world.items.get(id).id)
        .map_err(|e| Error::io(&dir, e))?;
    write(&dir.join("occupancy.csv"), occupancy)?;

    let mut manifest = cfg.echo();
    let _ = writeln!(manifest, "# antclust {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        manifest,
        "# wall_time_ms = {}",
        started.elapsed().as_millis()
    );
    for c in &simulation.checkpoints {
        if let Err(reason) = &c.report {
            let _ = writeln!(manifest, "# skipped report at step {}: {reason}", c.step);
        }
    }
    write(&dir.join("manifest.txt"), manifest)?;

    Ok(RunOutcome { dir, simulation })
}

/// Final mean rates of the two feeding regimes for one seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedComparison {
    pub seed: u64,
    pub batch: f64,
    pub stream: f64,
}

impl SeedComparison {
    pub fn delta(&self) -> f64 {
        self.stream - self.batch
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonSummary {
    pub rows: Vec<SeedComparison>,
}

fn mean_std(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = if n > 1.0 {
        xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

impl ComparisonSummary {
    /// `(mean, sample standard deviation)` of batch rates, stream rates and deltas.
    pub fn aggregate(&self) -> [(f64, f64); 3] {
        [
            mean_std(self.rows.iter().map(|r| r.batch)),
            mean_std(self.rows.iter().map(|r| r.stream)),
            mean_std(self.rows.iter().map(SeedComparison::delta)),
        ]
    }

    /// `seed,batch_rate,stream_rate,delta` per seed, then `mean` and `stddev` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("seed,batch_rate,stream_rate,delta\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{},{}", r.seed, r.batch, r.stream, r.delta());
        }
        let [b, st, d] = self.aggregate();
        let _ = writeln!(s, "mean,{},{},{}", b.0, st.0, d.0);
        let _ = writeln!(s, "stddev,{},{},{}", b.1, st.1, d.1);
        s
    }
}

/// Runs the batch and streaming variants of `cfg` on every seed.
///
/// The streaming variant is `cfg` as given; the batch variant is `cfg` with every
/// item released at step 0. Per-run outputs go under `<out>/batch` and
/// `<out>/stream`; the table is written to `<out>/compare-<hash>.csv`. Seeds run in
/// parallel.
pub fn compare(cfg: &RunConfig, seeds: &[u64]) -> Result<ComparisonSummary> {
    if seeds.len() < 2 {
        return Err(Error::Config(vec![
            "compare needs at least two seeds".to_string()
        ]));
    }
    let variant = |seed: u64, batch: bool| RunConfig {
        seed,
        schedule: if batch {
            ScheduleSpec::Batch
        } else {
            cfg.schedule.clone()
        },
        out_dir: cfg.out_dir.join(if batch { "batch" } else { "stream" }),
        ..cfg.clone()
    };
    let final_rate = |c: &RunConfig| -> Result<f64> {
        let outcome = run(c)?;
        outcome.simulation.final_rate().ok_or_else(|| {
            Error::InsufficientItems(format!("no report at the horizon of seed {}", c.seed))
        })
    };
    let rows = seeds
        .par_iter()
        .map(|&seed| {
            Ok(SeedComparison {
                seed,
                batch: final_rate(&variant(seed, true))?,
                stream: final_rate(&variant(seed, false))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = ComparisonSummary { rows };
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::io(&cfg.out_dir, e))?;
    write(
        &cfg.out_dir.join(format!("compare-{}.csv", cfg.hash())),
        summary.to_csv(),
    )?;
    Ok(summary)
}
