//! Measuring a run: k-NN classification rate on grid positions, spatial entropy of
//! item placement, and snapshot exports.
//!
//! Everything here reads [`Snapshot`] copies and never touches the live world.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::habitat::{Dims, ItemId, Position};
use crate::world::World;

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotItem {
    pub id: ItemId,
    /// External identifier of the item (the `id` column of its source).
    pub source_id: u64,
    pub position: Position,
    pub label: Option<String>,
}

/// Frozen view of a world at one step.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: u64,
    pub dims: Dims,
    /// Grid-resident items in row-major cell order.
    pub items: Vec<SnapshotItem>,
    /// Source ids of items currently carried by ants.
    pub carried: Vec<u64>,
    pub released: usize,
    /// `(min, mean, max)` of the pheromone field.
    pub pheromone: (f64, f64, f64),
}

impl Snapshot {
    pub fn of(world: &World) -> Self {
        let items = world
            .grid
            .occupants()
            .map(|(position, id)| {
                let item = world.items.get(id);
                SnapshotItem {
                    id,
                    source_id: item.id,
                    position,
                    label: item.label.clone(),
                }
            })
            .collect();
        let carried = world
            .colony
            .carried()
            .map(|id| world.items.get(id).id)
            .collect();
        Self {
            step: world.time(),
            dims: world.grid.dims(),
            items,
            carried,
            released: world.released(),
            pheromone: world.field.summary(),
        }
    }

    /// `x,y,item_id,label` per grid-resident item.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y,item_id,label\n");
        for it in &self.items {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                it.position.x,
                it.position.y,
                it.source_id,
                it.label.as_deref().unwrap_or("")
            );
        }
        s
    }
}

/// Euclidean distance on the torus, per axis taking the shorter way round.
pub fn toroidal_grid_distance(a: Position, b: Position, dims: Dims) -> f64 {
    (toroidal_sq_distance(a, b, dims) as f64).sqrt()
}

/// Squared toroidal distance; exact, so it is what neighbours are ranked by.
#[inline]
pub fn toroidal_sq_distance(a: Position, b: Position, dims: Dims) -> u64 {
    let dx = a.x.abs_diff(b.x);
    let dy = a.y.abs_diff(b.y);
    let dx = dx.min(dims.width - dx) as u64;
    let dy = dy.min(dims.height - dy) as u64;
    dx * dx + dy * dy
}

/// A labeled, grid-resident item as the k-NN rule sees it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabeledPoint {
    pub id: u64,
    pub position: Position,
    pub class: u32,
}

/// Labeled grid items of a snapshot, ordered by source id, with the class names
/// indexed by [`LabeledPoint::class`].
pub fn labeled_points(snapshot: &Snapshot) -> (Vec<LabeledPoint>, Vec<String>) {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<&str, u32> = HashMap::new();
    let mut points: Vec<LabeledPoint> = snapshot
        .items
        .iter()
        .filter_map(|it| {
            let label = it.label.as_deref()?;
            let class = *index.entry(label).or_insert_with(|| {
                names.push(label.to_string());
                names.len() as u32 - 1
            });
            Some(LabeledPoint {
                id: it.source_id,
                position: it.position,
                class,
            })
        })
        .collect();
    points.sort_by_key(|p| p.id);
    (points, names)
}

/// Number of test items for a set of `n`: `ceil(fraction * n)`.
pub fn test_count(n: usize, fraction: f64) -> usize {
    // the epsilon keeps e.g. 0.2 * 800 from rounding up to 161
    ((fraction * n as f64) - 1e-9).ceil().max(0.0) as usize
}

/// Draws `n_subsets` random test sets of `test_count(n, fraction)` indices into
/// `0..n`. Each set is the prefix of a partial Fisher-Yates shuffle.
pub fn draw_test_sets<R: Rng>(
    n: usize,
    fraction: f64,
    n_subsets: usize,
    rng: &mut R,
) -> Vec<Vec<usize>> {
    let m = test_count(n, fraction);
    (0..n_subsets)
        .map(|_| {
            let mut idx: Vec<usize> = (0..n).collect();
            let (test, _) = idx.partial_shuffle(rng, m);
            test.to_vec()
        })
        .collect()
}

/// Majority label among the `k` training points nearest to `query`.
///
/// Neighbours are ranked by distance, then by lower id. A tie in the vote goes to the
/// tied label whose closest member ranks first.
pub fn predict(query: Position, training: &[LabeledPoint], k: usize, dims: Dims) -> Option<u32> {
    if training.len() < k || k == 0 {
        return None;
    }
    let mut ranked: Vec<(u64, u64, u32)> = training
        .iter()
        .map(|p| (toroidal_sq_distance(query, p.position, dims), p.id, p.class))
        .collect();
    if k < ranked.len() {
        ranked.select_nth_unstable(k - 1);
        ranked.truncate(k);
    }
    ranked.sort_unstable();

    // (class, votes, rank of its nearest member)
    let mut tally: Vec<(u32, usize, usize)> = Vec::with_capacity(k);
    for (rank, &(_, _, class)) in ranked.iter().enumerate() {
        match tally.iter_mut().find(|t| t.0 == class) {
            Some(t) => t.1 += 1,
            None => tally.push((class, 1, rank)),
        }
    }
    tally
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.2.cmp(&a.2)))
        .map(|t| t.0)
}

/// Classification rates of the given test sets, one per set.
pub fn rates_for_splits(
    points: &[LabeledPoint],
    splits: &[Vec<usize>],
    k: usize,
    dims: Dims,
) -> Result<Vec<f64>> {
    let mut in_test = vec![false; points.len()];
    let mut training = Vec::with_capacity(points.len());
    splits
        .iter()
        .map(|test| {
            in_test.fill(false);
            for &i in test {
                in_test[i] = true;
            }
            training.clear();
            training.extend(
                points
                    .iter()
                    .zip(&in_test)
                    .filter(|(_, &t)| !t)
                    .map(|(p, _)| *p),
            );
            if training.len() < k {
                return Err(Error::InsufficientItems(format!(
                    "{} training items for k = {k}",
                    training.len()
                )));
            }
            let correct = test
                .iter()
                .filter(|&&i| {
                    predict(points[i].position, &training, k, dims) == Some(points[i].class)
                })
                .count();
            Ok(if test.is_empty() {
                0.0
            } else {
                correct as f64 / test.len() as f64
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub step: u64,
    pub rates: Vec<f64>,
    pub mean_rate: f64,
    pub k: usize,
    pub test_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalParams {
    pub k: usize,
    pub test_fraction: f64,
    pub n_subsets: usize,
    pub patch_size: usize,
}

impl Default for EvalParams {
    fn default() -> Self {
        Self {
            k: 3,
            test_fraction: 0.2,
            n_subsets: 10,
            patch_size: 8,
        }
    }
}

impl EvalParams {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.k == 0 {
            v.push("eval.k must be >= 1".to_string());
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            v.push(format!(
                "eval.test_fraction must lie in (0, 1) (got {})",
                self.test_fraction
            ));
        }
        if self.n_subsets == 0 {
            v.push("eval.subsets must be >= 1".to_string());
        }
        if self.patch_size == 0 {
            v.push("eval.patch_size must be >= 1".to_string());
        }
        v
    }
}

/// k-NN rule on grid positions over `n_subsets` random test sets. Carried and
/// unlabeled items take no part.
pub fn knn_rate<R: Rng>(
    snapshot: &Snapshot,
    k: usize,
    test_fraction: f64,
    n_subsets: usize,
    rng: &mut R,
) -> Result<ClassificationReport> {
    let (points, _) = labeled_points(snapshot);
    let n = points.len();
    if n < k + 1 {
        return Err(Error::InsufficientItems(format!(
            "{n} labeled items on the grid, need at least {}",
            k + 1
        )));
    }
    let m = test_count(n, test_fraction);
    if m == 0 || n - m < k {
        return Err(Error::InsufficientItems(format!(
            "{n} labeled items cannot be split into {m} test and at least {k} training items"
        )));
    }
    let splits = draw_test_sets(n, test_fraction, n_subsets, rng);
    let rates = rates_for_splits(&points, &splits, k, snapshot.dims)?;
    let mean_rate = rates.iter().sum::<f64>() / rates.len() as f64;
    Ok(ClassificationReport {
        step: snapshot.step,
        rates,
        mean_rate,
        k,
        test_fraction,
    })
}

/// Shannon entropy (bits) of item occupancy over `patch_size` square patches. Patches
/// at the right and bottom edges may be smaller. An empty snapshot scores 0.
pub fn spatial_entropy(snapshot: &Snapshot, patch_size: usize) -> f64 {
    assert!(patch_size > 0);
    let total = snapshot.items.len();
    if total == 0 {
        return 0.0;
    }
    let per_row = snapshot.dims.width.div_ceil(patch_size);
    let rows = snapshot.dims.height.div_ceil(patch_size);
    let mut counts = vec![0usize; per_row * rows];
    for it in &snapshot.items {
        counts[(it.position.y / patch_size) * per_row + it.position.x / patch_size] += 1;
    }
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / total as f64;
            -p * p.log2()
        })
        .sum()
}

/// `(step, entropy)` pairs in step order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EntropyTrace(pub Vec<(u64, f64)>);

impl EntropyTrace {
    pub fn push(&mut self, step: u64, entropy: f64) {
        debug_assert!(self.0.last().is_none_or(|&(t, _)| t < step));
        self.0.push((step, entropy));
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("step,entropy\n");
        for (t, e) in &self.0 {
            let _ = writeln!(s, "{t},{e}");
        }
        s
    }
}

/// `step,mean_rate,rate_1..rate_n`.
pub fn reports_to_csv(reports: &[ClassificationReport]) -> String {
    let n = reports.iter().map(|r| r.rates.len()).max().unwrap_or(0);
    let mut s = String::from("step,mean_rate");
    for i in 1..=n {
        let _ = write!(s, ",rate_{i}");
    }
    s.push('\n');
    for r in reports {
        let _ = write!(s, "{},{}", r.step, r.mean_rate);
        for v in &r.rates {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

/// Log-spaced checkpoints: 0, then 1, 2 and 5 times each power of ten from 1000 up
/// to the horizon, and the horizon itself.
pub fn default_checkpoints(horizon: u64) -> Vec<u64> {
    let mut out = vec![0];
    let mut decade = 1000u64;
    'outer: loop {
        for m in [1, 2, 5] {
            let t = decade * m;
            if t >= horizon {
                break 'outer;
            }
            out.push(t);
        }
        decade *= 10;
    }
    if horizon > 0 {
        out.push(horizon);
    }
    out
}

/// Everything measured at one checkpoint.
#[derive(Debug, Clone)]
pub struct CheckpointRecord {
    pub snapshot: Snapshot,
    /// The report, or why it could not be produced.
    pub report: std::result::Result<ClassificationReport, String>,
    pub entropy: f64,
}

/// Measures `world` as it stands. The k-NN splits come from `rng`, which callers keep
/// separate from the simulation's own stream.
pub fn measure<R: Rng>(world: &World, params: &EvalParams, rng: &mut R) -> CheckpointRecord {
    let snapshot = Snapshot::of(world);
    let report = knn_rate(
        &snapshot,
        params.k,
        params.test_fraction,
        params.n_subsets,
        rng,
    )
    .map_err(|e| e.to_string());
    let entropy = spatial_entropy(&snapshot, params.patch_size);
    CheckpointRecord {
        snapshot,
        report,
        entropy,
    }
}
