//! Items, their feature space, and the schedule by which they enter the habitat.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::habitat::{Grid, ItemId, Position};
use crate::rng::{stream_rng, Stream};

/// One data object. Features are normalized to `[0, 1]`; the label is ground truth
/// used only for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Item {
    pub id: u64,
    pub features: Vec<f64>,
    pub label: Option<String>,
}

impl Item {
    pub fn new(id: u64, features: Vec<f64>, label: Option<String>) -> Self {
        Self {
            id,
            features,
            label,
        }
    }
}

/// All items of a run, addressed by dense [`ItemId`] (their position in the store).
#[derive(Debug, Clone, Default)]
pub struct ItemStore {
    items: Vec<Item>,
}

impl ItemStore {
    /// Checks that every item has the same dimension, features in `[0, 1]`, and a
    /// unique id.
    pub fn new(items: Vec<Item>) -> Result<Self> {
        if items.len() > u32::MAX as usize {
            return Err(Error::InvalidData("too many items".into()));
        }
        let mut seen = HashSet::with_capacity(items.len());
        let dim = items.first().map_or(0, |i| i.features.len());
        for item in &items {
            if item.features.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: item.features.len(),
                });
            }
            if let Some(bad) = item.features.iter().find(|f| !(0.0..=1.0).contains(*f)) {
                return Err(Error::InvalidData(format!(
                    "item {} has feature {bad} outside [0, 1]",
                    item.id
                )));
            }
            if !seen.insert(item.id) {
                return Err(Error::InvalidData(format!("duplicate item id {}", item.id)));
            }
        }
        Ok(Self { items })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.items.first().map_or(0, |i| i.features.len())
    }

    #[inline]
    pub fn get(&self, id: ItemId) -> &Item {
        &self.items[id.index()]
    }

    #[inline]
    pub fn features(&self, id: ItemId) -> &[f64] {
        &self.items[id.index()].features
    }

    pub fn label(&self, id: ItemId) -> Option<&str> {
        self.items[id.index()].label.as_deref()
    }

    pub fn ids(&self) -> impl Iterator<Item = ItemId> {
        (0..self.items.len() as u32).map(ItemId)
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }
}

/// Per-dimension bounds used to bring raw features onto `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSpace {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl FeatureSpace {
    /// The identity normalization for data already in the unit cube.
    pub fn unit(dim: usize) -> Self {
        Self {
            mins: vec![0.0; dim],
            maxs: vec![1.0; dim],
        }
    }

    /// Bounds spanning every row.
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let dim = rows.first().map_or(0, Vec::len);
        let mut mins = vec![f64::INFINITY; dim];
        let mut maxs = vec![f64::NEG_INFINITY; dim];
        for row in rows {
            for (j, &v) in row.iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
        Self { mins, maxs }
    }

    pub fn dim(&self) -> usize {
        self.mins.len()
    }

    /// Largest distance attainable between normalized vectors.
    pub fn d_max(&self) -> f64 {
        1.0
    }

    /// Min-max scaling; a constant dimension maps to 0.5.
    pub fn normalize(&self, raw: &[f64]) -> Vec<f64> {
        raw.iter()
            .zip(self.mins.iter().zip(&self.maxs))
            .map(|(&v, (&lo, &hi))| {
                if hi > lo {
                    ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
                } else {
                    0.5
                }
            })
            .collect()
    }

    pub fn denormalize(&self, unit: &[f64]) -> Vec<f64> {
        unit.iter()
            .zip(self.mins.iter().zip(&self.maxs))
            .map(|(&u, (&lo, &hi))| if hi > lo { lo + u * (hi - lo) } else { lo })
            .collect()
    }
}

/// Root-mean-square difference of two equally long unit-cube vectors, which lies in
/// `[0, 1]` and reaches 1 only between opposite corners.
#[inline]
pub fn feature_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.is_empty() {
        return 0.0;
    }
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (sum / a.len() as f64).sqrt()
}

/// Normalized Euclidean distance between two items.
pub fn normalized_distance(a: &Item, b: &Item, space: &FeatureSpace) -> Result<f64> {
    if a.features.len() != b.features.len() {
        return Err(Error::DimensionMismatch {
            left: a.features.len(),
            right: b.features.len(),
        });
    }
    Ok(feature_distance(&a.features, &b.features) / space.d_max())
}

/// Reads `id,label,f1,...,fF` rows. A leading header row is skipped when its first
/// field is not an integer. Features are min-max normalized over the whole file.
///
/// `declared_dim` fixes F; when `None` it is taken from the first data row.
pub fn ingest_csv(path: &Path, declared_dim: Option<usize>) -> Result<(Vec<Item>, FeatureSpace)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(file);

    let malformed = |row: u64, message: String| Error::MalformedRow {
        path: path.to_path_buf(),
        row,
        message,
    };

    let mut dim = declared_dim;
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut raw: Vec<Vec<f64>> = Vec::new();
    let mut seen = HashSet::new();
    let mut first = true;

    for record in reader.records() {
        let record = record.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line());
            malformed(row, e.to_string())
        })?;
        let row = record.position().map_or(0, |p| p.line());
        let id_field = record.get(0).unwrap_or("");
        let id = match id_field.parse::<u64>() {
            Ok(id) => id,
            Err(_) if first => {
                first = false;
                continue;
            }
            Err(_) => return Err(malformed(row, format!("id `{id_field}` is not an integer"))),
        };
        first = false;

        if record.len() < 2 {
            return Err(malformed(row, "expected `id,label,f1,...`".into()));
        }
        let f = record.len() - 2;
        let want = *dim.get_or_insert(f);
        if f != want {
            return Err(malformed(
                row,
                format!("expected {want} features, found {f}"),
            ));
        }
        if !seen.insert(id) {
            return Err(malformed(row, format!("duplicate id {id}")));
        }

        let mut feats = Vec::with_capacity(f);
        for (j, field) in record.iter().skip(2).enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                malformed(
                    row,
                    format!("feature {} (`{field}`) is not a number", j + 1),
                )
            })?;
            if !v.is_finite() {
                return Err(malformed(row, format!("feature {} is not finite", j + 1)));
            }
            feats.push(v);
        }
        let label = record.get(1).filter(|l| !l.is_empty()).map(str::to_owned);
        ids.push(id);
        labels.push(label);
        raw.push(feats);
    }

    let space = FeatureSpace::fit(&raw);
    let items = ids
        .into_iter()
        .zip(labels)
        .zip(&raw)
        .map(|((id, label), r)| Item::new(id, space.normalize(r), label))
        .collect();
    Ok((items, space))
}

/// `id,label,f1,...,fF` with a header row. Features are written as given.
pub fn items_to_csv(items: &[Item]) -> String {
    let dim = items.first().map_or(0, |i| i.features.len());
    let mut s = String::from("id,label");
    for j in 1..=dim {
        let _ = write!(s, ",f{j}");
    }
    s.push('\n');
    for item in items {
        let _ = write!(s, "{},{}", item.id, item.label.as_deref().unwrap_or(""));
        for v in &item.features {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

pub fn write_items_csv(path: &Path, items: &[Item]) -> Result<()> {
    std::fs::write(path, items_to_csv(items)).map_err(|e| Error::io(path, e))
}

/// A batch of items that enters the habitat at one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReleaseGroup {
    pub step: u64,
    pub items: Vec<ItemId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamSchedule {
    pub groups: Vec<ReleaseGroup>,
    pub total_steps: u64,
}

impl StreamSchedule {
    pub fn item_count(&self) -> usize {
        self.groups.iter().map(|g| g.items.len()).sum()
    }

    pub fn group_due(&self, t: u64) -> Option<&ReleaseGroup> {
        self.groups
            .binary_search_by_key(&t, |g| g.step)
            .ok()
            .map(|i| &self.groups[i])
    }

    /// Items released at or before step `t`.
    pub fn released_by(&self, t: u64) -> usize {
        self.groups
            .iter()
            .take_while(|g| g.step <= t)
            .map(|g| g.items.len())
            .sum()
    }

    pub fn last_release(&self) -> Option<u64> {
        self.groups.last().map(|g| g.step)
    }
}

/// Shuffles `items` with the schedule stream of `seed` and cuts the result, in order,
/// into groups of `group_sizes` released at `release_steps`.
///
/// Release steps must be strictly increasing and below `total_steps`, except that a
/// release at step 0 is always allowed.
pub fn build_schedule(
    items: &[ItemId],
    group_sizes: &[usize],
    release_steps: &[u64],
    total_steps: u64,
    seed: u64,
) -> Result<StreamSchedule> {
    if group_sizes.len() != release_steps.len() {
        return Err(Error::Schedule(format!(
            "{} group sizes but {} release steps",
            group_sizes.len(),
            release_steps.len()
        )));
    }
    let total: usize = group_sizes.iter().sum();
    if total != items.len() {
        return Err(Error::Schedule(format!(
            "group sizes add up to {total} but there are {} items",
            items.len()
        )));
    }
    if let Some(w) = release_steps.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::Schedule(format!(
            "release steps must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    if let Some(&s) = release_steps.iter().find(|&&s| s != 0 && s >= total_steps) {
        return Err(Error::Schedule(format!(
            "release step {s} is not before the horizon {total_steps}"
        )));
    }
    let mut unique = HashSet::with_capacity(items.len());
    if !items.iter().all(|id| unique.insert(*id)) {
        return Err(Error::Schedule("an item id appears twice".into()));
    }

    let mut order = items.to_vec();
    order.shuffle(&mut stream_rng(seed, Stream::Schedule));

    let mut rest = order.as_slice();
    let groups = group_sizes
        .iter()
        .zip(release_steps)
        .map(|(&n, &step)| {
            let (head, tail) = rest.split_at(n);
            rest = tail;
            ReleaseGroup {
                step,
                items: head.to_vec(),
            }
        })
        .collect();
    Ok(StreamSchedule {
        groups,
        total_steps,
    })
}

/// Parses schedule rows `release_step,count` into `(group_sizes, release_steps)`.
/// Blank lines, `#` comments and a non-numeric header row are ignored.
pub fn parse_schedule_file(text: &str) -> Result<(Vec<usize>, Vec<u64>)> {
    let mut sizes = Vec::new();
    let mut steps = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',').map(str::trim);
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Schedule(format!(
                "line {}: expected `release_step,count`",
                n + 1
            )));
        };
        match (a.parse::<u64>(), b.parse::<usize>()) {
            (Ok(step), Ok(count)) => {
                steps.push(step);
                sizes.push(count);
            }
            _ if steps.is_empty() && a.parse::<f64>().is_err() => continue,
            _ => {
                return Err(Error::Schedule(format!(
                    "line {}: `{line}` is not `release_step,count`",
                    n + 1
                )))
            }
        }
    }
    Ok((sizes, steps))
}

/// Places every item of the group due at step `t` on a uniformly random empty cell.
///
/// Each placement draws cell indices (`u32` in `0..W*H`) until an empty one comes up.
/// Returns where each item went; nothing happens when no group is due.
pub fn release_due<R: Rng>(
    schedule: &StreamSchedule,
    t: u64,
    grid: &mut Grid,
    rng: &mut R,
) -> Result<Vec<(ItemId, Position)>> {
    let Some(group) = schedule.group_due(t) else {
        return Ok(Vec::new());
    };
    place_randomly(&group.items, grid, rng)
}

pub(crate) fn place_randomly<R: Rng>(
    items: &[ItemId],
    grid: &mut Grid,
    rng: &mut R,
) -> Result<Vec<(ItemId, Position)>> {
    if grid.free_cells() < items.len() {
        return Err(Error::GridFull {
            needed: items.len(),
            free: grid.free_cells(),
        });
    }
    let dims = grid.dims();
    let cells = dims.cells() as u32;
    let mut placed = Vec::with_capacity(items.len());
    for &id in items {
        loop {
            let p = dims.position(rng.random_range(0..cells) as usize);
            if grid.place(id, p).is_ok() {
                placed.push((id, p));
                break;
            }
        }
    }
    Ok(placed)
}

/// Gaussian classes in the unit cube.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    /// One mean vector per class; all must have the same length.
    pub means: Vec<Vec<f64>>,
    /// Per-dimension standard deviation, shared by every class.
    pub spread: f64,
    pub items_per_class: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            means: vec![
                vec![0.2, 0.2],
                vec![0.2, 0.8],
                vec![0.8, 0.2],
                vec![0.8, 0.8],
            ],
            spread: 0.1,
            items_per_class: 200,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn n_classes(&self) -> usize {
        self.means.len()
    }

    pub fn dim(&self) -> usize {
        self.means.first().map_or(0, Vec::len)
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.means.is_empty() {
            v.push("synthetic.means must list at least one class".to_string());
        }
        if self.dim() == 0 && !self.means.is_empty() {
            v.push("synthetic.means vectors must not be empty".to_string());
        }
        if self.means.iter().any(|m| m.len() != self.dim()) {
            v.push("synthetic.means vectors must all have the same length".to_string());
        }
        if self
            .means
            .iter()
            .flatten()
            .any(|x| !(0.0..=1.0).contains(x))
        {
            v.push("synthetic.means components must lie in [0, 1]".to_string());
        }
        if !(self.spread >= 0.0 && self.spread.is_finite()) {
            v.push(format!(
                "synthetic.spread must be >= 0 (got {})",
                self.spread
            ));
        }
        v
    }
}

/// Class label used for the `c`-th synthetic class.
pub fn class_label(c: usize) -> String {
    format!("c{c}")
}

/// `items_per_class` draws per class, class-major, ids `0..n`. Each feature is
/// `mean + N(0, spread)` clamped to `[0, 1]`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Vec<Item> {
    let mut rng = stream_rng(spec.seed, Stream::Synthetic);
    let noise = Normal::new(0.0, spec.spread).expect("spread must be finite and non-negative");
    let mut items = Vec::with_capacity(spec.n_classes() * spec.items_per_class);
    for (c, mean) in spec.means.iter().enumerate() {
        for _ in 0..spec.items_per_class {
            let features = mean
                .iter()
                .map(|&m| (m + noise.sample(&mut rng)).clamp(0.0, 1.0))
                .collect();
            let id = items.len() as u64;
            items.push(Item::new(id, features, Some(class_label(c))));
        }
    }
    items
}
