//! Run configuration: a flat `key = value` text format plus overrides.
//!
//! Lines are `key = value`; blank lines and lines starting with `#` are ignored.
//! Later assignments win, so applying the file and then command-line pairs gives
//! the precedence command line > file > defaults. Every problem found while loading
//! is reported together.
//!
//! [`RunConfig::echo`] writes back every effective value in the same format, which
//! is what run manifests contain; loading an echo reproduces the configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::behavior::{Aggregation, ThresholdParams};
use crate::colony::MovementParams;
use crate::datastream::SyntheticSpec;
use crate::error::{Error, Result};
use crate::evaluation::{default_checkpoints, EvalParams};
use crate::world::default_colony_size;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColonySize {
    /// [`default_colony_size`] of the total item count.
    Auto,
    Fixed(usize),
}

/// Where the synthetic generator's seed comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataSeed {
    /// Follow `run.seed`.
    Run,
    Fixed(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Synthetic {
        spec: SyntheticSpec,
        seed: DataSeed,
    },
    Csv {
        path: PathBuf,
        features: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleSpec {
    /// Everything at step 0.
    Batch,
    Groups {
        sizes: Vec<usize>,
        steps: Vec<u64>,
    },
    /// `release_step,count` rows read at run time.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Checkpoints {
    /// [`default_checkpoints`] of the horizon.
    Log,
    List(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub width: usize,
    pub height: usize,
    pub movement: MovementParams,
    pub thresholds: ThresholdParams,
    pub colony_size: ColonySize,
    pub data: DataSource,
    pub schedule: ScheduleSpec,
    pub horizon: u64,
    pub checkpoints: Checkpoints,
    pub eval: EvalParams,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            width: crate::habitat::DEFAULT_SIDE,
            height: crate::habitat::DEFAULT_SIDE,
            movement: MovementParams::default(),
            thresholds: ThresholdParams::default(),
            colony_size: ColonySize::Auto,
            data: DataSource::Synthetic {
                spec: SyntheticSpec::default(),
                seed: DataSeed::Run,
            },
            schedule: ScheduleSpec::Batch,
            horizon: 1_000_000,
            checkpoints: Checkpoints::Log,
            eval: EvalParams::default(),
            seed: 1,
            out_dir: PathBuf::from("runs"),
        }
    }
}

/// Splits config text into `(key, value)` pairs in file order.
pub fn parse_pairs(text: &str) -> std::result::Result<Vec<(String, String)>, Vec<String>> {
    let mut pairs = Vec::new();
    let mut errors = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() => {
                pairs.push((k.trim().to_string(), v.trim().to_string()))
            }
            _ => errors.push(format!(
                "line {}: expected `key = value`, got `{line}`",
                n + 1
            )),
        }
    }
    if errors.is_empty() {
        Ok(pairs)
    } else {
        Err(errors)
    }
}

/// Parses a `key=value` command-line override.
pub fn parse_override(s: &str) -> std::result::Result<(String, String), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(format!("expected key=value, got `{s}`")),
    }
}

fn num<T: FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
    v.parse()
        .map_err(|_| format!("{key}: `{v}` is not a valid number"))
}

fn list<T: FromStr>(key: &str, v: &str) -> std::result::Result<Vec<T>, String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| num(key, s))
        .collect()
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn resolve(base: Option<&Path>, v: &str) -> PathBuf {
    let p = PathBuf::from(v);
    match base {
        Some(b) if p.is_relative() => b.join(p),
        _ => p,
    }
}

fn means_from_str(v: &str) -> std::result::Result<Vec<Vec<f64>>, String> {
    v.split(';')
        .map(|class| {
            class
                .split_whitespace()
                .map(|x| num("synthetic.means", x))
                .collect()
        })
        .collect()
}

fn means_to_string(means: &[Vec<f64>]) -> String {
    means
        .iter()
        .map(|m| m.iter().map(f64::to_string).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Applies one `synthetic.*` key to `spec`. Returns `Ok(false)` for other keys.
fn apply_synthetic(
    spec: &mut SyntheticSpec,
    seed: &mut DataSeed,
    key: &str,
    v: &str,
) -> std::result::Result<bool, String> {
    match key {
        "synthetic.means" => spec.means = means_from_str(v)?,
        "synthetic.spread" => spec.spread = num(key, v)?,
        "synthetic.items_per_class" => spec.items_per_class = num(key, v)?,
        "synthetic.seed" => {
            *seed = if v == "run" {
                DataSeed::Run
            } else {
                DataSeed::Fixed(num(key, v)?)
            }
        }
        _ => return Ok(false),
    }
    Ok(true)
}

impl RunConfig {
    /// Loads a config file, then applies `overrides` on top.
    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut pairs = parse_pairs(&text).map_err(Error::Config)?;
        pairs.extend_from_slice(overrides);
        Self::from_pairs(&pairs, path.parent())
    }

    /// Builds a config from defaults and `pairs`. Relative paths resolve against
    /// `base_dir` when given.
    pub fn from_pairs(pairs: &[(String, String)], base_dir: Option<&Path>) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut errors = Vec::new();
        for (k, v) in pairs {
            if let Err(e) = cfg.apply(k, v, base_dir) {
                errors.push(e);
            }
        }
        errors.extend(cfg.violations());
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::Config(errors))
        }
    }

    fn apply(
        &mut self,
        key: &str,
        v: &str,
        base: Option<&Path>,
    ) -> std::result::Result<(), String> {
        let turn = |slot: usize, cfg: &mut Self| -> std::result::Result<(), String> {
            cfg.movement.turn_weights.0[slot] = num(key, v)?;
            Ok(())
        };
        match key {
            "grid.width" => self.width = num(key, v)?,
            "grid.height" => self.height = num(key, v)?,
            "move.beta" => self.movement.beta = num(key, v)?,
            "move.delta" => self.movement.delta = num(key, v)?,
            "move.eta" => self.movement.eta = num(key, v)?,
            "move.kappa" => self.movement.kappa = num(key, v)?,
            "move.w0" => turn(0, self)?,
            "move.w45" => turn(1, self)?,
            "move.w90" => turn(2, self)?,
            "move.w135" => turn(3, self)?,
            "move.w180" => turn(4, self)?,
            "threshold.theta_count" => self.thresholds.theta_count = num(key, v)?,
            "threshold.steepness" => self.thresholds.steepness = num(key, v)?,
            "threshold.k1" => self.thresholds.k1 = num(key, v)?,
            "threshold.k2" => self.thresholds.k2 = num(key, v)?,
            "threshold.aggregation" => {
                self.thresholds.aggregation = v
                    .parse::<Aggregation>()
                    .map_err(|e| format!("{key}: {e}"))?
            }
            "colony.ants" => {
                self.colony_size = if v == "auto" {
                    ColonySize::Auto
                } else {
                    ColonySize::Fixed(num(key, v)?)
                }
            }
            "data.source" => {
                self.data = match (v, &self.data) {
                    ("synthetic", DataSource::Synthetic { .. })
                    | ("csv", DataSource::Csv { .. }) => return Ok(()),
                    ("synthetic", _) => DataSource::Synthetic {
                        spec: SyntheticSpec::default(),
                        seed: DataSeed::Run,
                    },
                    ("csv", _) => DataSource::Csv {
                        path: PathBuf::new(),
                        features: None,
                    },
                    _ => return Err(format!("{key}: expected synthetic|csv, got `{v}`")),
                }
            }
            "data.csv" | "data.features" => {
                let DataSource::Csv { path, features } = &mut self.data else {
                    return Err(format!("{key} requires data.source = csv (set it first)"));
                };
                if key == "data.csv" {
                    *path = resolve(base, v);
                } else {
                    *features = if v == "auto" {
                        None
                    } else {
                        Some(num(key, v)?)
                    };
                }
            }
            k if k.starts_with("synthetic.") => {
                let DataSource::Synthetic { spec, seed } = &mut self.data else {
                    return Err(format!("{key} requires data.source = synthetic"));
                };
                if !apply_synthetic(spec, seed, k, v)? {
                    return Err(format!("unknown key `{key}`"));
                }
            }
            "schedule.mode" => {
                self.schedule = match v {
                    "batch" => ScheduleSpec::Batch,
                    "groups" => match &self.schedule {
                        s @ ScheduleSpec::Groups { .. } => s.clone(),
                        _ => ScheduleSpec::Groups {
                            sizes: vec![],
                            steps: vec![],
                        },
                    },
                    "file" => match &self.schedule {
                        s @ ScheduleSpec::File(_) => s.clone(),
                        _ => ScheduleSpec::File(PathBuf::new()),
                    },
                    _ => return Err(format!("{key}: expected batch|groups|file, got `{v}`")),
                }
            }
            "schedule.group_sizes" | "schedule.release_steps" => {
                let ScheduleSpec::Groups { sizes, steps } = &mut self.schedule else {
                    return Err(format!(
                        "{key} requires schedule.mode = groups (set it first)"
                    ));
                };
                if key == "schedule.group_sizes" {
                    *sizes = list(key, v)?;
                } else {
                    *steps = list(key, v)?;
                }
            }
            "schedule.file" => {
                let ScheduleSpec::File(path) = &mut self.schedule else {
                    return Err(format!(
                        "{key} requires schedule.mode = file (set it first)"
                    ));
                };
                *path = resolve(base, v);
            }
            "run.horizon" => self.horizon = num(key, v)?,
            "run.checkpoints" => {
                self.checkpoints = if v == "log" {
                    Checkpoints::Log
                } else {
                    Checkpoints::List(list(key, v)?)
                }
            }
            "run.seed" => self.seed = num(key, v)?,
            "run.out" => self.out_dir = PathBuf::from(v),
            "eval.k" => self.eval.k = num(key, v)?,
            "eval.test_fraction" => self.eval.test_fraction = num(key, v)?,
            "eval.subsets" => self.eval.n_subsets = num(key, v)?,
            "eval.patch_size" => self.eval.patch_size = num(key, v)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Every constraint violated by this config.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.width < 3 || self.height < 3 {
            v.push(format!(
                "grid must be at least 3x3 (got {}x{})",
                self.width, self.height
            ));
        }
        v.extend(self.movement.violations());
        v.extend(self.thresholds.violations());
        v.extend(self.eval.violations());
        if self.colony_size == ColonySize::Fixed(0) {
            v.push("colony.ants must be >= 1 or auto".to_string());
        }
        match &self.data {
            DataSource::Synthetic { spec, .. } => v.extend(spec.violations()),
            DataSource::Csv { path, features } => {
                if path.as_os_str().is_empty() {
                    v.push("data.csv must name the input file".to_string());
                }
                if *features == Some(0) {
                    v.push("data.features must be >= 1 or auto".to_string());
                }
            }
        }
        match &self.schedule {
            ScheduleSpec::Batch => {}
            ScheduleSpec::Groups { sizes, steps } => {
                if sizes.is_empty() {
                    v.push("schedule.group_sizes must list at least one group".to_string());
                }
                if sizes.len() != steps.len() {
                    v.push(format!(
                        "schedule.group_sizes has {} entries but schedule.release_steps has {}",
                        sizes.len(),
                        steps.len()
                    ));
                }
                if steps.windows(2).any(|w| w[1] <= w[0]) {
                    v.push("schedule.release_steps must be strictly increasing".to_string());
                }
                if steps.iter().any(|&s| s != 0 && s >= self.horizon) {
                    v.push("schedule.release_steps must lie before run.horizon".to_string());
                }
                if let Some(n) = self.known_item_count() {
                    let total: usize = sizes.iter().sum();
                    if total != n {
                        v.push(format!(
                            "schedule.group_sizes add up to {total} but the data has {n} items"
                        ));
                    }
                }
            }
            ScheduleSpec::File(p) => {
                if p.as_os_str().is_empty() {
                    v.push("schedule.file must name the schedule file".to_string());
                }
            }
        }
        if let Some(n) = self.known_item_count() {
            if n > self.width * self.height {
                v.push(format!(
                    "{n} items do not fit on a {}x{} grid",
                    self.width, self.height
                ));
            }
        }
        if let Checkpoints::List(c) = &self.checkpoints {
            if c.windows(2).any(|w| w[1] <= w[0]) {
                v.push("run.checkpoints must be strictly increasing".to_string());
            }
            if c.iter().any(|&t| t > self.horizon) {
                v.push("run.checkpoints must not exceed run.horizon".to_string());
            }
        }
        v
    }

    /// Item count when it is known without reading input files.
    pub fn known_item_count(&self) -> Option<usize> {
        match &self.data {
            DataSource::Synthetic { spec, .. } => Some(spec.n_classes() * spec.items_per_class),
            DataSource::Csv { .. } => None,
        }
    }

    pub fn n_ants(&self, total_items: usize) -> usize {
        match self.colony_size {
            ColonySize::Auto => default_colony_size(total_items),
            ColonySize::Fixed(n) => n,
        }
    }

    /// Checkpoint steps; the horizon is always included.
    pub fn checkpoint_steps(&self) -> Vec<u64> {
        let mut c = match &self.checkpoints {
            Checkpoints::Log => default_checkpoints(self.horizon),
            Checkpoints::List(c) => c.clone(),
        };
        if c.last() != Some(&self.horizon) {
            c.push(self.horizon);
        }
        c
    }

    /// The synthetic spec with its effective seed, when the data is synthetic.
    pub fn synthetic_spec(&self) -> Option<SyntheticSpec> {
        match &self.data {
            DataSource::Synthetic { spec, seed } => Some(SyntheticSpec {
                seed: match seed {
                    DataSeed::Run => self.seed,
                    DataSeed::Fixed(s) => *s,
                },
                ..spec.clone()
            }),
            DataSource::Csv { .. } => None,
        }
    }

    /// Every effective value as `key = value` lines, in a fixed order.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("grid.width", self.width.to_string());
        put("grid.height", self.height.to_string());
        let m = &self.movement;
        put("move.beta", m.beta.to_string());
        put("move.delta", m.delta.to_string());
        put("move.eta", m.eta.to_string());
        put("move.kappa", m.kappa.to_string());
        for (k, w) in ["move.w0", "move.w45", "move.w90", "move.w135", "move.w180"]
            .iter()
            .zip(m.turn_weights.0)
        {
            put(k, w.to_string());
        }
        let t = &self.thresholds;
        put("threshold.theta_count", t.theta_count.to_string());
        put("threshold.steepness", t.steepness.to_string());
        put("threshold.k1", t.k1.to_string());
        put("threshold.k2", t.k2.to_string());
        put("threshold.aggregation", t.aggregation.to_string());
        put(
            "colony.ants",
            match self.colony_size {
                ColonySize::Auto => "auto".into(),
                ColonySize::Fixed(n) => n.to_string(),
            },
        );
        match &self.data {
            DataSource::Synthetic { spec, seed } => {
                put("data.source", "synthetic".into());
                put("synthetic.means", means_to_string(&spec.means));
                put("synthetic.spread", spec.spread.to_string());
                put(
                    "synthetic.items_per_class",
                    spec.items_per_class.to_string(),
                );
                put(
                    "synthetic.seed",
                    match seed {
                        DataSeed::Run => "run".into(),
                        DataSeed::Fixed(s) => s.to_string(),
                    },
                );
            }
            DataSource::Csv { path, features } => {
                put("data.source", "csv".into());
                put("data.csv", path.display().to_string());
                put(
                    "data.features",
                    features.map_or("auto".into(), |f| f.to_string()),
                );
            }
        }
        match &self.schedule {
            ScheduleSpec::Batch => put("schedule.mode", "batch".into()),
            ScheduleSpec::Groups { sizes, steps } => {
                put("schedule.mode", "groups".into());
                put("schedule.group_sizes", join(sizes));
                put("schedule.release_steps", join(steps));
            }
            ScheduleSpec::File(p) => {
                put("schedule.mode", "file".into());
                put("schedule.file", p.display().to_string());
            }
        }
        put("run.horizon", self.horizon.to_string());
        put(
            "run.checkpoints",
            match &self.checkpoints {
                Checkpoints::Log => "log".into(),
                Checkpoints::List(c) => join(c),
            },
        );
        put("run.seed", self.seed.to_string());
        put("run.out", self.out_dir.display().to_string());
        let e = &self.eval;
        put("eval.k", e.k.to_string());
        put("eval.test_fraction", e.test_fraction.to_string());
        put("eval.subsets", e.n_subsets.to_string());
        put("eval.patch_size", e.patch_size.to_string());
        s
    }

    /// Short hex digest of every setting except the seed and output directory.
    pub fn hash(&self) -> String {
        let echo: String = self
            .echo()
            .lines()
            .filter(|l| !l.starts_with("run.seed") && !l.starts_with("run.out"))
            .map(|l| format!("{l}\n"))
            .collect();
        let digest = Sha256::digest(echo.as_bytes());
        digest[..4].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Reads a synthetic data spec (`synthetic.*` keys; `synthetic.seed` must be a number).
pub fn load_synthetic_spec(path: &Path) -> Result<SyntheticSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let pairs = parse_pairs(&text).map_err(Error::Config)?;
    let mut spec = SyntheticSpec::default();
    let mut seed = DataSeed::Fixed(0);
    let mut errors = Vec::new();
    for (k, v) in &pairs {
        match apply_synthetic(&mut spec, &mut seed, k, v) {
            Ok(true) => {}
            Ok(false) => errors.push(format!("unknown key `{k}` in a synthetic spec")),
            Err(e) => errors.push(e),
        }
    }
    match seed {
        DataSeed::Fixed(s) => spec.seed = s,
        DataSeed::Run => errors.push("synthetic.seed must be a number here".to_string()),
    }
    errors.extend(spec.violations());
    if errors.is_empty() {
        Ok(spec)
    } else {
        Err(Error::Config(errors))
    }
}
