//! Response-threshold decisions for lifting and setting down items.
//!
//! Two independent stimuli drive each decision: how crowded the 3x3 block around the
//! ant is, and how dissimilar the items there are from the one in question. Each
//! stimulus goes through its own threshold function and the two are multiplied:
//!
//! * pick: `(1 - chi) * epsilon`
//! * drop: `chi * delta`
//!
//! where `chi` is the crowd response, `epsilon` grows with dissimilarity and `delta`
//! shrinks with it.

use std::fmt;
use std::str::FromStr;

use crate::datastream::{feature_distance, ItemStore};
use crate::habitat::{Grid, ItemId, Position};

/// Defaults: half response at 5 items with steepness 2, `k1 = 0.03`, `k2 = 1.5`, mean
/// rule. The small `k1` makes dropping sharply selective; the large `k2` keeps items
/// inside a coherent cluster from being lifted out again.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdParams {
    /// Item count at which the crowd response is one half.
    pub theta_count: f64,
    /// Exponent of the threshold function; must exceed 1.
    pub steepness: f64,
    /// Similarity scale for dropping.
    pub k1: f64,
    /// Similarity scale for picking.
    pub k2: f64,
    pub aggregation: Aggregation,
}

impl Default for ThresholdParams {
    fn default() -> Self {
        Self {
            theta_count: 5.0,
            steepness: 2.0,
            k1: 0.03,
            k2: 1.5,
            aggregation: Aggregation::Mean,
        }
    }
}

impl ThresholdParams {
    /// The classic scales `k1 = 0.1`, `k2 = 0.15` with the max rule. On overlapping
    /// classes these lift items out of good clusters almost as readily as out of bad
    /// ones; see [`ThresholdParams::default`] for the tuned values.
    pub fn classic() -> Self {
        Self {
            k1: 0.1,
            k2: 0.15,
            aggregation: Aggregation::Max,
            ..Self::default()
        }
    }
}

impl ThresholdParams {
    /// Every violated constraint, as human-readable messages.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.theta_count.is_nan() || self.theta_count <= 0.0 {
            v.push(format!(
                "threshold.theta_count must be > 0 (got {})",
                self.theta_count
            ));
        }
        if self.steepness.is_nan() || self.steepness <= 1.0 {
            v.push(format!(
                "threshold.steepness must be > 1 (got {})",
                self.steepness
            ));
        }
        if self.k1.is_nan() || self.k1 <= 0.0 {
            v.push(format!("threshold.k1 must be > 0 (got {})", self.k1));
        }
        if self.k2.is_nan() || self.k2 <= 0.0 {
            v.push(format!("threshold.k2 must be > 0 (got {})", self.k2));
        }
        v
    }
}

/// How the distances between the focal item and its neighbours collapse to one value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregation {
    /// Largest distance: a single dissimilar neighbour dominates.
    Max,
    Min,
    #[default]
    Mean,
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregation::Max => "max",
            Aggregation::Min => "min",
            Aggregation::Mean => "mean",
        })
    }
}

impl FromStr for Aggregation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "max" => Ok(Aggregation::Max),
            "min" => Ok(Aggregation::Min),
            "mean" => Ok(Aggregation::Mean),
            other => Err(format!(
                "unknown aggregation `{other}` (expected max|min|mean)"
            )),
        }
    }
}

/// What an ant perceives around one cell with respect to one item.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborhoodAssessment {
    /// Items in the 3x3 block, not counting the focal item.
    pub object_count: usize,
    /// Aggregated normalized distance in `[0, 1]`; 1 when the block holds nothing else.
    pub pair_distance: f64,
}

/// `s^n / (s^n + theta^n)`.
#[inline]
pub fn response_threshold(s: f64, theta: f64, n: f64) -> f64 {
    debug_assert!(s >= 0.0 && theta > 0.0);
    let sn = s.powf(n);
    sn / (sn + theta.powf(n))
}

/// Crowd response for `object_count` items.
#[inline]
pub fn count_factor(object_count: usize, params: &ThresholdParams) -> f64 {
    if params.steepness == 2.0 {
        let c = (object_count * object_count) as f64;
        c / (c + params.theta_count * params.theta_count)
    } else {
        response_threshold(object_count as f64, params.theta_count, params.steepness)
    }
}

/// `(k1 / (k1 + d))^2`: close to 1 among similar items.
#[inline]
pub fn drop_factor(d: f64, k1: f64) -> f64 {
    let r = k1 / (k1 + d);
    r * r
}

/// `(d / (k2 + d))^2`: close to 0 among similar items.
#[inline]
pub fn pick_factor(d: f64, k2: f64) -> f64 {
    let r = d / (k2 + d);
    r * r
}

pub fn pick_probability(a: &NeighborhoodAssessment, params: &ThresholdParams) -> f64 {
    (1.0 - count_factor(a.object_count, params)) * pick_factor(a.pair_distance, params.k2)
}

pub fn drop_probability(a: &NeighborhoodAssessment, params: &ThresholdParams) -> f64 {
    count_factor(a.object_count, params) * drop_factor(a.pair_distance, params.k1)
}

/// Looks at the 3x3 block around `center` from the point of view of `focal`, which is
/// either the item lying at `center` or the one an ant is carrying.
pub fn assess_neighborhood(
    center: Position,
    focal: ItemId,
    grid: &Grid,
    items: &ItemStore,
    aggregation: Aggregation,
) -> NeighborhoodAssessment {
    let focal_features = items.features(focal);
    let mut count = 0usize;
    let mut acc = match aggregation {
        Aggregation::Max | Aggregation::Mean => 0.0,
        Aggregation::Min => f64::INFINITY,
    };
    for p in grid.dims().block3x3(center) {
        let Some(other) = grid.get(p) else { continue };
        if other == focal {
            continue;
        }
        count += 1;
        let d = feature_distance(focal_features, items.features(other));
        match aggregation {
            Aggregation::Max => acc = f64::max(acc, d),
            Aggregation::Min => acc = f64::min(acc, d),
            Aggregation::Mean => acc += d,
        }
    }
    let pair_distance = match (count, aggregation) {
        (0, _) => 1.0,
        (n, Aggregation::Mean) => acc / n as f64,
        _ => acc,
    };
    NeighborhoodAssessment {
        object_count: count,
        pair_distance: pair_distance.clamp(0.0, 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datastream::Item;

    const TOL: f64 = 1e-9;

    fn params() -> ThresholdParams {
        ThresholdParams::classic()
    }

    fn assess(count: usize, d: f64) -> NeighborhoodAssessment {
        NeighborhoodAssessment {
            object_count: count,
            pair_distance: d,
        }
    }

    #[test]
    fn threshold_examples() {
        assert!((response_threshold(5.0, 5.0, 2.0) - 0.5).abs() < TOL);
        assert!((response_threshold(3.3, 3.3, 4.5) - 0.5).abs() < TOL);
        assert_eq!(response_threshold(0.0, 5.0, 2.0), 0.0);
        assert!((response_threshold(10.0, 5.0, 2.0) - 0.8).abs() < TOL);
    }

    #[test]
    fn count_factor_examples() {
        let p = params();
        assert_eq!(count_factor(5, &p), 0.5);
        assert_eq!(count_factor(0, &p), 0.0);
        assert!((count_factor(9, &p) - 81.0 / 106.0).abs() < TOL);
        assert!((count_factor(9, &p) - 0.764151).abs() < 1e-6);
        let steep = ThresholdParams {
            steepness: 3.0,
            ..p
        };
        assert!((count_factor(5, &steep) - 0.5).abs() < TOL);
        assert!((count_factor(2, &steep) - 8.0 / 133.0).abs() < TOL);
    }

    #[test]
    fn similarity_factor_examples() {
        assert_eq!(drop_factor(0.0, 0.1), 1.0);
        assert!((drop_factor(0.1, 0.1) - 0.25).abs() < TOL);
        assert!((drop_factor(1.0, 0.1) - (0.1f64 / 1.1).powi(2)).abs() < TOL);
        assert!((drop_factor(1.0, 0.1) - 0.0082645).abs() < 1e-7);

        assert_eq!(pick_factor(0.0, 0.15), 0.0);
        assert!((pick_factor(0.15, 0.15) - 0.25).abs() < TOL);
        assert!((pick_factor(1.0, 0.15) - 0.756144).abs() < 1e-6);
    }

    #[test]
    fn composed_probabilities() {
        let p = params();
        assert!((pick_probability(&assess(0, 1.0), &p) - 0.756144).abs() < 1e-6);
        for n in 0..=9 {
            assert_eq!(pick_probability(&assess(n, 0.0), &p), 0.0);
        }
        // chi = 0.5 at the threshold and epsilon = 0.25 at d = k2; with steepness 2 the
        // pick side is (1 - 0.5) * 0.25.
        assert!((pick_probability(&assess(5, 0.15), &p) - 0.125).abs() < 1e-6);
        assert_eq!(drop_probability(&assess(0, 0.0), &p), 0.0);
        assert!((drop_probability(&assess(5, 0.0), &p) - 0.5).abs() < 1e-6);
        assert!((drop_probability(&assess(9, 1.0), &p) - 0.006315).abs() < 1e-6);
    }

    #[test]
    fn chi_half_and_epsilon_half_give_quarter() {
        // k2 = sqrt(2) - 1 puts epsilon at exactly 1/2 for d = 1; count 5 puts chi at 1/2
        let p = ThresholdParams {
            k2: std::f64::consts::SQRT_2 - 1.0,
            ..params()
        };
        assert!((pick_factor(1.0, p.k2) - 0.5).abs() < 1e-12);
        assert!((pick_probability(&assess(5, 1.0), &p) - 0.25).abs() < 1e-6);
    }

    fn store(features: &[[f64; 2]]) -> ItemStore {
        ItemStore::new(
            features
                .iter()
                .enumerate()
                .map(|(i, f)| Item::new(i as u64, f.to_vec(), None))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn assessment_of_empty_region() {
        let items = store(&[[0.3, 0.3]]);
        let mut g = Grid::new(10, 10);
        g.place(ItemId(0), Position::new(4, 4)).unwrap();
        let a = assess_neighborhood(Position::new(4, 4), ItemId(0), &g, &items, Aggregation::Max);
        assert_eq!(a, assess(0, 1.0));
        // carried-item case: focal not on the grid at all
        let g = Grid::new(10, 10);
        let a = assess_neighborhood(Position::new(4, 4), ItemId(0), &g, &items, Aggregation::Max);
        assert_eq!(a, assess(0, 1.0));
    }

    #[test]
    fn assessment_of_identical_copies() {
        let items = store(&[[0.3, 0.7]; 4]);
        let mut g = Grid::new(10, 10);
        g.place(ItemId(0), Position::new(0, 0)).unwrap();
        g.place(ItemId(1), Position::new(9, 9)).unwrap();
        g.place(ItemId(2), Position::new(1, 0)).unwrap();
        g.place(ItemId(3), Position::new(0, 1)).unwrap();
        let a = assess_neighborhood(Position::new(0, 0), ItemId(0), &g, &items, Aggregation::Max);
        assert_eq!(a, assess(3, 0.0));
    }

    #[test]
    fn assessment_fixture_against_brute_force() {
        // focal (0,0); neighbours at (1,0), (0,1), (0.5,0.5) in feature space
        let feats = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 0.5]];
        let items = store(&feats);
        let mut g = Grid::new(6, 6);
        let cells = [(2, 2), (1, 1), (3, 3), (2, 3)];
        for (i, &(x, y)) in cells.iter().enumerate() {
            g.place(ItemId(i as u32), Position::new(x, y)).unwrap();
        }
        // brute force: sqrt(mean squared difference) against every neighbour of item 0
        let brute: Vec<f64> = feats[1..]
            .iter()
            .map(|b| {
                let s: f64 = feats[0].iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (s / 2.0).sqrt()
            })
            .collect();
        assert!((brute[0] - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((brute[2] - 0.5).abs() < 1e-12);

        let center = Position::new(2, 2);
        let max = assess_neighborhood(center, ItemId(0), &g, &items, Aggregation::Max);
        let min = assess_neighborhood(center, ItemId(0), &g, &items, Aggregation::Min);
        let mean = assess_neighborhood(center, ItemId(0), &g, &items, Aggregation::Mean);
        assert_eq!(max.object_count, 3);
        assert!((max.pair_distance - std::f64::consts::FRAC_1_SQRT_2).abs() < TOL);
        assert!((min.pair_distance - 0.5).abs() < TOL);
        assert!(
            (mean.pair_distance - (2.0 * std::f64::consts::FRAC_1_SQRT_2 + 0.5) / 3.0).abs() < TOL
        );
    }

    #[test]
    fn parameter_validation() {
        assert!(params().violations().is_empty());
        let bad = ThresholdParams {
            theta_count: 0.0,
            steepness: 1.0,
            k1: -1.0,
            k2: 0.0,
            aggregation: Aggregation::Mean,
        };
        assert_eq!(bad.violations().len(), 4);
        assert_eq!("mean".parse::<Aggregation>(), Ok(Aggregation::Mean));
        assert!("median".parse::<Aggregation>().is_err());
    }
}
