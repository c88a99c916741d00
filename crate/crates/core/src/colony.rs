//! Ants and how they move over the pheromone field.
//!
//! An ant at cell `k` facing `theta` moves to one of its eight Moore neighbours `i`
//! with probability proportional to `W(sigma_i) * w(|delta theta_i|)`, where
//! `W(s) = (1 + s / (1 + delta * s))^beta` rewards pheromone (saturating when
//! `delta > 0`) and `w` penalises sharp turns. Standing still is not an option.
//!
//! Random draws per ant and step: one `f64` for the move, then one more `f64` only
//! when a pick or drop is evaluated.

use rand::Rng;

use crate::behavior::{self, ThresholdParams};
use crate::datastream::ItemStore;
use crate::error::{Error, Result};
use crate::habitat::{Dims, Grid, ItemId, PheromoneField, Position};
use crate::rng::SimRng;

/// Compass heading, clockwise from north. North is `y - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Direction {
    N = 0,
    NE,
    E,
    SE,
    S,
    SW,
    W,
    NW,
}

impl Direction {
    pub const ALL: [Direction; 8] = [
        Direction::N,
        Direction::NE,
        Direction::E,
        Direction::SE,
        Direction::S,
        Direction::SW,
        Direction::W,
        Direction::NW,
    ];

    #[inline]
    pub fn from_index(i: usize) -> Self {
        Self::ALL[i % 8]
    }

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    /// `(dx, dy)` of one step in this direction.
    #[inline]
    pub fn offset(self) -> (i64, i64) {
        const OFFSETS: [(i64, i64); 8] = [
            (0, -1),
            (1, -1),
            (1, 0),
            (1, 1),
            (0, 1),
            (-1, 1),
            (-1, 0),
            (-1, -1),
        ];
        OFFSETS[self.index()]
    }

    /// Smallest turn between two headings in 45 degree units, `0..=4`.
    #[inline]
    pub fn turn_steps(self, other: Direction) -> usize {
        let d = (self.index() as i32 - other.index() as i32).unsigned_abs() as usize;
        d.min(8 - d)
    }
}

/// Weight per turn magnitude: 0, 45, 90, 135 and 180 degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurnWeights(pub [f64; 5]);

impl Default for TurnWeights {
    fn default() -> Self {
        TurnWeights([1.0, 0.5, 0.25, 1.0 / 12.0, 1.0 / 20.0])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MovementParams {
    /// Osmotropotaxic sensitivity.
    pub beta: f64,
    /// Inverse sensory capacity.
    pub delta: f64,
    /// Pheromone left per ant per step.
    pub eta: f64,
    /// Fraction of pheromone lost per step.
    pub kappa: f64,
    pub turn_weights: TurnWeights,
}

impl Default for MovementParams {
    fn default() -> Self {
        Self {
            beta: 3.5,
            delta: 0.2,
            eta: 0.07,
            kappa: 0.015,
            turn_weights: TurnWeights::default(),
        }
    }
}

impl MovementParams {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            v.push(format!("move.beta must be > 0 (got {})", self.beta));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            v.push(format!("move.delta must be >= 0 (got {})", self.delta));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            v.push(format!("move.eta must be > 0 (got {})", self.eta));
        }
        if !(0.0..=1.0).contains(&self.kappa) {
            v.push(format!(
                "move.kappa must lie in [0, 1] (got {})",
                self.kappa
            ));
        }
        for (w, deg) in self.turn_weights.0.iter().zip([0, 45, 90, 135, 180]) {
            if !(*w > 0.0 && w.is_finite()) {
                v.push(format!("move.w{deg} must be > 0 (got {w})"));
            }
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ant {
    pub position: Position,
    pub heading: Direction,
    pub carried: Option<ItemId>,
}

impl Ant {
    pub fn new(position: Position, heading: Direction) -> Self {
        Self {
            position,
            heading,
            carried: None,
        }
    }
}

/// `(1 + sigma / (1 + delta * sigma))^beta`.
pub fn pheromone_weight(sigma: f64, beta: f64, delta: f64) -> Result<f64> {
    if sigma.is_nan() || sigma < 0.0 {
        return Err(Error::NegativeConcentration(sigma));
    }
    Ok(weight(sigma, beta, delta))
}

#[inline]
fn weight(sigma: f64, beta: f64, delta: f64) -> f64 {
    (1.0 + sigma / (1.0 + delta * sigma)).powf(beta)
}

#[inline]
pub fn turn_weight(current: Direction, candidate: Direction, table: &TurnWeights) -> f64 {
    table.0[current.turn_steps(candidate)]
}

/// Probability of stepping in each of the eight directions, indexed like
/// [`Direction::ALL`].
pub fn transition_distribution(
    ant: &Ant,
    field: &PheromoneField,
    params: &MovementParams,
) -> [f64; 8] {
    let dims = field.dims();
    let mut p = [0.0; 8];
    let mut total = 0.0;
    for (slot, dir) in p.iter_mut().zip(Direction::ALL) {
        let (dx, dy) = dir.offset();
        let sigma = field.get(dims.offset(ant.position, dx, dy));
        *slot = weight(sigma, params.beta, params.delta)
            * turn_weight(ant.heading, dir, &params.turn_weights);
        total += *slot;
    }
    assert!(
        total > 0.0 && total.is_finite(),
        "degenerate transition weights"
    );
    for v in &mut p {
        *v /= total;
    }
    p
}

/// Inverse-CDF lookup of `u` in `[0, 1)` against a distribution over eight outcomes.
#[inline]
pub fn sample_direction(probs: &[f64; 8], u: f64) -> Direction {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return Direction::from_index(i);
            }
        }
    }
    // rounding left u just above the accumulated mass
    Direction::from_index(last)
}

/// Moves `ant` one cell according to [`transition_distribution`] using one draw from
/// `rng`, turns it to face the way it went, and deposits pheromone at the new cell.
pub fn move_ant<R: Rng>(
    ant: &mut Ant,
    field: &mut PheromoneField,
    params: &MovementParams,
    rng: &mut R,
) -> Direction {
    let probs = transition_distribution(ant, field, params);
    let dir = sample_direction(&probs, rng.random::<f64>());
    step_towards(ant, dir, field.dims());
    field.deposit(ant.position, params.eta);
    dir
}

#[inline]
fn step_towards(ant: &mut Ant, dir: Direction, dims: Dims) {
    let (dx, dy) = dir.offset();
    ant.position = dims.offset(ant.position, dx, dy);
    ant.heading = dir;
}

/// What happened during one colony step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepEvents {
    pub picks: usize,
    pub drops: usize,
}

/// The ants of one run and the random stream that drives them.
#[derive(Debug, Clone)]
pub struct Colony {
    pub ants: Vec<Ant>,
    pub rng: SimRng,
}

impl Colony {
    /// `n` ants at uniformly random cells with uniformly random headings. Each ant
    /// takes two draws: a `u32` cell index, then a `u32` heading in `0..8`.
    pub fn scatter(n: usize, dims: Dims, mut rng: SimRng) -> Self {
        let cells = dims.cells() as u32;
        let ants = (0..n)
            .map(|_| {
                let p = dims.position(rng.random_range(0..cells) as usize);
                let h = Direction::from_index(rng.random_range(0..8u32) as usize);
                Ant::new(p, h)
            })
            .collect();
        Self { ants, rng }
    }

    pub fn len(&self) -> usize {
        self.ants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ants.is_empty()
    }

    pub fn carried(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.ants.iter().filter_map(|a| a.carried)
    }

    /// One global time step: every ant, in index order, moves and then considers
    /// picking up the item under it (when unladen) or dropping its load onto the
    /// current cell (when laden and the cell is empty). Evaporation follows once.
    pub fn step(
        &mut self,
        grid: &mut Grid,
        field: &mut PheromoneField,
        items: &ItemStore,
        movement: &MovementParams,
        thresholds: &ThresholdParams,
    ) -> StepEvents {
        let mut events = StepEvents::default();
        for ant in &mut self.ants {
            move_ant(ant, field, movement, &mut self.rng);
            let here = ant.position;
            match (ant.carried, grid.get(here)) {
                (None, Some(item)) => {
                    let a = behavior::assess_neighborhood(
                        here,
                        item,
                        grid,
                        items,
                        thresholds.aggregation,
                    );
                    if self.rng.random::<f64>() < behavior::pick_probability(&a, thresholds) {
                        ant.carried = grid.remove(here);
                        events.picks += 1;
                    }
                }
                (Some(item), None) => {
                    let a = behavior::assess_neighborhood(
                        here,
                        item,
                        grid,
                        items,
                        thresholds.aggregation,
                    );
                    if self.rng.random::<f64>() < behavior::drop_probability(&a, thresholds) {
                        grid.place(item, here).expect("cell checked empty");
                        ant.carried = None;
                        events.drops += 1;
                    }
                }
                _ => {}
            }
        }
        field.evaporate(movement.kappa);
        events
    }
}
