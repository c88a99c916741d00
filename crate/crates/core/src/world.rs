//! One simulated habitat: grid, pheromone, colony and the items flowing in.

use crate::behavior::ThresholdParams;
use crate::colony::{Colony, MovementParams, StepEvents};
use crate::datastream::{place_randomly, ItemStore, StreamSchedule};
use crate::error::Result;
use crate::habitat::{Grid, PheromoneField};
use crate::rng::{stream_rng, Stream};

/// Ants used when the colony size is not set explicitly: one per ten items, at
/// least ten.
pub fn default_colony_size(total_items: usize) -> usize {
    total_items.div_ceil(10).max(10)
}

/// The full simulation state.
///
/// Time `t` counts completed steps. The state "at `t`" is the one after the groups
/// due at `t` have been released and before the ants act for step `t`.
#[derive(Debug, Clone)]
pub struct World {
    pub grid: Grid,
    pub field: PheromoneField,
    pub colony: Colony,
    pub items: ItemStore,
    pub schedule: StreamSchedule,
    pub movement: MovementParams,
    pub thresholds: ThresholdParams,
    t: u64,
    next_group: usize,
    released: usize,
}

impl World {
    /// Builds an empty habitat and scatters `n_ants` ants with the simulation stream
    /// of `seed`. No items are placed until [`World::release_pending`] runs.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        width: usize,
        height: usize,
        items: ItemStore,
        schedule: StreamSchedule,
        n_ants: usize,
        movement: MovementParams,
        thresholds: ThresholdParams,
        seed: u64,
    ) -> Self {
        let grid = Grid::new(width, height);
        let colony = Colony::scatter(n_ants, grid.dims(), stream_rng(seed, Stream::Simulation));
        Self {
            field: PheromoneField::new(width, height),
            grid,
            colony,
            items,
            schedule,
            movement,
            thresholds,
            t: 0,
            next_group: 0,
            released: 0,
        }
    }

    pub fn time(&self) -> u64 {
        self.t
    }

    /// Items released so far.
    pub fn released(&self) -> usize {
        self.released
    }

    pub fn carried_count(&self) -> usize {
        self.colony.carried().count()
    }

    /// Releases every group due at or before the current step that has not been
    /// released yet. Returns how many items were placed.
    pub fn release_pending(&mut self) -> Result<usize> {
        let mut placed = 0;
        while let Some(group) = self.schedule.groups.get(self.next_group) {
            if group.step > self.t {
                break;
            }
            placed += place_randomly(&group.items, &mut self.grid, &mut self.colony.rng)?.len();
            self.next_group += 1;
        }
        self.released += placed;
        Ok(placed)
    }

    /// Releases what is due, runs one colony step, and advances the clock.
    pub fn step(&mut self) -> Result<StepEvents> {
        self.release_pending()?;
        let events = self.colony.step(
            &mut self.grid,
            &mut self.field,
            &self.items,
            &self.movement,
            &self.thresholds,
        );
        self.t += 1;
        Ok(events)
    }

    /// Whether every released item is either on the grid or carried, exactly once.
    pub fn conserves_items(&self) -> bool {
        self.grid.item_count() + self.carried_count() == self.released
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datastream::{build_schedule, generate_synthetic, SyntheticSpec};
    use crate::habitat::ItemId;

    fn world(seed: u64, n_ants: usize) -> World {
        let items = ItemStore::new(generate_synthetic(&SyntheticSpec {
            items_per_class: 25,
            seed,
            ..Default::default()
        }))
        .unwrap();
        let ids: Vec<ItemId> = items.ids().collect();
        let schedule = build_schedule(&ids, &[60, 40], &[0, 300], 1000, seed).unwrap();
        World::new(
            20,
            20,
            items,
            schedule,
            n_ants,
            MovementParams::default(),
            ThresholdParams::default(),
            seed,
        )
    }

    #[test]
    fn colony_size_rule() {
        assert_eq!(default_colony_size(0), 10);
        assert_eq!(default_colony_size(800), 80);
        assert_eq!(default_colony_size(244), 25);
    }

    #[test]
    fn conservation_through_releases() {
        let mut w = world(4, 12);
        let mut picks = 0;
        for _ in 0..1000 {
            let ev = w.step().unwrap();
            picks += ev.picks;
            assert!(w.conserves_items());
            let expected = w.schedule.released_by(w.time() - 1);
            assert_eq!(w.released(), expected);
        }
        assert_eq!(w.released(), 100);
        assert!(picks > 0);
    }

    #[test]
    fn identical_seeds_identical_worlds() {
        let mut a = world(8, 10);
        let mut b = world(8, 10);
        for _ in 0..1000 {
            a.step().unwrap();
            b.step().unwrap();
        }
        assert_eq!(a.grid, b.grid);
        assert_eq!(a.field, b.field);
        assert_eq!(a.colony.ants, b.colony.ants);
    }
}
