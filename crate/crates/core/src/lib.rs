//! Stigmergic ant-colony clustering of streamed feature vectors.
//!
//! Items (feature vectors in the unit cube) are dropped onto a toroidal lattice,
//! either all at once or in scheduled groups. A colony of memoryless ants wanders the
//! lattice following a pheromone field they themselves lay down, lifting items that
//! sit among dissimilar neighbours and setting them down among similar ones. The
//! resulting spatial arrangement is scored with a k-nearest-neighbour rule on grid
//! positions and a patch-occupancy entropy.
//!
//! * [`habitat`]: grid occupancy and pheromone field
//! * [`colony`]: ants and their movement kinetics
//! * [`behavior`]: response-threshold pick/drop probabilities
//! * [`datastream`]: items, CSV ingestion, synthetic data, release schedules
//! * [`evaluation`]: snapshots, k-NN rate, spatial entropy
//! * [`config`] and [`runner`]: run configuration and experiment orchestration

pub mod behavior;
pub mod colony;
pub mod config;
pub mod datastream;
pub mod error;
pub mod evaluation;
pub mod habitat;
pub mod rng;
pub mod runner;
pub mod world;

pub use error::{Error, Result};
