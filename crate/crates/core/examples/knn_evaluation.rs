//! Scoring a lattice directly: builds two snapshots by hand, one sorted into four
//! corner blocks and one scattered, and compares their k-NN rates and entropies.
//!
//! cargo run --example knn_evaluation

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use antclust::evaluation::{knn_rate, spatial_entropy, Snapshot, SnapshotItem};
use antclust::habitat::{Dims, ItemId, Position};

fn snapshot(cells: Vec<(Position, usize)>) -> Snapshot {
    Snapshot {
        step: 0,
        dims: Dims::new(40, 40),
        released: cells.len(),
        items: cells
            .into_iter()
            .enumerate()
            .map(|(i, (position, class))| SnapshotItem {
                id: ItemId(i as u32),
                source_id: i as u64,
                position,
                label: Some(format!("c{class}")),
            })
            .collect(),
        carried: Vec::new(),
        pheromone: (0.0, 0.0, 0.0),
    }
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut sorted = Vec::new();
    let mut scattered = Vec::new();
    for class in 0..4 {
        let (ox, oy) = (5 + 20 * (class % 2), 5 + 20 * (class / 2));
        for i in 0..49 {
            sorted.push((Position::new(ox + i % 7, oy + i / 7), class));
        }
    }
    let mut taken = std::collections::HashSet::new();
    while scattered.len() < sorted.len() {
        let p = Position::new(rng.random_range(0..40), rng.random_range(0..40));
        if taken.insert(p) {
            scattered.push((p, scattered.len() % 4));
        }
    }

    for (name, cells) in [("sorted", sorted), ("scattered", scattered)] {
        let snap = snapshot(cells);
        let report = knn_rate(&snap, 3, 0.2, 10, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        println!(
            "{name:>9}: rate {:.3} (subsets {:?}), entropy {:.3} bits",
            report.mean_rate,
            report
                .rates
                .iter()
                .map(|r| (r * 100.0).round() / 100.0)
                .collect::<Vec<_>>(),
            spatial_entropy(&snap, 8)
        );
    }
}
