//! Pick and drop probabilities as functions of crowding and dissimilarity, for the
//! default scales and the classic ones.
//!
//! cargo run --example response_thresholds

use antclust::behavior::{
    drop_probability, pick_probability, NeighborhoodAssessment, ThresholdParams,
};

fn table(name: &str, params: &ThresholdParams) {
    println!(
        "{name}: k1={} k2={} rule={}",
        params.k1, params.k2, params.aggregation
    );
    let ds = [0.0, 0.05, 0.1, 0.2, 0.4, 0.7, 1.0];
    print!("{:>10}", "count \\ d");
    for d in ds {
        print!("{d:>16.2}");
    }
    println!();
    for count in [0, 1, 2, 4, 6, 8] {
        print!("{count:>10}");
        for d in ds {
            let a = NeighborhoodAssessment {
                object_count: count,
                pair_distance: d,
            };
            print!(
                "   {:.3} / {:.3}",
                pick_probability(&a, params),
                drop_probability(&a, params)
            );
        }
        println!();
    }
    println!("(pick / drop)\n");
}

fn main() {
    table("default", &ThresholdParams::default());
    table("classic", &ThresholdParams::classic());
}
