//! Compare the exhaustive census with the closed-form list of liftable
//! covers over a grid of parameters.
//!
//! `cargo run --release --example verify_theorem`

use liftcov::census::{theorem_predict, verify_theorem, CensusOptions, DEFAULT_GRID};

pub fn main() {
    for pc in theorem_predict(2, 2, 4).unwrap() {
        println!(
            "(2,2,4) predicted case {} r={:?}: A = {:?}",
            pc.case, pc.r, pc.cover.factors
        );
    }
    let summary = verify_theorem(&DEFAULT_GRID, &CensusOptions::default()).unwrap();
    for pt in &summary.points {
        println!(
            "p={} k={} n={}: {} liftable classes, {} predicted, match {}",
            pt.p, pt.k, pt.n, pt.liftable_classes, pt.predicted_classes, pt.matches
        );
    }
    assert!(summary.all_match);
}
