//! Covers with an arbitrary finite abelian deck group split into p-primary
//! pieces, and lift exactly when every piece does.
//!
//! `cargo run --example crt_split`

use liftcov::covers::GeneralCoverSpec;

pub fn main() {
    // A = Z_6 x Z_2 on 4 points.
    let spec = GeneralCoverSpec {
        n: 4,
        factors: vec![6, 2],
        images: vec![vec![1, 0], vec![1, 1], vec![1, 1], vec![3, 0]],
    };
    for part in spec.crt_split().unwrap() {
        println!(
            "p={} k={} factors {:?} images {:?}",
            part.p, part.k, part.factors, part.images
        );
    }
    println!("fully liftable: {}", spec.fully_liftable().unwrap());

    // A = Z_6 on 6 points, every x_i -> 1: both primary parts are constant covers.
    let constant = GeneralCoverSpec {
        n: 6,
        factors: vec![6],
        images: vec![vec![1]; 6],
    };
    println!(
        "constant Z_6 cover on 6 points liftable: {}",
        constant.fully_liftable().unwrap()
    );
}
