//! A lifted homeomorphism acts on the deck group by the automorphism `ψ`
//! with `ψ∘φ = φ∘α`.
//!
//! `cargo run --example induced_automorphism`

use liftcov::action::MappingClassPerm;
use liftcov::covers::{induced_automorphism, CoverSpec};

pub fn main() {
    let spec = CoverSpec {
        p: 3,
        k: 1,
        n: 3,
        factors: vec![3, 3],
        images: vec![vec![1, 0], vec![0, 1], vec![2, 2]],
    };
    for alpha in MappingClassPerm::all(2) {
        let psi = induced_automorphism(&spec, &alpha)
            .unwrap()
            .expect("every permutation lifts");
        println!(
            "{alpha:>8}: psi sends e_1 -> {:?}, e_2 -> {:?}",
            psi.generator_images[0], psi.generator_images[1]
        );
    }

    let two_points = CoverSpec {
        p: 5,
        k: 1,
        n: 2,
        factors: vec![5],
        images: vec![vec![1], vec![4]],
    };
    let swap = MappingClassPerm::eta(1, 1).unwrap();
    let psi = induced_automorphism(&two_points, &swap).unwrap().unwrap();
    println!("Z_5 on 2 points, swap: psi(1) = {:?}", psi.apply(&[1]));
}
