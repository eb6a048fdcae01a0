//! How permutations of the branch points act on `H_1` and on kernels, and
//! the divisibility test that replaces the direct comparison.
//!
//! `cargo run --example action_matrices`

use liftcov::action::{
    act, criterion_for_subgroup, decompose, generators, t_matrix, MappingClassPerm,
};
use liftcov::modcore::{parse_cycles, ModulusContext};
use liftcov::subgroups::Subgroup;

pub fn main() {
    let b = 3;
    for g in generators(b) {
        println!("T^{g} = {}", t_matrix(&g));
    }

    let alpha = MappingClassPerm::new(parse_cycles(b + 1, "(1 4 2)").unwrap()).unwrap();
    let (u, sigma) = decompose(&alpha);
    println!(
        "{alpha} = eta_{} after {sigma}",
        u.map_or("none".into(), |u| u.to_string())
    );

    let ctx = ModulusContext::new(3, 1).unwrap();
    let c = Subgroup::from_generators(ctx, 3, &[vec![1, 2, 0]]).unwrap();
    for alpha in MappingClassPerm::all(b).take(8) {
        let moved = act(&alpha, &c).unwrap();
        let criterion = criterion_for_subgroup(&c, &alpha).unwrap();
        assert_eq!(criterion, moved == c);
        println!("{alpha:>10}: {c} -> {moved}  fixed: {criterion}");
    }
}
