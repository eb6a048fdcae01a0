//! Howell bases and the `⟨PQω⟩` normal form of subgroups of `(Z/p^k)^m`.
//!
//! `cargo run --example canonical_form`

use liftcov::modcore::ModulusContext;
use liftcov::subgroups::Subgroup;

fn show(ctx: ModulusContext, m: usize, gens: &[Vec<i64>]) {
    let c = Subgroup::from_generators(ctx, m, gens).unwrap();
    let t = c.canonical_triple();
    assert_eq!(t.rebuild().unwrap(), c);
    println!("generators {gens:?}");
    println!("  Howell basis   {c}");
    println!("  order          {}", c.order());
    println!("  triple         {t}");
    println!("  quotient       {:?}", c.quotient_invariants());
}

pub fn main() {
    let z4 = ModulusContext::new(2, 2).unwrap();
    show(z4, 2, &[vec![2, 1]]);
    show(z4, 2, &[vec![1, 0], vec![0, 1]]);
    show(z4, 3, &[vec![2, 0, 2], vec![0, 2, 2]]);

    let z27 = ModulusContext::new(3, 3).unwrap();
    show(z27, 3, &[vec![3, 9, 0], vec![0, 1, 5]]);

    // Different generating sets, same subgroup, same normal form.
    let a = Subgroup::from_generators(z27, 2, &[vec![3, 6]]).unwrap();
    let b = Subgroup::from_generators(z27, 2, &[vec![6, 12], vec![12, 24], vec![3, 33]]).unwrap();
    assert_eq!(a, b);
    println!("⟨(3,6)⟩ = ⟨(6,12),(12,24),(3,33)⟩: {}", a == b);
}
