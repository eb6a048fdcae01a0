//! Every liftable kernel has a very rigid normal form. Audit it, and watch
//! the audit catch a perturbed triple.
//!
//! `cargo run --release --example structural_audit`

use liftcov::action::fully_liftable;
use liftcov::census::{audit_triple, structural_audit, CensusOptions};
use liftcov::modcore::ModulusContext;
use liftcov::subgroups::{CanonicalTriple, Subgroup};

pub fn main() {
    for (p, k, n) in [(2, 2, 4), (3, 2, 3), (2, 1, 5)] {
        let report = structural_audit(p, k, n, &CensusOptions::default()).unwrap();
        println!(
            "({p},{k},{n}): {} liftable kernels, {} violations",
            report.kernels_checked,
            report.violations.len()
        );
    }

    let ctx = ModulusContext::new(2, 2).unwrap();
    let c = Subgroup::from_generators(ctx, 3, &[vec![2, 0, 2], vec![0, 2, 2]]).unwrap();
    let good: CanonicalTriple = c.canonical_triple().normalized();
    println!(
        "liftable kernel {c}: triple {good}, violations {:?}",
        audit_triple(&good, 4)
    );

    let mut bad = good.clone();
    bad.q[(0, 1)] = 1;
    let perturbed = Subgroup::span(&bad.generator_rows().unwrap()).unwrap();
    println!(
        "perturbed kernel {perturbed}: liftable {}, violations {:?}",
        fully_liftable(&perturbed).unwrap().liftable,
        audit_triple(&bad, 4)
            .iter()
            .map(|v| v.check)
            .collect::<Vec<_>>()
    );
}
