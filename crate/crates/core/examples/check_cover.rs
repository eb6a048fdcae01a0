//! Decide whether every homeomorphism of the sphere preserving the branch
//! points lifts to a given cover.
//!
//! `cargo run --example check_cover`

use liftcov::action::fully_liftable;
use liftcov::covers::{Branching, CoverSpec};

fn report(name: &str, spec: &CoverSpec, mode: Branching) -> liftcov::Result<()> {
    spec.validate(mode)?;
    let kernel = spec.kernel()?;
    let verdict = fully_liftable(&kernel)?;
    print!(
        "{name}: |A| = {}, kernel {kernel} of order {}: ",
        spec.deck_order(),
        kernel.order()
    );
    match verdict.witness {
        None => println!("liftable"),
        Some(w) => println!("not liftable, {w} does not lift"),
    }
    Ok(())
}

pub fn main() {
    // A = Z_2^2, x_1 -> e_1, x_2 -> e_2, x_3 -> e_1 + e_2.
    let universal = CoverSpec {
        p: 2,
        k: 1,
        n: 3,
        factors: vec![2, 2],
        images: vec![vec![1, 0], vec![0, 1], vec![1, 1]],
    };
    report("Z_2^2 on 3 points", &universal, Branching::Strict).unwrap();

    // A = Z_2 with the third point unbranched: swapping x_2 and x_3 cannot lift.
    let partial = CoverSpec {
        p: 2,
        k: 1,
        n: 3,
        factors: vec![2],
        images: vec![vec![1], vec![1], vec![0]],
    };
    match partial.validate(Branching::Strict) {
        Err(e) => println!("strict mode rejects the Z_2 cover: {e}"),
        Ok(()) => unreachable!(),
    }
    report("Z_2 on 3 points (lax)", &partial, Branching::Lax).unwrap();

    let mixed: CoverSpec = serde_json::from_str(
        r#"{"p":2,"k":2,"n":4,"factors":[2,4],"images":[[1,1],[0,1],[0,1],[1,1]]}"#,
    )
    .unwrap();
    report("Z_2 x Z_4 on 4 points", &mixed, Branching::Strict).unwrap();
}
