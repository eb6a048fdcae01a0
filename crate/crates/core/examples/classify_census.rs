//! Enumerate every cover for one `(p, k, n)`, group them into equivalence
//! classes and list the fully liftable ones.
//!
//! `cargo run --release --example classify_census -- 2 2 4 [out-dir]`

use std::path::PathBuf;

use liftcov::census::{classify, write_atlas, CensusOptions};

pub fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let num = |i: usize, default: u64| {
        args.get(i)
            .map_or(default, |s| s.parse().expect("integer argument"))
    };
    run(
        num(0, 2) as u32,
        num(1, 2) as u32,
        num(2, 4) as usize,
        args.get(3).map(PathBuf::from),
    );
}

pub fn run(p: u32, k: u32, n: usize, out_dir: Option<PathBuf>) {
    let report = classify(p, k, n, &CensusOptions::default()).unwrap();
    let c = &report.counts;
    println!(
        "p={p} k={k} n={n}: {} subgroups, {} admissible kernels, {} classes",
        c.subgroups, c.admissible_kernels, c.classes
    );
    for class in &report.classes {
        println!(
            "  {:<40} |A| = {:<5} orbit {:<4} {}",
            class.representative.to_string(),
            class.cover.deck_order(),
            class.class_size,
            match (class.liftable, class.theorem_case) {
                (true, Some(case)) => format!("liftable, case {case}"),
                (true, None) => "liftable, unexplained".to_string(),
                (false, _) => format!("moved by {}", class.witness.as_ref().unwrap()),
            }
        );
    }
    println!("matches the closed form: {}", report.matches);

    if let Some(dir) = out_dir {
        let path = write_atlas(&report, &dir).unwrap();
        println!("wrote {}", path.display());
    }
}
