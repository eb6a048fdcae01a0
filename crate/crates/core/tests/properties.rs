use proptest::prelude::*;

use liftcov::action::{
    act, criterion_for_subgroup, divisibility_holds, fully_liftable, invariant_under, t_matrix,
    MappingClassPerm,
};
use liftcov::covers::{cover_from_kernel, equivalent, induced_automorphism, relabel, Branching};
use liftcov::modcore::{inv_unitriangular, IntMatrix, ModMatrix, ModulusContext, Perm};
use liftcov::subgroups::{howell_reduce, Subgroup};

const MODULI: [(u64, u32); 7] = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (7, 1)];

fn ctx_strategy() -> impl Strategy<Value = ModulusContext> {
    prop::sample::select(&MODULI[..]).prop_map(|(p, k)| ModulusContext::new(p, k).unwrap())
}

fn perm_strategy(m: usize) -> impl Strategy<Value = Perm> {
    Just((0..m).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Perm::from_images(v).unwrap())
}

fn mcp_strategy(b: usize) -> impl Strategy<Value = MappingClassPerm> {
    perm_strategy(b + 1).prop_map(|p| MappingClassPerm::new(p).unwrap())
}

fn rows_strategy(m: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-60i64..60, m), 0..=m)
}

/// A random subgroup of `(Z/p^k)^b` with `b` in `bs`.
fn subgroup_strategy(bs: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Subgroup> {
    (ctx_strategy(), bs)
        .prop_flat_map(|(ctx, b)| (Just(ctx), Just(b), rows_strategy(b)))
        .prop_map(|(ctx, b, rows)| Subgroup::from_generators(ctx, b, &rows).unwrap())
}

fn with_perms(
    bs: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = (Subgroup, MappingClassPerm, MappingClassPerm)> {
    subgroup_strategy(bs).prop_flat_map(|c| {
        let b = c.m();
        (Just(c), mcp_strategy(b), mcp_strategy(b))
    })
}

fn unitriangular_strategy() -> impl Strategy<Value = IntMatrix> {
    (1usize..=7).prop_flat_map(|n| {
        prop::collection::vec(-1000i64..1000, n * n).prop_map(move |v| {
            let rows: Vec<Vec<i64>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            if i == j {
                                1
                            } else if i < j {
                                v[i * n + j]
                            } else {
                                0
                            }
                        })
                        .collect()
                })
                .collect();
            IntMatrix::from_rows(&rows).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn unitriangular_inverse(q in unitriangular_strategy(), ctx in ctx_strategy()) {
        let n = q.rows();
        let inv = q.inv_unitriangular_exact().unwrap();
        prop_assert_eq!(q.matmul(&inv).unwrap(), IntMatrix::identity(n));
        prop_assert_eq!(inv.matmul(&q).unwrap(), IntMatrix::identity(n));
        let m = inv_unitriangular(&q, ctx).unwrap();
        prop_assert!(q.reduce_mod(ctx).matmul(&m).unwrap().is_identity());
        prop_assert_eq!(m, inv.reduce_mod(ctx));
    }

    #[test]
    fn howell_form_is_a_span_invariant(
        ctx in ctx_strategy(),
        (b, rows, mix) in (1usize..=5).prop_flat_map(|b| (
            Just(b),
            prop::collection::vec(prop::collection::vec(-30i64..30, b), 1..=b + 1),
            prop::collection::vec(-9i64..9, 64),
        )),
    ) {
        let basis = ModMatrix::from_rows(ctx, b, &rows).unwrap();
        let h = howell_reduce(&basis);
        prop_assert_eq!(howell_reduce(&h), h.clone());
        // Add integer combinations of the generators and reverse the order.
        let mut more: Vec<Vec<i64>> = rows.iter().rev().cloned().collect();
        let combo: Vec<i64> = (0..b)
            .map(|j| rows.iter().enumerate().map(|(i, r)| mix[i % mix.len()] * r[j]).sum())
            .collect();
        more.push(combo);
        let c1 = Subgroup::from_generators(ctx, b, &rows).unwrap();
        let c2 = Subgroup::from_generators(ctx, b, &more).unwrap();
        prop_assert_eq!(&c1, &c2);
        prop_assert_eq!(c1.canonical_triple(), c2.canonical_triple());
        for r in &rows {
            let scaled: Vec<i64> = r.iter().map(|x| x * mix[0]).collect();
            prop_assert!(c1.contains(&liftcov::modcore::ResidueVector::new(ctx, &scaled)).unwrap());
        }
    }

    #[test]
    fn canonical_triple_rebuilds(c in subgroup_strategy(1..=6)) {
        let t = c.canonical_triple();
        t.validate().unwrap();
        prop_assert_eq!(t.rebuild().unwrap(), c.clone());
        let ctx = c.ctx();
        let total: u128 = (ctx.modulus() as u128).pow(c.m() as u32);
        let quotient: u128 = c.quotient_invariants().iter().map(|&x| x as u128).product();
        prop_assert_eq!(c.order() * quotient, total);
    }

    #[test]
    fn action_is_a_right_action((c, a, b) in with_perms(1..=6)) {
        let lhs = act(&a, &act(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(lhs, act(&b.compose(&a), &c).unwrap());
        prop_assert_eq!(
            t_matrix(&b.compose(&a)),
            t_matrix(&b).matmul(&t_matrix(&a)).unwrap()
        );
        prop_assert_eq!(act(&a.inverse(), &act(&a, &c).unwrap()).unwrap(), c.clone());
        prop_assert_eq!(act(&a, &c).unwrap().order(), c.order());
    }

    #[test]
    fn criterion_agrees_with_invariance((c, a, _) in with_perms(1..=7)) {
        prop_assert_eq!(criterion_for_subgroup(&c, &a).unwrap(), invariant_under(&c, &a).unwrap());
    }

    #[test]
    fn generators_decide_liftability((c, a, b) in with_perms(1..=6)) {
        let verdict = fully_liftable(&c).unwrap();
        if verdict.liftable {
            prop_assert!(invariant_under(&c, &a).unwrap());
            prop_assert!(invariant_under(&c, &b.compose(&a)).unwrap());
        } else {
            prop_assert!(!invariant_under(&c, verdict.witness.as_ref().unwrap()).unwrap());
        }
        // The orbit sum of a subgroup under all of S_{b+1} is always liftable.
        if c.m() <= 3 {
            let mut rows = Vec::new();
            for g in MappingClassPerm::all(c.m()) {
                let moved = act(&g, &c).unwrap();
                rows.extend(moved.basis().to_rows().into_iter().map(|r| r.into_iter().map(i64::from).collect::<Vec<_>>()));
            }
            let sum = Subgroup::from_generators(c.ctx(), c.m(), &rows).unwrap();
            prop_assert!(fully_liftable(&sum).unwrap().liftable);
        }
    }

    #[test]
    fn divisibility_closed_under_differences((c, a, b) in with_perms(1..=5)) {
        let t = c.canonical_triple().normalized();
        let x = t_matrix(&a);
        let y = t_matrix(&b);
        if divisibility_holds(&t, &x).unwrap() && divisibility_holds(&t, &y).unwrap() {
            prop_assert!(divisibility_holds(&t, &x.matsub(&y).unwrap()).unwrap());
        }
    }

    #[test]
    fn kernel_and_cover_round_trip(c in subgroup_strategy(2..=6)) {
        let t = c.canonical_triple();
        prop_assume!(t.ell < c.m());
        let spec = cover_from_kernel(&c).unwrap();
        spec.validate(Branching::Lax).unwrap();
        prop_assert_eq!(spec.kernel().unwrap(), c.clone());
        prop_assert_eq!(spec.deck_order() * c.order(), (c.ctx().modulus() as u128).pow(c.m() as u32));
    }

    #[test]
    fn relabelled_covers_are_equivalent(
        (c, beta) in subgroup_strategy(2..=5).prop_flat_map(|c| {
            let n = c.m() + 1;
            (Just(c), perm_strategy(n))
        })
    ) {
        prop_assume!(c.canonical_triple().ell < c.m());
        let spec = cover_from_kernel(&c).unwrap();
        let moved = relabel(&spec, &beta);
        let w = equivalent(&spec, &moved).unwrap();
        prop_assert!(w.is_some());
        let w = w.unwrap();
        prop_assert_eq!(act(&w, &moved.kernel().unwrap()).unwrap(), c.clone());
        let back = equivalent(&moved, &spec).unwrap();
        prop_assert!(back.is_some());
    }

    #[test]
    fn induced_automorphism_iff_invariant((c, a, _) in with_perms(2..=5)) {
        prop_assume!(c.canonical_triple().ell < c.m());
        let spec = cover_from_kernel(&c).unwrap();
        let psi = induced_automorphism(&spec, &a).unwrap();
        prop_assert_eq!(psi.is_some(), invariant_under(&c, &a).unwrap());
        if let Some(psi) = psi {
            let inv = a.perm().inverse();
            for i in 0..spec.n {
                prop_assert_eq!(psi.apply(&spec.images[i]), reduce(&spec.images[inv.apply(i)], &spec.factors));
            }
        }
    }
}

fn reduce(v: &[i64], factors: &[u64]) -> Vec<i64> {
    v.iter()
        .zip(factors)
        .map(|(&x, &f)| x.rem_euclid(f as i64))
        .collect()
}
