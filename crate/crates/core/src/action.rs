//! The permutation action of S_{b+1} on H_1(Σ_{0,n}; Z/p^k) ≅ (Z/p^k)^b.
//!
//! The classes `x_1..x_b` form the basis and `x_{b+1} = -(x_1 + ... + x_b)`.
//! A permutation `α` acts by `v ↦ v · T^α`, where row `i` of `T^α` expands
//! `α(x_i)`. The embedding is fixed so that `T^α = perm_matrix(α)` whenever
//! `α` fixes `b+1`, which makes `α ↦ T^α` a homomorphism:
//! `T^{α∘β} = T^α · T^β`. Consequently `act(α, act(β, C)) = act(β∘α, C)`.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::modcore::{perm_matrix, IntMatrix, Perm, MAX_RANK};
use crate::subgroups::{CanonicalTriple, Subgroup};

/// An element of S_{b+1} acting on the `b + 1` branch classes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MappingClassPerm {
    perm: Perm,
}

impl MappingClassPerm {
    pub fn new(perm: Perm) -> Result<Self> {
        if perm.size() < 2 {
            return Err(Error::InvalidPermutation(
                "need at least two branch points".into(),
            ));
        }
        if perm.size() - 1 > MAX_RANK {
            return Err(Error::RankTooLarge(perm.size() - 1));
        }
        Ok(Self { perm })
    }

    pub fn identity(b: usize) -> Self {
        Self {
            perm: Perm::identity(b + 1),
        }
    }

    /// `η_i`, swapping `i` and `b + 1` (1-based `i`).
    pub fn eta(b: usize, i: usize) -> Result<Self> {
        Self::new(Perm::transposition(b + 1, i, b + 1)?)
    }

    /// Embeds `σ ∈ S_b` as the permutation fixing `b + 1`.
    pub fn from_sb(sigma: &Perm) -> Result<Self> {
        Self::new(sigma.extend(sigma.size() + 1))
    }

    pub fn b(&self) -> usize {
        self.perm.size() - 1
    }

    pub fn perm(&self) -> &Perm {
        &self.perm
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MappingClassPerm) -> MappingClassPerm {
        MappingClassPerm {
            perm: self.perm.compose(&other.perm),
        }
    }

    pub fn inverse(&self) -> MappingClassPerm {
        MappingClassPerm {
            perm: self.perm.inverse(),
        }
    }

    /// All of S_{b+1} in lexicographic order.
    pub fn all(b: usize) -> impl Iterator<Item = MappingClassPerm> {
        Perm::all(b + 1).map(|perm| MappingClassPerm { perm })
    }
}

impl fmt::Display for MappingClassPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.perm.fmt(f)
    }
}

impl Serialize for MappingClassPerm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `T^{η_i} = I - E_i^i - Σ_j E_i^j` (1-based `i`).
pub fn eta_matrix(b: usize, i: usize) -> IntMatrix {
    let mut t = IntMatrix::identity(b);
    for j in 0..b {
        t[(i - 1, j)] = -1;
    }
    t
}

/// Splits `α = η_u ∘ σ` with `σ` fixing `b + 1`; `u` is `None` when `α` itself fixes `b + 1`.
pub fn decompose(alpha: &MappingClassPerm) -> (Option<usize>, Perm) {
    let b = alpha.b();
    let u = alpha.perm.apply(b);
    if u == b {
        let sigma = alpha.perm.restrict(b).expect("fixes b+1");
        return (None, sigma);
    }
    let eta = Perm::transposition(b + 1, u + 1, b + 1).expect("valid transposition");
    let sigma = eta
        .compose(&alpha.perm)
        .restrict(b)
        .expect("η_u∘α fixes b+1");
    (Some(u + 1), sigma)
}

/// The b×b integer matrix of `α` on the basis `x_1..x_b`.
pub fn t_matrix(alpha: &MappingClassPerm) -> IntMatrix {
    let (u, sigma) = decompose(alpha);
    let ps = perm_matrix(&sigma);
    match u {
        None => ps,
        Some(u) => eta_matrix(alpha.b(), u)
            .matmul(&ps)
            .expect("entries are 0 and ±1"),
    }
}

/// Adjacent transpositions `(i i+1)` for `i < b`, then `η_b`.
pub fn generators(b: usize) -> Vec<MappingClassPerm> {
    assert!(b >= 1, "rank must be positive");
    let mut gens: Vec<MappingClassPerm> = (1..b)
        .map(|i| MappingClassPerm::new(Perm::transposition(b + 1, i, i + 1).unwrap()).unwrap())
        .collect();
    gens.push(MappingClassPerm::eta(b, b).unwrap());
    gens
}

fn check_rank(alpha: &MappingClassPerm, c: &Subgroup) -> Result<()> {
    if alpha.b() != c.m() {
        return Err(Error::DimensionMismatch(format!(
            "permutation of {} points on a subgroup of rank {}",
            alpha.b() + 1,
            c.m()
        )));
    }
    Ok(())
}

/// `α(C) = ⟨basis · T^α⟩`.
pub fn act(alpha: &MappingClassPerm, c: &Subgroup) -> Result<Subgroup> {
    check_rank(alpha, c)?;
    c.map_right(&t_matrix(alpha))
}

pub fn invariant_under(c: &Subgroup, alpha: &MappingClassPerm) -> Result<bool> {
    Ok(act(alpha, c)? == *c)
}

/// Whether `p^{r_j - r_i}` divides `(Q X Q^{-1})_{i,j}` for all `i < j`.
pub fn divisibility_holds(t: &CanonicalTriple, x: &IntMatrix) -> Result<bool> {
    let qinv = t.q.inv_unitriangular_exact()?;
    let y = t.q.matmul(x)?.matmul(&qinv)?.reduce_mod(t.ctx);
    for i in 0..t.m {
        for j in (i + 1)..t.m {
            if t.r[j] > t.r[i] && t.ctx.valuation(y[(i, j)]) < t.r[j] - t.r[i] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Divisibility test for `α(⟨PQ⟩) = ⟨PQ⟩` on a triple with `ω = id`.
pub fn criterion_divisibility(t: &CanonicalTriple, alpha: &MappingClassPerm) -> Result<bool> {
    if !t.omega.is_identity() {
        return Err(Error::OmegaNotIdentity);
    }
    if alpha.b() != t.m {
        return Err(Error::DimensionMismatch(
            "permutation and triple ranks differ".into(),
        ));
    }
    divisibility_holds(t, &t_matrix(alpha))
}

/// Decides `α(C) = C` through the divisibility test.
///
/// With `C = ⟨PQ⟩ω`, `β = ω^{-1}` carries `C` to `⟨PQ⟩`, and `α` fixes `C`
/// exactly when `ω∘α∘ω^{-1}` fixes `⟨PQ⟩`.
pub fn criterion_for_subgroup(c: &Subgroup, alpha: &MappingClassPerm) -> Result<bool> {
    check_rank(alpha, c)?;
    LiftCriterion::new(c)?.holds(alpha)
}

/// The divisibility test prepared once for a fixed subgroup, for checking
/// many permutations against it.
#[derive(Clone, Debug)]
pub struct LiftCriterion {
    normalized: CanonicalTriple,
    omega: MappingClassPerm,
    omega_inv: MappingClassPerm,
}

impl LiftCriterion {
    pub fn new(c: &Subgroup) -> Result<Self> {
        let t = c.canonical_triple();
        let omega = MappingClassPerm::from_sb(&t.omega)?;
        Ok(Self {
            normalized: t.normalized(),
            omega_inv: omega.inverse(),
            omega,
        })
    }

    pub fn holds(&self, alpha: &MappingClassPerm) -> Result<bool> {
        if alpha.b() != self.normalized.m {
            return Err(Error::DimensionMismatch(format!(
                "permutation of {} points acting on rank {}",
                alpha.b() + 1,
                self.normalized.m
            )));
        }
        let conj = self.omega.compose(alpha).compose(&self.omega_inv);
        criterion_divisibility(&self.normalized, &conj)
    }
}

/// Outcome of a full liftability check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftVerdict {
    pub liftable: bool,
    pub witness: Option<MappingClassPerm>,
}

/// Whether every permutation of the branch points preserves `C`.
///
/// The stabilizer of `C` is a subgroup, so checking the generators is
/// enough; the first generator that moves `C` is reported.
pub fn fully_liftable(c: &Subgroup) -> Result<LiftVerdict> {
    if c.m() == 0 {
        return Err(Error::DimensionMismatch("rank must be positive".into()));
    }
    for g in generators(c.m()) {
        if !invariant_under(c, &g)? {
            return Ok(LiftVerdict {
                liftable: false,
                witness: Some(g),
            });
        }
    }
    Ok(LiftVerdict {
        liftable: true,
        witness: None,
    })
}

/// Same verdict by checking every element of S_{b+1}.
pub fn fully_liftable_sweep(c: &Subgroup) -> Result<LiftVerdict> {
    if c.m() == 0 {
        return Err(Error::DimensionMismatch("rank must be positive".into()));
    }
    for alpha in MappingClassPerm::all(c.m()) {
        if !invariant_under(c, &alpha)? {
            return Ok(LiftVerdict {
                liftable: false,
                witness: Some(alpha),
            });
        }
    }
    Ok(LiftVerdict {
        liftable: true,
        witness: None,
    })
}
