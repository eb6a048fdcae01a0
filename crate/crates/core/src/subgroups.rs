//! Subgroups of (Z/p^k)^m.
//!
//! A [`Subgroup`] is stored as the Howell-reduced basis of its row span,
//! which is unique per subgroup, so equality of subgroups is structural
//! equality of bases. The `⟨PQω⟩` normal form ([`CanonicalTriple`]) is
//! derived from that basis on demand.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modcore::{IntMatrix, ModMatrix, ModulusContext, Perm, ResidueVector, MAX_RANK};

fn check_rank(m: usize) -> Result<()> {
    if m > MAX_RANK {
        return Err(Error::RankTooLarge(m));
    }
    Ok(())
}

fn sub_scaled(ctx: ModulusContext, target: &mut [u32], q: u32, row: &[u32]) {
    if q == 0 {
        return;
    }
    for (t, &x) in target.iter_mut().zip(row) {
        *t = ctx.sub(*t, ctx.mul(q, x));
    }
}

fn scale(ctx: ModulusContext, row: &mut [u32], s: u32) {
    for x in row.iter_mut() {
        *x = ctx.mul(*x, s);
    }
}

fn is_zero(row: &[u32]) -> bool {
    row.iter().all(|&x| x == 0)
}

/// Howell form of a list of rows of width `m`.
fn howell_rows(ctx: ModulusContext, m: usize, rows: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
    let mut work: Vec<Vec<u32>> = rows.into_iter().filter(|r| !is_zero(r)).collect();
    let mut basis: Vec<(usize, u32, Vec<u32>)> = Vec::new();
    for c in 0..m {
        let best = work
            .iter()
            .enumerate()
            .filter(|(_, r)| r[c] != 0)
            .min_by_key(|(idx, r)| (ctx.valuation(r[c]), *idx))
            .map(|(idx, _)| idx);
        let Some(idx) = best else { continue };
        let mut pivot = work.remove(idx);
        let (t, unit) = ctx.split_unit(pivot[c]);
        scale(
            ctx,
            &mut pivot,
            ctx.inv_unit(unit).expect("split_unit yields a unit"),
        );
        let pt = ctx.p_pow(t);
        for w in work.iter_mut() {
            let q = w[c] / pt;
            sub_scaled(ctx, w, q, &pivot);
        }
        work.retain(|r| !is_zero(r));
        if t > 0 {
            // p^(k-t) · pivot vanishes in column c; keep what survives to the right.
            let mut ann = pivot.clone();
            scale(ctx, &mut ann, ctx.p_pow(ctx.k() - t));
            if !is_zero(&ann) {
                work.push(ann);
            }
        }
        basis.push((c, pt, pivot));
    }
    for i in 0..basis.len() {
        let (c, pt, row) = basis[i].clone();
        for entry in basis.iter_mut().take(i) {
            let q = entry.2[c] / pt;
            sub_scaled(ctx, &mut entry.2, q, &row);
        }
    }
    basis.into_iter().map(|(_, _, r)| r).collect()
}

/// Howell-reduced basis of the row span of `rows`.
pub fn howell_reduce(rows: &ModMatrix) -> ModMatrix {
    let ctx = rows.ctx();
    let reduced = howell_rows(ctx, rows.cols(), rows.to_rows());
    ModMatrix::from_residue_rows(ctx, rows.cols(), reduced)
}

/// A subgroup of (Z/p^k)^m, held by its Howell basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    basis: ModMatrix,
}

impl Subgroup {
    /// The subgroup generated by the rows of `rows`.
    pub fn span(rows: &ModMatrix) -> Result<Self> {
        check_rank(rows.cols())?;
        Ok(Self {
            basis: howell_reduce(rows),
        })
    }

    /// Span of integer generator rows of width `m`.
    pub fn from_generators(ctx: ModulusContext, m: usize, gens: &[Vec<i64>]) -> Result<Self> {
        Self::span(&ModMatrix::from_rows(ctx, m, gens)?)
    }

    pub(crate) fn from_residue_rows(ctx: ModulusContext, m: usize, rows: Vec<Vec<u32>>) -> Self {
        Self {
            basis: ModMatrix::from_residue_rows(ctx, m, howell_rows(ctx, m, rows)),
        }
    }

    pub fn trivial(ctx: ModulusContext, m: usize) -> Result<Self> {
        Self::span(&ModMatrix::zeros(ctx, 0, m))
    }

    pub fn full(ctx: ModulusContext, m: usize) -> Result<Self> {
        Self::span(&ModMatrix::identity(ctx, m))
    }

    pub fn ctx(&self) -> ModulusContext {
        self.basis.ctx()
    }

    /// Ambient rank.
    pub fn m(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &ModMatrix {
        &self.basis
    }

    fn same_ambient(&self, other: &Subgroup) -> Result<()> {
        if self.ctx() != other.ctx() {
            return Err(Error::ContextMismatch);
        }
        if self.m() != other.m() {
            return Err(Error::DimensionMismatch(format!(
                "ambient ranks {} and {}",
                self.m(),
                other.m()
            )));
        }
        Ok(())
    }

    pub(crate) fn contains_residues(&self, v: &[u32]) -> bool {
        let ctx = self.ctx();
        let mut v = v.to_vec();
        let mut next = 0;
        for c in 0..self.m() {
            if next < self.basis.rows() && self.basis[(next, c)] != 0 {
                let row = self.basis.row(next);
                let pivot = row[c];
                if !v[c].is_multiple_of(pivot) {
                    return false;
                }
                let q = v[c] / pivot;
                sub_scaled(ctx, &mut v, q, row);
                next += 1;
            } else if v[c] != 0 {
                return false;
            }
        }
        true
    }

    pub fn contains(&self, v: &ResidueVector) -> Result<bool> {
        if v.ctx() != self.ctx() {
            return Err(Error::ContextMismatch);
        }
        if v.len() != self.m() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in rank {}",
                v.len(),
                self.m()
            )));
        }
        Ok(self.contains_residues(v.entries()))
    }

    /// Set equality; Howell bases are unique, so this compares bases.
    pub fn equal(&self, other: &Subgroup) -> Result<bool> {
        self.same_ambient(other)?;
        Ok(self.basis == other.basis)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> Result<bool> {
        self.same_ambient(other)?;
        Ok((0..self.basis.rows()).all(|i| other.contains_residues(self.basis.row(i))))
    }

    /// `log_p |C|`.
    pub fn order_exponent(&self) -> u32 {
        let ctx = self.ctx();
        let mut c = 0;
        (0..self.basis.rows())
            .map(|i| {
                let row = self.basis.row(i);
                while row[c] == 0 {
                    c += 1;
                }
                ctx.k() - ctx.valuation(row[c])
            })
            .sum()
    }

    /// `|C|`, saturating at `u128::MAX`.
    pub fn order(&self) -> u128 {
        (self.ctx().p() as u128)
            .checked_pow(self.order_exponent())
            .unwrap_or(u128::MAX)
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.rows() == 0
    }

    /// Image under `v ↦ v·T` for an m×m integer matrix `T`.
    pub fn map_right(&self, t: &IntMatrix) -> Result<Subgroup> {
        if t.rows() != self.m() || t.cols() != self.m() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix on rank {}",
                t.rows(),
                t.cols(),
                self.m()
            )));
        }
        Subgroup::span(&self.basis.mul_int(t)?)
    }

    pub fn canonical_triple(&self) -> CanonicalTriple {
        canonical_triple(self)
    }

    /// Invariant factors of the quotient `(Z/p^k)^m / C`, ascending.
    pub fn quotient_invariants(&self) -> Vec<u64> {
        self.canonical_triple().quotient_invariants()
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}⟩ ≤ ({})^{}", self.basis, self.ctx(), self.m())
    }
}

#[derive(Serialize, Deserialize)]
struct SubgroupRepr {
    p: u32,
    k: u32,
    m: usize,
    basis: Vec<Vec<i64>>,
}

impl Serialize for Subgroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubgroupRepr {
            p: self.ctx().p(),
            k: self.ctx().k(),
            m: self.m(),
            basis: self
                .basis
                .to_rows()
                .into_iter()
                .map(|r| r.into_iter().map(i64::from).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subgroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SubgroupRepr::deserialize(d)?;
        let ctx = ModulusContext::new(repr.p as u64, repr.k).map_err(serde::de::Error::custom)?;
        Subgroup::from_generators(ctx, repr.m, &repr.basis).map_err(serde::de::Error::custom)
    }
}

/// The `⟨PQω⟩` normal form of a subgroup.
///
/// `P` is the ℓ×m matrix with `P_{i,j} = δ_{i,j} p^{r_i}`, `Q` is upper
/// unitriangular with `0 <= Q_{i,j} < p^{r_j - r_i}` for `i < j`, and `ω`
/// permutes columns. `r` always has length `m`; entries past `ℓ` equal `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CanonicalTriple {
    #[serde(skip)]
    pub ctx: ModulusContext,
    pub m: usize,
    pub ell: usize,
    pub r: Vec<u32>,
    #[serde(serialize_with = "serialize_int_matrix")]
    pub q: IntMatrix,
    #[serde(serialize_with = "serialize_perm")]
    pub omega: Perm,
}

fn serialize_int_matrix<S: serde::Serializer>(
    m: &IntMatrix,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    m.to_rows().serialize(s)
}

fn serialize_perm<S: serde::Serializer>(p: &Perm, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

impl CanonicalTriple {
    /// The triple `(ℓ, r, Q, ω)`; `r` may be given with length ℓ or m.
    pub fn new(
        ctx: ModulusContext,
        ell: usize,
        r: &[u32],
        q: IntMatrix,
        omega: Perm,
    ) -> Result<Self> {
        let m = q.rows();
        let mut r = r.to_vec();
        if r.len() == ell {
            r.resize(m, ctx.k());
        }
        let t = Self {
            ctx,
            m,
            ell,
            r,
            q,
            omega,
        };
        t.validate()?;
        Ok(t)
    }

    /// Checks the shape constraints on ℓ, r and Q.
    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidTriple(s));
        let k = self.ctx.k();
        if self.ell > self.m {
            return bad(format!("ℓ = {} exceeds m = {}", self.ell, self.m));
        }
        if self.r.len() != self.m || self.q.rows() != self.m || self.q.cols() != self.m {
            return bad("dimensions of r or Q do not match m".into());
        }
        if self.omega.size() != self.m {
            return bad("ω acts on the wrong number of columns".into());
        }
        for i in 0..self.m {
            if i < self.ell && self.r[i] >= k {
                return bad(format!("r_{} = {} is not below k", i + 1, self.r[i]));
            }
            if i >= self.ell && self.r[i] != k {
                return bad(format!("r_{} must equal k past ℓ", i + 1));
            }
            if i > 0 && self.r[i - 1] > self.r[i] {
                return bad("r is not weakly increasing".into());
            }
        }
        for i in 0..self.m {
            if self.q[(i, i)] != 1 {
                return bad(format!("Q_{{{0},{0}}} != 1", i + 1));
            }
            for j in 0..i {
                if self.q[(i, j)] != 0 {
                    return bad(format!("Q_{{{},{}}} != 0", i + 1, j + 1));
                }
            }
            for j in (i + 1)..self.m {
                let bound = (self.ctx.p() as i64).pow(self.r[j] - self.r[i]);
                let x = self.q[(i, j)];
                if !(0..bound).contains(&x) {
                    return bad(format!(
                        "Q_{{{},{}}} = {x} outside [0, {bound})",
                        i + 1,
                        j + 1
                    ));
                }
            }
        }
        Ok(())
    }

    /// The ℓ rows of `P·Q·ω`, without checking the shape constraints.
    pub fn generator_rows(&self) -> Result<ModMatrix> {
        let ctx = self.ctx;
        let mut pq = ModMatrix::zeros(ctx, self.ell, self.m);
        for i in 0..self.ell {
            let pr = ctx.p_pow(self.r[i].min(ctx.k()));
            for j in 0..self.m {
                pq[(i, j)] = ctx.mul(pr, ctx.reduce(self.q[(i, j)]));
            }
        }
        Ok(pq.permute_columns(&self.omega))
    }

    /// The subgroup `⟨PQω⟩`.
    pub fn rebuild(&self) -> Result<Subgroup> {
        self.validate()?;
        Subgroup::span(&self.generator_rows()?)
    }

    /// Same `(ℓ, r, Q)` with `ω = id`.
    pub fn normalized(&self) -> CanonicalTriple {
        CanonicalTriple {
            omega: Perm::identity(self.m),
            ..self.clone()
        }
    }

    /// 0-based index of the first `r_i > 0`, if any (ι − 1).
    pub fn iota(&self) -> Option<usize> {
        self.r.iter().position(|&x| x > 0)
    }

    pub fn quotient_invariants(&self) -> Vec<u64> {
        let p = self.ctx.p() as u64;
        self.r
            .iter()
            .filter(|&&x| x > 0)
            .map(|&x| p.pow(x))
            .collect()
    }
}

impl fmt::Display for CanonicalTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r: Vec<String> = self.r[..self.ell].iter().map(ToString::to_string).collect();
        write!(
            f,
            "ℓ={} r=({}) Q={} ω={}",
            self.ell,
            r.join(","),
            self.q,
            self.omega
        )
    }
}

/// Computes `(ℓ, r, Q, ω)` with `⟨PQω⟩ = C`.
///
/// Full pivoting on the Howell basis: at each step the entry of least
/// p-adic valuation in the remaining block becomes the next pivot (ties go to
/// the smallest original column, then the smallest row). Every remaining
/// entry is then a multiple of the pivot, so the pivot valuations come out
/// weakly increasing and each pivot row is `p^{r_i}` times a row of `Q`.
pub fn canonical_triple(c: &Subgroup) -> CanonicalTriple {
    let ctx = c.ctx();
    let m = c.m();
    let k = ctx.k();
    let mut rows = c.basis().to_rows();
    let mut cols: Vec<usize> = (0..m).collect();
    let mut r = vec![k; m];
    let mut ell = 0;
    while ell < m && ell < rows.len() {
        let i = ell;
        let mut best: Option<(u32, usize, usize, usize)> = None;
        for (ri, row) in rows.iter().enumerate().skip(i) {
            for pos in i..m {
                if row[pos] == 0 {
                    continue;
                }
                let key = (ctx.valuation(row[pos]), cols[pos], ri, pos);
                if best.is_none_or(|b| (key.0, key.1, key.2) < (b.0, b.1, b.2)) {
                    best = Some(key);
                }
            }
        }
        let Some((t, _, ri, pos)) = best else { break };
        rows.swap(i, ri);
        cols.swap(i, pos);
        for row in rows.iter_mut() {
            row.swap(i, pos);
        }
        let (_, unit) = ctx.split_unit(rows[i][i]);
        scale(ctx, &mut rows[i], ctx.inv_unit(unit).expect("unit"));
        let pt = ctx.p_pow(t);
        let pivot = rows[i].clone();
        for row in rows.iter_mut().skip(i + 1) {
            let q = row[i] / pt;
            sub_scaled(ctx, row, q, &pivot);
        }
        r[i] = t;
        ell += 1;
    }
    for i in 0..ell {
        for j in (i + 1)..ell {
            let q = rows[i][j] / ctx.p_pow(r[j]);
            let rj = rows[j].clone();
            sub_scaled(ctx, &mut rows[i], q, &rj);
        }
    }
    let mut q = IntMatrix::identity(m);
    for i in 0..ell {
        let pr = ctx.p_pow(r[i]);
        for j in (i + 1)..m {
            debug_assert_eq!(rows[i][j] % pr, 0);
            q[(i, j)] = (rows[i][j] / pr) as i64;
        }
    }
    let omega = Perm::from_images(cols)
        .expect("column order is a permutation")
        .inverse();
    CanonicalTriple {
        ctx,
        m,
        ell,
        r,
        q,
        omega,
    }
}
