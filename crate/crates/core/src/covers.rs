//! Branched-cover descriptions and the maps between covers and kernels.

use serde::{Deserialize, Serialize};

use crate::action::{act, fully_liftable, MappingClassPerm};
use crate::error::{CoverIssue, Error, Result};
use crate::modcore::{inv_unitriangular, ModMatrix, ModulusContext, Perm, MAX_RANK};
use crate::subgroups::{howell_reduce, CanonicalTriple, Subgroup};

/// Whether a branch point may have zero image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Branching {
    /// Every `φ(x_i)` must be nonzero.
    #[default]
    Strict,
    /// Zero images are accepted.
    Lax,
}

/// A regular A-cover of the sphere branched over `n` points, with `A` a
/// p-group of exponent `p^k`.
///
/// `A = Z_{factors[0]} × ... × Z_{factors[t-1]}` with ascending p-power
/// orders, and `images[i]` is `φ(x_{i+1})`, reduced factor by factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoverSpec {
    pub p: u32,
    pub k: u32,
    pub n: usize,
    pub factors: Vec<u64>,
    pub images: Vec<Vec<i64>>,
}

fn p_log(p: u64, mut f: u64) -> Option<u32> {
    let mut s = 0;
    while f > 1 {
        if !f.is_multiple_of(p) {
            return None;
        }
        f /= p;
        s += 1;
    }
    Some(s)
}

impl CoverSpec {
    pub fn ctx(&self) -> Result<ModulusContext> {
        ModulusContext::new(self.p as u64, self.k)
    }

    /// Rank `b = n - 1` of the homology of the punctured sphere.
    pub fn b(&self) -> usize {
        self.n.saturating_sub(1)
    }

    /// `|A|`, saturating.
    pub fn deck_order(&self) -> u128 {
        self.factors
            .iter()
            .fold(1u128, |acc, &f| acc.saturating_mul(f as u128))
    }

    fn structural_issues(&self) -> Option<CoverIssue> {
        let bad = |s: String| Some(CoverIssue::Malformed(s));
        if let Err(e) = self.ctx() {
            return bad(e.to_string());
        }
        if self.n < 2 {
            return bad(format!("need n >= 2 branch points, got {}", self.n));
        }
        if self.b() > MAX_RANK {
            return bad(format!("n = {} exceeds the supported maximum", self.n));
        }
        if self.images.len() != self.n {
            return bad(format!(
                "{} image rows for n = {}",
                self.images.len(),
                self.n
            ));
        }
        let t = self.factors.len();
        if let Some(i) = self.images.iter().position(|r| r.len() != t) {
            return bad(format!(
                "image of x_{} has {} entries, expected {t}",
                i + 1,
                self.images[i].len()
            ));
        }
        for &f in &self.factors {
            match p_log(self.p as u64, f) {
                Some(s) if s >= 1 => {}
                _ => {
                    return bad(format!(
                        "factor order {f} is not a positive power of {}",
                        self.p
                    ))
                }
            }
        }
        if self.factors.windows(2).any(|w| w[0] > w[1]) {
            return bad("factor orders must be ascending".into());
        }
        for (i, row) in self.images.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if x < 0 || x as u64 >= self.factors[j] {
                    return bad(format!(
                        "entry {x} of φ(x_{}) not reduced mod {}",
                        i + 1,
                        self.factors[j]
                    ));
                }
            }
        }
        None
    }

    fn exponents(&self) -> Vec<u32> {
        self.factors
            .iter()
            .map(|&f| p_log(self.p as u64, f).expect("validated"))
            .collect()
    }

    /// `φ(x_i)` inside `(Z/p^k)^t` via `Z_{p^s} → Z_{p^k}, a ↦ p^{k-s} a`.
    fn embedded_rows(&self, ctx: ModulusContext) -> Vec<Vec<u32>> {
        let exps = self.exponents();
        self.images
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&exps)
                    .map(|(&x, &s)| ctx.mul(ctx.reduce(x), ctx.p_pow(ctx.k() - s)))
                    .collect()
            })
            .collect()
    }

    /// All reasons this description is not a valid cover; empty when valid.
    pub fn issues(&self, mode: Branching) -> Vec<CoverIssue> {
        if let Some(issue) = self.structural_issues() {
            return vec![issue];
        }
        let mut out = Vec::new();
        let exps = self.exponents();
        let max = exps.iter().copied().max().unwrap_or(0);
        if max != self.k {
            out.push(CoverIssue::WrongExponent {
                found: (self.p as u64).pow(max),
                expected: (self.p as u64).pow(self.k),
            });
        }
        if max > self.k {
            return out;
        }
        let sum_zero = (0..self.factors.len()).all(|j| {
            let s: i128 = self.images.iter().map(|r| r[j] as i128).sum();
            s % self.factors[j] as i128 == 0
        });
        if !sum_zero {
            out.push(CoverIssue::NotSumZero);
        }
        let ctx = self.ctx().expect("validated");
        let t = self.factors.len();
        let image = howell_reduce(&ModMatrix::from_residue_rows(
            ctx,
            t,
            self.embedded_rows(ctx),
        ));
        let image_exp: u32 = (0..image.rows())
            .map(|i| {
                let row = image.row(i);
                let lead = row.iter().find(|&&x| x != 0).copied().unwrap_or(0);
                ctx.k() - ctx.valuation(lead)
            })
            .sum();
        if image_exp != exps.iter().sum::<u32>() {
            out.push(CoverIssue::NotSurjective);
        }
        if mode == Branching::Strict {
            for (i, row) in self.images.iter().enumerate() {
                if row.iter().all(|&x| x == 0) {
                    out.push(CoverIssue::ZeroBranchImage(i + 1));
                }
            }
        }
        out
    }

    pub fn validate(&self, mode: Branching) -> Result<()> {
        let issues = self.issues(mode);
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidCover(issues))
        }
    }

    /// The kernel of `φ̄: (Z/p^k)^b → A` on the basis `x_1..x_b`.
    ///
    /// Row-reduces `[Φ | I]`; by the Howell property the rows whose first
    /// `t` entries vanish span exactly `{(0, v) : v Φ = 0}`.
    pub fn kernel(&self) -> Result<Subgroup> {
        self.validate(Branching::Lax)?;
        let ctx = self.ctx()?;
        let b = self.b();
        let t = self.factors.len();
        let emb = self.embedded_rows(ctx);
        let rows: Vec<Vec<u32>> = (0..b)
            .map(|i| {
                let mut r = emb[i].clone();
                r.extend((0..b).map(|j| u32::from(i == j)));
                r
            })
            .collect();
        let h = howell_reduce(&ModMatrix::from_residue_rows(ctx, t + b, rows));
        let kernel_rows: Vec<Vec<u32>> = (0..h.rows())
            .map(|i| h.row(i))
            .filter(|r| r[..t].iter().all(|&x| x == 0))
            .map(|r| r[t..].to_vec())
            .collect();
        Ok(Subgroup::from_residue_rows(ctx, b, kernel_rows))
    }

    /// Solves `Σ c_i φ(x_i) = target` (embedded coordinates) for `c`.
    fn preimage(&self, ctx: ModulusContext, target: &[u32]) -> Option<Vec<u32>> {
        let b = self.b();
        let t = self.factors.len();
        let emb = self.embedded_rows(ctx);
        let rows: Vec<Vec<u32>> = (0..b)
            .map(|i| {
                let mut r = emb[i].clone();
                r.extend((0..b).map(|j| u32::from(i == j)));
                r
            })
            .collect();
        let h = howell_reduce(&ModMatrix::from_residue_rows(ctx, t + b, rows));
        let mut w: Vec<u32> = target.to_vec();
        w.extend(std::iter::repeat_n(0, b));
        for i in 0..h.rows() {
            let row = h.row(i);
            let Some(c) = row.iter().position(|&x| x != 0) else {
                continue;
            };
            if c >= t {
                break;
            }
            if !w[c].is_multiple_of(row[c]) {
                return None;
            }
            let q = w[c] / row[c];
            for (x, &y) in w.iter_mut().zip(row) {
                *x = ctx.sub(*x, ctx.mul(q, y));
            }
        }
        if w[..t].iter().any(|&x| x != 0) {
            return None;
        }
        Some(w[t..].iter().map(|&x| ctx.neg(x)).collect())
    }

    fn reduce_in_a(&self, v: &[i128]) -> Vec<i64> {
        v.iter()
            .zip(&self.factors)
            .map(|(&x, &f)| x.rem_euclid(f as i128) as i64)
            .collect()
    }

    /// `Σ c_i a_i` in `A`.
    fn combine(&self, coeffs: &[i64], rows: &[&[i64]]) -> Vec<i64> {
        let mut acc = vec![0i128; self.factors.len()];
        for (&c, row) in coeffs.iter().zip(rows) {
            for (a, &x) in acc.iter_mut().zip(row.iter()) {
                *a += c as i128 * x as i128;
            }
        }
        self.reduce_in_a(&acc)
    }
}

/// An endomorphism of `A`, given by the images of the standard generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Automorphism {
    pub factors: Vec<u64>,
    pub generator_images: Vec<Vec<i64>>,
}

impl Automorphism {
    pub fn apply(&self, a: &[i64]) -> Vec<i64> {
        let mut acc = vec![0i128; self.factors.len()];
        for (&c, img) in a.iter().zip(&self.generator_images) {
            for (x, &y) in acc.iter_mut().zip(img) {
                *x += c as i128 * y as i128;
            }
        }
        acc.iter()
            .zip(&self.factors)
            .map(|(&x, &f)| x.rem_euclid(f as i128) as i64)
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.generator_images
            .iter()
            .enumerate()
            .all(|(j, img)| img.iter().enumerate().all(|(l, &x)| x == i64::from(j == l)))
    }
}

/// `φ(α(x_i))`; `α` sends the class `x_i` to `x_{α^{-1}(i)}`.
fn images_after(spec: &CoverSpec, alpha: &MappingClassPerm) -> Vec<Vec<i64>> {
    let inv = alpha.perm().inverse();
    (0..spec.n)
        .map(|i| spec.images[inv.apply(i)].clone())
        .collect()
}

/// The `ψ ∈ Aut(A)` with `ψ∘φ = φ∘α`, if `α` preserves the kernel.
pub fn induced_automorphism(
    spec: &CoverSpec,
    alpha: &MappingClassPerm,
) -> Result<Option<Automorphism>> {
    spec.validate(Branching::Lax)?;
    if alpha.b() != spec.b() {
        return Err(Error::ParameterMismatch(format!(
            "permutation of {} points for n = {}",
            alpha.b() + 1,
            spec.n
        )));
    }
    let ctx = spec.ctx()?;
    let t = spec.factors.len();
    let exps = spec.exponents();
    let moved = images_after(spec, alpha);
    let moved_refs: Vec<&[i64]> = moved[..spec.b()].iter().map(Vec::as_slice).collect();
    let mut generator_images = Vec::with_capacity(t);
    for j in 0..t {
        let mut target = vec![0u32; t];
        target[j] = ctx.p_pow(ctx.k() - exps[j]);
        let c = spec
            .preimage(ctx, &target)
            .expect("validated covers are surjective");
        let c: Vec<i64> = c.into_iter().map(i64::from).collect();
        generator_images.push(spec.combine(&c, &moved_refs));
    }
    let psi = Automorphism {
        factors: spec.factors.clone(),
        generator_images,
    };
    for (j, img) in psi.generator_images.iter().enumerate() {
        let scaled: Vec<i128> = img
            .iter()
            .map(|&x| x as i128 * spec.factors[j] as i128)
            .collect();
        if spec.reduce_in_a(&scaled).iter().any(|&x| x != 0) {
            return Ok(None);
        }
    }
    if spec.images.iter().zip(&moved).any(|(img, m)| psi.apply(img) != *m) {
        return Ok(None);
    }
    let image_spec = CoverSpec {
        images: psi.generator_images.clone(),
        n: t,
        ..spec.clone()
    };
    let surjective = !image_spec
        .issues(Branching::Lax)
        .contains(&CoverIssue::NotSurjective);
    Ok(surjective.then_some(psi))
}

/// The cover whose kernel is `⟨PQω⟩`: `φ(x_i)` is row `ω(i)` of `Q^{-1}`
/// restricted to columns `ι..b`, each entry reduced mod `p^{r_j}`, and
/// `φ(x_n) = -(φ(x_1) + ... + φ(x_b))`. With `ω = id` this is the usual
/// reconstruction from `(r, Q)`.
pub fn phi_from_triple(t: &CanonicalTriple, n: usize) -> Result<CoverSpec> {
    t.validate()?;
    if n < 2 || t.m != n - 1 {
        return Err(Error::ParameterMismatch(format!(
            "triple of rank {} for n = {n}",
            t.m
        )));
    }
    let ctx = t.ctx;
    let b = t.m;
    let Some(iota) = t.iota() else {
        return Err(Error::TrivialGroup);
    };
    let top = t.r[b - 1];
    if top != ctx.k() {
        let p = ctx.p() as u64;
        return Err(Error::InvalidCover(vec![CoverIssue::WrongExponent {
            found: p.pow(top),
            expected: p.pow(ctx.k()),
        }]));
    }
    let p = ctx.p() as u64;
    let factors: Vec<u64> = t.r[iota..].iter().map(|&r| p.pow(r)).collect();
    let qinv = inv_unitriangular(&t.q, ctx)?;
    let mut images: Vec<Vec<i64>> = (0..b)
        .map(|i| {
            let src = t.omega.apply(i);
            (iota..b)
                .zip(&factors)
                .map(|(j, &f)| (qinv[(src, j)] as u64 % f) as i64)
                .collect()
        })
        .collect();
    let last: Vec<i64> = factors
        .iter()
        .enumerate()
        .map(|(j, &f)| {
            let s: i64 = images.iter().map(|r| r[j]).sum();
            (-s).rem_euclid(f as i64)
        })
        .collect();
    images.push(last);
    Ok(CoverSpec {
        p: ctx.p(),
        k: ctx.k(),
        n,
        factors,
        images,
    })
}

/// The cover with kernel `C`, read off its canonical triple.
pub fn cover_from_kernel(c: &Subgroup) -> Result<CoverSpec> {
    phi_from_triple(&c.canonical_triple(), c.m() + 1)
}

/// First `β` in lexicographic order with `β(k2) = k1`.
pub fn equivalent_kernels(k1: &Subgroup, k2: &Subgroup) -> Result<Option<MappingClassPerm>> {
    if k1.ctx() != k2.ctx() || k1.m() != k2.m() {
        return Err(Error::ParameterMismatch(
            "kernels live in different groups".into(),
        ));
    }
    if k1.order_exponent() != k2.order_exponent() {
        return Ok(None);
    }
    for beta in MappingClassPerm::all(k1.m()) {
        if act(&beta, k2)? == *k1 {
            return Ok(Some(beta));
        }
    }
    Ok(None)
}

/// Whether two covers are equivalent, with the first witness `β`.
pub fn equivalent(s1: &CoverSpec, s2: &CoverSpec) -> Result<Option<MappingClassPerm>> {
    if (s1.p, s1.k, s1.n) != (s2.p, s2.k, s2.n) {
        return Err(Error::ParameterMismatch(format!(
            "(p,k,n) = ({},{},{}) vs ({},{},{})",
            s1.p, s1.k, s1.n, s2.p, s2.k, s2.n
        )));
    }
    equivalent_kernels(&s1.kernel()?, &s2.kernel()?)
}

/// A cover with an arbitrary finite abelian deck group
/// `Z_{factors[0]} × ... × Z_{factors[t-1]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralCoverSpec {
    pub n: usize,
    pub factors: Vec<u64>,
    pub images: Vec<Vec<i64>>,
}

fn prime_factors(mut x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= x {
        if x.is_multiple_of(d) {
            out.push(d);
            while x.is_multiple_of(d) {
                x /= d;
            }
        }
        d += 1;
    }
    if x > 1 {
        out.push(x);
    }
    out
}

fn valuation_u64(p: u64, mut x: u64) -> u32 {
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

impl GeneralCoverSpec {
    fn structural_issues(&self) -> Option<CoverIssue> {
        let bad = |s: String| Some(CoverIssue::Malformed(s));
        if self.n < 2 || self.images.len() != self.n {
            return bad(format!(
                "need n >= 2 and n image rows (n = {}, rows = {})",
                self.n,
                self.images.len()
            ));
        }
        if self.factors.contains(&0) {
            return bad("factor orders must be positive".into());
        }
        for (i, row) in self.images.iter().enumerate() {
            if row.len() != self.factors.len() {
                return bad(format!("image of x_{} has the wrong length", i + 1));
            }
            for (&x, &f) in row.iter().zip(&self.factors) {
                if x < 0 || x as u64 >= f {
                    return bad(format!("entry {x} not reduced mod {f}"));
                }
            }
        }
        None
    }

    /// `|A|`.
    pub fn deck_order(&self) -> u128 {
        self.factors.iter().map(|&f| f as u128).product()
    }

    /// Splits into one p-primary cover per prime dividing `|A|`.
    pub fn crt_split(&self) -> Result<Vec<CoverSpec>> {
        if let Some(issue) = self.structural_issues() {
            return Err(Error::InvalidCover(vec![issue]));
        }
        let sum_zero = (0..self.factors.len()).all(|j| {
            let s: i128 = self.images.iter().map(|r| r[j] as i128).sum();
            s % self.factors[j] as i128 == 0
        });
        if !sum_zero {
            return Err(Error::InvalidCover(vec![CoverIssue::NotSumZero]));
        }
        let mut primes: Vec<u64> = self
            .factors
            .iter()
            .flat_map(|&f| prime_factors(f))
            .collect();
        primes.sort_unstable();
        primes.dedup();
        if primes.is_empty() {
            return Err(Error::TrivialGroup);
        }
        let mut out = Vec::with_capacity(primes.len());
        for p in primes {
            let mut cols: Vec<(u64, usize)> = self
                .factors
                .iter()
                .enumerate()
                .filter_map(|(j, &f)| {
                    let v = valuation_u64(p, f);
                    (v > 0).then(|| (p.pow(v), j))
                })
                .collect();
            cols.sort();
            let k = cols
                .iter()
                .map(|&(q, _)| valuation_u64(p, q))
                .max()
                .unwrap_or(0);
            let spec = CoverSpec {
                p: p as u32,
                k,
                n: self.n,
                factors: cols.iter().map(|&(q, _)| q).collect(),
                images: self
                    .images
                    .iter()
                    .map(|row| cols.iter().map(|&(q, j)| row[j] % q as i64).collect())
                    .collect(),
            };
            spec.validate(Branching::Lax)?;
            out.push(spec);
        }
        Ok(out)
    }

    /// Liftable exactly when every p-primary component is.
    pub fn fully_liftable(&self) -> Result<bool> {
        for spec in self.crt_split()? {
            if !fully_liftable(&spec.kernel()?)?.liftable {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The 1-based branch points whose image is zero.
pub fn unbranched_points(spec: &CoverSpec) -> Vec<usize> {
    spec.images
        .iter()
        .enumerate()
        .filter(|(_, r)| r.iter().all(|&x| x == 0))
        .map(|(i, _)| i + 1)
        .collect()
}

/// Relabels branch points: the result sends `x_i` to the old `φ(x_{β^{-1}(i)})`.
pub fn relabel(spec: &CoverSpec, beta: &Perm) -> CoverSpec {
    let inv = beta.inverse();
    CoverSpec {
        images: (0..spec.n)
            .map(|i| spec.images[inv.apply(i)].clone())
            .collect(),
        ..spec.clone()
    }
}
