//! Exhaustive classification of fully liftable covers for small `(p, k, n)`
//! and comparison with the closed-form list of liftable covers.

use std::collections::{HashSet, VecDeque};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::action::{act, fully_liftable, generators, MappingClassPerm};
use crate::covers::{cover_from_kernel, equivalent_kernels, Branching, CoverSpec};
use crate::error::{Error, Result};
use crate::modcore::{IntMatrix, ModulusContext, Perm};
use crate::subgroups::{CanonicalTriple, Subgroup};

/// Default cap on `p^{k(n-1)}`.
pub const DEFAULT_BOUND: u64 = 1 << 20;

/// Default cap on the number of `ω = id` triples walked by one census.
pub const DEFAULT_MAX_TRIPLES: u128 = 5_000_000;

/// Grid checked by `verify --grid default`.
pub const DEFAULT_GRID: [(u32, u32, usize); 9] = [
    (2, 1, 3),
    (2, 1, 4),
    (2, 1, 5),
    (3, 1, 3),
    (3, 1, 4),
    (2, 2, 4),
    (2, 2, 5),
    (2, 2, 6),
    (3, 2, 3),
];

/// `p ∈ {2,3,5}`, `k ∈ {1,2}`, `3 <= n <= 6`, restricted to `p^{k(n-1)} <= bound`.
pub fn extended_grid(bound: u64) -> Vec<(u32, u32, usize)> {
    let mut out = Vec::new();
    for p in [2u32, 3, 5] {
        for k in [1u32, 2] {
            for n in 3..=6usize {
                let size = (p as u128).pow(k * (n as u32 - 1));
                if size <= bound as u128 {
                    out.push((p, k, n));
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub struct CensusOptions {
    pub bound: u64,
    pub max_triples: u128,
    pub branching: Branching,
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self {
            bound: DEFAULT_BOUND,
            max_triples: DEFAULT_MAX_TRIPLES,
            branching: Branching::Strict,
        }
    }
}

fn bound_error(p: u32, k: u32, b: usize, reason: String) -> Error {
    Error::BoundExceeded {
        p,
        k,
        n: b + 1,
        reason,
    }
}

fn check_bound(p: u32, k: u32, b: usize, opts: &CensusOptions) -> Result<ModulusContext> {
    let ctx = ModulusContext::new(p as u64, k)?;
    let size = (p as u128).checked_pow(k * b as u32).unwrap_or(u128::MAX);
    if size > opts.bound as u128 {
        return Err(bound_error(
            p,
            k,
            b,
            format!("p^(k(n-1)) = {size} > {}", opts.bound),
        ));
    }
    let triples = count_triples(p, k, b);
    if triples > opts.max_triples {
        return Err(bound_error(
            p,
            k,
            b,
            format!("{triples} normal forms > {}", opts.max_triples),
        ));
    }
    Ok(ctx)
}

/// Weakly increasing sequences of length `len` with entries in `[0, k)`.
fn increasing_sequences(len: usize, k: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|s: Vec<u32>| {
                let lo = s.last().copied().unwrap_or(0);
                (lo..k).map(move |x| {
                    let mut t = s.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

fn full_r(ell_r: &[u32], b: usize, k: u32) -> Vec<u32> {
    let mut r = ell_r.to_vec();
    r.resize(b, k);
    r
}

/// Number of `ω = id` triples for `(Z/p^k)^b`.
pub fn count_triples(p: u32, k: u32, b: usize) -> u128 {
    let mut total: u128 = 0;
    for ell in 0..=b {
        for rs in increasing_sequences(ell, k) {
            let r = full_r(&rs, b, k);
            let mut prod: u128 = 1;
            for i in 0..b {
                for j in (i + 1)..b {
                    prod = prod.saturating_mul((p as u128).pow(r[j] - r[i]));
                }
            }
            total = total.saturating_add(prod);
        }
    }
    total
}

/// Every triple `(ℓ, r, Q)` with `ω = id` satisfying the shape constraints.
pub fn enumerate_triples(p: u32, k: u32, b: usize, bound: u64) -> Result<Vec<CanonicalTriple>> {
    let opts = CensusOptions {
        bound,
        max_triples: u128::MAX,
        ..CensusOptions::default()
    };
    let ctx = check_bound(p, k, b, &opts)?;
    let mut out = Vec::new();
    for ell in 0..=b {
        for rs in increasing_sequences(ell, k) {
            let r = full_r(&rs, b, k);
            let slots: Vec<(usize, usize, i64)> = (0..b)
                .flat_map(|i| ((i + 1)..b).map(move |j| (i, j)))
                .map(|(i, j)| (i, j, (p as i64).pow(r[j] - r[i])))
                .collect();
            let mut q = IntMatrix::identity(b);
            loop {
                out.push(CanonicalTriple {
                    ctx,
                    m: b,
                    ell,
                    r: r.clone(),
                    q: q.clone(),
                    omega: Perm::identity(b),
                });
                // odometer over the free entries of Q
                let mut advanced = false;
                for &(i, j, bound) in &slots {
                    if q[(i, j)] + 1 < bound {
                        q[(i, j)] += 1;
                        advanced = true;
                        break;
                    }
                    q[(i, j)] = 0;
                }
                if !advanced {
                    break;
                }
            }
        }
    }
    Ok(out)
}

/// All subgroups of `(Z/p^k)^b`, sorted by Howell basis.
pub fn enumerate_subgroups(
    p: u32,
    k: u32,
    b: usize,
    opts: &CensusOptions,
) -> Result<Vec<Subgroup>> {
    check_bound(p, k, b, opts)?;
    let triples = enumerate_triples(p, k, b, opts.bound)?;
    let perms: Vec<Perm> = Perm::all(b).collect();
    let set = triples
        .par_iter()
        .fold(HashSet::new, |mut acc, t| {
            let rows = t.generator_rows().expect("well-formed triple");
            for w in &perms {
                acc.insert(Subgroup::span(&rows.permute_columns(w)).expect("rank checked"));
            }
            acc
        })
        .reduce(HashSet::new, |mut a, b| {
            if a.len() < b.len() {
                return b.into_iter().chain(a).collect();
            }
            a.extend(b);
            a
        });
    let mut out: Vec<Subgroup> = set.into_iter().collect();
    out.par_sort();
    Ok(out)
}

fn ones_vector(ctx: ModulusContext, b: usize) -> Vec<u32> {
    vec![1 % ctx.modulus(); b]
}

/// Kernels whose quotient has exponent exactly `p^k` and, in strict mode,
/// no branch class in the kernel.
pub fn is_admissible(c: &Subgroup, branching: Branching) -> bool {
    let b = c.m();
    if c.canonical_triple().ell >= b {
        return false;
    }
    if branching == Branching::Strict {
        let ctx = c.ctx();
        let mut e = vec![0u32; b];
        for i in 0..b {
            e[i] = 1;
            if c.contains_residues(&e) {
                return false;
            }
            e[i] = 0;
        }
        if c.contains_residues(&ones_vector(ctx, b)) {
            return false;
        }
    }
    true
}

/// A cover listed by the closed-form classification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PredictedClass {
    pub case: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    pub cover: CoverSpec,
}

/// The liftable covers for `(p, k, n)`, `n >= 3`:
/// (1) `A = Z_{p^k}^{n-1}`, `φ(x_i) = e_i`;
/// (2) for each `0 < r < k` with `p^{k-r} | n`, `A = Z_{p^r}^{n-2} × Z_{p^k}`,
///     `φ(x_i) = (e_i, 1)` for `i <= n-2` and `φ(x_{n-1}) = (0, 1)`;
/// (3) if `p^k | n`, `A = Z_{p^k}` with every `φ(x_i) = 1`.
pub fn theorem_predict(p: u32, k: u32, n: usize) -> Result<Vec<PredictedClass>> {
    let ctx = ModulusContext::new(p as u64, k)?;
    if n < 3 {
        return Err(Error::ParameterMismatch(format!(
            "the closed form needs n >= 3, got {n}"
        )));
    }
    let pk = ctx.modulus() as u64;
    let b = n - 1;
    let mut out = Vec::new();

    let mut images: Vec<Vec<i64>> = (0..b)
        .map(|i| (0..b).map(|j| i64::from(i == j)).collect())
        .collect();
    images.push(vec![pk as i64 - 1; b]);
    out.push(PredictedClass {
        case: 1,
        r: None,
        cover: CoverSpec {
            p,
            k,
            n,
            factors: vec![pk; b],
            images,
        },
    });

    for r in 1..k {
        let step = (p as u64).pow(k - r);
        if !(n as u64).is_multiple_of(step) {
            continue;
        }
        let pr = (p as u64).pow(r);
        let mut factors = vec![pr; n - 2];
        factors.push(pk);
        let mut images: Vec<Vec<i64>> = (0..n - 2)
            .map(|i| {
                let mut row: Vec<i64> = (0..n - 2).map(|j| i64::from(i == j)).collect();
                row.push(1);
                row
            })
            .collect();
        let mut second_last = vec![0i64; n - 2];
        second_last.push(1);
        images.push(second_last);
        let mut last = vec![pr as i64 - 1; n - 2];
        last.push((-(n as i64 - 1)).rem_euclid(pk as i64));
        images.push(last);
        out.push(PredictedClass {
            case: 2,
            r: Some(r),
            cover: CoverSpec {
                p,
                k,
                n,
                factors,
                images,
            },
        });
    }

    if (n as u64).is_multiple_of(pk) {
        out.push(PredictedClass {
            case: 3,
            r: None,
            cover: CoverSpec {
                p,
                k,
                n,
                factors: vec![pk],
                images: vec![vec![1]; n],
            },
        });
    }
    Ok(out)
}

/// One equivalence class of admissible kernels.
#[derive(Clone, Debug, Serialize)]
pub struct ClassRecord {
    pub representative: Subgroup,
    pub cover: CoverSpec,
    pub triple: CanonicalTriple,
    pub liftable: bool,
    pub witness: Option<MappingClassPerm>,
    pub class_size: u64,
    pub theorem_case: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem_r: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusParams {
    pub p: u32,
    pub k: u32,
    pub n: usize,
    pub strict: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusCounts {
    pub triples: u128,
    pub subgroups: usize,
    pub admissible_kernels: usize,
    pub classes: usize,
    pub liftable_classes: usize,
}

/// Result of [`classify`].
///
/// `elapsed_ms` is only filled in on request so that atlas files are
/// reproducible byte for byte.
#[derive(Clone, Debug, Serialize)]
pub struct CensusReport {
    pub params: CensusParams,
    pub classes: Vec<ClassRecord>,
    pub predicted: Vec<PredictedClass>,
    #[serde(rename = "match")]
    pub matches: bool,
    pub mismatches: Vec<String>,
    pub counts: CensusCounts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl CensusReport {
    pub fn liftable_classes(&self) -> impl Iterator<Item = &ClassRecord> {
        self.classes.iter().filter(|c| c.liftable)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn atlas_file_name(&self) -> String {
        atlas_file_name(self.params.p, self.params.k, self.params.n)
    }
}

pub fn atlas_file_name(p: u32, k: u32, n: usize) -> String {
    format!("census_p{p}_k{k}_n{n}.json")
}

/// Writes the report as `census_p{p}_k{k}_n{n}.json` under `dir`.
pub fn write_atlas(report: &CensusReport, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::Parse(format!("{}: {e}", dir.display())))?;
    let path = dir.join(report.atlas_file_name());
    fs::write(&path, report.to_json())
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// Orbits of `kernels` (sorted, closed under the action) as `(min, size)`.
fn orbits(kernels: &[Subgroup]) -> Result<Vec<(Subgroup, u64)>> {
    let Some(first) = kernels.first() else {
        return Ok(Vec::new());
    };
    let gens = generators(first.m());
    let mut seen: HashSet<Subgroup> = HashSet::with_capacity(kernels.len());
    let mut out = Vec::new();
    for c in kernels {
        if seen.contains(c) {
            continue;
        }
        seen.insert(c.clone());
        let mut queue = VecDeque::from([c.clone()]);
        let mut size = 1u64;
        while let Some(x) = queue.pop_front() {
            for g in &gens {
                let y = act(g, &x)?;
                if !seen.contains(&y) {
                    seen.insert(y.clone());
                    queue.push_back(y);
                    size += 1;
                }
            }
        }
        out.push((c.clone(), size));
    }
    Ok(out)
}

/// Classifies all admissible covers for `(p, k, n)` up to equivalence.
pub fn classify(p: u32, k: u32, n: usize, opts: &CensusOptions) -> Result<CensusReport> {
    if n < 3 {
        return Err(Error::ParameterMismatch(format!(
            "classify needs n >= 3 (got {n}); use classify_n2 for two branch points"
        )));
    }
    let b = n - 1;
    check_bound(p, k, b, opts)?;
    let subgroups = enumerate_subgroups(p, k, b, opts)?;
    let admissible: Vec<Subgroup> = subgroups
        .par_iter()
        .filter(|c| is_admissible(c, opts.branching))
        .cloned()
        .collect();
    let orbit_list = orbits(&admissible)?;
    let mut classes = orbit_list
        .into_par_iter()
        .map(|(rep, size)| {
            let verdict = fully_liftable(&rep)?;
            Ok(ClassRecord {
                cover: cover_from_kernel(&rep)?,
                triple: rep.canonical_triple(),
                liftable: verdict.liftable,
                witness: verdict.witness,
                class_size: size,
                theorem_case: None,
                theorem_r: None,
                representative: rep,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let predicted = theorem_predict(p, k, n)?;
    let predicted_kernels = predicted
        .iter()
        .map(|pc| pc.cover.kernel())
        .collect::<Result<Vec<_>>>()?;
    let mut mismatches = Vec::new();
    let mut hits = vec![0usize; predicted.len()];
    for class in classes.iter_mut().filter(|c| c.liftable) {
        let mut matched = Vec::new();
        for (j, pk) in predicted_kernels.iter().enumerate() {
            if equivalent_kernels(&class.representative, pk)?.is_some() {
                matched.push(j);
            }
        }
        match matched.as_slice() {
            [j] => {
                hits[*j] += 1;
                class.theorem_case = Some(predicted[*j].case);
                class.theorem_r = predicted[*j].r;
            }
            [] => mismatches.push(format!(
                "liftable class not in the closed form: kernel {} cover {:?}",
                class.representative, class.cover
            )),
            _ => mismatches.push(format!(
                "liftable class {} matches several predicted covers {matched:?}",
                class.representative
            )),
        }
    }
    for (j, &h) in hits.iter().enumerate() {
        if h != 1 {
            let verdict = fully_liftable(&predicted_kernels[j])?;
            let witness = verdict
                .witness
                .map_or_else(|| "none".to_string(), |w| w.to_string());
            mismatches.push(format!(
                "predicted case {}{} matched {h} census classes: kernel {} liftable={} witness={witness}",
                predicted[j].case,
                predicted[j].r.map_or(String::new(), |r| format!(" (r={r})")),
                predicted_kernels[j],
                verdict.liftable
            ));
        }
    }
    let liftable_classes = classes.iter().filter(|c| c.liftable).count();
    let counts = CensusCounts {
        triples: count_triples(p, k, b),
        subgroups: subgroups.len(),
        admissible_kernels: admissible.len(),
        classes: classes.len(),
        liftable_classes,
    };
    classes.sort_by(|a, b| a.representative.cmp(&b.representative));
    Ok(CensusReport {
        params: CensusParams {
            p,
            k,
            n,
            strict: opts.branching == Branching::Strict,
        },
        classes,
        predicted,
        matches: mismatches.is_empty(),
        mismatches,
        counts,
        elapsed_ms: None,
    })
}

/// [`classify`] with wall-clock time recorded.
pub fn classify_timed(p: u32, k: u32, n: usize, opts: &CensusOptions) -> Result<CensusReport> {
    let start = Instant::now();
    let mut report = classify(p, k, n, opts)?;
    report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct GridPoint {
    pub p: u32,
    pub k: u32,
    pub n: usize,
    pub liftable_classes: usize,
    pub predicted_classes: usize,
    #[serde(rename = "match")]
    pub matches: bool,
    pub mismatches: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifySummary {
    pub points: Vec<GridPoint>,
    pub all_match: bool,
}

/// Runs [`classify`] on every grid point.
pub fn verify_theorem(grid: &[(u32, u32, usize)], opts: &CensusOptions) -> Result<VerifySummary> {
    let reports = grid
        .iter()
        .map(|&(p, k, n)| classify(p, k, n, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(&reports))
}

/// Collects the per-point verdicts of several census runs.
pub fn summarize(reports: &[CensusReport]) -> VerifySummary {
    let points: Vec<GridPoint> = reports
        .iter()
        .map(|r| GridPoint {
            p: r.params.p,
            k: r.params.k,
            n: r.params.n,
            liftable_classes: r.counts.liftable_classes,
            predicted_classes: r.predicted.len(),
            matches: r.matches,
            mismatches: r.mismatches.clone(),
        })
        .collect();
    let all_match = points.iter().all(|p| p.matches);
    VerifySummary { points, all_match }
}

/// A failed structural check on a liftable kernel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub check: &'static str,
    pub detail: String,
}

/// Structural facts every liftable `⟨PQ⟩` kernel with `r_b = k` satisfies:
/// `r_1 = ... = r_{b-1}`, `Q_{i,j} = 0` for `i < j < b`, and when `k > r_1`,
/// `Q_{v,b} ≡ -1 (mod p^{r_b - r_1})` for `v < b` and `p^{r_b - r_1} | n`.
///
/// Reads the triple's fields as given, without checking the shape constraints.
pub fn audit_triple(t: &CanonicalTriple, n: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    let b = t.m;
    if b == 0 {
        return out;
    }
    let r = &t.r;
    let k = t.ctx.k();
    for i in 1..b.saturating_sub(1) {
        if r[i] != r[0] {
            out.push(Violation {
                check: "equal_r",
                detail: format!("r_{} = {} but r_1 = {}", i + 1, r[i], r[0]),
            });
        }
    }
    for i in 0..b.saturating_sub(1) {
        for j in (i + 1)..b - 1 {
            if t.q[(i, j)] != 0 {
                out.push(Violation {
                    check: "q_zero_pattern",
                    detail: format!("Q_{{{},{}}} = {}", i + 1, j + 1, t.q[(i, j)]),
                });
            }
        }
    }
    if r[b - 1] >= r[0] && k > r[0] {
        let modulus = (t.ctx.p() as i64).pow(r[b - 1] - r[0]);
        for v in 0..b - 1 {
            if (t.q[(v, b - 1)] + 1).rem_euclid(modulus) != 0 {
                out.push(Violation {
                    check: "q_last_column",
                    detail: format!(
                        "Q_{{{},{}}} = {} is not -1 mod {modulus}",
                        v + 1,
                        b,
                        t.q[(v, b - 1)]
                    ),
                });
            }
        }
        if n as i64 % modulus != 0 {
            out.push(Violation {
                check: "divides_n",
                detail: format!("{modulus} does not divide n = {n}"),
            });
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditEntry {
    pub kernel: Subgroup,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub p: u32,
    pub k: u32,
    pub n: usize,
    pub kernels_checked: usize,
    pub violations: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Audits every fully liftable kernel with quotient exponent `p^k`,
/// zero images allowed.
pub fn structural_audit(p: u32, k: u32, n: usize, opts: &CensusOptions) -> Result<AuditReport> {
    if n < 3 {
        return Err(Error::ParameterMismatch(format!(
            "audit needs n >= 3, got {n}"
        )));
    }
    let subgroups = enumerate_subgroups(p, k, n - 1, opts)?;
    let liftable: Vec<Subgroup> = subgroups
        .into_par_iter()
        .filter(|c| is_admissible(c, Branching::Lax))
        .filter(|c| fully_liftable(c).map(|v| v.liftable).unwrap_or(false))
        .collect();
    let violations = liftable
        .iter()
        .filter_map(|c| {
            let v = audit_triple(&c.canonical_triple().normalized(), n);
            (!v.is_empty()).then(|| AuditEntry {
                kernel: c.clone(),
                violations: v,
            })
        })
        .collect();
    Ok(AuditReport {
        p,
        k,
        n,
        kernels_checked: liftable.len(),
        violations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct N2Entry {
    pub kernel: Subgroup,
    pub cover: CoverSpec,
    pub exponent_matches: bool,
    pub liftable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct N2Report {
    pub p: u32,
    pub k: u32,
    pub covers: Vec<N2Entry>,
    pub full_exponent_classes: usize,
}

/// Two branch points: kernels `⟨p^j⟩ ≤ Z/p^k` for `j >= 1`, each the kernel of
/// `φ(x_1) = 1`, `φ(x_2) = -1` into `Z_{p^j}`. `S_2` acts by negation.
pub fn classify_n2(p: u32, k: u32) -> Result<N2Report> {
    let ctx = ModulusContext::new(p as u64, k)?;
    let mut covers = Vec::new();
    for j in 1..=k {
        let order = (p as u64).pow(j);
        let kernel = Subgroup::from_generators(ctx, 1, &[vec![order as i64]])?;
        let cover = CoverSpec {
            p,
            k: j,
            n: 2,
            factors: vec![order],
            images: vec![vec![1], vec![order as i64 - 1]],
        };
        let liftable = fully_liftable(&kernel)?.liftable;
        covers.push(N2Entry {
            kernel,
            cover,
            exponent_matches: j == k,
            liftable,
        });
    }
    let full_exponent_classes = covers.iter().filter(|c| c.exponent_matches).count();
    Ok(N2Report {
        p,
        k,
        covers,
        full_exponent_classes,
    })
}
