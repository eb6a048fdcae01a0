//! The `liftcov` command line.
//!
//! Exit codes: 0 liftable / all match / no violations, 1 not liftable /
//! mismatch / violations, 2 invalid input, 3 enumeration bound exceeded.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::action::{fully_liftable, LiftVerdict};
use crate::census::{
    classify, classify_n2, classify_timed, extended_grid, structural_audit, summarize, write_atlas,
    CensusOptions, CensusReport, DEFAULT_BOUND, DEFAULT_GRID,
};
use crate::covers::{Branching, CoverSpec};
use crate::error::{Error, Result};
use crate::modcore::ModulusContext;
use crate::subgroups::{CanonicalTriple, Subgroup};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BOUND: i32 = 3;

/// Environment variable naming the default directory for atlas files.
pub const OUT_DIR_ENV: &str = "LIFTCOV_OUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "liftcov",
    version,
    about = "Lifting criteria and exhaustive classification for abelian p-group covers of the sphere"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format on stdout.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Worker threads for enumeration (defaults to all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether every homeomorphism preserving the branch set lifts.
    Check(CheckArgs),
    /// Print the canonical triple of a subgroup of (Z/p^k)^m.
    Canonical(CanonicalArgs),
    /// Classify all covers for one (p, k, n) and write an atlas file.
    Classify(ClassifyArgs),
    /// Compare the census with the closed-form list over a grid.
    Verify(VerifyArgs),
    /// Check the structural facts on every liftable kernel.
    Audit(AuditArgs),
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Cover spec as JSON; `-` reads stdin.
    #[arg(long, conflicts_with_all = ["p", "k", "n", "factors", "images"])]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Orders of the cyclic factors of A, e.g. `2,4`.
    #[arg(long)]
    pub factors: Option<String>,
    /// Images of x_1..x_n, rows separated by `;`, e.g. `1,1;0,1;0,1;1,1`.
    #[arg(long)]
    pub images: Option<String>,
    /// Accept branch points with zero image.
    #[arg(long)]
    pub lax: bool,
}

#[derive(Args, Debug)]
pub struct CanonicalArgs {
    /// Subgroup as JSON `{p, k, m, basis}`; `-` reads stdin.
    #[arg(long, conflicts_with_all = ["p", "k", "m", "gens"])]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub k: Option<u32>,
    /// Ambient rank; inferred from the generators when omitted.
    #[arg(long)]
    pub m: Option<usize>,
    /// Generator rows separated by `;`, e.g. `2,1;0,2`. Empty means trivial.
    #[arg(long, allow_hyphen_values = true)]
    pub gens: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct EnumerationArgs {
    /// Largest p^(k(n-1)) that will be enumerated.
    #[arg(long, default_value_t = DEFAULT_BOUND)]
    pub bound: u64,
    /// Allow kernels that contain a branch class.
    #[arg(long)]
    pub lax: bool,
}

impl EnumerationArgs {
    fn options(&self) -> CensusOptions {
        CensusOptions {
            bound: self.bound,
            branching: if self.lax {
                Branching::Lax
            } else {
                Branching::Strict
            },
            ..CensusOptions::default()
        }
    }
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub enumeration: EnumerationArgs,
    /// Directory for the atlas file.
    #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
    pub output: PathBuf,
    /// Record wall-clock time in the atlas (makes reruns differ).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// `default`, `extended`, or points `P:K:N` separated by `;` or spaces,
    /// where each part is a number, a list `2,3` or a range `3-5`.
    #[arg(long, default_value = "default")]
    pub grid: String,
    #[command(flatten)]
    pub enumeration: EnumerationArgs,
    /// Also write one atlas file per grid point here.
    #[arg(long, env = OUT_DIR_ENV)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    #[arg(long, requires_all = ["k", "n"], conflicts_with = "grid")]
    pub p: Option<u32>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Grid in the same syntax as `verify --grid`; used when no point is given.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, default_value_t = DEFAULT_BOUND)]
    pub bound: u64,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    execute(&cli, out, err)
}

/// Runs an already parsed command line.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if let Some(jobs) = cli.jobs {
        // The global pool can only be set once per process; later calls keep it.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global();
    }
    let result = match &cli.command {
        Command::Check(a) => cmd_check(a, cli.format, out),
        Command::Canonical(a) => cmd_canonical(a, cli.format, out),
        Command::Classify(a) => cmd_classify(a, cli.format, out),
        Command::Verify(a) => cmd_verify(a, cli.format, out),
        Command::Audit(a) => cmd_audit(a, cli.format, out),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error[Io]: {e}");
            EXIT_INVALID
        }
        Err(CliError::Lib(e)) => {
            report_error(&e, cli.format, err);
            exit_code(&e)
        }
    }
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BoundExceeded { .. } => EXIT_BOUND,
        _ => EXIT_INVALID,
    }
}

fn report_error(e: &Error, format: Format, err: &mut dyn Write) {
    let issues: Vec<&str> = match e {
        Error::InvalidCover(list) => list.iter().map(|i| i.code()).collect(),
        _ => Vec::new(),
    };
    let _ = match format {
        Format::Json => writeln!(
            err,
            "{}",
            json!({"error": {"code": e.code(), "issues": issues, "message": e.to_string()}})
        ),
        Format::Text if issues.is_empty() => writeln!(err, "error[{}]: {e}", e.code()),
        Format::Text => writeln!(err, "error[{}: {}]: {e}", e.code(), issues.join(",")),
    };
}

enum CliError {
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult = std::result::Result<i32, CliError>;

fn read_input(path: &Path) -> Result<String> {
    let mut text = String::new();
    let res = if path == Path::new("-") {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(text)
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Parse(format!("bad {what} entry {t:?}")))
        })
        .collect()
}

/// Rows separated by `;`, entries by `,`.
pub fn parse_rows(s: &str) -> Result<Vec<Vec<i64>>> {
    s.split(';')
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .map(|r| parse_list(r, "matrix"))
        .collect()
}

fn parse_part(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::Parse(format!("bad grid component {s:?}"));
    let mut out = Vec::new();
    for piece in s.split(',') {
        match piece.split_once('-') {
            Some((a, b)) => {
                let a: u64 = a.trim().parse().map_err(|_| bad())?;
                let b: u64 = b.trim().parse().map_err(|_| bad())?;
                out.extend(a..=b);
            }
            None => out.push(piece.trim().parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

/// `default`, `extended`, or `P:K:N` points (each part a number, list or range).
pub fn parse_grid(s: &str, bound: u64) -> Result<Vec<(u32, u32, usize)>> {
    match s.trim() {
        "default" => return Ok(DEFAULT_GRID.to_vec()),
        "extended" => return Ok(extended_grid(bound)),
        _ => {}
    }
    let mut out = Vec::new();
    for point in s
        .split(|c: char| c == ';' || c.is_whitespace())
        .filter(|t| !t.is_empty())
    {
        let parts: Vec<&str> = point.split(':').collect();
        let [p, k, n] = parts.as_slice() else {
            return Err(Error::Parse(format!("grid point {point:?} is not P:K:N")));
        };
        for p in parse_part(p)? {
            for k in parse_part(k)? {
                for n in parse_part(n)? {
                    out.push((p as u32, k as u32, n as usize));
                }
            }
        }
    }
    Ok(out)
}

/// `Z_2 x Z_4`, or `Z_4^3` for repeated factors.
pub fn deck_group_name(factors: &[u64]) -> String {
    if factors.is_empty() {
        return "trivial".to_string();
    }
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < factors.len() {
        let run = factors[i..]
            .iter()
            .take_while(|&&f| f == factors[i])
            .count();
        parts.push(if run == 1 {
            format!("Z_{}", factors[i])
        } else {
            format!("Z_{}^{run}", factors[i])
        });
        i += run;
    }
    parts.join(" x ")
}

fn load_cover(a: &CheckArgs) -> Result<CoverSpec> {
    if let Some(path) = &a.input {
        let text = read_input(path)?;
        return serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()));
    }
    let missing = |f: &str| Error::Parse(format!("--{f} is required without --input"));
    Ok(CoverSpec {
        p: a.p.ok_or_else(|| missing("p"))?,
        k: a.k.ok_or_else(|| missing("k"))?,
        n: a.n.ok_or_else(|| missing("n"))?,
        factors: parse_list(
            a.factors.as_deref().ok_or_else(|| missing("factors"))?,
            "factor",
        )?,
        images: parse_rows(a.images.as_deref().ok_or_else(|| missing("images"))?)?,
    })
}

#[derive(Serialize)]
struct CheckReport<'a> {
    spec: &'a CoverSpec,
    deck_group: String,
    kernel: Subgroup,
    kernel_order: u128,
    #[serde(flatten)]
    verdict: LiftVerdict,
}

fn cmd_check(a: &CheckArgs, format: Format, out: &mut dyn Write) -> CliResult {
    let spec = load_cover(a)?;
    spec.validate(if a.lax {
        Branching::Lax
    } else {
        Branching::Strict
    })?;
    let kernel = spec.kernel()?;
    let verdict = fully_liftable(&kernel)?;
    let report = CheckReport {
        spec: &spec,
        deck_group: deck_group_name(&spec.factors),
        kernel_order: kernel.order(),
        kernel,
        verdict,
    };
    match format {
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&report).expect("serializable")
        )?,
        Format::Text => {
            match &report.verdict.witness {
                None => writeln!(out, "liftable")?,
                Some(w) => writeln!(out, "not liftable: witness {w}")?,
            }
            writeln!(out, "deck group {}", report.deck_group)?;
            writeln!(out, "kernel order {}", report.kernel_order)?;
            writeln!(out, "kernel basis {}", report.kernel)?;
        }
    }
    Ok(if report.verdict.liftable {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

fn load_subgroup(a: &CanonicalArgs) -> Result<Subgroup> {
    if let Some(path) = &a.input {
        let text = read_input(path)?;
        return serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()));
    }
    let missing = |f: &str| Error::Parse(format!("--{f} is required without --input"));
    let ctx = ModulusContext::new(
        a.p.ok_or_else(|| missing("p"))? as u64,
        a.k.ok_or_else(|| missing("k"))?,
    )?;
    let rows = parse_rows(a.gens.as_deref().unwrap_or(""))?;
    let m = match (a.m, rows.first()) {
        (Some(m), _) => m,
        (None, Some(r)) => r.len(),
        (None, None) => return Err(missing("m")),
    };
    Subgroup::from_generators(ctx, m, &rows)
}

#[derive(Serialize)]
struct CanonicalReport<'a> {
    subgroup: &'a Subgroup,
    triple: &'a CanonicalTriple,
    order: u128,
}

fn cmd_canonical(a: &CanonicalArgs, format: Format, out: &mut dyn Write) -> CliResult {
    let c = load_subgroup(a)?;
    let t = c.canonical_triple();
    t.validate()?;
    if t.rebuild()? != c {
        return Err(
            Error::InvalidTriple("canonical triple does not rebuild the subgroup".into()).into(),
        );
    }
    match format {
        Format::Json => {
            let doc = CanonicalReport {
                subgroup: &c,
                triple: &t,
                order: c.order(),
            };
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&doc).expect("serializable")
            )?;
        }
        Format::Text => write_triple(&t, &c, out)?,
    }
    Ok(EXIT_OK)
}

fn write_triple(t: &CanonicalTriple, c: &Subgroup, out: &mut dyn Write) -> io::Result<()> {
    let ell_r: Vec<String> = t.r[..t.ell].iter().map(u32::to_string).collect();
    writeln!(out, "ell = {}", t.ell)?;
    writeln!(out, "r = ({})", ell_r.join(", "))?;
    writeln!(out, "Q = {}", t.q)?;
    writeln!(out, "omega = {}", t.omega)?;
    writeln!(out, "howell basis = {c}")?;
    writeln!(out, "order = {}", c.order())
}

fn write_census_text(r: &CensusReport, out: &mut dyn Write) -> io::Result<()> {
    let pr = &r.params;
    writeln!(
        out,
        "census p={} k={} n={} ({})",
        pr.p,
        pr.k,
        pr.n,
        if pr.strict { "strict" } else { "lax" }
    )?;
    let c = &r.counts;
    writeln!(
        out,
        "subgroups {}, admissible kernels {}, classes {}, liftable {}",
        c.subgroups, c.admissible_kernels, c.classes, c.liftable_classes
    )?;
    for class in r.liftable_classes() {
        let case = match (class.theorem_case, class.theorem_r) {
            (Some(case), Some(rr)) => format!("case {case} (r={rr})"),
            (Some(case), None) => format!("case {case}"),
            (None, _) => "unmatched".to_string(),
        };
        writeln!(
            out,
            "  liftable  {case:<14} A = {:<16} kernel {}",
            deck_group_name(&class.cover.factors),
            class.representative
        )?;
    }
    writeln!(
        out,
        "predicted {}, {}",
        r.predicted.len(),
        if r.matches { "match" } else { "MISMATCH" }
    )?;
    for m in &r.mismatches {
        writeln!(out, "  {m}")?;
    }
    Ok(())
}

fn cmd_classify(a: &ClassifyArgs, format: Format, out: &mut dyn Write) -> CliResult {
    let opts = a.enumeration.options();
    if a.n == 2 {
        let report = classify_n2(a.p, a.k)?;
        match format {
            Format::Json => writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&report).expect("serializable")
            )?,
            Format::Text => {
                writeln!(out, "census p={} k={} n=2", a.p, a.k)?;
                for c in &report.covers {
                    writeln!(
                        out,
                        "  A = {:<8} {}{}",
                        deck_group_name(&c.cover.factors),
                        if c.liftable {
                            "liftable"
                        } else {
                            "not liftable"
                        },
                        if c.exponent_matches {
                            ""
                        } else {
                            " (smaller exponent)"
                        }
                    )?;
                }
            }
        }
        return Ok(EXIT_OK);
    }
    let report = if a.timing {
        classify_timed(a.p, a.k, a.n, &opts)?
    } else {
        classify(a.p, a.k, a.n, &opts)?
    };
    let path = write_atlas(&report, &a.output)?;
    match format {
        Format::Json => write!(out, "{}", report.to_json())?,
        Format::Text => {
            write_census_text(&report, out)?;
            writeln!(out, "wrote {}", path.display())?;
        }
    }
    Ok(if report.matches {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

fn cmd_verify(a: &VerifyArgs, format: Format, out: &mut dyn Write) -> CliResult {
    let opts = a.enumeration.options();
    let grid = parse_grid(&a.grid, opts.bound)?;
    let mut reports = Vec::with_capacity(grid.len());
    for &(p, k, n) in &grid {
        let report = classify(p, k, n, &opts)?;
        if let Some(dir) = &a.output {
            write_atlas(&report, dir)?;
        }
        reports.push(report);
    }
    let summary = summarize(&reports);
    match format {
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&summary).expect("serializable")
        )?,
        Format::Text => {
            for pt in &summary.points {
                writeln!(
                    out,
                    "p={} k={} n={}  liftable {}  predicted {}  {}",
                    pt.p,
                    pt.k,
                    pt.n,
                    pt.liftable_classes,
                    pt.predicted_classes,
                    if pt.matches { "match" } else { "MISMATCH" }
                )?;
                for m in &pt.mismatches {
                    writeln!(out, "    {m}")?;
                }
            }
            writeln!(
                out,
                "{}",
                if summary.all_match {
                    "all match"
                } else {
                    "mismatches found"
                }
            )?;
        }
    }
    Ok(if summary.all_match {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

fn cmd_audit(a: &AuditArgs, format: Format, out: &mut dyn Write) -> CliResult {
    let opts = CensusOptions {
        bound: a.bound,
        ..CensusOptions::default()
    };
    let grid = match (a.p, a.k, a.n, &a.grid) {
        (Some(p), Some(k), Some(n), _) => vec![(p, k, n)],
        (None, _, _, Some(g)) => parse_grid(g, a.bound)?,
        (None, _, _, None) => DEFAULT_GRID.to_vec(),
        _ => return Err(Error::Parse("--p, --k and --n go together".into()).into()),
    };
    let reports = grid
        .iter()
        .map(|&(p, k, n)| structural_audit(p, k, n, &opts))
        .collect::<Result<Vec<_>>>()?;
    let passed = reports.iter().all(|r| r.passed());
    match format {
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&reports).expect("serializable")
        )?,
        Format::Text => {
            for r in &reports {
                writeln!(
                    out,
                    "p={} k={} n={}  liftable kernels {}  violations {}",
                    r.p,
                    r.k,
                    r.n,
                    r.kernels_checked,
                    r.violations.len()
                )?;
                for v in &r.violations {
                    for x in &v.violations {
                        writeln!(out, "    {} {}: {}", v.kernel, x.check, x.detail)?;
                    }
                }
            }
            writeln!(
                out,
                "{}",
                if passed {
                    "no violations"
                } else {
                    "violations found"
                }
            )?;
        }
    }
    Ok(if passed { EXIT_OK } else { EXIT_NEGATIVE })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_syntax() {
        assert_eq!(parse_grid("default", DEFAULT_BOUND).unwrap().len(), 9);
        assert_eq!(
            parse_grid("2,3:1:3-5", DEFAULT_BOUND).unwrap(),
            vec![
                (2, 1, 3),
                (2, 1, 4),
                (2, 1, 5),
                (3, 1, 3),
                (3, 1, 4),
                (3, 1, 5)
            ]
        );
        assert_eq!(
            parse_grid("2:2:4; 2:2:6", DEFAULT_BOUND).unwrap(),
            vec![(2, 2, 4), (2, 2, 6)]
        );
        assert!(parse_grid("2:2", DEFAULT_BOUND).is_err());
        assert!(parse_grid("2:x:3", DEFAULT_BOUND).is_err());
    }

    #[test]
    fn deck_group_names() {
        assert_eq!(deck_group_name(&[2, 4]), "Z_2 x Z_4");
        assert_eq!(deck_group_name(&[4, 4, 4]), "Z_4^3");
        assert_eq!(deck_group_name(&[2, 2, 4]), "Z_2^2 x Z_4");
    }

    #[test]
    fn rows() {
        assert_eq!(
            parse_rows("1,1; 0,1").unwrap(),
            vec![vec![1, 1], vec![0, 1]]
        );
        assert!(parse_rows("").unwrap().is_empty());
        assert!(parse_rows("1,a").is_err());
    }
}
