//! Bounded scans over groups and branch-point counts.
//!
//! The unit of work is a (group, s) cell. Group tables are built once before
//! the fan-out; cells run on a dedicated thread pool and their rows are merged
//! and sorted afterwards, so the output does not depend on the worker count.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::classify::{classify, Assertion, ClassificationReport, Verdict};
use crate::group::{AbelianGroup, AutBounds, GroupError, GroupTables};
use crate::hodge::{dim_sym_square_invariants, HodgeError};
use crate::monodromy::{enumerate_data, MonodromyError};

/// Largest group order scanned when no bound is given.
pub const DEFAULT_MAX_ORDER: usize = 64;
/// Largest branch-point count scanned when no bound is given.
pub const DEFAULT_MAX_POINTS: usize = 12;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("UnknownFormat: {0:?} (expected json, csv or md)")]
    UnknownFormat(String),
    #[error("InvalidGroupSpec: {0}")]
    InvalidGroupSpec(String),
    #[error("InvalidBounds: {0}")]
    InvalidBounds(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Monodromy(#[from] MonodromyError),
    #[error(transparent)]
    Hodge(#[from] HodgeError),
    #[error("OracleFailure: {datum}: {detail}")]
    OracleFailure { datum: String, detail: String },
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Md,
}

impl FromStr for OutputFormat {
    type Err = ScanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "md" | "markdown" => Ok(OutputFormat::Md),
            _ => Err(ScanError::UnknownFormat(s.to_string())),
        }
    }
}

/// Which groups to scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    /// Groups given by their cyclic orders, e.g. `6,2x2x2`.
    Explicit(Vec<Vec<u32>>),
    /// Every abelian group of order ≤ N, once each, in invariant-factor form.
    AllUpTo(usize),
}

impl FromStr for GroupSpec {
    type Err = ScanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(n) = s.strip_prefix("all:") {
            let n: usize = n
                .trim()
                .parse()
                .map_err(|_| ScanError::InvalidGroupSpec(format!("bad order bound in {s:?}")))?;
            if n < 2 {
                return Err(ScanError::InvalidGroupSpec(format!("order bound must be ≥ 2, got {n}")));
            }
            return Ok(GroupSpec::AllUpTo(n));
        }
        let mut groups = Vec::new();
        for part in s.split([',', ';']).map(str::trim).filter(|p| !p.is_empty()) {
            let orders = part
                .split(['x', 'X', '*'])
                .map(|f| f.trim().parse::<u32>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| ScanError::InvalidGroupSpec(format!("cannot parse group {part:?}")))?;
            AbelianGroup::new(&orders)?;
            groups.push(orders);
        }
        if groups.is_empty() {
            return Err(ScanError::InvalidGroupSpec("no groups given".into()));
        }
        Ok(GroupSpec::Explicit(groups))
    }
}

/// Parses `LO..HI` (inclusive) or a single count.
pub fn parse_points(s: &str) -> Result<RangeInclusive<usize>, ScanError> {
    let bad = || ScanError::InvalidBounds(format!("cannot parse branch-point range {s:?}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
        }
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    Ok(lo..=hi)
}

/// Cyclic orders n₁ | n₂ | … of every abelian group of order ≤ `max_order`,
/// sorted by order and then lexicographically.
pub fn abelian_groups_up_to(max_order: usize) -> Vec<Vec<u32>> {
    fn extend(chain: &mut Vec<u32>, product: usize, max: usize, out: &mut Vec<Vec<u32>>) {
        // chain is built from the largest invariant factor downwards.
        if product > 1 {
            let mut g: Vec<u32> = chain.clone();
            g.reverse();
            out.push(g);
        }
        let last = chain.last().copied();
        let mut d = 2u32;
        while product * d as usize <= max {
            if last.is_none_or(|l| l % d == 0) {
                chain.push(d);
                extend(chain, product * d as usize, max, out);
                chain.pop();
            }
            d += 1;
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), 1, max_order, &mut out);
    out.sort_by(|a, b| {
        let oa: usize = a.iter().map(|&n| n as usize).product();
        let ob: usize = b.iter().map(|&n| n as usize).product();
        oa.cmp(&ob).then_with(|| a.cmp(b))
    });
    out
}

#[derive(Debug, Clone)]
pub struct ScanJob {
    pub groups: GroupSpec,
    pub points: RangeInclusive<usize>,
    pub genus_max: Option<u64>,
    pub assertions: BTreeSet<Assertion>,
    pub jobs: usize,
}

impl ScanJob {
    pub fn new(groups: GroupSpec, points: RangeInclusive<usize>) -> Self {
        ScanJob {
            groups,
            points,
            genus_max: None,
            assertions: BTreeSet::new(),
            jobs: 1,
        }
    }

    fn check(&self, bounds: &AutBounds) -> Result<(), ScanError> {
        if self.jobs == 0 {
            return Err(ScanError::InvalidBounds("worker count must be ≥ 1".into()));
        }
        let (lo, hi) = (*self.points.start(), *self.points.end());
        if lo < 4 || hi < lo {
            return Err(ScanError::InvalidBounds(format!(
                "branch-point range {lo}..{hi} must satisfy 4 ≤ LO ≤ HI"
            )));
        }
        if self.genus_max == Some(0) {
            return Err(ScanError::InvalidBounds("genus cap must be positive".into()));
        }
        let too_big = |order: usize| {
            ScanError::InvalidBounds(format!(
                "group order {order} exceeds the automorphism-enumeration limit {} \
                 (set SCANNER_MAX_GROUP_ORDER to raise it)",
                bounds.max_group_order
            ))
        };
        match &self.groups {
            GroupSpec::AllUpTo(n) if *n > bounds.max_group_order => return Err(too_big(*n)),
            GroupSpec::Explicit(gs) => {
                for g in gs {
                    let order: usize = g.iter().map(|&n| n as usize).product();
                    if order > bounds.max_group_order {
                        return Err(too_big(order));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// One canonical class of monodromy data and its classification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanRow {
    pub group: Vec<u32>,
    pub s: usize,
    pub theta: Vec<Vec<u32>>,
    pub genus: u64,
    #[serde(rename = "dim_Z")]
    pub dim_z: u64,
    #[serde(rename = "dim_SG")]
    pub dim_sg: u64,
    pub star: bool,
    pub factors: String,
    pub verdict: Verdict,
}

impl ScanRow {
    pub fn from_report(report: &ClassificationReport) -> Self {
        let datum = &report.datum;
        ScanRow {
            group: datum.group().cyclic_orders().to_vec(),
            s: datum.s(),
            theta: datum.theta().iter().map(|x| x.0.clone()).collect(),
            genus: datum.genus(),
            dim_z: report.dim_z,
            dim_sg: report.dim_sg,
            star: report.star_holds,
            factors: report.factors.summary(),
            verdict: report.verdict,
        }
    }

    fn order(&self) -> usize {
        self.group.iter().map(|&n| n as usize).product()
    }

    fn sort_key(&self) -> (usize, &[u32], usize, &[Vec<u32>]) {
        (self.order(), &self.group, self.s, &self.theta)
    }
}

/// A group left out of an `all:N` scan because its automorphism group is
/// too large to enumerate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedGroup {
    pub group: Vec<u32>,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub rows: usize,
    pub special: usize,
    pub not_special: usize,
    pub inconclusive: usize,
    pub skipped_groups: Vec<SkippedGroup>,
}

impl ScanSummary {
    pub fn from_rows(rows: &[ScanRow], skipped_groups: Vec<SkippedGroup>) -> Self {
        let count = |v| rows.iter().filter(|r| r.verdict == v).count();
        ScanSummary {
            rows: rows.len(),
            special: count(Verdict::Special),
            not_special: count(Verdict::NotSpecial),
            inconclusive: count(Verdict::Inconclusive),
            skipped_groups,
        }
    }

    fn line(&self) -> String {
        let mut s = format!(
            "rows={} SPECIAL={} NOT_SPECIAL={} INCONCLUSIVE={}",
            self.rows, self.special, self.not_special, self.inconclusive
        );
        if !self.skipped_groups.is_empty() {
            let names: Vec<String> = self.skipped_groups.iter().map(|g| group_name(&g.group)).collect();
            let _ = write!(s, " skipped_groups={}", names.join(";"));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanOutcome {
    pub rows: Vec<ScanRow>,
    pub summary: ScanSummary,
}

/// Smallest genus a datum on `s` branch points can have: all local orders 2.
fn genus_lower_bound(order: usize, s: usize) -> u64 {
    let twice = order * (s - 4); // 4(g − 1) ≥ |G|(s − 4)
    1 + (twice as u64).div_ceil(4)
}

fn scan_cell(
    tables: &GroupTables,
    s: usize,
    genus_max: Option<u64>,
    assertions: &BTreeSet<Assertion>,
) -> Result<Vec<ScanRow>, ScanError> {
    let mut rows = Vec::new();
    for datum in enumerate_data(tables, s)? {
        if genus_max.is_some_and(|g| datum.genus() > g) {
            continue;
        }
        let report = classify(&datum, assertions)?;
        check_row_oracles(&report)?;
        rows.push(ScanRow::from_report(&report));
    }
    Ok(rows)
}

/// Σm_χ = g and dim S(G) = dim (S²H⁰(K))^G, recomputed from the profile.
pub fn check_row_oracles(report: &ClassificationReport) -> Result<(), ScanError> {
    let fail = |detail: String| ScanError::OracleFailure {
        datum: report.datum.to_string(),
        detail,
    };
    let total = report.profile.total();
    if total != report.datum.genus() {
        return Err(fail(format!("Σm_χ = {total} but genus = {}", report.datum.genus())));
    }
    let sym = dim_sym_square_invariants(&report.profile);
    if sym != report.dim_sg {
        return Err(fail(format!("dim_SG = {} but dim_sym_square_invariants = {sym}", report.dim_sg)));
    }
    Ok(())
}

pub fn run_scan(job: &ScanJob, bounds: &AutBounds) -> Result<ScanOutcome, ScanError> {
    job.check(bounds)?;
    let (specs, skip_oversized) = match &job.groups {
        GroupSpec::Explicit(gs) => (gs.clone(), false),
        GroupSpec::AllUpTo(n) => (abelian_groups_up_to(*n), true),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(job.jobs)
        .build()
        .map_err(|e| ScanError::ThreadPool(e.to_string()))?;

    let built: Vec<Result<GroupTables, GroupError>> = pool.install(|| {
        specs
            .par_iter()
            .map(|orders| GroupTables::new(AbelianGroup::new(orders)?, bounds))
            .collect()
    });
    let mut tables = Vec::new();
    let mut skipped = Vec::new();
    for (orders, t) in specs.iter().zip(built) {
        match t {
            Ok(t) => tables.push(t),
            Err(GroupError::GroupTooLargeForAutEnumeration { reason }) if skip_oversized => {
                skipped.push(SkippedGroup { group: orders.clone(), reason })
            }
            Err(e) => return Err(e.into()),
        }
    }

    let mut cells = Vec::new();
    for t in &tables {
        for s in job.points.clone() {
            if job.genus_max.is_some_and(|g| genus_lower_bound(t.group().order(), s) > g) {
                continue;
            }
            cells.push((t, s));
        }
    }
    let results: Vec<Vec<ScanRow>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(t, s)| scan_cell(t, s, job.genus_max, &job.assertions))
            .collect::<Result<_, _>>()
    })?;
    let mut rows: Vec<ScanRow> = results.into_iter().flatten().collect();
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    let summary = ScanSummary::from_rows(&rows, skipped);
    Ok(ScanOutcome { rows, summary })
}

pub const CSV_HEADER: [&str; 9] = [
    "group", "s", "theta", "genus", "dim_Z", "dim_SG", "star", "factors", "verdict",
];

pub fn group_name(orders: &[u32]) -> String {
    orders.iter().map(u32::to_string).collect::<Vec<_>>().join("x")
}

fn theta_string(theta: &[Vec<u32>]) -> String {
    let parts: Vec<String> = theta
        .iter()
        .map(|x| format!("[{}]", x.iter().map(u32::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    format!("[{}]", parts.join(","))
}

fn csv_fields(row: &ScanRow) -> [String; 9] {
    [
        group_name(&row.group),
        row.s.to_string(),
        theta_string(&row.theta),
        row.genus.to_string(),
        row.dim_z.to_string(),
        row.dim_sg.to_string(),
        row.star.to_string(),
        row.factors.clone(),
        row.verdict.as_str().to_string(),
    ]
}

/// Serializes rows in the given order. Same rows, same bytes.
pub fn emit(rows: &[ScanRow], format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER).expect("writing to memory");
            for row in rows {
                w.write_record(csv_fields(row)).expect("writing to memory");
            }
            w.into_inner().expect("flushing to memory")
        }
        OutputFormat::Json => {
            let mut out = serde_json::to_vec_pretty(rows).expect("rows serialize");
            out.push(b'\n');
            out
        }
        OutputFormat::Md => {
            let mut s = String::from("| G | s | Θ | g | dim Z | dim S(G) | ★ | factors | verdict |\n");
            s.push_str("|---|---|---|---|---|---|---|---|---|\n");
            for row in rows {
                let f = csv_fields(row);
                let star = if row.star { "yes" } else { "no" };
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                    f[0], f[1], f[2], f[3], f[4], f[5], star, f[7], f[8]
                );
            }
            s.into_bytes()
        }
    }
}

/// Rows followed by the per-verdict summary footer.
pub fn emit_outcome(outcome: &ScanOutcome, format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                rows: &'a [ScanRow],
                summary: &'a ScanSummary,
            }
            let doc = Doc {
                rows: &outcome.rows,
                summary: &outcome.summary,
            };
            let mut out = serde_json::to_vec_pretty(&doc).expect("rows serialize");
            out.push(b'\n');
            out
        }
        OutputFormat::Csv => {
            let mut out = emit(&outcome.rows, format);
            out.extend_from_slice(format!("# {}\n", outcome.summary.line()).as_bytes());
            out
        }
        OutputFormat::Md => {
            let mut out = emit(&outcome.rows, format);
            out.extend_from_slice(format!("\n{}\n", outcome.summary.line()).as_bytes());
            out
        }
    }
}
