//! Exhaustive scans over `(p, q)` and row rendering (table, JSON, CSV).

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::components::{c_invariant, ComponentError, ContractedInterval, InvariantReport, ResolutionConfiguration};
use crate::exactnum::Rational;
use crate::hjres::{hj_resolve, CyclicQuotient, ResolutionChain};
use crate::type_t::recognize_type_t;

pub const ROW_LIMIT_ENV: &str = "SINGLAB_ROW_LIMIT";
pub const DEFAULT_ROW_LIMIT: usize = 10_000_000;
pub const DEFAULT_MAX_CONTRACTIONS: usize = 3;
/// Significant digits of the decimal convenience field.
pub const APPROX_DIGITS: usize = 15;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("scan aborted: more than {limit} rows (raise {ROW_LIMIT_ENV} to allow more)")]
    RowLimitExceeded { limit: usize },
    #[error(transparent)]
    Component(#[from] ComponentError),
    #[error("could not start worker pool: {0}")]
    Workers(String),
    #[error("output error: {0}")]
    Output(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum SearchMode {
    ArtinOnly,
    SingleContraction,
    MultiContraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum OutputFormat {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchQuery {
    pub p_max: u64,
    pub mode: SearchMode,
    pub positive_only: bool,
    pub output_format: OutputFormat,
    /// Cap on disjoint contractions per row in multi-contraction mode.
    pub max_contractions: usize,
    /// Keep only `q <= q^{-1}` of each `q ↔ q^{-1}` pair.
    pub dedup_conjugate: bool,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    pub row_limit: usize,
}

impl SearchQuery {
    pub fn new(p_max: u64, mode: SearchMode) -> Self {
        SearchQuery {
            p_max,
            mode,
            positive_only: false,
            output_format: OutputFormat::Table,
            max_contractions: DEFAULT_MAX_CONTRACTIONS,
            dedup_conjugate: false,
            workers: None,
            row_limit: DEFAULT_ROW_LIMIT,
        }
    }

    fn validate(&self) -> Result<(), SearchError> {
        if self.p_max < 2 {
            return Err(SearchError::InvalidQuery(format!(
                "p_max must be >= 2, got {}",
                self.p_max
            )));
        }
        if self.max_contractions == 0 {
            return Err(SearchError::InvalidQuery("max_contractions must be >= 1".into()));
        }
        if self.workers == Some(0) {
            return Err(SearchError::InvalidQuery("workers must be >= 1".into()));
        }
        Ok(())
    }
}

/// Reads the row limit from the environment, falling back to the default.
pub fn row_limit_from_env() -> Result<usize, SearchError> {
    match std::env::var(ROW_LIMIT_ENV) {
        Ok(raw) => raw
            .trim()
            .replace('_', "")
            .parse()
            .map_err(|_| SearchError::InvalidQuery(format!("{ROW_LIMIT_ENV}={raw:?} is not a row count"))),
        Err(_) => Ok(DEFAULT_ROW_LIMIT),
    }
}

/// All type T substrings of a minimal chain, sorted by `(start, end)`.
///
/// A type T string of length `ℓ` has entry sum `3ℓ + 2 - s` with
/// `1 <= s <= ℓ`; intervals failing that are skipped before the
/// recognizers run.
pub fn type_t_substrings(chain: &ResolutionChain) -> Vec<ContractedInterval> {
    let e = chain.entries();
    let mut prefix = Vec::with_capacity(e.len() + 1);
    prefix.push(0u64);
    for &x in e {
        prefix.push(prefix.last().unwrap() + x);
    }
    let mut out = Vec::new();
    for start in 0..e.len() {
        for end in start..e.len() {
            let len = (end - start + 1) as i128;
            let sum = (prefix[end + 1] - prefix[start]) as i128;
            let s = 2 + 3 * len - sum;
            if s < 1 || s > len {
                continue;
            }
            let sub = chain.slice(start, end).expect("in range");
            if let Some(params) = recognize_type_t(&sub) {
                out.push(ContractedInterval { start, end, params });
            }
        }
    }
    out
}

fn disjoint_sets(
    intervals: &[ContractedInterval],
    from: usize,
    max: usize,
    current: &mut Vec<ContractedInterval>,
    emit: &mut dyn FnMut(&[ContractedInterval]) -> Result<(), SearchError>,
) -> Result<(), SearchError> {
    for i in from..intervals.len() {
        let iv = intervals[i];
        if current.last().is_some_and(|last| iv.start <= last.end) {
            continue;
        }
        current.push(iv);
        emit(current)?;
        if current.len() < max {
            disjoint_sets(intervals, i + 1, max, current, emit)?;
        }
        current.pop();
    }
    Ok(())
}

struct RowBudget {
    limit: usize,
    used: AtomicUsize,
    tripped: AtomicBool,
}

impl RowBudget {
    fn take(&self) -> Result<(), SearchError> {
        if self.tripped.load(Ordering::Relaxed) || self.used.fetch_add(1, Ordering::Relaxed) >= self.limit {
            self.tripped.store(true, Ordering::Relaxed);
            return Err(SearchError::RowLimitExceeded { limit: self.limit });
        }
        Ok(())
    }
}

fn rows_for_order(p: u64, query: &SearchQuery, budget: &RowBudget) -> Result<Vec<InvariantReport>, SearchError> {
    let mut rows = Vec::new();
    for q in 1..p {
        if p.gcd(&q) != 1 {
            continue;
        }
        let group = CyclicQuotient::new(p, q).expect("coprime pair");
        if query.dedup_conjugate && group.q_inverse() < q {
            continue;
        }
        let chain = hj_resolve(&group);
        let mut push = |cfg: ResolutionConfiguration| -> Result<(), SearchError> {
            let report = c_invariant(&cfg)?;
            if !query.positive_only || report.positive {
                budget.take()?;
                rows.push(report);
            }
            Ok(())
        };
        push(ResolutionConfiguration::artin(group))?;

        let max = match query.mode {
            SearchMode::ArtinOnly => continue,
            SearchMode::SingleContraction => 1,
            SearchMode::MultiContraction => query.max_contractions,
        };
        let intervals = type_t_substrings(&chain);
        disjoint_sets(&intervals, 0, max, &mut Vec::new(), &mut |set| {
            push(ResolutionConfiguration::from_recognized(
                group,
                chain.clone(),
                set.to_vec(),
            ))
        })?;
    }
    Ok(rows)
}

/// Canonical row order: `(p, q, label)`.
pub fn sort_rows(rows: &mut [InvariantReport]) {
    rows.sort_by(|a, b| (a.p, a.q, &a.label).cmp(&(b.p, b.q, &b.label)));
}

/// Runs the scan. Rows are returned only if the whole scan succeeds.
pub fn scan(query: &SearchQuery) -> Result<Vec<InvariantReport>, SearchError> {
    query.validate()?;
    let budget = RowBudget {
        limit: query.row_limit,
        used: AtomicUsize::new(0),
        tripped: AtomicBool::new(false),
    };
    let run = || -> Result<Vec<InvariantReport>, SearchError> {
        let chunks: Vec<Vec<InvariantReport>> = (2..=query.p_max)
            .into_par_iter()
            .map(|p| rows_for_order(p, query, &budget))
            .collect::<Result<_, _>>()?;
        let mut rows: Vec<InvariantReport> = chunks.into_iter().flatten().collect();
        sort_rows(&mut rows);
        Ok(rows)
    };
    match query.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| SearchError::Workers(e.to_string()))?
            .install(run),
        None => run(),
    }
}

#[derive(Serialize)]
struct ExactValue {
    num: String,
    den: String,
    approx: String,
}

impl From<&Rational> for ExactValue {
    fn from(x: &Rational) -> Self {
        ExactValue {
            num: x.numer().to_string(),
            den: x.denom().to_string(),
            approx: x.to_decimal(APPROX_DIGITS),
        }
    }
}

/// Row layout shared by JSON and CSV; field order is part of the format.
#[derive(Serialize)]
struct JsonRow<'a> {
    p: u64,
    q: u64,
    chain: &'a [u64],
    k: u64,
    sum_e: u64,
    q_inv: u64,
    eta: ExactValue,
    b2: u64,
    c: ExactValue,
    positive: bool,
    label: &'a str,
}

impl<'a> From<&'a InvariantReport> for JsonRow<'a> {
    fn from(r: &'a InvariantReport) -> Self {
        JsonRow {
            p: r.p,
            q: r.q,
            chain: r.chain.entries(),
            k: r.k,
            sum_e: r.sum_e,
            q_inv: r.q_inv,
            eta: (&r.eta).into(),
            b2: r.b2,
            c: (&r.c_value).into(),
            positive: r.positive,
            label: &r.label,
        }
    }
}

const COLUMNS: [&str; 11] = [
    "p", "q", "chain", "k", "sum_e", "q_inv", "eta", "b2", "c", "positive", "label",
];

/// JSON array with one row object per line.
pub fn render_json(rows: &[InvariantReport]) -> Result<String, SearchError> {
    if rows.is_empty() {
        return Ok("[]\n".to_string());
    }
    let mut out = String::from("[\n");
    for (i, row) in rows.iter().enumerate() {
        let line = serde_json::to_string(&JsonRow::from(row)).map_err(|e| SearchError::Output(e.to_string()))?;
        out.push_str(&line);
        out.push_str(if i + 1 < rows.len() { ",\n" } else { "\n" });
    }
    out.push_str("]\n");
    Ok(out)
}

pub fn render_csv(rows: &[InvariantReport]) -> Result<String, SearchError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| SearchError::Output(e.to_string());
    writer.write_record(COLUMNS).map_err(io)?;
    for r in rows {
        writer
            .write_record([
                r.p.to_string(),
                r.q.to_string(),
                r.chain.to_string(),
                r.k.to_string(),
                r.sum_e.to_string(),
                r.q_inv.to_string(),
                r.eta.fraction_text(),
                r.b2.to_string(),
                r.c_value.fraction_text(),
                r.positive.to_string(),
                r.label.clone(),
            ])
            .map_err(io)?;
    }
    let bytes = writer.into_inner().map_err(|e| SearchError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| SearchError::Output(e.to_string()))
}

/// Aligned text table. Integer columns are right-aligned; a positive `C`
/// carries a trailing `+`.
pub fn render_table(rows: &[InvariantReport]) -> String {
    const HEADER: [&str; 10] = ["p", "q", "chain", "k", "sum_e", "q_inv", "eta", "b2", "C", "label"];
    const RIGHT: [bool; 10] = [true, true, false, true, true, true, true, true, true, false];
    let cells: Vec<[String; 10]> = rows
        .iter()
        .map(|r| {
            [
                r.p.to_string(),
                r.q.to_string(),
                r.chain.to_string(),
                r.k.to_string(),
                r.sum_e.to_string(),
                r.q_inv.to_string(),
                r.eta.to_string(),
                r.b2.to_string(),
                format!("{}{}", r.c_value, if r.positive { "+" } else { " " }),
                r.label.clone(),
            ]
        })
        .collect();
    let mut widths = HEADER.map(str::len);
    for row in &cells {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |fields: &[String]| {
        let parts: Vec<String> = fields
            .iter()
            .enumerate()
            .map(|(i, f)| {
                if RIGHT[i] {
                    format!("{f:>w$}", w = widths[i])
                } else {
                    format!("{f:<w$}", w = widths[i])
                }
            })
            .collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(&HEADER.map(String::from));
    for row in &cells {
        line(row);
    }
    out
}

pub fn render(rows: &[InvariantReport], format: OutputFormat) -> Result<String, SearchError> {
    match format {
        OutputFormat::Table => Ok(render_table(rows)),
        OutputFormat::Json => render_json(rows),
        OutputFormat::Csv => render_csv(rows),
    }
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchMode::ArtinOnly => "artin-only",
            SearchMode::SingleContraction => "single-contraction",
            SearchMode::MultiContraction => "multi-contraction",
        })
    }
}

impl FromStr for SearchMode {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <SearchMode as clap::ValueEnum>::from_str(s, false).map_err(SearchError::InvalidQuery)
    }
}
