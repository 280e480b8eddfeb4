use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use singlab::exactnum::Rational;
use singlab::search::{self, row_limit_from_env, DEFAULT_MAX_CONTRACTIONS};
use singlab::{
    attach_family, c_invariant, enumerate_type_t, eta_cotangent, eta_exact, hj_resolve, non_minimal_sequence,
    recognize_type_t, render, scan, theorem_tables, ComponentError, CyclicQuotient, HjError, OutputFormat,
    ResolutionChain, ResolutionConfiguration, SearchError, SearchMode, SearchQuery, TypeTError,
};

#[derive(Debug, Parser)]
#[command(
    name = "singlab",
    version,
    about = "Combinatorics and invariants of cyclic quotient surface singularities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hirzebruch–Jung string of 1/p(1,q)
    Resolve { p: u64, q: u64 },
    /// Eta invariant of the lens space S^3/Γ
    Eta {
        p: u64,
        q: u64,
        #[arg(long, value_enum, default_value_t = EtaMethod::Exact)]
        method: EtaMethod,
    },
    /// C(X) and friends for one configuration
    Invariants {
        p: u64,
        q: u64,
        /// Inclusive chain interval to smooth, e.g. 0..1; repeatable
        #[arg(long = "contract", value_name = "A..B", value_parser = parse_interval)]
        contract: Vec<(usize, usize)>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
    },
    /// Type T recognition and enumeration
    Typet {
        #[command(subcommand)]
        command: TypetCommand,
    },
    /// m (-2)-curves attached to T(r, s, r - d), checked against closed forms
    Family {
        #[arg(long)]
        curves: u64,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        s: u64,
        #[arg(long)]
        d: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
    },
    /// Non-minimal resolution graphs
    Graphs {
        #[arg(long = "non-minimal", value_name = "N")]
        non_minimal: u64,
    },
    /// Invariant tables for the existence theorems
    Tables {
        #[arg(long)]
        theorems: bool,
        #[arg(long = "r-max", value_name = "R")]
        r_max: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
    },
    /// Exhaustive scan over all groups of order up to p-max
    Search(SearchArgs),
}

#[derive(Debug, Subcommand)]
enum TypetCommand {
    /// Recognize a chain such as 2,5,3
    Recognize { chain: ResolutionChain },
    /// Every type T string with r <= r-max and s <= s-max
    Enumerate {
        #[arg(long = "r-max", value_name = "R")]
        r_max: u64,
        #[arg(long = "s-max", value_name = "S")]
        s_max: u64,
    },
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long = "p-max", value_name = "P")]
    p_max: u64,
    #[arg(long, value_enum, default_value_t = SearchMode::SingleContraction)]
    mode: SearchMode,
    /// Keep only rows with C(X) > 0
    #[arg(long)]
    positive: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
    /// Keep one of each q, q^{-1} pair
    #[arg(long = "dedup-conjugate")]
    dedup_conjugate: bool,
    #[arg(long = "max-contractions", default_value_t = DEFAULT_MAX_CONTRACTIONS)]
    max_contractions: usize,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EtaMethod {
    Exact,
    Cotangent,
    Both,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Hj(#[from] HjError),
    #[error(transparent)]
    TypeT(#[from] TypeTError),
    #[error(transparent)]
    Component(#[from] ComponentError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Search(SearchError::RowLimitExceeded { .. }) => 3,
            CliError::Io(_) => 1,
            _ => 2,
        }
    }
}

fn parse_interval(raw: &str) -> Result<(usize, usize), String> {
    let (a, b) = raw
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, got {raw:?}"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad interval start in {raw:?}"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad interval end in {raw:?}"))?;
    if a > b {
        return Err(format!("interval {raw:?} is empty"));
    }
    Ok((a, b))
}

fn decimal(x: &Rational) -> String {
    x.to_decimal(search::APPROX_DIGITS)
}

fn run(cli: Cli) -> Result<String, CliError> {
    let mut out = String::new();
    match cli.command {
        Command::Resolve { p, q } => {
            let g = CyclicQuotient::new(p, q)?;
            out.push_str(&format!("{}\n", hj_resolve(&g)));
        }
        Command::Eta { p, q, method } => {
            let g = CyclicQuotient::new(p, q)?;
            match method {
                EtaMethod::Exact => {
                    out.push_str(&format!("{}\n", eta_exact(&g)));
                }
                EtaMethod::Cotangent => {
                    out.push_str(&format!("{:.15e}\n", eta_cotangent(&g)));
                }
                EtaMethod::Both => {
                    let exact = eta_exact(&g);
                    let numeric = eta_cotangent(&g);
                    out.push_str(&format!("exact      {} ({})\n", exact, decimal(&exact)));
                    out.push_str(&format!("cotangent  {numeric:.15e}\n"));
                    out.push_str(&format!("difference {:.3e}\n", (numeric - exact.to_f64()).abs()));
                }
            }
        }
        Command::Invariants { p, q, contract, format } => {
            let g = CyclicQuotient::new(p, q)?;
            let cfg = if contract.is_empty() {
                ResolutionConfiguration::artin(g)
            } else {
                ResolutionConfiguration::new(g, &contract)?
            };
            out.push_str(&render(&[c_invariant(&cfg)?], format)?);
        }
        Command::Typet {
            command: TypetCommand::Recognize { chain },
        } => match recognize_type_t(&chain) {
            Some(t) => out.push_str(&format!("{t}\n")),
            None => out.push_str(&format!("{chain} is not of type T\n")),
        },
        Command::Typet {
            command: TypetCommand::Enumerate { r_max, s_max },
        } => {
            if r_max < 2 || s_max < 1 {
                return Err(CliError::Usage("need --r-max >= 2 and --s-max >= 1".into()));
            }
            for (t, chain) in enumerate_type_t(r_max, s_max) {
                out.push_str(&format!("{t}\t{chain}\n"));
            }
        }
        Command::Family {
            curves,
            r,
            s,
            d,
            format,
        } => {
            let fam = attach_family(curves, r, s, d)?;
            out.push_str(&render(&[fam.report], format)?);
        }
        Command::Graphs { non_minimal } => {
            let steps = non_minimal_sequence(non_minimal)?;
            for (i, step) in steps.iter().enumerate() {
                out.push_str(&format!("{i}\t{step}\n"));
            }
        }
        Command::Tables {
            theorems,
            r_max,
            format,
        } => {
            if !theorems {
                return Err(CliError::Usage("nothing to tabulate: pass --theorems".into()));
            }
            if r_max < 2 {
                return Err(CliError::Usage("need --r-max >= 2".into()));
            }
            out.push_str(&render(&theorem_tables(r_max)?, format)?);
        }
        Command::Search(args) => {
            let mut query = SearchQuery::new(args.p_max, args.mode);
            query.positive_only = args.positive;
            query.output_format = args.format;
            query.dedup_conjugate = args.dedup_conjugate;
            query.max_contractions = args.max_contractions;
            query.workers = args.workers;
            query.row_limit = row_limit_from_env()?;
            out.push_str(&render(&scan(&query)?, args.format)?);
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = run(cli).and_then(|text| {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(text.as_bytes())?;
        stdout.flush()?;
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("singlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
