//! The non-collapsing quantity `C(X) = 2 - b2(X) + 2/p - 3η` for Artin and
//! candidate non-Artin smoothings of a cyclic quotient singularity, and the
//! "(-2)-curves attached to a type T string" families.
//!
//! A configuration is the minimal resolution string with a set of disjoint
//! type T substrings marked for Q-Gorenstein smoothing. Smoothing a
//! `T(r, s, d)` substring of length `ℓ` replaces `ℓ` curves by a Milnor
//! fibre with `b2 = s - 1`.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::eta::eta_exact;
use crate::exactnum::{mod_inverse, Rational};
use crate::hjres::{chain_to_quotient, hj_resolve, reverse_chain, CyclicQuotient, HjError, ResolutionChain};
use crate::type_t::{conjugate, recognize_type_t, type_t_string, TypeTError, TypeTParams};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComponentError {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("C(X) cross-check failed for {group} [{label}]: csnac form {csnac}, eta form {eta_form}")]
    CrossCheck {
        group: CyclicQuotient,
        label: String,
        csnac: String,
        eta_form: String,
    },
    #[error("family m={m} {params}: pipeline {field} = {pipeline}, closed form = {closed}")]
    Mismatch {
        m: u64,
        params: TypeTParams,
        field: &'static str,
        pipeline: String,
        closed: String,
    },
    #[error("no such family: {0}")]
    UnsupportedFamily(String),
    #[error(transparent)]
    TypeT(#[from] TypeTError),
    #[error(transparent)]
    Hj(#[from] HjError),
}

/// A smoothed substring `[start, end]` (inclusive) of the resolution string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContractedInterval {
    pub start: usize,
    pub end: usize,
    pub params: TypeTParams,
}

impl ContractedInterval {
    /// Number of curves smoothed away.
    pub fn length(&self) -> usize {
        self.end - self.start + 1
    }
}

impl fmt::Display for ContractedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "contract[{}..{}]={}", self.start, self.end, self.params)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionConfiguration {
    quotient: CyclicQuotient,
    chain: ResolutionChain,
    contracted: Vec<ContractedInterval>,
}

impl ResolutionConfiguration {
    pub fn artin(quotient: CyclicQuotient) -> Self {
        ResolutionConfiguration {
            chain: hj_resolve(&quotient),
            quotient,
            contracted: Vec::new(),
        }
    }

    /// Checks bounds, disjointness and that every interval is a type T
    /// substring.
    pub fn new(quotient: CyclicQuotient, intervals: &[(usize, usize)]) -> Result<Self, ComponentError> {
        let chain = hj_resolve(&quotient);
        let mut sorted = intervals.to_vec();
        sorted.sort();
        let mut contracted = Vec::with_capacity(sorted.len());
        for (idx, &(start, end)) in sorted.iter().enumerate() {
            let sub = chain.slice(start, end).ok_or_else(|| {
                ComponentError::InvalidConfiguration(format!("interval [{start}..{end}] is outside {chain}"))
            })?;
            if idx > 0 && start <= sorted[idx - 1].1 {
                return Err(ComponentError::InvalidConfiguration(format!(
                    "intervals [{}..{}] and [{start}..{end}] overlap",
                    sorted[idx - 1].0,
                    sorted[idx - 1].1
                )));
            }
            let params = recognize_type_t(&sub).ok_or_else(|| {
                ComponentError::InvalidConfiguration(format!("substring {sub} at [{start}..{end}] is not of type T"))
            })?;
            contracted.push(ContractedInterval { start, end, params });
        }
        Ok(ResolutionConfiguration {
            quotient,
            chain,
            contracted,
        })
    }

    /// For callers that already recognized the intervals (sorted, disjoint).
    pub(crate) fn from_recognized(
        quotient: CyclicQuotient,
        chain: ResolutionChain,
        contracted: Vec<ContractedInterval>,
    ) -> Self {
        debug_assert!(contracted.windows(2).all(|w| w[0].end < w[1].start));
        ResolutionConfiguration {
            quotient,
            chain,
            contracted,
        }
    }

    pub fn quotient(&self) -> CyclicQuotient {
        self.quotient
    }

    pub fn chain(&self) -> &ResolutionChain {
        &self.chain
    }

    pub fn contracted(&self) -> &[ContractedInterval] {
        &self.contracted
    }

    pub fn is_artin(&self) -> bool {
        self.contracted.is_empty()
    }

    pub fn b2(&self) -> u64 {
        let removed: usize = self.contracted.iter().map(ContractedInterval::length).sum();
        let fibres: u64 = self.contracted.iter().map(|c| c.params.s() - 1).sum();
        (self.chain.len() - removed) as u64 + fibres
    }

    /// Whether the configuration is one of the shapes certified as a
    /// deformation component: a single contraction of the whole string, or
    /// of a type T string with one to three (-2)-curves on one side.
    fn is_certified_shape(&self) -> bool {
        let [iv] = self.contracted.as_slice() else {
            return false;
        };
        let k = self.chain.len();
        let e = self.chain.entries();
        let twos = |range: std::ops::Range<usize>| e[range].iter().all(|&x| x == 2);
        if iv.start == 0 && iv.end == k - 1 {
            return true;
        }
        let left = k - 1 - iv.end == 0 && (1..=3).contains(&iv.start) && twos(0..iv.start);
        let right = iv.start == 0 && (1..=3).contains(&(k - 1 - iv.end)) && twos(iv.end + 1..k);
        left || right
    }

    pub fn label(&self) -> String {
        if self.contracted.is_empty() {
            return "artin".to_string();
        }
        let parts: Vec<String> = self.contracted.iter().map(ToString::to_string).collect();
        let body = parts.join("+");
        if self.is_certified_shape() {
            body
        } else {
            format!("candidate:{body}")
        }
    }
}

/// The full invariant bundle of one configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantReport {
    pub p: u64,
    pub q: u64,
    pub chain: ResolutionChain,
    pub k: u64,
    pub sum_e: u64,
    pub q_inv: u64,
    pub eta: Rational,
    pub b2: u64,
    pub c_value: Rational,
    pub positive: bool,
    pub label: String,
}

impl InvariantReport {
    pub fn quotient(&self) -> CyclicQuotient {
        CyclicQuotient::new(self.p, self.q).expect("report holds a valid group")
    }
}

fn frac(num: BigInt, den: u64) -> Rational {
    Rational::new(num, den).expect("group order is positive")
}

/// Evaluates `C(X)` twice, as
/// `2 + (k - b2) - Σ(e_i - 2) + (2 - q^{-1} - q)/p` and as
/// `2 - b2 + 2/p - 3η`, and fails if the two disagree.
pub fn c_invariant(cfg: &ResolutionConfiguration) -> Result<InvariantReport, ComponentError> {
    let g = cfg.quotient;
    let (p, q) = (g.p(), g.q());
    let q_inv = mod_inverse(&BigInt::from(q), &BigInt::from(p)).map_err(HjError::from)?;
    let chain = &cfg.chain;
    let k = chain.len() as u64;
    let sum_e = chain.sum();
    let b2 = cfg.b2();
    let eta = eta_exact(&g);

    let excess: BigInt = chain.entries().iter().map(|&e| BigInt::from(e) - 2).sum();
    let csnac = Rational::from_integer(BigInt::from(2) + BigInt::from(k) - BigInt::from(b2) - excess)
        + frac(BigInt::from(2) - &q_inv - BigInt::from(q), p);
    let eta_form = Rational::from_integer(BigInt::from(2) - BigInt::from(b2)) + frac(BigInt::from(2), p)
        - Rational::from(3) * eta.clone();

    let label = cfg.label();
    if csnac != eta_form {
        return Err(ComponentError::CrossCheck {
            group: g,
            label,
            csnac: csnac.to_string(),
            eta_form: eta_form.to_string(),
        });
    }
    Ok(InvariantReport {
        p,
        q,
        chain: chain.clone(),
        k,
        sum_e,
        q_inv: g.q_inverse(),
        eta,
        b2,
        positive: csnac.is_positive(),
        c_value: csnac,
        label,
    })
}

/// Closed forms for `m` (-2)-curves attached on the left of the string of
/// `T(r, s, r - d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyClosedForm {
    /// `m + m·drs + r^2 s`
    pub p: BigInt,
    /// `(m - 1)(1 + drs) + r^2 s`
    pub q: BigInt,
    /// `dsr + m·d^2 s - 1`
    pub q_inv: BigInt,
    pub eta: Rational,
    /// `s - 1 + m`
    pub b2: u64,
    /// `(4 - m·d^2 s) / p`
    pub c: Rational,
}

impl FamilyClosedForm {
    pub fn evaluate(m: u64, t: &TypeTParams) -> Result<Self, ComponentError> {
        let big = |x: u64| BigInt::from(x);
        let (r, s, d, mm) = (big(t.r()), big(t.s()), big(t.d()), big(m));
        let drs = &d * &r * &s;
        let r2s = &r * &r * &s;
        let d2s = &d * &d * &s;
        let p = &mm + &mm * &drs + &r2s;
        let q = (&mm - 1) * (BigInt::from(1) + &drs) + &r2s;
        let q_inv = &d * &s * &r + &mm * &d2s - 1;

        // eta numerators, each over 3p
        let n = |x: i64| BigInt::from(x);
        let eta_num: BigInt = match m {
            1 => &s * (n(-1) + &d * &d + n(2) * &d * &r + n(2) * &r * &r - &r * (&d + &r) * &s),
            2 => &s * (n(-2) + n(2) * &d * &d + n(2) * &d * &r + &r * &r - &r * (n(2) * &d + &r) * &s),
            3 => n(-2) - &s * (n(3) - n(3) * &d * &d + &r * (n(3) * &d + &r) * &s),
            _ => return Err(ComponentError::UnsupportedFamily(format!("m = {m} curves"))),
        };
        let eta = Rational::new(eta_num, BigInt::from(3) * &p).expect("p > 0");
        let c = Rational::new(BigInt::from(4) - &mm * &d2s, p.clone()).expect("p > 0");
        Ok(FamilyClosedForm {
            p,
            q,
            q_inv,
            eta,
            b2: t.s() - 1 + m,
            c,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyReport {
    pub m: u64,
    pub params: TypeTParams,
    pub report: InvariantReport,
    pub closed: FamilyClosedForm,
}

/// Builds `(2,...,2) ++ string(T(r, s, r - d))` with `m` twos, runs it
/// through the full pipeline with the type T part smoothed, and checks the
/// result against [`FamilyClosedForm`].
pub fn attach_family(m: u64, r: u64, s: u64, d: u64) -> Result<FamilyReport, ComponentError> {
    if !(1..=3).contains(&m) {
        return Err(ComponentError::UnsupportedFamily(format!("m = {m} curves")));
    }
    let params = TypeTParams::new(r, s, d)?;
    let t_string = type_t_string(&conjugate(&params));
    let mut entries = vec![2u64; m as usize];
    entries.extend_from_slice(t_string.entries());
    let chain = ResolutionChain::new(entries)?;
    let quotient = chain_to_quotient(&chain)?;

    let mismatch = |field: &'static str, pipeline: String, closed: String| ComponentError::Mismatch {
        m,
        params,
        field,
        pipeline,
        closed,
    };
    let resolved = hj_resolve(&quotient);
    if resolved != chain {
        return Err(mismatch("chain", resolved.to_string(), chain.to_string()));
    }

    let start = m as usize;
    let end = chain.len() - 1;
    let cfg = ResolutionConfiguration::new(quotient, &[(start, end)])?;
    let report = c_invariant(&cfg)?;
    let closed = FamilyClosedForm::evaluate(m, &params)?;

    let checks: [(&'static str, String, String); 6] = [
        ("p", report.p.to_string(), closed.p.to_string()),
        ("q", report.q.to_string(), closed.q.to_string()),
        ("q_inv", report.q_inv.to_string(), closed.q_inv.to_string()),
        ("eta", report.eta.to_string(), closed.eta.to_string()),
        ("b2", report.b2.to_string(), closed.b2.to_string()),
        ("C", report.c_value.to_string(), closed.c.to_string()),
    ];
    for (field, pipeline, closed_value) in checks {
        if pipeline != closed_value {
            return Err(mismatch(field, pipeline, closed_value));
        }
    }
    Ok(FamilyReport {
        m,
        params,
        report,
        closed,
    })
}

/// Minimal resolution graphs listed for the `d = 1` families:
///
/// * `m = 1, s = 1`: `(2^{r-1}, r+2)`
/// * `m = 1, s = 2`: `(2^{r-1}, 3, r+1)`
/// * `m = 1, s = 3`: `(2^{r-1}, 3, 2, r+1)`
/// * `m = 2, s = 1`: `(2^r, r+2)`
/// * `m = 3, s = 1`: `(2^{r+1}, r+2)`
pub fn family_minimal_graph(m: u64, r: u64, s: u64) -> Result<ResolutionChain, ComponentError> {
    if r < 2 {
        return Err(ComponentError::UnsupportedFamily(format!("r = {r}")));
    }
    let twos = |n: u64| std::iter::repeat_n(2u64, n as usize);
    let entries: Vec<u64> = match (m, s) {
        (1, 1) => twos(r - 1).chain([r + 2]).collect(),
        (1, 2) => twos(r - 1).chain([3, r + 1]).collect(),
        (1, 3) => twos(r - 1).chain([3, 2, r + 1]).collect(),
        (2, 1) => twos(r).chain([r + 2]).collect(),
        (3, 1) => twos(r + 1).chain([r + 2]).collect(),
        _ => {
            return Err(ComponentError::UnsupportedFamily(format!(
                "no listed graph for m = {m}, s = {s}"
            )))
        }
    };
    Ok(ResolutionChain::new(entries)?)
}

/// One named group family from the existence theorems.
#[derive(Debug, Clone, Copy)]
struct NonArtinFamily {
    tag: &'static str,
    m: u64,
    s: u64,
    /// the group as stated, `(p, q)` as functions of `r`
    group: fn(u64) -> (u64, u64),
}

const NON_ARTIN_FAMILIES: [NonArtinFamily; 5] = [
    NonArtinFamily {
        tag: "thm2(1)",
        m: 1,
        s: 1,
        group: |r| (r * r + r + 1, r),
    },
    NonArtinFamily {
        tag: "thm2(2a)",
        m: 2,
        s: 1,
        group: |r| (r * r + 2 * r + 2, r + 1),
    },
    NonArtinFamily {
        tag: "thm2(2b)",
        m: 1,
        s: 2,
        group: |r| (2 * r * r + 2 * r + 1, 2 * r + 1),
    },
    NonArtinFamily {
        tag: "thm2(3a)",
        m: 3,
        s: 1,
        group: |r| (r * r + 3 * r + 3, r + 2),
    },
    NonArtinFamily {
        tag: "thm2(3b)",
        m: 1,
        s: 3,
        group: |r| (3 * r * r + 3 * r + 1, 3 * r + 2),
    },
];

const ARTIN_ONLY_GROUPS: [(u64, u64); 3] = [(3, 1), (5, 2), (7, 3)];

/// Invariant rows for the three Artin-only groups and for every non-Artin
/// family with `2 <= r <= r_max`. Labels are prefixed with the family tag.
///
/// The non-Artin rows use the stated presentation `(p, q)`, which is the
/// `q ↔ q^{-1}` swap of the attach-family group: the type T string sits on
/// the left and the (-2)-curves on the right.
pub fn theorem_tables(r_max: u64) -> Result<Vec<InvariantReport>, ComponentError> {
    let mut rows = Vec::new();
    for (p, q) in ARTIN_ONLY_GROUPS {
        let mut report = c_invariant(&ResolutionConfiguration::artin(CyclicQuotient::new(p, q)?))?;
        report.label = format!("thm1:{}", report.label);
        rows.push(report);
    }
    for fam in NON_ARTIN_FAMILIES {
        for r in 2..=r_max {
            let (p, q) = (fam.group)(r);
            let group = CyclicQuotient::new(p, q)?;
            let attached = attach_family(fam.m, r, fam.s, 1)?;
            if attached.report.quotient().swapped() != group {
                return Err(ComponentError::InvalidConfiguration(format!(
                    "{} at r={r}: {group} is not the swap of {}",
                    fam.tag,
                    attached.report.quotient()
                )));
            }
            let chain = hj_resolve(&group);
            debug_assert_eq!(chain, reverse_chain(&attached.report.chain));
            let t_end = chain.len() - 1 - fam.m as usize;
            let cfg = ResolutionConfiguration::new(group, &[(0, t_end)])?;
            let mut report = c_invariant(&cfg)?;
            if report.b2 != fam.s - 1 + fam.m {
                return Err(ComponentError::InvalidConfiguration(format!(
                    "{} at r={r}: b2 = {}",
                    fam.tag, report.b2
                )));
            }
            report.label = format!("{}:{}", fam.tag, report.label);
            rows.push(report);
        }
    }
    Ok(rows)
}
