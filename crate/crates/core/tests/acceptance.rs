use std::collections::BTreeMap;
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use num_integer::Integer;
use serde_json::Value;

use singlab::exactnum::{cf_eval, euler_phi, mod_inverse_u64};
use singlab::hjres::chain_to_quotient;
use singlab::type_t::{recognize_arithmetic, recognize_peeling};
use singlab::{
    attach_family, blow_down, blow_up, c_invariant, enumerate_type_t, eta_cotangent, eta_exact, hj_resolve,
    non_minimal_graph, non_minimal_sequence, reverse_chain, type_t_group, type_t_string, BlowUpSite, CyclicQuotient,
    Rational, ResolutionChain, ResolutionConfiguration, TypeTParams,
};

const ETA_TOLERANCE: f64 = 1e-9;
const P_MAX: u64 = 200;

type Check = Result<String, String>;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_singlab"))
}

fn run(args: &[&str]) -> Result<Output, String> {
    bin()
        .args(args)
        .output()
        .map_err(|e| format!("cannot run singlab: {e}"))
}

fn stdout_of(args: &[&str]) -> Result<String, String> {
    let out = run(args)?;
    if !out.status.success() {
        return Err(format!(
            "singlab {} exited with {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d).unwrap()
}

fn g(p: u64, q: u64) -> CyclicQuotient {
    CyclicQuotient::new(p, q).unwrap()
}

fn coprime_pairs(p_max: u64) -> impl Iterator<Item = (u64, u64)> {
    (2..=p_max).flat_map(|p| (1..p).filter(move |q| p.gcd(q) == 1).map(move |q| (p, q)))
}

fn type_t_grid(r_max: u64, s_max: u64) -> impl Iterator<Item = TypeTParams> {
    (2..=r_max).flat_map(move |r| {
        (1..=s_max).flat_map(move |s| {
            (1..r)
                .filter(move |d| r.gcd(d) == 1)
                .map(move |d| TypeTParams::new(r, s, d).unwrap())
        })
    })
}

/// Every chain of length `1..=max_len` with entries in `lo..=hi`.
fn all_chains(max_len: usize, lo: u64, hi: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut level: Vec<Vec<u64>> = vec![Vec::new()];
    for _ in 0..max_len {
        level = level
            .iter()
            .flat_map(|c| {
                (lo..=hi).map(move |e| {
                    let mut next = c.clone();
                    next.push(e);
                    next
                })
            })
            .collect();
        out.extend(level.iter().cloned());
    }
    out
}

fn c1_reference_values() -> Check {
    let mut seen = Vec::new();
    for (args, want) in [(["resolve", "5", "2"], "(3,2)"), (["resolve", "7", "3"], "(3,2,2)")] {
        let got = stdout_of(&args)?;
        if got.trim() != want {
            return Err(format!("{} printed {:?}, want {want}", args.join(" "), got.trim()));
        }
        seen.push(format!("{} -> {want}", args[1..].join(" ")));
    }
    for ((p, q), want) in [((3, 1), rat(1, 1)), ((5, 2), rat(2, 5)), ((7, 3), rat(1, 7))] {
        let c = c_invariant(&ResolutionConfiguration::artin(g(p, q)))
            .map_err(|e| e.to_string())?
            .c_value;
        if c != want {
            return Err(format!("Artin C of 1/{p}(1,{q}) is {c}, want {want}"));
        }
        seen.push(format!("C(1/{p}(1,{q}))={c}"));
    }
    Ok(seen.join(", "))
}

fn c2_type_t_invariants() -> Check {
    let mut failures: BTreeMap<&str, (usize, String)> = BTreeMap::new();
    let mut fail = |clause: &'static str, example: String| {
        let entry = failures.entry(clause).or_insert((0, example));
        entry.0 += 1;
    };
    let mut total = 0;
    for t in type_t_grid(20, 6) {
        total += 1;
        let (r, s) = (t.r(), t.s());
        let chain = type_t_string(&t);
        if chain.len() as u64 != r + s - 2 {
            fail(
                "length = r+s-2",
                format!("{t}={chain} has length {}, want {}", chain.len(), r + s - 2),
            );
        }
        if chain.sum() != 3 * r + 2 * s - 4 {
            fail(
                "sum = 3r+2s-4",
                format!("{t}={chain} has sum {}, want {}", chain.sum(), 3 * r + 2 * s - 4),
            );
        }
        let order = (r * r * s) as i64;
        let eta_want = rat(3 * order - s as i64 * order - 2, 3 * order);
        let grp = type_t_group(&t);
        let eta = eta_exact(&grp);
        if eta != eta_want {
            fail("eta", format!("{t}: eta {eta}, want {eta_want}"));
        }
        let full = ResolutionConfiguration::new(grp, &[(0, chain.len() - 1)]).map_err(|e| e.to_string())?;
        let c = c_invariant(&full).map_err(|e| e.to_string())?.c_value;
        if c != rat(4, order) {
            fail("C = 4/(r^2 s)", format!("{t}: C {c}, want 4/{order}"));
        }
    }
    if failures.is_empty() {
        Ok(format!("{total} triples, all four identities exact"))
    } else {
        let parts: Vec<String> = failures
            .iter()
            .map(|(clause, (n, ex))| format!("{clause} fails on {n}/{total} (e.g. {ex})"))
            .collect();
        Err(parts.join("; "))
    }
}

fn c3_families() -> Check {
    let mut count = 0;
    for m in 1..=3u64 {
        for t in type_t_grid(20, 5) {
            let fam = attach_family(m, t.r(), t.s(), t.d()).map_err(|e| e.to_string())?;
            let (rep, closed) = (&fam.report, &fam.closed);
            let agrees = closed.p == rep.p.into()
                && closed.q == rep.q.into()
                && closed.q_inv == rep.q_inv.into()
                && closed.eta == rep.eta
                && closed.c == rep.c_value;
            if !agrees {
                return Err(format!("m={m} {t}: pipeline {rep:?} vs closed {closed:?}"));
            }
            if t.d() == 1 {
                let want = if m == 1 { t.s() <= 3 } else { t.s() == 1 };
                if rep.positive != want {
                    return Err(format!("m={m} {t}: positive={}, want {want}", rep.positive));
                }
            }
            count += 1;
        }
    }
    Ok(format!(
        "{count} family members match; positivity exactly s<=3 (m=1) and s=1 (m=2,3) at d=1"
    ))
}

fn c4_eta_oracles() -> Check {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (p, q) in coprime_pairs(P_MAX) {
        let grp = g(p, q);
        let diff = (eta_cotangent(&grp) - eta_exact(&grp).to_f64()).abs();
        if diff.is_nan() || diff >= ETA_TOLERANCE {
            return Err(format!("1/{p}(1,{q}): |cot - exact| = {diff:e}"));
        }
        worst = worst.max(diff);
        count += 1;
    }
    Ok(format!("{count} pairs, max deviation {worst:.2e} < {ETA_TOLERANCE:e}"))
}

fn c5_round_trip_duality() -> Check {
    let mut count = 0;
    for (p, q) in coprime_pairs(P_MAX) {
        let grp = g(p, q);
        let chain = hj_resolve(&grp);
        if cf_eval(chain.entries()).map_err(|e| e.to_string())? != rat(q as i64, p as i64) {
            return Err(format!("cf_eval of {chain} is not {q}/{p}"));
        }
        if chain_to_quotient(&chain).map_err(|e| e.to_string())? != grp {
            return Err(format!("{chain} does not map back to {grp}"));
        }
        let q_inv = mod_inverse_u64(q, p).map_err(|e| e.to_string())?;
        if reverse_chain(&chain) != hj_resolve(&g(p, q_inv)) {
            return Err(format!("reversal of {chain} is not the string of 1/{p}(1,{q_inv})"));
        }
        if eta_exact(&grp) != eta_exact(&g(p, q_inv)) {
            return Err(format!("eta differs between q={q} and q^-1={q_inv} mod {p}"));
        }
        count += 1;
    }
    Ok(format!("{count} pairs"))
}

fn c6_su2() -> Check {
    for p in 2..=100u64 {
        let c = c_invariant(&ResolutionConfiguration::artin(g(p, p - 1)))
            .map_err(|e| e.to_string())?
            .c_value;
        if c != rat(4, p as i64) {
            return Err(format!("1/{p}(1,{}): C = {c}, want 4/{p}", p - 1));
        }
    }
    Ok("C = 4/p for 2 <= p <= 100".into())
}

fn c7_type_t_enumeration() -> Check {
    let listed = enumerate_type_t(12, 6);
    let mut per_rs: BTreeMap<(u64, u64), Vec<&ResolutionChain>> = BTreeMap::new();
    for (t, chain) in &listed {
        if recognize_arithmetic(chain) != Some(*t) || recognize_peeling(chain) != Some(*t) {
            return Err(format!("{chain} does not recognize back to {t}"));
        }
        per_rs.entry((t.r(), t.s())).or_default().push(chain);
    }
    for r in 2..=12 {
        for s in 1..=6 {
            let mut chains = per_rs.remove(&(r, s)).unwrap_or_default();
            chains.sort();
            chains.dedup();
            if chains.len() as u64 != euler_phi(r) {
                return Err(format!(
                    "r={r} s={s}: {} chains, want phi(r)={}",
                    chains.len(),
                    euler_phi(r)
                ));
            }
        }
    }
    if !per_rs.is_empty() {
        return Err(format!("unexpected (r,s) keys {:?}", per_rs.keys().collect::<Vec<_>>()));
    }
    let sweep = all_chains(6, 2, 8);
    let mut hits = 0;
    for e in &sweep {
        let chain = ResolutionChain::new(e.clone()).map_err(|e| e.to_string())?;
        let (a, b) = (recognize_arithmetic(&chain), recognize_peeling(&chain));
        if a != b {
            return Err(format!("{chain}: arithmetic {a:?} vs peeling {b:?}"));
        }
        hits += a.is_some() as usize;
    }
    Ok(format!(
        "{} strings, phi(r) per (r,s); recognizers agree on {} chains ({hits} type T)",
        listed.len(),
        sweep.len()
    ))
}

fn c8_graphs() -> Check {
    for n in 3..=10u64 {
        let steps = non_minimal_sequence(n).map_err(|e| e.to_string())?;
        let graph = non_minimal_graph(n).map_err(|e| e.to_string())?;
        let mut listed = vec![1];
        listed.extend(std::iter::repeat_n(2, (n - 3) as usize));
        listed.push(n + 1);
        if steps.last() != Some(&graph) || graph.entries() != listed.as_slice() {
            return Err(format!(
                "n={n}: sequence ends {:?}, graph {graph}, listed {listed:?}",
                steps.last()
            ));
        }
        if steps.len() as u64 != n - 1 || steps[0].entries() != [n] {
            return Err(format!("n={n}: expected n-2 blow-ups starting on ({n})"));
        }
    }
    for (n, want) in [(3, vec![1, 4]), (4, vec![1, 2, 5])] {
        if non_minimal_graph(n).map_err(|e| e.to_string())?.entries() != want.as_slice() {
            return Err(format!("n={n}: not {want:?}"));
        }
    }

    let chains = all_chains(6, 1, 6);
    let mut round_trips = 0;
    for e in &chains {
        let c = ResolutionChain::new(e.clone()).map_err(|e| e.to_string())?;
        for site in BlowUpSite::all_for(c.len()) {
            let up = blow_up(&c, site).map_err(|e| e.to_string())?;
            let i = site.exceptional_index();
            if up.entries()[i] != 1 || blow_down(&up, i).map_err(|e| e.to_string())? != c {
                return Err(format!("{c}: blow_down(blow_up at {site:?}) = {up} does not return"));
            }
            round_trips += 1;
        }
    }

    let sides = all_chains(2, 1, 6);
    let mut sides_with_empty = vec![Vec::new()];
    sides_with_empty.extend(sides);
    let mut interior = 0;
    for left in &sides_with_empty {
        for right in &sides_with_empty {
            for a in 2..=6u64 {
                for b in 2..=6u64 {
                    let mut e = left.clone();
                    e.extend([a, 1, b]);
                    e.extend(right.iter().copied());
                    let before = ResolutionChain::new(e).map_err(|e| e.to_string())?;
                    let after = blow_down(&before, left.len() + 1).map_err(|e| e.to_string())?;
                    if let (Ok(x), Ok(y)) = (cf_eval(before.entries()), cf_eval(after.entries())) {
                        if x != y {
                            return Err(format!("{before} -> {after}: {x} != {y}"));
                        }
                        interior += 1;
                    }
                }
            }
        }
    }
    Ok(format!(
        "n = 3..10 graphs; {round_trips} blow-up round trips; {interior} interior contractions keep q/p"
    ))
}

fn c9_theorem_tables() -> Check {
    let text = stdout_of(&["tables", "--theorems", "--r-max", "20", "--format", "json"])?;
    let rows: Vec<Value> = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let mut per_tag: BTreeMap<String, usize> = BTreeMap::new();
    for row in &rows {
        let label = row["label"].as_str().ok_or("row without label")?;
        if row["positive"] != Value::Bool(true) {
            return Err(format!("row {row} is not positive"));
        }
        let tag = label.split(':').next().unwrap_or_default().to_string();
        *per_tag.entry(tag).or_default() += 1;
    }
    let mut want: BTreeMap<String, usize> = BTreeMap::new();
    want.insert("thm1".into(), 3);
    for tag in ["thm2(1)", "thm2(2a)", "thm2(2b)", "thm2(3a)", "thm2(3b)"] {
        want.insert(tag.into(), 19);
    }
    if per_tag != want {
        return Err(format!("row counts per family {per_tag:?}, want {want:?}"));
    }
    Ok(format!("{} rows, all positive", rows.len()))
}

fn c10_scan_determinism() -> Check {
    let base = ["search", "--p-max", "200", "--mode", "single-contraction"];
    let mut outputs = Vec::new();
    for workers in [None, None, Some("1"), Some("4")] {
        let mut args = base.to_vec();
        if let Some(w) = workers {
            args.extend(["--workers", w]);
        }
        outputs.push(stdout_of(&args)?);
    }
    let first = &outputs[0];
    if let Some(i) = outputs.iter().position(|o| o != first) {
        return Err(format!("run {i} differs from run 0"));
    }
    Ok(format!(
        "4 runs (default x2, 1 and 4 workers) byte-identical, {} lines",
        first.lines().count()
    ))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    check: fn() -> Check,
}

fn main() -> ExitCode {
    let secs = Duration::from_secs_f64;
    let criteria = [
        Criterion {
            id: 1,
            name: "reference values",
            limit: secs(0.1),
            check: c1_reference_values,
        },
        Criterion {
            id: 2,
            name: "type T invariants",
            limit: secs(2.0),
            check: c2_type_t_invariants,
        },
        Criterion {
            id: 3,
            name: "(-2)-curve families",
            limit: secs(5.0),
            check: c3_families,
        },
        Criterion {
            id: 4,
            name: "eta oracle agreement",
            limit: secs(5.0),
            check: c4_eta_oracles,
        },
        Criterion {
            id: 5,
            name: "round trip and duality",
            limit: secs(5.0),
            check: c5_round_trip_duality,
        },
        Criterion {
            id: 6,
            name: "A-series C = 4/p",
            limit: secs(1.0),
            check: c6_su2,
        },
        Criterion {
            id: 7,
            name: "type T enumeration",
            limit: secs(60.0),
            check: c7_type_t_enumeration,
        },
        Criterion {
            id: 8,
            name: "non-minimal graphs",
            limit: secs(1.0),
            check: c8_graphs,
        },
        Criterion {
            id: 9,
            name: "theorem tables",
            limit: secs(1.0),
            check: c9_theorem_tables,
        },
        Criterion {
            id: 10,
            name: "scan determinism",
            limit: secs(30.0),
            check: c10_scan_determinism,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.check)();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(detail) if elapsed <= c.limit => (true, detail),
            Ok(detail) => (false, format!("too slow; {detail}")),
            Err(why) => (false, why),
        };
        failed += !ok as usize;
        println!(
            "{} criterion {:>2} {:<24} {:>8.3}s (limit {:.1}s)  {}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.limit.as_secs_f64(),
            detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
