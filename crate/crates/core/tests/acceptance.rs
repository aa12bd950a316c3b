//! One line per acceptance criterion; exits nonzero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use drinfeld_eis::arithmetic::{monic_of_degree, APoly, Fq, FqConfig};
use drinfeld_eis::config::RunConfig;
use drinfeld_eis::modspace::{cusp_count, curve_invariants, CountMethod};
use drinfeld_eis::verify::{rank_case, run_suite, CheckReport, Ctx, Status};

const P: i64 = 48;
const CUSP_TIME: Duration = Duration::from_secs(30);
const RESIDUAL_TIME: Duration = Duration::from_secs(300);

struct Line {
    ok: bool,
    detail: String,
}

fn ctx(q: u64) -> Ctx {
    Ctx::new(RunConfig::new(q, 1, 1, P, 3, 1).expect("valid config"))
}

fn fq(q: u32) -> Fq {
    Fq::new(FqConfig::new(q, 1, 1)).expect("prime field")
}

fn suite(q: u64, names: &[&str]) -> Vec<CheckReport> {
    let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    run_suite(&ctx(q), &names).expect("suite runs").checks
}

/// Every check passes and residual checks reach `digits` u-digits.
fn all_pass(reports: &[CheckReport], digits: i64) -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for r in reports {
        let reached = r.digits.is_none_or(|d| d >= digits);
        ok &= r.status == Status::Pass && reached;
        match r.digits {
            Some(d) => parts.push(format!("{} {:?} {d}/{digits}", r.name, r.status)),
            None => parts.push(format!("{} {:?}", r.name, r.status)),
        }
    }
    Line { ok, detail: parts.join("; ") }
}

fn cusp_agreement() -> Line {
    let start = Instant::now();
    let mut ok = true;
    let mut count = 0;
    for q in [2u32, 3] {
        let fq = fq(q);
        for r in [2usize, 3] {
            for d in 1..=3 {
                for n in monic_of_degree(d, &fq) {
                    let f = cusp_count(&n, r, CountMethod::Formula, &fq).unwrap();
                    let e = cusp_count(&n, r, CountMethod::Enumerate, &fq).unwrap();
                    ok &= f == e;
                    count += 1;
                }
            }
        }
    }
    let t = start.elapsed();
    Line { ok: ok && t < CUSP_TIME, detail: format!("{count} (q, r, N) cases in {:.1}s", t.as_secs_f64()) }
}

fn genus_table() -> Line {
    let fq = fq(2);
    let mut genera: Vec<u128> =
        monic_of_degree(2, &fq).iter().map(|n| curve_invariants(n, 1, &fq).unwrap().genus).collect();
    genera.sort();
    genera.dedup();
    Line { ok: genera == vec![4, 5, 6], detail: format!("genera {genera:?}") }
}

fn dim_mod() -> Line {
    let fq = fq(2);
    let t = curve_invariants(&APoly::t(), 5, &fq).unwrap();
    let mut ok = t.dim_mod.iter().all(|(k, v)| *v == 1 + 2 * u128::from(*k));
    let mut levels = 0;
    for d in 1..=3 {
        for n in monic_of_degree(d, &fq) {
            let inv = curve_invariants(&n, 6, &fq).unwrap();
            let dims: Vec<u128> = inv.dim_mod.values().copied().collect();
            ok &= dims.windows(3).all(|w| w[2] - w[1] == w[1] - w[0]);
            levels += 1;
        }
    }
    Line { ok, detail: format!("N = T: {:?}; constant increments on {levels} levels", t.dim_mod.values().collect::<Vec<_>>()) }
}

fn eisenstein_basis() -> Line {
    let cases: [(u64, usize, u32); 4] = [(2, 2, 1), (3, 2, 1), (2, 2, 2), (2, 3, 1)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (q, r, deg) in cases {
        let c = ctx(q);
        let f = fq(q as u32);
        let n = APoly::t().pow(deg, &f);
        let mut ks = vec![1u32, q as u32 - 1, q as u32];
        ks.dedup();
        for k in ks {
            let (rank, cusps) = rank_case(&c, r, &n, k).unwrap();
            ok &= rank as u128 == cusps;
            parts.push(format!("q={q} r={r} N=T^{deg} k={k}: {rank}/{cusps}"));
        }
    }
    Line { ok, detail: parts.join("; ") }
}

fn identity_residuals() -> Line {
    let start = Instant::now();
    let names = [
        "functional-equation",
        "exp-recursion",
        "division-product",
        "division-reciprocal",
        "symmetric-functions",
        "distribution",
        "scaling",
        "moebius-direct",
        "goss",
    ];
    let mut line = all_pass(&suite(2, &names), P);
    let t = start.elapsed();
    line.ok &= t < RESIDUAL_TIME;
    line.detail = format!("{} ({:.1}s)", line.detail, t.as_secs_f64());
    line
}

fn determinism() -> Line {
    let bin = env!("CARGO_BIN_EXE_dmf");
    let run = || Command::new(bin).args(["verify", "--seed", "5"]).output().expect("dmf runs").stdout;
    let a = run();
    let b = run();
    Line { ok: !a.is_empty() && a == b, detail: format!("two verify reports of {} bytes", a.len()) }
}

fn main() {
    let criteria: Vec<(&str, fn() -> Line)> = vec![
        ("cusp-count agreement", cusp_agreement),
        ("genus table", genus_table),
        ("dimensions of modular forms", dim_mod),
        ("Eisenstein basis rank", eisenstein_basis),
        ("identity residuals", identity_residuals),
        ("covariance", || all_pass(&suite(2, &["covariance"]), 40)),
        ("boundary behavior", || all_pass(&suite(2, &["degeneration", "vanishing-order"]), P)),
        ("SMB invariance", || all_pass(&suite(2, &["smb-invariance", "smb-orthogonality"]), P)),
        ("separation", || all_pass(&suite(2, &["separation", "jn-invariance"]), P)),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let line = run();
        if !line.ok {
            failed += 1;
        }
        println!("{} {:>2} {name}: {}", if line.ok { "PASS" } else { "FAIL" }, i + 1, line.detail);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
