//! Acceptance run: one line per criterion, with the failing checks listed
//! underneath. Exits nonzero only when a check outside the known-failing set
//! fails.

use std::process::ExitCode;
use std::time::Instant;

use logdamp_core::experiments::{run, ExperimentConfig, ExperimentSection};
use logdamp_core::moscovici::{alpha, sigma_tilde, MultiIndex};
use logdamp_core::report::{Check, ExperimentReport};
use logdamp_core::Rat;
use num::{One, Zero};

/// Checks that are known to fail at desk scale.
fn known_failure(criterion: usize, check: &str) -> bool {
    match criterion {
        3 => check.contains("only at log(2d-1)"),
        8 => check.contains("growing"),
        _ => false,
    }
}

fn config(name: &str, edit: impl FnOnce(&mut ExperimentConfig)) -> ExperimentConfig {
    let mut c = ExperimentConfig {
        experiment: ExperimentSection { name: Some(name.into()), ..Default::default() },
        ..Default::default()
    };
    edit(&mut c);
    c
}

fn checks_of(c: &ExperimentConfig, tag: &str) -> Vec<Check> {
    match run(c) {
        Ok(r) => tagged(r, tag),
        Err(e) => vec![Check::failed(format!("{tag}: run"), 1.0, &e)],
    }
}

fn tagged(r: ExperimentReport, tag: &str) -> Vec<Check> {
    r.checks
        .into_iter()
        .map(|mut c| {
            c.name = format!("{tag}: {}", c.name);
            c
        })
        .collect()
}

const MAX_LISTED: usize = 6;

struct Outcome {
    unexpected: usize,
}

fn report(n: usize, title: &str, limit_s: Option<f64>, body: impl FnOnce() -> Vec<Check>) -> Outcome {
    let start = Instant::now();
    let mut checks = body();
    let secs = start.elapsed().as_secs_f64();
    if let Some(lim) = limit_s {
        checks.push(Check::new("runtime seconds", secs, lim, 0.0, logdamp_core::report::Comparison::AtMost));
    }
    let failed: Vec<&Check> = checks.iter().filter(|c| !c.pass).collect();
    let unexpected = failed.iter().filter(|c| !known_failure(n, &c.name)).count();
    let status = if failed.is_empty() { "PASS" } else { "FAIL" };
    let suffix = if !failed.is_empty() && unexpected == 0 { " (known)" } else { "" };
    println!(
        "{status} criterion {n:>2} {title}: {} checks, {} failed{suffix}, {secs:.2}s",
        checks.len(),
        failed.len()
    );
    for c in failed.iter().take(MAX_LISTED) {
        let mark = if known_failure(n, &c.name) { "known" } else { "NEW" };
        println!("      [{mark}] {} computed={} expected={} tol={}", c.name, c.computed, c.expected, c.tolerance);
    }
    if failed.len() > MAX_LISTED {
        println!("      ... {} more", failed.len() - MAX_LISTED);
    }
    Outcome { unexpected }
}

fn trace_oracle(variant: &str) -> Vec<Check> {
    let mut out = Vec::new();
    for d in [2, 3] {
        let c = config("heat-oracle", |c| {
            c.family.d = Some(d);
            c.family.variant = Some(variant.into());
        });
        out.extend(checks_of(&c, &format!("d={d}")));
    }
    out
}

fn pole_sets() -> Vec<Check> {
    let mut out = Vec::new();
    for d in [2, 3] {
        let c = config("pole-audit", |c| c.family.d = Some(d));
        out.extend(checks_of(&c, &format!("d={d}")));
    }
    out
}

fn free_group() -> Vec<Check> {
    let mut out = Vec::new();
    for (g, pairing) in [("a1", -1.0), ("b1", 1.0)] {
        let c = config("counterexample", |c| {
            c.family.family = Some("free_group".into());
            c.family.d = Some(2);
            c.family.t = Some("a1".into());
            c.family.gamma = Some(g.into());
        });
        let checks = checks_of(&c, g);
        if let Some(p) = checks.iter().find(|c| c.name.ends_with(": pairing")) {
            out.push(Check::exact(format!("{g}: pairing value"), p.computed, pairing));
        }
        out.extend(checks);
    }
    out
}

fn family(name: &str) -> Vec<Check> {
    let c = config("counterexample", |c| c.family.family = Some(name.into()));
    checks_of(&c, name)
}

fn summability() -> Vec<Check> {
    let mut out = checks_of(&config("summability", |c| c.family.d = Some(2)), "free group");
    out.extend(
        checks_of(&config("damp-sweep", |_| {}), "circle")
            .into_iter()
            .filter(|c| c.name.contains("per eigenvalue")),
    );
    out
}

fn higher_order() -> Vec<Check> {
    let mut out = Vec::new();
    for s in [1.0, 0.5] {
        let c = config("pv-order", |c| c.family.pv_s = Some(s));
        out.extend(checks_of(&c, &format!("s={s}")));
    }
    out
}

fn integral_formula() -> Vec<Check> {
    let c = config("damp-sweep", |c| c.truncation.m = Some(128));
    checks_of(&c, "M=128").into_iter().filter(|c| c.name.contains("integral")).collect()
}

fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

fn combinatorics() -> Vec<Check> {
    let mut out = Vec::new();
    let half = Rat::one() / Rat::from_integer(2.into());
    for n in 0..=8usize {
        let sum = sigma_tilde(n)
            .iter()
            .enumerate()
            .fold(Rat::zero(), |acc, (j, c)| acc + c * num::pow(half.clone(), j));
        let want = Rat::from_integer((factorial(n as u32) as i64).into());
        out.push(Check::flag(format!("sigma_tilde({n}) at 1/2 = {n}!"), sum == want));
    }
    for m in 1..=3 {
        for total in 0..=4 {
            for k in MultiIndex::with_total(m, total) {
                let mut den = 1u128;
                let mut partial = 0u128;
                for (i, kj) in k.0.iter().enumerate() {
                    partial += *kj as u128;
                    den *= factorial(*kj) * (partial + i as u128 + 1);
                }
                let want = Rat::new(1.into(), (den as i64).into());
                let ok = alpha(&k).map(|a| a == want).unwrap_or(false);
                out.push(Check::flag(format!("alpha{:?}", k.0), ok));
            }
        }
    }
    out
}

fn main() -> ExitCode {
    let outcomes = [
        report(1, "heat-trace oracle", Some(30.0), || trace_oracle("heat")),
        report(2, "toeplitz-trace oracle", Some(30.0), || trace_oracle("toeplitz")),
        report(3, "pole sets", None, pole_sets),
        report(4, "free-group counterexample", Some(60.0), free_group),
        report(5, "circle counterexample", Some(20.0), || family("circle")),
        report(6, "moebius counterexample", Some(120.0), || family("moebius")),
        report(7, "summability", None, summability),
        report(8, "higher-order thresholds", None, higher_order),
        report(9, "integral formula", None, integral_formula),
        report(10, "coefficient combinatorics", None, combinatorics),
    ];
    let unexpected: usize = outcomes.iter().map(|o| o.unexpected).sum();
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} unexpected failures");
        ExitCode::FAILURE
    }
}
