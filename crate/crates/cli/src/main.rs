use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use logdamp_core::experiments::{run, ExperimentConfig};
use logdamp_core::report::Format;

#[derive(Parser)]
#[command(name = "logdamp", version, about = "Run spectral-triple experiments and emit reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form heat and Toeplitz traces against truncated vertex sums
    HeatOracle(Flags),
    /// Pole base points and orders of the closed-form traces
    PoleAudit(Flags),
    /// Index pairing next to the residue cochain for one model family
    Counterexample(Flags),
    /// Dampening identities, integral formula and exponentiated summability
    DampSweep(Flags),
    /// ε-bounded commutator sweeps on the lattice boundary module
    PvOrder(Flags),
    /// Summability abscissa of the free-group Dirac operator
    Summability(Flags),
}

#[derive(Args, Default)]
struct Flags {
    /// Config file with [experiment], [family], [truncation], [grid] and [tolerance] sections
    #[arg(long)]
    config: Option<PathBuf>,
    /// Free-group rank
    #[arg(long)]
    d: Option<usize>,
    /// Fixed-point letter of t = t0^∞ (e.g. a1)
    #[arg(long)]
    t: Option<String>,
    /// Generator whose translation is paired (counterexample)
    #[arg(long)]
    gamma: Option<String>,
    /// Monomial chain, e.g. `a1:a1,a2:`
    #[arg(long)]
    chain: Option<String>,
    /// Model family: free_group, circle or moebius
    #[arg(long)]
    family: Option<String>,
    /// Exponent grid (comma separated); for pv-order the scaling exponent s
    #[arg(long, value_delimiter = ',')]
    s: Option<Vec<f64>>,
    /// Vertex truncation (heat-oracle) or largest lattice size (pv-order)
    #[arg(long = "L")]
    l: Option<usize>,
    /// Fourier mode truncation
    #[arg(long = "M")]
    m: Option<usize>,
    /// ε grid (comma separated)
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Hyperbolic Möbius parameter τ
    #[arg(long)]
    tau: Option<f64>,
    /// Output path; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// json or csv
    #[arg(long)]
    format: Option<Format>,
}

fn lattice_sweep(l: usize) -> Vec<usize> {
    let mut v = Vec::new();
    let mut k = 8;
    while k < l {
        v.push(k);
        k *= 2;
    }
    v.push(l);
    v
}

fn build_config(name: &str, f: &Flags) -> anyhow::Result<ExperimentConfig> {
    let mut c: ExperimentConfig = match &f.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(n) = &c.experiment.name {
        if n != name {
            eprintln!("note: config names experiment {n:?}; running {name}");
        }
    }
    c.experiment.name = Some(name.to_string());
    if f.d.is_some() {
        c.family.d = f.d;
    }
    if f.t.is_some() {
        c.family.t = f.t.clone();
    }
    if f.gamma.is_some() {
        c.family.gamma = f.gamma.clone();
    }
    if f.chain.is_some() {
        c.family.chain = f.chain.clone();
    }
    if f.family.is_some() {
        c.family.family = f.family.clone();
    }
    if f.tau.is_some() {
        c.family.moebius_tau = f.tau;
    }
    if let Some(s) = &f.s {
        if name == "pv-order" {
            match s.as_slice() {
                [x] => c.family.pv_s = Some(*x),
                _ => bail!("pv-order takes a single --s"),
            }
        } else {
            c.grid.s = Some(s.clone());
        }
    }
    if let Some(l) = f.l {
        if name == "pv-order" {
            c.truncation.l_sweep = Some(lattice_sweep(l));
        } else {
            c.truncation.l = Some(l);
        }
    }
    if f.m.is_some() {
        c.truncation.m = f.m;
    }
    if f.eps.is_some() {
        c.grid.eps = f.eps.clone();
    }
    if let Some(o) = &f.out {
        c.experiment.out = Some(o.display().to_string());
    }
    if f.format.is_some() {
        c.experiment.format = f.format;
    }
    Ok(c)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, flags) = match &cli.command {
        Command::HeatOracle(f) => ("heat-oracle", f),
        Command::PoleAudit(f) => ("pole-audit", f),
        Command::Counterexample(f) => ("counterexample", f),
        Command::DampSweep(f) => ("damp-sweep", f),
        Command::PvOrder(f) => ("pv-order", f),
        Command::Summability(f) => ("summability", f),
    };
    match execute(name, flags) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(name: &str, flags: &Flags) -> anyhow::Result<bool> {
    let config = build_config(name, flags)?;
    let report = run(&config)?;
    let format = config.experiment.format.unwrap_or(Format::Json);
    match &config.experiment.out {
        Some(p) => report.emit(p.as_ref(), format)?,
        None => {
            let text = match format {
                Format::Json => report.to_json()?,
                Format::Csv => report.to_csv()?,
            };
            print!("{text}");
        }
    }
    let failed = report.checks.iter().filter(|c| !c.pass).count();
    eprintln!(
        "{} {name}: {} checks, {failed} failed, {:.2}s",
        if report.verdict { "PASS" } else { "FAIL" },
        report.checks.len(),
        report.wall_clock_seconds
    );
    Ok(report.verdict)
}
