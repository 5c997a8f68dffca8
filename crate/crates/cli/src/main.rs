//! `cscap`: capacity, spectra and maxentropic processes of weighted
//! constrained systems.
//!
//! Exit codes: 0 success or VALID, 2 INVALID, 3 budget exhausted, 1 error.

use std::f64::consts::LN_2;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cscap_core::dsl::{build_jk_system, parse_system, SystemDef};
use cscap_core::exec::Execution;
use cscap_core::genfun::{abscissa, capacity_jk, jk_table, system_gf, CapacityKind, MAX_JK};
use cscap_core::maxent::{
    jk_phrase_support, maxentropic_pmf, parse_pmf_text, parse_support_text, rate_bound,
    sample_replicas, solve_rate, truncated_supports, validate_input_process, validate_input_source,
    write_pmf, Pmf, ValidationReport, WeightedSupport, DEFAULT_MAX_TUPLES,
};
use cscap_core::spectrum::{
    c0_estimate, capacity_estimate, cross_check_gf, density_check, enumerate_spectrum_with,
    write_spectrum, CrossVerdict, DEFAULT_WEIGHT_EPSILON,
};

type BoxError = Box<dyn std::error::Error>;

#[derive(Parser, Debug)]
#[command(
    name = "cscap",
    version,
    about = "Capacity of weighted constrained systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Capacity as the abscissa of convergence of the generating function.
    Capacity {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Enumerate the weight spectrum and print finite-horizon estimates.
    Spectrum {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        budget: Budget,
        /// Density check constant L in `max_{nu_k < n} k <= L n^K`.
        #[arg(long, default_value_t = 1.0)]
        density_l: f64,
        /// Density check exponent K.
        #[arg(long, default_value_t = 2.0)]
        density_k: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Compare the enumerated partial sum with the generating function.
    Crosscheck {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        budget: Budget,
        /// Real point at which both sides are evaluated.
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Maximum entropy per weight and the maxentropic PMF of a finite support.
    Maxent {
        #[command(flatten)]
        system: OptSystemArgs,
        /// Support file, `string weight` per line; defaults to the (j,k)
        /// phrase alphabet with --jk.
        #[arg(long)]
        support: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Check input-source or input-process conditions to a finite depth.
    Validate {
        #[command(flatten)]
        system: SystemArgs,
        /// Support file for one level of a source; repeat in level order.
        #[arg(long = "source-level", conflicts_with = "pmf")]
        source_level: Vec<PathBuf>,
        /// Block PMF file, `string weight prob` per line.
        #[arg(long, required_unless_present = "source_level")]
        pmf: Option<PathBuf>,
        /// Number of levels to materialise for --pmf.
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Cap on block tuples formed for --pmf.
        #[arg(long, default_value_t = DEFAULT_MAX_TUPLES)]
        max_tuples: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Draw IID blocks from a PMF and compare empirical and exact rates.
    Simulate {
        #[command(flatten)]
        system: OptSystemArgs,
        /// Block PMF file; defaults to the maxentropic (j,k) phrase process
        /// with --jk.
        #[arg(long)]
        pmf: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        blocks: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Independent replicas with seeds seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        replicas: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Capacity of every (j,k) run-length system on a grid.
    JkTable {
        #[arg(long, default_value_t = 8)]
        j_max: usize,
        #[arg(long, default_value_t = 8)]
        k_max: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct SystemArgs {
    /// System description file.
    #[arg(long)]
    system: Option<PathBuf>,
    /// Built-in (j,k) run-length system.
    #[arg(long, num_args = 2, value_names = ["J", "K"])]
    jk: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
#[group(required = false, multiple = false)]
struct OptSystemArgs {
    /// System description file.
    #[arg(long)]
    system: Option<PathBuf>,
    /// Built-in (j,k) run-length system.
    #[arg(long, num_args = 2, value_names = ["J", "K"])]
    jk: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
struct Budget {
    /// Enumerate strings of weight up to this bound.
    #[arg(long, default_value_t = 16.0)]
    max_weight: f64,
    /// Search budget per enumeration shard.
    #[arg(long, default_value_t = 10_000_000)]
    max_strings: u64,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Units::Nats)]
    units: Units,
    /// Also write the result as a delimited text file.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Run everything on the current thread.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Units {
    Nats,
    Bits,
}

impl Units {
    fn show(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats / LN_2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }
}

enum Status {
    Ok,
    Invalid,
    Budget,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Invalid) => ExitCode::from(2),
        Ok(Status::Budget) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<Status, BoxError> {
    match command {
        Command::Capacity { system, common } => {
            let jk = system.jk.as_deref().map(|v| (v[0], v[1]));
            cmd_capacity(&system.load()?, jk, &common)
        }
        Command::Spectrum {
            system,
            budget,
            density_l,
            density_k,
            common,
        } => cmd_spectrum(&system.load()?, &budget, density_l, density_k, &common),
        Command::Crosscheck {
            system,
            budget,
            s,
            common,
        } => cmd_crosscheck(&system.load()?, &budget, s, &common),
        Command::Maxent {
            system,
            support,
            common,
        } => cmd_maxent(&system, support.as_deref(), &common),
        Command::Validate {
            system,
            source_level,
            pmf,
            depth,
            max_tuples,
            common,
        } => {
            let sys = system.load()?;
            match pmf {
                Some(p) => cmd_validate_process(&sys, &p, depth, max_tuples, &common),
                None => cmd_validate_source(&sys, &source_level, &common),
            }
        }
        Command::Simulate {
            system,
            pmf,
            blocks,
            seed,
            replicas,
            common,
        } => cmd_simulate(&system, pmf.as_deref(), blocks, seed, replicas, &common),
        Command::JkTable {
            j_max,
            k_max,
            common,
        } => cmd_jk_table(j_max, k_max, &common),
    }
}

fn load_system(path: Option<&Path>, jk: Option<&[usize]>) -> Result<Option<SystemDef>, BoxError> {
    match (path, jk) {
        (Some(p), _) => {
            let text = read(p)?;
            Ok(Some(
                parse_system(&text).map_err(|e| format!("{}: {e}", p.display()))?,
            ))
        }
        (None, Some(&[j, k])) => Ok(Some(build_jk_system(j, k)?)),
        _ => Ok(None),
    }
}

impl SystemArgs {
    fn load(&self) -> Result<SystemDef, BoxError> {
        load_system(self.system.as_deref(), self.jk.as_deref())?
            .ok_or_else(|| "one of --system or --jk is required".into())
    }
}

impl OptSystemArgs {
    fn load(&self) -> Result<Option<SystemDef>, BoxError> {
        load_system(self.system.as_deref(), self.jk.as_deref())
    }

    fn jk(&self) -> Option<(usize, usize)> {
        self.jk.as_deref().map(|v| (v[0], v[1]))
    }
}

fn read(path: &Path) -> Result<String, BoxError> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

/// Prints `key: value` lines and writes them tab-separated to `--output`.
struct Report {
    rows: Vec<(String, String)>,
}

impl Report {
    fn new() -> Self {
        Report { rows: Vec::new() }
    }

    fn add(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.rows.push((key.to_string(), value.to_string()));
        self
    }

    fn emit(&self, output: Option<&Path>) -> Result<(), BoxError> {
        for (k, v) in &self.rows {
            println!("{k}: {v}");
        }
        if let Some(path) = output {
            let text: String = self
                .rows
                .iter()
                .map(|(k, v)| format!("{k}\t{v}\n"))
                .collect();
            write_file(path, &text)?;
        }
        Ok(())
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), BoxError> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn fmt_rate(x: f64, units: Units) -> String {
    format!("{:.12} {}", units.show(x), units.name())
}

fn kind_name(kind: CapacityKind) -> &'static str {
    match kind {
        CapacityKind::Finite => "finite",
        CapacityKind::FiniteLanguage => "finite-language",
        CapacityKind::EmptyLanguage => "empty-language",
    }
}

fn cmd_capacity(
    sys: &SystemDef,
    jk: Option<(usize, usize)>,
    common: &Common,
) -> Result<Status, BoxError> {
    let r = abscissa(&system_gf(sys), common.tol)?;
    let u = common.units;
    let mut rep = Report::new();
    rep.add("system", &sys.name)
        .add("capacity", fmt_rate(r.q, u))
        .add("kind", kind_name(r.kind))
        .add(
            "bracket",
            format!(
                "[{:.15}, {:.15}]",
                u.show(r.bracket_lo),
                u.show(r.bracket_hi)
            ),
        )
        .add("residual", format!("{:.3e}", r.residual))
        .add("iterations", r.iterations);
    if let Some((j, k)) = jk {
        rep.add(
            "run_length_root",
            fmt_rate(capacity_jk(j, k, common.tol)?, u),
        );
    }
    rep.emit(common.output.as_deref())?;
    Ok(Status::Ok)
}

fn cmd_spectrum(
    sys: &SystemDef,
    budget: &Budget,
    l: f64,
    k: f64,
    common: &Common,
) -> Result<Status, BoxError> {
    let sp = enumerate_spectrum_with(
        sys,
        budget.max_weight,
        budget.max_strings,
        DEFAULT_WEIGHT_EPSILON,
        common.exec(),
    )?;
    let u = common.units;
    let mut rep = Report::new();
    rep.add("system", &sys.name)
        .add("horizon", sp.horizon())
        .add("complete", sp.is_complete())
        .add("entries", sp.len())
        .add("strings", sp.cumulative().last().copied().unwrap_or(0))
        .add("empty_string", sp.contains_empty())
        .add("visited", sp.visited)
        .add("duplicates", sp.duplicates);
    match (capacity_estimate(&sp), c0_estimate(&sp)) {
        (Ok(c), Ok(c0)) => {
            rep.add("capacity_estimate", fmt_rate(c.at_horizon, u))
                .add("capacity_estimate_tail_max", fmt_rate(c.tail_max, u))
                .add("c0_estimate", fmt_rate(c0.at_horizon, u))
                .add("c0_estimate_tail_max", fmt_rate(c0.tail_max, u));
        }
        (Err(e), _) | (_, Err(e)) => {
            rep.add("estimates", format!("unavailable ({e})"));
        }
    }
    let d = density_check(&sp, l, k);
    rep.add(
        "density",
        if d.satisfied {
            format!("satisfied L={l} K={k} up to n={}", d.checked_up_to)
        } else {
            format!("violated L={l} K={k} at n={}", d.worst_n)
        },
    );
    for (key, v) in &rep.rows {
        println!("{key}: {v}");
    }
    if let Some(path) = &common.output {
        write_file(path, &write_spectrum(&sp))?;
    }
    Ok(if sp.is_complete() {
        Status::Ok
    } else {
        Status::Budget
    })
}

fn cmd_crosscheck(
    sys: &SystemDef,
    budget: &Budget,
    s: f64,
    common: &Common,
) -> Result<Status, BoxError> {
    let sp = enumerate_spectrum_with(
        sys,
        budget.max_weight,
        budget.max_strings,
        DEFAULT_WEIGHT_EPSILON,
        common.exec(),
    )?;
    let cc = cross_check_gf(&sp, &system_gf(sys), s)?;
    let verdict = match cc.verdict {
        CrossVerdict::Consistent => "CONSISTENT",
        CrossVerdict::Ambiguous => "AMBIGUOUS",
        CrossVerdict::Undercount => "UNDERCOUNT",
    };
    let mut rep = Report::new();
    rep.add("system", &sys.name)
        .add("s", s)
        .add("horizon", sp.horizon())
        .add("complete", sp.is_complete())
        .add("partial_sum", format!("{:.12}", cc.partial_sum))
        .add("gf_value", format!("{:.12}", cc.gf_value))
        .add("difference", format!("{:.3e}", cc.difference))
        .add("tail_bound", format!("{:.3e}", cc.tail_bound))
        .add("verdict", verdict);
    rep.emit(common.output.as_deref())?;
    Ok(match cc.verdict {
        CrossVerdict::Consistent => Status::Ok,
        _ => Status::Invalid,
    })
}

fn cmd_maxent(
    system: &OptSystemArgs,
    support: Option<&Path>,
    common: &Common,
) -> Result<Status, BoxError> {
    let sys = system.load()?;
    let support = match (support, system.jk()) {
        (Some(p), _) => parse_support_text(&read(p)?, sys.as_ref())?.0,
        (None, Some((j, k))) => jk_phrase_support(j, k)?,
        (None, None) => return Err("--support is required unless --jk is given".into()),
    };
    let r = solve_rate(&support, common.tol)?;
    let pmf = maxentropic_pmf(&support, common.tol)?;
    let u = common.units;
    let mut rep = Report::new();
    rep.add("support_size", support.len())
        .add("rate", fmt_rate(r.rate, u))
        .add("residual", format!("{:.3e}", r.residual))
        .add("entropy", fmt_rate(r.entropy, u))
        .add("mean_weight", format!("{:.12}", r.mean_weight))
        .add("degenerate", r.degenerate);
    if let Some(sys) = &sys {
        let q = abscissa(&system_gf(sys), common.tol)?.q;
        rep.add("capacity", fmt_rate(q, u))
            .add("capacity_minus_rate", fmt_rate(q - r.rate, u));
    }
    for (k, v) in &rep.rows {
        println!("{k}: {v}");
    }
    println!("# string weight prob");
    print!("{}", write_pmf(&pmf));
    if let Some(path) = &common.output {
        write_file(path, &write_pmf(&pmf))?;
    }
    Ok(Status::Ok)
}

fn finish_validation(
    sys: &SystemDef,
    report: &ValidationReport,
    levels: &[WeightedSupport],
    common: &Common,
) -> Result<Status, BoxError> {
    let mut text = report.to_string();
    if report.is_valid() && !levels.is_empty() {
        let u = common.units;
        let rb = rate_bound(levels, common.tol)?;
        let q = abscissa(&system_gf(sys), common.tol)?.q;
        let seq: Vec<String> = rb
            .sequence
            .iter()
            .map(|r| format!("{:.12}", u.show(*r)))
            .collect();
        let _ = writeln!(text, "rate_sequence: {}", seq.join(","));
        let _ = writeln!(text, "rate_bound: {}", fmt_rate(rb.bound, u));
        let _ = writeln!(text, "capacity: {}", fmt_rate(q, u));
    }
    let _ = writeln!(
        text,
        "note: verified to depth {} only",
        report.verified_depth
    );
    print!("{text}");
    if let Some(path) = &common.output {
        write_file(path, &text)?;
    }
    Ok(if !report.is_valid() {
        Status::Invalid
    } else if report.partial {
        Status::Budget
    } else {
        Status::Ok
    })
}

fn cmd_validate_source(
    sys: &SystemDef,
    files: &[PathBuf],
    common: &Common,
) -> Result<Status, BoxError> {
    let levels = files
        .iter()
        .map(|p| {
            parse_support_text(&read(p)?, Some(sys))
                .map(|(s, _)| s)
                .map_err(|e| format!("{}: {e}", p.display()).into())
        })
        .collect::<Result<Vec<_>, BoxError>>()?;
    let report = validate_input_source(&levels, sys);
    finish_validation(sys, &report, &levels, common)
}

fn cmd_validate_process(
    sys: &SystemDef,
    pmf_path: &Path,
    depth: usize,
    max_tuples: u64,
    common: &Common,
) -> Result<Status, BoxError> {
    let pmf = parse_pmf_text(&read(pmf_path)?, Some(sys))
        .map_err(|e| format!("{}: {e}", pmf_path.display()))?;
    let report = validate_input_process(&pmf, sys, depth, max_tuples)?;
    let (levels, _, _) = truncated_supports(&pmf, report.verified_depth, max_tuples);
    finish_validation(sys, &report, &levels, common)
}

fn cmd_simulate(
    system: &OptSystemArgs,
    pmf_path: Option<&Path>,
    blocks: usize,
    seed: u64,
    replicas: u64,
    common: &Common,
) -> Result<Status, BoxError> {
    let sys = system.load()?;
    let pmf: Pmf = match (pmf_path, system.jk()) {
        (Some(p), _) => {
            parse_pmf_text(&read(p)?, sys.as_ref()).map_err(|e| format!("{}: {e}", p.display()))?
        }
        (None, Some((j, k))) => maxentropic_pmf(&jk_phrase_support(j, k)?, common.tol)?,
        (None, None) => return Err("--pmf is required unless --jk is given".into()),
    };
    if replicas == 0 {
        return Err("--replicas must be at least 1".into());
    }
    let seeds: Vec<u64> = (0..replicas).map(|i| seed.wrapping_add(i)).collect();
    let runs = sample_replicas(&pmf, blocks, &seeds, sys.as_ref(), common.exec())?;
    let u = common.units;
    let first = &runs[0];
    println!("blocks: {blocks}");
    println!("entropy_per_block: {}", fmt_rate(first.entropy, u));
    println!("mean_weight: {:.12}", first.mean_weight);
    println!("rate: {}", fmt_rate(first.rate, u));
    println!("rate_std_error: {:.3e}", u.show(first.rate_std_error));
    println!("# seed empirical_rate accepted");
    let mut rejected = false;
    for r in &runs {
        let acc = match r.accepted {
            Some(a) => {
                rejected |= !a;
                a.to_string()
            }
            None => "-".to_string(),
        };
        println!("{} {:.12} {acc}", r.seed, u.show(r.empirical_rate));
    }
    if runs.len() > 1 {
        let n = runs.len() as f64;
        let mean = runs.iter().map(|r| r.empirical_rate).sum::<f64>() / n;
        let var = runs
            .iter()
            .map(|r| (r.empirical_rate - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        println!("replica_mean: {}", fmt_rate(mean, u));
        println!("replica_std: {:.3e}", u.show(var.sqrt()));
    }
    if let Some(path) = &common.output {
        write_file(path, &format!("{}\n", first.word))?;
    }
    Ok(if rejected {
        Status::Invalid
    } else {
        Status::Ok
    })
}

fn cmd_jk_table(j_max: usize, k_max: usize, common: &Common) -> Result<Status, BoxError> {
    if j_max == 0 || k_max == 0 || j_max > MAX_JK || k_max > MAX_JK {
        return Err(format!("--j-max and --k-max must lie in 1..={MAX_JK}").into());
    }
    let table = jk_table(j_max, k_max, common.tol, common.exec())?;
    let u = common.units;
    let mut text = String::new();
    let _ = write!(text, "j\\k");
    for k in 1..=k_max {
        let _ = write!(text, "\t{k}");
    }
    text.push('\n');
    for (j, row) in table.iter().enumerate() {
        let _ = write!(text, "{}", j + 1);
        for c in row {
            let _ = write!(text, "\t{:.6}", u.show(*c));
        }
        text.push('\n');
    }
    println!("# capacity in {}", u.name());
    print!("{text}");
    if let Some(path) = &common.output {
        write_file(path, &text)?;
    }
    Ok(Status::Ok)
}
