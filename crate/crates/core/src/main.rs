use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use baryolson::cache::{default_cache_path, Cache, Lookup};
use baryolson::constructions::{behrend_witness, lb_witness, th8_witness, WitnessRecord};
use baryolson::engine::{bo_exhaustive, BoResult, SearchConfig};
use baryolson::error::Error;
use baryolson::group::FiniteAbelianGroup;
use baryolson::suites::{run_suite, SuiteKind, SuiteLimits};
use baryolson::theory::{bo_corner, bound_report, BoundReport};

#[derive(Parser)]
#[command(
    name = "baryolson",
    version,
    about = "Exact k-th barycentric Olson constants of finite abelian groups",
    after_help = "Exit codes: 0 success, 1 error, 2 search inconclusive under \
                  the node budget, 3 exhaustive value contradicts a theorem \
                  (implementation bug)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute BO(k, G) exactly, consulting and filling the result cache
    Compute(ComputeArgs),
    /// Run a named verification suite and report per-case results
    Verify(VerifyArgs),
    /// Build an extremal witness set and print it as JSON
    Construct(ConstructArgs),
    /// Print every applicable closed-form bound for (G, k)
    Bounds(BoundsArgs),
    /// Tabulate BO(k, Z/p) for all primes p up to a limit, 3 <= k <= p-3
    Table(TableArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Table,
    Csv,
    Json,
}

#[derive(Args)]
struct GroupSelector {
    /// Invariant factors, comma separated (e.g. "11" or "2,4")
    #[arg(long, conflicts_with = "p")]
    group: Option<String>,
    /// Shorthand for the cyclic group of prime order p
    #[arg(long)]
    p: Option<u64>,
}

impl GroupSelector {
    fn resolve(&self) -> Result<FiniteAbelianGroup, Error> {
        match (&self.group, self.p) {
            (Some(spec), None) => spec.parse(),
            (None, Some(p)) => {
                if !baryolson::arith::is_prime(p) {
                    return Err(Error::InvalidArgument(format!("--p {p} is not prime")));
                }
                FiniteAbelianGroup::cyclic(p)
            }
            (None, None) => Err(Error::InvalidArgument(
                "one of --group or --p is required".into(),
            )),
            (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
        }
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get().min(8))
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    selector: GroupSelector,
    #[arg(long)]
    k: u64,
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
    /// Abort with bounds-so-far after this many search nodes
    #[arg(long)]
    node_budget: Option<u64>,
    /// Cache file (default: $BARYOLSON_CACHE or ./baryolson-cache.csv)
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
}

#[derive(Args)]
struct VerifyArgs {
    /// corner, w1, dsh, proptech, th8, ubpol, chi, sklemma, constructions, or all
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 16)]
    max_order: u64,
    #[arg(long, default_value_t = 13)]
    max_prime: u64,
    #[arg(long, default_value_t = 25)]
    max_n: u64,
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
}

#[derive(Args)]
struct ConstructArgs {
    /// lb, th8, or behrend
    #[arg(long)]
    method: ConstructMethod,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    /// Prime for the coset construction
    #[arg(long)]
    p: Option<u64>,
    /// Digit count for the digit-shell construction (default: best over all)
    #[arg(long)]
    m: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ConstructMethod {
    Lb,
    Th8,
    Behrend,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    selector: GroupSelector,
    #[arg(long)]
    k: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
}

#[derive(Args)]
struct TableArgs {
    /// Largest prime to tabulate
    #[arg(long, default_value_t = 13)]
    max_prime: u64,
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
    #[arg(long)]
    node_budget: Option<u64>,
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Compute(args) => cmd_compute(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Construct(args) => cmd_construct(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Table(args) => cmd_table(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::BudgetExhausted { .. } => ExitCode::from(2),
                Error::TheoremContradiction(_) => ExitCode::from(3),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

/// A computed value must agree with every applicable theorem; the formulas
/// are proved, so a mismatch is an implementation bug worth a loud dump.
fn cross_check(result: &BoResult, report: &BoundReport) -> Result<(), Error> {
    if let Some(corner) = bo_corner(&result.group, result.k) {
        if corner != result.value {
            return Err(Error::TheoremContradiction(format!(
                "BO({}, {}) computed as {} but the corner formula says {corner}; \
                 witness {}",
                result.k,
                result.group,
                result.value,
                result.witness.element_list_string()
            )));
        }
    }
    if !report.admits(result.value) {
        return Err(Error::TheoremContradiction(format!(
            "BO({}, {}) computed as {} violates bounds {:?}..{:?} exact {:?}; witness {}",
            result.k,
            result.group,
            result.value,
            report.best_lower(),
            report.best_upper(),
            report.exact,
            result.witness.element_list_string()
        )));
    }
    Ok(())
}

fn compute_with_cache(
    group: &FiniteAbelianGroup,
    k: u64,
    config: &SearchConfig,
    cache: &mut Cache,
) -> Result<BoResult, Error> {
    let report = bound_report(group, k)?;
    match cache.lookup(group, k) {
        Lookup::Hit(result) => {
            cross_check(&result, &report)?;
            return Ok(result);
        }
        Lookup::Rejected(reason) => {
            eprintln!("warning: ignoring cache entry for ({group}, {k}): {reason}");
        }
        Lookup::Miss => {}
    }
    let result = match bo_exhaustive(group, k, config) {
        Ok(result) => result,
        Err(Error::BudgetExhausted { lower, upper }) => {
            // fold in what the theorems already know before giving up
            let lower = lower.max(report.best_lower().unwrap_or(0));
            let upper = upper.min(report.best_upper().unwrap_or(u64::MAX));
            return Err(Error::BudgetExhausted { lower, upper });
        }
        Err(e) => return Err(e),
    };
    cross_check(&result, &report)?;
    cache.put(&result)?;
    Ok(result)
}

fn witness_strings(result: &BoResult) -> Vec<String> {
    result.witness.iter().map(|g| g.to_string()).collect()
}

fn cmd_compute(args: ComputeArgs) -> Result<ExitCode, Error> {
    let group = args.selector.resolve()?;
    let config = SearchConfig {
        worker_count: args.workers,
        node_budget: args.node_budget,
        ..SearchConfig::default()
    };
    let mut cache = Cache::open(args.cache.unwrap_or_else(default_cache_path))?;
    for warning in &cache.load_warnings {
        eprintln!("warning: cache: {warning}");
    }
    let result = compute_with_cache(&group, args.k, &config, &mut cache)?;

    match args.format {
        OutputFormat::Table => {
            println!(
                "BO({}, {:?}) = {}  [{}] in {:.1?}",
                result.k, result.group, result.value, result.method, result.elapsed
            );
            println!("witness ({}): {}", result.witness.len(), result.witness.element_list_string());
        }
        OutputFormat::Csv => {
            println!("group;k;value;witness;method");
            println!(
                "{};{};{};{};{}",
                result.group,
                result.k,
                result.value,
                result.witness.element_list_string(),
                result.method
            );
        }
        OutputFormat::Json => {
            let doc = json!({
                "group": result.group.to_string(),
                "k": result.k,
                "value": result.value,
                "witness": witness_strings(&result),
                "method": result.method.to_string(),
                "elapsed_ms": result.elapsed.as_secs_f64() * 1e3,
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let limits = SuiteLimits {
        max_order: args.max_order,
        max_prime: args.max_prime,
        max_n: args.max_n,
        workers: args.workers,
    };
    let kinds: Vec<SuiteKind> = if args.suite == "all" {
        SuiteKind::ALL.to_vec()
    } else {
        vec![args.suite.parse()?]
    };

    let mut all_passed = true;
    for kind in kinds {
        let report = run_suite(kind, &limits)?;
        for case in &report.cases {
            println!(
                "{} [{kind}] {}: {}",
                if case.passed { "ok  " } else { "FAIL" },
                case.label,
                case.detail
            );
        }
        let failures = report.failures();
        println!(
            "suite {kind}: {} cases, {failures} failures",
            report.cases.len()
        );
        all_passed &= failures == 0;
    }
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn witness_json(record: &WitnessRecord) -> serde_json::Value {
    let elements: Vec<String> = record.set.iter().map(|g| g.to_string()).collect();
    json!({
        "n": record.n,
        "k": record.k,
        "method": record.method.to_string(),
        "params": record.params.map(|p| json!({
            "d": p.d,
            "m": p.m,
            "r": p.r,
            "base": p.base,
            "degenerate": p.degenerate,
        })),
        "elements": elements,
        "verified": record.verified,
    })
}

fn cmd_construct(args: ConstructArgs) -> Result<ExitCode, Error> {
    let need = |value: Option<u64>, flag: &str| {
        value.ok_or_else(|| Error::InvalidArgument(format!("--{flag} is required here")))
    };
    let record = match args.method {
        ConstructMethod::Lb => lb_witness(need(args.n, "n")?, need(args.k, "k")?)?,
        ConstructMethod::Th8 => th8_witness(need(args.p.or(args.n), "p")?)?,
        ConstructMethod::Behrend => {
            behrend_witness(need(args.n, "n")?, need(args.k, "k")?, args.m)?
        }
    };
    println!("{}", serde_json::to_string_pretty(&witness_json(&record)).unwrap());
    Ok(ExitCode::SUCCESS)
}

fn cmd_bounds(args: BoundsArgs) -> Result<ExitCode, Error> {
    let group = args.selector.resolve()?;
    let report = bound_report(&group, args.k)?;

    match args.format {
        OutputFormat::Table => {
            println!("bounds for BO({}, {:?}):", report.k, report.group);
            for (value, tag) in &report.lower_bounds {
                println!("  lower {value:>4}  [{tag}]");
            }
            for (value, tag) in &report.upper_bounds {
                println!("  upper {value:>4}  [{tag}]");
            }
            match report.exact {
                Some((value, tag)) => println!("  exact {value:>4}  [{tag}]"),
                None => println!("  exact    -"),
            }
        }
        OutputFormat::Csv => {
            println!("kind;value;tag");
            for (value, tag) in &report.lower_bounds {
                println!("lower;{value};{tag}");
            }
            for (value, tag) in &report.upper_bounds {
                println!("upper;{value};{tag}");
            }
            if let Some((value, tag)) = report.exact {
                println!("exact;{value};{tag}");
            }
        }
        OutputFormat::Json => {
            let pair = |entries: &[(u64, baryolson::theory::TheoremTag)]| -> Vec<serde_json::Value> {
                entries
                    .iter()
                    .map(|(v, t)| json!({"value": v, "tag": t.to_string()}))
                    .collect()
            };
            let doc = json!({
                "group": report.group.to_string(),
                "k": report.k,
                "lower_bounds": pair(&report.lower_bounds),
                "upper_bounds": pair(&report.upper_bounds),
                "exact": report.exact.map(|(v, t)| json!({"value": v, "tag": t.to_string()})),
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
    }
    Ok(ExitCode::SUCCESS)
}

struct TableRow {
    p: u64,
    k: u64,
    value: u64,
    witness: String,
    tags: Vec<String>,
}

fn cmd_table(args: TableArgs) -> Result<ExitCode, Error> {
    if args.max_prime < 7 {
        return Err(Error::InvalidArgument(
            "--max-prime must be at least 7".into(),
        ));
    }
    let mut cache = Cache::open(args.cache.unwrap_or_else(default_cache_path))?;
    for warning in &cache.load_warnings {
        eprintln!("warning: cache: {warning}");
    }

    let pairs: Vec<(u64, u64)> = (7..=args.max_prime)
        .filter(|&p| baryolson::arith::is_prime(p))
        .flat_map(|p| (3..=p - 3).map(move |k| (p, k)))
        .collect();

    // fan the (p, k) computations out to workers; cache writes and output
    // stay serialized behind the parallel section
    let per_pair = SearchConfig {
        worker_count: 1,
        node_budget: args.node_budget,
        ..SearchConfig::default()
    };
    let cache_ref = &cache;
    let results: Mutex<Vec<(usize, Result<BoResult, Error>)>> = Mutex::new(Vec::new());
    let cursor = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..args.workers.max(1) {
            scope.spawn(|| loop {
                let i = cursor.fetch_add(1, Ordering::Relaxed);
                let Some(&(p, k)) = pairs.get(i) else { return };
                let group = FiniteAbelianGroup::cyclic(p).expect("prime order");
                let outcome = match cache_ref.lookup(&group, k) {
                    Lookup::Hit(hit) => Ok(hit),
                    _ => bo_exhaustive(&group, k, &per_pair),
                };
                results.lock().unwrap().push((i, outcome));
            });
        }
    });

    let mut computed = results.into_inner().unwrap();
    computed.sort_by_key(|&(i, _)| i);

    let mut rows = Vec::with_capacity(pairs.len());
    for ((p, k), (_, outcome)) in pairs.iter().copied().zip(computed) {
        let result = outcome?;
        let group = result.group.clone();
        let report = bound_report(&group, k)?;
        cross_check(&result, &report)?;
        if result.method != baryolson::engine::Method::Cached {
            cache.put(&result)?;
        }
        let mut tags: Vec<String> = report
            .lower_bounds
            .iter()
            .chain(report.upper_bounds.iter())
            .map(|(_, tag)| tag.to_string())
            .collect();
        if let Some((_, tag)) = report.exact {
            tags.push(tag.to_string());
        }
        tags.sort();
        tags.dedup();
        rows.push(TableRow {
            p,
            k,
            value: result.value,
            witness: result.witness.element_list_string(),
            tags,
        });
    }

    match args.format {
        OutputFormat::Table => {
            println!("{:>5} {:>4} {:>4}  {:<30} tags", "p", "k", "BO", "witness");
            for row in &rows {
                println!(
                    "{:>5} {:>4} {:>4}  {:<30} {}",
                    row.p,
                    row.k,
                    row.value,
                    row.witness,
                    row.tags.join("+")
                );
            }
        }
        OutputFormat::Csv => {
            println!("p;k;bo;witness;tags");
            for row in &rows {
                println!(
                    "{};{};{};{};{}",
                    row.p,
                    row.k,
                    row.value,
                    row.witness,
                    row.tags.join("+")
                );
            }
        }
        OutputFormat::Json => {
            let docs: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    json!({
                        "p": row.p,
                        "k": row.k,
                        "bo": row.value,
                        "witness": row.witness,
                        "tags": row.tags,
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&docs).unwrap());
        }
    }
    Ok(ExitCode::SUCCESS)
}
