//! `triscore`: bounds, exact search, constructions, verification suites and
//! sweeps for triple-score intersecting families.
//!
//! Results go to stdout as JSON, CSV or family text; diagnostics go to
//! stderr. Exit codes: 0 success, 2 usage or invalid parameters, 3 resource
//! cap, 4 verification failure.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tri_intersect::bounds::{bound_report_g, bound_report_h};
use tri_intersect::constructions::ConstructionSpec;
use tri_intersect::format::{parse_family, write_family, FamilyJson};
use tri_intersect::search::{exact_g, exact_h, m_sweep, Method, SearchOptions, SearchResult, DEFAULT_CAP};
use tri_intersect::sets::is_member_h;
use tri_intersect::verify::{check_family, run_suite, Suite, SuiteReport, VerifyConfig};
use tri_intersect::Error;

#[derive(Parser)]
#[command(name = "triscore", version, about = "Triple-score intersecting set families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form bounds for g(n,k,ell) (with --k and --ell) or h(n,3n-x) (with --x).
    Bounds(BoundsArgs),
    /// Exact search for the largest family.
    #[command(subcommand)]
    Search(SearchCommand),
    /// Build an extremal family.
    Construct(ConstructArgs),
    /// Run a verification suite, or check a family file.
    Verify(VerifyArgs),
    /// Tables over a parameter range.
    #[command(subcommand)]
    Sweep(SweepCommand),
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, requires = "ell", conflicts_with = "x")]
    k: Option<usize>,
    #[arg(long, requires = "k")]
    ell: Option<usize>,
    #[arg(long, required_unless_present = "k")]
    x: Option<usize>,
}

#[derive(Args)]
struct SearchFlags {
    #[arg(long, default_value = "shifted-bb")]
    method: Method,
    /// Re-check the witness against every triple.
    #[arg(long)]
    check: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Candidate limit for brute force.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
}

#[derive(Subcommand)]
enum SearchCommand {
    /// g(n,k,ell): k-uniform families.
    Uniform {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ell: usize,
        #[command(flatten)]
        flags: SearchFlags,
    },
    /// h(n,ell): arbitrary families.
    Nonuniform {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ell: usize,
        #[command(flatten)]
        flags: SearchFlags,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Family,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    /// k-sets meeting [f(j,ell)] in at least j elements.
    UniformJ,
    /// k-sets containing 1.
    Star,
    /// Level family with dual score at most x.
    Dual,
    /// Complements of the dual family.
    Primal,
    /// The ell = 4 restriction counterexample on [6].
    CounterexampleL4,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(value_enum)]
    kind: Kind,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    j: Option<usize>,
    #[arg(long)]
    x: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutFormat::Family)]
    format: OutFormat,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, required_unless_present = "family", conflicts_with = "family")]
    suite: Option<Suite>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Family file to test for membership in H_ell.
    #[arg(long, requires = "ell")]
    family: Option<String>,
    #[arg(long)]
    ell: Option<usize>,
}

#[derive(Subcommand)]
enum SweepCommand {
    /// Best prefix construction and its j for each k.
    M {
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k_from: usize,
        #[arg(long)]
        k_to: usize,
    },
}

enum Failure {
    Usage(String),
    Cap(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } => Failure::Cap(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Bounds(a) => run_bounds(a),
        Command::Search(c) => run_search(c),
        Command::Construct(a) => run_construct(a),
        Command::Verify(a) => run_verify(a),
        Command::Sweep(c) => run_sweep(c),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Verification) => ExitCode::from(4),
    }
}

fn run_bounds(a: BoundsArgs) -> Result<(), Failure> {
    let report = match (a.k, a.ell, a.x) {
        (Some(k), Some(ell), None) => bound_report_g(a.n, k, ell, None),
        (None, None, Some(x)) => bound_report_h(a.n, x),
        _ => return Err(Failure::Usage("give either --k and --ell, or --x".into())),
    };
    println!("{}", report.to_json());
    Ok(())
}

fn emit_search(result: &SearchResult, flags: &SearchFlags, ell: usize) -> Result<(), Failure> {
    match flags.format {
        OutFormat::Json => println!("{}", result.to_json()),
        OutFormat::Family => print!("{}", write_family(&result.witness)),
    }
    eprintln!(
        "value {} via {} ({} nodes, {} ms)",
        result.value,
        result.method,
        result.nodes_explored,
        result.wall_time.as_millis()
    );
    if flags.check {
        if is_member_h(&result.witness, ell) && result.witness.len() == result.value {
            eprintln!("check: witness verified against every triple");
        } else {
            eprintln!("check: witness FAILED the triple scan");
            return Err(Failure::Verification);
        }
    }
    Ok(())
}

fn run_search(c: SearchCommand) -> Result<(), Failure> {
    match c {
        SearchCommand::Uniform { n, k, ell, flags } => {
            let opts = options(&flags)?;
            let r = exact_g(n, k, ell, flags.method, &opts).map_err(|e| cap_hint(e, flags.method))?;
            emit_search(&r, &flags, ell)
        }
        SearchCommand::Nonuniform { n, ell, flags } => {
            let opts = options(&flags)?;
            let r = exact_h(n, ell, flags.method, &opts).map_err(|e| cap_hint(e, flags.method))?;
            emit_search(&r, &flags, ell)
        }
    }
}

fn cap_hint(e: Error, method: Method) -> Failure {
    match (&e, method) {
        (Error::CapExceeded { .. }, Method::Brute) => {
            Failure::Cap(format!("{e}; try --method shifted-bb or raise --cap"))
        }
        _ => e.into(),
    }
}

fn options(flags: &SearchFlags) -> Result<SearchOptions<'static>, Failure> {
    if flags.jobs == 0 {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    Ok(SearchOptions {
        cap: flags.cap,
        jobs: flags.jobs,
        table: None,
    })
}

fn need(v: Option<usize>, flag: &str, kind: &str) -> Result<usize, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("{kind} needs --{flag}")))
}

fn run_construct(a: ConstructArgs) -> Result<(), Failure> {
    let spec = match a.kind {
        Kind::UniformJ => ConstructionSpec::UniformJ {
            n: need(a.n, "n", "uniform-j")?,
            k: need(a.k, "k", "uniform-j")?,
            ell: need(a.ell, "ell", "uniform-j")?,
            j: need(a.j, "j", "uniform-j")?,
        },
        Kind::Star => ConstructionSpec::Star {
            n: need(a.n, "n", "star")?,
            k: need(a.k, "k", "star")?,
        },
        Kind::Dual => ConstructionSpec::NonuniformDual {
            n: need(a.n, "n", "dual")?,
            x: need(a.x, "x", "dual")?,
        },
        Kind::Primal => ConstructionSpec::NonuniformPrimal {
            n: need(a.n, "n", "primal")?,
            x: need(a.x, "x", "primal")?,
        },
        Kind::CounterexampleL4 => ConstructionSpec::CounterexampleL4,
    };
    let family = spec.build()?;
    let predicted = spec.predicted_size()?;
    match a.format {
        OutFormat::Family => print!("{}", write_family(&family)),
        OutFormat::Json => {
            let json = FamilyJson::from(&family);
            let v = serde_json::json!({
                "n": json.n,
                "size": family.len(),
                "predicted": predicted.to_string(),
                "members": json.members,
            });
            println!("{v}");
        }
    }
    eprintln!("{} members, predicted {predicted}", family.len());
    Ok(())
}

fn finish_report(report: &SuiteReport) -> Result<(), Failure> {
    println!("{}", report.to_json());
    for c in &report.checks {
        eprintln!("{}: {} ({})", c.status, c.name, c.detail);
        if c.status == tri_intersect::verify::Status::Fail {
            if let Some(fam) = &c.counterexample {
                eprint!("{fam}");
            }
        }
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn run_verify(a: VerifyArgs) -> Result<(), Failure> {
    if let Some(path) = a.family {
        let ell = need(a.ell, "ell", "--family")?;
        let text = fs::read_to_string(&path)
            .map_err(|e| Failure::Usage(format!("cannot read {path}: {e}")))?;
        let family = parse_family(&text)?;
        return finish_report(&check_family(&family, ell));
    }
    let suite = a.suite.expect("clap requires --suite without --family");
    let cfg = VerifyConfig {
        trials: a.trials.unwrap_or_else(|| suite.default_trials()),
        seed: a.seed,
    };
    finish_report(&run_suite(suite, &cfg)?)
}

fn run_sweep(c: SweepCommand) -> Result<(), Failure> {
    let SweepCommand::M { ell, n, k_from, k_to } = c;
    let report = m_sweep(ell, n, k_from, k_to, None)?;
    print!("{}", report.to_csv());
    for (i, (k, j)) in report.transitions().into_iter().enumerate() {
        let verb = if i == 0 { "starts at" } else { "reaches" };
        eprintln!("best_j {verb} {j} at k = {k} (k/n = {:.4})", k as f64 / n as f64);
    }
    let bad = report.monotonicity_violations();
    if !bad.is_empty() {
        eprintln!("best_j decreases at k = {bad:?}");
    }
    Ok(())
}
