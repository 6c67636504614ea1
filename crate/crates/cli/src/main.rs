mod input;

use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use digerm::branching::{dot_export, space, Side};
use digerm::flowcat::oracle_check;
use digerm::fuzz::{gen_instance, run_instance, FuzzConfig, FuzzOutcome};
use digerm::homology::HomologyReport;
use digerm::subdivision::{apply_all, check_invariance, Complex};
use digerm::GlobularComplex;

use input::{load, load_ops, LoadError};

// stdout may be a closed pipe (`digerm … | head`); stop quietly
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! put {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "digerm", version, about = "Branching and merging homology of cellular d-spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a precubical set or globular complex and list every problem.
    Validate {
        input: String,
        #[arg(long)]
        json: bool,
    },
    /// Print the globular complex realizing the input.
    Realize { input: String },
    /// Branching and merging homology tables.
    Homology {
        input: String,
        #[arg(long)]
        branching: bool,
        #[arg(long)]
        merging: bool,
        #[arg(long)]
        json: bool,
    },
    /// Apply a sequence of subdivision steps and print the result.
    Subdivide {
        input: String,
        #[arg(long)]
        ops: String,
    },
    /// Compare invariants before and after a sequence of subdivision steps.
    CheckInvariance {
        input: String,
        #[arg(long)]
        ops: String,
        #[arg(long)]
        json: bool,
    },
    /// Compare branching spaces against the flow computation.
    Oracle {
        input: String,
        #[arg(long)]
        json: bool,
    },
    /// Branching (or merging) spaces as DOT graphs or JSON.
    ExportDot {
        input: String,
        #[arg(long)]
        state: Option<String>,
        #[arg(long)]
        merging: bool,
        /// Write the DOT graph here instead of standard output.
        #[arg(long)]
        dot: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Random complexes and subdivision sequences through every check.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Usage(m) => Failure::Usage(m),
            LoadError::Domain(m) => Failure::Domain(m),
        }
    }
}

impl From<digerm::Error> for Failure {
    fn from(e: digerm::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn globular(input: &str) -> Result<GlobularComplex, Failure> {
    let x = load(input)?;
    let x = x.to_globular()?;
    Ok(x)
}

fn validate(input: &str, json: bool) -> Outcome {
    let problems: Vec<String> = match load(input)? {
        Complex::Precubical(k) => {
            let v = k.validate();
            if json {
                say!("{}", to_json(&v));
            }
            v.iter().map(ToString::to_string).collect()
        }
        Complex::Globular(x) => {
            let v = x.validate();
            if json {
                say!("{}", to_json(&v));
            }
            v.iter().map(ToString::to_string).collect()
        }
    };
    if !json {
        if problems.is_empty() {
            say!("valid");
        }
        for p in &problems {
            say!("{p}");
        }
    }
    Ok(problems.is_empty())
}

fn homology(input: &str, branching: bool, merging: bool, json: bool) -> Outcome {
    let x = globular(input)?;
    let both = !branching && !merging;
    let report = HomologyReport::compute(&x, branching || both, merging || both)?;
    if json {
        say!("{}", to_json(&report));
    } else {
        put!("{}", report.table());
    }
    Ok(true)
}

fn subdivide(input: &str, ops: &str) -> Outcome {
    let x = load(input)?;
    let ops = load_ops(ops)?;
    match apply_all(&x, &ops)?.0 {
        Complex::Precubical(k) => say!("{}", k.to_json()),
        Complex::Globular(x) => say!("{}", x.to_json()),
    }
    Ok(true)
}

fn invariance(input: &str, ops: &str, json: bool) -> Outcome {
    let x = load(input)?;
    let ops = load_ops(ops)?;
    let report = check_invariance(&x, &ops)?;
    if json {
        say!("{}", to_json(&report));
    } else {
        put!("{}", report.summary());
    }
    Ok(report.passed())
}

fn oracle(input: &str, json: bool) -> Outcome {
    let report = oracle_check(&globular(input)?)?;
    if json {
        say!("{}", to_json(&report));
    } else {
        for m in &report.mismatches {
            say!("{m}");
        }
        say!(
            "{} ({} states checked)",
            if report.passed() { "PASS" } else { "FAIL" },
            report.states_checked
        );
    }
    Ok(report.passed())
}

fn export_dot(input: &str, state: Option<&str>, merging: bool, dot: Option<&str>, json: bool) -> Outcome {
    let x = globular(input)?;
    let side = if merging { Side::Merging } else { Side::Branching };
    let states: Vec<&str> = match state {
        Some(s) => vec![s],
        None => x.states().iter().map(String::as_str).collect(),
    };
    let spaces = states
        .iter()
        .map(|s| space(&x, s, side))
        .collect::<Result<Vec<_>, _>>()?;
    let text = match (json, state) {
        (true, _) => to_json(&spaces),
        (false, Some(_)) => spaces[0].to_dot(),
        (false, None) => dot_export(&spaces, side),
    };
    match dot {
        Some(path) if !json => {
            fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write `{path}`: {e}")))?
        }
        _ => put!("{text}{}", if json { "\n" } else { "" }),
    }
    Ok(true)
}

fn fuzz(seed: u64, count: u64, json: bool) -> Outcome {
    let threads = std::env::var("DIGERM_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let cfg = FuzzConfig::default();
    let outcomes: Vec<Result<FuzzOutcome, String>> = pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|i| run_instance(&gen_instance(seed, i, &cfg)).map_err(|e| format!("instance {i}: {e}")))
            .collect()
    });
    let mut failed = 0;
    let mut results = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        match o {
            Ok(o) => {
                if !o.passed() {
                    failed += 1;
                }
                results.push(o);
            }
            Err(e) => return Err(Failure::Domain(e)),
        }
    }
    if json {
        say!("{}", to_json(&results));
    } else {
        for o in results.iter().filter(|o| !o.passed()) {
            say!("instance {} (seed {:#018x}) FAIL: {}", o.index, o.seed, o.problems.join("; "));
        }
        let ops: usize = results.iter().map(|o| o.ops.len()).sum();
        say!("{} instances, {ops} subdivision steps, {failed} failed", results.len());
        say!("{}", if failed == 0 { "PASS" } else { "FAIL" });
    }
    Ok(failed == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Validate { input, json } => validate(input, *json),
        Command::Realize { input } => globular(input).map(|x| {
            say!("{}", x.to_json());
            true
        }),
        Command::Homology { input, branching, merging, json } => homology(input, *branching, *merging, *json),
        Command::Subdivide { input, ops } => subdivide(input, ops),
        Command::CheckInvariance { input, ops, json } => invariance(input, ops, *json),
        Command::Oracle { input, json } => oracle(input, *json),
        Command::ExportDot { input, state, merging, dot, json } => {
            export_dot(input, state.as_deref(), *merging, dot.as_deref(), *json)
        }
        Command::Fuzz { seed, count, json } => fuzz(*seed, *count, *json),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
