use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use coklab::constants::{self, TolerancedReal, DEFAULT_TOL};
use coklab::experiments::{self, ExperimentResult, ExperimentSpec};
use coklab::groups::FiniteAbelianGroup;
use coklab::linalg::{cokernel, smith_normal_form, IntMatrix};
use coklab::sampling::{digraph_laplacian, laplacian, parse_rational, sample_digraph, total_sandpile, Digraph, Rng};

/// Exact cokernels, sandpile groups and Monte-Carlo checks of their limiting laws.
#[derive(Parser)]
#[command(name = "coklab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Smith normal form of a matrix file ("-" reads stdin).
    Snf {
        file: PathBuf,
        /// Also print the unimodular transforms U, V with U·M·V = D.
        #[arg(long)]
        transforms: bool,
    },
    /// Cokernel of a matrix file, as Z^f x Z/d1 x ...
    Cok { file: PathBuf },
    /// Total sandpile group of a digraph, from an adjacency file or sampled.
    Sandpile {
        /// Adjacency matrix file; omit to sample with --n and --q.
        file: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        /// Edge probability, e.g. 0.3 or 3/10.
        #[arg(long)]
        q: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate a limiting constant; run with "list" for the names.
    Constants {
        name: String,
        params: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Run an experiment spec and write JSON and CSV results.
    Run {
        spec: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Leave the timestamp out of file names and the wall time out of the JSON.
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Merge result JSON files into one table.
    Report {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Flag,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<IntMatrix, Failure> {
    IntMatrix::parse(&read_input(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn cmd_snf(file: &Path, transforms: bool) -> CmdResult {
    let m = read_matrix(file)?;
    let snf = smith_normal_form(&m, transforms);
    let mut line = format!("rank {}:", snf.rank);
    for d in &snf.invariant_factors {
        line.push_str(&format!(" {d}"));
    }
    println!("{line}");
    if let (Some(u), Some(v)) = (&snf.left_transform, &snf.right_transform) {
        print!("U\n{u}V\n{v}");
    }
    Ok(())
}

fn cmd_cok(file: &Path) -> CmdResult {
    println!("{}", cokernel(&read_matrix(file)?));
    Ok(())
}

fn cmd_sandpile(file: Option<&Path>, n: Option<usize>, q: Option<&str>, seed: u64) -> CmdResult {
    let group = match (file, n, q) {
        (Some(path), None, None) => {
            let adj = read_matrix(path)?;
            Digraph::from_adjacency(&adj)?;
            total_sandpile(&laplacian(&adj)?)?
        }
        (None, Some(n), Some(q)) => {
            if n == 0 {
                return Err(Failure::Usage("--n must be at least 1".into()));
            }
            let q = parse_rational(q)?;
            let g = sample_digraph(n, &q, &mut Rng::new(seed, 0))?;
            total_sandpile(&digraph_laplacian(&g))?
        }
        _ => return Err(Failure::Usage("give either an adjacency file or both --n and --q".into())),
    };
    println!("{group}");
    Ok(())
}

const CONSTANTS: &[(&str, &str)] = &[
    ("zeta", "k"),
    ("zeta-tail-product", "u"),
    ("cohen-lenstra", "GROUP u"),
    ("cyclic", "u"),
    ("squarefree-det", "u"),
    ("sandpile", "GROUP"),
    ("sandpile-cyclic", ""),
    ("prodcyc", "GROUP k0"),
    ("sylow", "GROUP u PRIMES (comma separated)"),
    ("uniform-fullrank", "n u p"),
    ("uniform-corank", "n m p corank"),
    ("heuristic-surjective", "n p"),
];

fn arg<T: std::str::FromStr>(params: &[String], i: usize, what: &str) -> Result<T, Failure> {
    let raw = params.get(i).ok_or_else(|| Failure::Usage(format!("missing parameter {what}")))?;
    raw.parse().map_err(|_| Failure::Usage(format!("bad {what}: {raw:?}")))
}

fn group_arg(params: &[String], i: usize) -> Result<FiniteAbelianGroup, Failure> {
    let raw = params.get(i).ok_or_else(|| Failure::Usage("missing parameter GROUP".into()))?;
    Ok(raw.parse::<FiniteAbelianGroup>()?)
}

fn constant_value(name: &str, p: &[String], tol: f64) -> Result<String, Failure> {
    let expected = CONSTANTS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, args)| args.split_whitespace().take_while(|w| !w.starts_with('(')).count())
        .ok_or_else(|| Failure::Usage(format!("unknown constant {name:?}; try `coklab constants list`")))?;
    if p.len() != expected {
        return Err(Failure::Usage(format!("{name} takes {expected} parameter(s), got {}", p.len())));
    }
    let show = |t: TolerancedReal| {
        if t.degenerate {
            format!("{t} (degenerate limit)")
        } else {
            t.to_string()
        }
    };
    Ok(match name {
        "zeta" => show(constants::zeta(arg(p, 0, "k")?, tol)?),
        "zeta-tail-product" => show(constants::zeta_tail_product(arg(p, 0, "u")?, tol)?),
        "cohen-lenstra" => show(constants::cohen_lenstra_prob(&group_arg(p, 0)?, arg(p, 1, "u")?, tol)?),
        "cyclic" => show(constants::cyclic_prob(arg(p, 0, "u")?, tol)?),
        "squarefree-det" => show(constants::squarefree_det_prob(arg(p, 0, "u")?, tol)?),
        "sandpile" => show(constants::sandpile_prob(&group_arg(p, 0)?, tol)?),
        "sandpile-cyclic" => show(constants::sandpile_cyclic_prob(tol)?),
        "prodcyc" => show(constants::prodcyc_prob(&group_arg(p, 0)?, arg(p, 1, "k0")?, tol)?),
        "sylow" => {
            let primes = p[2]
                .split(',')
                .map(|s| s.trim().parse::<u64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| Failure::Usage(format!("bad prime list {:?}", p[2])))?;
            show(constants::sylow_restricted_prob(&group_arg(p, 0)?, arg(p, 1, "u")?, &primes, tol)?)
        }
        "uniform-fullrank" => {
            constants::uniform_fullrank_prob(arg(p, 0, "n")?, arg(p, 1, "u")?, arg(p, 2, "p")?)?.to_string()
        }
        "uniform-corank" => constants::uniform_corank_prob(
            arg(p, 0, "n")?,
            arg(p, 1, "m")?,
            arg(p, 2, "p")?,
            arg(p, 3, "corank")?,
        )?
        .to_string(),
        "heuristic-surjective" => {
            constants::heuristic_surjective_mod_p(arg(p, 0, "n")?, arg(p, 1, "p")?)?.to_string()
        }
        _ => unreachable!("names come from CONSTANTS"),
    })
}

fn cmd_constants(name: &str, params: &[String], tol: f64) -> CmdResult {
    if name == "list" {
        for (n, args) in CONSTANTS {
            println!("{n} {args}");
        }
        return Ok(());
    }
    println!("{}", constant_value(name, params, tol)?);
    Ok(())
}

fn cmd_run(spec_path: &Path, out: &Path, threads: usize, no_timestamp: bool) -> CmdResult {
    let mut spec = ExperimentSpec::from_json(&read_input(spec_path)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", spec_path.display())))?;
    if let Ok(raw) = std::env::var("COKLAB_SEED") {
        spec.seed = raw
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("COKLAB_SEED={raw:?} is not a 64-bit seed")))?;
    }
    let mut result = experiments::run_with_threads(&spec, threads)?;
    let stamp = if no_timestamp {
        result.wall_time_secs = None;
        None
    } else {
        Some(SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0))
    };
    let (json, csv) = experiments::write_result_files(&result, out, stamp)?;
    print!("{}", experiments::render_report(std::slice::from_ref(&result)));
    println!("wrote {}", json.display());
    println!("wrote {}", csv.display());
    if result.flagged() {
        return Err(Failure::Flag);
    }
    Ok(())
}

fn cmd_report(files: &[PathBuf]) -> CmdResult {
    let mut results = Vec::with_capacity(files.len());
    for f in files {
        let r: ExperimentResult = serde_json::from_str(&read_input(f)?)
            .map_err(|e| Failure::Usage(format!("{}: {e}", f.display())))?;
        results.push(r);
    }
    print!("{}", experiments::render_report(&results));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Snf { file, transforms } => cmd_snf(file, *transforms),
        Command::Cok { file } => cmd_cok(file),
        Command::Sandpile { file, n, q, seed } => cmd_sandpile(file.as_deref(), *n, q.as_deref(), *seed),
        Command::Constants { name, params, tol } => cmd_constants(name, params, *tol),
        Command::Run { spec, out, threads, no_timestamp } => cmd_run(spec, out, *threads, *no_timestamp),
        Command::Report { files } => cmd_report(files),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Flag) => ExitCode::from(3),
    }
}
