use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use charclass::bott::{self, orientable_grade, BottMatrix, BottRing, Method, DEFAULT_DIRECT_CAP};
use charclass::dold::{self, DoldSpec};
use charclass::qring::{self, DEFAULT_ZERO_BUDGET};
use charclass::steenrod;
use charclass::{Error, SqfreePoly};

#[derive(Parser)]
#[command(name = "charclass", version, about = "Mod-2 characteristic classes of Bott and Dold manifolds")]
struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads for parallel folds.
    #[arg(long, global = true, env = "CHARCLASS_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Check orientability and w̄_{n-α̂(n)} ≠ 0 for the main-family manifold of dimension n.
    VerifyMain {
        #[arg(long)]
        n: usize,
        /// direct, steenrod or both; defaults to both up to the cap, steenrod above it.
        #[arg(long)]
        method: Option<String>,
        /// Largest n for the direct method.
        #[arg(long, default_value_t = DEFAULT_DIRECT_CAP)]
        cap: usize,
    },
    /// Evaluate χSq^k on a squarefree class.
    ChiSq {
        #[arg(long)]
        k: u64,
        /// Class in the polynomial grammar, e.g. `x4*x5`.
        #[arg(long)]
        z: String,
        /// Bott matrix JSON file; the main matrix of dimension --n otherwise.
        #[arg(long, conflicts_with = "n")]
        matrix: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Table of w_i (or w̄_i) normal forms for 0 ≤ i ≤ up_to.
    ClassTable {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        dual: bool,
        #[arg(long)]
        up_to: usize,
    },
    /// The chain rings Q_m.
    Qm {
        #[command(subcommand)]
        command: QmCommand,
    },
    /// Generalized Dold manifolds.
    Dold {
        #[command(subcommand)]
        command: DoldCommand,
    },
    /// Search a family of Bott matrices for orientable ones with w̄_{dim-α̂(dim)} ≠ 0.
    ScanBott {
        #[arg(long)]
        dim: usize,
        /// main, banded(W) or random.
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximum number of matrices examined.
        #[arg(long, default_value_t = 100)]
        budget: usize,
    },
}

#[derive(Subcommand)]
enum QmCommand {
    /// (x_1 + ... + x_m)^m = 0 in Q_m for m = 2^p - 1, with the gap-count ledger.
    CheckKey {
        #[arg(long)]
        p: u32,
        /// Print the full tally.
        #[arg(long)]
        stats: bool,
        /// Also check every zero certificate against generic rewriting.
        #[arg(long)]
        cross_check: bool,
    },
    /// Both vanishing statements in the main ring of dimension n ≡ 1 (mod 4).
    CheckZero {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_ZERO_BUDGET)]
        budget: u128,
    },
}

#[derive(Subcommand)]
enum DoldCommand {
    /// Orientability and w̄_{N-α̂(N)} ≠ 0 for one manifold.
    Verify {
        /// JSON file `{"n": .., "ms": [..]}`.
        #[arg(long)]
        spec: PathBuf,
    },
    /// Every P(n; m_1 ≤ ... ≤ m_r) of dimension dim with r ≤ max_r that passes.
    Scan {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 2)]
        max_r: usize,
        /// Shorthand for --format json.
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Input(String),
    Falsified(String),
    NotVerified(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = std::result::Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: thread count must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            if !out.is_empty() && !out.ends_with('\n') {
                println!();
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Falsified(msg)) => {
            eprintln!("FALSIFIED: {msg}");
            eprintln!("this contradicts a proven theorem and indicates an implementation bug");
            ExitCode::from(1)
        }
        Err(Failure::NotVerified(msg)) => {
            eprintln!("not verified: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let fmt = cli.format;
    match &cli.command {
        Command::VerifyMain { n, method, cap } => verify_main(*n, method.as_deref(), *cap, fmt),
        Command::ChiSq { k, z, matrix, n } => chi_sq(*k, z, matrix.as_deref(), *n, fmt),
        Command::ClassTable { matrix, dual, up_to } => class_table(matrix, *dual, *up_to, fmt),
        Command::Qm { command } => match command {
            QmCommand::CheckKey { p, stats, cross_check } => check_key(*p, *stats, *cross_check, fmt),
            QmCommand::CheckZero { n, budget } => check_zero(*n, *budget, fmt),
        },
        Command::Dold { command } => match command {
            DoldCommand::Verify { spec } => dold_verify(spec, fmt),
            DoldCommand::Scan { dim, max_r, json } => {
                dold_scan(*dim, *max_r, if *json { Some(Format::Json) } else { fmt })
            }
        },
        Command::ScanBott { dim, family, seed, budget } => scan_bott(*dim, family, *seed, *budget, fmt),
    }
}

fn pick(fmt: Option<Format>, default: Format, allowed: &[Format]) -> std::result::Result<Format, Failure> {
    let f = fmt.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Failure::Input("output format not available for this command".into()))
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize") + "\n"
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> std::result::Result<BottMatrix, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn verify_main(n: usize, method: Option<&str>, cap: usize, fmt: Option<Format>) -> Outcome {
    let fmt = pick(fmt, Format::Text, &[Format::Text, Format::Json])?;
    if n == 0 {
        return Err(Failure::Input("n must be positive".into()));
    }
    if cap == 0 {
        return Err(Failure::Input("cap must be positive".into()));
    }
    let method = match method {
        Some(m) => Method::from_str(m)?,
        None if n <= cap => Method::Both,
        None => Method::Steenrod,
    };
    eprintln!("verifying n = {n}");
    let report = bott::verify_main(n, method, cap)?;
    if !report.verified() || !report.methods_agree() {
        return Err(Failure::Falsified(serde_json::to_string(&report).expect("serializes")));
    }
    Ok(match fmt {
        Format::Json => json(&report),
        _ => {
            let show = |b: Option<bool>| match b {
                None => "skipped".to_string(),
                Some(true) => "nonzero".to_string(),
                Some(false) => "zero".to_string(),
            };
            format!(
                "n = {}: orientable, w̄_{} ≠ 0 (α̂ = {}; direct: {}, steenrod: {})\n",
                report.n,
                report.grade,
                report.alpha_hat,
                show(report.methods.direct),
                show(report.methods.steenrod)
            )
        }
    })
}

fn chi_sq(k: u64, z: &str, matrix: Option<&Path>, n: Option<usize>, fmt: Option<Format>) -> Outcome {
    let fmt = pick(fmt, Format::Text, &[Format::Text, Format::Json])?;
    let ring = match (matrix, n) {
        (Some(path), _) => BottRing::new(read_matrix(path)?),
        (None, Some(n)) => BottRing::main(n)?,
        (None, None) => return Err(Failure::Input("either --matrix or --n is required".into())),
    };
    let z = SqfreePoly::from_str(z)?;
    if let Some(&m) = z.masks().iter().find(|&&m| m >> ring.dim() != 0) {
        return Err(Failure::Input(format!(
            "{} uses variables beyond x{}",
            SqfreePoly::monomial(m),
            ring.dim()
        )));
    }
    let value = steenrod::chi_sq(k, &z, &ring);
    Ok(match fmt {
        Format::Json => json(&serde_json::json!({
            "k": k,
            "z": z.to_string(),
            "value": value.to_string(),
        })),
        _ => format!("{value}\n"),
    })
}

fn class_table(path: &Path, dual: bool, up_to: usize, fmt: Option<Format>) -> Outcome {
    let fmt = pick(fmt, Format::Csv, &[Format::Csv, Format::Json, Format::Text])?;
    let matrix = read_matrix(path)?;
    if up_to > matrix.n() {
        return Err(Error::DegreeTooLarge { requested: up_to, dim: matrix.n() }.into());
    }
    let ring = BottRing::new(matrix);
    let classes = if dual {
        ring.dual_sw(up_to)?
    } else {
        let mut all = ring.total_sw();
        all.by_degree.resize(up_to + 1, SqfreePoly::zero());
        all
    };
    let rows: Vec<String> = classes.by_degree.iter().map(ToString::to_string).collect();
    Ok(match fmt {
        Format::Csv => classes.to_csv(),
        Format::Json => json(&rows),
        Format::Text => {
            let name = if dual { "w̄" } else { "w" };
            rows.iter()
                .enumerate()
                .map(|(k, r)| format!("{name}_{k} = {r}\n"))
                .collect()
        }
    })
}

fn check_key(p: u32, stats: bool, cross_check: bool, fmt: Option<Format>) -> Outcome {
    let fmt = pick(fmt, Format::Text, &[Format::Text, Format::Json])?;
    eprintln!("expanding (x_1 + ... + x_m)^m for m = {}", (1u64 << p.min(63)) - 1);
    let report = qring::verify_key(p, cross_check)?;
    if !report.verified() {
        return Err(Failure::Falsified(serde_json::to_string(&report).expect("serializes")));
    }
    Ok(match fmt {
        Format::Json if stats => json(&report),
        Format::Json => json(&report.stats()),
        _ => {
            let mut out = format!(
                "m = {}: {} monomials, {} zero, sum vanishes\n",
                report.m, report.total, report.zero
            );
            if stats {
                out.push_str("gap,count\n");
                for (d, c) in &report.gap_counts {
                    out.push_str(&format!("{d},{c}\n"));
                }
            }
            out
        }
    })
}

fn check_zero(n: usize, budget: u128, fmt: Option<Format>) -> Outcome {
    let fmt = pick(fmt, Format::Text, &[Format::Text, Format::Json])?;
    let (a, b) = qring::verify_zero_all(n, budget)?;
    let ok = a.iter().all(|c| c.all_zero) && b.iter().all(|&(_, z)| z);
    let b_json: Vec<_> = b
        .iter()
        .map(|&(j, zero)| serde_json::json!({ "j": j, "zero": zero }))
        .collect();
    let body = serde_json::json!({ "n": n, "part_a": a, "part_b": b_json });
    if !ok {
        return Err(Failure::Falsified(body.to_string()));
    }
    Ok(match fmt {
        Format::Json => json(&body),
        _ => {
            let cases: u64 = a.iter().map(|c| c.cases).sum();
            format!(
                "n = {n}: part a holds for {} pairs ({cases} products), part b for {} indices\n",
                a.len(),
                b.len()
            )
        }
    })
}

fn dold_verify(path: &Path, fmt: Option<Format>) -> Outcome {
    let fmt = pick(fmt, Format::Text, &[Format::Text, Format::Json])?;
    let spec: DoldSpec = serde_json::from_str(&read(path)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let report = dold::verify_dold(&spec)?;
    let body = match fmt {
        Format::Json => json(&report),
        _ => format!(
            "{}: dimension {}, orientable: {}, w̄_{} {}\n",
            report.spec,
            report.dimension,
            report.orientable,
            report.grade,
            if report.nonvanishing { "≠ 0" } else { "= 0" }
        ),
    };
    if report.verified() {
        Ok(body)
    } else {
        print!("{body}");
        Err(Failure::NotVerified(format!(
            "{} is not both orientable and nonvanishing at w̄_{}",
            report.spec, report.grade
        )))
    }
}

fn dold_scan(dim: usize, max_r: usize, fmt: Option<Format>) -> Outcome {
    let fmt = pick(fmt, Format::Text, &[Format::Text, Format::Json])?;
    if max_r == 0 {
        return Err(Failure::Input("max-r must be positive".into()));
    }
    eprintln!("scanning dimension {dim}, r ≤ {max_r}");
    let hits = dold::scan_dold(dim, max_r)?;
    Ok(match fmt {
        Format::Json => json(&hits),
        _ => hits.iter().map(|s| format!("{s}\n")).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Family {
    Main,
    Banded(usize),
    Random,
}

impl FromStr for Family {
    type Err = Failure;
    fn from_str(s: &str) -> std::result::Result<Self, Failure> {
        let width = s
            .strip_prefix("banded(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| s.strip_prefix("banded:"));
        match (s, width) {
            ("main", _) => Ok(Family::Main),
            ("random", _) => Ok(Family::Random),
            (_, Some(w)) => match w.parse::<usize>() {
                Ok(w) if w >= 1 => Ok(Family::Banded(w)),
                _ => Err(Failure::Input(format!("bad band width in {s:?}"))),
            },
            _ => Err(Failure::Input(format!(
                "unknown family {s:?}; expected main, banded(W) or random"
            ))),
        }
    }
}

/// Strictly upper-triangular random bits, then `a_{i,n}` toggled so every row has even weight.
fn random_orientable(n: usize, rng: &mut ChaCha8Rng) -> Result<BottMatrix, Error> {
    let mut ones = Vec::new();
    for i in 1..n {
        let mut parity = false;
        for j in i + 1..n {
            if rng.gen::<bool>() {
                ones.push((i, j));
                parity = !parity;
            }
        }
        if parity {
            ones.push((i, n));
        }
    }
    BottMatrix::new(n, ones)
}

#[derive(Serialize)]
struct ScanEntry {
    matrix: BottMatrix,
    orientable: bool,
    grade: usize,
    dual_class: String,
}

#[derive(Serialize)]
struct ScanReport {
    dim: usize,
    family: String,
    seed: u64,
    budget: usize,
    examined: Vec<ScanEntry>,
    hits: Vec<BottMatrix>,
}

fn scan_bott(dim: usize, family: &str, seed: u64, budget: usize, fmt: Option<Format>) -> Outcome {
    let fmt = pick(fmt, Format::Json, &[Format::Json, Format::Text])?;
    let fam: Family = family.parse()?;
    if dim == 0 || dim > 64 {
        return Err(Failure::Input(format!("dim must be in 1..=64, got {dim}")));
    }
    if budget == 0 {
        return Err(Failure::Input("budget must be positive".into()));
    }
    let mut matrices = match fam {
        Family::Main => {
            let mut v = vec![BottMatrix::main(dim)?];
            if !dim.is_multiple_of(4) && dim % 4 != 1 {
                v.push(bott::main_family_matrix(dim)?.0);
            }
            v
        }
        Family::Banded(w) => vec![BottMatrix::banded(dim, w)?],
        Family::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..budget)
                .map(|_| random_orientable(dim, &mut rng))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    matrices.truncate(budget);
    let grade = orientable_grade(dim);
    eprintln!("examining {} matrices of dimension {dim}", matrices.len());
    let examined = matrices
        .into_par_iter()
        .map(|m| {
            let ring = BottRing::new(m);
            let dual = ring.dual_sw(grade)?.get(grade);
            Ok(ScanEntry {
                orientable: ring.matrix().is_orientable(),
                matrix: ring.matrix().clone(),
                grade,
                dual_class: dual.to_string(),
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let hits = examined
        .iter()
        .filter(|e| e.orientable && e.dual_class != "0")
        .map(|e| e.matrix.clone())
        .collect();
    let report = ScanReport {
        dim,
        family: family.to_string(),
        seed,
        budget,
        examined,
        hits,
    };
    Ok(match fmt {
        Format::Json => json(&report),
        _ => {
            let mut out = String::new();
            for e in &report.examined {
                out.push_str(&format!(
                    "{} orientable={} w̄_{} = {}\n",
                    e.matrix.to_json(),
                    e.orientable,
                    e.grade,
                    e.dual_class
                ));
            }
            out.push_str(&format!("{} hits\n", report.hits.len()));
            out
        }
    })
}
