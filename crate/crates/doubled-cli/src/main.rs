//! `doubled` — batch front-end for the mixing/dilation library.
//!
//! Exit codes: 0 success, 1 a supplied `--expect` was not met, 2 input or
//! schema error, 3 numeric non-convergence.

use doubled_cli::format;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use doubled::classify::VerdictKind;
use doubled::constructions::{iterate_dilation, iterate_mix, mix_step, random_dilation_seed, random_mix_tree, MixTree};
use doubled::doubling::DoubledShape;
use doubled::oracle::{literal_double_dilate, literal_double_mix, MixComponent};
use doubled::rel::{enumerate_census, CensusBounds};
use doubled::{
    cj_report_all, conjugate_symmetry_check, counterexample_state, doubly_mixed_necessary,
    is_depth_n_dilated, mix_pairing_report, DEFAULT_TOLERANCE,
};

use format::{kind_name, verdict_to_report, ReportCJ, ReportFile, ReportFixture};

/// Override for the tensor entry cap.
const SIZE_CAP_ENV: &str = "DOUBLED_MAX_TENSOR_ENTRIES";

#[derive(Parser)]
#[command(name = "doubled", version, about = "iterated mixing and dilation of state tensors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply one mixing step to an ensemble, or iterate a whole mix tree.
    Mix(MixArgs),
    /// Run the iterated dilation of a seed state.
    Dilate(DilateArgs),
    /// Classify a doubled state and optionally write a JSON report.
    Classify(ClassifyArgs),
    /// Write the separating depth-2 dilated state of a given dimension.
    Counterexample(CounterexampleArgs),
    /// Enumerate the boolean-relation census over a small carrier.
    RelCensus(RelCensusArgs),
    /// Compare the constructions against the literal summation oracles.
    OracleCheck(OracleCheckArgs),
}

#[derive(Args)]
struct MixArgs {
    /// Ensemble file (one mixing step).
    #[arg(long, conflicts_with = "tree", required_unless_present = "tree")]
    ensemble: Option<PathBuf>,
    /// Mix tree file (iterated mixing).
    #[arg(long)]
    tree: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DilateArgs {
    /// Seed state file; factor 0 is the system, the rest are ancillas in
    /// contraction order.
    #[arg(long)]
    seed: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClassifyArgs {
    /// State file to classify.
    #[arg(long)]
    state: PathBuf,
    /// Relative tolerance for all verdicts.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Write a JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Comma-separated expectations, e.g. dilated=CertifiedYes,mixed=CertifiedNo.
    #[arg(long)]
    expect: Option<String>,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RelCensusArgs {
    /// Carrier size (1..=3).
    #[arg(long)]
    size: usize,
    /// Construction depth (1..=2).
    #[arg(long)]
    depth: usize,
    /// Largest ancilla dimension explored on the dilation side.
    #[arg(long, default_value_t = 4)]
    max_ancilla: usize,
    /// Largest mixture family size per level.
    #[arg(long, default_value_t = 16)]
    max_components: usize,
    /// Census JSON output.
    #[arg(long)]
    out: PathBuf,
    /// Optional counts table.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Comma-separated expectations, e.g. strict_inclusion=true.
    #[arg(long)]
    expect: Option<String>,
}

#[derive(Args)]
struct OracleCheckArgs {
    /// Number of random fixtures per construction.
    #[arg(long, default_value_t = 20)]
    fixtures: u64,
    #[arg(long, default_value_t = 42)]
    rng_seed: u64,
    /// Largest deviation tolerated.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

enum CliError {
    /// Exit 1: an `--expect` assertion failed.
    Expectation(String),
    /// Exit 2: bad input, schema violation, or unusable request.
    Input(String),
    /// Exit 3: numeric non-convergence.
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Expectation(_) => 1,
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Expectation(m) | CliError::Input(m) | CliError::Numeric(m) => m,
        }
    }
}

impl From<doubled::Error> for CliError {
    fn from(e: doubled::Error) -> Self {
        match e {
            doubled::Error::NonConvergence { .. } => CliError::Numeric(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<format::SchemaError> for CliError {
    fn from(e: format::SchemaError) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn apply_size_cap() -> CliResult<()> {
    if let Ok(raw) = std::env::var(SIZE_CAP_ENV) {
        let cap: usize = raw
            .parse()
            .map_err(|_| CliError::Input(format!("{SIZE_CAP_ENV}={raw:?} is not a valid entry count")))?;
        doubled::config::set_max_tensor_entries(cap);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    apply_size_cap()?;
    match cli.command {
        Command::Mix(args) => cmd_mix(args),
        Command::Dilate(args) => cmd_dilate(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Counterexample(args) => cmd_counterexample(args),
        Command::RelCensus(args) => cmd_rel_census(args),
        Command::OracleCheck(args) => cmd_oracle_check(args),
    }
}

fn cmd_mix(args: MixArgs) -> CliResult<()> {
    let state = if let Some(path) = &args.ensemble {
        let ensemble = format::read_ensemble(&read_file(path)?)?;
        mix_step(&ensemble)?
    } else {
        let path = args.tree.as_ref().expect("clap enforces one input");
        let tree = format::read_tree(&read_file(path)?)?;
        iterate_mix(&tree)?
    };
    write_file(&args.out, &format::write_state(&state))?;
    println!("wrote {} ({} amplitudes)", args.out.display(), state.amplitudes().len());
    Ok(())
}

fn cmd_dilate(args: DilateArgs) -> CliResult<()> {
    let seed = format::read_seed(&read_file(&args.seed)?)?;
    let state = iterate_dilation(&seed)?;
    write_file(&args.out, &format::write_state(&state))?;
    println!("wrote {} ({} amplitudes)", args.out.display(), state.amplitudes().len());
    Ok(())
}

/// Parse `key=value,key=value` expectation lists.
fn parse_expectations(raw: &str) -> CliResult<Vec<(String, String)>> {
    raw.split(',')
        .filter(|s| !s.is_empty())
        .map(|pair| {
            pair.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| CliError::Input(format!("bad expectation {pair:?}, want key=value")))
        })
        .collect()
}

fn cmd_classify(args: ClassifyArgs) -> CliResult<()> {
    let text = read_file(&args.state)?;
    let state = format::read_state(&text)?;
    let tol = args.tol;

    let dilated = is_depth_n_dilated(&state, tol)?;
    let mixed = doubly_mixed_necessary(&state, tol)?;
    let symmetry = conjugate_symmetry_check(&state, tol);

    let inferred = DoubledShape::infer(state.shape()).filter(|ds| ds.depth() >= 1);
    let cj_reports: Vec<ReportCJ> = match &inferred {
        Some(_) => cj_report_all(&state, tol)?
            .iter()
            .map(|r| ReportCJ {
                level: r.level,
                hermiticity_defect: r.hermiticity_defect,
                min_eigenvalue: r.min_eigenvalue,
                trace: (r.trace.re, r.trace.im),
                psd: r.psd,
            })
            .collect(),
        None => Vec::new(),
    };
    let mix_report = match &inferred {
        Some(ds) if ds.depth() == 2 => {
            let r = mix_pairing_report(&state, tol)?;
            Some(ReportCJ {
                level: r.level,
                hermiticity_defect: r.hermiticity_defect,
                min_eigenvalue: r.min_eigenvalue,
                trace: (r.trace.re, r.trace.im),
                psd: r.psd,
            })
        }
        _ => None,
    };

    for (name, verdict) in [("dilated", &dilated), ("mixed", &mixed)] {
        match verdict.reasons.first() {
            Some(e) if verdict.kind != VerdictKind::CertifiedYes => {
                println!("{name}: {} ({} = {:.6e})", kind_name(verdict.kind), e.check, e.value)
            }
            _ => println!("{name}: {}", kind_name(verdict.kind)),
        }
    }
    println!("symmetry: {}", kind_name(symmetry.kind));

    if let Some(path) = &args.report {
        let report = ReportFile {
            verdicts: vec![
                verdict_to_report("dilated", &dilated),
                verdict_to_report("mixed", &mixed),
                verdict_to_report("symmetry", &symmetry),
            ],
            cj_reports,
            mix_pairing_report: mix_report,
            tolerance: tol,
            fixture: ReportFixture {
                path: args.state.display().to_string(),
                dims: state.shape().dims().to_vec(),
                depth: inferred.map(|ds| ds.depth()),
                base_dim: inferred.map(|ds| ds.base_dim()),
            },
            tool_version: env!("CARGO_PKG_VERSION").into(),
        };
        write_file(path, &report.to_json())?;
    }

    if let Some(raw) = &args.expect {
        let verdict_of = |name: &str| -> CliResult<&'static str> {
            Ok(match name {
                "dilated" => kind_name(dilated.kind),
                "mixed" => kind_name(mixed.kind),
                "symmetry" => kind_name(symmetry.kind),
                other => return Err(CliError::Input(format!("unknown expectation key {other:?}"))),
            })
        };
        for (key, want) in parse_expectations(raw)? {
            let got = verdict_of(&key)?;
            if got != want {
                return Err(CliError::Expectation(format!(
                    "expected {key}={want}, got {key}={got}"
                )));
            }
        }
    }
    Ok(())
}

fn cmd_counterexample(args: CounterexampleArgs) -> CliResult<()> {
    let state = counterexample_state(args.dim)?;
    write_file(&args.out, &format::write_state(&state))?;
    println!("wrote {} (dimension {})", args.out.display(), args.dim);
    Ok(())
}

fn cmd_rel_census(args: RelCensusArgs) -> CliResult<()> {
    let bounds = CensusBounds {
        max_ancilla: args.max_ancilla,
        max_components: args.max_components,
    };
    let census = enumerate_census(args.size, args.depth, &bounds)?;
    write_file(&args.out, &census.to_json())?;
    if let Some(path) = &args.csv {
        write_file(path, &census.to_csv())?;
    }
    println!(
        "carrier {} depth {}: {} mixed, {} dilated, subset={}, strict={}",
        census.carrier_size,
        census.depth,
        census.mixed_count,
        census.dilated_count,
        census.mixed_subset_of_dilated,
        census.strict_inclusion
    );

    if let Some(raw) = &args.expect {
        for (key, want) in parse_expectations(raw)? {
            let got = match key.as_str() {
                "strict_inclusion" => census.strict_inclusion.to_string(),
                "mixed_subset_of_dilated" => census.mixed_subset_of_dilated.to_string(),
                "mixed_count" => census.mixed_count.to_string(),
                "dilated_count" => census.dilated_count.to_string(),
                other => return Err(CliError::Input(format!("unknown expectation key {other:?}"))),
            };
            if got != want {
                return Err(CliError::Expectation(format!(
                    "expected {key}={want}, got {key}={got}"
                )));
            }
        }
    }
    Ok(())
}

fn cmd_oracle_check(args: OracleCheckArgs) -> CliResult<()> {
    let mut worst = 0.0f64;
    for fixture in 0..args.fixtures {
        let d = 2 + (fixture % 2) as usize;
        let branching = 1 + (fixture % 3) as usize;
        let tree = random_mix_tree(d, 2, branching, args.rng_seed ^ fixture)?;
        let fast = iterate_mix(&tree)?;
        let MixTree::Node(outer) = &tree else { unreachable!() };
        let components: Vec<MixComponent> = outer
            .iter()
            .map(|(r, child)| {
                let MixTree::Node(inner) = child else { unreachable!() };
                MixComponent {
                    weight: *r,
                    members: inner
                        .iter()
                        .map(|(p, leaf)| {
                            let MixTree::Leaf(phi) = leaf else { unreachable!() };
                            (*p, phi.amplitudes().to_vec())
                        })
                        .collect(),
                }
            })
            .collect();
        let literal = literal_double_mix(d, &components)?;
        worst = worst.max(fast.max_dist(&literal.tensor));

        let dims = [d, branching, 2];
        let seed = random_dilation_seed(&dims, args.rng_seed.wrapping_add(fixture))?;
        let fast = iterate_dilation(&seed)?;
        let literal = literal_double_dilate(dims[0], dims[1], dims[2], seed.tensor().amplitudes())?;
        worst = worst.max(fast.max_dist(&literal.tensor));
    }
    println!(
        "{} fixtures per construction, max deviation {worst:.3e}",
        args.fixtures
    );
    if worst >= args.tol {
        return Err(CliError::Expectation(format!(
            "oracle deviation {worst:.3e} exceeds tolerance {:.1e}",
            args.tol
        )));
    }
    Ok(())
}
