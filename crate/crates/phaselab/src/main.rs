//! Command-line entry point.
//!
//! Exit codes: 0 success, 1 a check found a counterexample, 2 input error,
//! 3 budget exceeded. Diagnostics go to stderr, data to stdout; all reports
//! are byte-deterministic.

use clap::{Parser, Subcommand};
use phaselab::catalogue::CatalogueSpec;
use phaselab::dsl::ParsedPhase;
use phaselab::error::PhaselabError;
use phaselab::morphism::Mode;
use phaselab::report::{
    to_canonical_json, AnalyzeReport, CompletionSidecar, EnumerateManifest, PartitionSidecar,
};
use phaselab::verifier::{self, CheckConfig, Outcome, TheoremId};
use phaselab::{canon, catalogue, dsl, equivalence, morphism, quotient, twocat};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "phaselab", version, about = "Finite-model workbench for graded algebraic phases")]
struct Cli {
    /// Seed used wherever randomness applies (scramble-based sweeps).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a .phase file and report every violation.
    Validate { file: PathBuf },
    /// Stratification, admissibility flags, and invariants as JSON.
    Analyze { file: PathBuf },
    /// Enumerate the morphisms between two phases.
    Hom {
        source: PathBuf,
        target: PathBuf,
        #[arg(long)]
        mode: Mode,
        /// Print only the number of morphisms.
        #[arg(long, conflicts_with = "list")]
        count: bool,
        /// Print the full morphism list as JSON.
        #[arg(long)]
        list: bool,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Search for a strict isomorphism.
    Iso { left: PathBuf, right: PathBuf },
    /// Quotient by the collapsed rigid core; writes a .phase file and a JSON
    /// sidecar with the partition.
    Boundary {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Quotient by the collapse of the stratum at the given depth.
    Collapse {
        file: PathBuf,
        #[arg(long)]
        depth: u32,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Quotient by a maximal admissible congruence.
    Complete {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Hom-count profile against the probe battery.
    Profile {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Check the strict 2-category laws over a battery of ordered phases.
    TwocatCheck {
        files: Vec<PathBuf>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Enumerate all phases of one carrier size, writing .phase files and a
    /// manifest.
    Enumerate {
        #[arg(long)]
        size: usize,
        #[arg(long)]
        max_defect: u32,
        #[arg(long)]
        out: PathBuf,
        /// Emit every raw table instead of one phase per isomorphism class.
        #[arg(long)]
        raw: bool,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Run one theorem check on explicit inputs.
    Check {
        #[arg(long)]
        theorem: String,
        files: Vec<PathBuf>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, default_value_t = 3)]
        battery: usize,
    },
    /// Sweep a theorem check across the catalogue up to a carrier size.
    Mine {
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 2)]
        max_defect: u32,
        #[arg(long, default_value_t = 3)]
        battery: usize,
        #[arg(long)]
        budget: Option<u64>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<PhaselabError> for Failure {
    fn from(e: PhaselabError) -> Failure {
        Failure { code: e.exit_code() as u8, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure { code: 2, message: e.to_string() }
    }
}

fn resolve_budget(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("PHASELAB_BUDGET").ok().and_then(|v| v.parse().ok())
    })
    .unwrap_or(morphism::DEFAULT_NODE_BUDGET)
}

fn load(path: &Path) -> Result<ParsedPhase, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure { code: 2, message: format!("{}: {e}", path.display()) })?;
    dsl::parse(&text).map_err(|e| Failure {
        code: 2,
        message: format!("{}:{}: {}", path.display(), e.span, e.kind),
    })
}

fn sidecar_path(output: &Path) -> PathBuf {
    output.with_extension("json")
}

fn write_quotient(
    source: &ParsedPhase,
    congruence: &quotient::Congruence,
    quotient_phase: &phaselab::Phase,
    output: &Path,
) -> Result<(), Failure> {
    let sidecar = PartitionSidecar::build(&source.phase, congruence, quotient_phase)?;
    std::fs::write(output, dsl::render_phase(quotient_phase))?;
    let json = to_canonical_json(&sidecar);
    std::fs::write(sidecar_path(output), &json)?;
    print!("{json}");
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Validate { file } => {
            let parsed = load(&file)?;
            #[derive(serde::Serialize)]
            struct ValidReport {
                valid: bool,
                digest: String,
                name: String,
                elements: usize,
            }
            let report = ValidReport {
                valid: true,
                digest: canon::digest(&parsed.phase)?,
                name: parsed.phase.name().to_string(),
                elements: parsed.phase.n(),
            };
            print!("{}", to_canonical_json(&report));
            Ok(0)
        }
        Command::Analyze { file } => {
            let parsed = load(&file)?;
            let report = AnalyzeReport::build(&parsed.phase)?;
            print!("{}", to_canonical_json(&report));
            Ok(0)
        }
        Command::Hom { source, target, mode, count, list, budget } => {
            let p = load(&source)?.phase;
            let q = load(&target)?.phase;
            let budget = resolve_budget(budget);
            let homs = morphism::core_seeded_homs(&p, &q, mode, budget)?;
            if count {
                println!("{}", homs.maps.len());
            } else if list {
                let reports: Vec<morphism::PhaseMorphism> = homs
                    .maps
                    .iter()
                    .map(|f| morphism::describe_morphism(&p, &q, f, mode))
                    .collect::<Result<_, _>>()?;
                print!("{}", to_canonical_json(&reports));
            } else {
                #[derive(serde::Serialize)]
                struct HomReport {
                    count: usize,
                    nodes: u64,
                }
                print!(
                    "{}",
                    to_canonical_json(&HomReport { count: homs.maps.len(), nodes: homs.nodes })
                );
            }
            Ok(0)
        }
        Command::Iso { left, right } => {
            let p = load(&left)?.phase;
            let q = load(&right)?.phase;
            let iso = equivalence::strong_equivalent(&p, &q)?;
            #[derive(serde::Serialize)]
            struct IsoReport {
                isomorphic: bool,
                witness: Option<std::collections::BTreeMap<String, String>>,
            }
            let witness = iso.map(|f| {
                f.iter()
                    .enumerate()
                    .map(|(x, &v)| {
                        (p.element_name(x).to_string(), q.element_name(v).to_string())
                    })
                    .collect()
            });
            print!("{}", to_canonical_json(&IsoReport { isomorphic: witness.is_some(), witness }));
            Ok(0)
        }
        Command::Boundary { file, output } => {
            let parsed = load(&file)?;
            let core = phaselab::filtration::rigid_core_members(&parsed.phase);
            let mut seeds = Vec::new();
            for i in 0..core.len() {
                for j in i + 1..core.len() {
                    seeds.push((core[i], core[j]));
                }
            }
            let congruence = quotient::congruence_closure(&parsed.phase, &seeds)?;
            let b = quotient::boundary(&parsed.phase)?;
            write_quotient(&parsed, &congruence, &b, &output)?;
            Ok(0)
        }
        Command::Collapse { file, depth, output } => {
            let parsed = load(&file)?;
            let congruence = quotient::stratum_congruence(&parsed.phase, depth)?;
            let collapsed = quotient::collapse_stratum(&parsed.phase, depth)?;
            write_quotient(&parsed, &congruence, &collapsed, &output)?;
            Ok(0)
        }
        Command::Complete { file, output } => {
            let parsed = load(&file)?;
            let result = quotient::completion(&parsed.phase)?;
            let sidecar = CompletionSidecar::build(&parsed.phase, &result)?;
            std::fs::write(&output, dsl::render_phase(&result.completed))?;
            let json = to_canonical_json(&sidecar);
            std::fs::write(sidecar_path(&output), &json)?;
            print!("{json}");
            Ok(0)
        }
        Command::Profile { file, max_size, budget } => {
            let parsed = load(&file)?;
            let budget = resolve_budget(budget);
            let profile = equivalence::morita_profile(&parsed.phase, max_size, budget)?;
            print!("{}", to_canonical_json(&profile));
            Ok(0)
        }
        Command::TwocatCheck { files, budget } => {
            if files.is_empty() {
                return Err(Failure { code: 2, message: "twocat-check needs at least one file".into() });
            }
            let battery: Vec<ParsedPhase> =
                files.iter().map(|f| load(f)).collect::<Result<_, _>>()?;
            let budget = resolve_budget(budget);
            let report = twocat::check_two_category_laws(&battery, budget)?;
            let ok = report.violations.is_empty();
            print!("{}", to_canonical_json(&report));
            Ok(if ok { 0 } else { 1 })
        }
        Command::Enumerate { size, max_defect, out, raw, budget } => {
            let spec = CatalogueSpec::binary(size, max_defect, !raw);
            let budget = resolve_budget(budget);
            let phases = catalogue::enumerate_phases(&spec, budget)?;
            std::fs::create_dir_all(&out)?;
            let mut digests = Vec::with_capacity(phases.len());
            for phase in &phases {
                digests.push(canon::digest(phase)?);
                std::fs::write(out.join(format!("{}.phase", phase.name())), dsl::render_phase(phase))?;
            }
            let manifest = EnumerateManifest {
                size,
                max_defect,
                dedupe: !raw,
                raw_count: catalogue::raw_phase_count(&spec).to_string(),
                emitted: phases.len(),
                digests,
            };
            let json = to_canonical_json(&manifest);
            std::fs::write(out.join("manifest.json"), &json)?;
            print!("{json}");
            Ok(0)
        }
        Command::Check { theorem, files, budget, battery } => {
            let id: TheoremId = theorem.parse()?;
            if files.is_empty() {
                return Err(Failure { code: 2, message: "check needs input files".into() });
            }
            let inputs: Vec<ParsedPhase> =
                files.iter().map(|f| load(f)).collect::<Result<_, _>>()?;
            let cfg = CheckConfig {
                budget: resolve_budget(budget),
                battery_max_size: battery,
                seed: cli.seed,
            };
            let verdict = verifier::run_check(id, &inputs, &cfg)?;
            let code = if verdict.outcome == Outcome::Counterexample { 1 } else { 0 };
            print!("{}", to_canonical_json(&verdict));
            Ok(code)
        }
        Command::Mine { theorem, size, max_defect, battery, budget } => {
            let id: TheoremId = theorem.parse()?;
            let cfg = CheckConfig {
                budget: resolve_budget(budget),
                battery_max_size: battery,
                seed: cli.seed,
            };
            let report = verifier::search_counterexamples(id, size, max_defect, &cfg)?;
            let code = if report.summary.counterexample > 0 { 1 } else { 0 };
            print!("{}", to_canonical_json(&report));
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
