//! The `connectif` command line.
//!
//! [`run`] takes the argument vector and returns the exit code together with
//! everything written to stdout and stderr, so the binary and the tests share
//! one code path. Exit codes: 0 success or positive verdict, 1 negative
//! mathematical verdict, 2 usage or input error, 3 enumeration cap exceeded.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use connectif::interval::{build_witness, verify_witness, witness_defect};
use connectif::io::{parse_interval, parse_presheaf, parse_rational, parse_witness, serialize_witness, SpaceFile};
use connectif::sheaf::validate_presheaf;
use connectif::site::{covering_table, enumerate_sieves, is_covering, verify_axioms, SamplingMode, DEFAULT_CAP};
use connectif::structure::{closure, validate_structure};
use connectif::{is_sheaf, ConnectivityStructure, Error, GroundSet, SubsetMask};

mod report;

use report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "connectif",
    version,
    about = "Covering sieves and sheaves on finite connectivity spaces"
)]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CapArg {
    /// Maximum number of sieves (or matching families) enumerated per object.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the structure axioms on the listed family.
    Validate { file: PathBuf },
    /// Print the structure generated by the listed family.
    Generate { file: PathBuf },
    /// Print the connected sets contained in a connected set.
    Induced {
        file: PathBuf,
        /// Comma-separated labels; empty for ∅.
        #[arg(long = "set", allow_hyphen_values = true)]
        set: String,
    },
    /// List the sieves on a connected set.
    Sieves {
        file: PathBuf,
        #[arg(long = "on")]
        on: String,
        /// Only list covering sieves.
        #[arg(long)]
        covering: bool,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Covering sieves of every connected set.
    Jtable {
        file: PathBuf,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Connected sets not generated by their proper connected subsets.
    Irreducibles { file: PathBuf },
    /// Check maximality, stability and transitivity of the covering sieves.
    Axioms {
        file: PathBuf,
        #[arg(long, conflicts_with_all = ["samples", "seed"])]
        exhaustive: bool,
        #[arg(long, requires = "seed")]
        samples: Option<usize>,
        #[arg(long, requires = "samples")]
        seed: Option<u64>,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Check the sheaf condition for a presheaf file.
    Sheaf {
        space: PathBuf,
        presheaf: PathBuf,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Build (or check) a chain certificate that an interval is covered by
    /// its subintervals shorter than epsilon.
    IntervalWitness {
        /// `lo,hi`
        #[arg(long, allow_hyphen_values = true)]
        target: Option<String>,
        /// Positive rational, e.g. `3/10`.
        #[arg(long)]
        epsilon: Option<String>,
        /// Check the witness in this file instead of building one.
        #[arg(long = "verify-only")]
        verify_only: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn report(code: i32, report: Report, format: Format) -> Self {
        Outcome {
            code,
            stdout: report.render(format),
            stderr: String::new(),
        }
    }

    fn failure(code: i32, message: impl Into<String>) -> Self {
        let mut stderr = format!("error: {}", message.into());
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Outcome {
            code,
            stdout: String::new(),
            stderr,
        }
    }
}

/// Command failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    /// Maps a library error, rendering masks with the ground set's labels when known.
    fn from_error(err: Error, ground: Option<&GroundSet>) -> Self {
        let show = |m: SubsetMask| match ground {
            Some(g) => g.show(m),
            None => m.to_string(),
        };
        match err {
            Error::CapExceeded { base, cap, partial } => Failure {
                code: EXIT_CAP,
                message: format!(
                    "enumeration cap {cap} exceeded on {} ({partial} enumerated)",
                    show(base)
                ),
            },
            Error::NotConnected(m) => Failure::usage(format!("{} is not connected", show(m))),
            Error::InvalidStructure(violations) => {
                let lines: Vec<String> = violations
                    .iter()
                    .map(|v| match ground {
                        Some(g) => report::describe_violation(g, v),
                        None => format!("{v:?}"),
                    })
                    .collect();
                Failure::usage(format!("not a connectivity structure:\n  {}", lines.join("\n  ")))
            }
            other => Failure::usage(other.to_string()),
        }
    }
}

type CmdResult = Result<(i32, Report), Failure>;

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let text = err.render().to_string();
            return if err.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok((code, report)) => Outcome::report(code, report, cli.format),
        Err(failure) => Outcome::failure(failure.code, failure.message),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_space_file(path: &Path) -> Result<SpaceFile, Failure> {
    SpaceFile::parse(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_structure(path: &Path) -> Result<ConnectivityStructure, Failure> {
    let space = load_space_file(path)?;
    let ground = space
        .ground()
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    space.into_structure().map_err(|e| {
        let f = Failure::from_error(e, Some(&ground));
        Failure::usage(format!("{}: {}", path.display(), f.message))
    })
}

fn parse_set(k: &ConnectivityStructure, key: &str) -> Result<SubsetMask, Failure> {
    let set = k.ground().parse_key(key).map_err(|e| Failure::usage(e.to_string()))?;
    k.require(set).map_err(|e| Failure::from_error(e, Some(k.ground())))?;
    Ok(set)
}

fn dispatch(command: Command) -> CmdResult {
    match command {
        Command::Validate { file } => {
            let space = load_space_file(&file)?;
            let ground = space.ground().map_err(|e| Failure::usage(e.to_string()))?;
            let mut family = space.masks(&ground).map_err(|e| Failure::usage(e.to_string()))?;
            family.push(SubsetMask::EMPTY);
            let report = validate_structure(&ground, &family).map_err(|e| Failure::usage(e.to_string()))?;
            let code = if report.is_ok() { EXIT_OK } else { EXIT_NEGATIVE };
            Ok((code, Report::validation(&ground, family.len(), &report)))
        }
        Command::Generate { file } => {
            let space = load_space_file(&file)?;
            let ground = space.ground().map_err(|e| Failure::usage(e.to_string()))?;
            let gens = space.masks(&ground).map_err(|e| Failure::usage(e.to_string()))?;
            let k = ConnectivityStructure::new(ground.clone(), closure(gens))
                .map_err(|e| Failure::from_error(e, Some(&ground)))?;
            Ok((EXIT_OK, Report::generated(&k)))
        }
        Command::Induced { file, set } => {
            let k = load_structure(&file)?;
            let a = parse_set(&k, &set)?;
            let induced = k.induced(a).map_err(|e| Failure::from_error(e, Some(k.ground())))?;
            Ok((EXIT_OK, Report::induced(&k, a, &induced)))
        }
        Command::Sieves {
            file,
            on,
            covering,
            cap,
        } => {
            let k = load_structure(&file)?;
            let a = parse_set(&k, &on)?;
            let sieves = enumerate_sieves(&k, a, cap.cap).map_err(|e| Failure::from_error(e, Some(k.ground())))?;
            let listed: Vec<_> = sieves
                .into_iter()
                .map(|s| {
                    let covers = is_covering(&k, &s);
                    (s, covers)
                })
                .filter(|(_, covers)| !covering || *covers)
                .collect();
            Ok((EXIT_OK, Report::sieves(&k, a, covering, &listed)))
        }
        Command::Jtable { file, cap } => {
            let k = load_structure(&file)?;
            let table = covering_table(&k, cap.cap).map_err(|e| Failure::from_error(e, Some(k.ground())))?;
            Ok((EXIT_OK, Report::jtable(&k, &table)))
        }
        Command::Irreducibles { file } => {
            let k = load_structure(&file)?;
            Ok((EXIT_OK, Report::irreducibles(&k, &k.irreducibles())))
        }
        Command::Axioms {
            file,
            exhaustive: _,
            samples,
            seed,
            cap,
        } => {
            let k = load_structure(&file)?;
            let mode = match (samples, seed) {
                (Some(samples), Some(seed)) => SamplingMode::Randomized { samples, seed },
                _ => SamplingMode::Exhaustive,
            };
            let reports = verify_axioms(&k, mode, cap.cap).map_err(|e| Failure::from_error(e, Some(k.ground())))?;
            let code = if reports.iter().all(|r| r.passed()) {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            };
            Ok((code, Report::axioms(&k, mode, &reports)))
        }
        Command::Sheaf { space, presheaf, cap } => {
            let k = load_structure(&space)?;
            let f = parse_presheaf(&read(&presheaf)?, &k).map_err(|e| {
                Failure::usage(format!(
                    "{}: {}",
                    presheaf.display(),
                    Failure::from_error(e, Some(k.ground())).message
                ))
            })?;
            let functoriality = validate_presheaf(&f, &k).map_err(|e| Failure::usage(e.to_string()))?;
            if !functoriality.is_ok() {
                let lines: Vec<String> = functoriality
                    .violations
                    .iter()
                    .map(|v| report::describe_functoriality(&k, &f, v))
                    .collect();
                return Err(Failure::usage(format!(
                    "{}: restrictions are not functorial:\n  {}",
                    presheaf.display(),
                    lines.join("\n  ")
                )));
            }
            let table = covering_table(&k, cap.cap).map_err(|e| Failure::from_error(e, Some(k.ground())))?;
            let verdict = is_sheaf(&f, &k, &table, cap.cap).map_err(|e| Failure::from_error(e, Some(k.ground())))?;
            let code = if verdict.is_sheaf() { EXIT_OK } else { EXIT_NEGATIVE };
            Ok((code, Report::sheaf(&k, &f, &verdict)))
        }
        Command::IntervalWitness {
            target,
            epsilon,
            verify_only,
        } => {
            let target = target
                .map(|t| parse_interval(&t))
                .transpose()
                .map_err(|e| Failure::usage(e.to_string()))?;
            let epsilon = epsilon
                .map(|e| parse_rational(&e))
                .transpose()
                .map_err(|e| Failure::usage(e.to_string()))?;
            match verify_only {
                Some(path) => {
                    let witness =
                        parse_witness(&read(&path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
                    if target.as_ref().is_some_and(|t| *t != witness.target) {
                        return Err(Failure::usage("--target differs from the witness file"));
                    }
                    if epsilon.as_ref().is_some_and(|e| *e != witness.epsilon) {
                        return Err(Failure::usage("--epsilon differs from the witness file"));
                    }
                    let defect = witness_defect(&witness);
                    let code = if defect.is_none() { EXIT_OK } else { EXIT_NEGATIVE };
                    Ok((code, Report::witness_check(&witness, defect)))
                }
                None => {
                    let (Some(target), Some(epsilon)) = (target, epsilon) else {
                        return Err(Failure::usage(
                            "--target and --epsilon are required unless --verify-only is given",
                        ));
                    };
                    let witness = build_witness(&target, &epsilon).map_err(|e| Failure::usage(e.to_string()))?;
                    let verified = verify_witness(&witness);
                    let code = if verified { EXIT_OK } else { EXIT_NEGATIVE };
                    Ok((code, Report::witness(&witness, verified, serialize_witness(&witness))))
                }
            }
        }
    }
}
