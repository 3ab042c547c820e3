//! `kdense` command line: solve, oracle, translate and corpus subcommands.
//!
//! The verdict is always the first stdout line. Exit status reports errors
//! only: 0 answered, 64 usage, 65 formula parse error, 70 internal
//! invariant violation (including a failing corpus suite).

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use kdense_core::corpus::{run_spec, CorpusSpec, Logic as CorpusLogic};
use kdense_core::formula::ParseError;
use kdense_core::kde::{kde_countermodel, kde_sat, KdeConfig, KdeError};
use kdense_core::kdeab::{BoundPolicy, Solver, SolverConfig};
use kdense_core::oracle::{bounded_search, FrameClass, OracleError};
use kdense_core::translate::{fresh_atom, tau};
use kdense_core::{parse, Formula, FormulaSet, KripkeModel, Mode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_PARSE: i32 = 65;
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Parser, Debug)]
#[command(name = "kdense", version, about = "Decision procedures for the modal logics of density")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Logic {
    Kde,
    Kdeab,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SolveMode {
    Sat,
    Valid,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Bound {
    Lasso,
    Counter,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Class {
    All,
    Dense,
    WeaklyDense,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide satisfiability or validity of a formula.
    Solve {
        #[arg(long, value_enum)]
        logic: Logic,
        #[arg(long, value_enum)]
        mode: SolveMode,
        /// Write the witness (or countermodel) as JSON to this path.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "lasso")]
        bound: Bound,
        /// Fixed chain length for `--bound counter` instead of the per-anchor default.
        #[arg(long)]
        counter: Option<String>,
        #[arg(long)]
        no_memo: bool,
        /// Print search counters as JSON on the second line.
        #[arg(long)]
        stats: bool,
        #[arg(long, default_value_t = kdense_core::kde::DEFAULT_MAX_FREE_BITS)]
        max_free_bits: usize,
        formula: String,
    },
    /// Exhaustive bounded model search.
    Oracle {
        #[arg(long, value_enum)]
        class: Class,
        #[arg(long)]
        max_worlds: usize,
        /// Syntax to parse the formula in; inferred when omitted.
        #[arg(long, value_enum)]
        logic: Option<Logic>,
        formula: String,
    },
    /// Relativise a unimodal formula to a fresh atom.
    Translate {
        #[arg(long)]
        fresh: Option<String>,
        formula: String,
    },
    /// Cross-check the solvers against the oracle on an exhaustive corpus.
    Corpus {
        #[arg(long, value_enum)]
        logic: Logic,
        #[arg(long, default_value_t = 5)]
        max_size: usize,
        #[arg(long, default_value_t = 1)]
        atoms: usize,
        #[arg(long)]
        oracle_worlds: Option<usize>,
    },
}

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

    fn internal(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure {
            code: EXIT_PARSE,
            message: format!("parse error: {e}"),
        }
    }
}

impl From<KdeError> for Failure {
    fn from(e: KdeError) -> Self {
        match e {
            KdeError::BadClip(_) => Failure::internal(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::internal(format!("i/o error: {e}"))
    }
}

/// Runs the command line `args` (program name first) and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "kdense: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Solve {
            logic,
            mode,
            model,
            bound,
            counter,
            no_memo,
            stats,
            max_free_bits,
            formula,
        } => {
            let policy = match (bound, counter) {
                (Bound::Lasso, None) => BoundPolicy::Lasso,
                (Bound::Lasso, Some(_)) => return Err(Failure::usage("--counter requires --bound counter")),
                (Bound::Counter, None) => BoundPolicy::Counter(None),
                (Bound::Counter, Some(n)) => BoundPolicy::Counter(Some(
                    n.parse().map_err(|_| Failure::usage(format!("--counter: `{n}` is not a natural number")))?,
                )),
            };
            let solve = SolveArgs {
                mode,
                policy,
                memo: !no_memo,
                stats,
                kde: KdeConfig { max_free_bits },
            };
            let (verdict, witness, stats_json) = match logic {
                Logic::Kde => solve_kde(&parse(&formula, Mode::Unimodal)?, &solve)?,
                Logic::Kdeab => solve_kdeab(&parse(&formula, Mode::Bimodal)?, &solve)?,
            };
            writeln!(out, "{verdict}")?;
            if let Some(s) = stats_json {
                writeln!(out, "{s}")?;
            }
            if let Some(path) = model {
                match witness {
                    Some(m) => std::fs::write(&path, m.to_json() + "\n")?,
                    None => {
                        if path.exists() {
                            std::fs::remove_file(&path)?;
                        }
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Oracle {
            class,
            max_worlds,
            logic,
            formula,
        } => {
            let class = match class {
                Class::All => FrameClass::All,
                Class::Dense => FrameClass::Dense,
                Class::WeaklyDense => FrameClass::WeaklyDense,
            };
            let phi = match logic {
                Some(Logic::Kde) => parse(&formula, Mode::Unimodal)?,
                Some(Logic::Kdeab) => parse(&formula, Mode::Bimodal)?,
                None if class == FrameClass::WeaklyDense => parse(&formula, Mode::Bimodal)?,
                None => match parse(&formula, Mode::Unimodal) {
                    Err(ParseError::ModeMismatch { .. }) => parse(&formula, Mode::Bimodal)?,
                    other => other?,
                },
            };
            let u: FormulaSet = std::iter::once(phi.clone()).collect();
            match bounded_search(&u, class, max_worlds, phi.atoms().len())? {
                Some(m) => {
                    writeln!(out, "FOUND")?;
                    writeln!(out, "{}", m.to_json())?;
                }
                None => writeln!(out, "NONE-WITHIN-BOUND")?,
            }
            Ok(EXIT_OK)
        }
        Command::Translate { fresh, formula } => {
            let phi = parse(&formula, Mode::Unimodal)?;
            let p = fresh.unwrap_or_else(|| fresh_atom(&phi));
            let t = tau(&p, &phi).map_err(|e| Failure::usage(e.to_string()))?;
            writeln!(out, "{}", t.render(Mode::Unimodal))?;
            Ok(EXIT_OK)
        }
        Command::Corpus {
            logic,
            max_size,
            atoms,
            oracle_worlds,
        } => {
            let logic = match logic {
                Logic::Kde => CorpusLogic::Kde,
                Logic::Kdeab => CorpusLogic::Kdeab,
            };
            let spec = CorpusSpec {
                max_size,
                atoms,
                logic,
                oracle_worlds: oracle_worlds.unwrap_or(match logic {
                    CorpusLogic::Kde => 3,
                    CorpusLogic::Kdeab => 2,
                }),
            };
            if atoms == 0 || atoms > kdense_core::corpus::ATOM_NAMES.len() {
                return Err(Failure::usage("--atoms must be between 1 and 6"));
            }
            let reports = run_spec(&spec);
            let mut all = true;
            for r in &reports {
                writeln!(out, "{r}")?;
                all &= r.passed();
            }
            writeln!(out, "{}", if all { "ALL-PASS" } else { "SOME-FAILED" })?;
            Ok(if all { EXIT_OK } else { EXIT_INTERNAL })
        }
    }
}

struct SolveArgs {
    mode: SolveMode,
    policy: BoundPolicy,
    memo: bool,
    stats: bool,
    kde: KdeConfig,
}

type Answer = (&'static str, Option<KripkeModel>, Option<String>);

fn solve_kde(phi: &Formula, args: &SolveArgs) -> Result<Answer, Failure> {
    match args.mode {
        SolveMode::Sat => {
            let r = kde_sat(phi, &args.kde)?;
            let stats = args.stats.then(|| r.stats_json());
            Ok((if r.verdict.is_sat() { "SAT" } else { "UNSAT" }, r.witness, stats))
        }
        SolveMode::Valid => {
            let (counter, stats) = kde_countermodel(phi, &args.kde)?;
            let stats = args
                .stats
                .then(|| serde_json::to_string(&stats).expect("stats serialize"));
            Ok((if counter.is_none() { "VALID" } else { "INVALID" }, counter, stats))
        }
    }
}

fn solve_kdeab(phi: &Formula, args: &SolveArgs) -> Result<Answer, Failure> {
    let query = match args.mode {
        SolveMode::Sat => phi.clone(),
        SolveMode::Valid => Formula::not(phi.clone()),
    };
    let u: FormulaSet = std::iter::once(query).collect();
    let mut solver = Solver::new(SolverConfig {
        policy: args.policy.clone(),
        memo: args.memo,
    });
    let r = solver.sat_set(&u).map_err(|e| Failure::internal(e.to_string()))?;
    let stats = args.stats.then(|| r.stats_json());
    let verdict = match (args.mode, r.verdict.is_sat()) {
        (SolveMode::Sat, true) => "SAT",
        (SolveMode::Sat, false) => "UNSAT",
        (SolveMode::Valid, true) => "INVALID",
        (SolveMode::Valid, false) => "VALID",
    };
    Ok((verdict, r.witness, stats))
}
