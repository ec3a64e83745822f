//! The `hopfcert` command line.
//!
//! Exit status: `0` for a confirmed certificate, a valid model or a finished
//! table; `2` when certification refutes inner faithfulness; `1` for errors,
//! invalid models and inconsistent reports.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::certify::{certify, compare_idempotent_to_haar, Verdict};
use crate::error::{Error, Result};
use crate::io::{model_to_json, parse_model, parse_model_spec, parse_oracle};
use crate::linalg::{Tolerance, DEFAULT_EPS};
use crate::models::{validate_magic_unitary, MagicUnitaryModel};
use crate::moments::MomentOracle;
use crate::report::{
    render_certificate, render_comparisons, render_idempotent, render_levels, render_moments, render_validation,
    Format,
};
use crate::transfer::{Capacity, IdempotentState, Word};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_REFUTED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hopfcert", version, about = "Certify inner faithfulness of matrix models of quantum permutation groups")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the magic-unitary (or diagonal) invariants of a model file.
    Validate {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Build a model file from permutations, a Hadamard matrix or unitaries.
    BuildModel {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        tol: f64,
    },
    /// Compare m_k = #(1 in T_k) with c_k = h(chi^k) for k = 1..kmax.
    Certify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        oracle: PathBuf,
        #[arg(long)]
        kmax: usize,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        capacity: CapArgs,
    },
    /// Tabulate the Cesàro-limit idempotent state on words, optionally against an oracle's Haar values.
    Idempotent {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        oracle: Option<PathBuf>,
        /// A word such as `1:1,2:2` (1-based pairs i:j); repeatable.
        #[arg(long = "word")]
        words: Vec<String>,
        /// Tabulate every word of this length.
        #[arg(long)]
        length: Option<usize>,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        capacity: CapArgs,
    },
    /// Print the exact moments c_1..c_kmax of an oracle.
    Moments {
        #[arg(long)]
        oracle: PathBuf,
        #[arg(long)]
        kmax: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CapArgs {
    /// Largest transfer-matrix dimension n^k.
    #[arg(long, default_value_t = Capacity::default().max_dim)]
    pub cap: usize,
    /// Largest level k.
    #[arg(long, default_value_t = Capacity::default().max_level)]
    pub max_level: usize,
}

impl CapArgs {
    fn capacity(&self, n: usize) -> Result<Capacity> {
        if self.cap < n {
            return Err(Error::InvalidInput(format!("cap {} is smaller than n = {n}", self.cap)));
        }
        Ok(Capacity { max_dim: self.cap, max_level: self.max_level })
    }
}

/// Parses `1:1,2:2` into a word over `{1..n}`.
pub fn parse_word(text: &str, n: usize) -> Result<Word> {
    let pairs = text
        .split(',')
        .map(|letter| {
            let (i, j) = letter
                .trim()
                .split_once(':')
                .ok_or_else(|| Error::InvalidInput(format!("letter {letter:?} is not of the form i:j")))?;
            let parse = |s: &str| {
                s.trim().parse::<usize>().map_err(|_| Error::InvalidInput(format!("bad index {s:?} in {text:?}")))
            };
            Ok((parse(i)?, parse(j)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Word::new(pairs, n)
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load<T>(path: &Path, parse: impl Fn(&str) -> Result<T>) -> std::result::Result<T, Failure> {
    let text = read(path)?;
    parse(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn emit(text: &str, output: Option<&Path>, stdout: &mut dyn Write) -> std::result::Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(Failure::from),
    }
}

fn tolerance(eps: f64) -> std::result::Result<Tolerance, Failure> {
    Ok(Tolerance::new(eps)?)
}

fn require_kmax(kmax: usize) -> std::result::Result<(), Failure> {
    if kmax == 0 {
        return Err(Failure("--kmax must be at least 1".into()));
    }
    Ok(())
}

/// Runs one command; returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FAILURE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    match execute(config.command, stdout, stderr) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_FAILURE
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> std::result::Result<i32, Failure> {
    match command {
        Command::Validate { model, common } => {
            let tol = tolerance(common.tol)?;
            let model = load(&model, parse_model)?;
            let report = validate_magic_unitary(&model, tol);
            emit(&render_validation(&report, common.format), common.output.as_deref(), stdout)?;
            Ok(if report.is_valid() { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::BuildModel { input, output, tol } => {
            let tol = tolerance(tol)?;
            let spec = load(&input, parse_model_spec)?;
            let model = spec.build(tol).map_err(|e| Failure(format!("{}: {e}", input.display())))?;
            let mut text = model_to_json(&model);
            text.push('\n');
            emit(&text, output.as_deref(), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Certify { model, oracle, kmax, common, capacity } => {
            require_kmax(kmax)?;
            let tol = tolerance(common.tol)?;
            let model: MagicUnitaryModel = load(&model, parse_model)?;
            let oracle: MomentOracle = load(&oracle, parse_oracle)?;
            let cap = capacity.capacity(model.n())?;
            match certify(&model, &oracle, kmax, tol, cap) {
                Ok(report) => {
                    emit(&render_certificate(&report, common.format), common.output.as_deref(), stdout)?;
                    Ok(match report.verdict {
                        Verdict::ConfirmedUpTo { .. } => EXIT_OK,
                        Verdict::RefutedAt { .. } => EXIT_REFUTED,
                        Verdict::Inconsistent { .. } => EXIT_FAILURE,
                    })
                }
                Err(failure) => {
                    if !failure.levels.is_empty() {
                        let _ = write!(stderr, "completed levels:\n{}", render_levels(&failure.levels));
                    }
                    Err(Failure(failure.error.to_string()))
                }
            }
        }
        Command::Idempotent { model, oracle, words, length, common, capacity } => {
            let tol = tolerance(common.tol)?;
            let model: MagicUnitaryModel = load(&model, parse_model)?;
            let cap = capacity.capacity(model.n())?;
            let mut list = words.iter().map(|w| parse_word(w, model.n())).collect::<Result<Vec<_>>>()?;
            if let Some(len) = length {
                if len == 0 {
                    return Err(Failure("--length must be at least 1".into()));
                }
                cap.check(model.n(), len)?;
                list.extend(Word::all(model.n(), len));
            }
            if list.is_empty() {
                list = Word::all(model.n(), 1);
            }
            let text = match oracle {
                Some(path) => {
                    let oracle = load(&path, parse_oracle)?;
                    let rows = compare_idempotent_to_haar(&model, &oracle, &list, tol, cap)?;
                    render_comparisons(&rows, common.format)
                }
                None => {
                    let mut state = IdempotentState::new(&model, tol, cap);
                    let rows = list
                        .into_iter()
                        .map(|w| state.eval(&w).map(|v| (w, v.value())))
                        .collect::<Result<Vec<_>>>()?;
                    render_idempotent(&rows, common.format)
                }
            };
            emit(&text, common.output.as_deref(), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Moments { oracle, kmax, format, output } => {
            require_kmax(kmax)?;
            let oracle = load(&oracle, parse_oracle)?;
            let values = (1..=kmax).map(|k| oracle.character_moment(k).map(|c| (k, c))).collect::<Result<Vec<_>>>()?;
            emit(&render_moments(&values, format), output.as_deref(), stdout)?;
            Ok(EXIT_OK)
        }
    }
}
