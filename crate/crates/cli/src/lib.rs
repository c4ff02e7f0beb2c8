//! Front end for the bmmparse laboratory: multiply, verify, bench and dump.
//!
//! Every subcommand writes plain text, one record per line. Exit codes:
//! `0` success, `1` verification mismatch, `2` malformed input, `3` contract
//! violation (dimension mismatch, bench size outside the accepted range).

pub mod bench;
pub mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use bmmparse::reduction::multiply_via_parser_with;
use bmmparse::{bmm_bitset, bmm_naive, BmmRecognizer, BoolMatrix, Cky, Kernel, MatrixError, ReductionError};
use clap::{Parser, Subcommand, ValueEnum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONTRACT: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{file}: {source}")]
    Io { file: String, source: std::io::Error },
    #[error("{file}: {source}")]
    Malformed { file: String, source: MatrixError },
    #[error("{0}")]
    Contract(String),
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Mismatch(_) => EXIT_MISMATCH,
            CliError::Io { .. } | CliError::Malformed { .. } | CliError::Usage(_) => EXIT_INPUT,
            CliError::Contract(_) => EXIT_CONTRACT,
        }
    }
}

impl From<ReductionError> for CliError {
    fn from(e: ReductionError) -> Self {
        CliError::Contract(e.to_string())
    }
}

impl From<MatrixError> for CliError {
    fn from(e: MatrixError) -> Self {
        CliError::Contract(e.to_string())
    }
}

/// How a product gets computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MultiplyPath {
    Naive,
    Bitset,
    #[value(alias = "cky-pipeline")]
    Cky,
    #[value(alias = "bmm-pipeline", alias = "bmm-recognizer-pipeline")]
    Bmm,
}

impl MultiplyPath {
    pub const ALL: [MultiplyPath; 4] = [
        MultiplyPath::Naive,
        MultiplyPath::Bitset,
        MultiplyPath::Cky,
        MultiplyPath::Bmm,
    ];

    /// Name used in bench records.
    pub fn record_name(self) -> &'static str {
        match self {
            MultiplyPath::Naive => "naive",
            MultiplyPath::Bitset => "bitset",
            MultiplyPath::Cky => "cky-pipeline",
            MultiplyPath::Bmm => "bmm-recognizer-pipeline",
        }
    }

    pub fn is_reduction(self) -> bool {
        matches!(self, MultiplyPath::Cky | MultiplyPath::Bmm)
    }

    pub fn multiply(self, a: &BoolMatrix, b: &BoolMatrix, prune: bool) -> Result<BoolMatrix, CliError> {
        Ok(match self {
            MultiplyPath::Naive => bmm_naive(a, b)?,
            MultiplyPath::Bitset => bmm_bitset(a, b)?,
            MultiplyPath::Cky => multiply_via_parser_with(a, b, &Cky, prune)?,
            MultiplyPath::Bmm => multiply_via_parser_with(a, b, &BmmRecognizer(Kernel::Bitset), prune)?,
        })
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "bmmparse",
    version,
    about = "Boolean matrix multiplication through context-free parsing"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Multiply two matrix files.
    Multiply {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "cky")]
        path: MultiplyPath,
        #[arg(long)]
        prune: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare both parser pipelines against the naive product on random instances.
    Verify {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long = "max-m", default_value_t = 10)]
        max_m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        prune: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time a multiply path over several sizes and fit a log-log slope.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [27usize, 64, 125])]
        sizes: Vec<usize>,
        #[arg(long, value_enum, default_value = "cky")]
        path: Vec<MultiplyPath>,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "mem-cap", default_value_t = bench::DEFAULT_MEM_CAP)]
        mem_cap: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the grammar, string and statistics built from two matrix files.
    Dump {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        prune: bool,
        /// Print the normal-form grammar instead of the raw one.
        #[arg(long)]
        cnf: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn read_matrix(path: &Path) -> Result<BoolMatrix, CliError> {
    let file = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        file: file.clone(),
        source,
    })?;
    text.parse().map_err(|source| CliError::Malformed { file, source })
}

fn read_pair(a: &Path, b: &Path) -> Result<(BoolMatrix, BoolMatrix), CliError> {
    let (ma, mb) = (read_matrix(a)?, read_matrix(b)?);
    if ma.dim() != mb.dim() {
        return Err(CliError::Contract(format!(
            "{} is {}x{} but {} is {}x{}",
            a.display(),
            ma.dim(),
            ma.dim(),
            b.display(),
            mb.dim(),
            mb.dim()
        )));
    }
    Ok((ma, mb))
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            file: p.display().to_string(),
            source,
        }),
        None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
            file: "<stdout>".into(),
            source,
        }),
    }
}

/// Dump text for an instance: the raw (or normal-form) grammar and string,
/// followed by the statistics.
pub fn dump_text(a: &BoolMatrix, b: &BoolMatrix, prune: bool, cnf: bool) -> Result<String, CliError> {
    let inst = bmmparse::build_instance(a, b, prune)?;
    let mut text = if cnf { inst.dump_cnf() } else { inst.dump() };
    text.push_str(&inst.stats().to_string());
    Ok(text)
}

pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Multiply { a, b, path, prune, out } => {
            let (ma, mb) = read_pair(&a, &b)?;
            let c = path.multiply(&ma, &mb, prune)?;
            emit(&out, &c.to_string(), stdout)
        }
        Command::Verify {
            trials,
            max_m,
            seed,
            prune,
            out,
        } => {
            let opts = verify::VerifyOptions {
                trials,
                max_m,
                seed,
                prune,
            };
            let mut report = Vec::new();
            let result = verify::run_verify(&opts, &verify::standard_pipelines(), &mut report);
            emit(&out, &String::from_utf8_lossy(&report), stdout)?;
            result
        }
        Command::Bench {
            sizes,
            path,
            reps,
            seed,
            mem_cap,
            out,
        } => {
            let opts = bench::BenchOptions {
                sizes,
                paths: path,
                reps,
                seed,
                mem_cap,
            };
            let mut report = Vec::new();
            bench::run_bench(&opts, &mut report)?;
            emit(&out, &String::from_utf8_lossy(&report), stdout)
        }
        Command::Dump { a, b, prune, cnf, out } => {
            let ma = read_matrix(&a)?;
            let mb = read_matrix(&b)?;
            if ma.dim() != mb.dim() {
                return Err(CliError::Contract(format!(
                    "{} and {} differ in dimension",
                    a.display(),
                    b.display()
                )));
            }
            emit(&out, &dump_text(&ma, &mb, prune, cnf)?, stdout)
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
