//! Bulk cross-check of the parser pipelines against the naive product.

use std::io::Write;

use bmmparse::reduction::multiply_via_parser_with;
use bmmparse::rng::Xorshift64Star;
use bmmparse::{bmm_naive, random_matrix, BmmRecognizer, BoolMatrix, Cky, Kernel, ReductionError};

use crate::CliError;

const DENSITIES: [f64; 3] = [0.1, 0.5, 0.9];

pub struct VerifyOptions {
    pub trials: usize,
    pub max_m: usize,
    pub seed: u64,
    pub prune: bool,
}

type MultiplyFn = dyn Fn(&BoolMatrix, &BoolMatrix, bool) -> Result<BoolMatrix, ReductionError>;

/// A named way of producing a product that verify compares to `bmm_naive`.
pub struct Pipeline {
    pub name: &'static str,
    pub run: Box<MultiplyFn>,
}

impl Pipeline {
    pub fn new(
        name: &'static str,
        run: impl Fn(&BoolMatrix, &BoolMatrix, bool) -> Result<BoolMatrix, ReductionError> + 'static,
    ) -> Self {
        Pipeline {
            name,
            run: Box::new(run),
        }
    }
}

/// CKY and the matrix-product recognizer.
pub fn standard_pipelines() -> Vec<Pipeline> {
    vec![
        Pipeline::new("cky-pipeline", |a, b, prune| {
            multiply_via_parser_with(a, b, &Cky, prune)
        }),
        Pipeline::new("bmm-recognizer-pipeline", |a, b, prune| {
            multiply_via_parser_with(a, b, &BmmRecognizer(Kernel::Bitset), prune)
        }),
    ]
}

/// One generated trial.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub seed: u64,
    pub m: usize,
    pub density: f64,
    pub a: BoolMatrix,
    pub b: BoolMatrix,
}

/// The trials a master seed expands to; each trial has its own seed drawn
/// from the master stream, so any one of them can be replayed alone.
pub fn trials(master: u64, count: usize, max_m: usize) -> Vec<Trial> {
    let mut rng = Xorshift64Star::seeded(master);
    (0..count).map(|t| trial(rng.next_u64(), t, max_m)).collect()
}

pub fn trial(seed: u64, index: usize, max_m: usize) -> Trial {
    let mut rng = Xorshift64Star::seeded(seed);
    let m = rng.range_inclusive(1, max_m as u64) as usize;
    let density = DENSITIES[index % DENSITIES.len()];
    let a = random_matrix(m, density, rng.next_u64()).expect("density is in range");
    let b = random_matrix(m, density, rng.next_u64()).expect("density is in range");
    Trial { seed, m, density, a, b }
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io {
        file: "<report>".into(),
        source: e,
    }
}

/// Runs the trials, writing one line per trial and a summary. Stops at the
/// first disagreement with a full dump of the failing trial.
pub fn run_verify(opts: &VerifyOptions, pipelines: &[Pipeline], out: &mut dyn Write) -> Result<(), CliError> {
    if opts.trials == 0 || opts.max_m == 0 {
        return Err(CliError::Contract("trials and max-m must be at least 1".into()));
    }
    for (t, tr) in trials(opts.seed, opts.trials, opts.max_m).into_iter().enumerate() {
        let expected = bmm_naive(&tr.a, &tr.b)?;
        for p in pipelines {
            let got = (p.run)(&tr.a, &tr.b, opts.prune)?;
            if got != expected {
                writeln!(out, "trial={t} seed={} m={} path={} result=FAIL", tr.seed, tr.m, p.name).map_err(io)?;
                write!(
                    out,
                    "master_seed={}\nseed={}\nm={}\ndensity={}\nA:\n{}B:\n{}expected:\n{}got:\n{}",
                    opts.seed, tr.seed, tr.m, tr.density, tr.a, tr.b, expected, got
                )
                .map_err(io)?;
                return Err(CliError::Mismatch(format!(
                    "trial {t} (seed {}, m = {}): {} disagrees with the naive product",
                    tr.seed, tr.m, p.name
                )));
            }
        }
        writeln!(out, "trial={t} seed={} m={} result=pass", tr.seed, tr.m).map_err(io)?;
    }
    writeln!(out, "summary trials={} passed={} failed=0", opts.trials, opts.trials).map_err(io)?;
    Ok(())
}
