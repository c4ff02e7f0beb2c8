//! Wall-clock timing of the multiply paths and log-log exponent fitting.

use std::fmt;
use std::io::Write;
use std::time::Instant;

use bmmparse::reduction::block_size;
use bmmparse::{build_instance, random_matrix};

use crate::{CliError, MultiplyPath};

pub const DEFAULT_MEM_CAP: u64 = 2 << 30;
pub const MIN_BENCH_M: usize = 8;
pub const R_SQUARED_WARN: f64 = 0.98;

pub struct BenchOptions {
    pub sizes: Vec<usize>,
    pub paths: Vec<MultiplyPath>,
    pub reps: usize,
    pub seed: u64,
    pub mem_cap: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub m: usize,
    pub path: MultiplyPath,
    /// Median over the repetitions, in seconds.
    pub wall_time: f64,
    /// Only reduction paths build a grammar.
    pub grammar_size: Option<usize>,
    pub string_length: Option<usize>,
}

impl fmt::Display for BenchRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<usize>| v.map_or_else(|| "na".to_string(), |v| v.to_string());
        write!(
            f,
            "record m={} path={} wall_time={:.9} grammar_size={} string_length={}",
            self.m,
            self.path.record_name(),
            self.wall_time,
            opt(self.grammar_size),
            opt(self.string_length)
        )
    }
}

/// Ordinary least squares of `ln t` on `ln m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl ExponentFit {
    /// `None` unless there are at least three distinct sizes.
    pub fn fit(points: &[(usize, f64)]) -> Option<ExponentFit> {
        let mut sizes: Vec<usize> = points.iter().map(|p| p.0).collect();
        sizes.sort_unstable();
        sizes.dedup();
        if sizes.len() < 3 {
            return None;
        }
        let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
        let k = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / k;
        let my = ys.iter().sum::<f64>() / k;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let r_squared = if syy == 0.0 {
            1.0
        } else {
            (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
        };
        Some(ExponentFit {
            slope,
            intercept,
            r_squared,
        })
    }
}

/// Rough upper estimate of the bytes one multiplication on `path` allocates.
pub fn estimate_bytes(m: usize, path: MultiplyPath) -> u64 {
    let m = m as u64;
    let words = |d: u64| d.div_ceil(64) * 8;
    let matrices = 3 * m * words(m);
    if !path.is_reduction() {
        return matrices;
    }
    let n = block_size(m as usize) as u64;
    let f = n * n + 1;
    let len = 3 * n + 6;
    let productions = f * f * f + f * f + 2 * m * m + 4 * len;
    let nonterminals = 3 * f * f + 2 * len;
    // raw and normal-form grammars plus the dedup set
    let grammar = 3 * 96 * productions + 2 * 64 * nonterminals;
    let chart = (len + 1) * (len + 1) * words(nonterminals);
    let spans = match path {
        MultiplyPath::Bmm => nonterminals * (len + 1) * words(len + 1),
        _ => 0,
    };
    matrices + grammar + chart + spans
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        (xs[k / 2 - 1] + xs[k / 2]) / 2.0
    }
}

pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub fits: Vec<(MultiplyPath, Option<ExponentFit>)>,
}

impl BenchReport {
    pub fn fit_for(&self, path: MultiplyPath) -> Option<ExponentFit> {
        self.fits.iter().find(|f| f.0 == path).and_then(|f| f.1)
    }
}

fn check(opts: &BenchOptions) -> Result<(), CliError> {
    if opts.reps == 0 {
        return Err(CliError::Contract("reps must be at least 1".into()));
    }
    if opts.sizes.is_empty() || opts.paths.is_empty() {
        return Err(CliError::Contract("need at least one size and one path".into()));
    }
    for &m in &opts.sizes {
        if m < MIN_BENCH_M {
            return Err(CliError::Contract(format!(
                "bench size {m} is below the minimum {MIN_BENCH_M}"
            )));
        }
        for &p in &opts.paths {
            let need = estimate_bytes(m, p);
            if need > opts.mem_cap {
                return Err(CliError::Contract(format!(
                    "m = {m} on {} needs about {need} bytes, above the cap of {}",
                    p.record_name(),
                    opts.mem_cap
                )));
            }
        }
    }
    Ok(())
}

/// Times every (size, path) pair serially. Inputs are seeded random
/// matrices of density 0.5; each pair gets one untimed warm-up run.
pub fn bench(opts: &BenchOptions) -> Result<BenchReport, CliError> {
    check(opts)?;
    let mut records = Vec::new();
    for &path in &opts.paths {
        for &m in &opts.sizes {
            let a = random_matrix(m, 0.5, opts.seed ^ (m as u64))?;
            let b = random_matrix(m, 0.5, opts.seed ^ (m as u64) ^ 0xb)?;
            let (grammar_size, string_length) = if path.is_reduction() {
                let s = build_instance(&a, &b, false)?.stats();
                (Some(s.grammar_size), Some(s.string_length))
            } else {
                (None, None)
            };
            std::hint::black_box(path.multiply(&a, &b, false)?);
            let times = (0..opts.reps)
                .map(|_| {
                    let start = Instant::now();
                    let c = path.multiply(&a, &b, false);
                    let t = start.elapsed().as_secs_f64();
                    std::hint::black_box(c).map(|_| t.max(1e-9))
                })
                .collect::<Result<Vec<f64>, CliError>>()?;
            records.push(BenchRecord {
                m,
                path,
                wall_time: median(times),
                grammar_size,
                string_length,
            });
        }
    }
    let fits = opts
        .paths
        .iter()
        .map(|&p| {
            let pts: Vec<(usize, f64)> = records
                .iter()
                .filter(|r| r.path == p)
                .map(|r| (r.m, r.wall_time))
                .collect();
            (p, ExponentFit::fit(&pts))
        })
        .collect();
    Ok(BenchReport { records, fits })
}

pub fn write_report(report: &BenchReport, out: &mut dyn Write) -> std::io::Result<()> {
    for r in &report.records {
        writeln!(out, "{r}")?;
    }
    for (path, fit) in &report.fits {
        match fit {
            Some(f) => {
                writeln!(
                    out,
                    "fit path={} slope={:.4} intercept={:.4} r_squared={:.4}",
                    path.record_name(),
                    f.slope,
                    f.intercept,
                    f.r_squared
                )?;
                if f.r_squared < R_SQUARED_WARN {
                    writeln!(
                        out,
                        "warning path={} r_squared={:.4} below {R_SQUARED_WARN}",
                        path.record_name(),
                        f.r_squared
                    )?;
                }
            }
            None => writeln!(
                out,
                "fit path={} skipped: needs at least 3 distinct sizes",
                path.record_name()
            )?,
        }
    }
    Ok(())
}

pub fn run_bench(opts: &BenchOptions, out: &mut dyn Write) -> Result<(), CliError> {
    let report = bench(opts)?;
    write_report(&report, out).map_err(|source| CliError::Io {
        file: "<report>".into(),
        source,
    })
}
