//! Square Boolean matrices with word-packed rows.
//!
//! Indices are 0-based: entry `(i, j)` of the API is `a_{i+1,j+1}` in the
//! usual 1-based notation. Each row occupies a whole number of 64-bit words
//! and the padding bits past column `m` are always zero.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::rng::Xorshift64Star;

pub const WORD_BITS: usize = 64;

#[derive(Debug, Error, PartialEq)]
pub enum MatrixError {
    #[error("dimension mismatch: {left}x{left} vs {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("density {0} is outside [0, 1]")]
    InvalidDensity(f64),
    #[error("matrix dimension must be at least 1")]
    Empty,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoolMatrix {
    m: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BoolMatrix {
    /// The all-zeros `m x m` matrix.
    pub fn zeros(m: usize) -> BoolMatrix {
        let words_per_row = m.div_ceil(WORD_BITS);
        BoolMatrix {
            m,
            words_per_row,
            bits: vec![0; words_per_row * m],
        }
    }

    pub fn identity(m: usize) -> BoolMatrix {
        let mut id = Self::zeros(m);
        for i in 0..m {
            id.set(i, i, true);
        }
        id
    }

    pub fn ones(m: usize) -> BoolMatrix {
        Self::from_fn(m, |_, _| true)
    }

    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize) -> bool) -> BoolMatrix {
        let mut out = Self::zeros(m);
        for i in 0..m {
            for j in 0..m {
                if f(i, j) {
                    out.set(i, j, true);
                }
            }
        }
        out
    }

    /// Builds a matrix from rows of 0/1 values. Panics on ragged input.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> BoolMatrix {
        let m = rows.len();
        for r in rows {
            assert_eq!(r.as_ref().len(), m, "ragged row");
        }
        Self::from_fn(m, |i, j| rows[i].as_ref()[j] != 0)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(
            i < self.m && j < self.m,
            "({i}, {j}) out of range for {}x{}",
            self.m,
            self.m
        );
        self.bits[i * self.words_per_row + j / WORD_BITS] >> (j % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(
            i < self.m && j < self.m,
            "({i}, {j}) out of range for {}x{}",
            self.m,
            self.m
        );
        let word = &mut self.bits[i * self.words_per_row + j / WORD_BITS];
        let mask = 1u64 << (j % WORD_BITS);
        if value {
            *word |= mask;
        } else {
            *word &= !mask;
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    /// Reads `len <= 64` consecutive bits of row `i` starting at column `start`,
    /// column `start` landing in the lowest bit. Columns past `m` read as zero.
    #[inline]
    pub fn row_bits(&self, i: usize, start: usize, len: usize) -> u64 {
        debug_assert!(len <= WORD_BITS);
        let row = self.row(i);
        let w = start / WORD_BITS;
        let off = start % WORD_BITS;
        let mut v = row.get(w).copied().unwrap_or(0) >> off;
        if off != 0 && off + len > WORD_BITS {
            v |= row.get(w + 1).copied().unwrap_or(0) << (WORD_BITS - off);
        }
        if len < WORD_BITS {
            v &= (1u64 << len) - 1;
        }
        v
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// `self |= other`; returns whether any entry changed.
    pub fn or_assign(&mut self, other: &BoolMatrix) -> Result<bool, MatrixError> {
        same_dim(self, other)?;
        let mut changed = false;
        for (dst, &src) in self.bits.iter_mut().zip(&other.bits) {
            let merged = *dst | src;
            changed |= merged != *dst;
            *dst = merged;
        }
        Ok(changed)
    }

    /// Whether every 1-entry of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &BoolMatrix) -> bool {
        self.m == other.m && self.bits.iter().zip(&other.bits).all(|(&a, &b)| a & !b == 0)
    }

    pub(crate) fn padding_is_clear(&self) -> bool {
        let used = self.m % WORD_BITS;
        if used == 0 {
            return true;
        }
        let mask = !((1u64 << used) - 1);
        (0..self.m).all(|i| self.row(i)[self.words_per_row - 1] & mask == 0)
    }
}

pub(crate) fn same_dim(a: &BoolMatrix, b: &BoolMatrix) -> Result<(), MatrixError> {
    if a.m != b.m {
        return Err(MatrixError::DimensionMismatch { left: a.m, right: b.m });
    }
    Ok(())
}

impl fmt::Debug for BoolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BoolMatrix {}x{}", self.m, self.m)?;
        for i in 0..self.m {
            for j in 0..self.m {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// The matrix file format: the dimension on the first line, then one line of
/// exactly `m` characters from `{0, 1}` per row.
impl fmt::Display for BoolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.m)?;
        let mut line = String::with_capacity(self.m);
        for i in 0..self.m {
            line.clear();
            line.extend((0..self.m).map(|j| if self.get(i, j) { '1' } else { '0' }));
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

impl FromStr for BoolMatrix {
    type Err = MatrixError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |line: usize, message: String| MatrixError::Parse { line, message };
        let mut lines = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l));
        let header = lines.next().ok_or_else(|| err(1, "missing dimension line".into()))?;
        let m: usize = header
            .trim()
            .parse()
            .map_err(|_| err(1, format!("expected a dimension, found `{header}`")))?;
        if m == 0 {
            return Err(err(1, "dimension must be at least 1".into()));
        }
        let mut out = BoolMatrix::zeros(m);
        for i in 0..m {
            let lineno = i + 2;
            let row = lines
                .next()
                .ok_or_else(|| err(lineno, format!("expected {m} rows, found {i}")))?;
            if row.chars().count() != m {
                return Err(err(
                    lineno,
                    format!("expected {m} characters, found {}", row.chars().count()),
                ));
            }
            for (j, ch) in row.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => out.set(i, j, true),
                    other => return Err(err(lineno, format!("unexpected character `{other}`"))),
                }
            }
        }
        for (k, rest) in lines.enumerate() {
            if !rest.trim().is_empty() {
                return Err(err(m + 2 + k, "unexpected trailing content".into()));
            }
        }
        Ok(out)
    }
}

/// Deterministic random matrix: entries are drawn row-major, entry `(i, j)`
/// being 1 iff the next uniform draw from [`Xorshift64Star::seeded`]`(seed)`
/// is below `density`.
pub fn random_matrix(m: usize, density: f64, seed: u64) -> Result<BoolMatrix, MatrixError> {
    if !(0.0..=1.0).contains(&density) {
        return Err(MatrixError::InvalidDensity(density));
    }
    if m == 0 {
        return Err(MatrixError::Empty);
    }
    let mut rng = Xorshift64Star::seeded(seed);
    Ok(BoolMatrix::from_fn(m, |_, _| rng.next_f64() < density))
}
