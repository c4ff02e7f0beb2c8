//! Boolean matrix multiplication kernels.
//!
//! `c[i][j] = OR_k (a[i][k] AND b[k][j])`. The naive triple loop is the
//! reference every other kernel is checked against.

use crate::matrix::{same_dim, BoolMatrix, MatrixError};

/// A Boolean matrix multiplication routine.
pub trait BmmKernel {
    fn multiply(&self, a: &BoolMatrix, b: &BoolMatrix) -> Result<BoolMatrix, MatrixError>;

    fn name(&self) -> &'static str;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kernel {
    Naive,
    Bitset,
    FourRussians,
}

impl Kernel {
    pub const ALL: [Kernel; 3] = [Kernel::Naive, Kernel::Bitset, Kernel::FourRussians];
}

impl BmmKernel for Kernel {
    fn multiply(&self, a: &BoolMatrix, b: &BoolMatrix) -> Result<BoolMatrix, MatrixError> {
        match self {
            Kernel::Naive => bmm_naive(a, b),
            Kernel::Bitset => bmm_bitset(a, b),
            Kernel::FourRussians => bmm_four_russians(a, b),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Kernel::Naive => "naive",
            Kernel::Bitset => "bitset",
            Kernel::FourRussians => "four-russians",
        }
    }
}

/// Entry-by-entry evaluation of the definition, O(m^3).
pub fn bmm_naive(a: &BoolMatrix, b: &BoolMatrix) -> Result<BoolMatrix, MatrixError> {
    same_dim(a, b)?;
    let m = a.dim();
    Ok(BoolMatrix::from_fn(m, |i, j| {
        (0..m).any(|k| a.get(i, k) && b.get(k, j))
    }))
}

/// Row `i` of the product is the union of rows `k` of `b` with `a[i][k]` set,
/// taken a machine word at a time.
pub fn bmm_bitset(a: &BoolMatrix, b: &BoolMatrix) -> Result<BoolMatrix, MatrixError> {
    same_dim(a, b)?;
    let m = a.dim();
    let mut c = BoolMatrix::zeros(m);
    for i in 0..m {
        let a_row = a.row(i);
        let c_row = c.row_mut(i);
        for (wi, &word) in a_row.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let k = wi * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                for (dst, &src) in c_row.iter_mut().zip(b.row(k)) {
                    *dst |= src;
                }
            }
        }
    }
    debug_assert!(c.padding_is_clear());
    Ok(c)
}

/// Block width used by [`bmm_four_russians`]: `ceil(log2 m)`, at least 1.
pub fn four_russians_block(m: usize) -> usize {
    let mut t = 0;
    while (1usize << t) < m {
        t += 1;
    }
    t.max(1)
}

/// Four Russians: columns of `a` (rows of `b`) are cut into blocks of
/// `ceil(log2 m)`; for each block every union of its rows of `b` is
/// tabulated once, then each row of `a` picks its union by table lookup.
pub fn bmm_four_russians(a: &BoolMatrix, b: &BoolMatrix) -> Result<BoolMatrix, MatrixError> {
    same_dim(a, b)?;
    let m = a.dim();
    let t = four_russians_block(m);
    let wpr = b.words_per_row();
    let mut c = BoolMatrix::zeros(m);
    let mut table = vec![0u64; (1 << t) * wpr];
    let mut start = 0;
    while start < m {
        let width = t.min(m - start);
        // table[mask] = table[mask without lowest bit] | row(start + lowest bit)
        for mask in 1usize..(1 << width) {
            let low = mask.trailing_zeros() as usize;
            let prev = mask & (mask - 1);
            let src = b.row(start + low);
            for w in 0..wpr {
                table[mask * wpr + w] = table[prev * wpr + w] | src[w];
            }
        }
        for i in 0..m {
            let mask = a.row_bits(i, start, width) as usize;
            if mask == 0 {
                continue;
            }
            let entry = &table[mask * wpr..(mask + 1) * wpr];
            for (dst, &src) in c.row_mut(i).iter_mut().zip(entry) {
                *dst |= src;
            }
        }
        start += width;
    }
    debug_assert!(c.padding_is_clear());
    Ok(c)
}
