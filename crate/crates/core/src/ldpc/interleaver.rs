//! Row-in, column-out block interleaver. When the length is not a multiple of
//! the row count the last row is short and the missing cells are skipped on
//! read-out.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockInterleaver {
    rows: usize,
    cols: usize,
    /// `output[p] = input[perm[p]]`.
    perm: Vec<usize>,
}

impl BlockInterleaver {
    pub fn new(len: usize, rows: usize) -> Result<Self> {
        if rows == 0 || len == 0 {
            return Err(Error::Config(format!(
                "interleaver needs positive length and rows, got {len} and {rows}"
            )));
        }
        let rows = rows.min(len);
        let cols = len.div_ceil(rows);
        let mut perm = Vec::with_capacity(len);
        for c in 0..cols {
            for r in 0..rows {
                let i = r * cols + c;
                if i < len {
                    perm.push(i);
                }
            }
        }
        Ok(Self { rows, cols, perm })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn interleave<T: Copy>(&self, input: &[T]) -> Vec<T> {
        assert_eq!(input.len(), self.len(), "interleaver input length");
        self.perm.iter().map(|&i| input[i]).collect()
    }

    pub fn deinterleave<T: Copy + Default>(&self, input: &[T]) -> Vec<T> {
        assert_eq!(input.len(), self.len(), "deinterleaver input length");
        let mut out = vec![T::default(); input.len()];
        for (&i, &v) in self.perm.iter().zip(input) {
            out[i] = v;
        }
        out
    }
}
