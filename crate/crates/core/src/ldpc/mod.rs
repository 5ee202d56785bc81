//! LDPC coding: parity-check matrices, encoding, belief-propagation decoding and
//! the block interleaver placed between the code and the modulator.

mod alist;
mod construct;
mod decoder;
mod encoder;
mod interleaver;

pub use alist::{load_alist, write_alist};
pub use construct::regular_code;
pub use decoder::{BpDecoder, DecodeResult, DecoderKind};
pub use encoder::Encoder;
pub use interleaver::BlockInterleaver;

use crate::{Error, Result};
use std::path::Path;

/// Sparse binary parity-check matrix holding both the row and column views.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    n: usize,
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
}

impl ParityCheckMatrix {
    /// Builds a matrix with `n` columns from the column indices of each row.
    pub fn from_rows(n: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut cols = vec![Vec::new(); n];
        let mut sorted_rows = Vec::with_capacity(rows.len());
        for (r, mut row) in rows.into_iter().enumerate() {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidMatrix(format!("row {r} repeats a column")));
            }
            for &c in &row {
                if c >= n {
                    return Err(Error::InvalidMatrix(format!(
                        "row {r} references column {c} >= {n}"
                    )));
                }
                cols[c].push(r);
            }
            sorted_rows.push(row);
        }
        let m = sorted_rows.len();
        if m == 0 || m >= n {
            return Err(Error::InvalidMatrix(format!(
                "need 0 < rows < columns, got {m} x {n}"
            )));
        }
        Ok(Self {
            n,
            rows: sorted_rows,
            cols,
        })
    }

    /// Code length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of checks.
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// Information length `n - m`.
    pub fn k(&self) -> usize {
        self.n - self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<usize>] {
        &self.cols
    }

    pub fn edges(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// `H · bits = 0` over GF(2).
    pub fn syndrome_ok(&self, bits: &[u8]) -> bool {
        self.rows
            .iter()
            .all(|row| row.iter().fold(0u8, |acc, &c| acc ^ (bits[c] & 1)) == 0)
    }

    /// Number of length-4 cycles in the Tanner graph.
    pub fn four_cycles(&self) -> usize {
        let mut count = 0;
        for a in 0..self.m() {
            for b in (a + 1)..self.m() {
                let shared = count_shared(&self.rows[a], &self.rows[b]);
                count += shared * shared.saturating_sub(1) / 2;
            }
        }
        count
    }
}

fn count_shared(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// A parity-check matrix together with its cached systematic encoder.
#[derive(Debug, Clone)]
pub struct LdpcCode {
    h: ParityCheckMatrix,
    encoder: Encoder,
}

/// The (3,6)-regular, length-1944 code shipped with the crate.
const REGULAR_1944: &str = include_str!("../../codes/regular_3_6_n1944.alist");

impl LdpcCode {
    pub fn new(h: ParityCheckMatrix) -> Result<Self> {
        let encoder = Encoder::new(&h)?;
        Ok(Self { h, encoder })
    }

    pub fn from_alist_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::new(load_alist(&text)?)
    }

    /// Resolves a code reference: `builtin:regular-1944` or a path to an alist
    /// file.
    pub fn from_reference(reference: &str) -> Result<Self> {
        match reference {
            "builtin:regular-1944" => Self::new(load_alist(REGULAR_1944)?),
            r if r.starts_with("builtin:") => {
                Err(Error::Config(format!("unknown builtin code '{r}'")))
            }
            path => Self::from_alist_file(path),
        }
    }

    pub fn regular_1944() -> Self {
        Self::from_reference("builtin:regular-1944").expect("shipped code is valid")
    }

    pub fn h(&self) -> &ParityCheckMatrix {
        &self.h
    }

    pub fn n(&self) -> usize {
        self.h.n()
    }

    pub fn k(&self) -> usize {
        self.h.k()
    }

    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        self.encoder.encode(info)
    }

    /// Information bits of a codeword.
    pub fn extract_info(&self, codeword: &[u8]) -> Vec<u8> {
        self.encoder
            .info_positions()
            .iter()
            .map(|&p| codeword[p])
            .collect()
    }

    pub fn info_positions(&self) -> &[usize] {
        self.encoder.info_positions()
    }
}
