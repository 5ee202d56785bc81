//! Systematic encoding from a parity-check matrix by Gaussian elimination over
//! GF(2).

use super::ParityCheckMatrix;
use crate::{Error, Result};

type Word = u64;
const BITS: usize = Word::BITS as usize;

fn words(n: usize) -> usize {
    n.div_ceil(BITS)
}

fn get(row: &[Word], i: usize) -> bool {
    row[i / BITS] >> (i % BITS) & 1 == 1
}

/// Encoder derived from the reduced row-echelon form of `H`. Pivot columns
/// carry parity, the remaining columns carry the information bits in order.
#[derive(Debug, Clone)]
pub struct Encoder {
    n: usize,
    info_positions: Vec<usize>,
    parity_positions: Vec<usize>,
    /// For each parity bit, the packed set of information bits it sums.
    parity_rows: Vec<Vec<Word>>,
}

impl Encoder {
    pub fn new(h: &ParityCheckMatrix) -> Result<Self> {
        let n = h.n();
        let w = words(n);
        let mut dense: Vec<Vec<Word>> = h
            .rows()
            .iter()
            .map(|row| {
                let mut v = vec![0; w];
                for &c in row {
                    v[c / BITS] |= 1 << (c % BITS);
                }
                v
            })
            .collect();

        let m = dense.len();
        let mut pivots = Vec::with_capacity(m);
        let mut rank = 0;
        for col in 0..n {
            if rank == m {
                break;
            }
            let Some(p) = (rank..m).find(|&r| get(&dense[r], col)) else {
                continue;
            };
            dense.swap(rank, p);
            let pivot_row = dense[rank].clone();
            for (r, row) in dense.iter_mut().enumerate() {
                if r != rank && get(row, col) {
                    for (a, b) in row.iter_mut().zip(&pivot_row) {
                        *a ^= b;
                    }
                }
            }
            pivots.push(col);
            rank += 1;
        }
        if rank < m {
            return Err(Error::RankDeficient { rank, rows: m });
        }

        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let info_positions: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let k = info_positions.len();
        let parity_rows = dense
            .iter()
            .map(|row| {
                let mut packed = vec![0; words(k)];
                for (j, &c) in info_positions.iter().enumerate() {
                    if get(row, c) {
                        packed[j / BITS] |= 1 << (j % BITS);
                    }
                }
                packed
            })
            .collect();

        Ok(Self {
            n,
            info_positions,
            parity_positions: pivots,
            parity_rows,
        })
    }

    pub fn k(&self) -> usize {
        self.info_positions.len()
    }

    /// Codeword positions holding the information bits, ascending.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                actual: info.len(),
            });
        }
        let mut packed = vec![0 as Word; words(self.k())];
        let mut codeword = vec![0u8; self.n];
        for (j, (&b, &pos)) in info.iter().zip(&self.info_positions).enumerate() {
            codeword[pos] = b & 1;
            packed[j / BITS] |= Word::from(b & 1) << (j % BITS);
        }
        for (row, &pos) in self.parity_rows.iter().zip(&self.parity_positions) {
            let ones: u32 = row.iter().zip(&packed).map(|(a, b)| (a & b).count_ones()).sum();
            codeword[pos] = (ones & 1) as u8;
        }
        Ok(codeword)
    }
}
