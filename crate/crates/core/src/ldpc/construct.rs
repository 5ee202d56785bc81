//! Random regular LDPC construction.

use super::{Encoder, ParityCheckMatrix};
use crate::{Error, Result};
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Builds an `n`-column matrix with column weight `dv` and row weight `dc`,
/// free of length-4 cycles and of full rank. Columns are connected one at a
/// time to the least-filled checks that keep the graph 4-cycle free; seeds
/// are tried in turn starting from `seed` until a construction succeeds.
pub fn regular_code(n: usize, dv: usize, dc: usize, seed: u64) -> Result<ParityCheckMatrix> {
    if dv == 0 || dc <= dv || !(n * dv).is_multiple_of(dc) {
        return Err(Error::InvalidMatrix(format!(
            "cannot build a ({dv},{dc}) regular code of length {n}"
        )));
    }
    for attempt in 0..64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        if let Some(rows) = try_build(n, dv, dc, &mut rng) {
            let h = ParityCheckMatrix::from_rows(n, rows)?;
            if Encoder::new(&h).is_ok() {
                return Ok(h);
            }
        }
    }
    Err(Error::InvalidMatrix(format!(
        "no 4-cycle-free full-rank ({dv},{dc}) code of length {n} found"
    )))
}

fn try_build(n: usize, dv: usize, dc: usize, rng: &mut ChaCha8Rng) -> Option<Vec<Vec<usize>>> {
    let m = n * dv / dc;
    let mut rows: Vec<Vec<usize>> = vec![Vec::with_capacity(dc); m];
    // checks reachable from each check through one variable
    let mut neighbours: Vec<Vec<bool>> = vec![vec![false; m]; m];
    for v in 0..n {
        let mut chosen: Vec<usize> = Vec::with_capacity(dv);
        for _ in 0..dv {
            let candidates: Vec<usize> = (0..m)
                .filter(|&c| rows[c].len() < dc && !chosen.contains(&c))
                .filter(|&c| chosen.iter().all(|&p| !neighbours[p][c]))
                .collect();
            let least = candidates.iter().map(|&c| rows[c].len()).min()?;
            let best: Vec<usize> = candidates
                .into_iter()
                .filter(|&c| rows[c].len() == least)
                .collect();
            chosen.push(*best.choose(rng)?);
        }
        for &a in &chosen {
            rows[a].push(v);
            for &b in &chosen {
                if a != b {
                    neighbours[a][b] = true;
                }
            }
        }
    }
    Some(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_regular_code() {
        let h = regular_code(96, 3, 6, 1).unwrap();
        assert_eq!((h.n(), h.m()), (96, 48));
        assert!(h.rows().iter().all(|r| r.len() == 6));
        assert!(h.cols().iter().all(|c| c.len() == 3));
        assert_eq!(h.four_cycles(), 0);
    }

    #[test]
    fn deterministic_in_seed() {
        assert_eq!(regular_code(60, 3, 6, 9).unwrap(), regular_code(60, 3, 6, 9).unwrap());
    }

    #[test]
    fn impossible_parameters() {
        assert!(regular_code(10, 3, 6, 0).is_err());
        assert!(regular_code(12, 0, 6, 0).is_err());
    }
}
