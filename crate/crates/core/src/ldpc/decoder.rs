//! Flooding belief propagation. LLRs are `ln P(b=0)/P(b=1)`.

use super::ParityCheckMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderKind {
    #[default]
    SumProduct,
    MinSum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    /// A-posteriori LLRs of every code bit.
    pub llrs: Vec<f64>,
    /// `llrs - channel`, the decoder's own contribution.
    pub extrinsic: Vec<f64>,
    pub hard: Vec<u8>,
    pub syndrome_ok: bool,
    /// Completed message-passing iterations; 0 when the channel decisions
    /// already form a codeword.
    pub iterations: usize,
}

/// `2 atanh(tanh(a/2) tanh(b/2))` without overflow.
fn boxplus(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    sign * a.abs().min(b.abs()) + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
}

fn minsum(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    sign * a.abs().min(b.abs())
}

/// Decoder bound to one parity-check matrix. Message buffers are reused
/// between calls and reset on every call.
#[derive(Debug, Clone)]
pub struct BpDecoder<'a> {
    h: &'a ParityCheckMatrix,
    kind: DecoderKind,
    max_iterations: usize,
    early_stop: bool,
    /// Edges are grouped by check; check `r` owns `row_start[r]..row_start[r + 1]`.
    row_start: Vec<usize>,
    /// Edge indices incident to each variable.
    var_edges: Vec<Vec<usize>>,
    c2v: Vec<f64>,
    v2c: Vec<f64>,
    fwd: Vec<f64>,
}

impl<'a> BpDecoder<'a> {
    pub fn new(h: &'a ParityCheckMatrix, kind: DecoderKind, max_iterations: usize) -> Self {
        let mut row_start = Vec::with_capacity(h.m() + 1);
        let mut edges = 0;
        let mut var_edges = vec![Vec::new(); h.n()];
        row_start.push(0);
        for row in h.rows() {
            for &v in row {
                var_edges[v].push(edges);
                edges += 1;
            }
            row_start.push(edges);
        }
        let max_deg = h.rows().iter().map(Vec::len).max().unwrap_or(0);
        Self {
            h,
            kind,
            max_iterations,
            early_stop: true,
            row_start,
            c2v: vec![0.0; edges],
            v2c: vec![0.0; edges],
            var_edges,
            fwd: vec![0.0; max_deg],
        }
    }

    /// Keep iterating after the syndrome is satisfied.
    pub fn without_early_stop(mut self) -> Self {
        self.early_stop = false;
        self
    }

    pub fn decode(&mut self, channel: &[f64]) -> DecodeResult {
        assert_eq!(channel.len(), self.h.n(), "channel LLR length");
        self.c2v.iter_mut().for_each(|m| *m = 0.0);
        let mut total = channel.to_vec();
        let mut hard = hard_decisions(&total);
        let mut ok = self.h.syndrome_ok(&hard);
        let mut iterations = 0;

        while iterations < self.max_iterations && !(self.early_stop && ok) {
            for (v, edges) in self.var_edges.iter().enumerate() {
                for &e in edges {
                    self.v2c[e] = total[v] - self.c2v[e];
                }
            }
            self.check_update();
            for (v, edges) in self.var_edges.iter().enumerate() {
                total[v] = channel[v] + edges.iter().map(|&e| self.c2v[e]).sum::<f64>();
            }
            iterations += 1;
            hard = hard_decisions(&total);
            ok = self.h.syndrome_ok(&hard);
        }

        let extrinsic = total.iter().zip(channel).map(|(t, c)| t - c).collect();
        DecodeResult {
            llrs: total,
            extrinsic,
            hard,
            syndrome_ok: ok,
            iterations,
        }
    }

    /// Leave-one-out combination per check using forward and backward
    /// partial results.
    fn check_update(&mut self) {
        let op = match self.kind {
            DecoderKind::SumProduct => boxplus,
            DecoderKind::MinSum => minsum,
        };
        for r in 0..self.row_start.len() - 1 {
            let (s, e) = (self.row_start[r], self.row_start[r + 1]);
            let msgs = &self.v2c[s..e];
            let d = msgs.len();
            if d == 1 {
                // a degree-one check forces its bit to zero
                self.c2v[s] = crate::likelihood::LLR_MAX;
                continue;
            }
            self.fwd[0] = msgs[0];
            for i in 1..d {
                self.fwd[i] = op(self.fwd[i - 1], msgs[i]);
            }
            let mut bwd = msgs[d - 1];
            self.c2v[s + d - 1] = self.fwd[d - 2];
            for i in (1..d - 1).rev() {
                self.c2v[s + i] = op(self.fwd[i - 1], bwd);
                bwd = op(bwd, msgs[i]);
            }
            self.c2v[s] = bwd;
        }
    }
}

fn hard_decisions(llrs: &[f64]) -> Vec<u8> {
    llrs.iter().map(|&l| u8::from(l < 0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> ParityCheckMatrix {
        ParityCheckMatrix::from_rows(6, vec![vec![0, 1, 3], vec![1, 2, 4], vec![0, 2, 5]]).unwrap()
    }

    #[test]
    fn boxplus_matches_tanh_rule() {
        for &(a, b) in &[(1.0, 2.0), (-0.3, 4.0), (7.0, -7.5), (0.0, 3.0), (-2.0, -0.1)] {
            let direct = 2.0 * ((a / 2.0f64).tanh() * (b / 2.0f64).tanh()).atanh();
            assert!((boxplus(a, b) - direct).abs() < 1e-12, "{a} {b}");
        }
        assert!(boxplus(800.0, -900.0).is_finite());
        assert!((boxplus(800.0, -900.0) + 800.0).abs() < 1e-9);
    }

    #[test]
    fn clean_codeword_stops_immediately() {
        let h = toy();
        let mut dec = BpDecoder::new(&h, DecoderKind::SumProduct, 15);
        let res = dec.decode(&[3.0; 6]);
        assert!(res.syndrome_ok);
        assert_eq!(res.iterations, 0);
        assert_eq!(res.hard, vec![0; 6]);
        assert!(res.extrinsic.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn single_flip_corrected_both_kinds() {
        let h = toy();
        for kind in [DecoderKind::SumProduct, DecoderKind::MinSum] {
            let mut dec = BpDecoder::new(&h, kind, 15);
            for flip in 0..6 {
                let mut llr = [2.0; 6];
                llr[flip] = -2.0;
                let res = dec.decode(&llr);
                assert!(res.syndrome_ok, "{kind:?} flip {flip}");
                assert_eq!(res.hard, vec![0; 6]);
                assert!(res.iterations >= 1);
            }
        }
    }

    #[test]
    fn sign_symmetry() {
        // codeword 1,1,0,0,1,1 satisfies all three checks
        let h = toy();
        let cw = [1u8, 1, 0, 0, 1, 1];
        assert!(h.syndrome_ok(&cw));
        let base = [1.5, 0.4, -0.8, 2.2, 0.9, -0.3];
        let mut dec = BpDecoder::new(&h, DecoderKind::SumProduct, 10).without_early_stop();
        let a = dec.decode(&base);
        let flipped: Vec<f64> = base
            .iter()
            .zip(&cw)
            .map(|(l, &b)| if b == 1 { -l } else { *l })
            .collect();
        let b = dec.decode(&flipped);
        for i in 0..6 {
            let s = if cw[i] == 1 { -1.0 } else { 1.0 };
            assert!((a.llrs[i] * s - b.llrs[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn repeated_calls_are_independent() {
        let h = toy();
        let mut dec = BpDecoder::new(&h, DecoderKind::SumProduct, 15);
        let llr = [0.5, -0.2, 1.0, 0.3, -0.7, 0.1];
        let first = dec.decode(&llr);
        dec.decode(&[-4.0; 6]);
        assert_eq!(dec.decode(&llr), first);
    }
}
