#![allow(dead_code)]

use bpn::channel::{GeChannelParams, State};
use bpn::estimator::TrellisInputs;
use bpn::ldpc::ParityCheckMatrix;
use bpn::Complex64;
use rand::Rng;

/// Random trellis with `n` slots and random transition probabilities.
pub fn random_trellis<R: Rng>(n: usize, rng: &mut R) -> TrellisInputs {
    let p_gb = rng.random_range(0.01..0.5);
    let p_bg = rng.random_range(0.01..0.5);
    let ch = GeChannelParams::new(p_gb, p_bg, 1e-3, 0.1, 0.05).unwrap();
    let ll = (0..n)
        .map(|_| [rng.random_range(-6.0..0.0), rng.random_range(-6.0..0.0)])
        .collect();
    TrellisInputs::new(ll, &ch)
}

/// All state sequences of length `n`, as bit masks (bit k set = Bad).
pub fn sequences(n: usize) -> impl Iterator<Item = u32> {
    0..(1u32 << n)
}

pub fn state_at(mask: u32, k: usize) -> usize {
    ((mask >> k) & 1) as usize
}

/// `log p(z_0..z_len-1, y_0..y_len-1)` for the first `len` slots.
pub fn log_joint(t: &TrellisInputs, mask: u32, len: usize) -> f64 {
    let mut lp = t.log_init[state_at(mask, 0)] + t.state_loglik[0][state_at(mask, 0)];
    for k in 1..len {
        let (a, b) = (state_at(mask, k - 1), state_at(mask, k));
        lp += t.log_trans[a][b] + t.state_loglik[k][b];
    }
    lp
}

pub fn to_states(mask: u32, len: usize) -> Vec<State> {
    (0..len).map(|k| State::from_index(state_at(mask, k))).collect()
}

/// Best prefix path over slots `0..=t`: `(mask, negative log joint)`.
pub fn best_prefix(tr: &TrellisInputs, t: usize) -> (u32, f64) {
    sequences(t + 1)
        .map(|m| (m, -log_joint(tr, m, t + 1)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
}

/// Truncated-traceback decisions: slot k takes its value from the best
/// prefix path ending at `min(k + depth, N - 1)`.
pub fn traceback_oracle(tr: &TrellisInputs, depth: usize) -> Vec<State> {
    let n = tr.len();
    (0..n)
        .map(|k| {
            let (m, _) = best_prefix(tr, (k + depth).min(n - 1));
            State::from_index(state_at(m, k))
        })
        .collect()
}

/// Constrained-flip reliability of slot k decided at `min(k + depth, N - 1)`.
pub fn sova_oracle(tr: &TrellisInputs, depth: usize) -> Vec<f64> {
    let n = tr.len();
    (0..n)
        .map(|k| {
            let t = (k + depth).min(n - 1);
            let (m, best) = best_prefix(tr, t);
            let alt = 1 - state_at(m, k);
            let flipped = sequences(t + 1)
                .filter(|&s| state_at(s, k) == alt)
                .map(|s| -log_joint(tr, s, t + 1))
                .fold(f64::INFINITY, f64::min);
            flipped - best
        })
        .collect()
}

/// Exact log posteriors `log P(z_k | y)` by marginalizing every sequence.
pub fn log_posterior_oracle(tr: &TrellisInputs) -> Vec<[f64; 2]> {
    let n = tr.len();
    let joints: Vec<f64> = sequences(n).map(|m| log_joint(tr, m, n)).collect();
    let total = lse(&joints);
    (0..n)
        .map(|k| {
            let mut out = [0.0; 2];
            for (z, o) in out.iter_mut().enumerate() {
                let terms: Vec<f64> = sequences(n)
                    .filter(|&m| state_at(m, k) == z)
                    .map(|m| joints[m as usize])
                    .collect();
                *o = lse(&terms) - total;
            }
            out
        })
        .collect()
}

pub fn lse(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// All codewords of a small code by exhaustive search.
pub fn codewords(h: &ParityCheckMatrix) -> Vec<Vec<u8>> {
    let n = h.n();
    (0..(1u32 << n))
        .map(|m| (0..n).map(|i| ((m >> i) & 1) as u8).collect::<Vec<u8>>())
        .filter(|c| h.syndrome_ok(c))
        .collect()
}

/// Exact bitwise a-posteriori LLRs `log P(c_i = 0 | L) / P(c_i = 1 | L)`.
pub fn map_llrs(h: &ParityCheckMatrix, channel: &[f64]) -> Vec<f64> {
    let words = codewords(h);
    let score = |c: &[u8]| -> f64 {
        c.iter()
            .zip(channel)
            .map(|(&b, &l)| if b == 0 { l / 2.0 } else { -l / 2.0 })
            .sum()
    };
    let scores: Vec<f64> = words.iter().map(|c| score(c)).collect();
    (0..h.n())
        .map(|i| {
            let pick = |bit: u8| {
                let v: Vec<f64> = words
                    .iter()
                    .zip(&scores)
                    .filter(|(c, _)| c[i] == bit)
                    .map(|(_, &s)| s)
                    .collect();
                lse(&v)
            };
            pick(0) - pick(1)
        })
        .collect()
}

/// Maximum-likelihood codeword for channel LLRs.
pub fn ml_codeword(h: &ParityCheckMatrix, channel: &[f64]) -> Vec<u8> {
    codewords(h)
        .into_iter()
        .max_by(|a, b| {
            let s = |c: &[u8]| -> f64 {
                c.iter()
                    .zip(channel)
                    .map(|(&bit, &l)| if bit == 0 { l } else { -l })
                    .sum()
            };
            s(a).total_cmp(&s(b))
        })
        .unwrap()
}

/// Density of `y = x e^{jw} + n`, `w ~ N(0, σ_z²)`, `n ~ CN(0, σ̃²)`, by
/// composite Simpson integration over `w ∈ ±10σ_z`.
pub fn phase_mixture_density(y: Complex64, x: Complex64, sigma2_z: f64, sigma2_eff: f64) -> f64 {
    let sz = sigma2_z.sqrt();
    let (a, b) = (-10.0 * sz, 10.0 * sz);
    let steps = 4000;
    let h = (b - a) / steps as f64;
    let f = |w: f64| {
        let gauss = (-w * w / (2.0 * sigma2_z)).exp() / (2.0 * std::f64::consts::PI * sigma2_z).sqrt();
        let d = (y - x * Complex64::from_polar(1.0, w)).norm_sqr();
        gauss * (-d / sigma2_eff).exp() / (std::f64::consts::PI * sigma2_eff)
    };
    let mut sum = f(a) + f(b);
    for i in 1..steps {
        let w = a + i as f64 * h;
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(w);
    }
    sum * h / 3.0
}

/// Ratios `exp(blt) / quadrature` over a 21×21 grid of half-width
/// `2σ̃` around every point of the constellation.
pub fn blt_ratios(points: &[Complex64], sigma2_z: f64, sigma2_eff: f64) -> Vec<f64> {
    let half = 2.0 * sigma2_eff.sqrt();
    let mut out = Vec::new();
    for &x in points {
        for i in 0..21 {
            for j in 0..21 {
                let y = x + Complex64::new(
                    -half + half * i as f64 / 10.0,
                    -half + half * j as f64 / 10.0,
                );
                let blt = bpn::likelihood::blt_loglik(y, x, sigma2_z, sigma2_eff).exp();
                out.push(blt / phase_mixture_density(y, x, sigma2_z, sigma2_eff));
            }
        }
    }
    out
}

/// Worst relative deviation from the best single constant.
pub fn minimax_spread(ratios: &[f64]) -> f64 {
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    (hi / lo).sqrt() - 1.0
}
