//! State-conditioned symbol likelihoods, their marginals and bit LLRs.
//!
//! The observation model after differential decoding is
//! `y ≈ x e^{jw} + ñ` with `w ~ N(0, σ_z²)` and `ñ ~ CN(0, σ̃²)`, where
//! `σ̃² = σ² / δ`, where the bias `δ` (in dB) offsets the SNR the model
//! assumes: a negative bias widens the noise. Its density is approximated with a
//! bilinear transformation of the channel output. Everything here works in the
//! natural-log domain.

use crate::channel::{GeChannelParams, State};
use crate::constellation::Constellation;
use crate::{Complex64, Error, Result};

/// Saturation applied to every bit LLR handed to the decoder.
pub const LLR_MAX: f64 = 40.0;

/// Parameters of the approximate observation model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LikelihoodParams {
    /// `σ̃² = δ σ²`.
    pub sigma2_eff: f64,
    pub sigma2_g: f64,
    pub sigma2_b: f64,
}

impl LikelihoodParams {
    pub fn new(channel: &GeChannelParams, bias_db: f64) -> Result<Self> {
        let sigma2_eff = effective_noise_variance(channel.sigma2_awgn, bias_db);
        if !(sigma2_eff > 0.0) || !sigma2_eff.is_finite() {
            return Err(Error::InvalidChannel(format!(
                "effective noise variance {sigma2_eff} must be positive"
            )));
        }
        Ok(Self {
            sigma2_eff,
            sigma2_g: channel.sigma2_g,
            sigma2_b: channel.sigma2_b,
        })
    }

    #[inline]
    pub fn sigma2_state(&self, z: State) -> f64 {
        match z {
            State::Good => self.sigma2_g,
            State::Bad => self.sigma2_b,
        }
    }
}

/// Model noise variance for an SNR bias: `σ² · 10^(-δ/10)`.
pub fn effective_noise_variance(sigma2: f64, bias_db: f64) -> f64 {
    sigma2 / db_to_linear(bias_db)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Bilinear-transform approximation of `log p(y | x, z)`:
///
/// ```text
/// -|y-x|²/σ̃² + 4σ_z² Im{x*y}² / (2σ̃⁴ + σ̃²σ_z²|x+y|²)
///     - ½ log(σ̃² + σ_z²|x+y|²/2) + log(π σ̃)
/// ```
///
/// The trailing constant does not depend on `x` or `z` and cancels in every
/// ratio the receiver forms.
#[inline]
pub fn blt_loglik(y: Complex64, x: Complex64, sigma2_z: f64, sigma2_eff: f64) -> f64 {
    let diff = (y - x).norm_sqr();
    let sum = (x + y).norm_sqr();
    let im = (x.conj() * y).im;
    let quad = 4.0 * sigma2_z / (2.0 * sigma2_eff * sigma2_eff + sigma2_eff * sigma2_z * sum);
    -diff / sigma2_eff + quad * im * im - 0.5 * (sigma2_eff + 0.5 * sigma2_z * sum).ln()
        + (std::f64::consts::PI * sigma2_eff.sqrt()).ln()
}

/// `blt_loglik` against every constellation point.
pub fn symbol_logliks(
    y: Complex64,
    c: &Constellation,
    sigma2_z: f64,
    sigma2_eff: f64,
    out: &mut [f64],
) {
    for (o, &x) in out.iter_mut().zip(c.points()) {
        *o = blt_loglik(y, x, sigma2_z, sigma2_eff);
    }
}

#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Max-shifted log-sum-exp; `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let v: Vec<f64> = values.into_iter().collect();
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// `log Σ_x P(x) p(y|x,z)` from precomputed per-symbol log-likelihoods.
pub fn marginalize(symbol_ll: &[f64], prior: &[f64]) -> f64 {
    log_sum_exp(symbol_ll.iter().zip(prior).map(|(l, p)| l + p.ln()))
}

/// `log p(y | z)`, summing the state-conditioned likelihood over the symbol
/// prior.
pub fn marginal_loglik(
    y: Complex64,
    sigma2_z: f64,
    params: &LikelihoodParams,
    prior: &[f64],
    c: &Constellation,
) -> f64 {
    let mut ll = vec![0.0; c.order()];
    symbol_logliks(y, c, sigma2_z, params.sigma2_eff, &mut ll);
    marginalize(&ll, prior)
}

/// Log of the state mixture `P(G) p(y|x,G) + P(B) p(y|x,B)` for every `x`.
pub fn mix_states(good: &[f64], bad: &[f64], posterior: [f64; 2], out: &mut [f64]) {
    let (lg, lb) = (posterior[0].ln(), posterior[1].ln());
    for ((o, &g), &b) in out.iter_mut().zip(good).zip(bad) {
        *o = log_add_exp(g + lg, b + lb);
    }
}

/// Burst-aware symbol log-likelihoods `log p(y | x)` for one slot.
pub fn ba_symbol_lik(
    y: Complex64,
    posterior: [f64; 2],
    params: &LikelihoodParams,
    c: &Constellation,
) -> Vec<f64> {
    let m = c.order();
    let mut good = vec![0.0; m];
    let mut bad = vec![0.0; m];
    symbol_logliks(y, c, params.sigma2_g, params.sigma2_eff, &mut good);
    symbol_logliks(y, c, params.sigma2_b, params.sigma2_eff, &mut bad);
    let mut out = vec![0.0; m];
    mix_states(&good, &bad, posterior, &mut out);
    out
}

/// Per-bit LLRs (positive favours 0) of one symbol slot from its symbol
/// log-likelihoods and optional symbol prior; saturated at `±LLR_MAX`.
pub fn bit_llrs(symbol_ll: &[f64], prior: Option<&[f64]>, c: &Constellation, out: &mut [f64]) {
    let m = c.order();
    let mut weighted = [0.0f64; 64];
    for j in 0..m {
        weighted[j] = match prior {
            Some(p) => symbol_ll[j] + p[j].ln(),
            None => symbol_ll[j],
        };
    }
    let max = weighted[..m].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for (bit, o) in out.iter_mut().enumerate().take(c.bits_per_symbol()) {
        let (mut num, mut den) = (0.0, 0.0);
        if max > f64::NEG_INFINITY {
            for (j, &w) in weighted[..m].iter().enumerate() {
                let e = (w - max).exp();
                if c.label_bit(j, bit) == 0 {
                    num += e;
                } else {
                    den += e;
                }
            }
        }
        let llr = if num == 0.0 && den == 0.0 {
            0.0
        } else {
            num.ln() - den.ln()
        };
        *o = llr.clamp(-LLR_MAX, LLR_MAX);
    }
}

/// Memoryless effective innovation variance `P_G σ_G² + P_B σ_B²`.
pub fn effective_variance(p: &GeChannelParams) -> f64 {
    let (pg, pb) = p.steady_state();
    pg * p.sigma2_g + pb * p.sigma2_b
}

/// `P(b = 0)` for an LLR.
#[inline]
pub fn bit_prob_zero(llr: f64) -> f64 {
    1.0 / (1.0 + (-llr).exp())
}

/// `ln(1 + e^x)` without overflow.
#[inline]
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Per-slot probability vectors over the constellation points.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolPriors {
    order: usize,
    probs: Vec<f64>,
}

impl SymbolPriors {
    pub fn uniform(slots: usize, order: usize) -> Self {
        Self {
            order,
            probs: vec![1.0 / order as f64; slots * order],
        }
    }

    /// Point mass on the given symbol indices.
    pub fn point_mass(indices: &[usize], order: usize) -> Self {
        let mut probs = vec![0.0; indices.len() * order];
        for (k, &j) in indices.iter().enumerate() {
            probs[k * order + j] = 1.0;
        }
        Self { order, probs }
    }

    /// Symbol priors from per-bit LLRs, assuming independent bits: each point
    /// gets the product of its label's bit probabilities, then each slot is
    /// normalized. `llrs` holds `bits_per_symbol` values per slot in transmit
    /// order.
    pub fn from_bit_llrs(llrs: &[f64], c: &Constellation) -> Self {
        let bps = c.bits_per_symbol();
        let m = c.order();
        let slots = llrs.len() / bps;
        let mut probs = vec![0.0; slots * m];
        let mut logp = vec![0.0; m];
        for (k, slot_llrs) in llrs.chunks_exact(bps).enumerate() {
            for (j, lp) in logp.iter_mut().enumerate() {
                *lp = slot_llrs
                    .iter()
                    .enumerate()
                    .map(|(bit, &l)| {
                        if c.label_bit(j, bit) == 0 {
                            -softplus(-l)
                        } else {
                            -softplus(l)
                        }
                    })
                    .sum();
            }
            let norm = log_sum_exp(logp.iter().copied());
            for (j, lp) in logp.iter().enumerate() {
                probs[k * m + j] = (lp - norm).exp();
            }
        }
        Self { order: m, probs }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn slots(&self) -> usize {
        self.probs.len() / self.order
    }

    pub fn slot(&self, k: usize) -> &[f64] {
        &self.probs[k * self.order..(k + 1) * self.order]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::GeChannelParams;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c16() -> Constellation {
        Constellation::qam(16).unwrap()
    }

    fn random_y(rng: &mut ChaCha8Rng) -> Complex64 {
        Complex64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5))
    }

    #[test]
    fn blt_without_phase_noise_is_gaussian_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = c16();
        for _ in 0..100 {
            let y = random_y(&mut rng);
            let x = c.point(rng.random_range(0..16));
            let s2 = rng.random_range(0.001..0.5);
            let want = -(y - x).norm_sqr() / s2 + std::f64::consts::PI.ln();
            assert!((blt_loglik(y, x, 0.0, s2) - want).abs() < 1e-10);
        }
    }

    #[test]
    fn blt_quadratic_phase_term_vanishes_at_y_equal_x() {
        let c = c16();
        for &x in c.points() {
            let s2 = 0.01;
            let s2z = 0.12;
            let want = -0.5 * (s2 + 0.5 * s2z * (2.0 * x).norm_sqr()).ln()
                + (std::f64::consts::PI * s2.sqrt()).ln();
            assert!((blt_loglik(x, x, s2z, s2) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn marginal_with_point_mass_prior() {
        let c = c16();
        let p = LikelihoodParams {
            sigma2_eff: 0.02,
            sigma2_g: 3e-4,
            sigma2_b: 0.12,
        };
        let y = Complex64::new(0.3, -0.2);
        for j in 0..16 {
            let mut prior = vec![0.0; 16];
            prior[j] = 1.0;
            let got = marginal_loglik(y, p.sigma2_b, &p, &prior, &c);
            assert_eq!(got, blt_loglik(y, c.point(j), p.sigma2_b, p.sigma2_eff));
        }
    }

    #[test]
    fn marginal_uniform_factors_out() {
        let c = c16();
        let p = LikelihoodParams {
            sigma2_eff: 0.02,
            sigma2_g: 3e-4,
            sigma2_b: 0.12,
        };
        let y = Complex64::new(-0.7, 0.4);
        let prior = vec![1.0 / 16.0; 16];
        let mut ll = vec![0.0; 16];
        symbol_logliks(y, &c, p.sigma2_g, p.sigma2_eff, &mut ll);
        let want = (1.0f64 / 16.0).ln() + log_sum_exp(ll.iter().copied());
        assert!((marginal_loglik(y, p.sigma2_g, &p, &prior, &c) - want).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_matches_naive_summation() {
        // naive summation in a shifted frame so the reference does not
        // underflow; inputs span a few hundred nats
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let n = rng.random_range(1..64);
            let shift = rng.random_range(-500.0..500.0);
            let v: Vec<f64> = (0..n).map(|_| shift + rng.random_range(-30.0..30.0)).collect();
            let naive = shift + v.iter().map(|x| (x - shift).exp()).sum::<f64>().ln();
            assert!((log_sum_exp(v.iter().copied()) - naive).abs() < 1e-9);
        }
        assert_eq!(log_sum_exp(Vec::new()), f64::NEG_INFINITY);
        assert_eq!(log_add_exp(f64::NEG_INFINITY, 2.5), 2.5);
    }

    #[test]
    fn degenerate_posterior_is_bit_exact() {
        let c = c16();
        let p = LikelihoodParams {
            sigma2_eff: 0.03,
            sigma2_g: 3e-4,
            sigma2_b: 0.12,
        };
        let y = Complex64::new(0.1, 0.9);
        let mut good = vec![0.0; 16];
        let mut bad = vec![0.0; 16];
        symbol_logliks(y, &c, p.sigma2_g, p.sigma2_eff, &mut good);
        symbol_logliks(y, &c, p.sigma2_b, p.sigma2_eff, &mut bad);
        assert_eq!(ba_symbol_lik(y, [1.0, 0.0], &p, &c), good);
        assert_eq!(ba_symbol_lik(y, [0.0, 1.0], &p, &c), bad);
    }

    #[test]
    fn equal_variances_collapse_mixture() {
        let c = c16();
        let p = LikelihoodParams {
            sigma2_eff: 0.03,
            sigma2_g: 0.01,
            sigma2_b: 0.01,
        };
        let y = Complex64::new(-0.4, 0.2);
        let mut single = vec![0.0; 16];
        symbol_logliks(y, &c, 0.01, p.sigma2_eff, &mut single);
        let mixed = ba_symbol_lik(y, [0.5, 0.5], &p, &c);
        for (a, b) in mixed.iter().zip(&single) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn mixture_lies_between_pure_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = c16();
        for _ in 0..500 {
            let p = LikelihoodParams {
                sigma2_eff: rng.random_range(0.005..0.2),
                sigma2_g: rng.random_range(0.0..0.01),
                sigma2_b: rng.random_range(0.01..1.0),
            };
            let y = random_y(&mut rng);
            let pg = rng.random::<f64>();
            let mix = ba_symbol_lik(y, [pg, 1.0 - pg], &p, &c);
            let g = ba_symbol_lik(y, [1.0, 0.0], &p, &c);
            let b = ba_symbol_lik(y, [0.0, 1.0], &p, &c);
            for j in 0..16 {
                let lo = g[j].min(b[j]) - 1e-9;
                let hi = g[j].max(b[j]) + 1e-9;
                assert!(mix[j] >= lo && mix[j] <= hi);
            }
        }
    }

    #[test]
    fn qpsk_llr_sign_convention() {
        let c = Constellation::qam(4).unwrap();
        let ll: Vec<f64> = {
            let mut v = vec![0.0; 4];
            symbol_logliks(Complex64::new(3.0, -3.0), &c, 0.0, 0.05, &mut v);
            v
        };
        let mut out = [0.0; 2];
        bit_llrs(&ll, None, &c, &mut out);
        // label bit 0 selects I (0 = positive half), bit 1 selects Q
        assert!(out[0] > 0.0);
        assert!(out[1] < 0.0);
    }

    #[test]
    fn llrs_invariant_to_common_offset() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let c = c16();
        for _ in 0..200 {
            let y = random_y(&mut rng);
            let mut ll = vec![0.0; 16];
            symbol_logliks(y, &c, 0.05, 0.1, &mut ll);
            let shifted: Vec<f64> = ll.iter().map(|v| v + 123.456).collect();
            let mut a = [0.0; 4];
            let mut b = [0.0; 4];
            bit_llrs(&ll, None, &c, &mut a);
            bit_llrs(&shifted, None, &c, &mut b);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn qpsk_llrs_match_closed_form_awgn_demapper() {
        // Gray QPSK, bit 0 at +1/√2 on each axis: LLR = 4 a Re(y) / σ̃²
        // (and Im(y) for the second bit), with a = 1/√2.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c = Constellation::qam(4).unwrap();
        let a = std::f64::consts::FRAC_1_SQRT_2;
        for _ in 0..500 {
            let s2 = rng.random_range(0.2..2.0);
            let y = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let mut ll = vec![0.0; 4];
            symbol_logliks(y, &c, 0.0, s2, &mut ll);
            let mut out = [0.0; 2];
            bit_llrs(&ll, Some(&[0.25; 4]), &c, &mut out);
            let want = [4.0 * a * y.re / s2, 4.0 * a * y.im / s2];
            for (g, w) in out.iter().zip(want) {
                assert!((g - w.clamp(-LLR_MAX, LLR_MAX)).abs() < 1e-6, "{g} {w}");
            }
        }
    }

    #[test]
    fn llr_antisymmetric_under_label_swap() {
        // flipping a label bit on every point swaps its 0/1 sets
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = c16();
        for _ in 0..200 {
            let y = random_y(&mut rng);
            let mut ll = vec![0.0; 16];
            symbol_logliks(y, &c, 0.12, 0.05, &mut ll);
            for bit in 0..4 {
                let mask = 1 << (3 - bit);
                let swapped: Vec<f64> = (0..16).map(|j| ll[j ^ mask]).collect();
                let mut a = [0.0; 4];
                let mut b = [0.0; 4];
                bit_llrs(&ll, None, &c, &mut a);
                bit_llrs(&swapped, None, &c, &mut b);
                if a[bit].abs() < LLR_MAX {
                    assert!((a[bit] + b[bit]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn llrs_are_clamped() {
        let c = c16();
        let mut ll = vec![0.0; 16];
        symbol_logliks(c.point(0), &c, 0.0, 1e-6, &mut ll);
        let mut out = [0.0; 4];
        bit_llrs(&ll, None, &c, &mut out);
        assert!(out.iter().all(|v| v.abs() == LLR_MAX));
    }

    #[test]
    fn effective_variance_values() {
        let p = GeChannelParams::reference(10.0);
        assert!((effective_variance(&p) - 1.485e-3).abs() < 1e-6);
        let only_good = GeChannelParams::new(0.0, 0.1, 3e-4, 0.12, 1.0).unwrap();
        assert_eq!(effective_variance(&only_good), 3e-4);
        let same = GeChannelParams::new(0.37, 0.01, 0.05, 0.05, 1.0).unwrap();
        assert!((effective_variance(&same) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn logistic_symmetry() {
        for l in [-50.0, -3.0, -0.1, 0.0, 0.7, 12.0, 39.0] {
            assert!((bit_prob_zero(-l) - (1.0 - bit_prob_zero(l))).abs() < 1e-15);
        }
        assert_eq!(bit_prob_zero(0.0), 0.5);
    }

    #[test]
    fn priors_from_llrs_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c = Constellation::qam(64).unwrap();
        let llrs: Vec<f64> = (0..600).map(|_| rng.random_range(-40.0..40.0)).collect();
        let pr = SymbolPriors::from_bit_llrs(&llrs, &c);
        assert_eq!(pr.slots(), 100);
        for k in 0..pr.slots() {
            let s: f64 = pr.slot(k).iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
            assert!(pr.slot(k).iter().all(|&p| (0.0..=1.0).contains(&p)));
        }
        let zero = SymbolPriors::from_bit_llrs(&[0.0; 6], &c);
        assert!(zero.slot(0).iter().all(|&p| (p - 1.0 / 64.0).abs() < 1e-15));
    }

    #[test]
    fn priors_follow_product_rule() {
        let c = Constellation::qam(4).unwrap();
        let l = [1.2, -0.4];
        let pr = SymbolPriors::from_bit_llrs(&l, &c);
        let p0 = [bit_prob_zero(l[0]), bit_prob_zero(l[1])];
        for j in 0..4 {
            let want: f64 = (0..2)
                .map(|b| if c.label_bit(j, b) == 0 { p0[b] } else { 1.0 - p0[b] })
                .product();
            assert!((pr.slot(0)[j] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn likelihood_params_reject_nonpositive_variance() {
        let p = GeChannelParams::new(0.1, 0.1, 0.0, 0.1, 0.0).unwrap();
        assert!(LikelihoodParams::new(&p, 0.0).is_err());
        let q = GeChannelParams::reference(15.0);
        // a -2 dB SNR bias widens the model noise by 10^0.2
        let lp = LikelihoodParams::new(&q, -2.0).unwrap();
        assert!((lp.sigma2_eff - 10f64.powf(0.2) * 10f64.powf(-1.5)).abs() < 1e-15);
        let sharp = LikelihoodParams::new(&q, 5.0).unwrap();
        assert!(sharp.sigma2_eff < q.sigma2_awgn);
    }
}
