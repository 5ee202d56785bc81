//! End-to-end link: LDPC encoding, interleaving, QAM mapping, differential
//! encoding, the bursty phase-noise channel, and the three receivers
//! (baseline, burst-aware, iterative burst-aware).

use crate::channel::{
    apply_channel, diff_decode, diff_encode, sample_phase, sample_states, ChannelRealization,
    GeChannelParams, Observations, State,
};
use crate::constellation::Constellation;
use crate::estimator::{estimate, EstimatorKind, StatePosterior, TrellisInputs, DEFAULT_DEPTH};
use crate::ldpc::{BlockInterleaver, BpDecoder, DecodeResult, DecoderKind, LdpcCode};
use crate::likelihood::{
    bit_llrs, effective_variance, marginalize, mix_states, symbol_logliks, LikelihoodParams,
    SymbolPriors,
};
use crate::{Complex64, Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Baseline,
    Ba,
    Iba,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Baseline => "baseline",
            Scheme::Ba => "ba",
            Scheme::Iba => "iba",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "baseline" => Ok(Scheme::Baseline),
            "ba" => Ok(Scheme::Ba),
            "iba" => Ok(Scheme::Iba),
            other => Err(Error::Config(format!("unknown scheme '{other}'"))),
        }
    }
}

/// What the decoder hands back to the estimator between outer iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Feedback {
    /// Full output LLRs.
    #[default]
    APosteriori,
    /// Output LLRs minus the channel LLRs.
    Extrinsic,
    /// Discard the decoder output and keep uniform priors.
    Uniform,
}

/// Bias `δ` and outer-iteration bias `δ'` in dB tuned for each modulation.
pub fn default_biases(order: usize) -> (f64, f64) {
    match order {
        4 => (-3.0, 0.0),
        _ => (-2.0, 5.0),
    }
}

pub const DEFAULT_OUTER_ITERATIONS: usize = 3;
pub const DEFAULT_DECODE_ITERATIONS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub estimator: EstimatorKind,
    pub bias_db: f64,
    pub outer_bias_db: f64,
    pub outer_iterations: usize,
    pub decode_iterations: usize,
    /// Traceback depth or BCJR window.
    pub depth: usize,
    pub decoder: DecoderKind,
    pub feedback: Feedback,
}

impl SchemeConfig {
    /// Defaults for a scheme and modulation order.
    pub fn new(scheme: Scheme, estimator: EstimatorKind, order: usize) -> Self {
        let (bias_db, outer_bias_db) = default_biases(order);
        Self {
            scheme,
            estimator,
            bias_db,
            outer_bias_db,
            outer_iterations: DEFAULT_OUTER_ITERATIONS,
            decode_iterations: DEFAULT_DECODE_ITERATIONS,
            depth: DEFAULT_DEPTH,
            decoder: DecoderKind::SumProduct,
            feedback: Feedback::APosteriori,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.outer_iterations == 0 {
            return Err(Error::Config("outer_iterations must be at least 1".into()));
        }
        if self.depth == 0 {
            return Err(Error::Config("estimator depth must be at least 1".into()));
        }
        if !self.bias_db.is_finite() || !self.outer_bias_db.is_finite() {
            return Err(Error::Config("biases must be finite".into()));
        }
        Ok(())
    }

    /// Short identifier such as `iba-bcjr` or `baseline`.
    pub fn label(&self) -> String {
        match self.scheme {
            Scheme::Baseline => "baseline".into(),
            s => format!("{}-{}", s.name(), self.estimator.name()),
        }
    }
}

/// Static link description shared by every frame.
#[derive(Debug, Clone)]
pub struct Link {
    constellation: Constellation,
    code: Arc<LdpcCode>,
    interleaver: BlockInterleaver,
}

impl Link {
    pub fn new(order: usize, code: Arc<LdpcCode>, interleaver_rows: usize) -> Result<Self> {
        let constellation = Constellation::qam(order)?;
        let bps = constellation.bits_per_symbol();
        if !code.n().is_multiple_of(bps) {
            return Err(Error::LengthNotMultiple {
                len: code.n(),
                multiple: bps,
            });
        }
        let interleaver = BlockInterleaver::new(code.n(), interleaver_rows)?;
        Ok(Self {
            constellation,
            code,
            interleaver,
        })
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    pub fn code(&self) -> &LdpcCode {
        &self.code
    }

    pub fn interleaver(&self) -> &BlockInterleaver {
        &self.interleaver
    }

    /// Data symbols per frame, excluding the pilot.
    pub fn symbols_per_frame(&self) -> usize {
        self.code.n() / self.constellation.bits_per_symbol()
    }

    /// Draws information bits and a channel realization and runs the
    /// transmitter and channel.
    pub fn transmit<R: Rng + ?Sized>(&self, channel: &GeChannelParams, rng: &mut R) -> Result<Frame> {
        let info: Vec<u8> = (0..self.code.k()).map(|_| rng.random::<bool>() as u8).collect();
        let codeword = self.code.encode(&info)?;
        let x = self
            .constellation
            .map_bits(&self.interleaver.interleave(&codeword))?;
        let s = diff_encode(&x, Complex64::new(1.0, 0.0))?;
        let states = sample_states(s.len(), channel, rng);
        let realization = sample_phase(&states, channel, rng);
        let r = apply_channel(&s, &realization, channel, rng)?;
        let obs = diff_decode(&r)?;
        Ok(Frame {
            info,
            x,
            s,
            realization,
            r,
            obs,
        })
    }
}

/// Everything produced for one codeword, the truth included.
#[derive(Debug, Clone)]
pub struct Frame {
    pub info: Vec<u8>,
    /// Modulated data symbols.
    pub x: Vec<Complex64>,
    /// Differentially encoded symbols, pilot first.
    pub s: Vec<Complex64>,
    /// Channel states and phases over the pilot and data slots.
    pub realization: ChannelRealization,
    pub r: Vec<Complex64>,
    pub obs: Observations,
}

impl Frame {
    /// True state behind each observation.
    pub fn observation_states(&self) -> &[State] {
        &self.realization.states[1..]
    }
}

/// Diagnostics recorded after each outer iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterDiagnostics {
    pub state_error_rate: f64,
    pub mean_abs_llr: f64,
    pub syndrome_ok: bool,
    pub decode_iterations: usize,
    pub bit_errors: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameResult {
    pub decoded_info: Vec<u8>,
    /// Positions of wrong information bits, ascending.
    pub error_positions: Vec<usize>,
    pub syndrome_ok: bool,
    pub diagnostics: Vec<OuterDiagnostics>,
    /// Final decoder output, codeword order.
    pub llrs: Vec<f64>,
}

impl FrameResult {
    pub fn bit_errors(&self) -> usize {
        self.error_positions.len()
    }
}

/// Runs the configured receiver on one frame.
pub fn run_scheme(
    link: &Link,
    channel: &GeChannelParams,
    cfg: &SchemeConfig,
    frame: &Frame,
) -> Result<FrameResult> {
    cfg.validate()?;
    match cfg.scheme {
        Scheme::Baseline => run_baseline(link, channel, cfg, frame),
        Scheme::Ba => run_ba(link, channel, cfg, frame),
        Scheme::Iba => run_iba(link, channel, cfg, frame),
    }
}

/// Memoryless receiver: a single Gaussian phase model with the steady-state
/// average innovation variance.
pub fn run_baseline(
    link: &Link,
    channel: &GeChannelParams,
    cfg: &SchemeConfig,
    frame: &Frame,
) -> Result<FrameResult> {
    let params = LikelihoodParams::new(channel, cfg.bias_db)?;
    let s2 = effective_variance(channel);
    let c = link.constellation();
    let bps = c.bits_per_symbol();
    let mut ll = vec![0.0; c.order()];
    let mut llrs = vec![0.0; link.code().n()];
    for (k, (&y, &erased)) in frame.obs.y.iter().zip(&frame.obs.erased).enumerate() {
        let out = &mut llrs[k * bps..(k + 1) * bps];
        if erased {
            out.fill(0.0);
            continue;
        }
        symbol_logliks(y, c, s2, params.sigma2_eff, &mut ll);
        bit_llrs(&ll, None, c, out);
    }
    let decoded = decode(link, cfg, &llrs);
    let diag = diagnostics(link, frame, &decoded, None);
    Ok(finish(link, frame, decoded, vec![diag]))
}

/// Burst-aware receiver: one estimation pass followed by one decoding pass.
pub fn run_ba(
    link: &Link,
    channel: &GeChannelParams,
    cfg: &SchemeConfig,
    frame: &Frame,
) -> Result<FrameResult> {
    let first = BaPass::run(link, channel, cfg, frame, cfg.bias_db, None)?;
    let diag = diagnostics(link, frame, &first.decoded, Some(&first.states));
    Ok(finish(link, frame, first.decoded, vec![diag]))
}

/// Iterative burst-aware receiver. The first outer iteration is the
/// burst-aware pass; later ones rebuild symbol priors from the decoder output,
/// re-estimate the states and decode again from a fresh decoder state.
pub fn run_iba(
    link: &Link,
    channel: &GeChannelParams,
    cfg: &SchemeConfig,
    frame: &Frame,
) -> Result<FrameResult> {
    let mut pass = BaPass::run(link, channel, cfg, frame, cfg.bias_db, None)?;
    let mut diags = vec![diagnostics(link, frame, &pass.decoded, Some(&pass.states))];
    for _ in 1..cfg.outer_iterations {
        if pass.decoded.syndrome_ok {
            break;
        }
        let priors = match cfg.feedback {
            Feedback::APosteriori => Some(slot_priors(link, &pass.decoded.llrs)),
            Feedback::Extrinsic => Some(slot_priors(link, &pass.decoded.extrinsic)),
            Feedback::Uniform => None,
        };
        pass = BaPass::run(link, channel, cfg, frame, cfg.outer_bias_db, priors.as_ref())?;
        diags.push(diagnostics(link, frame, &pass.decoded, Some(&pass.states)));
    }
    Ok(finish(link, frame, pass.decoded, diags))
}

/// Symbol priors per slot from codeword-order bit LLRs.
pub fn slot_priors(link: &Link, codeword_llrs: &[f64]) -> SymbolPriors {
    SymbolPriors::from_bit_llrs(
        &link.interleaver().interleave(codeword_llrs),
        link.constellation(),
    )
}

/// Per-slot state log-likelihoods `log p(y_k | z)` under optional symbol
/// priors; erased slots carry no evidence.
pub fn state_logliks(
    c: &Constellation,
    params: &LikelihoodParams,
    obs: &Observations,
    priors: Option<&SymbolPriors>,
) -> Vec<[f64; 2]> {
    let uniform = vec![1.0 / c.order() as f64; c.order()];
    let mut good = vec![0.0; c.order()];
    let mut bad = vec![0.0; c.order()];
    obs.y
        .iter()
        .zip(&obs.erased)
        .enumerate()
        .map(|(k, (&y, &erased))| {
            if erased {
                return [0.0, 0.0];
            }
            let prior = priors.map_or(uniform.as_slice(), |p| p.slot(k));
            symbol_logliks(y, c, params.sigma2_g, params.sigma2_eff, &mut good);
            symbol_logliks(y, c, params.sigma2_b, params.sigma2_eff, &mut bad);
            [marginalize(&good, prior), marginalize(&bad, prior)]
        })
        .collect()
}

/// Runs an estimator over a frame's observations.
pub fn estimate_states(
    link: &Link,
    channel: &GeChannelParams,
    kind: EstimatorKind,
    bias_db: f64,
    depth: usize,
    frame: &Frame,
    priors: Option<&SymbolPriors>,
) -> Result<StatePosterior> {
    let params = LikelihoodParams::new(channel, bias_db)?;
    let inputs = TrellisInputs::new(
        state_logliks(link.constellation(), &params, &frame.obs, priors),
        channel,
    );
    Ok(estimate(kind, &inputs, depth, Some(frame.observation_states())))
}

struct BaPass {
    states: StatePosterior,
    decoded: DecodeResult,
}

impl BaPass {
    fn run(
        link: &Link,
        channel: &GeChannelParams,
        cfg: &SchemeConfig,
        frame: &Frame,
        bias_db: f64,
        priors: Option<&SymbolPriors>,
    ) -> Result<Self> {
        let params = LikelihoodParams::new(channel, bias_db)?;
        let states = estimate_states(link, channel, cfg.estimator, bias_db, cfg.depth, frame, priors)?;
        let c = link.constellation();
        let bps = c.bits_per_symbol();
        let m = c.order();
        let (mut good, mut bad, mut mixed) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        let mut llrs = vec![0.0; link.code().n()];
        for (k, (&y, &erased)) in frame.obs.y.iter().zip(&frame.obs.erased).enumerate() {
            let out = &mut llrs[k * bps..(k + 1) * bps];
            if erased {
                out.fill(0.0);
                continue;
            }
            symbol_logliks(y, c, params.sigma2_g, params.sigma2_eff, &mut good);
            symbol_logliks(y, c, params.sigma2_b, params.sigma2_eff, &mut bad);
            mix_states(&good, &bad, states.probs[k], &mut mixed);
            bit_llrs(&mixed, priors.map(|p| p.slot(k)), c, out);
        }
        let decoded = decode(link, cfg, &llrs);
        Ok(Self { states, decoded })
    }
}

/// Deinterleaves slot-order LLRs and decodes from scratch.
fn decode(link: &Link, cfg: &SchemeConfig, slot_llrs: &[f64]) -> DecodeResult {
    let channel_llrs = link.interleaver().deinterleave(slot_llrs);
    BpDecoder::new(link.code().h(), cfg.decoder, cfg.decode_iterations).decode(&channel_llrs)
}

fn info_errors(link: &Link, frame: &Frame, decoded: &DecodeResult) -> (Vec<u8>, Vec<usize>) {
    let info = link.code().extract_info(&decoded.hard);
    let errors = info
        .iter()
        .zip(&frame.info)
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(i, _)| i)
        .collect();
    (info, errors)
}

fn diagnostics(
    link: &Link,
    frame: &Frame,
    decoded: &DecodeResult,
    states: Option<&StatePosterior>,
) -> OuterDiagnostics {
    let n = decoded.llrs.len().max(1) as f64;
    OuterDiagnostics {
        state_error_rate: states.map_or(f64::NAN, |s| s.state_error_rate(frame.observation_states())),
        mean_abs_llr: decoded.llrs.iter().map(|l| l.abs()).sum::<f64>() / n,
        syndrome_ok: decoded.syndrome_ok,
        decode_iterations: decoded.iterations,
        bit_errors: info_errors(link, frame, decoded).1.len(),
    }
}

fn finish(
    link: &Link,
    frame: &Frame,
    decoded: DecodeResult,
    diagnostics: Vec<OuterDiagnostics>,
) -> FrameResult {
    let (decoded_info, error_positions) = info_errors(link, frame, &decoded);
    FrameResult {
        decoded_info,
        error_positions,
        syndrome_ok: decoded.syndrome_ok,
        diagnostics,
        llrs: decoded.llrs,
    }
}
