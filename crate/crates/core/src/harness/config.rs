//! TOML sweep configuration.
//!
//! ```toml
//! seed = 1
//!
//! [channel]            # snr_db is required, the rest default to the reference channel
//! snr_db = 15.0
//! sigma2_g = 3e-4
//! sigma2_b = 0.12
//! p_gb = 2e-4
//! p_bg = 2e-2
//!
//! [link]
//! modulation = 16
//! code = "builtin:regular-1944"   # or an alist path, relative to the config file
//! interleaver_rows = 108
//! decoder = "sum-product"         # or "min-sum"
//! decode_iterations = 15
//! packet_bits = 512
//!
//! [sweep]
//! axis = "snr_db"                 # sigma2_b, sigma2_g, p_gb, p_bg, bias_db, outer_bias_db
//! values = [14.0, 15.0, 16.0]
//!
//! [stop]
//! max_frames = 2000
//! min_packet_errors = 100
//! min_frames = 0
//! batch_frames = 32
//!
//! [[scheme]]
//! scheme = "baseline"
//!
//! [[scheme]]
//! scheme = "iba"
//! estimator = "bcjr"              # va, sova, bcjr, genie
//! bias_db = -2.0                  # defaults depend on the modulation
//! outer_bias_db = 5.0
//! outer_iterations = 3
//! depth = 100
//! feedback = "a-posteriori"       # extrinsic, uniform
//! ```

use super::{Axis, StopRule, SweepSpec, PACKET_BITS};
use crate::channel::GeChannelParams;
use crate::estimator::EstimatorKind;
use crate::ldpc::{DecoderKind, LdpcCode};
use crate::pipeline::{Feedback, Link, Scheme, SchemeConfig, DEFAULT_DECODE_ITERATIONS};
use crate::{Error, Result};
use serde::Deserialize;
use std::path::Path;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub seed: u64,
    pub channel: ChannelSection,
    #[serde(default)]
    pub link: LinkSection,
    pub sweep: SweepSection,
    #[serde(default)]
    pub stop: StopSection,
    #[serde(rename = "scheme")]
    pub schemes: Vec<SchemeSection>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub snr_db: f64,
    #[serde(default = "d_sigma2_g")]
    pub sigma2_g: f64,
    #[serde(default = "d_sigma2_b")]
    pub sigma2_b: f64,
    #[serde(default = "d_p_gb")]
    pub p_gb: f64,
    #[serde(default = "d_p_bg")]
    pub p_bg: f64,
}

fn d_sigma2_g() -> f64 {
    3e-4
}
fn d_sigma2_b() -> f64 {
    0.12
}
fn d_p_gb() -> f64 {
    2e-4
}
fn d_p_bg() -> f64 {
    2e-2
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkSection {
    pub modulation: usize,
    pub code: String,
    pub interleaver_rows: usize,
    pub decoder: DecoderKind,
    pub decode_iterations: usize,
    pub packet_bits: usize,
}

impl Default for LinkSection {
    fn default() -> Self {
        Self {
            modulation: 16,
            code: "builtin:regular-1944".into(),
            interleaver_rows: 108,
            decoder: DecoderKind::SumProduct,
            decode_iterations: DEFAULT_DECODE_ITERATIONS,
            packet_bits: PACKET_BITS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: Axis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StopSection {
    pub max_frames: usize,
    pub min_packet_errors: usize,
    pub min_frames: usize,
    pub batch_frames: usize,
}

impl Default for StopSection {
    fn default() -> Self {
        let rule = StopRule::default();
        Self {
            max_frames: rule.max_frames,
            min_packet_errors: rule.min_packet_errors,
            min_frames: rule.min_frames,
            batch_frames: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSection {
    pub scheme: Scheme,
    pub estimator: Option<EstimatorKind>,
    pub bias_db: Option<f64>,
    pub outer_bias_db: Option<f64>,
    pub outer_iterations: Option<usize>,
    pub depth: Option<usize>,
    pub feedback: Option<Feedback>,
}

impl SchemeSection {
    fn resolve(&self, link: &LinkSection) -> SchemeConfig {
        let mut cfg = SchemeConfig::new(
            self.scheme,
            self.estimator.unwrap_or(EstimatorKind::Bcjr),
            link.modulation,
        );
        cfg.decoder = link.decoder;
        cfg.decode_iterations = link.decode_iterations;
        if let Some(v) = self.bias_db {
            cfg.bias_db = v;
        }
        if let Some(v) = self.outer_bias_db {
            cfg.outer_bias_db = v;
        }
        if let Some(v) = self.outer_iterations {
            cfg.outer_iterations = v;
        }
        if let Some(v) = self.depth {
            cfg.depth = v;
        }
        if let Some(v) = self.feedback {
            cfg.feedback = v;
        }
        cfg
    }
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Config(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_toml(&text)
    }

    /// Base channel with the configured SNR.
    pub fn channel(&self) -> Result<GeChannelParams> {
        let c = &self.channel;
        GeChannelParams::new(
            c.p_gb,
            c.p_bg,
            c.sigma2_g,
            c.sigma2_b,
            crate::channel::snr_db_to_sigma2(c.snr_db),
        )
    }

    /// Loads the code and builds a validated spec. Relative code paths are
    /// resolved against `base_dir`.
    pub fn to_spec(&self, base_dir: &Path) -> Result<SweepSpec> {
        let reference = if self.link.code.starts_with("builtin:") {
            self.link.code.clone()
        } else {
            base_dir.join(&self.link.code).to_string_lossy().into_owned()
        };
        let code = Arc::new(LdpcCode::from_reference(&reference)?);
        let link = Arc::new(Link::new(
            self.link.modulation,
            code,
            self.link.interleaver_rows,
        )?);
        let spec = SweepSpec {
            axis: self.sweep.axis,
            values: self.sweep.values.clone(),
            channel: self.channel()?,
            snr_db: self.channel.snr_db,
            link,
            schemes: self.schemes.iter().map(|s| s.resolve(&self.link)).collect(),
            stop: StopRule {
                max_frames: self.stop.max_frames,
                min_packet_errors: self.stop.min_packet_errors,
                min_frames: self.stop.min_frames,
            },
            packet_bits: self.link.packet_bits,
            batch_frames: self.stop.batch_frames,
        };
        spec.validate()?;
        Ok(spec)
    }
}
