//! Monte Carlo campaigns: sweep specification, reproducible per-frame seeding,
//! BER/PER accounting, CSV and plot-dump output.

mod config;
mod csv;
mod plot;
mod sweep;

pub use config::{ChannelSection, LinkSection, SchemeSection, StopSection, SweepConfig, SweepSection};
pub use csv::{emit_csv, parse_csv, CSV_HEADER};
pub use plot::{emit_plotdump, scatter_samples, PlotData, ScatterSample, TraceRow};
pub use sweep::{frame_rng, run_paired, run_sweep, PairedFrame};

use crate::channel::GeChannelParams;
use crate::pipeline::{Link, SchemeConfig};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Information bits per packet.
pub const PACKET_BITS: usize = 512;

/// Quantity varied across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    SnrDb,
    #[serde(rename = "sigma2_b")]
    Sigma2B,
    #[serde(rename = "sigma2_g")]
    Sigma2G,
    PGb,
    PBg,
    BiasDb,
    OuterBiasDb,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::SnrDb => "snr_db",
            Axis::Sigma2B => "sigma2_b",
            Axis::Sigma2G => "sigma2_g",
            Axis::PGb => "p_gb",
            Axis::PBg => "p_bg",
            Axis::BiasDb => "bias_db",
            Axis::OuterBiasDb => "outer_bias_db",
        }
    }
}

/// A point stops once it has run `max_frames`, or once it has at least
/// `min_frames` and `min_packet_errors` errored packets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub max_frames: usize,
    pub min_packet_errors: usize,
    pub min_frames: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            max_frames: 2000,
            min_packet_errors: 100,
            min_frames: 0,
        }
    }
}

impl StopRule {
    pub fn done(&self, frames: usize, packet_errors: usize) -> bool {
        frames >= self.max_frames
            || (frames >= self.min_frames
                && self.min_packet_errors > 0
                && packet_errors >= self.min_packet_errors)
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
    /// Channel at every point before the axis value is applied; its AWGN
    /// variance follows `snr_db`.
    pub channel: GeChannelParams,
    pub snr_db: f64,
    pub link: Arc<Link>,
    pub schemes: Vec<SchemeConfig>,
    pub stop: StopRule,
    pub packet_bits: usize,
    /// Frames simulated between stop-rule checks.
    pub batch_frames: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep values must not be empty".into()));
        }
        if self.values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("sweep values must be strictly ascending".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Config("at least one scheme is required".into()));
        }
        if self.packet_bits == 0 || self.batch_frames == 0 || self.stop.max_frames == 0 {
            return Err(Error::Config(
                "packet_bits, batch_frames and max_frames must be positive".into(),
            ));
        }
        for i in 0..self.values.len() {
            let (channel, schemes) = self.point(i);
            channel.validate()?;
            for s in &schemes {
                s.validate()?;
                crate::likelihood::LikelihoodParams::new(&channel, s.bias_db)?;
            }
        }
        Ok(())
    }

    /// Channel and scheme settings at point `i`.
    pub fn point(&self, i: usize) -> (GeChannelParams, Vec<SchemeConfig>) {
        let v = self.values[i];
        let mut ch = self.channel;
        ch.sigma2_awgn = crate::channel::snr_db_to_sigma2(self.snr_db);
        let mut schemes = self.schemes.clone();
        match self.axis {
            Axis::SnrDb => ch.sigma2_awgn = crate::channel::snr_db_to_sigma2(v),
            Axis::Sigma2B => ch.sigma2_b = v,
            Axis::Sigma2G => ch.sigma2_g = v,
            Axis::PGb => ch.p_gb = v,
            Axis::PBg => ch.p_bg = v,
            Axis::BiasDb => schemes.iter_mut().for_each(|s| s.bias_db = v),
            Axis::OuterBiasDb => schemes.iter_mut().for_each(|s| s.outer_bias_db = v),
        }
        (ch, schemes)
    }
}

/// Aggregated counters for one (axis value, scheme) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRecord {
    pub axis_value: f64,
    pub scheme: String,
    pub estimator: String,
    pub bits: u64,
    pub bit_errors: u64,
    pub packets: u64,
    pub packet_errors: u64,
    pub ber: f64,
    pub per: f64,
    pub frames: u64,
    pub seed: u64,
    /// Not part of the CSV.
    pub wall_time_s: f64,
}

impl MetricRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        axis_value: f64,
        scheme: &SchemeConfig,
        bits: u64,
        bit_errors: u64,
        packets: u64,
        packet_errors: u64,
        frames: u64,
        seed: u64,
    ) -> Self {
        let estimator = match scheme.scheme {
            crate::pipeline::Scheme::Baseline => "none".to_string(),
            _ => scheme.estimator.name().to_string(),
        };
        Self {
            axis_value,
            scheme: scheme.scheme.name().to_string(),
            estimator,
            bits,
            bit_errors,
            packets,
            packet_errors,
            ber: ratio(bit_errors, bits),
            per: ratio(packet_errors, packets),
            frames,
            seed,
            wall_time_s: 0.0,
        }
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Streaming packetizer over the concatenated information stream. Packets
/// are consecutive windows of `packet_bits` and may span frames; a trailing
/// partial packet is not counted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PacketCounter {
    packet_bits: usize,
    /// Bits already placed in the current partial packet.
    fill: usize,
    current_errored: bool,
    pub bits: u64,
    pub bit_errors: u64,
    pub packets: u64,
    pub packet_errors: u64,
}

impl PacketCounter {
    pub fn new(packet_bits: usize) -> Self {
        assert!(packet_bits > 0, "packet size must be positive");
        Self {
            packet_bits,
            fill: 0,
            current_errored: false,
            bits: 0,
            bit_errors: 0,
            packets: 0,
            packet_errors: 0,
        }
    }

    /// Appends a block of `len` bits with errors at the ascending
    /// `error_positions`; returns the flags of the packets it completed.
    pub fn push(&mut self, len: usize, error_positions: &[usize]) -> Vec<bool> {
        let mut completed = Vec::new();
        let mut errors = error_positions.iter().peekable();
        let mut pos = 0;
        while pos < len {
            let take = (self.packet_bits - self.fill).min(len - pos);
            let end = pos + take;
            while errors.next_if(|&&e| e < end).is_some() {
                self.current_errored = true;
            }
            self.fill += take;
            pos = end;
            if self.fill == self.packet_bits {
                completed.push(self.current_errored);
                self.packets += 1;
                self.packet_errors += u64::from(self.current_errored);
                self.fill = 0;
                self.current_errored = false;
            }
        }
        self.bits += len as u64;
        self.bit_errors += error_positions.len() as u64;
        completed
    }
}

/// Bit and packet error counts between a decoded and a true information
/// stream.
pub fn packetize_and_count(decoded: &[u8], truth: &[u8], packet_bits: usize) -> Result<(u64, u64)> {
    if decoded.len() != truth.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            actual: decoded.len(),
        });
    }
    let errors: Vec<usize> = decoded
        .iter()
        .zip(truth)
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(i, _)| i)
        .collect();
    let mut counter = PacketCounter::new(packet_bits);
    counter.push(decoded.len(), &errors);
    Ok((counter.bit_errors, counter.packet_errors))
}
