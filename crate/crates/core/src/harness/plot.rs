//! Whitespace-separated plot dumps with a `#` header line, one series per
//! block, blocks separated by two blank lines.

use super::MetricRecord;
use crate::channel::{
    apply_channel, diff_decode, diff_encode, sample_phase, sample_states, GeChannelParams, State,
};
use crate::constellation::Constellation;
use crate::estimator::StatePosterior;
use crate::pipeline::Frame;
use crate::{Complex64, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write;

/// Transmitted symbol, channel output and differentially decoded symbol of
/// one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterSample {
    pub x: Complex64,
    pub r: Complex64,
    pub y: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub phase: f64,
    pub innovation: f64,
    pub state: State,
    /// `(hard decision, P(G))` per estimator.
    pub estimates: Vec<(State, f64)>,
}

impl TraceRow {
    /// Rows for the observation slots of a frame.
    pub fn from_frame(frame: &Frame, posteriors: &[&StatePosterior]) -> Vec<Self> {
        (0..frame.obs.len())
            .map(|k| TraceRow {
                k,
                phase: frame.realization.phases[k + 1],
                innovation: frame.realization.innovations[k + 1],
                state: frame.realization.states[k + 1],
                estimates: posteriors.iter().map(|p| (p.hard[k], p.probs[k][0])).collect(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlotData {
    Scatter(Vec<ScatterSample>),
    Trace {
        estimators: Vec<String>,
        rows: Vec<TraceRow>,
    },
    Curves(Vec<MetricRecord>),
}

/// Random uncoded symbols through the differential link.
pub fn scatter_samples(
    order: usize,
    channel: &GeChannelParams,
    n: usize,
    seed: u64,
) -> Result<Vec<ScatterSample>> {
    let c = Constellation::qam(order)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<Complex64> = (0..n).map(|_| c.point(rng.random_range(0..order))).collect();
    let s = diff_encode(&x, Complex64::new(1.0, 0.0))?;
    let states = sample_states(s.len(), channel, &mut rng);
    let realization = sample_phase(&states, channel, &mut rng);
    let r = apply_channel(&s, &realization, channel, &mut rng)?;
    let obs = diff_decode(&r)?;
    Ok((0..n)
        .map(|k| ScatterSample {
            x: x[k],
            r: r[k + 1],
            y: obs.y[k],
        })
        .collect())
}

fn state_digit(z: State) -> u8 {
    z.index() as u8
}

pub fn emit_plotdump(data: &PlotData) -> String {
    let mut out = String::new();
    match data {
        PlotData::Scatter(samples) => {
            out.push_str("# x_re x_im r_re r_im y_re y_im\n");
            for s in samples {
                writeln!(
                    out,
                    "{} {} {} {} {} {}",
                    s.x.re, s.x.im, s.r.re, s.r.im, s.y.re, s.y.im
                )
                .unwrap();
            }
        }
        PlotData::Trace { estimators, rows } => {
            out.push_str("# k phase innovation state");
            for name in estimators {
                write!(out, " {name}_state {name}_pg").unwrap();
            }
            out.push('\n');
            for r in rows {
                write!(out, "{} {} {} {}", r.k, r.phase, r.innovation, state_digit(r.state)).unwrap();
                for (z, pg) in &r.estimates {
                    write!(out, " {} {}", state_digit(*z), pg).unwrap();
                }
                out.push('\n');
            }
        }
        PlotData::Curves(records) => {
            let mut series: Vec<(String, String)> = Vec::new();
            for r in records {
                let key = (r.scheme.clone(), r.estimator.clone());
                if !series.contains(&key) {
                    series.push(key);
                }
            }
            for (i, (scheme, estimator)) in series.iter().enumerate() {
                if i > 0 {
                    out.push_str("\n\n");
                }
                writeln!(out, "# {scheme} {estimator}: axis ber per bit_errors packet_errors").unwrap();
                let mut pts: Vec<&MetricRecord> = records
                    .iter()
                    .filter(|r| &r.scheme == scheme && &r.estimator == estimator)
                    .collect();
                pts.sort_by(|a, b| a.axis_value.total_cmp(&b.axis_value));
                for r in pts {
                    writeln!(
                        out,
                        "{} {} {} {} {}",
                        r.axis_value, r.ber, r.per, r.bit_errors, r.packet_errors
                    )
                    .unwrap();
                }
            }
        }
    }
    out
}
