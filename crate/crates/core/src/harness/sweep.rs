use super::{MetricRecord, PacketCounter, SweepSpec};
use crate::channel::GeChannelParams;
use crate::pipeline::{run_scheme, Link, SchemeConfig};
use crate::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::Instant;

/// Generator for frame `frame` of sweep point `point`. Every scheme at a
/// point sees the same frames, and no frame depends on the schedule.
pub fn frame_rng(master_seed: u64, point: usize, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((point as u64) << 40) | frame);
    rng
}

/// Per-scheme outcomes of one transmitted frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedFrame {
    pub frame: u64,
    /// Information-bit error positions per scheme, in scheme order.
    pub errors: Vec<Vec<usize>>,
    /// Per scheme, whether the final decoder output satisfied all checks.
    pub syndrome_ok: Vec<bool>,
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

fn simulate(
    link: &Link,
    channel: &GeChannelParams,
    schemes: &[&SchemeConfig],
    master_seed: u64,
    point: usize,
    frame: u64,
) -> Result<PairedFrame> {
    let mut rng = frame_rng(master_seed, point, frame);
    let tx = link.transmit(channel, &mut rng)?;
    let mut errors = Vec::with_capacity(schemes.len());
    let mut syndrome_ok = Vec::with_capacity(schemes.len());
    for cfg in schemes {
        let res = run_scheme(link, channel, cfg, &tx)?;
        syndrome_ok.push(res.syndrome_ok);
        errors.push(res.error_positions);
    }
    Ok(PairedFrame {
        frame,
        errors,
        syndrome_ok,
    })
}

/// Runs `frames` paired frames through every scheme and returns the results
/// in frame order.
pub fn run_paired(
    link: &Link,
    channel: &GeChannelParams,
    schemes: &[SchemeConfig],
    master_seed: u64,
    point: usize,
    frames: u64,
    workers: usize,
) -> Result<Vec<PairedFrame>> {
    let refs: Vec<&SchemeConfig> = schemes.iter().collect();
    pool(workers)?.install(|| {
        (0..frames)
            .into_par_iter()
            .map(|f| simulate(link, channel, &refs, master_seed, point, f))
            .collect()
    })
}

/// Runs the whole sweep. Frames are simulated in batches, in parallel, and
/// consumed strictly in frame order so that the result does not depend on
/// `workers` (0 selects the available parallelism).
pub fn run_sweep(spec: &SweepSpec, master_seed: u64, workers: usize) -> Result<Vec<MetricRecord>> {
    spec.validate()?;
    let pool = pool(workers)?;
    let k = spec.link.code().k();
    let mut records = Vec::new();
    for (pi, &value) in spec.values.iter().enumerate() {
        let started = Instant::now();
        let (channel, schemes) = spec.point(pi);
        let mut counters = vec![PacketCounter::new(spec.packet_bits); schemes.len()];
        let mut frames = vec![0u64; schemes.len()];
        let mut active = vec![true; schemes.len()];
        let mut next = 0u64;
        while active.iter().any(|&a| a) {
            let running: Vec<usize> = (0..schemes.len()).filter(|&s| active[s]).collect();
            let cfgs: Vec<&SchemeConfig> = running.iter().map(|&s| &schemes[s]).collect();
            let batch: Vec<PairedFrame> = pool.install(|| {
                (next..next + spec.batch_frames as u64)
                    .into_par_iter()
                    .map(|f| simulate(&spec.link, &channel, &cfgs, master_seed, pi, f))
                    .collect::<Result<_>>()
            })?;
            next += spec.batch_frames as u64;
            for pf in &batch {
                for (slot, &s) in running.iter().enumerate() {
                    if !active[s] {
                        continue;
                    }
                    counters[s].push(k, &pf.errors[slot]);
                    frames[s] += 1;
                    if spec.stop.done(frames[s] as usize, counters[s].packet_errors as usize) {
                        active[s] = false;
                    }
                }
            }
        }
        let elapsed = started.elapsed().as_secs_f64();
        for (s, cfg) in schemes.iter().enumerate() {
            let c = &counters[s];
            let mut rec = MetricRecord::new(
                value,
                cfg,
                c.bits,
                c.bit_errors,
                c.packets,
                c.packet_errors,
                frames[s],
                master_seed,
            );
            rec.wall_time_s = elapsed;
            records.push(rec);
        }
    }
    Ok(records)
}
