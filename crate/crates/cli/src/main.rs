use bpn::channel::GeChannelParams;
use bpn::estimator::EstimatorKind;
use bpn::harness::{
    emit_csv, emit_plotdump, frame_rng, run_sweep, scatter_samples, PlotData, SweepConfig, TraceRow,
};
use bpn::ldpc::{load_alist, regular_code, write_alist, Encoder};
use bpn::pipeline::estimate_states;
use bpn::Error;
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "bpn", version, about = "Burst-aware LDPC decoding simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Master seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores); defaults to $BPN_WORKERS.
    #[arg(long, env = "BPN_WORKERS", default_value_t = 0)]
    workers: usize,
    /// Output file instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo sweep and write the CSV.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        max_frames: Option<usize>,
        #[arg(long)]
        min_packet_errors: Option<usize>,
        /// Also write a BER/PER curve dump here.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Dump channel and state-estimate traces for one frame of a config.
    Estimate {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Which frame of the first sweep point to trace.
        #[arg(long, default_value_t = 0)]
        frame: u64,
        /// Override the configured SNR.
        #[arg(long)]
        snr_db: Option<f64>,
    },
    /// Dump transmitted, received and differentially decoded symbols.
    DemoScatter {
        #[arg(long, default_value_t = 16)]
        order: usize,
        #[arg(long, default_value_t = 20.0)]
        snr_db: f64,
        #[arg(long, default_value_t = 10_000)]
        symbols: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Validate an alist file and print its structure.
    LdpcCheck { alist: PathBuf },
    /// Generate a random 4-cycle-free regular code as alist.
    GenCode {
        #[arg(long, default_value_t = 1944)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        dv: usize,
        #[arg(long, default_value_t = 6)]
        dc: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn write_out(out: &Option<PathBuf>, text: &str) -> bpn::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn config_dir(path: &Path) -> &Path {
    path.parent().unwrap_or(Path::new("."))
}

fn run(cli: Cli) -> bpn::Result<()> {
    match cli.command {
        Command::Sweep {
            config,
            common,
            max_frames,
            min_packet_errors,
            plot,
        } => {
            let cfg = SweepConfig::from_file(&config)?;
            let mut spec = cfg.to_spec(config_dir(&config))?;
            if let Some(v) = max_frames {
                spec.stop.max_frames = v;
            }
            if let Some(v) = min_packet_errors {
                spec.stop.min_packet_errors = v;
            }
            let seed = common.seed.unwrap_or(cfg.seed);
            let records = run_sweep(&spec, seed, common.workers)?;
            for r in &records {
                eprintln!(
                    "{} = {:<8} {:<8} {:<5} ber {:.3e} per {:.3e} frames {} ({:.1} s)",
                    spec.axis.name(),
                    r.axis_value,
                    r.scheme,
                    r.estimator,
                    r.ber,
                    r.per,
                    r.frames,
                    r.wall_time_s
                );
            }
            write_out(&common.out, &emit_csv(&records))?;
            if let Some(p) = plot {
                std::fs::write(p, emit_plotdump(&PlotData::Curves(records)))?;
            }
        }
        Command::Estimate {
            config,
            common,
            frame,
            snr_db,
        } => {
            let cfg = SweepConfig::from_file(&config)?;
            let spec = cfg.to_spec(config_dir(&config))?;
            let mut channel = spec.channel;
            channel.sigma2_awgn = bpn::channel::snr_db_to_sigma2(snr_db.unwrap_or(spec.snr_db));
            channel.validate()?;
            let seed = common.seed.unwrap_or(cfg.seed);
            let tx = spec.link.transmit(&channel, &mut frame_rng(seed, 0, frame))?;
            let bias = spec.schemes.first().map_or(-2.0, |s| s.bias_db);
            let depth = spec.schemes.first().map_or(bpn::estimator::DEFAULT_DEPTH, |s| s.depth);
            let kinds = [EstimatorKind::Viterbi, EstimatorKind::Sova, EstimatorKind::Bcjr];
            let posts = kinds
                .iter()
                .map(|&k| estimate_states(&spec.link, &channel, k, bias, depth, &tx, None))
                .collect::<bpn::Result<Vec<_>>>()?;
            for (k, p) in kinds.iter().zip(&posts) {
                eprintln!(
                    "{:<5} state error rate {:.4}",
                    k.name(),
                    p.state_error_rate(tx.observation_states())
                );
            }
            let refs: Vec<_> = posts.iter().collect();
            let data = PlotData::Trace {
                estimators: kinds.iter().map(|k| k.name().to_string()).collect(),
                rows: TraceRow::from_frame(&tx, &refs),
            };
            write_out(&common.out, &emit_plotdump(&data))?;
        }
        Command::DemoScatter {
            order,
            snr_db,
            symbols,
            common,
        } => {
            let channel = GeChannelParams::reference(snr_db);
            let samples = scatter_samples(order, &channel, symbols, common.seed.unwrap_or(0))?;
            write_out(&common.out, &emit_plotdump(&PlotData::Scatter(samples)))?;
        }
        Command::LdpcCheck { alist } => {
            let h = load_alist(&std::fs::read_to_string(&alist)?)?;
            let degrees = |lists: &[Vec<usize>]| {
                let mut hist = std::collections::BTreeMap::new();
                for l in lists {
                    *hist.entry(l.len()).or_insert(0usize) += 1;
                }
                hist.iter()
                    .map(|(d, c)| format!("{d}x{c}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            println!("n = {}, m = {}, k = {}, rate = {:.4}", h.n(), h.m(), h.k(), h.k() as f64 / h.n() as f64);
            println!("column degrees: {}", degrees(h.cols()));
            println!("row degrees: {}", degrees(h.rows()));
            println!("4-cycles: {}", h.four_cycles());
            match Encoder::new(&h) {
                Ok(_) => println!("full rank: yes"),
                Err(e) => println!("full rank: no ({e})"),
            }
        }
        Command::GenCode { n, dv, dc, common } => {
            let h = regular_code(n, dv, dc, common.seed.unwrap_or(0))?;
            write_out(&common.out, &write_alist(&h))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::InvalidChannel(_) | Error::Alist { .. } => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
