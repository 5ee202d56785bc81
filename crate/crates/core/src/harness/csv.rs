use super::MetricRecord;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "axis,scheme,estimator,bits,bit_errors,packets,packet_errors,ber,per,frames,seed";

/// One header line plus one line per record. Floats use the shortest
/// representation that parses back to the same value.
pub fn emit_csv(records: &[MetricRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.axis_value,
            r.scheme,
            r.estimator,
            r.bits,
            r.bit_errors,
            r.packets,
            r.packet_errors,
            r.ber,
            r.per,
            r.frames,
            r.seed
        ));
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<MetricRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => {
            return Err(Error::Csv {
                line: 1,
                msg: "missing or unexpected header".into(),
            })
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 1;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 11 {
            return Err(Error::Csv {
                line: line_no,
                msg: format!("expected 11 fields, found {}", f.len()),
            });
        }
        let err = |what: &str| Error::Csv {
            line: line_no,
            msg: format!("bad {what}"),
        };
        let int = |s: &str, what: &str| s.parse::<u64>().map_err(|_| err(what));
        let float = |s: &str, what: &str| s.parse::<f64>().map_err(|_| err(what));
        out.push(MetricRecord {
            axis_value: float(f[0], "axis")?,
            scheme: f[1].to_string(),
            estimator: f[2].to_string(),
            bits: int(f[3], "bits")?,
            bit_errors: int(f[4], "bit_errors")?,
            packets: int(f[5], "packets")?,
            packet_errors: int(f[6], "packet_errors")?,
            ber: float(f[7], "ber")?,
            per: float(f[8], "per")?,
            frames: int(f[9], "frames")?,
            seed: int(f[10], "seed")?,
            wall_time_s: 0.0,
        });
    }
    Ok(out)
}
