use std::io::Write;

use serde::{Deserialize, Serialize};

/// One gauge sample: free-surface elevation (the depth, on a flat bed) and a
/// velocity. Channel gauges report the axial velocity along the channel;
/// point gauges report the x velocity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeRecord {
    pub t: f64,
    pub gauge_id: String,
    pub h: f64,
    pub u: f64,
}

pub const GAUGE_HEADER: &str = "t,gauge_id,h,u";

/// Write records as CSV in the order given (time-major, gauge-minor).
pub fn write_gauges_csv<W: Write>(records: &[GaugeRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{GAUGE_HEADER}")?;
    for r in records {
        writeln!(out, "{},{},{},{}", r.t, r.gauge_id, r.h, r.u)?;
    }
    Ok(())
}

/// The series `(t, h)` of one gauge.
pub fn series(records: &[GaugeRecord], gauge: &str) -> Vec<(f64, f64)> {
    records.iter().filter(|r| r.gauge_id == gauge).map(|r| (r.t, r.h)).collect()
}

/// Time integral of a series by the trapezoidal rule.
pub fn time_integral(series: &[(f64, f64)]) -> f64 {
    series.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum()
}

/// Linear interpolation of a series at `t`, clamped to its ends.
pub fn sample_at(series: &[(f64, f64)], t: f64) -> f64 {
    match series.iter().position(|&(ti, _)| ti >= t) {
        None => series.last().map_or(f64::NAN, |s| s.1),
        Some(0) => series[0].1,
        Some(i) => {
            let (t0, h0) = series[i - 1];
            let (t1, h1) = series[i];
            if t1 == t0 {
                h1
            } else {
                h0 + (h1 - h0) * (t - t0) / (t1 - t0)
            }
        }
    }
}
