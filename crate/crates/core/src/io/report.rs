//! Benchmark metrics and plot series.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// One row of the static-illumination comparison.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricsReport {
    pub latency_seconds: f64,
    pub total_distance_cells: f64,
    pub intersecting_paths: usize,
    pub conflicts: usize,
    pub execution_time_ms: f64,
    pub quota_resets: usize,
    /// FLSs deployed per dispatcher, in dispatcher id order.
    pub dispatcher_counts: Vec<usize>,
    pub algorithm: String,
}

pub const CSV_HEADER: &str = "latency_seconds,total_distance_cells,intersecting_paths,conflicts,execution_time_ms,quota_resets,dispatcher_counts,algorithm";

impl MetricsReport {
    pub fn csv_row(&self) -> String {
        let counts: Vec<String> = self.dispatcher_counts.iter().map(usize::to_string).collect();
        format!(
            "{},{},{},{},{},{},{},{}",
            self.latency_seconds,
            self.total_distance_cells,
            self.intersecting_paths,
            self.conflicts,
            self.execution_time_ms,
            self.quota_resets,
            counts.join(";"),
            self.algorithm
        )
    }
}

/// CSV: header then one row per report. JSON: an array of objects.
pub fn write_metrics<W: Write>(reports: &[MetricsReport], format: Format, mut w: W) -> Result<()> {
    match format {
        Format::Csv => {
            writeln!(w, "{CSV_HEADER}")?;
            for r in reports {
                writeln!(w, "{}", r.csv_row())?;
            }
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, reports)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

pub fn read_metrics_json(text: &str) -> Result<Vec<MetricsReport>> {
    Ok(serde_json::from_str(text)?)
}

/// Two columns, `cloud_index,<name>`, for external plotting.
pub fn write_series<W: Write>(name: &str, values: &[(usize, f64)], mut w: W) -> Result<()> {
    writeln!(w, "cloud_index,{name}")?;
    for (i, v) in values {
        writeln!(w, "{i},{v}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> MetricsReport {
        MetricsReport {
            latency_seconds: 661.0,
            total_distance_cells: 494_938.5,
            intersecting_paths: 0,
            conflicts: 0,
            execution_time_ms: 12.25,
            quota_resets: 0,
            dispatcher_counts: vec![6613, 5281, 0, 0, 0, 0, 0, 0],
            algorithm: "mindist".into(),
        }
    }

    #[test]
    fn csv_row_starts_with_latency() {
        let mut out = Vec::new();
        write_metrics(&[sample()], Format::Csv, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("661,494938.5,0,0,12.25,0,6613;5281;0;0;0;0;0;0,mindist"));
    }

    #[test]
    fn empty_report_has_no_blanks() {
        let r = MetricsReport {
            dispatcher_counts: vec![0; 8],
            algorithm: "quota".into(),
            ..MetricsReport::default()
        };
        assert_eq!(r.csv_row(), "0,0,0,0,0,0,0;0;0;0;0;0;0;0,quota");
    }

    #[test]
    fn json_round_trip() {
        let mut out = Vec::new();
        write_metrics(&[sample(), MetricsReport::default()], Format::Json, &mut out).unwrap();
        let back = read_metrics_json(std::str::from_utf8(&out).unwrap()).unwrap();
        assert_eq!(back, vec![sample(), MetricsReport::default()]);
    }

    #[test]
    fn series_layout() {
        let mut out = Vec::new();
        write_series("distance", &[(1, 0.0), (2, 3.5)], &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "cloud_index,distance\n1,0\n2,3.5\n");
    }
}
