//! Machine-readable result files: CSV tables, the run manifest, and their
//! parsers.
//!
//! Numeric cells use Rust's shortest round-trip decimal formatting, so
//! re-parsing a CSV reproduces the in-memory values bit for bit. The
//! parsers are total: any byte soup yields an error, never a panic.

use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::montecarlo::{ExperimentConfig, TrialMode};

pub const RESULTS_CSV_HEADER: &str = "mode,lambda,fraction,ci_lo,ci_hi,subgaussian_fit";
pub const VERDICTS_CSV_HEADER: &str = "lambda,round,trials,x_ok,y_ok,z2_ok,all_ok";

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("line {line}: {reason}")]
    Format { line: usize, reason: String },
}

fn format_err(line: usize, reason: impl Into<String>) -> ReportError {
    ReportError::Format {
        line,
        reason: reason.into(),
    }
}

/// One row of the tail-estimate table emitted by `simulate`.
#[derive(Clone, Debug, PartialEq)]
pub struct TailRow {
    pub mode: TrialMode,
    pub lambda: f64,
    pub fraction: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Fitted envelope exp(-c_hat lambda^2); NaN when no fit was possible.
    pub subgaussian_fit: f64,
}

pub fn render_results_csv(rows: &[TailRow]) -> String {
    let mut out = String::from(RESULTS_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.mode.as_str(),
            r.lambda,
            r.fraction,
            r.ci_lo,
            r.ci_hi,
            r.subgaussian_fit
        ));
    }
    out
}

pub fn parse_results_csv(text: &str) -> Result<Vec<TailRow>, ReportError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == RESULTS_CSV_HEADER => {}
        Some((_, other)) => {
            return Err(format_err(1, format!("unexpected header `{other}`")));
        }
        None => return Err(format_err(1, "empty input")),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(format_err(idx + 1, format!("expected 6 fields, got {}", fields.len())));
        }
        let num = |i: usize| -> Result<f64, ReportError> {
            fields[i]
                .parse::<f64>()
                .map_err(|e| format_err(idx + 1, format!("field {}: {e}", i + 1)))
        };
        rows.push(TailRow {
            mode: fields[0]
                .parse::<TrialMode>()
                .map_err(|e| format_err(idx + 1, e))?,
            lambda: num(1)?,
            fraction: num(2)?,
            ci_lo: num(3)?,
            ci_hi: num(4)?,
            subgaussian_fit: num(5)?,
        });
    }
    Ok(rows)
}

/// Aggregated verdict counts for one (lambda, round) cell of a
/// `verify-lemma` run.
#[derive(Clone, Debug, PartialEq)]
pub struct VerdictRow {
    pub lambda: f64,
    pub round: u32,
    pub trials: u64,
    pub x_ok: u64,
    pub y_ok: u64,
    pub z2_ok: u64,
    pub all_ok: u64,
}

pub fn render_verdicts_csv(rows: &[VerdictRow]) -> String {
    let mut out = String::from(VERDICTS_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.lambda, r.round, r.trials, r.x_ok, r.y_ok, r.z2_ok, r.all_ok
        ));
    }
    out
}

pub fn parse_verdicts_csv(text: &str) -> Result<Vec<VerdictRow>, ReportError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == VERDICTS_CSV_HEADER => {}
        Some((_, other)) => {
            return Err(format_err(1, format!("unexpected header `{other}`")));
        }
        None => return Err(format_err(1, "empty input")),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(format_err(idx + 1, format!("expected 7 fields, got {}", fields.len())));
        }
        let int = |i: usize| -> Result<u64, ReportError> {
            fields[i]
                .parse::<u64>()
                .map_err(|e| format_err(idx + 1, format!("field {}: {e}", i + 1)))
        };
        rows.push(VerdictRow {
            lambda: fields[0]
                .parse::<f64>()
                .map_err(|e| format_err(idx + 1, format!("field 1: {e}")))?,
            round: fields[1]
                .parse::<u32>()
                .map_err(|e| format_err(idx + 1, format!("field 2: {e}")))?,
            trials: int(2)?,
            x_ok: int(3)?,
            y_ok: int(4)?,
            z2_ok: int(5)?,
            all_ok: int(6)?,
        });
    }
    Ok(rows)
}

/// Checksummed record of one emitted file.
#[derive(Clone, Debug, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Metadata emitted next to every run's outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub created_unix_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<ExperimentConfig>,
    pub outputs: Vec<OutputFile>,
}

impl RunManifest {
    pub fn new(command: &str, config: Option<ExperimentConfig>) -> RunManifest {
        let created_unix_ms = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_millis() as u64);
        RunManifest {
            tool: "tritail",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            created_unix_ms,
            config,
            outputs: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialization cannot fail")
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Writes `contents` to `dir/name` and returns its checksum record.
pub fn write_output(dir: &Path, name: &str, contents: &[u8]) -> std::io::Result<OutputFile> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(OutputFile {
        path: path.display().to_string(),
        bytes: contents.len() as u64,
        sha256: sha256_hex(contents),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn results_roundtrip_exact() {
        let mut rng = SplitMix64::new(2024);
        let rows: Vec<TailRow> = (0..50)
            .map(|i| TailRow {
                mode: if i % 2 == 0 {
                    TrialMode::Direct
                } else {
                    TrialMode::Iterated
                },
                lambda: rng.next_f64() * 5.0,
                fraction: rng.next_f64(),
                ci_lo: rng.next_f64() * 0.5,
                ci_hi: 0.5 + rng.next_f64() * 0.5,
                subgaussian_fit: if i == 7 { f64::NAN } else { rng.next_f64() },
            })
            .collect();
        let text = render_results_csv(&rows);
        let back = parse_results_csv(&text).unwrap();
        assert_eq!(back.len(), rows.len());
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!(a.mode, b.mode);
            assert_eq!(a.lambda.to_bits(), b.lambda.to_bits());
            assert_eq!(a.fraction.to_bits(), b.fraction.to_bits());
            assert_eq!(a.ci_lo.to_bits(), b.ci_lo.to_bits());
            assert_eq!(a.ci_hi.to_bits(), b.ci_hi.to_bits());
            assert!(
                a.subgaussian_fit.to_bits() == b.subgaussian_fit.to_bits()
                    || (a.subgaussian_fit.is_nan() && b.subgaussian_fit.is_nan())
            );
        }
    }

    #[test]
    fn verdicts_roundtrip_exact() {
        let rows = vec![
            VerdictRow {
                lambda: 1.5,
                round: 0,
                trials: 1000,
                x_ok: 1000,
                y_ok: 999,
                z2_ok: 998,
                all_ok: 998,
            },
            VerdictRow {
                lambda: 3.0,
                round: 2,
                trials: 1000,
                x_ok: 990,
                y_ok: 980,
                z2_ok: 970,
                all_ok: 960,
            },
        ];
        let text = render_verdicts_csv(&rows);
        assert_eq!(parse_verdicts_csv(&text).unwrap(), rows);
    }

    #[test]
    fn parsers_reject_garbage() {
        for text in [
            "",
            "nonsense",
            "mode,lambda,fraction,ci_lo,ci_hi,subgaussian_fit\njunk",
            "mode,lambda,fraction,ci_lo,ci_hi,subgaussian_fit\ndirect,1,2",
            "mode,lambda,fraction,ci_lo,ci_hi,subgaussian_fit\nwarp,1,1,1,1,1",
        ] {
            assert!(parse_results_csv(text).is_err(), "{text:?}");
        }
        assert!(parse_verdicts_csv("x\n").is_err());
    }

    #[test]
    fn sha256_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn write_output_checksums_payload() {
        let dir = std::env::temp_dir().join(format!("tritail-report-test-{}", std::process::id()));
        let rec = write_output(&dir, "results.csv", b"hello\n").unwrap();
        let on_disk = std::fs::read(&rec.path).unwrap();
        assert_eq!(rec.sha256, sha256_hex(&on_disk));
        assert_eq!(rec.bytes, 6);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
