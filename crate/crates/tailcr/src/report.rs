//! Report CSV: one row per `(k_n, estimator)` cell followed by `#` footer
//! lines carrying the run manifest. Numbers use 17 significant digits in
//! scientific notation; absent statistics are empty fields.

use std::fmt::Write as _;

use chrono::{DateTime, SecondsFormat, Utc};
use tailcr_core::{EstimatorId, MonteCarloReport, ReportRow, ScenarioConfig};

use crate::config::scenario_hash;
use crate::error::{CliError, CliResult};

pub const HEADER: &str = "kn,estimator,median_bias,mse,mean,sd,failures";

/// Self-description written after the rows of every report.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub tool: String,
    pub scenario: String,
    pub master_seed: u64,
    pub scenario_hash: String,
    pub timestamp: String,
}

impl Manifest {
    pub fn for_config(config: &ScenarioConfig) -> Self {
        Self {
            tool: format!("tailcr {}", env!("CARGO_PKG_VERSION")),
            scenario: config.name.clone(),
            master_seed: config.master_seed,
            scenario_hash: scenario_hash(config),
            timestamp: timestamp(),
        }
    }
}

/// UTC time in RFC 3339, taken from `SOURCE_DATE_EPOCH` when that is set
/// so that reruns can be byte-identical.
pub fn timestamp() -> String {
    let fixed = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::from_timestamp(secs, 0));
    fixed
        .unwrap_or_else(Utc::now)
        .to_rfc3339_opts(SecondsFormat::Secs, true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportFile {
    pub report: MonteCarloReport,
    pub manifest: Manifest,
}

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

impl ReportFile {
    pub fn render(&self) -> String {
        let mut out = String::with_capacity(64 * (self.report.rows.len() + 8));
        out.push_str(HEADER);
        out.push('\n');
        for r in &self.report.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.kn,
                r.estimator,
                opt(r.median_bias),
                opt(r.mse),
                opt(r.mean),
                opt(r.sd),
                r.failures
            )
            .unwrap();
        }
        let m = &self.manifest;
        for (key, value) in [
            ("tool", m.tool.clone()),
            ("scenario", m.scenario.clone()),
            ("master_seed", m.master_seed.to_string()),
            ("scenario_hash", m.scenario_hash.clone()),
            ("n_rep", self.report.n_rep.to_string()),
            ("true_gamma", format_number(self.report.true_gamma)),
            ("timestamp", m.timestamp.clone()),
        ] {
            writeln!(out, "# {key}: {value}").unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i as u64 + 1, l));
        match lines.next() {
            Some((_, HEADER)) => {}
            _ => {
                return Err(CliError::Parse {
                    line: 1,
                    message: format!("expected header \"{HEADER}\""),
                })
            }
        }
        let mut rows = Vec::new();
        let mut footer = Vec::new();
        for (line, text) in lines {
            let fail = |message: String| CliError::Parse { line, message };
            if let Some(rest) = text.strip_prefix("# ") {
                let (key, value) = rest
                    .split_once(": ")
                    .ok_or_else(|| fail("footer line must read \"# key: value\"".into()))?;
                footer.push((line, key, value));
                continue;
            }
            if !footer.is_empty() {
                return Err(fail("data row after footer".into()));
            }
            let fields: Vec<&str> = text.split(',').collect();
            if fields.len() != 7 {
                return Err(fail(format!("expected 7 fields, found {}", fields.len())));
            }
            let num = |s: &str| -> CliResult<Option<f64>> {
                if s.is_empty() {
                    return Ok(None);
                }
                s.parse()
                    .map(Some)
                    .map_err(|_| fail(format!("not a number: {s:?}")))
            };
            rows.push(ReportRow {
                kn: fields[0]
                    .parse()
                    .map_err(|_| fail(format!("bad kn {:?}", fields[0])))?,
                estimator: EstimatorId::parse(fields[1])
                    .ok_or_else(|| fail(format!("unknown estimator {:?}", fields[1])))?,
                median_bias: num(fields[2])?,
                mse: num(fields[3])?,
                mean: num(fields[4])?,
                sd: num(fields[5])?,
                failures: fields[6]
                    .parse()
                    .map_err(|_| fail(format!("bad failure count {:?}", fields[6])))?,
            });
        }
        let last_line = text.lines().count() as u64;
        let get = |key: &str| -> CliResult<(u64, &str)> {
            footer
                .iter()
                .find(|(_, k, _)| *k == key)
                .map(|&(l, _, v)| (l, v))
                .ok_or_else(|| CliError::Parse {
                    line: last_line,
                    message: format!("footer lacks {key}"),
                })
        };
        let parse_num = |key: &str| -> CliResult<f64> {
            let (line, v) = get(key)?;
            v.parse().map_err(|_| CliError::Parse {
                line,
                message: format!("{key} is not a number"),
            })
        };
        Ok(Self {
            report: MonteCarloReport {
                true_gamma: parse_num("true_gamma")?,
                n_rep: parse_num("n_rep")? as usize,
                rows,
            },
            manifest: Manifest {
                tool: get("tool")?.1.to_string(),
                scenario: get("scenario")?.1.to_string(),
                master_seed: {
                    let (line, v) = get("master_seed")?;
                    v.parse().map_err(|_| CliError::Parse {
                        line,
                        message: "master_seed is not an integer".into(),
                    })?
                },
                scenario_hash: get("scenario_hash")?.1.to_string(),
                timestamp: get("timestamp")?.1.to_string(),
            },
        })
    }
}
