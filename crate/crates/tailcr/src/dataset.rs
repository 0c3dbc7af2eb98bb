//! Dataset CSV: header `z,delta,cause`, one observation per row. The cause
//! column is empty or `0` for censored rows and a positive integer otherwise.

use std::fmt::Write as _;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use tailcr_core::{CompetingRisksSample, Observation};

use crate::error::{CliError, CliResult};

pub const HEADER: [&str; 3] = ["z", "delta", "cause"];

pub fn read_dataset(path: &Path) -> CliResult<CompetingRisksSample> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_dataset(file)
}

pub fn parse_dataset<R: Read>(input: R) -> CliResult<CompetingRisksSample> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut observations = Vec::new();
    let mut saw_header = false;
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let fail = |message: String| CliError::Parse { line, message };
        if !saw_header {
            if record.iter().ne(HEADER) {
                return Err(fail(format!("expected header \"{}\"", HEADER.join(","))));
            }
            saw_header = true;
            continue;
        }
        if record.len() < 2 || record.len() > 3 {
            return Err(fail(format!("expected 3 fields, found {}", record.len())));
        }
        let z: f64 = record[0]
            .parse()
            .map_err(|_| fail(format!("z is not a number: {:?}", &record[0])))?;
        if !(z.is_finite() && z > 0.0) {
            return Err(fail(format!("z must be positive and finite, got {z}")));
        }
        let cause = record.get(2).unwrap_or("");
        let obs = match &record[1] {
            "0" => match cause {
                "" | "0" => Observation::censored(z),
                other => return Err(fail(format!("censored row carries cause {other:?}"))),
            },
            "1" => match cause.parse::<u32>() {
                Ok(k) if k >= 1 => Observation::event(z, k),
                _ if cause.is_empty() => {
                    return Err(fail("missing cause on an uncensored row".into()))
                }
                _ => {
                    return Err(fail(format!(
                        "cause must be a positive integer, got {cause:?}"
                    )))
                }
            },
            other => return Err(fail(format!("delta must be 0 or 1, got {other:?}"))),
        };
        observations.push(obs);
    }
    if !saw_header {
        return Err(CliError::Parse {
            line: 1,
            message: "empty dataset".into(),
        });
    }
    if observations.is_empty() {
        return Err(CliError::Parse {
            line: 2,
            message: "dataset has no observations".into(),
        });
    }
    Ok(CompetingRisksSample::from_observations(observations)?)
}

/// Renders observations in dataset format, numbers in shortest round-trip form.
pub fn render_dataset(observations: &[Observation]) -> String {
    let mut out = String::from("z,delta,cause\n");
    for o in observations {
        match o.cause {
            Some(k) => writeln!(out, "{},1,{k}", o.z),
            None => writeln!(out, "{},0,", o.z),
        }
        .unwrap();
    }
    out
}
