use std::fmt::Write as _;

use serde_json::Value;

use lietaut::morse::{CriticalKind, FieldSnapshot};

use crate::error::CliError;
use crate::run::Report;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotData {
    Histogram,
    FieldValues,
    CriticalPoints,
}

fn kind_label(k: CriticalKind) -> &'static str {
    match k {
        CriticalKind::Minimum => "minimum",
        CriticalKind::Saddle => "saddle",
        CriticalKind::Maximum => "maximum",
    }
}

fn field(report: &Report) -> Result<&FieldSnapshot, CliError> {
    report
        .field
        .as_ref()
        .ok_or_else(|| CliError::Report("report has no field section".into()))
}

/// Tab-separated plot data with a header row.
pub fn emit(report: &Report, what: PlotData) -> Result<String, CliError> {
    let mut out = String::new();
    match what {
        PlotData::Histogram => {
            let counts = match report.result.get("counts_histogram") {
                Some(Value::Object(m)) => m.clone(),
                _ => {
                    // Kuiper reports: histogram of the kept counts
                    let Some(Value::Array(samples)) = report.result.get("samples") else {
                        return Err(CliError::Report("report has no histogram section".into()));
                    };
                    let mut m = std::collections::BTreeMap::<u64, u64>::new();
                    for s in samples {
                        let c = s
                            .get("count")
                            .and_then(Value::as_u64)
                            .ok_or_else(|| CliError::Report("report has no histogram section".into()))?;
                        *m.entry(c).or_default() += 1;
                    }
                    m.into_iter().map(|(k, v)| (k.to_string(), Value::from(v))).collect()
                }
            };
            let mut rows: Vec<(u64, u64)> = counts
                .iter()
                .map(|(k, v)| Ok((k.parse().map_err(|_| ())?, v.as_u64().ok_or(())?)))
                .collect::<Result<_, ()>>()
                .map_err(|_| CliError::Report("malformed histogram".into()))?;
            rows.sort_unstable();
            out.push_str("critical_points\tsamples\n");
            for (k, v) in rows {
                writeln!(out, "{k}\t{v}").unwrap();
            }
        }
        PlotData::FieldValues => {
            let f = field(report)?;
            out.push_str("vertex\tvalue\ttype\n");
            let mut label = vec!["regular"; f.values.len()];
            for c in &f.critical {
                label[c.vertex] = kind_label(c.kind);
            }
            for (v, (x, l)) in f.values.iter().zip(label).enumerate() {
                writeln!(out, "{v}\t{x:.16e}\t{l}").unwrap();
            }
        }
        PlotData::CriticalPoints => {
            let f = field(report)?;
            out.push_str("vertex\ttype\tindex\tmultiplicity\tvalue\n");
            for c in &f.critical {
                writeln!(out, "{}\t{}\t{}\t{}\t{:.16e}", c.vertex, kind_label(c.kind), c.kind.index(), c.multiplicity, c.value)
                    .unwrap();
            }
        }
    }
    Ok(out)
}
