//! Report files.
//!
//! The structured report is a single JSON document tagged with
//! [`FORMAT_VERSION`]. Timings are nanoseconds and ratios are fractions
//! (0.15 rather than 15 %). The tabular export is CSV with one row per
//! scenario and variant:
//!
//! ```text
//! config_name,opt_level,scenario,variant,mean_ns,std_ns,tau,sigma_tau
//! ```
//!
//! `tau` and `sigma_tau` belong to the scenario and repeat on both rows.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::configmeta::ConfigMetadata;
use crate::datagen::GeneratorInfo;
use crate::harness::{ScenarioResult, Verification};
use crate::kernels::{ScenarioId, Variant};

pub const FORMAT_VERSION: &str = "vecbench-report/1";

pub const TABLE_HEADER: [&str; 8] = [
    "config_name",
    "opt_level",
    "scenario",
    "variant",
    "mean_ns",
    "std_ns",
    "tau",
    "sigma_tau",
];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed table: {0}")]
    Csv(#[from] csv::Error),
    #[error("unsupported report format '{0}' (expected {FORMAT_VERSION})")]
    UnsupportedVersion(String),
    #[error("invalid report: {0}")]
    Invalid(String),
    #[error("unexpected table header {0:?}")]
    Header(Vec<String>),
}

/// Verification record of the scenario that stopped a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub scenario_id: ScenarioId,
    pub message: String,
    pub verification: Verification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub format_version: String,
    pub created_at: String,
    pub config: ConfigMetadata,
    pub generator: GeneratorInfo,
    pub results: Vec<ScenarioResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailureRecord>,
}

impl Report {
    pub fn new(config: ConfigMetadata, generator: GeneratorInfo) -> Self {
        Report {
            format_version: FORMAT_VERSION.to_string(),
            created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            config,
            generator,
            results: Vec::new(),
            failure: None,
        }
    }

    pub fn is_success(&self) -> bool {
        self.failure.is_none() && !self.results.is_empty()
    }

    /// Checks the structural invariants a well-formed report satisfies.
    pub fn validate(&self) -> Result<(), ReportError> {
        if self.format_version != FORMAT_VERSION {
            return Err(ReportError::UnsupportedVersion(self.format_version.clone()));
        }
        if !self.config.is_consistent() {
            return Err(ReportError::Invalid(format!(
                "config_name '{}' does not match os_family / toolchain_name",
                self.config.config_name
            )));
        }
        if self.failure.is_none() && self.results.is_empty() {
            return Err(ReportError::Invalid(
                "no results and no failure record".into(),
            ));
        }
        for r in &self.results {
            if !r.verification.passed {
                return Err(ReportError::Invalid(format!(
                    "scenario {} is listed with a failed verification",
                    r.scenario_id
                )));
            }
            let repeats = r.scheme.repeats;
            if r.raw_samples.plain.len() != repeats || r.raw_samples.vector.len() != repeats {
                return Err(ReportError::Invalid(format!(
                    "scenario {} has {}/{} samples for {} repeats",
                    r.scenario_id,
                    r.raw_samples.plain.len(),
                    r.raw_samples.vector.len(),
                    repeats
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String, ReportError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parses and validates a report document.
    pub fn from_json(text: &str) -> Result<Report, ReportError> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if let Some(v) = value.get("format_version").and_then(|v| v.as_str()) {
            if v != FORMAT_VERSION {
                return Err(ReportError::UnsupportedVersion(v.to_string()));
            }
        }
        let report: Report = serde_json::from_value(value)?;
        report.validate()?;
        Ok(report)
    }

    pub fn write_json(&self, path: &Path) -> Result<(), ReportError> {
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(self.to_json()?.as_bytes())?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Report, ReportError> {
        let mut text = String::new();
        BufReader::new(File::open(path)?).read_to_string(&mut text)?;
        Report::from_json(&text)
    }

    /// Rows of the tabular export, scenario by scenario, plain first.
    pub fn table_rows(&self) -> Vec<TableRow> {
        self.results
            .iter()
            .flat_map(|r| {
                Variant::BOTH.into_iter().map(move |variant| {
                    let stats = match variant {
                        Variant::Plain => &r.plain_stats,
                        Variant::Vector => &r.vector_stats,
                    };
                    TableRow {
                        config_name: self.config.config_name.clone(),
                        opt_level: self.config.opt_level.to_string(),
                        scenario: r.scenario_id,
                        variant,
                        mean_ns: stats.mean_ns,
                        std_ns: stats.std_dev_ns,
                        tau: r.ratio.tau,
                        sigma_tau: r.ratio.sigma_tau,
                    }
                })
            })
            .collect()
    }

    pub fn write_table<W: Write>(&self, out: W) -> Result<(), ReportError> {
        let mut w = csv::Writer::from_writer(out);
        for row in self.table_rows() {
            w.serialize(row)?;
        }
        // header is emitted with the first row; an empty report still gets one
        if self.results.is_empty() {
            w.write_record(TABLE_HEADER)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_table_file(&self, path: &Path) -> Result<(), ReportError> {
        self.write_table(BufWriter::new(File::create(path)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub config_name: String,
    pub opt_level: String,
    pub scenario: ScenarioId,
    pub variant: Variant,
    pub mean_ns: f64,
    pub std_ns: f64,
    pub tau: f64,
    pub sigma_tau: f64,
}

/// Reads a tabular export, requiring the exact header.
pub fn read_table<R: Read>(input: R) -> Result<Vec<TableRow>, ReportError> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != TABLE_HEADER {
        return Err(ReportError::Header(header));
    }
    let mut rows = Vec::new();
    for row in r.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

/// `f64` that survives JSON even when NaN or infinite (encoded as the
/// strings `"NaN"`, `"inf"`, `"-inf"`).
pub(crate) mod lossless_f64 {
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("NaN")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    struct F;

    impl Visitor<'_> for F {
        type Value = f64;
        fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("a number, \"NaN\", \"inf\" or \"-inf\"")
        }
        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }
        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            match v {
                "NaN" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
            }
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(F)
    }

    pub mod option {
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        #[derive(Serialize, Deserialize)]
        struct Wrap(#[serde(with = "super")] f64);

        pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            v.map(Wrap).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
        }
    }
}
