//! JSON report envelope and the error-to-exit-code mapping.

use std::fmt;

use serde::Serialize;
use zonosvm::{Error, LabeledDataset};

#[derive(Debug)]
pub enum Failure {
    /// Bad flags or an unreadable input file.
    Usage(String),
    Input(String),
    Core(Error),
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Input(_) => 1,
            Failure::Core(e) => match e {
                Error::InvalidArgument(_)
                | Error::Parse { .. }
                | Error::Validation(_)
                | Error::SizeLimit(_)
                | Error::UndefinedClassifier(_) => 1,
                Error::NonConvergence { .. } => 2,
                Error::Infeasible(_) | Error::Conditioning(_) => 3,
            },
            Failure::Internal(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Internal(m) => f.write_str(m),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

#[derive(Debug, Serialize)]
pub struct ClassCounts {
    pub positive: usize,
    pub negative: usize,
}

#[derive(Debug, Serialize)]
pub struct InputSummary {
    pub n: usize,
    pub d: usize,
    pub class_counts: ClassCounts,
}

impl InputSummary {
    pub fn of(ds: &LabeledDataset) -> Self {
        let (positive, negative) = ds.class_counts();
        InputSummary {
            n: ds.len(),
            d: ds.dim(),
            class_counts: ClassCounts { positive, negative },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub solver: String,
    pub gap: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Report<'a, T: Serialize> {
    pub command: &'static str,
    pub input_summary: Option<InputSummary>,
    pub result: &'a T,
    pub diagnostics: Diagnostics,
    pub version: &'static str,
}

impl<'a, T: Serialize> Report<'a, T> {
    pub fn new(
        command: &'static str,
        input_summary: Option<InputSummary>,
        result: &'a T,
        diagnostics: Diagnostics,
    ) -> Self {
        Report {
            command,
            input_summary,
            result,
            diagnostics,
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    /// Floats are written in shortest round-trip form, so every value
    /// parses back to the identical `f64`.
    pub fn to_json(&self) -> Result<String, Failure> {
        serde_json::to_string_pretty(self).map_err(|e| Failure::Internal(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        let values = [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 1e-9, 123_456.789_012_345_67];
        let report = Report::new(
            "train",
            None,
            &values,
            Diagnostics {
                iterations: 0,
                solver: "none".into(),
                gap: None,
            },
        );
        let text = report.to_json().unwrap();
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        for (i, v) in values.iter().enumerate() {
            assert_eq!(back["result"][i].as_f64().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Failure::from(Error::Validation("x".into())).exit_code(), 1);
        let nc = Error::NonConvergence {
            iterations: 3,
            gap: 1.0,
            best: vec![],
        };
        assert_eq!(Failure::from(nc).exit_code(), 2);
        assert_eq!(Failure::Internal("x".into()).exit_code(), 3);
    }
}
