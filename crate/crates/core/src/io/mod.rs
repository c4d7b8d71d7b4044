//! Text file formats: body specifications, gauge fields, analysis reports and field dumps.
//!
//! Every format carries its version tag on line 1.

mod body;
mod dump;
mod report;
mod synth;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::constitutive::ConstitutiveError;

pub use body::{
    body_to_string, load_body, parse_body, save_body, Body, BodyFile, ExpectedComponent, GroundTruth,
    BODY_FORMAT,
};
pub use dump::{christoffel_dump, parse_dump, torsion_dump, FieldDump, CHRISTOFFEL_FORMAT, TORSION_FORMAT};
pub use report::{
    connection_report_to_string, gauge_to_string, load_gauge, parse_gauge, parse_report, report_to_string,
    ConnectionReportFile, ConnectionSection, GaugeFile, NodeTable, ReportFile, SymmetrySection, CONNECTION_FORMAT,
    GAUGE_FORMAT, REPORT_FORMAT,
};
pub use synth::{synthesize_body, ImplantPreset, SynthesisKind, SynthesisSpec};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}", parse_message(*line, message))]
    Parse { line: Option<usize>, message: String },
    #[error("invalid body: {0}")]
    Validation(#[from] ConstitutiveError),
}

fn parse_message(line: Option<usize>, message: &str) -> String {
    match line {
        Some(l) => format!("parse error at line {l}: {message}"),
        None => format!("parse error: {message}"),
    }
}

impl IoError {
    pub(crate) fn parse(line: Option<usize>, message: impl Into<String>) -> Self {
        IoError::Parse {
            line,
            message: message.into(),
        }
    }

    /// Line number of a parse error, when known.
    pub fn line(&self) -> Option<usize> {
        match self {
            IoError::Parse { line, .. } => *line,
            _ => None,
        }
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_file(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// 1-based line of a byte offset.
pub(crate) fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|b| *b == b'\n').count() + 1
}

pub(crate) fn toml_error(text: &str, e: &toml::de::Error) -> IoError {
    IoError::parse(
        e.span().map(|s| line_of(text, s.start)),
        e.message().trim().to_string(),
    )
}

/// Check that line 1 is `format = "<tag>"`.
pub(crate) fn check_version(text: &str, tag: &str) -> Result<(), IoError> {
    let first = text.lines().next().unwrap_or("").trim();
    let expected = format!("format = \"{tag}\"");
    if first == expected {
        Ok(())
    } else {
        Err(IoError::parse(
            Some(1),
            format!("expected version line `{expected}`, found `{first}`"),
        ))
    }
}
