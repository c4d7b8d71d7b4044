use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{check_version, read_file, toml_error, IoError};
use crate::connection::HomogeneityVerdict;
use crate::grid::{Grid, GridField, NodeId};
use crate::iso_solver::SymmetryGroupEstimate;
use crate::pipeline::{Analysis, AnalysisConfig, ConnectionOutcome};
use crate::tensor::{from_row_major, to_row_major};
use crate::uniformity::{Failure, GaugeField, NodeStatus, ResidualStats, SpotCheck, Verdict};

pub const REPORT_FORMAT: &str = "mgroupoid-report/1";
pub const GAUGE_FORMAT: &str = "mgroupoid-gauge/1";
pub const CONNECTION_FORMAT: &str = "mgroupoid-connection/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetrySection {
    pub point: NodeId,
    pub continuous_dimension: usize,
    pub closed: bool,
    pub non_unimodular: Vec<usize>,
    pub normal_spectrum: Vec<f64>,
    /// Row-major matrices.
    pub discrete_elements: Vec<[f64; 9]>,
    pub generators: Vec<[f64; 9]>,
}

impl From<&SymmetryGroupEstimate> for SymmetrySection {
    fn from(s: &SymmetryGroupEstimate) -> Self {
        SymmetrySection {
            point: s.point,
            continuous_dimension: s.continuous_dimension,
            closed: s.closed,
            non_unimodular: s.non_unimodular.clone(),
            normal_spectrum: s.normal_spectrum.clone(),
            discrete_elements: s.discrete_elements.iter().map(to_row_major).collect(),
            generators: s.generators.iter().map(to_row_major).collect(),
        }
    }
}

impl SymmetrySection {
    pub fn to_estimate(&self) -> SymmetryGroupEstimate {
        SymmetryGroupEstimate {
            point: self.point,
            discrete_elements: self.discrete_elements.iter().map(from_row_major).collect(),
            continuous_dimension: self.continuous_dimension,
            generators: self.generators.iter().map(from_row_major).collect(),
            normal_spectrum: self.normal_spectrum.clone(),
            non_unimodular: self.non_unimodular.clone(),
            closed: self.closed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionSection {
    pub verdict: HomogeneityVerdict,
    pub convention: String,
    pub tol_torsion: f64,
    pub max_abs_torsion: f64,
    /// Per-component `max |T^I_JK|`, index `9(I−1) + 3(J−1) + (K−1)`.
    pub torsion_component_max: Vec<f64>,
    pub right_invariant: bool,
}

impl From<&ConnectionOutcome> for ConnectionSection {
    fn from(c: &ConnectionOutcome) -> Self {
        ConnectionSection {
            verdict: c.verdict,
            convention: c.christoffel.convention_sign.as_str().to_string(),
            tol_torsion: c.tol_torsion,
            max_abs_torsion: c.torsion.max_abs,
            torsion_component_max: c.torsion.component_max.to_vec(),
            right_invariant: c.right_invariant,
        }
    }
}

/// Output of the `connection` command: the verdict for an externally supplied gauge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionReportFile {
    pub format: String,
    pub input: String,
    pub gauge: String,
    pub continuity_defect: f64,
    pub connection: ConnectionSection,
    pub symmetry: SymmetrySection,
}

impl ConnectionReportFile {
    pub fn new(input: &str, gauge: &str, continuity_defect: f64, outcome: &ConnectionOutcome, symmetry: &SymmetryGroupEstimate) -> Self {
        ConnectionReportFile {
            format: CONNECTION_FORMAT.to_string(),
            input: input.to_string(),
            gauge: gauge.to_string(),
            continuity_defect,
            connection: ConnectionSection::from(outcome),
            symmetry: SymmetrySection::from(symmetry),
        }
    }
}

pub fn connection_report_to_string(report: &ConnectionReportFile) -> String {
    toml::to_string(report).expect("connection reports always serialize")
}

/// Per-node table; `residual` is NaN where the solver diverged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeTable {
    pub status: Vec<NodeStatus>,
    pub residual: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub format: String,
    pub input: String,
    pub verdict: Verdict,
    pub archetype_node: NodeId,
    pub accepted_nodes: usize,
    pub total_nodes: usize,
    pub config: AnalysisConfig,
    pub residual_stats: ResidualStats,
    pub symmetry: SymmetrySection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connection: Option<ConnectionSection>,
    #[serde(default)]
    pub failures: Vec<Failure>,
    #[serde(default)]
    pub spot_checks: Vec<SpotCheck>,
    pub nodes: NodeTable,
    pub gauge: GaugeFile,
}

/// A gauge field with the grid it lives on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeFile {
    pub format: String,
    pub archetype_node: NodeId,
    pub continuity_defect: f64,
    pub grid: Grid,
    /// One row-major matrix per node.
    pub values: Vec<[f64; 9]>,
}

impl GaugeFile {
    pub fn from_gauge(gauge: &GaugeField, archetype_node: NodeId) -> Self {
        GaugeFile {
            format: GAUGE_FORMAT.to_string(),
            archetype_node,
            continuity_defect: gauge.continuity_defect(),
            grid: gauge.field().grid().clone(),
            values: gauge.field().values().iter().map(to_row_major).collect(),
        }
    }

    pub fn to_gauge(&self) -> Result<GaugeField, IoError> {
        let field = GridField::new(self.grid.clone(), self.values.iter().map(from_row_major).collect())
            .map_err(|e| IoError::parse(None, format!("gauge values: {e}")))?;
        Ok(GaugeField::new(field))
    }
}

impl ReportFile {
    /// Build the report for an analysis; `config` should be the fully resolved configuration.
    pub fn new(input: &str, config: &AnalysisConfig, analysis: &Analysis) -> Self {
        let r = &analysis.report;
        let mut config = config.clone();
        config.uniformity.archetype = Some(r.archetype_node);
        if let Some(c) = &analysis.connection {
            config.tol_torsion = Some(c.tol_torsion);
        }
        ReportFile {
            format: REPORT_FORMAT.to_string(),
            input: input.to_string(),
            verdict: r.verdict,
            archetype_node: r.archetype_node,
            accepted_nodes: r.accepted_nodes(),
            total_nodes: r.node_status.len(),
            config,
            residual_stats: r.residual_stats,
            symmetry: SymmetrySection::from(&r.symmetry),
            connection: analysis.connection.as_ref().map(ConnectionSection::from),
            failures: r.failures.clone(),
            spot_checks: r.spot_checks.clone(),
            nodes: NodeTable {
                status: r.node_status.clone(),
                residual: r.node_residuals.iter().map(|v| v.unwrap_or(f64::NAN)).collect(),
            },
            gauge: GaugeFile::from_gauge(&r.gauge, r.archetype_node),
        }
    }
}

pub fn report_to_string(report: &ReportFile) -> String {
    toml::to_string(report).expect("reports always serialize")
}

pub fn parse_report(text: &str) -> Result<ReportFile, IoError> {
    check_version(text, REPORT_FORMAT)?;
    toml::from_str(text).map_err(|e| toml_error(text, &e))
}

pub fn gauge_to_string(gauge: &GaugeFile) -> String {
    toml::to_string(gauge).expect("gauge files always serialize")
}

pub fn parse_gauge(text: &str) -> Result<GaugeFile, IoError> {
    check_version(text, GAUGE_FORMAT)?;
    let g: GaugeFile = toml::from_str(text).map_err(|e| toml_error(text, &e))?;
    g.grid
        .validate()
        .map_err(|e| IoError::parse(None, format!("gauge grid: {e}")))?;
    Ok(g)
}

pub fn load_gauge(path: &Path) -> Result<GaugeFile, IoError> {
    parse_gauge(&read_file(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::{MaterialModel, ModelDescriptor};
    use crate::pipeline::analyze;

    fn fgm() -> MaterialModel {
        MaterialModel::new(
            Grid::cube(3, 0.5).unwrap(),
            ModelDescriptor::FgmExponential {
                mu0: 1.0,
                rate: 0.5,
                axis: 1,
            },
        )
        .unwrap()
    }

    #[test]
    fn report_round_trip() {
        let m = fgm();
        let cfg = AnalysisConfig::default();
        let a = analyze(&m, &cfg).unwrap();
        let report = ReportFile::new("body.toml", &cfg, &a);
        let text = report_to_string(&report);
        assert!(text.starts_with("format = \"mgroupoid-report/1\"\n"));
        let back = parse_report(&text).unwrap();
        assert_eq!(report_to_string(&back), text);
        assert_eq!(back.verdict, Verdict::NonUniform);
        assert_eq!(back.config.uniformity.archetype, Some(13));
        assert_eq!(back.symmetry.to_estimate(), a.report.symmetry);
    }

    #[test]
    fn gauge_round_trip() {
        let g = GaugeField::new(GridField::from_fn(Grid::cube(3, 0.5).unwrap(), |x| {
            crate::tensor::Mat3::identity() * (1.0 + x[0] / 3.0)
        }));
        let file = GaugeFile::from_gauge(&g, 13);
        let text = gauge_to_string(&file);
        assert!(text.starts_with("format = \"mgroupoid-gauge/1\"\n"));
        let back = parse_gauge(&text).unwrap();
        assert_eq!(back.to_gauge().unwrap(), g);
        assert!(parse_gauge(&text.replace("gauge/1", "gauge/2")).is_err());
    }
}
