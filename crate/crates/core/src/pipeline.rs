//! Uniformity → connection → torsion, as run by the `analyze` command.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::connection::{
    default_torsion_tol, homogeneity_verdict, material_connection, right_invariance_check, torsion,
    ChristoffelField, ConnectionError, HomogeneityVerdict, TorsionField,
};
use crate::constitutive::MaterialModel;
use crate::iso_solver::SymmetryGroupEstimate;
use crate::uniformity::{assemble_material_groupoid, GaugeField, UniformityError, UniformityOptions, UniformityReport, Verdict};

/// Right-invariance comparisons use this absolute tolerance on Γ.
pub const RIGHT_INVARIANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub uniformity: UniformityOptions,
    /// Torsion tolerance; `10·h²` when absent.
    #[serde(default)]
    pub tol_torsion: Option<f64>,
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<(), String> {
        self.uniformity.validate()?;
        if let Some(t) = self.tol_torsion {
            if !(t > 0.0 && t.is_finite()) {
                return Err(format!("tol_torsion must be positive, got {t}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionOutcome {
    pub christoffel: ChristoffelField,
    pub torsion: TorsionField,
    pub verdict: HomogeneityVerdict,
    pub tol_torsion: f64,
    pub right_invariant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub report: UniformityReport,
    /// Present only for uniform bodies.
    pub connection: Option<ConnectionOutcome>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Uniformity(#[from] UniformityError),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
}

/// Christoffel field, torsion and homogeneity verdict of a gauge.
pub fn connection_from_gauge(
    gauge: &GaugeField,
    symmetry: &SymmetryGroupEstimate,
    tol_torsion: Option<f64>,
) -> Result<ConnectionOutcome, ConnectionError> {
    let tol = tol_torsion.unwrap_or_else(|| default_torsion_tol(gauge.field().grid()));
    let christoffel = material_connection(gauge)?;
    let t = torsion(&christoffel);
    let right_invariant = right_invariance_check(&christoffel, gauge, symmetry, RIGHT_INVARIANCE_TOL);
    Ok(ConnectionOutcome {
        verdict: homogeneity_verdict(&t, symmetry, tol),
        christoffel,
        torsion: t,
        tol_torsion: tol,
        right_invariant,
    })
}

pub fn analyze(model: &MaterialModel, config: &AnalysisConfig) -> Result<Analysis, AnalysisError> {
    config.validate().map_err(AnalysisError::Config)?;
    let report = assemble_material_groupoid(model, &config.uniformity)?;
    let connection = if report.verdict == Verdict::Uniform {
        Some(connection_from_gauge(&report.gauge, &report.symmetry, config.tol_torsion)?)
    } else {
        None
    };
    Ok(Analysis { report, connection })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::{ArchetypeDescriptor, ImplantSpec, ModelDescriptor, ParamField, StiffnessSpec};
    use crate::grid::Grid;

    #[test]
    fn dislocated_body_is_uniform_and_defective() {
        let m = MaterialModel::new(
            Grid::cube(7, 0.1).unwrap(),
            ModelDescriptor::ImplantedArchetype {
                archetype: ArchetypeDescriptor::SvkAnisotropic {
                    stiffness: StiffnessSpec::generic_default(),
                },
                implant: ImplantSpec::shear(1, 2, 3, 0.2),
            },
        )
        .unwrap();
        let a = analyze(&m, &AnalysisConfig::default()).unwrap();
        assert_eq!(a.report.verdict, Verdict::Uniform);
        let c = a.connection.unwrap();
        assert_eq!(c.verdict, HomogeneityVerdict::Defective);
        assert!((c.torsion.max_abs - 0.2).abs() < 1e-4, "{}", c.torsion.max_abs);
        assert!(c.right_invariant);
    }

    #[test]
    fn constant_body_is_homogeneous() {
        let m = MaterialModel::new(
            Grid::cube(4, 0.2).unwrap(),
            ModelDescriptor::NeoHookeanIsotropic {
                mu: ParamField::Constant(2.0),
            },
        )
        .unwrap();
        let a = analyze(&m, &AnalysisConfig::default()).unwrap();
        assert_eq!(a.connection.unwrap().verdict, HomogeneityVerdict::Homogeneous);
    }

    #[test]
    fn bad_torsion_tolerance_rejected() {
        let cfg = AnalysisConfig {
            tol_torsion: Some(-1.0),
            ..AnalysisConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
