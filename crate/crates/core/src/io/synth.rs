use std::str::FromStr;

use super::body::{BodyFile, ExpectedComponent, GroundTruth};
use super::IoError;
use crate::connection::HomogeneityVerdict;
use crate::constitutive::{ArchetypeDescriptor, ConstitutiveError, ImplantSpec, ModelDescriptor, ParamField, StiffnessSpec};
use crate::grid::Grid;
use crate::uniformity::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthesisKind {
    /// Neo-Hookean with constant `μ`.
    Constant,
    /// Generic anisotropic archetype under an implant preset.
    Implanted,
    /// Neo-Hookean with `μ = mu · exp(rate · X¹)`.
    Fgm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImplantPreset {
    Identity,
    /// `I + β X³ E₁₂`; torsion `T¹₂₃ = β`.
    ShearX3,
    /// `I + β X² E₁₂`, the gradient of `(X¹ + β(X²)²/2, X², X³)`.
    GradientX2,
    /// `diag(1 + β X¹, 1, 1)`.
    DiagX1,
    /// `diag(exp(β X¹), 1, 1)`.
    ExpX1,
}

impl FromStr for SynthesisKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "constant" => Ok(SynthesisKind::Constant),
            "implanted" => Ok(SynthesisKind::Implanted),
            "fgm" => Ok(SynthesisKind::Fgm),
            _ => Err(format!("unknown kind `{s}` (constant, implanted, fgm)")),
        }
    }
}

impl FromStr for ImplantPreset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "identity" => Ok(ImplantPreset::Identity),
            "shear-x3" => Ok(ImplantPreset::ShearX3),
            "gradient-x2" => Ok(ImplantPreset::GradientX2),
            "diag-x1" => Ok(ImplantPreset::DiagX1),
            "exp-x1" => Ok(ImplantPreset::ExpX1),
            _ => Err(format!(
                "unknown implant `{s}` (identity, shear-x3, gradient-x2, diag-x1, exp-x1)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisSpec {
    pub kind: SynthesisKind,
    pub implant: ImplantPreset,
    pub beta: f64,
    /// Nodes per axis.
    pub n: usize,
    pub h: f64,
    pub mu: f64,
    pub rate: f64,
}

impl Default for SynthesisSpec {
    fn default() -> Self {
        SynthesisSpec {
            kind: SynthesisKind::Implanted,
            implant: ImplantPreset::ShearX3,
            beta: 0.2,
            n: 11,
            h: 0.1,
            mu: 1.0,
            rate: 0.5,
        }
    }
}

fn bad(field: &str, message: impl Into<String>) -> IoError {
    IoError::Validation(ConstitutiveError::BadDescriptor {
        field: field.to_string(),
        message: message.into(),
    })
}

/// Body file for a builtin family with its ground truth in the sidecar block.
pub fn synthesize_body(spec: &SynthesisSpec) -> Result<BodyFile, IoError> {
    if spec.n < 3 {
        return Err(bad("n", format!("need at least 3 nodes per axis, got {}", spec.n)));
    }
    if !spec.beta.is_finite() {
        return Err(bad("beta", "must be finite"));
    }
    let grid = Grid::cube(spec.n, spec.h).map_err(|e| bad("h", e.to_string()))?;
    let (model, truth) = match spec.kind {
        SynthesisKind::Constant => (
            ModelDescriptor::NeoHookeanIsotropic {
                mu: ParamField::Constant(spec.mu),
            },
            GroundTruth {
                verdict: Verdict::Uniform,
                homogeneity: Some(HomogeneityVerdict::Homogeneous),
                torsion_max: Some(0.0),
                torsion: Vec::new(),
                symmetry_dimension: Some(3),
                description: "constant neo-Hookean body; P = I is an isomorphism everywhere".into(),
            },
        ),
        SynthesisKind::Fgm => (
            ModelDescriptor::FgmExponential {
                mu0: spec.mu,
                rate: spec.rate,
                axis: 1,
            },
            GroundTruth {
                verdict: Verdict::NonUniform,
                homogeneity: None,
                torsion_max: None,
                torsion: Vec::new(),
                symmetry_dimension: Some(3),
                description: "graded neo-Hookean body, mu = mu0 exp(rate X1)".into(),
            },
        ),
        SynthesisKind::Implanted => {
            let b = spec.beta;
            let (implant, torsion, what) = match spec.implant {
                ImplantPreset::Identity => (ImplantSpec::Identity, Vec::new(), "identity implant".to_string()),
                ImplantPreset::ShearX3 => (
                    ImplantSpec::shear(1, 2, 3, b),
                    vec![
                        ExpectedComponent {
                            index: [1, 2, 3],
                            value: b,
                        },
                        ExpectedComponent {
                            index: [1, 3, 2],
                            value: -b,
                        },
                    ],
                    format!("dislocated implant P = I + {b} X3 E12"),
                ),
                ImplantPreset::GradientX2 => (
                    ImplantSpec::shear(1, 2, 2, b),
                    Vec::new(),
                    format!("integrable implant P = I + {b} X2 E12"),
                ),
                ImplantPreset::DiagX1 => (
                    ImplantSpec::diag_linear(1, 1, b),
                    Vec::new(),
                    format!("implant P = diag(1 + {b} X1, 1, 1)"),
                ),
                ImplantPreset::ExpX1 => (
                    ImplantSpec::diag_exp(1, 1, b),
                    Vec::new(),
                    format!("implant P = diag(exp({b} X1), 1, 1)"),
                ),
            };
            let defective = !torsion.is_empty() && b != 0.0;
            (
                ModelDescriptor::ImplantedArchetype {
                    archetype: ArchetypeDescriptor::SvkAnisotropic {
                        stiffness: StiffnessSpec::generic_default(),
                    },
                    implant,
                },
                GroundTruth {
                    verdict: Verdict::Uniform,
                    homogeneity: Some(if defective {
                        HomogeneityVerdict::Defective
                    } else {
                        HomogeneityVerdict::Homogeneous
                    }),
                    torsion_max: Some(if defective { b.abs() } else { 0.0 }),
                    torsion: if defective { torsion } else { Vec::new() },
                    symmetry_dimension: Some(0),
                    description: format!("generic anisotropic archetype, {what}"),
                },
            )
        }
    };
    let file = BodyFile::new(grid, model, Some(truth));
    file.instantiate()?;
    Ok(file)
}
