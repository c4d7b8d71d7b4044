use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{check_version, read_file, toml_error, write_file, IoError};
use crate::connection::HomogeneityVerdict;
use crate::constitutive::{MaterialModel, ModelDescriptor, KNOWN_KINDS};
use crate::grid::Grid;
use crate::uniformity::Verdict;

pub const BODY_FORMAT: &str = "mgroupoid-body/1";

/// One expected Christoffel or torsion component, 1-based indices `(I, J, K)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedComponent {
    pub index: [usize; 3],
    pub value: f64,
}

/// Sidecar block written by the synthesizer and read by test harnesses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruth {
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homogeneity: Option<HomogeneityVerdict>,
    /// Expected `max |T|` over the grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion_max: Option<f64>,
    /// Expected nonzero torsion components; all others vanish.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub torsion: Vec<ExpectedComponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry_dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
}

/// On-disk layout of a body specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyFile {
    pub format: String,
    pub grid: Grid,
    pub model: ModelDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<GroundTruth>,
}

/// A loaded and validated body.
#[derive(Debug, Clone)]
pub struct Body {
    pub file: BodyFile,
    pub model: MaterialModel,
}

impl BodyFile {
    pub fn new(grid: Grid, model: ModelDescriptor, ground_truth: Option<GroundTruth>) -> Self {
        BodyFile {
            format: BODY_FORMAT.to_string(),
            grid,
            model,
            ground_truth,
        }
    }

    /// Build and validate the model.
    pub fn instantiate(&self) -> Result<MaterialModel, IoError> {
        Ok(MaterialModel::new(self.grid.clone(), self.model.clone())?)
    }
}

/// Line of `kind = ...` directly inside `[model]`.
fn model_kind_line(text: &str) -> Option<usize> {
    let mut in_model = false;
    for (n, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.starts_with('[') {
            in_model = t == "[model]";
        } else if in_model && t.starts_with("kind") && t[4..].trim_start().starts_with('=') {
            return Some(n + 1);
        }
    }
    None
}

pub fn parse_body(text: &str) -> Result<Body, IoError> {
    let table: toml::Table = toml::from_str(text).map_err(|e| toml_error(text, &e))?;
    check_version(text, BODY_FORMAT)?;
    let kind = table
        .get("model")
        .and_then(|m| m.as_table())
        .and_then(|m| m.get("kind"));
    match kind {
        None => {
            return Err(IoError::parse(
                None,
                "missing key `model.kind`".to_string(),
            ))
        }
        Some(toml::Value::String(k)) if !KNOWN_KINDS.contains(&k.as_str()) => {
            return Err(IoError::parse(
                model_kind_line(text),
                format!(
                    "unknown value `{k}` for key `model.kind`; expected one of {}",
                    KNOWN_KINDS.join(", ")
                ),
            ))
        }
        Some(toml::Value::String(_)) => {}
        Some(_) => return Err(IoError::parse(model_kind_line(text), "`model.kind` must be a string")),
    }
    let file: BodyFile = toml::from_str(text).map_err(|e| toml_error(text, &e))?;
    let model = file.instantiate()?;
    Ok(Body { file, model })
}

pub fn load_body(path: &Path) -> Result<Body, IoError> {
    parse_body(&read_file(path)?)
}

pub fn body_to_string(file: &BodyFile) -> String {
    toml::to_string(file).expect("body files always serialize")
}

pub fn save_body(path: &Path, file: &BodyFile) -> Result<(), IoError> {
    write_file(path, &body_to_string(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::{ArchetypeDescriptor, ConstitutiveError, ImplantSpec, ParamField, StiffnessSpec};

    fn implanted_file() -> BodyFile {
        BodyFile::new(
            Grid::cube(5, 0.25).unwrap(),
            ModelDescriptor::ImplantedArchetype {
                archetype: ArchetypeDescriptor::SvkAnisotropic {
                    stiffness: StiffnessSpec::generic_default(),
                },
                implant: ImplantSpec::shear(1, 2, 3, 0.2),
            },
            Some(GroundTruth {
                verdict: Verdict::Uniform,
                homogeneity: Some(HomogeneityVerdict::Defective),
                torsion_max: Some(0.2),
                torsion: vec![ExpectedComponent {
                    index: [1, 2, 3],
                    value: 0.2,
                }],
                symmetry_dimension: Some(0),
                description: "sheared implant".into(),
            }),
        )
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let text = body_to_string(&implanted_file());
        assert!(text.starts_with("format = \"mgroupoid-body/1\"\n"), "{text}");
        let body = parse_body(&text).unwrap();
        assert_eq!(body.file, implanted_file());
        assert_eq!(body_to_string(&body.file), text);
    }

    #[test]
    fn golden_file_round_trips() {
        let text = "format = \"mgroupoid-body/1\"

[grid]
dims = [3, 3, 3]
spacing = [0.1, 0.1, 0.1]
origin = [0.0, 0.0, 0.0]

[model]
kind = \"neo_hookean_isotropic\"

[model.mu]
exponential = { base = 1.0, rate = 0.5, axis = 1 }
";
        let body = parse_body(text).unwrap();
        assert_eq!(body.model.kind(), crate::constitutive::MaterialKind::NeoHookeanIsotropic);
        let again = parse_body(&body_to_string(&body.file)).unwrap();
        assert_eq!(again.file, body.file);
    }

    #[test]
    fn non_positive_mu_names_the_field() {
        let file = BodyFile::new(
            Grid::cube(3, 0.1).unwrap(),
            ModelDescriptor::NeoHookeanIsotropic {
                mu: ParamField::Constant(-1.0),
            },
            None,
        );
        match parse_body(&body_to_string(&file)) {
            Err(IoError::Validation(ConstitutiveError::BadDescriptor { field, .. })) => assert_eq!(field, "model.mu"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_kind_names_the_key() {
        let text = body_to_string(&implanted_file()).replace("implanted_archetype", "plasticine");
        let err = parse_body(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("model.kind") && msg.contains("plasticine"), "{msg}");
        let line = err.line().unwrap();
        assert!(text.lines().nth(line - 1).unwrap().starts_with("kind"));
    }

    #[test]
    fn truncated_file_reports_a_line() {
        let text = body_to_string(&implanted_file());
        let cut = &text[..text.find("[model.archetype]").unwrap() + 10];
        let err = parse_body(cut).unwrap_err();
        assert!(err.line().is_some(), "{err}");
        assert!(matches!(err, IoError::Parse { .. }));
    }

    #[test]
    fn wrong_version_rejected() {
        let text = body_to_string(&implanted_file()).replace("mgroupoid-body/1", "mgroupoid-body/9");
        assert_eq!(parse_body(&text).unwrap_err().line(), Some(1));
    }
}
