//! Pointwise elastic response over a body grid and the material-isomorphism residual.
//!
//! Every builtin law depends on `F` only through `C = FᵀF` and the push-forward by `F`, with
//! the volume ratio taken as `J = sqrt(det C) = |det F|`. As a consequence `−I` is a material
//! automorphism of every builtin model, and symmetry reports work modulo `±I`.

mod fields;
mod probes;
mod stiffness;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Grid, GridMat3Field, NodeId};
use crate::tensor::{axis_rotation, Mat3, SINGULAR_RTOL};

pub use fields::{ImplantSpec, ParamField, ParamGenerator, IDENTITY9};
pub use probes::{ProbeSet, DEFAULT_PROBE_SEED};
pub use stiffness::{voigt, Stiffness};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstitutiveError {
    #[error("deformation gradient has det F = {0}, must be positive")]
    InvalidF(f64),
    #[error("node {0} is not on the body grid")]
    UnknownNode(NodeId),
    #[error("candidate isomorphism is singular or not finite (det P = {0})")]
    InvalidP(f64),
    #[error("bad model descriptor at `{field}`: {message}")]
    BadDescriptor { field: String, message: String },
    #[error("probe set rejected: {0}")]
    BadProbes(String),
}

fn bad(field: &str, message: impl Into<String>) -> ConstitutiveError {
    ConstitutiveError::BadDescriptor {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Stiffness description for the anisotropic Saint Venant–Kirchhoff law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StiffnessSpec {
    /// Isotropic Lamé part plus a seeded symmetric perturbation, optionally averaged over a
    /// symmetry group.
    Generic {
        lambda: f64,
        mu: f64,
        perturbation: f64,
        seed: u64,
        #[serde(default)]
        symmetry: ImposedSymmetry,
    },
    /// Explicit components `C_ijkl` at index `27i + 9j + 3k + l`.
    Explicit { components: Vec<f64> },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImposedSymmetry {
    #[default]
    None,
    /// Invariance under the half turn about `e₃`.
    HalfTurnE3,
}

impl StiffnessSpec {
    /// The generic trivial-symmetry archetype stiffness used throughout the tests.
    pub fn generic_default() -> Self {
        StiffnessSpec::Generic {
            lambda: 1.0,
            mu: 1.0,
            perturbation: 0.3,
            seed: 17,
            symmetry: ImposedSymmetry::None,
        }
    }

    fn build(&self, field: &str) -> Result<Stiffness, ConstitutiveError> {
        let c = match self {
            StiffnessSpec::Generic {
                lambda,
                mu,
                perturbation,
                seed,
                symmetry,
            } => {
                let base = Stiffness::generic(*lambda, *mu, *perturbation, *seed);
                match symmetry {
                    ImposedSymmetry::None => base,
                    ImposedSymmetry::HalfTurnE3 => base.symmetrized(&[
                        Mat3::identity(),
                        axis_rotation(2, std::f64::consts::PI),
                    ]),
                }
            }
            StiffnessSpec::Explicit { components } => {
                let arr: [f64; 81] = components.as_slice().try_into().map_err(|_| {
                    bad(field, format!("expected 81 components, got {}", components.len()))
                })?;
                Stiffness::from_components(arr)
            }
        };
        if c.components().iter().any(|v| !v.is_finite()) {
            return Err(bad(field, "non-finite stiffness component"));
        }
        let scale = c.components().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if c.symmetry_defect() > 1e-12 * scale.max(1.0) {
            return Err(bad(field, "stiffness lacks minor/major symmetry"));
        }
        if c.min_eigenvalue() <= 0.0 {
            return Err(bad(field, "stiffness is not positive definite on symmetric tensors"));
        }
        Ok(c)
    }
}

/// A homogeneous law usable as a material archetype.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArchetypeDescriptor {
    NeoHookeanIsotropic { mu: f64 },
    SvkAnisotropic { stiffness: StiffnessSpec },
    TransverselyIsotropic {
        mu: f64,
        fiber_modulus: f64,
        fiber_axis: [f64; 3],
    },
}

/// What a body file stores about the constitutive law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelDescriptor {
    NeoHookeanIsotropic { mu: ParamField },
    SvkAnisotropic { stiffness: StiffnessSpec },
    TransverselyIsotropic {
        mu: f64,
        fiber_modulus: f64,
        fiber_axis: [f64; 3],
    },
    ImplantedArchetype {
        archetype: ArchetypeDescriptor,
        implant: ImplantSpec,
    },
    /// Neo-Hookean with `μ(X) = mu0 · exp(rate · X^axis)`.
    FgmExponential { mu0: f64, rate: f64, axis: usize },
}

pub const KNOWN_KINDS: [&str; 5] = [
    "neo_hookean_isotropic",
    "svk_anisotropic",
    "transversely_isotropic",
    "implanted_archetype",
    "fgm_exponential",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaterialKind {
    NeoHookeanIsotropic,
    SvkAnisotropic,
    TransverselyIsotropic,
    ImplantedArchetype,
    FgmExponential,
}

/// Constant-parameter pointwise law.
#[derive(Debug, Clone, PartialEq)]
pub enum PointLaw {
    /// `T = (μ/J)(B − I)`, `B = FFᵀ`.
    NeoHookean { mu: f64 },
    /// `T = F (C : E) Fᵀ / J`, `E = (FᵀF − I)/2`.
    Svk { stiffness: Box<Stiffness> },
    /// Neo-Hookean plus a fibre term `(k/J)(I₄ − 1) (Fa)⊗(Fa)`, `I₄ = |Fa|²`.
    TransverselyIsotropic { mu: f64, fiber_modulus: f64, axis: [f64; 3] },
}

impl PointLaw {
    pub fn stress(&self, f: &Mat3) -> Mat3 {
        let j = f.determinant().abs();
        match self {
            PointLaw::NeoHookean { mu } => (f * f.transpose() - Mat3::identity()) * (mu / j),
            PointLaw::Svk { stiffness } => {
                let e = (f.transpose() * f - Mat3::identity()) * 0.5;
                let s = stiffness.contract(&e);
                f * s * f.transpose() / j
            }
            PointLaw::TransverselyIsotropic {
                mu,
                fiber_modulus,
                axis,
            } => {
                let a = nalgebra::Vector3::from(*axis);
                let fa = f * a;
                let i4 = fa.norm_squared();
                (f * f.transpose() - Mat3::identity()) * (mu / j)
                    + fa * fa.transpose() * (fiber_modulus * (i4 - 1.0) / j)
            }
        }
    }

    fn from_archetype(d: &ArchetypeDescriptor, field: &str) -> Result<Self, ConstitutiveError> {
        match d {
            ArchetypeDescriptor::NeoHookeanIsotropic { mu } => {
                positive(*mu, &format!("{field}.mu"))?;
                Ok(PointLaw::NeoHookean { mu: *mu })
            }
            ArchetypeDescriptor::SvkAnisotropic { stiffness } => Ok(PointLaw::Svk {
                stiffness: Box::new(stiffness.build(&format!("{field}.stiffness"))?),
            }),
            ArchetypeDescriptor::TransverselyIsotropic {
                mu,
                fiber_modulus,
                fiber_axis,
            } => {
                positive(*mu, &format!("{field}.mu"))?;
                positive(*fiber_modulus, &format!("{field}.fiber_modulus"))?;
                let n = fiber_axis.iter().map(|v| v * v).sum::<f64>().sqrt();
                if !(n.is_finite() && n > 0.0) {
                    return Err(bad(&format!("{field}.fiber_axis"), "axis must be non-zero"));
                }
                Ok(PointLaw::TransverselyIsotropic {
                    mu: *mu,
                    fiber_modulus: *fiber_modulus,
                    axis: fiber_axis.map(|v| v / n),
                })
            }
        }
    }
}

fn positive(v: f64, field: &str) -> Result<(), ConstitutiveError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(bad(field, format!("must be positive, got {v}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Response {
    /// One law per node.
    Pointwise(Vec<PointLaw>),
    /// `T(F, X) = T₀(F · P(X))`.
    Implanted {
        archetype: PointLaw,
        implant: GridMat3Field,
    },
}

/// Constitutive response `T(F, X)` at every node of a body grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialModel {
    grid: Grid,
    descriptor: ModelDescriptor,
    kind: MaterialKind,
    response: Response,
}

impl MaterialModel {
    /// Instantiate and validate a model over `grid`.
    pub fn new(grid: Grid, descriptor: ModelDescriptor) -> Result<Self, ConstitutiveError> {
        grid.validate()
            .map_err(|e| bad("grid", e.to_string()))?;
        let n = grid.len();
        let (kind, response) = match &descriptor {
            ModelDescriptor::NeoHookeanIsotropic { mu } => {
                mu.check_shape(&grid).map_err(|m| bad("model.mu", m))?;
                let field = mu.sample(&grid);
                let mut laws = Vec::with_capacity(n);
                for &m in field.values() {
                    positive(m, "model.mu")?;
                    laws.push(PointLaw::NeoHookean { mu: m });
                }
                (MaterialKind::NeoHookeanIsotropic, Response::Pointwise(laws))
            }
            ModelDescriptor::SvkAnisotropic { stiffness } => {
                let law = PointLaw::Svk {
                    stiffness: Box::new(stiffness.build("model.stiffness")?),
                };
                (MaterialKind::SvkAnisotropic, Response::Pointwise(vec![law; n]))
            }
            ModelDescriptor::TransverselyIsotropic {
                mu,
                fiber_modulus,
                fiber_axis,
            } => {
                let law = PointLaw::from_archetype(
                    &ArchetypeDescriptor::TransverselyIsotropic {
                        mu: *mu,
                        fiber_modulus: *fiber_modulus,
                        fiber_axis: *fiber_axis,
                    },
                    "model",
                )?;
                (MaterialKind::TransverselyIsotropic, Response::Pointwise(vec![law; n]))
            }
            ModelDescriptor::ImplantedArchetype { archetype, implant } => {
                let archetype = PointLaw::from_archetype(archetype, "model.archetype")?;
                implant
                    .check_shape(&grid)
                    .map_err(|m| bad("model.implant", m))?;
                let implant = implant.sample(&grid);
                for (node, p) in implant.values().iter().enumerate() {
                    let det = p.determinant();
                    if !(det.is_finite() && det > SINGULAR_RTOL * p.norm().powi(3)) {
                        return Err(bad(
                            "model.implant",
                            format!("det P = {det} at node {node}; implants need det > 0"),
                        ));
                    }
                }
                (
                    MaterialKind::ImplantedArchetype,
                    Response::Implanted { archetype, implant },
                )
            }
            ModelDescriptor::FgmExponential { mu0, rate, axis } => {
                positive(*mu0, "model.mu0")?;
                if !rate.is_finite() {
                    return Err(bad("model.rate", "must be finite"));
                }
                if !(1..=3).contains(axis) {
                    return Err(bad("model.axis", "must be 1, 2 or 3"));
                }
                let laws = (0..n)
                    .map(|node| PointLaw::NeoHookean {
                        mu: mu0 * (rate * grid.coords(node)[axis - 1]).exp(),
                    })
                    .collect();
                (MaterialKind::FgmExponential, Response::Pointwise(laws))
            }
        };
        Ok(MaterialModel {
            grid,
            descriptor,
            kind,
            response,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn descriptor(&self) -> &ModelDescriptor {
        &self.descriptor
    }

    pub fn kind(&self) -> MaterialKind {
        self.kind
    }

    /// Ground-truth implant field, for implanted models.
    pub fn implant(&self) -> Option<&GridMat3Field> {
        match &self.response {
            Response::Implanted { implant, .. } => Some(implant),
            Response::Pointwise(_) => None,
        }
    }

    /// Stress without the `det F > 0` guard; used by the residual, which also sees `det P < 0`.
    pub fn response(&self, f: &Mat3, node: NodeId) -> Mat3 {
        match &self.response {
            Response::Pointwise(laws) => laws[node].stress(f),
            Response::Implanted { archetype, implant } => archetype.stress(&(f * implant[node])),
        }
    }

    /// Cauchy stress `T(F, X)` at a grid node.
    pub fn cauchy_stress(&self, f: &Mat3, node: NodeId) -> Result<Mat3, ConstitutiveError> {
        let det = f.determinant();
        if !(det > 0.0) {
            return Err(ConstitutiveError::InvalidF(det));
        }
        if !self.grid.contains(node) {
            return Err(ConstitutiveError::UnknownNode(node));
        }
        Ok(self.response(f, node))
    }

    /// Normalised failure of `T(F, Y) = T(F·P, X)` over the probe set:
    /// `sqrt(mean ‖T(F·P, X) − T(F, Y)‖²) / (1 + mean ‖T(F, Y)‖)`.
    pub fn iso_residual(
        &self,
        x: NodeId,
        y: NodeId,
        p: &Mat3,
        probes: &ProbeSet,
    ) -> Result<f64, ConstitutiveError> {
        for node in [x, y] {
            if !self.grid.contains(node) {
                return Err(ConstitutiveError::UnknownNode(node));
            }
        }
        check_p(p)?;
        let targets = self.target_stresses(y, probes);
        let r = self.residual_vector(x, p, probes, &targets);
        Ok(r.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// Target stresses `T(F_k, Y)` and the normalisation `1 + mean ‖T(F_k, Y)‖`.
    pub fn target_stresses(&self, y: NodeId, probes: &ProbeSet) -> Targets {
        let stresses: Vec<Mat3> = probes.iter().map(|f| self.response(f, y)).collect();
        let mean_norm = stresses.iter().map(|t| t.norm()).sum::<f64>() / stresses.len() as f64;
        Targets {
            scale: (1.0 + mean_norm) * (stresses.len() as f64).sqrt(),
            stresses,
        }
    }

    /// Flattened residual whose Euclidean norm is the normalised isomorphism residual.
    pub fn residual_vector(&self, x: NodeId, p: &Mat3, probes: &ProbeSet, targets: &Targets) -> Vec<f64> {
        let mut out = Vec::with_capacity(9 * probes.len());
        for (f, t) in probes.iter().zip(&targets.stresses) {
            let d = (self.response(&(f * p), x) - t) / targets.scale;
            out.extend(d.transpose().iter());
        }
        out
    }
}

/// Cached target responses for repeated residual evaluations against one node.
#[derive(Debug, Clone)]
pub struct Targets {
    pub stresses: Vec<Mat3>,
    pub scale: f64,
}

pub(crate) fn check_p(p: &Mat3) -> Result<(), ConstitutiveError> {
    let det = p.determinant();
    if !det.is_finite() || det.abs() <= SINGULAR_RTOL * p.norm().powi(3) {
        return Err(ConstitutiveError::InvalidP(det));
    }
    Ok(())
}

/// Builtin model from a descriptor; alias of [`MaterialModel::new`].
pub fn make_builtin_model(grid: Grid, descriptor: ModelDescriptor) -> Result<MaterialModel, ConstitutiveError> {
    MaterialModel::new(grid, descriptor)
}
