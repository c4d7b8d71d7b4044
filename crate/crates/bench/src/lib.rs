//! Shared fixtures for the benchmarks.

use mgroupoid::constitutive::{ArchetypeDescriptor, ImplantSpec, MaterialModel, ModelDescriptor, StiffnessSpec};
use mgroupoid::Grid;

/// Generic anisotropic archetype under the sheared implant `I + β X³ E₁₂`.
pub fn sheared_body(n: usize, h: f64, beta: f64) -> MaterialModel {
    MaterialModel::new(
        Grid::cube(n, h).expect("valid grid"),
        ModelDescriptor::ImplantedArchetype {
            archetype: ArchetypeDescriptor::SvkAnisotropic {
                stiffness: StiffnessSpec::generic_default(),
            },
            implant: ImplantSpec::shear(1, 2, 3, beta),
        },
    )
    .expect("valid model")
}
