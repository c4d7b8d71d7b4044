//! Material groupoids of discretized bodies.
//!
//! The crate is split into an exact algebra layer ([`groupoid`]) and a numerical layer that
//! samples a body on a grid: constitutive responses ([`constitutive`]), the search for material
//! isomorphisms and symmetries ([`iso_solver`]), uniformity detection and gauge fixing
//! ([`uniformity`]), and the algebroid/connection side ([`connection`]) that turns a smooth
//! gauge into Christoffel symbols, torsion and a homogeneity verdict.
//!
//! ```
//! use mgroupoid::constitutive::{ArchetypeDescriptor, ImplantSpec, MaterialModel, ModelDescriptor, StiffnessSpec};
//! use mgroupoid::connection::HomogeneityVerdict;
//! use mgroupoid::pipeline::{analyze, AnalysisConfig};
//! use mgroupoid::Grid;
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let model = MaterialModel::new(
//!     Grid::cube(7, 0.1)?,
//!     ModelDescriptor::ImplantedArchetype {
//!         archetype: ArchetypeDescriptor::SvkAnisotropic { stiffness: StiffnessSpec::generic_default() },
//!         implant: ImplantSpec::shear(1, 2, 3, 0.2),
//!     },
//! )?;
//! let analysis = analyze(&model, &AnalysisConfig::default())?;
//! let connection = analysis.connection.expect("uniform body");
//! assert_eq!(connection.verdict, HomogeneityVerdict::Defective);
//! assert!((connection.torsion.max_abs - 0.2).abs() < 1e-6);
//! # Ok(())
//! # }
//! ```

pub mod connection;
pub mod constitutive;
pub mod grid;
pub mod groupoid;
pub mod io;
pub mod iso_solver;
pub mod pipeline;
pub mod tensor;
pub mod uniformity;

pub use grid::{central_diff, Grid, GridError, GridField, GridMat3Field, GridScalarField, NodeId};
pub use groupoid::{ArrowId, FiniteGroup, FiniteGroupoid, ObjectId};
pub use tensor::{invert3, mat_exp, Mat3, TensorError};
