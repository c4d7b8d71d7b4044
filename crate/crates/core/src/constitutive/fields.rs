//! Generators for spatially varying parameters and implant maps.

use serde::{Deserialize, Serialize};

use crate::grid::{Grid, GridField, GridMat3Field, GridScalarField};
use crate::tensor::{from_row_major, mat_exp, Mat3};

/// A scalar material parameter over the body: a constant, a generator, or inline node values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamField {
    Constant(f64),
    Generator(ParamGenerator),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamGenerator {
    /// `base + slope · X^axis`
    Linear { base: f64, slope: f64, axis: usize },
    /// `base · exp(rate · X^axis)`
    Exponential { base: f64, rate: f64, axis: usize },
    /// One value per grid node, in node order.
    Values(Vec<f64>),
}

impl ParamField {
    /// Value at reference coordinates `x` of node `node`.
    fn at(&self, node: usize, x: [f64; 3]) -> f64 {
        match self {
            ParamField::Constant(v) => *v,
            ParamField::Generator(ParamGenerator::Linear { base, slope, axis }) => {
                base + slope * x[axis - 1]
            }
            ParamField::Generator(ParamGenerator::Exponential { base, rate, axis }) => {
                base * (rate * x[axis - 1]).exp()
            }
            ParamField::Generator(ParamGenerator::Values(v)) => v[node],
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, ParamField::Constant(_))
    }

    /// Check axis indices and inline lengths against the grid.
    pub fn check_shape(&self, grid: &Grid) -> Result<(), String> {
        match self {
            ParamField::Generator(ParamGenerator::Linear { axis, .. })
            | ParamField::Generator(ParamGenerator::Exponential { axis, .. })
                if !(1..=3).contains(axis) =>
            {
                Err(format!("axis must be 1, 2 or 3, got {axis}"))
            }
            ParamField::Generator(ParamGenerator::Values(v)) if v.len() != grid.len() => Err(
                format!("{} inline values for a grid of {} nodes", v.len(), grid.len()),
            ),
            _ => Ok(()),
        }
    }

    pub fn sample(&self, grid: &Grid) -> GridScalarField {
        let values = (0..grid.len()).map(|n| self.at(n, grid.coords(n))).collect();
        GridField::new(grid.clone(), values).expect("one value per node")
    }
}

/// Map from the archetype frame to the tangent space at each body point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ImplantSpec {
    Identity,
    /// `P(X) = constant + Σ_k X^k · slopes[k]` (row-major 3×3 blocks).
    Affine {
        constant: [f64; 9],
        slopes: [[f64; 9]; 3],
    },
    /// `P(X) = exp(Σ_k X^k · generators[k])`.
    Exponential { generators: [[f64; 9]; 3] },
    /// One row-major matrix per grid node.
    Values { values: Vec<[f64; 9]> },
}

impl ImplantSpec {
    /// `I + beta · X^coord · E_row,col` with 1-based indices.
    pub fn shear(row: usize, col: usize, coord: usize, beta: f64) -> Self {
        let mut slopes = [[0.0; 9]; 3];
        slopes[coord - 1][3 * (row - 1) + (col - 1)] = beta;
        ImplantSpec::Affine {
            constant: IDENTITY9,
            slopes,
        }
    }

    /// Diagonal entry `entry` equal to `1 + slope · X^coord`, others one (1-based).
    pub fn diag_linear(entry: usize, coord: usize, slope: f64) -> Self {
        let mut slopes = [[0.0; 9]; 3];
        slopes[coord - 1][4 * (entry - 1)] = slope;
        ImplantSpec::Affine {
            constant: IDENTITY9,
            slopes,
        }
    }

    /// Diagonal entry `entry` equal to `exp(rate · X^coord)`, others one (1-based).
    pub fn diag_exp(entry: usize, coord: usize, rate: f64) -> Self {
        let mut generators = [[0.0; 9]; 3];
        generators[coord - 1][4 * (entry - 1)] = rate;
        ImplantSpec::Exponential { generators }
    }

    /// Evaluate at reference coordinates; `node` is used only by inline values.
    pub fn eval(&self, node: usize, x: [f64; 3]) -> Mat3 {
        match self {
            ImplantSpec::Identity => Mat3::identity(),
            ImplantSpec::Affine { constant, slopes } => {
                let mut p = from_row_major(constant);
                for k in 0..3 {
                    p += from_row_major(&slopes[k]) * x[k];
                }
                p
            }
            ImplantSpec::Exponential { generators } => {
                let mut a = Mat3::zeros();
                for k in 0..3 {
                    a += from_row_major(&generators[k]) * x[k];
                }
                mat_exp(&a)
            }
            ImplantSpec::Values { values } => from_row_major(&values[node]),
        }
    }

    pub fn check_shape(&self, grid: &Grid) -> Result<(), String> {
        match self {
            ImplantSpec::Values { values } if values.len() != grid.len() => Err(format!(
                "{} inline matrices for a grid of {} nodes",
                values.len(),
                grid.len()
            )),
            _ => Ok(()),
        }
    }

    pub fn sample(&self, grid: &Grid) -> GridMat3Field {
        let values = (0..grid.len()).map(|n| self.eval(n, grid.coords(n))).collect();
        GridField::new(grid.clone(), values).expect("one value per node")
    }
}

pub const IDENTITY9: [f64; 9] = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
