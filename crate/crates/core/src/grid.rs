//! Regular Cartesian body grids, sampled fields and finite differences.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tensor::Mat3;

/// Linear node index into a [`Grid`]; axis 1 varies fastest.
pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid has {nodes} node(s) along axis {axis}; central differences need at least 3")]
    TooSmall { axis: usize, nodes: usize },
    #[error("grid spacing along axis {axis} must be positive and finite, got {value}")]
    BadSpacing { axis: usize, value: f64 },
    #[error("grid dimension along axis {axis} must be at least 1")]
    EmptyAxis { axis: usize },
    #[error("field has {got} values but the grid has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("node {0} is not on the grid")]
    UnknownNode(NodeId),
}

/// Regular grid of material points with Cartesian reference coordinates `X = origin + i·h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    #[serde(default)]
    pub origin: [f64; 3],
}

impl Grid {
    pub fn new(dims: [usize; 3], spacing: [f64; 3], origin: [f64; 3]) -> Result<Self, GridError> {
        let grid = Grid {
            dims,
            spacing,
            origin,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Cube of `n` nodes per axis with spacing `h`, starting at the origin.
    pub fn cube(n: usize, h: f64) -> Result<Self, GridError> {
        Self::new([n; 3], [h; 3], [0.0; 3])
    }

    pub fn validate(&self) -> Result<(), GridError> {
        for axis in 0..3 {
            if self.dims[axis] == 0 {
                return Err(GridError::EmptyAxis { axis: axis + 1 });
            }
            let h = self.spacing[axis];
            if !(h.is_finite() && h > 0.0) {
                return Err(GridError::BadSpacing {
                    axis: axis + 1,
                    value: h,
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, ijk: [usize; 3]) -> NodeId {
        ijk[0] + self.dims[0] * (ijk[1] + self.dims[1] * ijk[2])
    }

    pub fn ijk(&self, node: NodeId) -> [usize; 3] {
        let i = node % self.dims[0];
        let rest = node / self.dims[0];
        [i, rest % self.dims[1], rest / self.dims[1]]
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node < self.len()
    }

    pub fn check_node(&self, node: NodeId) -> Result<(), GridError> {
        if self.contains(node) {
            Ok(())
        } else {
            Err(GridError::UnknownNode(node))
        }
    }

    pub fn coords(&self, node: NodeId) -> [f64; 3] {
        let ijk = self.ijk(node);
        [0, 1, 2].map(|a| self.origin[a] + ijk[a] as f64 * self.spacing[a])
    }

    /// Node whose coordinates match `x` to within a hundredth of the spacing.
    pub fn node_at(&self, x: [f64; 3]) -> Option<NodeId> {
        let mut ijk = [0usize; 3];
        for a in 0..3 {
            let t = (x[a] - self.origin[a]) / self.spacing[a];
            let r = t.round();
            if (t - r).abs() > 1e-2 || r < 0.0 || r as usize >= self.dims[a] {
                return None;
            }
            ijk[a] = r as usize;
        }
        Some(self.index(ijk))
    }

    pub fn center(&self) -> NodeId {
        self.index([self.dims[0] / 2, self.dims[1] / 2, self.dims[2] / 2])
    }

    /// Face neighbours in a fixed order: −axis1, +axis1, −axis2, +axis2, −axis3, +axis3.
    pub fn neighbors(&self, node: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let ijk = self.ijk(node);
        (0..6).filter_map(move |k| {
            let axis = k / 2;
            let mut c = ijk;
            if k % 2 == 0 {
                c[axis] = c[axis].checked_sub(1)?;
            } else {
                c[axis] += 1;
                if c[axis] >= self.dims[axis] {
                    return None;
                }
            }
            Some(self.index(c))
        })
    }

    /// Breadth-first shells of nodes starting at `root`; each node appears once, shells are sorted.
    pub fn bfs_shells(&self, root: NodeId) -> Vec<Vec<NodeId>> {
        let mut seen = vec![false; self.len()];
        seen[root] = true;
        let mut shells = vec![vec![root]];
        loop {
            let mut next = Vec::new();
            for &n in shells.last().unwrap() {
                for m in self.neighbors(n) {
                    if !seen[m] {
                        seen[m] = true;
                        next.push(m);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            next.sort_unstable();
            shells.push(next);
        }
        shells
    }

    /// Smallest spacing over all axes.
    pub fn min_spacing(&self) -> f64 {
        self.spacing.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Check that an axis (1-based) can carry a three-point stencil.
    pub fn require_stencil(&self, axis: usize) -> Result<(), GridError> {
        let nodes = self.dims[axis - 1];
        if nodes < 3 {
            Err(GridError::TooSmall { axis, nodes })
        } else {
            Ok(())
        }
    }
}

/// Values sampled at every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField<T> {
    grid: Grid,
    values: Vec<T>,
}

pub type GridScalarField = GridField<f64>;
pub type GridMat3Field = GridField<Mat3>;

impl<T> GridField<T> {
    pub fn new(grid: Grid, values: Vec<T>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(GridField { grid, values })
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut([f64; 3]) -> T) -> Self {
        let values = (0..grid.len()).map(|n| f(grid.coords(n))).collect();
        GridField { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn get(&self, node: NodeId) -> Option<&T> {
        self.values.get(node)
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> GridField<U> {
        GridField {
            grid: self.grid.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }
}

impl<T> std::ops::Index<NodeId> for GridField<T> {
    type Output = T;
    fn index(&self, node: NodeId) -> &T {
        &self.values[node]
    }
}

/// Partial derivative along a 1-based `axis`.
///
/// Interior nodes use the centred stencil `(f(x+h) − f(x−h)) / 2h`; the first and last node use
/// the one-sided second-order stencils `∓(3f₀ − 4f₁ + f₂) / 2h`, so the whole grid is covered.
pub fn central_diff<T>(field: &GridField<T>, axis: usize) -> Result<GridField<T>, GridError>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    assert!((1..=3).contains(&axis), "axis must be 1, 2 or 3");
    let grid = &field.grid;
    grid.require_stencil(axis)?;
    let a = axis - 1;
    let n = grid.dims[a];
    let inv2h = 0.5 / grid.spacing[a];
    let stride = match a {
        0 => 1,
        1 => grid.dims[0],
        _ => grid.dims[0] * grid.dims[1],
    };
    let v = &field.values;
    let values = (0..grid.len())
        .map(|node| {
            let i = grid.ijk(node)[a];
            if i == 0 {
                (v[node + stride] * 4.0 - v[node] * 3.0 - v[node + 2 * stride]) * inv2h
            } else if i == n - 1 {
                (v[node] * 3.0 - v[node - stride] * 4.0 + v[node - 2 * stride]) * inv2h
            } else {
                (v[node + stride] - v[node - stride]) * inv2h
            }
        })
        .collect();
    Ok(GridField {
        grid: grid.clone(),
        values,
    })
}
