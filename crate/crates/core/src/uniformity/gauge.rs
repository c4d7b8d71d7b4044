use nalgebra::{DMatrix, DVector};

use crate::grid::{GridMat3Field, NodeId};
use crate::iso_solver::SymmetryGroupEstimate;
use crate::tensor::{mat_exp, Mat3};

/// A field of archetype-to-point implants `P(X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeField {
    field: GridMat3Field,
    continuity_defect: f64,
}

impl GaugeField {
    pub fn new(field: GridMat3Field) -> Self {
        let continuity_defect = continuity_defect(&field);
        GaugeField {
            field,
            continuity_defect,
        }
    }

    pub fn field(&self) -> &GridMat3Field {
        &self.field
    }

    pub fn into_field(self) -> GridMat3Field {
        self.field
    }

    /// Largest `‖P(X) − P(X′)‖_F / h` over face-adjacent nodes.
    pub fn continuity_defect(&self) -> f64 {
        self.continuity_defect
    }

    /// The gauge right-translated by a constant `g`.
    pub fn right_translated(&self, g: &Mat3) -> Self {
        GaugeField::new(self.field.map(|p| p * g))
    }
}

fn continuity_defect(field: &GridMat3Field) -> f64 {
    let grid = field.grid();
    let mut worst = 0.0_f64;
    for node in 0..grid.len() {
        let ijk = grid.ijk(node);
        for axis in 0..3 {
            if ijk[axis] + 1 < grid.dims[axis] {
                let mut next = ijk;
                next[axis] += 1;
                let d = (field[node] - field[grid.index(next)]).norm() / grid.spacing[axis];
                worst = worst.max(d);
            }
        }
    }
    worst
}

/// [`smooth_gauge_from`] rooted at the grid centre.
pub fn smooth_gauge(gauge: &GaugeField, symmetry: &SymmetryGroupEstimate) -> GaugeField {
    smooth_gauge_from(gauge, symmetry, gauge.field().grid().center())
}

/// Fix the right-symmetry freedom of a gauge node by node in breadth-first order from `root`.
///
/// Each `P(X)` is replaced by `P(X)·g`, `g` the discrete symmetry element closest to the average
/// of the already fixed neighbours, followed by a Gauss–Newton polish along the continuous
/// generators. The input is returned unchanged if the sweep would raise the continuity defect.
pub fn smooth_gauge_from(gauge: &GaugeField, symmetry: &SymmetryGroupEstimate, root: NodeId) -> GaugeField {
    let grid = gauge.field().grid().clone();
    let mut values = gauge.field().values().to_vec();
    let mut fixed = vec![false; grid.len()];
    fixed[root] = true;
    for shell in grid.bfs_shells(root).into_iter().skip(1) {
        for node in shell {
            let mut sum = Mat3::zeros();
            let mut count = 0;
            for m in grid.neighbors(node) {
                if fixed[m] {
                    sum += values[m];
                    count += 1;
                }
            }
            let target = sum / count as f64;
            let p = values[node];
            let mut best = p;
            let mut best_dist = (p - target).norm();
            for g in &symmetry.discrete_elements {
                let q = p * g;
                let d = (q - target).norm();
                if d < best_dist - 1e-12 {
                    best = q;
                    best_dist = d;
                }
            }
            if !symmetry.generators.is_empty() {
                best = polish(best, &target, &symmetry.generators);
            }
            values[node] = best;
            fixed[node] = true;
        }
    }
    let out = GaugeField::new(GridMat3Field::new(grid, values).expect("same grid"));
    if out.continuity_defect <= gauge.continuity_defect {
        out
    } else {
        gauge.clone()
    }
}

/// Minimise `‖Q·exp(Σ t_k G_k) − target‖` over `t` by Gauss–Newton in right-trivialised steps.
fn polish(mut q: Mat3, target: &Mat3, generators: &[Mat3]) -> Mat3 {
    let k = generators.len();
    for _ in 0..30 {
        let r = q - target;
        let j = DMatrix::from_fn(9, k, |row, col| (q * generators[col])[(row / 3, row % 3)]);
        let rv = DVector::from_fn(9, |row, _| r[(row / 3, row % 3)]);
        let jt = j.transpose();
        let Some(ch) = (&jt * &j).cholesky() else { break };
        let delta = ch.solve(&(-(&jt * rv)));
        let step: Mat3 = generators
            .iter()
            .zip(delta.iter())
            .map(|(g, t)| g * *t)
            .sum();
        let trial = q * mat_exp(&step);
        if (trial - target).norm() >= (q - target).norm() {
            break;
        }
        q = trial;
        if delta.norm() < 1e-14 {
            break;
        }
    }
    q
}
