//! Algebroid elements, the anchor, and the material connection built from a gauge field.
//!
//! Christoffel symbols are stored per node as `Γ[9I + 3J + K]` (0-based), which doubles as the
//! generic bundle view `Γ^ξ_i` with `ξ = 3I + J` and `i = K`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{central_diff, Grid, GridError, GridMat3Field, NodeId};
use crate::iso_solver::SymmetryGroupEstimate;
use crate::tensor::invert3;
use crate::uniformity::GaugeField;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConnectionError {
    #[error(transparent)]
    GridTooSmall(#[from] GridError),
    #[error("gauge is singular at node {node} (det P = {det})")]
    SingularGauge { node: NodeId, det: f64 },
    #[error("node {0} is not on the grid")]
    UnknownNode(NodeId),
    #[error("gauge and correction fields live on different grids")]
    GridMismatch,
}

/// An element `a^ξ ∂/∂λ^ξ + b^i ∂/∂x^i` of the algebroid at a base node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebroidElement {
    pub node: NodeId,
    /// Frame components `a^ξ`, `ξ = 3I + J`.
    pub vertical: [f64; 9],
    /// Base components `b^i`.
    pub horizontal: [f64; 3],
}

impl AlgebroidElement {
    pub fn vertical_only(node: NodeId, vertical: [f64; 9]) -> Self {
        AlgebroidElement {
            node,
            vertical,
            horizontal: [0.0; 3],
        }
    }

    pub fn zero(node: NodeId) -> Self {
        Self::vertical_only(node, [0.0; 9])
    }

    pub fn scaled(&self, s: f64) -> Self {
        AlgebroidElement {
            node: self.node,
            vertical: self.vertical.map(|a| a * s),
            horizontal: self.horizontal.map(|b| b * s),
        }
    }

    /// Sum of two elements at the same node.
    pub fn plus(&self, other: &Self) -> Self {
        assert_eq!(self.node, other.node, "elements live at different nodes");
        AlgebroidElement {
            node: self.node,
            vertical: std::array::from_fn(|k| self.vertical[k] + other.vertical[k]),
            horizontal: std::array::from_fn(|k| self.horizontal[k] + other.horizontal[k]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub node: NodeId,
    pub components: [f64; 3],
}

/// The anchor map: the base-tangent part of an algebroid element.
pub fn anchor(v: &AlgebroidElement) -> TangentVector {
    TangentVector {
        node: v.node,
        components: v.horizontal,
    }
}

/// Which product of derivative and inverse the stored symbols use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConventionSign {
    /// `Γ^I_JK = (∂_K P)^I_α (P⁻¹)^α_J`; the other common form `P ∂_K(P⁻¹)` is its negative.
    DerivativeTimesInverse,
}

impl ConventionSign {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConventionSign::DerivativeTimesInverse => "gamma = (d_K P) P^-1",
        }
    }
}

#[inline]
fn idx(i: usize, j: usize, k: usize) -> usize {
    9 * i + 3 * j + k
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelField {
    grid: Grid,
    gamma: Vec<[f64; 27]>,
    pub convention_sign: ConventionSign,
}

impl ChristoffelField {
    pub fn from_values(grid: Grid, gamma: Vec<[f64; 27]>) -> Result<Self, ConnectionError> {
        if gamma.len() != grid.len() {
            return Err(GridError::LengthMismatch {
                expected: grid.len(),
                got: gamma.len(),
            }
            .into());
        }
        Ok(ChristoffelField {
            grid,
            gamma,
            convention_sign: ConventionSign::DerivativeTimesInverse,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[[f64; 27]] {
        &self.gamma
    }

    /// `Γ^I_JK` at a node, 0-based indices.
    pub fn get(&self, node: NodeId, i: usize, j: usize, k: usize) -> f64 {
        self.gamma[node][idx(i, j, k)]
    }

    pub fn at(&self, node: NodeId) -> &[f64; 27] {
        &self.gamma[node]
    }

    /// Largest componentwise difference to another field on the same grid.
    pub fn max_abs_diff(&self, other: &ChristoffelField) -> f64 {
        self.gamma
            .iter()
            .zip(&other.gamma)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

/// `Γ^I_JK(X) = Σ_α (∂_K P)^I_α (P⁻¹)^α_J` with second-order differences on every axis.
pub fn material_connection(gauge: &GaugeField) -> Result<ChristoffelField, ConnectionError> {
    christoffel_of(gauge.field())
}

fn christoffel_of(field: &GridMat3Field) -> Result<ChristoffelField, ConnectionError> {
    let grid = field.grid();
    for axis in 1..=3 {
        grid.require_stencil(axis)?;
    }
    let derivs = [central_diff(field, 1)?, central_diff(field, 2)?, central_diff(field, 3)?];
    let mut gamma = Vec::with_capacity(grid.len());
    for node in 0..grid.len() {
        let p = &field[node];
        let inv = invert3(p).map_err(|_| ConnectionError::SingularGauge {
            node,
            det: p.determinant(),
        })?;
        let mut g = [0.0; 27];
        for (k, d) in derivs.iter().enumerate() {
            let m = d[node] * inv;
            for i in 0..3 {
                for j in 0..3 {
                    g[idx(i, j, k)] = m[(i, j)];
                }
            }
        }
        gamma.push(g);
    }
    ChristoffelField::from_values(grid.clone(), gamma)
}

/// Horizontal lift of `v`: base part `v^i`, vertical part `−Γ^ξ_i v^i`.
pub fn christoffel_map(gamma: &ChristoffelField, v: &TangentVector) -> Result<AlgebroidElement, ConnectionError> {
    if !gamma.grid.contains(v.node) {
        return Err(ConnectionError::UnknownNode(v.node));
    }
    let g = &gamma.gamma[v.node];
    let mut vertical = [0.0; 9];
    for (xi, a) in vertical.iter_mut().enumerate() {
        *a = -(0..3).map(|k| g[3 * xi + k] * v.components[k]).sum::<f64>();
    }
    Ok(AlgebroidElement {
        node: v.node,
        vertical,
        horizontal: v.components,
    })
}

/// The splitting `γ^ξ_i = −Γ^ξ_i`, a right inverse of the anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSplitting {
    grid: Grid,
    gamma: Vec<[f64; 27]>,
}

impl GammaSplitting {
    /// `γ(v) = (γ^ξ_i v^i, v)` at `v.node`.
    pub fn apply(&self, v: &TangentVector) -> Result<AlgebroidElement, ConnectionError> {
        if !self.grid.contains(v.node) {
            return Err(ConnectionError::UnknownNode(v.node));
        }
        let g = &self.gamma[v.node];
        let mut vertical = [0.0; 9];
        for (xi, a) in vertical.iter_mut().enumerate() {
            *a = (0..3).map(|k| g[3 * xi + k] * v.components[k]).sum();
        }
        Ok(AlgebroidElement {
            node: v.node,
            vertical,
            horizontal: v.components,
        })
    }

    /// `γ^ξ_i` at a node, `ξ = 3I + J`.
    pub fn get(&self, node: NodeId, xi: usize, i: usize) -> f64 {
        self.gamma[node][3 * xi + i]
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
}

pub fn gamma_splitting(gamma: &ChristoffelField) -> GammaSplitting {
    GammaSplitting {
        grid: gamma.grid.clone(),
        gamma: gamma.gamma.iter().map(|g| g.map(|x| -x)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TorsionField {
    grid: Grid,
    t: Vec<[f64; 27]>,
    pub max_abs: f64,
    /// Largest `|T^I_JK|` over nodes, per component.
    pub component_max: [f64; 27],
}

impl TorsionField {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[[f64; 27]] {
        &self.t
    }

    pub fn get(&self, node: NodeId, i: usize, j: usize, k: usize) -> f64 {
        self.t[node][idx(i, j, k)]
    }

    pub fn at(&self, node: NodeId) -> &[f64; 27] {
        &self.t[node]
    }
}

/// `T^I_JK = Γ^I_JK − Γ^I_KJ`.
pub fn torsion(gamma: &ChristoffelField) -> TorsionField {
    let mut component_max = [0.0_f64; 27];
    let t: Vec<[f64; 27]> = gamma
        .gamma
        .iter()
        .map(|g| {
            let mut out = [0.0; 27];
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        out[idx(i, j, k)] = g[idx(i, j, k)] - g[idx(i, k, j)];
                    }
                }
            }
            for (m, v) in component_max.iter_mut().zip(&out) {
                *m = m.max(v.abs());
            }
            out
        })
        .collect();
    TorsionField {
        grid: gamma.grid.clone(),
        t,
        max_abs: component_max.iter().copied().fold(0.0, f64::max),
        component_max,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HomogeneityVerdict {
    Homogeneous,
    Defective,
    /// Torsion is nonzero in the computed gauge but the symmetry group is continuous, so another
    /// gauge might remove it.
    IndeterminateGauge,
}

impl HomogeneityVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            HomogeneityVerdict::Homogeneous => "homogeneous",
            HomogeneityVerdict::Defective => "defective",
            HomogeneityVerdict::IndeterminateGauge => "indeterminate_gauge",
        }
    }
}

/// Default torsion tolerance `10·h²` for the grid's smallest spacing.
pub fn default_torsion_tol(grid: &Grid) -> f64 {
    10.0 * grid.min_spacing().powi(2)
}

pub fn homogeneity_verdict(t: &TorsionField, symmetry: &SymmetryGroupEstimate, tol: f64) -> HomogeneityVerdict {
    if t.max_abs < tol {
        HomogeneityVerdict::Homogeneous
    } else if symmetry.is_discrete() {
        HomogeneityVerdict::Defective
    } else {
        HomogeneityVerdict::IndeterminateGauge
    }
}

/// Recompute Γ from the right-translated gauge `P·g` for every discrete symmetry element and
/// compare with `gamma` at every node.
pub fn right_invariance_check(
    gamma: &ChristoffelField,
    gauge: &GaugeField,
    symmetry: &SymmetryGroupEstimate,
    tol: f64,
) -> bool {
    symmetry.discrete_elements.iter().all(|g| {
        right_invariance_check_field(gamma, gauge, &gauge.field().map(|_| *g), tol).unwrap_or(false)
    })
}

/// As [`right_invariance_check`] with a node-dependent right factor `g(X)`.
pub fn right_invariance_check_field(
    gamma: &ChristoffelField,
    gauge: &GaugeField,
    g: &GridMat3Field,
    tol: f64,
) -> Result<bool, ConnectionError> {
    if g.grid() != gauge.field().grid() || gamma.grid() != g.grid() {
        return Err(ConnectionError::GridMismatch);
    }
    let translated = GridMat3Field::new(
        g.grid().clone(),
        gauge
            .field()
            .values()
            .iter()
            .zip(g.values())
            .map(|(p, h)| p * h)
            .collect(),
    )?;
    let other = christoffel_of(&translated)?;
    Ok(gamma.max_abs_diff(&other) < tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridField;
    use crate::tensor::{unit, Mat3};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gauge_on(n: usize, h: f64, f: impl Fn([f64; 3]) -> Mat3) -> GaugeField {
        GaugeField::new(GridField::from_fn(Grid::cube(n, h).unwrap(), f))
    }

    fn exp_diag(h: f64) -> GaugeField {
        let n = (1.0 / h).round() as usize + 1;
        gauge_on(n, h, |x| Mat3::from_diagonal(&nalgebra::Vector3::new((0.3 * x[0]).exp(), 1.0, 1.0)))
    }

    fn max_error_exp_diag(h: f64) -> f64 {
        let c = material_connection(&exp_diag(h)).unwrap();
        let mut err = 0.0_f64;
        for node in 0..c.grid().len() {
            for m in 0..27 {
                let exact = if m == 0 { 0.3 } else { 0.0 };
                err = err.max((c.at(node)[m] - exact).abs());
            }
        }
        err
    }

    fn dislocated(beta: f64) -> GaugeField {
        gauge_on(11, 0.1, |x| Mat3::identity() + unit(0, 1) * (beta * x[2]))
    }

    #[test]
    fn anchor_projects_base_part() {
        let v = AlgebroidElement::vertical_only(3, [1.0; 9]);
        assert_eq!(anchor(&v).components, [0.0; 3]);
        let w = AlgebroidElement {
            node: 3,
            vertical: [0.5; 9],
            horizontal: [1.0, 2.0, 3.0],
        };
        assert_eq!(anchor(&w).components, [1.0, 2.0, 3.0]);
        let lin = anchor(&v.scaled(2.0).plus(&w.scaled(-3.0)));
        assert_eq!(lin.components, [-3.0, -6.0, -9.0]);
    }

    #[test]
    fn constant_gauge_has_zero_symbols() {
        let p = Mat3::new(2.0, 0.1, 0.0, 0.3, 1.0, 0.0, 0.0, 0.2, 1.5);
        let c = material_connection(&gauge_on(4, 0.3, |_| p)).unwrap();
        assert!(c.values().iter().all(|g| g.iter().all(|v| v.abs() < 1e-12)));
        assert!(torsion(&c).max_abs < 1e-12);
    }

    #[test]
    fn exponential_diagonal_gauge_error_is_second_order() {
        // the interior stencil error is a³h²/6 and the boundary one twice that
        let h = 0.05;
        let err = max_error_exp_diag(h);
        let a: f64 = 0.3;
        let bound = a.powi(3) * h * h / 3.0;
        assert!(err < 1.05 * bound, "{err} vs {bound}");
        assert!(err > 0.9 * bound);
        let ratio = max_error_exp_diag(h) / max_error_exp_diag(h / 2.0);
        assert!(ratio >= 3.5, "{ratio}");
    }

    #[test]
    fn dislocated_gauge_torsion() {
        let c = material_connection(&dislocated(0.2)).unwrap();
        let t = torsion(&c);
        for node in [0, 600, 1330] {
            assert!((c.get(node, 0, 1, 2) - 0.2).abs() < 1e-12);
            assert!((t.get(node, 0, 1, 2) - 0.2).abs() < 1e-12);
            assert!((t.get(node, 0, 2, 1) + 0.2).abs() < 1e-12);
        }
        let others = t
            .component_max
            .iter()
            .enumerate()
            .filter(|(m, _)| *m != idx(0, 1, 2) && *m != idx(0, 2, 1))
            .map(|(_, v)| *v)
            .fold(0.0, f64::max);
        assert!(others < 5.0 * 0.01);
        let tol = default_torsion_tol(c.grid());
        let trivial = SymmetryGroupEstimate::trivial(0);
        assert_eq!(homogeneity_verdict(&t, &trivial, tol), HomogeneityVerdict::Defective);
        let iso = SymmetryGroupEstimate {
            continuous_dimension: 3,
            ..trivial.clone()
        };
        assert_eq!(homogeneity_verdict(&t, &iso, tol), HomogeneityVerdict::IndeterminateGauge);
    }

    #[test]
    fn integrable_gauge_is_torsion_free() {
        // P = ∇φ with φ = (X¹ + (X²)²/2, X², X³)
        let h = 0.1;
        let c = material_connection(&gauge_on(11, h, |x| Mat3::identity() + unit(0, 1) * x[1])).unwrap();
        let t = torsion(&c);
        assert!(t.max_abs < 5.0 * h * h);
        assert_eq!(
            homogeneity_verdict(&t, &SymmetryGroupEstimate::trivial(0), default_torsion_tol(c.grid())),
            HomogeneityVerdict::Homogeneous
        );
    }

    #[test]
    fn torsion_is_antisymmetric() {
        let c = material_connection(&exp_diag(0.1)).unwrap();
        let t = torsion(&c);
        for node in 0..t.grid().len() {
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        assert_eq!(t.get(node, i, j, k), -t.get(node, i, k, j));
                    }
                }
            }
        }
    }

    #[test]
    fn christoffel_map_and_splitting() {
        let c = material_connection(&exp_diag(0.05)).unwrap();
        let lift = christoffel_map(
            &c,
            &TangentVector {
                node: 0,
                components: [1.0, 0.0, 0.0],
            },
        )
        .unwrap();
        for (xi, a) in lift.vertical.iter().enumerate() {
            if xi == 0 {
                assert!((a + 0.3).abs() < 1e-4);
            } else {
                assert!(a.abs() < 1e-12);
            }
        }
        let zero = christoffel_map(
            &c,
            &TangentVector {
                node: 5,
                components: [0.0; 3],
            },
        )
        .unwrap();
        assert_eq!(zero.vertical, [0.0; 9]);

        let split = gamma_splitting(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let v = TangentVector {
                node: rng.random_range(0..c.grid().len()),
                components: std::array::from_fn(|_| rng.random_range(-2.0..2.0)),
            };
            let a = christoffel_map(&c, &v).unwrap();
            assert_eq!(anchor(&a), v);
            assert_eq!(split.apply(&v).unwrap(), a);
        }
        assert!(christoffel_map(
            &c,
            &TangentVector {
                node: 1 << 30,
                components: [0.0; 3]
            }
        )
        .is_err());
    }

    #[test]
    fn right_invariance() {
        let gauge = dislocated(0.2);
        let c = material_connection(&gauge).unwrap();
        let pm = SymmetryGroupEstimate::discrete(0, vec![Mat3::identity(), -Mat3::identity()]);
        assert!(right_invariance_check(&c, &gauge, &pm, 1e-12));
        let g = Mat3::new(1.0, 0.4, 0.0, -0.2, 2.0, 0.1, 0.0, 0.3, 0.7);
        let moved = material_connection(&gauge.right_translated(&g)).unwrap();
        assert!(c.max_abs_diff(&moved) < 1e-12);

        let varying = GridField::from_fn(gauge.field().grid().clone(), |x| {
            crate::tensor::axis_rotation(2, 0.5 * x[0])
        });
        assert!(!right_invariance_check_field(&c, &gauge, &varying, 1e-6).unwrap());
    }

    #[test]
    fn too_small_and_singular_gauges_rejected() {
        let g = GaugeField::new(GridField::from_fn(Grid::new([3, 2, 3], [0.1; 3], [0.0; 3]).unwrap(), |_| Mat3::identity()));
        assert!(matches!(material_connection(&g), Err(ConnectionError::GridTooSmall(_))));
        let g = gauge_on(3, 0.1, |_| Mat3::zeros());
        assert!(matches!(material_connection(&g), Err(ConnectionError::SingularGauge { .. })));
    }
}
