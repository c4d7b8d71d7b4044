//! The material groupoid of a body: archetype-star assembly, the uniformity verdict and the
//! gauge field `P(X)` of archetype-to-point implants.

mod gauge;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constitutive::{ConstitutiveError, MaterialModel};
use crate::grid::{GridField, NodeId};
use crate::iso_solver::{
    solve_isomorphism_from, stream_seed, symmetry_group_estimate, MaterialIsomorphism, SolveError,
    SolverOptions, SymmetryGroupEstimate,
};
use crate::tensor::{invert3, Mat3};

pub use gauge::{smooth_gauge, smooth_gauge_from, GaugeField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Uniform,
    NonUniform,
    Indeterminate,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Uniform => "uniform",
            Verdict::NonUniform => "non_uniform",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeStatus {
    Accepted,
    Rejected,
    Diverged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    /// No start reached `eps_iso` on an archetype-to-node solve.
    NotIsomorphic,
    /// Every start hit the determinant barrier.
    Diverged,
    /// A random-pair composition `P(Y)P(X)⁻¹` failed its residual check.
    Composition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub source: NodeId,
    pub target: NodeId,
    pub reason: FailureReason,
    /// Missing when the solver diverged.
    pub best_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub source: NodeId,
    pub target: NodeId,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub max: f64,
    pub mean: f64,
    pub p95: f64,
}

impl ResidualStats {
    /// Statistics over finite values; all zero for an empty input.
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Self {
        let mut v: Vec<f64> = values.into_iter().filter(|r| r.is_finite()).collect();
        if v.is_empty() {
            return ResidualStats {
                max: 0.0,
                mean: 0.0,
                p95: 0.0,
            };
        }
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let rank = ((0.95 * n as f64).ceil() as usize).clamp(1, n) - 1;
        ResidualStats {
            max: v[n - 1],
            mean: v.iter().sum::<f64>() / n as f64,
            p95: v[rank],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityOptions {
    pub solver: SolverOptions,
    /// Best residuals above this classify a pair as non-isomorphic.
    pub eps_reject: f64,
    /// Number of random node pairs whose composed isomorphism is re-verified.
    pub spot_checks: usize,
    /// Archetype node; the grid centre when absent.
    #[serde(default)]
    pub archetype: Option<NodeId>,
}

impl Default for UniformityOptions {
    fn default() -> Self {
        UniformityOptions {
            solver: SolverOptions::default(),
            eps_reject: 1e-2,
            spot_checks: 32,
            archetype: None,
        }
    }
}

impl UniformityOptions {
    pub fn validate(&self) -> Result<(), String> {
        self.solver.validate()?;
        if !(self.eps_reject >= self.solver.eps_iso && self.eps_reject.is_finite()) {
            return Err(format!(
                "eps_reject ({}) must be finite and at least eps_iso ({})",
                self.eps_reject, self.solver.eps_iso
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UniformityError {
    #[error("invalid options: {0}")]
    Options(String),
    #[error("archetype node {0} is not on the body grid")]
    UnknownNode(NodeId),
    #[error("body is not uniform (verdict {0}); pairwise isomorphisms are undefined")]
    NotUniform(&'static str),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Constitutive(#[from] ConstitutiveError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformityReport {
    pub verdict: Verdict,
    pub archetype_node: NodeId,
    /// Archetype-to-node implants after gauge fixing; best candidates at failed nodes.
    pub gauge: GaugeField,
    pub node_status: Vec<NodeStatus>,
    /// Best residual of each archetype-to-node solve; `None` where the solver diverged.
    pub node_residuals: Vec<Option<f64>>,
    pub residual_stats: ResidualStats,
    /// Symmetry group estimate at the archetype.
    pub symmetry: SymmetryGroupEstimate,
    pub failures: Vec<Failure>,
    pub spot_checks: Vec<SpotCheck>,
    pub options: UniformityOptions,
}

impl UniformityReport {
    pub fn accepted_nodes(&self) -> usize {
        self.node_status
            .iter()
            .filter(|s| **s == NodeStatus::Accepted)
            .count()
    }
}

struct NodeSolve {
    p: Mat3,
    residual: Option<f64>,
    status: NodeStatus,
}

fn solve_node(model: &MaterialModel, a: NodeId, x: NodeId, opts: &SolverOptions, warm: Option<&Mat3>) -> NodeSolve {
    match solve_isomorphism_from(model, a, x, opts, warm) {
        Ok(iso) => NodeSolve {
            p: iso.p,
            residual: Some(iso.residual),
            status: NodeStatus::Accepted,
        },
        Err(SolveError::NotIsomorphic { best }) => NodeSolve {
            p: best.p,
            residual: Some(best.residual),
            status: NodeStatus::Rejected,
        },
        Err(_) => NodeSolve {
            p: warm.copied().unwrap_or_else(Mat3::identity),
            residual: None,
            status: NodeStatus::Diverged,
        },
    }
}

/// Warm start for `node`: the solved neighbour with the smallest residual, accepted ones first.
fn warm_start(grid: &crate::grid::Grid, node: NodeId, solved: &[Option<NodeSolve>]) -> Option<Mat3> {
    let mut best: Option<(bool, f64, Mat3)> = None;
    for m in grid.neighbors(node) {
        let Some(s) = &solved[m] else { continue };
        let Some(r) = s.residual else { continue };
        let key = (s.status != NodeStatus::Accepted, r);
        if best.as_ref().is_none_or(|(rej, br, _)| key < (*rej, *br)) {
            best = Some((key.0, key.1, s.p));
        }
    }
    best.map(|(_, _, p)| p)
}

/// Solve archetype → X at every node in breadth-first shells from the archetype, decide the
/// verdict, spot-check random compositions and fix the gauge.
pub fn assemble_material_groupoid(
    model: &MaterialModel,
    opts: &UniformityOptions,
) -> Result<UniformityReport, UniformityError> {
    opts.validate().map_err(UniformityError::Options)?;
    let grid = model.grid();
    let archetype = opts.archetype.unwrap_or_else(|| grid.center());
    if !grid.contains(archetype) {
        return Err(UniformityError::UnknownNode(archetype));
    }
    let sopts = &opts.solver;

    let mut solved: Vec<Option<NodeSolve>> = (0..grid.len()).map(|_| None).collect();
    for shell in grid.bfs_shells(archetype) {
        let results: Vec<NodeSolve> = shell
            .par_iter()
            .map(|&x| {
                let warm = warm_start(grid, x, &solved);
                solve_node(model, archetype, x, sopts, warm.as_ref())
            })
            .collect();
        for (&x, r) in shell.iter().zip(results) {
            solved[x] = Some(r);
        }
    }
    let solved: Vec<NodeSolve> = solved.into_iter().map(|s| s.expect("bfs covers the grid")).collect();

    let node_status: Vec<NodeStatus> = solved.iter().map(|s| s.status).collect();
    let node_residuals: Vec<Option<f64>> = solved.iter().map(|s| s.residual).collect();
    let mut failures: Vec<Failure> = solved
        .iter()
        .enumerate()
        .filter(|(_, s)| s.status != NodeStatus::Accepted)
        .map(|(x, s)| Failure {
            source: archetype,
            target: x,
            reason: if s.status == NodeStatus::Diverged {
                FailureReason::Diverged
            } else {
                FailureReason::NotIsomorphic
            },
            best_residual: s.residual,
        })
        .collect();

    let symmetry = symmetry_group_estimate(model, archetype, sopts)?;
    let raw = GaugeField::new(GridField::new(grid.clone(), solved.iter().map(|s| s.p).collect()).expect("one value per node"));
    let gauge = smooth_gauge_from(&raw, &symmetry, archetype);

    let accepted: Vec<NodeId> = (0..grid.len())
        .filter(|&x| node_status[x] == NodeStatus::Accepted)
        .collect();
    let mut spot_checks = Vec::with_capacity(opts.spot_checks);
    if !accepted.is_empty() {
        let probes = sopts.probes();
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(sopts.seed, archetype as u64, grid.len() as u64));
        for _ in 0..opts.spot_checks {
            let x = accepted[rng.random_range(0..accepted.len())];
            let y = accepted[rng.random_range(0..accepted.len())];
            let p = composed(&gauge.field()[x], &gauge.field()[y])?;
            let residual = model.iso_residual(x, y, &p, &probes)?;
            if !(residual < 3.0 * sopts.eps_iso) {
                failures.push(Failure {
                    source: x,
                    target: y,
                    reason: FailureReason::Composition,
                    best_residual: Some(residual),
                });
            }
            spot_checks.push(SpotCheck {
                source: x,
                target: y,
                residual,
            });
        }
    }

    let verdict = if failures.is_empty() {
        Verdict::Uniform
    } else if failures
        .iter()
        .any(|f| f.best_residual.is_some_and(|r| r > opts.eps_reject))
    {
        Verdict::NonUniform
    } else {
        Verdict::Indeterminate
    };

    Ok(UniformityReport {
        verdict,
        archetype_node: archetype,
        residual_stats: ResidualStats::from_values(node_residuals.iter().flatten().copied()),
        gauge,
        node_status,
        node_residuals,
        symmetry,
        failures,
        spot_checks,
        options: opts.clone(),
    })
}

fn composed(px: &Mat3, py: &Mat3) -> Result<Mat3, ConstitutiveError> {
    let inv = invert3(px).map_err(|_| ConstitutiveError::InvalidP(px.determinant()))?;
    Ok(py * inv)
}

/// `P(X, Y) = P(Y)·P(X)⁻¹` from the report's gauge, with its residual recomputed.
pub fn pairwise_isomorphism(
    report: &UniformityReport,
    model: &MaterialModel,
    x: NodeId,
    y: NodeId,
) -> Result<MaterialIsomorphism, UniformityError> {
    if report.verdict != Verdict::Uniform {
        return Err(UniformityError::NotUniform(report.verdict.as_str()));
    }
    let field = report.gauge.field();
    for n in [x, y] {
        if !field.grid().contains(n) {
            return Err(UniformityError::UnknownNode(n));
        }
    }
    let p = if x == y {
        Mat3::identity()
    } else {
        composed(&field[x], &field[y])?
    };
    Ok(MaterialIsomorphism::new(model, x, y, p, &report.options.solver.probes())?)
}
