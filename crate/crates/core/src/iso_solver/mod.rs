//! Numerical search for material isomorphisms and symmetry groups.
//!
//! A material isomorphism `P` from `X` to `Y` makes `T(F, Y) = T(F·P, X)` hold on the probe
//! set. It is found by multi-start Levenberg–Marquardt over the nine entries of `P` (or over an
//! exponential chart around the start), rejecting steps that bring `|det P|` below a barrier.

mod lm;
mod symmetry;

use nalgebra::SymmetricEigen;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constitutive::{check_p, ConstitutiveError, MaterialModel, ProbeSet, DEFAULT_PROBE_SEED};
use crate::grid::NodeId;
use crate::tensor::{mat_exp, Mat3};

pub use lm::{LmOutcome, LmSettings};
pub use symmetry::{conjugacy_check, symmetry_group_estimate, SymmetryGroupEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameterization {
    /// The nine raw entries of `P`.
    FullGl,
    /// `P = P₀ · exp(A)` around the start `P₀`.
    ExpChart,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub eps_iso: f64,
    pub starts: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub parameterization: Parameterization,
    /// Relative eigenvalue threshold for null directions of the normal matrix.
    pub eps_rank: f64,
    /// Frobenius radius for merging automorphisms into one group element.
    pub cluster_tol: f64,
    /// Steps with `|det P|` below this are rejected.
    pub det_barrier: f64,
    pub probe_seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            eps_iso: 1e-6,
            starts: 16,
            max_iters: 200,
            seed: 0,
            parameterization: Parameterization::FullGl,
            eps_rank: 1e-6,
            cluster_tol: 1e-4,
            det_barrier: 0.05,
            probe_seed: DEFAULT_PROBE_SEED,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.eps_iso > 0.0 && self.eps_iso.is_finite()) {
            return Err(format!("eps_iso must be positive, got {}", self.eps_iso));
        }
        if self.starts < 1 {
            return Err("starts must be at least 1".into());
        }
        if !(self.eps_rank > 0.0 && self.eps_rank < 1.0) {
            return Err(format!("eps_rank must lie in (0, 1), got {}", self.eps_rank));
        }
        if !(self.det_barrier >= 0.0) {
            return Err("det_barrier must be non-negative".into());
        }
        Ok(())
    }

    pub fn probes(&self) -> ProbeSet {
        ProbeSet::standard(self.probe_seed)
    }
}

/// A candidate frame map from `source` to `target` with its residual recomputed on creation.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialIsomorphism {
    pub source: NodeId,
    pub target: NodeId,
    pub p: Mat3,
    pub residual: f64,
}

impl MaterialIsomorphism {
    pub fn new(
        model: &MaterialModel,
        source: NodeId,
        target: NodeId,
        p: Mat3,
        probes: &ProbeSet,
    ) -> Result<Self, ConstitutiveError> {
        let residual = model.iso_residual(source, target, &p, probes)?;
        Ok(MaterialIsomorphism {
            source,
            target,
            p,
            residual,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("nodes {} and {} are not isomorphic: best residual {:e}", best.source, best.target, best.residual)]
    NotIsomorphic { best: Box<MaterialIsomorphism> },
    #[error("every start collapsed onto the determinant barrier for {from} → {to}")]
    SolverDiverged { from: NodeId, to: NodeId },
    #[error(transparent)]
    Constitutive(#[from] ConstitutiveError),
}

/// Mix `(seed, a, b)` into a stream seed so that pairwise solves are order independent.
pub(crate) fn stream_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ b.wrapping_mul(0xc2b2_ae3d_27d4_eb4f);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn to_params(p: &Mat3) -> lm::Params {
    lm::Params::from_iterator(p.transpose().iter().copied())
}

fn from_params(t: &lm::Params) -> Mat3 {
    Mat3::from_row_slice(t.as_slice())
}

/// Residual of one pair with its targets cached.
pub(crate) struct PairProblem<'a> {
    model: &'a MaterialModel,
    source: NodeId,
    probes: &'a ProbeSet,
    targets: crate::constitutive::Targets,
    barrier: f64,
}

impl<'a> PairProblem<'a> {
    pub(crate) fn new(
        model: &'a MaterialModel,
        source: NodeId,
        target: NodeId,
        probes: &'a ProbeSet,
        barrier: f64,
    ) -> Self {
        PairProblem {
            model,
            source,
            probes,
            targets: model.target_stresses(target, probes),
            barrier,
        }
    }

    pub(crate) fn residual(&self, p: &Mat3) -> Option<Vec<f64>> {
        let det = p.determinant();
        if !det.is_finite() || det.abs() < self.barrier {
            return None;
        }
        Some(self.model.residual_vector(self.source, p, self.probes, &self.targets))
    }

    /// Polish one start; returns `None` if the start violates the barrier.
    pub(crate) fn polish(&self, start: &Mat3, opts: &SolverOptions) -> Option<(Mat3, f64)> {
        let settings = LmSettings {
            max_iters: opts.max_iters,
            target: 1e-14,
        };
        match opts.parameterization {
            Parameterization::FullGl => {
                let out = lm::minimize(to_params(start), |t| self.residual(&from_params(t)), settings)?;
                Some((from_params(&out.params), out.residual))
            }
            Parameterization::ExpChart => {
                let chart = |t: &lm::Params| start * mat_exp(&from_params(t));
                let out = lm::minimize(lm::Params::zeros(), |t| self.residual(&chart(t)), settings)?;
                Some((chart(&out.params), out.residual))
            }
        }
    }

    /// `JᵀJ` in the raw-entry parameterisation at `p`.
    pub(crate) fn normal_matrix(&self, p: &Mat3) -> Option<lm::Normal> {
        lm::normal_matrix(&to_params(p), &|t: &lm::Params| self.residual(&from_params(t)))
    }
}

/// Start list: optional warm start, identity, then seeded perturbations `I + 0.3·N`.
fn starts(opts: &SolverOptions, x: NodeId, y: NodeId, warm: Option<&Mat3>) -> Vec<Mat3> {
    let mut out = Vec::with_capacity(opts.starts + 1);
    if let Some(w) = warm {
        out.push(*w);
    }
    out.push(Mat3::identity());
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(opts.seed, x as u64, y as u64));
    while out.len() < opts.starts.max(1) + usize::from(warm.is_some()) {
        out.push(
            Mat3::identity() + Mat3::from_fn(|_, _| { let v: f64 = StandardNormal.sample(&mut rng); 0.3 * v }),
        );
    }
    out
}

/// Representative with `det P > 0` (−I is an automorphism of every builtin law).
fn positive_representative(p: Mat3) -> Mat3 {
    if p.determinant() < 0.0 {
        -p
    } else {
        p
    }
}

/// Search for `P` with `T(F, Y) = T(F·P, X)`; accepted when the residual is below `eps_iso`.
pub fn solve_isomorphism(
    model: &MaterialModel,
    x: NodeId,
    y: NodeId,
    opts: &SolverOptions,
) -> Result<MaterialIsomorphism, SolveError> {
    solve_isomorphism_from(model, x, y, opts, None)
}

/// As [`solve_isomorphism`], trying `warm` before the default starts.
pub fn solve_isomorphism_from(
    model: &MaterialModel,
    x: NodeId,
    y: NodeId,
    opts: &SolverOptions,
    warm: Option<&Mat3>,
) -> Result<MaterialIsomorphism, SolveError> {
    let probes = opts.probes();
    solve_with_probes(model, x, y, opts, warm, &probes)
}

pub(crate) fn solve_with_probes(
    model: &MaterialModel,
    x: NodeId,
    y: NodeId,
    opts: &SolverOptions,
    warm: Option<&Mat3>,
    probes: &ProbeSet,
) -> Result<MaterialIsomorphism, SolveError> {
    for node in [x, y] {
        if !model.grid().contains(node) {
            return Err(ConstitutiveError::UnknownNode(node).into());
        }
    }
    let problem = PairProblem::new(model, x, y, probes, opts.det_barrier);
    let mut best: Option<(Mat3, f64)> = None;
    for start in starts(opts, x, y, warm) {
        let Some((p, res)) = problem.polish(&start, opts) else { continue };
        if best.as_ref().is_none_or(|(_, b)| res < *b) {
            best = Some((p, res));
        }
        // converged to an exact isomorphism; further starts cannot do better than ±P·G
        if res < opts.eps_iso * 1e-3 {
            break;
        }
    }
    let (p, _) = best.ok_or(SolveError::SolverDiverged { from: x, to: y })?;
    let p = positive_representative(p);
    check_p(&p)?;
    let iso = MaterialIsomorphism::new(model, x, y, p, probes)?;
    if iso.residual < opts.eps_iso {
        Ok(iso)
    } else {
        Err(SolveError::NotIsomorphic {
            best: Box::new(iso),
        })
    }
}

/// Null space of the normal matrix of the automorphism problem at `P = I`.
///
/// Returns the eigenvalues (ascending) and the generators for eigenvalues below
/// `eps_rank · λ_max`, reshaped row-major into matrices of unit Frobenius norm.
pub(crate) fn null_directions(
    model: &MaterialModel,
    x: NodeId,
    opts: &SolverOptions,
    probes: &ProbeSet,
) -> Option<(Vec<f64>, Vec<Mat3>)> {
    let problem = PairProblem::new(model, x, x, probes, opts.det_barrier);
    let normal = problem.normal_matrix(&Mat3::identity())?;
    let eig = SymmetricEigen::new(normal);
    let mut order: Vec<usize> = (0..9).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let lmax = eig.eigenvalues.max();
    let spectrum: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let generators = order
        .iter()
        .filter(|&&k| eig.eigenvalues[k] < opts.eps_rank * lmax)
        .map(|&k| {
            let v = eig.eigenvectors.column(k);
            let g = Mat3::from_row_slice(v.as_slice());
            g / g.norm()
        })
        .collect();
    Some((spectrum, generators))
}
