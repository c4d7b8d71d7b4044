//! Material symmetry group estimates at a single point.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{null_directions, stream_seed, PairProblem, SolveError, SolverOptions};
use crate::constitutive::MaterialModel;
use crate::grid::NodeId;
use crate::tensor::{axis_rotation, invert3, Mat3};

/// Largest number of discrete elements kept when closing the sampled set under products.
pub const MAX_DISCRETE_ELEMENTS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryGroupEstimate {
    pub point: NodeId,
    /// Accepted automorphisms, clustered; the identity comes first.
    pub discrete_elements: Vec<Mat3>,
    pub continuous_dimension: usize,
    /// Lie-algebra directions of the null space, unit Frobenius norm.
    pub generators: Vec<Mat3>,
    /// Eigenvalues of the normal matrix at `P = I`, ascending.
    pub normal_spectrum: Vec<f64>,
    /// Indices of discrete elements with `||det g| − 1| > 1e-6`.
    pub non_unimodular: Vec<usize>,
    /// Whether every pairwise product lies within the cluster radius of a listed element.
    pub closed: bool,
}

impl SymmetryGroupEstimate {
    /// The group `{I}` with no continuous part.
    pub fn trivial(point: NodeId) -> Self {
        SymmetryGroupEstimate {
            point,
            discrete_elements: vec![Mat3::identity()],
            continuous_dimension: 0,
            generators: Vec::new(),
            normal_spectrum: Vec::new(),
            non_unimodular: Vec::new(),
            closed: true,
        }
    }

    /// A discrete group given explicitly (caller guarantees the elements form a group).
    pub fn discrete(point: NodeId, elements: Vec<Mat3>) -> Self {
        let non_unimodular = unimodular_flags(&elements);
        SymmetryGroupEstimate {
            point,
            discrete_elements: elements,
            continuous_dimension: 0,
            generators: Vec::new(),
            normal_spectrum: Vec::new(),
            non_unimodular,
            closed: true,
        }
    }

    pub fn is_discrete(&self) -> bool {
        self.continuous_dimension == 0
    }

    pub fn contains(&self, g: &Mat3, tol: f64) -> bool {
        self.discrete_elements.iter().any(|h| (h - g).norm() < tol)
    }
}

fn unimodular_flags(elements: &[Mat3]) -> Vec<usize> {
    elements
        .iter()
        .enumerate()
        .filter(|(_, g)| (g.determinant().abs() - 1.0).abs() > 1e-6)
        .map(|(k, _)| k)
        .collect()
}

/// `±I` and the `±` half and quarter turns about the coordinate axes.
fn candidate_list() -> Vec<Mat3> {
    let mut out = vec![Mat3::identity(), -Mat3::identity()];
    for axis in 0..3 {
        for angle in [std::f64::consts::PI, std::f64::consts::FRAC_PI_2] {
            let r = axis_rotation(axis, angle);
            out.push(r);
            out.push(-r);
        }
    }
    out
}

fn random_rotation(rng: &mut ChaCha8Rng) -> Mat3 {
    let a = Mat3::from_fn(|_, _| StandardNormal.sample(rng));
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..3 {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

fn insert_clustered(elements: &mut Vec<Mat3>, g: Mat3, tol: f64) -> bool {
    if elements.iter().any(|h| (h - g).norm() < tol) {
        false
    } else {
        elements.push(g);
        true
    }
}

/// Estimate the symmetry group `G_X`: the continuous dimension from the null space of the
/// normal matrix at `P = I`, and discrete elements from polished candidate and random starts,
/// closed under products.
///
/// When the group has a continuous part, random starts land anywhere on it, so only the
/// fixed candidates are kept as discrete samples.
pub fn symmetry_group_estimate(
    model: &MaterialModel,
    x: NodeId,
    opts: &SolverOptions,
) -> Result<SymmetryGroupEstimate, SolveError> {
    model
        .grid()
        .check_node(x)
        .map_err(|_| crate::constitutive::ConstitutiveError::UnknownNode(x))?;
    let probes = opts.probes();
    let (normal_spectrum, generators) = null_directions(model, x, opts, &probes)
        .ok_or(SolveError::SolverDiverged { from: x, to: x })?;
    let continuous_dimension = generators.len();
    let problem = PairProblem::new(model, x, x, &probes, opts.det_barrier);
    let accept = |g: &Mat3| -> Option<Mat3> {
        let (p, res) = problem.polish(g, opts)?;
        (res < opts.eps_iso).then_some(p)
    };

    let mut starts = candidate_list();
    if continuous_dimension == 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(opts.seed, x as u64, x as u64));
        for _ in 0..opts.starts {
            starts.push(random_rotation(&mut rng));
        }
    }
    let mut elements = vec![Mat3::identity()];
    let mut any_start = false;
    for s in &starts {
        if let Some(p) = accept(s) {
            any_start = true;
            insert_clustered(&mut elements, p, opts.cluster_tol);
        }
    }
    if !any_start {
        return Err(SolveError::SolverDiverged { from: x, to: x });
    }

    // close under products, polishing each new product
    let mut closed = false;
    while elements.len() <= MAX_DISCRETE_ELEMENTS {
        let mut added = false;
        let mut failed = false;
        let snapshot = elements.clone();
        'outer: for a in &snapshot {
            for b in &snapshot {
                let ab = a * b;
                if elements.iter().any(|h| (h - ab).norm() < opts.cluster_tol) {
                    continue;
                }
                match accept(&ab) {
                    Some(p) => {
                        added |= insert_clustered(&mut elements, p, opts.cluster_tol);
                        if elements.len() > MAX_DISCRETE_ELEMENTS {
                            break 'outer;
                        }
                    }
                    None => failed = true,
                }
            }
        }
        if !added {
            closed = !failed;
            break;
        }
    }
    elements.truncate(MAX_DISCRETE_ELEMENTS);
    // identity first, rest in a fixed lexicographic order
    let mut rest: Vec<Mat3> = elements.split_off(1);
    rest.sort_by(|a, b| {
        a.transpose()
            .iter()
            .zip(b.transpose().iter())
            .map(|(u, v)| u.total_cmp(v))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    elements.extend(rest);

    Ok(SymmetryGroupEstimate {
        point: x,
        non_unimodular: unimodular_flags(&elements),
        discrete_elements: elements,
        continuous_dimension,
        generators,
        normal_spectrum,
        closed,
    })
}

/// Whether `P G_X P⁻¹ ⊆ G_Y` elementwise within `tol` and the continuous dimensions match.
pub fn conjugacy_check(
    gx: &SymmetryGroupEstimate,
    gy: &SymmetryGroupEstimate,
    p: &Mat3,
    tol: f64,
) -> bool {
    if gx.continuous_dimension != gy.continuous_dimension {
        return false;
    }
    let Ok(p_inv) = invert3(p) else { return false };
    gx.discrete_elements
        .iter()
        .all(|g| gy.contains(&(p * g * p_inv), tol))
}
