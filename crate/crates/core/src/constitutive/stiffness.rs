//! Fourth-order elasticity tensors with minor and major symmetries.

use nalgebra::{Matrix6, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::tensor::Mat3;

/// Voigt position of the symmetric index pair `(i, j)`: 11, 22, 33, 23, 13, 12.
pub fn voigt(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (1, 2) => 3,
        (0, 2) => 4,
        _ => 5,
    }
}

/// Fourth-order stiffness `C_ijkl`, stored as 81 reals with index `27i + 9j + 3k + l`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stiffness {
    c: [f64; 81],
}

fn idx(i: usize, j: usize, k: usize, l: usize) -> usize {
    27 * i + 9 * j + 3 * k + l
}

impl Stiffness {
    /// From a 6×6 Voigt matrix acting on engineering strains `(E11, E22, E33, 2E23, 2E13, 2E12)`.
    pub fn from_voigt(d: &Matrix6<f64>) -> Self {
        let mut c = [0.0; 81];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        c[idx(i, j, k, l)] = d[(voigt(i, j), voigt(k, l))];
                    }
                }
            }
        }
        Stiffness { c }
    }

    pub fn from_components(c: [f64; 81]) -> Self {
        Stiffness { c }
    }

    pub fn components(&self) -> &[f64; 81] {
        &self.c
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.c[idx(i, j, k, l)]
    }

    pub fn to_voigt(&self) -> Matrix6<f64> {
        let pairs = [(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)];
        Matrix6::from_fn(|a, b| {
            let (i, j) = pairs[a];
            let (k, l) = pairs[b];
            self.get(i, j, k, l)
        })
    }

    /// Isotropic stiffness with Lamé constants `lambda`, `mu`.
    pub fn isotropic(lambda: f64, mu: f64) -> Self {
        let mut d = Matrix6::zeros();
        for a in 0..3 {
            for b in 0..3 {
                d[(a, b)] = lambda;
            }
            d[(a, a)] += 2.0 * mu;
            d[(a + 3, a + 3)] = mu;
        }
        Self::from_voigt(&d)
    }

    /// Isotropic part plus a seeded symmetric Gaussian perturbation of relative size
    /// `perturbation` (scaled by `mu`). Generic seeds give a stiffness with no rotational
    /// symmetry other than ±I.
    pub fn generic(lambda: f64, mu: f64, perturbation: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut d = Self::isotropic(lambda, mu).to_voigt();
        for a in 0..6 {
            for b in a..6 {
                let w: f64 = StandardNormal.sample(&mut rng);
                let delta = perturbation * mu * w;
                d[(a, b)] += delta;
                if a != b {
                    d[(b, a)] += delta;
                }
            }
        }
        Self::from_voigt(&d)
    }

    /// `Q ★ C`: components rotated by `q`.
    pub fn rotated(&self, q: &Mat3) -> Self {
        let mut out = [0.0; 81];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let mut s = 0.0;
                        for a in 0..3 {
                            for b in 0..3 {
                                let qab = q[(i, a)] * q[(j, b)];
                                if qab == 0.0 {
                                    continue;
                                }
                                for c in 0..3 {
                                    for d in 0..3 {
                                        s += qab * q[(k, c)] * q[(l, d)] * self.get(a, b, c, d);
                                    }
                                }
                            }
                        }
                        out[idx(i, j, k, l)] = s;
                    }
                }
            }
        }
        Stiffness { c: out }
    }

    /// Average over the group generated by the given rotations (caller passes the whole group).
    pub fn symmetrized(&self, group: &[Mat3]) -> Self {
        let mut out = [0.0; 81];
        for q in group {
            let r = self.rotated(q);
            for (o, v) in out.iter_mut().zip(r.c.iter()) {
                *o += v / group.len() as f64;
            }
        }
        Stiffness { c: out }
    }

    /// Largest violation of `C_ijkl = C_jikl = C_ijlk = C_klij`.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let v = self.get(i, j, k, l);
                        worst = worst
                            .max((v - self.get(j, i, k, l)).abs())
                            .max((v - self.get(i, j, l, k)).abs())
                            .max((v - self.get(k, l, i, j)).abs());
                    }
                }
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Voigt matrix (positive iff positive definite on symmetric tensors).
    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.to_voigt())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `S = C : E` for a symmetric `E`.
    pub fn contract(&self, e: &Mat3) -> Mat3 {
        Mat3::from_fn(|i, j| {
            let mut s = 0.0;
            for k in 0..3 {
                for l in 0..3 {
                    s += self.c[idx(i, j, k, l)] * e[(k, l)];
                }
            }
            s
        })
    }
}
