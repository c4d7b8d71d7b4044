use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::ConstitutiveError;
use crate::tensor::{unit, Mat3};

pub const DEFAULT_PROBE_SEED: u64 = 0x005e_ed0f_f0a1;

/// Deformation gradients at which two responses are compared.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSet {
    probes: Vec<Mat3>,
}

impl Default for ProbeSet {
    /// Three uniaxial stretches (λ = 1.2), three simple shears (γ = 0.3) and six seeded
    /// random gradients `I + 0.2·N` with determinant in [0.5, 2].
    fn default() -> Self {
        Self::standard(DEFAULT_PROBE_SEED)
    }
}

impl ProbeSet {
    pub fn standard(seed: u64) -> Self {
        let mut probes = Vec::with_capacity(12);
        for axis in 0..3 {
            let mut f = Mat3::identity();
            f[(axis, axis)] = 1.2;
            probes.push(f);
        }
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            probes.push(Mat3::identity() + unit(i, j) * 0.3);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while probes.len() < 12 {
            let f = Mat3::identity()
                + Mat3::from_fn(|_, _| { let v: f64 = StandardNormal.sample(&mut rng); 0.2 * v });
            let det = f.determinant();
            let sv = f.singular_values();
            let cond = sv.max() / sv.min();
            if (0.5..=2.0).contains(&det) && cond < 4.0 {
                probes.push(f);
            }
        }
        Self::new(probes).expect("standard probes are valid")
    }

    /// Validate a custom probe list.
    pub fn new(probes: Vec<Mat3>) -> Result<Self, ConstitutiveError> {
        if probes.is_empty() {
            return Err(ConstitutiveError::BadProbes("probe set is empty".into()));
        }
        for (k, f) in probes.iter().enumerate() {
            let det = f.determinant();
            if !(0.5..=2.0).contains(&det) {
                return Err(ConstitutiveError::BadProbes(format!(
                    "probe {k} has det F = {det}, outside [0.5, 2]"
                )));
            }
            // pairs related by the universal automorphism −I carry no extra information
            for g in &probes[..k] {
                if (f - g).norm() < 1e-12 || (f + g).norm() < 1e-12 {
                    return Err(ConstitutiveError::BadProbes(format!(
                        "probe {k} duplicates an earlier probe up to sign"
                    )));
                }
            }
        }
        Ok(ProbeSet { probes })
    }

    pub fn len(&self) -> usize {
        self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Mat3> {
        self.probes.iter()
    }
}
