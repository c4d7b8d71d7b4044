//! Small dense 3×3 linear algebra.

use nalgebra::Matrix3;
use thiserror::Error;

/// Row-major 3×3 real matrix used for frame maps, deformation gradients and stresses.
pub type Mat3 = Matrix3<f64>;

/// Relative scale below which a 3×3 matrix is treated as singular: `|det a| < SINGULAR_RTOL * ‖a‖_F³`.
pub const SINGULAR_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum TensorError {
    #[error("matrix is singular (|det| = {det:e}, threshold {threshold:e})")]
    Singular { det: f64, threshold: f64 },
}

/// Inverse of a 3×3 matrix by cofactors, guarded by a scale-invariant determinant test.
pub fn invert3(a: &Mat3) -> Result<Mat3, TensorError> {
    let det = a.determinant();
    let norm = a.norm();
    let threshold = SINGULAR_RTOL * norm * norm * norm;
    if !det.is_finite() || det.abs() <= threshold || norm == 0.0 {
        return Err(TensorError::Singular { det, threshold });
    }
    let m = |r: usize, c: usize| a[(r, c)];
    let cof = Mat3::new(
        m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1),
        m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2),
        m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1),
        m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2),
        m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0),
        m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2),
        m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0),
        m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1),
        m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0),
    );
    Ok(cof / det)
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
pub fn mat_exp(a: &Mat3) -> Mat3 {
    // max absolute row sum
    let norm = (0..3)
        .map(|r| (0..3).map(|c| a[(r, c)].abs()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    if norm == 0.0 {
        return Mat3::identity();
    }
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / 2f64.powi(squarings);
    let mut term = Mat3::identity();
    let mut sum = Mat3::identity();
    for k in 1..=18 {
        term = term * scaled / k as f64;
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Unit matrix `E_ij` with a single one at zero-based row `i`, column `j`.
pub fn unit(i: usize, j: usize) -> Mat3 {
    let mut e = Mat3::zeros();
    e[(i, j)] = 1.0;
    e
}

/// Skew-symmetric generator of rotations about the zero-based coordinate axis.
pub fn skew_axis(axis: usize) -> Mat3 {
    let (i, j) = match axis {
        0 => (1, 2),
        1 => (2, 0),
        _ => (0, 1),
    };
    unit(j, i) - unit(i, j)
}

/// Rotation by `angle` about a zero-based coordinate axis.
pub fn axis_rotation(axis: usize, angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    let (i, j) = match axis {
        0 => (1, 2),
        1 => (2, 0),
        _ => (0, 1),
    };
    let mut r = Mat3::identity();
    r[(i, i)] = c;
    r[(j, j)] = c;
    r[(i, j)] = -s;
    r[(j, i)] = s;
    // snap roundoff so quarter turns stay exact
    r.map(|v| if v.abs() < 1e-15 { 0.0 } else { v })
}

/// Row-major flattening of a 3×3 matrix.
pub fn to_row_major(a: &Mat3) -> [f64; 9] {
    let mut out = [0.0; 9];
    for r in 0..3 {
        for c in 0..3 {
            out[3 * r + c] = a[(r, c)];
        }
    }
    out
}

pub fn from_row_major(v: &[f64; 9]) -> Mat3 {
    Mat3::from_row_slice(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_well_conditioned(rng: &mut ChaCha8Rng) -> Mat3 {
        Mat3::identity() * 2.0 + Mat3::from_fn(|_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn inverse_of_identity_and_diagonal() {
        assert_eq!(invert3(&Mat3::identity()).unwrap(), Mat3::identity());
        let d = Mat3::from_diagonal(&nalgebra::Vector3::new(2.0, 4.0, 5.0));
        let inv = invert3(&d).unwrap();
        assert_eq!(
            inv,
            Mat3::from_diagonal(&nalgebra::Vector3::new(0.5, 0.25, 0.2))
        );
    }

    #[test]
    fn inverse_residual_and_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let a = random_well_conditioned(&mut rng);
            let inv = invert3(&a).unwrap();
            assert!((a * inv - Mat3::identity()).norm() < 1e-12);
            let back = invert3(&inv).unwrap();
            assert!((back - a).norm() < 1e-11 * a.norm());
        }
    }

    #[test]
    fn singular_matrix_rejected() {
        let a = Mat3::new(1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 1.0, 1.0);
        assert!(matches!(invert3(&a), Err(TensorError::Singular { .. })));
        assert!(invert3(&Mat3::zeros()).is_err());
        // scale invariance: a tiny but well-conditioned matrix is fine
        assert!(invert3(&(Mat3::identity() * 1e-6)).is_ok());
    }

    #[test]
    fn exp_of_zero_is_identity() {
        assert_eq!(mat_exp(&Mat3::zeros()), Mat3::identity());
    }

    #[test]
    fn exp_of_quarter_turn_generator() {
        let r = mat_exp(&(skew_axis(2) * std::f64::consts::FRAC_PI_2));
        assert!(r[(0, 0)].abs() < 1e-14);
        assert!((r[(0, 1)] + 1.0).abs() < 1e-14);
        assert!((r[(1, 0)] - 1.0).abs() < 1e-14);
        assert!((r - axis_rotation(2, std::f64::consts::FRAC_PI_2)).norm() < 1e-14);
    }

    #[test]
    fn exp_determinant_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let a = Mat3::from_fn(|_, _| rng.random_range(-2.0..2.0));
            let lhs = mat_exp(&a).determinant();
            let rhs = a.trace().exp();
            assert!((lhs - rhs).abs() < 1e-10 * rhs, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn row_major_round_trip() {
        let a = Mat3::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0);
        let flat = to_row_major(&a);
        assert_eq!(flat, [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        assert_eq!(from_row_major(&flat), a);
    }
}
