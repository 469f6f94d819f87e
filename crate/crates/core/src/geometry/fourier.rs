use std::f64::consts::TAU;

use rustfft::{num_complex::Complex, FftPlanner};

use super::FourierBoundary;
use crate::{Result, StefanError};

/// The equidistant polar angles `2 pi i / count`.
pub fn sample_angles(count: usize) -> Vec<f64> {
    (0..count).map(|i| TAU * i as f64 / count as f64).collect()
}

/// Fits a Fourier boundary of the given order to radii sampled at the
/// equidistant angles `2 pi i / L`.
///
/// The DFT of the samples is truncated to the modes `|l| <= order`. By
/// discrete orthogonality on the equidistant grid this is the least squares
/// fit of the truncated series to the samples.
pub fn fit_fourier(samples: &[f64], order: usize) -> Result<FourierBoundary> {
    let count = samples.len();
    if count <= 2 * order + 1 {
        return Err(StefanError::InvalidInput(format!(
            "{count} samples cannot determine {} Fourier coefficients (need more than 2M+1)",
            2 * order + 1
        )));
    }
    if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
        return Err(StefanError::InvalidInput(format!("sample {i} is not finite")));
    }

    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&r| Complex::new(r, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(count).process(&mut buf);

    let scale = 2.0 / count as f64;
    let mut coeffs = vec![0.0; 2 * order + 1];
    coeffs[order] = buf[0].re / count as f64;
    for l in 1..=order {
        coeffs[order + l] = scale * buf[l].re;
        coeffs[order - l] = -scale * buf[l].im;
    }
    FourierBoundary::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Dense normal-equations least squares with the trigonometric design matrix.
    fn dense_least_squares(samples: &[f64], order: usize) -> Vec<f64> {
        let n = samples.len();
        let design = DMatrix::from_fn(n, 2 * order + 1, |i, j| {
            let phi = TAU * i as f64 / n as f64;
            let l = j as isize - order as isize;
            match l {
                0 => 1.0,
                l if l > 0 => (l as f64 * phi).cos(),
                l => ((-l) as f64 * phi).sin(),
            }
        });
        let rhs = DVector::from_column_slice(samples);
        let normal = design.transpose() * &design;
        let x = normal
            .cholesky()
            .unwrap()
            .solve(&(design.transpose() * rhs));
        x.iter().copied().collect()
    }

    #[test]
    fn constant_samples() {
        let b = fit_fourier(&[1.0; 32], 7).unwrap();
        assert!((b.mean_radius() - 1.0).abs() < 1e-15);
        assert!(b.shape_energy() < 1e-28);
    }

    #[test]
    fn band_limited_input_is_reproduced() {
        let samples: Vec<f64> = sample_angles(64).iter().map(|p| 1.0 + 0.3 * (2.0 * p).cos()).collect();
        let b = fit_fourier(&samples, 7).unwrap();
        for l in -7..=7 {
            let want = match l {
                0 => 1.0,
                2 => 0.3,
                _ => 0.0,
            };
            assert!((b.coeff(l) - want).abs() < 1e-12, "mode {l}");
        }
    }

    #[test]
    fn matches_dense_least_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let samples: Vec<f64> = (0..64).map(|_| rng.random_range(0.5..1.5)).collect();
        let b = fit_fourier(&samples, 7).unwrap();
        let oracle = dense_least_squares(&samples, 7);
        for (got, want) in b.coeffs().iter().zip(&oracle) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn rejects_underdetermined() {
        assert!(fit_fourier(&[1.0; 15], 7).is_err());
        assert!(fit_fourier(&[1.0; 16], 7).is_ok());
    }

    proptest! {
        #[test]
        fn sampling_then_fitting_is_identity(
            coeffs in prop::collection::vec(-0.2f64..0.2, 11),
            extra in 1usize..40,
        ) {
            let order = 5;
            let mut c = coeffs;
            c[order] += 2.0;
            let b = FourierBoundary::new(c).unwrap();
            let count = 2 * order + 1 + extra;
            let fit = fit_fourier(&b.sample_radii(count), order).unwrap();
            for (x, y) in fit.coeffs().iter().zip(b.coeffs()) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }

        #[test]
        fn radius_is_periodic(coeffs in prop::collection::vec(-1.0f64..1.0, 9), phi in -50.0f64..50.0) {
            let b = FourierBoundary::new(coeffs).unwrap();
            prop_assert!((b.radius(phi) - b.radius(phi + TAU)).abs() < 1e-12);
        }

        #[test]
        fn normal_is_unit_and_factor_is_radial_component(
            coeffs in prop::collection::vec(-0.1f64..0.1, 9),
            phi in 0.0f64..TAU,
        ) {
            let mut c = coeffs;
            c[4] = 1.0;
            let b = FourierBoundary::new(c).unwrap();
            let n = b.normal(phi).unwrap();
            prop_assert!((n.normal[0].hypot(n.normal[1]) - 1.0).abs() < 1e-12);
            let radial = n.normal[0] * phi.cos() + n.normal[1] * phi.sin();
            prop_assert!((radial - n.radial_factor).abs() < 1e-12);
        }
    }
}
