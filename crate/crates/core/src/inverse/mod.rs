//! Reconstruction of the melting temperature from an observed moving
//! boundary.
//!
//! The step `v_{k+1}(α) = v1 + α v2` is affine in the unknown slope, and so is
//! the boundary update it drives. On every interval the domain is taken from
//! the observation, the two parts are solved, and `α_k` is the least squares
//! match of the updated boundary to the next observed one. The slopes are then
//! integrated into `u_m`.

use std::f64::consts::TAU;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::fem::{boundary_flux, BoundaryFlux, CrankNicolson, NodalField};
use crate::forward::{kernel_interpolate, InitialField, MeltingSchedule, MeshResolution, SpaceTimeTube};
use crate::geometry::{fit_fourier, map_mesh, FourierBoundary, MappedMesh};
use crate::{Result, StefanError};

/// A (possibly noisy) measured tube with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedTube {
    pub tube: SpaceTimeTube,
    pub noise_level: f64,
    pub seed: Option<u64>,
    pub source: String,
}

impl ObservedTube {
    pub fn exact(tube: SpaceTimeTube, source: impl Into<String>) -> Self {
        Self {
            tube,
            noise_level: 0.0,
            seed: None,
            source: source.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct InverseParams {
    /// Fourier order used by the inverse solver; the observation is
    /// truncated or zero-padded to it.
    pub order: usize,
    pub mesh: MeshResolution,
    /// `u_m(0)`; the boundary data only determine the slopes.
    pub initial_value: f64,
    pub initial_field: InitialField,
}

impl InverseParams {
    pub fn new(order: usize, mesh: MeshResolution, initial_value: f64) -> Self {
        Self {
            order,
            mesh,
            initial_value,
            initial_field: InitialField::Constant,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mesh.boundary_vertices <= 2 * self.order + 1 {
            return Err(StefanError::InvalidInput(format!(
                "{} boundary vertices cannot resolve order {} (need more than 2M+1)",
                self.mesh.boundary_vertices, self.order
            )));
        }
        if !self.initial_value.is_finite() {
            return Err(StefanError::InvalidInput("initial melting temperature must be finite".into()));
        }
        self.initial_field.validate()
    }
}

/// Attempts per record before a noisy boundary that loses positivity is
/// reported.
pub const NOISE_ATTEMPTS: usize = 10;

/// Perturbs every coefficient of every record after the first by an
/// independent Gaussian with standard deviation `delta * a_{k,0}`.
pub fn add_noise(tube: &SpaceTimeTube, delta: f64, seed: u64) -> Result<ObservedTube> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(StefanError::InvalidInput(format!("noise level must be non-negative, got {delta}")));
    }
    let observed = |tube| ObservedTube {
        tube,
        noise_level: delta,
        seed: Some(seed),
        source: String::new(),
    };
    if delta == 0.0 {
        return Ok(observed(tube.clone()));
    }

    let check_points = (4 * (2 * tube.order() + 1)).max(64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut boundaries = vec![tube.boundary(0).clone()];
    for (k, record) in tube.records().iter().enumerate().skip(1) {
        let exact = &record.boundary;
        let normal = Normal::new(0.0, delta * exact.mean_radius().abs()).map_err(|e| StefanError::InvalidInput(e.to_string()))?;
        let mut attempt = 0;
        let noisy = loop {
            let coeffs = exact.coeffs().iter().map(|a| a + normal.sample(&mut rng)).collect();
            let candidate = FourierBoundary::new(coeffs)?;
            match candidate.check_positive(check_points) {
                Ok(()) => break candidate,
                Err(e) if attempt + 1 >= NOISE_ATTEMPTS => return Err(e.at_step(k)),
                Err(_) => attempt += 1,
            }
        };
        boundaries.push(noisy);
    }
    let times = tube.times();
    Ok(observed(SpaceTimeTube::from_boundaries(times[0], tube.dt(), boundaries)?))
}

/// The homogeneous part `v1` and the unit-source part `v2` of one step:
/// `(M + dt/2 A) v1 = (M - dt/2 A) v` and `(M + dt/2 A) v2 = -dt f`.
pub fn split_step(mesh: &MappedMesh, v: &NodalField, dt: f64) -> Result<(NodalField, NodalField)> {
    CrankNicolson::new(mesh, dt)?.split(v)
}

/// Least squares solution of the scalar equations `c_i alpha = b_i`.
///
/// Fails when `sum c_i^2` falls below `threshold`.
pub fn solve_scalar_least_squares(c: &[f64], b: &[f64], threshold: f64) -> Result<f64> {
    assert_eq!(c.len(), b.len());
    let cc: f64 = c.iter().map(|x| x * x).sum();
    if !(cc >= threshold) || cc == 0.0 {
        return Err(StefanError::DegenerateSensitivity { sum: cc, threshold });
    }
    let cb: f64 = c.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok(cb / cc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaFit {
    pub alpha: f64,
    /// Root mean square of `c_i alpha - b_i` over the boundary vertices.
    pub residual: f64,
}

/// Scalar equations `c_i alpha = b_i` that make the radial update of
/// `boundary` by the split fluxes match `desired` at the boundary vertices.
///
/// With `g_i = flux_i <n, x_hat>_i`, the updated radius is
/// `r_i - dt (g1_i + alpha g2_i)`. The forward solver keeps only the leading
/// `2M+1` modes of every update, so both flux parts are projected the same
/// way before matching:
///
/// ```text
/// c_i = P(g2)_i,   b_i = (r_i - r_desired_i) / dt - P(g1)_i
/// ```
pub fn alpha_equations(
    boundary: &FourierBoundary,
    homogeneous: &BoundaryFlux,
    source: &BoundaryFlux,
    desired: &FourierBoundary,
    dt: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let l = homogeneous.values.len();
    assert_eq!(source.values.len(), l);
    let order = boundary.order();
    let mut g1 = Vec::with_capacity(l);
    let mut g2 = Vec::with_capacity(l);
    for i in 0..l {
        let factor = boundary.normal(TAU * i as f64 / l as f64)?.radial_factor;
        g1.push(homogeneous.values[i] * factor);
        g2.push(source.values[i] * factor);
    }
    let p1 = fit_fourier(&g1, order)?.sample_radii(l);
    let c = fit_fourier(&g2, order)?.sample_radii(l);
    let radii = boundary.sample_radii(l);
    let target = desired.sample_radii(l);
    let b = (0..l).map(|i| (radii[i] - target[i]) / dt - p1[i]).collect();
    Ok((c, b))
}

/// Least squares slope for one interval.
pub fn estimate_alpha(
    boundary: &FourierBoundary,
    homogeneous: &BoundaryFlux,
    source: &BoundaryFlux,
    desired: &FourierBoundary,
    dt: f64,
) -> Result<AlphaFit> {
    let (c, b) = alpha_equations(boundary, homogeneous, source, desired, dt)?;
    let l = c.len() as f64;
    let mean_r = boundary.mean_radius();
    let threshold = 1e-14 * l * mean_r.powi(2).max(1.0);
    let alpha = solve_scalar_least_squares(&c, &b, threshold)?;
    let residual = (c.iter().zip(&b).map(|(c, b)| (c * alpha - b).powi(2)).sum::<f64>() / l).sqrt();
    Ok(AlphaFit { alpha, residual })
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub schedule: MeltingSchedule,
    /// Per-step RMS residual of the slope fit.
    pub residuals: Vec<f64>,
}

/// Recovers the melting temperature slopes step by step.
///
/// Step `k` meshes the observed domain `a_k`, splits the heat step from the
/// current field, fits `α_k` against the observed `a_{k+1}`, advances the
/// field with the fitted slope and interpolates it onto the observed next
/// domain.
pub fn reconstruct_schedule(observed: &ObservedTube, params: &InverseParams) -> Result<Reconstruction> {
    params.validate()?;
    let tube = observed.tube.with_order(params.order);
    if tube.len() < 2 {
        return Err(StefanError::InvalidInput("tube needs at least two records".into()));
    }
    let reference = params.mesh.build()?;
    let dt = tube.dt();

    let mut mesh = map_mesh(tube.boundary(0), &reference, 0).map_err(|e| e.at_step(0))?;
    let mut v = params.initial_field.project(&mesh)?;
    let mut slopes = Vec::with_capacity(tube.len() - 1);
    let mut residuals = Vec::with_capacity(tube.len() - 1);
    for k in 0..tube.len() - 1 {
        let current = tube.boundary(k);
        let next = tube.boundary(k + 1);
        let slice = || -> Result<_> {
            let heat = CrankNicolson::new(&mesh, dt)?;
            let (v1, v2) = heat.split(&v)?;
            let flux1 = boundary_flux(&mesh, &v1, current)?;
            let flux2 = boundary_flux(&mesh, &v2, current)?;
            let fit = estimate_alpha(current, &flux1, &flux2, next, dt)?;
            let next_mesh = map_mesh(next, &reference, k + 1)?;
            let next_v = kernel_interpolate(&mesh, &v1.axpy(fit.alpha, &v2), &next_mesh)?;
            Ok((fit, next_mesh, next_v))
        };
        let (fit, next_mesh, next_v) = slice().map_err(|e| e.at_step(k))?;
        log::debug!("step {k}: alpha = {:.6e}, residual = {:.3e}", fit.alpha, fit.residual);
        slopes.push(fit.alpha);
        residuals.push(fit.residual);
        mesh = next_mesh;
        v = next_v;
    }
    let schedule = MeltingSchedule::from_slopes(tube.times()[0], dt, params.initial_value, slopes)?;
    Ok(Reconstruction { schedule, residuals })
}

/// Errors of a reconstructed schedule against a reference on the same grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleErrors {
    pub max_value: f64,
    /// `|u - u_ref|_2 / |u_ref|_2` over the grid values.
    pub relative_l2_value: f64,
    pub max_rate: f64,
    pub relative_l2_rate: f64,
}

fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let norm: f64 = b.iter().map(|y| y * y).sum();
    if norm == 0.0 {
        diff.sqrt()
    } else {
        (diff / norm).sqrt()
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Compares grid values and slopes up to time `until` (all of them when
/// `None`). Falls back to the absolute error when the reference is zero.
pub fn compare_schedules(reconstructed: &MeltingSchedule, reference: &MeltingSchedule, until: Option<f64>) -> Result<ScheduleErrors> {
    if reconstructed.steps() != reference.steps() || (reconstructed.dt() - reference.dt()).abs() > 1e-12 * reference.dt() {
        return Err(StefanError::InvalidInput(format!(
            "schedules differ in grid: {} steps of {} vs {} steps of {}",
            reconstructed.steps(),
            reconstructed.dt(),
            reference.steps(),
            reference.dt()
        )));
    }
    let tol = 1e-9 * reference.dt();
    let points = match until {
        Some(t) => reference.times().iter().filter(|&&s| s <= t + tol).count(),
        None => reference.values().len(),
    };
    let intervals = points.saturating_sub(1).max(1).min(reference.steps());
    let (u, ur) = (&reconstructed.values()[..points], &reference.values()[..points]);
    let (a, ar) = (&reconstructed.slopes()[..intervals], &reference.slopes()[..intervals]);
    Ok(ScheduleErrors {
        max_value: max_abs_diff(u, ur),
        relative_l2_value: relative_l2(u, ur),
        max_rate: max_abs_diff(a, ar),
        relative_l2_rate: relative_l2(a, ar),
    })
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::advance_boundary;
    use crate::forward::random_star_boundary;
    use proptest::prelude::*;

    #[test]
    fn scalar_least_squares_examples() {
        assert_eq!(solve_scalar_least_squares(&[1.0, 2.0], &[2.0, 4.0], 1e-14).unwrap(), 2.0);
        assert_eq!(solve_scalar_least_squares(&[1.0, 1.0], &[1.0, 2.0], 1e-14).unwrap(), 1.5);
        assert!(matches!(
            solve_scalar_least_squares(&[0.0, 0.0], &[1.0, 2.0], 1e-14),
            Err(StefanError::DegenerateSensitivity { .. })
        ));
    }

    proptest! {
        #[test]
        fn consistent_equations_are_solved_exactly(
            c in prop::collection::vec(0.1f64..2.0, 1..40),
            alpha in -5.0f64..5.0,
        ) {
            let b: Vec<f64> = c.iter().map(|c| alpha * c).collect();
            let got = solve_scalar_least_squares(&c, &b, 1e-14).unwrap();
            prop_assert!((got - alpha).abs() <= 1e-14 * alpha.abs().max(1.0));
        }

        #[test]
        fn common_scaling_does_not_change_the_fit(
            pairs in prop::collection::vec((0.1f64..2.0, -3.0f64..3.0), 2..40),
            scale in prop_oneof![-10.0f64..-0.1, 0.1f64..10.0],
        ) {
            let (c, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let a = solve_scalar_least_squares(&c, &b, 1e-14).unwrap();
            let cs: Vec<f64> = c.iter().map(|x| x * scale).collect();
            let bs: Vec<f64> = b.iter().map(|x| x * scale).collect();
            let s = solve_scalar_least_squares(&cs, &bs, 1e-14).unwrap();
            prop_assert!((a - s).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn recovers_slope_from_forward_update() {
        let reference = MeshResolution::new(64, 8).build().unwrap();
        let boundary = random_star_boundary(7, 0.1, 4);
        let mesh = map_mesh(&boundary, &reference, 0).unwrap();
        let v = InitialField::Radial(vec![(0.0, 0.2), (1.0, 0.0)]).project(&mesh).unwrap();
        let dt = 0.05;
        let (v1, v2) = split_step(&mesh, &v, dt).unwrap();
        let flux1 = boundary_flux(&mesh, &v1, &boundary).unwrap();
        let flux2 = boundary_flux(&mesh, &v2, &boundary).unwrap();
        for alpha in [-0.25, 0.1, 0.8] {
            let v_end = CrankNicolson::new(&mesh, dt).unwrap().step(&v, alpha).unwrap();
            let flux = boundary_flux(&mesh, &v_end, &boundary).unwrap();
            let desired = advance_boundary(&boundary, &flux, dt, 7).unwrap();
            let fit = estimate_alpha(&boundary, &flux1, &flux2, &desired, dt).unwrap();
            assert!((fit.alpha - alpha).abs() <= 1e-6 * alpha.abs(), "{} vs {alpha}", fit.alpha);
        }
    }

    #[test]
    fn noise_is_deterministic_and_scaled() {
        let b = random_star_boundary(3, 0.1, 1);
        let tube = SpaceTimeTube::from_boundaries(0.0, 0.1, vec![b.clone(); 5]).unwrap();
        let clean = add_noise(&tube, 0.0, 7).unwrap();
        assert_eq!(clean.tube, tube);
        let a = add_noise(&tube, 0.01, 7).unwrap();
        let again = add_noise(&tube, 0.01, 7).unwrap();
        assert_eq!(a.tube, again.tube);
        assert_eq!(a.tube.boundary(0), &b);
        assert_ne!(a.tube.boundary(1), &b);
        assert!(add_noise(&tube, -0.1, 7).is_err());
    }

    #[test]
    fn noise_standard_deviation() {
        let n = 10_000;
        let tube = SpaceTimeTube::from_boundaries(0.0, 0.01, vec![FourierBoundary::circle(0, 1.0); n + 1]).unwrap();
        let noisy = add_noise(&tube, 0.01, 42).unwrap();
        let draws: Vec<f64> = noisy.tube.records()[1..].iter().map(|r| r.boundary.mean_radius() - 1.0).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let std = var.sqrt();
        assert!((0.0097..=0.0103).contains(&std), "{std}");
    }

    #[test]
    fn excessive_noise_is_reported() {
        let tube = SpaceTimeTube::from_boundaries(0.0, 0.1, vec![FourierBoundary::circle(3, 1.0); 3]).unwrap();
        let err = add_noise(&tube, 5.0, 1).unwrap_err();
        assert!(matches!(err.root(), StefanError::NonPositiveRadius { .. }));
    }

    #[test]
    fn stationary_tube_gives_zero_slopes() {
        let b = random_star_boundary(5, 0.1, 2);
        let tube = SpaceTimeTube::from_boundaries(0.0, 0.05, vec![b; 6]).unwrap();
        let params = InverseParams::new(5, MeshResolution::new(40, 6), 0.3);
        let rec = reconstruct_schedule(&ObservedTube::exact(tube, "test"), &params).unwrap();
        for (a, u) in rec.schedule.slopes().iter().zip(&rec.schedule.values()[1..]) {
            assert!(a.abs() < 1e-8);
            assert!((u - 0.3).abs() < 1e-8);
        }
    }

    #[test]
    fn schedule_comparison() {
        let truth = MeltingSchedule::from_values(0.0, 0.5, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        let rec = MeltingSchedule::from_values(0.0, 0.5, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let all = compare_schedules(&rec, &truth, None).unwrap();
        assert_eq!(all.max_value, 1.0);
        assert!((all.relative_l2_value - 1.0 / 5.0).abs() < 1e-15);
        assert_eq!(all.max_rate, 2.0);
        let early = compare_schedules(&rec, &truth, Some(0.5)).unwrap();
        assert_eq!(early.max_value, 0.0);
        assert_eq!(early.max_rate, 0.0);
        let other = MeltingSchedule::from_values(0.0, 0.25, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(compare_schedules(&other, &truth, None).is_err());
        assert_eq!(sample_variance(&[1.0, 3.0]), 2.0);
    }

    #[test]
    fn inverse_params_validation() {
        assert!(InverseParams::new(7, MeshResolution::new(15, 4), 0.0).validate().is_err());
        assert!(InverseParams::new(7, MeshResolution::new(16, 4), f64::NAN).validate().is_err());
    }
}
