//! Time-slice front tracking for the one-phase Stefan problem.
//!
//! Each slice `[t_k, t_{k+1}]` maps the reference disc mesh onto the current
//! domain, takes one Crank–Nicolson step of `v_t - Δv = -α_k` with `v = 0` on
//! the boundary, moves every boundary sample radially by
//! `-dt (dv/dn) <n, x_hat>`, refits the boundary to `2M+1` Fourier
//! coefficients and interpolates `v` onto the new mesh.

mod kernel;
mod schedule;
mod tube;

use std::f64::consts::TAU;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use kernel::{exponential_kernel, interpolate_scattered, kernel_interpolate, KernelReport, CONDITION_LIMIT, JITTER};
pub use schedule::{MeltingSchedule, SchedulePreset};
pub use tube::{SpaceTimeTube, TubeRecord};

use crate::fem::{boundary_flux, rayleigh_taylor_check, BoundaryFlux, CrankNicolson, NodalField};
use crate::geometry::{fit_fourier, generate_reference_mesh, map_mesh, FourierBoundary, MappedMesh, ReferenceMesh};
use crate::{Point, Result, StefanError};

/// Reference mesh resolution: boundary vertex count and number of rings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshResolution {
    pub boundary_vertices: usize,
    pub rings: usize,
}

impl MeshResolution {
    /// 64 boundary vertices, 16 rings (1 024 triangles).
    pub const DESK: Self = Self::new(64, 16);
    /// 128 boundary vertices, 16 rings (2 048 triangles, 1 089 vertices).
    pub const COARSE: Self = Self::new(128, 16);
    /// 256 boundary vertices, 32 rings (8 192 triangles, 4 225 vertices).
    pub const FINE: Self = Self::new(256, 32);
    /// 360 boundary vertices, 45 rings (16 200 triangles, 8 281 vertices).
    pub const PAPER: Self = Self::new(360, 45);

    pub const fn new(boundary_vertices: usize, rings: usize) -> Self {
        Self {
            boundary_vertices,
            rings,
        }
    }

    pub fn build(self) -> Result<Arc<ReferenceMesh>> {
        generate_reference_mesh(self.boundary_vertices, self.rings).map(Arc::new)
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "desk" => Some(Self::DESK),
            "coarse" => Some(Self::COARSE),
            "fine" => Some(Self::FINE),
            "paper" => Some(Self::PAPER),
            _ => None,
        }
    }
}

/// Initial shifted temperature `v_0 = u_0 - u_m(0)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitialField {
    /// `u_0 = u_m(0)`, so `v_0 = 0`.
    #[default]
    Constant,
    /// Piecewise-linear profile over the reference radius `rho in [0, 1]`,
    /// given as `(rho, v)` pairs with increasing `rho` from 0 to 1 and
    /// `v = 0` at `rho = 1`.
    Radial(Vec<(f64, f64)>),
}

impl InitialField {
    pub fn validate(&self) -> Result<()> {
        let InitialField::Radial(profile) = self else {
            return Ok(());
        };
        let bad = |m: &str| Err(StefanError::InvalidInput(format!("radial profile: {m}")));
        if profile.len() < 2 {
            return bad("needs at least two points");
        }
        if profile[0].0 != 0.0 || profile[profile.len() - 1].0 != 1.0 {
            return bad("must span rho = 0 to rho = 1");
        }
        if profile.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return bad("rho must be strictly increasing");
        }
        if profile.iter().any(|p| !p.1.is_finite()) {
            return bad("values must be finite");
        }
        if profile[profile.len() - 1].1 != 0.0 {
            return bad("value at rho = 1 must be 0 to match the Dirichlet data");
        }
        Ok(())
    }

    /// Nodal values on a mapped mesh, evaluated at the reference radius of
    /// each vertex.
    pub fn project(&self, mesh: &MappedMesh) -> Result<NodalField> {
        self.validate()?;
        let n = mesh.vertex_count();
        let InitialField::Radial(profile) = self else {
            return Ok(NodalField::zeros(n, mesh.time_index()));
        };
        let values = mesh
            .reference()
            .vertices()
            .iter()
            .zip(mesh.boundary_mask())
            .map(|(x, &on_boundary)| {
                if on_boundary {
                    return 0.0;
                }
                let rho = x[0].hypot(x[1]).min(1.0);
                let j = profile.partition_point(|p| p.0 <= rho).clamp(1, profile.len() - 1);
                let ((r0, v0), (r1, v1)) = (profile[j - 1], profile[j]);
                v0 + (v1 - v0) * (rho - r0) / (r1 - r0)
            })
            .collect();
        Ok(NodalField {
            values,
            time_index: mesh.time_index(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct ForwardParams {
    pub dt: f64,
    pub steps: usize,
    pub order: usize,
    pub mesh: MeshResolution,
    pub initial_boundary: FourierBoundary,
    pub initial_field: InitialField,
    pub schedule: MeltingSchedule,
    /// Keep the nodal field of every step.
    pub record_fields: bool,
}

impl ForwardParams {
    /// Defaults of the reference experiments: constant initial temperature,
    /// schedule sampled from `preset`.
    pub fn new(
        preset: SchedulePreset,
        dt: f64,
        steps: usize,
        mesh: MeshResolution,
        initial_boundary: FourierBoundary,
    ) -> Result<Self> {
        Ok(Self {
            dt,
            steps,
            order: initial_boundary.order(),
            mesh,
            initial_boundary,
            initial_field: InitialField::Constant,
            schedule: preset.schedule(dt, steps)?,
            record_fields: false,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(StefanError::InvalidInput(format!("time step must be positive, got {}", self.dt)));
        }
        if self.mesh.boundary_vertices <= 2 * self.order + 1 {
            return Err(StefanError::InvalidInput(format!(
                "{} boundary vertices cannot resolve order {} (need more than 2M+1)",
                self.mesh.boundary_vertices, self.order
            )));
        }
        if self.initial_boundary.order() != self.order {
            return Err(StefanError::InvalidInput(format!(
                "initial boundary has order {}, expected {}",
                self.initial_boundary.order(),
                self.order
            )));
        }
        if self.schedule.steps() != self.steps || (self.schedule.dt() - self.dt).abs() > 1e-12 * self.dt {
            return Err(StefanError::InvalidInput(format!(
                "schedule covers {} steps of {}, expected {} steps of {}",
                self.schedule.steps(),
                self.schedule.dt(),
                self.steps,
                self.dt
            )));
        }
        self.initial_field.validate()
    }
}

/// Nodal field on the mesh of one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot {
    pub t: f64,
    pub vertices: Vec<Point>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub step: usize,
    /// Extremes of the front speed `-dv/dn`.
    pub front_speed: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct ForwardRun {
    pub tube: SpaceTimeTube,
    /// Empty unless `record_fields` was set; otherwise one entry per time level.
    pub fields: Vec<FieldSnapshot>,
    pub diagnostics: Vec<StepDiagnostics>,
}

/// Moves the boundary samples at the angles `2 pi i / L` radially by
/// `-dt * flux_i * <n, x_hat>_i` and refits the result to `order`.
pub fn advance_boundary(boundary: &FourierBoundary, flux: &BoundaryFlux, dt: f64, order: usize) -> Result<FourierBoundary> {
    let l = flux.values.len();
    let mut radii = Vec::with_capacity(l);
    for (i, &f) in flux.values.iter().enumerate() {
        let phi = TAU * i as f64 / l as f64;
        let factor = boundary
            .normal(phi)
            .map_err(|_| StefanError::NonPositiveRadius {
                index: i,
                radius: boundary.radius(phi),
            })?
            .radial_factor;
        let r = boundary.radius(phi) - dt * f * factor;
        if !(r > 0.0) {
            return Err(StefanError::NonPositiveRadius { index: i, radius: r });
        }
        radii.push(r);
    }
    let fitted = fit_fourier(&radii, order)?;
    fitted.check_positive(l)?;
    Ok(fitted)
}

/// Seeded star-shaped boundary: `a_0 = 1` and every other coefficient drawn
/// uniformly from `[-c / l^2, c / l^2]`.
pub fn random_star_boundary(order: usize, amplitude: f64, seed: u64) -> FourierBoundary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = FourierBoundary::circle(order, 1.0);
    for l in 1..=order {
        let bound = amplitude / (l * l) as f64;
        for sign in [1, -1] {
            let a = if bound > 0.0 { rng.random_range(-bound..=bound) } else { 0.0 };
            b.set_coeff(sign * l as isize, a);
        }
    }
    b
}

/// Runs the time-slice algorithm over all steps of the schedule.
pub fn simulate_forward(params: &ForwardParams) -> Result<ForwardRun> {
    params.validate()?;
    let reference = params.mesh.build()?;
    let dt = params.dt;
    let t0 = params.schedule.t0();

    let mut boundary = params.initial_boundary.clone();
    let mut mesh = map_mesh(&boundary, &reference, 0).map_err(|e| e.at_step(0))?;
    let mut v = params.initial_field.project(&mesh)?;
    let mut boundaries = vec![boundary.clone()];
    let mut fields = Vec::new();
    let mut diagnostics = Vec::with_capacity(params.steps);
    if params.record_fields {
        fields.push(snapshot(t0, &mesh, &v));
    }

    for k in 0..params.steps {
        let slope = params.schedule.slopes()[k];
        let slice = || -> Result<_> {
            let heat = CrankNicolson::new(&mesh, dt)?;
            let v_end = heat.step(&v, slope)?;
            let flux = boundary_flux(&mesh, &v_end, &boundary)?;
            let front_speed = rayleigh_taylor_check(&flux);
            let next_boundary = advance_boundary(&boundary, &flux, dt, params.order)?;
            let next_mesh = map_mesh(&next_boundary, &reference, k + 1)?;
            let next_v = kernel_interpolate(&mesh, &v_end, &next_mesh)?;
            Ok((front_speed, next_boundary, next_mesh, next_v))
        };
        let (front_speed, next_boundary, next_mesh, next_v) = slice().map_err(|e| e.at_step(k))?;
        if front_speed.0 < 0.0 && front_speed.1 > 0.0 {
            log::debug!("step {k}: front speed changes sign along the boundary {front_speed:?}");
        }
        diagnostics.push(StepDiagnostics { step: k, front_speed });
        boundary = next_boundary;
        mesh = next_mesh;
        v = next_v;
        boundaries.push(boundary.clone());
        if params.record_fields {
            fields.push(snapshot(params.schedule.time(k + 1), &mesh, &v));
        }
    }

    Ok(ForwardRun {
        tube: SpaceTimeTube::from_boundaries(t0, dt, boundaries)?,
        fields,
        diagnostics,
    })
}

fn snapshot(t: f64, mesh: &MappedMesh, v: &NodalField) -> FieldSnapshot {
    FieldSnapshot {
        t,
        vertices: mesh.vertices().to_vec(),
        values: v.values.clone(),
    }
}
