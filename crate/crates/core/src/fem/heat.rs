use super::assembly::{assemble_load, assemble_mass, assemble_stiffness};
use super::sparse::{conjugate_gradient, CsrMatrix};
use super::NodalField;
use crate::geometry::MappedMesh;
use crate::{Result, StefanError};

/// Relative residual at which the conjugate gradient solves stop.
pub const SOLVER_TOLERANCE: f64 = 1e-12;

/// Crank–Nicolson step of `v_t - Δv = -α` with homogeneous Dirichlet data,
///
/// ```text
/// (M + dt/2 A) v_{k+1} = (M - dt/2 A) v_k - dt α f
/// ```
///
/// restricted to the interior vertices. Boundary unknowns are eliminated, so
/// the interior system stays symmetric positive definite.
#[derive(Debug, Clone)]
pub struct CrankNicolson {
    dt: f64,
    vertex_count: usize,
    interior: Vec<usize>,
    implicit: CsrMatrix,
    explicit: CsrMatrix,
    load: Vec<f64>,
}

impl CrankNicolson {
    pub fn new(mesh: &MappedMesh, dt: f64) -> Result<Self> {
        let stiffness = assemble_stiffness(mesh)?;
        let mass = assemble_mass(mesh)?;
        let load = assemble_load(mesh)?;
        Self::from_matrices(&stiffness, &mass, &load, mesh.boundary_mask(), dt)
    }

    pub fn from_matrices(
        stiffness: &CsrMatrix,
        mass: &CsrMatrix,
        load: &[f64],
        boundary: &[bool],
        dt: f64,
    ) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(StefanError::InvalidInput(format!("time step must be positive, got {dt}")));
        }
        let keep: Vec<bool> = boundary.iter().map(|b| !b).collect();
        let implicit = mass.combine(1.0, stiffness, 0.5 * dt);
        let explicit = mass.combine(1.0, stiffness, -0.5 * dt);
        let (implicit, interior) = implicit.principal_submatrix(&keep);
        let (explicit, _) = explicit.principal_submatrix(&keep);
        let load = interior.iter().map(|&i| load[i]).collect();
        Ok(Self {
            dt,
            vertex_count: boundary.len(),
            interior,
            implicit,
            explicit,
            load,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn interior_values(&self, v: &NodalField) -> Result<Vec<f64>> {
        if v.values.len() != self.vertex_count {
            return Err(StefanError::InvalidInput(format!(
                "field has {} values, mesh has {} vertices",
                v.values.len(),
                self.vertex_count
            )));
        }
        let mut is_interior = vec![false; self.vertex_count];
        for &i in &self.interior {
            is_interior[i] = true;
        }
        if let Some(i) = (0..self.vertex_count).find(|&i| !is_interior[i] && v.values[i] != 0.0) {
            return Err(StefanError::InvalidInput(format!(
                "field is {} at boundary vertex {i}, expected 0",
                v.values[i]
            )));
        }
        Ok(self.interior.iter().map(|&i| v.values[i]).collect())
    }

    fn solve(&self, rhs: &[f64], time_index: usize) -> Result<NodalField> {
        let (x, _) = conjugate_gradient(&self.implicit, rhs, SOLVER_TOLERANCE)?;
        let mut values = vec![0.0; self.vertex_count];
        for (&i, xi) in self.interior.iter().zip(x) {
            values[i] = xi;
        }
        Ok(NodalField { values, time_index })
    }

    /// One step with constant source slope `alpha`.
    pub fn step(&self, v: &NodalField, alpha: f64) -> Result<NodalField> {
        let interior = self.interior_values(v)?;
        let mut rhs = self.explicit.mul_vec(&interior);
        for (r, f) in rhs.iter_mut().zip(&self.load) {
            *r -= self.dt * alpha * f;
        }
        self.solve(&rhs, v.time_index + 1)
    }

    /// The two linear parts of a step: the homogeneous response to `v` and
    /// the response to a unit slope from a zero start. For every `alpha`,
    /// `step(v, alpha) = first + alpha * second`.
    pub fn split(&self, v: &NodalField) -> Result<(NodalField, NodalField)> {
        let interior = self.interior_values(v)?;
        let homogeneous = self.solve(&self.explicit.mul_vec(&interior), v.time_index + 1)?;
        let rhs: Vec<f64> = self.load.iter().map(|f| -self.dt * f).collect();
        let source = self.solve(&rhs, v.time_index + 1)?;
        Ok((homogeneous, source))
    }
}

/// Assembles the system on `mesh` and takes one Crank–Nicolson step.
pub fn crank_nicolson_step(mesh: &MappedMesh, v: &NodalField, alpha: f64, dt: f64) -> Result<NodalField> {
    CrankNicolson::new(mesh, dt)?.step(v, alpha)
}
