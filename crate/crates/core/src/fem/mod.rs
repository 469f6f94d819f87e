//! P1 finite elements on mapped disc meshes.

mod assembly;
mod heat;
mod sparse;

pub use assembly::{assemble_load, assemble_mass, assemble_stiffness, element_load, element_mass, element_stiffness};
pub use heat::{crank_nicolson_step, CrankNicolson, SOLVER_TOLERANCE};
pub use sparse::{conjugate_gradient, CsrMatrix, SolveStats, SparseSymMatrix};

use assembly::element_gradients;

use crate::geometry::{FourierBoundary, MappedMesh};
use crate::Result;

/// Nodal values of the shifted temperature `v = u - u_m` on a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalField {
    pub values: Vec<f64>,
    pub time_index: usize,
}

impl NodalField {
    pub fn zeros(len: usize, time_index: usize) -> Self {
        Self {
            values: vec![0.0; len],
            time_index,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `self + scale * other`
    pub fn axpy(&self, scale: f64, other: &NodalField) -> NodalField {
        NodalField {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + scale * b)
                .collect(),
            time_index: self.time_index,
        }
    }
}

/// Normal derivative `dv/dn` at the boundary vertices, in boundary order.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFlux {
    pub values: Vec<f64>,
}

/// Normal derivative of a P1 field at each boundary vertex: the
/// area-weighted mean of `<grad v, n>` over the triangles touching the vertex,
/// with `n` the analytic outward normal of `boundary` at the vertex angle.
pub fn boundary_flux(mesh: &MappedMesh, v: &NodalField, boundary: &FourierBoundary) -> Result<BoundaryFlux> {
    let l = mesh.boundary_count();
    let mut position = vec![usize::MAX; mesh.vertex_count()];
    for (i, &b) in mesh.boundary().iter().enumerate() {
        position[b] = i;
    }
    let normals = (0..l)
        .map(|i| boundary.normal(std::f64::consts::TAU * i as f64 / l as f64))
        .collect::<Result<Vec<_>>>()?;

    let mut weighted = vec![0.0; l];
    let mut weight = vec![0.0; l];
    let vertices = mesh.vertices();
    for &tri in mesh.triangles() {
        if tri.iter().all(|&t| position[t] == usize::MAX) {
            continue;
        }
        let (area, g) = element_gradients([vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]]);
        let grad = [0, 1].map(|d| (0..3).map(|a| v.values[tri[a]] * g[a][d]).sum::<f64>());
        for &t in &tri {
            let i = position[t];
            if i != usize::MAX {
                let n = normals[i].normal;
                weighted[i] += area * (grad[0] * n[0] + grad[1] * n[1]);
                weight[i] += area;
            }
        }
    }
    Ok(BoundaryFlux {
        values: weighted.iter().zip(&weight).map(|(a, w)| a / w).collect(),
    })
}

/// Extremes of the front speed `-dv/dn` along the boundary. A sign change
/// means the sign condition on the front is violated.
pub fn rayleigh_taylor_check(flux: &BoundaryFlux) -> (f64, f64) {
    flux.values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &f| (lo.min(-f), hi.max(-f)))
}
