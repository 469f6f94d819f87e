use super::sparse::CsrMatrix;
use crate::geometry::MappedMesh;
use crate::{Point, Result, StefanError};

/// Area and barycentric gradients of a P1 triangle.
pub(crate) fn element_gradients(p: [Point; 3]) -> (f64, [[f64; 2]; 3]) {
    let area = 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]));
    let inv = 1.0 / (2.0 * area);
    let grads = [
        [(p[1][1] - p[2][1]) * inv, (p[2][0] - p[1][0]) * inv],
        [(p[2][1] - p[0][1]) * inv, (p[0][0] - p[2][0]) * inv],
        [(p[0][1] - p[1][1]) * inv, (p[1][0] - p[0][0]) * inv],
    ];
    (area, grads)
}

/// Element stiffness matrix `area * grad(lambda_a) . grad(lambda_b)`.
pub fn element_stiffness(p: [Point; 3]) -> [[f64; 3]; 3] {
    let (area, g) = element_gradients(p);
    let mut k = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            k[a][b] = area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
        }
    }
    k
}

/// Consistent element mass matrix `area / 12 [[2,1,1],[1,2,1],[1,1,2]]`.
pub fn element_mass(p: [Point; 3]) -> [[f64; 3]; 3] {
    let area = element_gradients(p).0;
    let mut m = [[area / 12.0; 3]; 3];
    for (a, row) in m.iter_mut().enumerate() {
        row[a] = area / 6.0;
    }
    m
}

pub fn element_load(p: [Point; 3]) -> [f64; 3] {
    [element_gradients(p).0 / 3.0; 3]
}

fn corners(mesh: &MappedMesh, tri: [usize; 3]) -> [Point; 3] {
    let v = mesh.vertices();
    [v[tri[0]], v[tri[1]], v[tri[2]]]
}

fn checked_corners(mesh: &MappedMesh, t: usize) -> Result<[Point; 3]> {
    let p = corners(mesh, mesh.triangles()[t]);
    let area = element_gradients(p).0;
    if area > 0.0 && area.is_finite() {
        Ok(p)
    } else {
        Err(StefanError::DegenerateTriangle { triangle: t, area })
    }
}

fn assemble_matrix(mesh: &MappedMesh, element: fn([Point; 3]) -> [[f64; 3]; 3]) -> Result<CsrMatrix> {
    let mut triplets = Vec::with_capacity(9 * mesh.triangles().len());
    for (t, &tri) in mesh.triangles().iter().enumerate() {
        let local = element(checked_corners(mesh, t)?);
        for a in 0..3 {
            for b in 0..3 {
                triplets.push((tri[a], tri[b], local[a][b]));
            }
        }
    }
    Ok(CsrMatrix::from_triplets(mesh.vertex_count(), triplets))
}

/// `A_ij = (grad phi_i, grad phi_j)` with exact P1 element integrals.
pub fn assemble_stiffness(mesh: &MappedMesh) -> Result<CsrMatrix> {
    assemble_matrix(mesh, element_stiffness)
}

/// Consistent (not lumped) mass matrix `M_ij = (phi_i, phi_j)`.
pub fn assemble_mass(mesh: &MappedMesh) -> Result<CsrMatrix> {
    assemble_matrix(mesh, element_mass)
}

/// `f_j = (1, phi_j)`, a third of the area of each incident triangle.
pub fn assemble_load(mesh: &MappedMesh) -> Result<Vec<f64>> {
    let mut load = vec![0.0; mesh.vertex_count()];
    for (t, &tri) in mesh.triangles().iter().enumerate() {
        let local = element_load(checked_corners(mesh, t)?);
        for a in 0..3 {
            load[tri[a]] += local[a];
        }
    }
    Ok(load)
}
