use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::Arc;

use super::FourierBoundary;
use crate::{Point, Result, StefanError};

/// Triangulation of the closed unit disc.
///
/// Vertex 0 is the center, followed by the concentric rings from the inside
/// out. The last ring is the boundary; its vertices sit at the angles
/// `2 pi i / L`, counterclockwise from angle 0.
#[derive(Debug, Clone)]
pub struct ReferenceMesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<usize>,
    ring_counts: Vec<usize>,
    on_boundary: Vec<bool>,
}

/// Image of a [`ReferenceMesh`] under the radial map of a boundary.
#[derive(Debug, Clone)]
pub struct MappedMesh {
    reference: Arc<ReferenceMesh>,
    vertices: Vec<Point>,
    source: FourierBoundary,
    time_index: usize,
}

pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

/// Builds the concentric-ring disc mesh.
///
/// Ring `j` of `rings` sits at radius `j / rings` and carries about
/// `L j / rings` equidistant vertices (at least 3); the outermost ring has
/// exactly `L`. Neighbouring rings are stitched by merging their vertices in
/// angular order, so whenever `rings` divides `L` the mesh is invariant under
/// rotation by `2 pi rings / L`.
pub fn generate_reference_mesh(boundary_vertices: usize, rings: usize) -> Result<ReferenceMesh> {
    if boundary_vertices < 8 {
        return Err(StefanError::InvalidInput(format!(
            "need at least 8 boundary vertices, got {boundary_vertices}"
        )));
    }
    if rings < 2 {
        return Err(StefanError::InvalidInput(format!(
            "need at least 2 rings, got {rings}"
        )));
    }
    if 4 * rings > boundary_vertices {
        // coarser inner rings poke through the chords of the next ring
        return Err(StefanError::InvalidInput(format!(
            "{rings} rings need at least {} boundary vertices",
            4 * rings
        )));
    }

    let ring_counts: Vec<usize> = (1..=rings)
        .map(|j| {
            if j == rings {
                boundary_vertices
            } else {
                let n = (boundary_vertices as f64 * j as f64 / rings as f64).round() as usize;
                n.max(3)
            }
        })
        .collect();

    let mut vertices = vec![[0.0, 0.0]];
    let mut ring_start = Vec::with_capacity(rings);
    for (j, &n) in ring_counts.iter().enumerate() {
        ring_start.push(vertices.len());
        let rho = (j + 1) as f64 / rings as f64;
        for i in 0..n {
            let (s, c) = (TAU * i as f64 / n as f64).sin_cos();
            vertices.push([rho * c, rho * s]);
        }
    }

    let mut triangles = Vec::new();
    let n1 = ring_counts[0];
    for i in 0..n1 {
        triangles.push([0, ring_start[0] + i, ring_start[0] + (i + 1) % n1]);
    }
    for j in 0..rings - 1 {
        stitch(
            (ring_start[j], ring_counts[j]),
            (ring_start[j + 1], ring_counts[j + 1]),
            &mut triangles,
        );
    }

    let first = ring_start[rings - 1];
    let boundary: Vec<usize> = (first..first + boundary_vertices).collect();
    let mut on_boundary = vec![false; vertices.len()];
    for &b in &boundary {
        on_boundary[b] = true;
    }
    Ok(ReferenceMesh {
        vertices,
        triangles,
        boundary,
        ring_counts,
        on_boundary,
    })
}

fn stitch(inner: (usize, usize), outer: (usize, usize), triangles: &mut Vec<[usize; 3]>) {
    let (si, ni) = inner;
    let (so, no) = outer;
    let (mut a, mut b) = (0, 0);
    while a < ni || b < no {
        // advance on the ring whose next vertex has the smaller angle,
        // (b+1)/no <= (a+1)/ni compared exactly in integers
        let take_outer = a == ni || (b < no && (b + 1) * ni <= (a + 1) * no);
        if take_outer {
            triangles.push([si + a % ni, so + b, so + (b + 1) % no]);
            b += 1;
        } else {
            triangles.push([si + a, so + b % no, si + (a + 1) % ni]);
            a += 1;
        }
    }
}

impl ReferenceMesh {
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn ring_counts(&self) -> &[usize] {
        &self.ring_counts
    }

    pub fn is_boundary(&self, vertex: usize) -> bool {
        self.on_boundary[vertex]
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.on_boundary
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary.len()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        edge_usage(&self.triangles).len()
    }

    /// Checks the structural invariants: boundary on the unit circle at the
    /// equidistant angles, positively oriented triangles, every interior edge
    /// shared by two triangles and every boundary edge by one.
    pub fn validate(&self) -> Result<()> {
        let l = self.boundary.len();
        for (i, &v) in self.boundary.iter().enumerate() {
            let p = self.vertices[v];
            let phi = TAU * i as f64 / l as f64;
            if (p[0] - phi.cos()).abs() > 1e-12 || (p[1] - phi.sin()).abs() > 1e-12 {
                return Err(StefanError::InvalidInput(format!(
                    "boundary vertex {i} is not at angle 2 pi {i}/{l}"
                )));
            }
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            let area = signed_area(self.vertices[tri[0]], self.vertices[tri[1]], self.vertices[tri[2]]);
            if area <= 0.0 {
                return Err(StefanError::FoldedMesh { triangle: t, area });
            }
        }
        let usage = edge_usage(&self.triangles);
        for (&(a, b), &count) in &usage {
            let boundary_edge = self.on_boundary[a] && self.on_boundary[b] && {
                let (ia, ib) = (a - self.boundary[0], b - self.boundary[0]);
                (ia + 1) % l == ib || (ib + 1) % l == ia
            };
            let want = if boundary_edge { 1 } else { 2 };
            if count != want {
                return Err(StefanError::InvalidInput(format!(
                    "edge ({a}, {b}) used by {count} triangles, expected {want}"
                )));
            }
        }
        Ok(())
    }
}

fn edge_usage(triangles: &[[usize; 3]]) -> HashMap<(usize, usize), usize> {
    let mut usage = HashMap::new();
    for tri in triangles {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            *usage.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    usage
}

/// Radial map of the unit disc onto the domain bounded by `boundary`:
/// `x -> r(angle of x) x`, with the origin fixed.
pub fn map_point(boundary: &FourierBoundary, x: Point) -> Point {
    if x[0] == 0.0 && x[1] == 0.0 {
        return [0.0, 0.0];
    }
    let r = boundary.radius(x[1].atan2(x[0]));
    [r * x[0], r * x[1]]
}

/// Maps every reference vertex onto the domain bounded by `boundary`.
///
/// Fails with [`StefanError::NonPositiveRadius`] if the boundary radius is not
/// positive at the mesh angles and with [`StefanError::FoldedMesh`] if a mapped
/// triangle is inverted.
pub fn map_mesh(
    boundary: &FourierBoundary,
    reference: &Arc<ReferenceMesh>,
    time_index: usize,
) -> Result<MappedMesh> {
    boundary.check_positive(reference.boundary_count())?;
    let vertices: Vec<Point> = reference
        .vertices
        .iter()
        .map(|&x| map_point(boundary, x))
        .collect();
    for (t, tri) in reference.triangles.iter().enumerate() {
        let area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
        if area <= 0.0 {
            return Err(StefanError::FoldedMesh { triangle: t, area });
        }
    }
    Ok(MappedMesh {
        reference: Arc::clone(reference),
        vertices,
        source: boundary.clone(),
        time_index,
    })
}

impl MappedMesh {
    pub fn reference(&self) -> &Arc<ReferenceMesh> {
        &self.reference
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.reference.triangles
    }

    pub fn boundary(&self) -> &[usize] {
        &self.reference.boundary
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.reference.on_boundary
    }

    pub fn source(&self) -> &FourierBoundary {
        &self.source
    }

    pub fn time_index(&self) -> usize {
        self.time_index
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn boundary_count(&self) -> usize {
        self.reference.boundary.len()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let tri = self.reference.triangles[t];
        signed_area(self.vertices[tri[0]], self.vertices[tri[1]], self.vertices[tri[2]])
    }

    pub fn area(&self) -> f64 {
        (0..self.reference.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// A mesh with the same topology and arbitrary vertex positions. Used to
    /// build meshes that do not come from a boundary map (rotations, tests).
    pub fn with_vertices(&self, vertices: Vec<Point>) -> Self {
        assert_eq!(vertices.len(), self.vertices.len());
        Self {
            vertices,
            ..self.clone()
        }
    }
}
