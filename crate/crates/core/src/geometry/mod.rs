//! Star-shaped boundaries, the reference disc mesh and its mapped images.

mod boundary;
mod fourier;
mod mesh;

pub use boundary::{BoundaryNormal, FourierBoundary};
pub use fourier::{fit_fourier, sample_angles};
pub use mesh::{generate_reference_mesh, map_mesh, map_point, signed_area, MappedMesh, ReferenceMesh};
