use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use crate::fem::NodalField;
use crate::geometry::MappedMesh;
use crate::{Point, Result, StefanError};

/// Condition estimate above which the kernel matrix is regularized.
pub const CONDITION_LIMIT: f64 = 1e12;
/// Diagonal jitter relative to `trace(K) / n` used for ill-conditioned systems.
pub const JITTER: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelReport {
    /// `(max L_ii / min L_ii)^2` from the Cholesky factor; a lower bound on
    /// the spectral condition number.
    pub condition_estimate: f64,
    /// Diagonal shift that was added, 0 when none was needed.
    pub jitter: f64,
}

/// `exp(-|x - y|)`
pub fn exponential_kernel(x: Point, y: Point) -> f64 {
    (-(x[0] - y[0]).hypot(x[1] - y[1])).exp()
}

fn factor(points: &[Point], shift: f64) -> Option<(faer::linalg::solvers::Llt<f64>, f64)> {
    let n = points.len();
    let k = Mat::<f64>::from_fn(n, n, |i, j| {
        exponential_kernel(points[i], points[j]) + if i == j { shift } else { 0.0 }
    });
    let llt = k.llt(Side::Lower).ok()?;
    let l = llt.L();
    let (lo, hi) = (0..n).fold((f64::INFINITY, 0.0f64), |(lo, hi), i| {
        let d = l[(i, i)];
        (lo.min(d), hi.max(d))
    });
    Some((llt, (hi / lo).powi(2)))
}

/// Exponential-kernel interpolation of scattered data: solves `K w = values`
/// with `K_ij = k(old_i, old_j)` and evaluates `sum_i w_i k(new_j, old_i)`.
pub fn interpolate_scattered(old: &[Point], values: &[f64], new: &[Point]) -> Result<(Vec<f64>, KernelReport)> {
    if old.len() != values.len() {
        return Err(StefanError::InvalidInput(format!(
            "{} points but {} values",
            old.len(),
            values.len()
        )));
    }
    let n = old.len();
    let mut report = KernelReport {
        condition_estimate: 1.0,
        jitter: 0.0,
    };
    if values.iter().all(|&v| v == 0.0) {
        return Ok((vec![0.0; new.len()], report));
    }

    let (llt, condition) = match factor(old, 0.0) {
        Some((llt, condition)) if condition <= CONDITION_LIMIT => (llt, condition),
        first => {
            let condition = first.map_or(f64::INFINITY, |f| f.1);
            // trace(K) / n = 1 for this kernel
            let shift = JITTER;
            log::warn!("kernel matrix ill-conditioned (estimate {condition:e}), adding jitter {shift:e}");
            report.jitter = shift;
            factor(old, shift).ok_or(StefanError::KernelFactorization { condition })?
        }
    };
    report.condition_estimate = condition;

    let mut weights = Mat::<f64>::from_fn(n, 1, |i, _| values[i]);
    llt.solve_in_place(&mut weights);
    let out = new
        .iter()
        .map(|&y| (0..n).map(|i| weights[(i, 0)] * exponential_kernel(y, old[i])).sum())
        .collect();
    Ok((out, report))
}

/// Carries a field from one mapped mesh to another by kernel interpolation
/// and resets the boundary values of the new mesh to exactly zero.
pub fn kernel_interpolate(old: &MappedMesh, values: &NodalField, new: &MappedMesh) -> Result<NodalField> {
    let (mut out, _) = interpolate_scattered(old.vertices(), &values.values, new.vertices())?;
    for &b in new.boundary() {
        out[b] = 0.0;
    }
    Ok(NodalField {
        values: out,
        time_index: new.time_index(),
    })
}
