//! Plot data: boundary polylines of a tube and melting-temperature series.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::forward::{MeltingSchedule, SpaceTimeTube};
use crate::geometry::sample_angles;
use crate::Result;

use super::formats::atomic_write;

/// A named schedule, e.g. one reconstruction per noise level or the truth.
#[derive(Debug, Clone)]
pub struct PlotSeries {
    pub label: String,
    pub schedule: MeltingSchedule,
}

/// Writes into `dir`:
///
/// - `boundaries.csv` with rows `k, t, phi, x, y`, every record sampled at
///   `samples` equidistant angles,
/// - `boundaries.svg` with one closed polyline per record,
/// - `series_<label>.csv` with rows `t, du_m, u_m` for every series (the slope
///   column holds the slope of the interval starting at `t`; the last row
///   repeats it).
pub fn export_plot_data(dir: &Path, tube: &SpaceTimeTube, samples: usize, series: &[PlotSeries]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let angles = sample_angles(samples);

    let mut csv = String::from("k, t, phi, x, y\n");
    for (k, r) in tube.records().iter().enumerate() {
        for &phi in &angles {
            let p = r.boundary.point(phi);
            let _ = writeln!(csv, "{k}, {:.16e}, {:.16e}, {:.16e}, {:.16e}", r.t, phi, p[0], p[1]);
        }
    }
    let path = dir.join("boundaries.csv");
    atomic_write(&path, &csv)?;
    written.push(path);

    let path = dir.join("boundaries.svg");
    atomic_write(&path, &boundary_svg(tube, &angles))?;
    written.push(path);

    for s in series {
        let mut csv = String::from("t, du_m, u_m\n");
        let slopes = s.schedule.slopes();
        for (k, u) in s.schedule.values().iter().enumerate() {
            let du = slopes[k.min(slopes.len() - 1)];
            let _ = writeln!(csv, "{:.16e}, {:.16e}, {:.16e}", s.schedule.time(k), du, u);
        }
        let path = dir.join(format!("series_{}.csv", sanitize(&s.label)));
        atomic_write(&path, &csv)?;
        written.push(path);
    }
    Ok(written)
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' })
        .collect()
}

/// Boundaries drawn from light (early) to dark (late) grey.
fn boundary_svg(tube: &SpaceTimeTube, angles: &[f64]) -> String {
    let extent = tube
        .records()
        .iter()
        .flat_map(|r| angles.iter().map(move |&phi| r.boundary.radius(phi)))
        .fold(0.0f64, f64::max)
        * 1.05;
    let size = 400.0;
    let scale = size / (2.0 * extent);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    );
    let n = tube.len().max(2) - 1;
    for (k, r) in tube.records().iter().enumerate() {
        let grey = 200 - (170 * k / n) as u32;
        let points: Vec<String> = angles
            .iter()
            .map(|&phi| {
                let p = r.boundary.point(phi);
                format!("{:.3},{:.3}", size / 2.0 + scale * p[0], size / 2.0 - scale * p[1])
            })
            .collect();
        let _ = writeln!(
            out,
            "  <polygon points=\"{}\" fill=\"none\" stroke=\"rgb({grey},{grey},{grey})\" stroke-width=\"0.8\"/>",
            points.join(" ")
        );
    }
    out.push_str("</svg>\n");
    out
}
