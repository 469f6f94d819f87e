//! Plain-text, comma-separated artifact formats.
//!
//! Every file starts with a one-line header. Numbers are written with 17
//! significant digits so a read after a write returns the same `f64`s.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::forward::{FieldSnapshot, MeltingSchedule, SpaceTimeTube, TubeRecord};
use crate::geometry::FourierBoundary;
use crate::{Result, StefanError};

pub const TUBE_MAGIC: &str = "# stefan-tube v1";
pub const SCHEDULE_MAGIC: &str = "# stefan-schedule v1";
pub const RESIDUALS_MAGIC: &str = "# stefan-residuals v1";

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StefanError + '_ {
    move |source| StefanError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> StefanError {
    StefanError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Writes to a sibling temporary file and renames it over `path`.
pub fn atomic_write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_err(path)(e)
    })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(io_err(path))
}

/// `key=value` pairs after the magic prefix of a header line.
fn header_fields<'a>(path: &Path, line: &'a str, magic: &str) -> Result<Vec<(&'a str, &'a str)>> {
    let rest = line
        .strip_prefix(magic)
        .ok_or_else(|| parse_err(path, 1, format!("expected header starting with `{magic}`")))?;
    rest.split(',')
        .map(str::trim)
        .filter(|f| !f.is_empty())
        .map(|f| f.split_once('=').ok_or_else(|| parse_err(path, 1, format!("malformed header field `{f}`"))))
        .collect()
}

fn header_value<T: std::str::FromStr>(path: &Path, fields: &[(&str, &str)], key: &str) -> Result<Option<T>> {
    match fields.iter().find(|(k, _)| k.trim() == key) {
        None => Ok(None),
        Some((_, v)) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| parse_err(path, 1, format!("bad value `{v}` for `{key}`"))),
    }
}

fn parse_row(path: &Path, line_no: usize, line: &str) -> Result<Vec<f64>> {
    line.split(',')
        .map(|f| {
            let f = f.trim();
            f.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| parse_err(path, line_no, format!("not a finite number: `{f}`")))
        })
        .collect()
}

/// Data lines with their 1-based line numbers, skipping blanks.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .skip(1)
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Noise provenance carried in the tube header.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TubeNoise {
    pub delta: f64,
    pub seed: u64,
}

pub fn format_tube(tube: &SpaceTimeTube, noise: Option<TubeNoise>) -> String {
    let mut out = format!("{TUBE_MAGIC}, M={}, dt={}", tube.order(), tube.dt());
    if let Some(n) = noise {
        let _ = write!(out, ", delta={}, seed={}", n.delta, n.seed);
    }
    out.push('\n');
    for r in tube.records() {
        out.push_str(&num(r.t));
        for &a in r.boundary.coeffs() {
            out.push_str(", ");
            out.push_str(&num(a));
        }
        out.push('\n');
    }
    out
}

pub fn write_tube(path: &Path, tube: &SpaceTimeTube, noise: Option<TubeNoise>) -> Result<()> {
    atomic_write(path, &format_tube(tube, noise))
}

pub fn read_tube(path: &Path) -> Result<(SpaceTimeTube, Option<TubeNoise>)> {
    parse_tube(path, &read(path)?)
}

pub fn parse_tube(path: &Path, text: &str) -> Result<(SpaceTimeTube, Option<TubeNoise>)> {
    let header = text.lines().next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let fields = header_fields(path, header, TUBE_MAGIC)?;
    let order: usize = header_value(path, &fields, "M")?.ok_or_else(|| parse_err(path, 1, "header lacks `M`"))?;
    let dt: f64 = header_value(path, &fields, "dt")?.ok_or_else(|| parse_err(path, 1, "header lacks `dt`"))?;
    let noise = match (header_value(path, &fields, "delta")?, header_value(path, &fields, "seed")?) {
        (Some(delta), Some(seed)) => Some(TubeNoise { delta, seed }),
        (None, None) => None,
        _ => return Err(parse_err(path, 1, "`delta` and `seed` must appear together")),
    };

    let width = 2 * order + 2;
    let mut records: Vec<TubeRecord> = Vec::new();
    for (line_no, line) in data_lines(text) {
        let row = parse_row(path, line_no, line)?;
        if row.len() != width {
            return Err(parse_err(
                path,
                line_no,
                format!("expected {width} columns for M={order}, found {}", row.len()),
            ));
        }
        if let Some(prev) = records.last() {
            if !(row[0] > prev.t) {
                return Err(parse_err(path, line_no, "times must be strictly increasing"));
            }
        }
        let boundary = FourierBoundary::new(row[1..].to_vec()).map_err(|e| parse_err(path, line_no, e.to_string()))?;
        records.push(TubeRecord { t: row[0], boundary });
    }
    let tube = SpaceTimeTube::from_records(dt, records).map_err(|e| parse_err(path, 1, e.to_string()))?;
    Ok((tube, noise))
}

/// Row `k` holds `t_k`, `u_m(t_k)` and the slope on `[t_k, t_{k+1}]`; the
/// last row repeats the final slope. The header also records `dt` so the
/// grid survives a round trip exactly.
pub fn format_schedule(schedule: &MeltingSchedule) -> String {
    let mut out = format!("{SCHEDULE_MAGIC}, um0={}, dt={}\n", schedule.initial(), schedule.dt());
    let slopes = schedule.slopes();
    for (k, &u) in schedule.values().iter().enumerate() {
        let du = slopes[k.min(slopes.len() - 1)];
        let _ = writeln!(out, "{}, {}, {}", num(schedule.time(k)), num(u), num(du));
    }
    out
}

pub fn write_schedule(path: &Path, schedule: &MeltingSchedule) -> Result<()> {
    atomic_write(path, &format_schedule(schedule))
}

pub fn read_schedule(path: &Path) -> Result<MeltingSchedule> {
    parse_schedule(path, &read(path)?)
}

pub fn parse_schedule(path: &Path, text: &str) -> Result<MeltingSchedule> {
    let header = text.lines().next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let fields = header_fields(path, header, SCHEDULE_MAGIC)?;
    let um0: f64 = header_value(path, &fields, "um0")?.ok_or_else(|| parse_err(path, 1, "header lacks `um0`"))?;
    let mut rows: Vec<[f64; 3]> = Vec::new();
    for (line_no, line) in data_lines(text) {
        let row = parse_row(path, line_no, line)?;
        let [t, u, du] = row[..] else {
            return Err(parse_err(path, line_no, format!("expected 3 columns, found {}", row.len())));
        };
        if let Some(prev) = rows.last() {
            if !(t > prev[0]) {
                return Err(parse_err(path, line_no, "times must be strictly increasing"));
            }
        }
        rows.push([t, u, du]);
    }
    if rows.len() < 2 {
        return Err(parse_err(path, 1, "schedule needs at least two rows"));
    }
    if rows[0][1] != um0 {
        return Err(parse_err(path, 2, format!("first value {} disagrees with header um0={um0}", rows[0][1])));
    }
    let dt: f64 = header_value(path, &fields, "dt")?.unwrap_or(rows[1][0] - rows[0][0]);
    let t0 = rows[0][0];
    for (k, r) in rows.iter().enumerate() {
        if (r[0] - (t0 + k as f64 * dt)).abs() > 1e-9 * r[0].abs().max(1.0) {
            return Err(parse_err(path, k + 2, "times are not on a uniform grid"));
        }
    }
    let values = rows.iter().map(|r| r[1]).collect();
    let slopes = rows[..rows.len() - 1].iter().map(|r| r[2]).collect();
    MeltingSchedule::from_parts(t0, dt, values, slopes).map_err(|e| parse_err(path, 1, e.to_string()))
}

/// Per-step residuals of a reconstruction: `k, t_k, alpha_k, residual_k`.
pub fn write_residuals(path: &Path, schedule: &MeltingSchedule, residuals: &[f64]) -> Result<()> {
    let mut out = format!("{RESIDUALS_MAGIC}\n");
    for (k, (a, r)) in schedule.slopes().iter().zip(residuals).enumerate() {
        let _ = writeln!(out, "{k}, {}, {}, {}", num(schedule.time(k)), num(*a), num(*r));
    }
    atomic_write(path, &out)
}

/// One snapshot: a `t=<t>` line followed by `x, y, v` rows.
pub fn format_snapshot(snapshot: &FieldSnapshot) -> String {
    let mut out = format!("t={}\n", snapshot.t);
    for (p, v) in snapshot.vertices.iter().zip(&snapshot.values) {
        let _ = writeln!(out, "{}, {}, {}", num(p[0]), num(p[1]), num(*v));
    }
    out
}

/// Writes `field_<k>.csv` for every snapshot into `dir`.
pub fn write_snapshots(dir: &Path, snapshots: &[FieldSnapshot]) -> Result<Vec<PathBuf>> {
    snapshots
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let path = dir.join(format!("field_{k:04}.csv"));
            atomic_write(&path, &format_snapshot(s))?;
            Ok(path)
        })
        .collect()
}

pub fn read_snapshot(path: &Path) -> Result<FieldSnapshot> {
    let text = read(path)?;
    let header = text.lines().next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let t = header
        .trim()
        .strip_prefix("t=")
        .and_then(|t| t.parse::<f64>().ok())
        .ok_or_else(|| parse_err(path, 1, "expected `t=<time>` header"))?;
    let mut vertices = Vec::new();
    let mut values = Vec::new();
    for (line_no, line) in data_lines(&text) {
        let row = parse_row(path, line_no, line)?;
        let [x, y, v] = row[..] else {
            return Err(parse_err(path, line_no, format!("expected 3 columns, found {}", row.len())));
        };
        vertices.push([x, y]);
        values.push(v);
    }
    Ok(FieldSnapshot { t, vertices, values })
}
