//! C ABI over `stefan-core`.
//!
//! Tubes and schedules cross the boundary as opaque handles that the caller
//! releases with the matching `*_free` function. Every function returns a
//! [`StefanStatus`]; on failure [`stefan_last_error`] describes the error of
//! the calling thread.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use stefan_core::forward::{simulate_forward, ForwardParams, InitialField, MeltingSchedule, MeshResolution, SchedulePreset, SpaceTimeTube};
use stefan_core::geometry::FourierBoundary;
use stefan_core::inverse::{add_noise, reconstruct_schedule, InverseParams, ObservedTube};
use stefan_core::io::{read_tube, write_schedule, write_tube, TubeNoise};
use stefan_core::StefanError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StefanStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    FoldedMesh = 3,
    NonPositiveRadius = 4,
    SolverFailure = 5,
    DegenerateSensitivity = 6,
    Io = 7,
    Parse = 8,
    Panic = 9,
}

/// Melting-temperature curve of a forward run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StefanPreset {
    /// `(t - 5/2)^2 / 20`
    Quadratic = 0,
    /// `(cos 2t - 1) / 20`
    Cosine = 1,
    /// Values supplied in `StefanForwardParams::um_values`.
    Custom = 2,
}

#[repr(C)]
pub struct StefanForwardParams {
    pub dt: f64,
    pub steps: usize,
    /// Fourier order `M`.
    pub order: usize,
    pub boundary_vertices: usize,
    pub rings: usize,
    /// `2M+1` coefficients `[a_{-M}, ..., a_M]` of the initial boundary.
    pub initial_coeffs: *const f64,
    /// A `StefanPreset` value.
    pub preset: i32,
    /// `steps + 1` values of `u_m` at `k dt`, read when `preset` is custom.
    pub um_values: *const f64,
}

#[repr(C)]
pub struct StefanInverseParams {
    pub order: usize,
    pub boundary_vertices: usize,
    pub rings: usize,
    /// `u_m(0)`.
    pub um0: f64,
}

/// Sequence of boundaries, optionally tagged with the noise that produced it.
pub struct StefanTube {
    tube: SpaceTimeTube,
    noise: Option<TubeNoise>,
}

/// Reconstructed melting temperature with per-step residuals.
pub struct StefanSchedule {
    schedule: MeltingSchedule,
    residuals: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &StefanError) -> StefanStatus {
    match e.root() {
        StefanError::InvalidInput(_) | StefanError::Config { .. } => StefanStatus::InvalidArgument,
        StefanError::FoldedMesh { .. } | StefanError::DegenerateTriangle { .. } => StefanStatus::FoldedMesh,
        StefanError::NonPositiveRadius { .. } => StefanStatus::NonPositiveRadius,
        StefanError::SolverDiverged { .. } | StefanError::KernelFactorization { .. } => StefanStatus::SolverFailure,
        StefanError::DegenerateSensitivity { .. } => StefanStatus::DegenerateSensitivity,
        StefanError::Io { .. } => StefanStatus::Io,
        StefanError::Parse { .. } => StefanStatus::Parse,
        StefanError::AtStep { .. } => unreachable!("root strips step annotations"),
    }
}

enum Failure {
    Null(&'static str),
    Invalid(String),
    Core(StefanError),
}

impl From<StefanError> for Failure {
    fn from(e: StefanError) -> Self {
        Failure::Core(e)
    }
}

/// Runs `f`, records any error for `stefan_last_error` and maps it to a
/// status. Panics are caught and reported as `Panic`.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> StefanStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            StefanStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            StefanStatus::NullPointer
        }
        Ok(Err(Failure::Invalid(message))) => {
            set_error(&message);
            StefanStatus::InvalidArgument
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {message}"));
            StefanStatus::Panic
        }
    }
}

unsafe fn non_null<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn path(p: *const c_char) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return Err(Failure::Null("path"));
    }
    let s = CStr::from_ptr(p).to_str().map_err(|_| Failure::Invalid("path is not valid UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

unsafe fn out_ptr<'a, T>(out: *mut *mut T) -> Result<&'a mut *mut T, Failure> {
    let out = out.as_mut().ok_or(Failure::Null("out"))?;
    *out = ptr::null_mut();
    Ok(out)
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn stefan_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Simulates the forward problem. On success `*out` owns a new tube with
/// `steps + 1` records.
#[no_mangle]
pub unsafe extern "C" fn stefan_forward(params: *const StefanForwardParams, out: *mut *mut StefanTube) -> StefanStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let p = non_null(params, "params")?;
        let coeffs = slice(p.initial_coeffs, 2 * p.order + 1, "initial_coeffs")?;
        let schedule = match p.preset {
            x if x == StefanPreset::Quadratic as i32 => SchedulePreset::Quadratic.schedule(p.dt, p.steps)?,
            x if x == StefanPreset::Cosine as i32 => SchedulePreset::Cosine.schedule(p.dt, p.steps)?,
            x if x == StefanPreset::Custom as i32 => {
                let values = slice(p.um_values, p.steps + 1, "um_values")?;
                MeltingSchedule::from_values(0.0, p.dt, values.to_vec())?
            }
            x => return Err(Failure::Invalid(format!("unknown preset {x}"))),
        };
        let params = ForwardParams {
            dt: p.dt,
            steps: p.steps,
            order: p.order,
            mesh: MeshResolution::new(p.boundary_vertices, p.rings),
            initial_boundary: FourierBoundary::new(coeffs.to_vec())?,
            initial_field: InitialField::Constant,
            schedule,
            record_fields: false,
        };
        let run = simulate_forward(&params)?;
        *out = Box::into_raw(Box::new(StefanTube {
            tube: run.tube,
            noise: None,
        }));
        Ok(())
    })
}

/// Builds a tube from `count` records of `2 * order + 1` coefficients each,
/// stored row by row, at times `t0 + k dt`.
#[no_mangle]
pub unsafe extern "C" fn stefan_tube_new(
    t0: f64,
    dt: f64,
    order: usize,
    count: usize,
    coeffs: *const f64,
    out: *mut *mut StefanTube,
) -> StefanStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let width = 2 * order + 1;
        let data = slice(coeffs, width * count, "coeffs")?;
        let boundaries = data
            .chunks(width)
            .map(|c| FourierBoundary::new(c.to_vec()))
            .collect::<Result<Vec<_>, _>>()?;
        let tube = SpaceTimeTube::from_boundaries(t0, dt, boundaries)?;
        *out = Box::into_raw(Box::new(StefanTube { tube, noise: None }));
        Ok(())
    })
}

/// Number of records, 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn stefan_tube_record_count(tube: *const StefanTube) -> usize {
    tube.as_ref().map_or(0, |t| t.tube.len())
}

/// Fourier order `M`, 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn stefan_tube_order(tube: *const StefanTube) -> usize {
    tube.as_ref().map_or(0, |t| t.tube.order())
}

/// Time step, NaN for a null handle.
#[no_mangle]
pub unsafe extern "C" fn stefan_tube_dt(tube: *const StefanTube) -> f64 {
    tube.as_ref().map_or(f64::NAN, |t| t.tube.dt())
}

/// Copies record `k`: its time to `*t` and its `2M+1` coefficients to
/// `coeffs`, which must hold `len >= 2M+1` values.
#[no_mangle]
pub unsafe extern "C" fn stefan_tube_record(tube: *const StefanTube, k: usize, t: *mut f64, coeffs: *mut f64, len: usize) -> StefanStatus {
    guard(|| {
        let tube = &non_null(tube, "tube")?.tube;
        if t.is_null() {
            return Err(Failure::Null("t"));
        }
        if coeffs.is_null() {
            return Err(Failure::Null("coeffs"));
        }
        let record = tube
            .records()
            .get(k)
            .ok_or_else(|| Failure::Invalid(format!("record {k} out of range (tube has {})", tube.len())))?;
        let src = record.boundary.coeffs();
        if len < src.len() {
            return Err(Failure::Invalid(format!("buffer holds {len} values, need {}", src.len())));
        }
        *t = record.t;
        std::slice::from_raw_parts_mut(coeffs, src.len()).copy_from_slice(src);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn stefan_tube_read(path_: *const c_char, out: *mut *mut StefanTube) -> StefanStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let (tube, noise) = read_tube(&path(path_)?)?;
        *out = Box::into_raw(Box::new(StefanTube { tube, noise }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn stefan_tube_write(tube: *const StefanTube, path_: *const c_char) -> StefanStatus {
    guard(|| {
        let tube = non_null(tube, "tube")?;
        write_tube(&path(path_)?, &tube.tube, tube.noise)?;
        Ok(())
    })
}

/// Adds Gaussian noise with standard deviation `delta * a_0` to every
/// coefficient of every record after the first.
#[no_mangle]
pub unsafe extern "C" fn stefan_tube_add_noise(tube: *const StefanTube, delta: f64, seed: u64, out: *mut *mut StefanTube) -> StefanStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let tube = non_null(tube, "tube")?;
        let noisy = add_noise(&tube.tube, delta, seed)?;
        *out = Box::into_raw(Box::new(StefanTube {
            tube: noisy.tube,
            noise: Some(TubeNoise { delta, seed }),
        }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn stefan_tube_free(tube: *mut StefanTube) {
    if !tube.is_null() {
        drop(Box::from_raw(tube));
    }
}

/// Recovers the melting temperature from `tube`.
#[no_mangle]
pub unsafe extern "C" fn stefan_reconstruct(
    tube: *const StefanTube,
    params: *const StefanInverseParams,
    out: *mut *mut StefanSchedule,
) -> StefanStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let tube = non_null(tube, "tube")?;
        let p = non_null(params, "params")?;
        let observed = ObservedTube {
            tube: tube.tube.clone(),
            noise_level: tube.noise.map_or(0.0, |n| n.delta),
            seed: tube.noise.map(|n| n.seed),
            source: "ffi".into(),
        };
        let params = InverseParams::new(p.order, MeshResolution::new(p.boundary_vertices, p.rings), p.um0);
        let rec = reconstruct_schedule(&observed, &params)?;
        *out = Box::into_raw(Box::new(StefanSchedule {
            schedule: rec.schedule,
            residuals: rec.residuals,
        }));
        Ok(())
    })
}

/// Number of grid points (steps + 1), 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn stefan_schedule_len(schedule: *const StefanSchedule) -> usize {
    schedule.as_ref().map_or(0, |s| s.schedule.values().len())
}

/// Copies the schedule into caller buffers of `len` points: grid times and
/// `u_m` values take `len` entries; slopes and residuals, one per interval,
/// take `len - 1`. Any output pointer may be null to skip it.
#[no_mangle]
pub unsafe extern "C" fn stefan_schedule_get(
    schedule: *const StefanSchedule,
    len: usize,
    times: *mut f64,
    values: *mut f64,
    slopes: *mut f64,
    residuals: *mut f64,
) -> StefanStatus {
    guard(|| {
        let s = non_null(schedule, "schedule")?;
        let n = s.schedule.values().len();
        if len != n {
            return Err(Failure::Invalid(format!("schedule has {n} points, buffers hold {len}")));
        }
        let copy = |dst: *mut f64, src: &[f64]| {
            if !dst.is_null() {
                std::slice::from_raw_parts_mut(dst, src.len()).copy_from_slice(src);
            }
        };
        copy(times, &s.schedule.times());
        copy(values, s.schedule.values());
        copy(slopes, s.schedule.slopes());
        copy(residuals, &s.residuals);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn stefan_schedule_write(schedule: *const StefanSchedule, path_: *const c_char) -> StefanStatus {
    guard(|| {
        let s = non_null(schedule, "schedule")?;
        write_schedule(&path(path_)?, &s.schedule)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn stefan_schedule_free(schedule: *mut StefanSchedule) {
    if !schedule.is_null() {
        drop(Box::from_raw(schedule));
    }
}
