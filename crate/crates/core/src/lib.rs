//! Forward and inverse solvers for the two-dimensional one-phase Stefan
//! problem with a melting temperature that varies in time.
//!
//! The liquid region is a star-shaped domain whose boundary is a truncated
//! Fourier series in the polar angle. Each time slice solves the shifted heat
//! equation `v = u - u_m` with P1 finite elements on a mesh of the unit disc
//! mapped onto the current domain, moves the boundary radially according to
//! the Stefan condition, refits the boundary by FFT truncation and carries the
//! temperature over to the new mesh by exponential-kernel interpolation.
//!
//! The inverse solver recovers the slope of the melting temperature on every
//! time interval from an observed sequence of boundaries by a scalar least
//! squares fit, and integrates the slopes into the melting-temperature curve.

pub mod error;
pub mod fem;
pub mod forward;
pub mod geometry;
pub mod inverse;
pub mod io;

pub use error::{Result, StefanError};

/// A point in the plane.
pub type Point = [f64; 2];
