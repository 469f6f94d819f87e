use std::f64::consts::TAU;

use crate::{Point, Result, StefanError};

/// Boundary of a star-shaped domain given by a truncated Fourier series of
/// the radius over the polar angle,
///
/// ```text
/// r(phi) = a_0 + sum_{l=1..M} [ a_l cos(l phi) + a_{-l} sin(l phi) ]
/// ```
///
/// Coefficients are stored as `[a_{-M}, ..., a_{-1}, a_0, a_1, ..., a_M]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierBoundary {
    coeffs: Vec<f64>,
}

/// Outward unit normal at a boundary point together with the factor
/// `<n, x_hat>` that converts normal speed into radial speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNormal {
    pub normal: Point,
    pub radial_factor: f64,
}

impl FourierBoundary {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(StefanError::InvalidInput(format!(
                "boundary needs an odd number of coefficients, got {}",
                coeffs.len()
            )));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(StefanError::InvalidInput(format!(
                "boundary coefficient {i} is not finite"
            )));
        }
        Ok(Self { coeffs })
    }

    pub fn circle(order: usize, radius: f64) -> Self {
        let mut coeffs = vec![0.0; 2 * order + 1];
        coeffs[order] = radius;
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        (self.coeffs.len() - 1) / 2
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Coefficient `a_l` for `-M <= l <= M`.
    pub fn coeff(&self, l: isize) -> f64 {
        let m = self.order() as isize;
        assert!(l.abs() <= m, "mode {l} outside order {m}");
        self.coeffs[(m + l) as usize]
    }

    pub fn set_coeff(&mut self, l: isize, value: f64) {
        let m = self.order() as isize;
        assert!(l.abs() <= m, "mode {l} outside order {m}");
        self.coeffs[(m + l) as usize] = value;
    }

    pub fn mean_radius(&self) -> f64 {
        self.coeff(0)
    }

    pub fn radius(&self, phi: f64) -> f64 {
        let m = self.order();
        let mut r = self.coeffs[m];
        for l in 1..=m {
            let (s, c) = (l as f64 * phi).sin_cos();
            r += self.coeffs[m + l] * c + self.coeffs[m - l] * s;
        }
        r
    }

    /// Derivative of the radius with respect to the angle.
    pub fn radius_derivative(&self, phi: f64) -> f64 {
        let m = self.order();
        let mut dr = 0.0;
        for l in 1..=m {
            let lf = l as f64;
            let (s, c) = (lf * phi).sin_cos();
            dr += lf * (self.coeffs[m - l] * c - self.coeffs[m + l] * s);
        }
        dr
    }

    pub fn point(&self, phi: f64) -> Point {
        let r = self.radius(phi);
        [r * phi.cos(), r * phi.sin()]
    }

    pub fn normal(&self, phi: f64) -> Result<BoundaryNormal> {
        let r = self.radius(phi);
        if r <= 0.0 {
            return Err(StefanError::NonPositiveRadius {
                index: 0,
                radius: r,
            });
        }
        let dr = self.radius_derivative(phi);
        let norm = r.hypot(dr);
        let (s, c) = phi.sin_cos();
        // (r e_r - r' e_phi) / |.|
        let normal = [(r * c + dr * s) / norm, (r * s - dr * c) / norm];
        Ok(BoundaryNormal {
            normal,
            radial_factor: r / norm,
        })
    }

    /// Radii at the `count` equidistant angles `2 pi i / count`.
    pub fn sample_radii(&self, count: usize) -> Vec<f64> {
        (0..count)
            .map(|i| self.radius(TAU * i as f64 / count as f64))
            .collect()
    }

    /// Checks `r > 0` at `count` equidistant angles.
    pub fn check_positive(&self, count: usize) -> Result<()> {
        for (index, radius) in self.sample_radii(count).into_iter().enumerate() {
            if !(radius > 0.0) {
                return Err(StefanError::NonPositiveRadius { index, radius });
            }
        }
        Ok(())
    }

    /// Same curve rotated counterclockwise by `theta`.
    pub fn rotated(&self, theta: f64) -> Self {
        let m = self.order();
        let mut out = self.clone();
        for l in 1..=m {
            let (s, c) = (l as f64 * theta).sin_cos();
            let (a, b) = (self.coeffs[m + l], self.coeffs[m - l]);
            out.coeffs[m + l] = a * c - b * s;
            out.coeffs[m - l] = b * c + a * s;
        }
        out
    }

    /// Truncates or zero-pads to a new order.
    pub fn with_order(&self, order: usize) -> Self {
        let m = self.order();
        let mut out = Self::circle(order, 0.0);
        for l in -(order.min(m) as isize)..=(order.min(m) as isize) {
            out.set_coeff(l, self.coeff(l));
        }
        out
    }

    /// Energy of the non-mean modes, `sum_{l != 0} a_l^2`.
    pub fn shape_energy(&self) -> f64 {
        let m = self.order();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != m)
            .map(|(_, a)| a * a)
            .sum()
    }

    /// Enclosed area, `pi a_0^2 + pi/2 sum_{l != 0} a_l^2`.
    pub fn area(&self) -> f64 {
        let a0 = self.mean_radius();
        std::f64::consts::PI * (a0 * a0 + 0.5 * self.shape_energy())
    }
}
