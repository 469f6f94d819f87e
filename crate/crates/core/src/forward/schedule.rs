use serde::{Deserialize, Serialize};

use crate::{Result, StefanError};

/// Piecewise-linear melting temperature on a uniform grid `t_k = t_0 + k dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeltingSchedule {
    t0: f64,
    dt: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl MeltingSchedule {
    pub fn from_values(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        check_grid(dt, values.len())?;
        let slopes = values.windows(2).map(|w| (w[1] - w[0]) / dt).collect();
        Ok(Self { t0, dt, values, slopes })
    }

    /// Integrates per-interval slopes from the initial value.
    pub fn from_slopes(t0: f64, dt: f64, initial: f64, slopes: Vec<f64>) -> Result<Self> {
        check_grid(dt, slopes.len() + 1)?;
        let mut values = Vec::with_capacity(slopes.len() + 1);
        let mut sum = 0.0;
        values.push(initial);
        for s in &slopes {
            sum += s;
            values.push(initial + dt * sum);
        }
        Ok(Self { t0, dt, values, slopes })
    }

    /// Values and slopes as stored, without checking that they agree.
    pub fn from_parts(t0: f64, dt: f64, values: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        check_grid(dt, values.len())?;
        if slopes.len() + 1 != values.len() {
            return Err(StefanError::InvalidInput(format!(
                "{} values need {} slopes, got {}",
                values.len(),
                values.len() - 1,
                slopes.len()
            )));
        }
        Ok(Self { t0, dt, values, slopes })
    }

    /// Samples `u_m` at the grid times; slopes are the secants.
    pub fn sample(dt: f64, steps: usize, um: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_values(0.0, dt, (0..=steps).map(|k| um(k as f64 * dt)).collect())
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.slopes.len()
    }

    pub fn initial(&self) -> f64 {
        self.values[0]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.values.len()).map(|k| self.time(k)).collect()
    }
}

fn check_grid(dt: f64, points: usize) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(StefanError::InvalidInput(format!("time step must be positive, got {dt}")));
    }
    if points < 2 {
        return Err(StefanError::InvalidInput("schedule needs at least two breakpoints".into()));
    }
    Ok(())
}

/// The two melting-temperature curves used in the reference experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchedulePreset {
    /// `u_m(t) = (t - 5/2)^2 / 20`
    Quadratic,
    /// `u_m(t) = (cos 2t - 1) / 20`
    Cosine,
}

impl SchedulePreset {
    pub fn melting_temperature(self, t: f64) -> f64 {
        match self {
            SchedulePreset::Quadratic => (t - 2.5).powi(2) / 20.0,
            SchedulePreset::Cosine => ((2.0 * t).cos() - 1.0) / 20.0,
        }
    }

    pub fn rate(self, t: f64) -> f64 {
        match self {
            SchedulePreset::Quadratic => (t - 2.5) / 10.0,
            SchedulePreset::Cosine => -(2.0 * t).sin() / 10.0,
        }
    }

    pub fn schedule(self, dt: f64, steps: usize) -> Result<MeltingSchedule> {
        MeltingSchedule::sample(dt, steps, |t| self.melting_temperature(t))
    }

    pub fn name(self) -> &'static str {
        match self {
            SchedulePreset::Quadratic => "quadratic",
            SchedulePreset::Cosine => "cosine",
        }
    }
}

impl std::str::FromStr for SchedulePreset {
    type Err = StefanError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadratic" => Ok(SchedulePreset::Quadratic),
            "cosine" => Ok(SchedulePreset::Cosine),
            other => Err(StefanError::InvalidInput(format!(
                "unknown schedule preset `{other}` (expected quadratic or cosine)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slopes_are_secants() {
        let s = SchedulePreset::Quadratic.schedule(0.05, 100).unwrap();
        assert_eq!(s.steps(), 100);
        for k in 0..100 {
            let want = (s.values()[k + 1] - s.values()[k]) / 0.05;
            assert!((s.slopes()[k] - want).abs() < 1e-12);
        }
        // the quadratic's secant slope is its derivative at the midpoint
        assert!((s.slopes()[10] - SchedulePreset::Quadratic.rate(0.525)).abs() < 1e-12);
    }

    #[test]
    fn integration_inverts_differentiation() {
        let s = SchedulePreset::Cosine.schedule(0.05, 100).unwrap();
        let back = MeltingSchedule::from_slopes(0.0, 0.05, s.initial(), s.slopes().to_vec()).unwrap();
        for (a, b) in back.values().iter().zip(s.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(MeltingSchedule::from_values(0.0, 0.0, vec![0.0, 1.0]).is_err());
        assert!(MeltingSchedule::from_values(0.0, 0.1, vec![0.0]).is_err());
        assert!("linear".parse::<SchedulePreset>().is_err());
    }
}
