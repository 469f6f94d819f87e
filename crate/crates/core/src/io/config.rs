use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::forward::{random_star_boundary, ForwardParams, InitialField, MeltingSchedule, MeshResolution, SchedulePreset};
use crate::geometry::FourierBoundary;
use crate::inverse::InverseParams;
use crate::{Result, StefanError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Simulate the moving boundary and write the tube.
    #[default]
    Forward,
    /// Recover the melting temperature from a tube.
    Invert,
    /// Add seeded Gaussian noise to a tube.
    Perturb,
    /// Forward, perturb and invert, then compare against the prescribed schedule.
    Roundtrip,
    /// Roundtrip over several noise levels and seeds, with plot data.
    Study,
}

/// Initial boundary of the forward run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BoundarySpec {
    Circle { radius: f64 },
    /// Coefficients `[a_{-M}, ..., a_M]`, zero-padded or truncated to `M`.
    Coefficients { values: Vec<f64> },
    /// `a_0 = 1`, other coefficients uniform in `[-c/l^2, c/l^2]`.
    Random { amplitude: f64, seed: u64 },
}

impl Default for BoundarySpec {
    fn default() -> Self {
        BoundarySpec::Random {
            amplitude: 0.1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    #[serde(rename = "M")]
    pub order: usize,
    #[serde(rename = "L")]
    pub boundary_vertices: usize,
    pub rings: usize,
    pub initial: BoundarySpec,
    /// Initial `v_0` as `(rho, v)` pairs over the reference radius.
    pub profile: Option<Vec<[f64; 2]>>,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            order: 7,
            boundary_vertices: MeshResolution::COARSE.boundary_vertices,
            rings: MeshResolution::COARSE.rings,
            initial: BoundarySpec::default(),
            profile: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub dt: f64,
    #[serde(rename = "T")]
    pub final_time: f64,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self { dt: 0.05, final_time: 5.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    pub preset: Option<SchedulePreset>,
    /// `u_m` at `t_k = k dt`, used instead of a preset.
    pub samples: Option<Vec<f64>>,
    /// `u_m(0)` for the inverse problem; defaults to the prescribed value.
    pub um0: Option<f64>,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            preset: Some(SchedulePreset::Quadratic),
            samples: None,
            um0: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub delta: f64,
    pub seed: u64,
}

/// Discretization of the inverse solver; unset fields follow `geometry`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InverseConfig {
    #[serde(rename = "M")]
    pub order: Option<usize>,
    #[serde(rename = "L")]
    pub boundary_vertices: Option<usize>,
    pub rings: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub deltas: Vec<f64>,
    pub seeds: usize,
    /// Errors of `u_m` are measured on `[0, until]`.
    pub until: Option<f64>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            deltas: vec![0.0025, 0.005, 0.01, 0.02],
            seeds: 5,
            until: Some(4.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    /// Directory for artifacts without an explicit path.
    pub out: PathBuf,
    pub input_tube: Option<PathBuf>,
    pub output_tube: Option<PathBuf>,
    pub output_schedule: Option<PathBuf>,
    /// Field snapshots of forward runs are written here when set.
    pub snapshots: Option<PathBuf>,
}

impl Default for PathsConfig {
    fn default() -> Self {
        Self {
            out: PathBuf::from("."),
            input_tube: None,
            output_tube: None,
            output_schedule: None,
            snapshots: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub geometry: GeometryConfig,
    pub time: TimeConfig,
    pub schedule: ScheduleConfig,
    pub noise: NoiseConfig,
    pub inverse: InverseConfig,
    pub study: StudyConfig,
    pub paths: PathsConfig,
}

fn check(ok: bool, field: &str, message: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(StefanError::config(field, message()))
    }
}

fn check_mesh(prefix: &str, order: usize, l: usize, rings: usize) -> Result<()> {
    check(l > 2 * order + 1, &format!("{prefix}.L"), || {
        format!("{l} boundary vertices cannot resolve M={order} (need L > 2M+1)")
    })?;
    check(rings >= 2, &format!("{prefix}.rings"), || format!("need at least 2 rings, got {rings}"))?;
    check(4 * rings <= l, &format!("{prefix}.rings"), || {
        format!("{rings} rings need at least {} boundary vertices", 4 * rings)
    })
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| StefanError::config("<toml>", e.to_string().trim().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| StefanError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    /// Checks every field the selected mode uses and names the first bad one.
    pub fn validate(&self) -> Result<()> {
        let needs_forward = matches!(self.mode, Mode::Forward | Mode::Roundtrip | Mode::Study);
        let needs_inverse = matches!(self.mode, Mode::Invert | Mode::Roundtrip | Mode::Study);
        let needs_input = matches!(self.mode, Mode::Invert | Mode::Perturb);

        let t = &self.time;
        check(t.dt > 0.0 && t.dt.is_finite(), "time.dt", || format!("must be positive, got {}", t.dt))?;
        if needs_forward {
            check(t.final_time > 0.0 && t.final_time.is_finite(), "time.T", || {
                format!("must be positive, got {}", t.final_time)
            })?;
            self.steps()?;
            let g = &self.geometry;
            check_mesh("geometry", g.order, g.boundary_vertices, g.rings)?;
            match &g.initial {
                BoundarySpec::Circle { radius } => {
                    check(*radius > 0.0 && radius.is_finite(), "geometry.initial.radius", || {
                        format!("must be positive, got {radius}")
                    })?;
                }
                BoundarySpec::Coefficients { values } => {
                    check(values.len() % 2 == 1, "geometry.initial.values", || {
                        format!("need an odd number of coefficients, got {}", values.len())
                    })?;
                    let b = FourierBoundary::new(values.clone()).map_err(|e| StefanError::config("geometry.initial.values", e.to_string()))?;
                    b.with_order(g.order)
                        .check_positive(g.boundary_vertices.max(64))
                        .map_err(|e| StefanError::config("geometry.initial.values", e.to_string()))?;
                }
                BoundarySpec::Random { amplitude, .. } => {
                    // sum of 2 c / l^2 stays below 1 for c < 3 / pi^2
                    check((0.0..0.3).contains(amplitude), "geometry.initial.amplitude", || {
                        format!("must lie in [0, 0.3) to keep the radius positive, got {amplitude}")
                    })?;
                }
            }
            if let Some(profile) = &g.profile {
                InitialField::Radial(profile.iter().map(|p| (p[0], p[1])).collect())
                    .validate()
                    .map_err(|e| StefanError::config("geometry.profile", e.to_string()))?;
            }
            self.melting_schedule()?;
        }
        if needs_inverse {
            let (order, l, rings) = self.inverse_discretization();
            check_mesh("inverse", order, l, rings)?;
            if let Some(um0) = self.schedule.um0 {
                check(um0.is_finite(), "schedule.um0", || "must be finite".into())?;
            }
        }
        let n = &self.noise;
        check(n.delta >= 0.0 && n.delta.is_finite(), "noise.delta", || {
            format!("must be non-negative, got {}", n.delta)
        })?;
        if needs_input {
            check(self.paths.input_tube.is_some(), "paths.input_tube", || {
                "required in this mode".into()
            })?;
        }
        if self.mode == Mode::Study {
            let s = &self.study;
            check(!s.deltas.is_empty(), "study.deltas", || "must not be empty".into())?;
            check(s.deltas.iter().all(|d| *d >= 0.0 && d.is_finite()), "study.deltas", || {
                "noise levels must be non-negative".into()
            })?;
            check(s.seeds >= 1, "study.seeds", || "need at least one seed".into())?;
        }
        Ok(())
    }

    /// Number of time steps, `T / dt` rounded; `T` must be a multiple of `dt`.
    pub fn steps(&self) -> Result<usize> {
        let ratio = self.time.final_time / self.time.dt;
        let steps = ratio.round();
        check(steps >= 1.0 && (ratio - steps).abs() <= 1e-9 * ratio.max(1.0), "time.T", || {
            format!("must be a positive multiple of time.dt = {}", self.time.dt)
        })?;
        Ok(steps as usize)
    }

    pub fn melting_schedule(&self) -> Result<MeltingSchedule> {
        let steps = self.steps()?;
        match (&self.schedule.preset, &self.schedule.samples) {
            (_, Some(samples)) => {
                check(samples.len() == steps + 1, "schedule.samples", || {
                    format!("need T/dt + 1 = {} values, got {}", steps + 1, samples.len())
                })?;
                check(samples.iter().all(|x| x.is_finite()), "schedule.samples", || "values must be finite".into())?;
                MeltingSchedule::from_values(0.0, self.time.dt, samples.clone())
            }
            (Some(preset), None) => preset.schedule(self.time.dt, steps),
            (None, None) => Err(StefanError::config("schedule.preset", "either a preset or samples is required")),
        }
    }

    pub fn initial_boundary(&self) -> Result<FourierBoundary> {
        let order = self.geometry.order;
        Ok(match &self.geometry.initial {
            BoundarySpec::Circle { radius } => FourierBoundary::circle(order, *radius),
            BoundarySpec::Coefficients { values } => FourierBoundary::new(values.clone())
                .map_err(|e| StefanError::config("geometry.initial.values", e.to_string()))?
                .with_order(order),
            BoundarySpec::Random { amplitude, seed } => random_star_boundary(order, *amplitude, *seed),
        })
    }

    pub fn forward_params(&self) -> Result<ForwardParams> {
        let g = &self.geometry;
        let schedule = self.melting_schedule()?;
        Ok(ForwardParams {
            dt: self.time.dt,
            steps: schedule.steps(),
            order: g.order,
            mesh: MeshResolution::new(g.boundary_vertices, g.rings),
            initial_boundary: self.initial_boundary()?,
            initial_field: self.initial_field(),
            schedule,
            record_fields: self.paths.snapshots.is_some(),
        })
    }

    fn initial_field(&self) -> InitialField {
        match &self.geometry.profile {
            Some(p) => InitialField::Radial(p.iter().map(|p| (p[0], p[1])).collect()),
            None => InitialField::Constant,
        }
    }

    /// `(M, L, rings)` of the inverse solver.
    pub fn inverse_discretization(&self) -> (usize, usize, usize) {
        let (i, g) = (&self.inverse, &self.geometry);
        (
            i.order.unwrap_or(g.order),
            i.boundary_vertices.unwrap_or(g.boundary_vertices),
            i.rings.unwrap_or(g.rings),
        )
    }

    /// `u_m(0)` for the inverse solver: the explicit value, else 0 in
    /// `invert` mode and the prescribed value in the modes that compare
    /// against it.
    pub fn initial_melting_temperature(&self) -> f64 {
        if let Some(u) = self.schedule.um0 {
            return u;
        }
        if self.mode == Mode::Invert {
            return 0.0;
        }
        match (&self.schedule.samples, self.schedule.preset) {
            (Some(s), _) if !s.is_empty() => s[0],
            (_, Some(p)) => p.melting_temperature(0.0),
            _ => 0.0,
        }
    }

    pub fn inverse_params(&self) -> Result<InverseParams> {
        let (order, l, rings) = self.inverse_discretization();
        let mut p = InverseParams::new(order, MeshResolution::new(l, rings), self.initial_melting_temperature());
        p.initial_field = self.initial_field();
        Ok(p)
    }

    pub fn output_tube(&self, default_name: &str) -> PathBuf {
        self.paths.output_tube.clone().unwrap_or_else(|| self.paths.out.join(default_name))
    }

    pub fn output_schedule(&self) -> PathBuf {
        self.paths.output_schedule.clone().unwrap_or_else(|| self.paths.out.join("schedule.csv"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        RunConfig::default().validate().unwrap();
        let p = RunConfig::default().forward_params().unwrap();
        assert_eq!(p.steps, 100);
        p.validate().unwrap();
    }

    #[test]
    fn toml_round_trip_and_names() {
        let text = r#"
            mode = "roundtrip"
            [geometry]
            M = 14
            L = 256
            rings = 32
            initial = { kind = "circle", radius = 1.5 }
            [time]
            dt = 0.01
            T = 1.0
            [schedule]
            preset = "cosine"
            [noise]
            delta = 0.01
            seed = 4
            [inverse]
            M = 7
            L = 128
        "#;
        let c = RunConfig::from_toml(text).unwrap();
        assert_eq!(c.mode, Mode::Roundtrip);
        assert_eq!(c.geometry.order, 14);
        assert_eq!(c.inverse_discretization(), (7, 128, 32));
        assert_eq!(c.steps().unwrap(), 100);
        c.validate().unwrap();
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("[time]\ndelta_t = 0.1\n").is_err());
        assert!(RunConfig::from_toml("mode = \"sideways\"\n").is_err());
    }

    #[test]
    fn validation_names_the_field() {
        type Edit = fn(&mut RunConfig);
        let cases: &[(&str, Edit)] = &[
            ("time.dt", |c| c.time.dt = 0.0),
            ("time.dt", |c| c.time.dt = f64::NAN),
            ("time.T", |c| c.time.final_time = -1.0),
            ("time.T", |c| c.time.final_time = 0.123),
            ("geometry.L", |c| c.geometry.order = 64),
            ("geometry.rings", |c| c.geometry.rings = 1),
            ("geometry.rings", |c| c.geometry.rings = 40),
            ("geometry.initial.radius", |c| c.geometry.initial = BoundarySpec::Circle { radius: 0.0 }),
            ("geometry.initial.values", |c| {
                c.geometry.initial = BoundarySpec::Coefficients { values: vec![1.0, 1.0] }
            }),
            ("geometry.initial.values", |c| {
                c.geometry.initial = BoundarySpec::Coefficients { values: vec![0.0, -0.5, 0.0] }
            }),
            ("geometry.initial.amplitude", |c| {
                c.geometry.initial = BoundarySpec::Random { amplitude: 0.5, seed: 0 }
            }),
            ("geometry.profile", |c| c.geometry.profile = Some(vec![[0.0, 1.0], [1.0, 1.0]])),
            ("schedule.samples", |c| c.schedule.samples = Some(vec![0.0; 3])),
            ("schedule.preset", |c| c.schedule.preset = None),
            ("noise.delta", |c| c.noise.delta = -0.01),
            ("inverse.L", |c| {
                c.mode = Mode::Roundtrip;
                c.inverse.order = Some(70)
            }),
            ("inverse.rings", |c| {
                c.mode = Mode::Roundtrip;
                c.inverse.rings = Some(33)
            }),
            ("paths.input_tube", |c| c.mode = Mode::Invert),
            ("paths.input_tube", |c| c.mode = Mode::Perturb),
            ("schedule.um0", |c| {
                c.mode = Mode::Invert;
                c.paths.input_tube = Some("t.csv".into());
                c.schedule.um0 = Some(f64::INFINITY)
            }),
            ("study.deltas", |c| {
                c.mode = Mode::Study;
                c.study.deltas.clear()
            }),
            ("study.seeds", |c| {
                c.mode = Mode::Study;
                c.study.seeds = 0
            }),
        ];
        for (field, edit) in cases {
            let mut c = RunConfig::default();
            edit(&mut c);
            match c.validate() {
                Err(StefanError::Config { field: got, .. }) => assert_eq!(&got, field),
                other => panic!("expected error on {field}, got {other:?}"),
            }
        }
    }

    #[test]
    fn um0_follows_the_schedule() {
        let mut c = RunConfig::default();
        c.mode = Mode::Roundtrip;
        assert_eq!(c.initial_melting_temperature(), 0.3125);
        c.mode = Mode::Invert;
        assert_eq!(c.initial_melting_temperature(), 0.0);
        c.schedule.um0 = Some(1.0);
        assert_eq!(c.initial_melting_temperature(), 1.0);
    }
}
