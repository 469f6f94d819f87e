use crate::geometry::FourierBoundary;
use crate::{Result, StefanError};

#[derive(Debug, Clone, PartialEq)]
pub struct TubeRecord {
    pub t: f64,
    pub boundary: FourierBoundary,
}

/// Time-ordered domain boundaries on a uniform grid, all of the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeTube {
    dt: f64,
    order: usize,
    records: Vec<TubeRecord>,
}

impl SpaceTimeTube {
    /// Boundaries at `t_k = t0 + k dt`.
    pub fn from_boundaries(t0: f64, dt: f64, boundaries: Vec<FourierBoundary>) -> Result<Self> {
        let records = boundaries
            .into_iter()
            .enumerate()
            .map(|(k, boundary)| TubeRecord {
                t: t0 + k as f64 * dt,
                boundary,
            })
            .collect();
        Self::from_records(dt, records)
    }

    /// Checks the shared order and that the times are strictly increasing on
    /// a uniform grid of step `dt`.
    pub fn from_records(dt: f64, records: Vec<TubeRecord>) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(StefanError::InvalidInput(format!("time step must be positive, got {dt}")));
        }
        let Some(first) = records.first() else {
            return Err(StefanError::InvalidInput("tube has no records".into()));
        };
        let order = first.boundary.order();
        let t0 = first.t;
        for (k, r) in records.iter().enumerate() {
            if r.boundary.order() != order {
                return Err(StefanError::InvalidInput(format!(
                    "record {k} has order {}, expected {order}",
                    r.boundary.order()
                )));
            }
            let expected = t0 + k as f64 * dt;
            if (r.t - expected).abs() > 1e-9 * expected.abs().max(1.0) {
                return Err(StefanError::InvalidInput(format!(
                    "record {k} at t={} is off the uniform grid (expected {expected})",
                    r.t
                )));
            }
        }
        Ok(Self { dt, order, records })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn records(&self) -> &[TubeRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn boundary(&self, k: usize) -> &FourierBoundary {
        &self.records[k].boundary
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    /// All boundaries truncated or zero-padded to `order`.
    pub fn with_order(&self, order: usize) -> Self {
        Self {
            dt: self.dt,
            order,
            records: self
                .records
                .iter()
                .map(|r| TubeRecord {
                    t: r.t,
                    boundary: r.boundary.with_order(order),
                })
                .collect(),
        }
    }

    pub fn map_boundaries(&self, f: impl Fn(&FourierBoundary) -> FourierBoundary) -> Self {
        Self {
            records: self
                .records
                .iter()
                .map(|r| TubeRecord {
                    t: r.t,
                    boundary: f(&r.boundary),
                })
                .collect(),
            ..self.clone()
        }
    }
}
