//! Serializable time dependence for matrix, vector and scalar coefficients.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A value that can be scaled and linearly interpolated.
pub trait Sample: Clone {
    /// `(rows, cols)`; vectors report `(len, 1)` and scalars `(1, 1)`.
    fn shape(&self) -> (usize, usize);
    fn scaled(&self, factor: f64) -> Self;
    /// `(1 − w)·a + w·b`.
    fn lerp(a: &Self, b: &Self, w: f64) -> Self;
    fn is_zero(&self) -> bool;
}

impl Sample for DMatrix<f64> {
    fn shape(&self) -> (usize, usize) {
        (self.nrows(), self.ncols())
    }
    fn scaled(&self, factor: f64) -> Self {
        self * factor
    }
    fn lerp(a: &Self, b: &Self, w: f64) -> Self {
        a * (1.0 - w) + b * w
    }
    fn is_zero(&self) -> bool {
        self.iter().all(|x| *x == 0.0)
    }
}

impl Sample for DVector<f64> {
    fn shape(&self) -> (usize, usize) {
        (self.len(), 1)
    }
    fn scaled(&self, factor: f64) -> Self {
        self * factor
    }
    fn lerp(a: &Self, b: &Self, w: f64) -> Self {
        a * (1.0 - w) + b * w
    }
    fn is_zero(&self) -> bool {
        self.iter().all(|x| *x == 0.0)
    }
}

impl Sample for f64 {
    fn shape(&self) -> (usize, usize) {
        (1, 1)
    }
    fn scaled(&self, factor: f64) -> Self {
        self * factor
    }
    fn lerp(a: &Self, b: &Self, w: f64) -> Self {
        a * (1.0 - w) + b * w
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

/// Named scalar envelopes. A preset coefficient is `base · profile(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `1`
    Unit,
    /// `1 + rate·t`
    Ramp { rate: f64 },
    /// `(1 + rate·t)²`
    SquaredRamp { rate: f64 },
    /// `cos(frequency·t + phase)`
    Cosine {
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `sin(frequency·t + phase)`
    Sine {
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `exp(rate·t)`
    Exponential { rate: f64 },
    /// `1` on `[start, end)`, `0` elsewhere.
    Window { start: f64, end: f64 },
    /// `exp(−(t − center)² / (2·width²))`
    Gaussian { center: f64, width: f64 },
}

impl Profile {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Profile::Unit => 1.0,
            Profile::Ramp { rate } => 1.0 + rate * t,
            Profile::SquaredRamp { rate } => (1.0 + rate * t).powi(2),
            Profile::Cosine { frequency, phase } => (frequency * t + phase).cos(),
            Profile::Sine { frequency, phase } => (frequency * t + phase).sin(),
            Profile::Exponential { rate } => (rate * t).exp(),
            Profile::Window { start, end } => {
                if t >= start && t < end {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::Gaussian { center, width } => {
                let x = (t - center) / width;
                (-0.5 * x * x).exp()
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Profile::Unit => true,
            Profile::Ramp { rate } | Profile::SquaredRamp { rate } | Profile::Exponential { rate } => {
                rate.is_finite()
            }
            Profile::Cosine { frequency, phase } | Profile::Sine { frequency, phase } => {
                frequency.is_finite() && phase.is_finite()
            }
            Profile::Window { start, end } => start.is_finite() && end.is_finite() && start <= end,
            Profile::Gaussian { center, width } => center.is_finite() && width.is_finite() && width > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid profile parameters: {self:?}")))
        }
    }
}

/// Samples on a strictly increasing time grid, linearly interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct Table<T> {
    times: Vec<f64>,
    values: Vec<T>,
}

impl<T: Sample> Table<T> {
    pub fn new(times: Vec<f64>, values: Vec<T>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidInput("time table is empty".into()));
        }
        if times.len() != values.len() {
            return Err(Error::dimension("time table values", times.len(), values.len()));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidInput("time table contains non-finite times".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("time table must be strictly increasing".into()));
        }
        let shape = values[0].shape();
        if let Some(bad) = values.iter().find(|v| v.shape() != shape) {
            return Err(Error::dimension("time table entry", shape.0 * shape.1, bad.shape().0 * bad.shape().1));
        }
        Ok(Table { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn eval(&self, t: f64) -> Result<T> {
        let start = self.times[0];
        let end = *self.times.last().unwrap();
        let slack = 1e-12 * (1.0 + start.abs().max(end.abs()));
        if !(t >= start - slack && t <= end + slack) {
            return Err(Error::OutOfRange { t, start, end });
        }
        if self.times.len() == 1 {
            return Ok(self.values[0].clone());
        }
        let t = t.clamp(start, end);
        let hi = self.times.partition_point(|&x| x < t).clamp(1, self.times.len() - 1);
        let lo = hi - 1;
        let w = (t - self.times[lo]) / (self.times[hi] - self.times[lo]);
        Ok(T::lerp(&self.values[lo], &self.values[hi], w))
    }
}

/// Time dependence of one Hamiltonian coefficient.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeDependence<T> {
    Constant(T),
    Table(Table<T>),
    Preset { base: T, profile: Profile },
}

impl<T: Sample> TimeDependence<T> {
    pub fn constant(value: T) -> Self {
        TimeDependence::Constant(value)
    }

    pub fn table(times: Vec<f64>, values: Vec<T>) -> Result<Self> {
        Table::new(times, values).map(TimeDependence::Table)
    }

    pub fn preset(base: T, profile: Profile) -> Result<Self> {
        profile.validate()?;
        Ok(TimeDependence::Preset { base, profile })
    }

    pub fn eval(&self, t: f64) -> Result<T> {
        match self {
            TimeDependence::Constant(v) => Ok(v.clone()),
            TimeDependence::Table(table) => table.eval(t),
            TimeDependence::Preset { base, profile } => Ok(base.scaled(profile.value(t))),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            TimeDependence::Constant(v) => v.shape(),
            TimeDependence::Table(table) => table.values[0].shape(),
            TimeDependence::Preset { base, .. } => base.shape(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, TimeDependence::Constant(_))
    }

    /// True when the coefficient vanishes at every time.
    pub fn is_identically_zero(&self) -> bool {
        match self {
            TimeDependence::Constant(v) => v.is_zero(),
            TimeDependence::Table(table) => table.values.iter().all(Sample::is_zero),
            TimeDependence::Preset { base, .. } => base.is_zero(),
        }
    }

    /// Range `[start, end]` on which the coefficient can be evaluated.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            TimeDependence::Table(table) => (table.times[0], *table.times.last().unwrap()),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_interpolates_linearly() {
        let td = TimeDependence::table(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(td.eval(0.5).unwrap(), 1.0);
        assert_eq!(td.eval(2.0).unwrap(), 1.0);
        assert_eq!(td.eval(3.0).unwrap(), 0.0);
    }

    #[test]
    fn table_refuses_extrapolation() {
        let td = TimeDependence::table(vec![0.0, 1.0], vec![1.0, 2.0]).unwrap();
        assert!(matches!(td.eval(1.5), Err(Error::OutOfRange { .. })));
        assert!(matches!(td.eval(-0.1), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn table_requires_increasing_times() {
        assert!(Table::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(Table::new(vec![1.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(Table::<f64>::new(vec![], vec![]).is_err());
    }

    #[test]
    fn table_rejects_ragged_shapes() {
        let a = DVector::from_vec(vec![1.0, 2.0]);
        let b = DVector::from_vec(vec![1.0]);
        assert!(Table::new(vec![0.0, 1.0], vec![a, b]).is_err());
    }

    #[test]
    fn preset_scales_base() {
        let base = DMatrix::<f64>::identity(2, 2) * 3.0;
        let td = TimeDependence::preset(base, Profile::SquaredRamp { rate: 0.1 }).unwrap();
        let v = td.eval(2.0).unwrap();
        assert!((v[(0, 0)] - 3.0 * 1.44).abs() < 1e-14);
        assert_eq!(v[(0, 1)], 0.0);
    }

    #[test]
    fn profile_roundtrips_through_toml() {
        let p = Profile::Cosine { frequency: 2.0, phase: 0.5 };
        let text = toml::to_string(&p).unwrap();
        let back: Profile = toml::from_str(&text).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn gaussian_profile_needs_positive_width() {
        assert!(TimeDependence::preset(1.0, Profile::Gaussian { center: 0.0, width: 0.0 }).is_err());
    }
}
