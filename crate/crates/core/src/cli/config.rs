//! TOML scenario files. The subcommand decides which schema is expected.

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use crate::chains::{Boundary, ChainSpec};
use crate::error::{Error, Result};
use crate::ladder::LadderChain;
use crate::propagator::Axis;
use crate::quadform::{Profile, QuadraticHamiltonian, TimeDependence};

/// `{ kind = "constant", value = … }`, `{ kind = "table", times = […], values = […] }`
/// or `{ kind = "preset", base = …, profile = { shape = …, … } }`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeDepConfig<T> {
    Constant { value: T },
    Table { times: Vec<f64>, values: Vec<T> },
    Preset { base: T, profile: Profile },
}

fn matrix(rows: &[Vec<f64>], n: usize, what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput(format!("{what} must be a {n}×{n} array of rows")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn vector(v: &[f64], n: usize, what: &str) -> Result<DVector<f64>> {
    if v.len() != n {
        return Err(Error::dimension(what, n, v.len()));
    }
    Ok(DVector::from_column_slice(v))
}

fn finite(values: impl IntoIterator<Item = f64>, what: &str) -> Result<()> {
    if values.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} contains non-finite numbers")))
    }
}

impl<T> TimeDepConfig<T> {
    fn convert<U>(&self, f: impl Fn(&T) -> Result<U>) -> Result<TimeDependence<U>>
    where
        U: crate::quadform::Sample,
    {
        match self {
            TimeDepConfig::Constant { value } => Ok(TimeDependence::Constant(f(value)?)),
            TimeDepConfig::Table { times, values } => {
                finite(times.iter().copied(), "table times")?;
                TimeDependence::table(times.clone(), values.iter().map(&f).collect::<Result<_>>()?)
            }
            TimeDepConfig::Preset { base, profile } => TimeDependence::preset(f(base)?, *profile),
        }
    }
}

impl TimeDepConfig<Vec<Vec<f64>>> {
    pub fn to_matrix(&self, n: usize, what: &str) -> Result<TimeDependence<DMatrix<f64>>> {
        self.convert(|rows| {
            finite(rows.iter().flatten().copied(), what)?;
            matrix(rows, n, what)
        })
    }
}

impl TimeDepConfig<Vec<f64>> {
    pub fn to_vector(&self, n: usize, what: &str) -> Result<TimeDependence<DVector<f64>>> {
        self.convert(|v| {
            finite(v.iter().copied(), what)?;
            vector(v, n, what)
        })
    }
}

impl TimeDepConfig<f64> {
    pub fn to_scalar(&self, what: &str) -> Result<TimeDependence<f64>> {
        self.convert(|v| {
            finite([*v], what)?;
            Ok(*v)
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    pub n: usize,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(rename = "Z")]
    pub z: Option<TimeDepConfig<Vec<Vec<f64>>>>,
    #[serde(rename = "L")]
    pub l: Option<TimeDepConfig<Vec<Vec<f64>>>>,
    #[serde(rename = "K")]
    pub k: Option<TimeDepConfig<Vec<Vec<f64>>>>,
    pub mu: Option<TimeDepConfig<Vec<f64>>>,
    pub nu: Option<TimeDepConfig<Vec<f64>>>,
}

fn one() -> f64 {
    1.0
}

fn default_step() -> f64 {
    1e-3
}

impl HamiltonianConfig {
    pub fn build(&self) -> Result<QuadraticHamiltonian> {
        let n = self.n;
        let mut h = QuadraticHamiltonian::new(n)?.with_hbar(self.hbar)?;
        if let Some(z) = &self.z {
            h = h.with_z(z.to_matrix(n, "Z")?)?;
        }
        if let Some(l) = &self.l {
            h = h.with_l(l.to_matrix(n, "L")?)?;
        }
        if let Some(k) = &self.k {
            h = h.with_k(k.to_matrix(n, "K")?)?;
        }
        if let Some(mu) = &self.mu {
            h = h.with_mu(mu.to_vector(n, "mu")?)?;
        }
        if let Some(nu) = &self.nu {
            h = h.with_nu(nu.to_vector(n, "nu")?)?;
        }
        Ok(h)
    }
}

fn check_time(t: f64, what: &str) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("{what} must be non-negative and finite, got {t}")));
    }
    Ok(())
}

fn check_step(step: f64) -> Result<()> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidInput(format!("step must be positive, got {step}")));
    }
    Ok(())
}

/// Kernel `K(q, t | q′, 0)` sampled for `q = s·direction`, `q′ = s′·direction`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagateConfig {
    pub hamiltonian: HamiltonianConfig,
    pub t: f64,
    #[serde(default = "default_step")]
    pub step: f64,
    pub q: Axis,
    pub q_prime: Option<Axis>,
    /// Direction of the sampled line in configuration space; defaults to the first axis.
    pub direction: Option<Vec<f64>>,
}

impl PropagateConfig {
    pub fn validate(&self) -> Result<()> {
        check_time(self.t, "t")?;
        check_step(self.step)?;
        self.q.validate()?;
        if let Some(a) = &self.q_prime {
            a.validate()?;
        }
        if let Some(d) = &self.direction {
            finite(d.iter().copied(), "direction")?;
            if d.len() != self.hamiltonian.n {
                return Err(Error::dimension("direction", self.hamiltonian.n, d.len()));
            }
            if d.iter().all(|x| *x == 0.0) {
                return Err(Error::InvalidInput("direction must be nonzero".into()));
            }
        }
        Ok(())
    }

    pub fn direction(&self) -> DVector<f64> {
        match &self.direction {
            Some(d) => DVector::from_column_slice(d),
            None => {
                let mut e = DVector::zeros(self.hamiltonian.n);
                e[0] = 1.0;
                e
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub n: usize,
    #[serde(default = "one")]
    pub m: f64,
    pub omega0: f64,
    pub boundary: Boundary,
    /// Per-site force `f(t)`.
    pub force: Option<TimeDepConfig<Vec<f64>>>,
}

impl ChainConfig {
    pub fn build(&self) -> Result<ChainSpec> {
        finite([self.m, self.omega0], "chain parameters")?;
        let mut spec = ChainSpec::new(self.n, self.m, self.omega0, self.boundary)?;
        if let Some(f) = &self.force {
            spec = spec.with_force(f.to_vector(self.n, "force")?)?;
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainEigsConfig {
    pub chain: ChainConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderConfig {
    pub n: usize,
    #[serde(default = "one")]
    pub omega0: f64,
    pub g: f64,
    #[serde(default = "one")]
    pub hbar: f64,
}

impl LadderConfig {
    pub fn build(&self) -> Result<LadderChain> {
        LadderChain::new(self.n, self.omega0, self.g)?.with_hbar(self.hbar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutConfig {
    /// Sites of the configured chain.
    Sites,
    /// Last site of chains of each listed length.
    EndToEnd,
}

/// A list of 1-based indices or an inclusive range.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RowsConfig {
    List(Vec<usize>),
    Range { from: usize, to: usize },
}

impl RowsConfig {
    pub fn rows(&self) -> Result<Vec<usize>> {
        let rows = match self {
            RowsConfig::List(v) => v.clone(),
            RowsConfig::Range { from, to } => (*from..=*to).collect(),
        };
        if rows.is_empty() || rows.contains(&0) {
            return Err(Error::InvalidInput("rows must be a nonempty list of indices ≥ 1".into()));
        }
        Ok(rows)
    }
}

/// Transition maps `P(row, τ)`; shared by `excitation-map` and `first-maxima`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    pub chain: LadderConfig,
    pub tau_max: f64,
    pub dtau: f64,
    #[serde(default = "default_layout")]
    pub layout: LayoutConfig,
    /// Sites (layout `sites`, default all) or chain lengths (layout `end_to_end`, required).
    pub rows: Option<RowsConfig>,
}

fn default_layout() -> LayoutConfig {
    LayoutConfig::Sites
}

impl MapConfig {
    pub fn rows(&self) -> Result<Vec<usize>> {
        match (&self.rows, self.layout) {
            (Some(r), _) => r.rows(),
            (None, LayoutConfig::Sites) => Ok((1..=self.chain.n).collect()),
            (None, LayoutConfig::EndToEnd) => Err(Error::InvalidInput(
                "layout end_to_end needs `rows` with the chain lengths".into(),
            )),
        }
    }
}

/// One Gaussian factor `exp(−(x − center)²/(2·width²) + i·momentum·x/ħ)` per mode.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeGaussianConfig {
    #[serde(default)]
    pub center: f64,
    /// Defaults to the ground-state width `√(ħ/(m ω_k))`; required for zero modes.
    pub width: Option<f64>,
    #[serde(default)]
    pub momentum: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveStateConfig {
    pub chain: ChainConfig,
    #[serde(default = "one")]
    pub hbar: f64,
    pub times: Vec<f64>,
    #[serde(default = "default_step")]
    pub step: f64,
    /// One axis per normal mode, or a single axis used for all of them.
    pub grid: Vec<Axis>,
    /// One entry per normal mode (ascending `z_k`).
    pub initial: Vec<ModeGaussianConfig>,
    pub norm_tolerance: Option<f64>,
}

impl EvolveStateConfig {
    pub fn validate(&self) -> Result<()> {
        if self.times.is_empty() {
            return Err(Error::InvalidInput("times must not be empty".into()));
        }
        for &t in &self.times {
            check_time(t, "time")?;
        }
        check_step(self.step)?;
        if self.grid.len() != 1 && self.grid.len() != self.chain.n {
            return Err(Error::dimension("grid axes", self.chain.n, self.grid.len()));
        }
        for a in &self.grid {
            a.validate()?;
        }
        if self.initial.len() != self.chain.n {
            return Err(Error::dimension("initial mode factors", self.chain.n, self.initial.len()));
        }
        for g in &self.initial {
            finite([g.center, g.momentum, g.width.unwrap_or(1.0)], "initial state")?;
            if let Some(w) = g.width {
                if !(w > 0.0) {
                    return Err(Error::InvalidInput(format!("width must be positive, got {w}")));
                }
            }
        }
        if let Some(tol) = self.norm_tolerance {
            if !(tol > 0.0) {
                return Err(Error::InvalidInput(format!("norm_tolerance must be positive, got {tol}")));
            }
        }
        Ok(())
    }

    pub fn axes(&self) -> Vec<Axis> {
        if self.grid.len() == 1 {
            vec![self.grid[0]; self.chain.n]
        } else {
            self.grid.clone()
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcedChainConfig {
    pub chain: LadderConfig,
    /// Scaled force `R(t)` on site 1.
    pub drive: TimeDepConfig<f64>,
    pub t_max: f64,
    pub dt: f64,
    #[serde(default = "default_step")]
    pub step: f64,
}

impl ForcedChainConfig {
    pub fn validate(&self) -> Result<()> {
        check_time(self.t_max, "t_max")?;
        check_step(self.step)?;
        if !(self.dt > 0.0) {
            return Err(Error::InvalidInput(format!("dt must be positive, got {}", self.dt)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_hamiltonian_with_all_kinds() {
        let text = r#"
t = 1.0
q = { min = -1.0, max = 1.0, count = 3 }

[hamiltonian]
n = 1
Z = { kind = "preset", base = [[1.0]], profile = { shape = "squared_ramp", rate = 0.1 } }
K = { kind = "constant", value = [[1.0]] }
mu = { kind = "table", times = [0.0, 2.0], values = [[0.0], [1.0]] }
"#;
        let cfg: PropagateConfig = toml::from_str(text).unwrap();
        cfg.validate().unwrap();
        let h = cfg.hamiltonian.build().unwrap();
        assert!((h.mu_at(1.0).unwrap()[0] - 0.5).abs() < 1e-15);
        assert!((h.z_at(1.0).unwrap()[(0, 0)] - 1.21).abs() < 1e-14);
        assert_eq!(cfg.step, 1e-3);
    }

    #[test]
    fn rejects_unknown_fields_and_bad_shapes() {
        assert!(toml::from_str::<ChainEigsConfig>("[chain]\nn = 3\nomega0 = 1.0\nboundary = \"dirichlet\"\nextra = 1").is_err());
        let cfg: PropagateConfig = toml::from_str(
            "t = 1.0\nq = { min = 0.0, max = 1.0, count = 2 }\n[hamiltonian]\nn = 2\nK = { kind = \"constant\", value = [[1.0]] }",
        )
        .unwrap();
        assert!(cfg.hamiltonian.build().is_err());
    }

    #[test]
    fn rows_forms() {
        let cfg: MapConfig = toml::from_str(
            "tau_max = 1.0\ndtau = 0.1\nlayout = \"end_to_end\"\nrows = { from = 3, to = 5 }\n[chain]\nn = 3\ng = 1.0",
        )
        .unwrap();
        assert_eq!(cfg.rows().unwrap(), vec![3, 4, 5]);
        let cfg: MapConfig = toml::from_str("tau_max = 1.0\ndtau = 0.1\n[chain]\nn = 3\ng = 1.0").unwrap();
        assert_eq!(cfg.rows().unwrap(), vec![1, 2, 3]);
        assert_eq!(cfg.layout, LayoutConfig::Sites);
    }
}
