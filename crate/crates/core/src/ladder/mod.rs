//! Excitation transport along a chain of identical oscillators with
//! nearest-neighbour hopping,
//!
//! ```text
//! H = Σ ħω₀ a†_k a_k + Σ ħg (a_k a†_{k+1} + a†_k a_{k+1}) [+ ħR(t)(a₁ + a†₁)]
//! ```
//!
//! Without the drive the dynamics of single-particle amplitudes is generated
//! by the tridiagonal matrix `Λ` (`ħω₀` on the diagonal, `ħg` beside it),
//! whose eigenpairs are known in closed form. Sites are numbered from 1.

pub mod fock;
pub mod forced;

use std::f64::consts::PI;

use log::warn;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadform::TimeDependence;

pub use fock::{fock_oracle, FockInitial};
pub use forced::{forced_response, ForcedResponse};

/// A uniform hopping chain.
#[derive(Debug, Clone)]
pub struct LadderChain {
    pub n: usize,
    pub omega0: f64,
    pub g: f64,
    pub hbar: f64,
    /// Coherent amplitude of site 1 at `t = 0` (all other sites empty).
    pub alpha: Option<Complex64>,
    /// Scaled force `R(t)` acting on site 1.
    pub drive: Option<TimeDependence<f64>>,
}

impl LadderChain {
    pub fn new(n: usize, omega0: f64, g: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("a chain needs at least one site".into()));
        }
        if !omega0.is_finite() || !g.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite chain parameters ω₀ = {omega0}, g = {g}")));
        }
        Ok(LadderChain {
            n,
            omega0,
            g,
            hbar: 1.0,
            alpha: None,
            drive: None,
        })
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::InvalidInput(format!("ħ must be positive, got {hbar}")));
        }
        self.hbar = hbar;
        Ok(self)
    }

    pub fn with_alpha(mut self, alpha: Complex64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_drive(mut self, drive: TimeDependence<f64>) -> Self {
        self.drive = Some(drive);
        self
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.n {
            return Err(Error::InvalidInput(format!("site {site} outside 1..={}", self.n)));
        }
        Ok(())
    }
}

/// The hopping matrix `Λ`.
pub fn build_lambda(chain: &LadderChain) -> DMatrix<f64> {
    let n = chain.n;
    let mut m = DMatrix::identity(n, n) * (chain.hbar * chain.omega0);
    for i in 0..n.saturating_sub(1) {
        m[(i, i + 1)] = chain.hbar * chain.g;
        m[(i + 1, i)] = chain.hbar * chain.g;
    }
    m
}

/// Eigenfrequencies `λ_k = ω₀ + 2g·cos(kπ/(n+1))` of `Λ/ħ` and the matching
/// orthonormal eigenvectors `V^k_j = √(2/(n+1))·sin(kjπ/(n+1))` as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderModes {
    pub lambda: DVector<f64>,
    pub v: DMatrix<f64>,
}

pub fn ladder_modes(chain: &LadderChain) -> LadderModes {
    let n = chain.n;
    let h = (n + 1) as f64;
    let norm = (2.0 / h).sqrt();
    let lambda = DVector::from_fn(n, |k, _| chain.omega0 + 2.0 * chain.g * ((k + 1) as f64 * PI / h).cos());
    let v = DMatrix::from_fn(n, n, |j, k| norm * (((k + 1) * (j + 1)) as f64 * PI / h).sin());
    LadderModes { lambda, v }
}

/// `exp(−itΛ/ħ)` from the spectral form.
pub fn propagator_matrix(chain: &LadderChain, t: f64) -> DMatrix<Complex64> {
    let modes = ladder_modes(chain);
    let n = chain.n;
    let phases: Vec<Complex64> = modes
        .lambda
        .iter()
        .map(|l| Complex64::new(0.0, -l * t).exp())
        .collect();
    DMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| phases[k] * (modes.v[(i, k)] * modes.v[(j, k)]))
            .sum()
    })
}

fn amplitude(modes: &LadderModes, t: f64, i: usize, j: usize) -> Complex64 {
    modes
        .lambda
        .iter()
        .enumerate()
        .map(|(k, l)| Complex64::new(0.0, -l * t).exp() * (modes.v[(i - 1, k)] * modes.v[(j - 1, k)]))
        .sum()
}

/// `P_{ji}(t) = |(exp(−itΛ/ħ))_{ij}|²`, the probability of moving from site `j` to site `i`.
pub fn transition_probability(chain: &LadderChain, t: f64, i: usize, j: usize) -> Result<f64> {
    chain.check_site(i)?;
    chain.check_site(j)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("time must be non-negative, got {t}")));
    }
    Ok(amplitude(&ladder_modes(chain), t, i, j).norm_sqr())
}

/// `P_{n1}(t)` from the closed end-to-end sum, guarded against the direct
/// spectral evaluation.
pub fn end_to_end(chain: &LadderChain, t: f64) -> f64 {
    let n = chain.n;
    let h = (n + 1) as f64;
    let sum: Complex64 = (1..=n)
        .map(|k| {
            let x = k as f64 * PI / h;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            Complex64::new(0.0, -2.0 * chain.g * t * x.cos()).exp() * (sign * x.sin() * x.sin())
        })
        .sum();
    let closed = (2.0 / h).powi(2) * sum.norm_sqr();
    let direct = amplitude(&ladder_modes(chain), t, n, 1).norm_sqr();
    if (closed - direct).abs() > 1e-12 {
        warn!("end-to-end closed form {closed} disagrees with spectral value {direct} at t = {t}; using the latter");
        return direct;
    }
    closed
}

/// `⟨a†_j a_j⟩(t) = |α|²·P_{j1}(t)` for a coherent state injected at site 1.
pub fn coherent_excitations(chain: &LadderChain, t: f64) -> Result<DVector<f64>> {
    let alpha = chain
        .alpha
        .ok_or_else(|| Error::InvalidInput("coherent excitations need an initial amplitude α".into()))?;
    let modes = ladder_modes(chain);
    let a2 = alpha.norm_sqr();
    Ok(DVector::from_fn(chain.n, |j, _| a2 * amplitude(&modes, t, j + 1, 1).norm_sqr()))
}

/// `|⟨1|exp(−itΛ/ħ)|j⟩|²`: the ratio `⟨n_j⟩(t)/⟨n₁⟩(0)` for any initial state of site 1.
pub fn excitation_ratio(chain: &LadderChain, t: f64, j: usize) -> Result<f64> {
    transition_probability(chain, t, 1, j)
}

/// Which probabilities a [`TransitionMap`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapLayout {
    /// Rows are sites `i` of one chain of `n` sites: `P_{i1}(τ)`.
    Sites { n: usize },
    /// Rows are chain lengths `n`: `P_{n1}(τ)` of the chain with `n` sites.
    EndToEnd,
}

/// Probabilities sampled over rows (sites or chain lengths) and scaled time `τ = g·t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMap {
    pub layout: MapLayout,
    pub taus: Vec<f64>,
    pub rows: Vec<usize>,
    /// `p[(row, τ index)]`
    pub p: DMatrix<f64>,
}

/// `τ = 0, Δτ, 2Δτ, …` up to `tau_max` (inclusive when it lands on the grid).
pub fn scaled_times(tau_max: f64, dtau: f64) -> Result<Vec<f64>> {
    if !(dtau > 0.0) || !(tau_max >= 0.0) || !tau_max.is_finite() {
        return Err(Error::InvalidInput(format!(
            "need τ_max ≥ 0 and Δτ > 0, got {tau_max} and {dtau}"
        )));
    }
    let count = (tau_max / dtau + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| i as f64 * dtau).collect())
}

fn check_taus(taus: &[f64], g: f64) -> Result<()> {
    if g == 0.0 {
        return Err(Error::InvalidInput("scaled time τ = g·t needs g ≠ 0".into()));
    }
    if taus.is_empty() || taus.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidInput("τ samples must be non-negative and finite".into()));
    }
    if taus.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("τ samples must be increasing".into()));
    }
    Ok(())
}

fn fill_map(rows: &[usize], taus: &[f64], cell: impl Fn(usize, f64) -> f64 + Sync) -> DMatrix<f64> {
    let columns: Vec<Vec<f64>> = taus
        .par_iter()
        .map(|&tau| rows.iter().map(|&r| cell(r, tau)).collect())
        .collect();
    DMatrix::from_fn(rows.len(), taus.len(), |r, c| columns[c][r])
}

/// `P_{i1}(τ/g)` for the listed sites of `chain`.
pub fn transition_map(chain: &LadderChain, sites: &[usize], taus: &[f64]) -> Result<TransitionMap> {
    check_taus(taus, chain.g)?;
    for &s in sites {
        chain.check_site(s)?;
    }
    let modes = ladder_modes(chain);
    let g = chain.g;
    let p = fill_map(sites, taus, |site, tau| amplitude(&modes, tau / g, site, 1).norm_sqr());
    Ok(TransitionMap {
        layout: MapLayout::Sites { n: chain.n },
        taus: taus.to_vec(),
        rows: sites.to_vec(),
        p,
    })
}

/// `P_{n1}(τ/g)` of chains with `n` sites for each listed length.
pub fn end_to_end_map(omega0: f64, g: f64, lengths: &[usize], taus: &[f64]) -> Result<TransitionMap> {
    check_taus(taus, g)?;
    let mut chains = Vec::with_capacity(lengths.len());
    for &n in lengths {
        chains.push((n, LadderChain::new(n, omega0, g)?));
    }
    let p = fill_map(lengths, taus, |n, tau| {
        let chain = &chains.iter().find(|(len, _)| *len == n).unwrap().1;
        end_to_end(chain, tau / g)
    });
    Ok(TransitionMap {
        layout: MapLayout::EndToEnd,
        taus: taus.to_vec(),
        rows: lengths.to_vec(),
        p,
    })
}

/// Least-squares line `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidInput("a line fit needs at least two points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("a line fit needs at least two distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(LineFit { slope, intercept, r2 })
}

/// Probability floor a first maximum has to exceed.
pub const MAXIMUM_FLOOR: f64 = 1e-3;

/// First local maxima `τ*(row)` of every row and the line through them.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstMaxima {
    pub points: Vec<(usize, f64)>,
    /// `None` when there are fewer than two rows.
    pub fit: Option<LineFit>,
}

/// Smallest sampled `τ` with `P[i−1] < P[i] ≥ P[i+1]` and `P[i] > 10⁻³`.
pub fn first_maximum(p: &[f64], taus: &[f64]) -> Option<f64> {
    (1..p.len().saturating_sub(1))
        .find(|&i| p[i] > p[i - 1] && p[i] >= p[i + 1] && p[i] > MAXIMUM_FLOOR)
        .map(|i| taus[i])
}

pub fn first_maxima(map: &TransitionMap) -> Result<FirstMaxima> {
    let mut points = Vec::with_capacity(map.rows.len());
    for (r, &row) in map.rows.iter().enumerate() {
        let p: Vec<f64> = map.p.row(r).iter().copied().collect();
        let tau = first_maximum(&p, &map.taus).ok_or(Error::NoMaximum { site: row })?;
        points.push((row, tau));
    }
    let fit = if points.len() >= 2 {
        let xs: Vec<f64> = points.iter().map(|p| p.0 as f64).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        Some(fit_line(&xs, &ys)?)
    } else {
        None
    };
    Ok(FirstMaxima { points, fit })
}
