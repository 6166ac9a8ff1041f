//! Wavefunctions and density matrices sampled on uniform grids, evolved by
//! one-dimensional kernel quadratures along each normal-mode axis.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chains::ModeDecomposition;
use crate::error::{Error, Result};
use crate::evolution::{trajectory, SourceResponse};
use crate::quadform::QuadraticHamiltonian;
use crate::quadrature::trapezoid_weights;

use super::{mode_kernel, phase_theta};

/// Uniform grid `min, min + Δ, …, max` with `count` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        let axis = Axis { min, max, count };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 || !(self.min < self.max) || !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::InvalidInput(format!(
                "axis needs min < max and at least two points, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.min + i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }
}

/// Complex samples over the product of `axes`, row-major (last axis fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    axes: Vec<Axis>,
    values: Vec<Complex64>,
}

impl GridState {
    pub fn new(axes: Vec<Axis>, values: Vec<Complex64>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidInput("a grid state needs at least one axis".into()));
        }
        for a in &axes {
            a.validate()?;
        }
        let len: usize = axes.iter().map(|a| a.count).product();
        if values.len() != len {
            return Err(Error::dimension("grid values", len, values.len()));
        }
        Ok(GridState { axes, values })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn<F>(axes: Vec<Axis>, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let len: usize = axes.iter().map(|a| a.count).product();
        let probe = GridState {
            axes,
            values: Vec::new(),
        };
        let values = (0..len).into_par_iter().map(|i| f(&probe.point(i))).collect();
        GridState::new(probe.axes, values)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn dims(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            idx[k] = flat % a.count;
            flat /= a.count;
        }
        idx
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&i, a)| a.point(i))
            .collect()
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).product()
    }

    /// `Σ |ψ|² · ΔV`.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell_volume()
    }

    /// `⟨q_axis⟩` of `|ψ|²`, normalized by [`GridState::norm`].
    pub fn mean(&self, axis: usize) -> f64 {
        let a = self.axes[axis];
        let mut acc = 0.0;
        let mut total = 0.0;
        for (flat, v) in self.values.iter().enumerate() {
            let w = v.norm_sqr();
            acc += w * a.point(self.multi_index(flat)[axis]);
            total += w;
        }
        acc / total
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        for v in &mut self.values {
            *v *= factor;
        }
        self
    }
}

/// Source-driven part of the normal-mode kernel: `ζ̃`, `η̃` in mode
/// coordinates and the source contribution to the phase.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeDrive {
    pub zeta: DVector<f64>,
    pub eta: DVector<f64>,
    /// `θ(t) + nπ/4`.
    pub phase: f64,
}

impl ModeDrive {
    pub fn none(n: usize) -> Self {
        ModeDrive {
            zeta: DVector::zeros(n),
            eta: DVector::zeros(n),
            phase: 0.0,
        }
    }

    /// Projects a site-coordinate source response onto the modes.
    pub fn from_response(modes: &ModeDecomposition, resp: &SourceResponse, source_phase: f64) -> Result<Self> {
        Ok(ModeDrive {
            zeta: modes.to_modes(resp.zeta()?)?,
            eta: modes.to_modes(&resp.eta)?,
            phase: source_phase,
        })
    }

    /// Drive at time `t` of a chain Hamiltonian `p²/2m + ½ q·Z·q − f(t)·q`
    /// whose `Z` is diagonalized by `modes`.
    pub fn from_hamiltonian(h: &QuadraticHamiltonian, modes: &ModeDecomposition, t: f64, step: f64) -> Result<Self> {
        if h.n() != modes.n() {
            return Err(Error::dimension("mode decomposition", h.n(), modes.n()));
        }
        if t == 0.0 {
            return Ok(ModeDrive::none(h.n()));
        }
        let traj = trajectory(h, t, step)?;
        let theta = phase_theta(h, &traj.blocks, &traj.responses)?;
        let (_, resp) = traj.end();
        ModeDrive::from_response(modes, resp, theta + h.n() as f64 * PI / 4.0)
    }
}

/// Settings shared by the grid evolutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub hbar: f64,
    /// Largest accepted relative change of the norm (or trace).
    pub norm_tolerance: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            hbar: 1.0,
            norm_tolerance: 1e-4,
        }
    }
}

/// Quadrature matrix `K_k(x_i, x_j)·w_j` of mode `k` on `axis`.
fn mode_matrix(
    modes: &ModeDecomposition,
    drive: &ModeDrive,
    k: usize,
    axis: &Axis,
    t: f64,
    hbar: f64,
) -> Result<Vec<Complex64>> {
    let z = modes.z[k];
    let m = modes.m;
    if z > 0.0 && t * (z / m).sqrt() > PI {
        return Err(Error::caustic(
            t,
            format!("mode {} has passed its first caustic (ωt > π)", k + 1),
        ));
    }
    let (f, g) = mode_kernel(z, t, m)?;
    let amp = Complex64::new(0.0, -PI / 4.0).exp() * (g / (2.0 * PI * hbar)).sqrt();
    let (zeta, eta) = (drive.zeta[k], drive.eta[k]);
    let x = axis.points();
    let w = trapezoid_weights(axis.count, axis.spacing());
    let c = axis.count;
    let rows: Vec<Vec<Complex64>> = (0..c)
        .into_par_iter()
        .map(|i| {
            let q = x[i];
            (0..c)
                .map(|j| {
                    let qp = x[j];
                    let s = 0.5 * f * (q * q + qp * qp) - g * q * qp + q * zeta + g * eta * qp;
                    amp * Complex64::new(0.0, s / hbar).exp() * w[j]
                })
                .collect()
        })
        .collect();
    Ok(rows.concat())
}

/// Applies the square matrix `mat` along `axis` of a row-major array.
fn apply_axis(values: &[Complex64], dims: &[usize], axis: usize, mat: &[Complex64]) -> Vec<Complex64> {
    let c = dims[axis];
    let inner: usize = dims[axis + 1..].iter().product();
    let block = c * inner;
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    out.par_chunks_mut(block)
        .zip(values.par_chunks(block))
        .for_each(|(dst, src)| {
            for i in 0..c {
                let row = &mat[i * c..(i + 1) * c];
                let d = &mut dst[i * inner..(i + 1) * inner];
                for (j, m) in row.iter().enumerate() {
                    let s = &src[j * inner..(j + 1) * inner];
                    for (o, v) in d.iter_mut().zip(s) {
                        *o += m * v;
                    }
                }
            }
        });
    out
}

fn check_modes(modes: &ModeDecomposition, drive: &ModeDrive, axes: usize, t: f64) -> Result<()> {
    if drive.zeta.len() != modes.n() || drive.eta.len() != modes.n() {
        return Err(Error::dimension("mode drive", modes.n(), drive.zeta.len()));
    }
    if axes != modes.n() {
        return Err(Error::dimension("grid axes", modes.n(), axes));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("time must be non-negative, got {t}")));
    }
    Ok(())
}

fn check_drift(before: f64, after: f64, tol: f64, what: &str) -> Result<()> {
    let drift = (after - before).abs() / before.abs().max(f64::MIN_POSITIVE);
    if !(drift <= tol) {
        return Err(Error::Resolution(format!(
            "{what} changed by {drift:e} (tolerance {tol:e}); refine or widen the grid"
        )));
    }
    Ok(())
}

/// `ψ(q̃, t) = ∫ K(q̃, t | q̃′, 0) ψ(q̃′, 0) dq̃′`, axis `k` of `psi0` being mode `k`.
/// The output shares the grid of `psi0`.
pub fn evolve_wavefunction(
    modes: &ModeDecomposition,
    drive: &ModeDrive,
    psi0: &GridState,
    t: f64,
    opts: &EvolveOptions,
) -> Result<GridState> {
    check_modes(modes, drive, psi0.axes.len(), t)?;
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    let dims = psi0.dims();
    let mut values = psi0.values.clone();
    for (k, axis) in psi0.axes.iter().enumerate() {
        let mat = mode_matrix(modes, drive, k, axis, t, opts.hbar)?;
        values = apply_axis(&values, &dims, k, &mat);
    }
    let out = GridState {
        axes: psi0.axes.clone(),
        values,
    }
    .scaled(Complex64::new(0.0, drive.phase).exp());
    check_drift(psi0.norm(), out.norm(), opts.norm_tolerance, "norm")?;
    Ok(out)
}

/// `ρ(q, q′, t) = ∫∫ K(q, t | x, 0) ρ(x, y, 0) K̄(q′, t | y, 0) dx dy` on a grid
/// whose first `n` axes carry `q` and last `n` axes carry `q′`.
pub fn evolve_density(
    modes: &ModeDecomposition,
    drive: &ModeDrive,
    rho0: &GridState,
    t: f64,
    opts: &EvolveOptions,
) -> Result<GridState> {
    let n = modes.n();
    if rho0.axes.len() != 2 * n {
        return Err(Error::dimension("density grid axes", 2 * n, rho0.axes.len()));
    }
    check_modes(modes, drive, n, t)?;
    let before = density_trace(rho0)?.re;
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let dims = rho0.dims();
    let mut values = rho0.values.clone();
    for k in 0..n {
        let mat = mode_matrix(modes, drive, k, &rho0.axes[k], t, opts.hbar)?;
        values = apply_axis(&values, &dims, k, &mat);
        let mat = mode_matrix(modes, drive, k, &rho0.axes[n + k], t, opts.hbar)?;
        let conj: Vec<Complex64> = mat.iter().map(|v| v.conj()).collect();
        values = apply_axis(&values, &dims, n + k, &conj);
    }
    let out = GridState {
        axes: rho0.axes.clone(),
        values,
    };
    check_drift(before, density_trace(&out)?.re, opts.norm_tolerance, "trace")?;
    Ok(out)
}

fn density_split(rho: &GridState) -> Result<(usize, usize)> {
    let axes = rho.axes.len();
    if !axes.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("density grid needs an even number of axes, got {axes}")));
    }
    let n = axes / 2;
    if rho.axes[..n] != rho.axes[n..] {
        return Err(Error::InvalidInput("density grid must use the same axes for q and q′".into()));
    }
    let side: usize = rho.axes[..n].iter().map(|a| a.count).product();
    Ok((n, side))
}

/// `∫ ρ(q, q) dq`.
pub fn density_trace(rho: &GridState) -> Result<Complex64> {
    let (n, side) = density_split(rho)?;
    let dv: f64 = rho.axes[..n].iter().map(Axis::spacing).product();
    let sum: Complex64 = (0..side).map(|i| rho.values[i * side + i]).sum();
    Ok(sum * dv)
}

/// `max |ρ(q, q′) − ρ̄(q′, q)|`.
pub fn hermiticity_defect(rho: &GridState) -> Result<f64> {
    let (_, side) = density_split(rho)?;
    let mut worst = 0.0_f64;
    for i in 0..side {
        for j in i..side {
            let d = rho.values[i * side + j] - rho.values[j * side + i].conj();
            worst = worst.max(d.norm());
        }
    }
    Ok(worst)
}

/// `ρ(q, q′) = ψ(q)·ψ̄(q′)`.
pub fn pure_density(psi: &GridState) -> GridState {
    let mut axes = psi.axes.clone();
    axes.extend_from_slice(&psi.axes);
    let mut values = Vec::with_capacity(psi.values.len() * psi.values.len());
    for a in &psi.values {
        for b in &psi.values {
            values.push(a * b.conj());
        }
    }
    GridState { axes, values }
}
