//! Position-space propagator `K(q, t | q′, 0)` of a quadratic Hamiltonian.
//!
//! Away from caustics the kernel is a Gaussian fixed entirely by the
//! fundamental matrix and the source response:
//!
//! ```text
//! K = e^{iθ} / √((2πħ)ⁿ |det B|)
//!     · exp{(i/ħ)[½ q·D B⁻¹·q + ½ q′·B⁻¹A·q′ − q′·B⁻¹·q + q·ζ + q′·B⁻¹·η]}
//! ```
//!
//! with `θ(t) = θ(0) + ∫₀ᵗ [ν·ζ − ½ ζ·K·ζ]/ħ dt′`. For uncoupled normal modes
//! the kernel factorizes into one-dimensional oscillator kernels; the
//! [`grid`] submodule uses that to evolve sampled wavefunctions and density
//! matrices.

pub mod grid;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{first_caustic, trajectory, SourceResponse, SymplecticBlocks};
use crate::quadform::QuadraticHamiltonian;
use crate::quadrature::simpson;

pub use grid::{
    density_trace, evolve_density, evolve_wavefunction, hermiticity_defect, pure_density, Axis, EvolveOptions,
    GridState, ModeDrive,
};

/// All coefficients of the Gaussian kernel at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelParams {
    pub t: f64,
    pub n: usize,
    /// `D·B⁻¹`
    pub dbinv: DMatrix<f64>,
    /// `B⁻¹·A`
    pub binva: DMatrix<f64>,
    /// `B⁻¹`
    pub binv: DMatrix<f64>,
    pub zeta: DVector<f64>,
    pub eta: DVector<f64>,
    /// `B⁻¹·η`, the coefficient of `q′` in the exponent.
    pub binv_eta: DVector<f64>,
    /// `θ(t)` in radians, including the initial `−nπ/4`.
    pub theta_phase: f64,
    /// `−(n/2)·ln(2πħ) − ½·ln|det B|`.
    pub log_amp: f64,
    pub hbar: f64,
}

/// `θ(0)`: `−(π/4)` times the signature of `B` just after `t = 0`
/// (`−nπ/4` whenever `K(0)` is positive definite).
fn initial_phase(h: &QuadraticHamiltonian, path: &[SymplecticBlocks]) -> Result<f64> {
    let k0 = h.k_at(0.0)?;
    let probe = if k0.clone().lu().determinant().abs() > 1e-12 * k0.amax().powi(h.n() as i32) {
        (&k0 + k0.transpose()) * 0.5
    } else {
        let b1 = path
            .get(1)
            .ok_or_else(|| Error::InvalidInput("K(0) is singular and the path has no second sample".into()))?;
        (&b1.b + b1.b.transpose()) * 0.5
    };
    let eig = SymmetricEigen::new(probe);
    let scale = eig.eigenvalues.amax();
    let mut signature = 0i32;
    for &x in eig.eigenvalues.iter() {
        if x.abs() <= 1e-12 * scale {
            return Err(Error::caustic(0.0, "B is singular immediately after t = 0"));
        }
        signature += if x > 0.0 { 1 } else { -1 };
    }
    Ok(-PI / 4.0 * signature as f64)
}

/// The kernel phase `θ(t)` from samples of `ϑ` and the source response on a
/// uniform grid over `[0, t]` (an odd number of samples, as produced by
/// [`trajectory`]).
pub fn phase_theta(h: &QuadraticHamiltonian, path: &[SymplecticBlocks], responses: &[SourceResponse]) -> Result<f64> {
    if path.is_empty() || path.len() != responses.len() {
        return Err(Error::dimension("phase path samples", path.len(), responses.len()));
    }
    if path[0].t != 0.0 {
        return Err(Error::InvalidInput("the phase path must start at t = 0".into()));
    }
    if let Some(tc) = first_caustic(path) {
        return Err(Error::caustic(
            tc,
            "the path meets a caustic; continuing past it needs the Maslov correction",
        ));
    }
    let theta0 = initial_phase(h, path)?;
    if !h.has_sources() || path.len() == 1 {
        return Ok(theta0);
    }
    if path.len().is_multiple_of(2) {
        return Err(Error::Resolution(format!(
            "phase quadrature needs an odd number of samples, got {}",
            path.len()
        )));
    }
    let spacing = path[1].t - path[0].t;
    let hbar = h.hbar();
    let mut integrand = Vec::with_capacity(path.len());
    for (blocks, resp) in path.iter().zip(responses) {
        if ((blocks.t - resp.t).abs()) > 1e-12 * (1.0 + blocks.t.abs()) {
            return Err(Error::InvalidInput("path and response times disagree".into()));
        }
        let zeta = resp.zeta()?;
        let k = h.k_at(blocks.t)?;
        let nu = h.nu_at(blocks.t)?;
        integrand.push((nu.dot(zeta) - 0.5 * zeta.dot(&(k * zeta))) / hbar);
    }
    Ok(theta0 + simpson(&integrand, spacing)?)
}

/// Assembles the kernel coefficients at `blocks.t`.
pub fn kernel_params(blocks: &SymplecticBlocks, resp: &SourceResponse, theta: f64, hbar: f64) -> Result<KernelParams> {
    if !(hbar > 0.0) {
        return Err(Error::InvalidInput(format!("ħ must be positive, got {hbar}")));
    }
    let n = blocks.n();
    if resp.eta.len() != n {
        return Err(Error::dimension("source response", n, resp.eta.len()));
    }
    blocks.check_caustic()?;
    let lu = blocks.b.clone().lu();
    let det = lu.determinant();
    let binv = lu
        .try_inverse()
        .ok_or_else(|| Error::caustic(blocks.t, "position block B is singular"))?;
    let zeta = resp.zeta()?.clone();
    Ok(KernelParams {
        t: blocks.t,
        n,
        dbinv: &blocks.d * &binv,
        binva: &binv * &blocks.a,
        binv_eta: &binv * &resp.eta,
        binv,
        zeta,
        eta: resp.eta.clone(),
        theta_phase: theta,
        log_amp: -(n as f64) / 2.0 * (2.0 * PI * hbar).ln() - 0.5 * det.abs().ln(),
        hbar,
    })
}

/// Kernel coefficients of `h` at time `t`, integrating with steps of at most `step`.
pub fn propagator(h: &QuadraticHamiltonian, t: f64, step: f64) -> Result<KernelParams> {
    let traj = trajectory(h, t, step)?;
    let theta = phase_theta(h, &traj.blocks, &traj.responses)?;
    let (blocks, resp) = traj.end();
    kernel_params(blocks, resp, theta, h.hbar())
}

/// `K(q, t | q′, 0)`.
pub fn kernel_eval(params: &KernelParams, q: &DVector<f64>, q_prime: &DVector<f64>) -> Result<Complex64> {
    if q.len() != params.n || q_prime.len() != params.n {
        return Err(Error::dimension("kernel arguments", params.n, q.len().max(q_prime.len())));
    }
    let action = 0.5 * q.dot(&(&params.dbinv * q)) + 0.5 * q_prime.dot(&(&params.binva * q_prime))
        - q_prime.dot(&(&params.binv * q))
        + q.dot(&params.zeta)
        + q_prime.dot(&params.binv_eta);
    Ok(Complex64::new(params.log_amp, params.theta_phase + action / params.hbar).exp())
}

/// Coefficients `(f, g)` of the one-mode kernel for `H = p²/2m + ½ z q²`:
/// `f = √(mz)·cot(t√(z/m))`, `g = √(mz)/sin(t√(z/m))`, with the free-particle
/// limit `f = g = m/t` at `z = 0` and the hyperbolic continuation for `z < 0`.
pub fn mode_kernel(z: f64, t: f64, m: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("mode kernel needs t > 0, got {t}")));
    }
    if !(m > 0.0) || !z.is_finite() {
        return Err(Error::InvalidInput(format!("invalid mode parameters z = {z}, m = {m}")));
    }
    let x2 = t * t * z / m;
    if x2.abs() < 1e-8 {
        let free = m / t;
        return Ok((free * (1.0 - x2 / 3.0), free * (1.0 + x2 / 6.0)));
    }
    if z > 0.0 {
        let x = x2.sqrt();
        let s = x.sin();
        if s.abs() < 1e-10 {
            return Err(Error::caustic(t, format!("mode with z = {z} has sin(ωt) = {s:e}")));
        }
        let a = (m * z).sqrt();
        Ok((a * x.cos() / s, a / s))
    } else {
        let x = (-x2).sqrt();
        let a = (-m * z).sqrt();
        Ok((a * x.cosh() / x.sinh(), a / x.sinh()))
    }
}
