//! Classical flow of a quadratic Hamiltonian.
//!
//! The fundamental matrix `ϑ(t) = [[A, B], [C, D]]` solves
//! `dϑ/dt = s·w(t)·ϑ`, `ϑ(0) = 1`, and maps initial canonical operators to
//! their Heisenberg-picture values: `q(t) = A q + B p + η`,
//! `p(t) = C q + D p + ξ`. The driven displacements `η`, `ξ` come from the
//! Green function `ϑ(t)·ϑ⁻¹(t′)` applied to the source column `(−ν, μ)`.
//!
//! Three routes produce `ϑ(t)`:
//!
//! * constant generator, `L = 0`, `K` positive definite: closed form through
//!   the normal modes of `K^{1/2}·Z·K^{1/2}` (oscillating, free and inverted
//!   modes all handled);
//! * any other constant generator: dense matrix exponential;
//! * time-dependent generator: fixed-step classical Runge–Kutta.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::quadform::{symplectic_form, symplectic_generator, QuadraticHamiltonian};
use crate::quadrature::{intervals, simpson_cumulative};

/// Default bound on `‖A·Dᵀ − B·Cᵀ − 1‖_max`.
pub const SYMPLECTIC_TOL: f64 = 1e-9;

/// `B` is treated as singular when `σ_min(B) ≤ CAUSTIC_TOL · max(σ_max(B), b_reference)`.
pub const CAUSTIC_TOL: f64 = 1e-10;

/// The four `n×n` blocks of `ϑ(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticBlocks {
    pub t: f64,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
    /// Magnitude `B` would have under free flight (`∫₀ᵗ ‖K‖`), used as the
    /// absolute scale when looking for caustics. Zero disables the absolute test.
    pub b_reference: f64,
}

impl SymplecticBlocks {
    pub fn identity(n: usize) -> Self {
        SymplecticBlocks {
            t: 0.0,
            a: DMatrix::identity(n, n),
            b: DMatrix::zeros(n, n),
            c: DMatrix::zeros(n, n),
            d: DMatrix::identity(n, n),
            b_reference: 0.0,
        }
    }

    /// Splits a `2n×2n` matrix into blocks.
    pub fn from_matrix(t: f64, m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) || m.nrows() == 0 {
            return Err(Error::InvalidInput(format!(
                "fundamental matrix must be square of even size, got {}×{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = m.nrows() / 2;
        Ok(SymplecticBlocks {
            t,
            a: m.view((0, 0), (n, n)).into_owned(),
            b: m.view((0, n), (n, n)).into_owned(),
            c: m.view((n, 0), (n, n)).into_owned(),
            d: m.view((n, n), (n, n)).into_owned(),
            b_reference: 0.0,
        })
    }

    pub fn with_b_reference(mut self, b_reference: f64) -> Self {
        self.b_reference = b_reference;
        self
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.a);
        m.view_mut((0, n), (n, n)).copy_from(&self.b);
        m.view_mut((n, 0), (n, n)).copy_from(&self.c);
        m.view_mut((n, n), (n, n)).copy_from(&self.d);
        m
    }

    /// `ϑ⁻¹ = −s·ϑᵀ·s`, exact for symplectic `ϑ`.
    pub fn symplectic_inverse(&self) -> DMatrix<f64> {
        let s = symplectic_form(self.n());
        -(&s * self.to_matrix().transpose() * &s)
    }

    /// Inverse of `ϑ`, through the symplectic identity when the defect allows it.
    pub fn inverse(&self) -> Result<DMatrix<f64>> {
        if symplectic_defect(self) <= SYMPLECTIC_TOL {
            Ok(self.symplectic_inverse())
        } else {
            self.to_matrix()
                .try_inverse()
                .ok_or(Error::SingularFundamental { t: self.t })
        }
    }

    pub fn is_caustic(&self) -> bool {
        let sv = self.b.singular_values();
        let smax = sv.max();
        let smin = sv.min();
        smax == 0.0 || smin <= CAUSTIC_TOL * smax.max(self.b_reference)
    }

    /// Fails with [`Error::Caustic`] when `B` is singular.
    pub fn check_caustic(&self) -> Result<()> {
        if self.t == 0.0 {
            return Err(Error::caustic(0.0, "the kernel at t = 0 is a delta function"));
        }
        if self.is_caustic() {
            return Err(Error::caustic(self.t, "position block B is singular"));
        }
        Ok(())
    }
}

/// `‖A·Dᵀ − B·Cᵀ − 1‖_max`.
pub fn symplectic_defect(blocks: &SymplecticBlocks) -> f64 {
    let n = blocks.n();
    let r = &blocks.a * blocks.d.transpose() - &blocks.b * blocks.c.transpose() - DMatrix::identity(n, n);
    r.amax()
}

/// How a fundamental matrix was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Closed form through the normal modes of a constant generator with `L = 0`.
    Modal,
    /// Dense matrix exponential of `t·s·w`.
    Exponential,
    /// Classical fourth-order Runge–Kutta with the given number of steps.
    RungeKutta { steps: usize },
}

/// Output of [`fundamental_matrix`].
#[derive(Debug, Clone)]
pub struct Fundamental {
    pub blocks: SymplecticBlocks,
    pub defect: f64,
    pub method: Method,
}

/// Cosine-like, sine-like and derivative factors of a mode with `ω² = lambda`:
/// `(cos ωt, sin(ωt)/ω, ω sin ωt)`, continued to `ω² ≤ 0`.
fn mode_factors(lambda: f64, t: f64) -> (f64, f64, f64) {
    let x = lambda * t * t;
    let (c, s) = if x.abs() < 1e-8 {
        (1.0 - x / 2.0 + x * x / 24.0, t * (1.0 - x / 6.0 + x * x / 120.0))
    } else if lambda > 0.0 {
        let w = lambda.sqrt();
        ((w * t).cos(), (w * t).sin() / w)
    } else {
        let k = (-lambda).sqrt();
        ((k * t).cosh(), (k * t).sinh() / k)
    };
    (c, s, lambda * s)
}

/// Closed-form flow for `H = ½ q·Z·q + ½ p·K·p` with constant `Z` and positive definite `K`.
#[derive(Debug, Clone)]
struct ModalFlow {
    k_half: DMatrix<f64>,
    k_half_inv: DMatrix<f64>,
    modes: DMatrix<f64>,
    lambdas: DVector<f64>,
    k_norm: f64,
}

impl ModalFlow {
    fn new(z: &DMatrix<f64>, k: &DMatrix<f64>) -> Option<Self> {
        let ks = (k + k.transpose()) * 0.5;
        let eig = SymmetricEigen::new(ks);
        let kmax = eig.eigenvalues.amax();
        if kmax == 0.0 || eig.eigenvalues.min() <= 1e-12 * kmax {
            return None;
        }
        let q = &eig.eigenvectors;
        let sqrt = eig.eigenvalues.map(f64::sqrt);
        let k_half = q * DMatrix::from_diagonal(&sqrt) * q.transpose();
        let k_half_inv = q * DMatrix::from_diagonal(&sqrt.map(|x| 1.0 / x)) * q.transpose();
        let m = &k_half * z * &k_half;
        let m = (&m + m.transpose()) * 0.5;
        let eig = SymmetricEigen::new(m);
        Some(ModalFlow {
            k_half,
            k_half_inv,
            modes: eig.eigenvectors,
            lambdas: eig.eigenvalues,
            k_norm: k.amax(),
        })
    }

    fn blocks(&self, t: f64) -> SymplecticBlocks {
        let len = self.lambdas.len();
        let mut cs = DVector::zeros(len);
        let mut ss = DVector::zeros(len);
        let mut ws = DVector::zeros(len);
        for (i, &lambda) in self.lambdas.iter().enumerate() {
            let (c, s, w) = mode_factors(lambda, t);
            cs[i] = c;
            ss[i] = s;
            ws[i] = w;
        }
        let u = &self.modes;
        let ut = u.transpose();
        let sandwich = |diag: &DVector<f64>| u * DMatrix::from_diagonal(diag) * &ut;
        let cos = sandwich(&cs);
        let sin = sandwich(&ss);
        let der = sandwich(&ws);
        SymplecticBlocks {
            t,
            a: &self.k_half * &cos * &self.k_half_inv,
            b: &self.k_half * &sin * &self.k_half,
            c: -(&self.k_half_inv * &der * &self.k_half_inv),
            d: &self.k_half_inv * &cos * &self.k_half,
            b_reference: t * self.k_norm,
        }
    }
}

#[derive(Debug, Clone)]
enum Flow {
    Modal(ModalFlow),
    Exponential { generator: DMatrix<f64>, k_norm: f64 },
    Integrated,
}

fn flow_for(h: &QuadraticHamiltonian) -> Result<Flow> {
    if !h.has_constant_generator() {
        return Ok(Flow::Integrated);
    }
    let z = h.z_at(0.0)?;
    let l = h.l_at(0.0)?;
    let k = h.k_at(0.0)?;
    if l.iter().all(|x| *x == 0.0) {
        if let Some(flow) = ModalFlow::new(&z, &k) {
            return Ok(Flow::Modal(flow));
        }
    }
    Ok(Flow::Exponential {
        generator: symplectic_generator(h, 0.0)?,
        k_norm: k.amax(),
    })
}

fn check_time_and_step(h: &QuadraticHamiltonian, t: f64, step: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("time must be non-negative and finite, got {t}")));
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidInput(format!("step must be positive and finite, got {step}")));
    }
    h.check_covers(t)
}

/// One classical Runge–Kutta step of `dϑ/dt = s·w(t)·ϑ`; also returns the
/// Simpson estimate of `∫‖K‖` over the step.
fn rk4_step(h: &QuadraticHamiltonian, t: f64, dt: f64, theta: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let n = h.n();
    let g0 = symplectic_generator(h, t)?;
    let gm = symplectic_generator(h, t + 0.5 * dt)?;
    let g1 = symplectic_generator(h, t + dt)?;
    let k1 = &g0 * theta;
    let k2 = &gm * (theta + &k1 * (0.5 * dt));
    let k3 = &gm * (theta + &k2 * (0.5 * dt));
    let k4 = &g1 * (theta + &k3 * dt);
    let next = theta + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    let knorm = |g: &DMatrix<f64>| g.view((0, n), (n, n)).amax();
    let dref = dt / 6.0 * (knorm(&g0) + 4.0 * knorm(&gm) + knorm(&g1));
    Ok((next, dref))
}

/// The fundamental matrix `ϑ(t)` with its symplectic defect.
///
/// `step` bounds the Runge–Kutta step for time-dependent generators and is
/// ignored by the closed-form routes.
pub fn fundamental_matrix(h: &QuadraticHamiltonian, t: f64, step: f64) -> Result<Fundamental> {
    check_time_and_step(h, t, step)?;
    let (blocks, method) = match flow_for(h)? {
        Flow::Modal(flow) => (flow.blocks(t), Method::Modal),
        Flow::Exponential { generator, k_norm } => {
            let m = (generator * t).exp();
            (SymplecticBlocks::from_matrix(t, &m)?.with_b_reference(t * k_norm), Method::Exponential)
        }
        Flow::Integrated => {
            let steps = (t / step).ceil().max(1.0) as usize;
            let dt = t / steps as f64;
            let mut theta = DMatrix::identity(2 * h.n(), 2 * h.n());
            let mut b_ref = 0.0;
            for i in 0..steps {
                let (next, dref) = rk4_step(h, i as f64 * dt, dt, &theta)?;
                theta = next;
                b_ref += dref;
            }
            (
                SymplecticBlocks::from_matrix(t, &theta)?.with_b_reference(b_ref),
                Method::RungeKutta { steps },
            )
        }
    };
    let defect = symplectic_defect(&blocks);
    Ok(Fundamental { blocks, defect, method })
}

/// Fundamental matrices on the uniform grid `t_i = i·t/intervals`.
fn fundamental_path(h: &QuadraticHamiltonian, t: f64, intervals: usize) -> Result<(Vec<SymplecticBlocks>, Method)> {
    let dt = t / intervals as f64;
    let n = h.n();
    let mut path = Vec::with_capacity(intervals + 1);
    let method = match flow_for(h)? {
        Flow::Modal(flow) => {
            for i in 0..=intervals {
                path.push(flow.blocks(i as f64 * dt));
            }
            Method::Modal
        }
        Flow::Exponential { generator, k_norm } => {
            let step = (&generator * dt).exp();
            let mut theta = DMatrix::identity(2 * n, 2 * n);
            for i in 0..=intervals {
                let ti = i as f64 * dt;
                path.push(SymplecticBlocks::from_matrix(ti, &theta)?.with_b_reference(ti * k_norm));
                theta = &step * theta;
            }
            Method::Exponential
        }
        Flow::Integrated => {
            let mut theta = DMatrix::identity(2 * n, 2 * n);
            let mut b_ref = 0.0;
            path.push(SymplecticBlocks::identity(n));
            for i in 0..intervals {
                let (next, dref) = rk4_step(h, i as f64 * dt, dt, &theta)?;
                theta = next;
                b_ref += dref;
                path.push(SymplecticBlocks::from_matrix((i + 1) as f64 * dt, &theta)?.with_b_reference(b_ref));
            }
            Method::RungeKutta { steps: intervals }
        }
    };
    Ok((path, method))
}

/// Matrix Green function `ϑ(t)·ϑ⁻¹(t′)` for `t ≥ t′`.
pub fn green_function(theta_t: &SymplecticBlocks, theta_tp: &SymplecticBlocks) -> Result<DMatrix<f64>> {
    if theta_t.n() != theta_tp.n() {
        return Err(Error::dimension("Green function blocks", theta_t.n(), theta_tp.n()));
    }
    if theta_t.t < theta_tp.t {
        return Err(Error::InvalidInput(format!(
            "Green function needs t ≥ t′, got t = {} and t′ = {}",
            theta_t.t, theta_tp.t
        )));
    }
    Ok(theta_t.to_matrix() * theta_tp.inverse()?)
}

/// Driven displacements at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceResponse {
    pub t: f64,
    /// Position shift `η(t)`.
    pub eta: DVector<f64>,
    /// Momentum shift `ξ(t)`.
    pub xi: DVector<f64>,
    /// `ζ = ξ − D·B⁻¹·η`; `None` when `B` is singular at `t`.
    pub zeta: Option<DVector<f64>>,
}

impl SourceResponse {
    pub fn zero(n: usize, t: f64) -> Self {
        SourceResponse {
            t,
            eta: DVector::zeros(n),
            xi: DVector::zeros(n),
            zeta: Some(DVector::zeros(n)),
        }
    }

    /// `ζ`, or [`Error::Caustic`] when it is unavailable.
    pub fn zeta(&self) -> Result<&DVector<f64>> {
        self.zeta
            .as_ref()
            .ok_or_else(|| Error::caustic(self.t, "ζ needs B⁻¹"))
    }
}

/// `ζ = ξ − D·B⁻¹·η`, or `None` at a caustic.
pub fn zeta_from(blocks: &SymplecticBlocks, eta: &DVector<f64>, xi: &DVector<f64>) -> Option<DVector<f64>> {
    if blocks.t == 0.0 || blocks.is_caustic() {
        return None;
    }
    let binv_eta = blocks.b.clone().lu().solve(eta)?;
    Some(xi - &blocks.d * binv_eta)
}

/// Fundamental matrices and source responses sampled along `[0, t]`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Spacing between consecutive recorded samples.
    pub spacing: f64,
    pub blocks: Vec<SymplecticBlocks>,
    pub responses: Vec<SourceResponse>,
    /// Time of the first caustic met on the integration grid, if any.
    pub first_caustic: Option<f64>,
    pub method: Method,
}

impl Trajectory {
    pub fn end(&self) -> (&SymplecticBlocks, &SourceResponse) {
        (self.blocks.last().unwrap(), self.responses.last().unwrap())
    }
}

/// First grid time at which `B` is singular or passes through a singularity
/// between nodes (an eigenvalue of `B_i⁻¹·B_{i+1}` with negative real part).
pub fn first_caustic(path: &[SymplecticBlocks]) -> Option<f64> {
    for (i, blocks) in path.iter().enumerate().skip(1) {
        if blocks.is_caustic() {
            return Some(blocks.t);
        }
        if i + 1 < path.len() {
            let next = &path[i + 1];
            let ratio = match blocks.b.clone().lu().solve(&next.b) {
                Some(r) => r,
                None => return Some(blocks.t),
            };
            if ratio.complex_eigenvalues().iter().any(|ev| ev.re < 0.0) {
                return Some(next.t);
            }
        }
    }
    None
}

/// Samples `ϑ` and `(η, ξ, ζ)` along `[0, t]` on a uniform grid.
///
/// Responses come from the running Simpson integral of `ϑ⁻¹(t′)·(−ν, μ)(t′)`
/// on a grid of spacing at most `step`; they are recorded at every second
/// node, so the recorded samples are spaced by at most `2·step` and there is
/// an even number of recorded intervals (ready for Simpson in turn).
pub fn trajectory(h: &QuadraticHamiltonian, t: f64, step: f64) -> Result<Trajectory> {
    check_time_and_step(h, t, step)?;
    let n = h.n();
    if t == 0.0 {
        let mut zero = SourceResponse::zero(n, 0.0);
        zero.zeta = initial_zeta(h)?;
        return Ok(Trajectory {
            spacing: 0.0,
            blocks: vec![SymplecticBlocks::identity(n)],
            responses: vec![zero],
            first_caustic: None,
            method: Method::Modal,
        });
    }
    let fine = intervals(t, step, 4)?;
    let dt = t / fine as f64;
    let (path, method) = fundamental_path(h, t, fine)?;
    let caustic = first_caustic(&path);

    let responses = if h.has_sources() {
        let mut integrand = Vec::with_capacity(path.len());
        for blocks in &path {
            integrand.push(blocks.inverse()? * h.source_at(blocks.t)?);
        }
        let running = simpson_cumulative(&integrand, dt)?;
        let mut out = Vec::with_capacity(running.len());
        for (k, acc) in running.iter().enumerate() {
            let blocks = &path[2 * k];
            let v = blocks.to_matrix() * acc;
            let eta = v.rows(0, n).into_owned();
            let xi = v.rows(n, n).into_owned();
            let zeta = if k == 0 { initial_zeta(h)? } else { zeta_from(blocks, &eta, &xi) };
            out.push(SourceResponse { t: blocks.t, eta, xi, zeta });
        }
        out
    } else {
        path.iter()
            .step_by(2)
            .map(|b| {
                let mut r = SourceResponse::zero(n, b.t);
                if b.t > 0.0 && b.is_caustic() {
                    r.zeta = None;
                }
                r
            })
            .collect()
    };
    let blocks: Vec<SymplecticBlocks> = path.into_iter().step_by(2).collect();
    Ok(Trajectory {
        spacing: 2.0 * dt,
        blocks,
        responses,
        first_caustic: caustic,
        method,
    })
}

/// Limit of `ζ(t)` as `t → 0⁺`: `B ≈ t·K` and `η ≈ −t·ν`, so `ζ → K⁻¹·ν(0)`.
fn initial_zeta(h: &QuadraticHamiltonian) -> Result<Option<DVector<f64>>> {
    let nu = h.nu_at(0.0)?;
    if nu.iter().all(|x| *x == 0.0) {
        return Ok(Some(DVector::zeros(h.n())));
    }
    Ok(h.k_at(0.0)?.lu().solve(&nu))
}

/// Driven displacements `(η, ξ, ζ)` at time `t`.
pub fn source_response(h: &QuadraticHamiltonian, t: f64, step: f64) -> Result<SourceResponse> {
    let traj = trajectory(h, t, step)?;
    Ok(traj.responses.last().cloned().expect("trajectory has at least one sample"))
}
