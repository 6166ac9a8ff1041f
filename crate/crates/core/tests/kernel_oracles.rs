//! The general Gaussian kernel checked against independent oracles: the
//! Schrödinger equation by finite differences, classical moments from a
//! separately integrated Hamilton flow, and the normal-mode grid route.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use quadprop::chains::{build_z, decompose, Boundary, ChainSpec};
use quadprop::propagator::{
    evolve_wavefunction, kernel_eval, propagator, Axis, EvolveOptions, GridState, KernelParams, ModeDrive,
};
use quadprop::quadform::{Profile, QuadraticHamiltonian, TimeDependence};

fn c(x: f64) -> TimeDependence<DMatrix<f64>> {
    TimeDependence::Constant(DMatrix::from_element(1, 1, x))
}

fn cv(x: f64) -> TimeDependence<DVector<f64>> {
    TimeDependence::Constant(DVector::from_element(1, x))
}

/// `½Zq² + ½L(qp + pq) + ½Kp² − μq − νp` in one dimension.
struct Scalar {
    z: f64,
    l: f64,
    k: f64,
    mu: f64,
    nu: f64,
}

impl Scalar {
    fn hamiltonian(&self) -> QuadraticHamiltonian {
        QuadraticHamiltonian::new(1)
            .unwrap()
            .with_z(c(self.z))
            .unwrap()
            .with_l(c(self.l))
            .unwrap()
            .with_k(c(self.k))
            .unwrap()
            .with_mu(cv(self.mu))
            .unwrap()
            .with_nu(cv(self.nu))
            .unwrap()
    }
}

fn kernel_1d(p: &KernelParams, q: f64, qp: f64) -> Complex64 {
    kernel_eval(p, &DVector::from_element(1, q), &DVector::from_element(1, qp)).unwrap()
}

/// `|iħ ∂_t K − Ĥ_q K| / |iħ ∂_t K|` by central differences.
fn schrodinger_residual(h: &QuadraticHamiltonian, s: &Scalar, t: f64, q: f64, qp: f64, hbar: f64) -> f64 {
    let (dt, dq) = (1e-4, 1e-3);
    let at = |tt: f64| propagator(h, tt, 1e-4).unwrap();
    let (pm, p0, pp) = (at(t - dt), at(t), at(t + dt));
    let dkdt = (kernel_1d(&pp, q, qp) - kernel_1d(&pm, q, qp)) / (2.0 * dt);
    let k0 = kernel_1d(&p0, q, qp);
    let (kl, kr) = (kernel_1d(&p0, q - dq, qp), kernel_1d(&p0, q + dq, qp));
    let d1 = (kr - kl) / (2.0 * dq);
    let d2 = (kr - 2.0 * k0 + kl) / (dq * dq);
    let i = Complex64::new(0.0, 1.0);
    // p = −iħ∂, ½(qp + pq) = −iħ(q∂ + ½)
    let hk = 0.5 * s.z * q * q * k0 - i * hbar * s.l * (q * d1 + 0.5 * k0) - 0.5 * s.k * hbar * hbar * d2
        - s.mu * q * k0
        + i * hbar * s.nu * d1;
    let lhs = i * hbar * dkdt;
    (lhs - hk).norm() / lhs.norm()
}

#[test]
fn general_kernel_solves_schrodinger_equation() {
    let s = Scalar {
        z: 1.3,
        l: 0.4,
        k: 0.8,
        mu: 0.6,
        nu: -0.35,
    };
    let hbar = 0.7;
    let h = s.hamiltonian().with_hbar(hbar).unwrap();
    for (t, q, qp) in [(0.3, 0.5, -0.2), (0.9, -1.1, 0.7), (1.6, 0.2, 1.4)] {
        let r = schrodinger_residual(&h, &s, t, q, qp, hbar);
        assert!(r < 1e-5, "t = {t}, q = {q}: residual {r:e}");
    }
}

#[test]
fn time_dependent_kernel_solves_schrodinger_equation() {
    // Z(t) = z₀(1 + 0.2t)²; the finite-difference check uses Z at the centre time
    let s0 = Scalar {
        z: 1.0,
        l: 0.0,
        k: 1.0,
        mu: 0.3,
        nu: 0.2,
    };
    let h = s0
        .hamiltonian()
        .with_z(TimeDependence::preset(DMatrix::from_element(1, 1, 1.0), Profile::SquaredRamp { rate: 0.2 }).unwrap())
        .unwrap();
    for (t, q, qp) in [(0.5_f64, 0.3, -0.4), (1.2, -0.8, 0.5)] {
        let s = Scalar {
            z: (1.0 + 0.2 * t).powi(2),
            ..s0
        };
        let r = schrodinger_residual(&h, &s, t, q, qp, 1.0);
        assert!(r < 1e-5, "t = {t}: residual {r:e}");
    }
}

/// Classical flow `q̇ = Lq + Kp − ν`, `ṗ = −Zq − Lp + μ` by RK4.
fn classical(s: &Scalar, q0: f64, p0: f64, t: f64) -> (f64, f64) {
    let f = |q: f64, p: f64| (s.l * q + s.k * p - s.nu, -s.z * q - s.l * p + s.mu);
    let steps = 20_000;
    let h = t / steps as f64;
    let (mut q, mut p) = (q0, p0);
    for _ in 0..steps {
        let k1 = f(q, p);
        let k2 = f(q + 0.5 * h * k1.0, p + 0.5 * h * k1.1);
        let k3 = f(q + 0.5 * h * k2.0, p + 0.5 * h * k2.1);
        let k4 = f(q + h * k3.0, p + h * k3.1);
        q += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        p += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    (q, p)
}

#[test]
fn kernel_moves_wavepacket_along_classical_path() {
    let s = Scalar {
        z: 0.9,
        l: -0.3,
        k: 1.1,
        mu: 0.5,
        nu: 0.25,
    };
    let h = s.hamiltonian();
    let (q0, p0, w) = (0.7, -0.4, 0.9);
    let x: Vec<f64> = (0..500).map(|i| -10.0 + 20.0 * i as f64 / 499.0).collect();
    let dx = x[1] - x[0];
    let psi0: Vec<Complex64> = x
        .iter()
        .map(|&y| Complex64::new(-(y - q0).powi(2) / (2.0 * w * w), p0 * y).exp() * (PI * w * w).powf(-0.25))
        .collect();
    for t in [0.4, 1.1] {
        let params = propagator(&h, t, 1e-3).unwrap();
        let psi: Vec<Complex64> = x
            .iter()
            .map(|&q| x.iter().zip(&psi0).map(|(&qp, a)| kernel_1d(&params, q, qp) * a).sum::<Complex64>() * dx)
            .collect();
        let norm: f64 = psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx;
        let mean_q: f64 = x.iter().zip(&psi).map(|(q, v)| q * v.norm_sqr()).sum::<f64>() * dx / norm;
        let mean_p: f64 = (1..x.len() - 1)
            .map(|i| (psi[i].conj() * Complex64::new(0.0, -1.0) * (psi[i + 1] - psi[i - 1]) / (2.0 * dx)).re)
            .sum::<f64>()
            * dx
            / norm;
        let (qc, pc) = classical(&s, q0, p0, t);
        assert!((norm - 1.0).abs() < 1e-8, "norm {norm}");
        assert!((mean_q - qc).abs() < 1e-6, "t = {t}: ⟨q⟩ {mean_q} vs {qc}");
        assert!((mean_p - pc).abs() < 1e-3, "t = {t}: ⟨p⟩ {mean_p} vs {pc}");
    }
}

#[test]
fn mode_grid_agrees_with_general_kernel_for_driven_chain() {
    let (m, w0, hbar, t) = (1.0, 1.0, 1.0, 0.8);
    let spec = ChainSpec::new(2, m, w0, Boundary::Dirichlet)
        .unwrap()
        .with_force(TimeDependence::preset(DVector::from_vec(vec![0.3, -0.1]), Profile::Ramp { rate: 0.5 }).unwrap())
        .unwrap();
    let h = spec.hamiltonian(hbar).unwrap();
    let modes = decompose(&build_z(&spec).unwrap(), m).unwrap();

    let centers = [0.5, -0.3];
    let widths: Vec<f64> = modes.omega.iter().map(|w| (hbar / (m * w)).sqrt()).collect();
    let psi0_modes = |y: &[f64]| -> Complex64 {
        (0..2)
            .map(|k| {
                let (c, w) = (centers[k], widths[k]);
                Complex64::new(-(y[k] - c).powi(2) / (2.0 * w * w), 0.0).exp() * (PI * w * w).powf(-0.25)
            })
            .product()
    };
    let axis = Axis::new(-6.0, 6.0, 81).unwrap();
    let grid0 = GridState::from_fn(vec![axis, axis], psi0_modes).unwrap();
    let drive = ModeDrive::from_hamiltonian(&h, &modes, t, 1e-3).unwrap();
    let on_grid = evolve_wavefunction(&modes, &drive, &grid0, t, &EvolveOptions::default()).unwrap();

    let params = propagator(&h, t, 1e-3).unwrap();
    let x = axis.points();
    let dv = axis.spacing().powi(2);
    for flat in [81 * 40 + 40, 81 * 45 + 33, 81 * 30 + 50] {
        let y = on_grid.point(flat);
        let q = modes.to_sites(&DVector::from_column_slice(&y)).unwrap();
        let mut sum = Complex64::new(0.0, 0.0);
        for &a in &x {
            for &b in &x {
                let qp = DVector::from_vec(vec![a, b]);
                let yp = modes.to_modes(&qp).unwrap();
                sum += kernel_eval(&params, &q, &qp).unwrap() * psi0_modes(yp.as_slice());
            }
        }
        let direct = sum * dv;
        let diff = (direct - on_grid.values()[flat]).norm();
        assert!(diff < 1e-6, "point {y:?}: {direct} vs {}", on_grid.values()[flat]);
    }
}

#[test]
fn driven_oscillator_ground_state_tracks_forced_path() {
    let (m, w, f0) = (1.0, 1.2, 0.4);
    let h = QuadraticHamiltonian::oscillator(1, m, w).unwrap().with_mu(cv(f0)).unwrap();
    let modes = decompose(&DMatrix::from_element(1, 1, m * w * w), m).unwrap();
    let axis = Axis::new(-8.0, 8.0, 401).unwrap();
    let width = (1.0 / (m * w)).sqrt();
    let psi0 = GridState::from_fn(vec![axis], |y| {
        Complex64::new(-y[0] * y[0] / (2.0 * width * width), 0.0).exp() * (PI * width * width).powf(-0.25)
    })
    .unwrap();
    for t in [0.5, 1.5, 2.5] {
        let drive = ModeDrive::from_hamiltonian(&h, &modes, t, 1e-3).unwrap();
        let psi = evolve_wavefunction(&modes, &drive, &psi0, t, &EvolveOptions::default()).unwrap();
        let want = f0 / (m * w * w) * (1.0 - (w * t).cos());
        assert!((psi.mean(0) - want).abs() < 1e-8, "t = {t}: {} vs {want}", psi.mean(0));
    }
}
