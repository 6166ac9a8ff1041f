//! A displaced ground state of a forced two-site chain, evolved on a grid of
//! normal-mode coordinates. The Hamiltonian is constant, so the state is
//! advanced in short steps that stay far from the modes' caustics.

use std::f64::consts::PI;

use quadprop::chains::{build_z, decompose, Boundary, ChainSpec};
use quadprop::propagator::{evolve_wavefunction, Axis, EvolveOptions, GridState, ModeDrive};
use quadprop::quadform::TimeDependence;
use quadprop::{Complex64, DVector, Result};

fn main() -> Result<()> {
    let (m, hbar) = (1.0, 1.0);
    let spec = ChainSpec::new(2, m, 1.0, Boundary::Dirichlet)?
        .with_force(TimeDependence::Constant(DVector::from_vec(vec![0.2, 0.0])))?;
    let h = spec.hamiltonian(hbar)?;
    let modes = decompose(&build_z(&spec)?, m)?;

    let widths: Vec<f64> = modes.omega.iter().map(|w| (hbar / (m * w)).sqrt()).collect();
    let axis = Axis::new(-6.0, 6.0, 121)?;
    let psi0 = GridState::from_fn(vec![axis, axis], |y| {
        (0..2)
            .map(|k| {
                let (c, w) = (if k == 0 { 1.0 } else { 0.0 }, widths[k]);
                Complex64::new(-(y[k] - c).powi(2) / (2.0 * w * w), 0.0).exp() * (PI * w * w).powf(-0.25)
            })
            .product()
    })?;

    let dt = 0.25;
    let drive = ModeDrive::from_hamiltonian(&h, &modes, dt, 1e-3)?;
    let mut psi = psi0;
    println!("{:>5} {:>12} {:>10} {:>10}", "t", "norm", "⟨q̃₁⟩", "⟨q̃₂⟩");
    for i in 0..=24 {
        if i > 0 {
            psi = evolve_wavefunction(&modes, &drive, &psi, dt, &EvolveOptions::default())?;
        }
        let t = dt * i as f64;
        println!("{t:>5.2} {:>12.9} {:>10.6} {:>10.6}", psi.norm(), psi.mean(0), psi.mean(1));
    }
    Ok(())
}
