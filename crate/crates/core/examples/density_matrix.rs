//! A mixture of two Gaussian packets of one oscillator mode, propagated as a
//! density matrix `ρ(q, q′)` in steps of ωΔt = 0.5. Trace and hermiticity
//! are checked at each time.

use std::f64::consts::PI;

use quadprop::chains::decompose;
use quadprop::propagator::{
    density_trace, evolve_density, hermiticity_defect, pure_density, Axis, EvolveOptions, GridState, ModeDrive,
};
use quadprop::{Complex64, DMatrix, Result};

fn packet(axis: Axis, center: f64, momentum: f64) -> Result<GridState> {
    GridState::from_fn(vec![axis], |x| {
        Complex64::new(-(x[0] - center).powi(2) / 2.0, momentum * x[0]).exp() * PI.powf(-0.25)
    })
}

fn main() -> Result<()> {
    let modes = decompose(&DMatrix::from_element(1, 1, 1.0), 1.0)?;
    let axis = Axis::new(-8.0, 8.0, 161)?;
    let a = pure_density(&packet(axis, -1.5, 0.0)?);
    let b = pure_density(&packet(axis, 1.5, 0.5)?);
    let values: Vec<Complex64> = a.values().iter().zip(b.values()).map(|(x, y)| 0.5 * (x + y)).collect();
    let rho0 = GridState::new(a.axes().to_vec(), values)?;

    let drive = ModeDrive::none(1);
    let dt = 0.5;
    let mut rho = rho0;
    println!("{:>5} {:>14} {:>12} {:>10}", "t", "trace", "hermiticity", "⟨q⟩");
    for i in 0..=12 {
        if i > 0 {
            rho = evolve_density(&modes, &drive, &rho, dt, &EvolveOptions::default())?;
        }
        let t = dt * i as f64;
        let side = axis.count;
        let mean: f64 = (0..side)
            .map(|j| axis.point(j) * rho.values()[j * side + j].re)
            .sum::<f64>()
            * axis.spacing();
        println!(
            "{t:>5.2} {:>14.10} {:>12.2e} {mean:>10.6}",
            density_trace(&rho)?.re,
            hermiticity_defect(&rho)?
        );
    }
    Ok(())
}
