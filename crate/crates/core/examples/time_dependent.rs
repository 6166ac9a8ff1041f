//! Oscillator whose frequency grows as `ω(t) = ω₀(1 + rt)`: the fundamental
//! matrix comes from Runge–Kutta integration; the symplectic defect and the
//! first caustic are reported along the path.

use quadprop::evolution::{fundamental_matrix, symplectic_defect, trajectory};
use quadprop::quadform::{Profile, QuadraticHamiltonian, TimeDependence};
use quadprop::{DMatrix, Result};

fn main() -> Result<()> {
    let h = QuadraticHamiltonian::oscillator(1, 1.0, 1.0)?
        .with_z(TimeDependence::preset(DMatrix::identity(1, 1), Profile::SquaredRamp { rate: 0.3 })?)?;

    for step in [1e-1, 1e-2, 1e-3] {
        let f = fundamental_matrix(&h, 4.0, step)?;
        println!(
            "step {step:>6}: {:?}, B(4) = {:.10}, defect {:.2e}",
            f.method,
            f.blocks.b[(0, 0)],
            symplectic_defect(&f.blocks)
        );
    }

    let path = trajectory(&h, 6.0, 1e-3)?;
    match path.first_caustic {
        Some(t) => println!("first caustic near t = {t:.4} (ω₀t = π would be {:.4} without the ramp)", std::f64::consts::PI),
        None => println!("no caustic before t = 6"),
    }
    Ok(())
}
