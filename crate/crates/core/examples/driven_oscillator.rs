//! Kernel of a forced oscillator `p²/2m + ½mω²q² − f₀q`: fundamental matrix
//! blocks, source terms, phase, and a few kernel values.

use std::f64::consts::PI;

use quadprop::evolution::{fundamental_matrix, source_response};
use quadprop::propagator::{kernel_eval, propagator};
use quadprop::quadform::{QuadraticHamiltonian, TimeDependence};
use quadprop::{DVector, Result};

fn main() -> Result<()> {
    let (m, w, f0) = (1.0, 2.0, 0.5);
    let h = QuadraticHamiltonian::oscillator(1, m, w)?.with_mu(TimeDependence::Constant(DVector::from_element(1, f0)))?;

    println!("{:>6} {:>10} {:>10} {:>10} {:>10} {:>10}", "ωt", "A", "B", "ζ", "θ", "|K(0,0)|");
    for wt in [0.25, 0.5, 1.0, 2.0, 3.0] {
        let t = wt / w;
        let f = fundamental_matrix(&h, t, 1e-3)?;
        let resp = source_response(&h, t, 1e-3)?;
        let p = propagator(&h, t, 1e-3)?;
        let k = kernel_eval(&p, &DVector::zeros(1), &DVector::zeros(1))?;
        println!(
            "{wt:>6.2} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            f.blocks.a[(0, 0)],
            f.blocks.b[(0, 0)],
            resp.zeta()?[0],
            p.theta_phase,
            k.norm()
        );
    }

    // ωt = π focuses every path onto one point: the kernel is refused there
    match propagator(&h, PI / w, 1e-3) {
        Err(e) => println!("at ωt = π: {e}"),
        Ok(_) => println!("at ωt = π: unexpectedly finite"),
    }
    Ok(())
}
