//! Normal modes of three-site chains with periodic and fixed ends, and the
//! single-mode kernel coefficients `f`, `g` of each mode.

use quadprop::chains::{build_z, decompose, Boundary, ChainSpec};
use quadprop::propagator::mode_kernel;
use quadprop::Result;

fn main() -> Result<()> {
    let (m, w0, t) = (1.0, 1.0, 0.7);
    for boundary in [Boundary::Periodic, Boundary::Dirichlet] {
        let spec = ChainSpec::new(3, m, w0, boundary)?;
        let modes = decompose(&build_z(&spec)?, m)?;
        println!("{boundary:?} chain, n = 3");
        for k in 0..3 {
            let v: Vec<String> = modes.v.column(k).iter().map(|x| format!("{x:+.4}")).collect();
            let (f, g) = mode_kernel(modes.z[k], t, m)?;
            println!(
                "  z = {:.6}  ω = {:.6}  v = ({})  f = {f:.6}  g = {g:.6}",
                modes.z[k],
                modes.omega[k],
                v.join(", ")
            );
        }
    }
    Ok(())
}
