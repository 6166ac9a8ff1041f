//! The share of the initial site-1 occupation found on site j does not depend
//! on which state site 1 started in: coherent, Fock and superposition states
//! evolved in a truncated Fock space all give `|⟨1|e^{−iΛt}|j⟩|²`.

use quadprop::ladder::{excitation_ratio, fock_oracle, FockInitial, LadderChain};
use quadprop::{Complex64, Result};

fn main() -> Result<()> {
    let chain = LadderChain::new(3, 1.0, 0.4)?;
    let t = 2.5;
    let alpha = Complex64::new(0.6, 0.3);
    let mix = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.8)];
    let initials = [
        ("coherent", FockInitial::Coherent(alpha), alpha.norm_sqr()),
        ("Fock |2⟩", FockInitial::Fock(2), 2.0),
        ("0.6|0⟩ + 0.8i|2⟩", FockInitial::Amplitudes(mix), 0.64 * 2.0),
    ];
    for j in 1..=3 {
        print!("site {j}: closed form {:.8}", excitation_ratio(&chain, t, j)?);
        for (name, init, n0) in &initials {
            let occ = fock_oracle(&chain, t, 8, init)?;
            print!(" | {name} {:.8}", occ[j - 1] / n0);
        }
        println!();
    }
    Ok(())
}
