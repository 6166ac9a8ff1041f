//! A chain driven on its first site, starting from the vacuum: site
//! occupations from the per-mode closed form, checked against brute-force
//! evolution in a truncated Fock space.

use quadprop::ladder::{fock_oracle, forced_response, FockInitial, LadderChain};
use quadprop::quadform::{Profile, TimeDependence};
use quadprop::Result;

fn main() -> Result<()> {
    let chain = LadderChain::new(3, 1.0, 0.3)?
        .with_drive(TimeDependence::preset(0.08, Profile::Cosine { frequency: 1.0, phase: 0.0 })?);
    println!("{:>5}  {:>28}  {:>10}", "t", "⟨n₁⟩ ⟨n₂⟩ ⟨n₃⟩", "oracle Δ");
    for i in 1..=6 {
        let t = 2.0 * i as f64;
        let r = forced_response(&chain, t, 1e-3)?;
        let oracle = fock_oracle(&chain, t, 6, &FockInitial::Vacuum)?;
        let occ: Vec<String> = r.occupations.iter().map(|x| format!("{x:.6}")).collect();
        println!("{t:>5.1}  {}  {:>10.2e}", occ.join(" "), (&r.occupations - oracle).amax());
    }
    Ok(())
}
