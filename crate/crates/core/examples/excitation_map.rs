//! Transport of a single excitation along a 20-site chain: a coarse text
//! rendering of `P(site, τ)` followed by the end-to-end probability of a few
//! chain lengths.

use quadprop::ladder::{end_to_end_map, scaled_times, transition_map, LadderChain};
use quadprop::Result;

fn main() -> Result<()> {
    let n = 20;
    let chain = LadderChain::new(n, 1.0, 0.1)?;
    let taus = scaled_times(24.0, 0.5)?;
    let sites: Vec<usize> = (1..=n).collect();
    let map = transition_map(&chain, &sites, &taus)?;

    let shades = [' ', '.', ':', '-', '=', '+', '*', '#', '%', '@'];
    println!("site → (columns), τ ↓ (rows, Δτ = 0.5)");
    for (c, tau) in map.taus.iter().enumerate() {
        let line: String = (0..n)
            .map(|r| shades[((map.p[(r, c)].sqrt() * 9.0).round() as usize).min(9)])
            .collect();
        println!("{tau:>5.1} |{line}|");
    }

    let lengths = [3, 6, 12];
    let ends = end_to_end_map(1.0, 0.1, &lengths, &scaled_times(12.0, 2.0)?)?;
    println!("\nP(end, τ) for chains of {lengths:?}");
    for (c, tau) in ends.taus.iter().enumerate() {
        let cells: Vec<String> = (0..lengths.len()).map(|r| format!("{:.4}", ends.p[(r, c)])).collect();
        println!("{tau:>5.1}  {}", cells.join("  "));
    }
    Ok(())
}
