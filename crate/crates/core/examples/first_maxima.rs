//! Arrival times of the first probability maximum at the far end of chains of
//! 3 to 25 sites and the straight line through them.

use quadprop::ladder::{end_to_end_map, first_maxima, scaled_times};
use quadprop::Result;

fn main() -> Result<()> {
    let lengths: Vec<usize> = (3..=25).collect();
    let map = end_to_end_map(1.0, 0.1, &lengths, &scaled_times(30.0, 0.01)?)?;
    let maxima = first_maxima(&map)?;
    for (n, tau) in &maxima.points {
        println!("n = {n:>2}  τ* = {tau:.2}");
    }
    if let Some(fit) = maxima.fit {
        println!(
            "τ* ≈ {:.4}·n + {:.4}  (R² = {:.5}): about {:.3} sites per unit τ",
            fit.slope,
            fit.intercept,
            fit.r2,
            1.0 / fit.slope
        );
    }
    Ok(())
}
