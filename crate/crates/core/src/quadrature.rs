//! Uniform-grid quadrature rules shared by the evolution and transport code.

use std::ops::{Add, Mul};

use crate::error::{Error, Result};

/// Number of intervals for a uniform grid on `[0, span]` with spacing at most
/// `max_step`, rounded up to a multiple of `multiple`.
pub fn intervals(span: f64, max_step: f64, multiple: usize) -> Result<usize> {
    if !(max_step > 0.0) || !max_step.is_finite() {
        return Err(Error::InvalidInput(format!(
            "step must be positive and finite, got {max_step}"
        )));
    }
    if !(span >= 0.0) || !span.is_finite() {
        return Err(Error::InvalidInput(format!(
            "time span must be non-negative and finite, got {span}"
        )));
    }
    let raw = (span / max_step).ceil() as usize;
    let raw = raw.max(1);
    Ok(raw.div_ceil(multiple) * multiple)
}

/// Composite Simpson rule over equally spaced samples.
///
/// Requires an odd number of samples (even number of intervals). A single
/// sample integrates to zero.
pub fn simpson<T>(samples: &[T], spacing: f64) -> Result<T>
where
    T: Clone + Add<Output = T> + Mul<f64, Output = T>,
{
    let len = samples.len();
    if len == 0 || len.is_multiple_of(2) {
        return Err(Error::Resolution(format!(
            "Simpson rule needs an odd sample count, got {len}"
        )));
    }
    let mut acc = samples[0].clone() * 0.0;
    if len == 1 {
        return Ok(acc);
    }
    for (i, s) in samples.iter().enumerate() {
        let w = if i == 0 || i == len - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc = acc + s.clone() * w;
    }
    Ok(acc * (spacing / 3.0))
}

/// Running Simpson integral evaluated at the even-indexed samples.
///
/// Entry `k` of the result is the integral from sample 0 to sample `2k`.
pub fn simpson_cumulative<T>(samples: &[T], spacing: f64) -> Result<Vec<T>>
where
    T: Clone + Add<Output = T> + Mul<f64, Output = T>,
{
    let len = samples.len();
    if len == 0 || len.is_multiple_of(2) {
        return Err(Error::Resolution(format!(
            "Simpson rule needs an odd sample count, got {len}"
        )));
    }
    let mut out = Vec::with_capacity(len / 2 + 1);
    let mut acc = samples[0].clone() * 0.0;
    out.push(acc.clone());
    for k in (2..len).step_by(2) {
        let panel = samples[k - 2].clone() + samples[k - 1].clone() * 4.0 + samples[k].clone();
        acc = acc + panel * (spacing / 3.0);
        out.push(acc.clone());
    }
    Ok(out)
}

/// Trapezoid weights for `count` equally spaced nodes.
pub fn trapezoid_weights(count: usize, spacing: f64) -> Vec<f64> {
    let mut w = vec![spacing; count];
    if count >= 1 {
        w[0] *= 0.5;
        w[count - 1] *= 0.5;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_for_cubics() {
        let h = 0.25;
        let ys: Vec<f64> = (0..9)
            .map(|i| {
                let x = i as f64 * h;
                x * x * x - 2.0 * x + 1.0
            })
            .collect();
        // ∫₀² x³ − 2x + 1 dx = 4 − 4 + 2
        assert!((simpson(&ys, h).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn simpson_rejects_even_counts() {
        assert!(simpson(&[1.0, 2.0], 0.1).is_err());
        assert!(simpson::<f64>(&[], 0.1).is_err());
    }

    #[test]
    fn cumulative_matches_direct() {
        let h = 0.01;
        let ys: Vec<f64> = (0..201).map(|i| (i as f64 * h).sin()).collect();
        let cum = simpson_cumulative(&ys, h).unwrap();
        assert_eq!(cum.len(), 101);
        for (k, c) in cum.iter().enumerate() {
            let x = 2.0 * k as f64 * h;
            assert!((c - (1.0 - x.cos())).abs() < 1e-9);
        }
    }

    #[test]
    fn intervals_respects_step_and_multiple() {
        assert_eq!(intervals(1.0, 0.1, 4).unwrap(), 12);
        assert_eq!(intervals(0.0, 0.1, 4).unwrap(), 4);
        assert!(intervals(1.0, 0.0, 2).is_err());
        assert!(intervals(-1.0, 0.1, 2).is_err());
    }

    #[test]
    fn trapezoid_halves_endpoints() {
        let w = trapezoid_weights(4, 2.0);
        assert_eq!(w, vec![1.0, 2.0, 2.0, 1.0]);
    }
}
