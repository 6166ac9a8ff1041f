//! Chain started in the vacuum and driven on site 1 by `ħR(t)(a₁ + a†₁)`.
//!
//! In the eigenmodes `B_j` of `Λ` each mode sees its own drive `R(t)·M_{1j}`
//! and ends in the coherent state `β_j = −i e^{−iλ_j t} M_{1j} R̃_j(t)` with
//! `R̃_j(t) = ∫₀ᵗ R(t′) e^{iλ_j t′} dt′`.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{intervals, simpson};

use super::{ladder_modes, propagator_matrix, LadderChain};

#[derive(Debug, Clone, PartialEq)]
pub struct ForcedResponse {
    pub t: f64,
    /// `R̃_j(t)` per mode, in the order of [`ladder_modes`].
    pub r_tilde: Vec<Complex64>,
    /// Coherent amplitude `β_j` of each mode.
    pub mode_amplitudes: Vec<Complex64>,
    /// `⟨a†_i a_i⟩(t)` per site.
    pub occupations: DVector<f64>,
    /// `|R̃(t)|²·P_{i1}(t)`, available only when all `λ_j` coincide so that a
    /// single `R̃` serves every mode.
    pub uniform_occupations: Option<DVector<f64>>,
}

/// Mean site occupations of the driven chain at time `t`; `R̃_j` is
/// integrated by Simpson's rule with spacing at most `step`.
pub fn forced_response(chain: &LadderChain, t: f64, step: f64) -> Result<ForcedResponse> {
    let drive = chain
        .drive
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("forced response needs a drive R(t)".into()))?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("time must be non-negative, got {t}")));
    }
    let (start, end) = drive.domain();
    if start > 0.0 || end < t {
        return Err(Error::OutOfRange {
            t: if start > 0.0 { 0.0 } else { t },
            start,
            end,
        });
    }
    let n = chain.n;
    let modes = ladder_modes(chain);
    let count = intervals(t, step, 2)?;
    let dt = t / count as f64;
    let r: Vec<f64> = (0..=count).map(|i| drive.eval(i as f64 * dt)).collect::<Result<_>>()?;

    let mut r_tilde = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    for (j, &lambda) in modes.lambda.iter().enumerate() {
        let samples: Vec<Complex64> = r
            .iter()
            .enumerate()
            .map(|(i, &x)| Complex64::new(0.0, lambda * i as f64 * dt).exp() * x)
            .collect();
        let rt = if t == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            simpson(&samples, dt)?
        };
        let m1j = modes.v[(0, j)];
        beta.push(Complex64::new(0.0, -1.0) * Complex64::new(0.0, -lambda * t).exp() * m1j * rt);
        r_tilde.push(rt);
    }
    let occupations = DVector::from_fn(n, |i, _| {
        (0..n)
            .map(|j| beta[j] * modes.v[(i, j)])
            .sum::<Complex64>()
            .norm_sqr()
    });

    let spread = modes.lambda.max() - modes.lambda.min();
    let uniform_occupations = if spread <= 1e-12 * modes.lambda.amax().max(1.0) {
        let u = propagator_matrix(chain, t);
        let r2 = r_tilde[0].norm_sqr();
        Some(DVector::from_fn(n, |i, _| r2 * u[(0, i)].norm_sqr()))
    } else {
        None
    };
    Ok(ForcedResponse {
        t,
        r_tilde,
        mode_amplitudes: beta,
        occupations,
        uniform_occupations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadform::{Profile, TimeDependence};

    #[test]
    fn undriven_chain_stays_empty() {
        let c = LadderChain::new(4, 1.0, 0.3).unwrap().with_drive(TimeDependence::Constant(0.0));
        let r = forced_response(&c, 2.0, 0.01).unwrap();
        assert!(r.occupations.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn single_site_constant_drive() {
        let (w0, r0) = (1.3, 0.2);
        let c = LadderChain::new(1, w0, 0.0).unwrap().with_drive(TimeDependence::Constant(r0));
        for t in [0.5, 2.0, 7.0] {
            let r = forced_response(&c, t, 0.001).unwrap();
            let want = (2.0 * r0 / w0).powi(2) * (w0 * t / 2.0).sin().powi(2);
            assert!((r.occupations[0] - want).abs() < 1e-10);
            let rt = Complex64::new(r0, 0.0) * (Complex64::new(0.0, w0 * t).exp() - 1.0) / Complex64::new(0.0, w0);
            assert!((r.r_tilde[0] - rt).norm() < 1e-10);
            assert!((r.uniform_occupations.as_ref().unwrap()[0] - want).abs() < 1e-10);
        }
    }

    #[test]
    fn total_excitation_equals_injected_amplitude() {
        let c = LadderChain::new(5, 1.0, 0.4)
            .unwrap()
            .with_drive(TimeDependence::preset(0.1, Profile::Cosine { frequency: 0.9, phase: 0.0 }).unwrap());
        let r = forced_response(&c, 3.0, 0.005).unwrap();
        let m = ladder_modes(&c);
        let injected: f64 = (0..5).map(|j| (m.v[(0, j)] * r.r_tilde[j]).norm_sqr()).sum();
        assert!((r.occupations.sum() - injected).abs() < 1e-12);
        assert!(r.uniform_occupations.is_none());
    }

    #[test]
    fn uncoupled_chain_uses_common_integral() {
        let c = LadderChain::new(3, 0.8, 0.0).unwrap().with_drive(TimeDependence::Constant(0.05));
        let r = forced_response(&c, 1.5, 0.01).unwrap();
        let u = r.uniform_occupations.unwrap();
        assert!((u - &r.occupations).amax() < 1e-14);
        assert!(r.occupations[1].abs() < 1e-14);
    }

    #[test]
    fn drive_required() {
        assert!(forced_response(&LadderChain::new(2, 1.0, 0.1).unwrap(), 1.0, 0.01).is_err());
    }
}
