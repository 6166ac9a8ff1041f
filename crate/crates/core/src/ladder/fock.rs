//! Brute-force evolution of the chain in a truncated occupation-number basis.
//!
//! Used to check the closed-form transport results. Each site keeps the
//! levels `0..=cutoff`; the basis index has site 1 as its most significant
//! digit.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::LadderChain;

/// Largest basis the oracle will build.
pub const MAX_BASIS: usize = 4096;

/// Population of basis states with some site at the cutoff above which the
/// truncation is reported.
pub const LEAKAGE_TOL: f64 = 1e-6;

/// Initial chain states; everything except `SingleExcitation` prepares site 1
/// and leaves the other sites in their ground state.
#[derive(Debug, Clone, PartialEq)]
pub enum FockInitial {
    Vacuum,
    /// `|k⟩` on site 1.
    Fock(usize),
    /// Coherent state `|α⟩` on site 1.
    Coherent(Complex64),
    /// `Σ_k c_k |k⟩` on site 1 (normalized internally).
    Amplitudes(Vec<Complex64>),
    /// One quantum on the given site (1-based).
    SingleExcitation(usize),
}

struct Basis {
    sites: usize,
    levels: usize,
    dim: usize,
}

impl Basis {
    fn occupation(&self, state: usize, site: usize) -> usize {
        (state / self.levels.pow((self.sites - 1 - site) as u32)) % self.levels
    }

    fn shift(&self, site: usize) -> usize {
        self.levels.pow((self.sites - 1 - site) as u32)
    }
}

/// Sparse symmetric operator as `(row, column, value)` triplets.
type Triplets = Vec<(usize, usize, f64)>;

/// `ω₀ Σ n_k + g Σ (a†_k a_{k+1} + h.c.)` and `a₁ + a†₁`, both divided by `ħ`.
fn operators(chain: &LadderChain, basis: &Basis) -> (Triplets, Triplets) {
    let mut hop = Triplets::new();
    let mut drive = Triplets::new();
    let top = basis.levels - 1;
    for s in 0..basis.dim {
        let total: usize = (0..basis.sites).map(|k| basis.occupation(s, k)).sum();
        hop.push((s, s, chain.omega0 * total as f64));
        for k in 0..basis.sites.saturating_sub(1) {
            let (nk, nk1) = (basis.occupation(s, k), basis.occupation(s, k + 1));
            // a†_k a_{k+1} and its adjoint
            if nk < top && nk1 > 0 {
                let target = s + basis.shift(k) - basis.shift(k + 1);
                let v = chain.g * (((nk + 1) * nk1) as f64).sqrt();
                hop.push((target, s, v));
                hop.push((s, target, v));
            }
        }
        let n1 = basis.occupation(s, 0);
        if n1 < top {
            let v = ((n1 + 1) as f64).sqrt();
            drive.push((s + basis.shift(0), s, v));
            drive.push((s, s + basis.shift(0), v));
        }
    }
    (hop, drive)
}

fn site_one_amplitudes(initial: &FockInitial, levels: usize) -> Result<Option<Vec<Complex64>>> {
    let cutoff = levels - 1;
    let raw = match initial {
        FockInitial::Vacuum => vec![Complex64::new(1.0, 0.0)],
        FockInitial::Fock(k) => {
            let mut c = vec![Complex64::new(0.0, 0.0); k + 1];
            c[*k] = Complex64::new(1.0, 0.0);
            c
        }
        FockInitial::Coherent(alpha) => {
            let mut c = Vec::with_capacity(levels);
            let mut term = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
            for k in 0..levels {
                if k > 0 {
                    term = term * alpha / (k as f64).sqrt();
                }
                c.push(term);
            }
            let missing = 1.0 - c.iter().map(|x| x.norm_sqr()).sum::<f64>();
            if missing > LEAKAGE_TOL {
                return Err(Error::Truncation { cutoff, leakage: missing });
            }
            c
        }
        FockInitial::Amplitudes(c) => {
            if c.is_empty() {
                return Err(Error::InvalidInput("no amplitudes given for site 1".into()));
            }
            c.clone()
        }
        FockInitial::SingleExcitation(_) => return Ok(None),
    };
    if raw.len() > levels {
        return Err(Error::Truncation {
            cutoff,
            leakage: raw[levels..].iter().map(|x| x.norm_sqr()).sum(),
        });
    }
    let norm = raw.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::InvalidInput("initial amplitudes vanish".into()));
    }
    Ok(Some(raw.into_iter().map(|x| x / norm).collect()))
}

fn initial_state(initial: &FockInitial, basis: &Basis) -> Result<DVector<Complex64>> {
    let mut psi = DVector::from_element(basis.dim, Complex64::new(0.0, 0.0));
    match site_one_amplitudes(initial, basis.levels)? {
        Some(c) => {
            for (k, ck) in c.into_iter().enumerate() {
                psi[k * basis.shift(0)] = ck;
            }
        }
        None => {
            let FockInitial::SingleExcitation(site) = initial else { unreachable!() };
            if *site == 0 || *site > basis.sites {
                return Err(Error::InvalidInput(format!("site {site} outside 1..={}", basis.sites)));
            }
            psi[basis.shift(site - 1)] = Complex64::new(1.0, 0.0);
        }
    }
    Ok(psi)
}

fn apply(op: &Triplets, scale: f64, psi: &DVector<Complex64>, out: &mut DVector<Complex64>) {
    for &(r, c, v) in op {
        out[r] += psi[c] * (v * scale);
    }
}

/// Mean occupations `⟨a†_j a_j⟩(t)` of the chain (with its drive, if any)
/// started in `initial`, from exact evolution in the truncated basis.
///
/// Constant drives are handled by diagonalizing the truncated Hamiltonian;
/// time-dependent drives by classical Runge–Kutta with a step resolving the
/// largest truncated energy.
pub fn fock_oracle(chain: &LadderChain, t: f64, cutoff: usize, initial: &FockInitial) -> Result<DVector<f64>> {
    if cutoff == 0 {
        return Err(Error::InvalidInput("cutoff must be at least 1".into()));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("time must be non-negative, got {t}")));
    }
    let levels = cutoff + 1;
    let dim = (levels as f64).powi(chain.n as i32);
    if dim > MAX_BASIS as f64 {
        return Err(Error::InvalidInput(format!(
            "truncated basis of {dim} states exceeds the limit of {MAX_BASIS}"
        )));
    }
    let basis = Basis {
        sites: chain.n,
        levels,
        dim: dim as usize,
    };
    let (hop, drive_op) = operators(chain, &basis);
    let psi0 = initial_state(initial, &basis)?;

    let constant_drive = match &chain.drive {
        None => Some(0.0),
        Some(d) if d.is_constant() => Some(d.eval(0.0)?),
        Some(_) => None,
    };
    let psi = match constant_drive {
        Some(r) => {
            let mut h = DMatrix::zeros(basis.dim, basis.dim);
            for &(i, j, v) in &hop {
                h[(i, j)] += v;
            }
            for &(i, j, v) in &drive_op {
                h[(i, j)] += r * v;
            }
            let eig = SymmetricEigen::new(h);
            let u = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
            let mut c = u.tr_mul(&psi0);
            for (k, e) in eig.eigenvalues.iter().enumerate() {
                c[k] *= Complex64::new(0.0, -e * t).exp();
            }
            u * c
        }
        None => {
            let drive = chain.drive.as_ref().unwrap();
            let probes = 1000;
            let mut rmax = 0.0_f64;
            for i in 0..=probes {
                rmax = rmax.max(drive.eval(t * i as f64 / probes as f64)?.abs());
            }
            let scale = chain.omega0.abs() * (chain.n * cutoff) as f64
                + 2.0 * chain.g.abs() * (chain.n.saturating_sub(1) * levels) as f64
                + 2.0 * rmax * (levels as f64).sqrt();
            let steps = ((t * scale.max(1.0)) / 0.005).ceil().max(1.0) as usize;
            let dt = t / steps as f64;
            let rhs = |time: f64, psi: &DVector<Complex64>| -> Result<DVector<Complex64>> {
                let mut out = DVector::from_element(basis.dim, Complex64::new(0.0, 0.0));
                apply(&hop, 1.0, psi, &mut out);
                apply(&drive_op, drive.eval(time)?, psi, &mut out);
                Ok(out * Complex64::new(0.0, -1.0))
            };
            let mut psi = psi0;
            for i in 0..steps {
                let t0 = i as f64 * dt;
                let k1 = rhs(t0, &psi)?;
                let k2 = rhs(t0 + 0.5 * dt, &(&psi + &k1 * Complex64::new(0.5 * dt, 0.0)))?;
                let k3 = rhs(t0 + 0.5 * dt, &(&psi + &k2 * Complex64::new(0.5 * dt, 0.0)))?;
                let k4 = rhs(t0 + dt, &(&psi + &k3 * Complex64::new(dt, 0.0)))?;
                psi += (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4)
                    * Complex64::new(dt / 6.0, 0.0);
            }
            psi
        }
    };

    let mut occupations = DVector::zeros(chain.n);
    let mut leakage = 0.0;
    for (s, amp) in psi.iter().enumerate() {
        let p = amp.norm_sqr();
        let mut at_top = false;
        for k in 0..chain.n {
            let nk = basis.occupation(s, k);
            occupations[k] += p * nk as f64;
            at_top |= nk == cutoff;
        }
        if at_top {
            leakage += p;
        }
    }
    if leakage > LEAKAGE_TOL {
        return Err(Error::Truncation { cutoff, leakage });
    }
    Ok(occupations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::{coherent_excitations, excitation_ratio};
    use crate::quadform::TimeDependence;

    #[test]
    fn single_excitation_hops() {
        let c = LadderChain::new(2, 1.0, 0.6).unwrap();
        for t in [0.3, 1.4] {
            let occ = fock_oracle(&c, t, 2, &FockInitial::SingleExcitation(1)).unwrap();
            assert!((occ[0] - (0.6 * t).cos().powi(2)).abs() < 1e-12);
            assert!((occ[1] - (0.6 * t).sin().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn vacuum_stays_empty() {
        let c = LadderChain::new(3, 1.0, 0.5).unwrap();
        let occ = fock_oracle(&c, 2.0, 3, &FockInitial::Vacuum).unwrap();
        assert!(occ.amax() < 1e-14);
    }

    #[test]
    fn coherent_state_matches_closed_form() {
        let alpha = Complex64::new(0.5, 0.0);
        let c = LadderChain::new(2, 1.0, 0.4).unwrap().with_alpha(alpha);
        let occ = fock_oracle(&c, 1.7, 8, &FockInitial::Coherent(alpha)).unwrap();
        let want = coherent_excitations(&c, 1.7).unwrap();
        assert!((occ - want).amax() < 1e-6);
    }

    #[test]
    fn fock_two_ratio() {
        let c = LadderChain::new(2, 1.0, 1.0).unwrap();
        let t = std::f64::consts::PI / 4.0;
        let occ = fock_oracle(&c, t, 4, &FockInitial::Fock(2)).unwrap();
        assert!((occ[1] / 2.0 - 0.5).abs() < 1e-12);
        assert!((occ[1] / 2.0 - excitation_ratio(&c, t, 2).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn truncation_is_reported() {
        let c = LadderChain::new(2, 1.0, 0.5).unwrap();
        assert!(matches!(
            fock_oracle(&c, 1.0, 3, &FockInitial::Coherent(Complex64::new(2.0, 0.0))),
            Err(Error::Truncation { .. })
        ));
        assert!(fock_oracle(&c, 1.0, 2, &FockInitial::Fock(4)).is_err());
        assert!(fock_oracle(&LadderChain::new(6, 1.0, 0.5).unwrap(), 1.0, 8, &FockInitial::Vacuum).is_err());
    }

    #[test]
    fn runge_kutta_matches_diagonalization() {
        // a window drive that is on for the whole interval is a constant drive
        let base = LadderChain::new(2, 1.0, 0.3).unwrap();
        let constant = base.clone().with_drive(TimeDependence::Constant(0.1));
        let windowed = base.with_drive(
            TimeDependence::preset(0.1, crate::quadform::Profile::Window { start: 0.0, end: 10.0 }).unwrap(),
        );
        let a = fock_oracle(&constant, 2.0, 6, &FockInitial::Vacuum).unwrap();
        let b = fock_oracle(&windowed, 2.0, 6, &FockInitial::Vacuum).unwrap();
        assert!((a - b).amax() < 1e-9);
    }
}
