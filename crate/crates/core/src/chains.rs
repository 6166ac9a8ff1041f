//! Harmonic chains of identical masses and their normal modes.
//!
//! Neighbouring masses are joined by springs of stiffness `m·ω₀²`. With
//! periodic boundaries the last site couples back to the first; with
//! Dirichlet boundaries both ends are tied to fixed walls (`q₀ = q_{n+1} = 0`).

use log::warn;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadform::{relative_asymmetry, QuadraticHamiltonian, TimeDependence, SYMMETRY_TOL};

/// Relative gap below which two eigenvalues are treated as one level.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    Dirichlet,
}

/// A uniform chain, optionally driven by a per-site force.
#[derive(Debug, Clone)]
pub struct ChainSpec {
    pub n: usize,
    pub m: f64,
    pub omega0: f64,
    pub boundary: Boundary,
    pub force: Option<TimeDependence<DVector<f64>>>,
}

impl ChainSpec {
    pub fn new(n: usize, m: f64, omega0: f64, boundary: Boundary) -> Result<Self> {
        let spec = ChainSpec {
            n,
            m,
            omega0,
            boundary,
            force: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_force(mut self, force: TimeDependence<DVector<f64>>) -> Result<Self> {
        let (len, cols) = force.shape();
        if len != self.n || cols != 1 {
            return Err(Error::dimension("chain force", self.n, len));
        }
        self.force = Some(force);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("a chain needs at least one site".into()));
        }
        if !(self.m > 0.0) || !self.m.is_finite() {
            return Err(Error::InvalidInput(format!("mass must be positive, got {}", self.m)));
        }
        if !(self.omega0 >= 0.0) || !self.omega0.is_finite() {
            return Err(Error::InvalidInput(format!(
                "omega0 must be non-negative, got {}",
                self.omega0
            )));
        }
        Ok(())
    }

    /// `H = Σ p²/2m + ½ q·Z·q − f(t)·q` with `ħ` as given.
    pub fn hamiltonian(&self, hbar: f64) -> Result<QuadraticHamiltonian> {
        let n = self.n;
        let mut h = QuadraticHamiltonian::new(n)?
            .with_hbar(hbar)?
            .with_z(TimeDependence::Constant(build_z(self)?))?
            .with_k(TimeDependence::Constant(DMatrix::identity(n, n) / self.m))?;
        if let Some(force) = &self.force {
            h = h.with_mu(force.clone())?;
        }
        Ok(h)
    }
}

/// Coupling matrix `Z` of the chain.
pub fn build_z(spec: &ChainSpec) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let n = spec.n;
    let k = spec.m * spec.omega0 * spec.omega0;
    let mut z = DMatrix::zeros(n, n);
    let mut spring = |i: usize, j: usize| {
        z[(i, i)] += k;
        z[(j, j)] += k;
        z[(i, j)] -= k;
        z[(j, i)] -= k;
    };
    match spec.boundary {
        Boundary::Periodic => {
            if n == 1 {
                warn!("periodic chain with one site: the self-coupling spring cancels, Z = [0]");
            }
            for i in 0..n {
                spring(i, (i + 1) % n);
            }
        }
        Boundary::Dirichlet => {
            for i in 0..n.saturating_sub(1) {
                spring(i, i + 1);
            }
            z[(0, 0)] += k;
            z[(n - 1, n - 1)] += k;
        }
    }
    Ok(z)
}

/// Eigenvalues `z_k` (ascending) and orthonormal eigenvectors `v_k` (columns of `v`).
#[derive(Debug, Clone, PartialEq)]
pub struct ModeDecomposition {
    pub m: f64,
    pub z: DVector<f64>,
    pub v: DMatrix<f64>,
    /// `√(max(z_k, 0)/m)`.
    pub omega: DVector<f64>,
}

impl ModeDecomposition {
    pub fn n(&self) -> usize {
        self.z.len()
    }

    /// Normal coordinates `q̃ = Vᵀ·q`.
    pub fn to_modes(&self, q: &DVector<f64>) -> Result<DVector<f64>> {
        if q.len() != self.n() {
            return Err(Error::dimension("coordinate vector", self.n(), q.len()));
        }
        Ok(self.v.tr_mul(q))
    }

    /// Site coordinates `q = V·q̃`.
    pub fn to_sites(&self, q_modes: &DVector<f64>) -> Result<DVector<f64>> {
        if q_modes.len() != self.n() {
            return Err(Error::dimension("mode coordinate vector", self.n(), q_modes.len()));
        }
        Ok(&self.v * q_modes)
    }
}

/// Normal coordinates of `q`; see [`ModeDecomposition::to_modes`].
pub fn transform_coords(decomp: &ModeDecomposition, q: &DVector<f64>) -> Result<DVector<f64>> {
    decomp.to_modes(q)
}

/// Flips `v` so that its first entry that is not negligible is positive.
fn fix_sign(mut v: DVector<f64>) -> DVector<f64> {
    let scale = v.amax();
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-10 * scale).copied() {
        if first < 0.0 {
            v.neg_mut();
        }
    }
    v
}

/// Orthonormal basis of the span of `block`'s columns obtained by projecting
/// `e_1, e_2, …` onto it and orthonormalizing in index order.
fn canonical_basis(block: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let (n, d) = block.shape();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(d);
    for i in 0..n {
        if basis.len() == d {
            break;
        }
        // P·e_i with P = Q·Qᵀ
        let mut v = block * block.row(i).transpose();
        for b in &basis {
            let c = b.dot(&v);
            v -= b * c;
        }
        let norm = v.norm();
        if norm > 1e-6 {
            basis.push(v / norm);
        }
    }
    basis
}

/// Symmetric eigendecomposition with a deterministic basis.
pub fn decompose(z: &DMatrix<f64>, m: f64) -> Result<ModeDecomposition> {
    if z.nrows() != z.ncols() || z.nrows() == 0 {
        return Err(Error::InvalidInput(format!(
            "Z must be square and non-empty, got {}×{}",
            z.nrows(),
            z.ncols()
        )));
    }
    if !(m > 0.0) {
        return Err(Error::InvalidInput(format!("mass must be positive, got {m}")));
    }
    let defect = relative_asymmetry(z);
    if defect > SYMMETRY_TOL {
        return Err(Error::NotSymmetric {
            what: "Z".into(),
            defect,
        });
    }
    let n = z.nrows();
    let eig = SymmetricEigen::new((z + z.transpose()) * 0.5);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let scale = values.iter().fold(0.0_f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);

    let mut vectors: Vec<DVector<f64>> = Vec::with_capacity(n);
    let mut zs: Vec<f64> = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= DEGENERACY_TOL * scale {
            end += 1;
        }
        let cols: Vec<DVector<f64>> = order[start..end]
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect();
        let level = values[start..end].iter().sum::<f64>() / (end - start) as f64;
        if end - start == 1 {
            vectors.push(fix_sign(cols[0].clone()));
            zs.push(values[start]);
        } else {
            for v in canonical_basis(&DMatrix::from_columns(&cols)) {
                vectors.push(fix_sign(v));
                zs.push(level);
            }
        }
        start = end;
    }
    let z = DVector::from_vec(zs);
    let omega = z.map(|x| (x.max(0.0) / m).sqrt());
    Ok(ModeDecomposition {
        m,
        z,
        v: DMatrix::from_columns(&vectors),
        omega,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dirichlet(n: usize) -> ModeDecomposition {
        let spec = ChainSpec::new(n, 1.0, 1.0, Boundary::Dirichlet).unwrap();
        decompose(&build_z(&spec).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn three_site_matrices() {
        let (m, w) = (2.0, 0.5);
        let k = m * w * w;
        let p = build_z(&ChainSpec::new(3, m, w, Boundary::Periodic).unwrap()).unwrap();
        let want = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0]) * k;
        assert_eq!(p, want);
        let d = build_z(&ChainSpec::new(3, m, w, Boundary::Dirichlet).unwrap()).unwrap();
        let want = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]) * k;
        assert_eq!(d, want);
    }

    #[test]
    fn zero_frequency_gives_zero_matrix() {
        for b in [Boundary::Periodic, Boundary::Dirichlet] {
            let z = build_z(&ChainSpec::new(4, 1.0, 0.0, b).unwrap()).unwrap();
            assert!(z.iter().all(|x| *x == 0.0));
        }
    }

    #[test]
    fn single_periodic_site_is_free() {
        let z = build_z(&ChainSpec::new(1, 1.0, 2.0, Boundary::Periodic).unwrap()).unwrap();
        assert_eq!(z, DMatrix::zeros(1, 1));
    }

    #[test]
    fn invalid_specs() {
        assert!(ChainSpec::new(0, 1.0, 1.0, Boundary::Periodic).is_err());
        assert!(ChainSpec::new(2, 0.0, 1.0, Boundary::Periodic).is_err());
        assert!(ChainSpec::new(2, 1.0, -1.0, Boundary::Periodic).is_err());
    }

    #[test]
    fn periodic_three_site_spectrum() {
        let spec = ChainSpec::new(3, 1.0, 1.0, Boundary::Periodic).unwrap();
        let d = decompose(&build_z(&spec).unwrap(), 1.0).unwrap();
        assert!(d.z[0].abs() < 1e-12);
        assert!((d.z[1] - 3.0).abs() < 1e-12 && (d.z[2] - 3.0).abs() < 1e-12);
        let s = 1.0 / 3f64.sqrt();
        for i in 0..3 {
            assert!((d.v[(i, 0)] - s).abs() < 1e-12);
        }
        // degenerate level: projections of e_1 then e_2
        let a = DVector::from_vec(vec![2.0, -1.0, -1.0]) / 6f64.sqrt();
        let b = DVector::from_vec(vec![0.0, 1.0, -1.0]) / 2f64.sqrt();
        assert!((d.v.column(1) - a).amax() < 1e-12);
        assert!((d.v.column(2) - b).amax() < 1e-12);
    }

    #[test]
    fn dirichlet_three_site_spectrum() {
        let d = dirichlet(3);
        let r2 = 2f64.sqrt();
        assert!((d.z[0] - (2.0 - r2)).abs() < 1e-12);
        assert!((d.z[1] - 2.0).abs() < 1e-12);
        assert!((d.z[2] - (2.0 + r2)).abs() < 1e-12);
        let mid = DVector::from_vec(vec![1.0, 0.0, -1.0]) / r2;
        assert!((d.v.column(1) - mid).amax() < 1e-12);
        let qt = transform_coords(&d, &DVector::from_vec(vec![1.0, 0.0, 0.0])).unwrap();
        assert!((qt[0] - 0.5).abs() < 1e-12);
        assert!((qt[1] - 1.0 / r2).abs() < 1e-12);
        assert!((qt[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_site() {
        let z = DMatrix::from_element(1, 1, 4.0);
        let d = decompose(&z, 2.0).unwrap();
        assert_eq!(d.z[0], 4.0);
        assert_eq!(d.v[(0, 0)], 1.0);
        assert!((d.omega[0] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_asymmetric() {
        let z = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(matches!(decompose(&z, 1.0), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn dirichlet_closed_form_spectrum() {
        for n in [1, 2, 5, 17, 50] {
            let d = dirichlet(n);
            for k in 1..=n {
                let s = (k as f64 * std::f64::consts::PI / (2.0 * (n + 1) as f64)).sin();
                assert!((d.z[k - 1] - 4.0 * s * s).abs() < 1e-9, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn periodic_has_one_zero_mode() {
        for n in 2..12 {
            let spec = ChainSpec::new(n, 1.3, 0.7, Boundary::Periodic).unwrap();
            let d = decompose(&build_z(&spec).unwrap(), 1.3).unwrap();
            let zeros = d.z.iter().filter(|z| z.abs() < 1e-10).count();
            assert_eq!(zeros, 1, "n={n}");
            let v0 = d.v.column(0);
            let s = 1.0 / (n as f64).sqrt();
            assert!(v0.iter().all(|x| (x - s).abs() < 1e-10));
        }
    }

    proptest! {
        #[test]
        fn decomposition_invariants(n in 1usize..12, periodic in any::<bool>(), m in 0.2f64..3.0, w in 0.1f64..2.0) {
            let b = if periodic { Boundary::Periodic } else { Boundary::Dirichlet };
            let spec = ChainSpec::new(n, m, w, b).unwrap();
            let z = build_z(&spec).unwrap();
            let d = decompose(&z, m).unwrap();
            let vtv = d.v.tr_mul(&d.v) - DMatrix::identity(n, n);
            prop_assert!(vtv.amax() <= 1e-10);
            for k in 0..n {
                let r = &z * d.v.column(k) - d.v.column(k) * d.z[k];
                prop_assert!(r.norm() <= 1e-9 * z.amax().max(1.0));
                prop_assert!(d.z[k] >= -1e-12);
            }
            prop_assert!((d.v.determinant().abs() - 1.0).abs() < 1e-10);
            prop_assert!(d.z.as_slice().windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn transform_round_trip(q in proptest::collection::vec(-5.0f64..5.0, 6)) {
            let d = dirichlet(6);
            let q = DVector::from_vec(q);
            let qt = d.to_modes(&q).unwrap();
            prop_assert!((qt.norm() - q.norm()).abs() <= 1e-12 * (1.0 + q.norm()));
            prop_assert!((d.to_sites(&qt).unwrap() - &q).amax() <= 1e-12 * (1.0 + q.amax()));
        }
    }

    #[test]
    fn mode_vector_maps_to_unit_vector() {
        let d = dirichlet(4);
        for k in 0..4 {
            let e = d.to_modes(&d.v.column(k).into_owned()).unwrap();
            for j in 0..4 {
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((e[j] - want).abs() < 1e-12);
            }
        }
    }
}
