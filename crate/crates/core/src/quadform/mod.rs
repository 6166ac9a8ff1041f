//! The time-dependent quadratic Hamiltonian and its symplectic generator.
//!
//! Positions and momenta enter through
//!
//! ```text
//! H = ½ (q p) · w(t) · (q p)ᵀ − μ(t)·q − ν(t)·p,   w = [[Z, Lᵀ], [L, K]]
//! ```
//!
//! and the linear Heisenberg equations read `d(q, p)/dt = s·w(t)·(q, p) + (−ν, μ)`
//! with `s = [[0, 1], [−1, 0]]`.

mod timedep;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub use timedep::{Profile, Sample, Table, TimeDependence};

/// Relative tolerance on the symmetry of `Z` and `K`.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// A quadratic Hamiltonian with `n` degrees of freedom.
#[derive(Debug, Clone)]
pub struct QuadraticHamiltonian {
    n: usize,
    hbar: f64,
    z: TimeDependence<DMatrix<f64>>,
    l: TimeDependence<DMatrix<f64>>,
    k: TimeDependence<DMatrix<f64>>,
    mu: TimeDependence<DVector<f64>>,
    nu: TimeDependence<DVector<f64>>,
}

impl QuadraticHamiltonian {
    /// The zero Hamiltonian on `n` degrees of freedom with `ħ = 1`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("need at least one degree of freedom".into()));
        }
        let zm = || TimeDependence::Constant(DMatrix::zeros(n, n));
        let zv = || TimeDependence::Constant(DVector::zeros(n));
        Ok(QuadraticHamiltonian {
            n,
            hbar: 1.0,
            z: zm(),
            l: zm(),
            k: zm(),
            mu: zv(),
            nu: zv(),
        })
    }

    /// Isotropic oscillator `p²/2m + ½ m ω² q²` in `n` dimensions.
    pub fn oscillator(n: usize, mass: f64, omega: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::InvalidInput(format!("mass must be positive, got {mass}")));
        }
        Self::new(n)?
            .with_z(TimeDependence::Constant(DMatrix::identity(n, n) * (mass * omega * omega)))?
            .with_k(TimeDependence::Constant(DMatrix::identity(n, n) / mass))
    }

    fn check_matrix(&self, what: &str, td: &TimeDependence<DMatrix<f64>>) -> Result<()> {
        let (r, c) = td.shape();
        if r != self.n {
            return Err(Error::dimension(format!("{what} rows"), self.n, r));
        }
        if c != self.n {
            return Err(Error::dimension(format!("{what} columns"), self.n, c));
        }
        Ok(())
    }

    fn check_vector(&self, what: &str, td: &TimeDependence<DVector<f64>>) -> Result<()> {
        let (r, _) = td.shape();
        if r != self.n {
            return Err(Error::dimension(what, self.n, r));
        }
        Ok(())
    }

    pub fn with_z(mut self, z: TimeDependence<DMatrix<f64>>) -> Result<Self> {
        self.check_matrix("Z", &z)?;
        self.z = z;
        Ok(self)
    }

    pub fn with_l(mut self, l: TimeDependence<DMatrix<f64>>) -> Result<Self> {
        self.check_matrix("L", &l)?;
        self.l = l;
        Ok(self)
    }

    pub fn with_k(mut self, k: TimeDependence<DMatrix<f64>>) -> Result<Self> {
        self.check_matrix("K", &k)?;
        self.k = k;
        Ok(self)
    }

    /// Source coupled to positions (a force).
    pub fn with_mu(mut self, mu: TimeDependence<DVector<f64>>) -> Result<Self> {
        self.check_vector("mu", &mu)?;
        self.mu = mu;
        Ok(self)
    }

    /// Source coupled to momenta (a velocity shift).
    pub fn with_nu(mut self, nu: TimeDependence<DVector<f64>>) -> Result<Self> {
        self.check_vector("nu", &nu)?;
        self.nu = nu;
        Ok(self)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::InvalidInput(format!("hbar must be positive, got {hbar}")));
        }
        self.hbar = hbar;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn z(&self) -> &TimeDependence<DMatrix<f64>> {
        &self.z
    }

    pub fn l(&self) -> &TimeDependence<DMatrix<f64>> {
        &self.l
    }

    pub fn k(&self) -> &TimeDependence<DMatrix<f64>> {
        &self.k
    }

    pub fn mu(&self) -> &TimeDependence<DVector<f64>> {
        &self.mu
    }

    pub fn nu(&self) -> &TimeDependence<DVector<f64>> {
        &self.nu
    }

    pub fn z_at(&self, t: f64) -> Result<DMatrix<f64>> {
        self.z.eval(t)
    }

    pub fn l_at(&self, t: f64) -> Result<DMatrix<f64>> {
        self.l.eval(t)
    }

    pub fn k_at(&self, t: f64) -> Result<DMatrix<f64>> {
        self.k.eval(t)
    }

    pub fn mu_at(&self, t: f64) -> Result<DVector<f64>> {
        self.mu.eval(t)
    }

    pub fn nu_at(&self, t: f64) -> Result<DVector<f64>> {
        self.nu.eval(t)
    }

    /// `Z`, `L` and `K` are all constant in time.
    pub fn has_constant_generator(&self) -> bool {
        self.z.is_constant() && self.l.is_constant() && self.k.is_constant()
    }

    /// At least one of `μ`, `ν` is not identically zero.
    pub fn has_sources(&self) -> bool {
        !(self.mu.is_identically_zero() && self.nu.is_identically_zero())
    }

    /// Source column `(−ν(t), μ(t))` of the inhomogeneous Heisenberg equations.
    pub fn source_at(&self, t: f64) -> Result<DVector<f64>> {
        let n = self.n;
        let mu = self.mu_at(t)?;
        let nu = self.nu_at(t)?;
        let mut out = DVector::zeros(2 * n);
        out.rows_mut(0, n).copy_from(&(-nu));
        out.rows_mut(n, n).copy_from(&mu);
        Ok(out)
    }

    /// Fails unless every coefficient can be evaluated on `[0, t]`.
    pub fn check_covers(&self, t: f64) -> Result<()> {
        let domains = [
            self.z.domain(),
            self.l.domain(),
            self.k.domain(),
            self.mu.domain(),
            self.nu.domain(),
        ];
        for (start, end) in domains {
            for probe in [0.0, t] {
                if probe < start || probe > end {
                    return Err(Error::OutOfRange { t: probe, start, end });
                }
            }
        }
        Ok(())
    }
}

/// Result of [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// Largest `‖Z − Zᵀ‖_max / ‖Z‖_max` over the sampled times.
    pub z_symmetry_defect: f64,
    /// Largest `‖K − Kᵀ‖_max / ‖K‖_max` over the sampled times.
    pub k_symmetry_defect: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// `‖M − Mᵀ‖_max / ‖M‖_max`, zero for the zero matrix.
pub fn relative_asymmetry(m: &DMatrix<f64>) -> f64 {
    let scale = max_abs(m);
    if scale == 0.0 {
        return 0.0;
    }
    max_abs(&(m - m.transpose())) / scale
}

/// Checks the symmetry of `Z` and `K` at every sampled time.
pub fn validate(h: &QuadraticHamiltonian, times: &[f64]) -> Result<ValidationReport> {
    if times.is_empty() {
        return Err(Error::InvalidInput("validation needs at least one time".into()));
    }
    if let Some(t) = times.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite validation time {t}")));
    }
    let n = h.n();
    let mut z_def = 0.0_f64;
    let mut k_def = 0.0_f64;
    for &t in times {
        let z = h.z_at(t)?;
        let l = h.l_at(t)?;
        let k = h.k_at(t)?;
        let mu = h.mu_at(t)?;
        let nu = h.nu_at(t)?;
        for (what, m) in [("Z", &z), ("L", &l), ("K", &k)] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::dimension(what, n, m.nrows().max(m.ncols())));
            }
        }
        for (what, v) in [("mu", &mu), ("nu", &nu)] {
            if v.len() != n {
                return Err(Error::dimension(what, n, v.len()));
            }
        }
        z_def = z_def.max(relative_asymmetry(&z));
        k_def = k_def.max(relative_asymmetry(&k));
    }
    Ok(ValidationReport {
        z_symmetry_defect: z_def,
        k_symmetry_defect: k_def,
        tolerance: SYMMETRY_TOL,
        passed: z_def <= SYMMETRY_TOL && k_def <= SYMMETRY_TOL,
    })
}

/// The canonical form `s = [[0, 1], [−1, 0]]` of size `2n`.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        s[(i, n + i)] = 1.0;
        s[(n + i, i)] = -1.0;
    }
    s
}

/// `w(t) = [[Z, Lᵀ], [L, K]]`.
pub fn w_matrix(h: &QuadraticHamiltonian, t: f64) -> Result<DMatrix<f64>> {
    let n = h.n();
    let z = h.z_at(t)?;
    let l = h.l_at(t)?;
    let k = h.k_at(t)?;
    let mut w = DMatrix::zeros(2 * n, 2 * n);
    w.view_mut((0, 0), (n, n)).copy_from(&z);
    w.view_mut((0, n), (n, n)).copy_from(&l.transpose());
    w.view_mut((n, 0), (n, n)).copy_from(&l);
    w.view_mut((n, n), (n, n)).copy_from(&k);
    Ok(w)
}

/// `s·w(t) = [[L, K], [−Z, −Lᵀ]]`, the generator of the classical flow.
pub fn symplectic_generator(h: &QuadraticHamiltonian, t: f64) -> Result<DMatrix<f64>> {
    let n = h.n();
    let z = h.z_at(t)?;
    let l = h.l_at(t)?;
    let k = h.k_at(t)?;
    let mut g = DMatrix::zeros(2 * n, 2 * n);
    g.view_mut((0, 0), (n, n)).copy_from(&l);
    g.view_mut((0, n), (n, n)).copy_from(&k);
    g.view_mut((n, 0), (n, n)).copy_from(&(-z));
    g.view_mut((n, n), (n, n)).copy_from(&(-l.transpose()));
    Ok(g)
}
