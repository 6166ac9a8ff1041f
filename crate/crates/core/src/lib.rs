//! Exact quantum propagators for time-dependent quadratic Hamiltonians.
//!
//! A Hamiltonian of the form
//!
//! ```text
//! H = ½ q·Z(t)·q + ½ q·Lᵀ(t)·p + ½ p·L(t)·q + ½ p·K(t)·p − μ(t)·q − ν(t)·p
//! ```
//!
//! is fully determined by its classical flow. The crate computes that flow
//! (the symplectic fundamental matrix and the driven displacements), turns
//! it into the closed-form Gaussian kernel, and applies it to wavefunctions
//! and density matrices on grids. On top of that sit oscillator chains with
//! periodic or fixed ends and the ladder-operator transport model for
//! excitations hopping along a chain.
//!
//! Module map:
//!
//! * [`quadform`]: the Hamiltonian model, its time dependence and the
//!   symplectic generator `s·w(t)`.
//! * [`evolution`]: fundamental matrix, Green function, source responses.
//! * [`propagator`]: kernel parameters, the kernel itself, grid evolution.
//! * [`chains`]: coupling matrices and normal modes of oscillator chains.
//! * [`ladder`]: tight-binding transport, forced chains, Fock-space oracle.
//! * [`cli`]: the config-driven scenario runner behind the `quadprop` binary.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chains;
pub mod cli;
pub mod error;
pub mod evolution;
pub mod ladder;
pub mod propagator;
pub mod quadform;
pub mod quadrature;

pub use error::{Error, Result};

pub use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;
