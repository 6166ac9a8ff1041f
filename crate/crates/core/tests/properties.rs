use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use quadprop::chains::{build_z, decompose, Boundary, ChainSpec};
use quadprop::evolution::{fundamental_matrix, green_function, SymplecticBlocks};
use quadprop::ladder::{transition_probability, LadderChain};
use quadprop::propagator::{kernel_eval, propagator};
use quadprop::quadform::{QuadraticHamiltonian, TimeDependence};

fn hamiltonian(n: usize, entries: &[f64], with_l: bool) -> QuadraticHamiltonian {
    let m = DMatrix::from_fn(2 * n, 2 * n, |i, j| entries[i * 2 * n + j] / (n as f64).sqrt());
    let w = &m * m.transpose() + DMatrix::identity(2 * n, 2 * n) * 0.2;
    let z = w.view((0, 0), (n, n)).into_owned();
    let k = w.view((n, n), (n, n)).into_owned();
    let l = if with_l { w.view((n, 0), (n, n)).into_owned() } else { DMatrix::zeros(n, n) };
    QuadraticHamiltonian::new(n)
        .unwrap()
        .with_z(TimeDependence::Constant((&z + z.transpose()) * 0.5))
        .unwrap()
        .with_k(TimeDependence::Constant((&k + k.transpose()) * 0.5))
        .unwrap()
        .with_l(TimeDependence::Constant(l))
        .unwrap()
}

fn theta(h: &QuadraticHamiltonian, t: f64) -> DMatrix<f64> {
    fundamental_matrix(h, t, 1e-3).unwrap().blocks.to_matrix()
}

fn case() -> impl Strategy<Value = (usize, Vec<f64>, bool)> {
    (1usize..=4).prop_flat_map(|n| (Just(n), prop::collection::vec(-1.0..1.0f64, 4 * n * n), any::<bool>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fundamental_matrix_has_unit_determinant((n, e, l) in case(), t in 0.0..6.0f64) {
        let det = theta(&hamiltonian(n, &e, l), t).determinant();
        prop_assert!((det - 1.0).abs() < 1e-9, "det {}", det);
    }

    #[test]
    fn constant_flow_composes((n, e, l) in case(), t1 in 0.0..3.0f64, t2 in 0.0..3.0f64) {
        let h = hamiltonian(n, &e, l);
        let lhs = theta(&h, t1 + t2);
        let rhs = theta(&h, t2) * theta(&h, t1);
        prop_assert!((lhs - rhs).amax() < 1e-9);
    }

    #[test]
    fn green_function_depends_on_time_difference((n, e, l) in case(), t in 0.0..3.0f64, s in 0.0..3.0f64) {
        let h = hamiltonian(n, &e, l);
        let g = green_function(
            &SymplecticBlocks::from_matrix(t + s, &theta(&h, t + s)).unwrap(),
            &SymplecticBlocks::from_matrix(s, &theta(&h, s)).unwrap(),
        )
        .unwrap();
        prop_assert!((g - theta(&h, t)).amax() < 1e-9);
    }

    #[test]
    fn kernel_modulus_is_position_independent(
        (n, e, l) in case(),
        t in 0.05..0.6f64,
        q in prop::collection::vec(-2.0..2.0f64, 8),
    ) {
        // short times keep B invertible for these bounded flows
        let h = hamiltonian(n, &e, l);
        let p = propagator(&h, t, 1e-3).unwrap();
        let a = kernel_eval(&p, &DVector::from_column_slice(&q[..n]), &DVector::from_column_slice(&q[4..4 + n])).unwrap();
        let b = kernel_eval(&p, &DVector::zeros(n), &DVector::zeros(n)).unwrap();
        prop_assert!((a.norm() - b.norm()).abs() < 1e-10 * b.norm());
    }

    #[test]
    fn transition_probabilities_are_doubly_stochastic(n in 1usize..12, g in 0.05..2.0f64, t in 0.0..20.0f64) {
        let chain = LadderChain::new(n, 1.0, g).unwrap();
        for i in 1..=n {
            let mut row = 0.0;
            for j in 1..=n {
                let p = transition_probability(&chain, t, i, j).unwrap();
                let back = transition_probability(&chain, t, j, i).unwrap();
                prop_assert!((p - back).abs() < 1e-12);
                row += p;
            }
            prop_assert!((row - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn chain_modes_reconstruct_coupling(n in 2usize..20, m in 0.2..3.0f64, w in 0.1..3.0f64, periodic in any::<bool>()) {
        let boundary = if periodic { Boundary::Periodic } else { Boundary::Dirichlet };
        let spec = ChainSpec::new(n, m, w, boundary).unwrap();
        let z = build_z(&spec).unwrap();
        let d = decompose(&z, m).unwrap();
        let back = &d.v * DMatrix::from_diagonal(&d.z) * d.v.transpose();
        prop_assert!((back - &z).amax() < 1e-10 * z.amax());
        prop_assert!((d.v.transpose() * &d.v - DMatrix::identity(n, n)).amax() < 1e-10);
    }
}
