//! Property tests for the pure and CPM semantics on random diagrams.

use discard_core::cpm::{double, interpret_cpm, interpret_cpm_doubled, interpret_cpm_with};
use discard_core::properties::purify;
use discard_core::random::{random_diagram, random_diagram_with_boundary, Shape};
use discard_core::semantics::interp_with;
use discard_core::tensor::Schedule;
use discard_core::{builders, interp_exact, interp_float, Calculus, Diagram, ExactScalar, FloatTensor};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CALCULI: [Calculus; 3] = [Calculus::ZX, Calculus::ZW, Calculus::ZH];

fn calculus() -> impl Strategy<Value = Calculus> {
    prop::sample::select(CALCULI.to_vec())
}

fn pure(seed: u64, c: Calculus, max_wires: usize, max_nodes: usize) -> Diagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_diagram(&mut rng, c, Shape { max_wires, max_nodes, max_grounds: 0 })
}

fn grounded(seed: u64, c: Calculus) -> Diagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_diagram(&mut rng, c, Shape { max_wires: 4, max_nodes: 15, max_grounds: 3 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn compose_is_matrix_product(seed in any::<u64>(), c in calculus()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d1 = random_diagram_with_boundary(&mut rng, c, 1, 2, 6);
        let d2 = random_diagram_with_boundary(&mut rng, c, 2, 1, 6);
        let lhs = interp_exact(&d2.compose(&d1).unwrap()).unwrap();
        let rhs = interp_exact(&d2).unwrap().matmul(&interp_exact(&d1).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn tensor_is_kronecker(a in any::<u64>(), b in any::<u64>(), c in calculus()) {
        let d1 = pure(a, c, 3, 6);
        let d2 = pure(b, c, 3, 6);
        let lhs = interp_exact(&d1.tensor(&d2).unwrap()).unwrap();
        let rhs = interp_exact(&d1).unwrap().kron(&interp_exact(&d2).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn dagger_is_an_involution_and_adjoint(seed in any::<u64>(), c in calculus()) {
        let d = pure(seed, c, 4, 12);
        let dd = d.dagger().unwrap();
        prop_assert_eq!(&dd.dagger().unwrap(), &d);
        prop_assert_eq!(interp_exact(&dd).unwrap(), interp_exact(&d).unwrap().dagger());
    }

    #[test]
    fn conjugate_is_an_involution(seed in any::<u64>(), c in calculus()) {
        let d = pure(seed, c, 4, 12);
        prop_assert_eq!(&d.conjugate().conjugate(), &d);
        prop_assert_eq!(interp_exact(&d.conjugate()).unwrap(), interp_exact(&d).unwrap().conj());
    }

    #[test]
    fn exact_and_float_agree(seed in any::<u64>(), c in calculus()) {
        let d = pure(seed, c, 4, 20);
        let e = interp_exact(&d).unwrap().to_float();
        let f = interp_float(&d).unwrap();
        let scale = e.data().iter().fold(1.0f64, |m, z| m.max(z.norm()));
        prop_assert!(e.max_abs_diff(&f) <= 1e-10 * scale);
    }

    #[test]
    fn contraction_order_does_not_matter(seed in any::<u64>(), c in calculus()) {
        let d = pure(seed, c, 4, 15);
        let g = interp_with::<ExactScalar>(&d, Schedule::Greedy).unwrap();
        let s = interp_with::<ExactScalar>(&d, Schedule::Sequential).unwrap();
        prop_assert_eq!(g, s);
    }

    #[test]
    fn two_cpm_routes_agree(seed in any::<u64>(), c in calculus()) {
        let d = grounded(seed, c);
        let a = interpret_cpm_with::<ExactScalar>(&d).unwrap();
        let b = interpret_cpm_doubled::<ExactScalar>(&d).unwrap();
        prop_assert_eq!(a.choi(), b.choi());
    }

    #[test]
    fn purification_round_trip(seed in any::<u64>(), c in calculus()) {
        let d = grounded(seed, c);
        let p = purify(&d);
        prop_assert!(!p.pure.contains_ground());
        let m = interp_float(&p.pure).unwrap();
        let traced = double(&m).trace_outputs(p.ancilla_count);
        prop_assert!(traced.max_abs_diff(&interpret_cpm(&d).unwrap()) <= 1e-9);
    }

    #[test]
    fn doubling_is_rank_one(seed in any::<u64>(), c in calculus()) {
        let m = interp_float(&pure(seed, c, 4, 10)).unwrap();
        let choi = double(&m).choi().clone();
        let v = FloatTensor::from_vec(m.data().len(), 1, m.data().to_vec());
        let outer = v.matmul(&v.dagger()).unwrap();
        prop_assert!(choi.max_abs_diff(&outer) <= 1e-12);
    }
}

#[test]
fn snake_equations() {
    for c in CALCULI {
        let id = Diagram::identity(c, 1);
        let left = Diagram::sequence(&[
            id.tensor(&builders::cap(c)).unwrap(),
            builders::cup(c).tensor(&id).unwrap(),
        ])
        .unwrap();
        let right = Diagram::sequence(&[
            builders::cap(c).tensor(&id).unwrap(),
            id.tensor(&builders::cup(c)).unwrap(),
        ])
        .unwrap();
        for d in [left, right] {
            assert_eq!(interp_exact(&d).unwrap(), interp_exact(&id).unwrap());
        }
    }
}

#[test]
fn ground_is_the_trace() {
    for c in CALCULI {
        let s = interpret_cpm(&builders::ground(c, 1)).unwrap();
        // Choi matrix of ρ ↦ tr ρ is the identity on the input.
        assert_eq!(s.choi(), &FloatTensor::identity(2));
        let rho = FloatTensor::from_vec(2, 2, [0.25, 0.5, 0.5, 0.75].map(|x| Complex64::new(x, 0.0)).to_vec());
        assert!((s.apply(&rho).unwrap().get(0, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }
}
