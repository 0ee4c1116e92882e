//! Randomized property tests for the norm machinery, the block algebra
//! layer, and the pairing.

use num_complex::Complex64;
use proptest::prelude::*;

use pnorm::block::{block_diag, Algebra, ColumnModuleElement, Composition, RowModuleElement};
use pnorm::norms::{duality_map, holder_pairing, vector_p_norm};
use pnorm::opnorm::{best_op_norm, op_norm_estimate, transpose_duality_residual, OptimizerConfig};
use pnorm::pairing::{a_zeta, b_eta, pairing};
use pnorm::{ComplexMatrix, ComplexVector, PExponent};

fn cfg() -> OptimizerConfig {
    OptimizerConfig::default().with_restarts(16)
}

fn complex_entry() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec(complex_entry(), rows * cols)
        .prop_map(move |e| ComplexMatrix::new(rows, cols, e).unwrap())
}

fn any_matrix() -> impl Strategy<Value = ComplexMatrix> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| matrix(r, c))
}

fn vector(dim: usize) -> impl Strategy<Value = ComplexVector> {
    proptest::collection::vec(complex_entry(), dim).prop_map(|e| ComplexVector::new(e).unwrap())
}

fn any_vector() -> impl Strategy<Value = ComplexVector> {
    (1usize..=6).prop_flat_map(vector)
}

fn exponent() -> impl Strategy<Value = PExponent> {
    prop_oneof![
        Just(PExponent::ONE),
        Just(PExponent::new(1.5).unwrap()),
        Just(PExponent::TWO),
        Just(PExponent::new(3.0).unwrap()),
        Just(PExponent::Infinity),
    ]
}

fn exact_exponent() -> impl Strategy<Value = PExponent> {
    prop_oneof![Just(PExponent::ONE), Just(PExponent::TWO)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vector_norm_monotone_in_p(x in any_vector()) {
        let grid = [1.0, 1.5, 2.0, 3.0, 8.0];
        let mut prev = f64::INFINITY;
        for v in grid {
            let nrm = vector_p_norm(&x, PExponent::new(v).unwrap());
            prop_assert!(nrm <= prev + 1e-12 * prev.max(1.0));
            prev = nrm;
        }
        prop_assert!(vector_p_norm(&x, PExponent::Infinity) <= prev + 1e-12);
    }

    #[test]
    fn duality_map_attains_and_is_contractive(x in any_vector(), q in exponent()) {
        let nrm = vector_p_norm(&x, q);
        prop_assume!(nrm > 1e-9);
        let eta = duality_map(&x, q);
        prop_assert!((vector_p_norm(&eta, q.conjugate()) - 1.0).abs() < 1e-10);
        let pair = holder_pairing(&eta, &x).unwrap();
        prop_assert!((pair.re - nrm).abs() < 1e-10 * nrm.max(1.0));
        prop_assert!(pair.im.abs() < 1e-10 * nrm.max(1.0));
    }

    #[test]
    fn holder_inequality(x in any_vector(), q in exponent()) {
        let mut other = x.entries().to_vec();
        other.reverse();
        let eta = ComplexVector::new(other).unwrap();
        let lhs = holder_pairing(&eta, &x).unwrap().norm();
        let rhs = vector_p_norm(&eta, q.conjugate()) * vector_p_norm(&x, q);
        prop_assert!(lhs <= rhs + 1e-9);
    }

    #[test]
    fn norm_estimate_is_achieved(a in any_matrix(), p in exponent(), q in exponent()) {
        let est = op_norm_estimate(&a, p, q, &cfg());
        let image = a.matvec(&est.primal_witness).unwrap();
        let achieved = vector_p_norm(&image, q);
        prop_assert!((est.value - achieved).abs() <= 1e-12 * est.value.max(1.0));
        prop_assert!(vector_p_norm(&est.primal_witness, p) <= 1.0 + 1e-10);
    }

    #[test]
    fn norm_is_homogeneous(a in any_matrix(), p in exponent(), q in exponent(), c in 0.1..4.0f64) {
        let base = op_norm_estimate(&a, p, q, &cfg()).value;
        let scaled = op_norm_estimate(
            &a.scale(Complex64::new(c, 0.0)), p, q, &cfg(),
        ).value;
        prop_assert!((scaled - c * base).abs() <= 1e-10 * (c * base).max(1.0));
    }

    #[test]
    fn norm_submultiplicative_exact(a in matrix(3, 3), b in matrix(3, 3), p in exact_exponent()) {
        let ab = a.matmul(&b).unwrap();
        let lhs = best_op_norm(&ab, p, p, &cfg()).value;
        let rhs = best_op_norm(&a, p, p, &cfg()).value * best_op_norm(&b, p, p, &cfg()).value;
        prop_assert!(lhs <= rhs + 1e-9 * rhs.max(1.0));
    }

    #[test]
    fn transpose_duality(a in any_matrix(), p in exact_exponent(), q in exact_exponent()) {
        prop_assert!(transpose_duality_residual(&a, p, q, &cfg()) <= 1e-8);
    }

    #[test]
    fn membership_is_scale_invariant(m in matrix(3, 3), c in 0.01..100.0f64) {
        let alg = Algebra::block(Composition::new(vec![1, 2]).unwrap());
        let within = alg.membership(&m, 1e-10).unwrap();
        let scaled = alg.membership(&m.scale(Complex64::new(c, 0.0)), 1e-10).unwrap();
        prop_assert_eq!(within, scaled);
    }

    #[test]
    fn slice_and_block_norms_agree(
        b1 in matrix(1, 1), b2 in matrix(2, 2), b3 in matrix(1, 1), p in exact_exponent(),
    ) {
        let comp = Composition::new(vec![1, 2, 1]).unwrap();
        let blk = block_diag(&[b1, b2, b3]).unwrap();
        let a = ColumnModuleElement::from_blocks(Algebra::block(comp.clone()), vec![blk]).unwrap();
        let full = best_op_norm(a.matrix(), p, p, &cfg()).value;
        let mut max_slice: f64 = 0.0;
        let mut max_block: f64 = 0.0;
        for j in 0..comp.len() {
            max_slice = max_slice.max(best_op_norm(&a.column_slice(j).unwrap(), p, p, &cfg()).value);
            max_block = max_block.max(best_op_norm(&a.column_block(j).unwrap(), p, p, &cfg()).value);
        }
        prop_assert!((full - max_slice).abs() <= 1e-9 * full.max(1.0));
        prop_assert!((max_slice - max_block).abs() <= 1e-12 * full.max(1.0));
    }

    #[test]
    fn pairing_is_bilinear(
        b1 in matrix(2, 2), a1 in matrix(2, 2), a2 in matrix(2, 2), c in complex_entry(),
    ) {
        let alg = Algebra::full_matrix(2);
        let b = RowModuleElement::from_blocks(alg.clone(), vec![b1]).unwrap();
        let x = ColumnModuleElement::from_blocks(alg.clone(), vec![a1.clone()]).unwrap();
        let y = ColumnModuleElement::from_blocks(alg.clone(), vec![a2.clone()]).unwrap();
        let sum = ColumnModuleElement::from_blocks(
            alg, vec![a1.add(&a2.scale(c)).unwrap()],
        ).unwrap();
        let lhs = pairing(&b, &sum).unwrap();
        let rhs = pairing(&b, &x).unwrap().add(&pairing(&b, &y).unwrap().scale(c)).unwrap();
        let diff = lhs.add(&rhs.scale(Complex64::new(-1.0, 0.0))).unwrap();
        prop_assert!(diff.frobenius_norm() <= 1e-12);
    }

    #[test]
    fn pairing_is_contractive(
        b1 in matrix(2, 2), b2 in matrix(2, 2), a1 in matrix(2, 2), a2 in matrix(2, 2),
        p in exact_exponent(),
    ) {
        let alg = Algebra::full_matrix(2);
        let b = RowModuleElement::from_blocks(alg.clone(), vec![b1, b2]).unwrap();
        let a = ColumnModuleElement::from_blocks(alg, vec![a1, a2]).unwrap();
        let pair = pairing(&b, &a).unwrap();
        let lhs = best_op_norm(&pair, p, p, &cfg()).value;
        let rhs = best_op_norm(b.matrix(), p, p, &cfg()).value
            * best_op_norm(a.matrix(), p, p, &cfg()).value;
        prop_assert!(lhs <= rhs + 1e-9 * rhs.max(1.0));
    }

    #[test]
    fn b_eta_is_isometric(eta in vector(4), p in exact_exponent()) {
        let b = b_eta(&eta, 2, 2).unwrap();
        let nrm = best_op_norm(b.matrix(), p, p, &cfg()).value;
        let target = vector_p_norm(&eta, p.conjugate());
        prop_assert!((nrm - target).abs() <= 1e-9 * target.max(1.0));
    }

    #[test]
    fn a_zeta_is_isometric(zeta in vector(4), p in exact_exponent()) {
        let a = a_zeta(&zeta, 2, 2).unwrap();
        let nrm = best_op_norm(a.matrix(), p, p, &cfg()).value;
        let target = vector_p_norm(&zeta, p);
        prop_assert!((nrm - target).abs() <= 1e-9 * target.max(1.0));
    }

    #[test]
    fn conjugate_is_an_involution(p in exponent()) {
        let pc = p.conjugate().conjugate();
        match (p, pc) {
            (PExponent::Infinity, PExponent::Infinity) => {}
            (PExponent::Finite(a), PExponent::Finite(b)) => prop_assert!((a - b).abs() < 1e-12),
            _ => prop_assert!(false, "conjugate changed finiteness"),
        }
    }
}
