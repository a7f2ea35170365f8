//! Property-based invariants of the Pauli algebra and its dense image.

use num_complex::Complex;
use proptest::prelude::*;

use qrac::dense::DenseOperator;
use qrac::pauli::PauliSum;
use qrac::PauliString;

const SITES: usize = 3;
const DIM: usize = 1 << SITES;

fn word() -> impl Strategy<Value = PauliString> {
    let mask = 0..(1u64 << SITES);
    (mask.clone(), mask, prop_oneof![Just(1i8), Just(-1i8)])
        .prop_map(|(x, z, s)| PauliString::from_masks(SITES, x, z, s))
}

fn phased(phase: u8, w: &PauliString) -> DenseOperator<f64> {
    let factor = match phase % 4 {
        0 => Complex::new(1.0, 0.0),
        1 => Complex::new(0.0, 1.0),
        2 => Complex::new(-1.0, 0.0),
        _ => Complex::new(0.0, -1.0),
    };
    w.to_dense::<f64>(SITES).unwrap().scaled(factor)
}

proptest! {
    #[test]
    fn multiply_matches_dense(a in word(), b in word()) {
        let (phase, product) = a.multiply(&b).unwrap();
        let dense = a
            .to_dense::<f64>(SITES)
            .unwrap()
            .matmul(&b.to_dense::<f64>(SITES).unwrap())
            .unwrap();
        prop_assert!(dense.max_abs_diff(&phased(phase, &product)).unwrap() < 1e-14);
    }

    #[test]
    fn multiply_is_associative(a in word(), b in word(), c in word()) {
        let (p1, ab) = a.multiply(&b).unwrap();
        let (p2, ab_c) = ab.multiply(&c).unwrap();
        let (q1, bc) = b.multiply(&c).unwrap();
        let (q2, a_bc) = a.multiply(&bc).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        prop_assert_eq!((p1 + p2) % 4, (q1 + q2) % 4);
    }

    #[test]
    fn commutation_is_symmetric_and_dense_consistent(a in word(), b in word()) {
        prop_assert_eq!(a.commutes(&b).unwrap(), b.commutes(&a).unwrap());
        let ad = a.to_dense::<f64>(SITES).unwrap();
        let bd = b.to_dense::<f64>(SITES).unwrap();
        let comm = ad.matmul(&bd).unwrap().sub(&bd.matmul(&ad).unwrap()).unwrap();
        prop_assert_eq!(a.commutes(&b).unwrap(), comm.max_abs() < 1e-14);
    }

    #[test]
    fn words_square_to_identity(a in word()) {
        let (phase, sq) = a.multiply(&a).unwrap();
        prop_assert_eq!(phase, 0);
        prop_assert!(sq.is_identity());
        prop_assert_eq!(sq.sign(), 1);
    }

    #[test]
    fn rotation_preserves_coefficient_mass(
        g in word(),
        terms in proptest::collection::vec((word(), -2.0..2.0f64), 1..5),
        angle in -3.0..3.0f64,
    ) {
        // Conjugation by a unitary preserves the Frobenius norm, which for
        // a Pauli sum is the squared-coefficient mass (after merging).
        let mut sum = PauliSum::<f64>::zero(SITES);
        for (w, c) in &terms {
            sum.add_term(*c * w.sign() as f64, &w.with_sign(1));
        }
        let rotated = sum.rotate_conjugate(&g.with_sign(1), angle).unwrap();
        prop_assert!((rotated.norm_sq() - sum.norm_sq()).abs() < 1e-10);
    }

    #[test]
    fn rotation_matches_dense(g in word(), v in word(), angle in -3.0..3.0f64) {
        let g = g.with_sign(1);
        let sum = PauliSum::<f64>::from_terms(SITES, &[(1.0, v)]);
        let rotated = sum.rotate_conjugate(&g, angle).unwrap();
        let gd = g.to_dense::<f64>(SITES).unwrap();
        let r = DenseOperator::identity(DIM)
            .scaled(Complex::new((angle / 2.0).cos(), 0.0))
            .add(&gd.scaled(Complex::new(0.0, -(angle / 2.0).sin())))
            .unwrap();
        let lhs = r
            .matmul(&sum.to_dense(SITES).unwrap())
            .unwrap()
            .matmul(&r.adjoint())
            .unwrap();
        prop_assert!(lhs.max_abs_diff(&rotated.to_dense(SITES).unwrap()).unwrap() < 1e-12);
    }
}
