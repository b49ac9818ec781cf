//! Property tests for the structural invariants that hold on arbitrary
//! input, not just the curated examples.

use num_complex::Complex64;
use proptest::prelude::*;

use wick::coefficients::preset_tccr;
use wick::linalg::{kron, ComplexMatrix};
use wick::symbolic::{inversion_measure, parse_expr, wick_order, Letter, StarPolynomial, Word};
use wick::DEFAULT_DIM_CAP;

fn small_complex() -> impl Strategy<Value = Complex64> {
    (-4i32..=4, -4i32..=4).prop_map(|(re, im)| Complex64::new(re as f64 / 2.0, im as f64 / 2.0))
}

fn small_matrix(max_dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, c)| {
        proptest::collection::vec(small_complex(), r * c)
            .prop_map(move |data| ComplexMatrix::from_fn(r, c, |i, j| data[i * c + j]))
    })
}

fn letters(d: usize, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    proptest::collection::vec(
        (0..d, proptest::bool::ANY).prop_map(|(index, starred)| Letter { starred, index }),
        0..=max_len,
    )
}

proptest! {
    // Mixed product: (A ⊗ B)(C ⊗ D) = (AC) ⊗ (BD). Half-integer entries
    // keep all products exact, so the comparison is entrywise equality.
    #[test]
    fn kron_mixed_product(
        a in small_matrix(3), b in small_matrix(3),
        c_cols in 1usize..=3, d_cols in 1usize..=3,
        seed in proptest::num::u64::ANY,
    ) {
        let mut rng = wick::rng::Rng::new(seed);
        let half = |rng: &mut wick::rng::Rng| {
            Complex64::new(rng.below(9) as f64 / 2.0 - 2.0, rng.below(9) as f64 / 2.0 - 2.0)
        };
        let c_mat = ComplexMatrix::from_fn(a.cols(), c_cols, |_, _| half(&mut rng));
        let d_mat = ComplexMatrix::from_fn(b.cols(), d_cols, |_, _| half(&mut rng));
        let lhs = kron(&a, &b, DEFAULT_DIM_CAP).unwrap()
            .matmul(&kron(&c_mat, &d_mat, DEFAULT_DIM_CAP).unwrap());
        let rhs = kron(&a.matmul(&c_mat), &b.matmul(&d_mat), DEFAULT_DIM_CAP).unwrap();
        prop_assert!(lhs.sub(&rhs).max_abs() == 0.0);
    }

    // Polynomial text output reparses to the same polynomial.
    #[test]
    fn display_parse_round_trip(ls in letters(3, 5), coeff in small_complex()) {
        prop_assume!(coeff != Complex64::ZERO);
        let mut poly = StarPolynomial::monomial(Word::new(ls), coeff);
        poly.add_term(Word::unit(), Complex64::new(1.0, 0.0));
        let text = poly.to_string();
        let reparsed = parse_expr(&text, 3).unwrap();
        prop_assert_eq!(reparsed, poly);
    }

    // Normal ordering always terminates with a normal-ordered result whose
    // inversion measure is zero, for arbitrary words.
    #[test]
    fn wick_order_terminates_normal_ordered(ls in letters(2, 8)) {
        let coeffs = preset_tccr(0.5, 2, false).unwrap();
        let word = Word::new(ls);
        let ordered = wick_order(
            &StarPolynomial::monomial(word, Complex64::new(1.0, 0.0)),
            &coeffs,
        );
        prop_assert!(ordered.is_normal_ordered());
        for (w, _) in ordered.terms() {
            prop_assert_eq!(inversion_measure(w), 0);
        }
    }
}
