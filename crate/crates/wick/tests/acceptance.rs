//! Acceptance suite: one test per criterion, each printing a pass line
//! with its runtime (run with `--nocapture` to see them). Expected values
//! come from independent oracles computed inside this file, never from
//! the code paths under test.

use std::time::Instant;

use num_complex::Complex64;
use wick::audit::{audit_faithfulness, GENERATOR_VANISH_TOL};
use wick::coefficients::{
    preset_q_ccr, preset_tccr, random_psd_wick, random_wick_with_norm, uniform_q_matrix,
    WickCoefficients,
};
use wick::fock::{build_rep, gram_spectra, norm_growth, verify_adjoint, verify_relations,
    BuildOptions, FockTruncation};
use wick::linalg::{kernel_basis, subspace_equal};
use wick::operators::{build_p, check_braid, classify_positivity, predicted_kernel,
    PositivityClass};
use wick::rng::Rng;
use wick::symbolic::{evaluate_in_fock, prop1_rhs, wick_order, wick_order_with_strategy, Letter,
    RewriteStrategy, StarPolynomial, Word};
use wick::{Complex64 as C64, DEFAULT_DIM_CAP};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn scalar_q(q: f64) -> WickCoefficients {
    preset_q_ccr(&[vec![c(q, 0.0)]], true).unwrap()
}

/// Independent scalar oracle: [n]_q = 1 + q + ... + q^{n-1}.
fn q_bracket(q: f64, n: usize) -> f64 {
    (0..n).map(|k| q.powi(k as i32)).sum()
}

/// Independent scalar oracle: P_n = prod_{k=2..n} [k]_q.
fn q_factorial(q: f64, n: usize) -> f64 {
    (2..=n).map(|k| q_bracket(q, k)).product()
}

/// Unimodular-off-diagonal q matrix with zero diagonal.
fn unimodular_offdiag(d: usize, q: Complex64) -> Vec<Vec<Complex64>> {
    let mut m = vec![vec![Complex64::ZERO; d]; d];
    for i in 0..d {
        for j in i + 1..d {
            m[i][j] = q;
            m[j][i] = q.conj();
        }
    }
    m
}

/// The preset grid used by the adjointness/relation/positivity criteria:
/// q-deformations at |q| in {0, 0.3, 0.9, 1 (off-diagonal)} for d = 1..3,
/// twisted relations at mu in {0.3, 0.5, 0.7} for d = 2..3.
fn preset_grid() -> Vec<(String, WickCoefficients)> {
    let mut grid = Vec::new();
    for d in 1..=3usize {
        for &q in &[0.0, 0.3, 0.9] {
            grid.push((
                format!("q_ccr(d={d}, q={q})"),
                preset_q_ccr(&uniform_q_matrix(d, c(q, 0.0)), false).unwrap(),
            ));
        }
        grid.push((
            format!("q_ccr(d={d}, unimodular off-diagonal)"),
            preset_q_ccr(&unimodular_offdiag(d, c(0.0, 1.0)), false).unwrap(),
        ));
    }
    for d in 2..=3usize {
        for &mu in &[0.3, 0.5, 0.7] {
            grid.push((
                format!("tccr(d={d}, mu={mu})"),
                preset_tccr(mu, d, false).unwrap(),
            ));
        }
    }
    grid
}

fn pass(criterion: &str, started: Instant) {
    println!(
        "acceptance {criterion}: PASS ({} ms)",
        started.elapsed().as_millis()
    );
}

#[test]
fn criterion_01_scalar_q_factorial_oracle() {
    let started = Instant::now();
    for &q in &[-0.9, -0.5, 0.0, 0.5, 0.9, 1.0] {
        let t = scalar_q(q).build_t().unwrap();
        for n in 0..=8usize {
            let p = build_p(&t, n, DEFAULT_DIM_CAP).unwrap();
            let got = p.matrix.get(0, 0).re;
            let expect = q_factorial(q, n);
            assert!(
                (got - expect).abs() <= 1e-12 * expect.abs().max(1.0),
                "q = {q}, n = {n}: {got} vs {expect}"
            );
        }
    }
    pass("01 (scalar q-factorial oracle)", started);
}

#[test]
fn criterion_02_braid_condition() {
    let started = Instant::now();
    for seed in 0..20u64 {
        let mut rng = Rng::new(seed);
        for d in 1..=3usize {
            let mut q = vec![vec![Complex64::ZERO; d]; d];
            for i in 0..d {
                q[i][i] = c(rng.uniform_in(-1.0, 1.0), 0.0);
                for j in i + 1..d {
                    let z = rng.complex_in_unit_disk();
                    q[i][j] = z;
                    q[j][i] = z.conj();
                }
            }
            let t = preset_q_ccr(&q, false).unwrap().build_t().unwrap();
            let braid = check_braid(&t, 1e-12, DEFAULT_DIM_CAP).unwrap();
            assert!(
                braid.residual < 1e-12,
                "q-ccr seed {seed} d {d}: residual {:.3e}",
                braid.residual
            );
        }
    }
    for &mu in &[0.3, 0.5, 0.7] {
        for d in 1..=3usize {
            let t = preset_tccr(mu, d, false).unwrap().build_t().unwrap();
            let braid = check_braid(&t, 1e-12, DEFAULT_DIM_CAP).unwrap();
            assert!(
                braid.residual < 1e-12,
                "tccr mu {mu} d {d}: residual {:.3e}",
                braid.residual
            );
        }
    }
    pass("02 (braid condition)", started);
}

#[test]
fn criterion_03_norm_bound_positivity() {
    let started = Instant::now();
    // ‖T‖ = 0.4 < sqrt(2) - 1: every Gram operator strictly positive.
    let mut rng = Rng::new(303);
    for trial in 0..20 {
        let coeffs = random_wick_with_norm(2, 0.4, &mut rng).unwrap();
        let t = coeffs.build_t().unwrap();
        for n in 2..=4usize {
            let p = build_p(&t, n, DEFAULT_DIM_CAP).unwrap();
            let verdict = classify_positivity(&p, 1e-9).unwrap();
            assert_eq!(
                verdict.class,
                PositivityClass::PositiveDefinite,
                "trial {trial} n {n}: min eig {:.3e}",
                verdict.min_eigenvalue
            );
            assert!(verdict.min_eigenvalue > verdict.tol_used);
        }
    }
    pass("03 (norm bound => strict positivity)", started);
}

#[test]
fn criterion_04_positive_t_positivity() {
    let started = Instant::now();
    // T >= 0 has no norm restriction: exercise norms both below and above 1.
    let mut rng = Rng::new(404);
    for trial in 0..20 {
        let target = if trial % 2 == 0 { 0.9 } else { 1.5 };
        let coeffs = random_psd_wick(2, target, &mut rng).unwrap();
        let t = coeffs.build_t().unwrap();
        for n in 2..=4usize {
            let p = build_p(&t, n, DEFAULT_DIM_CAP).unwrap();
            let verdict = classify_positivity(&p, 1e-9).unwrap();
            assert_eq!(
                verdict.class,
                PositivityClass::PositiveDefinite,
                "trial {trial} (norm {target}) n {n}: min eig {:.3e}",
                verdict.min_eigenvalue
            );
        }
    }
    pass("04 (T >= 0 => strict positivity)", started);
}

#[test]
fn criterion_05_braided_contraction_never_indefinite() {
    let started = Instant::now();
    let opts = BuildOptions::default();
    for (name, coeffs) in preset_grid() {
        let strictly_inside = name.contains("q=0") || name.contains("q=0.3") || name.contains("q=0.9");
        let rows = gram_spectra(&coeffs, 6, &opts).unwrap();
        for row in &rows {
            assert_ne!(
                row.verdict.class,
                PositivityClass::Indefinite,
                "{name} degree {}: min eig {:.3e}",
                row.degree,
                row.verdict.min_eigenvalue
            );
            // With every |q_ij| < 1 the inner product is strictly
            // positive: no kernel at any degree up to 6.
            if strictly_inside {
                assert_eq!(
                    row.verdict.kernel_dim, 0,
                    "{name} degree {}: unexpected kernel",
                    row.degree
                );
            }
        }
    }
    pass("05 (presets in range never indefinite, n <= 6)", started);
}

#[test]
fn criterion_06_kernel_structure() {
    let started = Instant::now();
    let opts = BuildOptions::default();

    let mut cases: Vec<(String, WickCoefficients, usize)> = Vec::new();
    for q in [c(1.0, 0.0), c(0.0, 1.0), Complex64::from_polar(1.0, std::f64::consts::PI / 3.0)] {
        cases.push((
            format!("q_ccr(d=2, q12={q})"),
            preset_q_ccr(&unimodular_offdiag(2, q), false).unwrap(),
            1, // one unimodular pair
        ));
    }
    for d in 2..=3usize {
        for &mu in &[0.3, 0.7] {
            cases.push((
                format!("tccr(d={d}, mu={mu})"),
                preset_tccr(mu, d, false).unwrap(),
                d * (d - 1) / 2,
            ));
        }
    }

    for (name, coeffs, expect_dim2) in cases {
        let t = coeffs.build_t().unwrap();
        let trunc = FockTruncation::build(&coeffs, 5, &opts).unwrap();
        for degree in 2..=5usize {
            let observed = trunc.degree(degree).unwrap().kernel.as_ref().unwrap();
            let predicted = predicted_kernel(&t, degree - 1, 1e-9, DEFAULT_DIM_CAP).unwrap();
            let (equal, distance) = subspace_equal(observed, &predicted, 1e-8).unwrap();
            assert!(
                equal,
                "{name} degree {degree}: distance {distance:.3e}, dims {} vs {}",
                observed.dim(),
                predicted.dim()
            );
            if degree == 2 {
                assert_eq!(observed.dim(), expect_dim2, "{name} degree-2 kernel dimension");
            }
        }
    }
    pass("06 (kernel equality ker P_n = sum of lifted ker(1+T))", started);
}

#[test]
fn criterion_07_one_star_commutation_formula() {
    let started = Instant::now();
    let presets: Vec<WickCoefficients> = vec![
        preset_q_ccr(&uniform_q_matrix(2, c(0.3, 0.4)), false).unwrap(),
        preset_q_ccr(&uniform_q_matrix(3, c(0.5, 0.0)), false).unwrap(),
        preset_q_ccr(&unimodular_offdiag(3, c(0.0, 1.0)), false).unwrap(),
        preset_tccr(0.5, 2, false).unwrap(),
        preset_tccr(0.7, 3, false).unwrap(),
    ];
    for coeffs in &presets {
        let d = coeffs.d();
        for n in 0..=4usize {
            for code in 0..d.pow(n as u32) {
                let mut rest = code;
                let mut x_word = vec![0usize; n];
                for pos in (0..n).rev() {
                    x_word[pos] = rest % d;
                    rest /= d;
                }
                for i in 0..d {
                    let closed = prop1_rhs(i, &x_word, coeffs, DEFAULT_DIM_CAP).unwrap();
                    let mut letters = vec![Letter { starred: true, index: i }];
                    letters.extend(x_word.iter().map(|&g| Letter { starred: false, index: g }));
                    let rewritten = wick_order(
                        &StarPolynomial::monomial(Word::new(letters), Complex64::ONE),
                        coeffs,
                    );
                    let dist = closed.distance(&rewritten);
                    assert!(
                        dist < 1e-12,
                        "d {d} |X| {n} i {i}: coefficientwise distance {dist:.3e}"
                    );
                }
            }
        }
    }
    pass("07 (closed commutation formula == rewriter)", started);
}

#[test]
fn criterion_08_adjointness() {
    let started = Instant::now();
    let opts = BuildOptions::default();
    for (name, coeffs) in preset_grid() {
        let trunc = FockTruncation::build(&coeffs, 5, &opts).unwrap();
        let rep = build_rep(&trunc).unwrap();
        let residual = verify_adjoint(&trunc, &rep);
        assert!(residual < 1e-10, "{name}: adjointness residual {residual:.3e}");
        assert!(
            rep.kernel_covariance_residual < 1e-9,
            "{name}: kernel covariance residual {:.3e}",
            rep.kernel_covariance_residual
        );
    }
    pass("08 (creation/annihilation adjointness on the grid)", started);
}

#[test]
fn criterion_09_relations() {
    let started = Instant::now();
    let opts = BuildOptions::default();
    for (name, coeffs) in preset_grid() {
        let trunc = FockTruncation::build(&coeffs, 5, &opts).unwrap();
        let rep = build_rep(&trunc).unwrap();
        let residual = verify_relations(&trunc, &rep, &coeffs);
        assert!(residual < 1e-8, "{name}: relation residual {residual:.3e}");
    }
    // T = 0 reproduces the free isometry relations exactly (residual 0.0).
    let coeffs = WickCoefficients::zero(2);
    let trunc = FockTruncation::build(&coeffs, 5, &opts).unwrap();
    let rep = build_rep(&trunc).unwrap();
    assert_eq!(verify_relations(&trunc, &rep, &coeffs), 0.0);
    pass("09 (defining relations on the grid; free case exact)", started);
}

#[test]
fn criterion_10_kernel_generators_vanish() {
    let started = Instant::now();
    let opts = BuildOptions::default();

    // Unimodular q-deformation: a_2 a_1 - q_12 a_1 a_2 acts as zero.
    for q12 in [c(1.0, 0.0), c(0.0, 1.0), Complex64::from_polar(1.0, std::f64::consts::PI / 3.0)]
    {
        let coeffs = preset_q_ccr(&unimodular_offdiag(2, q12), false).unwrap();
        let trunc = FockTruncation::build(&coeffs, 5, &opts).unwrap();
        let rep = build_rep(&trunc).unwrap();
        let mut p = StarPolynomial::monomial(
            Word::new(vec![
                Letter { starred: false, index: 1 },
                Letter { starred: false, index: 0 },
            ]),
            Complex64::ONE,
        );
        p.add_term(
            Word::new(vec![
                Letter { starred: false, index: 0 },
                Letter { starred: false, index: 1 },
            ]),
            -q12,
        );
        let eval = evaluate_in_fock(&p, &rep).unwrap();
        let norm = wick::linalg::operator_norm(&eval.matrix);
        assert!(norm < 1e-9, "q12 = {q12}: norm {norm:.3e}");
    }

    // Twisted relations: a_j a_i - mu a_i a_j for every pair i < j.
    for d in 2..=3usize {
        for &mu in &[0.3, 0.5, 0.7] {
            let coeffs = preset_tccr(mu, d, false).unwrap();
            let trunc = FockTruncation::build(&coeffs, 5, &opts).unwrap();
            let rep = build_rep(&trunc).unwrap();
            for i in 0..d {
                for j in i + 1..d {
                    let mut p = StarPolynomial::monomial(
                        Word::new(vec![
                            Letter { starred: false, index: j },
                            Letter { starred: false, index: i },
                        ]),
                        Complex64::ONE,
                    );
                    p.add_term(
                        Word::new(vec![
                            Letter { starred: false, index: i },
                            Letter { starred: false, index: j },
                        ]),
                        c(-mu, 0.0),
                    );
                    let eval = evaluate_in_fock(&p, &rep).unwrap();
                    let norm = wick::linalg::operator_norm(&eval.matrix);
                    assert!(norm < 1e-9, "tccr d {d} mu {mu} pair ({i},{j}): norm {norm:.3e}");
                }
            }
        }
    }

    // The audit sees the same thing through its own path.
    let coeffs = preset_tccr(0.5, 2, false).unwrap();
    let section = audit_faithfulness(&coeffs, 5, &Default::default()).unwrap();
    assert!(section
        .kernel_generators
        .iter()
        .all(|row| row.vanishes && row.residual < GENERATOR_VANISH_TOL));
    pass("10 (kernel generators vanish on the quotient)", started);
}

#[test]
fn criterion_11_rewriter_soundness_and_confluence() {
    let started = Instant::now();

    // Strategy independence, exact: all coefficient data is dyadic so
    // every floating-point operation in the rewriting is exact and the
    // canonical forms must agree bit for bit.
    let mut dyadic_rng = Rng::new(1111);
    let mut dyadic_entries = Vec::with_capacity(16);
    for _ in 0..16 {
        let re = (dyadic_rng.below(17) as f64 - 8.0) / 16.0;
        let im = (dyadic_rng.below(17) as f64 - 8.0) / 16.0;
        dyadic_entries.push(c(re, im));
    }
    let mut sym = dyadic_entries.clone();
    let d2 = 2usize;
    for i in 0..d2 {
        for j in 0..d2 {
            for k in 0..d2 {
                for l in 0..d2 {
                    let idx = ((i * d2 + j) * d2 + k) * d2 + l;
                    let jdx = ((j * d2 + i) * d2 + l) * d2 + k;
                    sym[idx] = (dyadic_entries[idx] + dyadic_entries[jdx].conj()) * 0.5;
                }
            }
        }
    }
    let dyadic_random = WickCoefficients::from_entries(2, sym).unwrap();

    let systems = [
        preset_q_ccr(&uniform_q_matrix(3, c(0.5, 0.0)), false).unwrap(),
        preset_q_ccr(&unimodular_offdiag(3, c(0.0, 1.0)), false).unwrap(),
        preset_tccr(0.5, 3, false).unwrap(),
        dyadic_random,
    ];
    let mut rng = Rng::new(42);
    for trial in 0..200 {
        let coeffs = &systems[trial % systems.len()];
        let d = coeffs.d();
        let len = 1 + rng.below(6);
        let letters: Vec<Letter> = (0..len)
            .map(|_| Letter { starred: rng.below(2) == 1, index: rng.below(d) })
            .collect();
        let p = StarPolynomial::monomial(Word::new(letters), Complex64::ONE);
        let left = wick_order_with_strategy(&p, coeffs, RewriteStrategy::LeftmostFirst);
        let right = wick_order_with_strategy(&p, coeffs, RewriteStrategy::RightmostFirst);
        assert_eq!(left, right, "trial {trial}: strategies disagree");
        assert!(left.is_normal_ordered());
    }

    // Soundness for the quotient: evaluation cannot see normal ordering.
    let coeffs = preset_q_ccr(&uniform_q_matrix(2, c(0.6, 0.0)), false).unwrap();
    let trunc = FockTruncation::build(&coeffs, 4, &Default::default()).unwrap();
    let rep = build_rep(&trunc).unwrap();
    let mut done = 0;
    let mut attempts = 0;
    while done < 50 {
        attempts += 1;
        assert!(attempts < 2000, "could not find 50 non-overflowing polynomials");
        let terms = 1 + rng.below(3);
        let mut p = StarPolynomial::zero();
        for _ in 0..terms {
            let len = 1 + rng.below(3);
            let letters: Vec<Letter> = (0..len)
                .map(|_| Letter { starred: rng.below(2) == 1, index: rng.below(2) })
                .collect();
            p.add_term(Word::new(letters), rng.complex_normal());
        }
        let direct = evaluate_in_fock(&p, &rep).unwrap();
        if direct.overflowed {
            continue;
        }
        let ordered = wick_order(&p, &coeffs);
        let via_ordered = evaluate_in_fock(&ordered, &rep).unwrap();
        let diff =
            wick::linalg::operator_norm(&direct.matrix.sub(&via_ordered.matrix));
        assert!(diff < 1e-8, "attempt {attempts}: difference {diff:.3e}");
        done += 1;
    }
    pass("11 (rewriter confluence and soundness)", started);
}

#[test]
fn criterion_12_norm_growth() {
    let started = Instant::now();
    let opts = BuildOptions::default();

    // Undeformed case q = 1: creation norm out of degree n is sqrt(n+1).
    let trunc = FockTruncation::build(&scalar_q(1.0), 7, &opts).unwrap();
    let rep = build_rep(&trunc).unwrap();
    let growth = norm_growth(&trunc, &rep);
    for n in 0..=6usize {
        let expect = ((n + 1) as f64).sqrt();
        let got = growth.per_degree[n];
        assert!(
            (got - expect).abs() < 1e-10,
            "q = 1 degree {n}: {got} vs sqrt({}) = {expect}",
            n + 1
        );
    }
    assert!(growth.growing, "undeformed growth must be flagged");

    // q = 0.5: norms approach (1-q)^(-1/2) within 2% by degree 6.
    let q = 0.5;
    let trunc = FockTruncation::build(&scalar_q(q), 7, &opts).unwrap();
    let rep = build_rep(&trunc).unwrap();
    let growth = norm_growth(&trunc, &rep);
    let limit = (1.0 - q).powf(-0.5);
    let at6 = growth.per_degree[6];
    assert!(
        (at6 - limit).abs() / limit < 0.02,
        "q = 0.5 degree 6: {at6} vs limit {limit}"
    );
    assert!(!growth.growing);
    pass("12 (creation norm growth)", started);
}

#[test]
fn independent_oracle_checks_for_kernel_dims() {
    // Cross-check the expected degree-2 kernel dimensions used in
    // criterion 06 against an eigensolver-only route.
    let started = Instant::now();
    for (coeffs, expect) in [
        (preset_q_ccr(&unimodular_offdiag(2, c(0.0, 1.0)), false).unwrap(), 1usize),
        (preset_tccr(0.3, 3, false).unwrap(), 3),
    ] {
        let t = coeffs.build_t().unwrap();
        let one_plus_t = wick::linalg::ComplexMatrix::identity(t.dim())
            .add(&t.matrix)
            .symmetrized();
        let kernel = kernel_basis(&one_plus_t, 1e-9).unwrap();
        assert_eq!(kernel.dim(), expect);
    }
    let _unused: C64 = Complex64::ZERO;
    pass("aux (kernel dimension oracle)", started);
}
