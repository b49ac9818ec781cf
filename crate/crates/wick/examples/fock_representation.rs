//! Build the truncated quotient Fock representation: quotient dimensions
//! per degree, adjointness of creation/annihilation, residual of the
//! defining relations, and evaluation of a kernel generator (which must
//! act as zero).
//!
//! Run with: cargo run --example fock_representation

use num_complex::Complex64;
use wick::coefficients::preset_tccr;
use wick::fock::{build_rep, verify_adjoint, verify_relations, BuildOptions, FockTruncation};
use wick::linalg::operator_norm;
use wick::symbolic::{evaluate_in_fock, parse_expr, wick_order};

fn main() {
    let mu = 0.5;
    let coeffs = preset_tccr(mu, 2, false).unwrap();
    let trunc = FockTruncation::build(&coeffs, 5, &BuildOptions::default()).unwrap();
    let rep = build_rep(&trunc).unwrap();

    println!("twisted relations, d = 2, mu = {mu}, truncation N = 5");
    println!("quotient dims per degree: {:?}", rep.quotient_dims);
    println!("adjointness residual:     {:.3e}", verify_adjoint(&trunc, &rep));
    println!("relation residual:        {:.3e}", verify_relations(&trunc, &rep, &coeffs));
    println!("kernel covariance:        {:.3e}", rep.kernel_covariance_residual);
    println!();

    // The degree-2 kernel generator is literally zero on the quotient.
    let generator = parse_expr("a2 a1 - 0.5 a1 a2", 2).unwrap();
    let eval = evaluate_in_fock(&generator, &rep).unwrap();
    println!(
        "‖a2 a1 - {mu} a1 a2‖ on the quotient = {:.3e}",
        operator_norm(&eval.matrix)
    );

    // Normal ordering is invisible to the representation (for words whose
    // intermediate degrees stay inside the truncation: no overflow flag).
    let p = parse_expr("a1* a1 a2*", 2).unwrap();
    let direct = evaluate_in_fock(&p, &rep).unwrap();
    assert!(!direct.overflowed);
    let ordered = wick_order(&p, &coeffs);
    let via_ordered = evaluate_in_fock(&ordered, &rep).unwrap();
    let diff = operator_norm(&direct.matrix.sub(&via_ordered.matrix));
    println!("evaluate(p) vs evaluate(normal_order(p)): difference {diff:.3e}");
    println!("normal order of a1* a1 a2*: {ordered}");

    // The inner product of two explicit degree-2 vectors.
    let x = [Complex64::ONE, Complex64::ZERO, Complex64::ZERO, Complex64::ONE];
    let val = trunc.fock_inner(2, &x, &x).unwrap();
    println!("<e11 + e22, e11 + e22> at degree 2 = {val}");
}
