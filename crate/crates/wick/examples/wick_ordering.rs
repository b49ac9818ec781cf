//! Parse *-algebra expressions and bring them to normal order (all
//! unstarred generators before all starred ones) under different
//! relations.
//!
//! Run with: cargo run --example wick_ordering

use num_complex::Complex64;
use wick::coefficients::{preset_q_ccr, preset_tccr, uniform_q_matrix, WickCoefficients};
use wick::symbolic::{parse_expr, wick_order};

fn demo(name: &str, coeffs: &WickCoefficients, exprs: &[&str]) {
    println!("{name}:");
    for expr in exprs {
        let parsed = parse_expr(expr, coeffs.d()).unwrap();
        let ordered = wick_order(&parsed, coeffs);
        println!("  {expr:<24} ->  {ordered}");
    }
    println!();
}

fn main() {
    let free = WickCoefficients::zero(2);
    demo("free relations (T = 0)", &free, &[
        "a1* a1",
        "a1* a2",
        "a2* a1 a1* a2",
    ]);

    let q = preset_q_ccr(&uniform_q_matrix(2, Complex64::new(0.5, 0.0)), false).unwrap();
    demo("q-deformed, q = 0.5", &q, &[
        "a1* a1",
        "a1* a1 a1",
        "a1* a2 - 0.5 a2 a1*",
    ]);

    let qi = preset_q_ccr(
        &vec![
            vec![Complex64::ZERO, Complex64::new(0.0, 1.0)],
            vec![Complex64::new(0.0, -1.0), Complex64::ZERO],
        ],
        false,
    )
    .unwrap();
    demo("q-deformed, q_12 = i", &qi, &["a1* a2", "a2* a1"]);

    let tccr = preset_tccr(0.5, 2, false).unwrap();
    demo("twisted, mu = 0.5", &tccr, &[
        "a1* a1",
        "a2* a2",
        "a1* a2 a2* a1",
    ]);
}
