//! Spectra and positivity verdicts of the Gram operators P_2..P_N, here
//! for the scalar q-oscillator at a few deformation values, including one
//! outside the admissible range where the inner product goes indefinite.
//!
//! Run with: cargo run --example gram_spectrum

use num_complex::Complex64;
use wick::coefficients::preset_q_ccr;
use wick::fock::{gram_spectra, BuildOptions};

fn main() {
    for q in [0.5, -1.0, -1.5] {
        let coeffs = preset_q_ccr(&[vec![Complex64::new(q, 0.0)]], true).unwrap();
        println!("q = {q}:");
        let rows = gram_spectra(&coeffs, 5, &BuildOptions::default()).unwrap();
        for row in rows {
            println!(
                "  P_{} = {:>12.6}   {}",
                row.degree, row.eigenvalues[0], row.verdict.class
            );
        }
        println!();
    }

    // A d = 2 deformation where the spectra are no longer scalars.
    let q = vec![
        vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)],
        vec![Complex64::new(0.0, -1.0), Complex64::new(0.0, 0.0)],
    ];
    let coeffs = preset_q_ccr(&q, false).unwrap();
    println!("d = 2, unimodular off-diagonal q:");
    for row in gram_spectra(&coeffs, 4, &BuildOptions::default()).unwrap() {
        let evals: Vec<String> = row.eigenvalues.iter().map(|l| format!("{l:.4}")).collect();
        println!(
            "  P_{} ({}-dim, {}): [{}]",
            row.degree,
            row.dim,
            row.verdict.class,
            evals.join(", ")
        );
    }
}
