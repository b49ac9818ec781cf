//! The kernel of the Fock inner product, degree by degree, against the
//! prediction ker P_{n+1} = Σ_k ker(1 + T_k): dimensions, subspace
//! distances, and the degree-2 generators written as polynomials.
//!
//! Run with: cargo run --example kernel_structure

use num_complex::Complex64;
use wick::coefficients::{preset_q_ccr, preset_tccr};
use wick::fock::{BuildOptions, FockTruncation};
use wick::linalg::subspace_equal;
use wick::operators::predicted_kernel;
use wick::DEFAULT_DIM_CAP;

fn show(name: &str, coeffs: &wick::coefficients::WickCoefficients, max_degree: usize) {
    println!("{name}:");
    let t = coeffs.build_t().unwrap();
    let trunc = FockTruncation::build(coeffs, max_degree, &BuildOptions::default()).unwrap();
    for degree in 2..=max_degree {
        let observed = trunc.degree(degree).unwrap().kernel.as_ref().unwrap();
        let predicted = predicted_kernel(&t, degree - 1, 1e-9, DEFAULT_DIM_CAP).unwrap();
        let (equal, distance) = subspace_equal(observed, &predicted, 1e-8).unwrap();
        println!(
            "  degree {degree}: ker P has dim {:>2}, predicted dim {:>2}, distance {:.2e} ({})",
            observed.dim(),
            predicted.dim(),
            distance,
            if equal { "equal" } else { "DIFFER" }
        );
    }
    println!();
}

fn main() {
    // Unimodular off-diagonal deformation: one kernel direction per pair.
    let q = vec![
        vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)],
        vec![Complex64::new(0.0, -1.0), Complex64::new(0.0, 0.0)],
    ];
    show("q unimodular, d = 2", &preset_q_ccr(&q, false).unwrap(), 4);

    // Strictly inside the unit disk: no kernel at any degree.
    let q_small = vec![
        vec![Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)],
        vec![Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)],
    ];
    show("q = 0.5 everywhere, d = 2", &preset_q_ccr(&q_small, false).unwrap(), 4);

    // Twisted relations: d(d-1)/2 generators at degree 2.
    let coeffs = preset_tccr(0.5, 3, false).unwrap();
    show("twisted, d = 3, mu = 0.5", &coeffs, 3);

    let trunc = FockTruncation::build(&coeffs, 2, &BuildOptions::default()).unwrap();
    println!("degree-2 kernel directions for the twisted algebra, as polynomials:");
    let section = wick::audit::audit_kernel(&coeffs, 2, &Default::default()).unwrap();
    for g in &section.degree2_generators {
        println!("  {g}");
    }
    let _ = trunc;
}
