//! Creation-operator norms per degree for the scalar oscillator family:
//! unbounded sqrt(n+1) growth at q = 1 versus saturation at
//! (1-q)^{-1/2} for q < 1.
//!
//! Run with: cargo run --example norm_growth

use num_complex::Complex64;
use wick::coefficients::preset_q_ccr;
use wick::fock::{build_rep, norm_growth, BuildOptions, FockTruncation};

fn main() {
    println!(
        "{:<8} {}",
        "q",
        (0..7).map(|n| format!("{:>9}", format!("deg {n}"))).collect::<String>()
    );
    for q in [0.0, 0.5, 0.9, 1.0] {
        let coeffs = preset_q_ccr(&[vec![Complex64::new(q, 0.0)]], false).unwrap();
        let trunc = FockTruncation::build(&coeffs, 7, &BuildOptions::default()).unwrap();
        let rep = build_rep(&trunc).unwrap();
        let growth = norm_growth(&trunc, &rep);
        let row: String = growth
            .per_degree
            .iter()
            .map(|x| format!("{x:>9.4}"))
            .collect();
        let trend = if growth.growing { "growing" } else { "bounded-looking" };
        println!("{q:<8}{row}   {trend}");
        if q < 1.0 {
            println!("{:<8}(limit (1-q)^(-1/2) = {:.4})", "", (1.0 - q).powf(-0.5));
        }
    }
}
