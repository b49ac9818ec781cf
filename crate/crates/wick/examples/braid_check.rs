//! Check the braid identity T_1 T_2 T_1 = T_2 T_1 T_2 on H^{⊗3}.
//!
//! Both deformation presets satisfy it exactly; a generic Wick-symmetric
//! tensor does not, which is easy to see numerically.
//!
//! Run with: cargo run --example braid_check

use num_complex::Complex64;
use wick::coefficients::{preset_q_ccr, preset_tccr, random_wick_with_norm, uniform_q_matrix};
use wick::operators::check_braid;
use wick::rng::Rng;
use wick::DEFAULT_DIM_CAP;

fn main() {
    let mut rng = Rng::new(2024);

    println!("{:<42} {:>14}  braided?", "algebra", "residual");

    for d in [2usize, 3] {
        let q = uniform_q_matrix(d, Complex64::new(0.4, 0.2));
        let t = preset_q_ccr(&q, false).unwrap().build_t().unwrap();
        let braid = check_braid(&t, 1e-12, DEFAULT_DIM_CAP).unwrap();
        println!(
            "{:<42} {:>14.3e}  {}",
            format!("q-deformed, d = {d}, q = 0.4+0.2i"),
            braid.residual,
            braid.holds
        );
    }

    for mu in [0.3, 0.7] {
        let t = preset_tccr(mu, 3, false).unwrap().build_t().unwrap();
        let braid = check_braid(&t, 1e-12, DEFAULT_DIM_CAP).unwrap();
        println!(
            "{:<42} {:>14.3e}  {}",
            format!("twisted, d = 3, mu = {mu}"),
            braid.residual,
            braid.holds
        );
    }

    for trial in 0..3 {
        let coeffs = random_wick_with_norm(2, 1.0, &mut rng).unwrap();
        let t = coeffs.build_t().unwrap();
        let braid = check_braid(&t, 1e-12, DEFAULT_DIM_CAP).unwrap();
        println!(
            "{:<42} {:>14.3e}  {}",
            format!("random Wick-symmetric tensor #{trial}"),
            braid.residual,
            braid.holds
        );
    }
}
