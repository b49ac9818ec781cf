//! The operator family on tensor powers: lifts `T_i`, partial sums `R_n`,
//! Gram operators `P_n`, the braid check, positivity classification, and
//! the predicted kernel `Σ_k ker(1 + T_k)`.
//!
//! Definitions (with `T` the assembled degree-2 operator):
//!
//! ```text
//! T_i  = 1^{⊗(i-1)} ⊗ T ⊗ 1^{⊗(n-i-1)}            on H^{⊗n}
//! R_n  = 1 + T_1 + T_1 T_2 + ... + T_1 T_2 ... T_{n-1}
//! P_0  = [1],  P_1 = 1,  P_2 = R_2,  P_{n+1} = (1 ⊗ P_n) R_{n+1}
//! ```
//!
//! `R_1` is the identity on `H` (empty sum of products) and `P_1` the
//! identity: the degree-1 Gram form is undeformed, which the `d = 1`
//! geometric-series oracle in the tests confirms.
//!
//! Construction never forms the lifted `T_i` densely on large powers;
//! it applies the `d²×d²` block to the middle legs directly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{
    hermitian_eigenvalues, kernel_basis, operator_norm, ComplexMatrix, Subspace,
};
use crate::{Result, WickError};

/// Dense operator on `H^{⊗degree}`, `dim_per_leg = dim H`.
#[derive(Debug, Clone)]
pub struct Operator {
    pub degree: usize,
    pub dim_per_leg: usize,
    pub matrix: ComplexMatrix,
}

impl Operator {
    pub fn new(degree: usize, dim_per_leg: usize, matrix: ComplexMatrix) -> Result<Self> {
        let expect = dim_per_leg
            .checked_pow(degree as u32)
            .ok_or(WickError::DimensionCap { required: usize::MAX, cap: usize::MAX })?;
        if matrix.rows() != expect || matrix.cols() != expect {
            return Err(WickError::DimensionMismatch(format!(
                "degree-{degree} operator over d = {dim_per_leg} needs a {expect}x{expect} \
                 matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Operator { degree, dim_per_leg, matrix })
    }

    pub fn identity(degree: usize, dim_per_leg: usize) -> Self {
        let dim = dim_per_leg.pow(degree as u32);
        Operator {
            degree,
            dim_per_leg,
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// `d^n`, failing once the value passes `cap`.
pub(crate) fn checked_power(d: usize, n: usize, cap: usize) -> Result<usize> {
    let mut x: usize = 1;
    for _ in 0..n {
        x = x
            .checked_mul(d)
            .ok_or(WickError::DimensionCap { required: usize::MAX, cap })?;
        if x > cap {
            return Err(WickError::DimensionCap { required: x, cap });
        }
    }
    Ok(x)
}

/// Apply `T` on legs `(leg, leg+1)` of `H^{⊗n}` to a coefficient vector,
/// without forming the lifted matrix. `leg` is 1-based, `1 ≤ leg ≤ n-1`.
pub(crate) fn lifted_apply(
    t: &ComplexMatrix,
    d: usize,
    n: usize,
    leg: usize,
    x: &[Complex64],
) -> Vec<Complex64> {
    let d2 = d * d;
    debug_assert_eq!(t.rows(), d2);
    debug_assert!(leg >= 1 && leg + 1 <= n);
    let pre_dim = d.pow((leg - 1) as u32);
    let post_dim = d.pow((n - leg - 1) as u32);
    debug_assert_eq!(x.len(), pre_dim * d2 * post_dim);

    let mut out = vec![Complex64::ZERO; x.len()];
    let mut gathered = vec![Complex64::ZERO; d2];
    for pre in 0..pre_dim {
        let base = pre * d2;
        for post in 0..post_dim {
            for (a, g) in gathered.iter_mut().enumerate() {
                *g = x[(base + a) * post_dim + post];
            }
            for row in 0..d2 {
                let mut acc = Complex64::ZERO;
                let t_row = t.row(row);
                for (col, g) in gathered.iter().enumerate() {
                    acc += t_row[col] * g;
                }
                out[(base + row) * post_dim + post] = acc;
            }
        }
    }
    out
}

/// `R_n x` through the nested form `x + T_1(x + T_2(x + ... + T_{n-1} x))`.
pub(crate) fn apply_r(t: &ComplexMatrix, d: usize, n: usize, x: &[Complex64]) -> Vec<Complex64> {
    let mut u = x.to_vec();
    for leg in (1..n).rev() {
        u = lifted_apply(t, d, n, leg, &u);
        for (ui, xi) in u.iter_mut().zip(x) {
            *ui += xi;
        }
    }
    u
}

/// Lift a degree-2 operator to legs `(i, i+1)` of `H^{⊗n}` as a dense matrix.
pub fn lift(t: &Operator, n: usize, i: usize, cap: usize) -> Result<Operator> {
    if t.degree != 2 {
        return Err(WickError::DimensionMismatch(format!(
            "lift expects a degree-2 operator, got degree {}",
            t.degree
        )));
    }
    if i < 1 || i + 1 > n {
        return Err(WickError::InvalidInput(format!(
            "lift position i = {i} out of range 1..={}",
            n.saturating_sub(1)
        )));
    }
    let d = t.dim_per_leg;
    let dim = checked_power(d, n, cap)?;
    let mut out = ComplexMatrix::zeros(dim, dim);
    let mut basis = vec![Complex64::ZERO; dim];
    for col in 0..dim {
        basis[col] = Complex64::ONE;
        let y = lifted_apply(&t.matrix, d, n, i, &basis);
        basis[col] = Complex64::ZERO;
        for (row, v) in y.iter().enumerate() {
            if *v != Complex64::ZERO {
                out.set(row, col, *v);
            }
        }
    }
    Operator::new(n, d, out)
}

/// Build `R_n` densely.
pub fn build_r(t: &Operator, n: usize, cap: usize) -> Result<Operator> {
    if t.degree != 2 {
        return Err(WickError::DimensionMismatch(
            "build_r expects a degree-2 operator".into(),
        ));
    }
    if n == 0 {
        return Err(WickError::InvalidInput("R_n needs n >= 1".into()));
    }
    let d = t.dim_per_leg;
    let dim = checked_power(d, n, cap)?;
    let mut out = ComplexMatrix::zeros(dim, dim);
    let mut basis = vec![Complex64::ZERO; dim];
    for col in 0..dim {
        basis[col] = Complex64::ONE;
        let y = apply_r(&t.matrix, d, n, &basis);
        basis[col] = Complex64::ZERO;
        for (row, v) in y.iter().enumerate() {
            if *v != Complex64::ZERO {
                out.set(row, col, *v);
            }
        }
    }
    Operator::new(n, d, out)
}

/// Multiply `(1 ⊗ P) · R` where `P` acts on `H^{⊗(m-1)}` and `R` on `H^{⊗m}`:
/// block-diagonal action of `P` on the `d` leading-leg row blocks of `R`.
fn one_tensor_p_times(p: &ComplexMatrix, r: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let s = p.rows();
    let dim = r.rows();
    debug_assert_eq!(dim, d * s);
    let mut out = ComplexMatrix::zeros(dim, dim);
    for b in 0..d {
        let block = ComplexMatrix::from_fn(s, dim, |i, j| r.get(b * s + i, j));
        let prod = p.matmul(&block);
        for i in 0..s {
            for j in 0..dim {
                out.set(b * s + i, j, prod.get(i, j));
            }
        }
    }
    out
}

/// Build `P_0, ..., P_{n_max}` (and the `R_m` used along the way, with
/// `R_0` stored as the 1x1 identity for alignment).
pub fn build_p_sequence(
    t: &Operator,
    n_max: usize,
    cap: usize,
) -> Result<(Vec<Operator>, Vec<Operator>)> {
    if t.degree != 2 {
        return Err(WickError::DimensionMismatch(
            "build_p_sequence expects a degree-2 operator".into(),
        ));
    }
    let d = t.dim_per_leg;
    checked_power(d, n_max, cap)?;

    let mut p_ops: Vec<Operator> = Vec::with_capacity(n_max + 1);
    let mut r_ops: Vec<Operator> = Vec::with_capacity(n_max + 1);
    p_ops.push(Operator::new(0, d, ComplexMatrix::identity(1))?);
    r_ops.push(Operator::new(0, d, ComplexMatrix::identity(1))?);
    if n_max >= 1 {
        p_ops.push(Operator::identity(1, d));
        r_ops.push(Operator::identity(1, d));
    }
    for m in 2..=n_max {
        let r_m = build_r(t, m, cap)?;
        let p_m = one_tensor_p_times(&p_ops[m - 1].matrix, &r_m.matrix, d);
        p_ops.push(Operator::new(m, d, p_m)?);
        r_ops.push(r_m);
    }
    Ok((p_ops, r_ops))
}

/// Build the single Gram operator `P_n`.
pub fn build_p(t: &Operator, n: usize, cap: usize) -> Result<Operator> {
    let (mut p_ops, _) = build_p_sequence(t, n, cap)?;
    Ok(p_ops.remove(n))
}

/// Outcome of the braid test `T_1 T_2 T_1 = T_2 T_1 T_2` on `H^{⊗3}`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BraidCheck {
    pub holds: bool,
    pub residual: f64,
}

/// Residual of the braid identity in operator norm;
/// `holds ⇔ residual ≤ tol (1 + ‖T‖³)`.
pub fn check_braid(t: &Operator, tol: f64, cap: usize) -> Result<BraidCheck> {
    let t1 = lift(t, 3, 1, cap)?;
    let t2 = lift(t, 3, 2, cap)?;
    let left = t1.matrix.matmul(&t2.matrix).matmul(&t1.matrix);
    let right = t2.matrix.matmul(&t1.matrix).matmul(&t2.matrix);
    let residual = operator_norm(&left.sub(&right));
    let norm_t = operator_norm(&t.matrix);
    Ok(BraidCheck {
        holds: residual <= tol * (1.0 + norm_t.powi(3)),
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositivityClass {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
}

impl std::fmt::Display for PositivityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PositivityClass::PositiveDefinite => "positive_definite",
            PositivityClass::PositiveSemidefinite => "positive_semidefinite",
            PositivityClass::Indefinite => "indefinite",
        };
        f.write_str(s)
    }
}

/// Positivity verdict for a Hermitian operator.
///
/// `tol_used = rel_tol · max(1, max |λ|)`; the kernel counts eigenvalues
/// with `|λ| ≤ tol_used`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PositivityVerdict {
    pub class: PositivityClass,
    pub min_eigenvalue: f64,
    pub kernel_dim: usize,
    pub tol_used: f64,
}

/// Classify a precomputed ascending spectrum.
pub fn classify_spectrum(eigenvalues: &[f64], rel_tol: f64) -> PositivityVerdict {
    let scale = eigenvalues
        .iter()
        .map(|l| l.abs())
        .fold(0.0, f64::max)
        .max(1.0);
    let tol_used = rel_tol * scale;
    let min_eigenvalue = eigenvalues.first().copied().unwrap_or(0.0);
    let kernel_dim = eigenvalues.iter().filter(|l| l.abs() <= tol_used).count();
    let class = if min_eigenvalue < -tol_used {
        PositivityClass::Indefinite
    } else if kernel_dim >= 1 {
        PositivityClass::PositiveSemidefinite
    } else {
        PositivityClass::PositiveDefinite
    };
    PositivityVerdict { class, min_eigenvalue, kernel_dim, tol_used }
}

/// Classify the positivity of a (nearly) Hermitian operator.
///
/// The matrix is symmetrized before the eigendecomposition; input whose
/// hermiticity residual exceeds `1e-8 (1 + ‖P‖_F)` is rejected instead.
pub fn classify_positivity(p: &Operator, rel_tol: f64) -> Result<PositivityVerdict> {
    let residual = p.matrix.hermiticity_residual();
    let allowed = 1e-8 * (1.0 + p.matrix.frobenius_norm());
    if residual > allowed {
        return Err(WickError::NotHermitian { residual, allowed });
    }
    let evals = hermitian_eigenvalues(&p.matrix.symmetrized())?;
    Ok(classify_spectrum(&evals, rel_tol))
}

/// Orthonormal basis of `Σ_{k=1}^{n} ker(1 + T_k) ⊆ H^{⊗(n+1)}`: each
/// kernel vector of `1 + T` placed on legs `(k, k+1)` and tensored with
/// basis vectors everywhere else.
pub fn predicted_kernel(t: &Operator, n: usize, rel_tol: f64, cap: usize) -> Result<Subspace> {
    if n < 1 {
        return Err(WickError::InvalidInput("predicted_kernel needs n >= 1".into()));
    }
    let d = t.dim_per_leg;
    let d2 = d * d;
    let ambient = checked_power(d, n + 1, cap)?;
    let one_plus_t = ComplexMatrix::identity(d2).add(&t.matrix);
    let pair_kernel = kernel_basis(&one_plus_t.symmetrized(), rel_tol)?;
    if pair_kernel.dim() == 0 {
        return Ok(Subspace::empty(ambient));
    }
    let mut spanning: Vec<Vec<Complex64>> = Vec::new();
    for k in 1..=n {
        let pre_dim = d.pow((k - 1) as u32);
        let post_dim = d.pow((n - k) as u32);
        for w in pair_kernel.basis() {
            for pre in 0..pre_dim {
                for post in 0..post_dim {
                    let mut v = vec![Complex64::ZERO; ambient];
                    for (pair, wq) in w.iter().enumerate() {
                        v[(pre * d2 + pair) * post_dim + post] = *wq;
                    }
                    spanning.push(v);
                }
            }
        }
    }
    Ok(Subspace::from_spanning(ambient, &spanning, 10.0 * rel_tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{preset_q_ccr, preset_tccr, random_wick_with_norm, WickCoefficients};
    use crate::linalg::{hermitian_eigen, kron, subspace_equal, vec_norm};
    use crate::rng::Rng;
    use crate::DEFAULT_DIM_CAP;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn flip(d: usize) -> Operator {
        let m = ComplexMatrix::from_fn(d * d, d * d, |row, col| {
            let (a, b) = (row / d, row % d);
            let (k, l) = (col / d, col % d);
            if (a, b) == (l, k) { Complex64::ONE } else { Complex64::ZERO }
        });
        Operator::new(2, d, m).unwrap()
    }

    fn scalar_q(q: f64) -> Operator {
        Operator::new(2, 1, ComplexMatrix::diagonal(&[c(q, 0.0)])).unwrap()
    }

    /// d = 1 oracle: R_n = [n]_q = 1 + q + ... + q^{n-1}.
    fn q_bracket(q: f64, n: usize) -> f64 {
        (0..n).map(|k| q.powi(k as i32)).sum()
    }

    /// d = 1 oracle: P_n = prod_{k=2..n} [k]_q.
    fn q_factorial(q: f64, n: usize) -> f64 {
        (2..=n).map(|k| q_bracket(q, k)).product()
    }

    #[test]
    fn lift_degree_two_is_identity_lift() {
        let t = flip(2);
        let lifted = lift(&t, 2, 1, DEFAULT_DIM_CAP).unwrap();
        assert!(lifted.matrix.sub(&t.matrix).max_abs() == 0.0);
    }

    #[test]
    fn lift_flip_on_legs_2_3() {
        // On H^{⊗3} with T the flip, T_2 maps e_a⊗e_b⊗e_c to e_a⊗e_c⊗e_b.
        let d = 2;
        let t2 = lift(&flip(d), 3, 2, DEFAULT_DIM_CAP).unwrap();
        for a in 0..d {
            for b in 0..d {
                for ccc in 0..d {
                    let src = (a * d + b) * d + ccc;
                    let dst = (a * d + ccc) * d + b;
                    let mut x = vec![Complex64::ZERO; 8];
                    x[src] = Complex64::ONE;
                    let y = t2.matrix.matvec(&x);
                    for (row, v) in y.iter().enumerate() {
                        let expect = if row == dst { 1.0 } else { 0.0 };
                        assert!((v - c(expect, 0.0)).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn lift_matches_kron_construction() {
        // Independent oracle: n = 4, i = 2 equals kron(I_d, kron(T, I_d)).
        let mut rng = Rng::new(17);
        let tmat = ComplexMatrix::from_fn(4, 4, |_, _| rng.complex_normal()).symmetrized();
        let t = Operator::new(2, 2, tmat.clone()).unwrap();
        let lifted = lift(&t, 4, 2, DEFAULT_DIM_CAP).unwrap();
        let eye = ComplexMatrix::identity(2);
        let oracle = kron(
            &eye,
            &kron(&tmat, &eye, DEFAULT_DIM_CAP).unwrap(),
            DEFAULT_DIM_CAP,
        )
        .unwrap();
        assert!(lifted.matrix.sub(&oracle).max_abs() < 1e-15);
    }

    #[test]
    fn lift_position_out_of_range() {
        let t = flip(2);
        assert!(lift(&t, 3, 0, DEFAULT_DIM_CAP).is_err());
        assert!(lift(&t, 3, 3, DEFAULT_DIM_CAP).is_err());
    }

    #[test]
    fn build_r_n1_is_identity() {
        let t = flip(3);
        let r1 = build_r(&t, 1, DEFAULT_DIM_CAP).unwrap();
        assert!(r1.matrix.sub(&ComplexMatrix::identity(3)).max_abs() == 0.0);
    }

    #[test]
    fn build_r_scalar_recursion_oracle() {
        for q in [-0.9, -0.5, 0.0, 0.5, 0.9, 1.0] {
            let t = scalar_q(q);
            for n in 1..=8 {
                let r = build_r(&t, n, DEFAULT_DIM_CAP).unwrap();
                let got = r.matrix.get(0, 0).re;
                assert!(
                    (got - q_bracket(q, n)).abs() < 1e-12,
                    "q {q} n {n}: {got} vs {}",
                    q_bracket(q, n)
                );
            }
        }
    }

    #[test]
    fn build_r_zero_t_identity() {
        let t = Operator::new(2, 2, ComplexMatrix::zeros(4, 4)).unwrap();
        for n in 1..=4 {
            let r = build_r(&t, n, DEFAULT_DIM_CAP).unwrap();
            assert!(r.matrix.sub(&ComplexMatrix::identity(2usize.pow(n as u32))).max_abs() == 0.0);
        }
    }

    #[test]
    fn build_p_zero_t_identity() {
        let t = Operator::new(2, 2, ComplexMatrix::zeros(4, 4)).unwrap();
        let (p_ops, _) = build_p_sequence(&t, 5, DEFAULT_DIM_CAP).unwrap();
        for (n, p) in p_ops.iter().enumerate() {
            let dim = 2usize.pow(n as u32);
            assert!(p.matrix.sub(&ComplexMatrix::identity(dim)).max_abs() == 0.0);
        }
    }

    #[test]
    fn build_p_scalar_q_factorial() {
        let t = scalar_q(0.5);
        let p3 = build_p(&t, 3, DEFAULT_DIM_CAP).unwrap();
        assert!((p3.matrix.get(0, 0).re - 2.625).abs() < 1e-14);
        for n in 0..=8 {
            let p = build_p(&t, n, DEFAULT_DIM_CAP).unwrap();
            assert!((p.matrix.get(0, 0).re - q_factorial(0.5, n)).abs() < 1e-12);
        }
    }

    #[test]
    fn build_p_flip_kernel_vector() {
        // q-CCR with q_12 = q_21 = 1, q_ii = 0: P_2 = 1 + T annihilates
        // e_1⊗e_2 - e_2⊗e_1.
        let q = vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ];
        let coeffs = preset_q_ccr(&q, false).unwrap();
        let t = coeffs.build_t().unwrap();
        let p2 = build_p(&t, 2, DEFAULT_DIM_CAP).unwrap();
        let v = [c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)];
        let image = p2.matrix.matvec(&v);
        assert!(vec_norm(&image) < 1e-12);
        let eig = hermitian_eigen(&p2.matrix).unwrap();
        assert!(eig.eigenvalues[0].abs() < 1e-12);
    }

    #[test]
    fn recursion_matches_expanded_product() {
        // Independent route: P_n = (1^{⊗(n-2)}⊗R_2)(1^{⊗(n-3)}⊗R_3)...R_n
        // with every factor built by dense Kronecker products.
        let mut rng = Rng::new(23);
        for &(d, n_max) in &[(2usize, 4usize), (3, 3)] {
            let coeffs = random_wick_with_norm(d, 0.8, &mut rng).unwrap();
            let t = coeffs.build_t().unwrap();
            let (p_ops, _) = build_p_sequence(&t, n_max, DEFAULT_DIM_CAP).unwrap();
            for n in 2..=n_max {
                let mut product = ComplexMatrix::identity(d.pow(n as u32));
                for k in 2..=n {
                    let r_k = build_r(&t, k, DEFAULT_DIM_CAP).unwrap();
                    let mut factor = r_k.matrix;
                    for _ in 0..(n - k) {
                        factor = kron(&ComplexMatrix::identity(d), &factor, DEFAULT_DIM_CAP)
                            .unwrap();
                    }
                    product = product.matmul(&factor);
                }
                let diff = p_ops[n].matrix.sub(&product).max_abs();
                assert!(diff < 1e-9, "d {d} n {n}: diff {diff:.3e}");
            }
        }
    }

    #[test]
    fn braid_holds_for_q_ccr() {
        let mut rng = Rng::new(31);
        for _ in 0..5 {
            let d = 2 + rng.below(2);
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
            let check = check_braid(&t, 1e-12, DEFAULT_DIM_CAP).unwrap();
            assert!(check.holds, "residual {:.3e}", check.residual);
        }
    }

    #[test]
    fn braid_holds_for_tccr() {
        let t = preset_tccr(0.5, 3, false).unwrap().build_t().unwrap();
        let check = check_braid(&t, 1e-12, DEFAULT_DIM_CAP).unwrap();
        assert!(check.holds, "residual {:.3e}", check.residual);
    }

    #[test]
    fn braid_fails_for_generic_tensor() {
        // Fixed seed; the residual value is pinned as a regression guard
        // (recorded from the first run of this construction).
        let mut rng = Rng::new(42);
        let coeffs = random_wick_with_norm(2, 1.0, &mut rng).unwrap();
        let t = coeffs.build_t().unwrap();
        let check = check_braid(&t, 1e-12, DEFAULT_DIM_CAP).unwrap();
        assert!(!check.holds);
        assert!(check.residual > 0.05, "residual {:.6}", check.residual);
        let recorded = 0.76809992355674894;
        assert!(
            (check.residual - recorded).abs() < 1e-9 * recorded,
            "regression: residual {:.17} drifted from recorded {recorded:.17}",
            check.residual
        );
    }

    #[test]
    fn classify_identity() {
        let verdict = classify_positivity(&Operator::identity(2, 2), 1e-9).unwrap();
        assert_eq!(verdict.class, PositivityClass::PositiveDefinite);
        assert!((verdict.min_eigenvalue - 1.0).abs() < 1e-12);
        assert_eq!(verdict.kernel_dim, 0);
    }

    #[test]
    fn classify_scalar_boundary_and_indefinite() {
        // d = 1, q = -1: P_2 = [0] is PSD with a one-dimensional kernel.
        let p = build_p(&scalar_q(-1.0), 2, DEFAULT_DIM_CAP).unwrap();
        let verdict = classify_positivity(&p, 1e-9).unwrap();
        assert_eq!(verdict.class, PositivityClass::PositiveSemidefinite);
        assert_eq!(verdict.kernel_dim, 1);

        // d = 1, q = -1.5: P_2 = [-0.5] is indefinite.
        let p = build_p(&scalar_q(-1.5), 2, DEFAULT_DIM_CAP).unwrap();
        let verdict = classify_positivity(&p, 1e-9).unwrap();
        assert_eq!(verdict.class, PositivityClass::Indefinite);
        assert!((verdict.min_eigenvalue + 0.5).abs() < 1e-12);
    }

    #[test]
    fn classify_rejects_non_hermitian() {
        let op = Operator::new(
            2,
            2,
            ComplexMatrix::from_fn(4, 4, |i, j| {
                if i == 0 && j == 1 { Complex64::ONE } else { Complex64::ZERO }
            }),
        )
        .unwrap();
        assert!(matches!(
            classify_positivity(&op, 1e-9),
            Err(WickError::NotHermitian { .. })
        ));
    }

    #[test]
    fn predicted_kernel_zero_t_empty() {
        let t = Operator::new(2, 2, ComplexMatrix::zeros(4, 4)).unwrap();
        for n in 1..=3 {
            let k = predicted_kernel(&t, n, 1e-9, DEFAULT_DIM_CAP).unwrap();
            assert_eq!(k.dim(), 0);
        }
    }

    #[test]
    fn predicted_kernel_unimodular_q_ccr() {
        let q = vec![
            vec![c(0.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(0.0, 0.0)],
        ];
        let t = preset_q_ccr(&q, false).unwrap().build_t().unwrap();
        let k = predicted_kernel(&t, 1, 1e-9, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(k.dim(), 1);
        // Same space as ker(1 + T) extracted by the eigensolver directly.
        let one_plus_t = ComplexMatrix::identity(4).add(&t.matrix);
        let direct = kernel_basis(&one_plus_t, 1e-9).unwrap();
        let (eq, dist) = subspace_equal(&k, &direct, 1e-9).unwrap();
        assert!(eq, "distance {dist:.3e}");
    }

    #[test]
    fn predicted_kernel_tccr_degree_two() {
        // mu = 0.5, d = 3: spanned by e_j⊗e_i - mu e_i⊗e_j for i < j.
        let d = 3;
        let mu = 0.5;
        let t = preset_tccr(mu, d, false).unwrap().build_t().unwrap();
        let k = predicted_kernel(&t, 1, 1e-9, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(k.dim(), 3);
        let mut spanning = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                let mut v = vec![Complex64::ZERO; d * d];
                v[j * d + i] = Complex64::ONE;
                v[i * d + j] = c(-mu, 0.0);
                spanning.push(v);
            }
        }
        let explicit = Subspace::from_spanning(d * d, &spanning, 1e-8);
        let (eq, dist) = subspace_equal(&k, &explicit, 1e-9).unwrap();
        assert!(eq, "distance {dist:.3e}");
    }

    #[test]
    fn zero_coefficients_assemble() {
        let zero = WickCoefficients::zero(2);
        let t = zero.build_t().unwrap();
        assert_eq!(t.degree, 2);
        assert_eq!(t.dim(), 4);
        assert!(t.matrix.max_abs() == 0.0);
    }
}
