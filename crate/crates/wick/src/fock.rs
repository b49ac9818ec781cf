//! The Fock representation on the truncated tensor algebra: Gram operators
//! per degree, quotient by the inner-product kernel, creation/annihilation
//! blocks in quotient coordinates, and the adjointness / relation / norm
//! growth verifications.
//!
//! The inner product on degree `n` is `<x, y> = x† P_n y`; degrees 0 and 1
//! carry the standard inner product, and components of different degree
//! are orthogonal by convention.
//!
//! Quotient coordinates: eigendecompose `P_n = V Λ V†`, keep the columns
//! with `λ > tol`, and set `Q_n = Λ_kept^{1/2} V_kept†`. In these
//! coordinates the induced inner product is the standard one, so
//! adjointness of creation and annihilation blocks is plain
//! conjugate-transpose equality.
//!
//! Annihilation acts on degree `m ≥ 1` as "drop a leading `e_i`" composed
//! with `R_m`, which makes it the extraction of the `i`-th leading-leg row
//! block of `R_m`. The inductive route through the relations must agree
//! with this closed form; the test suite rewrites `a_i*  · (monomial)`
//! symbolically and checks both paths against each other.
//!
//! The top truncation degree has no headroom for compositions that raise
//! degree: relation checks stop at input degree `N - 1`, and the
//! creation block out of degree `N` is absent (treated as zero by
//! evaluation, flagged as overflow).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coefficients::WickCoefficients;
use crate::linalg::{hermitian_eigen, inner, operator_norm, ComplexMatrix, Subspace};
use crate::operators::{
    build_r, checked_power, classify_spectrum, Operator, PositivityClass, PositivityVerdict,
};
use crate::{Result, WickError, DEFAULT_DIM_CAP, DEFAULT_REL_TOL};

/// Knobs shared by every construction in this module.
#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    pub rel_tol: f64,
    pub dim_cap: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            rel_tol: DEFAULT_REL_TOL,
            dim_cap: DEFAULT_DIM_CAP,
        }
    }
}

/// Rank-revealing square root of a PSD Gram operator.
///
/// `map` is `rank × d^n` and `unmap` a right inverse (`map · unmap = I`);
/// `map† map` reconstructs `P_n` on the complement of its kernel.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub rank: usize,
    pub map: ComplexMatrix,
    pub unmap: ComplexMatrix,
}

/// Everything recorded about one degree of the truncation.
#[derive(Debug, Clone)]
pub struct GramDegree {
    /// Symmetrized Gram operator `P_n`.
    pub gram: ComplexMatrix,
    pub eigenvalues: Vec<f64>,
    /// `‖P_n - P_n†‖_F` of the raw product before symmetrization.
    pub hermiticity_residual: f64,
    pub verdict: PositivityVerdict,
    /// Present unless the verdict is indefinite.
    pub kernel: Option<Subspace>,
    pub quotient: Option<Quotient>,
}

/// Gram operators, kernels, and quotient maps up to a degree cutoff.
///
/// Construction stops at (and includes) the first degree whose verdict is
/// indefinite: spectra up to that point are still reported, but no kernel
/// or quotient data exists there and no representation can be built.
#[derive(Debug, Clone)]
pub struct FockTruncation {
    d: usize,
    max_degree: usize,
    t: Operator,
    degrees: Vec<GramDegree>,
    r_ops: Vec<ComplexMatrix>,
    rel_tol: f64,
}

fn quotient_from_eigen(
    eigenvalues: &[f64],
    vectors: &ComplexMatrix,
    tol_used: f64,
) -> (Subspace, Quotient) {
    let n = vectors.rows();
    let mut kernel_vecs: Vec<Vec<Complex64>> = Vec::new();
    let mut kept: Vec<usize> = Vec::new();
    for (c, &l) in eigenvalues.iter().enumerate() {
        if l.abs() <= tol_used {
            kernel_vecs.push((0..n).map(|r| vectors.get(r, c)).collect());
        } else {
            kept.push(c);
        }
    }
    // Re-orthonormalize defensively; eigenvector columns are already
    // orthonormal to solver precision so nothing is dropped.
    let kernel = Subspace::from_spanning(n, &kernel_vecs, 1e-6);
    let rank = kept.len();
    let (map, unmap) = if rank == 0 {
        // Rank-0 Gram operator: keep 1-row placeholders out of the API by
        // using an explicit 0-dimension guard. ComplexMatrix requires
        // dims >= 1, so a rank-0 quotient stores 1x.. zero maps with rank 0;
        // callers must consult `rank`.
        (
            ComplexMatrix::zeros(1, n),
            ComplexMatrix::zeros(n, 1),
        )
    } else {
        let mut map = ComplexMatrix::zeros(rank, n);
        let mut unmap = ComplexMatrix::zeros(n, rank);
        for (row, &c) in kept.iter().enumerate() {
            let sqrt_l = eigenvalues[c].sqrt();
            for r in 0..n {
                map.set(row, r, vectors.get(r, c).conj() * sqrt_l);
                unmap.set(r, row, vectors.get(r, c) / sqrt_l);
            }
        }
        (map, unmap)
    };
    (kernel, Quotient { rank, map, unmap })
}

impl FockTruncation {
    /// Build Gram operators, kernels, and quotient maps for all degrees
    /// `0..=max_degree`, stopping after the first indefinite degree.
    pub fn build(
        coeffs: &WickCoefficients,
        max_degree: usize,
        opts: &BuildOptions,
    ) -> Result<Self> {
        let t = coeffs.build_t()?;
        let d = coeffs.d();
        checked_power(d, max_degree, opts.dim_cap)?;

        let mut degrees: Vec<GramDegree> = Vec::with_capacity(max_degree + 1);
        let mut r_ops: Vec<ComplexMatrix> = Vec::with_capacity(max_degree + 1);
        let mut prev_gram = ComplexMatrix::identity(1);

        for m in 0..=max_degree {
            let (raw, r_m): (ComplexMatrix, ComplexMatrix) = match m {
                0 => (ComplexMatrix::identity(1), ComplexMatrix::identity(1)),
                1 => (ComplexMatrix::identity(d), ComplexMatrix::identity(d)),
                _ => {
                    let r_m = build_r(&t, m, opts.dim_cap)?.matrix;
                    let p_m = one_tensor_p_times(&prev_gram, &r_m, d);
                    (p_m, r_m)
                }
            };
            let hermiticity_residual = raw.hermiticity_residual();
            let gram = raw.symmetrized();
            let eig = hermitian_eigen(&gram)?;
            let verdict = classify_spectrum(&eig.eigenvalues, opts.rel_tol);
            let indefinite = verdict.class == PositivityClass::Indefinite;
            let (kernel, quotient) = if indefinite {
                (None, None)
            } else {
                let (k, q) = quotient_from_eigen(&eig.eigenvalues, &eig.eigenvectors, verdict.tol_used);
                (Some(k), Some(q))
            };
            prev_gram = gram.clone();
            degrees.push(GramDegree {
                gram,
                eigenvalues: eig.eigenvalues,
                hermiticity_residual,
                verdict,
                kernel,
                quotient,
            });
            r_ops.push(r_m);
            if indefinite {
                break;
            }
        }

        Ok(FockTruncation {
            d,
            max_degree,
            t,
            degrees,
            r_ops,
            rel_tol: opts.rel_tol,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn t(&self) -> &Operator {
        &self.t
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    /// Degrees actually built (stops early on an indefinite Gram).
    pub fn built_degrees(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self, n: usize) -> Option<&GramDegree> {
        self.degrees.get(n)
    }

    pub fn degrees(&self) -> &[GramDegree] {
        &self.degrees
    }

    pub fn first_indefinite(&self) -> Option<usize> {
        self.degrees
            .iter()
            .position(|g| g.verdict.class == PositivityClass::Indefinite)
    }

    /// `R_m` as built during the recursion (`m < built_degrees`).
    pub fn r_op(&self, m: usize) -> Option<&ComplexMatrix> {
        self.r_ops.get(m)
    }

    /// Quotient dimension per degree (0 entries only where a degree was
    /// built but fully degenerate).
    pub fn quotient_dims(&self) -> Vec<usize> {
        self.degrees
            .iter()
            .map(|g| g.quotient.as_ref().map_or(0, |q| q.rank))
            .collect()
    }

    /// The Fock inner product `<x, y> = x† P_n y` on degree `n`.
    pub fn fock_inner(&self, n: usize, x: &[Complex64], y: &[Complex64]) -> Result<Complex64> {
        let g = self.degrees.get(n).ok_or(WickError::DegreeOutOfRange {
            degree: n,
            max_degree: self.degrees.len().saturating_sub(1),
        })?;
        if x.len() != g.gram.rows() || y.len() != g.gram.rows() {
            return Err(WickError::DimensionMismatch(format!(
                "degree-{n} vectors must have length {}",
                g.gram.rows()
            )));
        }
        Ok(inner(x, &g.gram.matvec(y)))
    }
}

/// `(1 ⊗ P) R`: block-diagonal action of `P` on the leading-leg row blocks.
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

/// Drop a leading `e_i`: maps degree `n` to degree `n-1`, extended
/// linearly; the vacuum (degree 0) is annihilated (empty output).
pub fn mu_star(i: usize, d: usize, n: usize, x: &[Complex64]) -> Vec<Complex64> {
    if n == 0 {
        return Vec::new();
    }
    let rest = d.pow((n - 1) as u32);
    debug_assert_eq!(x.len(), d * rest);
    x[i * rest..(i + 1) * rest].to_vec()
}

/// Left tensoring by `e_i`: the pre-quotient creation map
/// `H^{⊗n} → H^{⊗(n+1)}`.
pub fn creation_matrix_dense(d: usize, n: usize, i: usize) -> ComplexMatrix {
    let src = d.pow(n as u32);
    let mut m = ComplexMatrix::zeros(d * src, src);
    for col in 0..src {
        m.set(i * src + col, col, Complex64::ONE);
    }
    m
}

/// Pre-quotient annihilation on degree `m ≥ 1`: drop a leading `e_i` after
/// applying `R_m`, i.e. the `i`-th leading-leg row block of `R_m`.
pub fn annihilation_matrix_dense(trunc: &FockTruncation, i: usize, m: usize) -> Result<ComplexMatrix> {
    if m == 0 || m >= trunc.built_degrees() + 1 {
        return Err(WickError::DegreeOutOfRange {
            degree: m,
            max_degree: trunc.built_degrees().saturating_sub(1),
        });
    }
    let r_m = trunc.r_op(m).ok_or(WickError::DegreeOutOfRange {
        degree: m,
        max_degree: trunc.built_degrees().saturating_sub(1),
    })?;
    let d = trunc.d();
    let s = d.pow((m - 1) as u32);
    Ok(ComplexMatrix::from_fn(s, d * s, |row, col| {
        r_m.get(i * s + row, col)
    }))
}

/// Creation/annihilation blocks of the representation in quotient
/// coordinates.
///
/// `creation[n][i]` maps quotient degree `n` to `n+1` (for
/// `n < max_degree`); `annihilation[m-1][i]` maps quotient degree `m` to
/// `m-1` (for `1 ≤ m ≤ max_degree`).
///
/// When some Gram operator is identically zero its quotient has rank 0,
/// and then every higher one vanishes too (the recursion multiplies by
/// it). `max_degree` is the last degree with a positive rank; `collapsed`
/// records that degrees between `max_degree` and `nominal_max` exist in
/// the truncation but are zero, so creation out of the top is the zero
/// map rather than a truncation artifact.
#[derive(Debug, Clone)]
pub struct RepMatrices {
    pub d: usize,
    /// Last degree with a positive quotient rank.
    pub max_degree: usize,
    /// Degree cutoff of the underlying truncation.
    pub nominal_max: usize,
    /// True when `max_degree < nominal_max` because the Gram operators
    /// above `max_degree` vanish.
    pub collapsed: bool,
    /// Quotient ranks for degrees `0..=max_degree` (all positive).
    pub quotient_dims: Vec<usize>,
    pub creation: Vec<Vec<ComplexMatrix>>,
    pub annihilation: Vec<Vec<ComplexMatrix>>,
    /// Max distance of any `e_i ⊗ (kernel vector)` from the next kernel;
    /// the quotient representation is well-defined only because this is
    /// numerically zero (verified during the build, not assumed).
    pub kernel_covariance_residual: f64,
}

/// Build the quotient-coordinate representation blocks.
///
/// Fails with [`WickError::IndefiniteGram`] when some degree is
/// indefinite, and with [`WickError::KernelNotCovariant`] if creation
/// fails to map a kernel into the next kernel (residual above `1e-6`).
pub fn build_rep(trunc: &FockTruncation) -> Result<RepMatrices> {
    if let Some(degree) = trunc.first_indefinite() {
        return Err(WickError::IndefiniteGram {
            degree,
            min_eigenvalue: trunc.degrees[degree].verdict.min_eigenvalue,
        });
    }
    let d = trunc.d();
    let built_max = trunc.built_degrees() - 1;
    let ranks = trunc.quotient_dims();
    let n_max = ranks
        .iter()
        .position(|&r| r == 0)
        .map_or(built_max, |z| z - 1);
    let collapsed = n_max < built_max;

    // Creation preserves the kernel ideal: check every kernel direction.
    let mut covariance = 0.0f64;
    for n in 0..built_max {
        let (Some(ker_n), Some(ker_next)) = (
            trunc.degrees[n].kernel.as_ref(),
            trunc.degrees[n + 1].kernel.as_ref(),
        ) else {
            continue;
        };
        let src = d.pow(n as u32);
        for v in ker_n.basis() {
            for i in 0..d {
                let mut w = vec![Complex64::ZERO; d * src];
                w[i * src..(i + 1) * src].copy_from_slice(v);
                covariance = covariance.max(ker_next.residual_norm(&w));
            }
        }
    }
    if covariance > 1e-6 {
        return Err(WickError::KernelNotCovariant {
            degree: built_max,
            residual: covariance,
        });
    }

    let mut creation: Vec<Vec<ComplexMatrix>> = Vec::new();
    for n in 0..n_max {
        let q_next = trunc.degrees[n + 1].quotient.as_ref().expect("psd degree");
        let q_here = trunc.degrees[n].quotient.as_ref().expect("psd degree");
        let src = d.pow(n as u32);
        let mut per_i = Vec::with_capacity(d);
        for i in 0..d {
            // Q_{n+1} · (e_i ⊗ ·) · unmap_n: only the i-th column block of
            // Q_{n+1} contributes.
            let block = ComplexMatrix::from_fn(q_next.rank, src, |r, ccol| {
                q_next.map.get(r, i * src + ccol)
            });
            per_i.push(block.matmul(&q_here.unmap));
        }
        creation.push(per_i);
    }

    let mut annihilation: Vec<Vec<ComplexMatrix>> = Vec::new();
    for m in 1..=n_max {
        let q_prev = trunc.degrees[m - 1].quotient.as_ref().expect("psd degree");
        let q_here = trunc.degrees[m].quotient.as_ref().expect("psd degree");
        let mut per_i = Vec::with_capacity(d);
        for i in 0..d {
            let a = annihilation_matrix_dense(trunc, i, m)?;
            per_i.push(q_prev.map.matmul(&a).matmul(&q_here.unmap));
        }
        annihilation.push(per_i);
    }

    Ok(RepMatrices {
        d,
        max_degree: n_max,
        nominal_max: trunc.max_degree,
        collapsed,
        quotient_dims: ranks[..=n_max].to_vec(),
        creation,
        annihilation,
        kernel_covariance_residual: covariance,
    })
}

impl RepMatrices {
    /// Creation block out of degree `n` for generator `i`.
    pub fn creation_block(&self, n: usize, i: usize) -> Option<&ComplexMatrix> {
        self.creation.get(n).and_then(|v| v.get(i))
    }

    /// Annihilation block out of degree `m` (down to `m-1`).
    pub fn annihilation_block(&self, m: usize, i: usize) -> Option<&ComplexMatrix> {
        if m == 0 {
            return None;
        }
        self.annihilation.get(m - 1).and_then(|v| v.get(i))
    }

    /// Total dimension of the truncated quotient Fock space.
    pub fn total_dim(&self) -> usize {
        self.quotient_dims.iter().sum()
    }

    /// Starting offset of each degree block in the direct sum, plus the
    /// total as a final entry.
    pub fn offsets(&self) -> Vec<usize> {
        let mut offs = Vec::with_capacity(self.quotient_dims.len() + 1);
        let mut acc = 0;
        for &r in &self.quotient_dims {
            offs.push(acc);
            acc += r;
        }
        offs.push(acc);
        offs
    }

    /// Assemble the full creation and annihilation operators on the
    /// truncated direct sum (creation out of the top degree is zero).
    pub fn generator_matrices(&self) -> (Vec<ComplexMatrix>, Vec<ComplexMatrix>) {
        let total = self.total_dim();
        let offs = self.offsets();
        let mut cs = Vec::with_capacity(self.d);
        let mut as_ = Vec::with_capacity(self.d);
        for i in 0..self.d {
            let mut cmat = ComplexMatrix::zeros(total, total);
            for n in 0..self.max_degree {
                let block = &self.creation[n][i];
                for r in 0..self.quotient_dims[n + 1] {
                    for col in 0..self.quotient_dims[n] {
                        cmat.set(offs[n + 1] + r, offs[n] + col, block.get(r, col));
                    }
                }
            }
            let mut amat = ComplexMatrix::zeros(total, total);
            for m in 1..=self.max_degree {
                let block = &self.annihilation[m - 1][i];
                for r in 0..self.quotient_dims[m - 1] {
                    for col in 0..self.quotient_dims[m] {
                        amat.set(offs[m - 1] + r, offs[m] + col, block.get(r, col));
                    }
                }
            }
            cs.push(cmat);
            as_.push(amat);
        }
        (cs, as_)
    }
}

/// Max over generators and degrees of `‖C_i(n)† - A_i(n+1)‖` in quotient
/// coordinates, where the induced inner product is standard.
pub fn verify_adjoint(trunc: &FockTruncation, rep: &RepMatrices) -> f64 {
    let _ = trunc;
    let mut worst = 0.0f64;
    for n in 0..rep.max_degree {
        for i in 0..rep.d {
            let c_adj = rep.creation[n][i].adjoint();
            let a = &rep.annihilation[n][i];
            worst = worst.max(operator_norm(&c_adj.sub(a)));
        }
    }
    worst
}

/// Max over `(i, j)` and input degrees `n ≤ N-1` of the relation residual
///
/// `‖A_i C_j - δ_ij I - Σ_{k,l} T[i][j][k][l] C_l A_k‖`
///
/// in quotient coordinates. The top degree is excluded: its creation has
/// no headroom inside the truncation.
pub fn verify_relations(
    trunc: &FockTruncation,
    rep: &RepMatrices,
    coeffs: &WickCoefficients,
) -> f64 {
    let _ = trunc;
    let d = rep.d;
    let mut worst = 0.0f64;
    for n in 0..rep.max_degree {
        let dim_n = rep.quotient_dims[n];
        if dim_n == 0 {
            continue;
        }
        // Products reused across all (i, j): G[l][k] = C_l(n-1) A_k(n).
        let products: Option<Vec<Vec<ComplexMatrix>>> = (n >= 1).then(|| {
            (0..d)
                .map(|l| {
                    (0..d)
                        .map(|k| rep.creation[n - 1][l].matmul(&rep.annihilation[n - 1][k]))
                        .collect()
                })
                .collect()
        });
        for i in 0..d {
            for j in 0..d {
                let mut m = rep.annihilation[n][i].matmul(&rep.creation[n][j]);
                if i == j {
                    m = m.sub(&ComplexMatrix::identity(dim_n));
                }
                if let Some(g) = &products {
                    for k in 0..d {
                        for l in 0..d {
                            let coeff = coeffs.get(i, j, k, l);
                            if coeff != Complex64::ZERO {
                                m = m.sub(&g[l][k].scale(coeff));
                            }
                        }
                    }
                }
                worst = worst.max(operator_norm(&m));
            }
        }
    }
    worst
}

/// Per-degree creation norms and a monotonicity summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormGrowth {
    /// `max_i ‖C_i(n)‖` for `n = 0 .. N-1`.
    pub per_degree: Vec<f64>,
    /// True when the last step still grows by more than 2%: the signature
    /// of an unbounded (undeformed-like) family at desk scale.
    pub growing: bool,
}

pub fn norm_growth(trunc: &FockTruncation, rep: &RepMatrices) -> NormGrowth {
    let _ = trunc;
    let per_degree: Vec<f64> = (0..rep.max_degree)
        .map(|n| {
            (0..rep.d)
                .map(|i| operator_norm(&rep.creation[n][i]))
                .fold(0.0, f64::max)
        })
        .collect();
    let growing = match per_degree.len() {
        0 | 1 => false,
        len => per_degree[len - 1] > per_degree[len - 2] * 1.02,
    };
    NormGrowth { per_degree, growing }
}

/// Eigenvalue table of `P_0..P_N` without kernel/quotient extraction.
///
/// Unlike [`FockTruncation::build`] this keeps going past indefinite
/// degrees (it only reports) and skips eigenvector accumulation, so it is
/// the cheap path for spectra and positivity audits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub degree: usize,
    pub dim: usize,
    pub eigenvalues: Vec<f64>,
    pub hermiticity_residual: f64,
    pub verdict: PositivityVerdict,
}

pub fn gram_spectra(
    coeffs: &WickCoefficients,
    max_degree: usize,
    opts: &BuildOptions,
) -> Result<Vec<SpectrumRow>> {
    use crate::linalg::hermitian_eigenvalues;
    let t = coeffs.build_t()?;
    let d = coeffs.d();
    checked_power(d, max_degree, opts.dim_cap)?;
    let mut rows = Vec::with_capacity(max_degree + 1);
    let mut prev = ComplexMatrix::identity(1);
    for m in 0..=max_degree {
        let raw = match m {
            0 => ComplexMatrix::identity(1),
            1 => ComplexMatrix::identity(d),
            _ => {
                let r_m = build_r(&t, m, opts.dim_cap)?.matrix;
                one_tensor_p_times(&prev, &r_m, d)
            }
        };
        let hermiticity_residual = raw.hermiticity_residual();
        let gram = raw.symmetrized();
        let eigenvalues = hermitian_eigenvalues(&gram)?;
        let verdict = classify_spectrum(&eigenvalues, opts.rel_tol);
        rows.push(SpectrumRow {
            degree: m,
            dim: gram.rows(),
            eigenvalues,
            hermiticity_residual,
            verdict,
        });
        prev = gram;
    }
    Ok(rows)
}
