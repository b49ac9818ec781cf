//! Dense complex linear algebra: Kronecker products, Hermitian
//! eigendecomposition, kernel extraction, subspace comparison, operator
//! norms.
//!
//! Element order is row-major throughout, and Kronecker products pair
//! indices with the **left factor most significant**:
//! `kron(A, B)[(i*rB + k), (j*cB + l)] = A[i,j] * B[k,l]`.
//! Every other module inherits these two conventions; nothing else in the
//! crate defines its own index order.

use num_complex::Complex64;

use crate::{Result, WickError, STRUCTURAL_TOL};

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    /// Build from nested rows, rejecting ragged or non-finite input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(WickError::DimensionMismatch("empty matrix".into()));
        }
        let c = rows[0].len();
        if c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(WickError::DimensionMismatch(
                "rows must be nonempty and of equal length".into(),
            ));
        }
        let data: Vec<Complex64> = rows.iter().flatten().copied().collect();
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(WickError::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(ComplexMatrix { rows: r, cols: c, data })
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in entries.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a_ik = self.data[i * self.cols + k];
                if a_ik == Complex64::ZERO {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a_ik * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, x.len(), "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum::<Complex64>()
            })
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm of `A - A†` (0 for exactly Hermitian input).
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut sum = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                sum += (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        sum.sqrt()
    }

    /// `(A + A†) / 2`.
    pub fn symmetrized(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }
}

/// Inner product `x† y`, conjugate-linear in the first argument.
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn vec_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Kronecker product with the left factor as the most significant index.
///
/// `kron(A, B)[(i*rB + k), (j*cB + l)] = A[i,j] * B[k,l]`. Fails when the
/// product of dimensions exceeds `cap` rows or columns.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix, cap: usize) -> Result<ComplexMatrix> {
    let rows = a
        .rows()
        .checked_mul(b.rows())
        .ok_or(WickError::DimensionCap { required: usize::MAX, cap })?;
    let cols = a
        .cols()
        .checked_mul(b.cols())
        .ok_or(WickError::DimensionCap { required: usize::MAX, cap })?;
    let worst = rows.max(cols);
    if worst > cap {
        return Err(WickError::DimensionCap { required: worst, cap });
    }
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let a_ij = a.get(i, j);
            if a_ij == Complex64::ZERO {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out.set(i * b.rows() + k, j * b.cols() + l, a_ij * b.get(k, l));
                }
            }
        }
    }
    Ok(out)
}

/// Result of a Hermitian eigendecomposition: `A V = V diag(λ)` with
/// eigenvalues ascending and `V` unitary (columns are eigenvectors).
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(WickError::DimensionMismatch(format!(
            "hermitian_eigen requires a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let residual = a.hermiticity_residual();
    let allowed = 1e-10 * (1.0 + a.frobenius_norm());
    if residual > allowed {
        return Err(WickError::NotHermitian { residual, allowed });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Householder reduction to real symmetric tridiagonal form followed by
/// implicit-shift QL iteration; any algorithm change must keep the accuracy
/// contract `‖A V - V diag(λ)‖ ≤ 1e-9 (1 + ‖A‖)` and `‖V†V - I‖ ≤ 1e-10`.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<HermitianEigen> {
    check_hermitian(a)?;
    let (eigenvalues, vectors) = eigen_inner(a.symmetrized(), true)?;
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors: vectors.expect("requested vectors"),
    })
}

/// Eigenvalues only (ascending); considerably cheaper than
/// [`hermitian_eigen`] because no vectors are accumulated.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(a)?;
    Ok(eigen_inner(a.symmetrized(), false)?.0)
}

fn eigen_inner(
    mut h: ComplexMatrix,
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<ComplexMatrix>)> {
    let n = h.rows();
    if n == 1 {
        let lambda = h.get(0, 0).re;
        let v = want_vectors.then(|| ComplexMatrix::identity(1));
        return Ok((vec![lambda], v));
    }

    // Householder reduction to Hermitian tridiagonal form. Reflectors are
    // kept for the later accumulation of the unitary transform.
    let mut reflectors: Vec<(usize, Vec<Complex64>, f64)> = Vec::new();
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let mut x: Vec<Complex64> = (0..m).map(|r| h.get(k + 1 + r, k)).collect();
        let total = vec_norm(&x);
        if total < 1e-290 {
            continue;
        }
        let alpha = x[0];
        let phase = if alpha.norm() > 0.0 {
            alpha / alpha.norm()
        } else {
            Complex64::ONE
        };
        let beta = -phase * total;
        x[0] -= beta;
        let v = x;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 < 1e-290 {
            continue;
        }
        let tau = 2.0 / vnorm2;

        // Rank-2 update of the trailing block: S <- S - v w† - w v† with
        // w = τ S v - (τ/2)(v† (τ S v)) v.
        let mut p = vec![Complex64::ZERO; m];
        for r in 0..m {
            let mut acc = Complex64::ZERO;
            for c in 0..m {
                acc += h.get(k + 1 + r, k + 1 + c) * v[c];
            }
            p[r] = acc * tau;
        }
        let kappa = inner(&v, &p) * (tau / 2.0);
        let w: Vec<Complex64> = p.iter().zip(&v).map(|(pi, vi)| pi - kappa * vi).collect();
        for r in 0..m {
            for c in 0..m {
                let delta = v[r] * w[c].conj() + w[r] * v[c].conj();
                let cur = h.get(k + 1 + r, k + 1 + c);
                h.set(k + 1 + r, k + 1 + c, cur - delta);
            }
        }

        h.set(k + 1, k, beta);
        h.set(k, k + 1, beta.conj());
        for r in k + 2..n {
            h.set(r, k, Complex64::ZERO);
            h.set(k, r, Complex64::ZERO);
        }
        reflectors.push((k, v, tau));
    }

    let mut d: Vec<f64> = (0..n).map(|i| h.get(i, i).re).collect();
    let sub: Vec<Complex64> = (0..n - 1).map(|k| h.get(k + 1, k)).collect();

    // Absorb subdiagonal phases into a diagonal unitary so the tridiagonal
    // matrix handed to the QL iteration is real.
    let mut e: Vec<f64> = vec![0.0; n];
    let mut phases = vec![Complex64::ONE; n];
    for k in 0..n - 1 {
        let t = sub[k];
        e[k] = t.norm();
        phases[k + 1] = if e[k] > 0.0 {
            phases[k] * (t / e[k])
        } else {
            phases[k]
        };
    }

    let mut z = if want_vectors {
        let mut q = ComplexMatrix::identity(n);
        for (k, v, tau) in &reflectors {
            let m = v.len();
            for row in 0..n {
                let mut s = Complex64::ZERO;
                for j in 0..m {
                    s += q.get(row, k + 1 + j) * v[j];
                }
                s *= *tau;
                for j in 0..m {
                    let cur = q.get(row, k + 1 + j);
                    q.set(row, k + 1 + j, cur - s * v[j].conj());
                }
            }
        }
        for col in 0..n {
            let psi = phases[col];
            for row in 0..n {
                let cur = q.get(row, col);
                q.set(row, col, cur * psi);
            }
        }
        Some(q)
    } else {
        None
    };

    tql2(&mut d, &mut e, z.as_mut())?;

    // Sort ascending, permuting eigenvector columns to match.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("finite eigenvalues"));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vectors = z.map(|q| {
        ComplexMatrix::from_fn(n, n, |r, c| q.get(r, order[c]))
    });
    Ok((eigenvalues, vectors))
}

/// Implicit-shift QL iteration on a real symmetric tridiagonal matrix,
/// with optional accumulation of the (real) rotations into complex columns.
fn tql2(d: &mut [f64], e: &mut [f64], mut z: Option<&mut ComplexMatrix>) -> Result<()> {
    let n = d.len();
    let eps = f64::EPSILON;
    // Deflation: a coupling is negligible relative to its neighbors or to
    // the matrix as a whole. The absolute floor keeps the iteration from
    // stalling on noise-level matrices whose entries span many orders of
    // magnitude; dropping couplings below eps*anorm is a perturbation
    // within the backward-stability contract.
    let anorm = d
        .iter()
        .chain(e.iter())
        .map(|x| x.abs())
        .fold(0.0, f64::max);
    let floor = eps * anorm;
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd + floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(WickError::EigenNoConvergence { iterations: iter });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(q) = z.as_deref_mut() {
                    let rows = q.rows();
                    for row in 0..rows {
                        f = q.get(row, i + 1).re;
                        let f_im = q.get(row, i + 1).im;
                        let gi = q.get(row, i);
                        q.set(
                            row,
                            i + 1,
                            Complex64::new(s * gi.re + c * f, s * gi.im + c * f_im),
                        );
                        q.set(
                            row,
                            i,
                            Complex64::new(c * gi.re - s * f, c * gi.im - s * f_im),
                        );
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Largest singular value, computed through the eigenvalues of `A†A`.
///
/// This is deliberately a different route from `max |λ|` of
/// [`hermitian_eigen`] so the two can cross-check each other on Hermitian
/// input.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    if a.rows() == 1 && a.cols() == 1 {
        return a.get(0, 0).norm();
    }
    if a.max_abs() == 0.0 {
        return 0.0;
    }
    let gram = a.adjoint().matmul(a).symmetrized();
    let evals = eigen_inner(gram, false)
        .expect("QL iteration on a PSD Gram matrix failed to converge")
        .0;
    evals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// A subspace of `C^ambient_dim` carried by an orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<Complex64>>,
}

impl Subspace {
    /// Wrap an existing basis, validating orthonormality to `1e-12`.
    pub fn new(ambient_dim: usize, basis: Vec<Vec<Complex64>>) -> Result<Self> {
        for v in &basis {
            if v.len() != ambient_dim {
                return Err(WickError::DimensionMismatch(format!(
                    "basis vector of length {} in ambient dimension {ambient_dim}",
                    v.len()
                )));
            }
        }
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                let ip = inner(u, v);
                let expect = if i == j { 1.0 } else { 0.0 };
                if (ip - expect).norm() > STRUCTURAL_TOL {
                    return Err(WickError::InvalidInput(format!(
                        "basis not orthonormal: |<b{i}, b{j}> - {expect}| = {:.3e}",
                        (ip - expect).norm()
                    )));
                }
            }
        }
        Ok(Subspace { ambient_dim, basis })
    }

    pub fn empty(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: Vec::new() }
    }

    /// Orthonormalize a spanning set by modified Gram-Schmidt with
    /// re-orthogonalization; vectors whose residual after projection has
    /// norm at most `drop_tol` (relative to the input vector's norm) are
    /// treated as dependent and dropped.
    pub fn from_spanning(ambient_dim: usize, vectors: &[Vec<Complex64>], drop_tol: f64) -> Self {
        let mut basis: Vec<Vec<Complex64>> = Vec::new();
        for v in vectors {
            debug_assert_eq!(v.len(), ambient_dim);
            let scale = vec_norm(v);
            if scale == 0.0 {
                continue;
            }
            let mut w: Vec<Complex64> = v.iter().map(|z| z / scale).collect();
            for _ in 0..2 {
                for b in &basis {
                    let proj = inner(b, &w);
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi -= proj * bi;
                    }
                }
            }
            let nrm = vec_norm(&w);
            if nrm > drop_tol {
                for wi in &mut w {
                    *wi /= nrm;
                }
                basis.push(w);
            }
        }
        Subspace { ambient_dim, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Complex64>] {
        &self.basis
    }

    /// Orthogonal projection matrix onto the subspace.
    pub fn projector(&self) -> ComplexMatrix {
        let n = self.ambient_dim;
        let mut p = ComplexMatrix::zeros(n, n);
        for b in &self.basis {
            for i in 0..n {
                for j in 0..n {
                    let cur = p.get(i, j);
                    p.set(i, j, cur + b[i] * b[j].conj());
                }
            }
        }
        p
    }

    /// Distance from `v` to the subspace (norm of the orthogonal residual).
    pub fn residual_norm(&self, v: &[Complex64]) -> f64 {
        let mut w = v.to_vec();
        for b in &self.basis {
            let proj = inner(b, &w);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= proj * bi;
            }
        }
        vec_norm(&w)
    }
}

/// Span of eigenvectors of a Hermitian `A` with `|λ| ≤ rel_tol · max(1, ‖A‖)`.
pub fn kernel_basis(a: &ComplexMatrix, rel_tol: f64) -> Result<Subspace> {
    let eig = hermitian_eigen(a)?;
    let scale = eig
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .fold(0.0, f64::max)
        .max(1.0);
    let threshold = rel_tol * scale;
    let n = a.rows();
    let basis: Vec<Vec<Complex64>> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, l)| l.abs() <= threshold)
        .map(|(c, _)| (0..n).map(|r| eig.eigenvectors.get(r, c)).collect())
        .collect();
    Ok(Subspace { ambient_dim: n, basis })
}

/// Compare two subspaces through their orthogonal projectors.
///
/// Returns `(equal, distance)` with `distance = ‖P_U - P_V‖` (operator
/// norm) and `equal ⇔ distance ≤ tol`.
pub fn subspace_equal(u: &Subspace, v: &Subspace, tol: f64) -> Result<(bool, f64)> {
    if u.ambient_dim != v.ambient_dim {
        return Err(WickError::DimensionMismatch(format!(
            "subspace ambient dimensions {} vs {}",
            u.ambient_dim, v.ambient_dim
        )));
    }
    let distance = operator_norm(&u.projector().sub(&v.projector()));
    Ok((distance <= tol, distance))
}
