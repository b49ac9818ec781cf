//! The defining data of the algebra: the coefficient tensor
//! `T[i][j][k][l]` of the relations
//!
//! ```text
//! a_i* a_j = delta_ij 1 + sum_{k,l} T[i][j][k][l] a_l a_k*
//! ```
//!
//! its validation, the deformation presets, and assembly of the degree-2
//! operator on `H ⊗ H`.
//!
//! Assembly convention (normative for the whole crate): the matrix entry of
//! the assembled operator is
//!
//! ```text
//! <e_i ⊗ e_j, T (e_k ⊗ e_l)> = T[i][k][l][j]
//! ```
//!
//! With the tensor stored exactly as it appears in the relations, this
//! index placement is the one that makes the Fock-space machinery
//! reproduce the relations: the adjointness and relation-residual checks
//! in [`crate::fock`] fail loudly under any other pairing. A consequence
//! worth spelling out is that the assembled `q`-preset operator acts as
//! `T(e_k ⊗ e_l) = conj(q_kl) e_l ⊗ e_k`; the conjugate keeps the
//! normal-ordering rule `a_i* a_j -> delta_ij + q_ij a_j a_i*` and the
//! degree-2 kernel generators `a_j a_i - q_ij a_i a_j` (for `i < j`,
//! unimodular `q_ij`) literally true.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eigenvalues, operator_norm, ComplexMatrix};
use crate::operators::Operator;
use crate::rng::Rng;
use crate::{Result, WickError, STRUCTURAL_TOL};

/// Coefficient tensor with Hermitian Wick symmetry
/// `T[i][j][k][l] = conj(T[j][i][l][k])`. Indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct WickCoefficients {
    d: usize,
    coeff: Vec<Complex64>,
}

#[inline]
fn idx(d: usize, i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * d + j) * d + k) * d + l
}

impl WickCoefficients {
    /// The zero tensor (free / Cuntz-Toeplitz relations).
    pub fn zero(d: usize) -> Self {
        assert!(d >= 1);
        WickCoefficients {
            d,
            coeff: vec![Complex64::ZERO; d * d * d * d],
        }
    }

    /// Build from a flat `d^4` array in index order `[i][j][k][l]`.
    ///
    /// Entries are symmetrized against their Wick partners; input whose
    /// deviation from symmetry exceeds `1e-12 · max(1, max|entry|)` is
    /// rejected rather than silently repaired.
    pub fn from_entries(d: usize, entries: Vec<Complex64>) -> Result<Self> {
        if d < 1 {
            return Err(WickError::InvalidCoefficients("d must be >= 1".into()));
        }
        if entries.len() != d * d * d * d {
            return Err(WickError::InvalidCoefficients(format!(
                "expected {} entries for d = {d}, got {}",
                d * d * d * d,
                entries.len()
            )));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(WickError::InvalidCoefficients("non-finite entry".into()));
        }
        let scale = entries.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        let mut sym = entries.clone();
        let mut deviation = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let a = entries[idx(d, i, j, k, l)];
                        let b = entries[idx(d, j, i, l, k)].conj();
                        deviation = deviation.max((a - b).norm());
                        sym[idx(d, i, j, k, l)] = (a + b) * 0.5;
                    }
                }
            }
        }
        if deviation > STRUCTURAL_TOL * scale {
            return Err(WickError::InvalidCoefficients(format!(
                "Wick symmetry violated: max |T[i][j][k][l] - conj(T[j][i][l][k])| = \
                 {deviation:.3e} (allowed {:.3e})",
                STRUCTURAL_TOL * scale
            )));
        }
        Ok(WickCoefficients { d, coeff: sym })
    }

    /// Build without the symmetry gate (shape and finiteness are still
    /// checked). For diagnostic flows that want [`validate`] to report the
    /// deviation magnitudes of a broken tensor instead of refusing it.
    pub fn from_entries_diagnostic(d: usize, entries: Vec<Complex64>) -> Result<Self> {
        if d < 1 {
            return Err(WickError::InvalidCoefficients("d must be >= 1".into()));
        }
        if entries.len() != d * d * d * d {
            return Err(WickError::InvalidCoefficients(format!(
                "expected {} entries for d = {d}, got {}",
                d * d * d * d,
                entries.len()
            )));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(WickError::InvalidCoefficients("non-finite entry".into()));
        }
        Ok(WickCoefficients { d, coeff: entries })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.coeff[idx(self.d, i, j, k, l)]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.coeff
    }

    /// Rescale every coefficient; the assembled operator scales linearly.
    pub fn scaled(&self, factor: f64) -> Self {
        WickCoefficients {
            d: self.d,
            coeff: self.coeff.iter().map(|z| z * factor).collect(),
        }
    }

    /// Assemble the degree-2 operator on `H ⊗ H` from the tensor.
    pub fn build_t(&self) -> Result<Operator> {
        let report = validate(self);
        if !report.ok {
            return Err(WickError::InvalidCoefficients(
                report.violations.join("; "),
            ));
        }
        Ok(self.assemble_unchecked())
    }

    fn assemble_unchecked(&self) -> Operator {
        let d = self.d;
        let m = ComplexMatrix::from_fn(d * d, d * d, |row, col| {
            let (i, j) = (row / d, row % d);
            let (k, l) = (col / d, col % d);
            self.get(i, k, l, j)
        });
        Operator { degree: 2, dim_per_leg: d, matrix: m }
    }
}

/// Diagnostic outcome of coefficient validation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub wick_symmetry_residual: f64,
    pub wick_symmetry_allowed: f64,
    pub t_hermiticity_residual: f64,
    pub t_hermiticity_allowed: f64,
    pub violations: Vec<String>,
}

/// Check Wick symmetry of the tensor and self-adjointness of the assembled
/// operator. Diagnostic: never fails, reports magnitudes.
pub fn validate(c: &WickCoefficients) -> ValidationReport {
    let d = c.d;
    let scale = c
        .coeff
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(1.0);
    let mut sym_residual = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let a = c.get(i, j, k, l);
                    let b = c.get(j, i, l, k).conj();
                    sym_residual = sym_residual.max((a - b).norm());
                }
            }
        }
    }
    let t = c.assemble_unchecked();
    let herm_residual = t.matrix.hermiticity_residual();
    let sym_allowed = STRUCTURAL_TOL * scale;
    let herm_allowed = STRUCTURAL_TOL * (1.0 + t.matrix.frobenius_norm());

    let mut violations = Vec::new();
    if sym_residual > sym_allowed {
        violations.push(format!(
            "Wick symmetry: residual {sym_residual:.3e} > allowed {sym_allowed:.3e}"
        ));
    }
    if herm_residual > herm_allowed {
        violations.push(format!(
            "assembled T not self-adjoint: residual {herm_residual:.3e} > allowed \
             {herm_allowed:.3e}"
        ));
    }
    ValidationReport {
        ok: violations.is_empty(),
        wick_symmetry_residual: sym_residual,
        wick_symmetry_allowed: sym_allowed,
        t_hermiticity_residual: herm_residual,
        t_hermiticity_allowed: herm_allowed,
        violations,
    }
}

/// Coefficients of the `q`-deformed relations
/// `a_i* a_j = delta_ij + q_ij a_j a_i*`.
///
/// Requires `q_ji = conj(q_ij)`; off- and on-diagonal moduli above 1 are
/// rejected unless `allow_modulus_violation` is set.
pub fn preset_q_ccr(q: &[Vec<Complex64>], allow_modulus_violation: bool) -> Result<WickCoefficients> {
    let d = q.len();
    if d == 0 || q.iter().any(|row| row.len() != d) {
        return Err(WickError::InvalidCoefficients(
            "q must be a nonempty square matrix".into(),
        ));
    }
    for i in 0..d {
        for j in 0..d {
            if (q[i][j] - q[j][i].conj()).norm() > STRUCTURAL_TOL {
                return Err(WickError::InvalidCoefficients(format!(
                    "q[{}][{}] = {} is not the conjugate of q[{}][{}] = {}",
                    i + 1,
                    j + 1,
                    q[i][j],
                    j + 1,
                    i + 1,
                    q[j][i]
                )));
            }
            if !allow_modulus_violation && q[i][j].norm() > 1.0 + STRUCTURAL_TOL {
                return Err(WickError::InvalidCoefficients(format!(
                    "|q[{}][{}]| = {:.6} > 1 (pass the modulus override to allow)",
                    i + 1,
                    j + 1,
                    q[i][j].norm()
                )));
            }
        }
    }
    let mut out = WickCoefficients::zero(d);
    for i in 0..d {
        for j in 0..d {
            out.coeff[idx(d, i, j, i, j)] = q[i][j];
        }
    }
    Ok(out)
}

/// Coefficients of the twisted relations
///
/// ```text
/// a_i* a_i = 1 + mu^2 a_i a_i* - (1 - mu^2) sum_{k<i} a_k a_k*
/// a_i* a_j = mu a_j a_i*                                  (i != j)
/// ```
///
/// with `0 < mu < 1`; `extended_range` admits `-1 < mu <= 1` for boundary
/// exploration.
pub fn preset_tccr(mu: f64, d: usize, extended_range: bool) -> Result<WickCoefficients> {
    if d < 1 {
        return Err(WickError::InvalidCoefficients("d must be >= 1".into()));
    }
    let in_standard = 0.0 < mu && mu < 1.0;
    let in_extended = -1.0 < mu && mu <= 1.0;
    if !(in_standard || (extended_range && in_extended)) {
        return Err(WickError::InvalidCoefficients(format!(
            "mu = {mu} outside (0, 1){}",
            if extended_range { " and outside (-1, 1]" } else { "" }
        )));
    }
    let mut out = WickCoefficients::zero(d);
    for i in 0..d {
        out.coeff[idx(d, i, i, i, i)] = Complex64::new(mu * mu, 0.0);
        for k in 0..i {
            out.coeff[idx(d, i, i, k, k)] = Complex64::new(-(1.0 - mu * mu), 0.0);
        }
        for j in 0..d {
            if i != j {
                out.coeff[idx(d, i, j, i, j)] = Complex64::new(mu, 0.0);
            }
        }
    }
    Ok(out)
}

/// A named family of coefficient tensors.
#[derive(Debug, Clone)]
pub enum PresetSpec {
    QCcr {
        q: Vec<Vec<Complex64>>,
        allow_modulus_violation: bool,
    },
    Tccr {
        mu: f64,
        d: usize,
        extended_range: bool,
    },
    Zero {
        d: usize,
    },
    Explicit {
        d: usize,
        entries: Vec<Complex64>,
    },
}

impl PresetSpec {
    pub fn build(&self) -> Result<WickCoefficients> {
        match self {
            PresetSpec::QCcr { q, allow_modulus_violation } => {
                preset_q_ccr(q, *allow_modulus_violation)
            }
            PresetSpec::Tccr { mu, d, extended_range } => preset_tccr(*mu, *d, *extended_range),
            PresetSpec::Zero { d } => Ok(WickCoefficients::zero(*d)),
            PresetSpec::Explicit { d, entries } => {
                WickCoefficients::from_entries(*d, entries.clone())
            }
        }
    }
}

/// Uniform `q`-matrix helper: every entry `q` when `q` is real; for complex
/// `q`, entries above the diagonal get `q`, below get `conj(q)`, and the
/// diagonal is zero (a complex value cannot sit on the diagonal of a
/// Hermitian matrix).
pub fn uniform_q_matrix(d: usize, q: Complex64) -> Vec<Vec<Complex64>> {
    let mut m = vec![vec![Complex64::ZERO; d]; d];
    for i in 0..d {
        for j in 0..d {
            if i == j {
                if q.im == 0.0 {
                    m[i][j] = q;
                }
            } else if i < j {
                m[i][j] = q;
            } else {
                m[i][j] = q.conj();
            }
        }
    }
    m
}

/// Random Wick-symmetric tensor with independent complex-normal entries
/// (before symmetrization).
pub fn random_wick(d: usize, rng: &mut Rng) -> WickCoefficients {
    let raw: Vec<Complex64> = (0..d * d * d * d).map(|_| rng.complex_normal()).collect();
    let mut sym = raw.clone();
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    sym[idx(d, i, j, k, l)] =
                        (raw[idx(d, i, j, k, l)] + raw[idx(d, j, i, l, k)].conj()) * 0.5;
                }
            }
        }
    }
    WickCoefficients { d, coeff: sym }
}

/// Random Wick-symmetric tensor rescaled so the assembled operator has the
/// requested norm.
pub fn random_wick_with_norm(d: usize, target_norm: f64, rng: &mut Rng) -> Result<WickCoefficients> {
    for _ in 0..32 {
        let c = random_wick(d, rng);
        let norm = operator_norm(&c.assemble_unchecked().matrix);
        if norm > 1e-8 {
            return Ok(c.scaled(target_norm / norm));
        }
    }
    Err(WickError::InvalidCoefficients(
        "random tensor degenerately small after 32 draws".into(),
    ))
}

/// Random valid tensor whose assembled operator is positive semidefinite:
/// a Gram operator `sum_r w_r w_r†` on `H ⊗ H` pulled back to coefficients.
/// Pulling back a Hermitian operator lands exactly on the Wick-symmetric
/// tensors, so the symmetrization pass is a float-level no-op; positivity
/// is re-checked after it anyway, and the draw is rejected if broken.
pub fn random_psd_wick(d: usize, target_norm: f64, rng: &mut Rng) -> Result<WickCoefficients> {
    let dim = d * d;
    for _ in 0..32 {
        let vectors = 1 + rng.below(dim);
        let mut gram = ComplexMatrix::zeros(dim, dim);
        for _ in 0..vectors {
            let w: Vec<Complex64> = (0..dim).map(|_| rng.complex_normal()).collect();
            for r in 0..dim {
                for s in 0..dim {
                    let cur = gram.get(r, s);
                    gram.set(r, s, cur + w[r] * w[s].conj());
                }
            }
        }
        // Pull back: coeff[a][k][l][b] = M[(a,b),(k,l)].
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for a in 0..d {
            for b in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        entries[idx(d, a, k, l, b)] = gram.get(a * d + b, k * d + l);
                    }
                }
            }
        }
        let c = WickCoefficients::from_entries(d, entries)?;
        let t = c.assemble_unchecked();
        let norm = operator_norm(&t.matrix);
        if norm < 1e-8 {
            continue;
        }
        let scaled = c.scaled(target_norm / norm);
        let evals = hermitian_eigenvalues(&scaled.assemble_unchecked().matrix.symmetrized())?;
        if evals[0] >= -1e-12 * target_norm.max(1.0) {
            return Ok(scaled);
        }
    }
    Err(WickError::InvalidCoefficients(
        "could not draw a PSD tensor in 32 attempts".into(),
    ))
}

// ---------------------------------------------------------------------------
// Structured-text input schema
// ---------------------------------------------------------------------------

/// On-disk description of an algebra: exactly one of `preset` / `coeff`.
///
/// ```json
/// {"d": 2,
///  "preset": {"kind": "q_ccr", "q": [[[0,0],[0,1]],[[0,-1],[0,0]]]},
///  "allow_modulus_violation": false}
/// ```
///
/// Complex numbers are `[re, im]` pairs; `coeff` is a `d×d×d×d` nesting of
/// them in index order `[i][j][k][l]`. For `tccr` the
/// `allow_modulus_violation` flag doubles as the extended `mu`-range
/// override.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraInput {
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<PresetInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeff: Option<Vec<Vec<Vec<Vec<[f64; 2]>>>>>,
    #[serde(default)]
    pub allow_modulus_violation: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PresetInput {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

impl AlgebraInput {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| WickError::Parse {
            position: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_coefficients(&self) -> Result<WickCoefficients> {
        match (&self.preset, &self.coeff) {
            (Some(_), Some(_)) => Err(WickError::InvalidInput(
                "exactly one of \"preset\" / \"coeff\" may be present, got both".into(),
            )),
            (None, None) => Err(WickError::InvalidInput(
                "exactly one of \"preset\" / \"coeff\" must be present".into(),
            )),
            (Some(p), None) => match p.kind.as_str() {
                "q_ccr" => {
                    let q_raw = p.q.as_ref().ok_or_else(|| {
                        WickError::InvalidInput("q_ccr preset needs a \"q\" matrix".into())
                    })?;
                    if q_raw.len() != self.d || q_raw.iter().any(|r| r.len() != self.d) {
                        return Err(WickError::InvalidInput(format!(
                            "q matrix must be {0}x{0}",
                            self.d
                        )));
                    }
                    let q: Vec<Vec<Complex64>> = q_raw
                        .iter()
                        .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
                        .collect();
                    preset_q_ccr(&q, self.allow_modulus_violation)
                }
                "tccr" => {
                    let mu = p.mu.ok_or_else(|| {
                        WickError::InvalidInput("tccr preset needs \"mu\"".into())
                    })?;
                    preset_tccr(mu, self.d, self.allow_modulus_violation)
                }
                "zero" => Ok(WickCoefficients::zero(self.d)),
                other => Err(WickError::InvalidInput(format!(
                    "unknown preset kind {other:?} (expected q_ccr, tccr, or zero)"
                ))),
            },
            (None, Some(_)) => WickCoefficients::from_entries(self.d, self.flatten_coeff()?),
        }
    }

    /// Like [`Self::to_coefficients`] but without the symmetry gate on
    /// explicit tensors, so broken input can still be diagnosed.
    pub fn to_coefficients_diagnostic(&self) -> Result<WickCoefficients> {
        match (&self.preset, &self.coeff) {
            (None, Some(_)) => {
                WickCoefficients::from_entries_diagnostic(self.d, self.flatten_coeff()?)
            }
            _ => self.to_coefficients(),
        }
    }

    fn flatten_coeff(&self) -> Result<Vec<Complex64>> {
        let d = self.d;
        let nested = self
            .coeff
            .as_ref()
            .ok_or_else(|| WickError::InvalidInput("missing \"coeff\"".into()))?;
        let shape_err = || WickError::InvalidInput(format!("coeff must be {d}x{d}x{d}x{d}"));
        let mut entries = vec![Complex64::ZERO; d * d * d * d];
        if nested.len() != d {
            return Err(shape_err());
        }
        for (i, bi) in nested.iter().enumerate() {
            if bi.len() != d {
                return Err(shape_err());
            }
            for (j, bj) in bi.iter().enumerate() {
                if bj.len() != d {
                    return Err(shape_err());
                }
                for (k, bk) in bj.iter().enumerate() {
                    if bk.len() != d {
                        return Err(shape_err());
                    }
                    for (l, &[re, im]) in bk.iter().enumerate() {
                        entries[idx(d, i, j, k, l)] = Complex64::new(re, im);
                    }
                }
            }
        }
        Ok(entries)
    }

    /// One-line description for report headers.
    pub fn descriptor(&self) -> String {
        match &self.preset {
            Some(p) => match p.kind.as_str() {
                "tccr" => format!("tccr(mu = {}, d = {})", p.mu.unwrap_or(f64::NAN), self.d),
                "zero" => format!("zero(d = {})", self.d),
                "q_ccr" => format!("q_ccr(d = {})", self.d),
                other => format!("{other}(d = {})", self.d),
            },
            None => format!("explicit(d = {})", self.d),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigen;
    use crate::DEFAULT_DIM_CAP;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Direct index-loop oracle for Wick symmetry, independent of validate's
    /// internals in that it recomputes both sides from scratch.
    fn wick_symmetric(cf: &WickCoefficients) -> bool {
        let d = cf.d();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        if (cf.get(i, j, k, l) - cf.get(j, i, l, k).conj()).norm() > 1e-12 {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    #[test]
    fn zero_tensor_validates() {
        let report = validate(&WickCoefficients::zero(3));
        assert!(report.ok);
        assert_eq!(report.wick_symmetry_residual, 0.0);
        assert_eq!(report.t_hermiticity_residual, 0.0);
    }

    #[test]
    fn q_ccr_preset_validates_for_valid_q() {
        let q = vec![
            vec![c(0.3, 0.0), c(0.1, 0.7)],
            vec![c(0.1, -0.7), c(-0.2, 0.0)],
        ];
        let coeffs = preset_q_ccr(&q, false).unwrap();
        assert!(wick_symmetric(&coeffs));
        assert!(validate(&coeffs).ok);
    }

    #[test]
    fn broken_symmetry_detected() {
        // T[1][2][1][2] = 1 (1-based), everything else zero: its partner
        // T[2][1][2][1] is 0, so symmetry fails.
        let d = 2;
        let mut entries = vec![Complex64::ZERO; 16];
        entries[idx(d, 0, 1, 0, 1)] = Complex64::ONE;
        assert!(WickCoefficients::from_entries(d, entries.clone()).is_err());

        let forced = WickCoefficients { d, coeff: entries };
        let report = validate(&forced);
        assert!(!report.ok);
        assert!((report.wick_symmetry_residual - 1.0).abs() < 1e-15);
        assert!(!report.violations.is_empty());
    }

    #[test]
    fn q_ccr_rejects_non_hermitian_q() {
        let q = vec![
            vec![c(0.0, 0.0), c(0.5, 0.0)],
            vec![c(0.4, 0.0), c(0.0, 0.0)],
        ];
        assert!(preset_q_ccr(&q, false).is_err());
    }

    #[test]
    fn q_ccr_modulus_gate() {
        let q = vec![vec![c(-1.5, 0.0)]];
        assert!(preset_q_ccr(&q, false).is_err());
        let coeffs = preset_q_ccr(&q, true).unwrap();
        let t = coeffs.build_t().unwrap();
        assert!((t.matrix.get(0, 0).re + 1.5).abs() < 1e-15);
    }

    #[test]
    fn q_ccr_d1_zero() {
        let coeffs = preset_q_ccr(&[vec![Complex64::ZERO]], false).unwrap();
        let t = coeffs.build_t().unwrap();
        assert_eq!(t.dim(), 1);
        assert!(t.matrix.max_abs() == 0.0);
    }

    #[test]
    fn q_ccr_assembled_action() {
        // T(e_k ⊗ e_l) = conj(q_kl) e_l ⊗ e_k, exactly (entries are copied,
        // not computed).
        let q12 = c(0.0, 1.0);
        let q = vec![vec![Complex64::ZERO, q12], vec![q12.conj(), Complex64::ZERO]];
        let t = preset_q_ccr(&q, false).unwrap().build_t().unwrap();
        let d = 2;
        for k in 0..d {
            for l in 0..d {
                let mut x = vec![Complex64::ZERO; 4];
                x[k * d + l] = Complex64::ONE;
                let y = t.matrix.matvec(&x);
                for (row, v) in y.iter().enumerate() {
                    let expect = if row == l * d + k { q[k][l].conj() } else { Complex64::ZERO };
                    assert_eq!(*v, expect, "k {k} l {l} row {row}");
                }
            }
        }
        // The normal-ordering direction of the same data: the relation
        // coefficient of a_2 a_1* in a_1* a_2 is q_12 itself.
        let coeffs = preset_q_ccr(&q, false).unwrap();
        assert_eq!(coeffs.get(0, 1, 0, 1), q12);
    }

    #[test]
    fn q_ccr_all_ones_is_flip() {
        let q = vec![vec![c(1.0, 0.0); 2]; 2];
        let t = preset_q_ccr(&q, false).unwrap().build_t().unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let mut x = vec![Complex64::ZERO; 4];
                x[a * 2 + b] = Complex64::ONE;
                let y = t.matrix.matvec(&x);
                assert_eq!(y[b * 2 + a], Complex64::ONE);
            }
        }
        let eig = hermitian_eigen(&t.matrix).unwrap();
        let expect = [-1.0, 1.0, 1.0, 1.0];
        for (got, want) in eig.eigenvalues.iter().zip(expect) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn q_ccr_norm_is_max_modulus() {
        let q = vec![
            vec![c(0.25, 0.0), c(0.1, 0.6)],
            vec![c(0.1, -0.6), c(-0.8, 0.0)],
        ];
        let t = preset_q_ccr(&q, false).unwrap().build_t().unwrap();
        let max_mod = q
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!((operator_norm(&t.matrix) - max_mod).abs() < 1e-10);
    }

    #[test]
    fn tccr_d1_diagonal_case() {
        let t = preset_tccr(0.5, 1, false).unwrap().build_t().unwrap();
        assert_eq!(t.dim(), 1);
        assert!((t.matrix.get(0, 0) - c(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn tccr_three_case_action() {
        // d = 2, mu = 0.5: T(e_2 ⊗ e_1) = -0.75 e_2⊗e_1 + 0.5 e_1⊗e_2.
        let t = preset_tccr(0.5, 2, false).unwrap().build_t().unwrap();
        let mut x = vec![Complex64::ZERO; 4];
        x[1 * 2 + 0] = Complex64::ONE; // e_2 ⊗ e_1 (0-based (1,0))
        let y = t.matrix.matvec(&x);
        assert!((y[1 * 2 + 0] - c(-0.75, 0.0)).norm() < 1e-15);
        assert!((y[0 * 2 + 1] - c(0.5, 0.0)).norm() < 1e-15);
        // i < j case: T(e_1 ⊗ e_2) = 0.5 e_2 ⊗ e_1.
        let mut x = vec![Complex64::ZERO; 4];
        x[0 * 2 + 1] = Complex64::ONE;
        let y = t.matrix.matvec(&x);
        assert!((y[1 * 2 + 0] - c(0.5, 0.0)).norm() < 1e-15);
        assert!(y[0 * 2 + 1].norm() < 1e-15);
        // diagonal: T(e_i ⊗ e_i) = mu^2 e_i ⊗ e_i.
        let mut x = vec![Complex64::ZERO; 4];
        x[0] = Complex64::ONE;
        let y = t.matrix.matvec(&x);
        assert!((y[0] - c(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn tccr_mu_range() {
        assert!(preset_tccr(0.0, 2, false).is_err());
        assert!(preset_tccr(1.0, 2, false).is_err());
        assert!(preset_tccr(-0.5, 2, false).is_err());
        assert!(preset_tccr(-0.5, 2, true).is_ok());
        assert!(preset_tccr(-1.0, 2, true).is_err());
    }

    #[test]
    fn tccr_mu_one_extension_is_flip() {
        let t = preset_tccr(1.0, 2, true).unwrap().build_t().unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let mut x = vec![Complex64::ZERO; 4];
                x[a * 2 + b] = Complex64::ONE;
                let y = t.matrix.matvec(&x);
                assert!((y[b * 2 + a] - Complex64::ONE).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn tccr_spectrum_in_unit_interval() {
        for &mu in &[0.3, 0.5, 0.7] {
            for d in 1..=3 {
                let t = preset_tccr(mu, d, false).unwrap().build_t().unwrap();
                let evals = hermitian_eigenvalues(&t.matrix).unwrap();
                for l in &evals {
                    assert!(
                        (-1.0 - 1e-12..=1.0 + 1e-12).contains(l),
                        "mu {mu} d {d}: eigenvalue {l}"
                    );
                }
            }
        }
    }

    #[test]
    fn presets_assemble_hermitian() {
        let mut rng = Rng::new(77);
        for trial in 0..50 {
            let d = 1 + rng.below(3);
            let coeffs = random_wick(d, &mut rng);
            let t = coeffs.assemble_unchecked();
            let resid = t.matrix.hermiticity_residual();
            assert!(resid < 1e-12 * (1.0 + t.matrix.frobenius_norm()), "trial {trial}: {resid:.3e}");
        }
        for &mu in &[0.3, 0.7] {
            let t = preset_tccr(mu, 3, false).unwrap().build_t().unwrap();
            assert!(t.matrix.hermiticity_residual() < 1e-12);
        }
    }

    #[test]
    fn psd_tensor_is_psd_and_valid() {
        let mut rng = Rng::new(101);
        for _ in 0..10 {
            let coeffs = random_psd_wick(2, 0.9, &mut rng).unwrap();
            assert!(validate(&coeffs).ok);
            let t = coeffs.build_t().unwrap();
            let evals = hermitian_eigenvalues(&t.matrix.symmetrized()).unwrap();
            assert!(evals[0] >= -1e-10, "min eigenvalue {:.3e}", evals[0]);
            assert!((operator_norm(&t.matrix) - 0.9).abs() < 1e-8);
        }
    }

    #[test]
    fn random_norm_targeting() {
        let mut rng = Rng::new(5);
        let coeffs = random_wick_with_norm(2, 0.4, &mut rng).unwrap();
        let t = coeffs.build_t().unwrap();
        assert!((operator_norm(&t.matrix) - 0.4).abs() < 1e-10);
    }

    #[test]
    fn input_schema_preset_roundtrip() {
        let text = r#"{"d": 2,
            "preset": {"kind": "q_ccr", "q": [[[0,0],[0,1]],[[0,-1],[0,0]]]}}"#;
        let input = AlgebraInput::from_json(text).unwrap();
        let coeffs = input.to_coefficients().unwrap();
        assert_eq!(coeffs.d(), 2);
        assert_eq!(coeffs.get(0, 1, 0, 1), c(0.0, 1.0));

        let rendered = serde_json::to_string(&input).unwrap();
        let reparsed = AlgebraInput::from_json(&rendered).unwrap();
        assert_eq!(reparsed.to_coefficients().unwrap(), coeffs);
    }

    #[test]
    fn input_schema_exactly_one_source() {
        let both = r#"{"d": 1, "preset": {"kind": "zero"},
            "coeff": [[[[[0,0]]]]]}"#;
        assert!(AlgebraInput::from_json(both).unwrap().to_coefficients().is_err());
        let neither = r#"{"d": 1}"#;
        assert!(AlgebraInput::from_json(neither).unwrap().to_coefficients().is_err());
    }

    #[test]
    fn input_schema_explicit_coeff() {
        // d = 1 with T[1][1][1][1] = q.
        let text = r#"{"d": 1, "coeff": [[[[[0.5, 0]]]]]}"#;
        let coeffs = AlgebraInput::from_json(text).unwrap().to_coefficients().unwrap();
        assert_eq!(coeffs.get(0, 0, 0, 0), c(0.5, 0.0));
    }

    #[test]
    fn input_schema_tccr() {
        let text = r#"{"d": 3, "preset": {"kind": "tccr", "mu": 0.5}}"#;
        let input = AlgebraInput::from_json(text).unwrap();
        let coeffs = input.to_coefficients().unwrap();
        assert_eq!(coeffs, preset_tccr(0.5, 3, false).unwrap());
        assert_eq!(input.descriptor(), "tccr(mu = 0.5, d = 3)");
    }

    #[test]
    fn uniform_q_helper() {
        let m = uniform_q_matrix(2, c(0.3, 0.0));
        assert_eq!(m[0][0], c(0.3, 0.0));
        assert_eq!(m[0][1], c(0.3, 0.0));
        let m = uniform_q_matrix(2, c(0.0, 1.0));
        assert_eq!(m[0][0], Complex64::ZERO);
        assert_eq!(m[1][0], c(0.0, -1.0));
        assert!(preset_q_ccr(&m, false).is_ok());
    }

    #[test]
    fn build_t_refuses_invalid() {
        let d = 2;
        let mut entries = vec![Complex64::ZERO; 16];
        entries[idx(d, 0, 1, 0, 1)] = Complex64::ONE;
        let broken = WickCoefficients { d, coeff: entries };
        assert!(broken.build_t().is_err());
    }

    // Used by the cap-exceeded path of the dimension guard.
    #[test]
    fn checked_power_guard() {
        use crate::operators::checked_power;
        assert_eq!(checked_power(3, 6, DEFAULT_DIM_CAP).unwrap(), 729);
        assert!(checked_power(10, 6, DEFAULT_DIM_CAP).is_err());
    }
}
