//! The free *-algebra on `a_1..a_d, a_1*..a_d*`: parsing, normal-ordering
//! rewriting, the closed one-star commutation formula, and evaluation into
//! the truncated Fock representation.
//!
//! A word is **normal ordered** when every unstarred letter precedes every
//! starred one. The rewrite rule is read straight off the relations:
//!
//! ```text
//! a_i* a_j  ->  delta_ij 1 + sum_{k,l} T[i][j][k][l] a_l a_k*
//! ```
//!
//! Termination: the inversion measure (for each starred letter, the number
//! of unstarred letters to its right, summed) drops strictly on every
//! rewrite: the delta term shortens the word, each tensor term moves the
//! star one slot right. The measure is asserted to decrease at every step.
//!
//! Canonical term order is graded lexicographic: first by word length,
//! then letterwise with unstarred before starred and indices ascending.
//! Output, storage, and the confluence comparison all use this order.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::coefficients::WickCoefficients;
use crate::fock::{mu_star, RepMatrices};
use crate::linalg::ComplexMatrix;
use crate::operators::{apply_r, checked_power, lifted_apply};
use crate::{Result, WickError, COEFF_PRUNE_TOL};

/// One generator occurrence; `index` is 0-based (`a1` has index 0).
///
/// Field order matters: deriving `Ord` on `(starred, index)` sorts all
/// unstarred letters before starred ones, then by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub starred: bool,
    pub index: usize,
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}{}", self.index + 1, if self.starred { "*" } else { "" })
    }
}

/// A word in the generators; the empty word is the unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn unit() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All unstarred letters before all starred ones.
    pub fn is_normal_ordered(&self) -> bool {
        let mut seen_star = false;
        for l in &self.0 {
            if l.starred {
                seen_star = true;
            } else if seen_star {
                return false;
            }
        }
        true
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
            first = false;
        }
        Ok(())
    }
}

/// Finite complex-linear combination of words, in canonical sparse form
/// (no stored zero coefficients, terms in canonical order).
#[derive(Debug, Clone, PartialEq)]
pub struct StarPolynomial {
    terms: BTreeMap<Word, Complex64>,
}

impl StarPolynomial {
    pub fn zero() -> Self {
        StarPolynomial { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(Word::unit(), Complex64::ONE)
    }

    pub fn monomial(word: Word, coeff: Complex64) -> Self {
        let mut p = Self::zero();
        p.add_term(word, coeff);
        p
    }

    pub fn add_term(&mut self, word: Word, coeff: Complex64) {
        if coeff == Complex64::ZERO {
            return;
        }
        let entry = self.terms.entry(word);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let new = *o.get() + coeff;
                if new == Complex64::ZERO {
                    o.remove();
                } else {
                    *o.get_mut() = new;
                }
            }
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), *c);
        }
        out
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c * factor);
        }
        out
    }

    /// Drop terms with `|coeff| <= threshold`.
    pub fn pruned(&self, threshold: f64) -> Self {
        StarPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() > threshold)
                .map(|(w, c)| (w.clone(), *c))
                .collect(),
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, word: &Word) -> Complex64 {
        self.terms.get(word).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, Complex64)> + '_ {
        self.terms.iter().map(|(w, c)| (w, *c))
    }

    pub fn is_normal_ordered(&self) -> bool {
        self.terms.keys().all(Word::is_normal_ordered)
    }

    /// Max coefficientwise distance to another polynomial.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for (w, c) in &self.terms {
            worst = worst.max((c - other.coefficient(w)).norm());
        }
        for (w, c) in &other.terms {
            worst = worst.max((self.coefficient(w) - c).norm());
        }
        worst
    }

    /// Render with the lexicographically greatest term first (used for
    /// kernel generators, where the leading word carries coefficient 1).
    pub fn render_descending(&self) -> String {
        render_terms(self.terms.iter().rev().map(|(w, c)| (w, *c)))
    }
}

fn split_sign(z: Complex64) -> (bool, Complex64) {
    if z.re < 0.0 || (z.re == 0.0 && z.im < 0.0) {
        (true, -z)
    } else {
        (false, z)
    }
}

fn format_magnitude(z: Complex64) -> String {
    // +0.0 to keep "-0" out of rendered coefficients.
    let re = z.re + 0.0;
    let im = z.im + 0.0;
    if im == 0.0 {
        format!("{re}")
    } else if im < 0.0 {
        format!("({re}-{}i)", -im)
    } else {
        format!("({re}+{im}i)")
    }
}

fn render_terms<'a>(terms: impl Iterator<Item = (&'a Word, Complex64)>) -> String {
    let mut out = String::new();
    let mut first = true;
    for (word, coeff) in terms {
        let (neg, mag) = split_sign(coeff);
        if first {
            if neg {
                out.push('-');
            }
            first = false;
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let unit_coeff = mag == Complex64::ONE;
        if word.is_empty() {
            out.push_str(&format_magnitude(mag));
        } else if unit_coeff {
            out.push_str(&word.to_string());
        } else {
            out.push_str(&format_magnitude(mag));
            out.push(' ');
            out.push_str(&word.to_string());
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for StarPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_terms(self.terms.iter().map(|(w, c)| (w, *c))))
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------
//
// expr    := ["+"|"-"] term (("+"|"-") term)*
// term    := literal | [literal] factor+
// factor  := "a" index ["*"]
// literal := float | "(" float ("+"|"-") float "i" ")"

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { bytes: text.as_bytes(), pos: 0 }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) {
        self.pos += 1;
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.bump();
        }
    }

    fn error(&self, message: impl Into<String>) -> WickError {
        WickError::Parse { position: self.pos, message: message.into() }
    }
}

fn parse_float(cur: &mut Cursor) -> Result<f64> {
    let start = cur.pos;
    if matches!(cur.peek(), Some(b'+') | Some(b'-')) {
        cur.bump();
    }
    let mut digits = 0;
    while matches!(cur.peek(), Some(b) if b.is_ascii_digit()) {
        cur.bump();
        digits += 1;
    }
    if cur.peek() == Some(b'.') {
        cur.bump();
        while matches!(cur.peek(), Some(b) if b.is_ascii_digit()) {
            cur.bump();
            digits += 1;
        }
    }
    if digits == 0 {
        return Err(cur.error("expected a number"));
    }
    if matches!(cur.peek(), Some(b'e') | Some(b'E')) {
        cur.bump();
        if matches!(cur.peek(), Some(b'+') | Some(b'-')) {
            cur.bump();
        }
        let mut exp_digits = 0;
        while matches!(cur.peek(), Some(b) if b.is_ascii_digit()) {
            cur.bump();
            exp_digits += 1;
        }
        if exp_digits == 0 {
            return Err(cur.error("expected exponent digits"));
        }
    }
    let slice = std::str::from_utf8(&cur.bytes[start..cur.pos]).expect("ascii");
    slice
        .parse::<f64>()
        .map_err(|e| cur.error(format!("bad number {slice:?}: {e}")))
}

fn parse_literal(cur: &mut Cursor) -> Result<Complex64> {
    if cur.peek() == Some(b'(') {
        cur.bump();
        cur.skip_ws();
        let re = parse_float(cur)?;
        cur.skip_ws();
        let sign = match cur.peek() {
            Some(b'+') => 1.0,
            Some(b'-') => -1.0,
            _ => return Err(cur.error("expected '+' or '-' inside complex literal")),
        };
        cur.bump();
        cur.skip_ws();
        let im = parse_float(cur)?;
        cur.skip_ws();
        if cur.peek() != Some(b'i') {
            return Err(cur.error("expected 'i' in complex literal"));
        }
        cur.bump();
        cur.skip_ws();
        if cur.peek() != Some(b')') {
            return Err(cur.error("expected ')' closing complex literal"));
        }
        cur.bump();
        Ok(Complex64::new(re, sign * im))
    } else {
        Ok(Complex64::new(parse_float(cur)?, 0.0))
    }
}

fn parse_factor(cur: &mut Cursor, d: usize) -> Result<Letter> {
    debug_assert_eq!(cur.peek(), Some(b'a'));
    cur.bump();
    let digit_start = cur.pos;
    while matches!(cur.peek(), Some(b) if b.is_ascii_digit()) {
        cur.bump();
    }
    if cur.pos == digit_start {
        return Err(cur.error("expected a generator index after 'a'"));
    }
    let index: usize = std::str::from_utf8(&cur.bytes[digit_start..cur.pos])
        .expect("ascii")
        .parse()
        .map_err(|e| cur.error(format!("bad generator index: {e}")))?;
    if index == 0 || index > d {
        return Err(WickError::IndexOutOfRange { index, d });
    }
    let starred = if cur.peek() == Some(b'*') {
        cur.bump();
        true
    } else {
        false
    };
    Ok(Letter { starred, index: index - 1 })
}

/// Parse a standalone complex literal: `0.5`, `-2`, `(0+1i)`, `(1.5-2i)`.
pub fn parse_complex_literal(text: &str) -> Result<Complex64> {
    let mut cur = Cursor::new(text);
    cur.skip_ws();
    let v = parse_literal(&mut cur)?;
    cur.skip_ws();
    if cur.peek().is_some() {
        return Err(cur.error("trailing characters after complex literal"));
    }
    Ok(v)
}

/// Parse an expression in the grammar above into an (unreduced) polynomial.
pub fn parse_expr(text: &str, d: usize) -> Result<StarPolynomial> {
    let mut cur = Cursor::new(text);
    let mut poly = StarPolynomial::zero();
    cur.skip_ws();
    if cur.peek().is_none() {
        return Err(cur.error("empty expression"));
    }
    let mut sign = 1.0;
    if matches!(cur.peek(), Some(b'+') | Some(b'-')) {
        if cur.peek() == Some(b'-') {
            sign = -1.0;
        }
        cur.bump();
    }
    loop {
        cur.skip_ws();
        let starts_literal = matches!(cur.peek(), Some(b'(') | Some(b'.'))
            || matches!(cur.peek(), Some(b) if b.is_ascii_digit());
        let coeff = if starts_literal {
            Some(parse_literal(&mut cur)?)
        } else {
            None
        };
        let mut letters = Vec::new();
        loop {
            cur.skip_ws();
            if cur.peek() == Some(b'a') {
                letters.push(parse_factor(&mut cur, d)?);
            } else {
                break;
            }
        }
        if coeff.is_none() && letters.is_empty() {
            return Err(cur.error("expected a term"));
        }
        let coeff = coeff.unwrap_or(Complex64::ONE) * sign;
        poly.add_term(Word::new(letters), coeff);
        cur.skip_ws();
        match cur.peek() {
            None => break,
            Some(b'+') => sign = 1.0,
            Some(b'-') => sign = -1.0,
            Some(b) => {
                return Err(cur.error(format!("expected '+' or '-', found {:?}", b as char)))
            }
        }
        cur.bump();
    }
    Ok(poly)
}

// ---------------------------------------------------------------------------
// Normal ordering
// ---------------------------------------------------------------------------

/// Which star-unstarred adjacent pair to rewrite first inside each word.
/// The leftmost choice is the deterministic default; the rightmost exists
/// to demonstrate that the normal form does not depend on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewriteStrategy {
    LeftmostFirst,
    RightmostFirst,
}

/// Sum over starred letters of the number of unstarred letters to their
/// right. Zero exactly on normal-ordered words; strictly decreasing along
/// rewrites, which is the termination argument.
pub fn inversion_measure(word: &Word) -> usize {
    let mut measure = 0;
    let mut unstarred_right = 0;
    for l in word.letters().iter().rev() {
        if l.starred {
            measure += unstarred_right;
        } else {
            unstarred_right += 1;
        }
    }
    measure
}

fn find_site(word: &Word, strategy: RewriteStrategy) -> Option<usize> {
    let ls = word.letters();
    let sites = (0..ls.len().saturating_sub(1))
        .filter(|&t| ls[t].starred && !ls[t + 1].starred);
    match strategy {
        RewriteStrategy::LeftmostFirst => sites.min(),
        RewriteStrategy::RightmostFirst => sites.max(),
    }
}

/// Normal-order a polynomial with the default (leftmost-site) strategy.
pub fn wick_order(p: &StarPolynomial, coeffs: &WickCoefficients) -> StarPolynomial {
    wick_order_with_strategy(p, coeffs, RewriteStrategy::LeftmostFirst)
}

/// Normal-order with an explicit site-selection strategy. One site per
/// word is rewritten per pass; coefficients below `1e-14` are dropped
/// after every pass.
pub fn wick_order_with_strategy(
    p: &StarPolynomial,
    coeffs: &WickCoefficients,
    strategy: RewriteStrategy,
) -> StarPolynomial {
    let d = coeffs.d();
    for (w, _) in p.terms() {
        for l in w.letters() {
            assert!(l.index < d, "generator index {} out of range for d = {d}", l.index + 1);
        }
    }
    let mut current = p.clone();
    loop {
        let mut next = StarPolynomial::zero();
        let mut changed = false;
        for (word, coeff) in current.terms() {
            let Some(t) = find_site(word, strategy) else {
                next.add_term(word.clone(), coeff);
                continue;
            };
            changed = true;
            let before = inversion_measure(word);
            let ls = word.letters();
            let (i, j) = (ls[t].index, ls[t + 1].index);
            if i == j {
                let mut shorter = ls.to_vec();
                shorter.drain(t..t + 2);
                let shorter = Word::new(shorter);
                debug_assert!(inversion_measure(&shorter) < before);
                next.add_term(shorter, coeff);
            }
            for k in 0..d {
                for l in 0..d {
                    let factor = coeffs.get(i, j, k, l);
                    if factor == Complex64::ZERO {
                        continue;
                    }
                    let mut replaced = ls.to_vec();
                    replaced[t] = Letter { starred: false, index: l };
                    replaced[t + 1] = Letter { starred: true, index: k };
                    let replaced = Word::new(replaced);
                    debug_assert!(inversion_measure(&replaced) < before);
                    next.add_term(replaced, coeff * factor);
                }
            }
        }
        current = next.pruned(COEFF_PRUNE_TOL);
        if !changed {
            return current;
        }
    }
}

// ---------------------------------------------------------------------------
// Closed one-star commutation formula
// ---------------------------------------------------------------------------

/// The closed form for `a_i* · X` with `X = a_{x_1} ... a_{x_n}` unstarred:
///
/// ```text
/// mu(e_i*) R_n X  +  sum_k [ mu(e_i*) T_1 T_2 ... T_n (X ⊗ e_k) ] a_k*
/// ```
///
/// evaluated literally as matrices on the coefficient vectors of `X` and
/// `X ⊗ e_k`. Agreement with [`wick_order`] applied to `a_i* X` is the
/// machine-checked content of the one-star commutation rule.
pub fn prop1_rhs(
    i: usize,
    x_word: &[usize],
    coeffs: &WickCoefficients,
    cap: usize,
) -> Result<StarPolynomial> {
    let d = coeffs.d();
    if i >= d {
        return Err(WickError::IndexOutOfRange { index: i + 1, d });
    }
    for &g in x_word {
        if g >= d {
            return Err(WickError::IndexOutOfRange { index: g + 1, d });
        }
    }
    let n = x_word.len();
    checked_power(d, n + 1, cap)?;
    let t = coeffs.build_t()?;
    let mut out = StarPolynomial::zero();

    let x_index = x_word.iter().fold(0usize, |acc, &g| acc * d + g);

    // First sum: mu(e_i*) R_n X, a polynomial of unstarred words of
    // length n - 1 (empty when n = 0 since mu annihilates the vacuum).
    if n >= 1 {
        let dim = d.pow(n as u32);
        let mut x = vec![Complex64::ZERO; dim];
        x[x_index] = Complex64::ONE;
        let rx = apply_r(&t.matrix, d, n, &x);
        let dropped = mu_star(i, d, n, &rx);
        for (idx, &val) in dropped.iter().enumerate() {
            if val.norm() > COEFF_PRUNE_TOL {
                out.add_term(Word::new(decode_word(idx, d, n - 1)), val);
            }
        }
    }

    // Second sum: for each k, mu(e_i*) T_1 ... T_n (X ⊗ e_k) followed by a
    // trailing a_k*.
    for k in 0..d {
        let dim = d.pow((n + 1) as u32);
        let mut v = vec![Complex64::ZERO; dim];
        v[x_index * d + k] = Complex64::ONE;
        for leg in (1..=n).rev() {
            v = lifted_apply(&t.matrix, d, n + 1, leg, &v);
        }
        let dropped = mu_star(i, d, n + 1, &v);
        for (idx, &val) in dropped.iter().enumerate() {
            if val.norm() > COEFF_PRUNE_TOL {
                let mut letters = decode_word(idx, d, n);
                letters.push(Letter { starred: true, index: k });
                out.add_term(Word::new(letters), val);
            }
        }
    }
    Ok(out)
}

fn decode_word(mut index: usize, d: usize, len: usize) -> Vec<Letter> {
    let mut letters = vec![Letter { starred: false, index: 0 }; len];
    for pos in (0..len).rev() {
        letters[pos] = Letter { starred: false, index: index % d };
        index /= d;
    }
    letters
}

// ---------------------------------------------------------------------------
// Evaluation in the truncated Fock representation
// ---------------------------------------------------------------------------

/// Result of evaluating a polynomial as a matrix on the truncated quotient
/// Fock space. `overflowed` flags terms whose intermediate degree would
/// exceed the truncation; their out-of-range blocks are evaluated as zero.
#[derive(Debug, Clone)]
pub struct FockEvaluation {
    pub matrix: ComplexMatrix,
    pub overflowed: bool,
}

/// Substitute creation blocks for `a_i`, annihilation blocks for `a_i*`,
/// multiply in word order, and sum with coefficients.
pub fn evaluate_in_fock(p: &StarPolynomial, rep: &RepMatrices) -> Result<FockEvaluation> {
    for (w, _) in p.terms() {
        for l in w.letters() {
            if l.index >= rep.d {
                return Err(WickError::IndexOutOfRange { index: l.index + 1, d: rep.d });
            }
        }
    }
    let offs = rep.offsets();
    let total = rep.total_dim();
    let mut out = ComplexMatrix::zeros(total, total);
    let mut overflowed = false;

    for (word, coeff) in p.terms() {
        for n0 in 0..=rep.max_degree {
            let dim0 = rep.quotient_dims[n0];
            if dim0 == 0 {
                continue;
            }
            let mut deg = n0;
            let mut block = ComplexMatrix::identity(dim0);
            let mut alive = true;
            // Rightmost letter acts first.
            for letter in word.letters().iter().rev() {
                if letter.starred {
                    if deg == 0 {
                        alive = false;
                        break;
                    }
                    block = rep
                        .annihilation_block(deg, letter.index)
                        .expect("annihilation block in range")
                        .matmul(&block);
                    deg -= 1;
                } else {
                    if deg == rep.max_degree {
                        if rep.collapsed {
                            // The next Gram operator is identically zero:
                            // creation into it is the zero map, not a
                            // truncation artifact.
                            alive = false;
                            break;
                        }
                        overflowed = true;
                        alive = false;
                        break;
                    }
                    block = rep
                        .creation_block(deg, letter.index)
                        .expect("creation block in range")
                        .matmul(&block);
                    deg += 1;
                }
            }
            if !alive {
                continue;
            }
            for r in 0..block.rows() {
                for col in 0..block.cols() {
                    let cur = out.get(offs[deg] + r, offs[n0] + col);
                    out.set(offs[deg] + r, offs[n0] + col, cur + coeff * block.get(r, col));
                }
            }
        }
    }
    Ok(FockEvaluation { matrix: out, overflowed })
}
