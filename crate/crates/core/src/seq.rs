//! Finitely supported sequences on the integers.
//!
//! [`SeqWindow`] is a dense block of complex coefficients starting at an
//! integer offset. [`FiniteSymbol`] carries the same data but plays the role
//! of a Laurent coefficient block `phi(n)`, `n in [n_min, n_max]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Finitely supported complex sequence `x(offset + i) = coeffs[i]`.
///
/// Always kept in canonical form: leading and trailing coefficients are
/// nonzero, and the zero sequence is `offset = 0, coeffs = []`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SeqWindow {
    offset: i64,
    coeffs: Vec<Complex64>,
}

impl SeqWindow {
    pub fn new(offset: i64, coeffs: Vec<Complex64>) -> Self {
        let mut s = SeqWindow { offset, coeffs };
        s.canonicalize();
        s
    }

    pub fn from_real(offset: i64, values: &[f64]) -> Self {
        Self::new(offset, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// The unit vector `e_k`.
    pub fn basis(k: i64) -> Self {
        SeqWindow { offset: k, coeffs: vec![Complex64::new(1.0, 0.0)] }
    }

    fn canonicalize(&mut self) {
        let zero = Complex64::new(0.0, 0.0);
        let Some(first) = self.coeffs.iter().position(|c| *c != zero) else {
            self.offset = 0;
            self.coeffs.clear();
            return;
        };
        let last = self.coeffs.iter().rposition(|c| *c != zero).unwrap();
        self.coeffs.truncate(last + 1);
        self.coeffs.drain(..first);
        self.offset += first as i64;
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Inclusive support bounds, `None` for the zero sequence.
    pub fn support(&self) -> Option<(i64, i64)> {
        if self.is_zero() {
            None
        } else {
            Some((self.offset, self.offset + self.coeffs.len() as i64 - 1))
        }
    }

    pub fn get(&self, n: i64) -> Complex64 {
        let i = n - self.offset;
        if i < 0 || i >= self.coeffs.len() as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[i as usize]
        }
    }

    /// Iterates over `(index, value)` pairs of the stored block.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().enumerate().map(move |(i, c)| (self.offset + i as i64, *c))
    }

    /// Applies `f(n, x(n))` to every stored coefficient.
    pub fn map_indexed(&self, f: impl Fn(i64, Complex64) -> Complex64) -> SeqWindow {
        SeqWindow::new(self.offset, self.iter().map(|(n, c)| f(n, c)).collect())
    }

    pub fn scale(&self, s: Complex64) -> SeqWindow {
        self.map_indexed(|_, c| c * s)
    }

    pub fn add(&self, other: &SeqWindow) -> SeqWindow {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SeqWindow) -> SeqWindow {
        self.combine(other, |a, b| a - b)
    }

    fn combine(&self, other: &SeqWindow, f: impl Fn(Complex64, Complex64) -> Complex64) -> SeqWindow {
        let (lo, hi) = match (self.support(), other.support()) {
            (None, None) => return SeqWindow::zero(),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (Some(a), Some(b)) => (a.0.min(b.0), a.1.max(b.1)),
        };
        SeqWindow::new(lo, (lo..=hi).map(|n| f(self.get(n), other.get(n))).collect())
    }

    /// Largest modulus of a coefficient.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Restriction to the inclusive index range `[lo, hi]`.
    pub fn restrict(&self, lo: i64, hi: i64) -> SeqWindow {
        if lo > hi {
            return SeqWindow::zero();
        }
        match self.support() {
            None => SeqWindow::zero(),
            Some((a, b)) => {
                let (a, b) = (a.max(lo), b.min(hi));
                if a > b {
                    SeqWindow::zero()
                } else {
                    SeqWindow::new(a, (a..=b).map(|n| self.get(n)).collect())
                }
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SeqRepr {
    offset: i64,
    coeffs: Vec<[f64; 2]>,
}

impl Serialize for SeqWindow {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SeqRepr { offset: self.offset, coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SeqWindow {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = SeqRepr::deserialize(d)?;
        Ok(SeqWindow::new(r.offset, r.coeffs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()))
    }
}

/// Laurent coefficient block `phi(n)` for `n in [n_min, n_max]`.
///
/// Represents the symbol of a multiplier (`M-hat = M(e_0)`) or of a Toeplitz
/// operator. The zero symbol has no coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteSymbol(SeqWindow);

impl FiniteSymbol {
    pub fn new(n_min: i64, coeffs: Vec<Complex64>) -> Self {
        FiniteSymbol(SeqWindow::new(n_min, coeffs))
    }

    pub fn from_real(n_min: i64, values: &[f64]) -> Self {
        FiniteSymbol(SeqWindow::from_real(n_min, values))
    }

    /// The symbol `z^k`, i.e. the multiplier `S^k`.
    pub fn monomial(k: i64) -> Self {
        FiniteSymbol(SeqWindow::basis(k))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn n_min(&self) -> i64 {
        self.0.offset()
    }

    pub fn n_max(&self) -> i64 {
        self.0.offset() + self.0.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        self.0.coeffs()
    }

    pub fn get(&self, n: i64) -> Complex64 {
        self.0.get(n)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.0.iter()
    }

    /// `max(|n_min|, |n_max|)`, zero for the zero symbol.
    pub fn bandwidth(&self) -> i64 {
        if self.is_zero() {
            0
        } else {
            self.n_min().abs().max(self.n_max().abs())
        }
    }

    pub fn as_seq(&self) -> &SeqWindow {
        &self.0
    }
}

impl From<SeqWindow> for FiniteSymbol {
    fn from(s: SeqWindow) -> Self {
        FiniteSymbol(s)
    }
}

impl From<FiniteSymbol> for SeqWindow {
    fn from(s: FiniteSymbol) -> Self {
        s.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn canonical_form_trims_zeros() {
        let s = SeqWindow::new(-3, vec![c(0.0), c(1.0), c(0.0), c(2.0), c(0.0)]);
        assert_eq!(s.offset(), -2);
        assert_eq!(s.coeffs(), &[c(1.0), c(0.0), c(2.0)]);
        assert_eq!(s.support(), Some((-2, 0)));
        let z = SeqWindow::new(5, vec![c(0.0); 4]);
        assert!(z.is_zero());
        assert_eq!(z, SeqWindow::zero());
    }

    #[test]
    fn arithmetic_and_restriction() {
        let a = SeqWindow::from_real(0, &[1.0, 2.0]);
        let b = SeqWindow::from_real(1, &[-2.0, 5.0]);
        assert_eq!(a.add(&b), SeqWindow::from_real(0, &[1.0, 0.0, 5.0]));
        assert_eq!(a.sub(&a), SeqWindow::zero());
        assert_eq!(b.restrict(2, 10), SeqWindow::from_real(2, &[5.0]));
        assert!(b.restrict(3, 10).is_zero());
    }

    #[test]
    fn serde_shape() {
        let s = SeqWindow::new(-1, vec![Complex64::new(1.0, 2.0)]);
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"offset":-1,"coeffs":[[1.0,2.0]]}"#);
        let back: SeqWindow = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn symbol_bandwidth() {
        assert_eq!(FiniteSymbol::from_real(-3, &[1.0, 0.0, 1.0]).bandwidth(), 3);
        assert_eq!(FiniteSymbol::from_real(2, &[1.0, 1.0]).bandwidth(), 3);
        assert_eq!(FiniteSymbol::zero().bandwidth(), 0);
    }
}
