//! Banded convolution operators compressed to coordinate windows, and the
//! lower/upper norm bounds shared by the multiplier and Toeplitz checkers.
//!
//! For weighted `l^p` spaces everything is expressed in weighted coordinates
//! `y(n) = x(n) omega(n)`, where the operator has entries
//! `phi(i-j) omega(i)/omega(j)` and the norm is the plain `l^p` norm.

use crate::error::{Error, Result};
use crate::seq::{FiniteSymbol, SeqWindow};
use crate::shift_spectrum::shift_norm_upper;
use crate::spaces::{lp_of, norm, Family, SpaceSpec, WeightAnnotation};
use crate::trig::{Stop, TrigPoly};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

type C = Complex64;

/// Compression of `x -> P^+?(phi * x)` to indices `lo..=hi`.
#[derive(Debug, Clone)]
pub struct FiniteSection {
    lo: i64,
    hi: i64,
    symbol: FiniteSymbol,
    space: SpaceSpec,
    /// `log omega` on `lo..=hi` for weighted `l^p` spaces.
    log_w: Option<Vec<f64>>,
}

impl FiniteSection {
    pub(crate) fn new(symbol: &FiniteSymbol, space: &SpaceSpec, lo: i64, hi: i64) -> Result<Self> {
        if let Some((a, b)) = space.window() {
            if lo < a || hi > b {
                return Err(Error::SupportOutsideWindow { lo, hi, win_lo: a, win_hi: b });
            }
        }
        let log_w = match &space.family {
            Family::Lpw { weight, .. } => Some((lo..=hi).map(|n| weight.log_at(n).unwrap()).collect()),
            _ => None,
        };
        Ok(FiniteSection { lo, hi, symbol: symbol.clone(), space: space.clone(), log_w })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn size(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn symbol(&self) -> &FiniteSymbol {
        &self.symbol
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    /// True when the section acts on weighted coordinates (weighted `l^p`).
    pub fn is_weighted(&self) -> bool {
        self.log_w.is_some()
    }

    /// `p` for weighted `l^p` spaces.
    pub fn lp_exponent(&self) -> Option<f64> {
        match &self.space.family {
            Family::Lpw { p, .. } => Some(*p),
            _ => None,
        }
    }

    /// Entry `(i, j)`, both zero-based row/column positions.
    pub fn entry(&self, i: usize, j: usize) -> C {
        let v = self.symbol.get(i as i64 - j as i64);
        match &self.log_w {
            Some(lw) if v != C::new(0.0, 0.0) => v * (lw[i] - lw[j]).exp(),
            _ => v,
        }
    }

    pub fn to_dense(&self) -> DMatrix<C> {
        let n = self.size();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            for (k, _) in self.symbol.iter() {
                let i = j as i64 + k;
                if i >= 0 && (i as usize) < n {
                    m[(i as usize, j)] = self.entry(i as usize, j);
                }
            }
        }
        m
    }

    pub fn is_nonnegative(&self) -> bool {
        self.symbol.iter().all(|(_, c)| c.im == 0.0 && c.re >= 0.0)
    }

    pub fn apply(&self, v: &[C]) -> Vec<C> {
        let n = self.size();
        let mut out = vec![C::new(0.0, 0.0); n];
        for (j, &x) in v.iter().enumerate() {
            if x == C::new(0.0, 0.0) {
                continue;
            }
            for (k, _) in self.symbol.iter() {
                let i = j as i64 + k;
                if i >= 0 && (i as usize) < n {
                    out[i as usize] += self.entry(i as usize, j) * x;
                }
            }
        }
        out
    }

    pub fn apply_adjoint(&self, v: &[C]) -> Vec<C> {
        let n = self.size();
        let mut out = vec![C::new(0.0, 0.0); n];
        for (j, o) in out.iter_mut().enumerate() {
            for (k, _) in self.symbol.iter() {
                let i = j as i64 + k;
                if i >= 0 && (i as usize) < n {
                    *o += self.entry(i as usize, j).conj() * v[i as usize];
                }
            }
        }
        out
    }

    /// Norm of a coordinate vector in the section's space.
    pub fn norm_of(&self, v: &[C]) -> Result<f64> {
        match (&self.space.family, self.log_w.is_some()) {
            (Family::Lpw { p, .. }, true) => Ok(lp_of(*p, &v.iter().map(|c| c.norm()).collect::<Vec<_>>())),
            _ => norm(&self.space, &SeqWindow::new(self.lo, v.to_vec())),
        }
    }

    /// `||A v|| / ||v||`; zero for `v = 0`.
    pub fn ratio(&self, v: &[C]) -> Result<f64> {
        let d = self.norm_of(v)?;
        if d == 0.0 {
            return Ok(0.0);
        }
        Ok(self.norm_of(&self.apply(v))? / d)
    }
}

fn l2(v: &[C]) -> f64 {
    lp_of(2.0, &v.iter().map(|c| c.norm()).collect::<Vec<_>>())
}

fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Lanczos estimate of the largest singular value in the `l^2` sense.
///
/// Returns `||A v||_2 / ||v||_2` for the top Ritz vector `v`, so the value
/// is a rigorous lower bound for the section's `l^2` norm.
pub(crate) fn lanczos_l2_lower(section: &FiniteSection, steps: usize) -> f64 {
    let n = section.size();
    let steps = steps.min(n).max(1);
    let mut q: Vec<Vec<C>> = Vec::with_capacity(steps);
    let start: Vec<C> = (0..n).map(|j| C::new(1.0 + 0.25 * (0.618_033_988_75 * j as f64).sin(), 0.0)).collect();
    let s = l2(&start);
    q.push(start.iter().map(|c| c / s).collect());
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    for j in 0..steps {
        let mut w = section.apply_adjoint(&section.apply(&q[j]));
        let a = dot(&q[j], &w).re;
        alpha.push(a);
        for qi in &q {
            let h = dot(qi, &w);
            for (x, y) in w.iter_mut().zip(qi) {
                *x -= h * y;
            }
        }
        let b = l2(&w);
        if j + 1 == steps || b <= 1e-13 * a.abs().max(1e-300) {
            break;
        }
        beta.push(b);
        q.push(w.iter().map(|c| c / b).collect());
    }
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = t.symmetric_eigen();
    let top = eig.eigenvalues.imax();
    let s: DVector<f64> = eig.eigenvectors.column(top).into_owned();
    let mut v = vec![C::new(0.0, 0.0); n];
    for (i, qi) in q.iter().take(k).enumerate() {
        for (x, y) in v.iter_mut().zip(qi) {
            *x += y * s[i];
        }
    }
    let nv = l2(&v);
    if nv == 0.0 {
        return 0.0;
    }
    l2(&section.apply(&v)) / nv
}

/// Boyd's iteration for the `l^p` norm in weighted coordinates.
///
/// Returns `(value, converged)`; `value = ||A x||_p / ||x||_p` for the final
/// iterate, hence always a lower bound.
pub(crate) fn boyd_lp(section: &FiniteSection, p: f64, max_iter: usize) -> (f64, bool) {
    let n = section.size();
    let q = p / (p - 1.0);
    let dual = |v: &[C], r: f64| -> Vec<C> {
        let nr = lp_of(r, &v.iter().map(|c| c.norm()).collect::<Vec<_>>());
        if nr == 0.0 {
            return vec![C::new(0.0, 0.0); v.len()];
        }
        v.iter()
            .map(|c| {
                let a = c.norm();
                if a == 0.0 {
                    C::new(0.0, 0.0)
                } else {
                    (c / a) * (a / nr).powf(r - 1.0)
                }
            })
            .collect()
    };
    let norm_p = |v: &[C]| lp_of(p, &v.iter().map(|c| c.norm()).collect::<Vec<_>>());
    let mut x: Vec<C> = vec![C::new((n as f64).powf(-1.0 / p), 0.0); n];
    let mut best = 0.0f64;
    for _ in 0..max_iter {
        let y = section.apply(&x);
        let ny = norm_p(&y);
        best = best.max(ny / norm_p(&x));
        if ny == 0.0 {
            return (best, true);
        }
        let z = section.apply_adjoint(&dual(&y, p));
        let zq = lp_of(q, &z.iter().map(|c| c.norm()).collect::<Vec<_>>());
        if zq <= dot(&z, &x).re * (1.0 + 1e-13) {
            return (best, true);
        }
        x = dual(&z, q);
    }
    (best, false)
}

/// Lower bound for the compressed operator, chosen per space.
pub(crate) fn section_lower(section: &FiniteSection) -> Result<f64> {
    match section.lp_exponent() {
        Some(1.0) => Ok(column_sup_dense(section)),
        Some(p) if p.is_infinite() => Ok(row_sup_dense(section)),
        Some(2.0) => Ok(lanczos_l2_lower(section, 120)),
        Some(p) => Ok(boyd_lp(section, p, 500).0),
        None => {
            // Lattice norms only: basis vectors give `||A e_j|| / ||e_j||`.
            let mut best = 0.0f64;
            let n = section.size();
            for j in 0..n {
                let mut e = vec![C::new(0.0, 0.0); n];
                e[j] = C::new(1.0, 0.0);
                best = best.max(section.ratio(&e)?);
            }
            Ok(best)
        }
    }
}

fn column_sup_dense(section: &FiniteSection) -> f64 {
    let n = section.size();
    (0..n)
        .map(|j| {
            section
                .symbol
                .iter()
                .filter_map(|(k, _)| {
                    let i = j as i64 + k;
                    (i >= 0 && (i as usize) < n).then(|| section.entry(i as usize, j).norm())
                })
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

fn row_sup_dense(section: &FiniteSection) -> f64 {
    let n = section.size();
    (0..n)
        .map(|i| {
            section
                .symbol
                .iter()
                .filter_map(|(k, _)| {
                    let j = i as i64 - k;
                    (j >= 0 && (j as usize) < n).then(|| section.entry(i, j as usize).norm())
                })
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// Coefficients of `phi(rho w)` as a polynomial in `w`, lowest power first.
pub(crate) fn scaled_coeffs(symbol: &FiniteSymbol, rho: f64) -> Vec<C> {
    symbol.iter().map(|(n, c)| if c == C::new(0.0, 0.0) { c } else { c * rho.powi(n as i32) }).collect()
}

/// A modulated sine-window test vector and the ratio it certifies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub ratio: f64,
    pub start: i64,
    pub len: usize,
    pub rho: f64,
    pub theta: f64,
}

/// Indices admissible as witness input so every output index stays inside
/// the space window.
fn witness_span(symbol: &FiniteSymbol, space: &SpaceSpec) -> Option<(i64, i64)> {
    let (a, b) = space.window()?;
    let lo = a + (-symbol.n_min()).max(0);
    let hi = b - symbol.n_max().max(0);
    (hi >= lo).then_some((lo, hi))
}

/// `||A y|| / ||y||` for `y(n) = sin(pi (n-s+1)/(L+1)) e^{-i n theta}` on
/// `[s, s+L-1]`, with the full (uncompressed) output of the operator.
fn witness_ratio(symbol: &FiniteSymbol, space: &SpaceSpec, start: i64, len: usize, theta: f64) -> Result<f64> {
    let end = start + len as i64 - 1;
    let y: Vec<C> = (0..len)
        .map(|m| {
            let n = start + m as i64;
            let env = (std::f64::consts::PI * (m as f64 + 1.0) / (len as f64 + 1.0)).sin();
            C::from_polar(env, -(n as f64) * theta)
        })
        .collect();
    let mut out_lo = start + symbol.n_min();
    if space.half_line {
        out_lo = out_lo.max(0);
    }
    let out_hi = end + symbol.n_max();
    let mut out = vec![C::new(0.0, 0.0); (out_hi - out_lo + 1) as usize];
    let weight = match &space.family {
        Family::Lpw { weight, .. } => Some(weight),
        _ => None,
    };
    for (k, c) in symbol.iter() {
        if c == C::new(0.0, 0.0) {
            continue;
        }
        for (m, &v) in y.iter().enumerate() {
            let j = start + m as i64;
            let i = j + k;
            if i < out_lo {
                continue;
            }
            let f = match weight {
                Some(w) => (w.log_at(i).unwrap() - w.log_at(j).unwrap()).exp(),
                None => 1.0,
            };
            out[(i - out_lo) as usize] += c * f * v;
        }
    }
    match &space.family {
        Family::Lpw { p, .. } => {
            let ny = lp_of(*p, &y.iter().map(|c| c.norm()).collect::<Vec<_>>());
            let na = lp_of(*p, &out.iter().map(|c| c.norm()).collect::<Vec<_>>());
            Ok(na / ny)
        }
        _ => {
            let ny = norm(space, &SeqWindow::new(start, y))?;
            let na = norm(space, &SeqWindow::new(out_lo, out))?;
            Ok(na / ny)
        }
    }
}

/// Longest witness used for spaces that are not weighted `l^p`.
const GENERIC_WITNESS_MAX: usize = 512;

/// Best witness over blocks at the left end, centre and right end of the
/// admissible span. `None` when the span is empty.
pub(crate) fn witness_lower(symbol: &FiniteSymbol, space: &SpaceSpec, target_len: usize) -> Result<Option<Witness>> {
    if symbol.is_zero() {
        return Ok(None);
    }
    let Some((lo, hi)) = witness_span(symbol, space) else {
        return Ok(None);
    };
    let is_lpw = matches!(space.family, Family::Lpw { .. });
    let mut len = target_len.max(1).min((hi - lo + 1) as usize);
    if !is_lpw {
        len = len.min(GENERIC_WITNESS_MAX);
    }
    let l = len as i64;
    let centre = if space.half_line { lo } else { 0 };
    let mut starts = vec![lo, (centre - l / 2).clamp(lo, hi - l + 1), hi - l + 1];
    starts.dedup();
    let mut best: Option<Witness> = None;
    for s in starts {
        let rho = match &space.family {
            Family::Lpw { weight, .. } => match weight.annotation() {
                WeightAnnotation::Geometric { r0 } => r0,
                _ if l > 1 => ((weight.log_at(s + l - 1).unwrap() - weight.log_at(s).unwrap()) / (l - 1) as f64).exp(),
                _ => 1.0,
            },
            _ => 1.0,
        };
        let coeffs = scaled_coeffs(symbol, rho);
        if !coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            continue;
        }
        let theta = TrigPoly::new(&coeffs).certified_sup(1024, Stop::Relative(1e-10)).argmax;
        let ratio = witness_ratio(symbol, space, s, len, theta)?;
        if best.map(|b| ratio > b.ratio).unwrap_or(true) {
            best = Some(Witness { ratio, start: s, len, rho, theta });
        }
    }
    Ok(best)
}

/// Rigorous upper bound for the operator norm; `inf` when none is known.
///
/// Uses exact column/row formulas for `p = 1, inf`, the symbol sup on the
/// weight's circle for geometric `l^2` weights, and the triangle inequality
/// `sum |phi(n)| ||S^n||` otherwise.
pub(crate) fn operator_upper(symbol: &FiniteSymbol, space: &SpaceSpec) -> f64 {
    if symbol.is_zero() {
        return 0.0;
    }
    let triangle: f64 =
        symbol.iter().filter(|(_, c)| c.norm() > 0.0).map(|(n, c)| c.norm() * shift_norm_upper(space, n)).sum();
    let exact = match &space.family {
        Family::Lpw { p, weight } => {
            let (a, b) = space.window().unwrap();
            if *p == 1.0 {
                Some(weighted_line_sup(symbol, weight, a, b, true))
            } else if p.is_infinite() {
                Some(weighted_line_sup(symbol, weight, a, b, false))
            } else if *p == 2.0 {
                match weight.annotation() {
                    WeightAnnotation::Geometric { r0 } => {
                        let cs = scaled_coeffs(symbol, r0);
                        Some(TrigPoly::new(&cs).certified_sup(1024, Stop::Relative(1e-9)).hi)
                    }
                    _ => None,
                }
            } else {
                None
            }
        }
        Family::FourierSup if !space.half_line => {
            Some(TrigPoly::new(symbol.coeffs()).certified_sup(1024, Stop::Relative(1e-9)).hi)
        }
        _ => None,
    };
    exact.map(|e| e.min(triangle)).unwrap_or(triangle)
}

/// `sup_j sum_k |phi(k)| omega(j+k)/omega(j)` (columns) or
/// `sup_i sum_k |phi(k)| omega(i)/omega(i-k)` (rows) over `a..=b`.
fn weighted_line_sup(symbol: &FiniteSymbol, weight: &crate::spaces::Weight, a: i64, b: i64, columns: bool) -> f64 {
    (a..=b)
        .map(|j| {
            symbol
                .iter()
                .filter(|(_, c)| c.norm() > 0.0)
                .filter_map(|(k, c)| {
                    let (num, den) = if columns { (j + k, j) } else { (j, j - k) };
                    (num >= a && num <= b && den >= a && den <= b)
                        .then(|| c.norm() * (weight.log_at(num).unwrap() - weight.log_at(den).unwrap()).exp())
                })
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{make_weight, WeightKind};
    use approx::assert_relative_eq;

    fn l2(kind: WeightKind, window: usize) -> SpaceSpec {
        SpaceSpec::lpw(2.0, make_weight(kind, window).unwrap()).unwrap()
    }

    #[test]
    fn lanczos_matches_dense_svd_on_small_section() {
        let phi = FiniteSymbol::new(-1, vec![C::new(0.3, 0.1), C::new(1.0, 0.0), C::new(-0.4, 0.7)]);
        let s = FiniteSection::new(&phi, &l2(WeightKind::ExpAbs { alpha: 0.3 }, 20), -6, 6).unwrap();
        let svd = s.to_dense().singular_values().max();
        let lz = lanczos_l2_lower(&s, 120);
        assert!(lz <= svd * (1.0 + 1e-12));
        assert_relative_eq!(lz, svd, max_relative = 1e-10);
    }

    #[test]
    fn witness_approaches_symbol_sup() {
        let phi = FiniteSymbol::from_real(0, &[1.0, 1.0]);
        let w = witness_lower(&phi, &l2(WeightKind::Unit, 5000), 4096).unwrap().unwrap();
        assert!(w.ratio <= 2.0 && w.ratio > 2.0 * (1.0 - 1e-6));
    }

    #[test]
    fn witness_sees_both_boundary_circles() {
        let phi = FiniteSymbol::from_real(0, &[0.0, 1.0]);
        let w = witness_lower(&phi, &l2(WeightKind::ExpAbs { alpha: 0.5 }, 3000), 1024).unwrap().unwrap();
        assert_relative_eq!(w.ratio, 0.5f64.exp(), max_relative = 1e-12);
    }

    #[test]
    fn upper_bounds() {
        let phi = FiniteSymbol::from_real(0, &[1.0, 1.0]);
        let s1 = SpaceSpec::lpw(1.0, make_weight(WeightKind::Geometric { r0: 2.0 }, 16).unwrap()).unwrap();
        assert_relative_eq!(operator_upper(&phi, &s1), 3.0, max_relative = 1e-14);
        let s2 = l2(WeightKind::Unit, 16);
        let u = operator_upper(&phi, &s2);
        assert!((2.0..=2.0 + 1e-8).contains(&u));
        let e1 = FiniteSymbol::monomial(1);
        assert_eq!(operator_upper(&e1, &s2), 1.0);
    }

    #[test]
    fn boyd_on_nonnegative_matches_l2_svd() {
        let phi = FiniteSymbol::from_real(-1, &[0.5, 1.0, 0.25]);
        let s = FiniteSection::new(&phi, &l2(WeightKind::Unit, 8), -5, 5).unwrap();
        let (v, conv) = boyd_lp(&s, 2.0, 2000);
        assert!(conv);
        assert_relative_eq!(v, s.to_dense().singular_values().max(), max_relative = 1e-9);
    }
}
