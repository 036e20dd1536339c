//! Brute-force reference implementations for cross-checking the main
//! modules. Nothing here calls into the code paths it is meant to check.

use crate::error::{Error, Result};
use crate::seq::{FiniteSymbol, SeqWindow};
use crate::shift_spectrum::{EstimateMethod, NormEstimate};
use crate::spaces::Weight;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex64;

/// Largest dimension accepted by [`naive_operator_norm`].
pub const ORACLE_MAX_DIM: usize = 12;
const ASCENT_MAX_SWEEPS: usize = 10_000;
const EXACT_AGREEMENT: f64 = 1e-8;

/// `(phi * x)(n)` by gathering `phi(k) x(n-k)` over every index pair.
pub fn naive_convolve(phi: &FiniteSymbol, x: &SeqWindow) -> SeqWindow {
    let (Some((xa, xb)), false) = (x.support(), phi.is_zero()) else {
        return SeqWindow::zero();
    };
    let (pa, pb) = (phi.n_min(), phi.n_max());
    let mut out = Vec::new();
    for n in (pa + xa)..=(pb + xb) {
        let mut acc = C::new(0.0, 0.0);
        for k in pa..=pb {
            let m = n - k;
            if m >= xa && m <= xb {
                acc += phi.get(k) * x.get(m);
            }
        }
        out.push(acc);
    }
    SeqWindow::new(pa + xa, out)
}

/// `P^+(phi * u)` by direct summation over output indices `n >= 0`.
pub fn naive_toeplitz_apply(phi: &FiniteSymbol, u: &SeqWindow) -> SeqWindow {
    let Some((_, ub)) = u.support() else {
        return SeqWindow::zero();
    };
    if phi.is_zero() {
        return SeqWindow::zero();
    }
    let top = ub + phi.n_max();
    if top < 0 {
        return SeqWindow::zero();
    }
    let out: Vec<C> = (0..=top).map(|n| (0..=ub).map(|j| phi.get(n - j) * u.get(j)).sum()).collect();
    SeqWindow::new(0, out)
}

fn pnorm(p: f64, v: &[C]) -> f64 {
    if p.is_infinite() {
        v.iter().map(|c| c.norm()).fold(0.0, f64::max)
    } else {
        v.iter().map(|c| c.norm().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

fn matvec(a: &DMatrix<C>, v: &[C]) -> Vec<C> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)] * v[j]).sum()).collect()
}

fn ratio(a: &DMatrix<C>, p: f64, v: &[C]) -> f64 {
    let d = pnorm(p, v);
    if d == 0.0 {
        0.0
    } else {
        pnorm(p, &matvec(a, v)) / d
    }
}

fn ascend(a: &DMatrix<C>, p: f64, mut v: Vec<C>) -> f64 {
    let dirs = [C::new(1.0, 0.0), C::new(-1.0, 0.0), C::new(0.0, 1.0), C::new(0.0, -1.0)];
    let scale = pnorm(p, &v).max(1e-300);
    for c in v.iter_mut() {
        *c /= scale;
    }
    let mut cur = ratio(a, p, &v);
    let mut step = 0.25;
    for _ in 0..ASCENT_MAX_SWEEPS {
        let before = cur;
        for i in 0..v.len() {
            for d in dirs {
                let old = v[i];
                v[i] = old + d * step;
                let r = ratio(a, p, &v);
                if r > cur {
                    cur = r;
                } else {
                    v[i] = old;
                }
            }
        }
        if cur - before <= 1e-9 * cur.max(1e-300) {
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
    }
    cur
}

/// Largest eigenvalue of a real symmetric matrix by cyclic Jacobi rotations.
fn jacobi_max_eigenvalue(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in m.iter_mut() {
                    let (mkp, mkq) = (row[p], row[q]);
                    row[p] = c * mkp - s * mkq;
                    row[q] = s * mkp + c * mkq;
                }
                let (head, tail) = m.split_at_mut(q);
                for (mpk, mqk) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                    let (a, b) = (*mpk, *mqk);
                    *mpk = c * a - s * b;
                    *mqk = s * a + c * b;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).fold(f64::NEG_INFINITY, f64::max)
}

/// Exact `||A||_p` for `p in {1, 2, inf}`.
fn exact_norm(a: &DMatrix<C>, p: f64) -> Option<f64> {
    let (r, c) = (a.nrows(), a.ncols());
    if p == 1.0 {
        Some((0..c).map(|j| (0..r).map(|i| a[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max))
    } else if p.is_infinite() {
        Some((0..r).map(|i| (0..c).map(|j| a[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max))
    } else if p == 2.0 {
        // A^H A = X + iY is Hermitian; [[X, -Y], [Y, X]] has the same spectrum.
        let mut x = vec![vec![0.0; c]; c];
        let mut y = vec![vec![0.0; c]; c];
        for i in 0..c {
            for j in 0..c {
                let g: C = (0..r).map(|k| a[(k, i)].conj() * a[(k, j)]).sum();
                x[i][j] = g.re;
                y[i][j] = g.im;
            }
        }
        let mut m = vec![vec![0.0; 2 * c]; 2 * c];
        for i in 0..c {
            for j in 0..c {
                m[i][j] = x[i][j];
                m[i + c][j + c] = x[i][j];
                m[i][j + c] = -y[i][j];
                m[i + c][j] = y[i][j];
            }
        }
        Some(jacobi_max_eigenvalue(m).max(0.0).sqrt())
    } else {
        None
    }
}

/// Sphere-search lower bound for `||A||_p` on dense matrices up to 12x12.
///
/// Starts: `samples` random vectors (seeds `seed + i`), the basis vectors,
/// and for `p = inf` the conjugate-phase vector of each row. For
/// `p in {1, 2, inf}` the exact value is also computed and reported as the
/// upper bound when the search agrees with it to `1e-8`.
pub fn naive_operator_norm(a: &DMatrix<C>, p: f64, samples: usize, seed: u64) -> Result<NormEstimate> {
    let (r, c) = (a.nrows(), a.ncols());
    if r > ORACLE_MAX_DIM || c > ORACLE_MAX_DIM {
        return Err(Error::MatrixTooLargeForOracle { rows: r, cols: c });
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidParams(format!("p must be in [1, inf], got {p}")));
    }
    if c == 0 {
        return Ok(NormEstimate::exact(0.0, EstimateMethod::Oracle, 0));
    }
    let mut starts: Vec<Vec<C>> = Vec::new();
    for s in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(s as u64));
        starts.push((0..c).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect());
    }
    for j in 0..c {
        let mut e = vec![C::new(0.0, 0.0); c];
        e[j] = C::new(1.0, 0.0);
        starts.push(e);
    }
    if p.is_infinite() {
        for i in 0..r {
            starts.push(
                (0..c)
                    .map(|j| {
                        let v = a[(i, j)];
                        if v.norm() == 0.0 {
                            C::new(1.0, 0.0)
                        } else {
                            v.conj() / v.norm()
                        }
                    })
                    .collect(),
            );
        }
    }
    let lower = starts.into_iter().map(|v| ascend(a, p, v)).fold(0.0, f64::max);
    let upper = match exact_norm(a, p) {
        Some(e) if (e - lower).abs() <= EXACT_AGREEMENT * e.max(1.0) => e.max(lower),
        _ => f64::INFINITY,
    };
    Ok(NormEstimate { lower, upper, method: EstimateMethod::Oracle, window: c })
}

/// `max_k omega(k+n)/omega(k)` over `k, k+n in [-window, window]`, from raw
/// weight values. `None` when no admissible `k` exists.
pub fn windowed_ratio_sup(w: &Weight, n: i64, window: usize) -> Option<f64> {
    windowed_ratio_sup_on(w, n, -(window as i64), window as i64)
}

/// As [`windowed_ratio_sup`] on `[0, window]`.
pub fn windowed_ratio_sup_half_line(w: &Weight, n: i64, window: usize) -> Option<f64> {
    windowed_ratio_sup_on(w, n, 0, window as i64)
}

fn windowed_ratio_sup_on(w: &Weight, n: i64, lo: i64, hi: i64) -> Option<f64> {
    let mut best: Option<f64> = None;
    for k in lo..=hi {
        let m = k + n;
        if m < lo || m > hi || !w.contains(k) || !w.contains(m) {
            continue;
        }
        let v = w.value(m) / w.value(k);
        best = Some(best.map_or(v, |b| b.max(v)));
    }
    best
}

/// `max_j |sum_n phi(n) r^n e^{i n theta_j}|` on a uniform grid, with every
/// term computed from its own power.
pub fn naive_sup_scan(phi: &FiniteSymbol, r: f64, samples: usize) -> f64 {
    let terms: Vec<(i64, C)> = phi.iter().collect();
    (0..samples)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / samples as f64;
            terms.iter().map(|(n, c)| c * C::from_polar(r.powf(*n as f64), *n as f64 * t)).sum::<C>().norm()
        })
        .fold(0.0, f64::max)
}
