//! Certified suprema of Laurent polynomials on circles.
//!
//! For `f(theta) = sum_k c_k e^{i(n0 + k) theta}` the modulus `|f|` is
//! sampled on a uniform grid and the gap to the true supremum is bounded in
//! two rigorous ways, keeping the tighter one:
//!
//! * Lipschitz: `|f|' <= L = sum |k - m| |c_k|` after centering at `m`, so
//!   `sup <= grid_max + L * step / 2`;
//! * Szegő: for a real trigonometric polynomial `T` of degree `D`,
//!   `T'^2 + D^2 T^2 <= D^2 ||T||^2`, which gives `T(theta* + h) >= ||T|| cos(D h)`
//!   and hence `sup <= grid_max / cos(D * step / 2)`.
//!
//! The lower end is the grid maximum polished by golden-section search, which
//! is still an evaluation and therefore a valid lower bound. Refinement
//! bisects only the cells that may still hold the maximizer, so the cost
//! grows with the number of near-maximal peaks and not with the grid size.

use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

/// When to stop refining the sampling grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    /// `hi - lo <= tol`.
    Absolute(f64),
    /// `hi - lo <= tol * lo`.
    Relative(f64),
}

/// Enclosure `[lo, hi]` of `sup_theta |f(theta)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupCertificate {
    pub lo: f64,
    pub hi: f64,
    /// Angle at which `lo` is attained.
    pub argmax: f64,
    /// Size of the initial uniform grid.
    pub samples: usize,
}

/// Evaluation budget before giving up on the requested tolerance.
pub const MAX_SAMPLES: usize = 1 << 24;

/// Coefficients `c_k`, `k = 0..=d`, of a polynomial in `w = e^{i theta}`.
/// The overall factor `e^{i n0 theta}` does not affect `|f|` and is dropped.
#[derive(Debug, Clone)]
pub struct TrigPoly<'a> {
    coeffs: &'a [Complex64],
}

impl<'a> TrigPoly<'a> {
    pub fn new(coeffs: &'a [Complex64]) -> Self {
        TrigPoly { coeffs }
    }

    fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Horner evaluation at `w = e^{i theta}`.
    pub fn eval(&self, theta: f64) -> Complex64 {
        let w = Complex64::from_polar(1.0, theta);
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c)
    }

    /// `|f|` on the grid `theta_j = 2 pi j / samples`.
    pub fn grid_abs(&self, samples: usize) -> Vec<f64> {
        let step = 2.0 * PI / samples as f64;
        (0..samples).map(|j| self.eval(j as f64 * step).norm()).collect()
    }

    fn centered_degree(&self) -> usize {
        self.degree().div_ceil(2)
    }

    fn lipschitz(&self) -> f64 {
        let m = (self.degree() / 2) as f64;
        self.coeffs.iter().enumerate().map(|(k, c)| (k as f64 - m).abs() * c.norm()).sum()
    }

    fn polish(&self, center: f64, half_width: f64) -> (f64, f64) {
        let g = |t: f64| self.eval(t).norm_sqr();
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (center - half_width, center + half_width);
        let mut x1 = b - inv_phi * (b - a);
        let mut x2 = a + inv_phi * (b - a);
        let (mut f1, mut f2) = (g(x1), g(x2));
        for _ in 0..80 {
            if f1 < f2 {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = g(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = g(x1);
            }
        }
        let (t, v) = if f1 > f2 { (x1, f1) } else { (x2, f2) };
        let vc = g(center);
        if vc >= v {
            (center, vc.sqrt())
        } else {
            (t, v.sqrt())
        }
    }

    /// Certified enclosure on a fixed grid of `samples` points.
    pub fn sup_on_grid(&self, samples: usize) -> SupCertificate {
        let samples = samples.max(4);
        if self.coeffs.iter().all(|c| c.norm() == 0.0) {
            return SupCertificate { lo: 0.0, hi: 0.0, argmax: 0.0, samples };
        }
        let step = 2.0 * PI / samples as f64;
        let vals = self.grid_abs(samples);
        let (jmax, gmax) =
            vals.iter().copied().enumerate().fold((0, f64::MIN), |acc, (j, v)| if v > acc.1 { (j, v) } else { acc });

        let d = self.centered_degree() as f64;
        let lip = self.lipschitz();
        let half = step / 2.0;
        let hi_lip = gmax + lip * half;
        let hi_cos = if d * half < PI / 2.0 { gmax / (d * half).cos() } else { f64::INFINITY };
        let abs_sum: f64 = self.coeffs.iter().map(|c| c.norm()).sum();
        let slack = 8.0 * f64::EPSILON * (self.coeffs.len() as f64 + 2.0) * abs_sum;
        let hi = hi_lip.min(hi_cos) + slack;

        // The maximizer sits within half a step of a grid point whose value
        // is at least this threshold.
        let mut threshold = gmax - lip * half;
        if d * half < PI / 2.0 {
            threshold = threshold.max(gmax * (d * half).cos());
        }
        let mut candidates: Vec<usize> = (0..samples)
            .filter(|&j| {
                let v = vals[j];
                v >= threshold && v >= vals[(j + samples - 1) % samples] && v >= vals[(j + 1) % samples]
            })
            .collect();
        candidates.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
        candidates.truncate(16);
        if candidates.is_empty() {
            candidates.push(jmax);
        }

        let (mut argmax, mut lo) = (jmax as f64 * step, gmax);
        for j in candidates {
            let (t, v) = self.polish(j as f64 * step, step);
            if v > lo {
                lo = v;
                argmax = t;
            }
        }
        SupCertificate { lo, hi: hi.max(lo), argmax: argmax.rem_euclid(2.0 * PI), samples }
    }

    /// Upper bound of `|f|` on a cell of half-width `half` around a point
    /// with value `v`, valid whenever the global maximizer lies in the cell.
    fn cell_bound(&self, v: f64, half: f64, lip: f64, d: f64, slack: f64) -> f64 {
        let by_lip = v + lip * half;
        let by_cos = if d * half < PI / 2.0 { v / (d * half).cos() } else { f64::INFINITY };
        by_lip.min(by_cos) + slack
    }

    /// Branch and bound from a uniform grid of `start` cells until `stop` is
    /// met.
    ///
    /// Every cell carries a bound that holds if the maximizer lies in it, so
    /// the largest live bound encloses the supremum. Cells whose bound falls
    /// below the best value seen are discarded; the rest are bisected.
    pub fn certified_sup(&self, start: usize, stop: Stop) -> SupCertificate {
        let samples = start.max(4).next_power_of_two();
        if self.coeffs.iter().all(|c| c.norm() == 0.0) {
            return SupCertificate { lo: 0.0, hi: 0.0, argmax: 0.0, samples };
        }
        let d = self.centered_degree() as f64;
        let lip = self.lipschitz();
        let abs_sum: f64 = self.coeffs.iter().map(|c| c.norm()).sum();
        let slack = 8.0 * f64::EPSILON * (self.coeffs.len() as f64 + 2.0) * abs_sum;
        let step = 2.0 * PI / samples as f64;

        let seed = self.sup_on_grid(samples);
        let (mut lo, mut argmax) = (seed.lo, seed.argmax);
        let mut heap = BinaryHeap::with_capacity(2 * samples);
        for (j, v) in self.grid_abs(samples).into_iter().enumerate() {
            let half = step / 2.0;
            let u = self.cell_bound(v, half, lip, d, slack);
            if u >= lo {
                heap.push(Cell { u, center: j as f64 * step, half });
            }
        }
        let done = |hi: f64, lo: f64| match stop {
            Stop::Absolute(tol) => hi - lo <= tol,
            Stop::Relative(tol) => hi - lo <= tol * lo,
        };
        let mut evals = samples;
        let hi = loop {
            let Some(top) = heap.pop() else {
                break lo + slack;
            };
            if done(top.u, lo) || evals >= MAX_SAMPLES || top.half < f64::EPSILON {
                break top.u;
            }
            let half = top.half / 2.0;
            for center in [top.center - half, top.center + half] {
                let v = self.eval(center).norm();
                evals += 1;
                if v > lo {
                    lo = v;
                    argmax = center;
                }
                let u = self.cell_bound(v, half, lip, d, slack);
                if u >= lo {
                    heap.push(Cell { u, center, half });
                }
            }
        };
        SupCertificate { lo, hi: hi.max(lo), argmax: argmax.rem_euclid(2.0 * PI), samples }
    }
}

/// Branch-and-bound cell ordered by its upper bound.
struct Cell {
    u: f64,
    center: f64,
    half: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.u.total_cmp(&other.u).is_eq()
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.u.total_cmp(&other.u)
    }
}
