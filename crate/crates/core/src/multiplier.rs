//! Convolution multipliers, Fejér smoothing, symbol suprema and the
//! certified check `|phi~(z)| <= ||M_phi||` on circles.

use crate::error::{Error, Result};
use crate::section::{operator_upper, scaled_coeffs, section_lower, witness_lower};
use crate::seq::{FiniteSymbol, SeqWindow};
use crate::shift_spectrum::{
    classify_boundedness, default_windows, spectrum_report, Annulus, Direction, EstimateMethod, NormEstimate,
    SpectrumParams,
};
use crate::spaces::SpaceSpec;
use crate::trig::{Stop, SupCertificate, TrigPoly};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use crate::section::{FiniteSection, Witness};

type C = Complex64;

/// `(phi * x)(n) = sum_k phi(k) x(n-k)`.
pub fn convolve(phi: &FiniteSymbol, x: &SeqWindow) -> SeqWindow {
    if phi.is_zero() || x.is_zero() {
        return SeqWindow::zero();
    }
    let (a, b) = (phi.coeffs(), x.coeffs());
    let mut out = vec![C::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &u) in a.iter().enumerate() {
        for (j, &v) in b.iter().enumerate() {
            out[i + j] += u * v;
        }
    }
    SeqWindow::new(phi.n_min() + x.offset(), out)
}

/// `1 - |n|/(k+1)` as an exact fraction `(numerator, denominator)`; zero
/// outside `[-k, k]`.
pub fn fejer_ratio(k: u64, n: i64) -> (u64, u64) {
    let m = n.unsigned_abs();
    if m > k {
        (0, k + 1)
    } else {
        (k + 1 - m, k + 1)
    }
}

/// `1 - |n|/(k+1)`, correctly rounded.
pub fn fejer_weight(k: u64, n: i64) -> f64 {
    let (num, den) = fejer_ratio(k, n);
    num as f64 / den as f64
}

/// Fejér coefficients on `n = -k..=k`.
pub fn fejer_coefficients(k: u64) -> Vec<f64> {
    let k_i = k as i64;
    (-k_i..=k_i).map(|n| fejer_weight(k, n)).collect()
}

/// Cesàro mean of the symmetric partial sums: `x` tapered by the Fejér
/// coefficients and restricted to `[-k, k]`.
pub fn cesaro_mean(x: &SeqWindow, k: u64) -> SeqWindow {
    let k_i = k as i64;
    x.restrict(-k_i, k_i).map_indexed(|n, c| c * fejer_weight(k, n))
}

/// `M_k = sum_{|n|<=k} (1 - |n|/(k+1)) phi(n) S^n`.
pub fn fejer_approximant(phi: &FiniteSymbol, k: u64) -> FiniteSymbol {
    cesaro_mean(phi.as_seq(), k).into()
}

/// `M(e_0)` restricted to `[-band, band]` for a black-box multiplier.
pub fn extract_multiplier_symbol<F: Fn(&SeqWindow) -> SeqWindow>(m: F, band: i64) -> FiniteSymbol {
    m(&SeqWindow::basis(0)).restrict(-band, band).into()
}

/// Matrix of `M_phi` on `span{e_{-N..N}}`.
///
/// Weighted `l^p` spaces use weighted coordinates (entries
/// `phi(i-j) omega(i)/omega(j)`); other spaces use the raw convolution
/// matrix and evaluate norms through the space.
pub fn multiplier_finite_section(phi: &FiniteSymbol, space: &SpaceSpec, n: usize) -> Result<FiniteSection> {
    if phi.bandwidth() > 2 * n as i64 {
        return Err(Error::BandwidthExceedsWindow { band: phi.bandwidth(), window: n });
    }
    let n = n as i64;
    FiniteSection::new(phi, space, -n, n)
}

/// Rigorous upper bound for `||M_phi||` (two-sided space) or `||T_phi||`
/// (half-line space); exact for `l^1_omega` and `l^inf_omega`, and for `l^2`
/// with a geometric weight. `inf` when no bound is known.
pub fn operator_norm_upper(phi: &FiniteSymbol, space: &SpaceSpec) -> f64 {
    operator_upper(phi, space)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum NormMethod {
    ExactL1,
    ExactLinf,
    SvdL2,
    BoydPower,
    SphereSearch { seed: u64 },
}

/// Starts used by [`NormMethod::SphereSearch`].
pub const SPHERE_STARTS: usize = 64;
const SPHERE_MAX_EVALS: usize = 10_000;

/// Norm of the finite section with the requested method.
pub fn operator_norm(section: &FiniteSection, method: NormMethod) -> Result<NormEstimate> {
    let size = section.size();
    let p = section.lp_exponent();
    let mismatch = |reason: &str| Error::MethodSpaceMismatch { method: format!("{method:?}"), reason: reason.into() };
    match method {
        NormMethod::ExactL1 | NormMethod::ExactLinf | NormMethod::SvdL2 => {
            let want = match method {
                NormMethod::ExactL1 => 1.0,
                NormMethod::ExactLinf => f64::INFINITY,
                _ => 2.0,
            };
            if p != Some(want) {
                return Err(mismatch(&format!("needs weighted l^{want}, got {:?}", p)));
            }
            let v = match method {
                NormMethod::SvdL2 => {
                    if size == 0 {
                        0.0
                    } else {
                        section.to_dense().singular_values().max()
                    }
                }
                _ => section_lower(section)?,
            };
            Ok(NormEstimate::exact(v, EstimateMethod::ExactFormula, size))
        }
        NormMethod::BoydPower => {
            let Some(p) = p.filter(|p| *p > 1.0 && p.is_finite()) else {
                return Err(mismatch("needs weighted l^p with 1 < p < inf"));
            };
            let (v, converged) = crate::section::boyd_lp(section, p, 10_000);
            if section.is_nonnegative() && converged {
                Ok(NormEstimate::exact(v, EstimateMethod::FiniteSection, size))
            } else {
                Ok(NormEstimate::lower_only(v, EstimateMethod::FiniteSection, size))
            }
        }
        NormMethod::SphereSearch { seed } => {
            let v = sphere_search(section, seed)?;
            Ok(NormEstimate::lower_only(v, EstimateMethod::FiniteSection, size))
        }
    }
}

/// Random starts followed by coordinate ascent over `+-1, +-i` steps.
fn sphere_search(section: &FiniteSection, seed: u64) -> Result<f64> {
    let n = section.size();
    if n == 0 {
        return Ok(0.0);
    }
    let per_start = (SPHERE_MAX_EVALS / SPHERE_STARTS).max(8 * n);
    let dirs = [C::new(1.0, 0.0), C::new(-1.0, 0.0), C::new(0.0, 1.0), C::new(0.0, -1.0)];
    let mut best = 0.0f64;
    for s in 0..SPHERE_STARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(s as u64));
        let mut v: Vec<C> = (0..n).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let mut cur = section.ratio(&v)?;
        let mut step = 0.5;
        let mut evals = 0;
        while evals < per_start && step > 1e-9 {
            let mut improved = false;
            for i in 0..n {
                for d in dirs {
                    let old = v[i];
                    v[i] = old + d * step;
                    let r = section.ratio(&v)?;
                    evals += 1;
                    if r > cur * (1.0 + 1e-12) {
                        cur = r;
                        improved = true;
                    } else {
                        v[i] = old;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best = best.max(cur);
    }
    Ok(best)
}

/// `sum phi(n) z^n` by Horner on the nonnegative and negative power blocks.
pub fn symbol_eval(phi: &FiniteSymbol, z: C) -> Result<C> {
    if phi.is_zero() {
        return Ok(C::new(0.0, 0.0));
    }
    let zero = z == C::new(0.0, 0.0);
    if zero && phi.n_min() < 0 {
        return Err(Error::ZeroWithNegativePowers);
    }
    let mut pos = C::new(0.0, 0.0);
    for n in (0..=phi.n_max().max(-1)).rev() {
        pos = pos * z + phi.get(n);
    }
    if zero {
        return Ok(pos);
    }
    let mut neg = C::new(0.0, 0.0);
    if phi.n_min() < 0 {
        let w = z.inv();
        for m in (1..=-phi.n_min()).rev() {
            neg = (neg + phi.get(-m)) * w;
        }
    }
    Ok(pos + neg)
}

/// Certified enclosure of `sup_{|z|=r} |phi~(z)|` with `hi - lo <= tol`.
pub fn symbol_sup_on_circle(phi: &FiniteSymbol, r: f64, tol: f64) -> Result<SupCertificate> {
    symbol_sup_with(phi, r, Stop::Absolute(tol))
}

pub(crate) fn symbol_sup_with(phi: &FiniteSymbol, r: f64, stop: Stop) -> Result<SupCertificate> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParams(format!("radius must be positive and finite, got {r}")));
    }
    match stop {
        Stop::Absolute(t) | Stop::Relative(t) if !(t > 0.0) => {
            return Err(Error::InvalidParams(format!("tolerance must be positive, got {t}")));
        }
        _ => {}
    }
    let cs = scaled_coeffs(phi, r);
    Ok(TrigPoly::new(&cs).certified_sup(1024, stop))
}

/// `(theta_j, phi~(r e^{i theta_j}))` on a uniform grid of `samples` points.
pub fn circle_samples(phi: &FiniteSymbol, r: f64, samples: usize) -> Result<Vec<(f64, C)>> {
    (0..samples)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / samples as f64;
            symbol_eval(phi, C::from_polar(r, t)).map(|v| (t, v))
        })
        .collect()
}

/// CSV rows `theta,re,im,abs` for [`circle_samples`].
pub fn samples_csv(rows: &[(f64, C)]) -> String {
    let mut s = String::from("theta,re,im,abs\n");
    for (t, v) in rows {
        s.push_str(&format!("{},{},{},{}\n", t, v.re, v.im, v.norm()));
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Confirmed,
    Inconclusive,
    ViolatedOutsideSpectrum,
    Error,
}

/// Outcome of the bound check on one circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub radius: f64,
    pub sup_lo: f64,
    pub sup_hi: f64,
    pub norm_lower: f64,
    #[serde(with = "crate::extreal")]
    pub norm_upper: f64,
    pub verdict: Verdict,
    /// Half-width `N` of the last section used.
    pub window: usize,
    /// Size of the uniform grid behind the symbol sup.
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Tuning for [`check_symbol_bound_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckParams {
    /// Initial section half-width.
    pub n: usize,
    /// Relative confirmation tolerance.
    pub tol: f64,
    /// Largest section half-width tried when doubling.
    pub max_n: usize,
    /// Witness length per unit of `n`.
    pub witness_factor: usize,
    pub spectrum: SpectrumParamsLite,
}

/// Copyable subset of [`SpectrumParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumParamsLite {
    pub max_power: usize,
    pub window: usize,
}

impl Default for SpectrumParamsLite {
    fn default() -> Self {
        let d = SpectrumParams::default();
        SpectrumParamsLite { max_power: d.max_power, window: d.window }
    }
}

impl From<SpectrumParamsLite> for SpectrumParams {
    fn from(p: SpectrumParamsLite) -> Self {
        SpectrumParams { max_power: p.max_power, window: p.window, windows: Vec::new() }
    }
}

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_N: usize = 1024;
pub const DEFAULT_WITNESS_FACTOR: usize = 64;

impl CheckParams {
    pub fn new(n: usize, tol: f64) -> Self {
        CheckParams {
            n,
            tol,
            max_n: DEFAULT_MAX_N.max(n),
            witness_factor: DEFAULT_WITNESS_FACTOR,
            spectrum: SpectrumParamsLite::default(),
        }
    }

    /// `n = 8 x bandwidth` (at least 1).
    pub fn for_symbol(phi: &FiniteSymbol) -> Self {
        Self::new((8 * phi.bandwidth().max(1)) as usize, DEFAULT_TOL)
    }
}

/// Compatibility of a symbol with one-sided shift boundedness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnesidednessDiagnostic {
    pub compatible: bool,
    /// Indices carrying nonzero coefficients on the forbidden side.
    pub forbidden: Vec<i64>,
    pub message: String,
}

/// Full result of a bound check.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub annulus: Annulus,
    pub onesided: OnesidednessDiagnostic,
    pub reports: Vec<BoundReport>,
}

/// Forbidden-side test given the boundedness of `S` and `S^{-1}`.
pub(crate) fn onesided_from(
    forward_unbounded: bool,
    backward_unbounded: bool,
    phi: &FiniteSymbol,
) -> OnesidednessDiagnostic {
    let (forbidden, side): (Vec<i64>, &str) = match (forward_unbounded, backward_unbounded) {
        (false, true) => (phi.iter().filter(|(n, c)| *n < 0 && c.norm() > 0.0).map(|(n, _)| n).collect(), "n < 0"),
        (true, false) => (phi.iter().filter(|(n, c)| *n > 0 && c.norm() > 0.0).map(|(n, _)| n).collect(), "n > 0"),
        _ => {
            return OnesidednessDiagnostic {
                compatible: true,
                forbidden: vec![],
                message: "no one-sided constraint".into(),
            }
        }
    };
    let compatible = forbidden.is_empty();
    let message = if compatible {
        format!("coefficients vanish for {side} as required")
    } else {
        format!("incompatible: coefficients at {forbidden:?} are forbidden ({side} must vanish)")
    };
    OnesidednessDiagnostic { compatible, forbidden, message }
}

/// Whether `phi` can be the symbol of a bounded multiplier given which
/// shift directions are bounded on `space`.
pub fn onesidedness_check(space: &SpaceSpec, phi: &FiniteSymbol) -> OnesidednessDiagnostic {
    let windows = default_windows(space, SpectrumParams::default().window);
    let f = classify_boundedness(space, Direction::Forward, &windows);
    let b = classify_boundedness(space, Direction::Backward, &windows);
    onesided_from(f.is_unbounded(), b.is_unbounded(), phi)
}

/// Builds the section of half-width (or size) `n`.
pub(crate) type SectionFn<'a> = dyn Fn(usize) -> Result<FiniteSection> + 'a;

/// Shared per-radius loop of the multiplier and Toeplitz checkers.
pub(crate) fn run_bound_reports(
    phi: &FiniteSymbol,
    space: &SpaceSpec,
    radii: &[f64],
    annulus: &Annulus,
    params: &CheckParams,
    section: &SectionFn<'_>,
) -> Result<Vec<BoundReport>> {
    if !(params.tol > 0.0) {
        return Err(Error::InvalidParams(format!("tolerance must be positive, got {}", params.tol)));
    }
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(Error::InvalidParams(format!("radius must be positive and finite, got {r}")));
    }
    let upper = operator_upper(phi, space);
    let mut lowers: Vec<(usize, std::result::Result<f64, String>)> = Vec::new();
    let mut lower_at = |n: usize| -> std::result::Result<f64, String> {
        if let Some((_, v)) = lowers.iter().find(|(m, _)| *m == n) {
            return v.clone();
        }
        let v = (|| -> Result<f64> {
            let s = section(n)?;
            let mut best = section_lower(&s)?;
            if let Some(w) = witness_lower(phi, space, n.saturating_mul(params.witness_factor))? {
                best = best.max(w.ratio);
            }
            Ok(best.min(upper))
        })()
        .map_err(|e| e.to_string());
        lowers.push((n, v.clone()));
        v
    };
    let sup_stop = Stop::Relative(0.1 * params.tol);
    let mut reports = Vec::with_capacity(radii.len());
    for &r in radii {
        let cert = symbol_sup_with(phi, r, sup_stop)?;
        let inside = annulus.contains_radius(r);
        let mut n = params.n;
        let report = loop {
            let base = BoundReport {
                radius: r,
                sup_lo: cert.lo,
                sup_hi: cert.hi,
                norm_lower: 0.0,
                norm_upper: upper,
                verdict: Verdict::Inconclusive,
                window: n,
                samples: cert.samples,
                note: None,
            };
            let lower = match lower_at(n) {
                Ok(v) => v,
                Err(e) => break BoundReport { verdict: Verdict::Error, note: Some(e), ..base },
            };
            let base = BoundReport { norm_lower: lower, ..base };
            if cert.hi <= lower * (1.0 + params.tol) {
                break BoundReport { verdict: Verdict::Confirmed, ..base };
            }
            if !inside {
                if cert.lo > upper {
                    break BoundReport {
                        verdict: Verdict::ViolatedOutsideSpectrum,
                        note: Some(format!("radius outside [{}, {}]", annulus.r_in, annulus.r_out)),
                        ..base
                    };
                }
                break BoundReport { note: Some("radius outside the spectrum".into()), ..base };
            }
            if cert.lo > upper * (1.0 + 1e-12) {
                break BoundReport {
                    verdict: Verdict::Error,
                    note: Some("symbol sup exceeds the rigorous norm upper bound inside the spectrum".into()),
                    ..base
                };
            }
            if n >= params.max_n {
                break BoundReport {
                    note: Some(format!("gap {:.3e} at N={n}; raise N", cert.hi / lower - 1.0)),
                    ..base
                };
            }
            n = (2 * n).min(params.max_n);
        };
        reports.push(report);
    }
    Ok(reports)
}

/// Check `sup_{|z|=r} |phi~(z)| <= ||M_phi||` on each circle.
pub fn check_symbol_bound_with(
    phi: &FiniteSymbol,
    space: &SpaceSpec,
    radii: &[f64],
    params: &CheckParams,
) -> Result<BoundCheck> {
    if space.half_line {
        return Err(Error::InvalidSpaceParams("multipliers act on two-sided spaces".into()));
    }
    if phi.bandwidth() > params.n as i64 {
        return Err(Error::BandwidthExceedsWindow { band: phi.bandwidth(), window: params.n });
    }
    let spectrum = spectrum_report(space, &params.spectrum.into())?;
    let onesided = onesided_from(spectrum.forward.is_unbounded(), spectrum.backward.is_unbounded(), phi);
    let section = |n: usize| -> Result<FiniteSection> {
        let (a, b) = space.window().unwrap_or((i64::MIN, i64::MAX));
        let half = (n as i64).min(-a).min(b).max(0);
        FiniteSection::new(phi, space, -half, half)
    };
    let reports = run_bound_reports(phi, space, radii, &spectrum.annulus, params, &section)?;
    Ok(BoundCheck { annulus: spectrum.annulus, onesided, reports })
}

/// [`check_symbol_bound_with`] with section half-width `n` and tolerance `tol`.
pub fn check_symbol_bound(
    phi: &FiniteSymbol,
    space: &SpaceSpec,
    radii: &[f64],
    n: usize,
    tol: f64,
) -> Result<Vec<BoundReport>> {
    check_symbol_bound_with(phi, space, radii, &CheckParams::new(n, tol)).map(|c| c.reports)
}
