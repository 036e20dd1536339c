//! Shift operators, their norms and spectral radii, and the annulus spectrum.
//!
//! On two-sided spaces `S x = (x(n-1))`. On half-line spaces the forward
//! shift `S_1` pads a zero at index 0 and `S_{-1}` drops index 0. Powers are
//! encoded by a signed exponent: `n > 0` is the forward shift, `n < 0` the
//! backward one.

use crate::error::{Error, Result};
use crate::seq::SeqWindow;
use crate::spaces::{norm, Family, FunctionDescriptor, SpaceSpec, WeightAnnotation};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    ExactFormula,
    FiniteSection,
    Fekete,
    Oracle,
}

/// Interval enclosing (or estimating) an operator norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub lower: f64,
    #[serde(with = "crate::extreal")]
    pub upper: f64,
    pub method: EstimateMethod,
    pub window: usize,
}

impl NormEstimate {
    pub fn exact(value: f64, method: EstimateMethod, window: usize) -> Self {
        NormEstimate { lower: value, upper: value, method, window }
    }

    pub fn lower_only(lower: f64, method: EstimateMethod, window: usize) -> Self {
        NormEstimate { lower, upper: f64::INFINITY, method, window }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    /// Best point value: the upper end when finite, else the lower end.
    pub fn point(&self) -> f64 {
        if self.upper.is_finite() {
            self.upper
        } else {
            self.lower
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    fn sign(self) -> i64 {
        match self {
            Direction::Forward => 1,
            Direction::Backward => -1,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        }
    }
}

/// `{ r_in <= |z| <= r_out }`, with `r_out = inf` allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    pub r_in: f64,
    #[serde(with = "crate::extreal")]
    pub r_out: f64,
    pub exact: bool,
}

impl Annulus {
    /// Membership with a relative slack of `1e-12` at both boundaries.
    pub fn contains_radius(&self, r: f64) -> bool {
        let slack = 1e-12;
        r >= self.r_in * (1.0 - slack) && r <= self.r_out * (1.0 + slack)
    }

    pub fn is_circle(&self) -> bool {
        self.r_out.is_finite() && (self.r_out - self.r_in).abs() <= 1e-12 * self.r_out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Boundedness {
    Bounded { norm: NormEstimate },
    Unbounded,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundednessVerdict {
    #[serde(flatten)]
    pub status: Boundedness,
    pub evidence: String,
    /// Set when the verdict comes from a closed-form weight annotation.
    pub from_annotation: bool,
}

impl BoundednessVerdict {
    pub fn is_unbounded(&self) -> bool {
        matches!(self.status, Boundedness::Unbounded)
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.status, Boundedness::Bounded { .. })
    }
}

/// `S^n x` on `Z`, or the half-line shifts `S_1^n` / `S_{-1}^{|n|}`.
pub fn shift_apply(x: &SeqWindow, n: i64, half_line: bool) -> SeqWindow {
    let shifted = SeqWindow::new(x.offset() + n, x.coeffs().to_vec());
    if half_line {
        shifted.restrict(0, i64::MAX)
    } else {
        shifted
    }
}

/// Index range `[lo, hi]` scanned for a window parameter `w`.
fn scan_range(space: &SpaceSpec, window: usize) -> (i64, i64) {
    let w = window as i64;
    let (mut lo, mut hi) = if space.half_line { (0, w) } else { (-w, w) };
    if let Some((a, b)) = space.window() {
        lo = lo.max(a);
        hi = hi.min(b);
    }
    (lo, hi)
}

/// `sup_k omega(k+n)/omega(k)` over the scan range, in log form.
fn log_ratio_sup(space: &SpaceSpec, n: i64, window: usize) -> Option<f64> {
    let weight = space.weight()?;
    let (lo, hi) = scan_range(space, window);
    let (a, b) = (lo.max(lo - n), hi.min(hi - n));
    (a..=b).map(|k| weight.log_at(k + n).unwrap() - weight.log_at(k).unwrap()).reduce(f64::max)
}

/// Closed-form `||S^n||` where one exists, as `(lower, upper)`.
fn closed_form_shift_norm(space: &SpaceSpec, n: i64, window: usize) -> Option<(f64, f64)> {
    match &space.family {
        Family::Lpw { .. } => {
            let v = log_ratio_sup(space, n, window)?.exp();
            Some((v, v))
        }
        Family::Orlicz { k: FunctionDescriptor::Power { p }, .. } => {
            let v = (log_ratio_sup(space, n, window)? / p).exp();
            Some((v, v))
        }
        Family::VarExp { q } if q.is_constant() => Some((1.0, 1.0)),
        Family::FourierSup if !space.half_line => Some((1.0, 1.0)),
        _ => None,
    }
}

/// Test vectors for the compressed shift: unit vectors and dyadic blocks.
/// The family for a window is a subset of the family for any larger window.
fn section_test_vectors(lo: i64, hi: i64) -> impl Iterator<Item = SeqWindow> {
    (lo..=hi).flat_map(move |a| {
        let mut lens = vec![1usize];
        let mut l = 2usize;
        while a + l as i64 - 1 <= hi {
            lens.push(l);
            l *= 2;
        }
        lens.into_iter().map(move |l| SeqWindow::from_real(a, &vec![1.0; l]))
    })
}

fn finite_section_shift_lower(space: &SpaceSpec, n: i64, window: usize) -> Result<f64> {
    let (lo, hi) = scan_range(space, window);
    let mut best = 0.0f64;
    for x in section_test_vectors(lo, hi) {
        let y = shift_apply(&x, n, space.half_line).restrict(lo, hi);
        let nx = norm(space, &x)?;
        if nx > 0.0 {
            best = best.max(norm(space, &y)? / nx);
        }
    }
    Ok(best)
}

/// `||S^n||` on `space`, scanning indices within `window`.
///
/// Weighted `l^p` (and Orlicz `x^p`) spaces use the exact diagonal formula
/// `sup_k omega(k+n)/omega(k)`; other spaces get a finite-section lower
/// bound, with an upper bound only where one is known.
pub fn shift_power_norm(space: &SpaceSpec, n: i64, window: usize) -> Result<NormEstimate> {
    if n == 0 {
        return Ok(NormEstimate::exact(1.0, EstimateMethod::ExactFormula, window));
    }
    if n.unsigned_abs() as usize >= window {
        return Err(Error::WindowTooSmall { power: n, window });
    }
    if let Some((lower, upper)) = closed_form_shift_norm(space, n, window) {
        return Ok(NormEstimate { lower, upper, method: EstimateMethod::ExactFormula, window });
    }
    if let Family::Intersection { members } = &space.family {
        let mut lower = finite_section_shift_lower(space, n, window)?;
        let mut upper = 0.0f64;
        for m in members {
            let e = shift_power_norm(m, n, window)?;
            upper = upper.max(e.upper);
            lower = lower.min(upper);
        }
        return Ok(NormEstimate { lower, upper, method: EstimateMethod::FiniteSection, window });
    }
    let lower = finite_section_shift_lower(space, n, window)?;
    Ok(NormEstimate::lower_only(lower, EstimateMethod::FiniteSection, window))
}

/// Rigorous upper bound for `||S^n||` without scanning; `inf` when unknown.
pub(crate) fn shift_norm_upper(space: &SpaceSpec, n: i64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let window = match space.window() {
        Some((a, b)) => (b.saturating_sub(a)).max(1) as usize,
        None => 1 << 20,
    };
    if n.unsigned_abs() as usize >= window {
        return f64::INFINITY;
    }
    if let Some((_, hi)) = closed_form_shift_norm(space, n, window) {
        return hi;
    }
    match &space.family {
        Family::Intersection { members } => members.iter().map(|m| shift_norm_upper(m, n)).fold(0.0, f64::max),
        _ => f64::INFINITY,
    }
}

fn annotation_of(space: &SpaceSpec) -> Option<WeightAnnotation> {
    match &space.family {
        Family::Lpw { weight, .. } | Family::Orlicz { k: FunctionDescriptor::Power { .. }, weight } => {
            Some(weight.annotation())
        }
        _ => None,
    }
}

fn orlicz_exponent(space: &SpaceSpec) -> f64 {
    match &space.family {
        Family::Orlicz { k: FunctionDescriptor::Power { p }, .. } => *p,
        _ => 1.0,
    }
}

/// Decide whether the shift in `direction` is bounded.
///
/// Closed-form weights are classified exactly. Otherwise the windowed
/// `||S||` is compared across the given (increasing) windows: stable to
/// `1e-6` means bounded, monotone growth by at least `2x` means unbounded.
pub fn classify_boundedness(space: &SpaceSpec, direction: Direction, windows: &[usize]) -> BoundednessVerdict {
    let dir = direction.label();
    let big = windows.iter().copied().max().unwrap_or(1).max(2);
    match annotation_of(space) {
        Some(WeightAnnotation::Remark1) => {
            return BoundednessVerdict {
                status: Boundedness::Unbounded,
                evidence: format!(
                    "remark1 weight: ratios omega(2k+1)/omega(2k) = |k|+1 diverge, {dir} shift unbounded"
                ),
                from_annotation: true,
            };
        }
        Some(WeightAnnotation::Table) | None => {}
        Some(a) => {
            if let Ok(est) = shift_power_norm(space, direction.sign(), big) {
                let norm = match a {
                    WeightAnnotation::Geometric { r0 } => {
                        let v = if direction == Direction::Forward { r0 } else { 1.0 / r0 };
                        v.powf(1.0 / orlicz_exponent(space))
                    }
                    _ => est.lower,
                };
                return BoundednessVerdict {
                    status: Boundedness::Bounded { norm: NormEstimate::exact(norm, EstimateMethod::ExactFormula, big) },
                    evidence: format!("{a:?} weight: closed-form {dir} shift norm {norm}"),
                    from_annotation: true,
                };
            }
        }
    }
    if let Some((lo, hi)) = closed_form_shift_norm(space, direction.sign(), big) {
        if annotation_of(space).is_none() {
            return BoundednessVerdict {
                status: Boundedness::Bounded {
                    norm: NormEstimate { lower: lo, upper: hi, method: EstimateMethod::ExactFormula, window: big },
                },
                evidence: format!("{dir} shift is an isometry-type operator on this space"),
                from_annotation: true,
            };
        }
    }

    // Distinct effective windows after clipping to the space window.
    let mut effective: Vec<(usize, (i64, i64))> = Vec::new();
    for &w in windows {
        if w < 2 {
            continue;
        }
        let r = scan_range(space, w);
        if effective.last().map(|(_, prev)| *prev != r).unwrap_or(true) {
            effective.push((w, r));
        }
    }
    if effective.len() < 3 {
        return BoundednessVerdict {
            status: Boundedness::Inconclusive,
            evidence: format!("need at least 3 distinct windows, got {}", effective.len()),
            from_annotation: false,
        };
    }
    let mut values = Vec::with_capacity(effective.len());
    for (w, _) in &effective {
        match shift_power_norm(space, direction.sign(), *w) {
            Ok(e) => values.push((e, *w)),
            Err(err) => {
                return BoundednessVerdict {
                    status: Boundedness::Inconclusive,
                    evidence: format!("window {w}: {err}"),
                    from_annotation: false,
                }
            }
        }
    }
    let lowers: Vec<f64> = values.iter().map(|(e, _)| e.lower).collect();
    let trace = values.iter().map(|(e, w)| format!("{w}:{:.6e}", e.lower)).collect::<Vec<_>>().join(", ");
    let n = lowers.len();
    let first = lowers[0];
    let last = lowers[n - 1];
    let prev = lowers[n - 2];
    let monotone = lowers.windows(2).all(|p| p[1] >= p[0]);
    let (status, what) = if monotone && last >= 2.0 * first {
        (Boundedness::Unbounded, "grows by >= 2x")
    } else if prev > 0.0 && ((last - prev) / prev).abs() < 1e-6 {
        (Boundedness::Bounded { norm: values[n - 1].0 }, "stabilizes")
    } else {
        (Boundedness::Inconclusive, "neither stabilizes nor diverges")
    };
    BoundednessVerdict { status, evidence: format!("windowed {dir} ||S|| {what} [{trace}]"), from_annotation: false }
}

/// Default window ladder used when classifying shifts for `window`.
pub fn default_windows(space: &SpaceSpec, window: usize) -> Vec<usize> {
    let cap = space
        .window()
        .map(|(a, b)| if space.half_line { b - a } else { (b - a) / 2 })
        .map(|w| w.max(4) as usize)
        .unwrap_or(window);
    let w = window.min(cap).max(8);
    vec![w / 4, w / 2, w]
}

/// Spectral radius of the forward or backward shift.
///
/// Closed-form weights give exact values. Otherwise the Fekete bound
/// `inf_{n <= max_power} ||S^n||^{1/n}` is returned; it is an upper bound for
/// submultiplicative sequences and is also used as the point estimate.
pub fn spectral_radius(
    space: &SpaceSpec,
    direction: Direction,
    max_power: usize,
    window: usize,
) -> Result<NormEstimate> {
    let max_power = max_power.max(1);
    match annotation_of(space) {
        Some(WeightAnnotation::Remark1) => {
            return Ok(NormEstimate::exact(f64::INFINITY, EstimateMethod::ExactFormula, window));
        }
        Some(WeightAnnotation::Geometric { r0 }) => {
            let v = if direction == Direction::Forward { r0 } else { 1.0 / r0 };
            let v = v.powf(1.0 / orlicz_exponent(space));
            return Ok(NormEstimate::exact(v, EstimateMethod::ExactFormula, window));
        }
        Some(WeightAnnotation::Polynomial { .. }) => {
            return Ok(NormEstimate::exact(1.0, EstimateMethod::ExactFormula, window));
        }
        Some(_) => {}
        None => {
            if let Some((1.0, 1.0)) = closed_form_shift_norm(space, direction.sign(), window) {
                // Isometric shift: every power has norm 1.
                return Ok(NormEstimate::exact(1.0, EstimateMethod::ExactFormula, window));
            }
        }
    }
    if annotation_of(space) == Some(WeightAnnotation::Table) || annotation_of(space).is_none() {
        let verdict = classify_boundedness(space, direction, &default_windows(space, window));
        if verdict.is_unbounded() {
            return Err(Error::UnboundedShift { direction: direction.label().into(), evidence: verdict.evidence });
        }
    }
    let mut best_upper = f64::INFINITY;
    let mut best_lower = f64::INFINITY;
    let mut exact = true;
    for n in 1..=max_power {
        let e = shift_power_norm(space, direction.sign() * n as i64, window)?;
        let inv = 1.0 / n as f64;
        best_upper = best_upper.min(e.upper.powf(inv));
        best_lower = best_lower.min(e.lower.powf(inv));
        exact &= e.is_exact();
    }
    // The Gelfand tail ||S^N||^{1/N} is never below the Fekete infimum, so
    // the interval collapses to the infimum.
    if exact {
        Ok(NormEstimate::exact(best_upper, EstimateMethod::Fekete, window))
    } else {
        let upper = best_upper;
        Ok(NormEstimate { lower: best_lower.min(upper), upper, method: EstimateMethod::Fekete, window })
    }
}

/// Parameters for [`spectrum_annulus`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumParams {
    pub max_power: usize,
    pub window: usize,
    /// Window ladder for boundedness classification; derived when empty.
    #[serde(default)]
    pub windows: Vec<usize>,
}

impl Default for SpectrumParams {
    fn default() -> Self {
        SpectrumParams { max_power: 32, window: 256, windows: Vec::new() }
    }
}

/// Annulus together with the classification that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub annulus: Annulus,
    pub forward: BoundednessVerdict,
    pub backward: BoundednessVerdict,
    pub rho_forward: Option<NormEstimate>,
    pub rho_backward: Option<NormEstimate>,
}

/// Diagnostic carried by [`Error::BothShiftsUnbounded`].
pub const BOTH_UNBOUNDED_DIAGNOSTIC: &str = "spec(S)=ℂ";

/// `spec(S) = { 1/rho(S^-1) <= |z| <= rho(S) }` with classification details.
pub fn spectrum_report(space: &SpaceSpec, params: &SpectrumParams) -> Result<SpectrumReport> {
    let windows =
        if params.windows.is_empty() { default_windows(space, params.window) } else { params.windows.clone() };
    let forward = classify_boundedness(space, Direction::Forward, &windows);
    let backward = classify_boundedness(space, Direction::Backward, &windows);
    if forward.is_unbounded() && backward.is_unbounded() {
        return Err(Error::BothShiftsUnbounded {
            diagnostic: format!("{BOTH_UNBOUNDED_DIAGNOSTIC}; {}; {}", forward.evidence, backward.evidence),
        });
    }
    let radius = |dir: Direction, verdict: &BoundednessVerdict| -> Result<Option<NormEstimate>> {
        if verdict.is_unbounded() {
            Ok(None)
        } else {
            spectral_radius(space, dir, params.max_power, params.window).map(Some)
        }
    };
    let rho_forward = radius(Direction::Forward, &forward)?;
    let rho_backward = radius(Direction::Backward, &backward)?;
    let r_out = rho_forward.map(|e| e.point()).unwrap_or(f64::INFINITY);
    let mut r_in = rho_backward.map(|e| 1.0 / e.point()).unwrap_or(0.0);
    // rho(S) rho(S^-1) >= 1, so an inverted annulus within rounding of the
    // reciprocal is a circle.
    if r_in > r_out && r_in <= r_out * (1.0 + 4.0 * f64::EPSILON) {
        r_in = r_out;
    }
    let exact_side = |v: &BoundednessVerdict, rho: &Option<NormEstimate>| match rho {
        None => v.from_annotation,
        Some(e) => e.method == EstimateMethod::ExactFormula,
    };
    let exact = exact_side(&forward, &rho_forward) && exact_side(&backward, &rho_backward);
    Ok(SpectrumReport { annulus: Annulus { r_in, r_out, exact }, forward, backward, rho_forward, rho_backward })
}

/// The annulus spectrum of the shift.
pub fn spectrum_annulus(space: &SpaceSpec, params: &SpectrumParams) -> Result<Annulus> {
    spectrum_report(space, params).map(|r| r.annulus)
}
