//! Banach sequence spaces realized on finite index windows.
//!
//! Five norm families are supported: weighted `l^p`, weighted Orlicz spaces
//! with Luxemburg norm, variable-exponent `l^{q(n)}`, finite intersections
//! with the max norm, and the space of Fourier coefficients of continuous
//! functions with the sup norm of the function.

use crate::error::{Error, Result};
use crate::seq::SeqWindow;
use crate::trig::{Stop, SupCertificate, TrigPoly};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Closed-form family a weight was built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightAnnotation {
    Geometric { r0: f64 },
    ExpAbs { alpha: f64 },
    Polynomial { degree: f64 },
    Remark1,
    Table,
}

/// Constructor recipe for a [`Weight`]; this is the serialized form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightKind {
    /// `omega == 1`.
    Unit,
    /// `omega(n) = r0^n`.
    Geometric { r0: f64 },
    /// `omega(n) = exp(alpha |n|)`.
    ExpAbs { alpha: f64 },
    /// `omega(n) = (1 + |n|)^degree`.
    Polynomial { degree: f64 },
    /// `omega(2n) = 1`, `omega(2n+1) = |n| + 1`.
    Remark1,
    /// `omega(n) = 1` for `n <= 0`, `(n+1)!` for `n > 0`.
    Factorial,
    /// Explicit positive values starting at `offset`.
    Table { offset: i64, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct WeightRepr {
    #[serde(flatten)]
    kind: WeightKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    window: Option<usize>,
}

/// Positive sequence on an index window, stored as `log omega(n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightRepr", into = "WeightRepr")]
pub struct Weight {
    kind: WeightKind,
    lo: i64,
    log_values: Vec<f64>,
    annotation: WeightAnnotation,
}

impl TryFrom<WeightRepr> for Weight {
    type Error = Error;
    fn try_from(r: WeightRepr) -> Result<Self> {
        match (&r.kind, r.window) {
            (WeightKind::Table { .. }, _) => make_weight(r.kind, 0),
            (_, Some(n)) => make_weight(r.kind, n),
            (_, None) => Err(Error::InvalidParams("weight window required".into())),
        }
    }
}

impl From<Weight> for WeightRepr {
    fn from(w: Weight) -> Self {
        let window = match w.kind {
            WeightKind::Table { .. } => None,
            _ => Some(w.hi() as usize),
        };
        WeightRepr { kind: w.kind, window }
    }
}

fn log_weight(kind: &WeightKind, n: i64) -> f64 {
    match *kind {
        WeightKind::Unit => 0.0,
        WeightKind::Geometric { r0 } => n as f64 * r0.ln(),
        WeightKind::ExpAbs { alpha } => alpha * n.abs() as f64,
        WeightKind::Polynomial { degree } => degree * (1.0 + n.abs() as f64).ln(),
        WeightKind::Remark1 => {
            if n.rem_euclid(2) == 0 {
                0.0
            } else {
                let m = (n - 1) / 2;
                (m.abs() as f64 + 1.0).ln()
            }
        }
        WeightKind::Factorial | WeightKind::Table { .. } => unreachable!("stored explicitly"),
    }
}

/// Builds a weight on `[-window, window]` (tables use their own range).
pub fn make_weight(kind: WeightKind, window: usize) -> Result<Weight> {
    let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
    let annotation = match kind {
        WeightKind::Unit => WeightAnnotation::Geometric { r0: 1.0 },
        WeightKind::Geometric { r0 } => {
            if !(r0.is_finite() && r0 > 0.0) {
                return bad("geometric weight needs r0 > 0");
            }
            WeightAnnotation::Geometric { r0 }
        }
        WeightKind::ExpAbs { alpha } => {
            if !alpha.is_finite() {
                return bad("exp_abs weight needs a finite alpha");
            }
            WeightAnnotation::ExpAbs { alpha }
        }
        WeightKind::Polynomial { degree } => {
            if !degree.is_finite() {
                return bad("polynomial weight needs a finite degree");
            }
            WeightAnnotation::Polynomial { degree }
        }
        WeightKind::Remark1 => WeightAnnotation::Remark1,
        WeightKind::Factorial => WeightAnnotation::Table,
        WeightKind::Table { offset, ref values } => {
            if values.is_empty() {
                return bad("table weight needs at least one value");
            }
            if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return bad("table weight values must be positive and finite");
            }
            return Ok(Weight {
                lo: offset,
                log_values: values.iter().map(|v| v.ln()).collect(),
                annotation: WeightAnnotation::Table,
                kind: kind.clone(),
            });
        }
    };
    if window < 1 {
        return bad("weight window must be at least 1");
    }
    let n = window as i64;
    let log_values = match kind {
        // log (n+1)! accumulated left to right.
        WeightKind::Factorial => {
            let mut acc = 0.0;
            (-n..=n)
                .map(|i| {
                    if i > 0 {
                        acc += ((i + 1) as f64).ln();
                    }
                    acc
                })
                .collect()
        }
        _ => (-n..=n).map(|i| log_weight(&kind, i)).collect(),
    };
    Ok(Weight { kind, lo: -n, log_values, annotation })
}

impl Weight {
    pub fn unit(window: usize) -> Self {
        make_weight(WeightKind::Unit, window).expect("unit weight")
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn annotation(&self) -> WeightAnnotation {
        self.annotation
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.log_values.len() as i64 - 1
    }

    pub fn contains(&self, n: i64) -> bool {
        n >= self.lo && n <= self.hi()
    }

    /// `log omega(n)`, or `None` outside the window.
    pub fn log_at(&self, n: i64) -> Option<f64> {
        if self.contains(n) {
            Some(self.log_values[(n - self.lo) as usize])
        } else {
            None
        }
    }

    /// `omega(n)`; panics outside the window.
    pub fn value(&self, n: i64) -> f64 {
        self.log_at(n).expect("index inside weight window").exp()
    }

    /// `omega(i) / omega(j)` computed from logarithms.
    pub fn ratio(&self, i: i64, j: i64) -> f64 {
        (self.log_at(i).expect("index inside window") - self.log_at(j).expect("index inside window")).exp()
    }
}

/// Orlicz function `K` on `[0, inf)`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionDescriptor {
    /// `K(x) = x^p`.
    Power { p: f64 },
    /// `K(x) = x^{p + sin(log(-log x))}` for `0 < x <= 1/e`, continued by its
    /// tangent line beyond `1/e`.
    PowerOscillating { p: f64 },
    #[serde(skip)]
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for FunctionDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionDescriptor::Power { p } => write!(f, "Power {{ p: {p} }}"),
            FunctionDescriptor::PowerOscillating { p } => write!(f, "PowerOscillating {{ p: {p} }}"),
            FunctionDescriptor::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl PartialEq for FunctionDescriptor {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Power { p: a }, Self::Power { p: b }) => a == b,
            (Self::PowerOscillating { p: a }, Self::PowerOscillating { p: b }) => a == b,
            (Self::Custom(a), Self::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

const OSC_JOIN: f64 = 0.367_879_441_171_442_33; // 1/e

impl FunctionDescriptor {
    pub fn eval(&self, x: f64) -> f64 {
        if let FunctionDescriptor::Custom(k) = self {
            return k(x);
        }
        if x <= 0.0 {
            return 0.0;
        }
        match self {
            FunctionDescriptor::Power { p } => x.powf(*p),
            FunctionDescriptor::PowerOscillating { p } => {
                if x <= OSC_JOIN {
                    x.powf(p + (-x.ln()).ln().sin())
                } else {
                    // K(1/e) = e^{-p}, K'(1/e) = (p + 1) e^{1-p}
                    (-p).exp() + (p + 1.0) * (1.0 - p).exp() * (x - OSC_JOIN)
                }
            }
            FunctionDescriptor::Custom(k) => k(x),
        }
    }

    /// Sampled check of `K(0) = 0`, monotonicity and positivity.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpaceParams(m));
        match self {
            FunctionDescriptor::Power { p } if !(*p >= 1.0 && p.is_finite()) => {
                return bad(format!("Orlicz power needs 1 <= p < inf, got {p}"));
            }
            FunctionDescriptor::PowerOscillating { p } if !(*p > 1.0 + 2f64.sqrt() && p.is_finite()) => {
                return bad(format!("oscillating Orlicz power needs p > 1 + sqrt 2, got {p}"));
            }
            _ => {}
        }
        if self.eval(0.0) != 0.0 {
            return bad("K(0) must be 0".into());
        }
        let mut prev = 0.0;
        for i in 0..=400 {
            let x = 10f64.powf(-8.0 + 12.0 * i as f64 / 400.0);
            let v = self.eval(x);
            if !(v > 0.0) {
                return bad(format!("K({x:e}) = {v} is not positive"));
            }
            if v < prev {
                return bad(format!("K is decreasing near {x:e}"));
            }
            prev = v;
        }
        Ok(())
    }
}

/// Variable exponent recipe; this is the serialized form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExponentKind {
    Constant {
        q: f64,
    },
    /// `q(n) = base + amplitude / (1 + |n|)`.
    Decaying {
        base: f64,
        amplitude: f64,
    },
    Table {
        offset: i64,
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ExponentRepr {
    #[serde(flatten)]
    kind: ExponentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    window: Option<usize>,
}

/// Exponent sequence `q(n) >= 1` on an index window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExponentRepr", into = "ExponentRepr")]
pub struct ExponentMap {
    kind: ExponentKind,
    lo: i64,
    values: Vec<f64>,
}

impl TryFrom<ExponentRepr> for ExponentMap {
    type Error = Error;
    fn try_from(r: ExponentRepr) -> Result<Self> {
        ExponentMap::new(r.kind, r.window.unwrap_or(0))
    }
}

impl From<ExponentMap> for ExponentRepr {
    fn from(q: ExponentMap) -> Self {
        let window = match q.kind {
            ExponentKind::Table { .. } => None,
            _ => Some(q.hi() as usize),
        };
        ExponentRepr { kind: q.kind, window }
    }
}

impl ExponentMap {
    pub fn new(kind: ExponentKind, window: usize) -> Result<Self> {
        let (lo, values) = match &kind {
            ExponentKind::Table { offset, values } => (*offset, values.clone()),
            _ => {
                if window < 1 {
                    return Err(Error::InvalidParams("exponent window must be at least 1".into()));
                }
                let n = window as i64;
                let f = |i: i64| match kind {
                    ExponentKind::Constant { q } => q,
                    ExponentKind::Decaying { base, amplitude } => base + amplitude / (1.0 + i.abs() as f64),
                    ExponentKind::Table { .. } => unreachable!(),
                };
                (-n, (-n..=n).map(f).collect())
            }
        };
        if values.is_empty() {
            return Err(Error::InvalidSpaceParams("empty exponent table".into()));
        }
        if let Some(q) = values.iter().find(|q| !(**q >= 1.0 && q.is_finite())) {
            return Err(Error::InvalidSpaceParams(format!("exponent q(n) = {q} must satisfy q >= 1")));
        }
        Ok(ExponentMap { kind, lo, values })
    }

    pub fn kind(&self) -> &ExponentKind {
        &self.kind
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    pub fn at(&self, n: i64) -> Option<f64> {
        if n >= self.lo && n <= self.hi() {
            Some(self.values[(n - self.lo) as usize])
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|q| *q == self.values[0])
    }
}

/// Norm family of a sequence space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `(sum |x(n)|^p omega(n)^p)^{1/p}`; `p = inf` gives `sup |x(n)| omega(n)`.
    Lpw { p: f64, weight: Weight },
    /// `inf { t : sum K(|x(n)|/t) omega(n) <= 1 }`.
    Orlicz { k: FunctionDescriptor, weight: Weight },
    /// `inf { t : sum |x(n)/t|^{q(n)} <= 1 }`.
    VarExp { q: ExponentMap },
    /// `max` of the member norms.
    Intersection { members: Vec<SpaceSpec> },
    /// `sup_t |sum x(n) e^{int}|`.
    FourierSup,
}

/// A norm family together with its index set (`Z` or `Z+`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub half_line: bool,
}

impl SpaceSpec {
    pub fn new(family: Family, half_line: bool) -> Result<Self> {
        let s = SpaceSpec { family, half_line };
        s.validate()?;
        Ok(s)
    }

    pub fn lpw(p: f64, weight: Weight) -> Result<Self> {
        Self::new(Family::Lpw { p, weight }, false)
    }

    pub fn orlicz(k: FunctionDescriptor, weight: Weight) -> Result<Self> {
        Self::new(Family::Orlicz { k, weight }, false)
    }

    pub fn var_exp(q: ExponentMap) -> Result<Self> {
        Self::new(Family::VarExp { q }, false)
    }

    pub fn intersection(members: Vec<SpaceSpec>) -> Result<Self> {
        Self::new(Family::Intersection { members }, false)
    }

    pub fn fourier_sup() -> Self {
        SpaceSpec { family: Family::FourierSup, half_line: false }
    }

    /// Same family on `Z+`.
    pub fn on_half_line(mut self) -> Self {
        self.half_line = true;
        if let Family::Intersection { members } = &mut self.family {
            for m in members {
                m.half_line = true;
            }
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        match &self.family {
            Family::Lpw { p, .. } => {
                if !(*p >= 1.0) {
                    return Err(Error::InvalidSpaceParams(format!("l^p needs p >= 1, got {p}")));
                }
            }
            Family::Orlicz { k, .. } => k.validate()?,
            Family::VarExp { .. } => {}
            Family::Intersection { members } => {
                if members.is_empty() {
                    return Err(Error::InvalidSpaceParams("intersection needs at least one member".into()));
                }
                for m in members {
                    m.validate()?;
                }
            }
            Family::FourierSup => {}
        }
        Ok(())
    }

    /// Weight of an `l^p` or Orlicz space.
    pub fn weight(&self) -> Option<&Weight> {
        match &self.family {
            Family::Lpw { weight, .. } | Family::Orlicz { weight, .. } => Some(weight),
            _ => None,
        }
    }

    /// Inclusive index window on which sequences may live; `None` if unrestricted.
    pub fn window(&self) -> Option<(i64, i64)> {
        let w = match &self.family {
            Family::Lpw { weight, .. } | Family::Orlicz { weight, .. } => Some((weight.lo(), weight.hi())),
            Family::VarExp { q } => Some((q.lo(), q.hi())),
            Family::Intersection { members } => members.iter().try_fold((i64::MIN, i64::MAX), |acc, m| {
                Some(match m.window() {
                    Some((a, b)) => (acc.0.max(a), acc.1.min(b)),
                    None => acc,
                })
            }),
            Family::FourierSup => None,
        };
        let w = match w {
            Some((i64::MIN, i64::MAX)) => None,
            other => other,
        };
        match (w, self.half_line) {
            (Some((a, b)), true) => Some((a.max(0), b)),
            (None, true) => Some((0, i64::MAX)),
            (w, false) => w,
        }
    }

    /// True when the norm depends only on `|x(n)|` and is monotone in it.
    pub fn is_lattice(&self) -> bool {
        match &self.family {
            Family::FourierSup => false,
            Family::Intersection { members } => members.iter().all(|m| m.is_lattice()),
            _ => true,
        }
    }

    pub(crate) fn check_support(&self, x: &SeqWindow) -> Result<()> {
        let Some((lo, hi)) = x.support() else {
            return Ok(());
        };
        if let Some((a, b)) = self.window() {
            if lo < a || hi > b {
                return Err(Error::SupportOutsideWindow { lo, hi, win_lo: a, win_hi: b });
            }
        }
        Ok(())
    }
}

/// Relative gap of the certified Fourier-sup enclosure.
pub const FOURIER_SUP_REL_TOL: f64 = 1e-6;

/// Certified enclosure of `sup_t |sum x(n) e^{int}|`.
pub fn fourier_sup_certificate(x: &SeqWindow) -> SupCertificate {
    let poly = TrigPoly::new(x.coeffs());
    poly.certified_sup(8 * (x.len() + 1), Stop::Relative(FOURIER_SUP_REL_TOL))
}

fn lp_weighted(p: f64, weight: &Weight, x: &SeqWindow) -> f64 {
    let terms: Vec<f64> = x
        .iter()
        .map(|(n, c)| {
            let a = c.norm();
            if a == 0.0 {
                0.0
            } else {
                (a.ln() + weight.log_at(n).unwrap()).exp()
            }
        })
        .collect();
    lp_of(p, &terms)
}

/// `l^p` norm of nonnegative magnitudes, scaled to avoid overflow.
pub(crate) fn lp_of(p: f64, terms: &[f64]) -> f64 {
    let scale = terms.iter().copied().fold(0.0, f64::max);
    if scale == 0.0 || p.is_infinite() {
        return scale;
    }
    let s: f64 = terms.iter().map(|t| (t / scale).powf(p)).sum();
    scale * s.powf(1.0 / p)
}

/// `t -> sum K(|x(n)|/t) omega(n)`.
pub fn orlicz_modular<'a>(k: &'a FunctionDescriptor, weight: &'a Weight, x: &'a SeqWindow) -> impl Fn(f64) -> f64 + 'a {
    move |t| x.iter().map(|(n, c)| k.eval(c.norm() / t) * weight.log_at(n).unwrap().exp()).sum()
}

/// `t -> sum |x(n)/t|^{q(n)}`.
pub fn var_exp_modular<'a>(q: &'a ExponentMap, x: &'a SeqWindow) -> impl Fn(f64) -> f64 + 'a {
    move |t| x.iter().map(|(n, c)| (c.norm() / t).powf(q.at(n).unwrap())).sum()
}

const LUX_MAX_BRACKET: usize = 200;
const LUX_MAX_BISECT: usize = 200;
const LUX_REL_TOL: f64 = 1e-12;

/// `inf { t > 0 : modular(t) <= 1 }` by bracketing and bisection.
///
/// `modular` must be nonincreasing in `t`. The returned `t` satisfies
/// `modular(t) <= 1`.
pub fn luxemburg_norm<F: Fn(f64) -> f64>(modular: F, x: &SeqWindow) -> Result<f64> {
    if x.is_zero() {
        return Ok(0.0);
    }
    let fits = |t: f64| {
        let m = modular(t);
        m.is_finite() && m <= 1.0
    };
    let t0 = x.max_abs();
    let (mut lo, mut hi);
    if fits(t0) {
        hi = t0;
        lo = t0 / 2.0;
        let mut steps = 0;
        while fits(lo) {
            hi = lo;
            lo /= 2.0;
            steps += 1;
            if steps >= LUX_MAX_BRACKET || lo == 0.0 {
                return Ok(hi);
            }
        }
    } else {
        lo = t0;
        hi = 2.0 * t0;
        let mut steps = 0;
        while !fits(hi) {
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps >= LUX_MAX_BRACKET || !hi.is_finite() {
                return Err(Error::ModularDivergesForAllT);
            }
        }
    }
    for _ in 0..LUX_MAX_BISECT {
        if hi - lo <= LUX_REL_TOL * hi * 1e-3 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if fits(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Norm of a finitely supported sequence in `space`.
pub fn norm(space: &SpaceSpec, x: &SeqWindow) -> Result<f64> {
    space.check_support(x)?;
    if x.is_zero() {
        return Ok(0.0);
    }
    match &space.family {
        Family::Lpw { p, weight } => Ok(lp_weighted(*p, weight, x)),
        Family::Orlicz { k, weight } => luxemburg_norm(orlicz_modular(k, weight, x), x),
        Family::VarExp { q } => luxemburg_norm(var_exp_modular(q, x), x),
        Family::Intersection { members } => members.iter().try_fold(0.0f64, |acc, m| Ok(acc.max(norm(m, x)?))),
        Family::FourierSup => Ok(fourier_sup_certificate(x).lo),
    }
}

/// `psi_z(x) = (x(n) z^n)` for unimodular `z`.
pub fn apply_modulation(z: Complex64, x: &SeqWindow) -> Result<SeqWindow> {
    let modulus = z.norm();
    if (modulus - 1.0).abs() > 1e-12 {
        return Err(Error::NonUnimodularZ { modulus });
    }
    Ok(x.map_indexed(|n, c| c * z.powi(n as i32)))
}
