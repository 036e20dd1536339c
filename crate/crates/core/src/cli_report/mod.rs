//! Config-driven scenario runner and report emitter behind the `annulus` binary.

mod config;
mod output;

pub use config::{
    parse_config, parse_config_for, ConfigError, ConfigErrors, Radii, Scenario, ScenarioConfig, DEFAULT_CESARO_KS,
    DEFAULT_CESARO_SAMPLES, DEFAULT_TOLERANCE, DEFAULT_WEIGHT_WINDOW,
};
pub use output::{emit_outputs, strip_timing, EmittedFiles};

use crate::error::Error;
use crate::multiplier::{
    cesaro_mean, check_symbol_bound_with, circle_samples, symbol_sup_on_circle, BoundReport, CheckParams,
    OnesidednessDiagnostic, SpectrumParamsLite, Verdict,
};
use crate::seq::{FiniteSymbol, SeqWindow};
use crate::shift_spectrum::{spectrum_report, Annulus, BoundednessVerdict, Direction, NormEstimate, SpectrumParams};
use crate::spaces::{make_weight, norm, ExponentKind, ExponentMap, FunctionDescriptor, SpaceSpec, WeightKind};
use crate::toeplitz::{check_toeplitz_bound_with, Region};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::time::Instant;

/// Environment variable capping the section half-width.
pub const MAX_WINDOW_ENV: &str = "ANNULUS_MAX_WINDOW";
pub const DEFAULT_MAX_WINDOW: usize = 4096;
/// Largest section half-width reached by doubling.
pub const DOUBLING_CAP: usize = 1024;

/// Diagnostic reported by the counterexample scenario.
pub const COUNTEREXAMPLE_DIAGNOSTIC: &str = "spec(S)=ℂ, no L∞ bound possible";

/// Runtime knobs that do not belong in the config file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub max_window: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { max_window: DEFAULT_MAX_WINDOW }
    }
}

impl RunOptions {
    /// Reads [`MAX_WINDOW_ENV`]; unparsable values fall back to the default.
    pub fn from_env() -> Self {
        let max_window = std::env::var(MAX_WINDOW_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|v| *v >= 1)
            .unwrap_or(DEFAULT_MAX_WINDOW);
        RunOptions { max_window }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub confirmed: usize,
    pub inconclusive: usize,
    pub violated_outside_spectrum: usize,
    pub error: usize,
}

impl Summary {
    fn of(reports: &[BoundReport]) -> Self {
        let mut s = Summary::default();
        for r in reports {
            match r.verdict {
                Verdict::Confirmed => s.confirmed += 1,
                Verdict::Inconclusive => s.inconclusive += 1,
                Verdict::ViolatedOutsideSpectrum => s.violated_outside_spectrum += 1,
                Verdict::Error => s.error += 1,
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftInfo {
    pub forward: BoundednessVerdict,
    pub backward: BoundednessVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_forward: Option<NormEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_backward: Option<NormEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionInfo {
    pub region: Region,
    pub uncertain: bool,
}

/// `|phi~|` sup on `|z| = R` for the counterexample symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthRow {
    pub radius: f64,
    pub sup_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CesaroRow {
    pub space: String,
    pub k: u64,
    /// `max_x ||cesaro_mean(x, k) - x|| / ||x||` over the sample.
    pub max_rel_error: f64,
    /// `max_x ||cesaro_mean(x, k) - x|| / ||(|n|/(k+1)) x||`; at most 1 for
    /// lattice norms when the support fits in `[-k, k]`.
    pub max_rate_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

/// Samples of the symbol on one checked circle, written as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleSamples {
    pub radius: f64,
    pub rows: Vec<(f64, Complex64)>,
}

/// Everything a scenario produced. Serialization order is fixed;
/// `timing_ms` is last so that stable-output checks can drop it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub version: String,
    pub scenario: Scenario,
    pub config: serde_json::Value,
    pub annulus: Option<Annulus>,
    pub reports: Vec<BoundReport>,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shifts: Option<ShiftInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub onesidedness: Option<OnesidednessDiagnostic>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub growth: Vec<GrowthRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cesaro: Vec<CesaroRow>,
    pub diagnostics: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    #[serde(skip)]
    pub circles: Vec<CircleSamples>,
    pub timing_ms: f64,
}

impl RunReport {
    fn new(cfg: &ScenarioConfig) -> Self {
        RunReport {
            version: env!("CARGO_PKG_VERSION").to_string(),
            scenario: cfg.scenario,
            config: cfg.to_json(),
            annulus: None,
            reports: Vec::new(),
            summary: Summary::default(),
            shifts: None,
            region: None,
            onesidedness: None,
            growth: Vec::new(),
            cesaro: Vec::new(),
            diagnostics: Vec::new(),
            error: None,
            circles: Vec::new(),
            timing_ms: 0.0,
        }
    }

    fn fail(&mut self, e: &Error) {
        let kind = format!("{e:?}");
        let kind = kind.split([' ', '(', '{']).next().unwrap_or("Error").to_string();
        self.error = Some(ErrorInfo { kind, message: e.to_string() });
    }

    /// Process exit code: 3 on a math-domain error, 1 if any verdict is
    /// `error`, otherwise 0.
    pub fn exit_code(&self) -> i32 {
        if self.error.is_some() {
            3
        } else if self.summary.error > 0 {
            1
        } else {
            0
        }
    }
}

/// `{r_in, sqrt(r_in r_out), r_out}`, collapsed for a circle. A zero inner
/// or infinite outer radius is replaced by a geometric ladder from the
/// finite end.
pub fn auto_radii(a: &Annulus) -> Vec<f64> {
    match (a.r_in > 0.0, a.r_out.is_finite()) {
        _ if a.is_circle() => vec![a.r_out],
        (true, true) => vec![a.r_in, (a.r_in * a.r_out).sqrt(), a.r_out],
        (true, false) => vec![a.r_in, 2.0 * a.r_in, 4.0 * a.r_in],
        (false, true) => vec![a.r_out / 4.0, a.r_out / 2.0, a.r_out],
        (false, false) => vec![1.0],
    }
}

fn spectrum_params(cfg: &ScenarioConfig) -> SpectrumParamsLite {
    SpectrumParamsLite { max_power: cfg.max_power, window: SpectrumParams::default().window }
}

/// Radii for a config, computing the annulus when they are `auto`.
pub fn resolve_radii(cfg: &ScenarioConfig) -> Result<Vec<f64>, Error> {
    match &cfg.radii {
        Radii::List(v) => Ok(v.clone()),
        Radii::Auto => {
            let space = cfg.space.as_ref().ok_or_else(|| Error::InvalidParams("auto radii need a space".into()))?;
            let p: SpectrumParams = spectrum_params(cfg).into();
            Ok(auto_radii(&spectrum_report(space, &p)?.annulus))
        }
    }
}

/// Run with options from the environment.
pub fn run_scenario(cfg: &ScenarioConfig) -> RunReport {
    run_scenario_with(cfg, &RunOptions::from_env())
}

/// Deterministic for fixed `(cfg, opts)` apart from `timing_ms`.
pub fn run_scenario_with(cfg: &ScenarioConfig, opts: &RunOptions) -> RunReport {
    let t0 = Instant::now();
    let mut report = RunReport::new(cfg);
    match cfg.scenario {
        Scenario::Spectrum => run_spectrum(cfg, &mut report),
        Scenario::MultiplierCheck | Scenario::ToeplitzCheck => run_check(cfg, opts, &mut report),
        Scenario::CesaroDemo => run_cesaro(cfg, &mut report),
        Scenario::Counterexample => run_counterexample(cfg, &mut report),
    }
    report.summary = Summary::of(&report.reports);
    report.timing_ms = t0.elapsed().as_secs_f64() * 1e3;
    report
}

fn shift_info(r: &crate::shift_spectrum::SpectrumReport) -> ShiftInfo {
    ShiftInfo {
        forward: r.forward.clone(),
        backward: r.backward.clone(),
        rho_forward: r.rho_forward,
        rho_backward: r.rho_backward,
    }
}

fn run_spectrum(cfg: &ScenarioConfig, report: &mut RunReport) {
    let space = cfg.space.as_ref().expect("validated");
    match spectrum_report(space, &spectrum_params(cfg).into()) {
        Ok(r) => {
            report.annulus = Some(r.annulus);
            report.shifts = Some(shift_info(&r));
        }
        Err(e) => report.fail(&e),
    }
}

fn run_check(cfg: &ScenarioConfig, opts: &RunOptions, report: &mut RunReport) {
    let space = cfg.space.as_ref().expect("validated");
    let phi = cfg.symbol.as_ref().expect("validated");
    let cap = opts.max_window.max(1);
    let n = cfg.window.unwrap_or((8 * phi.bandwidth().max(1)) as usize).min(cap);
    let params = CheckParams {
        n,
        tol: cfg.tolerance,
        max_n: DOUBLING_CAP.min(cap).max(n),
        witness_factor: crate::multiplier::DEFAULT_WITNESS_FACTOR,
        spectrum: spectrum_params(cfg),
    };
    let radii = match resolve_radii(cfg) {
        Ok(r) => r,
        Err(e) => {
            report.fail(&e);
            return;
        }
    };
    let result = if cfg.scenario == Scenario::ToeplitzCheck {
        check_toeplitz_bound_with(phi, space, &radii, &params).map(|c| {
            report.region = Some(RegionInfo { region: c.region, uncertain: c.region_uncertain });
            (c.annulus, c.onesided, c.reports)
        })
    } else {
        check_symbol_bound_with(phi, space, &radii, &params).map(|c| (c.annulus, c.onesided, c.reports))
    };
    match result {
        Ok((annulus, onesided, reports)) => {
            report.annulus = Some(annulus);
            if !onesided.compatible {
                report.diagnostics.push(onesided.message.clone());
            }
            report.onesidedness = Some(onesided);
            for r in &reports {
                match circle_samples(phi, r.radius, r.samples) {
                    Ok(rows) => report.circles.push(CircleSamples { radius: r.radius, rows }),
                    Err(e) => report.diagnostics.push(format!("samples at r={}: {e}", r.radius)),
                }
            }
            report.reports = reports;
        }
        Err(e) => {
            if let Error::BothShiftsUnbounded { diagnostic } = &e {
                report.diagnostics.push(diagnostic.clone());
            }
            report.reports = radii
                .iter()
                .map(|&r| BoundReport {
                    radius: r,
                    sup_lo: 0.0,
                    sup_hi: 0.0,
                    norm_lower: 0.0,
                    norm_upper: f64::INFINITY,
                    verdict: Verdict::Error,
                    window: n,
                    samples: 0,
                    note: Some(e.to_string()),
                })
                .collect();
            report.fail(&e);
        }
    }
}

/// Spaces exercised by `cesaro-demo` when the config names none.
pub fn default_cesaro_spaces() -> Vec<(String, SpaceSpec)> {
    let w = 32;
    let unit = || make_weight(WeightKind::Unit, w).expect("unit weight");
    vec![
        ("l1".into(), SpaceSpec::lpw(1.0, unit()).expect("valid")),
        ("l2".into(), SpaceSpec::lpw(2.0, unit()).expect("valid")),
        ("orlicz_x3".into(), SpaceSpec::orlicz(FunctionDescriptor::Power { p: 3.0 }, unit()).expect("valid")),
        (
            "var_exp_2_plus_1_over_1_plus_n".into(),
            SpaceSpec::var_exp(
                ExponentMap::new(ExponentKind::Decaying { base: 2.0, amplitude: 1.0 }, w).expect("valid"),
            )
            .expect("valid"),
        ),
        ("fourier_sup".into(), SpaceSpec::fourier_sup()),
    ]
}

/// Seeded random sequences supported in `[-20, 20]`.
pub fn cesaro_samples(seed: u64, count: usize) -> Vec<SeqWindow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let coeffs = (0..41).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            SeqWindow::new(-20, coeffs)
        })
        .collect()
}

fn run_cesaro(cfg: &ScenarioConfig, report: &mut RunReport) {
    let spaces = match &cfg.space {
        Some(s) => vec![("config".to_string(), s.clone())],
        None => default_cesaro_spaces(),
    };
    let xs = cesaro_samples(cfg.seed, cfg.samples);
    for (label, space) in &spaces {
        for &k in &cfg.ks {
            let mut max_rel = 0.0f64;
            let mut max_rate = 0.0f64;
            for x in &xs {
                let step = || -> Result<(f64, f64), Error> {
                    let nx = norm(space, x)?;
                    let err = norm(space, &cesaro_mean(x, k).sub(x))?;
                    let taper = x.map_indexed(|n, c| c * (n.abs() as f64 / (k as f64 + 1.0)));
                    let nt = norm(space, &taper)?;
                    Ok((if nx > 0.0 { err / nx } else { 0.0 }, if nt > 0.0 { err / nt } else { 0.0 }))
                };
                match step() {
                    Ok((rel, rate)) => {
                        max_rel = max_rel.max(rel);
                        max_rate = max_rate.max(rate);
                    }
                    Err(e) => {
                        report.fail(&e);
                        return;
                    }
                }
            }
            report.cesaro.push(CesaroRow { space: label.clone(), k, max_rel_error: max_rel, max_rate_ratio: max_rate });
        }
        let rows: Vec<&CesaroRow> = report.cesaro.iter().filter(|r| &r.space == label).collect();
        let monotone = rows.windows(2).all(|p| p[1].k < p[0].k || p[1].max_rel_error <= p[0].max_rel_error);
        report
            .diagnostics
            .push(format!("{label}: error {} in k", if monotone { "nonincreasing" } else { "not monotone" }));
    }
}

fn run_counterexample(cfg: &ScenarioConfig, report: &mut RunReport) {
    let space = match &cfg.space {
        Some(s) => s.clone(),
        None => SpaceSpec::lpw(2.0, make_weight(WeightKind::Remark1, 64).expect("valid")).expect("valid"),
    };
    let phi = cfg.symbol.clone().unwrap_or_else(|| FiniteSymbol::monomial(2));
    let windows = crate::shift_spectrum::default_windows(&space, SpectrumParams::default().window);
    let forward = crate::shift_spectrum::classify_boundedness(&space, Direction::Forward, &windows);
    let backward = crate::shift_spectrum::classify_boundedness(&space, Direction::Backward, &windows);
    let both = forward.is_unbounded() && backward.is_unbounded();
    report.shifts = Some(ShiftInfo { forward, backward, rho_forward: None, rho_backward: None });
    for r in [1.0, 2.0, 4.0] {
        match symbol_sup_on_circle(&phi, r, 1e-9) {
            Ok(c) => report.growth.push(GrowthRow { radius: r, sup_abs: c.lo }),
            Err(e) => {
                report.fail(&e);
                return;
            }
        }
    }
    match spectrum_report(&space, &spectrum_params(cfg).into()) {
        Err(Error::BothShiftsUnbounded { diagnostic }) if both => {
            report.diagnostics.push(format!("BothShiftsUnbounded: {diagnostic}"));
            report.diagnostics.push(COUNTEREXAMPLE_DIAGNOSTIC.to_string());
        }
        Err(e) => report.fail(&e),
        Ok(r) => {
            report.annulus = Some(r.annulus);
            report.fail(&Error::InvalidParams(
                "counterexample expects both shifts unbounded on the configured space".into(),
            ));
        }
    }
}
