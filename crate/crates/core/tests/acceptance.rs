//! Acceptance suite: one PASS/FAIL line per criterion, each with its
//! runtime budget. Exits nonzero if any criterion fails.

use annulus::cli_report::{auto_radii, cesaro_samples, strip_timing};
use annulus::multiplier::{
    cesaro_mean, check_symbol_bound, convolve, fejer_approximant, fejer_coefficients, fejer_ratio, operator_norm,
    operator_norm_upper, NormMethod, Verdict,
};
use annulus::oracle::{naive_convolve, naive_operator_norm};
use annulus::shift_spectrum::{spectral_radius, spectrum_annulus, Direction, SpectrumParams};
use annulus::spaces::{make_weight, norm, ExponentKind, ExponentMap, FunctionDescriptor, SpaceSpec, WeightKind};
use annulus::toeplitz::{
    check_toeplitz_bound_with, check_toeplitz_identity, extract_symbol_coeffs, toeplitz_finite_section, Region,
    ToeplitzOp,
};
use annulus::{FiniteSymbol, SeqWindow};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

type C = Complex64;

/// Weight window large enough for the longest witness at `N = 256`.
const BIG_WINDOW: usize = 20_000;

/// Name, check and runtime budget.
type Criterion = (&'static str, fn() -> Outcome, Duration);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn unit_disk(rng: &mut ChaCha8Rng) -> C {
    C::from_polar(rng.gen_range(0.0f64..1.0).sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Random symbol with bandwidth at most `band` and coefficients in the unit disk.
fn random_symbol(rng: &mut ChaCha8Rng, band: i64) -> FiniteSymbol {
    loop {
        let a = rng.gen_range(-band..=band);
        let b = rng.gen_range(a..=band);
        let coeffs: Vec<C> = (a..=b).map(|_| unit_disk(rng)).collect();
        let s = FiniteSymbol::new(a, coeffs);
        if !s.is_zero() {
            return s;
        }
    }
}

fn random_half_line_symbol(rng: &mut ChaCha8Rng, band: i64) -> FiniteSymbol {
    random_symbol(rng, band)
}

fn lpw(p: f64, kind: WeightKind, window: usize) -> SpaceSpec {
    SpaceSpec::lpw(p, make_weight(kind, window).unwrap()).unwrap()
}

/// `v` is the correctly rounded value of `num/den`.
fn is_correctly_rounded(v: f64, num: u64, den: u64) -> bool {
    if num == 0 {
        return v == 0.0;
    }
    // v = m 2^e exactly; compare |m 2^e den - num| with half an ulp times den.
    let bits = v.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64 - 1075;
    let mant = ((bits & ((1u64 << 52) - 1)) | (1u64 << 52)) as i128;
    let shift = -exp as u32;
    let lhs = (mant * den as i128 - ((num as i128) << shift)).abs();
    // Half an ulp is 2^(e-1); scaled by 2^-e this is 1/2, so compare 2 lhs <= den.
    2 * lhs <= den as i128
}

fn criterion_1() -> Outcome {
    let mut checked = 0;
    for k in 0..=64u64 {
        let c = fejer_coefficients(k);
        for (i, v) in c.iter().enumerate() {
            let n = i as i64 - k as i64;
            let (num, den) = fejer_ratio(k, n);
            if (num, den) != (k + 1 - n.unsigned_abs(), k + 1) || !is_correctly_rounded(*v, num, den) {
                return outcome(false, format!("k={k} n={n}: {v} != {num}/{den}"));
            }
            checked += 1;
        }
    }
    outcome(true, format!("{checked} coefficients equal (k+1-|n|)/(k+1) exactly"))
}

fn criterion_2() -> Outcome {
    let unit = || make_weight(WeightKind::Unit, 32).unwrap();
    let spaces = vec![
        ("l1", SpaceSpec::lpw(1.0, unit()).unwrap()),
        ("l2", SpaceSpec::lpw(2.0, unit()).unwrap()),
        ("orlicz x^3", SpaceSpec::orlicz(FunctionDescriptor::Power { p: 3.0 }, unit()).unwrap()),
        (
            "varexp 2+1/(1+|n|)",
            SpaceSpec::var_exp(ExponentMap::new(ExponentKind::Decaying { base: 2.0, amplitude: 1.0 }, 32).unwrap())
                .unwrap(),
        ),
        ("fourier sup", SpaceSpec::fourier_sup()),
    ];
    let xs = cesaro_samples(2024, 100);
    let mut worst_final = 0.0f64;
    for (label, space) in &spaces {
        for x in &xs {
            let nx = norm(space, x).unwrap();
            let mut prev = f64::INFINITY;
            for k in [20u64, 40, 80, 160, 20_000] {
                let err = norm(space, &cesaro_mean(x, k).sub(x)).unwrap();
                let rate = norm(space, &x.map_indexed(|n, c| c * (n.abs() as f64 / (k as f64 + 1.0)))).unwrap();
                if err > rate * (1.0 + 1e-9) + 1e-300 {
                    return outcome(false, format!("{label} k={k}: error {err} above rate {rate}"));
                }
                if space.is_lattice() && err > (20.0 / (k as f64 + 1.0)) * nx * (1.0 + 1e-9) {
                    return outcome(false, format!("{label} k={k}: error {err} above 20/(k+1) ||x||"));
                }
                if k <= 160 && err >= prev {
                    return outcome(false, format!("{label} k={k}: not decreasing ({err} after {prev})"));
                }
                prev = err;
                if k == 20_000 {
                    worst_final = worst_final.max(err / nx);
                    if err > 1e-3 * nx {
                        return outcome(false, format!("{label}: k=20000 error {:.3e} ||x||", err / nx));
                    }
                }
            }
        }
    }
    outcome(true, format!("5 spaces x 100 sequences; worst k=20000 error {worst_final:.3e} ||x||"))
}

fn criterion_3() -> Outcome {
    let geo = lpw(2.0, WeightKind::Geometric { r0: 2.0 }, 300);
    let f = spectral_radius(&geo, Direction::Forward, 32, 256).unwrap();
    let b = spectral_radius(&geo, Direction::Backward, 32, 256).unwrap();
    if (f.lower, f.upper, b.lower, b.upper) != (2.0, 2.0, 0.5, 0.5) {
        return outcome(false, format!("geometric radii {f:?} {b:?}"));
    }
    let e = std::f64::consts::E;
    let exp = lpw(2.0, WeightKind::ExpAbs { alpha: 1.0 }, 300);
    let f = spectral_radius(&exp, Direction::Forward, 32, 256).unwrap();
    let b = spectral_radius(&exp, Direction::Backward, 32, 256).unwrap();
    let within = |v: f64| (e - 1e-9..=e + 1e-9).contains(&v);
    if !(within(f.lower) && within(f.upper) && within(b.lower) && within(b.upper)) {
        return outcome(false, format!("exp_abs radii {f:?} {b:?}"));
    }
    let a = spectrum_annulus(&exp, &SpectrumParams::default()).unwrap();
    if (a.r_in - 1.0 / e).abs() > 1e-9 || (a.r_out - e).abs() > 1e-9 {
        return outcome(false, format!("annulus {a:?}"));
    }
    outcome(
        true,
        format!("rho(S)=2, rho(S^-1)=1/2; exp_abs radii {:.12}; annulus [{:.12}, {:.12}]", f.upper, a.r_in, a.r_out),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let spaces = [
        ("unit", lpw(2.0, WeightKind::Unit, BIG_WINDOW)),
        ("e^{|n|/2}", lpw(2.0, WeightKind::ExpAbs { alpha: 0.5 }, BIG_WINDOW)),
    ];
    let mut total = 0;
    let mut worst_gap = f64::NEG_INFINITY;
    for (label, space) in &spaces {
        let a = spectrum_annulus(space, &SpectrumParams::default()).unwrap();
        let radii = auto_radii(&a);
        let mut rng_s = ChaCha8Rng::seed_from_u64(rng.gen());
        for _ in 0..50 {
            let phi = random_symbol(&mut rng_s, 5);
            let reports = match check_symbol_bound(&phi, space, &radii, 256, 1e-6) {
                Ok(r) => r,
                Err(e) => return outcome(false, format!("{label}: {e}")),
            };
            for r in &reports {
                total += 1;
                worst_gap = worst_gap.max(r.sup_hi / r.norm_lower - 1.0);
                if r.verdict != Verdict::Confirmed {
                    return outcome(false, format!("{label} r={}: {:?} for {phi:?}: {r:?}", r.radius, r.verdict));
                }
            }
        }
    }
    outcome(true, format!("{total}/{total} confirmed; worst sup_hi/norm_lower - 1 = {worst_gap:.2e}"))
}

fn criterion_5() -> Outcome {
    let unit = lpw(2.0, WeightKind::Unit, 4096);
    let r = check_symbol_bound(&FiniteSymbol::monomial(1), &unit, &[2.0], 64, 1e-6).unwrap();
    let r = &r[0];
    let ok = r.verdict == Verdict::ViolatedOutsideSpectrum && (r.sup_lo - 2.0).abs() < 1e-9 && r.norm_upper == 1.0;
    outcome(ok, format!("verdict {:?}, sup {:.12}, norm {}", r.verdict, r.sup_lo, r.norm_upper))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checks = 0;
    for _ in 0..100 {
        let r0 = rng.gen_range(0.5..2.0);
        let space = lpw(1.0, WeightKind::Geometric { r0 }, 64);
        let phi = random_symbol(&mut rng, 8);
        let full = operator_norm_upper(&phi, &space);
        for k in 0..=20 {
            let approx = operator_norm_upper(&fejer_approximant(&phi, k), &space);
            checks += 1;
            if approx > full * (1.0 + 1e-12) {
                return outcome(false, format!("k={k}, r0={r0}: {approx} > {full}"));
            }
        }
    }
    outcome(true, format!("{checks} exact l1 norms satisfy ||M_k|| <= ||M||"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..100 {
        let phi = random_half_line_symbol(&mut rng, 16);
        let t = ToeplitzOp::Symbol(phi.clone());
        if let Some(ce) = check_toeplitz_identity(&t, 32).unwrap() {
            return outcome(false, format!("symbol {i}: identity fails {ce:?}"));
        }
        let coeffs = extract_symbol_coeffs(&t, 16).unwrap();
        if coeffs != phi {
            return outcome(false, format!("symbol {i}: extracted {coeffs:?} != {phi:?}"));
        }
    }
    let rank_one = ToeplitzOp::black_box(40, |u: &SeqWindow| SeqWindow::basis(0).scale(u.get(0)));
    match check_toeplitz_identity(&rank_one, 8).unwrap() {
        Some(ce) if ce.j == 0 => outcome(true, "100 symbols pass identity and extraction; rank-one map fails at j=0"),
        other => outcome(false, format!("rank-one map: {other:?}")),
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let spaces = [
        ("unit", lpw(2.0, WeightKind::Unit, BIG_WINDOW).on_half_line(), (1.0, 1.0)),
        ("2^n", lpw(2.0, WeightKind::Geometric { r0: 2.0 }, BIG_WINDOW).on_half_line(), (2.0, 2.0)),
    ];
    let mut total = 0;
    for (label, space, (ri, ro)) in &spaces {
        let a = spectrum_annulus(space, &SpectrumParams::default()).unwrap();
        if (a.r_in, a.r_out) != (*ri, *ro) {
            return outcome(false, format!("{label}: annulus {a:?}"));
        }
        let radii = auto_radii(&a);
        for _ in 0..50 {
            let phi = random_half_line_symbol(&mut rng, 5);
            let chk =
                match check_toeplitz_bound_with(&phi, space, &radii, &annulus::multiplier::CheckParams::new(256, 1e-6))
                {
                    Ok(c) => c,
                    Err(e) => return outcome(false, format!("{label}: {e}")),
                };
            if chk.region != Region::Omega || chk.region_uncertain {
                return outcome(false, format!("{label}: region {:?} uncertain={}", chk.region, chk.region_uncertain));
            }
            for r in &chk.reports {
                total += 1;
                if r.verdict != Verdict::Confirmed {
                    return outcome(false, format!("{label} r={}: {r:?} for {phi:?}", r.radius));
                }
            }
        }
    }
    outcome(true, format!("{total}/{total} confirmed; region Omega with [1,1] and [2,2]"))
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_annulus")
}

fn run_cli(scenario: &str, config: &str, dir: &Path) -> (i32, String) {
    std::fs::write(dir.join("config.toml"), config).unwrap();
    // Relative paths keep the echoed config identical across directories.
    let out = Command::new(bin())
        .current_dir(dir)
        .args([scenario, "--config", "config.toml", "--out", "out"])
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run_cli("counterexample", "scenario = \"counterexample\"\n", dir.path());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/report.json")).unwrap()).unwrap();
    let fwd = json["shifts"]["forward"]["status"].as_str().unwrap_or("");
    let bwd = json["shifts"]["backward"]["status"].as_str().unwrap_or("");
    let growth: Vec<(f64, f64)> = json["growth"]
        .as_array()
        .map(|a| a.iter().map(|g| (g["radius"].as_f64().unwrap(), g["sup_abs"].as_f64().unwrap())).collect())
        .unwrap_or_default();
    let diags: Vec<String> = json["diagnostics"]
        .as_array()
        .map(|a| a.iter().map(|d| d.as_str().unwrap_or("").to_string()).collect())
        .unwrap_or_default();
    let expected = [(1.0, 1.0), (2.0, 4.0), (4.0, 16.0)];
    let growth_ok =
        growth.len() == 3 && growth.iter().zip(expected).all(|(g, e)| g.0 == e.0 && (g.1 - e.1).abs() < 1e-9);
    let ok = code == 0
        && fwd == "unbounded"
        && bwd == "unbounded"
        && diags.iter().any(|d| d.starts_with("BothShiftsUnbounded"))
        && diags.iter().any(|d| d == "spec(S)=ℂ, no L∞ bound possible")
        && growth_ok;
    outcome(
        ok,
        format!(
            "exit {code}, shifts {fwd}/{bwd}, |z^2| at R=1,2,4: {:?}",
            growth.iter().map(|g| g.1).collect::<Vec<_>>()
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let phi = random_symbol(&mut rng, 12);
        let off = rng.gen_range(-30..30);
        let len = rng.gen_range(1..40);
        let x = SeqWindow::new(off, (0..len).map(|_| unit_disk(&mut rng)).collect());
        let (a, b) = (convolve(&phi, &x), naive_convolve(&phi, &x));
        if a.offset() != b.offset() || a.len() != b.len() {
            return outcome(false, format!("support mismatch for {phi:?} * {x:?}"));
        }
        for (u, v) in a.coeffs().iter().zip(b.coeffs()) {
            let rel = (u - v).norm() / v.norm().max(1e-300);
            if (u - v).norm() > 1e-13 * v.norm().max(1.0) {
                return outcome(false, format!("convolve differs by {rel:e}"));
            }
            worst = worst.max((u - v).norm());
        }
    }
    let unit = lpw(2.0, WeightKind::Unit, 64).on_half_line();
    let geo = lpw(2.0, WeightKind::Geometric { r0: 1.3 }, 64).on_half_line();
    for i in 0..50 {
        let phi = random_symbol(&mut rng, 5);
        let space = if i % 2 == 0 { &unit } else { &geo };
        let sec = toeplitz_finite_section(&phi, space, 7).unwrap();
        let main = operator_norm(&sec, NormMethod::SvdL2).unwrap().lower;
        let oracle = naive_operator_norm(&sec.to_dense(), 2.0, 64, i).unwrap().lower;
        if oracle > main + 1e-8 {
            return outcome(false, format!("section {i}: oracle {oracle} > svd {main}"));
        }
    }
    let config = r#"
scenario = "multiplier-check"
[space]
family = "lpw"
p = 2.0
weight = { kind = "exp_abs", alpha = 0.5, window = 4096 }
[symbol]
n_min = -1
coeffs = ["0.5,0.25", "1,0", "-0.3,0.6"]
[run]
radii = "auto"
window = 32
seed = 42
"#;
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (c1, _) = run_cli("multiplier-check", config, d1.path());
    let (c2, _) = run_cli("multiplier-check", config, d2.path());
    let read = |d: &Path, f: &str| std::fs::read(d.join("out").join(f)).unwrap();
    let j1 = strip_timing(&String::from_utf8(read(d1.path(), "report.json")).unwrap()).unwrap();
    let j2 = strip_timing(&String::from_utf8(read(d2.path(), "report.json")).unwrap()).unwrap();
    let mut csvs = 0;
    for i in 0.. {
        let name = format!("circle_{i:03}.csv");
        if !d1.path().join("out").join(&name).exists() {
            break;
        }
        if read(d1.path(), &name) != read(d2.path(), &name) {
            return outcome(false, format!("{name} differs between runs"));
        }
        csvs += 1;
    }
    let ok = c1 == 0 && c2 == 0 && j1 == j2 && csvs == 3;
    outcome(ok, format!("1000 convolutions (max abs diff {worst:.1e}); 50 sections oracle <= svd; JSON+{csvs} CSV byte-stable (exit {c1},{c2})"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Fejér exactness", criterion_1, Duration::from_secs(1)),
        ("Cesàro convergence", criterion_2, Duration::from_secs(10)),
        ("spectral radii and annulus", criterion_3, Duration::from_secs(5)),
        ("symbol bound on circles (two-sided)", criterion_4, Duration::from_secs(60)),
        ("non-vacuity outside the spectrum", criterion_5, Duration::from_secs(1)),
        ("Fejér approximants do not increase the l1 norm", criterion_6, Duration::from_secs(5)),
        ("Toeplitz identity and symbol extraction", criterion_7, Duration::from_secs(5)),
        ("symbol bound on circles (half-line)", criterion_8, Duration::from_secs(60)),
        ("remark1 counterexample", criterion_9, Duration::from_secs(2)),
        ("oracle equivalence and byte-stable output", criterion_10, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let o = f();
        let dt = t0.elapsed();
        let in_time = dt <= *budget;
        let pass = o.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "{} [{:>2}] {name} ({:.2} s, budget {} s): {}{}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            dt.as_secs_f64(),
            budget.as_secs(),
            o.detail,
            if in_time { "" } else { " [over budget]" }
        );
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
