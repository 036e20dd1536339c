//! Frozen reference values from an independent 40-digit computation
//! (arbitrary-precision SVD, root finding and dense scans).

use annulus::multiplier::{
    multiplier_finite_section, operator_norm, operator_norm_upper, symbol_sup_on_circle, NormMethod,
};
use annulus::shift_spectrum::{spectral_radius, Direction};
use annulus::spaces::{make_weight, norm, ExponentKind, ExponentMap, FunctionDescriptor, SpaceSpec, WeightKind};
use annulus::toeplitz::toeplitz_finite_section;
use annulus::{FiniteSymbol, SeqWindow};
use approx::assert_relative_eq;
use num_complex::Complex64;

type C = Complex64;

fn unit(window: usize) -> SpaceSpec {
    SpaceSpec::lpw(2.0, make_weight(WeightKind::Unit, window).unwrap()).unwrap()
}

#[test]
fn identity_plus_shift_section() {
    let sec = multiplier_finite_section(&FiniteSymbol::from_real(0, &[1.0, 1.0]), &unit(16), 3).unwrap();
    let v = operator_norm(&sec, NormMethod::SvdL2).unwrap();
    assert_relative_eq!(v.lower, 1.956_295_201_467_611, max_relative = 1e-14);
    assert_relative_eq!(v.upper, v.lower);
}

#[test]
fn weighted_section_svd() {
    let space = SpaceSpec::lpw(2.0, make_weight(WeightKind::ExpAbs { alpha: 0.5 }, 16).unwrap()).unwrap();
    let phi = FiniteSymbol::from_real(-1, &[0.5, 1.0, 0.25]);
    let sec = multiplier_finite_section(&phi, &space, 4).unwrap();
    let v = operator_norm(&sec, NormMethod::SvdL2).unwrap().lower;
    assert_relative_eq!(v, 1.888_379_642_880_663, max_relative = 1e-13);
}

#[test]
fn toeplitz_two_by_two() {
    let sec =
        toeplitz_finite_section(&FiniteSymbol::from_real(-1, &[1.0, 2.0, 3.0]), &unit(16).on_half_line(), 1).unwrap();
    let v = operator_norm(&sec, NormMethod::SvdL2).unwrap().lower;
    assert_relative_eq!(v, 4.236_067_977_499_79, max_relative = 1e-14);
}

#[test]
fn luxemburg_norms() {
    let w = make_weight(WeightKind::Unit, 8).unwrap();
    let orlicz = SpaceSpec::orlicz(FunctionDescriptor::Power { p: 3.0 }, w).unwrap();
    let x = SeqWindow::from_real(0, &[1.0, 1.0]);
    assert_relative_eq!(norm(&orlicz, &x).unwrap(), 1.259_921_049_894_873, max_relative = 1e-11);

    let geo = make_weight(WeightKind::Geometric { r0: 2.0 }, 8).unwrap();
    let orlicz_geo = SpaceSpec::orlicz(FunctionDescriptor::Power { p: 3.0 }, geo).unwrap();
    let y = SeqWindow::from_real(0, &[1.0, 2.0]);
    assert_relative_eq!(norm(&orlicz_geo, &y).unwrap(), 2.571_281_590_658_235, max_relative = 1e-11);

    let q = ExponentMap::new(ExponentKind::Decaying { base: 2.0, amplitude: 1.0 }, 8).unwrap();
    let var = SpaceSpec::var_exp(q).unwrap();
    assert_relative_eq!(norm(&var, &x).unwrap(), 1.287_598_870_271_071, max_relative = 1e-11);
}

#[test]
fn weighted_lp_norm() {
    let space = SpaceSpec::lpw(3.0, make_weight(WeightKind::Geometric { r0: 2.0 }, 8).unwrap()).unwrap();
    let x = SeqWindow::from_real(0, &[1.0, 2.0, 3.0]);
    assert_relative_eq!(norm(&space, &x).unwrap(), 12.148_614_834_158_323, max_relative = 1e-14);
}

#[test]
fn fourier_sup_norm() {
    let x = SeqWindow::from_real(0, &[1.0, 0.5, -0.25]);
    let v = norm(&SpaceSpec::fourier_sup(), &x).unwrap();
    assert_relative_eq!(v, 1.397_542_485_937_369, max_relative = 1e-6);
    assert!(v <= 1.397_542_485_937_369 * (1.0 + 1e-15));
}

#[test]
fn symbol_sup_at_radius_two() {
    let phi = FiniteSymbol::new(-1, vec![C::new(-0.5, 0.0), C::new(1.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.3)]);
    let cert = symbol_sup_on_circle(&phi, 2.0, 1e-12).unwrap();
    let exact = 3.872_409_884_044_343;
    assert!(cert.lo <= exact * (1.0 + 1e-15) && exact <= cert.hi * (1.0 + 1e-15), "{cert:?}");
    assert!(cert.hi - cert.lo <= 1e-12);
}

#[test]
fn l1_geometric_multiplier_norm() {
    let space = SpaceSpec::lpw(1.0, make_weight(WeightKind::Geometric { r0: 1.5 }, 32).unwrap()).unwrap();
    let phi = FiniteSymbol::from_real(-1, &[0.5, 1.0, 0.25]);
    assert_relative_eq!(operator_norm_upper(&phi, &space), 1.708_333_333_333_333, max_relative = 1e-14);
}

#[test]
fn exp_abs_spectral_radius() {
    let space = SpaceSpec::lpw(2.0, make_weight(WeightKind::ExpAbs { alpha: 0.7 }, 300).unwrap()).unwrap();
    let r = spectral_radius(&space, Direction::Forward, 32, 256).unwrap();
    assert_relative_eq!(r.upper, 2.013_752_707_470_477, max_relative = 1e-12);
    assert_relative_eq!(r.lower, 2.013_752_707_470_477, max_relative = 1e-12);
}
