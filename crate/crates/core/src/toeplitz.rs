//! Toeplitz operators on half-line spaces: `T u = P^+(T^ * u)`.

use crate::error::{Error, Result};
use crate::multiplier::{
    convolve, onesided_from, run_bound_reports, BoundReport, CheckParams, FiniteSection, OnesidednessDiagnostic,
};
use crate::seq::{FiniteSymbol, SeqWindow};
use crate::shift_spectrum::{shift_apply, spectrum_report, Annulus, Boundedness};
use crate::spaces::SpaceSpec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Default number of basis vectors used for symbol extraction.
pub const DEFAULT_EXTRACTION_BAND: usize = 32;

/// Zero all negative-index coefficients.
pub fn project_plus(x: &SeqWindow) -> SeqWindow {
    x.restrict(0, i64::MAX)
}

/// `P^+(phi * u)` for `u` supported in `Z+`.
pub fn toeplitz_apply(phi: &FiniteSymbol, u: &SeqWindow) -> Result<SeqWindow> {
    if let Some((lo, _)) = u.support() {
        if lo < 0 {
            return Err(Error::NegativeSupportInput { index: lo });
        }
    }
    Ok(project_plus(&convolve(phi, u)))
}

pub type BlackBoxFn = Arc<dyn Fn(&SeqWindow) -> SeqWindow + Send + Sync>;

/// A Toeplitz operator given by its symbol or by its action on `e_0..e_B`.
#[derive(Clone)]
pub enum ToeplitzOp {
    Symbol(FiniteSymbol),
    BlackBox { action: BlackBoxFn, band_limit: usize },
}

impl fmt::Debug for ToeplitzOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ToeplitzOp::Symbol(s) => f.debug_tuple("Symbol").field(s).finish(),
            ToeplitzOp::BlackBox { band_limit, .. } => {
                f.debug_struct("BlackBox").field("band_limit", band_limit).finish_non_exhaustive()
            }
        }
    }
}

impl ToeplitzOp {
    pub fn black_box<F>(band_limit: usize, action: F) -> Self
    where
        F: Fn(&SeqWindow) -> SeqWindow + Send + Sync + 'static,
    {
        ToeplitzOp::BlackBox { action: Arc::new(action), band_limit }
    }

    /// `T e_j`.
    pub fn apply_basis(&self, j: usize) -> Result<SeqWindow> {
        match self {
            ToeplitzOp::Symbol(phi) => toeplitz_apply(phi, &SeqWindow::basis(j as i64)),
            ToeplitzOp::BlackBox { action, band_limit } => {
                if j > *band_limit {
                    Err(Error::BandExceedsBlackBox { band: j, limit: *band_limit })
                } else {
                    Ok(action(&SeqWindow::basis(j as i64)))
                }
            }
        }
    }
}

/// `T^(n) = (T e_0)(n)` and `T^(-n) = (T e_n)(0)` for `0 <= n <= band`.
pub fn extract_symbol_coeffs(t: &ToeplitzOp, band: usize) -> Result<FiniteSymbol> {
    let b = band as i64;
    let te0 = t.apply_basis(0)?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * band + 1];
    for n in 0..=b {
        coeffs[(b + n) as usize] = te0.get(n);
    }
    for n in 1..=band {
        coeffs[band - n] = t.apply_basis(n)?.get(0);
    }
    Ok(FiniteSymbol::new(-b, coeffs))
}

/// First coefficient where `S_{-1} T S_1 e_j` and `T e_j` differ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCounterexample {
    pub j: usize,
    pub index: i64,
    pub lhs: Complex64,
    pub rhs: Complex64,
}

/// Check `S_{-1} T S_1 e_j = T e_j` for `j <= n_max`, coefficientwise to `1e-12`.
pub fn check_toeplitz_identity(t: &ToeplitzOp, n_max: usize) -> Result<Option<IdentityCounterexample>> {
    for j in 0..=n_max {
        // S_1 e_j = e_{j+1}.
        let lhs = shift_apply(&t.apply_basis(j + 1)?, -1, true);
        let rhs = t.apply_basis(j)?;
        let lo = lhs.offset().min(rhs.offset());
        let hi = (lhs.offset() + lhs.len() as i64).max(rhs.offset() + rhs.len() as i64);
        for index in lo..hi {
            let (a, b) = (lhs.get(index), rhs.get(index));
            if (a - b).norm() > 1e-12 {
                return Ok(Some(IdentityCounterexample { j, index, lhs: a, rhs: b }));
            }
        }
    }
    Ok(None)
}

/// Matrix of `T_phi` on `span{e_0..e_N}`.
pub fn toeplitz_finite_section(phi: &FiniteSymbol, space: &SpaceSpec, n: usize) -> Result<FiniteSection> {
    if !space.half_line {
        return Err(Error::InvalidSpaceParams("Toeplitz sections need a half-line space".into()));
    }
    if phi.bandwidth() > n as i64 {
        return Err(Error::BandwidthExceedsWindow { band: phi.bandwidth(), window: n });
    }
    FiniteSection::new(phi, space, 0, n as i64)
}

/// Which shifts are bounded on the half-line space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    /// Both `S_1` and `S_{-1}` bounded.
    Omega,
    /// `S_1` unbounded, `S_{-1}` bounded.
    U,
    /// `S_1` bounded, `S_{-1}` unbounded.
    V,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzCheck {
    pub annulus: Annulus,
    pub region: Region,
    /// Set when either classification was inconclusive.
    pub region_uncertain: bool,
    pub onesided: OnesidednessDiagnostic,
    pub reports: Vec<BoundReport>,
}

/// Check `sup_{|z|=r} |phi~(z)| <= ||T_phi||` on each circle.
pub fn check_toeplitz_bound_with(
    phi: &FiniteSymbol,
    space: &SpaceSpec,
    radii: &[f64],
    params: &CheckParams,
) -> Result<ToeplitzCheck> {
    if !space.half_line {
        return Err(Error::InvalidSpaceParams("Toeplitz checks need a half-line space".into()));
    }
    if phi.bandwidth() > params.n as i64 {
        return Err(Error::BandwidthExceedsWindow { band: phi.bandwidth(), window: params.n });
    }
    let spectrum = spectrum_report(space, &params.spectrum.into())?;
    let (fu, bu) = (spectrum.forward.is_unbounded(), spectrum.backward.is_unbounded());
    let region = match (fu, bu) {
        (true, false) => Region::U,
        (false, true) => Region::V,
        _ => Region::Omega,
    };
    let region_uncertain = matches!(spectrum.forward.status, Boundedness::Inconclusive)
        || matches!(spectrum.backward.status, Boundedness::Inconclusive);
    let onesided = onesided_from(fu, bu, phi);
    let section = |n: usize| -> Result<FiniteSection> {
        let hi = space.window().map(|(_, b)| b).unwrap_or(i64::MAX);
        FiniteSection::new(phi, space, 0, (n as i64).min(hi))
    };
    let reports = run_bound_reports(phi, space, radii, &spectrum.annulus, params, &section)?;
    Ok(ToeplitzCheck { annulus: spectrum.annulus, region, region_uncertain, onesided, reports })
}

/// [`check_toeplitz_bound_with`] with section size `n` and tolerance `tol`.
pub fn check_toeplitz_bound(
    phi: &FiniteSymbol,
    space: &SpaceSpec,
    radii: &[f64],
    n: usize,
    tol: f64,
) -> Result<Vec<BoundReport>> {
    check_toeplitz_bound_with(phi, space, radii, &CheckParams::new(n, tol)).map(|c| c.reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::{operator_norm, NormMethod, Verdict};
    use crate::spaces::{make_weight, WeightKind};
    use approx::assert_relative_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn half_l2(kind: WeightKind, window: usize) -> SpaceSpec {
        SpaceSpec::lpw(2.0, make_weight(kind, window).unwrap()).unwrap().on_half_line()
    }

    #[test]
    fn projection_examples() {
        let x = SeqWindow::basis(-1).add(&SeqWindow::basis(0));
        assert_eq!(project_plus(&x), SeqWindow::basis(0));
        let y = SeqWindow::from_real(2, &[1.0, 2.0]);
        assert_eq!(project_plus(&y), y);
        assert_eq!(project_plus(&project_plus(&x)), project_plus(&x));
    }

    #[test]
    fn apply_examples() {
        let m1 = FiniteSymbol::monomial(-1);
        assert!(toeplitz_apply(&m1, &SeqWindow::basis(0)).unwrap().is_zero());
        assert_eq!(toeplitz_apply(&m1, &SeqWindow::basis(1)).unwrap(), SeqWindow::basis(0));
        let phi = FiniteSymbol::from_real(-1, &[1.0, 2.0, 3.0]);
        assert_eq!(toeplitz_apply(&phi, &SeqWindow::basis(0)).unwrap(), SeqWindow::from_real(0, &[2.0, 3.0]));
        assert!(matches!(toeplitz_apply(&phi, &SeqWindow::basis(-2)), Err(Error::NegativeSupportInput { index: -2 })));
    }

    #[test]
    fn extraction_examples() {
        let phi = FiniteSymbol::from_real(-1, &[1.0, 2.0, 3.0]);
        assert_eq!(extract_symbol_coeffs(&ToeplitzOp::Symbol(phi.clone()), 4).unwrap(), phi);
        let id = ToeplitzOp::black_box(8, |u: &SeqWindow| u.clone());
        assert_eq!(extract_symbol_coeffs(&id, 8).unwrap(), FiniteSymbol::monomial(0));
        let s1 = ToeplitzOp::black_box(8, |u: &SeqWindow| shift_apply(u, 1, true));
        assert_eq!(extract_symbol_coeffs(&s1, 8).unwrap(), FiniteSymbol::monomial(1));
        assert!(matches!(extract_symbol_coeffs(&s1, 9), Err(Error::BandExceedsBlackBox { band: 9, limit: 8 })));
    }

    #[test]
    fn identity_examples() {
        let phi = FiniteSymbol::from_real(-2, &[1.0, -2.0, 0.5, 3.0]);
        assert_eq!(check_toeplitz_identity(&ToeplitzOp::Symbol(phi), 16).unwrap(), None);
        let rank_one = ToeplitzOp::black_box(8, |u: &SeqWindow| SeqWindow::basis(0).scale(u.get(0)));
        let ce = check_toeplitz_identity(&rank_one, 4).unwrap().unwrap();
        assert_eq!((ce.j, ce.index, ce.lhs, ce.rhs), (0, 0, c(0.0), c(1.0)));
        let id = ToeplitzOp::black_box(8, |u: &SeqWindow| u.clone());
        assert_eq!(check_toeplitz_identity(&id, 7).unwrap(), None);
    }

    #[test]
    fn section_examples() {
        let unit = half_l2(WeightKind::Unit, 8);
        let id = toeplitz_finite_section(&FiniteSymbol::monomial(0), &unit, 3).unwrap().to_dense();
        assert_eq!(id, nalgebra::DMatrix::identity(4, 4));
        let s = toeplitz_finite_section(&FiniteSymbol::monomial(1), &unit, 2).unwrap().to_dense();
        assert_eq!((s[(1, 0)], s[(2, 1)], s[(0, 0)]), (c(1.0), c(1.0), c(0.0)));
        let phi = FiniteSymbol::from_real(-1, &[1.0, 2.0, 3.0]);
        let m = toeplitz_finite_section(&phi, &unit, 1).unwrap().to_dense();
        assert_eq!(m, nalgebra::DMatrix::from_row_slice(2, 2, &[c(2.0), c(1.0), c(3.0), c(2.0)]));
    }

    #[test]
    fn bound_examples() {
        let unit = half_l2(WeightKind::Unit, 8192);
        let phi = FiniteSymbol::from_real(0, &[1.0, 1.0]);
        let chk = check_toeplitz_bound_with(&phi, &unit, &[1.0], &CheckParams::new(64, 1e-6)).unwrap();
        assert_eq!(chk.region, Region::Omega);
        assert_eq!(chk.reports[0].verdict, Verdict::Confirmed, "{:?}", chk.reports);
        let r = check_toeplitz_bound(&FiniteSymbol::monomial(1), &unit, &[2.0], 64, 1e-6).unwrap();
        assert_eq!(r[0].verdict, Verdict::ViolatedOutsideSpectrum);
        let g = half_l2(WeightKind::Geometric { r0: 2.0 }, 4096);
        let chk =
            check_toeplitz_bound_with(&FiniteSymbol::monomial(0), &g, &[2.0], &CheckParams::new(8, 1e-6)).unwrap();
        assert_eq!((chk.annulus.r_in, chk.annulus.r_out), (2.0, 2.0));
        assert_eq!(chk.reports[0].verdict, Verdict::Confirmed);
    }

    #[test]
    fn section_norm_increases_to_symbol_sup() {
        let unit = half_l2(WeightKind::Unit, 200);
        let phi = FiniteSymbol::from_real(0, &[1.0, 1.0]);
        let mut prev = 0.0;
        for n in [4, 16, 64] {
            let v = operator_norm(&toeplitz_finite_section(&phi, &unit, n).unwrap(), NormMethod::SvdL2).unwrap().lower;
            assert!(v >= prev && v <= 2.0);
            prev = v;
        }
        assert_relative_eq!(prev, 2.0, max_relative = 1e-3);
    }

    #[test]
    fn factorial_half_line_is_region_u() {
        let f = SpaceSpec::lpw(2.0, make_weight(WeightKind::Factorial, 64).unwrap()).unwrap().on_half_line();
        let mut p = CheckParams::new(8, 1e-6);
        p.spectrum.window = 64;
        let chk = check_toeplitz_bound_with(&FiniteSymbol::monomial(-1), &f, &[1.0], &p).unwrap();
        assert_eq!(chk.region, Region::U);
        assert!(chk.onesided.compatible);
        assert_eq!(chk.annulus.r_out, f64::INFINITY);
    }
}
