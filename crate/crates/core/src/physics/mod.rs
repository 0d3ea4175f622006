//! Single-phonon relaxation model for the optical lines of group-IV vacancy
//! centers.
//!
//! Frequencies are ordinary frequencies in GHz, temperatures in K and
//! linewidths (FWHM) in MHz. Phonon couplings are stored in reduced form
//! `alpha = (2 pi)^3 * a`, where `a` is the coupling acting on angular
//! frequencies, so a broadening term reads `alpha * f^3 * n(f, T)` in GHz.

mod linewidth;
mod params;

pub use linewidth::{
    linewidth, linewidth_c, linewidth_d, linewidth_difference, temperature_threshold,
    LinewidthBreakdown, Threshold, Transition, VALIDITY_LIMIT_K,
};
pub use params::{EmitterParams, REFERENCE_ALPHA, SIV_ALPHA_ES};

use crate::error::{Error, Result};

/// Exact SI Planck constant, J s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Exact SI Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// `h / k_B` expressed in K per GHz.
pub const H_OVER_KB: f64 = PLANCK * 1.0e9 / BOLTZMANN;

const GHZ_TO_MHZ: f64 = 1.0e3;

/// Mean thermal phonon number at frequency `f` (GHz) and temperature `t` (K).
///
/// `n(f, 0)` is exactly zero. Large `h f / k_B T` underflows to zero and very
/// small ratios switch to the high-temperature series.
pub fn bose_occupation(f: f64, t: f64) -> Result<f64> {
    if !(f > 0.0) || !f.is_finite() {
        return Err(Error::domain(format!("frequency must be positive, got {f}")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!(
            "temperature must be nonnegative, got {t}"
        )));
    }
    Ok(occupation_unchecked(f, t))
}

pub(crate) fn occupation_unchecked(f: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let x = H_OVER_KB * f / t;
    if x > 700.0 {
        0.0
    } else if x < 1.0e-6 {
        1.0 / x - 0.5 + x / 12.0
    } else {
        1.0 / x.exp_m1()
    }
}

/// Phonon absorption (`gamma_up`) and emission (`gamma_down`) rates between
/// two split branches, both in MHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhononRates {
    pub gamma_up: f64,
    pub gamma_down: f64,
}

/// Single-phonon rates for a branch splitting `f_split` (GHz) with reduced
/// coupling `alpha` (GHz^-2).
pub fn phonon_rates(f_split: f64, t: f64, alpha: f64) -> Result<PhononRates> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::domain(format!(
            "coupling must be nonnegative, got {alpha}"
        )));
    }
    let n = bose_occupation(f_split, t)?;
    let scale = cubic_broadening(f_split, alpha);
    Ok(PhononRates {
        gamma_up: scale * n,
        gamma_down: scale * (n + 1.0),
    })
}

/// Spontaneous (zero-temperature) phonon emission rate `alpha * f^3` in MHz.
/// Accepts `f = 0`, where it vanishes.
pub fn cubic_broadening(f: f64, alpha: f64) -> f64 {
    alpha * f * f * f * GHZ_TO_MHZ
}

/// Transform-limited FWHM (MHz) for a radiative lifetime in ns.
pub fn transform_limit(lifetime_ns: f64) -> Result<f64> {
    if !(lifetime_ns > 0.0) || !lifetime_ns.is_finite() {
        return Err(Error::domain(format!(
            "lifetime must be positive, got {lifetime_ns}"
        )));
    }
    Ok(1.0e3 / (2.0 * std::f64::consts::PI * lifetime_ns))
}

/// Radiative lifetime (ns) whose transform limit is `fwhm_mhz`.
pub fn lifetime_from_linewidth(fwhm_mhz: f64) -> Result<f64> {
    if !(fwhm_mhz > 0.0) || !fwhm_mhz.is_finite() {
        return Err(Error::domain(format!(
            "linewidth must be positive, got {fwhm_mhz}"
        )));
    }
    Ok(1.0e3 / (2.0 * std::f64::consts::PI * fwhm_mhz))
}

/// Lorentzian line with peak height `amplitude` above `offset`.
pub fn lorentzian(
    detuning: f64,
    center: f64,
    fwhm: f64,
    amplitude: f64,
    offset: f64,
) -> Result<f64> {
    if !(fwhm > 0.0) {
        return Err(Error::domain(format!("fwhm must be positive, got {fwhm}")));
    }
    if !(amplitude >= 0.0) || !(offset >= 0.0) {
        return Err(Error::domain("amplitude and offset must be nonnegative"));
    }
    Ok(offset + amplitude * lorentzian_profile(detuning - center, fwhm))
}

/// Unit-height Lorentzian profile at distance `delta` from the center.
#[inline]
pub fn lorentzian_profile(delta: f64, fwhm: f64) -> f64 {
    let hw2 = 0.25 * fwhm * fwhm;
    hw2 / (delta * delta + hw2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn h_over_kb_value() {
        assert!(rel(H_OVER_KB, 0.047_992_430_733_662_21) < 1e-14);
    }

    #[test]
    fn occupation_is_one_at_ln2() {
        let f = 100.0;
        let t = H_OVER_KB * f / std::f64::consts::LN_2;
        assert!(rel(bose_occupation(f, t).unwrap(), 1.0) < 1e-12);
    }

    #[test]
    fn occupation_limits() {
        assert_eq!(bose_occupation(3870.0, 0.0).unwrap(), 0.0);
        assert_eq!(bose_occupation(3870.0, 1e-3).unwrap(), 0.0);
        // mpmath at 40 digits: 1.049251973810904759808e-5
        let n = bose_occupation(3870.0, 16.2).unwrap();
        assert!(rel(n, 1.049_251_973_810_904_8e-5) < 1e-12);
        // high-temperature branch matches the exact expression where both are accurate
        let f = 1e-3;
        let x = 8e-7f64;
        let exact = 1.0 / x.exp_m1();
        assert!(rel(bose_occupation(f, H_OVER_KB * f / x).unwrap(), exact) < 1e-10);
        let tiny = bose_occupation(1e-6, 300.0).unwrap();
        assert!(rel(tiny, 300.0 / (H_OVER_KB * 1e-6) - 0.5) < 1e-12);
    }

    #[test]
    fn occupation_rejects_bad_arguments() {
        assert!(bose_occupation(0.0, 4.0).is_err());
        assert!(bose_occupation(-1.0, 4.0).is_err());
        assert!(bose_occupation(10.0, -0.1).is_err());
        assert!(bose_occupation(f64::NAN, 4.0).is_err());
    }

    #[test]
    fn rates_zero_temperature() {
        let r = phonon_rates(821.0, 0.0, REFERENCE_ALPHA).unwrap();
        assert_eq!(r.gamma_up, 0.0);
        assert!(rel(r.gamma_down, REFERENCE_ALPHA * 821f64.powi(3) * 1e3) < 1e-15);
    }

    #[test]
    fn rate_difference_is_cubic() {
        for t in [0.5, 6.2, 16.0, 100.0] {
            let r = phonon_rates(3870.0, t, REFERENCE_ALPHA).unwrap();
            // 7.51e-9 * 3870^3 GHz = 435.28412853 GHz
            assert!(rel(r.gamma_down - r.gamma_up, 435_284.128_53) < 1e-9);
        }
        let r = phonon_rates(50.0, 4.0, REFERENCE_ALPHA).unwrap();
        assert!((r.gamma_down - r.gamma_up - 0.938_75).abs() < 1e-9);
        assert!(phonon_rates(50.0, 4.0, -1.0).is_err());
    }

    #[test]
    fn transform_limit_values() {
        assert!((transform_limit(4.4).unwrap() - 36.17).abs() < 0.005);
        assert!((transform_limit(5.5).unwrap() - 28.94).abs() < 0.005);
        assert!(transform_limit(0.0).is_err());
        assert!(lifetime_from_linewidth(-3.0).is_err());
        for tau in [0.1, 1.7, 4.4, 5.5, 1234.5] {
            let back = lifetime_from_linewidth(transform_limit(tau).unwrap()).unwrap();
            assert!(rel(back, tau) < 1e-12);
        }
    }

    #[test]
    fn lorentzian_shape() {
        let (c, w, a, b) = (12.0, 38.8, 1000.0, 10.0);
        assert_eq!(lorentzian(c, c, w, a, b).unwrap(), a + b);
        assert!((lorentzian(c + w / 2.0, c, w, a, b).unwrap() - (a / 2.0 + b)).abs() < 1e-9);
        assert!((lorentzian(c - w / 2.0, c, w, a, b).unwrap() - (a / 2.0 + b)).abs() < 1e-9);
        assert!(lorentzian(0.0, 0.0, 0.0, a, b).is_err());
        assert!(lorentzian(0.0, 0.0, 1.0, -1.0, b).is_err());
    }

    #[test]
    fn lorentzian_area() {
        // substitution x = (w/2) tan(theta) maps the real line onto (-pi/2, pi/2)
        let (w, a) = (38.8, 1000.0);
        let n = 200_000;
        let h = std::f64::consts::PI / n as f64;
        let mut area = 0.0;
        for k in 0..n {
            let theta = -std::f64::consts::FRAC_PI_2 + (k as f64 + 0.5) * h;
            let x = 0.5 * w * theta.tan();
            let dx = 0.5 * w / theta.cos().powi(2);
            area += lorentzian(x, 0.0, w, a, 0.0).unwrap() * dx * h;
        }
        assert!(rel(area, a * std::f64::consts::PI * w / 2.0) < 1e-9);
    }

    #[test]
    fn cubic_broadening_vanishes_at_zero_splitting() {
        assert_eq!(cubic_broadening(0.0, REFERENCE_ALPHA), 0.0);
    }
}
