//! Physical constants, power unit conversions and carrier-derived wave
//! constants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Converts dBm to watts: `10^((p - 30) / 10)`.
pub fn dbm_to_watt<T: Real>(p_dbm: T) -> T {
    T::lit(10.0).powf((p_dbm - T::lit(30.0)) / T::lit(10.0))
}

/// Converts watts to dBm.
pub fn watt_to_dbm<T: Real>(p_watt: T) -> T {
    T::lit(10.0) * p_watt.log10() + T::lit(30.0)
}

/// How the free-space amplitude coefficient η is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EtaModel {
    /// η = λ0 / 4π, the Friis amplitude.
    #[default]
    Friis,
    /// η = 1, for normalized studies.
    Unit,
}

impl EtaModel {
    pub fn as_str(self) -> &'static str {
        match self {
            EtaModel::Friis => "friis",
            EtaModel::Unit => "unit",
        }
    }
}

/// Carrier-derived constants of the waveguide and the free-space link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveConstants<T> {
    /// Carrier frequency (Hz).
    pub f_c: T,
    /// Free-space wavelength (m).
    pub lambda0: T,
    /// Guided wavelength (m).
    pub lambda_g: T,
    /// Effective refractive index.
    pub n_eff: T,
    /// Free-space wavenumber (rad/m).
    pub k0: T,
    /// Guided wavenumber (rad/m).
    pub k_g: T,
    /// Path-loss amplitude coefficient (m); `eta / r` is a dimensionless
    /// amplitude.
    pub eta: T,
}

/// Builds [`WaveConstants`] for a carrier and waveguide index.
pub fn derive_wave_constants<T: Real>(f_c: T, n_eff: T, eta_model: EtaModel) -> Result<WaveConstants<T>> {
    if !(f_c.is_finite() && f_c > T::zero()) {
        return Err(Error::invalid(
            "f_c_hz",
            format!("must be positive and finite, got {f_c}"),
        ));
    }
    if !(n_eff.is_finite() && n_eff >= T::one()) {
        return Err(Error::invalid("n_eff", format!("must be >= 1, got {n_eff}")));
    }
    let lambda0 = T::lit(SPEED_OF_LIGHT) / f_c;
    let lambda_g = lambda0 / n_eff;
    let eta = match eta_model {
        EtaModel::Friis => lambda0 / (T::lit(4.0) * T::PI()),
        EtaModel::Unit => T::one(),
    };
    Ok(WaveConstants {
        f_c,
        lambda0,
        lambda_g,
        n_eff,
        k0: T::TAU() / lambda0,
        k_g: T::TAU() / lambda_g,
        eta,
    })
}

/// Transmit and noise power, in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget<T> {
    pub p_t_watt: T,
    pub n0_watt: T,
}

impl<T: Real> LinkBudget<T> {
    pub fn new(p_t_watt: T, n0_watt: T) -> Result<Self> {
        if !(p_t_watt.is_finite() && p_t_watt > T::zero()) {
            return Err(Error::invalid("p_t_dbm", "transmit power must be positive and finite"));
        }
        if !(n0_watt.is_finite() && n0_watt > T::zero()) {
            return Err(Error::invalid("n0_dbm", "noise power must be positive and finite"));
        }
        Ok(Self { p_t_watt, n0_watt })
    }

    pub fn from_dbm(p_t_dbm: T, n0_dbm: T) -> Result<Self> {
        Self::new(dbm_to_watt(p_t_dbm), dbm_to_watt(n0_dbm))
    }

    /// Per-port SNR scale `P_T / (2 N_0)` under equal power allocation.
    pub fn snr_per_port(&self) -> T {
        self.p_t_watt / (T::lit(2.0) * self.n0_watt)
    }

    /// Same budget with a different transmit power.
    pub fn with_p_t_dbm(&self, p_t_dbm: T) -> Result<Self> {
        Self::new(dbm_to_watt(p_t_dbm), self.n0_watt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn dbm_reference_points() {
        assert!(close(dbm_to_watt(30.0), 1.0, 1e-15));
        assert!(close(dbm_to_watt(-80.0), 1.0e-11, 1e-14));
        assert!(close(dbm_to_watt(0.0), 1.0e-3, 1e-15));
    }

    #[test]
    fn wave_constants_at_28_ghz() {
        let w = derive_wave_constants(28e9, 1.4, EtaModel::Friis).unwrap();
        // c / f_c and 2π n_eff f_c / c evaluated by hand.
        assert!(close(w.lambda0, 1.070_687_35e-2, 1e-8));
        assert!(close(w.k_g, 821.571_248_605_059_3, 1e-13));
        assert!(close(w.lambda0, 1.070_687_35e-2, 1e-15));
        assert!(close(w.lambda_g, w.lambda0 / 1.4, 1e-12));
        assert!(close(w.k0, std::f64::consts::TAU / w.lambda0, 1e-12));
        assert!(close(w.eta, w.lambda0 / (4.0 * std::f64::consts::PI), 1e-12));
    }

    #[test]
    fn identity_medium() {
        let w = derive_wave_constants(28e9, 1.0, EtaModel::Unit).unwrap();
        assert_eq!(w.lambda_g, w.lambda0);
        assert_eq!(w.k_g, w.k0);
        assert_eq!(w.eta, 1.0);
    }

    #[test]
    fn doubling_frequency_halves_wavelengths_exactly() {
        for &f in &[1e9, 28e9, 3.7e10, 1.234_567e11] {
            let a = derive_wave_constants(f, 1.4, EtaModel::Friis).unwrap();
            let b = derive_wave_constants(2.0 * f, 1.4, EtaModel::Friis).unwrap();
            assert_eq!(b.lambda0, a.lambda0 / 2.0);
            assert_eq!(b.lambda_g, a.lambda_g / 2.0);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(derive_wave_constants(0.0, 1.4, EtaModel::Friis).is_err());
        assert!(derive_wave_constants(-1.0, 1.4, EtaModel::Friis).is_err());
        assert!(derive_wave_constants(28e9, 0.9, EtaModel::Friis).is_err());
        assert!(LinkBudget::new(0.0, 1.0).is_err());
        assert!(LinkBudget::new(1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn f32_constants_track_f64() {
        let w = derive_wave_constants(28e9_f32, 1.4, EtaModel::Friis).unwrap();
        assert!((w.k_g as f64 - 821.571_25).abs() < 1e-3);
    }

    proptest::proptest! {
        #[test]
        fn dbm_round_trip(p in -100.0f64..100.0) {
            let back = watt_to_dbm(dbm_to_watt(p));
            proptest::prop_assert!((back - p).abs() <= 1e-12);
        }
    }
}
