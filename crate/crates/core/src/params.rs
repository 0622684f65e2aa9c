//! LoRa physical-layer constants and radio unit conversions.
//!
//! The per-spreading-factor table describes a 9-byte uplink payload at
//! 125 kHz with CRC and explicit header, and duty cycles for one message
//! every 15 minutes. All probability code downstream works in linear units;
//! dB values live only in [`RadioConfig`] and are converted on access.

use crate::error::{Error, Result};

/// Message generation period behind the tabulated duty cycles (15 minutes).
pub const MESSAGE_PERIOD_MS: f64 = 15.0 * 60.0 * 1000.0;

/// Thermal noise density at room temperature, dBm/Hz.
pub const THERMAL_NOISE_DBM_HZ: f64 = -174.0;

/// Speed of light used for the carrier wavelength, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.998e8;

/// One row of the LoRa uplink characteristics table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SfParams {
    pub sf: u8,
    /// Time on air, ms.
    pub toa: f64,
    /// kbit/s
    pub bitrate: f64,
    /// dBm
    pub sensitivity: f64,
    /// Demodulation SNR threshold `q_i`, dB.
    pub snr_threshold_db: f64,
    /// Fraction of time a node is on air, `p_i`.
    pub duty_cycle: f64,
}

impl SfParams {
    /// Linear SNR threshold.
    pub fn snr_threshold(&self) -> f64 {
        db_to_linear(self.snr_threshold_db)
    }
}

const SF_TABLE: [(u8, f64, f64, f64, f64, f64); 6] = [
    (7, 41.22, 5.47, -123.0, -6.0, 45.8),
    (8, 72.19, 3.12, -126.0, -9.0, 80.2),
    (9, 144.38, 1.76, -129.0, -12.0, 160.4),
    (10, 247.81, 0.98, -132.0, -15.0, 275.3),
    (11, 495.62, 0.54, -134.5, -17.5, 550.7),
    (12, 991.23, 0.29, -137.0, -20.0, 1101.4),
];

/// SF7 through SF12, duty cycles as tabulated (rounded to 0.1e-6).
pub fn default_sf_table() -> Vec<SfParams> {
    SF_TABLE
        .iter()
        .map(|&(sf, toa, bitrate, sensitivity, q, p_micro)| SfParams {
            sf,
            toa,
            bitrate,
            sensitivity,
            snr_threshold_db: q,
            duty_cycle: p_micro * 1e-6,
        })
        .collect()
}

pub fn duty_cycle_from_toa(toa_ms: f64, period_ms: f64) -> Result<f64> {
    if !(toa_ms > 0.0) || !(period_ms > 0.0) {
        return Err(Error::invalid(format!(
            "time on air ({toa_ms} ms) and period ({period_ms} ms) must be positive"
        )));
    }
    if period_ms < toa_ms {
        return Err(Error::invalid(format!(
            "period {period_ms} ms is shorter than time on air {toa_ms} ms"
        )));
    }
    Ok(toa_ms / period_ms)
}

/// Receiver noise floor `-174 + F + 10 log10(B)` in dBm.
pub fn noise_power_dbm(noise_figure_db: f64, bandwidth_hz: f64) -> Result<f64> {
    if !(bandwidth_hz > 0.0) {
        return Err(Error::invalid(format!(
            "bandwidth must be positive, got {bandwidth_hz} Hz"
        )));
    }
    Ok(THERMAL_NOISE_DBM_HZ + noise_figure_db + 10.0 * bandwidth_hz.log10())
}

pub fn db_to_linear(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

pub fn linear_to_db(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("cannot express non-positive ratio {x} in dB")));
    }
    Ok(10.0 * x.log10())
}

/// dBm to watts.
pub fn dbm_to_watt(dbm: f64) -> f64 {
    db_to_linear(dbm) * 1e-3
}

/// Radio front-end and propagation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConfig {
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub tx_power_dbm: f64,
    pub noise_figure_db: f64,
    /// Path-loss exponent, must exceed 2.
    pub path_loss_exp: f64,
    pub capture_threshold_db: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        RadioConfig {
            carrier_hz: 868e6,
            bandwidth_hz: 125e3,
            tx_power_dbm: 14.0,
            noise_figure_db: 6.0,
            path_loss_exp: 2.8,
            capture_threshold_db: 1.0,
        }
    }
}

impl RadioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_hz > 0.0) {
            return Err(Error::config("carrier_hz", "must be positive"));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::config("bandwidth_hz", "must be positive"));
        }
        if !(self.path_loss_exp > 2.0) || !self.path_loss_exp.is_finite() {
            return Err(Error::config("path_loss_exp", "must be finite and exceed 2"));
        }
        for (key, v) in [
            ("tx_power_dbm", self.tx_power_dbm),
            ("noise_figure_db", self.noise_figure_db),
            ("gamma_db", self.capture_threshold_db),
        ] {
            if !v.is_finite() {
                return Err(Error::config(key, "must be finite"));
            }
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    /// Transmit power, W.
    pub fn tx_power(&self) -> f64 {
        dbm_to_watt(self.tx_power_dbm)
    }

    /// Noise variance `σ_w²`, W.
    pub fn noise_power(&self) -> f64 {
        let dbm = THERMAL_NOISE_DBM_HZ + self.noise_figure_db + 10.0 * self.bandwidth_hz.log10();
        dbm_to_watt(dbm)
    }

    /// Capture threshold as a linear power ratio.
    pub fn capture_threshold(&self) -> f64 {
        db_to_linear(self.capture_threshold_db)
    }
}
