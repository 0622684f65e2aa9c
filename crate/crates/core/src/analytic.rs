//! Closed-form connection, capture and SIC probabilities for a reference
//! node at distance `d1` from the gateway.
//!
//! Interference only comes from the reference node's own SF ring. Active
//! interferers form a PPP with mean count `α_i`, all links see Rayleigh
//! fading, and the capture threshold `γ` is applied in linear scale.

use crate::error::{Error, Result};
use crate::geometry::{self, RingLayout, TrafficModel, RING_COUNT};
use crate::params::{default_sf_table, RadioConfig, SfParams};
use crate::specfun::hyp2f1_1b;

/// A complete network scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub radio: RadioConfig,
    pub layout: RingLayout,
    pub sf_table: Vec<SfParams>,
    pub traffic: TrafficModel,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            radio: RadioConfig::default(),
            layout: RingLayout::default(),
            sf_table: default_sf_table(),
            traffic: TrafficModel::default(),
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        self.radio.validate()?;
        self.traffic.validate()?;
        if self.sf_table.len() != RING_COUNT {
            return Err(Error::config(
                "sf_table",
                format!("expected {RING_COUNT} rows, found {}", self.sf_table.len()),
            ));
        }
        for (i, row) in self.sf_table.iter().enumerate() {
            if row.sf as usize != 7 + i {
                return Err(Error::config("sf_table", format!("row {i} holds SF{}", row.sf)));
            }
        }
        Ok(())
    }

    pub fn sf_params(&self, ring: usize) -> &SfParams {
        &self.sf_table[ring - 1]
    }

    /// `α_i` of the ring containing `d1`, derived from the traffic model.
    pub fn intensity_at(&self, d1: f64) -> Result<f64> {
        let ring = geometry::ring_of(d1, &self.layout)?;
        geometry::interferer_intensity(ring, &self.traffic, &self.layout)
    }
}

/// The five coverage probabilities at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageBreakdown {
    pub h1: f64,
    pub q1: f64,
    pub q2: f64,
    pub c1: f64,
    pub c1_sic: f64,
    pub alpha_i: f64,
    pub ring: usize,
    pub d1: f64,
}

/// Free-space style power-law gain `(λ / 4πd)^η`.
pub fn path_loss_gain(d: f64, radio: &RadioConfig) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::domain(format!("distance {d} m must be positive")));
    }
    let ratio = radio.wavelength() / (4.0 * std::f64::consts::PI * d);
    Ok(ratio.powf(radio.path_loss_exp))
}

/// Received power of the reference signal must clear `q_i σ_w²` after
/// fading; with `|h|² ~ Exp(1)` that is `exp(-σ_w² q_i / (P_t g))`.
pub fn connection_probability(d1: f64, cfg: &NetworkConfig) -> Result<f64> {
    let ring = geometry::ring_of(d1, &cfg.layout)?;
    let threshold = sensitivity_floor(cfg, ring);
    let received = cfg.radio.tx_power() * path_loss_gain(d1, &cfg.radio)?;
    Ok((-threshold / received).exp())
}

/// Minimum received power `q_i σ_w²` for ring `ring`, W.
pub(crate) fn sensitivity_floor(cfg: &NetworkConfig, ring: usize) -> f64 {
    cfg.sf_params(ring).snr_threshold() * cfg.radio.noise_power()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::domain(format!(
            "intensity α = {alpha} must be finite and nonnegative"
        )));
    }
    Ok(())
}

/// `l² ₂F₁(1, 2/η; 1 + 2/η; -s)`, with the `s → ∞` limit taken as 0.
fn ring_term(l: f64, b: f64, s: f64) -> Result<f64> {
    if l == 0.0 || s.is_infinite() {
        return Ok(0.0);
    }
    Ok(l * l * hyp2f1_1b(b, -s)?)
}

/// Probability that the reference signal survives PPP interference through
/// capture, `P[SIR ≥ γ | d1]`.
///
/// Each interferer at distance `x` fails the reference with probability
/// `γ d1^η / (x^η + γ d1^η)`; averaging over the ring and applying the PPP
/// generating functional gives
/// `exp{-α/(l_i² - l_{i-1}²) [l² ₂F₁(1, 2/η; 1+2/η; -(l/d1)^η / γ)]_{l_{i-1}}^{l_i}}`.
pub fn capture_probability(d1: f64, cfg: &NetworkConfig, alpha_i: f64) -> Result<f64> {
    check_alpha(alpha_i)?;
    let ring = geometry::ring_of(d1, &cfg.layout)?;
    let (lo, hi) = cfg.layout.bounds(ring)?;
    let eta = cfg.radio.path_loss_exp;
    let gamma = cfg.radio.capture_threshold();
    let b = 2.0 / eta;
    let arg = |l: f64| (l / d1).powf(eta) / gamma;
    let bracket = ring_term(hi, b, arg(hi))? - ring_term(lo, b, arg(lo))?;
    Ok((-alpha_i * bracket / (hi * hi - lo * lo)).exp())
}

/// Mean of `d1^η / (d1^η + γ D^η)` over a uniformly placed interferer `D`
/// in the reference ring, in closed form.
pub fn sic_geometric_factor(d1: f64, cfg: &NetworkConfig) -> Result<f64> {
    let ring = geometry::ring_of(d1, &cfg.layout)?;
    let (lo, hi) = cfg.layout.bounds(ring)?;
    let eta = cfg.radio.path_loss_exp;
    let gamma = cfg.radio.capture_threshold();
    let b = 2.0 / eta;
    let arg = |l: f64| gamma * (l / d1).powf(eta);
    let bracket = ring_term(hi, b, arg(hi))? - ring_term(lo, b, arg(lo))?;
    Ok(bracket / (hi * hi - lo * lo))
}

/// Probability that exactly one interferer is active and it is strong
/// enough to be captured ahead of the reference signal.
pub fn sic_capture_probability(d1: f64, cfg: &NetworkConfig, alpha_i: f64) -> Result<f64> {
    check_alpha(alpha_i)?;
    Ok(alpha_i * (-alpha_i).exp() * sic_geometric_factor(d1, cfg)?)
}

pub fn coverage(d1: f64, cfg: &NetworkConfig, alpha_i: f64) -> Result<CoverageBreakdown> {
    check_alpha(alpha_i)?;
    let ring = geometry::ring_of(d1, &cfg.layout)?;
    let h1 = connection_probability(d1, cfg)?;
    let q1 = capture_probability(d1, cfg, alpha_i)?;
    let q2 = sic_capture_probability(d1, cfg, alpha_i)?;
    Ok(CoverageBreakdown {
        h1,
        q1,
        q2,
        c1: h1 * q1,
        c1_sic: h1 * q1 + h1 * q2,
        alpha_i,
        ring,
        d1,
    })
}

/// `P[|Φ| = 1 | |Φ| > 0]` for a Poisson count of mean `α`.
pub fn single_interferer_given_collision(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::domain(format!(
            "conditioning on a collision needs α > 0, got {alpha}"
        )));
    }
    // α e^{-α} / (1 - e^{-α}) = α / (e^α - 1)
    Ok(alpha / alpha.exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::db_to_linear;
    use crate::specfun::q2_integral_quadrature;

    fn cfg_with_gamma(gamma_db: f64) -> NetworkConfig {
        let mut cfg = NetworkConfig::default();
        cfg.radio.capture_threshold_db = gamma_db;
        cfg
    }

    // Frozen from a 30-digit evaluation of the same closed forms.
    const H1_BORDER: f64 = 0.904134130935210982;
    const Q1_BORDER_1DB: f64 = 0.540749742052115309;
    const Q2_BORDER_1DB: f64 = 0.184806934771299798;
    const Q1_BORDER_6DB: f64 = 0.434314908310953800;
    const Q2_BORDER_6DB: f64 = 0.089398243110742733;

    #[test]
    fn wavelength_and_gain() {
        let radio = RadioConfig::default();
        assert!((radio.wavelength() - 0.345391705).abs() < 1e-9);
        let g = path_loss_gain(3000.0, &radio).unwrap();
        assert!(((g - 7.826114487474e-15) / g).abs() < 1e-11);
        assert!((10.0 * g.log10() + 141.0645).abs() < 1e-3);
        let g2 = path_loss_gain(6000.0, &radio).unwrap();
        assert!((g2 / g - 2f64.powf(-2.8)).abs() < 1e-14);
        assert!(path_loss_gain(0.0, &radio).is_err());
    }

    #[test]
    fn connection_limits_and_border() {
        let cfg = NetworkConfig::default();
        assert!(connection_probability(1e-3, &cfg).unwrap() > 1.0 - 1e-12);
        let h = connection_probability(3000.0, &cfg).unwrap();
        assert!((h - H1_BORDER).abs() < 1e-12);
        let mut loud = cfg.clone();
        loud.radio.tx_power_dbm = 200.0;
        assert!(connection_probability(3000.0, &loud).unwrap() > 1.0 - 1e-12);
        assert!(matches!(
            connection_probability(3001.0, &cfg),
            Err(Error::OutOfCoverage { .. })
        ));
    }

    #[test]
    fn capture_at_border() {
        let cfg = cfg_with_gamma(1.0);
        assert_eq!(capture_probability(3000.0, &cfg, 0.0).unwrap(), 1.0);
        let q1 = capture_probability(3000.0, &cfg, 1.0).unwrap();
        assert!((q1 - Q1_BORDER_1DB).abs() < 1e-12);
        // 51.1 % loss without SIC
        assert!((H1_BORDER * q1 - 0.489).abs() < 5e-4);
        let q1 = capture_probability(3000.0, &cfg_with_gamma(6.0), 1.0).unwrap();
        assert!((q1 - Q1_BORDER_6DB).abs() < 1e-12);
        let weak = cfg_with_gamma(-80.0);
        assert!(capture_probability(3000.0, &weak, 1.0).unwrap() > 1.0 - 1e-6);
        assert!(capture_probability(3000.0, &cfg, -0.5).is_err());
    }

    #[test]
    fn sic_capture_at_border() {
        let cfg = cfg_with_gamma(1.0);
        assert_eq!(sic_capture_probability(3000.0, &cfg, 0.0).unwrap(), 0.0);
        let q2 = sic_capture_probability(3000.0, &cfg, 1.0).unwrap();
        assert!((q2 - Q2_BORDER_1DB).abs() < 1e-12);
        assert!((H1_BORDER * q2 - 0.167).abs() < 5e-4);
        let q2 = sic_capture_probability(3000.0, &cfg_with_gamma(6.0), 1.0).unwrap();
        assert!((q2 - Q2_BORDER_6DB).abs() < 1e-12);
    }

    #[test]
    fn breakdown_is_consistent() {
        let cfg = NetworkConfig::default();
        let c = coverage(3000.0, &cfg, 0.0).unwrap();
        assert_eq!(c.q1, 1.0);
        assert_eq!(c.q2, 0.0);
        assert_eq!(c.c1, c.h1);
        assert_eq!(c.c1_sic, c.h1);

        let c = coverage(3000.0, &cfg, 1.0).unwrap();
        assert_eq!(c.ring, 6);
        assert_eq!(c.c1, c.h1 * c.q1);
        assert!((c.c1_sic - c.h1 * (c.q1 + c.q2)).abs() < 1e-15);
        assert!((c.c1_sic - 0.656).abs() < 5e-4);
    }

    #[test]
    fn single_interferer_statistic() {
        assert!((single_interferer_given_collision(1.0).unwrap() - 0.581976706869).abs() < 1e-12);
        assert!((single_interferer_given_collision(2.0).unwrap() - 0.313035285499).abs() < 1e-12);
        assert!(single_interferer_given_collision(1e-12).unwrap() > 1.0 - 1e-11);
        assert!(single_interferer_given_collision(0.0).is_err());
        assert!(single_interferer_given_collision(-1.0).is_err());
        let mut prev = 1.0;
        for k in 1..200 {
            let v = single_interferer_given_collision(k as f64 * 0.05).unwrap();
            assert!(v < prev && v > 0.0);
            prev = v;
        }
    }

    #[test]
    fn closed_form_matches_quadrature_in_every_ring() {
        let cfg = NetworkConfig::default();
        let gamma = cfg.radio.capture_threshold();
        for d1 in [10.0, 480.0, 777.0, 1500.0, 2222.0, 2999.0] {
            let ring = cfg.layout.ring_of(d1).unwrap();
            let (lo, hi) = cfg.layout.bounds(ring).unwrap();
            let closed = sic_geometric_factor(d1, &cfg).unwrap();
            let quad = q2_integral_quadrature(d1, gamma, 2.8, lo, hi).unwrap();
            assert!(((closed - quad) / quad).abs() < 1e-9, "d1={d1}: {closed} vs {quad}");
        }
    }

    #[test]
    fn capture_matches_direct_ring_average() {
        // -ln Q1 / α = E[γ d1^η / (D^η + γ d1^η)], averaged by quadrature
        use crate::quadrature::{integrate, Tolerance};
        let cfg = cfg_with_gamma(3.0);
        let gamma = db_to_linear(3.0);
        for d1 in [250.0, 1900.0, 2750.0] {
            let ring = cfg.layout.ring_of(d1).unwrap();
            let (lo, hi) = cfg.layout.bounds(ring).unwrap();
            let span = hi * hi - lo * lo;
            let mean = integrate(
                |x| 2.0 * x / span * gamma / ((x / d1).powf(2.8) + gamma),
                lo,
                hi,
                Tolerance::default(),
            )
            .unwrap();
            let q1 = capture_probability(d1, &cfg, 0.7).unwrap();
            assert!(((-q1.ln() / 0.7 - mean) / mean).abs() < 1e-9);
        }
    }
}
