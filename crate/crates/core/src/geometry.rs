//! Concentric SF rings around the gateway and the traffic they carry.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const RING_COUNT: usize = 6;

/// Annulus boundaries of the coverage disc.
///
/// `boundaries[0]` is the inner cutoff (normally 0) and `boundaries[6]` the
/// cell radius. Ring `i` (1-based) covers `(l_{i-1}, l_i]` and is served by
/// SF `6 + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RingLayout {
    boundaries: [f64; RING_COUNT + 1],
}

impl Default for RingLayout {
    fn default() -> Self {
        RingLayout::equal_width(3000.0).expect("default radius is valid")
    }
}

impl RingLayout {
    pub fn new(boundaries: [f64; RING_COUNT + 1]) -> Result<Self> {
        if !(boundaries[0] >= 0.0) {
            return Err(Error::config("ring_boundaries", "inner cutoff must be nonnegative"));
        }
        if boundaries.iter().any(|b| !b.is_finite()) {
            return Err(Error::config("ring_boundaries", "radii must be finite"));
        }
        if boundaries.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("ring_boundaries", "radii must be strictly increasing"));
        }
        Ok(RingLayout { boundaries })
    }

    /// Six rings of equal width with no inner cutoff.
    pub fn equal_width(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::config("radius_m", "must be positive and finite"));
        }
        let mut b = [0.0; RING_COUNT + 1];
        for (k, slot) in b.iter_mut().enumerate() {
            *slot = radius * k as f64 / RING_COUNT as f64;
        }
        Self::new(b)
    }

    pub fn boundaries(&self) -> &[f64; RING_COUNT + 1] {
        &self.boundaries
    }

    pub fn radius(&self) -> f64 {
        self.boundaries[RING_COUNT]
    }

    /// `(l_{i-1}, l_i)` for 1-based ring `i`.
    pub fn bounds(&self, ring: usize) -> Result<(f64, f64)> {
        check_ring(ring)?;
        Ok((self.boundaries[ring - 1], self.boundaries[ring]))
    }

    pub fn sf_of_ring(ring: usize) -> Result<u8> {
        check_ring(ring)?;
        Ok(6 + ring as u8)
    }

    pub fn ring_of(&self, d: f64) -> Result<usize> {
        ring_of(d, self)
    }
}

fn check_ring(ring: usize) -> Result<()> {
    if (1..=RING_COUNT).contains(&ring) {
        Ok(())
    } else {
        Err(Error::invalid(format!("ring index {ring} outside 1..={RING_COUNT}")))
    }
}

/// Ring containing distance `d`. A distance exactly on a boundary belongs to
/// the inner of the two rings it separates.
pub fn ring_of(d: f64, layout: &RingLayout) -> Result<usize> {
    let radius = layout.radius();
    if !(d > 0.0) || d > radius {
        return Err(Error::OutOfCoverage { d, radius });
    }
    // boundaries[1..] is sorted; first l_i with d <= l_i
    let idx = layout.boundaries[1..].partition_point(|&l| l < d);
    Ok(idx + 1)
}

pub fn ring_area(ring: usize, layout: &RingLayout) -> Result<f64> {
    let (lo, hi) = layout.bounds(ring)?;
    Ok(PI * (hi * hi - lo * lo))
}

/// Mean node population `N̄` spread uniformly over the disc, with the duty
/// cycle used by nodes of each ring.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficModel {
    pub n_bar: f64,
    pub duty_cycles: [f64; RING_COUNT],
}

impl Default for TrafficModel {
    fn default() -> Self {
        TrafficModel {
            n_bar: 0.0,
            duty_cycles: [0.01; RING_COUNT],
        }
    }
}

impl TrafficModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.n_bar >= 0.0) || !self.n_bar.is_finite() {
            return Err(Error::config("nbar", "must be finite and nonnegative"));
        }
        if self.duty_cycles.iter().any(|p| !(*p >= 0.0 && *p <= 1.0)) {
            return Err(Error::config("duty_cycle", "must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Node density `ρ = N̄ / (π R²)`, nodes/m².
    pub fn density(&self, layout: &RingLayout) -> f64 {
        let r = layout.radius();
        self.n_bar / (PI * r * r)
    }

    /// Mean node count `ρ V_i` in a ring.
    pub fn nodes_in_ring(&self, ring: usize, layout: &RingLayout) -> Result<f64> {
        Ok(self.density(layout) * ring_area(ring, layout)?)
    }
}

/// Mean number of active interferers `α_i = 2 p_i ρ V_i` seen in ring `i`.
/// The factor 2 is the ALOHA vulnerability window.
pub fn interferer_intensity(ring: usize, traffic: &TrafficModel, layout: &RingLayout) -> Result<f64> {
    let nodes = traffic.nodes_in_ring(ring, layout)?;
    let p = traffic.duty_cycles[ring - 1];
    if !(p >= 0.0) || !(nodes >= 0.0) {
        return Err(Error::invalid("traffic must be nonnegative"));
    }
    Ok(2.0 * p * nodes)
}

/// Node count supported at intensity `alpha` with duty cycle `p`, rounded to
/// the nearest integer.
pub fn nodes_from_alpha(alpha: f64, p: f64) -> Result<u64> {
    if !(p > 0.0) {
        return Err(Error::invalid(format!("duty cycle must be positive, got {p}")));
    }
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::invalid(format!(
            "intensity must be finite and nonnegative, got {alpha}"
        )));
    }
    Ok((alpha / (2.0 * p)).round() as u64)
}

/// Inverse-CDF draw from the in-ring distance density `2d / (l_i² - l_{i-1}²)`.
pub fn sample_distance_in_ring(ring: usize, layout: &RingLayout, u: f64) -> Result<f64> {
    let (lo, hi) = layout.bounds(ring)?;
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::invalid(format!("uniform variate {u} outside [0, 1]")));
    }
    Ok(distance_from_uniform(lo, hi, u))
}

#[inline]
pub(crate) fn distance_from_uniform(lo: f64, hi: f64, u: f64) -> f64 {
    let d = (lo * lo + u * (hi * hi - lo * lo)).sqrt();
    d.clamp(lo, hi)
}
