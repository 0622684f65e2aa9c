//! Parameter sweeps, network capacity and reliability-driven planning.

use rayon::prelude::*;

use crate::analytic::{self, CoverageBreakdown, NetworkConfig};
use crate::error::{Error, Result};
use crate::geometry::nodes_from_alpha;
use crate::mcsim::{self, chunk_seed, McReport};
use crate::params::SfParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    D1,
    Alpha,
    GammaDb,
    Nbar,
}

impl std::str::FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "d1" => Ok(SweepVariable::D1),
            "alpha" => Ok(SweepVariable::Alpha),
            "gamma_db" => Ok(SweepVariable::GammaDb),
            "nbar" => Ok(SweepVariable::Nbar),
            other => Err(Error::invalid(format!(
                "unknown sweep variable `{other}` (expected d1, alpha, gamma_db or nbar)"
            ))),
        }
    }
}

/// Where a sweep point takes its interferer intensity from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaSource {
    /// The same `α_i` in whichever ring the point lands.
    Fixed(f64),
    /// `α_i = 2 p_i ρ V_i` from the configured traffic model.
    Traffic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    /// Reference distance for sweeps that do not vary it.
    pub d1: f64,
    /// Ignored when sweeping `alpha`; forced to `Traffic` when sweeping `nbar`.
    pub alpha: AlphaSource,
    /// Monte Carlo trials per point; 0 runs the closed forms only.
    pub mc_trials: u64,
    pub seed: u64,
}

impl SweepSpec {
    /// Grid `start, start + step, …` up to and including `stop`.
    pub fn grid(&self) -> Result<Vec<f64>> {
        let SweepSpec { start, stop, step, .. } = *self;
        if !start.is_finite() || !stop.is_finite() || !(step > 0.0) || !step.is_finite() {
            return Err(Error::invalid("sweep bounds must be finite with a positive step"));
        }
        if start > stop {
            return Err(Error::invalid(format!("sweep start {start} exceeds stop {stop}")));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok((0..n).map(|k| (start + k as f64 * step).min(stop)).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub x: f64,
    pub coverage: CoverageBreakdown,
    pub mc: Option<McReport>,
}

struct Point {
    d1: f64,
    alpha: f64,
    cfg: NetworkConfig,
}

fn resolve_point(spec: &SweepSpec, cfg: &NetworkConfig, x: f64) -> Result<Point> {
    let mut cfg = cfg.clone();
    let mut d1 = spec.d1;
    let mut source = spec.alpha;
    match spec.variable {
        SweepVariable::D1 => d1 = x,
        SweepVariable::Alpha => source = AlphaSource::Fixed(x),
        SweepVariable::GammaDb => cfg.radio.capture_threshold_db = x,
        SweepVariable::Nbar => {
            cfg.traffic.n_bar = x;
            source = AlphaSource::Traffic;
        }
    }
    cfg.validate()?;
    let alpha = match source {
        AlphaSource::Fixed(a) => a,
        AlphaSource::Traffic => cfg.intensity_at(d1)?,
    };
    Ok(Point { d1, alpha, cfg })
}

/// Evaluates every grid point, in parallel, returning rows in grid order.
/// Point `k` runs its Monte Carlo under master seed `chunk_seed(seed, k)`.
pub fn sweep(spec: &SweepSpec, cfg: &NetworkConfig) -> Result<Vec<SweepRow>> {
    let grid = spec.grid()?;
    grid.par_iter()
        .enumerate()
        .map(|(k, &x)| {
            let p = resolve_point(spec, cfg, x)?;
            let coverage = analytic::coverage(p.d1, &p.cfg, p.alpha)?;
            let mc = if spec.mc_trials > 0 {
                let seed = chunk_seed(spec.seed, k as u64);
                Some(mcsim::estimate(p.d1, &p.cfg, p.alpha, spec.mc_trials, seed)?)
            } else {
                None
            };
            Ok(SweepRow { x, coverage, mc })
        })
        .collect()
}

/// Node counts per SF sustaining intensity `alpha` in every ring.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityRow {
    pub alpha: f64,
    /// SF7 first.
    pub nodes: Vec<u64>,
    pub total: u64,
}

/// Node counts `round(α / 2p_i)` for each SF row and their sum.
pub fn capacity_table(alphas: &[f64], sf_table: &[SfParams]) -> Result<Vec<CapacityRow>> {
    alphas
        .iter()
        .map(|&alpha| {
            if !(alpha > 0.0) {
                return Err(Error::invalid(format!("intensity {alpha} must be positive")));
            }
            let nodes = sf_table
                .iter()
                .map(|row| nodes_from_alpha(alpha, row.duty_cycle))
                .collect::<Result<Vec<_>>>()?;
            Ok(CapacityRow {
                alpha,
                total: nodes.iter().sum(),
                nodes,
            })
        })
        .collect()
}

pub const DEFAULT_ALPHA_MAX: f64 = 10.0;
pub const ALPHA_TOLERANCE: f64 = 1e-4;
const MONOTONICITY_SAMPLES: usize = 200;

/// `H₁Q₁` or, with SIC, `H₁(Q₁ + Q₂)` as a function of `α`.
pub fn planning_objective(alpha: f64, d1: f64, cfg: &NetworkConfig, with_sic: bool) -> Result<f64> {
    let c = analytic::coverage(d1, cfg, alpha)?;
    Ok(if with_sic { c.c1_sic } else { c.c1 })
}

pub fn find_alpha_for_target(target: f64, d1: f64, cfg: &NetworkConfig, with_sic: bool) -> Result<f64> {
    find_alpha_for_target_within(target, d1, cfg, with_sic, DEFAULT_ALPHA_MAX)
}

/// Largest intensity keeping the objective at or above `target`, found by
/// bisection on `(0, alpha_max]` to [`ALPHA_TOLERANCE`].
pub fn find_alpha_for_target_within(
    target: f64,
    d1: f64,
    cfg: &NetworkConfig,
    with_sic: bool,
    alpha_max: f64,
) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::invalid(format!("target {target} must lie in (0, 1)")));
    }
    if !(alpha_max > 0.0) || !alpha_max.is_finite() {
        return Err(Error::invalid(format!("bracket end {alpha_max} must be positive")));
    }
    let objective = |a: f64| planning_objective(a, d1, cfg, with_sic);

    let at_zero = objective(0.0)?;
    if at_zero < target {
        return Err(Error::Infeasible(format!(
            "target {target} exceeds the interference-free reliability {at_zero:.6} at d1 = {d1} m"
        )));
    }
    let mut prev = at_zero;
    for k in 1..=MONOTONICITY_SAMPLES {
        let v = objective(alpha_max * k as f64 / MONOTONICITY_SAMPLES as f64)?;
        if v > prev + 1e-12 {
            return Err(Error::domain(format!(
                "planning objective increases with α near {:.4}; bisection would be ambiguous",
                alpha_max * k as f64 / MONOTONICITY_SAMPLES as f64
            )));
        }
        prev = v;
    }
    if prev >= target {
        return Err(Error::Infeasible(format!(
            "target {target} is still met at α = {alpha_max}; widen the bracket"
        )));
    }

    let (mut lo, mut hi) = (0.0, alpha_max);
    while hi - lo > ALPHA_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if objective(mid)? >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Reference distances of the analytic-vs-simulation grid: one point deep in
/// ring 3, one mid ring 5 and the cell border.
pub const VALIDATION_DISTANCES: [f64; 3] = [1250.0, 2250.0, 3000.0];
pub const VALIDATION_ALPHAS: [f64; 3] = [0.25, 0.5, 1.0];
/// Absolute floor on the SIC tolerance, covering the `H₂ ≈ H₁` shortcut.
pub const SIC_ABS_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// MC connection rate vs `H₁`, within 4 CI.
    Connected,
    /// MC capture rate vs `Q₁`, within 4 CI.
    Captured,
    /// MC joint SIC success vs `H₁(Q₁ + Q₂)`, within `max(4 CI, 0.02)`.
    SicSuccess,
    /// MC joint `C₁` no lower than `H₁Q₁` by more than 4 CI.
    C1LowerBound,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Connected => "connected",
            CheckKind::Captured => "captured",
            CheckKind::SicSuccess => "c1_sic",
            CheckKind::C1LowerBound => "c1_lower_bound",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationCheck {
    pub d1: f64,
    pub alpha: f64,
    pub kind: CheckKind,
    pub analytic: f64,
    pub mc: f64,
    pub ci95: f64,
    /// `mc - analytic`
    pub deviation: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Compares simulated marginals and joint successes with the closed forms on
/// the 3x3 `(d1, α)` grid. Grid point `k` (row-major, distance outer) runs
/// under master seed `chunk_seed(seed, k)`.
pub fn validate_against_mc(cfg: &NetworkConfig, trials: u64, seed: u64) -> Result<Vec<ValidationCheck>> {
    let points: Vec<(f64, f64)> = VALIDATION_DISTANCES
        .iter()
        .flat_map(|&d| VALIDATION_ALPHAS.iter().map(move |&a| (d, a)))
        .collect();
    let per_point = points
        .par_iter()
        .enumerate()
        .map(|(k, &(d1, alpha))| {
            let c = analytic::coverage(d1, cfg, alpha)?;
            let r = mcsim::estimate(d1, cfg, alpha, trials, chunk_seed(seed, k as u64))?;
            let check = |kind, analytic: f64, est: mcsim::McEstimate| {
                let deviation = est.mean - analytic;
                let (threshold, pass) = match kind {
                    CheckKind::SicSuccess => {
                        let t = (4.0 * est.ci95_halfwidth).max(SIC_ABS_TOLERANCE);
                        (t, deviation.abs() <= t)
                    }
                    CheckKind::C1LowerBound => {
                        let t = 4.0 * est.ci95_halfwidth;
                        (t, deviation >= -t)
                    }
                    _ => {
                        let t = 4.0 * est.ci95_halfwidth;
                        (t, deviation.abs() <= t)
                    }
                };
                ValidationCheck {
                    d1,
                    alpha,
                    kind,
                    analytic,
                    mc: est.mean,
                    ci95: est.ci95_halfwidth,
                    deviation,
                    threshold,
                    pass,
                }
            };
            Ok(vec![
                check(CheckKind::Connected, c.h1, r.connected),
                check(CheckKind::Captured, c.q1, r.captured),
                check(CheckKind::SicSuccess, c.c1_sic, r.success_c1_sic),
                check(CheckKind::C1LowerBound, c.c1, r.success_c1),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_point.into_iter().flatten().collect())
}
