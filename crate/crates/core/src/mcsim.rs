//! Monte Carlo ground truth for a single uplink reception.
//!
//! Each trial draws a Poisson number of same-ring interferers, places them
//! uniformly in the reference ring, applies Rayleigh fading to every link
//! and runs the gateway's decode logic: plain capture first, then one SIC
//! iteration when exactly one interferer is present. Connection, capture
//! and SIC share the same fading draws, so every dependency between the
//! events is kept.
//!
//! The trial recipe is a reconstruction of the event model the closed forms
//! describe. Noise only enters through the sensitivity floor `q_i σ_w²`;
//! capture decisions use the pure SIR.
//!
//! Trials are grouped into chunks of [`CHUNK_TRIALS`]. Chunk `j` gets its own
//! ChaCha8 stream seeded from `(seed, j)`, and per-chunk tallies are merged
//! in chunk order, so results do not depend on the rayon pool size.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytic::{path_loss_gain, sensitivity_floor, NetworkConfig};
use crate::error::{Error, Result};
use crate::geometry::{self, distance_from_uniform};

pub const CHUNK_TRIALS: u64 = 1 << 14;

/// Largest mean drawn by a single inversion pass; bigger means are split.
const POISSON_INVERSION_MAX: f64 = 10.0;

/// Random state of one trial. Index 0 of `fading_powers` and `gains` is the
/// reference node; index `j ≥ 1` is interferer `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialDraw {
    pub interferer_distances: Vec<f64>,
    pub fading_powers: Vec<f64>,
    /// Received powers `|h_j|² g(d_j) P_t`, W.
    pub gains: Vec<f64>,
}

impl TrialDraw {
    pub fn k(&self) -> usize {
        self.interferer_distances.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrialOutcome {
    pub connected: bool,
    pub captured: bool,
    pub sic_decoded: bool,
    pub success_c1: bool,
    pub success_c1_sic: bool,
}

/// Proportion estimate with a normal-approximation 95 % half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub trials: u64,
    pub ci95_halfwidth: f64,
}

impl McEstimate {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        if trials == 0 {
            return McEstimate {
                mean: 0.0,
                trials: 0,
                ci95_halfwidth: 0.0,
            };
        }
        let mean = successes as f64 / trials as f64;
        McEstimate {
            mean,
            trials,
            ci95_halfwidth: 1.96 * (mean * (1.0 - mean) / trials as f64).sqrt(),
        }
    }

    /// Whether `value` lies within `k` half-widths of the estimate.
    pub fn covers(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.ci95_halfwidth
    }
}

/// Estimates for every outcome, plus the share of collisions (trials with at
/// least one interferer) that involve exactly one interferer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McReport {
    pub connected: McEstimate,
    pub captured: McEstimate,
    pub sic_decoded: McEstimate,
    pub success_c1: McEstimate,
    pub success_c1_sic: McEstimate,
    pub single_interferer: McEstimate,
    /// Trials where capture and SIC both claimed success; zero for `γ ≥ 1`.
    pub captured_and_sic: u64,
}

/// Per-scenario constants shared by all trials.
#[derive(Debug, Clone)]
pub struct TrialContext {
    d1: f64,
    ring_lo: f64,
    ring_hi: f64,
    alpha: f64,
    tx_power: f64,
    ref_gain: f64,
    floor: f64,
    gamma: f64,
    cfg: NetworkConfig,
}

impl TrialContext {
    pub fn new(d1: f64, cfg: &NetworkConfig, alpha_i: f64) -> Result<Self> {
        if !(alpha_i >= 0.0) || !alpha_i.is_finite() {
            return Err(Error::domain(format!(
                "intensity α = {alpha_i} must be finite and nonnegative"
            )));
        }
        let ring = geometry::ring_of(d1, &cfg.layout)?;
        let (ring_lo, ring_hi) = cfg.layout.bounds(ring)?;
        Ok(TrialContext {
            d1,
            ring_lo,
            ring_hi,
            alpha: alpha_i,
            tx_power: cfg.radio.tx_power(),
            ref_gain: path_loss_gain(d1, &cfg.radio)?,
            floor: sensitivity_floor(cfg, ring),
            gamma: cfg.radio.capture_threshold(),
            cfg: cfg.clone(),
        })
    }

    /// Minimum received power `q_i σ_w²`, W.
    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Builds a draw from explicit interferer distances and fading powers
    /// (reference first).
    pub fn draw_from(&self, interferer_distances: Vec<f64>, fading_powers: Vec<f64>) -> Result<TrialDraw> {
        if fading_powers.len() != interferer_distances.len() + 1 {
            return Err(Error::invalid("need one fading power per node, reference included"));
        }
        let mut gains = Vec::with_capacity(fading_powers.len());
        gains.push(fading_powers[0] * self.ref_gain * self.tx_power);
        for (&d, &h) in interferer_distances.iter().zip(&fading_powers[1..]) {
            gains.push(h * path_loss_gain(d, &self.cfg.radio)? * self.tx_power);
        }
        Ok(TrialDraw {
            interferer_distances,
            fading_powers,
            gains,
        })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> TrialDraw {
        let k = poisson(self.alpha, rng);
        let mut distances = Vec::with_capacity(k);
        let mut fading = Vec::with_capacity(k + 1);
        let mut gains = Vec::with_capacity(k + 1);
        let h1 = exponential(rng);
        fading.push(h1);
        gains.push(h1 * self.ref_gain * self.tx_power);
        for _ in 0..k {
            let u: f64 = rng.random();
            let d = distance_from_uniform(self.ring_lo, self.ring_hi, u);
            let h = exponential(rng);
            let ratio = self.cfg.radio.wavelength() / (4.0 * std::f64::consts::PI * d);
            distances.push(d);
            fading.push(h);
            gains.push(h * ratio.powf(self.cfg.radio.path_loss_exp) * self.tx_power);
        }
        TrialDraw {
            interferer_distances: distances,
            fading_powers: fading,
            gains,
        }
    }

    /// Gateway decode logic for one draw.
    pub fn evaluate(&self, draw: &TrialDraw) -> TrialOutcome {
        let g1 = draw.gains[0];
        let interference: f64 = draw.gains[1..].iter().sum();
        let connected = g1 >= self.floor;
        let captured = draw.k() == 0 || g1 >= self.gamma * interference;
        let sic_decoded =
            !captured && draw.k() == 1 && draw.gains[1] >= self.gamma * g1 && draw.gains[1] >= self.floor && connected;
        TrialOutcome {
            connected,
            captured,
            sic_decoded,
            success_c1: connected && captured,
            success_c1_sic: connected && (captured || sic_decoded),
        }
    }

    pub fn d1(&self) -> f64 {
        self.d1
    }
}

/// `K ~ Poisson(α)` by sequential inversion, splitting large means into
/// pieces of at most 10 and summing.
pub fn poisson<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> usize {
    let mut remaining = alpha;
    let mut total = 0;
    while remaining > 0.0 {
        let mean = remaining.min(POISSON_INVERSION_MAX);
        remaining -= mean;
        let u: f64 = rng.random();
        let mut p = (-mean).exp();
        let mut cdf = p;
        let mut k = 0;
        while u > cdf && p > 0.0 {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
        }
        total += k;
    }
    total
}

/// Unit-mean exponential variate, `-ln(1 - u)`; strictly positive.
pub fn exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    -(1.0 - u).ln()
}

pub fn run_trial<R: Rng + ?Sized>(d1: f64, cfg: &NetworkConfig, alpha_i: f64, rng: &mut R) -> Result<TrialOutcome> {
    let ctx = TrialContext::new(d1, cfg, alpha_i)?;
    Ok(ctx.evaluate(&ctx.draw(rng)))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    trials: u64,
    connected: u64,
    captured: u64,
    sic_decoded: u64,
    success_c1: u64,
    success_c1_sic: u64,
    collisions: u64,
    single: u64,
    captured_and_sic: u64,
}

impl Tally {
    fn record(&mut self, k: usize, o: &TrialOutcome) {
        self.trials += 1;
        self.connected += o.connected as u64;
        self.captured += o.captured as u64;
        self.sic_decoded += o.sic_decoded as u64;
        self.success_c1 += o.success_c1 as u64;
        self.success_c1_sic += o.success_c1_sic as u64;
        self.collisions += (k > 0) as u64;
        self.single += (k == 1) as u64;
        self.captured_and_sic += (o.captured && o.sic_decoded) as u64;
    }

    fn merge(self, o: Tally) -> Tally {
        Tally {
            trials: self.trials + o.trials,
            connected: self.connected + o.connected,
            captured: self.captured + o.captured,
            sic_decoded: self.sic_decoded + o.sic_decoded,
            success_c1: self.success_c1 + o.success_c1,
            success_c1_sic: self.success_c1_sic + o.success_c1_sic,
            collisions: self.collisions + o.collisions,
            single: self.single + o.single,
            captured_and_sic: self.captured_and_sic + o.captured_and_sic,
        }
    }
}

/// Seed of chunk `index` under master seed `seed` (splitmix64 finalizer over
/// a golden-ratio counter).
pub fn chunk_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_chunk(ctx: &TrialContext, seed: u64, index: u64, trials: u64) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(chunk_seed(seed, index));
    let mut tally = Tally::default();
    for _ in 0..trials {
        let draw = ctx.draw(&mut rng);
        tally.record(draw.k(), &ctx.evaluate(&draw));
    }
    tally
}

/// Runs `n_trials` independent trials on the current rayon pool.
pub fn estimate(d1: f64, cfg: &NetworkConfig, alpha_i: f64, n_trials: u64, seed: u64) -> Result<McReport> {
    if n_trials == 0 {
        return Err(Error::invalid("at least one trial is required"));
    }
    let ctx = TrialContext::new(d1, cfg, alpha_i)?;
    let chunks = n_trials.div_ceil(CHUNK_TRIALS);
    let tallies: Vec<Tally> = (0..chunks)
        .into_par_iter()
        .map(|j| {
            let trials = CHUNK_TRIALS.min(n_trials - j * CHUNK_TRIALS);
            run_chunk(&ctx, seed, j, trials)
        })
        .collect();
    let t = tallies.into_iter().fold(Tally::default(), Tally::merge);
    Ok(McReport {
        connected: McEstimate::from_counts(t.connected, t.trials),
        captured: McEstimate::from_counts(t.captured, t.trials),
        sic_decoded: McEstimate::from_counts(t.sic_decoded, t.trials),
        success_c1: McEstimate::from_counts(t.success_c1, t.trials),
        success_c1_sic: McEstimate::from_counts(t.success_c1_sic, t.trials),
        single_interferer: McEstimate::from_counts(t.single, t.collisions),
        captured_and_sic: t.captured_and_sic,
    })
}
