//! Flat `key = value` scenario files.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Lists are comma separated. A key assigned twice keeps its last value, so
//! command-line overrides can simply be appended to the document.
//!
//! | key               | default | meaning                                     |
//! |-------------------|---------|---------------------------------------------|
//! | `carrier_hz`      | 868e6   | carrier frequency                           |
//! | `bandwidth_hz`    | 125000  | channel bandwidth                           |
//! | `tx_power_dbm`    | 14      | transmit power                              |
//! | `noise_figure_db` | 6       | receiver noise figure                       |
//! | `path_loss_exp`   | 2.8     | path-loss exponent, must exceed 2           |
//! | `gamma_db`        | 1       | capture threshold                           |
//! | `radius_m`        | 3000    | cell radius, split into six equal rings     |
//! | `ring_boundaries` |         | 6 outer radii, or 7 radii with inner cutoff |
//! | `nbar`            | 0       | mean node count over the disc               |
//! | `duty_cycle`      | 0.01    | one value for all rings, or 6 values        |

use crate::analytic::NetworkConfig;
use crate::error::{Error, Result};
use crate::geometry::{RingLayout, RING_COUNT};

pub const KNOWN_KEYS: [&str; 10] = [
    "carrier_hz",
    "bandwidth_hz",
    "tx_power_dbm",
    "noise_figure_db",
    "path_loss_exp",
    "gamma_db",
    "radius_m",
    "ring_boundaries",
    "nbar",
    "duty_cycle",
];

fn parse_number(key: &str, raw: &str) -> Result<f64> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| Error::config(key, format!("expected a number, found `{}`", raw.trim())))?;
    if !v.is_finite() {
        return Err(Error::config(key, "must be finite"));
    }
    Ok(v)
}

fn parse_list(key: &str, raw: &str) -> Result<Vec<f64>> {
    raw.split(',').map(|item| parse_number(key, item)).collect()
}

/// Splits a document into `(key, value)` pairs, rejecting unknown keys.
pub fn parse_assignments(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::config(
                line,
                format!("line {} is not a `key = value` assignment", lineno + 1),
            ));
        };
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::config(key, "unknown key"));
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

pub fn parse_config(text: &str) -> Result<NetworkConfig> {
    let mut cfg = NetworkConfig::default();
    let mut radius = None;
    let mut boundaries = None;
    for (key, value) in parse_assignments(text)? {
        let k = key.as_str();
        match k {
            "carrier_hz" => cfg.radio.carrier_hz = parse_number(k, &value)?,
            "bandwidth_hz" => cfg.radio.bandwidth_hz = parse_number(k, &value)?,
            "tx_power_dbm" => cfg.radio.tx_power_dbm = parse_number(k, &value)?,
            "noise_figure_db" => cfg.radio.noise_figure_db = parse_number(k, &value)?,
            "path_loss_exp" => cfg.radio.path_loss_exp = parse_number(k, &value)?,
            "gamma_db" => cfg.radio.capture_threshold_db = parse_number(k, &value)?,
            "radius_m" => radius = Some(parse_number(k, &value)?),
            "ring_boundaries" => boundaries = Some(parse_list(k, &value)?),
            "nbar" => cfg.traffic.n_bar = parse_number(k, &value)?,
            "duty_cycle" => {
                let list = parse_list(k, &value)?;
                cfg.traffic.duty_cycles = match list.len() {
                    1 => [list[0]; RING_COUNT],
                    RING_COUNT => list.try_into().expect("length checked"),
                    n => {
                        return Err(Error::config(
                            k,
                            format!("expected 1 or {RING_COUNT} values, found {n}"),
                        ))
                    }
                };
            }
            _ => unreachable!("keys filtered by parse_assignments"),
        }
    }

    cfg.layout = match (boundaries, radius) {
        (None, None) => RingLayout::default(),
        (None, Some(r)) => RingLayout::equal_width(r)?,
        (Some(list), radius) => {
            let full: [f64; RING_COUNT + 1] = match list.len() {
                RING_COUNT => {
                    let mut b = [0.0; RING_COUNT + 1];
                    b[1..].copy_from_slice(&list);
                    b
                }
                n if n == RING_COUNT + 1 => list.try_into().expect("length checked"),
                n => {
                    return Err(Error::config(
                        "ring_boundaries",
                        format!("expected {RING_COUNT} or {} radii, found {n}", RING_COUNT + 1),
                    ))
                }
            };
            if let Some(r) = radius {
                if r != full[RING_COUNT] {
                    return Err(Error::config(
                        "radius_m",
                        format!("conflicts with outermost ring boundary {}", full[RING_COUNT]),
                    ));
                }
            }
            RingLayout::new(full)?
        }
    };
    cfg.validate()?;
    Ok(cfg)
}
