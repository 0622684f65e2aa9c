//! Command-line front end and CSV emission.
//!
//! Exit status is 0 on success, 1 for usage and configuration errors and 2
//! when a computation fails or a planning target is infeasible.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::analytic::{self, CoverageBreakdown, NetworkConfig};
use crate::config::parse_config;
use crate::error::{Error, Result};
use crate::experiments::{
    self, capacity_table, find_alpha_for_target, AlphaSource, SweepRow, SweepSpec, SweepVariable,
};
use crate::mcsim::{self, McEstimate};
use crate::params::default_sf_table;

/// Master seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_200_601;
pub const DEFAULT_VALIDATE_TRIALS: u64 = 100_000;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_COMPUTATION: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "lorasic",
    version,
    about = "LoRa uplink coverage with successive interference cancellation"
)]
pub struct Cli {
    /// Scenario file (flat `key = value`); defaults apply to omitted keys
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Override one scenario key, e.g. `--set gamma_db=6` (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,

    /// Write CSV here instead of standard output
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Master seed for every Monte Carlo run
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Copy)]
#[group(multiple = false)]
pub struct IntensityArgs {
    /// Interferer intensity in the reference ring
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Mean node count over the disc; intensity follows from the duty cycles
    #[arg(long)]
    pub nbar: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the per-SF uplink table
    Table1,
    /// Closed-form probabilities at one distance
    Coverage {
        #[arg(long)]
        d1: f64,
        #[command(flatten)]
        intensity: IntensityArgs,
    },
    /// Closed-form (and optionally simulated) probabilities over a grid
    Sweep {
        #[arg(long = "var", value_parser = ["d1", "alpha", "gamma_db", "nbar"])]
        variable: String,
        #[arg(long)]
        start: f64,
        #[arg(long)]
        stop: f64,
        #[arg(long)]
        step: f64,
        /// Reference distance when it is not the swept variable
        #[arg(long, default_value_t = 3000.0)]
        d1: f64,
        #[arg(long, default_value_t = 0)]
        mc_trials: u64,
        #[command(flatten)]
        intensity: IntensityArgs,
    },
    /// Monte Carlo estimates at one distance
    Mc {
        #[arg(long)]
        d1: f64,
        #[arg(long)]
        trials: u64,
        #[command(flatten)]
        intensity: IntensityArgs,
    },
    /// Compare closed forms with simulation on a 3x3 (d1, alpha) grid
    Validate {
        #[arg(long, default_value_t = DEFAULT_VALIDATE_TRIALS)]
        trials: u64,
    },
    /// Node counts per SF sustaining the given intensities
    Capacity {
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<f64>,
    },
    /// Largest intensity meeting a reliability target
    Plan {
        #[arg(long)]
        target: f64,
        #[arg(long)]
        sic: bool,
        #[arg(long, default_value_t = 3000.0)]
        d1: f64,
    },
}

/// `printf("%.10g")`: ten significant digits, trailing zeros dropped.
pub fn fmt_num(x: f64) -> String {
    const DIGITS: i32 = 10;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..DIGITS).contains(&exp) {
        let fixed = format!("{:.*}", (DIGITS - 1 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_line(fields: &[String]) -> String {
    let mut line = fields.join(",");
    line.push('\n');
    line
}

pub const SWEEP_HEADER: &str = "x,h1,q1,q2,c1,c1_sic";
pub const SWEEP_MC_HEADER: &str = "x,h1,q1,q2,c1,c1_sic,mc_c1,mc_c1_ci95,mc_c1_sic,mc_c1_sic_ci95";

fn coverage_fields(x: f64, c: &CoverageBreakdown) -> Vec<String> {
    [x, c.h1, c.q1, c.q2, c.c1, c.c1_sic].into_iter().map(fmt_num).collect()
}

/// Sweep rows in the fixed CSV schema; MC columns appear when any row has them.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let with_mc = rows.iter().any(|r| r.mc.is_some());
    let mut out = String::from(if with_mc { SWEEP_MC_HEADER } else { SWEEP_HEADER });
    out.push('\n');
    for row in rows {
        let mut fields = coverage_fields(row.x, &row.coverage);
        if let Some(mc) = &row.mc {
            for e in [mc.success_c1, mc.success_c1_sic] {
                fields.push(fmt_num(e.mean));
                fields.push(fmt_num(e.ci95_halfwidth));
            }
        }
        out.push_str(&csv_line(&fields));
    }
    out
}

pub fn load_config(path: Option<&PathBuf>, overrides: &[String]) -> Result<NetworkConfig> {
    let mut text = match path {
        Some(p) => {
            fs::read_to_string(p).map_err(|e| Error::config("--config", format!("cannot read {}: {e}", p.display())))?
        }
        None => String::new(),
    };
    for item in overrides {
        if !item.contains('=') {
            return Err(Error::config(item.as_str(), "override must look like KEY=VALUE"));
        }
        text.push('\n');
        text.push_str(item);
    }
    parse_config(&text)
}

/// `--alpha` wins, then `--nbar`, then a configured `nbar`; with none of
/// them the border scenario's `α = 1` applies.
fn alpha_source(args: IntensityArgs, cfg: &mut NetworkConfig) -> Result<AlphaSource> {
    if let Some(a) = args.alpha {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::invalid(format!("--alpha {a} must be finite and nonnegative")));
        }
        return Ok(AlphaSource::Fixed(a));
    }
    if let Some(n) = args.nbar {
        cfg.traffic.n_bar = n;
        cfg.traffic.validate()?;
        return Ok(AlphaSource::Traffic);
    }
    if cfg.traffic.n_bar > 0.0 {
        return Ok(AlphaSource::Traffic);
    }
    Ok(AlphaSource::Fixed(1.0))
}

fn resolve_alpha(source: AlphaSource, d1: f64, cfg: &NetworkConfig) -> Result<f64> {
    match source {
        AlphaSource::Fixed(a) => Ok(a),
        AlphaSource::Traffic => cfg.intensity_at(d1),
    }
}

fn estimate_fields(name: &str, e: &McEstimate) -> Vec<String> {
    vec![
        name.to_string(),
        fmt_num(e.mean),
        fmt_num(e.ci95_halfwidth),
        e.trials.to_string(),
    ]
}

/// Runs one parsed command, returning the CSV document and any notes for
/// the error stream.
pub fn execute(cli: &Cli) -> Result<(String, Option<String>, bool)> {
    let mut cfg = load_config(cli.config.as_ref(), &cli.overrides)?;
    let mut notes = None;
    let mut ok = true;
    let csv = match &cli.command {
        Command::Table1 => {
            let mut out = String::from("sf,toa_ms,bitrate_kbps,sensitivity_dbm,snr_threshold_db,duty_cycle\n");
            for row in default_sf_table() {
                out.push_str(&csv_line(&[
                    row.sf.to_string(),
                    fmt_num(row.toa),
                    fmt_num(row.bitrate),
                    fmt_num(row.sensitivity),
                    fmt_num(row.snr_threshold_db),
                    fmt_num(row.duty_cycle),
                ]));
            }
            out
        }
        Command::Coverage { d1, intensity } => {
            let source = alpha_source(*intensity, &mut cfg)?;
            let alpha = resolve_alpha(source, *d1, &cfg)?;
            let c = analytic::coverage(*d1, &cfg, alpha)?;
            format!("{SWEEP_HEADER}\n{}", csv_line(&coverage_fields(*d1, &c)))
        }
        Command::Sweep {
            variable,
            start,
            stop,
            step,
            d1,
            mc_trials,
            intensity,
        } => {
            let alpha = alpha_source(*intensity, &mut cfg)?;
            let spec = SweepSpec {
                variable: variable.parse::<SweepVariable>()?,
                start: *start,
                stop: *stop,
                step: *step,
                d1: *d1,
                alpha,
                mc_trials: *mc_trials,
                seed: cli.seed,
            };
            sweep_csv(&experiments::sweep(&spec, &cfg)?)
        }
        Command::Mc { d1, trials, intensity } => {
            let source = alpha_source(*intensity, &mut cfg)?;
            let alpha = resolve_alpha(source, *d1, &cfg)?;
            let r = mcsim::estimate(*d1, &cfg, alpha, *trials, cli.seed)?;
            let mut out = String::from("metric,mean,ci95,trials\n");
            for (name, e) in [
                ("connected", &r.connected),
                ("captured", &r.captured),
                ("sic_decoded", &r.sic_decoded),
                ("c1", &r.success_c1),
                ("c1_sic", &r.success_c1_sic),
                ("single_interferer_given_collision", &r.single_interferer),
            ] {
                out.push_str(&csv_line(&estimate_fields(name, e)));
            }
            out
        }
        Command::Validate { trials } => {
            let checks = experiments::validate_against_mc(&cfg, *trials, cli.seed)?;
            let mut out = String::from("d1,alpha,check,analytic,mc,ci95,deviation,threshold,pass\n");
            let mut max_dev: f64 = 0.0;
            for c in &checks {
                max_dev = max_dev.max(c.deviation.abs());
                ok &= c.pass;
                out.push_str(&csv_line(&[
                    fmt_num(c.d1),
                    fmt_num(c.alpha),
                    c.kind.name().to_string(),
                    fmt_num(c.analytic),
                    fmt_num(c.mc),
                    fmt_num(c.ci95),
                    fmt_num(c.deviation),
                    fmt_num(c.threshold),
                    c.pass.to_string(),
                ]));
            }
            let failed = checks.iter().filter(|c| !c.pass).count();
            notes = Some(format!(
                "max |deviation| = {}; {} of {} checks passed",
                fmt_num(max_dev),
                checks.len() - failed,
                checks.len()
            ));
            out
        }
        Command::Capacity { alphas } => {
            let rows = capacity_table(alphas, &cfg.sf_table)?;
            let mut out = String::from("alpha,sf7,sf8,sf9,sf10,sf11,sf12,total\n");
            for row in rows {
                let mut fields = vec![fmt_num(row.alpha)];
                fields.extend(row.nodes.iter().map(u64::to_string));
                fields.push(row.total.to_string());
                out.push_str(&csv_line(&fields));
            }
            out
        }
        Command::Plan { target, sic, d1 } => {
            let alpha = find_alpha_for_target(*target, *d1, &cfg, *sic)?;
            let objective = experiments::planning_objective(alpha, *d1, &cfg, *sic)?;
            let total = capacity_table(&[alpha], &cfg.sf_table)?[0].total;
            format!(
                "target,sic,alpha_star,objective,nodes_total\n{}",
                csv_line(&[
                    fmt_num(*target),
                    sic.to_string(),
                    fmt_num(alpha),
                    fmt_num(objective),
                    total.to_string()
                ])
            )
        }
    };
    Ok((csv, notes, ok))
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } | Error::InvalidArgument(_) | Error::OutOfCoverage { .. } => EXIT_USAGE,
        Error::Domain(_) | Error::Convergence(_) | Error::Infeasible(_) => EXIT_COMPUTATION,
    }
}

/// Parses `argv`, runs the command and writes results. Returns the exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let (csv, notes, ok) = match execute(&cli) {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &cli.output {
        Some(path) => fs::write(path, csv.as_bytes()).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => stdout.write_all(csv.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        let _ = writeln!(stderr, "error: {msg}");
        return EXIT_USAGE;
    }
    if let Some(n) = notes {
        let _ = writeln!(stderr, "{n}");
    }
    if ok {
        EXIT_OK
    } else {
        EXIT_COMPUTATION
    }
}

pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(argv, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(3000.0), "3000");
        assert_eq!(fmt_num(0.488910298083728787), "0.4889102981");
        assert_eq!(fmt_num(45.8e-6), "4.58e-05");
        assert_eq!(fmt_num(0.000123456789012), "0.000123456789");
        assert_eq!(fmt_num(12345678901.0), "1.23456789e+10");
        assert_eq!(fmt_num(-117.0308998699), "-117.0308999");
        assert_eq!(fmt_num(9999999999.6), "1e+10");
        assert_eq!(fmt_num(f64::NAN), "nan");
    }

    #[test]
    fn override_syntax() {
        assert!(load_config(None, &["gamma_db".into()]).is_err());
        let cfg = load_config(None, &["gamma_db=6".into()]).unwrap();
        assert_eq!(cfg.radio.capture_threshold_db, 6.0);
    }

    #[test]
    fn exit_codes() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run(["lorasic", "bogus"], &mut out, &mut err), EXIT_USAGE);
        assert_eq!(run(["lorasic", "coverage"], &mut out, &mut err), EXIT_USAGE);
        assert_eq!(
            run(["lorasic", "coverage", "--d1", "4000"], &mut out, &mut err),
            EXIT_USAGE
        );
        assert_eq!(
            run(["lorasic", "--set", "path_loss_exp=1.5", "table1"], &mut out, &mut err),
            EXIT_USAGE
        );
        assert_eq!(
            run(["lorasic", "plan", "--target", "0.97"], &mut out, &mut err),
            EXIT_COMPUTATION
        );
        assert_eq!(run(["lorasic", "--help"], &mut out, &mut err), EXIT_OK);
        assert_eq!(
            run(
                ["lorasic", "coverage", "--d1", "3000", "--alpha", "1", "--nbar", "5"],
                &mut out,
                &mut err
            ),
            EXIT_USAGE
        );
    }
}
