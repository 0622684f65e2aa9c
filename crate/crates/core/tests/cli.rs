use std::process::{Command, Output};

fn lorasic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lorasic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn capacity_rows_for_three_intensities() {
    let o = lorasic(&["capacity", "--alphas", "0.20,0.52,1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alpha,sf7,sf8,sf9,sf10,sf11,sf12,total");
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[1], "0.2,2183,1247,623,363,182,91,4689");
}

#[test]
fn coverage_matches_single_point_sweep() {
    let cov = lorasic(&["coverage", "--d1", "3000", "--alpha", "1"]);
    let sweep = lorasic(&[
        "sweep", "--var", "d1", "--start", "3000", "--stop", "3000", "--step", "1",
    ]);
    assert_eq!(cov.status.code(), Some(0));
    assert_eq!(stdout(&cov), stdout(&sweep));
    let text = stdout(&cov);
    let row: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(row[0], 3000.0);
    // H₁Q₁ at the border
    assert!((row[4] - 0.489).abs() < 5e-4);
}

#[test]
fn mc_sweep_is_byte_stable() {
    let args = [
        "sweep",
        "--var",
        "alpha",
        "--start",
        "0",
        "--stop",
        "1",
        "--step",
        "0.5",
        "--mc-trials",
        "20000",
        "--seed",
        "9",
    ];
    let a = lorasic(&args);
    let b = lorasic(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("x,h1,q1,q2,c1,c1_sic,mc_c1,mc_c1_ci95,mc_c1_sic,mc_c1_sic_ci95\n"));
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().count(), 4);
    let c = lorasic(&[
        "sweep",
        "--var",
        "alpha",
        "--start",
        "0",
        "--stop",
        "1",
        "--step",
        "0.5",
        "--mc-trials",
        "20000",
        "--seed",
        "10",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn config_file_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.cfg");
    std::fs::write(&cfg, "# manufacturer threshold\ngamma_db = 6\n").unwrap();
    let out = dir.path().join("out.csv");
    let o = lorasic(&[
        "--config",
        cfg.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
        "coverage",
        "--d1",
        "3000",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let row: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((row[2] - 0.4343149083).abs() < 1e-9);

    let o = lorasic(&[
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "gamma_db=1",
        "coverage",
        "--d1",
        "3000",
    ]);
    let row: Vec<f64> = stdout(&o)
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((row[2] - 0.5407497421).abs() < 1e-9);
}

#[test]
fn exit_statuses() {
    assert_eq!(lorasic(&["nonsense"]).status.code(), Some(1));
    assert_eq!(
        lorasic(&["sweep", "--var", "speed", "--start", "0", "--stop", "1", "--step", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        lorasic(&["--set", "path_loss_exp=1.5", "table1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        lorasic(&["--config", "/nonexistent/file", "table1"]).status.code(),
        Some(1)
    );
    let o = lorasic(&["plan", "--target", "0.99", "--sic"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("infeasible"));
}

#[test]
fn plan_and_table1() {
    let o = lorasic(&["plan", "--target", "0.8", "--sic"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let fields: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let alpha: f64 = fields[2].parse().unwrap();
    assert!((alpha - 0.5096).abs() < 1e-3);

    let text = stdout(&lorasic(&["table1"]));
    assert_eq!(text.lines().count(), 7);
    assert_eq!(text.lines().nth(1).unwrap(), "7,41.22,5.47,-123,-6,4.58e-05");
}

#[test]
fn mc_and_validate() {
    let o = lorasic(&["mc", "--d1", "3000", "--trials", "50000", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("single_interferer_given_collision,"));
    let o = lorasic(&["validate"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 1 + 36);
    assert!(String::from_utf8_lossy(&o.stderr).contains("36 of 36 checks passed"));
}
