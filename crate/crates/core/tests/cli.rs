//! End-to-end tests of the `cssdiff` binary: exit statuses, config
//! handling, and CSV format contracts.

use std::path::{Path, PathBuf};
use std::process::Output;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_cssdiff")
}

fn tmp() -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn write_cfg(name: &str, contents: &str) -> PathBuf {
    let p = tmp().join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    std::process::Command::new(bin())
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).to_string()
}

#[test]
fn eq_defaults_converges_with_exit_zero() {
    let o = run(&["eq"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("converged = true"));
    let residual: f64 = s
        .lines()
        .find_map(|l| l.strip_prefix("residual = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(residual <= 1e-3);
}

#[test]
fn eq_rejects_zero_epsilon_naming_key_and_line() {
    let cfg = write_cfg("eps0.cfg", "n = 18\nepsilon = 0\n");
    let o = run(&["eq", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert!(e.contains("epsilon"), "{e}");
    assert!(e.contains("line 2"), "{e}");
}

#[test]
fn missing_config_file_names_the_path() {
    let o = run(&["eq", "--config", "/nonexistent/path.cfg"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/nonexistent/path.cfg"));
}

#[test]
fn unknown_key_is_named() {
    let cfg = write_cfg("unknown.cfg", "coupling = strong\n");
    let o = run(&["eq", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("coupling"));
}

#[test]
fn usage_errors_exit_one() {
    let o = run(&[]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn non_convergence_exits_two() {
    let cfg = write_cfg("slow.cfg", "epsilon = 1e-9\nmax_steps = 1\nrho = 0.0\n");
    let o = run(&["eq", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    assert!(stdout(&o).contains("converged = false"));
}

#[test]
fn dump_config_round_trips_bit_exactly() {
    let cfg = write_cfg(
        "dump.cfg",
        "beta = 0.85\nrho = 0.125\nsweep_parameter = m\nsweep_values = 1, 2\nseed = 9\n",
    );
    let first = run(&["eq", "--config", cfg.to_str().unwrap(), "--dump-config"]);
    assert_eq!(first.status.code(), Some(0));
    let dumped = write_cfg("dumped.cfg", &stdout(&first));
    let second = run(&["eq", "--config", dumped.to_str().unwrap(), "--dump-config"]);
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn dynamics_csv_format_contract() {
    let out = tmp().join("dyn.csv");
    let cfg = write_cfg("dyn.cfg", "x0 = 0.2\nabm_n = 0\n");
    let o = run(&[
        "dynamics",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x,xi"));
    assert!(!text.contains('\r'), "CRLF in output");
    // Monotone x column and numeric formatting with '.' separators.
    let xs: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(xs.len() >= 2);
    let up = xs.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let down = xs.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    assert!(up || down, "x column not monotone: {xs:?}");
}

#[test]
fn dynamics_emits_abm_and_flow_companions() {
    let out = tmp().join("dyn2.csv");
    let cfg = write_cfg(
        "dyn2.cfg",
        "x0 = 0.2\nabm_n = 50\nseed = 4\nhorizon = 5\ndt = 0.1\n",
    );
    let o = run(&[
        "dynamics",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let abm = std::fs::read_to_string(tmp().join("dyn2_abm.csv")).unwrap();
    assert!(abm.starts_with("t,x,xi\n"));
    let flow = std::fs::read_to_string(tmp().join("dyn2_flow.csv")).unwrap();
    assert!(flow.starts_with("t,x,xi\n"));
    // horizon/dt control the flow length: 50 steps plus the initial row.
    assert_eq!(flow.lines().count(), 52);
}

#[test]
fn invalid_scenario_values_exit_one() {
    for bad in ["sigma = -1\n", "x0 = 0\n", "rho = 1.5\n", "n = 1\n"] {
        let cfg = write_cfg("bad_scenario.cfg", bad);
        let o = run(&["eq", "--config", cfg.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1), "for {bad:?}: {}", stderr(&o));
    }
}

#[test]
fn abm_csv_format_contract() {
    let out = tmp().join("abm.csv");
    let cfg = write_cfg("abm.cfg", "abm_n = 60\nseed = 3\n");
    let o = run(&[
        "abm",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("t,x_hat,xi_hat,coop_count\n"));
}

#[test]
fn abm_ensemble_summary() {
    let out = tmp().join("ens.csv");
    let cfg = write_cfg("ens.cfg", "abm_n = 60\nseeds = 4\nseed = 11\n");
    let o = run(&[
        "abm",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("seed,terminal_x_hat,terminal_xi_hat,steps,absorbed\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn sweep_antennas_end_to_end_monotone() {
    let out = tmp().join("sweep_m.csv");
    let cfg = write_cfg(
        "sweep_m.cfg",
        "rho = 0.0\nepsilon = 1e-9\nsweep_parameter = m\nsweep_values = 1, 2, 3\n",
    );
    let o = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("parameter,value,x_star,xi_star,converged,residual\n"));
    let xs: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(xs.len(), 3);
    assert!(
        xs.windows(2).all(|w| w[1] >= w[0] - 1e-9),
        "not nondecreasing: {xs:?}"
    );
}

#[test]
fn sweep_range_end_to_end_trend() {
    // Under the density intensity convention a longer range raises costs;
    // the cooperating fraction must not rise.
    let out = tmp().join("sweep_r.csv");
    let cfg = write_cfg(
        "sweep_r.cfg",
        "intensity_convention = density\nepsilon = 1e-9\nsweep_parameter = r\nsweep_values = 2, 5, 10, 20\n",
    );
    let o = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let xis: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert!(
        xis.windows(2).all(|w| w[1] <= w[0] + 1e-9),
        "xi_star rose with r: {xis:?}"
    );
}

#[test]
fn sweep_rejects_bad_specs() {
    let cfg = write_cfg(
        "sweep_bad.cfg",
        "sweep_parameter = m\nsweep_values = 1, two\n",
    );
    let o = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        "/tmp/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("two"));

    let cfg = write_cfg("sweep_empty.cfg", "sweep_parameter = m\n");
    let o = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        "/tmp/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn compare_directions() {
    let base = write_cfg("cmp_base.cfg", "");
    let lower_beta = write_cfg("cmp_beta.cfg", "beta = 0.85\n");
    let higher_rho = write_cfg("cmp_rho.cfg", "rho = 0.9999\n");

    let o = run(&[
        "compare",
        "--config",
        base.to_str().unwrap(),
        "--config-b",
        base.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("relation = equal"));
    assert!(stdout(&o).contains("grid_points = 1000"));

    let o = run(&[
        "compare",
        "--config",
        base.to_str().unwrap(),
        "--config-b",
        lower_beta.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("relation = more_conducive"));

    let o = run(&[
        "compare",
        "--config",
        base.to_str().unwrap(),
        "--config-b",
        higher_rho.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("relation = less_conducive"));
}

#[test]
fn thread_cap_env_is_accepted() {
    let out = tmp().join("threads.csv");
    let cfg = write_cfg(
        "threads.cfg",
        "sweep_parameter = beta\nsweep_values = 0.9, 0.95\n",
    );
    let o = std::process::Command::new(bin())
        .env("CSS_DIFFUSION_THREADS", "1")
        .args([
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(Path::new(&out).exists());
}

#[test]
fn trajectory_csv_written_by_eq_out() {
    let out = tmp().join("eq_traj.csv");
    let o = run(&["eq", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("t,x,xi\n"));
}
