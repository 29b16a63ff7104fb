//! Run-level configuration and the implementations behind the `cssdiff`
//! subcommands. The binary itself is a thin argument-parsing wrapper.
//!
//! Config files are flat `key = value` lines with '#' comments. Unknown
//! keys are rejected by name with their line number. Exit statuses:
//! 0 success/converged, 1 usage or parse failure, 2 non-convergence,
//! 3 internal invariant violation (with a counterexample dump).

use crate::abm::run_abm;
use crate::comparative::{
    compare_conduciveness, parameter_sweep, ConducivenessRelation, SweepParameter,
};
use crate::equilibrium::{find_all_fixed_points, solve_equilibrium, SolveMethod};
use crate::error::{Error, Result};
use crate::output::{
    abm_csv, abm_trajectory_csv, atomic_write, ensemble_csv, fmt_sig10, sweep_csv, trajectory_csv,
};
use crate::scenario::Scenario;
use rayon::prelude::*;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NON_CONVERGED: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

/// Parsed run configuration: the scenario plus run-level options.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub seeds: u32,
    pub abm_n: u32,
    pub abm_steps: u32,
    pub dt: f64,
    pub horizon: f64,
    pub sweep_parameter: Option<SweepParameter>,
    pub sweep_values: Vec<f64>,
    pub freeze_couplings: bool,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::default(),
            seed: 1,
            seeds: 1,
            abm_n: 18,
            abm_steps: 200,
            dt: 0.05,
            horizon: 50.0,
            sweep_parameter: None,
            sweep_values: Vec::new(),
            freeze_couplings: false,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected 'key = value', got '{line}'",
                    idx + 1
                ))
            })?;
            cfg.apply(key.trim(), value.trim()).map_err(|e| match e {
                Error::Config(msg) => Error::Config(format!("line {}: {msg}", idx + 1)),
                other => other,
            })?;
        }
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "seed" => self.seed = parse_num(key, value)?,
            "seeds" => self.seeds = parse_num(key, value)?,
            "abm_n" => self.abm_n = parse_num(key, value)?,
            "abm_steps" => self.abm_steps = parse_num(key, value)?,
            "dt" => self.dt = parse_num(key, value)?,
            "horizon" => self.horizon = parse_num(key, value)?,
            "freeze_couplings" => {
                self.freeze_couplings = match value {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(Error::Config(format!(
                            "key 'freeze_couplings': expected true or false, got '{other}'"
                        )))
                    }
                }
            }
            "sweep_parameter" => self.sweep_parameter = Some(SweepParameter::parse(value)?),
            "sweep_values" => {
                let mut values = Vec::new();
                for part in value.split(',') {
                    let part = part.trim();
                    if part.is_empty() {
                        continue;
                    }
                    values.push(part.parse::<f64>().map_err(|e| {
                        Error::Config(format!("sweep_values: bad value '{part}' ({e})"))
                    })?);
                }
                self.sweep_values = values;
            }
            "out" => self.out = Some(PathBuf::from(value)),
            scenario_key => self.scenario.set_key(scenario_key, value)?,
        }
        Ok(())
    }

    /// Canonical rendering; parses back to an identical config.
    pub fn dump(&self) -> String {
        let mut out = self.scenario.dump();
        out.push_str(&format!("seed = {}\n", self.seed));
        out.push_str(&format!("seeds = {}\n", self.seeds));
        out.push_str(&format!("abm_n = {}\n", self.abm_n));
        out.push_str(&format!("abm_steps = {}\n", self.abm_steps));
        out.push_str(&format!("dt = {}\n", self.dt));
        out.push_str(&format!("horizon = {}\n", self.horizon));
        out.push_str(&format!("freeze_couplings = {}\n", self.freeze_couplings));
        if let Some(p) = self.sweep_parameter {
            out.push_str(&format!("sweep_parameter = {}\n", p.name()));
        }
        if !self.sweep_values.is_empty() {
            let vals = self
                .sweep_values
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(", ");
            out.push_str(&format!("sweep_values = {vals}\n"));
        }
        if let Some(out_path) = &self.out {
            out.push_str(&format!("out = {}\n", out_path.display()));
        }
        out
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse()
        .map_err(|e| Error::Config(format!("key '{key}': bad value '{v}' ({e})")))
}

/// What a subcommand produced: text for stdout and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CmdOutput {
    pub stdout: String,
    pub exit_code: i32,
}

fn ok(stdout: String) -> CmdOutput {
    CmdOutput {
        stdout,
        exit_code: EXIT_OK,
    }
}

/// Build the game from user-provided configuration; any rejection here is
/// the user's input, so it reports as a config error (exit 1), not an
/// internal one.
fn validated_game(cfg: &RunConfig) -> Result<crate::game::GameConfig> {
    let x0 = cfg.scenario.x0;
    if !x0.is_finite() || x0 <= 0.0 || x0 > 1.0 {
        return Err(Error::Config(format!("x0 must lie in (0,1], got {x0}")));
    }
    cfg.scenario
        .game_config()
        .map_err(|e| Error::Config(e.to_string()))
}

/// Solve the mean-field equilibrium, cross-check uniqueness by bisection,
/// optionally write the trajectory CSV.
pub fn cmd_eq(cfg: &RunConfig) -> Result<CmdOutput> {
    let game = validated_game(cfg)?;
    let (report, traj) = solve_equilibrium(&game, cfg.scenario.x0, cfg.scenario.max_steps)?;

    // Uniqueness check: at most one fixed point away from zero.
    let roots = find_all_fixed_points(&game, 1000)?;
    let positive: Vec<f64> = roots.iter().copied().filter(|&r| r > 1e-9).collect();
    if positive.len() > 1 {
        let mut dump = String::from("x_root\n");
        for r in &positive {
            dump.push_str(&format!("{}\n", fmt_sig10(*r)));
        }
        let path = match &cfg.out {
            Some(out) => out.with_file_name("counterexample_fixed_points.csv"),
            None => PathBuf::from("counterexample_fixed_points.csv"),
        };
        atomic_write(&path, &dump)?;
        return Ok(CmdOutput {
            stdout: format!(
                "invariant violation: {} fixed points in (0,1]; dumped to {}\n",
                positive.len(),
                path.display()
            ),
            exit_code: EXIT_INVARIANT,
        });
    }

    let mut out = String::new();
    out.push_str(&format!("x_star = {}\n", fmt_sig10(report.x_star)));
    out.push_str(&format!("xi_star = {}\n", fmt_sig10(report.xi_star)));
    out.push_str(&format!("residual = {}\n", fmt_sig10(report.residual)));
    out.push_str(&format!("iterations = {}\n", traj.iterations));
    out.push_str(&format!("converged = {}\n", traj.converged));
    out.push_str(&format!(
        "trivial_zero_fixed_point = {}\n",
        report.trivial_zero_fixed_point
    ));
    out.push_str(&format!(
        "method = {}\n",
        match report.method {
            SolveMethod::Iteration => "iteration",
            SolveMethod::Bisection => "bisection",
        }
    ));
    if let Some(path) = &cfg.out {
        atomic_write(path, &trajectory_csv(&traj))?;
    }
    Ok(CmdOutput {
        stdout: out,
        exit_code: if traj.converged {
            EXIT_OK
        } else {
            EXIT_NON_CONVERGED
        },
    })
}

/// Emit the mean-field trajectory CSV alongside the continuous relaxation
/// flow (`<out>_flow.csv`, stepped by `dt` up to `horizon`); when an ABM
/// population size is configured, also emit the empirical trajectory.
pub fn cmd_dynamics(cfg: &RunConfig) -> Result<CmdOutput> {
    let game = validated_game(cfg)?;
    let traj =
        crate::equilibrium::iterate_fixed_point(&game, cfg.scenario.x0, cfg.scenario.max_steps)?;
    let path = cfg.out.clone().ok_or_else(|| {
        Error::Config("dynamics needs an output path (out = ... or --out)".into())
    })?;
    atomic_write(&path, &trajectory_csv(&traj))?;
    let mut stdout = format!("wrote {}\n", path.display());

    // Per-degree relaxation flow started at the common initial fraction.
    let xi0 = vec![cfg.scenario.x0; game.degree_dist().probs().len()];
    let flow =
        crate::equilibrium::meanfield_dynamics(&game, cfg.scenario.x0, &xi0, cfg.horizon, cfg.dt)
            .map_err(|e| match e {
            Error::Domain(msg) => Error::Config(msg),
            other => other,
        })?;
    let flow_path = sibling_path(&path, "_flow");
    atomic_write(&flow_path, &trajectory_csv(&flow))?;
    stdout.push_str(&format!("wrote {}\n", flow_path.display()));

    if cfg.abm_n >= 2 {
        let res = run_abm(
            &game,
            cfg.abm_n,
            cfg.abm_steps,
            cfg.seed,
            cfg.scenario.x0,
            cfg.scenario.belief,
        )?;
        let abm_path = sibling_path(&path, "_abm");
        atomic_write(&abm_path, &abm_trajectory_csv(&res))?;
        stdout.push_str(&format!("wrote {}\n", abm_path.display()));
    }
    Ok(CmdOutput {
        stdout,
        exit_code: if traj.converged {
            EXIT_OK
        } else {
            EXIT_NON_CONVERGED
        },
    })
}

/// Run the agent-based simulation; one CSV for a single seed, a per-seed
/// summary CSV for an ensemble.
pub fn cmd_abm(cfg: &RunConfig) -> Result<CmdOutput> {
    if cfg.abm_n < 2 {
        return Err(Error::Config(format!(
            "abm needs a population of at least 2 (abm_n = {})",
            cfg.abm_n
        )));
    }
    let game = validated_game(cfg)?;
    let path = cfg
        .out
        .clone()
        .ok_or_else(|| Error::Config("abm needs an output path (out = ... or --out)".into()))?;
    if cfg.seeds <= 1 {
        let res = run_abm(
            &game,
            cfg.abm_n,
            cfg.abm_steps,
            cfg.seed,
            cfg.scenario.x0,
            cfg.scenario.belief,
        )?;
        atomic_write(&path, &abm_csv(&res))?;
        let stdout = format!(
            "terminal_x_hat = {}\nterminal_xi_hat = {}\nabsorbed = {}\nwrote {}\n",
            fmt_sig10(res.terminal_x_hat),
            fmt_sig10(res.terminal_xi_hat),
            res.absorbed,
            path.display()
        );
        return Ok(ok(stdout));
    }
    let results: Vec<(u64, Result<crate::abm::AbmResult>)> = (0..cfg.seeds as u64)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.seed.wrapping_add(i);
            (
                seed,
                run_abm(
                    &game,
                    cfg.abm_n,
                    cfg.abm_steps,
                    seed,
                    cfg.scenario.x0,
                    cfg.scenario.belief,
                ),
            )
        })
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    for (seed, r) in &results {
        match r {
            Ok(res) => rows.push((*seed, res)),
            Err(e) => return Err(Error::Domain(format!("seed {seed}: {e}"))),
        }
    }
    atomic_write(&path, &ensemble_csv(&rows))?;
    Ok(ok(format!(
        "seeds = {}\nwrote {}\n",
        cfg.seeds,
        path.display()
    )))
}

/// Solve the configured parameter sweep and write the table.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<CmdOutput> {
    let parameter = cfg.sweep_parameter.ok_or_else(|| {
        Error::Config("sweep needs 'sweep_parameter = r|beta|m|rho|alpha|intensity'".into())
    })?;
    if cfg.sweep_values.is_empty() {
        return Err(Error::Config(
            "sweep needs a non-empty 'sweep_values' list".into(),
        ));
    }
    let rows = parameter_sweep(
        &cfg.scenario,
        parameter,
        &cfg.sweep_values,
        cfg.freeze_couplings,
    )?;
    let path = cfg
        .out
        .clone()
        .ok_or_else(|| Error::Config("sweep needs an output path (out = ... or --out)".into()))?;
    atomic_write(&path, &sweep_csv(parameter.name(), &rows))?;
    let mut stdout = format!("wrote {}\n", path.display());
    for r in rows.iter().filter(|r| r.error.is_some()) {
        stdout.push_str(&format!(
            "value {} failed: {}\n",
            r.value,
            r.error.as_deref().unwrap_or("")
        ));
    }
    Ok(ok(stdout))
}

/// Compare how conducive to diffusion scenario B is relative to A.
pub fn cmd_compare(cfg_a: &RunConfig, cfg_b: &RunConfig, grid_points: u32) -> Result<CmdOutput> {
    validated_game(cfg_a)?;
    validated_game(cfg_b)?;
    let verdict = compare_conduciveness(&cfg_a.scenario, &cfg_b.scenario, grid_points)
        .map_err(|e| Error::Config(e.to_string()))?;
    let mut out = format!(
        "relation = {}\nmax_gap = {}\ngrid_points = {}\n",
        match verdict.relation {
            ConducivenessRelation::MoreConducive => "more_conducive",
            ConducivenessRelation::LessConducive => "less_conducive",
            ConducivenessRelation::Crossing => "crossing",
            ConducivenessRelation::Equal => "equal",
        },
        fmt_sig10(verdict.max_gap),
        verdict.grid_points
    );
    if let Some(w) = verdict.witness {
        out.push_str(&format!("witness = {}\n", fmt_sig10(w)));
    }
    Ok(ok(out))
}

fn sibling_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}
