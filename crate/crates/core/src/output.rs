//! CSV rendering and atomic file output. All floating-point columns use 10
//! significant digits, '.' decimal separators, and LF line endings,
//! independent of locale.

use crate::abm::AbmResult;
use crate::comparative::SweepRow;
use crate::equilibrium::Trajectory;
use crate::error::Result;
use std::path::Path;

/// Render with 10 significant digits (scientific form keeps the column
/// width stable and is locale-free).
pub fn fmt_sig10(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.9e}")
}

/// Write via a temp file in the target directory plus rename, so readers
/// never observe a partial file and concurrent writers to distinct paths
/// never interleave.
pub fn atomic_write(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = path.with_extension(format!(
        "tmp.{}.{}",
        std::process::id(),
        path.file_name().map_or(0, |n| n.len())
    ));
    if let Some(d) = dir {
        std::fs::create_dir_all(d)?;
    }
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,x,xi\n");
    for s in &traj.steps {
        out.push_str(&format!("{},{},{}\n", s.t, fmt_sig10(s.x), fmt_sig10(s.xi)));
    }
    out
}

pub fn abm_csv(result: &AbmResult) -> String {
    let mut out = String::from("t,x_hat,xi_hat,coop_count\n");
    for s in &result.trajectory {
        out.push_str(&format!(
            "{},{},{},{}\n",
            s.t,
            fmt_sig10(s.x_hat),
            fmt_sig10(s.xi_hat),
            s.coop_count
        ));
    }
    out
}

/// Empirical trajectory on the same axes as the mean-field CSV.
pub fn abm_trajectory_csv(result: &AbmResult) -> String {
    let mut out = String::from("t,x,xi\n");
    for s in &result.trajectory {
        out.push_str(&format!(
            "{},{},{}\n",
            s.t,
            fmt_sig10(s.x_hat),
            fmt_sig10(s.xi_hat)
        ));
    }
    out
}

pub fn ensemble_csv(rows: &[(u64, &AbmResult)]) -> String {
    let mut out = String::from("seed,terminal_x_hat,terminal_xi_hat,steps,absorbed\n");
    for (seed, r) in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            seed,
            fmt_sig10(r.terminal_x_hat),
            fmt_sig10(r.terminal_xi_hat),
            r.trajectory.len() - 1,
            r.absorbed
        ));
    }
    out
}

pub fn sweep_csv(parameter: &str, rows: &[SweepRow]) -> String {
    let mut out = String::from("parameter,value,x_star,xi_star,converged,residual\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            parameter,
            fmt_sig10(r.value),
            fmt_sig10(r.x_star),
            fmt_sig10(r.xi_star),
            r.converged,
            fmt_sig10(r.residual)
        ));
    }
    out
}
