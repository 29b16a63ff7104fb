//! Stochastic-dominance tests and "conduciveness to diffusion" comparisons
//! between network maps, plus the parameter-sweep driver behind the
//! figure-reproduction runs.

use crate::equilibrium::solve_equilibrium;
use crate::error::{Error, Result};
use crate::game::network_map;
use crate::scenario::Scenario;
use rayon::prelude::*;

const SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DominanceRelation {
    /// B is stochastically larger: F_A >= F_B everywhere on the grid.
    Dominates,
    /// A is stochastically larger.
    Dominated,
    Crossing,
    Equal,
}

/// Ordering of random variable B relative to A, decided on a finite grid.
/// The grid that produced the verdict is recorded for reproducibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominanceVerdict {
    pub relation: DominanceRelation,
    /// First grid point where the initially established ordering fails;
    /// present exactly for crossings.
    pub witness: Option<f64>,
    pub grid_len: usize,
    pub grid_span: (f64, f64),
}

/// First-order stochastic dominance of B over A from their CDFs, evaluated
/// on `grid` with 1e-12 slack.
pub fn stochastic_dominance(
    cdf_a: impl Fn(f64) -> f64,
    cdf_b: impl Fn(f64) -> f64,
    grid: &[f64],
) -> Result<DominanceVerdict> {
    if grid.is_empty() {
        return Err(Error::Domain("dominance grid must be non-empty".into()));
    }
    let diffs: Vec<(f64, f64)> = grid.iter().map(|&y| (y, cdf_a(y) - cdf_b(y))).collect();
    Ok(classify(&diffs))
}

fn classify(diffs: &[(f64, f64)]) -> DominanceVerdict {
    let mut seen_pos = false;
    let mut seen_neg = false;
    let mut witness = None;
    for &(y, d) in diffs {
        if d > SLACK {
            if seen_neg && witness.is_none() {
                witness = Some(y);
            }
            seen_pos = true;
        } else if d < -SLACK {
            if seen_pos && witness.is_none() {
                witness = Some(y);
            }
            seen_neg = true;
        }
    }
    let relation = match (seen_pos, seen_neg) {
        (false, false) => DominanceRelation::Equal,
        (true, false) => DominanceRelation::Dominates,
        (false, true) => DominanceRelation::Dominated,
        (true, true) => DominanceRelation::Crossing,
    };
    DominanceVerdict {
        relation,
        witness: if relation == DominanceRelation::Crossing {
            witness
        } else {
            None
        },
        grid_len: diffs.len(),
        grid_span: (diffs[0].0, diffs[diffs.len() - 1].0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConducivenessRelation {
    /// The network map of B sits pointwise above that of A.
    MoreConducive,
    LessConducive,
    Crossing,
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConducivenessVerdict {
    pub relation: ConducivenessRelation,
    /// Largest absolute pointwise gap between the two maps.
    pub max_gap: f64,
    pub witness: Option<f64>,
    /// Resolution of the uniform [0,1] grid behind the verdict.
    pub grid_points: u32,
}

/// Compare how conducive to diffusion scenario B is relative to A by
/// evaluating both network maps on a uniform grid over [0,1].
pub fn compare_conduciveness(
    a: &Scenario,
    b: &Scenario,
    grid_points: u32,
) -> Result<ConducivenessVerdict> {
    if grid_points < 100 {
        return Err(Error::Domain(format!(
            "conduciveness grid needs at least 100 points, got {grid_points}"
        )));
    }
    let cfg_a = a.game_config()?;
    let cfg_b = b.game_config()?;
    let mut diffs = Vec::with_capacity(grid_points as usize + 1);
    let mut max_gap = 0.0_f64;
    for i in 0..=grid_points {
        let x = i as f64 / grid_points as f64;
        let gap = network_map(&cfg_b, x)? - network_map(&cfg_a, x)?;
        max_gap = max_gap.max(gap.abs());
        // classify() reads CDF-style differences; conduciveness of B means
        // the B map is the larger one, so feed it (map_b - map_a).
        diffs.push((x, gap));
    }
    let d = classify(&diffs);
    let relation = match d.relation {
        DominanceRelation::Dominates => ConducivenessRelation::MoreConducive,
        DominanceRelation::Dominated => ConducivenessRelation::LessConducive,
        DominanceRelation::Crossing => ConducivenessRelation::Crossing,
        DominanceRelation::Equal => ConducivenessRelation::Equal,
    };
    Ok(ConducivenessVerdict {
        relation,
        max_gap,
        grid_points,
        witness: d.witness,
    })
}

/// Which scenario field a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Communication range R; re-derives correlation and intensity unless
    /// couplings are frozen.
    RangeR,
    Beta,
    Antennas,
    Rho,
    Alpha,
    Intensity,
}

impl SweepParameter {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "r" => Ok(Self::RangeR),
            "beta" => Ok(Self::Beta),
            "m" => Ok(Self::Antennas),
            "rho" => Ok(Self::Rho),
            "alpha" => Ok(Self::Alpha),
            "intensity" => Ok(Self::Intensity),
            other => Err(Error::Config(format!(
                "unknown sweep parameter '{other}' (expected r, beta, m, rho, alpha, intensity)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::RangeR => "r",
            Self::Beta => "beta",
            Self::Antennas => "m",
            Self::Rho => "rho",
            Self::Alpha => "alpha",
            Self::Intensity => "intensity",
        }
    }
}

/// One solved sweep point. `error` rows keep the sweep going but carry NaN
/// metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub x_star: f64,
    pub xi_star: f64,
    pub converged: bool,
    pub residual: f64,
    pub error: Option<String>,
}

fn apply(base: &Scenario, parameter: SweepParameter, value: f64, freeze: bool) -> Scenario {
    let mut s = base.clone();
    if freeze {
        s.freeze_couplings();
    }
    match parameter {
        SweepParameter::RangeR => s.range_r = value,
        SweepParameter::Beta => s.beta = value,
        SweepParameter::Antennas => s.antennas = value as u32,
        SweepParameter::Rho => s.rho_override = Some(value),
        SweepParameter::Alpha => s.alpha = value,
        SweepParameter::Intensity => s.intensity_override = Some(value),
    }
    s
}

/// Solve the equilibrium for every value of the swept parameter. Points run
/// in parallel; rows come back in input order.
pub fn parameter_sweep(
    base: &Scenario,
    parameter: SweepParameter,
    values: &[f64],
    freeze_couplings: bool,
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::Domain("sweep needs at least one value".into()));
    }
    let rows: Vec<SweepRow> = values
        .par_iter()
        .map(|&value| {
            if parameter == SweepParameter::Antennas
                && (value < 1.0 || value.fract() != 0.0 || !value.is_finite())
            {
                return SweepRow {
                    value,
                    x_star: f64::NAN,
                    xi_star: f64::NAN,
                    converged: false,
                    residual: f64::NAN,
                    error: Some(format!("m must be a positive integer, got {value}")),
                };
            }
            let s = apply(base, parameter, value, freeze_couplings);
            match s
                .game_config()
                .and_then(|cfg| solve_equilibrium(&cfg, s.x0, s.max_steps))
            {
                Ok((report, _)) => SweepRow {
                    value,
                    x_star: report.x_star,
                    xi_star: report.xi_star,
                    converged: true,
                    residual: report.residual,
                    error: None,
                },
                Err(e) => SweepRow {
                    value,
                    x_star: f64::NAN,
                    xi_star: f64::NAN,
                    converged: false,
                    residual: f64::NAN,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(rows)
}
