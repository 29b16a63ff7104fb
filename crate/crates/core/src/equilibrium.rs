//! Fixed-point solvers for the diffusion game and the deterministic
//! mean-field time dynamics.

use crate::error::{Error, Result};
use crate::game::{coop_probability, network_map, GameConfig};

/// One recorded step of a deterministic trajectory: the neighbor
/// cooperation probability `x` and the population cooperating fraction
/// `xi` at step `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryStep {
    pub t: u32,
    pub x: f64,
    pub xi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<TrajectoryStep>,
    pub converged: bool,
    pub iterations: u32,
}

impl Trajectory {
    pub fn terminal(&self) -> &TrajectoryStep {
        self.steps
            .last()
            .expect("trajectory has at least the initial step")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Iteration,
    Bisection,
}

/// Converged fixed-point summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumReport {
    pub x_star: f64,
    pub xi_star: f64,
    /// Whether x = 0 is also a fixed point of the network map.
    pub trivial_zero_fixed_point: bool,
    pub residual: f64,
    pub method: SolveMethod,
}

/// Population cooperating fraction at belief `x`: the node-perspective
/// expectation of the per-degree cooperation probability.
pub fn cooperating_fraction(cfg: &GameConfig, x: f64) -> Result<f64> {
    let mut acc = 0.0;
    for &(d, p) in cfg.degree_dist().probs() {
        if p > 0.0 {
            acc += p * coop_probability(cfg, d, x)?;
        }
    }
    Ok(acc)
}

/// Iterate `x <- network_map(x)` from `x0 in (0,1]` until successive
/// iterates differ by at most the config tolerance or `max_steps` is
/// exhausted (flagged, not an error).
pub fn iterate_fixed_point(cfg: &GameConfig, x0: f64, max_steps: u32) -> Result<Trajectory> {
    if !x0.is_finite() || x0 <= 0.0 || x0 > 1.0 + 1e-12 {
        return Err(Error::Domain(format!("x0 must lie in (0,1], got {x0}")));
    }
    let x0 = x0.min(1.0);
    let eps = cfg.epsilon();
    let mut steps = vec![TrajectoryStep {
        t: 0,
        x: x0,
        xi: cooperating_fraction(cfg, x0)?,
    }];
    let mut x = x0;
    let mut converged = false;
    let mut iterations = 0;
    for t in 1..=max_steps {
        let next = network_map(cfg, x)?;
        steps.push(TrajectoryStep {
            t,
            x: next,
            xi: cooperating_fraction(cfg, next)?,
        });
        iterations = t;
        if (next - x).abs() <= eps {
            converged = true;
            break;
        }
        x = next;
    }
    Ok(Trajectory {
        steps,
        converged,
        iterations,
    })
}

/// Solve by iteration and package the report alongside the trajectory.
pub fn solve_equilibrium(
    cfg: &GameConfig,
    x0: f64,
    max_steps: u32,
) -> Result<(EquilibriumReport, Trajectory)> {
    let traj = iterate_fixed_point(cfg, x0, max_steps)?;
    let last = *traj.terminal();
    let report = EquilibriumReport {
        x_star: last.x,
        xi_star: last.xi,
        trivial_zero_fixed_point: network_map(cfg, 0.0)? == 0.0,
        residual: (last.x - network_map(cfg, last.x)?).abs(),
        method: SolveMethod::Iteration,
    };
    Ok((report, traj))
}

/// Scan `x - network_map(x)` for sign changes on a uniform grid over [0,1]
/// and bisect each bracket to 1e-9. Returns every root found, including
/// x = 0 whenever the map fixes it.
pub fn find_all_fixed_points(cfg: &GameConfig, grid: u32) -> Result<Vec<f64>> {
    if grid < 100 {
        return Err(Error::Domain(format!(
            "grid must have at least 100 points, got {grid}"
        )));
    }
    let g = |x: f64| -> Result<f64> { Ok(x - network_map(cfg, x)?) };
    let mut roots: Vec<f64> = Vec::new();
    let push = |r: f64, roots: &mut Vec<f64>| {
        if !roots.iter().any(|&q| (q - r).abs() <= 1e-9) {
            roots.push(r);
        }
    };
    let mut prev_x = 0.0;
    let mut prev_g = g(0.0)?;
    if prev_g == 0.0 {
        push(0.0, &mut roots);
    }
    for i in 1..=grid {
        let x = i as f64 / grid as f64;
        let gx = g(x)?;
        if gx == 0.0 {
            push(x, &mut roots);
        } else if prev_g != 0.0 && prev_g.signum() != gx.signum() {
            // Bisect the bracket.
            let (mut lo, mut hi) = (prev_x, x);
            let mut glo = prev_g;
            while hi - lo > 1e-9 {
                let mid = 0.5 * (lo + hi);
                let gm = g(mid)?;
                if gm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if glo.signum() == gm.signum() {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            push(0.5 * (lo + hi), &mut roots);
        }
        prev_x = x;
        prev_g = gx;
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(roots)
}

/// Report the equilibrium from the bisection scan: the largest fixed point,
/// with x = 0 flagged separately when present.
pub fn equilibrium_via_bisection(cfg: &GameConfig, grid: u32) -> Result<EquilibriumReport> {
    let roots = find_all_fixed_points(cfg, grid)?;
    let trivial = roots.first().is_some_and(|&r| r == 0.0);
    let x_star = roots.last().copied().unwrap_or(0.0);
    Ok(EquilibriumReport {
        x_star,
        xi_star: cooperating_fraction(cfg, x_star)?,
        trivial_zero_fixed_point: trivial,
        residual: (x_star - network_map(cfg, x_star)?).abs(),
        method: SolveMethod::Bisection,
    })
}

/// Forward-Euler integration of the per-degree mean-field flow
/// `d xi_k/dt = -xi_k (1 - F(v_k)) + (1 - xi_k) F(v_k)`, where `F(v_k)` is
/// the cooperation probability of degree `k` at the current belief. The
/// belief starts at `x0` and thereafter aggregates `xi_k` from the edge
/// perspective. `xi0_by_degree` aligns with `degree_dist().probs()`.
pub fn meanfield_dynamics(
    cfg: &GameConfig,
    x0: f64,
    xi0_by_degree: &[f64],
    horizon: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    if !horizon.is_finite() || horizon < dt {
        return Err(Error::Domain(format!(
            "horizon must be at least dt, got {horizon}"
        )));
    }
    let support = cfg.degree_dist().probs();
    if xi0_by_degree.len() != support.len() {
        return Err(Error::Domain(format!(
            "xi0_by_degree has {} entries but the degree support has {}",
            xi0_by_degree.len(),
            support.len()
        )));
    }
    for &xi in xi0_by_degree {
        if !(0.0..=1.0).contains(&xi) {
            return Err(Error::Domain(format!(
                "initial xi must lie in [0,1], got {xi}"
            )));
        }
    }
    let tilde = cfg.degree_dist().edge_perspective()?;
    let node_weights: Vec<f64> = support.iter().map(|&(_, p)| p).collect();
    let edge_weights: Vec<f64> = tilde.probs().iter().map(|&(_, p)| p).collect();
    let degrees: Vec<u32> = support.iter().map(|&(d, _)| d).collect();

    let mut xi: Vec<f64> = xi0_by_degree.to_vec();
    let node_mix = |xi: &[f64]| -> f64 { xi.iter().zip(&node_weights).map(|(a, w)| a * w).sum() };
    let edge_mix = |xi: &[f64]| -> f64 { xi.iter().zip(&edge_weights).map(|(a, w)| a * w).sum() };

    let n_steps = (horizon / dt).floor() as u32;
    let mut steps = vec![TrajectoryStep {
        t: 0,
        x: x0,
        xi: node_mix(&xi),
    }];
    let mut x = x0;
    for t in 1..=n_steps {
        let mut next = xi.clone();
        for (i, &d) in degrees.iter().enumerate() {
            let f = coop_probability(cfg, d, x)?;
            next[i] = xi[i] + dt * (f - xi[i]);
            if !(0.0..=1.0).contains(&next[i]) {
                return Err(Error::StepSize(format!(
                    "xi for degree {d} left [0,1] at step {t}; reduce dt (got {})",
                    next[i]
                )));
            }
        }
        xi = next;
        x = edge_mix(&xi).clamp(0.0, 1.0);
        steps.push(TrajectoryStep {
            t,
            x,
            xi: node_mix(&xi),
        });
    }
    Ok(Trajectory {
        steps,
        converged: true,
        iterations: n_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{ClusterConvention, GameConfig};
    use crate::network::{CostModel, DegreeDistribution};
    use crate::sensing::SensingParams;

    fn default_config() -> GameConfig {
        config_with(0.5, 1e-3)
    }

    fn config_with(rho: f64, eps: f64) -> GameConfig {
        let dist = DegreeDistribution::new(vec![(1, 0.37), (2, 0.33), (3, 0.30)]).unwrap();
        let sensing = SensingParams::new(-0.09, 3.3, rho, 0.95, 1).unwrap();
        let intensity = std::f64::consts::PI * 484.0 / 18.0;
        let cost = CostModel::ppp(intensity, 2.0, 2.5).unwrap();
        GameConfig::new(dist, sensing, cost, ClusterConvention::SelfInclusive, eps).unwrap()
    }

    fn constant_map_config(k: f64) -> GameConfig {
        // Cost CDF equal to k for every nonnegative return makes the network
        // map constant at k.
        let dist = DegreeDistribution::new(vec![(2, 1.0)]).unwrap();
        let sensing = SensingParams::new(-0.09, 3.3, 0.3, 0.95, 1).unwrap();
        let cost = CostModel::tabulated(vec![(0.0, k), (1e6, k)]).unwrap();
        GameConfig::new(dist, sensing, cost, ClusterConvention::SelfInclusive, 1e-3).unwrap()
    }

    #[test]
    fn fixed_point_input_converges_immediately() {
        let cfg = constant_map_config(0.42);
        let traj = iterate_fixed_point(&cfg, 0.42, 100).unwrap();
        assert!(traj.converged);
        assert_eq!(traj.iterations, 1);
        assert_eq!(traj.terminal().x, 0.42);
    }

    #[test]
    fn constant_map_lands_in_one_step() {
        let cfg = constant_map_config(0.77);
        for x0 in [0.05, 0.5, 1.0] {
            let traj = iterate_fixed_point(&cfg, x0, 100).unwrap();
            assert_eq!(traj.steps[1].x, 0.77);
            assert!(traj.converged);
        }
    }

    #[test]
    fn default_run_converges_fast_and_monotone() {
        // Monotone trajectory, residual within tolerance, few steps.
        let cfg = crate::scenario::Scenario::default().game_config().unwrap();
        let (report, traj) = solve_equilibrium(&cfg, 0.2, 10_000).unwrap();
        assert!(traj.converged);
        assert!(traj.iterations <= 10);
        assert!(report.residual <= 1e-3);
        assert!(report.trivial_zero_fixed_point);
        let xs: Vec<f64> = traj.steps.iter().map(|s| s.x).collect();
        let increasing = xs.windows(2).all(|w| w[1] >= w[0] - 1e-12);
        let decreasing = xs.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        assert!(increasing || decreasing, "trajectory not monotone: {xs:?}");
    }

    #[test]
    fn low_correlation_run_rises_from_small_start() {
        // With rho = 0 the cooperative gain is large enough that the map
        // starts above the diagonal: the trajectory climbs.
        let cfg = config_with(0.0, 1e-3);
        let traj = iterate_fixed_point(&cfg, 0.2, 10_000).unwrap();
        assert!(traj.converged);
        assert!(traj.iterations <= 10);
        let xs: Vec<f64> = traj.steps.iter().map(|s| s.x).collect();
        assert!(
            xs.windows(2).all(|w| w[1] >= w[0] - 1e-12),
            "not nondecreasing: {xs:?}"
        );
        assert!(traj.terminal().x > 0.2);
    }

    #[test]
    fn rejects_bad_x0() {
        let cfg = default_config();
        for x0 in [0.0, -0.5, 1.5, f64::NAN] {
            assert!(iterate_fixed_point(&cfg, x0, 10).is_err());
        }
    }

    #[test]
    fn non_convergence_is_flagged() {
        // One step cannot satisfy the tolerance from a far-off start.
        let cfg = config_with(0.0, 1e-9);
        let traj = iterate_fixed_point(&cfg, 1.0, 1).unwrap();
        assert!(!traj.converged);
        assert_eq!(traj.iterations, 1);
    }

    #[test]
    fn zero_is_always_reported_self_inclusive() {
        let roots = find_all_fixed_points(&default_config(), 200).unwrap();
        assert!(roots.first().is_some_and(|&r| r == 0.0));
    }

    #[test]
    fn grid_minimum_enforced() {
        assert!(find_all_fixed_points(&default_config(), 99).is_err());
    }

    #[test]
    fn bisection_matches_iteration_at_low_correlation() {
        let cfg = config_with(0.0, 1e-9);
        let traj = iterate_fixed_point(&cfg, 0.5, 10_000).unwrap();
        let roots = find_all_fixed_points(&cfg, 1000).unwrap();
        let positive: Vec<f64> = roots.iter().copied().filter(|&r| r > 1e-9).collect();
        assert_eq!(positive.len(), 1, "roots {roots:?}");
        assert!(
            (positive[0] - traj.terminal().x).abs() < 1e-6,
            "bisection {} vs iteration {}",
            positive[0],
            traj.terminal().x
        );
        let report = equilibrium_via_bisection(&cfg, 1000).unwrap();
        assert!(report.residual <= 1e-6);
        assert_eq!(report.method, SolveMethod::Bisection);
    }

    #[test]
    fn at_most_two_roots_for_concave_map() {
        for rho in [0.0, 0.3, 0.6, 0.9] {
            let cfg = config_with(rho, 1e-6);
            let roots = find_all_fixed_points(&cfg, 500).unwrap();
            assert!(roots.len() <= 2, "rho={rho}: {roots:?}");
        }
    }

    #[test]
    fn recorded_fraction_matches_independent_summation() {
        // Re-derive the cooperating fraction at every recorded step from
        // the raw pieces: node weights times the cost CDF of the return.
        let cfg = config_with(0.0, 1e-9);
        let traj = iterate_fixed_point(&cfg, 0.4, 10_000).unwrap();
        for s in &traj.steps {
            let mut want = 0.0;
            for &(d, p) in cfg.degree_dist().probs() {
                let v = crate::game::return_function(&cfg, d, s.x).unwrap();
                want += p * cfg.cost().cdf(v);
            }
            assert!((s.xi - want).abs() < 1e-14, "xi mismatch at t={}", s.t);
        }
    }

    #[test]
    fn dynamics_stationary_at_fixed_point() {
        let cfg = config_with(0.0, 1e-9);
        let x_star = iterate_fixed_point(&cfg, 0.5, 10_000).unwrap().terminal().x;
        let xi0: Vec<f64> = cfg
            .degree_dist()
            .probs()
            .iter()
            .map(|&(d, _)| coop_probability(&cfg, d, x_star).unwrap())
            .collect();
        let traj = meanfield_dynamics(&cfg, x_star, &xi0, 5.0, 0.05).unwrap();
        for s in &traj.steps {
            assert!((s.x - traj.steps[0].x).abs() < 1e-9);
            assert!((s.xi - traj.steps[0].xi).abs() < 1e-9);
        }
    }

    #[test]
    fn dynamics_pure_birth_saturates() {
        // Zero-cost cooperation relaxes xi exponentially toward 1.
        let dist = DegreeDistribution::new(vec![(2, 1.0)]).unwrap();
        let sensing = SensingParams::new(-0.09, 3.3, 0.3, 0.95, 1).unwrap();
        let cost = CostModel::point_mass(0.0).unwrap();
        let cfg =
            GameConfig::new(dist, sensing, cost, ClusterConvention::SelfInclusive, 1e-3).unwrap();
        let traj = meanfield_dynamics(&cfg, 0.1, &[0.0], 40.0, 0.05).unwrap();
        let xs: Vec<f64> = traj.steps.iter().map(|s| s.xi).collect();
        assert!(xs.windows(2).all(|w| w[1] >= w[0]));
        // Euler on xi' = 1 - xi gives xi_t = 1 - (1-dt)^t.
        let t = 10;
        let want = 1.0 - 0.95_f64.powi(t);
        assert!((xs[t as usize] - want).abs() < 1e-12);
        assert!(xs.last().unwrap() > &0.999);
    }

    #[test]
    fn dynamics_terminal_matches_fixed_point_report() {
        let cfg = config_with(0.0, 1e-9);
        let (report, _) = solve_equilibrium(&cfg, 0.5, 10_000).unwrap();
        let xi0: Vec<f64> = cfg.degree_dist().probs().iter().map(|_| 0.5).collect();
        let traj = meanfield_dynamics(&cfg, 0.5, &xi0, 400.0, 0.05).unwrap();
        assert!(
            (traj.terminal().xi - report.xi_star).abs() < 1e-3,
            "dynamics {} vs report {}",
            traj.terminal().xi,
            report.xi_star
        );
    }

    #[test]
    fn dynamics_rejects_oversized_steps() {
        let cfg = constant_map_config(1.0);
        let err = meanfield_dynamics(&cfg, 0.5, &[0.0], 10.0, 2.5).unwrap_err();
        assert!(matches!(err, crate::error::Error::StepSize(_)));
    }

    #[test]
    fn dynamics_validates_inputs() {
        let cfg = default_config();
        assert!(meanfield_dynamics(&cfg, 0.5, &[0.0; 3], 1.0, 0.0).is_err());
        assert!(meanfield_dynamics(&cfg, 0.5, &[0.0; 3], 0.01, 0.05).is_err());
        assert!(meanfield_dynamics(&cfg, 0.5, &[0.0; 2], 1.0, 0.05).is_err());
        assert!(meanfield_dynamics(&cfg, 0.5, &[1.5, 0.0, 0.0], 1.0, 0.05).is_err());
    }

    #[test]
    fn trajectory_time_indices_strictly_increase() {
        let traj = iterate_fixed_point(&default_config(), 0.3, 10_000).unwrap();
        for w in traj.steps.windows(2) {
            assert_eq!(w[1].t, w[0].t + 1);
        }
        assert_eq!(traj.steps[0].t, 0);
    }
}
