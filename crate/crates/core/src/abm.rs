//! Stochastic agent-based simulation of a finite population of sensors
//! playing myopic best responses against a shared belief about neighbor
//! cooperation.
//!
//! Degrees and costs are drawn once at initialization (costs are never
//! redrawn), all agents update synchronously, and the public belief is the
//! realized cooperating fraction of the previous step.

use crate::error::{Error, Result};
use crate::game::{best_response, return_function, Action, GameConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Which empirical aggregate becomes the next public belief.
///
/// `EdgeWeighted` weights each agent by its degree, matching the
/// edge-perspective expectation behind the mean-field map; `Unweighted`
/// publishes the plain cooperating fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Belief {
    EdgeWeighted,
    Unweighted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agent {
    pub degree: u32,
    pub cost: f64,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    agents: Vec<Agent>,
    seed: u64,
}

impl Population {
    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn size(&self) -> usize {
        self.agents.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn coop_count(&self) -> u32 {
        self.agents
            .iter()
            .filter(|a| a.action == Action::Css)
            .count() as u32
    }

    /// Degree-weighted cooperating fraction (empirical edge perspective).
    pub fn edge_weighted_fraction(&self) -> f64 {
        let total: u64 = self.agents.iter().map(|a| a.degree as u64).sum();
        let coop: u64 = self
            .agents
            .iter()
            .filter(|a| a.action == Action::Css)
            .map(|a| a.degree as u64)
            .sum();
        coop as f64 / total as f64
    }

    /// Plain cooperating fraction.
    pub fn plain_fraction(&self) -> f64 {
        self.coop_count() as f64 / self.agents.len() as f64
    }
}

/// Statistics of one synchronous update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    pub x_hat: f64,
    pub xi_hat: f64,
    pub coop_count: u32,
    pub changed: u32,
}

/// One row of the recorded simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbmStep {
    pub t: u32,
    pub x_hat: f64,
    pub xi_hat: f64,
    pub coop_count: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbmResult {
    pub trajectory: Vec<AbmStep>,
    pub terminal_x_hat: f64,
    pub terminal_xi_hat: f64,
    /// True when the action vector reached a fixed point before the step
    /// budget ran out.
    pub absorbed: bool,
}

/// Draw a population of `n >= 2` agents: degrees i.i.d. from the degree
/// distribution, costs i.i.d. from the cost model (realized once), initial
/// actions best responses against `x0`. Deterministic for a given seed.
pub fn init_population(cfg: &GameConfig, n: u32, seed: u64, x0: f64) -> Result<Population> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "population needs at least 2 agents, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agents = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let degree = cfg.degree_dist().sample(&mut rng);
        let cost = cfg.cost().sample(&mut rng);
        let action = best_response(cfg, degree, x0, cost)?;
        agents.push(Agent {
            degree,
            cost,
            action,
        });
    }
    let pop = Population { agents, seed };
    if pop.agents.iter().all(|a| a.degree == 0) {
        return Err(Error::DegenerateNetwork(
            "every sampled agent has degree 0; the belief is undefined".into(),
        ));
    }
    Ok(pop)
}

/// Synchronous best-response update against the belief `x`, returning the
/// post-update aggregates.
pub fn step(pop: &mut Population, cfg: &GameConfig, x: f64) -> Result<StepStats> {
    // One return evaluation per distinct degree, not per agent.
    let mut returns: Vec<(u32, f64)> = Vec::new();
    for a in &pop.agents {
        if !returns.iter().any(|&(d, _)| d == a.degree) {
            returns.push((a.degree, return_function(cfg, a.degree, x)?));
        }
    }
    let lookup = |d: u32| {
        returns
            .iter()
            .find(|&&(rd, _)| rd == d)
            .map(|&(_, v)| v)
            .unwrap()
    };
    let mut changed = 0;
    for a in pop.agents.iter_mut() {
        let next = if lookup(a.degree) >= a.cost {
            Action::Css
        } else {
            Action::Lss
        };
        if next != a.action {
            changed += 1;
        }
        a.action = next;
    }
    Ok(StepStats {
        x_hat: pop.edge_weighted_fraction(),
        xi_hat: pop.plain_fraction(),
        coop_count: pop.coop_count(),
        changed,
    })
}

/// Run the simulation for up to `steps` synchronous updates, stopping early
/// once the action vector stops changing. Deterministic for a given seed.
pub fn run_abm(
    cfg: &GameConfig,
    n: u32,
    steps: u32,
    seed: u64,
    x0: f64,
    belief: Belief,
) -> Result<AbmResult> {
    if steps < 1 {
        return Err(Error::Domain(format!(
            "steps must be at least 1, got {steps}"
        )));
    }
    let mut pop = init_population(cfg, n, seed, x0)?;
    let mut trajectory = vec![AbmStep {
        t: 0,
        x_hat: pop.edge_weighted_fraction(),
        xi_hat: pop.plain_fraction(),
        coop_count: pop.coop_count(),
    }];
    let mut absorbed = false;
    for t in 1..=steps {
        let belief_x = match belief {
            Belief::EdgeWeighted => trajectory.last().unwrap().x_hat,
            Belief::Unweighted => trajectory.last().unwrap().xi_hat,
        };
        let stats = step(&mut pop, cfg, belief_x)?;
        trajectory.push(AbmStep {
            t,
            x_hat: stats.x_hat,
            xi_hat: stats.xi_hat,
            coop_count: stats.coop_count,
        });
        if stats.changed == 0 {
            absorbed = true;
            break;
        }
    }
    let last = *trajectory.last().unwrap();
    Ok(AbmResult {
        trajectory,
        terminal_x_hat: last.x_hat,
        terminal_xi_hat: last.xi_hat,
        absorbed,
    })
}
