//! The single-sensor decision problem: utilities from sensing quality,
//! cooperation cost, myopic best response, and the aggregate network map
//! whose fixed points are the equilibria of the diffusion game.

use crate::error::{Error, Result};
use crate::network::{CostModel, DegreeDistribution};
use crate::sensing::{pfa_css, pfa_lss, SensingParams};

/// A sensor either senses locally or joins cooperative sensing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Action {
    Lss,
    Css,
}

/// How the effective cooperating cluster is counted when a degree-`d`
/// sensor evaluates cooperation against neighbor-cooperation probability
/// `x`.
///
/// `SelfInclusive` uses `x*d + 1` (the cluster includes the deciding
/// sensor), which makes a cooperating sensor with no cooperating neighbors
/// exactly as good as a local one. `NeighborsOnly` uses the literal `x*d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterConvention {
    NeighborsOnly,
    SelfInclusive,
}

/// Everything a sensor needs to evaluate its decision problem, plus the
/// solver tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct GameConfig {
    degree_dist: DegreeDistribution,
    sensing: SensingParams,
    cost: CostModel,
    cluster: ClusterConvention,
    epsilon: f64,
}

impl GameConfig {
    /// `epsilon` is the fixed-point stopping tolerance and must lie in
    /// (0, 1e-3].
    pub fn new(
        degree_dist: DegreeDistribution,
        sensing: SensingParams,
        cost: CostModel,
        cluster: ClusterConvention,
        epsilon: f64,
    ) -> Result<Self> {
        if !epsilon.is_finite() || epsilon <= 0.0 || epsilon > 1e-3 {
            return Err(Error::Domain(format!(
                "epsilon must lie in (0, 1e-3], got {epsilon}"
            )));
        }
        Ok(Self {
            degree_dist,
            sensing,
            cost,
            cluster,
            epsilon,
        })
    }

    pub fn degree_dist(&self) -> &DegreeDistribution {
        &self.degree_dist
    }

    pub fn sensing(&self) -> &SensingParams {
        &self.sensing
    }

    pub fn cost(&self) -> &CostModel {
        &self.cost
    }

    pub fn cluster_convention(&self) -> ClusterConvention {
        self.cluster
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Expected cooperating cluster size seen by a degree-`degree` sensor.
    pub fn effective_cluster(&self, degree: u32, x: f64) -> f64 {
        let base = x * degree as f64;
        match self.cluster {
            ClusterConvention::NeighborsOnly => base,
            ClusterConvention::SelfInclusive => base + 1.0,
        }
    }
}

/// Accept values a hair outside [0,1] from accumulated floating point,
/// reject anything further out.
fn clamp_unit(x: f64, what: &str) -> Result<f64> {
    if !x.is_finite() || x < -1e-12 || x > 1.0 + 1e-12 {
        return Err(Error::Domain(format!("{what} must lie in [0,1], got {x}")));
    }
    Ok(x.clamp(0.0, 1.0))
}

/// Utility of playing `action`: one minus the resulting false-alarm
/// probability. Local sensing does not depend on `x`.
pub fn utility(cfg: &GameConfig, action: Action, degree: u32, x: f64) -> Result<f64> {
    let x = clamp_unit(x, "x")?;
    match action {
        Action::Lss => Ok(1.0 - pfa_lss(cfg.sensing())),
        Action::Css => Ok(1.0 - pfa_css(cfg.sensing(), cfg.effective_cluster(degree, x))?),
    }
}

/// Additional utility gained by cooperating: `utility(Css) - utility(Lss)`.
pub fn return_function(cfg: &GameConfig, degree: u32, x: f64) -> Result<f64> {
    Ok(utility(cfg, Action::Css, degree, x)? - utility(cfg, Action::Lss, degree, x)?)
}

/// Payoff nets the realized cooperation cost against the utility.
pub fn payoff(cfg: &GameConfig, action: Action, degree: u32, x: f64, cost: f64) -> Result<f64> {
    if !cost.is_finite() || cost < 0.0 {
        return Err(Error::Domain(format!(
            "cost must be nonnegative, got {cost}"
        )));
    }
    match action {
        Action::Lss => utility(cfg, Action::Lss, degree, x),
        Action::Css => Ok(utility(cfg, Action::Css, degree, x)? - cost),
    }
}

/// Myopic best response: cooperate iff the return covers the cost, ties
/// cooperating.
pub fn best_response(cfg: &GameConfig, degree: u32, x: f64, cost: f64) -> Result<Action> {
    if !cost.is_finite() || cost < 0.0 {
        return Err(Error::Domain(format!(
            "cost must be nonnegative, got {cost}"
        )));
    }
    Ok(if return_function(cfg, degree, x)? >= cost {
        Action::Css
    } else {
        Action::Lss
    })
}

/// Probability that a degree-`degree` sensor with a freshly drawn cost
/// chooses to cooperate: the cost CDF evaluated at the return.
pub fn coop_probability(cfg: &GameConfig, degree: u32, x: f64) -> Result<f64> {
    Ok(cfg.cost().cdf(return_function(cfg, degree, x)?))
}

/// Aggregate cooperation response of the network: the probability that a
/// random *neighbor* cooperates next step, given that each neighbor
/// cooperates with probability `x` this step. Fixed points of this map are
/// the equilibria of the diffusion game.
pub fn network_map(cfg: &GameConfig, x: f64) -> Result<f64> {
    let tilde = cfg.degree_dist().edge_perspective()?;
    let mut acc = 0.0;
    for &(d, p) in tilde.probs() {
        if p > 0.0 {
            acc += p * coop_probability(cfg, d, x)?;
        }
    }
    Ok(acc.clamp(0.0, 1.0))
}
