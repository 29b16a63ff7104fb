//! A named bundle of network-level parameters from which the per-sensor
//! game is derived. Holds the quantities that couple: the communication
//! range feeds both the shadowing correlation and the cost intensity.

use crate::abm::Belief;
use crate::error::{Error, Result};
use crate::game::{ClusterConvention, GameConfig};
use crate::network::{CostModel, DegreeDistribution};
use crate::sensing::SensingParams;

/// How the Poisson intensity of the cost model is derived from the
/// deployment geometry.
///
/// `AreaPerSensor` uses `pi*(R+D)^2/n`; `Density` uses the conventional
/// sensors-per-area `n/(pi*(R+D)^2)`. The two differ by a factor of
/// `(pi*(R+D)^2/n)^2` and materially change cost levels, so the choice is
/// always explicit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntensityConvention {
    AreaPerSensor,
    Density,
}

/// Deployment scenario with defaults matching the reference experiment
/// setup: 18 single-antenna sensors, degree distribution
/// {1: 0.37, 2: 0.33, 3: 0.30}, detection target 0.95, path-loss exponent
/// 2.5, proportionality constant 2, communication range 2 m, deployment
/// radius 20 m, SNR drop -0.09 dB, shadowing 3.3 dB.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub n: u32,
    pub antennas: u32,
    pub degree_dist: DegreeDistribution,
    /// Deployment radius D (m), much larger than the communication range.
    pub d_max: f64,
    pub beta: f64,
    pub alpha: f64,
    pub prop_const: f64,
    /// Maximum communication range R (m).
    pub range_r: f64,
    /// Shadowing correlation; `None` derives `exp(-0.1*R/(n-1))`.
    pub rho_override: Option<f64>,
    /// Cost intensity; `None` derives it via the convention.
    pub intensity_override: Option<f64>,
    pub intensity_convention: IntensityConvention,
    pub delta_delta: f64,
    pub sigma: f64,
    pub x0: f64,
    pub cluster_convention: ClusterConvention,
    pub epsilon: f64,
    pub belief: Belief,
    pub max_steps: u32,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            n: 18,
            antennas: 1,
            degree_dist: DegreeDistribution::new(vec![(1, 0.37), (2, 0.33), (3, 0.30)])
                .expect("default degree distribution is valid"),
            d_max: 20.0,
            beta: 0.95,
            alpha: 2.5,
            prop_const: 2.0,
            range_r: 2.0,
            rho_override: None,
            intensity_override: None,
            intensity_convention: IntensityConvention::AreaPerSensor,
            delta_delta: -0.09,
            sigma: 3.3,
            x0: 0.3,
            cluster_convention: ClusterConvention::SelfInclusive,
            epsilon: 1e-3,
            belief: Belief::EdgeWeighted,
            max_steps: 10_000,
        }
    }
}

impl Scenario {
    /// Shadowing correlation, derived from the range unless overridden.
    pub fn rho(&self) -> f64 {
        self.rho_override
            .unwrap_or_else(|| (-0.1 * self.range_r / (self.n as f64 - 1.0)).exp())
    }

    /// Cost intensity, derived from the geometry by the chosen convention
    /// unless overridden.
    pub fn intensity(&self) -> f64 {
        self.intensity_override.unwrap_or_else(|| {
            let area = std::f64::consts::PI * (self.range_r + self.d_max).powi(2);
            match self.intensity_convention {
                IntensityConvention::AreaPerSensor => area / self.n as f64,
                IntensityConvention::Density => self.n as f64 / area,
            }
        })
    }

    /// Replace derived quantities with their current values so later edits
    /// to the range no longer move them (controlled one-variable studies).
    pub fn freeze_couplings(&mut self) {
        self.rho_override = Some(self.rho());
        self.intensity_override = Some(self.intensity());
    }

    pub fn sensing_params(&self) -> Result<SensingParams> {
        SensingParams::new(
            self.delta_delta,
            self.sigma,
            self.rho(),
            self.beta,
            self.antennas,
        )
    }

    pub fn cost_model(&self) -> Result<CostModel> {
        CostModel::ppp(self.intensity(), self.prop_const, self.alpha)
    }

    pub fn game_config(&self) -> Result<GameConfig> {
        if self.n < 2 {
            return Err(Error::Domain(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        GameConfig::new(
            self.degree_dist.clone(),
            self.sensing_params()?,
            self.cost_model()?,
            self.cluster_convention,
            self.epsilon,
        )
    }

    /// Apply one scenario-level `key = value` assignment. Shared by the
    /// config-file parser and the Python bindings.
    pub fn set_key(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "n" => self.n = parse_int(key, v)?,
            "m" => self.antennas = parse_int(key, v)?,
            "degree_dist" => self.degree_dist = parse_degree_dist(v)?,
            "d_max" => self.d_max = parse_float(key, v)?,
            "beta" => self.beta = parse_float(key, v)?,
            "alpha" => self.alpha = parse_float(key, v)?,
            "prop_const" => self.prop_const = parse_float(key, v)?,
            "r" => self.range_r = parse_float(key, v)?,
            "rho" => self.rho_override = parse_auto(key, v)?,
            "intensity" => self.intensity_override = parse_auto(key, v)?,
            "intensity_convention" => {
                self.intensity_convention = match v {
                    "area_per_sensor" => IntensityConvention::AreaPerSensor,
                    "density" => IntensityConvention::Density,
                    other => {
                        return Err(Error::Config(format!(
                            "intensity_convention must be area_per_sensor or density, got '{other}'"
                        )))
                    }
                }
            }
            "delta_delta" => self.delta_delta = parse_float(key, v)?,
            "sigma" => self.sigma = parse_float(key, v)?,
            "x0" => self.x0 = parse_float(key, v)?,
            "cluster_convention" => {
                self.cluster_convention = match v {
                    "self_inclusive" => ClusterConvention::SelfInclusive,
                    "neighbors_only" => ClusterConvention::NeighborsOnly,
                    other => {
                        return Err(Error::Config(format!(
                    "cluster_convention must be self_inclusive or neighbors_only, got '{other}'"
                )))
                    }
                }
            }
            "epsilon" => {
                let eps = parse_float(key, v)?;
                if !eps.is_finite() || eps <= 0.0 || eps > 1e-3 {
                    return Err(Error::Config(format!(
                        "epsilon must lie in (0, 1e-3], got {eps}"
                    )));
                }
                self.epsilon = eps;
            }
            "belief" => {
                self.belief = match v {
                    "edge_weighted" => Belief::EdgeWeighted,
                    "unweighted" => Belief::Unweighted,
                    other => {
                        return Err(Error::Config(format!(
                            "belief must be edge_weighted or unweighted, got '{other}'"
                        )))
                    }
                }
            }
            "max_steps" => self.max_steps = parse_int(key, v)?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Canonical `key = value` rendering; parses back to an equal scenario.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let dist = self
            .degree_dist
            .probs()
            .iter()
            .map(|&(d, p)| format!("{d}:{p}"))
            .collect::<Vec<_>>()
            .join(", ");
        out.push_str(&format!("n = {}\n", self.n));
        out.push_str(&format!("m = {}\n", self.antennas));
        out.push_str(&format!("degree_dist = {dist}\n"));
        out.push_str(&format!("d_max = {}\n", self.d_max));
        out.push_str(&format!("beta = {}\n", self.beta));
        out.push_str(&format!("alpha = {}\n", self.alpha));
        out.push_str(&format!("prop_const = {}\n", self.prop_const));
        out.push_str(&format!("r = {}\n", self.range_r));
        out.push_str(&format!("rho = {}\n", dump_auto(self.rho_override)));
        out.push_str(&format!(
            "intensity = {}\n",
            dump_auto(self.intensity_override)
        ));
        out.push_str(&format!(
            "intensity_convention = {}\n",
            match self.intensity_convention {
                IntensityConvention::AreaPerSensor => "area_per_sensor",
                IntensityConvention::Density => "density",
            }
        ));
        out.push_str(&format!("delta_delta = {}\n", self.delta_delta));
        out.push_str(&format!("sigma = {}\n", self.sigma));
        out.push_str(&format!("x0 = {}\n", self.x0));
        out.push_str(&format!(
            "cluster_convention = {}\n",
            match self.cluster_convention {
                ClusterConvention::SelfInclusive => "self_inclusive",
                ClusterConvention::NeighborsOnly => "neighbors_only",
            }
        ));
        out.push_str(&format!("epsilon = {}\n", self.epsilon));
        out.push_str(&format!(
            "belief = {}\n",
            match self.belief {
                Belief::EdgeWeighted => "edge_weighted",
                Belief::Unweighted => "unweighted",
            }
        ));
        out.push_str(&format!("max_steps = {}\n", self.max_steps));
        out
    }
}

fn parse_int(key: &str, v: &str) -> Result<u32> {
    v.parse()
        .map_err(|e| Error::Config(format!("key '{key}': expected integer, got '{v}' ({e})")))
}

fn parse_float(key: &str, v: &str) -> Result<f64> {
    v.parse()
        .map_err(|e| Error::Config(format!("key '{key}': expected number, got '{v}' ({e})")))
}

fn parse_auto(key: &str, v: &str) -> Result<Option<f64>> {
    if v == "auto" {
        Ok(None)
    } else {
        parse_float(key, v).map(Some)
    }
}

fn dump_auto(v: Option<f64>) -> String {
    match v {
        None => "auto".to_string(),
        Some(x) => format!("{x}"),
    }
}

/// Parse `1:0.37, 2:0.33, 3:0.30`.
fn parse_degree_dist(v: &str) -> Result<DegreeDistribution> {
    let mut entries = Vec::new();
    for part in v.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (d, p) = part.split_once(':').ok_or_else(|| {
            Error::Config(format!(
                "degree_dist entries look like 'degree:prob', got '{part}'"
            ))
        })?;
        let degree = d
            .trim()
            .parse()
            .map_err(|e| Error::Config(format!("degree_dist: bad degree '{}' ({e})", d.trim())))?;
        let prob = p.trim().parse().map_err(|e| {
            Error::Config(format!("degree_dist: bad probability '{}' ({e})", p.trim()))
        })?;
        entries.push((degree, prob));
    }
    DegreeDistribution::new(entries).map_err(|e| Error::Config(format!("degree_dist: {e}")))
}
