//! Python bindings for the cooperative spectrum sensing diffusion
//! simulator: detection math, scenario configuration, equilibrium solves,
//! the agent-based simulation, and scenario comparisons.

use css_diffusion as core;
use css_diffusion::comparative::{ConducivenessRelation, SweepParameter};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Upper-tail probability of the standard normal.
#[pyfunction]
fn q_function(x: f64) -> PyResult<f64> {
    core::sensing::q_function(x).map_err(err)
}

/// Inverse of `q_function` on (0,1).
#[pyfunction]
fn q_inverse(p: f64) -> PyResult<f64> {
    core::sensing::q_inverse(p).map_err(err)
}

/// Sensing-channel parameters (SNR drop in dB, shadowing std dev,
/// correlation, detection target, antenna count).
#[pyclass(name = "SensingParams", skip_from_py_object)]
#[derive(Clone)]
struct PySensingParams {
    inner: core::SensingParams,
}

#[pymethods]
impl PySensingParams {
    #[new]
    #[pyo3(signature = (delta_delta, sigma, rho, beta, antennas=1))]
    fn new(delta_delta: f64, sigma: f64, rho: f64, beta: f64, antennas: u32) -> PyResult<Self> {
        Ok(Self {
            inner: core::SensingParams::new(delta_delta, sigma, rho, beta, antennas)
                .map_err(err)?,
        })
    }

    #[getter]
    fn delta_delta(&self) -> f64 {
        self.inner.delta_delta()
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma()
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.inner.rho()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta()
    }

    #[getter]
    fn antennas(&self) -> u32 {
        self.inner.antennas()
    }

    fn __repr__(&self) -> String {
        format!(
            "SensingParams(delta_delta={}, sigma={}, rho={}, beta={}, antennas={})",
            self.inner.delta_delta(),
            self.inner.sigma(),
            self.inner.rho(),
            self.inner.beta(),
            self.inner.antennas()
        )
    }
}

/// False-alarm probability of local sensing.
#[pyfunction]
fn pfa_lss(params: &PySensingParams) -> f64 {
    core::sensing::pfa_lss(&params.inner)
}

/// False-alarm probability of cooperative sensing with a (real-valued)
/// cluster size.
#[pyfunction]
fn pfa_css(params: &PySensingParams, cluster_size: f64) -> PyResult<f64> {
    core::sensing::pfa_css(&params.inner, cluster_size).map_err(err)
}

/// Numeric `1^T S^{-1} 1` for the AR(1) correlation matrix.
#[pyfunction]
fn ar1_precision_rowsum(cluster_size: u32, rho: f64) -> PyResult<f64> {
    core::sensing::ar1_precision_rowsum(cluster_size, rho).map_err(err)
}

/// Monte-Carlo false-alarm estimate; returns (pfa, std_err).
#[pyfunction]
fn mc_lrt_pfa(
    params: &PySensingParams,
    cluster_size: u32,
    trials: u64,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let est = core::sensing::mc_lrt_pfa(&params.inner, cluster_size, trials, seed).map_err(err)?;
    Ok((est.pfa, est.std_err))
}

/// Finite degree distribution given as (degree, probability) pairs.
#[pyclass(name = "DegreeDistribution", skip_from_py_object)]
#[derive(Clone)]
struct PyDegreeDistribution {
    inner: core::DegreeDistribution,
}

#[pymethods]
impl PyDegreeDistribution {
    #[new]
    fn new(entries: Vec<(u32, f64)>) -> PyResult<Self> {
        Ok(Self {
            inner: core::DegreeDistribution::new(entries).map_err(err)?,
        })
    }

    fn probs(&self) -> Vec<(u32, f64)> {
        self.inner.probs().to_vec()
    }

    fn mean_degree(&self) -> f64 {
        self.inner.mean_degree()
    }

    /// Size-biased distribution of the node reached over a random edge.
    fn edge_perspective(&self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.edge_perspective().map_err(err)?,
        })
    }

    /// Poisson degree distribution with mean `node_density*pi*range^2`,
    /// truncated at `max_degree` (tail mass must be below 1e-9).
    #[staticmethod]
    fn from_ppp(node_density: f64, range: f64, max_degree: u32) -> PyResult<Self> {
        Ok(Self {
            inner: core::network::ppp_degree_distribution(node_density, range, max_degree)
                .map_err(err)?,
        })
    }
}

/// Cooperation-cost distribution: closed-form nearest-neighbor model or a
/// tabulated CDF.
#[pyclass(name = "CostModel", skip_from_py_object)]
#[derive(Clone)]
struct PyCostModel {
    inner: core::CostModel,
}

#[pymethods]
impl PyCostModel {
    /// Poisson-point-process nearest-neighbor cost model.
    #[staticmethod]
    fn ppp(intensity: f64, prop_const: f64, path_loss_exp: f64) -> PyResult<Self> {
        Ok(Self {
            inner: core::CostModel::ppp(intensity, prop_const, path_loss_exp).map_err(err)?,
        })
    }

    /// Tabulated CDF from (cost, cdf) points.
    #[staticmethod]
    fn tabulated(points: Vec<(f64, f64)>) -> PyResult<Self> {
        Ok(Self {
            inner: core::CostModel::tabulated(points).map_err(err)?,
        })
    }

    fn cdf(&self, x: f64) -> f64 {
        self.inner.cdf(x)
    }

    /// Draw `n` seeded cost samples.
    fn sample(&self, n: u32, seed: u64) -> Vec<f64> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.inner.sample(&mut rng)).collect()
    }
}

/// Fixed-point solve summary.
#[pyclass(name = "EquilibriumReport", skip_from_py_object)]
#[derive(Clone)]
struct PyEquilibriumReport {
    #[pyo3(get)]
    x_star: f64,
    #[pyo3(get)]
    xi_star: f64,
    #[pyo3(get)]
    residual: f64,
    #[pyo3(get)]
    iterations: u32,
    #[pyo3(get)]
    converged: bool,
    #[pyo3(get)]
    trivial_zero_fixed_point: bool,
}

#[pymethods]
impl PyEquilibriumReport {
    fn __repr__(&self) -> String {
        format!(
            "EquilibriumReport(x_star={}, xi_star={}, residual={}, iterations={}, converged={})",
            self.x_star, self.xi_star, self.residual, self.iterations, self.converged
        )
    }
}

/// Agent-based run summary with the recorded trajectory.
#[pyclass(name = "AbmResult", skip_from_py_object)]
#[derive(Clone)]
struct PyAbmResult {
    #[pyo3(get)]
    terminal_x_hat: f64,
    #[pyo3(get)]
    terminal_xi_hat: f64,
    #[pyo3(get)]
    absorbed: bool,
    /// Rows of (t, x_hat, xi_hat, coop_count).
    #[pyo3(get)]
    trajectory: Vec<(u32, f64, f64, u32)>,
}

/// Deployment scenario with the reference defaults; fields are edited via
/// `set(key, value)` using the same keys as the CLI config format.
#[pyclass(name = "Scenario", skip_from_py_object)]
#[derive(Clone)]
struct PyScenario {
    inner: core::Scenario,
}

#[pymethods]
impl PyScenario {
    #[new]
    fn new() -> Self {
        Self {
            inner: core::Scenario::default(),
        }
    }

    /// Apply one `key = value` assignment (e.g. `set("beta", "0.9")`,
    /// `set("rho", "auto")`, `set("degree_dist", "1:0.5, 3:0.5")`).
    fn set(&mut self, key: &str, value: &str) -> PyResult<()> {
        self.inner.set_key(key, value).map_err(err)
    }

    /// Canonical config rendering.
    fn dump(&self) -> String {
        self.inner.dump()
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.inner.rho()
    }

    #[getter]
    fn intensity(&self) -> f64 {
        self.inner.intensity()
    }

    /// Aggregate cooperation response of the network at belief x.
    fn network_map(&self, x: f64) -> PyResult<f64> {
        let cfg = self.inner.game_config().map_err(err)?;
        core::game::network_map(&cfg, x).map_err(err)
    }

    /// Gain from cooperating for a degree-d sensor at belief x.
    fn return_function(&self, degree: u32, x: f64) -> PyResult<f64> {
        let cfg = self.inner.game_config().map_err(err)?;
        core::game::return_function(&cfg, degree, x).map_err(err)
    }

    /// Solve the mean-field equilibrium by best-response iteration.
    #[pyo3(signature = (x0=None))]
    fn solve(&self, x0: Option<f64>) -> PyResult<PyEquilibriumReport> {
        let cfg = self.inner.game_config().map_err(err)?;
        let (report, traj) = core::equilibrium::solve_equilibrium(
            &cfg,
            x0.unwrap_or(self.inner.x0),
            self.inner.max_steps,
        )
        .map_err(err)?;
        Ok(PyEquilibriumReport {
            x_star: report.x_star,
            xi_star: report.xi_star,
            residual: report.residual,
            iterations: traj.iterations,
            converged: traj.converged,
            trivial_zero_fixed_point: report.trivial_zero_fixed_point,
        })
    }

    /// Fixed-point iteration trajectory as rows of (t, x, xi).
    #[pyo3(signature = (x0=None))]
    fn trajectory(&self, x0: Option<f64>) -> PyResult<Vec<(u32, f64, f64)>> {
        let cfg = self.inner.game_config().map_err(err)?;
        let traj = core::equilibrium::iterate_fixed_point(
            &cfg,
            x0.unwrap_or(self.inner.x0),
            self.inner.max_steps,
        )
        .map_err(err)?;
        Ok(traj.steps.iter().map(|s| (s.t, s.x, s.xi)).collect())
    }

    /// All fixed points of the network map found on a uniform grid.
    #[pyo3(signature = (grid=1000))]
    fn fixed_points(&self, grid: u32) -> PyResult<Vec<f64>> {
        let cfg = self.inner.game_config().map_err(err)?;
        core::equilibrium::find_all_fixed_points(&cfg, grid).map_err(err)
    }

    /// Forward-Euler mean-field flow of the per-degree cooperating
    /// densities; returns rows of (t, x, xi). `xi0` aligns with the degree
    /// support.
    fn meanfield_dynamics(
        &self,
        x0: f64,
        xi0: Vec<f64>,
        horizon: f64,
        dt: f64,
    ) -> PyResult<Vec<(u32, f64, f64)>> {
        let cfg = self.inner.game_config().map_err(err)?;
        let traj =
            core::equilibrium::meanfield_dynamics(&cfg, x0, &xi0, horizon, dt).map_err(err)?;
        Ok(traj.steps.iter().map(|s| (s.t, s.x, s.xi)).collect())
    }

    /// Run the seeded agent-based simulation.
    #[pyo3(signature = (n, steps, seed, x0=None))]
    fn run_abm(&self, n: u32, steps: u32, seed: u64, x0: Option<f64>) -> PyResult<PyAbmResult> {
        let cfg = self.inner.game_config().map_err(err)?;
        let res = core::abm::run_abm(
            &cfg,
            n,
            steps,
            seed,
            x0.unwrap_or(self.inner.x0),
            self.inner.belief,
        )
        .map_err(err)?;
        Ok(PyAbmResult {
            terminal_x_hat: res.terminal_x_hat,
            terminal_xi_hat: res.terminal_xi_hat,
            absorbed: res.absorbed,
            trajectory: res
                .trajectory
                .iter()
                .map(|s| (s.t, s.x_hat, s.xi_hat, s.coop_count))
                .collect(),
        })
    }
}

/// Compare how conducive scenario `b` is to diffusion relative to `a`;
/// returns (relation, max_gap, witness) with relation one of
/// "more_conducive", "less_conducive", "crossing", "equal".
#[pyfunction]
#[pyo3(signature = (a, b, grid_points=1000))]
fn compare_conduciveness(
    a: &PyScenario,
    b: &PyScenario,
    grid_points: u32,
) -> PyResult<(String, f64, Option<f64>)> {
    let v =
        core::comparative::compare_conduciveness(&a.inner, &b.inner, grid_points).map_err(err)?;
    let relation = match v.relation {
        ConducivenessRelation::MoreConducive => "more_conducive",
        ConducivenessRelation::LessConducive => "less_conducive",
        ConducivenessRelation::Crossing => "crossing",
        ConducivenessRelation::Equal => "equal",
    };
    Ok((relation.to_string(), v.max_gap, v.witness))
}

/// Sweep one scenario parameter ("r", "beta", "m", "rho", "alpha",
/// "intensity") and solve each point; returns rows of
/// (value, x_star, xi_star, converged, residual).
#[pyfunction]
#[pyo3(signature = (scenario, parameter, values, freeze_couplings=false))]
fn parameter_sweep(
    scenario: &PyScenario,
    parameter: &str,
    values: Vec<f64>,
    freeze_couplings: bool,
) -> PyResult<Vec<(f64, f64, f64, bool, f64)>> {
    let p = SweepParameter::parse(parameter).map_err(err)?;
    let rows = core::comparative::parameter_sweep(&scenario.inner, p, &values, freeze_couplings)
        .map_err(err)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.value, r.x_star, r.xi_star, r.converged, r.residual))
        .collect())
}

#[pymodule]
fn css_diffusion_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(q_function, m)?)?;
    m.add_function(wrap_pyfunction!(q_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(pfa_lss, m)?)?;
    m.add_function(wrap_pyfunction!(pfa_css, m)?)?;
    m.add_function(wrap_pyfunction!(ar1_precision_rowsum, m)?)?;
    m.add_function(wrap_pyfunction!(mc_lrt_pfa, m)?)?;
    m.add_function(wrap_pyfunction!(compare_conduciveness, m)?)?;
    m.add_function(wrap_pyfunction!(parameter_sweep, m)?)?;
    m.add_class::<PySensingParams>()?;
    m.add_class::<PyDegreeDistribution>()?;
    m.add_class::<PyCostModel>()?;
    m.add_class::<PyScenario>()?;
    m.add_class::<PyEquilibriumReport>()?;
    m.add_class::<PyAbmResult>()?;
    Ok(())
}
