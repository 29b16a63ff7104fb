//! Detection-side math: Gaussian Q-function, closed-form false-alarm
//! probabilities for local (LSS) and cooperative (CSS) spectrum sensing,
//! and the numerical oracles that validate them.
//!
//! The sensing channel is parameterized by the mean SNR drop between the
//! near and far hypotheses (`delta_delta`, in dB, negative), the shadowing
//! standard deviation `sigma`, the inter-sensor shadowing correlation `rho`
//! of the exponential AR(1) model, the detection-probability target `beta`,
//! and the per-sensor antenna count.

use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Parameters of the sensing channel and detection constraint.
///
/// Invariants are enforced at construction: `delta_delta < 0`, `sigma > 0`,
/// `0 <= rho < 1`, `0 < beta < 1`, `antennas >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingParams {
    delta_delta: f64,
    sigma: f64,
    rho: f64,
    beta: f64,
    antennas: u32,
    // Q^{-1}(beta), cached because every false-alarm evaluation needs it.
    q_inv_beta: f64,
}

impl SensingParams {
    pub fn new(delta_delta: f64, sigma: f64, rho: f64, beta: f64, antennas: u32) -> Result<Self> {
        if !delta_delta.is_finite() || delta_delta >= 0.0 {
            return Err(Error::Domain(format!(
                "delta_delta must be finite and negative, got {delta_delta}"
            )));
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::Domain(format!(
                "sigma must be finite and positive, got {sigma}"
            )));
        }
        if !rho.is_finite() || !(0.0..1.0).contains(&rho) {
            return Err(Error::Domain(format!("rho must lie in [0,1), got {rho}")));
        }
        if !beta.is_finite() || beta <= 0.0 || beta >= 1.0 {
            return Err(Error::Domain(format!("beta must lie in (0,1), got {beta}")));
        }
        if antennas < 1 {
            return Err(Error::Domain("antennas must be at least 1".into()));
        }
        Ok(Self {
            delta_delta,
            sigma,
            rho,
            beta,
            antennas,
            q_inv_beta: q_inverse(beta)?,
        })
    }

    pub fn delta_delta(&self) -> f64 {
        self.delta_delta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn antennas(&self) -> u32 {
        self.antennas
    }
}

/// Upper-tail probability of the standard normal, `Q(x) = P(Z > x)`.
pub fn q_function(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!(
            "q_function requires finite x, got {x}"
        )));
    }
    Ok(q_raw(x))
}

#[inline]
fn q_raw(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse of [`q_function`] on (0,1), found by bisection with a Newton
/// polish. Absolute tolerance 1e-12 on the abscissa.
pub fn q_inverse(p: f64) -> Result<f64> {
    if !p.is_finite() || p <= 0.0 || p >= 1.0 {
        return Err(Error::Domain(format!(
            "q_inverse requires p in (0,1), got {p}"
        )));
    }
    // Q is strictly decreasing; Q(-40) and Q(40) bracket every p
    // representable in (0,1).
    let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
    let mut mid = 0.0;
    while hi - lo > 1e-13 {
        mid = 0.5 * (lo + hi);
        let q = q_raw(mid);
        if q == p {
            return Ok(mid);
        }
        if q > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Newton refinement against the normal pdf.
    let mut x = mid;
    for _ in 0..2 {
        let pdf = (-(x * x) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        if pdf > 0.0 {
            let step = (q_raw(x) - p) / pdf;
            if step.is_finite() {
                x += step;
            }
        }
    }
    Ok(x)
}

/// Cluster correlation factor of the CSS detector, written so that
/// `c = 1` yields exactly 1 in floating point.
#[inline]
fn cluster_factor(cluster_size: f64, rho: f64) -> f64 {
    (((1.0 - rho) * (cluster_size - 1.0) + (1.0 + rho)) / (1.0 + rho)).sqrt()
}

#[inline]
fn pfa_kernel(params: &SensingParams, factor: f64) -> f64 {
    let z = (params.antennas as f64).sqrt() * params.delta_delta / params.sigma * factor
        + params.q_inv_beta;
    1.0 - q_raw(z)
}

/// False-alarm probability of local sensing (one sensor, `antennas`
/// combined coherently).
pub fn pfa_lss(params: &SensingParams) -> f64 {
    pfa_kernel(params, 1.0)
}

/// False-alarm probability of cooperative sensing with a cluster of
/// `cluster_size` sensors under the AR(1) shadowing-correlation model.
///
/// `cluster_size` is real-valued: the diffusion game evaluates it at the
/// expected number of cooperating neighbors. Equals [`pfa_lss`] exactly at
/// `cluster_size = 1`.
pub fn pfa_css(params: &SensingParams, cluster_size: f64) -> Result<f64> {
    if !cluster_size.is_finite() || cluster_size < 0.0 {
        return Err(Error::Domain(format!(
            "cluster_size must be finite and nonnegative, got {cluster_size}"
        )));
    }
    Ok(pfa_kernel(params, cluster_factor(cluster_size, params.rho)))
}

/// Dense symmetric positive-definite Cholesky factor, stored lower
/// triangular row-major. Small dimensions only.
struct Cholesky {
    dim: usize,
    l: Vec<f64>,
}

impl Cholesky {
    fn factor(dim: usize, a: &[f64]) -> Result<Self> {
        let mut l = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..=i {
                let mut sum = a[i * dim + j];
                for k in 0..j {
                    sum -= l[i * dim + k] * l[j * dim + k];
                }
                if i == j {
                    if sum <= 0.0 {
                        return Err(Error::SingularMatrix(format!(
                            "matrix not positive definite at pivot {i}"
                        )));
                    }
                    l[i * dim + i] = sum.sqrt();
                } else {
                    l[i * dim + j] = sum / l[j * dim + j];
                }
            }
        }
        Ok(Self { dim, l })
    }

    /// Solve `A x = b` given `A = L L^T`.
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut sum = b[i];
            for k in 0..i {
                sum -= self.l[i * n + k] * y[k];
            }
            y[i] = sum / self.l[i * n + i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut sum = y[i];
            for k in i + 1..n {
                sum -= self.l[k * n + i] * x[k];
            }
            x[i] = sum / self.l[i * n + i];
        }
        x
    }

    /// Multiply `L g` in place into `out`.
    fn mul_lower(&self, g: &[f64], out: &mut [f64]) {
        let n = self.dim;
        for i in 0..n {
            let mut sum = 0.0;
            for k in 0..=i {
                sum += self.l[i * n + k] * g[k];
            }
            out[i] = sum;
        }
    }
}

fn ar1_covariance(c: usize, rho: f64) -> Vec<f64> {
    let mut a = vec![0.0; c * c];
    for i in 0..c {
        for j in 0..c {
            a[i * c + j] = rho.powi((i as i32 - j as i32).abs());
        }
    }
    a
}

/// Numeric evaluation of `1^T S^{-1} 1` for the AR(1) covariance
/// `S[i][j] = rho^|i-j|`, by Cholesky solve. Oracle for the cluster factor
/// used inside [`pfa_css`].
pub fn ar1_precision_rowsum(cluster_size: u32, rho: f64) -> Result<f64> {
    if cluster_size < 1 {
        return Err(Error::Domain("cluster_size must be at least 1".into()));
    }
    if !rho.is_finite() || rho >= 1.0 || rho < 0.0 {
        return Err(Error::SingularMatrix(format!(
            "AR(1) covariance requires 0 <= rho < 1, got {rho}"
        )));
    }
    let c = cluster_size as usize;
    let chol = Cholesky::factor(c, &ar1_covariance(c, rho))?;
    let w = chol.solve(&vec![1.0; c]);
    Ok(w.iter().sum())
}

/// A Monte-Carlo estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub pfa: f64,
    pub std_err: f64,
    pub trials: u64,
}

/// Monte-Carlo oracle for the CSS false-alarm probability.
///
/// Draws the reported SNR vector under the far hypothesis,
/// `y ~ N(M*delta_delta*1, sigma^2*M*S)` with `S` the AR(1) covariance,
/// forms the likelihood-ratio statistic `1^T S^{-1} y / 1^T S^{-1} 1`, and
/// counts exceedances of the threshold placed so that the in-guard-region
/// decision probability equals `beta` under the near hypothesis. All matrix
/// quantities come from the numeric Cholesky factor, independent of the
/// closed forms. Deterministic for a given seed.
pub fn mc_lrt_pfa(
    params: &SensingParams,
    cluster_size: u32,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    if trials < 10_000 {
        return Err(Error::Domain(format!(
            "mc_lrt_pfa needs at least 10000 trials for a usable standard error, got {trials}"
        )));
    }
    if cluster_size < 1 {
        return Err(Error::Domain("cluster_size must be at least 1".into()));
    }
    let c = cluster_size as usize;
    let chol = Cholesky::factor(c, &ar1_covariance(c, params.rho))?;
    let weights = chol.solve(&vec![1.0; c]);
    let rowsum: f64 = weights.iter().sum();

    let m = params.antennas as f64;
    let mean_far = m * params.delta_delta;
    let scale = params.sigma * m.sqrt();
    // Statistic std dev under either hypothesis; near-hypothesis mean is 0.
    let stat_sd = scale / rowsum.sqrt();
    let threshold = -stat_sd * params.q_inv_beta;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut g = vec![0.0; c];
    let mut y = vec![0.0; c];
    let mut hits: u64 = 0;
    for _ in 0..trials {
        for gi in g.iter_mut() {
            *gi = normal.sample(&mut rng);
        }
        chol.mul_lower(&g, &mut y);
        let mut stat = 0.0;
        for i in 0..c {
            stat += weights[i] * (mean_far + scale * y[i]);
        }
        stat /= rowsum;
        if stat >= threshold {
            hits += 1;
        }
    }
    let p = hits as f64 / trials as f64;
    let std_err = (p * (1.0 - p) / trials as f64).sqrt();
    Ok(McEstimate {
        pfa: p,
        std_err,
        trials,
    })
}
