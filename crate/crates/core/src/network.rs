//! Degree-distribution algebra, the nearest-neighbor energy-cost model,
//! and sampling utilities for the agent-based simulator.

use crate::error::{Error, Result};
use rand::Rng;
use std::path::Path;

const PROB_SUM_TOL: f64 = 1e-12;

/// Finite probability mass function over node degrees.
///
/// Entries are kept sorted by degree with distinct degrees; probabilities
/// are nonnegative and sum to 1 within 1e-12. Zero-probability entries are
/// retained so supports stay aligned across derived distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    entries: Vec<(u32, f64)>,
}

impl DegreeDistribution {
    pub fn new(mut entries: Vec<(u32, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Domain(
                "degree distribution needs at least one entry".into(),
            ));
        }
        entries.sort_by_key(|&(d, _)| d);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Domain(format!("duplicate degree {}", w[0].0)));
            }
        }
        let mut sum = 0.0;
        for &(d, p) in &entries {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::Domain(format!(
                    "probability of degree {d} must be in [0,1], got {p}"
                )));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::Domain(format!(
                "degree probabilities must sum to 1 within {PROB_SUM_TOL}, got {sum}"
            )));
        }
        Ok(Self { entries })
    }

    pub fn point_mass(degree: u32) -> Self {
        Self {
            entries: vec![(degree, 1.0)],
        }
    }

    /// Entries as (degree, probability), sorted by degree.
    pub fn probs(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn prob(&self, degree: u32) -> f64 {
        self.entries
            .iter()
            .find(|&&(d, _)| d == degree)
            .map_or(0.0, |&(_, p)| p)
    }

    pub fn max_degree(&self) -> u32 {
        self.entries.last().map_or(0, |&(d, _)| d)
    }

    pub fn mean_degree(&self) -> f64 {
        self.entries.iter().map(|&(d, p)| d as f64 * p).sum()
    }

    /// Degree distribution of the node reached by following a random edge:
    /// mass proportional to `P(d) * d`, so degree-0 nodes get zero mass.
    pub fn edge_perspective(&self) -> Result<Self> {
        let norm = self.mean_degree();
        if norm <= 0.0 {
            return Err(Error::DegenerateNetwork(
                "all probability mass on degree 0; no edges exist".into(),
            ));
        }
        let entries = self
            .entries
            .iter()
            .map(|&(d, p)| (d, p * d as f64 / norm))
            .collect();
        Ok(Self { entries })
    }

    /// Inverse-CDF draw of a degree.
    pub fn sample(&self, rng: &mut impl Rng) -> u32 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for &(d, p) in &self.entries {
            acc += p;
            if u < acc {
                return d;
            }
        }
        self.entries.last().expect("nonempty").0
    }

    /// Load a `degree,probability` two-column text file ('#' comments).
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let pairs = read_two_columns(path.as_ref())?;
        let entries = pairs
            .into_iter()
            .map(|(d, p)| {
                if d < 0.0 || d.fract() != 0.0 || d > u32::MAX as f64 {
                    Err(Error::Config(format!(
                        "degree column must hold nonnegative integers, got {d}"
                    )))
                } else {
                    Ok((d as u32, p))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }
}

/// Energy-cost distribution of cooperating: either the closed-form CDF
/// induced by a planar Poisson point process of sensors (cost proportional
/// to the nearest-neighbor distance raised to the path-loss exponent), or a
/// tabulated CDF with monotone piecewise-linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    kind: CostKind,
}

#[derive(Debug, Clone, PartialEq)]
enum CostKind {
    Ppp {
        intensity: f64,
        prop_const: f64,
        path_loss_exp: f64,
        // intensity * pi * prop_const^{-2/alpha}, cached
        rate: f64,
    },
    Tabulated {
        points: Vec<(f64, f64)>,
    },
}

impl CostModel {
    pub fn ppp(intensity: f64, prop_const: f64, path_loss_exp: f64) -> Result<Self> {
        if !intensity.is_finite() || intensity <= 0.0 {
            return Err(Error::Domain(format!(
                "intensity must be positive, got {intensity}"
            )));
        }
        if !prop_const.is_finite() || prop_const <= 0.0 {
            return Err(Error::Domain(format!(
                "prop_const must be positive, got {prop_const}"
            )));
        }
        if !path_loss_exp.is_finite() || path_loss_exp <= 1.0 {
            return Err(Error::Domain(format!(
                "path_loss_exp must exceed 1, got {path_loss_exp}"
            )));
        }
        let rate = intensity * std::f64::consts::PI * prop_const.powf(-2.0 / path_loss_exp);
        Ok(Self {
            kind: CostKind::Ppp {
                intensity,
                prop_const,
                path_loss_exp,
                rate,
            },
        })
    }

    /// Tabulated CDF on strictly increasing nonnegative costs with values
    /// nondecreasing in [0,1]. Below the grid the CDF is 0, above it 1.
    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain(
                "tabulated cost model needs at least one point".into(),
            ));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Domain(format!(
                    "tabulated costs must be strictly increasing, got {} after {}",
                    w[1].0, w[0].0
                )));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::Domain(
                    "tabulated cdf values must be nondecreasing".into(),
                ));
            }
        }
        for &(c, f) in &points {
            if !c.is_finite() || c < 0.0 {
                return Err(Error::Domain(format!(
                    "tabulated cost must be nonnegative, got {c}"
                )));
            }
            if !f.is_finite() || !(0.0..=1.0).contains(&f) {
                return Err(Error::Domain(format!(
                    "tabulated cdf value must lie in [0,1], got {f}"
                )));
            }
        }
        Ok(Self {
            kind: CostKind::Tabulated { points },
        })
    }

    /// All mass on a single cost value.
    pub fn point_mass(cost: f64) -> Result<Self> {
        Self::tabulated(vec![(cost, 1.0)])
    }

    /// Load a `cost,cdf` two-column text file ('#' comments).
    pub fn tabulated_from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::tabulated(read_two_columns(path.as_ref())?)
    }

    pub fn intensity(&self) -> Option<f64> {
        match &self.kind {
            CostKind::Ppp { intensity, .. } => Some(*intensity),
            CostKind::Tabulated { .. } => None,
        }
    }

    pub fn path_loss_exp(&self) -> Option<f64> {
        match &self.kind {
            CostKind::Ppp { path_loss_exp, .. } => Some(*path_loss_exp),
            CostKind::Tabulated { .. } => None,
        }
    }

    /// CDF of the cooperation cost at `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        match &self.kind {
            CostKind::Ppp {
                rate,
                path_loss_exp,
                ..
            } => {
                if x <= 0.0 {
                    0.0
                } else {
                    1.0 - (-rate * x.powf(2.0 / path_loss_exp)).exp()
                }
            }
            CostKind::Tabulated { points } => {
                if x < points[0].0 {
                    return 0.0;
                }
                if x > points[points.len() - 1].0 {
                    return 1.0;
                }
                if points.len() == 1 {
                    return points[0].1;
                }
                match points.binary_search_by(|&(c, _)| c.partial_cmp(&x).unwrap()) {
                    Ok(i) => points[i].1,
                    Err(i) => {
                        let (c0, f0) = points[i - 1];
                        let (c1, f1) = points[i];
                        f0 + (f1 - f0) * (x - c0) / (c1 - c0)
                    }
                }
            }
        }
    }

    /// Inverse-CDF draw of a cost.
    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        let u: f64 = rng.random();
        match &self.kind {
            CostKind::Ppp {
                rate,
                path_loss_exp,
                ..
            } => {
                // Invert 1 - exp(-rate * x^(2/alpha)).
                (-(1.0 - u).ln() / rate).powf(path_loss_exp / 2.0)
            }
            CostKind::Tabulated { points } => {
                if u <= points[0].1 {
                    return points[0].0;
                }
                for w in points.windows(2) {
                    let ((c0, f0), (c1, f1)) = (w[0], w[1]);
                    if u <= f1 {
                        if f1 > f0 {
                            return c0 + (c1 - c0) * (u - f0) / (f1 - f0);
                        }
                        return c1;
                    }
                }
                points[points.len() - 1].0
            }
        }
    }
}

/// Poisson degree distribution with mean `node_density * pi * range^2`,
/// truncated at `max_degree` and renormalized. Errors if the truncated tail
/// mass exceeds 1e-9.
pub fn ppp_degree_distribution(
    node_density: f64,
    range: f64,
    max_degree: u32,
) -> Result<DegreeDistribution> {
    if !node_density.is_finite() || node_density <= 0.0 {
        return Err(Error::Domain(format!(
            "node_density must be positive, got {node_density}"
        )));
    }
    if !range.is_finite() || range <= 0.0 {
        return Err(Error::Domain(format!(
            "range must be positive, got {range}"
        )));
    }
    let mean = node_density * std::f64::consts::PI * range * range;
    let mut pmf = Vec::with_capacity(max_degree as usize + 1);
    let mut term = (-mean).exp();
    let mut total = 0.0;
    for k in 0..=max_degree {
        if k > 0 {
            term *= mean / k as f64;
        }
        pmf.push((k, term));
        total += term;
    }
    let tail = 1.0 - total;
    if tail > 1e-9 {
        return Err(Error::Truncation(format!(
            "tail mass {tail:.3e} beyond degree {max_degree} exceeds 1e-9; raise max_degree"
        )));
    }
    for e in pmf.iter_mut() {
        e.1 /= total;
    }
    DegreeDistribution::new(pmf)
}

fn read_two_columns(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let parse = |s: Option<&str>| -> Result<f64> {
            s.map(str::trim)
                .filter(|s| !s.is_empty())
                .ok_or_else(|| {
                    Error::Config(format!(
                        "{}:{}: expected two comma-separated columns",
                        path.display(),
                        lineno + 1
                    ))
                })?
                .parse()
                .map_err(|e| Error::Config(format!("{}:{}: {e}", path.display(), lineno + 1)))
        };
        let a = parse(cols.next())?;
        let b = parse(cols.next())?;
        if cols.next().is_some() {
            return Err(Error::Config(format!(
                "{}:{}: expected exactly two columns",
                path.display(),
                lineno + 1
            )));
        }
        out.push((a, b));
    }
    Ok(out)
}
