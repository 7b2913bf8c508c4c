//! Built-in function oracles with analytic values and gradients.
//!
//! Gradients are returned as [`Covector`]s. The registry holds the two
//! quadratics from the `l∞` counterexamples (`saddle_half_diff`,
//! `half_sq_norm`), general quadratics, linear maps and two smooth
//! non-quadratic convex functions. `abs_sum` is a nonsmooth negative control
//! for the directional-derivative probe and has no gradient.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::domains::{ConvexDomain, SamplePair};
use crate::error::{check_dim, Error, Result};
use crate::spaces::Covector;

/// Finite-difference step is `FD_STEP_SCALE * (1 + ||x||_2)`.
pub const FD_STEP_SCALE: f64 = 1e-5;
/// Relative tolerance of the analytic-vs-finite-difference gradient check.
pub const FD_REL_TOL: f64 = 1e-6;
/// Slack allowed in the midpoint convexity probe.
pub const MIDPOINT_TOL: f64 = 1e-12;

pub const REGISTRY: &[&str] = &[
    "quadratic",
    "saddle_half_diff",
    "half_sq_norm",
    "linear",
    "softplus_norm",
    "log_sum_exp",
    "abs_sum",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Taken from a published worked example.
    Literature,
    /// Derived in closed form (eigenvalues, explicit Hessian bounds).
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnownConstant {
    pub value: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleMetadata {
    pub convex: bool,
    /// Lower semicontinuity is asserted, not sampled; all built-ins are continuous.
    pub lower_semicontinuous: bool,
    /// Keyed `"<space>/<condition>"`, e.g. `"linf/lip_gradient"`.
    pub known_constants: BTreeMap<String, KnownConstant>,
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Quadratic {
        a: Vec<Vec<f64>>,
        eig_min: f64,
        eig_max: f64,
    },
    SaddleHalfDiff,
    HalfSqNorm,
    Linear(Vec<f64>),
    SoftplusNorm,
    LogSumExp,
    AbsSum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionOracle {
    name: String,
    kind: Kind,
    metadata: OracleMetadata,
}

/// Parameters of the parametric built-ins.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleParams {
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
}

/// `{"name": ..., "params": {"A": [[...]], "c": [...]}}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleDescriptor {
    pub name: String,
    #[serde(default)]
    pub params: OracleParams,
}

impl OracleDescriptor {
    pub fn named(name: &str) -> Self {
        OracleDescriptor {
            name: name.into(),
            params: OracleParams::default(),
        }
    }

    pub fn build(&self) -> Result<FunctionOracle> {
        builtin(&self.name, &self.params)
    }
}

/// Looks up a registered oracle by name.
pub fn builtin(name: &str, params: &OracleParams) -> Result<FunctionOracle> {
    let mut known = BTreeMap::new();
    let mut put = |key: &str, value: f64, provenance| {
        known.insert(key.to_string(), KnownConstant { value, provenance });
    };
    let (kind, convex) = match name {
        "quadratic" => {
            let a = params
                .a
                .clone()
                .ok_or_else(|| Error::InvalidParameter("quadratic needs params.A".into()))?;
            let (eig_min, eig_max) = symmetric_eigen_range(&a)?;
            let convex = eig_min >= -1e-12 * eig_max.abs().max(1.0);
            if convex {
                put("euclidean/lip_gradient", eig_max, Provenance::ClosedForm);
            }
            (Kind::Quadratic { a, eig_min, eig_max }, convex)
        }
        "saddle_half_diff" => {
            put("linf/lip_gradient", 2.0, Provenance::Literature);
            put("linf/one_sided_lip", 1.0, Provenance::Literature);
            put("euclidean/lip_gradient", 1.0, Provenance::ClosedForm);
            (Kind::SaddleHalfDiff, false)
        }
        "half_sq_norm" => {
            put("euclidean/lip_gradient", 1.0, Provenance::ClosedForm);
            put("linf2/lip_gradient", 2.0, Provenance::Literature);
            (Kind::HalfSqNorm, true)
        }
        "linear" => {
            let c = params
                .c
                .clone()
                .ok_or_else(|| Error::InvalidParameter("linear needs params.c".into()))?;
            if c.is_empty() {
                return Err(Error::InvalidParameter("linear needs a nonempty c".into()));
            }
            put("euclidean/lip_gradient", 0.0, Provenance::ClosedForm);
            (Kind::Linear(c), true)
        }
        "softplus_norm" => {
            put("euclidean/lip_gradient", 1.0, Provenance::ClosedForm);
            (Kind::SoftplusNorm, true)
        }
        "log_sum_exp" => {
            put("euclidean/lip_gradient", 0.5, Provenance::ClosedForm);
            (Kind::LogSumExp, true)
        }
        "abs_sum" => (Kind::AbsSum, true),
        other => return Err(Error::UnknownOracle(other.into())),
    };
    Ok(FunctionOracle {
        name: name.into(),
        kind,
        metadata: OracleMetadata {
            convex,
            lower_semicontinuous: true,
            known_constants: known,
        },
    })
}

fn symmetric_eigen_range(a: &[Vec<f64>]) -> Result<(f64, f64)> {
    let n = a.len();
    if n == 0 {
        return Err(Error::InvalidParameter("quadratic needs a nonempty A".into()));
    }
    for row in a {
        check_dim(n, row.len())?;
    }
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = (a[i][j] - a[j][i]).abs();
            if gap > 1e-12 * scale {
                return Err(Error::NonSymmetric { i, j, gap });
            }
        }
    }
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);
    let eig = SymmetricEigen::new(m).eigenvalues;
    Ok((eig.min(), eig.max()))
}

impl FunctionOracle {
    pub fn quadratic(a: Vec<Vec<f64>>) -> Result<Self> {
        builtin("quadratic", &OracleParams { a: Some(a), c: None })
    }

    pub fn linear(c: Vec<f64>) -> Result<Self> {
        builtin("linear", &OracleParams { a: None, c: Some(c) })
    }

    pub fn named(name: &str) -> Result<Self> {
        builtin(name, &OracleParams::default())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn metadata(&self) -> &OracleMetadata {
        &self.metadata
    }

    pub fn is_convex(&self) -> bool {
        self.metadata.convex
    }

    pub fn has_gradient(&self) -> bool {
        !matches!(self.kind, Kind::AbsSum)
    }

    /// True when the gradient is constant, so every ratio-based constant is 0.
    pub fn is_degenerate(&self) -> bool {
        match &self.kind {
            Kind::Linear(_) => true,
            Kind::Quadratic { a, .. } => a.iter().flatten().all(|&v| v == 0.0),
            _ => false,
        }
    }

    /// Dimension fixed by the oracle's parameters, if any.
    pub fn fixed_dim(&self) -> Option<usize> {
        match &self.kind {
            Kind::Quadratic { a, .. } => Some(a.len()),
            Kind::Linear(c) => Some(c.len()),
            Kind::SaddleHalfDiff => Some(2),
            _ => None,
        }
    }

    /// Extreme eigenvalues of `A` for quadratic oracles.
    pub fn eigen_range(&self) -> Option<(f64, f64)> {
        match &self.kind {
            Kind::Quadratic { eig_min, eig_max, .. } => Some((*eig_min, *eig_max)),
            _ => None,
        }
    }

    /// The matrix `A` for quadratic oracles.
    pub fn quadratic_matrix(&self) -> Option<&[Vec<f64>]> {
        match &self.kind {
            Kind::Quadratic { a, .. } => Some(a),
            _ => None,
        }
    }

    pub fn descriptor(&self) -> OracleDescriptor {
        let params = match &self.kind {
            Kind::Quadratic { a, .. } => OracleParams { a: Some(a.clone()), c: None },
            Kind::Linear(c) => OracleParams { a: None, c: Some(c.clone()) },
            _ => OracleParams::default(),
        };
        OracleDescriptor {
            name: self.name.clone(),
            params,
        }
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        if let Some(n) = self.fixed_dim() {
            check_dim(n, x.len())?;
        }
        Ok(())
    }

    fn finite(&self, v: f64, x: &[f64]) -> Result<f64> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                oracle: self.name.clone(),
                x: x.to_vec(),
            })
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        let v = match &self.kind {
            Kind::Quadratic { a, .. } => {
                0.5 * a
                    .iter()
                    .zip(x)
                    .map(|(row, xi)| xi * row.iter().zip(x).map(|(aij, xj)| aij * xj).sum::<f64>())
                    .sum::<f64>()
            }
            Kind::SaddleHalfDiff => 0.5 * (x[0] * x[0] - x[1] * x[1]),
            Kind::HalfSqNorm => 0.5 * x.iter().map(|v| v * v).sum::<f64>(),
            Kind::Linear(c) => c.iter().zip(x).map(|(a, b)| a * b).sum(),
            Kind::SoftplusNorm => (1.0 + x.iter().map(|v| v * v).sum::<f64>()).sqrt(),
            Kind::LogSumExp => {
                let m = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                m + x.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
            }
            Kind::AbsSum => x.iter().map(|v| v.abs()).sum(),
        };
        self.finite(v, x)
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Covector> {
        self.check_input(x)?;
        let g: Vec<f64> = match &self.kind {
            Kind::Quadratic { a, .. } => a
                .iter()
                .map(|row| row.iter().zip(x).map(|(aij, xj)| aij * xj).sum())
                .collect(),
            Kind::SaddleHalfDiff => vec![x[0], -x[1]],
            Kind::HalfSqNorm => x.to_vec(),
            Kind::Linear(c) => c.clone(),
            Kind::SoftplusNorm => {
                let s = (1.0 + x.iter().map(|v| v * v).sum::<f64>()).sqrt();
                x.iter().map(|v| v / s).collect()
            }
            Kind::LogSumExp => {
                let m = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let e: Vec<f64> = x.iter().map(|v| (v - m).exp()).collect();
                let z: f64 = e.iter().sum();
                e.iter().map(|v| v / z).collect()
            }
            Kind::AbsSum => return Err(Error::MissingGradient(self.name.clone())),
        };
        for &v in &g {
            self.finite(v, x)?;
        }
        Ok(Covector(g))
    }
}

fn require_inside(domain: &ConvexDomain, z: &[f64]) -> Result<()> {
    check_dim(domain.dim(), z.len())?;
    if domain.contains(z) {
        Ok(())
    } else {
        Err(Error::OutsideDomain(z.to_vec()))
    }
}

/// Central-difference gradient: component `i` is `(f(x + h e_i) - f(x - h e_i)) / 2h`.
pub fn fd_gradient(oracle: &FunctionOracle, domain: &ConvexDomain, x: &[f64], h: f64) -> Result<Covector> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("step h = {h} must be positive")));
    }
    require_inside(domain, x)?;
    let mut probe = x.to_vec();
    let mut g = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        require_inside(domain, &probe)?;
        let up = oracle.value(&probe)?;
        probe[i] = x[i] - h;
        require_inside(domain, &probe)?;
        let down = oracle.value(&probe)?;
        probe[i] = x[i];
        g.push((up - down) / (2.0 * h));
    }
    Ok(Covector(g))
}

/// The default finite-difference step at `x`.
pub fn fd_step(x: &[f64]) -> f64 {
    FD_STEP_SCALE * (1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt())
}

/// Relative max-norm gap between the analytic and finite-difference gradients.
pub fn gradient_check(oracle: &FunctionOracle, domain: &ConvexDomain, x: &[f64]) -> Result<f64> {
    let g = oracle.gradient(x)?;
    let fd = fd_gradient(oracle, domain, x, fd_step(x))?;
    let scale = g.0.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let gap = g.0.iter().zip(&fd.0).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(gap / scale)
}

/// Estimate of `f'(x; d) + f'(x; -d)`, which vanishes when `f` is Gâteaux
/// differentiable at `x`.
///
/// For each `t` in the grid the symmetric quotient
/// `(f(x + t d) - f(x)) / t + (f(x - t d) - f(x)) / t` is formed; the limit
/// `t -> 0` is the intercept of a least-squares line through these values.
pub fn directional_defect(
    oracle: &FunctionOracle,
    domain: &ConvexDomain,
    x: &[f64],
    direction: &[f64],
    t_grid: &[f64],
) -> Result<f64> {
    check_dim(x.len(), direction.len())?;
    if t_grid.len() < 2 {
        return Err(Error::InvalidParameter("t grid needs at least two points".into()));
    }
    if t_grid.iter().any(|&t| !(t > 0.0)) || t_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("t grid must be positive and strictly decreasing".into()));
    }
    require_inside(domain, x)?;
    let fx = oracle.value(x)?;
    let mut pts = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let plus: Vec<f64> = x.iter().zip(direction).map(|(a, d)| a + t * d).collect();
        let minus: Vec<f64> = x.iter().zip(direction).map(|(a, d)| a - t * d).collect();
        require_inside(domain, &plus)?;
        require_inside(domain, &minus)?;
        let q = (oracle.value(&plus)? - fx) / t + (oracle.value(&minus)? - fx) / t;
        pts.push((t, q));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mq = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - mq)).sum();
    let slope = sxy / sxx;
    Ok(mq - slope * mt)
}

/// First pair violating `f((x+y)/2) <= (f(x) + f(y))/2 + MIDPOINT_TOL`,
/// together with the violation amount.
pub fn midpoint_convexity_witness(
    oracle: &FunctionOracle,
    pairs: &[SamplePair],
) -> Result<Option<(SamplePair, f64)>> {
    for p in pairs {
        let m: Vec<f64> = p.x.iter().zip(&p.y).map(|(a, b)| 0.5 * (a + b)).collect();
        let gap = oracle.value(&m)? - 0.5 * (oracle.value(&p.x)? + oracle.value(&p.y)?);
        if gap > MIDPOINT_TOL {
            return Ok(Some((p.clone(), gap)));
        }
    }
    Ok(None)
}
