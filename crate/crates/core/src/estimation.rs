//! Best-constant estimation and the implication matrix between conditions.
//!
//! For each condition the pointwise inequality is solved for the smallest
//! `L` that makes it tight at a sampled pair; the estimate is the maximum of
//! these ratios, so it is a sampled lower bound on the best constant.
//! Quantities built from function values (Bregman gaps, interpolation gaps)
//! suffer cancellation for close pairs; they are shrunk by a rounding
//! allowance before dividing so that noise never inflates an estimate.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::conditions::{lambda_grid, run_condition, ConditionId, ConditionVerdict, Witness, VIOLATION_TOL};
use crate::domains::{segment_points, ConvexDomain, SamplePair};
use crate::error::{check_dim, Error, Result};
use crate::oracles::FunctionOracle;
use crate::spaces::{dot, NormedSpace};

/// Relative tolerance for constant orderings in the implication matrix.
pub const IMPLICATION_REL_TOL: f64 = 5e-2;
/// Absolute slack added to every ordering comparison.
pub const IMPLICATION_ABS_TOL: f64 = 1e-12;
/// Coordinate-descent steps spent polishing a witness.
pub const POLISH_STEPS: usize = 100;
/// Pairs closer than this (relative to their magnitude) count as coincident.
pub const COINCIDENT_REL: f64 = 1e-5;
/// Multiple of machine epsilon used for the rounding allowance.
const ROUNDING_FACTOR: f64 = 16.0;

/// The best-constant ratio at a single pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    /// The pair carries no information (coincident points).
    Skip,
    Finite(f64),
    /// No finite `L` satisfies the inequality at this pair.
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub condition: ConditionId,
    /// `+inf` when unbounded evidence was found.
    #[serde(rename = "L_hat")]
    pub l_hat: f64,
    pub unbounded: bool,
    pub witness: Witness,
    pub samples_used: usize,
    pub degenerate: bool,
}

fn allowance(scale: f64) -> f64 {
    ROUNDING_FACTOR * f64::EPSILON * scale
}

// Componentwise size of the terms summed into the gradient; for a quadratic
// this is |A||x|, which stays large where Ax cancels.
fn gradient_magnitude(oracle: &FunctionOracle, x: &[f64], g: &[f64]) -> Vec<f64> {
    match oracle.quadratic_matrix() {
        Some(a) => a.iter().map(|row| row.iter().zip(x).map(|(r, v)| (r * v).abs()).sum()).collect(),
        None => g.iter().map(|v| v.abs()).collect(),
    }
}

fn value_magnitude(oracle: &FunctionOracle, x: &[f64], fx: f64) -> f64 {
    match oracle.quadratic_matrix() {
        Some(_) => {
            let gm = gradient_magnitude(oracle, x, &[]);
            fx.abs() + 0.5 * gm.iter().zip(x).map(|(g, v)| g * v.abs()).sum::<f64>()
        }
        None => fx.abs(),
    }
}

/// The defining ratio of `condition` at the ordered pair `(x, y)`.
pub fn ratio_at(
    condition: ConditionId,
    oracle: &FunctionOracle,
    space: &NormedSpace,
    x: &[f64],
    y: &[f64],
    lambda: Option<f64>,
) -> Result<Ratio> {
    condition.applicability(oracle, space)?;
    check_dim(space.dim(), x.len())?;
    check_dim(space.dim(), y.len())?;
    if condition.uses_lambda() {
        match lambda {
            Some(l) if l > 0.0 && l < 1.0 => {}
            _ => return Err(Error::InvalidParameter(format!("{condition} needs lambda in (0, 1)"))),
        }
    }
    ratio_unchecked(condition, oracle, space, x, y, lambda)
}

fn ratio_unchecked(
    condition: ConditionId,
    oracle: &FunctionOracle,
    space: &NormedSpace,
    x: &[f64],
    y: &[f64],
    lambda: Option<f64>,
) -> Result<Ratio> {
    let dx: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
    let n = space.norm_unchecked(&dx);
    let scale = space.norm_unchecked(x).max(space.norm_unchecked(y)).max(1.0);
    if !(n > COINCIDENT_REL * scale) {
        return Ok(Ratio::Skip);
    }
    let n2 = n * n;

    if let Some(lam) = lambda.filter(|_| condition.uses_lambda()) {
        let m: Vec<f64> = x.iter().zip(y).map(|(a, b)| lam * a + (1.0 - lam) * b).collect();
        let (fx, fy, fm) = (oracle.value(x)?, oracle.value(y)?, oracle.value(&m)?);
        // rounding in m moves f(m) by about |f'(m)| |m| eps
        let spread = if oracle.has_gradient() {
            let gm = oracle.gradient(&m)?;
            let gm = gradient_magnitude(oracle, &m, gm.as_slice());
            gm.iter().zip(x.iter().zip(y)).map(|(g, (a, b))| g * (a.abs() + b.abs())).sum()
        } else {
            0.0
        };
        let gap = lam * fx + (1.0 - lam) * fy - fm;
        let sizes = value_magnitude(oracle, x, fx) + value_magnitude(oracle, y, fy) + value_magnitude(oracle, &m, fm);
        let gap = gap - allowance(sizes + spread);
        if gap <= 0.0 {
            return Ok(Ratio::Finite(0.0));
        }
        if condition == ConditionId::StrongSmoothness {
            return Ok(Ratio::Finite(2.0 * gap / (lam * (1.0 - lam) * n2)));
        }
        let (nx, ny, nm) = (space.norm_unchecked(x), space.norm_unchecked(y), space.norm_unchecked(&m));
        let curv = lam * nx * nx + (1.0 - lam) * ny * ny - nm * nm;
        let curv_err = allowance(nx * nx + ny * ny + nm * nm);
        if curv <= curv_err {
            // a flat stretch of the squared norm against a resolvable gap
            let resolvable = gap > 1e-6 * (fx.abs() + fy.abs() + fm.abs());
            return Ok(if resolvable { Ratio::Unbounded } else { Ratio::Skip });
        }
        return Ok(Ratio::Finite(2.0 * gap / (curv + curv_err)));
    }

    let gx = oracle.gradient(x)?;
    let gy = oracle.gradient(y)?;
    let dg = gy.sub(&gx);
    let d = space.dual_norm_unchecked(dg.as_slice());
    let p = dot(dg.as_slice(), &dx);
    let (mx, my) = (gradient_magnitude(oracle, x, gx.as_slice()), gradient_magnitude(oracle, y, gy.as_slice()));
    let p_err = allowance(mx.iter().zip(&my).zip(&dx).map(|((a, b), v)| (a + b) * v.abs()).sum());
    let bregman = || -> Result<(f64, f64)> {
        let (fx, fy) = (oracle.value(x)?, oracle.value(y)?);
        let b = fy - fx - dot(gx.as_slice(), &dx);
        let lin = mx.iter().zip(x.iter().zip(y)).map(|(g, (a, c))| g * (a.abs() + c.abs())).sum::<f64>();
        Ok((b, allowance(value_magnitude(oracle, x, fx) + value_magnitude(oracle, y, fy) + lin)))
    };
    Ok(match condition {
        ConditionId::LipGradient => Ratio::Finite(d / n),
        ConditionId::OneSidedLip => Ratio::Finite(p.abs() / n2),
        ConditionId::ComonotoneUpper => Ratio::Finite(p.max(0.0) / n2),
        ConditionId::TaylorRemainder => {
            let (b, e) = bregman()?;
            Ratio::Finite(2.0 * (b.abs() - e).max(0.0) / n2)
        }
        ConditionId::DescentLemma => {
            let (b, e) = bregman()?;
            Ratio::Finite(2.0 * (b - e).max(0.0) / n2)
        }
        ConditionId::Cocoercivity => {
            if d == 0.0 {
                Ratio::Finite(0.0)
            } else if p <= -p_err {
                Ratio::Unbounded
            } else {
                Ratio::Finite(d * d / (p.max(0.0) + p_err))
            }
        }
        ConditionId::BregmanLower => {
            let (b, e) = bregman()?;
            if d == 0.0 {
                Ratio::Finite(0.0)
            } else if b <= -e {
                Ratio::Unbounded
            } else {
                Ratio::Finite(d * d / (2.0 * (b.max(0.0) + e)))
            }
        }
        ConditionId::NonexpansiveTransform => {
            // phi(s) = ||s dg - R dx||_*^2 - ||dx||^2 = alpha s^2 + beta s, and L = 2 / s*
            let rdx = space.riesz(&dx)?;
            let phi = |s: f64| {
                let t: Vec<f64> = dg.0.iter().zip(&rdx.0).map(|(g, r)| s * g - r).collect();
                let v = space.dual_norm_unchecked(&t);
                v * v - n2
            };
            let (plus, minus) = (phi(1.0), phi(-1.0));
            let alpha = 0.5 * (plus + minus);
            let beta = 0.5 * (plus - minus);
            if alpha <= 0.0 {
                Ratio::Finite(0.0)
            } else if beta >= 2.0 * p_err {
                Ratio::Unbounded
            } else {
                Ratio::Finite(2.0 * alpha / ((-beta).max(0.0) + 2.0 * p_err))
            }
        }
        ConditionId::StrongSmoothness | ConditionId::AuxConvexity => {
            return Err(Error::InvalidParameter(format!("{condition} needs an interpolation weight")))
        }
    })
}

struct Candidate {
    value: f64,
    x: Vec<f64>,
    y: Vec<f64>,
    lambda: Option<f64>,
}

impl Candidate {
    fn witness(&self) -> Witness {
        Witness {
            x: self.x.clone(),
            y: self.y.clone(),
            lambda: self.lambda,
        }
    }
}

struct Polisher<'a> {
    condition: ConditionId,
    oracle: &'a FunctionOracle,
    space: &'a NormedSpace,
    domain: &'a ConvexDomain,
}

impl Polisher<'_> {
    fn eval(&self, x: &[f64], y: &[f64], lambda: Option<f64>) -> Result<Ratio> {
        ratio_unchecked(self.condition, self.oracle, self.space, x, y, lambda)
    }

    /// Coordinate descent on the concatenated pair with a halving step.
    fn polish(&self, start: &Candidate) -> Result<Candidate> {
        let n = start.x.len();
        let mut z: Vec<f64> = start.x.iter().chain(&start.y).copied().collect();
        let mut best = start.value;
        let spread = start.x.iter().zip(&start.y).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let mut step = 0.25 * spread;
        for _ in 0..POLISH_STEPS {
            if !(step > 0.0) {
                break;
            }
            let mut improved = false;
            for k in 0..2 * n {
                for sign in [1.0, -1.0] {
                    let mut trial = z.clone();
                    trial[k] += sign * step;
                    let (x, y) = trial.split_at(n);
                    if !(self.domain.contains(x) && self.domain.contains(y)) {
                        continue;
                    }
                    if let Ratio::Finite(v) = self.eval(x, y, start.lambda)? {
                        if v > best {
                            best = v;
                            z = trial;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        let (x, y) = z.split_at(n);
        Ok(Candidate {
            value: best,
            x: x.to_vec(),
            y: y.to_vec(),
            lambda: start.lambda,
        })
    }
}

/// Sampled lower bound on the best constant of `condition`.
///
/// The running-best witness is polished at every power-of-two checkpoint of
/// the sample count, so the estimate never decreases when `budget` grows
/// with the same seed.
pub fn estimate_constant(
    oracle: &FunctionOracle,
    space: &NormedSpace,
    domain: &ConvexDomain,
    condition: ConditionId,
    budget: usize,
    seed: u64,
) -> Result<ConstantEstimate> {
    condition.applicability(oracle, space)?;
    check_dim(space.dim(), domain.dim())?;
    let pairs = domain.sample_pairs(0.0, budget, seed)?;
    estimate_on_pairs(oracle, space, domain, condition, &pairs, &lambda_grid(seed))
}

pub fn estimate_on_pairs(
    oracle: &FunctionOracle,
    space: &NormedSpace,
    domain: &ConvexDomain,
    condition: ConditionId,
    pairs: &[SamplePair],
    lambdas: &[f64],
) -> Result<ConstantEstimate> {
    condition.applicability(oracle, space)?;
    let weights: Vec<Option<f64>> = if condition.uses_lambda() {
        lambdas.iter().map(|&v| Some(v)).collect()
    } else {
        vec![None]
    };
    let polisher = Polisher {
        condition,
        oracle,
        space,
        domain,
    };
    let mut raw: Option<(usize, Candidate)> = None;
    let mut polished: Option<Candidate> = None;
    let mut polished_from = BTreeSet::new();
    let mut unbounded: Option<Witness> = None;
    for (i, pair) in pairs.iter().enumerate() {
        for &lambda in &weights {
            let orientations: &[(&[f64], &[f64])] = if condition.is_symmetric() {
                &[(&pair.x, &pair.y)]
            } else {
                &[(&pair.x, &pair.y), (&pair.y, &pair.x)]
            };
            for &(x, y) in orientations {
                match polisher.eval(x, y, lambda)? {
                    Ratio::Skip => {}
                    Ratio::Unbounded => {
                        if unbounded.is_none() {
                            unbounded = Some(Witness {
                                x: x.to_vec(),
                                y: y.to_vec(),
                                lambda,
                            });
                        }
                    }
                    Ratio::Finite(v) => {
                        if raw.as_ref().map_or(true, |(_, c)| v > c.value) {
                            raw = Some((
                                i,
                                Candidate {
                                    value: v,
                                    x: x.to_vec(),
                                    y: y.to_vec(),
                                    lambda,
                                },
                            ));
                        }
                    }
                }
            }
        }
        let seen = i + 1;
        if unbounded.is_none() && seen.is_power_of_two() {
            if let Some((idx, cand)) = &raw {
                if polished_from.insert(*idx) {
                    let p = polisher.polish(cand)?;
                    if polished.as_ref().map_or(true, |q| p.value > q.value) {
                        polished = Some(p);
                    }
                }
            }
        }
    }
    let degenerate = oracle.is_degenerate();
    if let Some(w) = unbounded {
        return Ok(ConstantEstimate {
            condition,
            l_hat: f64::INFINITY,
            unbounded: true,
            witness: w,
            samples_used: pairs.len(),
            degenerate,
        });
    }
    let (_, raw) = raw.ok_or(Error::EmptySampleSet)?;
    let best = match polished {
        Some(p) if p.value > raw.value => p,
        _ => raw,
    };
    Ok(ConstantEstimate {
        condition,
        l_hat: best.value,
        unbounded: false,
        witness: best.witness(),
        samples_used: pairs.len(),
        degenerate,
    })
}

/// Largest gradient-Lipschitz ratio over the consecutive pieces of the
/// segment `[x, y]` cut into `n` equal parts.
pub fn segment_refine(
    oracle: &FunctionOracle,
    space: &NormedSpace,
    domain: &ConvexDomain,
    x: &[f64],
    y: &[f64],
    n: usize,
) -> Result<f64> {
    ConditionId::LipGradient.applicability(oracle, space)?;
    check_dim(space.dim(), x.len())?;
    let pts = segment_points(x, y, n)?;
    for p in &pts {
        if !domain.contains(p) {
            return Err(Error::OutsideDomain(p.clone()));
        }
    }
    let grads = pts.iter().map(|p| oracle.gradient(p)).collect::<Result<Vec<_>>>()?;
    let mut best = 0.0f64;
    for i in 1..pts.len() {
        let dx: Vec<f64> = pts[i].iter().zip(&pts[i - 1]).map(|(a, b)| a - b).collect();
        let nx = space.norm_unchecked(&dx);
        if nx == 0.0 {
            continue;
        }
        let dg = grads[i].sub(&grads[i - 1]);
        best = best.max(space.dual_norm_unchecked(dg.as_slice()) / nx);
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorLipBound {
    /// Larger of the one-sided and Taylor-remainder estimates.
    #[serde(rename = "L_taylor")]
    pub l_taylor: f64,
    #[serde(rename = "L_lip")]
    pub l_lip: f64,
    pub ratio: f64,
    pub degenerate: bool,
}

/// Pieces used to probe the gradient along a Taylor witness segment.
const TAYLOR_SEGMENT_PIECES: usize = 32;

/// Estimates the one-sided/Taylor constant and the gradient Lipschitz
/// constant and returns their ratio, which lies in `[1, 2]` for convex
/// oracles.
pub fn banach_taylor_to_lip_bound(
    oracle: &FunctionOracle,
    space: &NormedSpace,
    domain: &ConvexDomain,
    budget: usize,
    seed: u64,
) -> Result<TaylorLipBound> {
    let taylor = estimate_constant(oracle, space, domain, ConditionId::TaylorRemainder, budget, seed)?;
    let one = estimate_constant(oracle, space, domain, ConditionId::OneSidedLip, budget, seed)?;
    let lip = estimate_constant(oracle, space, domain, ConditionId::LipGradient, budget, seed)?;
    let l_taylor = taylor.l_hat.max(one.l_hat);

    // the gradient ratio along the witnesses of the lower class is evidence
    // for the Lipschitz constant as well
    let mut l_lip = lip.l_hat;
    let w = &one.witness;
    if let Ratio::Finite(v) = ratio_unchecked(ConditionId::LipGradient, oracle, space, &w.x, &w.y, None)? {
        l_lip = l_lip.max(v);
    }
    let w = &taylor.witness;
    let pts = segment_points(&w.x, &w.y, TAYLOR_SEGMENT_PIECES)?;
    for p in &pts[1..] {
        if let Ratio::Finite(v) = ratio_unchecked(ConditionId::LipGradient, oracle, space, &w.x, p, None)? {
            l_lip = l_lip.max(v);
        }
    }

    if l_taylor == 0.0 && l_lip == 0.0 {
        return Ok(TaylorLipBound {
            l_taylor,
            l_lip,
            ratio: 1.0,
            degenerate: true,
        });
    }
    Ok(TaylorLipBound {
        l_taylor,
        l_lip,
        ratio: l_lip / l_taylor,
        degenerate: oracle.is_degenerate(),
    })
}

/// Points `x_i` with `f'(x_i) = (1 - i/n) f'(x) + (i/n) f'(y)` for a
/// quadratic oracle with invertible matrix.
pub fn gradient_range_segment(oracle: &FunctionOracle, x: &[f64], y: &[f64], n: usize) -> Result<Vec<Vec<f64>>> {
    let a = oracle
        .quadratic_matrix()
        .ok_or_else(|| Error::InvalidParameter(format!("oracle `{}` is not quadratic", oracle.name())))?;
    let dim = a.len();
    check_dim(dim, x.len())?;
    check_dim(dim, y.len())?;
    if n < 1 {
        return Err(Error::InvalidParameter("segment needs n >= 1".into()));
    }
    let m = DMatrix::from_fn(dim, dim, |i, j| a[i][j]);
    let lu = m.clone().lu();
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let pivots_ok = (0..dim).all(|i| lu.u()[(i, i)].abs() > 1e-12 * scale);
    if !pivots_ok {
        return Err(Error::Singular);
    }
    let gx = oracle.gradient(x)?;
    let gy = oracle.gradient(y)?;
    (0..=n)
        .map(|i| {
            if i == 0 {
                return Ok(x.to_vec());
            }
            if i == n {
                return Ok(y.to_vec());
            }
            let t = i as f64 / n as f64;
            let rhs = DVector::from_iterator(dim, gx.0.iter().zip(&gy.0).map(|(a, b)| (1.0 - t) * a + t * b));
            let sol = lu.solve(&rhs).ok_or(Error::Singular)?;
            Ok(sol.iter().copied().collect())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeMode {
    /// Cocoercivity on the preimage segment gives the Bregman lower bound.
    CocoToBregman,
    /// Descent lemma on a shrunk preimage segment gives cocoercivity.
    DescentToCoco,
}

impl RangeMode {
    pub fn hypothesis(self) -> ConditionId {
        match self {
            RangeMode::CocoToBregman => ConditionId::Cocoercivity,
            RangeMode::DescentToCoco => ConditionId::DescentLemma,
        }
    }

    pub fn conclusion(self) -> ConditionId {
        match self {
            RangeMode::CocoToBregman => ConditionId::BregmanLower,
            RangeMode::DescentToCoco => ConditionId::Cocoercivity,
        }
    }
}

/// Margin of the conclusion inequality at `pair`, after checking that the
/// gradient-range segment stays where the hypothesis is available.
#[allow(clippy::too_many_arguments)]
pub fn check_range_conditional(
    oracle: &FunctionOracle,
    space: &NormedSpace,
    domain: &ConvexDomain,
    rho: f64,
    pair: &SamplePair,
    n: usize,
    l: f64,
    mode: RangeMode,
) -> Result<f64> {
    let pts = gradient_range_segment(oracle, &pair.x, &pair.y, n)?;
    match mode {
        RangeMode::CocoToBregman => {
            if let Some(p) = pts.iter().find(|p| !domain.contains(p)) {
                return Err(Error::HypothesisRange(format!("preimage point {p:?} leaves the domain")));
            }
        }
        RangeMode::DescentToCoco => {
            if let Some(p) = pts.iter().find(|p| !domain.contains_shrunk(p, rho)) {
                return Err(Error::HypothesisRange(format!(
                    "preimage point {p:?} leaves the rho-shrunk domain (rho = {rho})"
                )));
            }
            let dg = oracle.gradient(&pair.y)?.sub(&oracle.gradient(&pair.x)?);
            let gap = space.dual_norm(&dg)?;
            if !(gap < l * rho * n as f64) {
                return Err(Error::HypothesisRange(format!(
                    "gradient gap {gap} is not below L rho n = {}",
                    l * rho * n as f64
                )));
            }
        }
    }
    crate::conditions::margin(mode.conclusion(), oracle, space, pair, None, l)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeConditionalReport {
    pub mode: RangeMode,
    pub hypothesis: ConditionVerdict,
    pub conclusion: ConditionVerdict,
    /// Pairs whose preimage segment violated the range hypothesis.
    pub out_of_range: usize,
}

/// Certifies the hypothesis condition at `l` on the domain, then evaluates
/// the conclusion on `budget` pairs drawn from the `rho`-shrunk domain.
#[allow(clippy::too_many_arguments)]
pub fn run_range_conditional(
    oracle: &FunctionOracle,
    space: &NormedSpace,
    domain: &ConvexDomain,
    rho: f64,
    n: usize,
    l: f64,
    mode: RangeMode,
    budget: usize,
    seed: u64,
) -> Result<RangeConditionalReport> {
    let hypothesis = run_condition(oracle, space, domain, mode.hypothesis(), l, budget, seed)?;
    if !hypothesis.holds {
        return Err(Error::HypothesisNotCertified {
            condition: hypothesis.condition,
            l,
            worst_margin: hypothesis.worst_margin,
        });
    }
    let pairs = domain.sample_pairs(rho, budget, seed)?;
    let mut worst: Option<(f64, Witness)> = None;
    let mut out_of_range = 0;
    let mut evaluations = 0;
    for p in &pairs {
        match check_range_conditional(oracle, space, domain, rho, p, n, l, mode) {
            Ok(m) => {
                evaluations += 1;
                if worst.as_ref().map_or(true, |(w, _)| m < *w) {
                    worst = Some((
                        m,
                        Witness {
                            x: p.x.clone(),
                            y: p.y.clone(),
                            lambda: None,
                        },
                    ));
                }
            }
            Err(Error::HypothesisRange(_)) => out_of_range += 1,
            Err(e) => return Err(e),
        }
    }
    let (worst_margin, witness) = worst.ok_or(Error::EmptySampleSet)?;
    Ok(RangeConditionalReport {
        mode,
        hypothesis,
        conclusion: ConditionVerdict {
            condition: mode.conclusion(),
            l,
            holds: worst_margin >= -VIOLATION_TOL,
            worst_margin,
            witness,
            evaluations,
        },
        out_of_range,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceClass {
    Hilbert,
    Banach,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EntryStatus {
    Verified,
    Violated { witness: Witness },
    NotApplicable { reason: String },
    /// Recorded without a pass/fail claim.
    Observed,
}

/// One implication `from => to`: a constant `L` for `from` gives the
/// constant `factor * L` for `to`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImplicationEntry {
    pub from: ConditionId,
    pub to: ConditionId,
    pub factor: f64,
    pub asserted: bool,
    #[serde(flatten)]
    pub status: EntryStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantOrdering {
    pub a: ConditionId,
    pub b: ConditionId,
    #[serde(rename = "L_hat_a")]
    pub l_hat_a: f64,
    #[serde(rename = "L_hat_b")]
    pub l_hat_b: f64,
    /// `L_hat_b <= factor * L_hat_a` within tolerance.
    pub relation: String,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImplicationReport {
    pub space_class: SpaceClass,
    pub whole_space: bool,
    pub degenerate: bool,
    pub estimates: Vec<ConstantEstimate>,
    pub matrix: Vec<ImplicationEntry>,
    pub constant_orderings: Vec<ConstantOrdering>,
}

impl ImplicationReport {
    /// No asserted entry was violated.
    pub fn all_verified(&self) -> bool {
        self.matrix
            .iter()
            .all(|e| !(e.asserted && matches!(e.status, EntryStatus::Violated { .. })))
    }

    pub fn estimate(&self, condition: ConditionId) -> Option<&ConstantEstimate> {
        self.estimates.iter().find(|e| e.condition == condition)
    }

    pub fn entry(&self, from: ConditionId, to: ConditionId) -> Option<&ImplicationEntry> {
        self.matrix.iter().find(|e| e.from == from && e.to == to)
    }
}

struct Relation {
    from: ConditionId,
    to: ConditionId,
    factor: f64,
    asserted: bool,
}

fn relations(hilbert: bool, whole: bool) -> Vec<Relation> {
    use ConditionId::*;
    let mut out = Vec::new();
    let mut add = |from, to, factor, asserted| {
        out.push(Relation {
            from,
            to,
            factor,
            asserted,
        })
    };
    let class = [StrongSmoothness, DescentLemma, ComonotoneUpper, LipGradient];
    for a in class {
        for b in class {
            if a != b {
                add(a, b, 1.0, true);
            }
        }
    }
    add(BregmanLower, Cocoercivity, 1.0, true);
    for c in class {
        add(Cocoercivity, c, 1.0, true);
        add(BregmanLower, c, 1.0, true);
        add(c, Cocoercivity, 1.0, hilbert || whole);
        add(c, BregmanLower, 1.0, whole);
    }
    add(Cocoercivity, BregmanLower, 1.0, whole);

    add(LipGradient, OneSidedLip, 1.0, true);
    add(OneSidedLip, TaylorRemainder, 1.0, true);
    add(LipGradient, TaylorRemainder, 1.0, true);
    if hilbert {
        add(OneSidedLip, LipGradient, 1.0, true);
        add(TaylorRemainder, OneSidedLip, 1.0, true);
        add(TaylorRemainder, LipGradient, 1.0, true);
        add(LipGradient, AuxConvexity, 1.0, true);
        add(AuxConvexity, LipGradient, 1.0, true);
        add(Cocoercivity, AuxConvexity, 1.0, true);
        add(AuxConvexity, Cocoercivity, 1.0, true);
    } else {
        add(TaylorRemainder, LipGradient, 2.0, true);
        add(OneSidedLip, LipGradient, 2.0, true);
        add(LipGradient, AuxConvexity, 1.0, false);
    }
    add(Cocoercivity, NonexpansiveTransform, 1.0, true);
    add(NonexpansiveTransform, Cocoercivity, 1.0, true);
    out
}

fn ordering_holds(l_from: f64, l_to: f64, factor: f64) -> bool {
    if l_from.is_infinite() {
        return true;
    }
    l_to <= factor * l_from * (1.0 + IMPLICATION_REL_TOL) + IMPLICATION_ABS_TOL
}

/// Estimates every applicable constant and checks the orderings implied by
/// the implications between the conditions.
pub fn verify_implication_matrix(
    oracle: &FunctionOracle,
    space: &NormedSpace,
    domain: &ConvexDomain,
    budget: usize,
    seed: u64,
) -> Result<ImplicationReport> {
    check_dim(space.dim(), domain.dim())?;
    if let Some(n) = oracle.fixed_dim() {
        check_dim(space.dim(), n)?;
    }
    let mut estimates = Vec::new();
    let mut missing: Vec<(ConditionId, String)> = Vec::new();
    for c in ConditionId::ALL {
        match estimate_constant(oracle, space, domain, c, budget, seed) {
            Ok(e) => estimates.push(e),
            Err(Error::Inapplicable { reason, .. }) => missing.push((c, reason)),
            Err(e) => return Err(e),
        }
    }
    let find = |c: ConditionId| estimates.iter().find(|e| e.condition == c);
    let degenerate = oracle.is_degenerate();
    let hilbert = space.is_hilbert();
    let whole = domain.is_whole_space();
    let mut matrix = Vec::new();
    let mut constant_orderings = Vec::new();
    for r in relations(hilbert, whole) {
        let status = match (find(r.from), find(r.to)) {
            (Some(a), Some(b)) => {
                let ok = ordering_holds(a.l_hat, b.l_hat, r.factor);
                constant_orderings.push(ConstantOrdering {
                    a: r.from,
                    b: r.to,
                    l_hat_a: a.l_hat,
                    l_hat_b: b.l_hat,
                    relation: if r.factor == 1.0 {
                        "le".into()
                    } else {
                        format!("le_{}x", r.factor)
                    },
                    consistent: ok,
                });
                if degenerate {
                    EntryStatus::NotApplicable {
                        reason: "degenerate oracle".into(),
                    }
                } else if !r.asserted {
                    EntryStatus::Observed
                } else if ok {
                    EntryStatus::Verified
                } else {
                    EntryStatus::Violated {
                        witness: b.witness.clone(),
                    }
                }
            }
            _ => {
                let reason = missing
                    .iter()
                    .find(|(c, _)| *c == r.from || *c == r.to)
                    .map(|(_, s)| s.clone())
                    .unwrap_or_else(|| "not estimated".into());
                EntryStatus::NotApplicable { reason }
            }
        };
        matrix.push(ImplicationEntry {
            from: r.from,
            to: r.to,
            factor: r.factor,
            asserted: r.asserted,
            status,
        });
    }
    Ok(ImplicationReport {
        space_class: if hilbert { SpaceClass::Hilbert } else { SpaceClass::Banach },
        whole_space: whole,
        degenerate,
        estimates,
        matrix,
        constant_orderings,
    })
}
