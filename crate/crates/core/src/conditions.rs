//! Pointwise margins of the smoothness and cocoercivity inequalities.
//!
//! Every checker returns a signed margin: the slack of the inequality at the
//! given pair (and interpolation weight `lambda` where one is involved).
//! Nonnegative margin means the inequality holds there. With
//! `dx = y - x`, `dg = f'(y) - f'(x)` and `||.||_*` the dual norm:
//!
//! | tag                      | margin                                                         |
//! |--------------------------|----------------------------------------------------------------|
//! | `lip_gradient`           | `L ||dx|| - ||dg||_*`                                          |
//! | `one_sided_lip`          | `L ||dx||^2 - |<dg, dx>|`                                      |
//! | `taylor_remainder`       | `L/2 ||dx||^2 - |f(y) - f(x) - <f'(x), dx>|`                   |
//! | `strong_smoothness`      | `f(m) + L/2 lambda (1-lambda) ||dx||^2 - lambda f(x) - (1-lambda) f(y)` |
//! | `descent_lemma`          | `f(x) + <f'(x), dx> + L/2 ||dx||^2 - f(y)`                     |
//! | `comonotone_upper`       | `L ||dx||^2 - <dg, dx>`                                        |
//! | `cocoercivity`           | `<dg, dx> - ||dg||_*^2 / L`                                    |
//! | `bregman_lower`          | `f(y) - f(x) - <f'(x), dx> - ||dg||_*^2 / 2L`                  |
//! | `nonexpansive_transform` | `||dx|| - ||2 dg / L - R dx||_*`                               |
//! | `aux_convexity`          | `lambda h(x) + (1-lambda) h(y) - h(m)`, `h = L/2 ||.||^2 - f`  |
//!
//! where `m = lambda x + (1 - lambda) y`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domains::{ConvexDomain, SamplePair};
use crate::error::{check_dim, Error, Result};
use crate::oracles::FunctionOracle;
use crate::spaces::{dot, NormedSpace};

/// Margins at or above `-VIOLATION_TOL` count as satisfied.
pub const VIOLATION_TOL: f64 = 1e-9;

/// Fixed part of the interpolation-weight grid.
pub const LAMBDA_GRID: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];
/// Number of seeded random weights appended to [`LAMBDA_GRID`].
pub const RANDOM_LAMBDAS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConditionId {
    #[serde(rename = "lip_gradient")]
    LipGradient,
    #[serde(rename = "one_sided_lip")]
    OneSidedLip,
    #[serde(rename = "taylor_remainder")]
    TaylorRemainder,
    #[serde(rename = "strong_smoothness")]
    StrongSmoothness,
    #[serde(rename = "descent_lemma")]
    DescentLemma,
    #[serde(rename = "comonotone_upper")]
    ComonotoneUpper,
    #[serde(rename = "cocoercivity")]
    Cocoercivity,
    #[serde(rename = "bregman_lower")]
    BregmanLower,
    #[serde(rename = "nonexpansive_transform")]
    NonexpansiveTransform,
    #[serde(rename = "aux_convexity")]
    AuxConvexity,
}

impl ConditionId {
    pub const ALL: [ConditionId; 10] = [
        ConditionId::LipGradient,
        ConditionId::OneSidedLip,
        ConditionId::TaylorRemainder,
        ConditionId::StrongSmoothness,
        ConditionId::DescentLemma,
        ConditionId::ComonotoneUpper,
        ConditionId::Cocoercivity,
        ConditionId::BregmanLower,
        ConditionId::NonexpansiveTransform,
        ConditionId::AuxConvexity,
    ];

    /// The six subgradient-graph conditions, in the order strong smoothness,
    /// descent lemma, comonotone upper bound, Lipschitz gradient,
    /// cocoercivity, Bregman lower bound.
    pub const SMOOTHNESS_SIX: [ConditionId; 6] = [
        ConditionId::StrongSmoothness,
        ConditionId::DescentLemma,
        ConditionId::ComonotoneUpper,
        ConditionId::LipGradient,
        ConditionId::Cocoercivity,
        ConditionId::BregmanLower,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConditionId::LipGradient => "lip_gradient",
            ConditionId::OneSidedLip => "one_sided_lip",
            ConditionId::TaylorRemainder => "taylor_remainder",
            ConditionId::StrongSmoothness => "strong_smoothness",
            ConditionId::DescentLemma => "descent_lemma",
            ConditionId::ComonotoneUpper => "comonotone_upper",
            ConditionId::Cocoercivity => "cocoercivity",
            ConditionId::BregmanLower => "bregman_lower",
            ConditionId::NonexpansiveTransform => "nonexpansive_transform",
            ConditionId::AuxConvexity => "aux_convexity",
        }
    }

    /// Whether the inequality involves an interpolation weight.
    pub fn uses_lambda(self) -> bool {
        matches!(self, ConditionId::StrongSmoothness | ConditionId::AuxConvexity)
    }

    pub fn needs_gradient(self) -> bool {
        !self.uses_lambda()
    }

    /// Conditions stated only for `L > 0`.
    pub fn requires_positive_l(self) -> bool {
        matches!(
            self,
            ConditionId::Cocoercivity | ConditionId::BregmanLower | ConditionId::NonexpansiveTransform
        )
    }

    /// Conditions whose margin is unchanged when `x` and `y` are swapped.
    pub fn is_symmetric(self) -> bool {
        matches!(
            self,
            ConditionId::LipGradient
                | ConditionId::OneSidedLip
                | ConditionId::ComonotoneUpper
                | ConditionId::Cocoercivity
                | ConditionId::NonexpansiveTransform
        )
    }

    /// Checks that the condition can be evaluated for this oracle and space.
    pub fn applicability(self, oracle: &FunctionOracle, space: &NormedSpace) -> Result<()> {
        if self.needs_gradient() && !oracle.has_gradient() {
            return Err(Error::Inapplicable {
                condition: self,
                reason: format!("oracle `{}` has no gradient", oracle.name()),
            });
        }
        if self == ConditionId::NonexpansiveTransform && !space.is_hilbert() {
            return Err(Error::Inapplicable {
                condition: self,
                reason: format!("Riesz map undefined for {} norm", space.label()),
            });
        }
        if let Some(n) = oracle.fixed_dim() {
            check_dim(space.dim(), n)?;
        }
        Ok(())
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConditionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConditionId::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::UnknownCondition(s.into()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub condition: ConditionId,
    #[serde(rename = "L")]
    pub l: f64,
    pub holds: bool,
    pub worst_margin: f64,
    pub witness: Witness,
    pub evaluations: usize,
}

fn check_l(condition: ConditionId, l: f64) -> Result<()> {
    if !(l.is_finite() && l >= 0.0) {
        return Err(Error::InvalidParameter(format!("L = {l} must be finite and nonnegative")));
    }
    if condition.requires_positive_l() && l == 0.0 {
        return Err(Error::InvalidParameter(format!("{condition} requires L > 0")));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("lambda = {lambda} must lie in (0, 1)")))
    }
}

fn diff(y: &[f64], x: &[f64]) -> Vec<f64> {
    y.iter().zip(x).map(|(a, b)| a - b).collect()
}

fn interpolate(x: &[f64], y: &[f64], lambda: f64) -> Vec<f64> {
    x.iter()
        .zip(y)
        .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
        .collect()
}

/// Shared first-order quantities at an ordered pair.
pub(crate) struct PairTerms {
    pub dx_norm: f64,
    pub dg_dual: f64,
    /// `<dg, dx>`
    pub dg_dx: f64,
    /// `f(y) - f(x) - <f'(x), dx>`
    pub bregman: f64,
}

pub(crate) fn pair_terms(oracle: &FunctionOracle, space: &NormedSpace, x: &[f64], y: &[f64]) -> Result<PairTerms> {
    check_dim(space.dim(), x.len())?;
    check_dim(space.dim(), y.len())?;
    let gx = oracle.gradient(x)?;
    let gy = oracle.gradient(y)?;
    let dx = diff(y, x);
    let dg = gy.sub(&gx);
    Ok(PairTerms {
        dx_norm: space.norm_unchecked(&dx),
        dg_dual: space.dual_norm_unchecked(dg.as_slice()),
        dg_dx: dot(dg.as_slice(), &dx),
        bregman: oracle.value(y)? - oracle.value(x)? - dot(gx.as_slice(), &dx),
    })
}

pub fn check_lip_gradient(oracle: &FunctionOracle, space: &NormedSpace, pair: &SamplePair, l: f64) -> Result<f64> {
    margin(ConditionId::LipGradient, oracle, space, pair, None, l)
}

pub fn check_one_sided(oracle: &FunctionOracle, space: &NormedSpace, pair: &SamplePair, l: f64) -> Result<f64> {
    margin(ConditionId::OneSidedLip, oracle, space, pair, None, l)
}

pub fn check_taylor(oracle: &FunctionOracle, space: &NormedSpace, pair: &SamplePair, l: f64) -> Result<f64> {
    margin(ConditionId::TaylorRemainder, oracle, space, pair, None, l)
}

pub fn check_strong_smoothness(
    oracle: &FunctionOracle,
    space: &NormedSpace,
    pair: &SamplePair,
    lambda: f64,
    l: f64,
) -> Result<f64> {
    margin(ConditionId::StrongSmoothness, oracle, space, pair, Some(lambda), l)
}

pub fn check_descent(oracle: &FunctionOracle, space: &NormedSpace, pair: &SamplePair, l: f64) -> Result<f64> {
    margin(ConditionId::DescentLemma, oracle, space, pair, None, l)
}

pub fn check_comonotone_upper(oracle: &FunctionOracle, space: &NormedSpace, pair: &SamplePair, l: f64) -> Result<f64> {
    margin(ConditionId::ComonotoneUpper, oracle, space, pair, None, l)
}

pub fn check_cocoercivity(oracle: &FunctionOracle, space: &NormedSpace, pair: &SamplePair, l: f64) -> Result<f64> {
    margin(ConditionId::Cocoercivity, oracle, space, pair, None, l)
}

pub fn check_bregman_lower(oracle: &FunctionOracle, space: &NormedSpace, pair: &SamplePair, l: f64) -> Result<f64> {
    margin(ConditionId::BregmanLower, oracle, space, pair, None, l)
}

pub fn check_nonexpansive_transform(
    oracle: &FunctionOracle,
    space: &NormedSpace,
    pair: &SamplePair,
    l: f64,
) -> Result<f64> {
    margin(ConditionId::NonexpansiveTransform, oracle, space, pair, None, l)
}

pub fn check_convexity_of_auxiliary(
    oracle: &FunctionOracle,
    space: &NormedSpace,
    pair: &SamplePair,
    lambda: f64,
    l: f64,
) -> Result<f64> {
    margin(ConditionId::AuxConvexity, oracle, space, pair, Some(lambda), l)
}

/// Margin of `condition` at `pair` (and `lambda` for the interpolating
/// conditions) with constant `l`.
pub fn margin(
    condition: ConditionId,
    oracle: &FunctionOracle,
    space: &NormedSpace,
    pair: &SamplePair,
    lambda: Option<f64>,
    l: f64,
) -> Result<f64> {
    condition.applicability(oracle, space)?;
    check_l(condition, l)?;
    let (x, y) = (pair.x.as_slice(), pair.y.as_slice());
    if condition.uses_lambda() {
        let lambda = lambda.ok_or_else(|| {
            Error::InvalidParameter(format!("{condition} needs an interpolation weight"))
        })?;
        check_lambda(lambda)?;
        check_dim(space.dim(), x.len())?;
        check_dim(space.dim(), y.len())?;
        let m = interpolate(x, y, lambda);
        let (fx, fy, fm) = (oracle.value(x)?, oracle.value(y)?, oracle.value(&m)?);
        let weights = lambda * (1.0 - lambda);
        return Ok(match condition {
            ConditionId::StrongSmoothness => {
                let nd = space.norm_unchecked(&diff(y, x));
                fm + 0.5 * l * weights * nd * nd - (lambda * fx + (1.0 - lambda) * fy)
            }
            _ => {
                let sq = |v: &[f64]| {
                    let n = space.norm_unchecked(v);
                    0.5 * l * n * n
                };
                let h = |v: &[f64], fv: f64| sq(v) - fv;
                lambda * h(x, fx) + (1.0 - lambda) * h(y, fy) - h(&m, fm)
            }
        });
    }
    if condition == ConditionId::NonexpansiveTransform {
        let gx = oracle.gradient(x)?;
        let gy = oracle.gradient(y)?;
        let dg = gy.sub(&gx);
        let rdx = space.riesz(y)?.sub(&space.riesz(x)?);
        let s = 2.0 / l;
        let t: Vec<f64> = dg.0.iter().zip(&rdx.0).map(|(g, r)| g * s - r).collect();
        return Ok(space.norm_unchecked(&diff(y, x)) - space.dual_norm_unchecked(&t));
    }
    let t = pair_terms(oracle, space, x, y)?;
    let sq = t.dx_norm * t.dx_norm;
    Ok(match condition {
        ConditionId::LipGradient => l * t.dx_norm - t.dg_dual,
        ConditionId::OneSidedLip => l * sq - t.dg_dx.abs(),
        ConditionId::TaylorRemainder => 0.5 * l * sq - t.bregman.abs(),
        ConditionId::DescentLemma => 0.5 * l * sq - t.bregman,
        ConditionId::ComonotoneUpper => l * sq - t.dg_dx,
        ConditionId::Cocoercivity => t.dg_dx - t.dg_dual * t.dg_dual / l,
        ConditionId::BregmanLower => t.bregman - t.dg_dual * t.dg_dual / (2.0 * l),
        _ => unreachable!("handled above"),
    })
}

/// The interpolation weights used for `seed`: the fixed grid followed by
/// [`RANDOM_LAMBDAS`] seeded draws from `(0, 1)`.
pub fn lambda_grid(seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6c61_6d62_6461);
    let mut grid = LAMBDA_GRID.to_vec();
    while grid.len() < LAMBDA_GRID.len() + RANDOM_LAMBDAS {
        let v: f64 = rng.gen();
        if v > 0.0 && v < 1.0 {
            grid.push(v);
        }
    }
    grid
}

/// Aggregates the pointwise margin over the given pairs (and weights, for
/// interpolating conditions). Ties in the worst margin go to the earliest
/// evaluation.
pub fn run_condition_on_pairs(
    oracle: &FunctionOracle,
    space: &NormedSpace,
    condition: ConditionId,
    l: f64,
    pairs: &[SamplePair],
    lambdas: &[f64],
) -> Result<ConditionVerdict> {
    condition.applicability(oracle, space)?;
    check_l(condition, l)?;
    if pairs.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let weights: Vec<Option<f64>> = if condition.uses_lambda() {
        if lambdas.is_empty() {
            return Err(Error::InvalidParameter("empty lambda grid".into()));
        }
        lambdas.iter().map(|&v| Some(v)).collect()
    } else {
        vec![None]
    };
    let mut worst = f64::INFINITY;
    let mut witness = None;
    let mut evaluations = 0;
    for p in pairs {
        for &lambda in &weights {
            let m = margin(condition, oracle, space, p, lambda, l)?;
            evaluations += 1;
            if m < worst || witness.is_none() {
                worst = m;
                witness = Some(Witness {
                    x: p.x.clone(),
                    y: p.y.clone(),
                    lambda,
                });
            }
        }
    }
    Ok(ConditionVerdict {
        condition,
        l,
        holds: worst >= -VIOLATION_TOL,
        worst_margin: worst,
        witness: witness.expect("at least one evaluation"),
        evaluations,
    })
}

/// Samples `budget` pairs from `domain` and checks `condition` at `l` on all
/// of them.
pub fn run_condition(
    oracle: &FunctionOracle,
    space: &NormedSpace,
    domain: &ConvexDomain,
    condition: ConditionId,
    l: f64,
    budget: usize,
    seed: u64,
) -> Result<ConditionVerdict> {
    condition.applicability(oracle, space)?;
    check_l(condition, l)?;
    let pairs = domain.sample_pairs(0.0, budget, seed)?;
    run_condition_on_pairs(oracle, space, condition, l, &pairs, &lambda_grid(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(x: &[f64], y: &[f64]) -> SamplePair {
        SamplePair::new(x.to_vec(), y.to_vec())
    }

    fn diag13() -> FunctionOracle {
        FunctionOracle::quadratic(vec![vec![1.0, 0.0], vec![0.0, 3.0]]).unwrap()
    }

    fn e2() -> NormedSpace {
        NormedSpace::euclidean(2).unwrap()
    }

    fn linf2() -> NormedSpace {
        NormedSpace::linf(2).unwrap()
    }

    #[test]
    fn tags_roundtrip() {
        for c in ConditionId::ALL {
            assert_eq!(c.as_str().parse::<ConditionId>().unwrap(), c);
            assert_eq!(serde_json::to_string(&c).unwrap(), format!("\"{}\"", c.as_str()));
        }
        assert!("convexity_of_Lnormsq_minus_f".parse::<ConditionId>().is_err());
    }

    #[test]
    fn lip_gradient_examples() {
        let h = FunctionOracle::named("half_sq_norm").unwrap();
        assert_eq!(check_lip_gradient(&h, &linf2(), &pair(&[0.0, 0.0], &[1.0, 1.0]), 2.0).unwrap(), 0.0);
        let s = FunctionOracle::named("saddle_half_diff").unwrap();
        assert_eq!(check_lip_gradient(&s, &linf2(), &pair(&[0.0, 0.0], &[1.0, -1.0]), 1.0).unwrap(), -1.0);
        assert_eq!(check_lip_gradient(&s, &linf2(), &pair(&[0.4, 2.0], &[0.4, 2.0]), 7.0).unwrap(), 0.0);
    }

    #[test]
    fn one_sided_examples() {
        let s = FunctionOracle::named("saddle_half_diff").unwrap();
        let pairs = ConvexDomain::whole_space(linf2()).sample_pairs(0.0, 500, 5).unwrap();
        for p in &pairs {
            assert!(check_one_sided(&s, &linf2(), p, 1.0).unwrap() >= -VIOLATION_TOL);
        }
        assert_eq!(check_one_sided(&s, &linf2(), &pair(&[1.0, 1.0], &[1.0, 1.0]), 1.0).unwrap(), 0.0);
        assert_eq!(check_one_sided(&diag13(), &e2(), &pair(&[0.0, 0.0], &[0.0, 1.0]), 3.0).unwrap(), 0.0);
    }

    #[test]
    fn taylor_examples() {
        assert_eq!(check_taylor(&diag13(), &e2(), &pair(&[0.0, 0.0], &[0.0, 1.0]), 3.0).unwrap(), 0.0);
        let l = FunctionOracle::linear(vec![1.0, -2.0]).unwrap();
        assert_eq!(check_taylor(&l, &e2(), &pair(&[1.0, 2.0], &[-3.0, 0.5]), 0.0).unwrap(), 0.0);
        assert_eq!(check_taylor(&diag13(), &e2(), &pair(&[1.0, 2.0], &[1.0, 2.0]), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn strong_smoothness_examples() {
        let h = FunctionOracle::named("half_sq_norm").unwrap();
        assert_eq!(
            check_strong_smoothness(&h, &e2(), &pair(&[0.0, 0.0], &[1.0, 0.0]), 0.5, 1.0).unwrap(),
            0.0
        );
        let l = FunctionOracle::linear(vec![1.0, -2.0]).unwrap();
        let m = check_strong_smoothness(&l, &e2(), &pair(&[1.0, 2.0], &[-3.0, 0.5]), 0.25, 0.0).unwrap();
        assert!(m.abs() < 1e-15);
        // x=(1,0), y=(-1,0), lambda=1/2, L=1 under linf:
        // f(m) = 0, (L/2) (1/4) ||y-x||^2 = (1/8) 4 = 1/2, lambda f(x) + (1-lambda) f(y) = 1/2
        let m = check_strong_smoothness(&h, &linf2(), &pair(&[1.0, 0.0], &[-1.0, 0.0]), 0.5, 1.0).unwrap();
        assert_eq!(m, 0.0);
        assert!(check_strong_smoothness(&h, &e2(), &pair(&[0.0, 0.0], &[1.0, 0.0]), 1.0, 1.0).is_err());
    }

    #[test]
    fn descent_examples() {
        let h = FunctionOracle::named("half_sq_norm").unwrap();
        let m = check_descent(&h, &e2(), &pair(&[0.3, -1.0], &[2.0, 0.5]), 1.0).unwrap();
        assert!(m.abs() < 1e-14);
        let l = FunctionOracle::linear(vec![1.0, -2.0]).unwrap();
        assert_eq!(check_descent(&l, &e2(), &pair(&[1.0, 2.0], &[-3.0, 0.5]), 0.0).unwrap(), 0.0);
        // f(y) = 2, f(x) = 0, <f'(x), y - x> = 0, (3/2) ||y - x||^2 = 3
        let m = check_descent(&diag13(), &e2(), &pair(&[0.0, 0.0], &[1.0, 1.0]), 3.0).unwrap();
        assert!((m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn comonotone_examples() {
        let h = FunctionOracle::named("half_sq_norm").unwrap();
        assert_eq!(check_comonotone_upper(&h, &linf2(), &pair(&[0.5, 0.5], &[0.5, 0.5]), 1.0).unwrap(), 0.0);
        assert_eq!(check_comonotone_upper(&h, &linf2(), &pair(&[0.0, 0.0], &[1.0, 1.0]), 2.0).unwrap(), 0.0);
        assert_eq!(check_comonotone_upper(&diag13(), &e2(), &pair(&[0.0, 0.0], &[1.0, 0.0]), 3.0).unwrap(), 2.0);
    }

    #[test]
    fn cocoercivity_examples() {
        let h = FunctionOracle::named("half_sq_norm").unwrap();
        let m = check_cocoercivity(&h, &e2(), &pair(&[0.3, -1.0], &[2.0, 0.5]), 1.0).unwrap();
        assert!(m.abs() < 1e-14);
        assert_eq!(check_cocoercivity(&diag13(), &e2(), &pair(&[0.0, 0.0], &[0.0, 1.0]), 3.0).unwrap(), 0.0);
        assert_eq!(check_cocoercivity(&diag13(), &e2(), &pair(&[1.0, 1.0], &[1.0, 1.0]), 3.0).unwrap(), 0.0);
        assert!(matches!(
            check_cocoercivity(&h, &e2(), &pair(&[0.0, 0.0], &[1.0, 1.0]), 0.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn bregman_examples() {
        let h = FunctionOracle::named("half_sq_norm").unwrap();
        let m = check_bregman_lower(&h, &e2(), &pair(&[0.3, -1.0], &[2.0, 0.5]), 1.0).unwrap();
        assert!(m.abs() < 1e-14);
        assert_eq!(check_bregman_lower(&h, &e2(), &pair(&[1.0, 1.0], &[1.0, 1.0]), 1.0).unwrap(), 0.0);
        // 1/2 - 1/(2*3)
        let m = check_bregman_lower(&diag13(), &e2(), &pair(&[0.0, 0.0], &[1.0, 0.0]), 3.0).unwrap();
        assert!((m - 1.0 / 3.0).abs() < 1e-15);
        assert!(check_bregman_lower(&h, &e2(), &pair(&[0.0, 0.0], &[1.0, 1.0]), 0.0).is_err());
    }

    #[test]
    fn nonexpansive_examples() {
        let h = FunctionOracle::named("half_sq_norm").unwrap();
        let m = check_nonexpansive_transform(&h, &e2(), &pair(&[0.3, -1.0], &[2.0, 0.5]), 1.0).unwrap();
        assert!(m.abs() < 1e-14);
        assert_eq!(check_nonexpansive_transform(&h, &e2(), &pair(&[1.0, 1.0], &[1.0, 1.0]), 1.0).unwrap(), 0.0);
        // 1 - |2/3 - 1|
        let m = check_nonexpansive_transform(&diag13(), &e2(), &pair(&[0.0, 0.0], &[1.0, 0.0]), 3.0).unwrap();
        assert!((m - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            check_nonexpansive_transform(&h, &linf2(), &pair(&[0.0, 0.0], &[1.0, 1.0]), 1.0),
            Err(Error::Inapplicable { .. })
        ));
    }

    #[test]
    fn aux_convexity_examples() {
        let h = FunctionOracle::named("half_sq_norm").unwrap();
        // h(1,1) = h(1,-1) = L/2 - 1 and h(1,0) = L/2 - 1/2, so the margin is -1/2 for every L
        for l in [0.5, 1.0, 2.0, 10.0] {
            let m = check_convexity_of_auxiliary(&h, &linf2(), &pair(&[1.0, 1.0], &[1.0, -1.0]), 0.5, l).unwrap();
            assert_eq!(m, -0.5);
        }
        let m = check_convexity_of_auxiliary(&h, &e2(), &pair(&[0.3, -1.0], &[2.0, 0.5]), 0.3, 1.0).unwrap();
        assert!(m.abs() < 1e-14);
        let l = FunctionOracle::linear(vec![1.0, -2.0]).unwrap();
        for lv in [0.0, 1.0, 4.0] {
            let m = check_convexity_of_auxiliary(&l, &e2(), &pair(&[1.0, 2.0], &[-3.0, 0.5]), 0.25, lv).unwrap();
            assert!(m >= -1e-14);
        }
    }

    #[test]
    fn run_condition_on_saddle_example() {
        let s = FunctionOracle::named("saddle_half_diff").unwrap();
        let dom = ConvexDomain::whole_space(linf2());
        let v = run_condition(&s, &linf2(), &dom, ConditionId::OneSidedLip, 1.0, 2000, 1).unwrap();
        assert!(v.holds);
        let v = run_condition(&s, &linf2(), &dom, ConditionId::LipGradient, 1.0, 2000, 1).unwrap();
        assert!(!v.holds);
        // the worst pair points (nearly) along (1, -1) or (1, 1) up to sign pattern of the saddle
        let d = [v.witness.y[0] - v.witness.x[0], v.witness.y[1] - v.witness.x[1]];
        assert!((d[0].abs() - d[1].abs()).abs() < 0.2 * d[0].abs().max(d[1].abs()));
        let again = margin(
            v.condition,
            &s,
            &linf2(),
            &SamplePair::new(v.witness.x.clone(), v.witness.y.clone()),
            None,
            1.0,
        )
        .unwrap();
        assert!((again - v.worst_margin).abs() <= 1e-12);
    }

    #[test]
    fn degenerate_pairs_hold_with_zero_margin() {
        let q = diag13();
        let pairs = vec![pair(&[1.0, 2.0], &[1.0, 2.0]), pair(&[-0.5, 0.0], &[-0.5, 0.0])];
        for c in ConditionId::ALL {
            let v = run_condition_on_pairs(&q, &e2(), c, 1.0, &pairs, &lambda_grid(0)).unwrap();
            assert!(v.holds, "{c}");
            assert!(v.worst_margin.abs() < 1e-15, "{c}: {}", v.worst_margin);
        }
    }

    #[test]
    fn inapplicable_is_distinct_from_violation() {
        let a = FunctionOracle::named("abs_sum").unwrap();
        let dom = ConvexDomain::whole_space(e2());
        assert!(matches!(
            run_condition(&a, &e2(), &dom, ConditionId::LipGradient, 1.0, 10, 0),
            Err(Error::Inapplicable { .. })
        ));
        let h = FunctionOracle::named("half_sq_norm").unwrap();
        let ldom = ConvexDomain::whole_space(linf2());
        assert!(matches!(
            run_condition(&h, &linf2(), &ldom, ConditionId::NonexpansiveTransform, 1.0, 10, 0),
            Err(Error::Inapplicable { .. })
        ));
    }

    #[test]
    fn lambda_grid_is_seeded() {
        let g = lambda_grid(3);
        assert_eq!(g.len(), 13);
        assert_eq!(&g[..5], &LAMBDA_GRID);
        assert_eq!(g, lambda_grid(3));
        assert_ne!(g, lambda_grid(4));
        assert!(g.iter().all(|&v| v > 0.0 && v < 1.0));
    }
}
