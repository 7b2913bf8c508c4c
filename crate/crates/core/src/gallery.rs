//! Self-checking counterexample scenarios with fixed expected outcomes.

use serde::{Deserialize, Serialize};

use crate::conditions::{margin, run_condition, ConditionId, VIOLATION_TOL};
use crate::domains::{ConvexDomain, DomainDescriptor, SamplePair};
use crate::error::{Error, Result};
use crate::estimation::estimate_constant;
use crate::oracles::{FunctionOracle, OracleDescriptor, Provenance};
use crate::spaces::{NormedSpace, SpaceDescriptor};

pub const DEFAULT_BUDGET: usize = 10_000;
pub const DEFAULT_SEED: u64 = 0;

pub const SCENARIOS: &[&str] = &["banach_lemma_failure", "banach_theorem_failure", "hilbert_sanity"];

/// Constants of the auxiliary-convexity sweep.
pub const AUX_SWEEP: [f64; 4] = [0.5, 1.0, 2.0, 10.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Check {
    /// Sampled worst margin at `L` is at least `-VIOLATION_TOL`.
    Holds { condition: ConditionId, l: f64 },
    /// Sampled worst margin at `L` is below `-VIOLATION_TOL`.
    Violated { condition: ConditionId, l: f64 },
    /// Sampled worst margin at `L` has absolute value at most `tol`.
    Tight { condition: ConditionId, l: f64, tol: f64 },
    /// Best-constant estimate lies in `[lo, hi]`.
    EstimateIn { condition: ConditionId, lo: f64, hi: f64 },
    /// Pointwise margin at a fixed triple equals `value` within `tol`.
    MarginAt {
        condition: ConditionId,
        l: f64,
        x: Vec<f64>,
        y: Vec<f64>,
        lambda: Option<f64>,
        value: f64,
        tol: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub check: Check,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: &'static str,
    pub oracle: FunctionOracle,
    pub space: NormedSpace,
    pub domain: ConvexDomain,
    pub expected: Vec<Expectation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    #[serde(flatten)]
    pub expectation: Expectation,
    pub observed: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub name: String,
    pub oracle: OracleDescriptor,
    pub space: SpaceDescriptor,
    pub domain: DomainDescriptor,
    pub budget: usize,
    pub seed: u64,
    pub outcomes: Vec<Outcome>,
    pub passed: bool,
}

/// Looks up a registered scenario.
pub fn scenario(name: &str) -> Result<Scenario> {
    use Check::*;
    use ConditionId::*;
    use Provenance::*;
    let exp = |check, provenance| Expectation { check, provenance };
    match name {
        "banach_lemma_failure" => {
            let space = NormedSpace::linf(2)?;
            Ok(Scenario {
                name: "banach_lemma_failure",
                oracle: FunctionOracle::named("saddle_half_diff")?,
                domain: ConvexDomain::whole_space(space.clone()),
                space,
                expected: vec![
                    exp(Holds { condition: OneSidedLip, l: 1.0 }, Literature),
                    exp(EstimateIn { condition: LipGradient, lo: 1.99, hi: 2.0 }, Literature),
                    exp(Violated { condition: LipGradient, l: 1.0 }, Literature),
                ],
            })
        }
        "banach_theorem_failure" => {
            let space = NormedSpace::linf(2)?;
            let mut expected = vec![exp(EstimateIn { condition: LipGradient, lo: 1.99, hi: 2.0 }, Literature)];
            for l in AUX_SWEEP {
                // h(1, +-1) = L/2 - 1 and h(1, 0) = L/2 - 1/2 under the max norm
                expected.push(exp(
                    MarginAt {
                        condition: AuxConvexity,
                        l,
                        x: vec![1.0, 1.0],
                        y: vec![1.0, -1.0],
                        lambda: Some(0.5),
                        value: -0.5,
                        tol: 1e-12,
                    },
                    ClosedForm,
                ));
                expected.push(exp(Violated { condition: AuxConvexity, l }, Literature));
            }
            Ok(Scenario {
                name: "banach_theorem_failure",
                oracle: FunctionOracle::named("half_sq_norm")?,
                domain: ConvexDomain::whole_space(space.clone()),
                space,
                expected,
            })
        }
        "hilbert_sanity" => {
            let space = NormedSpace::euclidean(2)?;
            let expected = ConditionId::ALL
                .iter()
                .map(|&condition| exp(Tight { condition, l: 1.0, tol: 1e-9 }, ClosedForm))
                .collect();
            Ok(Scenario {
                name: "hilbert_sanity",
                oracle: FunctionOracle::named("half_sq_norm")?,
                domain: ConvexDomain::whole_space(space.clone()),
                space,
                expected,
            })
        }
        other => Err(Error::UnknownScenario(other.into())),
    }
}

fn observe(s: &Scenario, check: &Check, budget: usize, seed: u64) -> Result<(f64, bool)> {
    let verdict = |c, l| run_condition(&s.oracle, &s.space, &s.domain, c, l, budget, seed);
    Ok(match check {
        Check::Holds { condition, l } => {
            let v = verdict(*condition, *l)?;
            (v.worst_margin, v.worst_margin >= -VIOLATION_TOL)
        }
        Check::Violated { condition, l } => {
            let v = verdict(*condition, *l)?;
            (v.worst_margin, v.worst_margin < -VIOLATION_TOL)
        }
        Check::Tight { condition, l, tol } => {
            let v = verdict(*condition, *l)?;
            (v.worst_margin, v.worst_margin.abs() <= *tol)
        }
        Check::EstimateIn { condition, lo, hi } => {
            let e = estimate_constant(&s.oracle, &s.space, &s.domain, *condition, budget, seed)?;
            (e.l_hat, e.l_hat >= *lo && e.l_hat <= *hi)
        }
        Check::MarginAt {
            condition,
            l,
            x,
            y,
            lambda,
            value,
            tol,
        } => {
            let pair = SamplePair::new(x.clone(), y.clone());
            let m = margin(*condition, &s.oracle, &s.space, &pair, *lambda, *l)?;
            (m, (m - value).abs() <= *tol)
        }
    })
}

pub fn run_scenario(name: &str) -> Result<ScenarioReport> {
    run_scenario_with(name, DEFAULT_BUDGET, DEFAULT_SEED)
}

pub fn run_scenario_with(name: &str, budget: usize, seed: u64) -> Result<ScenarioReport> {
    let s = scenario(name)?;
    let outcomes = s
        .expected
        .iter()
        .map(|e| {
            let (observed, passed) = observe(&s, &e.check, budget, seed)?;
            Ok(Outcome {
                expectation: e.clone(),
                observed,
                passed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScenarioReport {
        name: s.name.into(),
        oracle: s.oracle.descriptor(),
        space: SpaceDescriptor::from(&s.space),
        domain: DomainDescriptor::from(&s.domain),
        budget,
        seed,
        passed: outcomes.iter().all(|o| o.passed),
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registered_scenarios_pass() {
        for name in SCENARIOS {
            let r = run_scenario_with(name, 2000, DEFAULT_SEED).unwrap();
            for o in &r.outcomes {
                assert!(o.passed, "{name}: {:?} observed {}", o.expectation.check, o.observed);
            }
        }
    }

    #[test]
    fn unknown_scenario() {
        assert_eq!(
            run_scenario("no_such_thing").unwrap_err(),
            Error::UnknownScenario("no_such_thing".into())
        );
    }

    #[test]
    fn reports_are_reproducible() {
        let a = run_scenario_with("banach_lemma_failure", 500, 3).unwrap();
        let b = run_scenario_with("banach_lemma_failure", 500, 3).unwrap();
        assert_eq!(a, b);
    }
}
