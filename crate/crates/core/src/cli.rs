//! Command-line front end.
//!
//! Exit codes: 0 when everything holds, 1 for a violation or failed
//! expectation, 2 for usage and configuration errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::conditions::{run_condition, ConditionId};
use crate::domains::{ConvexDomain, DomainDescriptor};
use crate::error::{Error, Result};
use crate::estimation::{estimate_constant, verify_implication_matrix};
use crate::gallery::{run_scenario_with, DEFAULT_BUDGET, DEFAULT_SEED, SCENARIOS};
use crate::oracles::{FunctionOracle, OracleDescriptor, OracleParams};
use crate::report::{to_json, Format, GalleryReport, MatrixSection, RunReport, Skipped};
use crate::spaces::{NormedSpace, SpaceDescriptor};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDING: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const DEFAULT_DIM: usize = 2;

fn default_budget() -> usize {
    DEFAULT_BUDGET
}

/// Everything a run needs; loadable from a JSON file via `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub oracle: OracleDescriptor,
    pub space: SpaceDescriptor,
    #[serde(default)]
    pub domain: DomainDescriptor,
    /// Empty means every condition.
    #[serde(default)]
    pub conditions: Vec<ConditionId>,
    #[serde(rename = "L", default)]
    pub l_values: Vec<f64>,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    fn build(&self) -> Result<(FunctionOracle, NormedSpace, ConvexDomain)> {
        let oracle = self.oracle.build()?;
        let space = self.space.build()?;
        let domain = self.domain.build(space.clone())?;
        if self.budget == 0 {
            return Err(Error::Config("budget must be positive".into()));
        }
        Ok((oracle, space, domain))
    }

    fn condition_list(&self) -> (Vec<ConditionId>, bool) {
        if self.conditions.is_empty() {
            (ConditionId::ALL.to_vec(), true)
        } else {
            (self.conditions.clone(), false)
        }
    }

    fn empty_report(&self, command: &str) -> RunReport {
        RunReport {
            command: command.into(),
            oracle: self.oracle.clone(),
            space: self.space.clone(),
            domain: self.domain.clone(),
            estimates: Vec::new(),
            verdicts: Vec::new(),
            skipped: Vec::new(),
            matrix: None,
            seed: self.seed,
            budget: self.budget,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "lipcheck", version, about = "Sampling checks of gradient smoothness conditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check each condition at each L on sampled pairs
    Check(RunArgs),
    /// Estimate the best constant of each condition
    Estimate(RunArgs),
    /// Estimate all constants and verify the implications between them
    Matrix(RunArgs),
    /// Run the registered counterexample scenarios
    Gallery(GalleryArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// JSON run configuration; flags given alongside override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Oracle name, `quadratic:a11,a12;a21,a22`, `linear:c1,c2`, or JSON
    #[arg(long)]
    oracle: Option<String>,
    /// euclidean | linf | l1 | lp:<p> | weighted:<w1,w2,..> | JSON
    #[arg(long)]
    space: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    /// all | ball:<r> | box:<lo>,<hi> | JSON
    #[arg(long)]
    domain: Option<String>,
    /// Condition tag, repeatable; `all` selects every condition
    #[arg(long = "condition")]
    conditions: Vec<String>,
    /// Constant(s) to check, repeatable or comma separated
    #[arg(long = "L", value_delimiter = ',', allow_negative_numbers = true)]
    l_values: Vec<f64>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct GalleryArgs {
    /// Scenario names; all registered scenarios when omitted
    names: Vec<String>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn numbers(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("`{t}` is not a number")))
        })
        .collect()
}

fn parse_json<T: for<'de> Deserialize<'de>>(what: &str, s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Config(format!("{what}: {e}")))
}

pub fn parse_oracle(s: &str) -> Result<OracleDescriptor> {
    if s.trim_start().starts_with('{') {
        return parse_json("oracle", s);
    }
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let params = match name {
        "quadratic" => OracleParams {
            a: Some(rest.split(';').map(numbers).collect::<Result<_>>()?),
            c: None,
        },
        "linear" => OracleParams {
            a: None,
            c: Some(numbers(rest)?),
        },
        _ if rest.is_empty() => OracleParams::default(),
        _ => return Err(Error::Config(format!("oracle `{name}` takes no parameters"))),
    };
    Ok(OracleDescriptor {
        name: name.into(),
        params,
    })
}

pub fn parse_space(s: &str, dim: usize) -> Result<SpaceDescriptor> {
    if s.trim_start().starts_with('{') {
        return parse_json("space", s);
    }
    let (norm, rest) = s.split_once(':').unwrap_or((s, ""));
    let mut d = SpaceDescriptor {
        dim,
        norm: norm.into(),
        weights: None,
        p: None,
    };
    match norm {
        "lp" => d.p = Some(numbers(rest)?[0]),
        "weighted" => {
            let w = numbers(rest)?;
            d.dim = w.len();
            d.weights = Some(w);
        }
        _ if !rest.is_empty() => return Err(Error::Config(format!("space `{norm}` takes no parameters"))),
        _ => {}
    }
    Ok(d)
}

pub fn parse_domain(s: &str, dim: usize) -> Result<DomainDescriptor> {
    if s.trim_start().starts_with('{') {
        return parse_json("domain", s);
    }
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    match kind {
        "all" | "whole" => Ok(DomainDescriptor::All),
        "ball" => Ok(DomainDescriptor::Ball {
            center: None,
            radius: numbers(rest)?[0],
        }),
        "box" => {
            let v = numbers(rest)?;
            if v.len() != 2 {
                return Err(Error::Config("box shorthand is box:<lo>,<hi>".into()));
            }
            Ok(DomainDescriptor::Box {
                lower: vec![v[0]; dim],
                upper: vec![v[1]; dim],
            })
        }
        other => Err(Error::Config(format!("unknown domain `{other}`"))),
    }
}

fn parse_conditions(items: &[String]) -> Result<Vec<ConditionId>> {
    if items.iter().any(|s| s == "all") {
        return Ok(Vec::new());
    }
    items.iter().map(|s| s.parse()).collect()
}

fn resolve(args: RunArgs) -> Result<RunConfig> {
    let base = args.config.as_deref().map(RunConfig::load).transpose()?;
    let oracle = match (&args.oracle, &base) {
        (Some(s), _) => parse_oracle(s)?,
        (None, Some(b)) => b.oracle.clone(),
        (None, None) => return Err(Error::Config("--oracle is required".into())),
    };
    let dim = args
        .dim
        .or_else(|| oracle.build().ok().and_then(|o| o.fixed_dim()))
        .or(base.as_ref().map(|b| b.space.dim))
        .unwrap_or(DEFAULT_DIM);
    let space = match (&args.space, &base) {
        (Some(s), _) => parse_space(s, dim)?,
        (None, Some(b)) => b.space.clone(),
        (None, None) => parse_space("euclidean", dim)?,
    };
    let domain = match (&args.domain, &base) {
        (Some(s), _) => parse_domain(s, space.dim)?,
        (None, Some(b)) => b.domain.clone(),
        (None, None) => DomainDescriptor::All,
    };
    let conditions = if args.conditions.is_empty() {
        base.as_ref().map(|b| b.conditions.clone()).unwrap_or_default()
    } else {
        parse_conditions(&args.conditions)?
    };
    let l_values = if args.l_values.is_empty() {
        base.as_ref().map(|b| b.l_values.clone()).unwrap_or_default()
    } else {
        args.l_values
    };
    Ok(RunConfig {
        oracle,
        space,
        domain,
        conditions,
        l_values,
        budget: args.budget.or(base.as_ref().map(|b| b.budget)).unwrap_or(DEFAULT_BUDGET),
        seed: args.seed.or(base.as_ref().map(|b| b.seed)).unwrap_or(DEFAULT_SEED),
        output: args.out.or(base.as_ref().and_then(|b| b.output.clone())),
        format: args.format.or(base.as_ref().map(|b| b.format)).unwrap_or_default(),
    })
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Error::Config(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Config(format!("stdout: {e}"))),
    }
}

fn render(report: &RunReport, format: Format) -> String {
    match format {
        Format::Json => to_json(report),
        Format::Csv => report.to_csv(),
    }
}

fn finish(result: Result<(RunReport, bool)>, config: &RunConfig) -> i32 {
    match result.and_then(|(report, ok)| {
        emit(&render(&report, config.format), config.output.as_deref())?;
        Ok(ok)
    }) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FINDING,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

/// Runs every requested condition at every `L`.
pub fn check_report(config: &RunConfig) -> Result<(RunReport, bool)> {
    let (oracle, space, domain) = config.build()?;
    if config.l_values.is_empty() {
        return Err(Error::Config("check needs at least one --L value".into()));
    }
    let (conditions, implicit) = config.condition_list();
    let mut report = config.empty_report("check");
    for c in conditions {
        for &l in &config.l_values {
            match run_condition(&oracle, &space, &domain, c, l, config.budget, config.seed) {
                Ok(v) => report.verdicts.push(v),
                Err(Error::Inapplicable { reason, .. }) if implicit => {
                    report.skipped.push(Skipped { condition: c, reason });
                    break;
                }
                Err(Error::InvalidParameter(reason)) if implicit && c.requires_positive_l() && l == 0.0 => {
                    report.skipped.push(Skipped { condition: c, reason });
                }
                Err(e) => return Err(e),
            }
        }
    }
    let ok = report.verdicts.iter().all(|v| v.holds);
    Ok((report, ok))
}

pub fn estimate_report(config: &RunConfig) -> Result<(RunReport, bool)> {
    let (oracle, space, domain) = config.build()?;
    let (conditions, implicit) = config.condition_list();
    let mut report = config.empty_report("estimate");
    for c in conditions {
        match estimate_constant(&oracle, &space, &domain, c, config.budget, config.seed) {
            Ok(e) => report.estimates.push(e),
            Err(Error::Inapplicable { reason, .. }) if implicit => {
                report.skipped.push(Skipped { condition: c, reason })
            }
            Err(e) => return Err(e),
        }
    }
    Ok((report, true))
}

pub fn matrix_report(config: &RunConfig) -> Result<(RunReport, bool)> {
    let (oracle, space, domain) = config.build()?;
    let rep = verify_implication_matrix(&oracle, &space, &domain, config.budget, config.seed)?;
    let ok = rep.all_verified();
    let mut report = config.empty_report("matrix");
    report.estimates = rep.estimates.clone();
    report.matrix = Some(MatrixSection::from(rep));
    Ok((report, ok))
}

pub fn cmd_check(config: &RunConfig) -> i32 {
    finish(check_report(config), config)
}

pub fn cmd_estimate(config: &RunConfig) -> i32 {
    finish(estimate_report(config), config)
}

pub fn cmd_matrix(config: &RunConfig) -> i32 {
    finish(matrix_report(config), config)
}

pub fn gallery_report(names: &[String], budget: usize, seed: u64) -> Result<GalleryReport> {
    let names: Vec<String> = if names.is_empty() {
        SCENARIOS.iter().map(|s| s.to_string()).collect()
    } else {
        names.to_vec()
    };
    let scenarios = names
        .iter()
        .map(|n| run_scenario_with(n, budget, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(GalleryReport {
        passed: scenarios.iter().all(|s| s.passed),
        scenarios,
    })
}

pub fn cmd_gallery(names: &[String], budget: usize, seed: u64, format: Format, output: Option<&Path>) -> i32 {
    let result = gallery_report(names, budget, seed).and_then(|r| {
        let text = match format {
            Format::Json => to_json(&r),
            Format::Csv => r.to_csv(),
        };
        emit(&text, output)?;
        Ok(r.passed)
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FINDING,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let run_with = |args: RunArgs, f: fn(&RunConfig) -> i32| match resolve(args) {
        Ok(config) => f(&config),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    };
    match cli.command {
        Command::Check(a) => run_with(a, cmd_check),
        Command::Estimate(a) => run_with(a, cmd_estimate),
        Command::Matrix(a) => run_with(a, cmd_matrix),
        Command::Gallery(g) => cmd_gallery(
            &g.names,
            g.budget.unwrap_or(DEFAULT_BUDGET),
            g.seed.unwrap_or(DEFAULT_SEED),
            g.format.unwrap_or_default(),
            g.out.as_deref(),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthands() {
        let o = parse_oracle("quadratic:1,0;0,3").unwrap();
        assert_eq!(o.params.a, Some(vec![vec![1.0, 0.0], vec![0.0, 3.0]]));
        let o = parse_oracle(r#"{"name":"linear","params":{"c":[1,2]}}"#).unwrap();
        assert_eq!(o.params.c, Some(vec![1.0, 2.0]));
        assert!(parse_oracle("half_sq_norm:3").is_err());
        let s = parse_space("lp:3", 4).unwrap();
        assert_eq!((s.dim, s.p), (4, Some(3.0)));
        let s = parse_space("weighted:1,2,3", 2).unwrap();
        assert_eq!(s.dim, 3);
        let d = parse_domain("box:-1,2", 2).unwrap();
        assert_eq!(
            d,
            DomainDescriptor::Box {
                lower: vec![-1.0, -1.0],
                upper: vec![2.0, 2.0]
            }
        );
        assert!(parse_domain("blob", 2).is_err());
        assert_eq!(parse_conditions(&["all".into()]).unwrap(), vec![]);
        assert!(parse_conditions(&["nope".into()]).is_err());
    }

    #[test]
    fn config_round_trips() {
        let c = RunConfig {
            oracle: parse_oracle("quadratic:1,0;0,3").unwrap(),
            space: parse_space("euclidean", 2).unwrap(),
            domain: DomainDescriptor::Ball {
                center: None,
                radius: 2.0,
            },
            conditions: vec![ConditionId::LipGradient, ConditionId::AuxConvexity],
            l_values: vec![1.0, 3.0],
            budget: 123,
            seed: 9,
            output: Some("out.json".into()),
            format: Format::Csv,
        };
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"L\":[1.0,3.0]"));
        assert_eq!(serde_json::from_str::<RunConfig>(&s).unwrap(), c);
    }

    #[test]
    fn check_needs_l() {
        let c = RunConfig {
            oracle: OracleDescriptor::named("half_sq_norm"),
            space: parse_space("euclidean", 2).unwrap(),
            domain: DomainDescriptor::All,
            conditions: vec![],
            l_values: vec![],
            budget: 10,
            seed: 0,
            output: None,
            format: Format::Json,
        };
        assert!(matches!(check_report(&c), Err(Error::Config(_))));
    }
}
