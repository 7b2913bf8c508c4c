//! Report documents and their JSON / CSV renderings.
//!
//! Floats are written with 17 significant digits (`{:.16e}`) in both formats
//! so values round-trip exactly; non-finite values become `null` in JSON and
//! an empty cell in CSV.

use std::io;

use serde::{Deserialize, Serialize};

use crate::conditions::{ConditionId, ConditionVerdict, Witness};
use crate::domains::DomainDescriptor;
use crate::estimation::{ConstantEstimate, ConstantOrdering, ImplicationEntry, ImplicationReport, SpaceClass};
use crate::gallery::{Check, ScenarioReport};
use crate::oracles::OracleDescriptor;
use crate::spaces::SpaceDescriptor;

/// Output format of the CLI reports.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// A condition left out of a run, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub condition: ConditionId,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSection {
    pub space_class: SpaceClass,
    pub whole_space: bool,
    pub degenerate: bool,
    pub entries: Vec<ImplicationEntry>,
    pub constant_orderings: Vec<ConstantOrdering>,
}

impl From<ImplicationReport> for MatrixSection {
    fn from(r: ImplicationReport) -> Self {
        MatrixSection {
            space_class: r.space_class,
            whole_space: r.whole_space,
            degenerate: r.degenerate,
            entries: r.matrix,
            constant_orderings: r.constant_orderings,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub oracle: OracleDescriptor,
    pub space: SpaceDescriptor,
    pub domain: DomainDescriptor,
    pub estimates: Vec<ConstantEstimate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub verdicts: Vec<ConditionVerdict>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<Skipped>,
    pub matrix: Option<MatrixSection>,
    pub seed: u64,
    pub budget: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GalleryReport {
    pub scenarios: Vec<ScenarioReport>,
    pub passed: bool,
}

struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(number(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// 17 significant digits; empty for non-finite values.
pub fn number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

/// Compact JSON with full-precision floats and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision);
    value.serialize(&mut ser).expect("report types serialize infallibly");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

/// Column layout shared by every CSV report.
pub const CSV_HEADER: [&str; 10] = [
    "record", "name", "condition", "L", "value", "unbounded", "holds", "x", "y", "lambda",
];

#[derive(Default)]
struct Row {
    record: &'static str,
    name: String,
    condition: String,
    l: Option<f64>,
    value: Option<f64>,
    unbounded: Option<bool>,
    holds: Option<bool>,
    witness: Option<Witness>,
}

fn vector(v: &[f64]) -> String {
    v.iter().map(|x| number(*x)).collect::<Vec<_>>().join(" ")
}

impl Row {
    fn cells(&self) -> Vec<String> {
        let opt_num = |v: Option<f64>| v.map(number).unwrap_or_default();
        let opt_bool = |v: Option<bool>| v.map(|b| b.to_string()).unwrap_or_default();
        let (x, y, lambda) = match &self.witness {
            Some(w) => (vector(&w.x), vector(&w.y), opt_num(w.lambda)),
            None => Default::default(),
        };
        vec![
            self.record.to_string(),
            self.name.clone(),
            self.condition.clone(),
            opt_num(self.l),
            opt_num(self.value),
            opt_bool(self.unbounded),
            opt_bool(self.holds),
            x,
            y,
            lambda,
        ]
    }
}

fn write_rows(rows: &[Row]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record(r.cells()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv writes UTF-8")
}

fn estimate_row(e: &ConstantEstimate) -> Row {
    Row {
        record: "estimate",
        condition: e.condition.to_string(),
        value: Some(e.l_hat),
        unbounded: Some(e.unbounded),
        witness: Some(e.witness.clone()),
        ..Row::default()
    }
}

impl RunReport {
    pub fn to_csv(&self) -> String {
        let mut rows: Vec<Row> = self.estimates.iter().map(estimate_row).collect();
        for v in &self.verdicts {
            rows.push(Row {
                record: "verdict",
                condition: v.condition.to_string(),
                l: Some(v.l),
                value: Some(v.worst_margin),
                holds: Some(v.holds),
                witness: Some(v.witness.clone()),
                ..Row::default()
            });
        }
        for s in &self.skipped {
            rows.push(Row {
                record: "skipped",
                name: s.reason.clone(),
                condition: s.condition.to_string(),
                ..Row::default()
            });
        }
        if let Some(m) = &self.matrix {
            for e in &m.entries {
                let status = serde_json::to_value(&e.status).expect("status serializes");
                rows.push(Row {
                    record: "implication",
                    name: status["status"].as_str().unwrap_or_default().to_string(),
                    condition: format!("{}->{}", e.from, e.to),
                    l: Some(e.factor),
                    holds: Some(!matches!(e.status, crate::estimation::EntryStatus::Violated { .. })),
                    ..Row::default()
                });
            }
            for o in &m.constant_orderings {
                rows.push(Row {
                    record: "ordering",
                    name: o.relation.clone(),
                    condition: format!("{}->{}", o.a, o.b),
                    l: Some(o.l_hat_a),
                    value: Some(o.l_hat_b),
                    holds: Some(o.consistent),
                    ..Row::default()
                });
            }
        }
        write_rows(&rows)
    }
}

impl GalleryReport {
    pub fn to_csv(&self) -> String {
        let mut rows = Vec::new();
        for s in &self.scenarios {
            for o in &s.outcomes {
                let (condition, l) = match &o.expectation.check {
                    Check::Holds { condition, l }
                    | Check::Violated { condition, l }
                    | Check::Tight { condition, l, .. }
                    | Check::MarginAt { condition, l, .. } => (condition, Some(*l)),
                    Check::EstimateIn { condition, .. } => (condition, None),
                };
                rows.push(Row {
                    record: "expectation",
                    name: s.name.clone(),
                    condition: condition.to_string(),
                    l,
                    value: Some(o.observed),
                    holds: Some(o.passed),
                    ..Row::default()
                });
            }
        }
        write_rows(&rows)
    }
}
