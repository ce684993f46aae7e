//! CSV and JSON writers. Floats are written with 17 significant digits so
//! every `f64` survives a round trip.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use dirac_lattice::field::SpinorField;
use dirac_lattice::functionals::FunctionalTrace;
use dirac_lattice::harness::{ConePlan, ConvergenceTable};
use dirac_lattice::{AuditReport, Constants, Witness};
use serde_json::{json, Map, Number, Value};

use crate::CliError;

/// `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub const TRACE_COLUMNS: [&str; 8] = ["t", "L0", "D0", "Q0", "cumD0", "charge", "max_abs_u", "max_abs_v"];
pub const PAIR_COLUMNS: [&str; 4] = ["L1", "D1", "Q1", "cumD1"];

/// One audit or validation outcome as written to disk.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub inequality: String,
    pub passed: bool,
    pub max_violation: f64,
    pub tolerance_budget: f64,
    pub worst_margin: f64,
    pub witness: Option<Witness>,
    pub constants: Option<Constants>,
    pub info: Vec<(String, f64)>,
}

impl From<&AuditReport> for Record {
    fn from(r: &AuditReport) -> Self {
        Self {
            inequality: r.inequality.clone(),
            passed: r.passed,
            max_violation: r.max_violation,
            tolerance_budget: r.tolerance_budget,
            worst_margin: r.worst_margin,
            witness: r.witness,
            constants: r.constants_used,
            info: r.info.clone(),
        }
    }
}

fn line(out: &mut String, cells: impl IntoIterator<Item = String>) {
    let cells: Vec<String> = cells.into_iter().collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

/// Trace rows pair each trace time with the snapshot recorded at it.
fn snapshots_at<'a>(snaps: &'a [SpinorField<f64>], times: &[f64]) -> Vec<&'a SpinorField<f64>> {
    let mut out = Vec::with_capacity(times.len());
    let mut it = snaps.iter();
    for &t in times {
        if let Some(s) = it.by_ref().find(|s| s.t == t) {
            out.push(s);
        }
    }
    out
}

/// Functional trace as CSV; the difference columns are appended when the
/// trace carries them. An empty trace gives a header-only file.
pub fn trace_csv(tr: &FunctionalTrace<f64>, snaps: &[SpinorField<f64>]) -> String {
    let mut out = String::new();
    let diff = tr.difference.as_ref();
    let mut header: Vec<String> = TRACE_COLUMNS.iter().map(|s| s.to_string()).collect();
    if diff.is_some() {
        header.extend(PAIR_COLUMNS.iter().map(|s| s.to_string()));
    }
    line(&mut out, header);
    let fields = snapshots_at(snaps, &tr.times);
    for (j, s) in fields.iter().enumerate() {
        let mut row = vec![
            tr.times[j],
            tr.l0[j],
            tr.d0[j],
            tr.q0[j],
            tr.cum_d0[j],
            s.charge(),
            s.max_abs_u(),
            s.max_abs_v(),
        ];
        if let Some(d) = diff {
            row.extend([d.l1[j], d.d1[j], d.q1[j], d.cum_d1[j]]);
        }
        line(&mut out, row.into_iter().map(fmt_f64));
    }
    out
}

/// Every recorded snapshot, one row per site.
pub fn snapshots_csv(snaps: &[SpinorField<f64>]) -> String {
    let mut out = String::from("t,x,u_re,u_im,v_re,v_im\n");
    for s in snaps {
        for i in 0..s.grid.n_points {
            let row = [s.t, s.grid.x(i), s.u[i].re, s.u[i].im, s.v[i].re, s.v[i].im];
            line(&mut out, row.into_iter().map(fmt_f64));
        }
    }
    out
}

/// Convergence table, one row per level pair. Missing entries (the last
/// skip distances) are left empty.
pub fn table_csv(t: &ConvergenceTable) -> String {
    let mut out = String::from("level,epsilon,next_epsilon,pair_distance,product_distance,skip_distance\n");
    let cell = |v: Option<&f64>| v.map(|x| fmt_f64(*x)).unwrap_or_default();
    for j in 0..t.pair_distances.len() {
        let next = match t.comparison {
            dirac_lattice::harness::Comparison::Consecutive => t.epsilons.get(j + 1),
            dirac_lattice::harness::Comparison::CrossFamily => t.epsilons.get(j),
        };
        line(
            &mut out,
            [
                j.to_string(),
                cell(t.epsilons.get(j)),
                cell(next),
                cell(t.pair_distances.get(j)),
                cell(t.product_distances.get(j)),
                cell(t.skip_distances.get(j)),
            ],
        );
    }
    out
}

const RECORD_COLUMNS: [&str; 13] = [
    "inequality",
    "passed",
    "max_violation",
    "tolerance_budget",
    "worst_margin",
    "witness_t",
    "witness_x",
    "c",
    "delta0",
    "c_star",
    "K",
    "delta",
    "info",
];

/// Audit records as CSV. The `info` column holds `key=value` pairs
/// separated by `;`.
pub fn records_csv(records: &[Record]) -> String {
    let mut out = String::new();
    line(&mut out, RECORD_COLUMNS.iter().map(|s| s.to_string()));
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    for r in records {
        let k = r.constants.as_ref();
        let info: Vec<String> = r.info.iter().map(|(key, v)| format!("{key}={}", fmt_f64(*v))).collect();
        line(
            &mut out,
            [
                r.inequality.clone(),
                r.passed.to_string(),
                fmt_f64(r.max_violation),
                fmt_f64(r.tolerance_budget),
                fmt_f64(r.worst_margin),
                opt(r.witness.map(|w| w.t)),
                opt(r.witness.map(|w| w.x)),
                opt(k.map(|k| k.c)),
                opt(k.map(|k| k.delta0)),
                opt(k.map(|k| k.c_star)),
                opt(k.map(|k| k.k)),
                opt(k.map(|k| k.delta)),
                info.join(";"),
            ],
        );
    }
    out
}

/// JSON number with 17 significant digits; non-finite values become strings.
fn num(x: f64) -> Value {
    if x.is_finite() {
        let n: Number = serde_json::from_str(&fmt_f64(x)).expect("formatted float is a JSON number");
        Value::Number(n)
    } else {
        Value::String(x.to_string())
    }
}

fn constants_json(k: &Constants) -> Value {
    json!({
        "c": num(k.c),
        "delta0": num(k.delta0),
        "c_star": num(k.c_star),
        "K": num(k.k),
        "delta": num(k.delta),
    })
}

/// Audit records as a flat JSON list.
pub fn records_json(records: &[Record]) -> String {
    let list: Vec<Value> = records
        .iter()
        .map(|r| {
            let mut info = Map::new();
            for (k, v) in &r.info {
                info.insert(k.clone(), num(*v));
            }
            json!({
                "inequality": r.inequality,
                "passed": r.passed,
                "max_violation": num(r.max_violation),
                "tolerance_budget": num(r.tolerance_budget),
                "worst_margin": num(r.worst_margin),
                "witness": r.witness.map(|w| json!({"t": num(w.t), "x": num(w.x)})),
                "constants": r.constants.as_ref().map(constants_json),
                "info": Value::Object(info),
            })
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&list).expect("records serialize");
    s.push('\n');
    s
}

pub fn plan_json(plan: &ConePlan) -> String {
    let v = json!({
        "B": num(plan.b),
        "r": num(plan.r),
        "N_tri": plan.n_tri,
        "T": num(plan.horizon),
        "C0": num(plan.c0),
        "delta": num(plan.delta),
        "limit_tail": num(plan.limit_tail),
        "member_tail": num(plan.member_tail),
        "limit_window": num(plan.limit_window),
        "member_window": num(plan.member_window),
        "levels": plan.levels(),
        "triangles": plan.triangle_count(),
    });
    let mut s = serde_json::to_string_pretty(&v).expect("plan serializes");
    s.push('\n');
    s
}

/// Collects written paths; parent directories are created on demand.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn write(&mut self, prefix: &str, suffix: &str, body: &str) -> Result<PathBuf, CliError> {
        let path = PathBuf::from(format!("{prefix}{suffix}"));
        let io = |source| CliError::Io {
            path: path.display().to_string(),
            source,
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(io)?;
        }
        fs::write(&path, body).map_err(io)?;
        self.written.push(path.clone());
        Ok(path)
    }
}

/// Header and rows of a numeric CSV; empty cells are `None`.
pub type NumericCsv = (Vec<String>, Vec<Vec<Option<f64>>>);

/// Parses a CSV written by this module back into its header and numbers.
pub fn read_numeric_csv(path: &Path) -> std::io::Result<NumericCsv> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap_or_default()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|c| if c.is_empty() { None } else { c.parse().ok() })
                .collect()
        })
        .collect();
    Ok((header, rows))
}

/// Short human summary of a record, for the terminal.
pub fn summary(r: &Record) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "{:<28} {}  violation {:.3e}  budget {:.3e}",
        r.inequality,
        if r.passed { "pass" } else { "FAIL" },
        r.max_violation,
        r.tolerance_budget
    );
    s
}
