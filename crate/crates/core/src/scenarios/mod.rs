//! Executable experiments. Each scenario returns a typed report; a
//! [`ScanResult`] wraps any report with the spec digest, inputs and the
//! tolerances actually used.

use serde::Serialize;
use serde_json::Value;

use crate::model::Model;
use crate::tolerances::Tolerances;

mod census;
mod elliptic;
mod loops;
mod tangency_neg;
mod tangency_pos;
mod web;

pub use census::{
    census_c_negative, census_case2_positive, census_v0_case1, BranchCensus, Case2Census,
    CensusReport, CrossingRow,
};
pub use elliptic::{
    elliptic_search, Classification, EllipticInterval, EllipticRecord, EllipticReport, SeedTally,
};
pub use loops::{loop_parameters, LoopRecord, LoopReport};
pub use tangency_neg::{tangency_sequence_negative, NegativeTangency, NegativeTangencyReport};
pub use tangency_pos::{
    tangency_sequence_positive, PositiveScanWindow, PositiveTangency, PositiveTangencyReport,
};
pub use web::{heteroclinic_web_positive, CirclePair, IterateRecord, SpiralPiece, WebReport};

pub const SCHEMA_VERSION: u32 = 1;

/// Plot-ready sample dump: rows (t, x, y, dx, dy).
pub type CurveDump = (String, Vec<[f64; 5]>);

/// A CSV table as strings, header first.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(cols: &[&str]) -> Self {
        Self {
            header: cols.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip decimal, switching to exponent form outside
/// [1e-4, 1e15).
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Common surface of scenario reports.
pub trait Report: Serialize {
    const NAME: &'static str;
    fn certified(&self) -> bool;
    /// Tables keyed by file stem; the first one is the primary result table.
    fn tables(&self) -> Vec<(String, Table)>;
    fn curves(&self) -> Vec<CurveDump> {
        Vec::new()
    }
    fn notes(&self) -> Vec<String> {
        Vec::new()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanResult {
    pub schema_version: u32,
    pub scenario: String,
    pub spec_digest: String,
    pub inputs: Value,
    pub tolerances: Tolerances,
    pub outputs: Value,
    pub certified: bool,
    pub notes: Vec<String>,
    /// Measured by the caller; kept out of the JSON so reruns are byte-identical.
    #[serde(skip)]
    pub wall_time_s: f64,
    #[serde(skip)]
    pub tables: Vec<(String, Table)>,
    #[serde(skip)]
    pub curves: Vec<CurveDump>,
}

impl ScanResult {
    pub fn from_report<I: Serialize, R: Report>(m: &Model, inputs: &I, report: &R) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            scenario: R::NAME.to_string(),
            spec_digest: m.spec.digest(),
            inputs: serde_json::to_value(inputs).expect("inputs serialize"),
            tolerances: m.tol.clone(),
            outputs: serde_json::to_value(report).expect("report serializes"),
            certified: report.certified(),
            notes: report.notes(),
            wall_time_s: 0.0,
            tables: report.tables(),
            curves: report.curves(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scan result serializes")
    }
}

/// Geometric grid of `n` points from a to b (same sign, nonzero), inclusive.
pub(crate) fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let sg = a.signum();
    let (la, lb) = (a.abs().ln(), b.abs().ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                a
            } else if i + 1 == n {
                b
            } else {
                sg * (la + (lb - la) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}
