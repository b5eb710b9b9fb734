//! Fixed points of the strip maps F_{c,k} = G_c o S^k near tangency levels,
//! classified by the trace of their Jacobian.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HetError, Result};
use crate::global::in_stable_box;
use crate::model::Model;
use crate::poincare::{strip_map, strip_map_jacobian};
use crate::points::{det2, trace2, SigmaPoint};
use crate::saddle::k0_threshold;
use crate::scenarios::{fmt_f64, linspace, Report, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Elliptic,
    Saddle,
    ParabolicUndecided,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Elliptic => "elliptic",
            Classification::Saddle => "saddle",
            Classification::ParabolicUndecided => "parabolic_undecided",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipticRecord {
    pub c: f64,
    pub k: i32,
    pub u: f64,
    pub v: f64,
    pub residual: f64,
    pub trace: f64,
    pub det: f64,
    pub det_ok: bool,
    pub classification: Classification,
}

/// Newton outcomes for one (c, k) cell of the seed lattice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedTally {
    pub c: f64,
    pub k: i32,
    pub seeds: usize,
    pub converged: usize,
    pub distinct: usize,
    pub failures: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipticInterval {
    pub k: i32,
    pub c_lo: f64,
    pub c_hi: f64,
    pub width: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EllipticReport {
    pub c_window: (f64, f64),
    pub k_range: (i32, i32),
    pub grid: Vec<f64>,
    pub records: Vec<EllipticRecord>,
    pub tallies: Vec<SeedTally>,
    pub intervals: Vec<EllipticInterval>,
    pub elliptic_count: usize,
    pub saddle_count: usize,
    pub undecided_count: usize,
    pub all_det_ok: bool,
}

impl Report for EllipticReport {
    const NAME: &'static str = "elliptic";

    fn certified(&self) -> bool {
        !self.records.is_empty() && self.all_det_ok
    }

    fn tables(&self) -> Vec<(String, Table)> {
        let mut t = Table::new(&[
            "c",
            "k",
            "u",
            "v",
            "residual",
            "trace",
            "det",
            "classification",
        ]);
        for r in &self.records {
            t.push(vec![
                fmt_f64(r.c),
                r.k.to_string(),
                fmt_f64(r.u),
                fmt_f64(r.v),
                fmt_f64(r.residual),
                fmt_f64(r.trace),
                fmt_f64(r.det),
                r.classification.as_str().to_string(),
            ]);
        }
        let mut iv = Table::new(&["k", "c_lo", "c_hi", "width", "points"]);
        for i in &self.intervals {
            iv.push(vec![
                i.k.to_string(),
                fmt_f64(i.c_lo),
                fmt_f64(i.c_hi),
                fmt_f64(i.width),
                i.points.to_string(),
            ]);
        }
        vec![("result".into(), t), ("intervals".into(), iv)]
    }
}

/// Points of the c-grid over the window.
pub const GRID_POINTS: usize = 41;
const U_SEEDS: usize = 9;
const V_SEEDS: usize = 41;

enum Fail {
    Domain,
    LeftBox,
    Singular,
    NoConvergence,
}

impl Fail {
    fn key(&self) -> &'static str {
        match self {
            Fail::Domain => "domain",
            Fail::LeftBox => "left_box",
            Fail::Singular => "singular",
            Fail::NoConvergence => "no_convergence",
        }
    }
}

fn newton_fixed(
    m: &Model,
    c: f64,
    k: i32,
    p0: SigmaPoint,
) -> std::result::Result<(SigmaPoint, f64), Fail> {
    let mut p = p0;
    for _ in 0..60 {
        let f = strip_map(m, c, k, p).map_err(|_| Fail::Domain)?;
        let res = [f.u - p.u, f.v - p.v];
        let rn = res[0].hypot(res[1]);
        if rn <= 1e-14 {
            return Ok((p, rn));
        }
        let j = strip_map_jacobian(m, c, k, p).map_err(|_| Fail::Domain)?;
        let a = [[j[0][0] - 1.0, j[0][1]], [j[1][0], j[1][1] - 1.0]];
        let det = det2(&a);
        if det == 0.0 || !det.is_finite() {
            return Err(Fail::Singular);
        }
        let du = -(a[1][1] * res[0] - a[0][1] * res[1]) / det;
        let dv = -(-a[1][0] * res[0] + a[0][0] * res[1]) / det;
        p = SigmaPoint::new(p.u + du, p.v + dv);
        if !in_stable_box(m, p) {
            return Err(Fail::LeftBox);
        }
        if du.hypot(dv) <= 1e-15 * p.u.hypot(p.v) {
            let f = strip_map(m, c, k, p).map_err(|_| Fail::Domain)?;
            return Ok((p, (f.u - p.u).hypot(f.v - p.v)));
        }
    }
    Err(Fail::NoConvergence)
}

fn classify(trace: f64, tol: f64) -> Classification {
    if trace.abs() < 2.0 - tol {
        Classification::Elliptic
    } else if trace.abs() > 2.0 + tol {
        Classification::Saddle
    } else {
        Classification::ParabolicUndecided
    }
}

fn search_cell(m: &Model, c: f64, k: i32) -> (Vec<EllipticRecord>, SeedTally) {
    let (r, eps) = (m.spec.r, m.spec.eps);
    let scale = m.spec.nu.powi(k);
    let mut found: Vec<EllipticRecord> = Vec::new();
    let mut failures = BTreeMap::new();
    let mut converged = 0;
    let mut seeds = 0;
    for v in linspace(r - 0.99 * eps, r + 0.99 * eps, V_SEEDS) {
        for uf in linspace(r - eps, r + eps, U_SEEDS) {
            seeds += 1;
            match newton_fixed(m, c, k, SigmaPoint::new(uf * scale, v)) {
                Ok((p, residual)) => {
                    converged += 1;
                    if found
                        .iter()
                        .any(|q| (q.u - p.u).abs() <= 1e-10 && (q.v - p.v).abs() <= 1e-10)
                    {
                        continue;
                    }
                    let Ok(j) = strip_map_jacobian(m, c, k, p) else {
                        *failures.entry(Fail::Domain.key().to_string()).or_insert(0) += 1;
                        continue;
                    };
                    let (trace, det) = (trace2(&j), det2(&j));
                    found.push(EllipticRecord {
                        c,
                        k,
                        u: p.u,
                        v: p.v,
                        residual,
                        trace,
                        det,
                        det_ok: (det - 1.0).abs() <= m.tol.det,
                        classification: classify(trace, m.tol.parabolic),
                    });
                }
                Err(f) => *failures.entry(f.key().to_string()).or_insert(0) += 1,
            }
        }
    }
    found.sort_by(|a, b| a.u.total_cmp(&b.u).then(a.v.total_cmp(&b.v)));
    let tally = SeedTally {
        c,
        k,
        seeds,
        converged,
        distinct: found.len(),
        failures,
    };
    (found, tally)
}

/// Fixed points of G_c o S^k for k in k_range over a grid of c in the
/// window. A window with lo == hi searches that single level.
pub fn elliptic_search(
    m: &Model,
    c_lo: f64,
    c_hi: f64,
    k_lo: i32,
    k_hi: i32,
) -> Result<EllipticReport> {
    if !(c_lo <= c_hi) || !c_lo.is_finite() || !c_hi.is_finite() {
        return Err(HetError::InvalidInput(format!(
            "c window [{c_lo:e}, {c_hi:e}] is not ordered"
        )));
    }
    let k0 = k0_threshold(m);
    if !(i64::from(k_lo) > k0 && k_lo <= k_hi) {
        return Err(HetError::KBelowThreshold {
            k: i64::from(k_lo),
            k0,
        });
    }
    m.check_level(c_lo)?;
    m.check_level(c_hi)?;
    let grid = if c_lo == c_hi {
        vec![c_lo]
    } else {
        linspace(c_lo, c_hi, GRID_POINTS)
    };
    let cells: Vec<(f64, i32)> = grid
        .iter()
        .flat_map(|&c| (k_lo..=k_hi).map(move |k| (c, k)))
        .collect();
    let results: Vec<(Vec<EllipticRecord>, SeedTally)> = cells
        .par_iter()
        .map(|&(c, k)| search_cell(m, c, k))
        .collect();
    let mut records = Vec::new();
    let mut tallies = Vec::new();
    for (r, t) in results {
        records.extend(r);
        tallies.push(t);
    }
    let mut intervals = Vec::new();
    for k in k_lo..=k_hi {
        let mut run: Option<(usize, usize)> = None;
        let mut close = |run: &mut Option<(usize, usize)>| {
            if let Some((a, b)) = run.take() {
                intervals.push(EllipticInterval {
                    k,
                    c_lo: grid[a],
                    c_hi: grid[b],
                    width: grid[b] - grid[a],
                    points: b - a + 1,
                });
            }
        };
        for (i, &c) in grid.iter().enumerate() {
            let hit = records.iter().any(|r| {
                r.k == k && r.c == c && r.classification == Classification::Elliptic && r.det_ok
            });
            if hit {
                run = Some(run.map_or((i, i), |(a, _)| (a, i)));
            } else {
                close(&mut run);
            }
        }
        close(&mut run);
    }
    let count = |cl: Classification| records.iter().filter(|r| r.classification == cl).count();
    Ok(EllipticReport {
        c_window: (c_lo, c_hi),
        k_range: (k_lo, k_hi),
        elliptic_count: count(Classification::Elliptic),
        saddle_count: count(Classification::Saddle),
        undecided_count: count(Classification::ParabolicUndecided),
        all_det_ok: records.iter().all(|r| r.det_ok),
        grid,
        records,
        tallies,
        intervals,
    })
}
