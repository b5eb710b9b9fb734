//! Crossing censuses of the unstable spiral with u = 0.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{HetError, Result};
use crate::geometry::{
    find_crossings, nose_angle, spiral_point, stable_trace, unstable_trace, Line, NoseAngle,
    PlanarCurve, SpiralBranch,
};
use crate::global::{derived_offsets, offsets};
use crate::model::{InvolutionCase, Model};
use crate::scenarios::tangency_pos::{tangency_sequence_positive, PositiveTangencyReport};
use crate::scenarios::{fmt_f64, fmt_opt, CurveDump, Report, Table};
use crate::transit::lyapunov_eta;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingRow {
    pub s: f64,
    pub tau: f64,
    pub u: f64,
    pub v: f64,
    /// du/ds at the crossing, analytic and finite-difference.
    pub du: f64,
    pub du_fd: f64,
    pub phase: f64,
    pub phase_rate: f64,
    /// |d phase / d tau|: how fast the spiral turns through the crossing.
    pub margin: f64,
    pub transversal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchCensus {
    pub label: String,
    pub anchor: f64,
    /// tau = anchor + sign * s.
    pub sign: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub count: usize,
    /// Angle swept about the point of u = 0 facing the spiral center.
    pub phase_span: f64,
    pub predicted: f64,
    pub within_one: bool,
    pub all_transversal: bool,
    pub all_fd_agree: bool,
    pub min_abs_slope: f64,
    /// Margins of the crossings nearest the anchor increase toward it.
    pub margins_monotone: bool,
    /// Largest distance between a crossing and the reflection of its partner
    /// on the stable trace; None when the two censuses differ in size.
    pub reflection_max: Option<f64>,
    pub crossings: Vec<CrossingRow>,
    #[serde(skip)]
    pub dump: Vec<[f64; 5]>,
}

const MONOTONE_WINDOW: usize = 5;

/// Total unwrapped angle swept by the disk preimage T2^{-1}(p) of the curve
/// about the foot F of the perpendicular from the disk center to
/// T2^{-1}{u = 0}. F lies on that line, so each half turn about it is one
/// crossing; censused pieces keep |q| >= |F|, which keeps the angle
/// monotone. At c = 0, F is the center and this is the spiral phase.
pub(crate) fn winding_span(m: &Model, c: f64, curve: &PlanarCurve<'_>) -> f64 {
    let j = &m.spec.gmap_jet;
    let o = derived_offsets(m, c);
    let k2 = j.alpha * j.alpha + j.gamma * j.gamma;
    let (fx, fy) = (-o.a1 * j.gamma / k2, -o.a1 * j.alpha / k2);
    let mut total = 0.0;
    let mut prev: Option<f64> = None;
    for s in curve.samples() {
        let (du, dv) = (s.p[0] - o.a1, s.p[1] - m.spec.r - o.b1);
        let x = -j.beta * du - j.alpha * dv;
        let y = j.delta_m * du + j.gamma * dv;
        let a = (y - fy).atan2(x - fx);
        if let Some(b) = prev {
            let mut d = a - b;
            d -= (d / (2.0 * PI)).round() * 2.0 * PI;
            total += d.abs();
        }
        prev = Some(a);
    }
    total
}

pub(crate) fn branch_census(
    m: &Model,
    c: f64,
    label: &str,
    anchor: f64,
    branch: SpiralBranch,
    s_min: f64,
    s_max: f64,
) -> Result<BranchCensus> {
    let curve = unstable_trace(m, c, anchor, branch, s_min, s_max)?;
    let recs = find_crossings(&curve, &Line::UConst(0.0), &m.tol)?;
    let sign = branch.sign();
    let crossings: Vec<CrossingRow> = recs
        .iter()
        .map(|r| {
            let rate = r.phase_rate.unwrap_or(f64::NAN);
            CrossingRow {
                s: r.t,
                tau: anchor + sign * r.t,
                u: r.point[0],
                v: r.point[1],
                du: r.derivative,
                du_fd: r.derivative_fd,
                phase: r.phase.unwrap_or(f64::NAN),
                phase_rate: rate,
                margin: rate.abs(),
                transversal: r.transversal,
            }
        })
        .collect();
    let phase_span = winding_span(m, c, &curve);
    let predicted = phase_span / PI;
    let count = crossings.len();
    let near: Vec<f64> = crossings
        .iter()
        .take(MONOTONE_WINDOW)
        .map(|r| r.margin)
        .collect();
    let margins_monotone = near.windows(2).all(|w| w[0] > w[1]);
    let stable = stable_trace(m, c, anchor, branch, s_min, s_max)?;
    let srecs = find_crossings(&stable, &Line::VConst(0.0), &m.tol)?;
    let reflection_max = (srecs.len() == recs.len()).then(|| {
        recs.iter()
            .zip(&srecs)
            .map(|(a, b)| {
                (a.point[0] - b.point[1])
                    .abs()
                    .max((a.point[1] - b.point[0]).abs())
            })
            .fold(0.0, f64::max)
    });
    Ok(BranchCensus {
        label: label.to_string(),
        anchor,
        sign,
        s_min,
        s_max,
        count,
        phase_span,
        predicted,
        within_one: (count as f64 - predicted).abs() <= 1.0,
        all_transversal: recs.iter().all(|r| r.transversal),
        all_fd_agree: recs.iter().all(|r| r.fd_agrees),
        min_abs_slope: recs
            .iter()
            .map(|r| r.derivative.abs())
            .fold(f64::INFINITY, f64::min),
        margins_monotone,
        reflection_max,
        crossings,
        dump: curve.dump_rows(),
    })
}

impl BranchCensus {
    pub(crate) fn certified(&self) -> bool {
        self.within_one && self.all_transversal && self.all_fd_agree
    }
}

fn require_case(m: &Model, case: InvolutionCase) -> Result<()> {
    if m.spec.involution_case != case {
        return Err(HetError::CaseMismatch {
            expected: case,
            found: m.spec.involution_case,
        });
    }
    Ok(())
}

fn check_window(s_min: f64, s_max: f64) -> Result<()> {
    if !(s_min > 0.0 && s_min < s_max) {
        return Err(HetError::InvalidInput(format!(
            "tau window must satisfy 0 < min < max, got [{s_min:e}, {s_max:e}]"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusReport {
    pub kind: String,
    pub c: f64,
    pub nose: Option<NoseAngle>,
    pub eta_cut: Option<f64>,
    pub total: usize,
    pub branches: Vec<BranchCensus>,
}

impl Report for CensusReport {
    const NAME: &'static str = "census";

    fn certified(&self) -> bool {
        // Away from c = 0 the spiral passes next to the line near its nose and
        // can cross it twice within a fraction of a turn; the law is reported.
        if self.kind == "v0" {
            self.branches.iter().all(|b| b.certified())
        } else {
            self.branches
                .iter()
                .all(|b| b.all_transversal && b.all_fd_agree)
        }
    }

    fn notes(&self) -> Vec<String> {
        law_notes(&self.branches)
    }

    fn tables(&self) -> Vec<(String, Table)> {
        vec![
            ("result".into(), summary_table(&self.branches)),
            ("crossings".into(), crossing_table(&self.branches)),
        ]
    }

    fn curves(&self) -> Vec<CurveDump> {
        self.branches
            .iter()
            .map(|b| (format!("unstable_{}", file_label(&b.label)), b.dump.clone()))
            .collect()
    }
}

fn file_label(label: &str) -> String {
    let mut out = String::new();
    for ch in label.chars() {
        match ch {
            '>' | '+' => out.push_str("_pos"),
            '<' | '-' => out.push_str("_neg"),
            ch if ch.is_ascii_alphanumeric() => out.push(ch),
            _ => out.push('_'),
        }
    }
    out
}

fn law_notes(bs: &[BranchCensus]) -> Vec<String> {
    bs.iter()
        .filter(|b| !b.within_one)
        .map(|b| {
            format!(
                "{}: {} crossings against phase span / pi = {:.3}",
                b.label, b.count, b.predicted
            )
        })
        .collect()
}

fn summary_table(bs: &[BranchCensus]) -> Table {
    let mut t = Table::new(&[
        "branch",
        "count",
        "phase_span",
        "predicted",
        "within_one",
        "all_transversal",
        "min_abs_slope",
        "reflection_max",
    ]);
    for b in bs {
        t.push(vec![
            b.label.clone(),
            b.count.to_string(),
            fmt_f64(b.phase_span),
            fmt_f64(b.predicted),
            b.within_one.to_string(),
            b.all_transversal.to_string(),
            fmt_f64(b.min_abs_slope),
            fmt_opt(b.reflection_max),
        ]);
    }
    t
}

fn crossing_table(bs: &[BranchCensus]) -> Table {
    let mut t = Table::new(&[
        "branch",
        "index",
        "tau",
        "u",
        "v",
        "du",
        "du_fd",
        "phase",
        "margin",
        "transversal",
    ]);
    for b in bs {
        for (i, r) in b.crossings.iter().enumerate() {
            t.push(vec![
                b.label.clone(),
                i.to_string(),
                fmt_f64(r.tau),
                fmt_f64(r.u),
                fmt_f64(r.v),
                fmt_f64(r.du),
                fmt_f64(r.du_fd),
                fmt_f64(r.phase),
                fmt_f64(r.margin),
                r.transversal.to_string(),
            ]);
        }
    }
    t
}

/// Homoclinic census at c = 0: both branches tau in +-[tau_min, tau_max]
/// of the unstable trace against u = 0.
pub fn census_v0_case1(m: &Model, tau_min: f64, tau_max: f64) -> Result<CensusReport> {
    require_case(m, InvolutionCase::Case1)?;
    check_window(tau_min, tau_max)?;
    let mut branches = Vec::new();
    for (label, br) in [
        ("tau>0", SpiralBranch::Positive),
        ("tau<0", SpiralBranch::Negative),
    ] {
        branches.push(branch_census(
            m,
            0.0,
            label,
            0.0,
            br,
            tau_min,
            tau_max.min(m.spec.eps),
        )?);
    }
    Ok(CensusReport {
        kind: "v0".into(),
        c: 0.0,
        nose: None,
        eta_cut: None,
        total: branches.iter().map(|b| b.count).sum(),
        branches,
    })
}

/// Finite census for c < 0: the disk eta < eta_nose is cut out, leaving the
/// two halves of the spiral on either side of the nose.
pub fn census_c_negative(m: &Model, c: f64, s_min: f64, s_max: f64) -> Result<CensusReport> {
    require_case(m, InvolutionCase::Case1)?;
    if !(c < 0.0) {
        return Err(HetError::InvalidInput(format!(
            "census_c_negative needs c < 0, got {c:e}"
        )));
    }
    check_window(s_min, s_max)?;
    let nose = nose_angle(m, c)?;
    let eps = m.spec.eps;
    let mut branches = Vec::new();
    for (label, br) in [
        ("nose+", SpiralBranch::Positive),
        ("nose-", SpiralBranch::Negative),
    ] {
        let room = eps - br.sign() * nose.tau_star;
        branches.push(branch_census(
            m,
            c,
            label,
            nose.tau_star,
            br,
            s_min,
            s_max.min(room),
        )?);
    }
    Ok(CensusReport {
        kind: "c_negative".into(),
        c,
        nose: Some(nose),
        eta_cut: Some(nose.eta_nose),
        total: branches.iter().map(|b| b.count).sum(),
        branches,
    })
}

/// Parameters tau_- < tau_+ where the T1-image of {v = 0} meets the
/// Lyapunov circle eta = eta_c.
pub(crate) fn circle_line_roots(m: &Model, c: f64) -> Result<(f64, f64, f64)> {
    let eta_c = lyapunov_eta(m, c)?.eta;
    let j = &m.spec.gmap_jet;
    let (a, b) = offsets(m, c);
    let k2 = j.alpha * j.alpha + j.gamma * j.gamma;
    let ts = -(a * j.alpha + b * j.gamma) / k2;
    let disc = ts * ts - (a * a + b * b - 2.0 * eta_c) / k2;
    if !(disc > 0.0) {
        return Err(HetError::NoRoot(format!(
            "line misses the Lyapunov circle at c = {c:e}"
        )));
    }
    let h = disc.sqrt();
    Ok((ts - h, ts + h, eta_c))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Case2Census {
    pub c: f64,
    pub eta_c: Option<f64>,
    pub tau_minus: Option<f64>,
    pub tau_plus: Option<f64>,
    pub total: usize,
    /// The two halves of the inner piece, anchored at its ends.
    pub pieces: Vec<BranchCensus>,
    /// Extra unwrapped phase gained at each end when the horizon s_min is
    /// pushed to s_min * 1e-3.
    pub phase_extension: Vec<f64>,
    pub phase_divergent: bool,
    /// For c <= 0: samples over |tau| <= eps and how many left the domain.
    pub exit_samples: usize,
    pub exit_count: usize,
    pub empty_by_domain_exit: bool,
    pub tangencies: Option<PositiveTangencyReport>,
}

impl Report for Case2Census {
    const NAME: &'static str = "census_case2";

    fn certified(&self) -> bool {
        if self.c <= 0.0 {
            return self.empty_by_domain_exit;
        }
        self.pieces
            .iter()
            .all(|b| b.all_transversal && b.all_fd_agree)
            && self.phase_divergent
            && self.tangencies.as_ref().is_none_or(|t| t.certified())
    }

    fn tables(&self) -> Vec<(String, Table)> {
        let mut v = vec![
            ("result".into(), summary_table(&self.pieces)),
            ("crossings".into(), crossing_table(&self.pieces)),
        ];
        if let Some(t) = &self.tangencies {
            v.push(("tangencies".into(), t.tables().remove(0).1));
        }
        v
    }

    fn curves(&self) -> Vec<CurveDump> {
        self.pieces
            .iter()
            .map(|b| {
                (
                    format!("double_spiral_{}", file_label(&b.label)),
                    b.dump.clone(),
                )
            })
            .collect()
    }

    fn notes(&self) -> Vec<String> {
        law_notes(&self.pieces)
    }
}

/// Case-2 census: the inner piece of the T1-image of {v = 0} (inside the
/// Lyapunov circle) is a double spiral; count its crossings with u = 0.
/// `n_range` optionally adds a diagonal-preimage tangency scan.
pub fn census_case2_positive(
    m: &Model,
    c: f64,
    s_min: f64,
    n_range: Option<(i32, i32)>,
) -> Result<Case2Census> {
    require_case(m, InvolutionCase::Case2)?;
    if c <= 0.0 {
        let n = 201;
        let eps = m.spec.eps;
        let mut exits = 0;
        for i in 0..n {
            let tau = -eps + 2.0 * eps * i as f64 / (n - 1) as f64;
            match spiral_point(m, c, tau) {
                Err(HetError::DomainExit { .. }) => exits += 1,
                Err(e) => return Err(e),
                Ok(_) => {}
            }
        }
        return Ok(Case2Census {
            c,
            eta_c: None,
            tau_minus: None,
            tau_plus: None,
            total: 0,
            pieces: Vec::new(),
            phase_extension: Vec::new(),
            phase_divergent: false,
            exit_samples: n,
            exit_count: exits,
            empty_by_domain_exit: exits == n,
            tangencies: None,
        });
    }
    let (tm, tp, eta_c) = circle_line_roots(m, c)?;
    let half = 0.5 * (tp - tm);
    check_window(s_min, half)?;
    let pieces = vec![
        branch_census(m, c, "end+", tp, SpiralBranch::Negative, s_min, half)?,
        branch_census(m, c, "end-", tm, SpiralBranch::Positive, s_min, half)?,
    ];
    let mut phase_extension = Vec::new();
    for (anchor, sign) in [(tp, -1.0), (tm, 1.0)] {
        let a = spiral_point(m, c, anchor + sign * s_min)?
            .phase
            .unwrap_or(0.0);
        let b = spiral_point(m, c, anchor + sign * s_min * 1e-3)?
            .phase
            .unwrap_or(0.0);
        phase_extension.push((b - a).abs());
    }
    let phase_divergent = phase_extension.iter().all(|&x| x >= 4.0 * PI);
    let tangencies = match n_range {
        Some((lo, hi)) => Some(tangency_sequence_positive(m, lo, hi, None)?),
        None => None,
    };
    Ok(Case2Census {
        c,
        eta_c: Some(eta_c),
        tau_minus: Some(tm),
        tau_plus: Some(tp),
        total: pieces.iter().map(|b| b.count).sum(),
        pieces,
        phase_extension,
        phase_divergent,
        exit_samples: 0,
        exit_count: 0,
        empty_by_domain_exit: false,
        tangencies,
    })
}
