//! Heteroclinic web at a positive level: the Lyapunov-orbit traces, the
//! outer spirals winding onto them, and S-iterates of E_u.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{HetError, Result};
use crate::geometry::{
    circle_image, ellipse_point, find_crossings, spiral_point, Chart, CircleWhich, CurvePoint,
    Grid, IntersectionRecord, Line, PlanarCurve, Quadratic, SpiralBranch,
};
use crate::global::{offsets, t1_linear};
use crate::model::{InvolutionCase, Model};
use crate::points::mat_vec;
use crate::roots::bisect;
use crate::saddle::{s_apply_n, s_curve_jet, PointJet};
use crate::scenarios::census::{branch_census, circle_line_roots, BranchCensus};
use crate::scenarios::{fmt_f64, fmt_opt, CurveDump, Report, Table};
use crate::transit::lyapunov_radius;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CirclePair {
    pub theta_u: f64,
    pub theta_s: f64,
    pub point_u: [f64; 2],
    pub point_s: [f64; 2],
    /// max-norm distance between L(point_u) and point_s.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterateRecord {
    pub n: i32,
    /// Crossings of each of the two S^n-images with T1^-1(sigma_s).
    pub crossings: [usize; 2],
    pub all_transversal: bool,
    /// max |v| over the image samples inside the unstable box.
    pub max_abs_v: f64,
    pub decay_ratio: Option<f64>,
}

impl IterateRecord {
    fn ok(&self) -> bool {
        self.crossings.iter().all(|&k| k > 0) && self.all_transversal
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpiralPiece {
    pub census: BranchCensus,
    pub predicted_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WebReport {
    pub c: f64,
    pub eta_c: f64,
    pub rho: f64,
    pub sigma_u_crossings: Vec<IntersectionRecord>,
    pub sigma_s_crossings: Vec<IntersectionRecord>,
    pub pairs: Vec<CirclePair>,
    pub pair_max: f64,
    pub tau_minus: f64,
    pub tau_plus: f64,
    /// Interior samples of the middle piece and how many left the domain.
    pub middle_samples: usize,
    pub middle_exits: usize,
    pub pieces: Vec<SpiralPiece>,
    /// (omega / 2 pi) |ln c|.
    pub growth_estimate: f64,
    pub n0: Option<i32>,
    pub iterates: Vec<IterateRecord>,
    pub decay_bound: f64,
    pub decay_ok: bool,
    #[serde(skip)]
    dumps: Vec<CurveDump>,
}

impl WebReport {
    pub fn circles_ok(&self) -> bool {
        self.sigma_u_crossings.len() == 2
            && self.sigma_s_crossings.len() == 2
            && self
                .sigma_u_crossings
                .iter()
                .chain(&self.sigma_s_crossings)
                .all(|r| r.transversal)
            && self.pairs.len() == 2
            && self.pair_max <= 1e-10
    }

    pub fn spirals_ok(&self) -> bool {
        self.middle_exits == self.middle_samples
            && self.pieces.iter().all(|p| {
                p.census.all_transversal && p.census.count as f64 >= p.predicted_min.floor()
            })
    }

    pub fn iterates_ok(&self) -> bool {
        self.n0.is_some() && !self.iterates.is_empty() && self.iterates.iter().all(|r| r.ok())
    }

    pub fn spiral_total(&self) -> usize {
        self.pieces.iter().map(|p| p.census.count).sum()
    }
}

impl Report for WebReport {
    const NAME: &'static str = "web";

    fn certified(&self) -> bool {
        self.circles_ok() && self.spirals_ok() && self.iterates_ok() && self.decay_ok
    }

    fn tables(&self) -> Vec<(String, Table)> {
        let mut t = Table::new(&["part", "label", "count", "all_transversal", "detail"]);
        t.push(vec![
            "circle".into(),
            "T2(sigma_u) x {u=0}".into(),
            self.sigma_u_crossings.len().to_string(),
            self.sigma_u_crossings
                .iter()
                .all(|r| r.transversal)
                .to_string(),
            format!("pair_max={}", fmt_f64(self.pair_max)),
        ]);
        t.push(vec![
            "circle".into(),
            "T1^-1(sigma_s) x {v=0}".into(),
            self.sigma_s_crossings.len().to_string(),
            self.sigma_s_crossings
                .iter()
                .all(|r| r.transversal)
                .to_string(),
            String::new(),
        ]);
        for p in &self.pieces {
            t.push(vec![
                "spiral".into(),
                p.census.label.clone(),
                p.census.count.to_string(),
                p.census.all_transversal.to_string(),
                format!("phase_span={}", fmt_f64(p.census.phase_span)),
            ]);
        }
        t.push(vec![
            "middle".into(),
            "DomainExit".into(),
            self.middle_exits.to_string(),
            String::new(),
            format!("samples={}", self.middle_samples),
        ]);
        let mut it = Table::new(&[
            "n",
            "crossings_a",
            "crossings_b",
            "all_transversal",
            "max_abs_v",
            "decay_ratio",
        ]);
        for r in &self.iterates {
            it.push(vec![
                r.n.to_string(),
                r.crossings[0].to_string(),
                r.crossings[1].to_string(),
                r.all_transversal.to_string(),
                fmt_f64(r.max_abs_v),
                fmt_opt(r.decay_ratio),
            ]);
        }
        vec![("result".into(), t), ("iterates".into(), it)]
    }

    fn curves(&self) -> Vec<CurveDump> {
        self.dumps.clone()
    }
}

fn reflect_pairs(us: &[IntersectionRecord], ss: &[IntersectionRecord]) -> Vec<CirclePair> {
    us.iter()
        .filter_map(|a| {
            ss.iter()
                .map(|b| {
                    let d = (a.point[0] - b.point[1])
                        .abs()
                        .max((a.point[1] - b.point[0]).abs());
                    CirclePair {
                        theta_u: a.t,
                        theta_s: b.t,
                        point_u: a.point,
                        point_s: b.point,
                        distance: d,
                    }
                })
                .min_by(|x, y| x.distance.total_cmp(&y.distance))
        })
        .collect()
}

/// eta of T1(p) minus eta_c: zero on T1^-1(sigma_s).
fn sigma_s_functional(m: &Model, c: f64, eta_c: f64) -> Quadratic {
    let m1 = t1_linear(m);
    let (a, b) = offsets(m, c);
    let r0 = mat_vec(&m1, [m.spec.r, 0.0]);
    let o = [a - r0[0], b - r0[1]];
    let q = [
        [
            m1[0][0] * m1[0][0] + m1[1][0] * m1[1][0],
            m1[0][0] * m1[0][1] + m1[1][0] * m1[1][1],
        ],
        [
            m1[0][1] * m1[0][0] + m1[1][1] * m1[1][0],
            m1[0][1] * m1[0][1] + m1[1][1] * m1[1][1],
        ],
    ];
    Quadratic {
        q,
        b: [
            m1[0][0] * o[0] + m1[1][0] * o[1],
            m1[0][1] * o[0] + m1[1][1] * o[1],
        ],
        k: 0.5 * (o[0] * o[0] + o[1] * o[1]) - eta_c,
    }
}

/// Image under S^n of the arc of E_u starting at theta0 and moving into
/// u > 0, clipped where the image reaches u = r + eps.
fn iterate_curve<'a>(
    m: &'a Model,
    c: f64,
    rho: f64,
    theta0: f64,
    dir: f64,
    n: i32,
) -> Result<PlanarCurve<'a>> {
    let cap = m.spec.r + m.spec.eps;
    let at = move |t: f64| ellipse_point(m, c, rho, CircleWhich::SigmaU, theta0 + dir * t);
    let un = |t: f64| -> Result<f64> {
        let p = at(t).p;
        Ok(s_apply_n(m, crate::points::SigmaPoint::new(p[0], p[1]), n)?.u)
    };
    let k = 400;
    let mut hit = None;
    let mut prev = 0.0;
    for i in 1..=k {
        let t = PI * i as f64 / k as f64;
        if at(t).p[0] <= 0.0 {
            break;
        }
        if un(t)? >= cap {
            hit = Some((prev, t));
            break;
        }
        prev = t;
    }
    let (lo, hi) = hit.ok_or_else(|| {
        HetError::NoRoot(format!("S^{n} image of E_u does not reach u = r + eps"))
    })?;
    let t_end = bisect(|t| Ok(un(t)? - cap), lo, hi, 200)?;
    PlanarCurve::build(
        Chart::Sigma,
        0.0,
        t_end,
        Grid::Linear,
        Box::new(move |t| {
            let e = at(t);
            let jet = PointJet {
                p: e.p,
                d1: [dir * e.d1[0], dir * e.d1[1]],
                d2: e.d2,
            };
            let s = s_curve_jet(m, &jet, n)?;
            Ok(CurvePoint {
                t,
                p: s.p,
                d1: s.d1,
                d2: s.d2,
                phase: None,
                phase_rate: None,
            })
        }),
        &m.tol,
    )
}

struct Iterate<'a> {
    rec: IterateRecord,
    curves: Vec<PlanarCurve<'a>>,
}

fn iterate_record<'a>(
    m: &'a Model,
    c: f64,
    rho: f64,
    starts: &[(f64, f64)],
    func: &Quadratic,
    n: i32,
) -> Result<Iterate<'a>> {
    let mut crossings = [0usize; 2];
    let mut all_tr = true;
    let mut vmax: f64 = 0.0;
    let mut curves = Vec::new();
    for (i, &(theta0, dir)) in starts.iter().enumerate() {
        let curve = iterate_curve(m, c, rho, theta0, dir, n)?;
        let recs = find_crossings(&curve, func, &m.tol)?;
        crossings[i] = recs.len();
        all_tr &= recs.iter().all(|r| r.transversal);
        for s in curve.samples() {
            if (s.p[0] - m.spec.r).abs() <= m.spec.eps {
                vmax = vmax.max(s.p[1].abs());
            }
        }
        curves.push(curve);
    }
    Ok(Iterate {
        rec: IterateRecord {
            n,
            crossings,
            all_transversal: all_tr,
            max_abs_v: vmax,
            decay_ratio: None,
        },
        curves,
    })
}

const N0_CAP: i32 = 200;
const N_EXTRA: i32 = 10;

pub fn heteroclinic_web_positive(m: &Model, c: f64) -> Result<WebReport> {
    if m.spec.involution_case != InvolutionCase::Case1 {
        return Err(HetError::CaseMismatch {
            expected: InvolutionCase::Case1,
            found: m.spec.involution_case,
        });
    }
    if !(c > 0.0) {
        return Err(HetError::InvalidInput(format!(
            "web needs c > 0, got {c:e}"
        )));
    }
    m.check_level(c)?;
    let rho = lyapunov_radius(m, c)?;
    let eu = circle_image(m, c, CircleWhich::SigmaU)?;
    let es = circle_image(m, c, CircleWhich::SigmaS)?;
    let su = find_crossings(&eu, &Line::UConst(0.0), &m.tol)?;
    let ss = find_crossings(&es, &Line::VConst(0.0), &m.tol)?;
    let pairs = reflect_pairs(&su, &ss);
    let pair_max = pairs.iter().map(|p| p.distance).fold(0.0, f64::max);

    let (tm, tp, eta_c) = circle_line_roots(m, c)?;
    let middle_samples = 11;
    let mut middle_exits = 0;
    for i in 1..=middle_samples {
        let tau = tm + (tp - tm) * i as f64 / (middle_samples + 1) as f64;
        match spiral_point(m, c, tau) {
            Err(HetError::DomainExit { .. }) => middle_exits += 1,
            Err(e) => return Err(e),
            Ok(_) => {}
        }
    }
    let s_min = m.tau_floor();
    let eps = m.spec.eps;
    let growth_estimate = m.spec.omega / TAU * c.ln().abs();
    let pieces = vec![
        SpiralPiece {
            census: branch_census(m, c, "outer+", tp, SpiralBranch::Positive, s_min, eps - tp)?,
            predicted_min: growth_estimate,
        },
        SpiralPiece {
            census: branch_census(m, c, "outer-", tm, SpiralBranch::Negative, s_min, eps + tm)?,
            predicted_min: growth_estimate,
        },
    ];

    let func = sigma_s_functional(m, c, eta_c);
    let starts: Vec<(f64, f64)> = su
        .iter()
        .map(|r| (r.t, if r.derivative > 0.0 { 1.0 } else { -1.0 }))
        .collect();
    let mut n0 = None;
    let mut iterates = Vec::new();
    let mut iter_dumps = Vec::new();
    if starts.len() == 2 {
        for n in 1..=N0_CAP {
            match iterate_record(m, c, rho, &starts, &func, n) {
                Ok(it) if it.rec.ok() => {
                    n0 = Some(n);
                    break;
                }
                _ => continue,
            }
        }
        if let Some(n0) = n0 {
            for n in n0..=n0 + N_EXTRA {
                let it = iterate_record(m, c, rho, &starts, &func, n)?;
                if n == n0 {
                    for (i, cv) in it.curves.iter().enumerate() {
                        iter_dumps.push((format!("iterate_n{n}_{i}"), cv.dump_rows()));
                    }
                }
                iterates.push(it.rec);
            }
        }
    }
    for i in 1..iterates.len() {
        let r = iterates[i].max_abs_v / iterates[i - 1].max_abs_v;
        iterates[i].decay_ratio = Some(r);
    }
    let decay_bound = 0.5 * (1.0 + m.spec.nu);
    let decay_ok = iterates
        .iter()
        .all(|r| r.decay_ratio.is_none_or(|x| x <= decay_bound));

    let mut dumps = vec![
        ("ellipse_u".to_string(), eu.dump_rows()),
        ("ellipse_s".to_string(), es.dump_rows()),
    ];
    for p in &pieces {
        dumps.push((
            format!(
                "spiral_{}",
                if p.census.sign > 0.0 {
                    "outer_plus"
                } else {
                    "outer_minus"
                }
            ),
            p.census.dump.clone(),
        ));
    }
    dumps.extend(iter_dumps);
    Ok(WebReport {
        c,
        eta_c,
        rho,
        sigma_u_crossings: su,
        sigma_s_crossings: ss,
        pairs,
        pair_max,
        tau_minus: tm,
        tau_plus: tp,
        middle_samples,
        middle_exits,
        pieces,
        growth_estimate,
        n0,
        iterates,
        decay_bound,
        decay_ok,
        dumps,
    })
}
