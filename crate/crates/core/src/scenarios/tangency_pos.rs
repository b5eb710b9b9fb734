//! Tangencies of the Lyapunov-orbit trace E_u = T2(circle eta_c) with the
//! S^n-preimages of the diagonal, for c > 0.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HetError, Result};
use crate::geometry::{
    circle_image, find_extrema, find_tangency_in_parameter, CircleWhich, Graph, TangencyProbe,
};
use crate::global::derived_offsets;
use crate::model::Model;
use crate::roots::illinois;
use crate::saddle::diagonal_preimage_jet;
use crate::scenarios::{fmt_f64, fmt_opt, geomspace, Report, Table};
use crate::transit::lyapunov_radius;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositiveScanWindow {
    pub c_lo: f64,
    pub c_hi: f64,
    pub points: usize,
}

impl PositiveScanWindow {
    pub fn default_for(m: &Model) -> Self {
        let c_hi = m.limits.c_max;
        let c_lo = 1e-16;
        let decades = (c_hi / c_lo).log10();
        Self {
            c_lo,
            c_hi,
            points: (20.0 * decades).ceil() as usize + 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositiveTangency {
    pub n: i32,
    pub c: f64,
    pub bracket: (f64, f64),
    pub theta: f64,
    pub point: [f64; 2],
    /// max over E_u of u - u_n(v) at c; zero at the tangency.
    pub value: f64,
    /// d/dtheta of the separation at the contact.
    pub first: f64,
    /// Second derivative of the separation as a graph over v.
    pub second: f64,
    pub second_tol: f64,
    pub rho: f64,
    pub residual_ok: bool,
    pub quadratic: bool,
    /// Root of the closed-form ellipse-line separation (constant f only).
    pub oracle_c: Option<f64>,
    pub oracle_rel: Option<f64>,
}

impl PositiveTangency {
    pub fn certified(&self) -> bool {
        self.residual_ok && self.quadratic && self.oracle_rel.is_none_or(|r| r <= 1e-9)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositiveTangencyReport {
    pub window: PositiveScanWindow,
    pub records: Vec<PositiveTangency>,
    /// n values without a certified tangency in the window, with the reason.
    pub failures: Vec<(i32, String)>,
    pub monotone: bool,
}

impl Report for PositiveTangencyReport {
    const NAME: &'static str = "tangencies_positive";

    fn certified(&self) -> bool {
        !self.records.is_empty() && self.monotone && self.records.iter().all(|r| r.certified())
    }

    fn tables(&self) -> Vec<(String, Table)> {
        let mut t = Table::new(&[
            "n",
            "c_n",
            "value",
            "first",
            "second",
            "second_tol",
            "rho",
            "quadratic",
            "oracle_c",
            "oracle_rel",
        ]);
        for r in &self.records {
            t.push(vec![
                r.n.to_string(),
                fmt_f64(r.c),
                fmt_f64(r.value),
                fmt_f64(r.first),
                fmt_f64(r.second),
                fmt_f64(r.second_tol),
                fmt_f64(r.rho),
                r.quadratic.to_string(),
                fmt_opt(r.oracle_c),
                fmt_opt(r.oracle_rel),
            ]);
        }
        vec![("result".into(), t)]
    }

    fn notes(&self) -> Vec<String> {
        self.failures
            .iter()
            .map(|(n, e)| format!("n = {n}: {e}"))
            .collect()
    }
}

/// Maximum of u - u_n(v) over the ellipse E_u at level c, with the local
/// curvature data at the maximizer.
fn separation_probe(m: &Model, c: f64, n: i32) -> Result<TangencyProbe> {
    let rho = lyapunov_radius(m, c)?;
    let curve = circle_image(m, c, CircleWhich::SigmaU)?;
    let g = Graph {
        g: |v: f64| diagonal_preimage_jet(m, n, v),
    };
    let ex = find_extrema(&curve, &g, &m.tol)?;
    let best = ex
        .iter()
        .filter(|e| e.second < 0.0)
        .max_by(|a, b| a.value.total_cmp(&b.value))
        .ok_or_else(|| HetError::NoRoot(format!("no maximum of the separation at c = {c:e}")))?;
    let v1 = best.d1[1];
    Ok(TangencyProbe {
        value: best.value,
        t: best.t,
        point: best.point,
        first: best.first,
        second: best.second / (v1 * v1),
        second_tol: m.tol.quad_factor / rho,
        scale: rho,
    })
}

/// Closed-form separation for constant f, where u_n(v) = nu^{2n} v.
fn oracle_separation(m: &Model, c: f64, n: i32) -> Result<f64> {
    let j = &m.spec.gmap_jet;
    let mm = m.spec.nu.powi(2 * n);
    let o = derived_offsets(m, c);
    let rho = lyapunov_radius(m, c)?;
    Ok(o.a1 - mm * (m.spec.r + o.b1)
        + rho * (j.gamma + mm * j.delta_m).hypot(j.alpha + mm * j.beta))
}

fn one_n(m: &Model, n: i32, grid: &[f64]) -> Result<PositiveTangency> {
    // scan from small c upward; the first sign change is the tangency
    let mut prev: Option<(f64, f64)> = None;
    let mut bracket = None;
    for &c in grid {
        let Ok(p) = separation_probe(m, c, n) else {
            if prev.is_some() {
                break;
            }
            continue;
        };
        if let Some((c0, g0)) = prev {
            if g0.signum() != p.value.signum() || p.value == 0.0 {
                bracket = Some((c0, c));
                break;
            }
        }
        prev = Some((c, p.value));
    }
    let (lo, hi) = bracket.ok_or(HetError::NoSignChange {
        lo: grid[0],
        hi: *grid.last().unwrap(),
    })?;
    let rec = find_tangency_in_parameter(lo, hi, |c| separation_probe(m, c, n))?;
    let (oracle_c, oracle_rel) = if m.f_is_constant() {
        let oc = illinois(|c| oracle_separation(m, c, n), lo, hi, 0.0, 300)?;
        (Some(oc), Some(((oc - rec.scan) / oc).abs()))
    } else {
        (None, None)
    };
    Ok(PositiveTangency {
        n,
        c: rec.scan,
        bracket: (lo, hi),
        theta: rec.t,
        point: rec.point,
        value: rec.value,
        first: rec.first,
        second: rec.second,
        second_tol: rec.second_tol,
        rho: rec.scale,
        residual_ok: rec.value.abs() <= 1e-10 * rec.scale,
        quadratic: rec.quadratic,
        oracle_c,
        oracle_rel,
    })
}

/// For each n in [n_lo, n_hi], the level c_n > 0 at which E_u touches the
/// graph u = u_n(v) of the n-th diagonal preimage.
pub fn tangency_sequence_positive(
    m: &Model,
    n_lo: i32,
    n_hi: i32,
    window: Option<PositiveScanWindow>,
) -> Result<PositiveTangencyReport> {
    if !(1 <= n_lo && n_lo <= n_hi) {
        return Err(HetError::InvalidInput(format!(
            "n range {n_lo}..{n_hi} must be ordered and >= 1"
        )));
    }
    let window = window.unwrap_or_else(|| PositiveScanWindow::default_for(m));
    if !(0.0 < window.c_lo && window.c_lo < window.c_hi && window.points >= 2) {
        return Err(HetError::InvalidInput(
            "c window must satisfy 0 < lo < hi".into(),
        ));
    }
    m.check_level(window.c_hi)?;
    let grid = geomspace(window.c_lo, window.c_hi, window.points);
    let outcomes: Vec<(i32, Result<PositiveTangency>)> = (n_lo..=n_hi)
        .into_par_iter()
        .map(|n| (n, one_n(m, n, &grid)))
        .collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (n, o) in outcomes {
        match o {
            Ok(r) => records.push(r),
            Err(e) => failures.push((n, e.to_string())),
        }
    }
    let monotone = records.windows(2).all(|w| w[1].c < w[0].c);
    Ok(PositiveTangencyReport {
        window,
        records,
        failures,
        monotone,
    })
}
