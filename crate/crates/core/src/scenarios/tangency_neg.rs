//! Homoclinic tangencies for c < 0, located twice: from the nose-angle
//! equation and from a direct sign change of the crossing slope near the nose.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{HetError, Result};
use crate::geometry::{
    find_tangency_in_parameter, nose_angle, nose_certificate, spiral_point, TangencyProbe,
};
use crate::model::{InvolutionCase, Model};
use crate::roots::illinois;
use crate::scenarios::{fmt_f64, Report, Table};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NegativeTangency {
    pub index: usize,
    /// The tangency solves theta - theta_sym = 2 pi * winding.
    pub winding: i64,
    pub c_nose: f64,
    pub c_double: f64,
    pub double_bracket: (f64, f64),
    pub agree_rel: f64,
    pub agree: bool,
    pub eta_nose: f64,
    pub rho: f64,
    pub theta: f64,
    pub theta_sym: f64,
    /// Crossing slope at the double root (should vanish).
    pub slope: f64,
    /// Curvature certificate of the contact and its threshold.
    pub second: f64,
    pub second_tol: f64,
    pub second_times_rho: f64,
    pub quadratic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegativeTangencyReport {
    pub c_start: f64,
    pub requested: usize,
    pub records: Vec<NegativeTangency>,
    /// ln|c_n| - ln|c_{n+1}|, against 2 pi / omega.
    pub log_spacings: Vec<f64>,
    pub spacing_target: f64,
    pub theta_advance: Vec<f64>,
    pub excess_advance: Vec<f64>,
}

impl Report for NegativeTangencyReport {
    const NAME: &'static str = "tangencies_negative";

    fn certified(&self) -> bool {
        self.records.len() == self.requested && self.records.iter().all(|r| r.agree && r.quadratic)
    }

    fn tables(&self) -> Vec<(String, Table)> {
        let mut t = Table::new(&[
            "n",
            "c_n",
            "c_double",
            "agree_rel",
            "eta_nose",
            "theta",
            "second",
            "second_tol",
            "second_times_rho",
            "log_spacing",
        ]);
        for (i, r) in self.records.iter().enumerate() {
            t.push(vec![
                r.index.to_string(),
                fmt_f64(r.c_nose),
                fmt_f64(r.c_double),
                fmt_f64(r.agree_rel),
                fmt_f64(r.eta_nose),
                fmt_f64(r.theta),
                fmt_f64(r.second),
                fmt_f64(r.second_tol),
                fmt_f64(r.second_times_rho),
                self.log_spacings
                    .get(i)
                    .map(|x| fmt_f64(*x))
                    .unwrap_or_default(),
            ]);
        }
        vec![("result".into(), t)]
    }
}

/// Step of the ln|c| scan; the tangencies are about 2 pi / omega apart.
const LN_STEP: f64 = 0.02;
const MAX_STEPS: usize = 200_000;

fn excess(m: &Model, c: f64) -> Result<f64> {
    Ok(nose_angle(m, c)?.excess())
}

/// Slope du/dtau of the crossing with u = 0 nearest the nose, searched over
/// tau_star +- |P_star| / kappa.
fn nose_crossing_probe(m: &Model, c: f64) -> Result<TangencyProbe> {
    let nose = nose_angle(m, c)?;
    let j = &m.spec.gmap_jet;
    let w = nose.rho() / j.alpha.hypot(j.gamma);
    let n = 400;
    let u = |tau: f64| -> Result<f64> { Ok(spiral_point(m, c, tau)?.p[0]) };
    let mut best: Option<f64> = None;
    let mut prev = (nose.tau_star - w, u(nose.tau_star - w)?);
    for i in 1..=n {
        let tau = nose.tau_star - w + 2.0 * w * i as f64 / n as f64;
        let ui = u(tau)?;
        if ui == 0.0 || ui.signum() != prev.1.signum() {
            let root = if ui == 0.0 {
                tau
            } else {
                illinois(u, prev.0, tau, 0.0, 200)?
            };
            if best.is_none_or(|b| (root - nose.tau_star).abs() < (b - nose.tau_star).abs()) {
                best = Some(root);
            }
        }
        prev = (tau, ui);
    }
    let root =
        best.ok_or_else(|| HetError::NoRoot(format!("no crossing near the nose at c = {c:e}")))?;
    let cp = spiral_point(m, c, root)?;
    let rho = nose.rho();
    Ok(TangencyProbe {
        value: cp.d1[0],
        t: root,
        point: cp.p,
        first: cp.d1[0],
        second: nose_certificate(m, &nose),
        second_tol: m.tol.quad_factor / rho,
        scale: rho,
    })
}

fn double_root(m: &Model, c_n: f64) -> Result<(f64, (f64, f64), TangencyProbe)> {
    let mut last = None;
    for w in [1e-4, 1e-3, 1e-2] {
        let (lo, hi) = (c_n * (1.0 + w), c_n * (1.0 - w));
        match find_tangency_in_parameter(lo, hi, |c| nose_crossing_probe(m, c)) {
            Ok(rec) => {
                let p = nose_crossing_probe(m, rec.scan)?;
                return Ok((rec.scan, (lo, hi), p));
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one bracket tried"))
}

/// First `count` tangency levels c_n < 0, scanning from c_start toward 0.
pub fn tangency_sequence_negative(
    m: &Model,
    c_start: f64,
    count: usize,
) -> Result<NegativeTangencyReport> {
    if m.spec.involution_case != InvolutionCase::Case1 {
        return Err(HetError::CaseMismatch {
            expected: InvolutionCase::Case1,
            found: m.spec.involution_case,
        });
    }
    if !(c_start < 0.0) || count == 0 {
        return Err(HetError::InvalidInput(
            "need c_start < 0 and count >= 1".into(),
        ));
    }
    m.check_level(c_start)?;
    let mut roots: Vec<(f64, i64)> = Vec::new();
    let mut c0 = c_start;
    let mut f0 = excess(m, c0)?;
    for k in 1..=MAX_STEPS {
        if roots.len() == count {
            break;
        }
        let c1 = c_start * (-(k as f64) * LN_STEP).exp();
        if c1 == 0.0 {
            break;
        }
        let f1 = excess(m, c1)?;
        let (k0, k1) = ((f0 / TAU).floor() as i64, (f1 / TAU).floor() as i64);
        if k0 != k1 {
            let w = k0.max(k1);
            let target = TAU * w as f64;
            let c = illinois(|c| Ok(excess(m, c)? - target), c0, c1, 0.0, 300)?;
            roots.push((c, w));
        }
        c0 = c1;
        f0 = f1;
    }
    let spacing_target = TAU / m.spec.omega;
    let mut records = Vec::new();
    for (index, &(c_nose, winding)) in roots.iter().enumerate() {
        let nose = nose_angle(m, c_nose)?;
        let (c_double, bracket, probe) = double_root(m, c_nose)?;
        let agree_rel = ((c_double - c_nose) / c_nose).abs();
        let rho = nose.rho();
        records.push(NegativeTangency {
            index,
            winding,
            c_nose,
            c_double,
            double_bracket: bracket,
            agree_rel,
            agree: agree_rel <= m.tol.agreement_rel,
            eta_nose: nose.eta_nose,
            rho,
            theta: nose.theta,
            theta_sym: nose.theta_sym,
            slope: probe.first,
            second: probe.second,
            second_tol: probe.second_tol,
            second_times_rho: probe.second.abs() * rho,
            quadratic: probe.second.abs() >= probe.second_tol,
        });
    }
    let log_spacings = records
        .windows(2)
        .map(|w| w[0].c_nose.abs().ln() - w[1].c_nose.abs().ln())
        .collect();
    let theta_advance = records
        .windows(2)
        .map(|w| w[1].theta - w[0].theta)
        .collect();
    let excess_advance = records
        .windows(2)
        .map(|w| (w[1].theta - w[1].theta_sym) - (w[0].theta - w[0].theta_sym))
        .collect();
    Ok(NegativeTangencyReport {
        c_start,
        requested: count,
        records,
        log_spacings,
        spacing_target,
        theta_advance,
        excess_advance,
    })
}
