//! Manifold traces on the cross-sections: spiral images of the separatrix
//! traces through the transit map, ellipse images of the Lyapunov circle,
//! and the nose of the spiral for negative levels.

use serde::{Deserialize, Serialize};

use crate::error::{HetError, Result};
use crate::geometry::curve::{Chart, CurvePoint, Grid, PlanarCurve};
use crate::global::{derived_offsets, offsets, t1_linear, t2_linear};
use crate::model::{InvolutionCase, Model};
use crate::points::{mat_vec, Mat2};
use crate::transit::{lyapunov_radius, transit_angle, transit_angle_jet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpiralBranch {
    Positive,
    Negative,
}

impl SpiralBranch {
    pub fn sign(self) -> f64 {
        match self {
            SpiralBranch::Positive => 1.0,
            SpiralBranch::Negative => -1.0,
        }
    }
}

/// Line in a disk, rotated by +-Delta(eta) and mapped affinely to a chart.
struct SpiralMap {
    c: f64,
    p0: [f64; 2],
    pd: [f64; 2],
    rot: f64,
    out_m: Mat2,
    out_o: [f64; 2],
    pref: [f64; 2],
}

fn jmul(q: [f64; 2]) -> [f64; 2] {
    [-q[1], q[0]]
}

fn rot(q: [f64; 2], a: f64) -> [f64; 2] {
    let (s, c) = a.sin_cos();
    [q[0] * c - q[1] * s, q[0] * s + q[1] * c]
}

impl SpiralMap {
    fn unstable(m: &Model, c: f64) -> Self {
        let j = &m.spec.gmap_jet;
        let (a, b) = offsets(m, c);
        let o = derived_offsets(m, c);
        let p0 = [a, b];
        let pd = [j.alpha, j.gamma];
        Self {
            c,
            p0,
            pd,
            rot: 1.0,
            out_m: t2_linear(m),
            out_o: [o.a1, m.spec.r + o.b1],
            pref: reference_direction(p0, pd),
        }
    }

    /// Preimage of {u = 0} under G, parametrized by v = r + sigma on the
    /// stable side and pulled back through T2^-1, T^-1 and T1^-1.
    fn stable(m: &Model, c: f64) -> Self {
        let j = &m.spec.gmap_jet;
        let (a, b) = offsets(m, c);
        let o = derived_offsets(m, c);
        let p0 = [
            j.beta * o.a1 + j.alpha * o.b1,
            -j.delta_m * o.a1 - j.gamma * o.b1,
        ];
        let pd = [-j.alpha, j.gamma];
        let inv = [[j.delta_m, -j.beta], [-j.gamma, j.alpha]];
        let ab = mat_vec(&inv, [a, b]);
        Self {
            c,
            p0,
            pd,
            rot: -1.0,
            out_m: inv,
            out_o: [m.spec.r - ab[0], -ab[1]],
            pref: reference_direction(p0, pd),
        }
    }

    fn point(&self, m: &Model, tau: f64) -> Result<CurvePoint> {
        if tau.abs() > m.spec.eps {
            return Err(HetError::Domain(format!(
                "|tau| = {:e} exceeds eps",
                tau.abs()
            )));
        }
        let p = [self.p0[0] + tau * self.pd[0], self.p0[1] + tau * self.pd[1]];
        let eta = 0.5 * (p[0] * p[0] + p[1] * p[1]);
        if eta == 0.0 {
            return Err(HetError::DomainExit { tau });
        }
        let aj = transit_angle_jet(m, self.c, eta).map_err(|e| {
            if e.is_transit_exit() {
                HetError::DomainExit { tau }
            } else {
                e
            }
        })?;
        let e1 = p[0] * self.pd[0] + p[1] * self.pd[1];
        let e2 = self.pd[0] * self.pd[0] + self.pd[1] * self.pd[1];
        let dl = self.rot * aj.value;
        let dl1 = self.rot * aj.d1 * e1;
        let dl2 = self.rot * (aj.d2 * e1 * e1 + aj.d1 * e2);
        let q = rot(p, dl);
        let rpd = rot(self.pd, dl);
        let jq = jmul(q);
        let q1 = [dl1 * jq[0] + rpd[0], dl1 * jq[1] + rpd[1]];
        let jq1 = jmul(q1);
        let jrpd = jmul(rpd);
        let q2 = [
            dl2 * jq[0] + dl1 * jq1[0] + dl1 * jrpd[0],
            dl2 * jq[1] + dl1 * jq1[1] + dl1 * jrpd[1],
        ];
        let out = mat_vec(&self.out_m, q);
        let cross = self.pref[0] * p[1] - self.pref[1] * p[0];
        let dot = self.pref[0] * p[0] + self.pref[1] * p[1];
        let phi = self.pref[1].atan2(self.pref[0]) + cross.atan2(dot);
        let phi1 = (p[0] * self.pd[1] - p[1] * self.pd[0]) / (2.0 * eta);
        Ok(CurvePoint {
            t: tau,
            p: [out[0] + self.out_o[0], out[1] + self.out_o[1]],
            d1: mat_vec(&self.out_m, q1),
            d2: mat_vec(&self.out_m, q2),
            phase: Some(phi + dl),
            phase_rate: Some(phi1 + dl1),
        })
    }
}

fn reference_direction(p0: [f64; 2], pd: [f64; 2]) -> [f64; 2] {
    // closest point of the line to the origin, or the line direction when
    // the line passes through the origin
    let k2 = pd[0] * pd[0] + pd[1] * pd[1];
    let ts = -(p0[0] * pd[0] + p0[1] * pd[1]) / k2;
    let ps = [p0[0] + ts * pd[0], p0[1] + ts * pd[1]];
    if ps[0].hypot(ps[1]) > 0.0 {
        ps
    } else {
        pd
    }
}

fn reparam(cp: CurvePoint, s: f64, sign: f64) -> CurvePoint {
    CurvePoint {
        t: s,
        d1: [sign * cp.d1[0], sign * cp.d1[1]],
        phase_rate: cp.phase_rate.map(|r| sign * r),
        ..cp
    }
}

/// Point of the unstable trace G(r + tau, 0) on the stable side, with
/// tau-derivatives and the unwrapped disk phase.
pub fn spiral_point(m: &Model, c: f64, tau: f64) -> Result<CurvePoint> {
    SpiralMap::unstable(m, c).point(m, tau)
}

/// Point of the stable trace (preimage of u = 0) on the unstable side,
/// parametrized by v = r + sigma of the stable axis.
pub fn stable_point(m: &Model, c: f64, sigma: f64) -> Result<CurvePoint> {
    SpiralMap::stable(m, c).point(m, sigma)
}

/// Unstable trace over tau = anchor + sign * s, s in [s_lo, s_hi], sampled
/// on a geometric grid in s. A sample outside the transit domain ends the
/// construction with DomainExit carrying its tau.
pub fn unstable_trace<'a>(
    m: &'a Model,
    c: f64,
    anchor: f64,
    branch: SpiralBranch,
    s_lo: f64,
    s_hi: f64,
) -> Result<PlanarCurve<'a>> {
    let map = SpiralMap::unstable(m, c);
    let sign = branch.sign();
    PlanarCurve::build(
        Chart::Sigma,
        s_lo,
        s_hi,
        Grid::Geometric,
        Box::new(move |s| Ok(reparam(map.point(m, anchor + sign * s)?, s, sign))),
        &m.tol,
    )
}

/// Unstable trace for tau in [tau_lo, tau_hi] on one side of tau = 0.
pub fn unstable_trace_spiral<'a>(
    m: &'a Model,
    c: f64,
    tau_lo: f64,
    tau_hi: f64,
    branch: SpiralBranch,
) -> Result<PlanarCurve<'a>> {
    unstable_trace(m, c, 0.0, branch, tau_lo, tau_hi)
}

/// Stable trace on the unstable side, sigma = anchor + sign * s.
pub fn stable_trace<'a>(
    m: &'a Model,
    c: f64,
    anchor: f64,
    branch: SpiralBranch,
    s_lo: f64,
    s_hi: f64,
) -> Result<PlanarCurve<'a>> {
    let map = SpiralMap::stable(m, c);
    let sign = branch.sign();
    PlanarCurve::build(
        Chart::Sigma,
        s_lo,
        s_hi,
        Grid::Geometric,
        Box::new(move |s| Ok(reparam(map.point(m, anchor + sign * s)?, s, sign))),
        &m.tol,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CircleWhich {
    /// T2 image of the Lyapunov circle on the exit disk, on the stable side.
    SigmaU,
    /// T1^-1 image of the Lyapunov circle on the entry disk, on the unstable side.
    SigmaS,
}

/// Point of the affine image of the circle of radius rho at angle theta.
pub fn ellipse_point(m: &Model, c: f64, rho: f64, which: CircleWhich, theta: f64) -> CurvePoint {
    let (s, co) = theta.sin_cos();
    let q = [rho * co, rho * s];
    let q1 = [-rho * s, rho * co];
    let q2 = [-q[0], -q[1]];
    let (mm, o) = match which {
        CircleWhich::SigmaU => {
            let d = derived_offsets(m, c);
            (t2_linear(m), [d.a1, m.spec.r + d.b1])
        }
        CircleWhich::SigmaS => {
            let j = &m.spec.gmap_jet;
            let inv = [[j.delta_m, -j.beta], [-j.gamma, j.alpha]];
            let (a, b) = offsets(m, c);
            let ab = mat_vec(&inv, [a, b]);
            (inv, [m.spec.r - ab[0], -ab[1]])
        }
    };
    let p = mat_vec(&mm, q);
    CurvePoint {
        t: theta,
        p: [p[0] + o[0], p[1] + o[1]],
        d1: mat_vec(&mm, q1),
        d2: mat_vec(&mm, q2),
        phase: Some(theta),
        phase_rate: Some(1.0),
    }
}

/// Image of the Lyapunov circle eta = eta_c (c > 0), theta in [0, 2 pi].
pub fn circle_image<'a>(m: &'a Model, c: f64, which: CircleWhich) -> Result<PlanarCurve<'a>> {
    let rho = lyapunov_radius(m, c)?;
    PlanarCurve::build(
        Chart::Sigma,
        0.0,
        std::f64::consts::TAU,
        Grid::Linear,
        Box::new(move |t| Ok(ellipse_point(m, c, rho, which, t))),
        &m.tol,
    )
}

/// The nose of the negative-level spiral: the point of the T1-image of
/// {v = 0} closest to the origin, and its rotated angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoseAngle {
    pub c: f64,
    pub tau_star: f64,
    pub eta_nose: f64,
    /// Polar angle of the nose point on the entry disk.
    pub phi: f64,
    pub delta: f64,
    /// theta = phi + Delta_c(eta_nose), unwrapped.
    pub theta: f64,
    /// Angle at which the stable line touches the same circle: pi - phi.
    pub theta_sym: f64,
}

impl NoseAngle {
    /// theta - theta_sym; a tangency occurs when this is a multiple of 2 pi.
    pub fn excess(&self) -> f64 {
        self.theta - self.theta_sym
    }

    pub fn rho(&self) -> f64 {
        (2.0 * self.eta_nose).sqrt()
    }
}

pub fn nose_angle(m: &Model, c: f64) -> Result<NoseAngle> {
    if m.spec.involution_case != InvolutionCase::Case1 {
        return Err(HetError::CaseMismatch {
            expected: InvolutionCase::Case1,
            found: m.spec.involution_case,
        });
    }
    if !(c < 0.0) {
        return Err(HetError::InvalidInput(format!(
            "nose angle needs c < 0, got {c:e}"
        )));
    }
    m.check_level(c)?;
    let j = &m.spec.gmap_jet;
    if j.gamma * j.a_lin - j.alpha * j.b_lin == 0.0 {
        return Err(HetError::Genericity(
            "a1'(0) = 0: the nose is undefined at leading order".into(),
        ));
    }
    let (a, b) = offsets(m, c);
    let k2 = j.alpha * j.alpha + j.gamma * j.gamma;
    let tau_star = -(a * j.alpha + b * j.gamma) / k2;
    let ps = [a + j.alpha * tau_star, b + j.gamma * tau_star];
    let eta_nose = 0.5 * (ps[0] * ps[0] + ps[1] * ps[1]);
    let phi = ps[1].atan2(ps[0]);
    let delta = transit_angle(m, c, eta_nose)?;
    Ok(NoseAngle {
        c,
        tau_star,
        eta_nose,
        phi,
        delta,
        theta: phi + delta,
        theta_sym: std::f64::consts::PI - phi,
    })
}

/// d2u/dv2 of the ellipse T2(circle of radius rho_nose) at theta_sym, where
/// the rotated nose sits at a tangency: the curvature certificate of the
/// contact with the vertical line u = 0.
pub fn nose_certificate(m: &Model, nose: &NoseAngle) -> f64 {
    let cp = ellipse_point(m, nose.c, nose.rho(), CircleWhich::SigmaU, nose.theta_sym);
    let (u1, v1) = (cp.d1[0], cp.d1[1]);
    let (u2, v2) = (cp.d2[0], cp.d2[1]);
    (u2 * v1 - u1 * v2) / v1.powi(3)
}

/// Phase of the unstable spiral at tau with eta as the only input, used to
/// predict crossing counts from transit-angle differences.
pub fn spiral_eta(m: &Model, c: f64, tau: f64) -> f64 {
    let p = mat_vec(&t1_linear(m), [tau, 0.0]);
    let (a, b) = offsets(m, c);
    let q = [a + p[0], b + p[1]];
    0.5 * (q[0] * q[0] + q[1] * q[1])
}
