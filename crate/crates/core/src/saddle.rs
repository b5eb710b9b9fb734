//! Moser normal form of the Poincare map near the saddle periodic orbit:
//! S(u, v) = (u / f(zeta), v f(zeta)), zeta = u v.

use serde::{Deserialize, Serialize};

use crate::error::{HetError, Result};
use crate::model::Model;
use crate::points::{Mat2, SigmaPoint};

/// A point of a parametrized curve with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointJet {
    pub p: [f64; 2],
    pub d1: [f64; 2],
    pub d2: [f64; 2],
}

pub fn s_apply(m: &Model, p: SigmaPoint) -> Result<SigmaPoint> {
    s_apply_n(m, p, 1)
}

pub fn s_inverse(m: &Model, p: SigmaPoint) -> Result<SigmaPoint> {
    s_apply_n(m, p, -1)
}

/// S^n in closed form through the invariance of zeta; negative n iterates
/// the inverse.
pub fn s_apply_n(m: &Model, p: SigmaPoint, n: i32) -> Result<SigmaPoint> {
    let f = m.eval_f_pow(p.zeta(), n)?;
    Ok(SigmaPoint::new(p.u / f, p.v * f))
}

/// F = f^n and its first two zeta-derivatives.
fn power_jet(m: &Model, zeta: f64, n: i32) -> Result<(f64, f64, f64)> {
    let (f, f1, f2) = m.f_jet(zeta)?;
    let nf = n as f64;
    let big = f.powi(n);
    let d1 = nf * f.powi(n - 1) * f1;
    let d2 = nf * (nf - 1.0) * f.powi(n - 2) * f1 * f1 + nf * f.powi(n - 1) * f2;
    Ok((big, d1, d2))
}

/// Analytic Jacobian of S^n.
pub fn s_jacobian_n(m: &Model, p: SigmaPoint, n: i32) -> Result<Mat2> {
    let (big, d1, _) = power_jet(m, p.zeta(), n)?;
    let h = 1.0 / big;
    let h1 = -d1 * h * h;
    Ok([
        [h + p.u * h1 * p.v, p.u * h1 * p.u],
        [p.v * d1 * p.v, big + p.v * d1 * p.u],
    ])
}

/// Image of a curve jet under S^n.
pub fn s_curve_jet(m: &Model, c: &PointJet, n: i32) -> Result<PointJet> {
    let [u, v] = c.p;
    let [u1, v1] = c.d1;
    let [u2, v2] = c.d2;
    let z = u * v;
    let z1 = u1 * v + u * v1;
    let z2 = u2 * v + 2.0 * u1 * v1 + u * v2;
    let (fb, fb1, fb2) = power_jet(m, z, n)?;
    let h = 1.0 / fb;
    let h1 = -fb1 * h * h;
    let h2 = -fb2 * h * h + 2.0 * fb1 * fb1 * h * h * h;
    Ok(PointJet {
        p: [u * h, v * fb],
        d1: [u1 * h + u * h1 * z1, v1 * fb + v * fb1 * z1],
        d2: [
            u2 * h + 2.0 * u1 * h1 * z1 + u * h2 * z1 * z1 + u * h1 * z2,
            v2 * fb + 2.0 * v1 * fb1 * z1 + v * fb2 * z1 * z1 + v * fb1 * z2,
        ],
    })
}

pub fn k0_threshold(m: &Model) -> i64 {
    m.limits.k0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StripSide {
    Plus,
    Minus,
}

/// One boundary curve u = s_k^side(v) of the strip sigma_k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripBoundary {
    pub k: i64,
    pub side: StripSide,
}

impl StripBoundary {
    pub fn u_at(&self, m: &Model, v: f64) -> Result<f64> {
        strip_boundary(m, self.k, self.side, v)
    }
}

/// (u, du/dv, d2u/dv2).
pub type GraphJet = (f64, f64, f64);

pub fn strip_boundary(m: &Model, k: i64, side: StripSide, v: f64) -> Result<f64> {
    Ok(strip_boundary_jet(m, k, side, v)?.0)
}

/// Solves zeta / f^k(zeta) = v (r +- eps) and returns u = zeta / v with its
/// v-derivatives from the implicit equation.
pub fn strip_boundary_jet(m: &Model, k: i64, side: StripSide, v: f64) -> Result<GraphJet> {
    let k0 = k0_threshold(m);
    if k <= k0 {
        return Err(HetError::KBelowThreshold { k, k0 });
    }
    // Slack of a few ulps so the box edges v = r +- eps stay admissible.
    if !((v - m.spec.r).abs() <= m.spec.eps * (1.0 + 1e-12)) {
        return Err(HetError::Domain(format!("|v - r| > eps at v = {v:e}")));
    }
    let ki = i32::try_from(k)
        .map_err(|_| HetError::InvalidInput(format!("strip index {k} too large")))?;
    let w = match side {
        StripSide::Plus => m.spec.r + m.spec.eps,
        StripSide::Minus => m.spec.r - m.spec.eps,
    };
    let target = v * w;
    let kf = k as f64;
    let g_jet = |z: f64| -> Result<(f64, f64, f64)> {
        let (f, f1, f2) = m.f_jet(z)?;
        let fk = f.powi(-ki);
        let fk1 = fk / f;
        let fk2 = fk1 / f;
        let g = z * fk;
        let g1 = fk - kf * z * f1 * fk1;
        let g2 = -2.0 * kf * f1 * fk1 - kf * z * f2 * fk1 + kf * (kf + 1.0) * z * f1 * f1 * fk2;
        Ok((g, g1, g2))
    };
    let seed = m.spec.nu.powi(ki) * target;
    let z = crate::roots::newton(
        |z| {
            let (g, g1, _) = g_jet(z)?;
            Ok((g - target, g1))
        },
        seed,
        1e-15,
        60,
    )?;
    let (g, g1, g2) = g_jet(z)?;
    if (g - target).abs() > 1e-14 * target.abs().max(1e-300) * 4.0 {
        return Err(HetError::NoConvergence(format!(
            "strip boundary residual at v = {v:e}"
        )));
    }
    let z1 = w / g1;
    let z2 = -g2 * z1 * z1 / g1;
    Ok(graph_from_zeta(z, z1, z2, v))
}

fn graph_from_zeta(z: f64, z1: f64, z2: f64, v: f64) -> GraphJet {
    let iv = 1.0 / v;
    (
        z * iv,
        z1 * iv - z * iv * iv,
        z2 * iv - 2.0 * z1 * iv * iv + 2.0 * z * iv * iv * iv,
    )
}

pub fn diagonal_preimage(m: &Model, n: i32, v: f64) -> Result<f64> {
    Ok(diagonal_preimage_jet(m, n, v)?.0)
}

/// u = u_n(v): S^n maps (u, v) onto the diagonal u = v, i.e.
/// zeta = v^2 f^{2n}(zeta).
pub fn diagonal_preimage_jet(m: &Model, n: i32, v: f64) -> Result<GraphJet> {
    if n < 1 {
        return Err(HetError::InvalidInput(format!(
            "diagonal preimage needs n >= 1, got {n}"
        )));
    }
    if v == 0.0 || !v.is_finite() {
        return Err(HetError::Domain(format!("diagonal preimage at v = {v:e}")));
    }
    let v2 = v * v;
    let seed = v2 * m.spec.nu.powi(2 * n);
    let z = crate::roots::newton(
        |z| {
            let (p, p1, _) = power_jet(m, z, 2 * n)?;
            Ok((z - v2 * p, 1.0 - v2 * p1))
        },
        seed,
        1e-15,
        60,
    )?;
    let (p, p1, p2) = power_jet(m, z, 2 * n)?;
    let res = (z - v2 * p).abs();
    if res > 1e-14 * z.abs().max(1e-300) * 4.0 {
        return Err(HetError::NoConvergence(format!(
            "diagonal preimage residual {res:e}"
        )));
    }
    let fz = 1.0 - v2 * p1;
    let fv = -2.0 * v * p;
    let fzz = -v2 * p2;
    let fzv = -2.0 * v * p1;
    let fvv = -2.0 * p;
    let z1 = -fv / fz;
    let z2 = -(fzz * z1 * z1 + 2.0 * fzv * z1 + fvv) / fz;
    Ok(graph_from_zeta(z, z1, z2, v))
}
