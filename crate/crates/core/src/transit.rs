//! Local dynamics near the saddle-center: level curves a_c(eta), the
//! rotation angle Delta_c(eta) and the transit map between the entry and
//! exit disks.

use serde::{Deserialize, Serialize};

use crate::error::{HetError, Result};
use crate::model::{InvolutionCase, Model};
use crate::points::{DiskPoint, Mat2};

/// a_c and its first three eta-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelJet {
    pub a: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

/// Delta_c and its first two eta-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovRoot {
    pub eta: f64,
    /// Sign changes of a_c on the sampled (0, eta_star]; 1 means unique.
    pub sign_changes: usize,
}

/// xi = a_c(eta), the root of h(xi, eta) = c.
pub fn level_curve(m: &Model, c: f64, eta: f64) -> Result<f64> {
    m.check_eta(eta)?;
    m.check_level(c)?;
    let a = m.level_root_raw(c, eta).ok_or_else(|| {
        HetError::NoConvergence(format!("level curve at c = {c:e}, eta = {eta:e}"))
    })?;
    let res = (m.h_partial(a, eta, 0, 0) - c).abs();
    if res > m.tol.newton_rel * c.abs().max(1.0) {
        return Err(HetError::NoConvergence(format!(
            "level curve residual {res:e} at c = {c:e}, eta = {eta:e}"
        )));
    }
    Ok(a)
}

pub fn level_curve_jet(m: &Model, c: f64, eta: f64) -> Result<LevelJet> {
    let a = level_curve(m, c, eta)?;
    if m.r_is_zero() {
        return Ok(LevelJet {
            a,
            a1: m.spec.omega,
            a2: 0.0,
            a3: 0.0,
        });
    }
    let h = |p, q| m.h_partial(a, eta, p, q);
    let hx = h(1, 0);
    let a1 = -h(0, 1) / hx;
    let a2 = -(h(2, 0) * a1 * a1 + 2.0 * h(1, 1) * a1 + h(0, 2)) / hx;
    let a3 = -(h(3, 0) * a1.powi(3)
        + 3.0 * h(2, 1) * a1 * a1
        + 3.0 * h(1, 2) * a1
        + h(0, 3)
        + 3.0 * a2 * (h(2, 0) * a1 + h(1, 1)))
        / hx;
    Ok(LevelJet { a, a1, a2, a3 })
}

/// a_c'(eta) = -h_eta / h_xi on the level curve.
pub fn level_curve_slope(m: &Model, c: f64, eta: f64) -> Result<f64> {
    Ok(level_curve_jet(m, c, eta)?.a1)
}

fn log_arg(m: &Model, a: f64) -> Result<f64> {
    let d2 = m.spec.d * m.spec.d;
    match m.spec.involution_case {
        InvolutionCase::Case1 if a > 0.0 => Ok((d2 / a).ln()),
        InvolutionCase::Case2 if a < 0.0 => Ok((-d2 / a).ln()),
        _ => Err(HetError::WrongSideOfCylinder { a }),
    }
}

/// Delta_c(eta), kept unwrapped.
pub fn transit_angle(m: &Model, c: f64, eta: f64) -> Result<f64> {
    Ok(transit_angle_jet(m, c, eta)?.value)
}

pub fn transit_angle_jet(m: &Model, c: f64, eta: f64) -> Result<AngleJet> {
    let j = level_curve_jet(m, c, eta)?;
    let l = log_arg(m, j.a)?;
    let ra = 1.0 / j.a;
    Ok(AngleJet {
        value: j.a1 * l,
        d1: j.a2 * l - j.a1 * j.a1 * ra,
        d2: j.a3 * l - 3.0 * j.a1 * j.a2 * ra + j.a1.powi(3) * ra * ra,
    })
}

pub fn rotate(p: DiskPoint, angle: f64) -> DiskPoint {
    let (s, c) = angle.sin_cos();
    DiskPoint::new(p.x2 * c - p.y2 * s, p.x2 * s + p.y2 * c)
}

/// Rotation of p by Delta_c(eta(p)).
pub fn transit_map(m: &Model, c: f64, p: DiskPoint) -> Result<DiskPoint> {
    let eta = p.eta();
    if eta == 0.0 {
        return Err(HetError::EtaZero);
    }
    Ok(rotate(p, transit_angle(m, c, eta)?))
}

/// DT = R + Delta_eta (J R p) p^T.
pub fn transit_jacobian(m: &Model, c: f64, p: DiskPoint) -> Result<Mat2> {
    let eta = p.eta();
    if eta == 0.0 {
        return Err(HetError::EtaZero);
    }
    let aj = transit_angle_jet(m, c, eta)?;
    let (s, co) = aj.value.sin_cos();
    let q = rotate(p, aj.value);
    let jq = [-q.y2, q.x2];
    let k = aj.d1;
    Ok([
        [co + k * jq[0] * p.x2, -s + k * jq[0] * p.y2],
        [s + k * jq[1] * p.x2, co + k * jq[1] * p.y2],
    ])
}

/// eta_c > 0 with a_c(eta_c) = 0, the Lyapunov orbit trace on the disks.
pub fn lyapunov_eta(m: &Model, c: f64) -> Result<LyapunovRoot> {
    if !(c > 0.0) {
        return Err(HetError::NoRoot(format!(
            "no Lyapunov orbit at c = {c:e} <= 0"
        )));
    }
    m.check_level(c)?;
    let g = |eta: f64| m.h_partial(0.0, eta, 0, 0) - c;
    let n = 256;
    let es = m.spec.eta_star;
    let mut brackets = Vec::new();
    let mut prev = (0.0, g(0.0));
    for i in 1..=n {
        let e = es * i as f64 / n as f64;
        let ge = g(e);
        if ge == 0.0 || ge.signum() != prev.1.signum() {
            brackets.push((prev.0, e));
        }
        prev = (e, ge);
    }
    let Some(&(lo, hi)) = brackets.first() else {
        return Err(HetError::NoRoot(format!(
            "a_c has no zero on (0, eta_star] at c = {c:e}"
        )));
    };
    let eta = if m.r_is_zero() {
        c / m.spec.omega
    } else {
        let e = crate::roots::bisect(|x| Ok(g(x)), lo, hi, 200)?;
        // one Newton polish
        let d = m.h_partial(0.0, e, 0, 1);
        let e2 = e - g(e) / d;
        if e2 > lo && e2 < hi && g(e2).abs() <= g(e).abs() {
            e2
        } else {
            e
        }
    };
    if g(eta).abs() > m.tol.newton_rel * c.abs().max(1.0) {
        return Err(HetError::NoConvergence(format!(
            "Lyapunov root residual at c = {c:e}"
        )));
    }
    Ok(LyapunovRoot {
        eta,
        sign_changes: brackets.len(),
    })
}

/// Radius sqrt(2 eta_c) of the Lyapunov circle on the disks.
pub fn lyapunov_radius(m: &Model, c: f64) -> Result<f64> {
    Ok((2.0 * lyapunov_eta(m, c)?.eta).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SystemSpec;

    fn model(case: &str, r: &str) -> Model {
        let s = format!(
            r#"{{"omega":2.0,"d":0.2,"nu":0.5,"r":0.1,"eps":0.02,"delta_nb":0.03,
            "involution_case":"{case}","R_coeffs":{r},"gmap_jet":{{"alpha":1.0,"beta":0.0,
            "gamma":1.0,"delta_m":1.0,"a_lin":1.0,"b_lin":0.0}},"eta_star":0.01}}"#
        );
        Model::new(SystemSpec::from_json(&s).unwrap()).unwrap()
    }

    #[test]
    fn linear_level_curve() {
        let m = model("Case1", "[]");
        assert_eq!(level_curve(&m, 0.0, 0.005).unwrap(), 0.01);
        assert_eq!(level_curve(&m, -0.01, 0.0).unwrap(), 0.01);
        assert_eq!(level_curve_slope(&m, 0.003, 0.002).unwrap(), 2.0);
    }

    #[test]
    fn quadratic_remainder_level_curve() {
        let m = model("Case1", "[[2,0,1.0]]");
        let a = level_curve(&m, 0.0, 0.005).unwrap();
        let want = crate::roots::bisect(|x| Ok(-x + x * x + 0.01), 0.0, 0.02, 200).unwrap();
        assert!((a - want).abs() < 1e-15);
        let s = level_curve_slope(&m, 0.0, 0.005).unwrap();
        assert!((s - 2.0 / (1.0 - 2.0 * a)).abs() < 1e-13);
    }

    #[test]
    fn angle_examples() {
        let m = model("Case1", "[]");
        let d = transit_angle(&m, 0.0, 0.005).unwrap();
        assert!((d - 2.0 * 4f64.ln()).abs() < 1e-15);
        let m2 = model("Case2", "[]");
        let d2 = transit_angle(&m2, 0.01, 0.002).unwrap();
        assert!((d2 - 2.0 * (0.04f64 / 0.006).ln()).abs() < 1e-14);
        assert!(matches!(
            transit_angle(&m2, 0.01, 0.008),
            Err(HetError::WrongSideOfCylinder { .. })
        ));
    }

    #[test]
    fn map_examples() {
        let m = model("Case1", "[]");
        let q = transit_map(&m, 0.0, DiskPoint::new(0.1, 0.0)).unwrap();
        let d = 2.0 * 4f64.ln();
        assert!((q.x2 - 0.1 * d.cos()).abs() < 1e-17 && (q.y2 - 0.1 * d.sin()).abs() < 1e-17);
        assert!((q.x2 + 0.0932687).abs() < 1e-7 && (q.y2 - 0.0360687).abs() < 1e-7);
        assert_eq!(
            transit_map(&m, 0.0, DiskPoint::new(0.0, 0.0)),
            Err(HetError::EtaZero)
        );
        let r = rotate(DiskPoint::new(0.1, 0.0), std::f64::consts::FRAC_PI_2);
        assert!(r.x2.abs() < 1e-17 && (r.y2 - 0.1).abs() < 1e-17);
    }

    #[test]
    fn lyapunov_examples() {
        let m = model("Case1", "[]");
        let root = lyapunov_eta(&m, 0.01).unwrap();
        assert_eq!(root.eta, 0.005);
        assert_eq!(root.sign_changes, 1);
        assert!(matches!(lyapunov_eta(&m, 0.0), Err(HetError::NoRoot(_))));
        assert!(matches!(lyapunov_eta(&m, -1e-3), Err(HetError::NoRoot(_))));
        let mq = model("Case1", "[[0,2,1.0]]");
        let e = lyapunov_eta(&mq, 0.01).unwrap().eta;
        assert!((2.0 * e + e * e - 0.01).abs() < 1e-16);
        assert!((e / 0.005 - 1.0).abs() < 0.01);
    }

    #[test]
    fn jet_matches_finite_differences() {
        let m = model("Case1", "[[2,0,1.0],[1,1,0.5],[0,3,2.0]]");
        let (c, eta, h) = (-0.002, 0.004, 1e-5);
        let j = level_curve_jet(&m, c, eta).unwrap();
        let a = |e| level_curve(&m, c, e).unwrap();
        let fd1 = (a(eta + h) - a(eta - h)) / (2.0 * h);
        let fd2 = (a(eta + h) - 2.0 * a(eta) + a(eta - h)) / (h * h);
        let fd3 = (a(eta + 2.0 * h) - 2.0 * a(eta + h) + 2.0 * a(eta - h) - a(eta - 2.0 * h))
            / (2.0 * h.powi(3));
        assert!((j.a1 - fd1).abs() < 1e-8);
        assert!((j.a2 - fd2).abs() < 1e-4 * j.a2.abs().max(1.0));
        assert!((j.a3 - fd3).abs() < 1e-2 * j.a3.abs().max(1.0));
        let aj = transit_angle_jet(&m, c, eta).unwrap();
        let d = |e| transit_angle(&m, c, e).unwrap();
        let fdd1 = (d(eta + h) - d(eta - h)) / (2.0 * h);
        let fdd2 = (d(eta + h) - 2.0 * d(eta) + d(eta - h)) / (h * h);
        assert!(
            (aj.d1 - fdd1).abs() < 1e-5 * aj.d1.abs(),
            "{} {}",
            aj.d1,
            fdd1
        );
        assert!((aj.d2 - fdd2).abs() < 1e-4 * aj.d2.abs());
    }
}
