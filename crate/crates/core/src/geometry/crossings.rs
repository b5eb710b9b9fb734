use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::curve::PlanarCurve;
use crate::geometry::functional::Functional;
use crate::roots::illinois;
use crate::tolerances::Tolerances;

/// A located zero of a crossing functional along a curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntersectionRecord {
    pub t: f64,
    pub point: [f64; 2],
    pub value: f64,
    /// dF/dt from the analytic curve derivative.
    pub derivative: f64,
    /// dF/dt from a central difference of the point evaluator.
    pub derivative_fd: f64,
    pub phase: Option<f64>,
    pub phase_rate: Option<f64>,
    pub transversal: bool,
    pub fd_agrees: bool,
}

/// A located critical point of a functional along a curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremumRecord {
    pub t: f64,
    pub point: [f64; 2],
    pub value: f64,
    pub first: f64,
    pub second: f64,
    pub speed: f64,
    pub d1: [f64; 2],
    pub d2: [f64; 2],
}

struct Scan {
    t: f64,
    f: f64,
    df: f64,
}

fn scan<F: Functional + ?Sized>(curve: &PlanarCurve, func: &F) -> Result<(Vec<Scan>, f64, f64)> {
    let mut out = Vec::with_capacity(curve.samples().len());
    let mut fmax: f64 = 0.0;
    let mut dmax: f64 = 0.0;
    for s in curve.samples() {
        let (f, df, _) = func.along(s)?;
        fmax = fmax.max(f.abs());
        dmax = dmax.max(df.abs());
        out.push(Scan { t: s.t, f, df });
    }
    Ok((out, fmax, dmax))
}

/// Every sign change of the functional along the sample chain, refined to
/// root_rel times the functional's sample scale. A crossing is transversal
/// when the sine of the angle between curve and level set exceeds
/// transversal_rel.
pub fn find_crossings<F: Functional + ?Sized>(
    curve: &PlanarCurve,
    func: &F,
    tol: &Tolerances,
) -> Result<Vec<IntersectionRecord>> {
    let (pts, fmax, _) = scan(curve, func)?;
    let tol_root = tol.root_rel * fmax;
    let value_at = |t: f64| -> Result<f64> { Ok(func.along(&curve.eval(t)?)?.0) };
    let mut out = Vec::new();
    for (i, w) in pts.windows(2).enumerate() {
        let (a, b) = (&w[0], &w[1]);
        let t = if a.f == 0.0 {
            if i > 0 {
                continue;
            }
            a.t
        } else if b.f == 0.0 {
            b.t
        } else if a.f.signum() != b.f.signum() {
            illinois(value_at, a.t, b.t, tol_root, 200)?
        } else {
            continue;
        };
        let cp = curve.eval(t)?;
        let (value, derivative, _) = func.along(&cp)?;
        let (_, g, _) = func.jet(cp.p)?;
        let sine = derivative.abs() / (g[0].hypot(g[1]) * cp.speed());
        let h = curve.fd_step(t, tol.fd_step);
        let derivative_fd = (value_at(t + h)? - value_at(t - h)?) / (2.0 * h);
        out.push(IntersectionRecord {
            t,
            point: cp.p,
            value,
            derivative,
            derivative_fd,
            phase: cp.phase,
            phase_rate: cp.phase_rate,
            transversal: sine > tol.transversal_rel,
            fd_agrees: (derivative - derivative_fd).abs() <= tol.fd_agree * derivative.abs(),
        });
    }
    Ok(out)
}

/// Critical points of the functional along the curve (sign changes of dF/dt).
pub fn find_extrema<F: Functional + ?Sized>(
    curve: &PlanarCurve,
    func: &F,
    tol: &Tolerances,
) -> Result<Vec<ExtremumRecord>> {
    let (pts, _, dmax) = scan(curve, func)?;
    let tol_root = tol.root_rel * dmax;
    let slope_at = |t: f64| -> Result<f64> { Ok(func.along(&curve.eval(t)?)?.1) };
    let mut out = Vec::new();
    for (i, w) in pts.windows(2).enumerate() {
        let (a, b) = (&w[0], &w[1]);
        let t = if a.df == 0.0 {
            if i > 0 {
                continue;
            }
            a.t
        } else if b.df == 0.0 {
            b.t
        } else if a.df.signum() != b.df.signum() {
            illinois(slope_at, a.t, b.t, tol_root, 200)?
        } else {
            continue;
        };
        let cp = curve.eval(t)?;
        let (value, first, second) = func.along(&cp)?;
        out.push(ExtremumRecord {
            t,
            point: cp.p,
            value,
            first,
            second,
            speed: cp.speed(),
            d1: cp.d1,
            d2: cp.d2,
        });
    }
    Ok(out)
}
