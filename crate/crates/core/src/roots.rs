//! Scalar root finding shared by the curve and scan code.

use crate::error::{HetError, Result};

/// Illinois (modified regula falsi) on a bracket with a sign change.
/// Stops when |g| <= abs_tol or the bracket collapses to a few ulps.
pub fn illinois<F>(mut g: F, mut a: f64, mut b: f64, abs_tol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut fa = g(a)?;
    let mut fb = g(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(HetError::NoSignChange { lo: a, hi: b });
    }
    let mut side = 0i8;
    for _ in 0..max_iter {
        let mut x = (a * fb - b * fa) / (fb - fa);
        let lo = a.min(b);
        let hi = a.max(b);
        if !(x > lo && x < hi) {
            x = 0.5 * (a + b);
        }
        let fx = g(x)?;
        if fx.abs() <= abs_tol || fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fb.signum() {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            return Ok(if fa.abs() < fb.abs() { a } else { b });
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}

/// Plain bisection. Used where a sign is all that is trustworthy.
pub fn bisect<F>(mut g: F, mut a: f64, mut b: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let fa = g(a)?;
    let fb = g(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(HetError::NoSignChange { lo: a, hi: b });
    }
    let sa = fa.signum();
    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = g(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Newton iteration with an analytic derivative. `gd` returns (g, g').
/// Converges when the step is below rel_step * |x| (or absolutely tiny).
pub fn newton<F>(mut gd: F, x0: f64, rel_step: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let mut x = x0;
    for _ in 0..max_iter {
        let (g, d) = gd(x)?;
        if g == 0.0 {
            return Ok(x);
        }
        if d == 0.0 || !d.is_finite() || !g.is_finite() {
            return Err(HetError::NoConvergence(format!(
                "zero or invalid derivative at {x:e}"
            )));
        }
        let step = g / d;
        x -= step;
        if step.abs() <= rel_step * x.abs() || step.abs() < f64::MIN_POSITIVE {
            return Ok(x);
        }
    }
    Err(HetError::NoConvergence(format!("newton from {x0:e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn illinois_finds_cubic_root() {
        let r = illinois(|x| Ok(x * x * x - 2.0), 0.0, 2.0, 1e-15, 200).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn bisect_requires_sign_change() {
        assert!(matches!(
            bisect(|x| Ok(x * x + 1.0), -1.0, 1.0, 100),
            Err(HetError::NoSignChange { .. })
        ));
    }

    #[test]
    fn newton_sqrt() {
        let r = newton(|x| Ok((x * x - 2.0, 2.0 * x)), 1.0, 1e-15, 50).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }
}
