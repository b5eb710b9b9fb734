use serde::{Deserialize, Serialize};

use crate::error::{HetError, Result};
use crate::roots::illinois;

/// What a scan-parameter probe reports about one curve: the scalar whose
/// zero marks the tangency, and the local certificate data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangencyProbe {
    /// Scalar g(scan) whose sign change brackets the tangency.
    pub value: f64,
    pub t: f64,
    pub point: [f64; 2],
    /// First derivative of the separation at the contact (should vanish).
    pub first: f64,
    /// Second derivative of the separation, as a graph over the target.
    pub second: f64,
    /// Threshold |second| must exceed for a quadratic certificate.
    pub second_tol: f64,
    /// Natural magnitude of `value` and `first`, for relative residuals.
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangencyRecord {
    pub scan: f64,
    pub bracket: (f64, f64),
    pub t: f64,
    pub point: [f64; 2],
    pub value: f64,
    pub first: f64,
    pub second: f64,
    pub second_tol: f64,
    pub scale: f64,
    pub quadratic: bool,
}

impl TangencyRecord {
    pub fn certify(&self) -> Result<()> {
        if self.quadratic {
            Ok(())
        } else {
            Err(HetError::DegenerateTangency {
                second: self.second.abs(),
                tol: self.second_tol,
            })
        }
    }
}

/// Solves g(scan) = 0 on [lo, hi] for the scalar reported by `probe`, then
/// re-probes at the root to attach the certificate.
pub fn find_tangency_in_parameter<P>(lo: f64, hi: f64, probe: P) -> Result<TangencyRecord>
where
    P: Fn(f64) -> Result<TangencyProbe>,
{
    let g_lo = probe(lo)?.value;
    let g_hi = probe(hi)?.value;
    if g_lo.signum() == g_hi.signum() && g_lo != 0.0 && g_hi != 0.0 {
        return Err(HetError::NoSignChange { lo, hi });
    }
    let s = illinois(|s| Ok(probe(s)?.value), lo, hi, 0.0, 300)?;
    let p = probe(s)?;
    Ok(TangencyRecord {
        scan: s,
        bracket: (lo, hi),
        t: p.t,
        point: p.point,
        value: p.value,
        first: p.first,
        second: p.second,
        second_tol: p.second_tol,
        scale: p.scale,
        quadratic: p.second.abs() >= p.second_tol,
    })
}
