//! Return map G = T2 o T(c) o T1 from the unstable to the stable
//! neighborhood, and the strip maps F_k = G o S^k.

use crate::error::{HetError, Result};
use crate::global::{t1_apply, t1_linear, t2_affine, t2_linear};
use crate::model::Model;
use crate::points::{mat_mul, DiskPoint, Mat2, SigmaPoint};
use crate::saddle::{s_apply_n, s_jacobian_n};
use crate::transit::{transit_jacobian, transit_map};

pub fn return_map(m: &Model, c: f64, p: SigmaPoint) -> Result<SigmaPoint> {
    let q = t1_apply(m, c, p)?;
    let q = transit_map(m, c, q)?;
    Ok(t2_affine(m, c, q))
}

pub fn return_map_jacobian(m: &Model, c: f64, p: SigmaPoint) -> Result<Mat2> {
    let q: DiskPoint = t1_apply(m, c, p)?;
    let dt = transit_jacobian(m, c, q)?;
    Ok(mat_mul(&t2_linear(m), &mat_mul(&dt, &t1_linear(m))))
}

/// F_k(p) = G(S^k(p)); S^k(p) must land in the unstable neighborhood.
pub fn strip_map(m: &Model, c: f64, k: i32, p: SigmaPoint) -> Result<SigmaPoint> {
    let q = s_apply_n(m, p, k)?;
    return_map(m, c, q)
}

pub fn strip_map_jacobian(m: &Model, c: f64, k: i32, p: SigmaPoint) -> Result<Mat2> {
    let q = s_apply_n(m, p, k)?;
    let dg = return_map_jacobian(m, c, q)?;
    let ds = s_jacobian_n(m, p, k)?;
    Ok(mat_mul(&dg, &ds))
}

/// Central finite-difference Jacobian of a planar map.
pub fn fd_jacobian<F>(f: F, p: SigmaPoint, h: [f64; 2]) -> Result<Mat2>
where
    F: Fn(SigmaPoint) -> Result<SigmaPoint>,
{
    if h[0] <= 0.0 || h[1] <= 0.0 {
        return Err(HetError::InvalidInput(
            "finite-difference steps must be positive".into(),
        ));
    }
    let mut j = [[0.0; 2]; 2];
    for col in 0..2 {
        let mut a = p;
        let mut b = p;
        if col == 0 {
            a.u += h[0];
            b.u -= h[0];
        } else {
            a.v += h[1];
            b.v -= h[1];
        }
        let fa = f(a)?;
        let fb = f(b)?;
        j[0][col] = (fa.u - fb.u) / (2.0 * h[col]);
        j[1][col] = (fa.v - fb.v) / (2.0 * h[col]);
    }
    Ok(j)
}
