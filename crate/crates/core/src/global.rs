//! Affine symplectic global maps between the saddle cross-section and the
//! saddle-center disks, the involutions on both charts, and the one-parameter
//! family used for saddle-center loops.

use serde::{Deserialize, Serialize};

use crate::error::{HetError, Result};
use crate::model::Model;
use crate::points::{DiskPoint, Mat2, SigmaPoint};

/// Linear part of T1 at (r, 0) plus the level and family offsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalJet {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta_m: f64,
    pub a_lin: f64,
    pub b_lin: f64,
    /// a(mu) as [k, coefficient] pairs, k >= 1.
    #[serde(default)]
    pub fam_a: Vec<(u32, f64)>,
    #[serde(default)]
    pub fam_b: Vec<(u32, f64)>,
    /// nu(mu) - nu as [k, coefficient] pairs; empty means nu is fixed.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fam_nu: Vec<(u32, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedOffsets {
    pub a1: f64,
    pub b1: f64,
}

/// Result of T2: the point on the saddle cross-section and whether it landed
/// in the stable neighborhood box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct T2Image {
    pub point: SigmaPoint,
    pub in_box: bool,
}

/// (a(c), b(c)).
pub fn offsets(m: &Model, c: f64) -> (f64, f64) {
    let j = &m.spec.gmap_jet;
    (j.a_lin * c, j.b_lin * c)
}

pub fn derived_offsets(m: &Model, c: f64) -> DerivedOffsets {
    let j = &m.spec.gmap_jet;
    let (a, b) = offsets(m, c);
    DerivedOffsets {
        a1: j.gamma * a - j.alpha * b,
        b1: -j.delta_m * a + j.beta * b,
    }
}

/// Linear part of T1.
pub fn t1_linear(m: &Model) -> Mat2 {
    let j = &m.spec.gmap_jet;
    [[j.alpha, j.beta], [j.gamma, j.delta_m]]
}

/// Linear part of T2, derived from T1 and the involutions.
pub fn t2_linear(m: &Model) -> Mat2 {
    let j = &m.spec.gmap_jet;
    [[j.gamma, j.alpha], [-j.delta_m, -j.beta]]
}

pub fn in_unstable_box(m: &Model, p: SigmaPoint) -> bool {
    (p.u - m.spec.r).abs() <= m.spec.eps && p.v.abs() <= m.spec.delta_nb
}

pub fn in_stable_box(m: &Model, p: SigmaPoint) -> bool {
    p.u.abs() <= m.spec.delta_nb && (p.v - m.spec.r).abs() <= m.spec.eps
}

/// T1 without the neighborhood check.
pub fn t1_affine(m: &Model, c: f64, p: SigmaPoint) -> DiskPoint {
    let j = &m.spec.gmap_jet;
    let (a, b) = offsets(m, c);
    let du = p.u - m.spec.r;
    DiskPoint::new(
        a + j.alpha * du + j.beta * p.v,
        b + j.gamma * du + j.delta_m * p.v,
    )
}

pub fn t1_apply(m: &Model, c: f64, p: SigmaPoint) -> Result<DiskPoint> {
    if !in_unstable_box(m, p) {
        return Err(HetError::Domain(format!(
            "({:e}, {:e}) outside the unstable neighborhood",
            p.u, p.v
        )));
    }
    Ok(t1_affine(m, c, p))
}

pub fn t1_inverse(m: &Model, c: f64, q: DiskPoint) -> SigmaPoint {
    let j = &m.spec.gmap_jet;
    let (a, b) = offsets(m, c);
    let dx = q.x2 - a;
    let dy = q.y2 - b;
    SigmaPoint::new(
        m.spec.r + j.delta_m * dx - j.beta * dy,
        -j.gamma * dx + j.alpha * dy,
    )
}

/// T2 without the disk check.
pub fn t2_affine(m: &Model, c: f64, q: DiskPoint) -> SigmaPoint {
    let j = &m.spec.gmap_jet;
    let o = derived_offsets(m, c);
    SigmaPoint::new(
        o.a1 + j.gamma * q.x2 + j.alpha * q.y2,
        m.spec.r + o.b1 - j.delta_m * q.x2 - j.beta * q.y2,
    )
}

pub fn t2_apply(m: &Model, c: f64, q: DiskPoint) -> Result<T2Image> {
    m.check_eta(q.eta())?;
    let point = t2_affine(m, c, q);
    Ok(T2Image {
        point,
        in_box: in_stable_box(m, point),
    })
}

pub fn involution_sigma(p: SigmaPoint) -> SigmaPoint {
    SigmaPoint::new(p.v, p.u)
}

pub fn involution_disk(q: DiskPoint) -> DiskPoint {
    DiskPoint::new(-q.x2, q.y2)
}

/// (a(mu), b(mu)); adding +0.0 turns a signed zero into +0.0 so that mu = 0
/// matches the level model bit for bit.
pub fn family_offsets(m: &Model, mu: f64) -> (f64, f64) {
    (m.fam_a.eval(mu) + 0.0, m.fam_b.eval(mu) + 0.0)
}

pub fn family_nu(m: &Model, mu: f64) -> f64 {
    m.spec.nu + m.fam_nu.eval(mu)
}

/// f_mu(zeta) = nu(mu) + sum f_k zeta^k.
pub fn family_f(m: &Model, mu: f64, zeta: f64) -> Result<f64> {
    m.check_zeta(zeta)?;
    Ok(family_nu(m, mu) + (m.f_deriv(zeta, 0) - m.spec.nu))
}

pub fn family_t2(m: &Model, mu: f64, q: DiskPoint) -> Result<T2Image> {
    m.check_eta(q.eta())?;
    let j = &m.spec.gmap_jet;
    let (a, b) = family_offsets(m, mu);
    let point = SigmaPoint::new(
        a + j.gamma * q.x2 + j.alpha * q.y2,
        m.spec.r + b - j.delta_m * q.x2 - j.beta * q.y2,
    );
    Ok(T2Image {
        point,
        in_box: in_stable_box(m, point),
    })
}

/// Family T1, derived from family T2 by reversibility: T1 = L o T2^-1 o L.
pub fn family_t1(m: &Model, mu: f64, p: SigmaPoint) -> Result<DiskPoint> {
    if !in_unstable_box(m, p) {
        return Err(HetError::Domain(format!(
            "({:e}, {:e}) outside the unstable neighborhood",
            p.u, p.v
        )));
    }
    Ok(family_t1_affine(m, mu, p))
}

pub fn family_t1_affine(m: &Model, mu: f64, p: SigmaPoint) -> DiskPoint {
    let j = &m.spec.gmap_jet;
    let (a, b) = family_offsets(m, mu);
    let p_off = -(j.beta * a + j.alpha * b) + 0.0;
    let q_off = -(j.delta_m * a + j.gamma * b) + 0.0;
    let du = p.u - m.spec.r;
    DiskPoint::new(
        p_off + j.alpha * du + j.beta * p.v,
        q_off + j.gamma * du + j.delta_m * p.v,
    )
}

pub fn family_s(m: &Model, mu: f64, p: SigmaPoint) -> Result<SigmaPoint> {
    family_s_n(m, mu, p, 1)
}

pub fn family_s_n(m: &Model, mu: f64, p: SigmaPoint, n: i32) -> Result<SigmaPoint> {
    let f = family_f(m, mu, p.zeta())?.powi(n);
    Ok(SigmaPoint::new(p.u / f, p.v * f))
}
