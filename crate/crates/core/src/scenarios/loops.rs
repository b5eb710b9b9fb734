//! Saddle-center loops in the one-parameter family: parameters mu_n where
//! T1 o S^{2n} o T2 returns the disk center to itself.

use serde::Serialize;

use crate::error::{HetError, Result};
use crate::global::{family_f, family_nu, family_offsets, t1_linear, t2_linear};
use crate::model::Model;
use crate::points::{det2, mat_mul, trace2, Mat2};
use crate::roots::illinois;
use crate::scenarios::{fmt_f64, fmt_opt, Report, Table};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LoopRecord {
    pub n: i32,
    pub mu: f64,
    pub bracket: (f64, f64),
    /// Loop equation residual at mu.
    pub residual: f64,
    pub residual_ok: bool,
    /// mu a'(0) / (nu^{2n} r); tends to 1.
    pub asymptotic_ratio: f64,
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// 2 - 2A^2 - B^2 - C^2; negative certifies four solutions.
    pub g1: f64,
    pub four_solutions: bool,
    /// Linearization of T1 o S^{2n} o T2 at the loop.
    pub jacobian: Mat2,
    pub jacobian_det: f64,
    pub jacobian_trace: f64,
    /// Four-solution inequality for a general unimodular matrix.
    pub general_lhs: f64,
    pub general_rhs: f64,
    pub general_ok: bool,
}

impl LoopRecord {
    pub fn certified(&self) -> bool {
        self.residual_ok && self.four_solutions && self.general_ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopReport {
    pub mu_max: f64,
    pub a_prime: f64,
    pub records: Vec<LoopRecord>,
    pub failures: Vec<(i32, String)>,
    /// mu_{n+1} / mu_n for consecutive certified n, against nu^2.
    pub ratios: Vec<(i32, f64)>,
    pub same_sign: bool,
}

impl Report for LoopReport {
    const NAME: &'static str = "loops";

    fn certified(&self) -> bool {
        !self.records.is_empty()
            && self.failures.is_empty()
            && self.same_sign
            && self.records.iter().all(|r| r.certified())
    }

    fn tables(&self) -> Vec<(String, Table)> {
        let mut t = Table::new(&[
            "n",
            "mu_n",
            "residual",
            "asymptotic_ratio",
            "ratio_next",
            "A",
            "B",
            "C",
            "D",
            "g1",
            "four_solutions",
            "jacobian_trace",
            "general_ok",
        ]);
        for r in &self.records {
            let ratio = self.ratios.iter().find(|(n, _)| *n == r.n).map(|x| x.1);
            t.push(vec![
                r.n.to_string(),
                fmt_f64(r.mu),
                fmt_f64(r.residual),
                fmt_f64(r.asymptotic_ratio),
                fmt_opt(ratio),
                fmt_f64(r.a),
                fmt_f64(r.b),
                fmt_f64(r.c),
                fmt_f64(r.d),
                fmt_f64(r.g1),
                r.four_solutions.to_string(),
                fmt_f64(r.jacobian_trace),
                r.general_ok.to_string(),
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

/// a(mu) - (r + b(mu)) f_mu^{2n}(a(mu) (r + b(mu))).
fn loop_residual(m: &Model, n: i32, mu: f64) -> Result<f64> {
    let (a, b) = family_offsets(m, mu);
    let w = m.spec.r + b;
    Ok(a - w * family_f(m, mu, a * w)?.powi(2 * n))
}

fn solve_one(m: &Model, n: i32, a1: f64, mu_max: f64) -> Result<LoopRecord> {
    let side = a1.signum();
    let pred = m.spec.nu.powi(2 * n) * m.spec.r / a1.abs();
    let mut lo = 0.5 * pred;
    let mut hi = (2.0 * pred).min(mu_max);
    if !(lo < hi) {
        return Err(HetError::NoBracket(format!(
            "predicted |mu_{n}| = {pred:e} beyond mu_max = {mu_max:e}"
        )));
    }
    let g = |x: f64| loop_residual(m, n, side * x);
    let mut found = false;
    for _ in 0..60 {
        let (gl, gh) = (g(lo)?, g(hi)?);
        if gl == 0.0 || gh == 0.0 || gl.signum() != gh.signum() {
            found = true;
            break;
        }
        lo *= 0.5;
        hi = (2.0 * hi).min(mu_max);
    }
    if !found {
        return Err(HetError::NoBracket(format!(
            "no sign change for n = {n} within mu_max = {mu_max:e}"
        )));
    }
    let x = illinois(g, lo, hi, 0.0, 300)?;
    let mu = side * x;
    let residual = loop_residual(m, n, mu)?;
    let nu = family_nu(m, mu);
    let lambda = nu.powi(-n);
    let j = &m.spec.gmap_jet;
    let (al, be, ga, de) = (j.alpha, j.beta, j.gamma, j.delta_m);
    let ad = al * ga * lambda - be * de / lambda;
    let bb = al * al * lambda - be * be / lambda;
    let cc = ga * ga * lambda - de * de / lambda;
    let g1 = 2.0 - 2.0 * ad * ad - bb * bb - cc * cc;
    let jacobian = loop_jacobian(m, n, mu)?;
    let [[ja, jb], [jc, jd]] = jacobian;
    let s2 = ja * ja + jb * jb + jc * jc + jd * jd;
    let general_lhs = (2.0 - s2).powi(2);
    let general_rhs =
        4.0 * (ja * jb + jc * jd).powi(2) + (ja * ja + jc * jc - jb * jb - jd * jd).powi(2);
    Ok(LoopRecord {
        n,
        mu,
        bracket: (side * lo, side * hi),
        residual,
        residual_ok: residual.abs() <= 1e-12 * mu.abs(),
        asymptotic_ratio: mu * a1 / (m.spec.nu.powi(2 * n) * m.spec.r),
        lambda,
        a: ad,
        b: bb,
        c: cc,
        d: ad,
        g1,
        four_solutions: g1 < 0.0,
        jacobian,
        jacobian_det: det2(&jacobian),
        jacobian_trace: trace2(&jacobian),
        general_lhs,
        general_rhs,
        general_ok: general_lhs < general_rhs,
    })
}

/// D(T1 o S^{2n} o T2) at the disk center, with the family's f.
fn loop_jacobian(m: &Model, n: i32, mu: f64) -> Result<Mat2> {
    let (a, b) = family_offsets(m, mu);
    let (u, v) = (a, m.spec.r + b);
    let z = u * v;
    let k = 2 * n;
    let f = family_f(m, mu, z)?;
    let big = f.powi(k);
    let d1 = k as f64 * f.powi(k - 1) * m.f_deriv(z, 1);
    let h = 1.0 / big;
    let h1 = -d1 * h * h;
    let ds = [[h + u * h1 * v, u * h1 * u], [v * d1 * v, big + v * d1 * u]];
    Ok(mat_mul(&t1_linear(m), &mat_mul(&ds, &t2_linear(m))))
}

/// mu_n for n in [n_lo, n_hi] on the side where a(mu) > 0.
pub fn loop_parameters(m: &Model, n_lo: i32, n_hi: i32, mu_max: f64) -> Result<LoopReport> {
    if !(1 <= n_lo && n_lo <= n_hi) {
        return Err(HetError::InvalidInput(format!(
            "n range {n_lo}..{n_hi} must be ordered and >= 1"
        )));
    }
    if !(mu_max > 0.0) {
        return Err(HetError::InvalidInput("mu_max must be positive".into()));
    }
    let a1 = m.fam_a.linear();
    if a1 == 0.0 {
        return Err(HetError::Genericity("a'(0) = 0 in the family".into()));
    }
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for n in n_lo..=n_hi {
        match solve_one(m, n, a1, mu_max) {
            Ok(r) => records.push(r),
            Err(e) => failures.push((n, e.to_string())),
        }
    }
    let ratios = records
        .windows(2)
        .filter(|w| w[1].n == w[0].n + 1)
        .map(|w| (w[0].n, w[1].mu / w[0].mu))
        .collect();
    let same_sign = records
        .windows(2)
        .all(|w| w[0].mu.signum() == w[1].mu.signum());
    Ok(LoopReport {
        mu_max,
        a_prime: a1,
        records,
        failures,
        ratios,
        same_sign,
    })
}
