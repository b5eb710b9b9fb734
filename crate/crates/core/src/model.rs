use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HetError, Result};
use crate::global::GlobalJet;
use crate::tolerances::Tolerances;

/// Which of the two involution normal forms acts near the saddle-center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InvolutionCase {
    Case1,
    Case2,
}

/// Full normal-form model. Field names match the JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub omega: f64,
    pub d: f64,
    pub nu: f64,
    pub r: f64,
    pub eps: f64,
    pub delta_nb: f64,
    pub involution_case: InvolutionCase,
    /// Remainder R(xi, eta) as [i, j, r_ij] triples, i + j >= 2.
    #[serde(rename = "R_coeffs", default)]
    pub r_coeffs: Vec<(u32, u32, f64)>,
    /// f(zeta) = nu + sum f_k zeta^k as [k, f_k] pairs, k >= 1.
    #[serde(default)]
    pub f_coeffs: Vec<(u32, f64)>,
    pub gmap_jet: GlobalJet,
    pub eta_star: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
}

impl SystemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| HetError::InvalidSpec(e.to_string()))
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("spec serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn tau_floor_or_default(&self) -> f64 {
        self.tau_floor.unwrap_or(1e-8 * self.r)
    }
}

/// Sparse bivariate polynomial sum c_ij x^i y^j.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Poly2 {
    terms: Vec<(u32, u32, f64)>,
}

fn falling(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64)
}

impl Poly2 {
    pub fn new(terms: &[(u32, u32, f64)]) -> Self {
        Self {
            terms: terms.to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.2 == 0.0)
    }

    /// d^(p+q) / dx^p dy^q evaluated at (x, y).
    pub fn partial(&self, x: f64, y: f64, p: u32, q: u32) -> f64 {
        let mut s = 0.0;
        for &(i, j, c) in &self.terms {
            if i < p || j < q {
                continue;
            }
            s +=
                c * falling(i, p) * falling(j, q) * x.powi((i - p) as i32) * y.powi((j - q) as i32);
        }
        s
    }
}

/// Univariate polynomial c0 + sum c_k z^k.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Poly1 {
    c0: f64,
    terms: Vec<(u32, f64)>,
}

impl Poly1 {
    pub fn new(c0: f64, terms: &[(u32, f64)]) -> Self {
        Self {
            c0,
            terms: terms.to_vec(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.1 == 0.0)
    }

    pub fn deriv(&self, z: f64, m: u32) -> f64 {
        let mut s = if m == 0 { self.c0 } else { 0.0 };
        for &(k, c) in &self.terms {
            if k < m {
                continue;
            }
            s += c * falling(k, m) * z.powi((k - m) as i32);
        }
        s
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.deriv(z, 0)
    }

    /// Coefficient of z^1.
    pub fn linear(&self) -> f64 {
        self.terms.iter().filter(|t| t.0 == 1).map(|t| t.1).sum()
    }

    /// Interval bound on |p(z) - c0| for |z| <= zmax.
    pub fn radius(&self, zmax: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(k, c)| c.abs() * zmax.powi(k as i32))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: String,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedLimits {
    pub zeta_max: f64,
    pub xi_bound: f64,
    pub c_max: f64,
    pub k0: i64,
    pub tau_floor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
    pub derived: Option<DerivedLimits>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub const K0_SATURATION: i64 = 1_000_000;

/// Integer part of ln((eps + r)/delta) / ln(1/nu). A 1e-9 guard absorbs
/// rounding when the ratio is an exact integer, and the result saturates.
pub fn k0_formula(eps: f64, r: f64, delta: f64, nu: f64) -> i64 {
    let ratio = ((eps + r) / delta).ln() / (1.0 / nu).ln();
    if !ratio.is_finite() || ratio >= K0_SATURATION as f64 {
        return K0_SATURATION;
    }
    (ratio + 1e-9).floor().max(0.0) as i64
}

struct Jets {
    r_poly: Poly2,
    f_poly: Poly1,
}

impl Jets {
    fn new(spec: &SystemSpec) -> Self {
        Self {
            r_poly: Poly2::new(&spec.r_coeffs),
            f_poly: Poly1::new(spec.nu, &spec.f_coeffs),
        }
    }
}

fn h_partial(spec: &SystemSpec, r: &Poly2, xi: f64, eta: f64, p: u32, q: u32) -> f64 {
    let lin = match (p, q) {
        (0, 0) => -xi + spec.omega * eta,
        (1, 0) => -1.0,
        (0, 1) => spec.omega,
        _ => 0.0,
    };
    lin + r.partial(xi, eta, p, q)
}

/// Root of h(xi, eta) = c in xi: Newton seeded at omega*eta - c, bisection
/// on [-xi_b, xi_b] when Newton fails.
fn level_root(spec: &SystemSpec, r: &Poly2, c: f64, eta: f64, xi_b: f64) -> Option<f64> {
    let g = |x: f64| h_partial(spec, r, x, eta, 0, 0) - c;
    let mut x = spec.omega * eta - c;
    if r.is_zero() {
        return Some(x);
    }
    for _ in 0..50 {
        let d = h_partial(spec, r, x, eta, 1, 0);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let step = g(x) / d;
        x -= step;
        if !x.is_finite() {
            break;
        }
        if step.abs() <= 1e-15 * x.abs().max(1e-300) {
            return Some(x);
        }
    }
    let (lo, hi) = (-xi_b, xi_b);
    let (glo, ghi) = (g(lo), g(hi));
    if glo.signum() == ghi.signum() {
        return None;
    }
    crate::roots::bisect(|x| Ok(g(x)), lo, hi, 200).ok()
}

fn c_limit(spec: &SystemSpec, r: &Poly2) -> Option<f64> {
    let xi_b = spec.d * spec.d;
    let grid: Vec<f64> = (0..=32).map(|i| spec.eta_star * i as f64 / 32.0).collect();
    let ok = |c: f64| {
        grid.iter()
            .all(|&eta| match level_root(spec, r, c, eta, xi_b) {
                Some(a) => {
                    let slope =
                        -h_partial(spec, r, a, eta, 0, 1) / h_partial(spec, r, a, eta, 1, 0);
                    a.abs() <= xi_b && slope > 0.0
                }
                None => false,
            })
    };
    if !ok(0.0) {
        return None;
    }
    (0..60)
        .map(|j| xi_b * 0.5f64.powi(j))
        .find(|&c| ok(c) && ok(-c))
}

/// Checks every structural inequality of the model. Never fails; the report
/// carries the violations.
pub fn validate_spec(spec: &SystemSpec) -> ValidationReport {
    let mut v: Vec<Violation> = Vec::new();
    let mut warnings = Vec::new();
    fn push_to(v: &mut Vec<Violation>, rule: &str, detail: String) {
        v.push(Violation {
            rule: rule.to_string(),
            detail,
        })
    }
    macro_rules! push {
        ($rule:expr, $detail:expr $(,)?) => {
            push_to(&mut v, $rule, $detail)
        };
    }
    let tau_floor = spec.tau_floor_or_default();
    for (name, x) in [
        ("omega", spec.omega),
        ("d", spec.d),
        ("r", spec.r),
        ("eps", spec.eps),
        ("delta_nb", spec.delta_nb),
        ("eta_star", spec.eta_star),
        ("tau_floor", tau_floor),
    ] {
        if !(x.is_finite() && x > 0.0) {
            push!(
                "positive parameter",
                format!("{name} = {x} must be finite and > 0")
            );
        }
    }
    let nu = spec.nu;
    let nu_ok = nu > 0.0 && nu < 1.0;
    if !nu_ok {
        push!("ν ∈ (0,1)", format!("nu = {nu}"));
    }
    let bound = spec.r * (1.0 - nu) / (1.0 + nu);
    if nu_ok && spec.delta_nb >= bound {
        push!(
            "δ < r(1−ν)/(1+ν)",
            format!("delta_nb = {} >= {}", spec.delta_nb, bound),
        );
    }
    if spec.delta_nb >= spec.r - spec.eps {
        push!(
            "δ < r − ε",
            format!("delta_nb = {} >= {}", spec.delta_nb, spec.r - spec.eps),
        );
    }
    if spec.eps + spec.r <= spec.delta_nb {
        push!("ε + r > δ", format!("eps + r = {}", spec.eps + spec.r));
    }
    let j = &spec.gmap_jet;
    let det = j.alpha * j.delta_m - j.beta * j.gamma;
    if !det.is_finite() || (det - 1.0).abs() > 1e-12 {
        push!("αδ − βγ = 1", format!("determinant = {det}"));
    }
    if spec
        .r_coeffs
        .iter()
        .any(|t| t.0 + t.1 < 2 || !t.2.is_finite())
    {
        push!(
            "R has only terms of order ≥ 2",
            "R_coeffs contains a term with i + j < 2 or a non-finite value".into(),
        );
    }
    let bad_table = |t: &[(u32, f64)]| t.iter().any(|e| e.0 < 1 || !e.1.is_finite());
    if bad_table(&spec.f_coeffs) {
        push!(
            "f_k defined for k ≥ 1",
            "f_coeffs has k = 0 or a non-finite value".into()
        );
    }
    if bad_table(&j.fam_a) || bad_table(&j.fam_b) || bad_table(&j.fam_nu) {
        push!(
            "a(0) = b(0) = 0",
            "family tables must have k ≥ 1 and finite values".into(),
        );
    }
    for (name, x) in [
        ("alpha", j.alpha),
        ("beta", j.beta),
        ("gamma", j.gamma),
        ("delta_m", j.delta_m),
        ("a_lin", j.a_lin),
        ("b_lin", j.b_lin),
    ] {
        if !x.is_finite() {
            push!("finite global jet", format!("{name} = {x}"));
        }
    }
    if !v.is_empty() {
        return ValidationReport {
            violations: v,
            warnings,
            derived: None,
        };
    }

    let jets = Jets::new(spec);
    let zeta_max = (spec.r + spec.eps) * spec.delta_nb;
    let cap = 0.5 * (1.0 + nu);
    let rad = jets.f_poly.radius(zeta_max);
    if nu + rad > cap || nu - rad <= 0.0 {
        push!(
            "|f(ζ)| ≤ (1+ν)/2 < 1 on |ζ| ≤ ζ_max",
            format!(
                "interval bound [{}, {}] not inside (0, {cap}]",
                nu - rad,
                nu + rad
            ),
        );
    } else {
        for i in 0..=200 {
            let z = zeta_max * (i as f64 / 100.0 - 1.0);
            let f = jets.f_poly.eval(z);
            if !(f > 0.0 && f <= cap) {
                push!(
                    "|f(ζ)| ≤ (1+ν)/2 < 1 on |ζ| ≤ ζ_max",
                    format!("f({z}) = {f}")
                );
                break;
            }
        }
    }
    let c_max = c_limit(spec, &jets.r_poly);
    if c_max.is_none() {
        push!(
            "a_c monotone on [0, η★]",
            "the level curve a_c leaves |ξ| ≤ d² or loses monotonicity even at c = 0".into(),
        );
    }

    if j.gamma * j.a_lin - j.alpha * j.b_lin == 0.0 {
        warnings.push("genericity: a1'(0) = γ·a_lin − α·b_lin vanishes; negative-level tangency scans are unavailable".into());
    }
    if Poly1::new(0.0, &j.fam_a).linear() == 0.0 {
        warnings.push(
            "genericity: a'(0) of the μ-family vanishes; loop parameters are unavailable".into(),
        );
    }

    let derived = c_max.map(|c_max| DerivedLimits {
        zeta_max,
        xi_bound: spec.d * spec.d,
        c_max,
        k0: k0_formula(spec.eps, spec.r, spec.delta_nb, nu),
        tau_floor,
    });
    ValidationReport {
        violations: v,
        warnings,
        derived,
    }
}

/// A validated model: the spec plus everything derived from it.
#[derive(Debug, Clone)]
pub struct Model {
    pub spec: SystemSpec,
    pub limits: DerivedLimits,
    pub warnings: Vec<String>,
    pub tol: Tolerances,
    r_poly: Poly2,
    f_poly: Poly1,
    pub(crate) fam_a: Poly1,
    pub(crate) fam_b: Poly1,
    pub(crate) fam_nu: Poly1,
}

impl Model {
    pub fn new(spec: SystemSpec) -> Result<Self> {
        let report = validate_spec(&spec);
        if !report.passed() {
            let msg: Vec<String> = report
                .violations
                .iter()
                .map(|v| format!("{}: {}", v.rule, v.detail))
                .collect();
            return Err(HetError::InvalidSpec(msg.join("; ")));
        }
        let limits = report
            .derived
            .expect("derived limits exist for a passing spec");
        let jets = Jets::new(&spec);
        let tol = spec.tolerances.clone().unwrap_or_default();
        let j = &spec.gmap_jet;
        Ok(Self {
            fam_a: Poly1::new(0.0, &j.fam_a),
            fam_b: Poly1::new(0.0, &j.fam_b),
            fam_nu: Poly1::new(0.0, &j.fam_nu),
            r_poly: jets.r_poly,
            f_poly: jets.f_poly,
            limits,
            warnings: report.warnings,
            tol,
            spec,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::new(SystemSpec::from_json(text)?)
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn tau_floor(&self) -> f64 {
        self.limits.tau_floor
    }

    pub fn r_is_zero(&self) -> bool {
        self.r_poly.is_zero()
    }

    pub fn f_is_constant(&self) -> bool {
        self.f_poly.is_constant()
    }

    /// Partial derivative of h without domain checks.
    pub fn h_partial(&self, xi: f64, eta: f64, p: u32, q: u32) -> f64 {
        h_partial(&self.spec, &self.r_poly, xi, eta, p, q)
    }

    pub(crate) fn level_root_raw(&self, c: f64, eta: f64) -> Option<f64> {
        level_root(&self.spec, &self.r_poly, c, eta, self.limits.xi_bound)
    }

    pub fn check_eta(&self, eta: f64) -> Result<()> {
        if !(eta >= 0.0 && eta <= self.spec.eta_star) {
            return Err(HetError::Domain(format!(
                "eta = {eta:e} outside [0, eta_star = {:e}]",
                self.spec.eta_star
            )));
        }
        Ok(())
    }

    pub fn check_level(&self, c: f64) -> Result<()> {
        if !(c.abs() <= self.limits.c_max) {
            return Err(HetError::Domain(format!(
                "|c| = {:e} exceeds c_max = {:e}",
                c.abs(),
                self.limits.c_max
            )));
        }
        Ok(())
    }

    pub fn check_zeta(&self, zeta: f64) -> Result<()> {
        if !(zeta.abs() <= self.limits.zeta_max) {
            return Err(HetError::Domain(format!(
                "|zeta| = {:e} exceeds zeta_max = {:e}",
                zeta.abs(),
                self.limits.zeta_max
            )));
        }
        Ok(())
    }

    /// h(xi, eta) = -xi + omega*eta + R(xi, eta).
    pub fn eval_h(&self, xi: f64, eta: f64) -> Result<f64> {
        if !(xi.abs() <= self.limits.xi_bound) {
            return Err(HetError::Domain(format!(
                "|xi| = {:e} exceeds d^2 = {:e}",
                xi.abs(),
                self.limits.xi_bound
            )));
        }
        self.check_eta(eta)?;
        Ok(self.h_partial(xi, eta, 0, 0))
    }

    /// m-th derivative of f without domain checks.
    pub fn f_deriv(&self, zeta: f64, m: u32) -> f64 {
        self.f_poly.deriv(zeta, m)
    }

    pub fn eval_f(&self, zeta: f64) -> Result<f64> {
        self.check_zeta(zeta)?;
        Ok(self.f_poly.eval(zeta))
    }

    pub fn eval_f_pow(&self, zeta: f64, n: i32) -> Result<f64> {
        Ok(self.eval_f(zeta)?.powi(n))
    }

    /// f, f', f'' at zeta (domain checked).
    pub fn f_jet(&self, zeta: f64) -> Result<(f64, f64, f64)> {
        self.check_zeta(zeta)?;
        Ok((
            self.f_poly.eval(zeta),
            self.f_poly.deriv(zeta, 1),
            self.f_poly.deriv(zeta, 2),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn spec_json(extra: &str) -> String {
        format!(
            r#"{{"omega":2.0,"d":0.2,"nu":0.5,"r":0.1,"eps":0.02,"delta_nb":0.03,
            "involution_case":"Case1","R_coeffs":[],"f_coeffs":[],
            "gmap_jet":{{"alpha":1.0,"beta":0.0,"gamma":1.0,"delta_m":1.0,
            "a_lin":1.0,"b_lin":0.0,"fam_a":[[1,1.0]],"fam_b":[]}},
            "eta_star":0.01{extra}}}"#
        )
    }

    fn spec() -> SystemSpec {
        SystemSpec::from_json(&spec_json("")).unwrap()
    }

    #[test]
    fn reference_passes() {
        let rep = validate_spec(&spec());
        assert!(rep.passed(), "{:?}", rep.violations);
        let d = rep.derived.unwrap();
        assert_eq!(d.k0, 2);
        assert!((d.zeta_max - 0.0036).abs() < 1e-15);
        assert!((d.c_max - 0.02).abs() < 1e-17);
        assert_eq!(d.tau_floor, 1e-9);
    }

    #[test]
    fn wide_delta_fails_named_rule() {
        let mut s = spec();
        s.delta_nb = 0.05;
        let rep = validate_spec(&s);
        assert!(rep.violations.iter().any(|v| v.rule == "δ < r(1−ν)/(1+ν)"));
    }

    #[test]
    fn nu_out_of_range() {
        let mut s = spec();
        s.nu = 1.2;
        let rep = validate_spec(&s);
        assert!(rep.violations.iter().any(|v| v.rule == "ν ∈ (0,1)"));
    }

    #[test]
    fn determinant_enforced() {
        let mut s = spec();
        s.gmap_jet.beta = 0.5;
        let rep = validate_spec(&s);
        assert!(rep.violations.iter().any(|v| v.rule == "αδ − βγ = 1"));
    }

    #[test]
    fn large_f_coefficient_rejected() {
        let mut s = spec();
        s.f_coeffs = vec![(1, 100.0)];
        let rep = validate_spec(&s);
        assert!(rep.violations.iter().any(|v| v.rule.starts_with("|f(ζ)|")));
    }

    #[test]
    fn genericity_is_a_warning() {
        let mut s = spec();
        s.gmap_jet.a_lin = 0.0;
        let rep = validate_spec(&s);
        assert!(rep.passed());
        assert!(rep.warnings.iter().any(|w| w.contains("a1'(0)")));
    }

    #[test]
    fn validation_is_idempotent() {
        let s = spec();
        assert_eq!(validate_spec(&s), validate_spec(&s));
    }

    #[test]
    fn k0_examples() {
        assert_eq!(k0_formula(0.02, 0.1, 0.03, 0.5), 2);
        assert_eq!(k0_formula(0.02, 0.1, 0.012, 0.5), 3);
        assert_eq!(k0_formula(0.02, 0.1, 0.03, 1.0 - 1e-15), K0_SATURATION);
    }

    #[test]
    fn linear_h_is_exact() {
        let m = Model::new(spec()).unwrap();
        assert_eq!(m.eval_h(0.01, 0.005).unwrap(), 0.0);
        assert_eq!(m.eval_h(0.0, 0.003).unwrap(), 0.006);
        assert!(m.eval_h(0.0, 0.02).is_err());
    }

    #[test]
    fn poly2_partials() {
        let p = Poly2::new(&[(2, 0, 1.0), (1, 2, 3.0)]);
        assert_eq!(p.partial(0.5, 2.0, 0, 0), 0.25 + 3.0 * 0.5 * 4.0);
        assert_eq!(p.partial(0.5, 2.0, 1, 0), 1.0 + 12.0);
        assert_eq!(p.partial(0.5, 2.0, 1, 1), 12.0);
        assert_eq!(p.partial(0.5, 2.0, 0, 2), 3.0);
        assert_eq!(p.partial(0.5, 2.0, 3, 0), 0.0);
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(spec().digest(), spec().digest());
        let mut s = spec();
        s.omega = 2.5;
        assert_ne!(s.digest(), spec().digest());
    }
}
