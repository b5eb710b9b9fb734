//! Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned.
//! Runs with its own main so the lines are always printed.

use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use hetlab_core::global::{in_stable_box, involution_disk, involution_sigma, t1_apply, t2_affine};
use hetlab_core::poincare::{fd_jacobian, return_map, strip_map};
use hetlab_core::points::det2;
use hetlab_core::saddle::{k0_threshold, s_apply, s_inverse, strip_boundary, StripSide};
use hetlab_core::scenarios::*;
use hetlab_core::transit::{lyapunov_radius, transit_map};
use hetlab_core::{DiskPoint, Model, SigmaPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const POINTS: usize = 1000;

fn spec_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../specs")
        .join(name)
}

fn load(name: &str) -> Model {
    Model::from_json(&std::fs::read_to_string(spec_path(name)).unwrap()).unwrap()
}

fn disk(p: SigmaPoint) -> DiskPoint {
    DiskPoint::new(p.u, p.v)
}

fn sigma(q: DiskPoint) -> SigmaPoint {
    SigmaPoint::new(q.x2, q.y2)
}

/// Outcome of one criterion: pass flag and a one-line summary.
type Outcome = (bool, String);

/// A random point of the strip sigma_k on the stable side.
fn strip_point(m: &Model, rng: &mut ChaCha8Rng, k: i64) -> (SigmaPoint, f64) {
    let (r, eps) = (m.spec.r, m.spec.eps);
    let v = rng.gen_range(r - 0.99 * eps..r + 0.99 * eps);
    let lo = strip_boundary(m, k, StripSide::Minus, v).unwrap();
    let hi = strip_boundary(m, k, StripSide::Plus, v).unwrap();
    let t = rng.gen_range(0.02..0.98);
    (SigmaPoint::new(lo + t * (hi - lo), v), hi - lo)
}

fn criterion_1() -> Outcome {
    let m = load("reference.json");
    let mf = load("reference_fzeta.json");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = [0.0f64; 5];
    for _ in 0..POINTS {
        let p = SigmaPoint::new(rng.gen_range(1e-4..0.03), rng.gen_range(1e-4..0.12));
        let j = fd_jacobian(|q| s_apply(&mf, q), p, [1e-7 * p.u, 1e-7 * p.v]).unwrap();
        worst[0] = worst[0].max((det2(&j) - 1.0).abs());

        let c = if rng.gen_bool(0.5) {
            -rng.gen_range(1e-7..1e-3)
        } else {
            rng.gen_range(1e-7..1e-3)
        };
        let rmin = if c > 0.0 {
            1.5 * lyapunov_radius(&m, c).unwrap()
        } else {
            1e-3
        };
        let (rho, th) = (rng.gen_range(rmin..0.14), rng.gen_range(0.0..TAU));
        let q = SigmaPoint::new(rho * th.cos(), rho * th.sin());
        let h = 1e-7 * rho;
        let j = fd_jacobian(|x| Ok(sigma(transit_map(&m, c, disk(x))?)), q, [h, h]).unwrap();
        worst[1] = worst[1].max((det2(&j) - 1.0).abs());

        let c = rng.gen_range(-1e-2..1e-2);
        let p = SigmaPoint::new(
            0.1 + rng.gen_range(-0.019..0.019),
            rng.gen_range(-0.029..0.029),
        );
        let j = fd_jacobian(|x| Ok(sigma(t1_apply(&m, c, x)?)), p, [1e-7, 1e-7]).unwrap();
        worst[2] = worst[2].max((det2(&j) - 1.0).abs());
        let q = SigmaPoint::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
        let j = fd_jacobian(|x| Ok(t2_affine(&m, c, disk(x))), q, [1e-7, 1e-7]).unwrap();
        worst[3] = worst[3].max((det2(&j) - 1.0).abs());

        let c = -rng.gen_range(1e-6..1e-3);
        let k = rng.gen_range(3..9);
        let (p, w) = strip_point(&mf, &mut rng, k);
        let j = fd_jacobian(|x| strip_map(&mf, c, k as i32, x), p, [1e-6 * w, 1e-6]).unwrap();
        worst[4] = worst[4].max((det2(&j) - 1.0).abs());
    }
    let ok = worst.iter().all(|&w| w <= 1e-6);
    (
        ok,
        format!(
            "max |det - 1| over {POINTS} points: S {:.1e}, T {:.1e}, T1 {:.1e}, T2 {:.1e}, G∘S^k {:.1e} (tol 1e-6)",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    )
}

fn criterion_2() -> Outcome {
    let m = load("reference.json");
    let mf = load("reference_fzeta.json");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut zeta, mut eta, mut lsl, mut lglg) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut exact = true;
    let mut lglg_points = 0;
    for _ in 0..POINTS {
        let p = SigmaPoint::new(rng.gen_range(1e-4..0.0299), rng.gen_range(1e-4..0.12));
        let q = s_apply(&mf, p).unwrap();
        zeta = zeta.max(((q.zeta() - p.zeta()) / p.zeta()).abs());
        let a = involution_sigma(s_apply(&mf, involution_sigma(p)).unwrap());
        let b = s_inverse(&mf, p).unwrap();
        lsl = lsl.max((a.u - b.u).abs().max((a.v - b.v).abs()));

        let d = DiskPoint::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
        let c = -rng.gen_range(1e-8..1e-3);
        let t = transit_map(&m, c, d).unwrap();
        eta = eta.max(((t.eta() - d.eta()) / d.eta()).abs());
        exact &=
            involution_sigma(involution_sigma(p)) == p && involution_disk(involution_disk(d)) == d;

        let p = SigmaPoint::new(
            0.1 + rng.gen_range(-0.0199..0.0199),
            rng.gen_range(-0.0299..0.0299),
        );
        let g = return_map(&m, c, p).unwrap();
        if in_stable_box(&m, g) {
            let back = involution_sigma(return_map(&m, c, involution_sigma(g)).unwrap());
            lglg = lglg.max((back.u - p.u).abs().max((back.v - p.v).abs()));
            lglg_points += 1;
        }
    }
    let ok =
        zeta <= 1e-12 && eta <= 1e-12 && exact && lsl <= 1e-10 && lglg <= 1e-10 && lglg_points > 0;
    (
        ok,
        format!(
            "zeta drift {zeta:.1e}, eta drift {eta:.1e}, L∘L exact {exact}, L∘S∘L vs S^-1 {lsl:.1e}, \
             L∘G∘L∘G {lglg:.1e} on {lglg_points} shared-domain points"
        ),
    )
}

fn criterion_3() -> Outcome {
    let m = load("reference.json");
    let (r, eps, nu) = (m.spec.r, m.spec.eps, m.spec.nu);
    let k0 = k0_threshold(&m);
    let mut nested = true;
    let mut worst_ratio = 0.0f64;
    for k in 3..=20i64 {
        let bound = ((1.0 + nu) / 2.0).powi(k as i32) * (r + eps);
        for i in 0..=200 {
            let v = r - eps + 2.0 * eps * i as f64 / 200.0;
            let plus = strip_boundary(&m, k, StripSide::Plus, v).unwrap();
            let minus = strip_boundary(&m, k, StripSide::Minus, v).unwrap();
            let next = strip_boundary(&m, k + 1, StripSide::Plus, v).unwrap();
            nested &= plus > minus && minus > next;
            worst_ratio = worst_ratio.max(plus / bound);
        }
    }
    (
        k0 == 2 && nested && worst_ratio <= 1.0,
        format!("k0 = {k0}, nested for k = 3..20: {nested}, max s_k+ / bound = {worst_ratio:.4}"),
    )
}

fn criterion_4() -> Outcome {
    let m = load("reference.json");
    let r = census_v0_case1(&m, 1e-6, 1e-2).unwrap();
    let target = 2.0 * 1e8f64.ln();
    let mut ok = true;
    let mut parts = Vec::new();
    for b in &r.branches {
        let law = (b.count as f64 - b.phase_span / PI).abs() <= 1.0;
        let span = (b.phase_span - target).abs() <= 1e-6 * target;
        ok &=
            law && span && (11..=12).contains(&b.count) && b.all_transversal && b.margins_monotone;
        parts.push(format!(
            "{}: {} crossings, span {:.4}, transversal {}, margins monotone {}",
            b.label, b.count, b.phase_span, b.all_transversal, b.margins_monotone
        ));
    }
    (ok, parts.join("; "))
}

fn criterion_5(m: &Model) -> (Outcome, Option<(f64, f64)>) {
    let t0 = Instant::now();
    let r = tangency_sequence_negative(m, -m.limits.c_max, 5).unwrap();
    let elapsed = t0.elapsed();
    let target = TAU / m.spec.omega;
    let spacing = r.log_spacings.len() >= 4
        && r.log_spacings[..4]
            .iter()
            .all(|s| (s - target).abs() <= 0.05 * target);
    let agree = r.records[..4].iter().all(|x| x.agree_rel <= 1e-6);
    let q: Vec<f64> = r.records[..4].iter().map(|x| x.second_times_rho).collect();
    let (qmin, qmax) = q
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    let scaling = qmax / qmin <= 2.0 && r.records[..4].iter().all(|x| x.quadratic);
    let ok =
        r.records.len() >= 5 && spacing && agree && scaling && elapsed <= Duration::from_secs(300);
    let worst_spacing = r
        .log_spacings
        .iter()
        .take(4)
        .map(|s| ((s - target) / target).abs())
        .fold(0.0, f64::max);
    let worst_agree = r
        .records
        .iter()
        .take(4)
        .map(|x| x.agree_rel)
        .fold(0.0, f64::max);
    let pair = (r.records.len() >= 2).then(|| (r.records[0].c_nose, r.records[1].c_nose));
    (
        (
            ok,
            format!(
                "c_1..c_4 = {:.4e} .. {:.4e}, spacing error {:.2}% (tol 5%), detector gap {:.1e} (tol 1e-6), \
                 |u''| r spread {:.3} (tol 2), {:.2?}",
                r.records[0].c_nose,
                r.records[3].c_nose,
                100.0 * worst_spacing,
                worst_agree,
                qmax / qmin,
                elapsed
            ),
        ),
        pair,
    )
}

fn criterion_6() -> Outcome {
    let m = load("reference.json");
    let r = heteroclinic_web_positive(&m, 1e-4).unwrap();
    let n0 = r.n0.unwrap_or(-1);
    let span_ok = r.iterates.first().map(|i| i.n) == Some(n0)
        && r.iterates.last().map(|i| i.n) == Some(n0 + 10)
        && r.iterates.len() == 11;
    let ok = r.circles_ok() && r.spiral_total() >= 5 && r.iterates_ok() && span_ok;
    (
        ok,
        format!(
            "circle crossings {} + {}, pair gap {:.1e}, spiral crossings {}, n0 = {n0}, iterates n0..n0+10 transversal {}",
            r.sigma_u_crossings.len(),
            r.sigma_s_crossings.len(),
            r.pair_max,
            r.spiral_total(),
            r.iterates_ok()
        ),
    )
}

fn criterion_7() -> Outcome {
    let m = load("reference.json");
    let r = loop_parameters(&m, 2, 10, 0.01).unwrap();
    let exact = r.failures.is_empty()
        && r.records.iter().all(|x| {
            let want = 0.1 * 0.25f64.powi(x.n);
            (x.mu - want).abs() <= 1e-12 * want && x.residual.abs() <= 1e-12
        });
    let four = r.records.iter().filter(|x| x.n >= 3).all(|x| x.g1 < 0.0);
    let n3 = r.records.iter().find(|x| x.n == 3).unwrap();
    let worked = n3.a == 8.0 && n3.b == 8.0 && n3.c == 7.875 && n3.d == 8.0 && n3.g1 == -252.015625;
    let mf = load("reference_fzeta.json");
    let rf = loop_parameters(&mf, 2, 9, 0.01).unwrap();
    let ratio8 = rf
        .ratios
        .iter()
        .find(|(n, _)| *n == 8)
        .map(|x| x.1)
        .unwrap_or(f64::NAN);
    let ratio_ok = ((ratio8 / 0.25) - 1.0).abs() <= 0.01;
    (
        exact && four && worked && ratio_ok,
        format!(
            "mu_n = 0.1 * 0.25^n for n = 2..10: {exact}; n = 3: A={} B={} C={} D={} g1={}; \
             f = nu + zeta: mu_9 / mu_8 = {ratio8:.5} (nu^2 = 0.25)",
            n3.a, n3.b, n3.c, n3.d, n3.g1
        ),
    )
}

fn criterion_8(m: &Model, pair: Option<(f64, f64)>) -> Outcome {
    let Some((c0, c1)) = pair else {
        return (false, "no certified tangency levels".into());
    };
    let t0 = Instant::now();
    let k0 = k0_threshold(m) as i32;
    let r = elliptic_search(m, c0 * 1.1, c0 * 0.9, k0 + 1, k0 + 6).unwrap();
    let widest = r.intervals.iter().map(|i| i.width).fold(0.0, f64::max);
    let det_ok = r
        .records
        .iter()
        .filter(|x| x.classification == Classification::Elliptic)
        .all(|x| (x.det - 1.0).abs() <= 1e-6);
    let mid = -(c0 * c1).sqrt();
    let rm = elliptic_search(m, mid, mid, k0 + 1, k0 + 6).unwrap();
    let only_saddles = rm.saddle_count > 0 && rm.elliptic_count == 0 && rm.undecided_count == 0;
    let elapsed = t0.elapsed();
    let ok = r.elliptic_count >= 1
        && det_ok
        && widest >= 1e-3 * c0.abs()
        && only_saddles
        && elapsed <= Duration::from_secs(600);
    (
        ok,
        format!(
            "{} elliptic records near c_1 = {c0:.4e}, widest interval {widest:.3e} (need {:.3e}); \
             midpoint {mid:.4e}: {} saddle / {} elliptic; {:.2?}",
            r.elliptic_count,
            1e-3 * c0.abs(),
            rm.saddle_count,
            rm.elliptic_count,
            elapsed
        ),
    )
}

fn criterion_9() -> Outcome {
    let m = load("case2.json");
    let floor = m.tau_floor();
    let hi = census_case2_positive(&m, 1e-4, floor, None).unwrap();
    let lo = census_case2_positive(&m, 1e-5, floor, None).unwrap();
    let growth = lo.total as f64 - hi.total as f64;
    let need = m.spec.omega / PI * 10f64.ln() - 2.0;
    let empty = [0.0, -1e-4]
        .iter()
        .all(|&c| census_case2_positive(&m, c, floor, None).is_ok_and(|r| r.empty_by_domain_exit));
    let ok = hi.phase_divergent && growth >= need && empty;
    (
        ok,
        format!(
            "phase gained past the horizon: {:.3} / {:.3} (need 4 pi); census {} -> {} (growth {growth} >= {need:.3}); \
             c <= 0 empty by DomainExit: {empty}",
            hi.phase_extension[0], hi.phase_extension[1], hi.total, lo.total
        ),
    )
}

fn run_twice(args: &[&str], tag: &str, dir: &Path) -> Result<bool, String> {
    let mut blobs = Vec::new();
    for i in 0..2 {
        let out = dir.join(format!("{tag}_{i}"));
        let status = Command::new(env!("CARGO_BIN_EXE_hetlab"))
            .args(args)
            .arg("--out")
            .arg(&out)
            .env("HETLAB_THREADS", if i == 0 { "1" } else { "4" })
            .output()
            .map_err(|e| e.to_string())?;
        if !matches!(status.status.code(), Some(0) | Some(2)) {
            return Err(format!("{tag}: exit {:?}", status.status.code()));
        }
        blobs.push(std::fs::read(out.join("result.json")).map_err(|e| e.to_string())?);
    }
    Ok(blobs[0] == blobs[1])
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let reference = spec_path("reference.json");
    let case2 = spec_path("case2.json");
    let r = reference.to_str().unwrap();
    let c2 = case2.to_str().unwrap();
    let commands: Vec<(&str, Vec<&str>)> = vec![
        ("validate", vec!["validate", r]),
        (
            "census_v0",
            vec![
                "census",
                r,
                "--v0",
                "--tau-min",
                "1e-6",
                "--tau-max",
                "1e-2",
            ],
        ),
        ("census_neg", vec!["census", r, "--level", "-1e-4"]),
        (
            "tangencies_neg",
            vec!["tangencies", r, "--side", "neg", "--count", "4"],
        ),
        (
            "tangencies_pos",
            vec!["tangencies", r, "--side", "pos", "--n-range", "1..6"],
        ),
        (
            "tangencies_case2",
            vec!["tangencies", c2, "--side", "case2", "--n-range", "1..3"],
        ),
        ("web", vec!["web", r, "--c", "1e-4"]),
        ("loops", vec!["loops", r, "--n-range", "2..10"]),
        (
            "elliptic",
            vec![
                "elliptic",
                r,
                "--c-window",
                "-4.2e-3..-3.4e-3",
                "--k-range",
                "3..8",
            ],
        ),
    ];
    let mut same = Vec::new();
    let mut differ = Vec::new();
    for (tag, args) in &commands {
        match run_twice(args, tag, dir.path()) {
            Ok(true) => same.push(*tag),
            Ok(false) => differ.push(tag.to_string()),
            Err(e) => differ.push(e),
        }
    }
    (
        differ.is_empty(),
        format!(
            "{} of {} commands byte-identical across two runs (1 vs 4 threads){}",
            same.len(),
            commands.len(),
            if differ.is_empty() {
                String::new()
            } else {
                format!("; differing: {}", differ.join(", "))
            }
        ),
    )
}

fn main() {
    // `cargo test -- --list` and similar harness probes expect no work.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let m = load("reference.json");
    let (c5, pair) = criterion_5(&m);
    let results = vec![
        ("1 symplecticity", criterion_1()),
        ("2 invariance", criterion_2()),
        ("3 strip lemma", criterion_3()),
        ("4 critical-level census", criterion_4()),
        ("5 negative tangency sequence", c5),
        ("6 heteroclinic web", criterion_6()),
        ("7 loop parameters", criterion_7()),
        ("8 elliptic windows", criterion_8(&m, pair)),
        ("9 case 2 double spiral", criterion_9()),
        ("10 determinism", criterion_10()),
    ];
    let mut failed = 0;
    for (name, (ok, detail)) in &results {
        println!(
            "{} criterion {name}: {detail}",
            if *ok { "PASS" } else { "FAIL" }
        );
        failed += usize::from(!ok);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
