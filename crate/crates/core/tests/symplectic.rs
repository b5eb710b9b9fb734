mod common;

use hetlab_core::global::{t1_apply, t2_affine};
use hetlab_core::poincare::{fd_jacobian, strip_map};
use hetlab_core::points::det2;
use hetlab_core::saddle::{s_apply, strip_boundary, StripSide};
use hetlab_core::transit::transit_map;
use hetlab_core::{DiskPoint, SigmaPoint};
use proptest::prelude::*;

fn disk(p: SigmaPoint) -> DiskPoint {
    DiskPoint::new(p.u, p.v)
}

fn sigma(q: DiskPoint) -> SigmaPoint {
    SigmaPoint::new(q.x2, q.y2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn saddle_map_preserves_area(u in 1e-4f64..0.03, v in 1e-4f64..0.12) {
        for m in [common::reference(), common::reference_fzeta()] {
            let p = SigmaPoint::new(u, v);
            let j = fd_jacobian(|q| s_apply(&m, q), p, [1e-7 * u, 1e-7 * v]).unwrap();
            prop_assert!((det2(&j) - 1.0).abs() <= 1e-6, "det {}", det2(&j));
        }
    }

    #[test]
    fn transit_preserves_area(
        c in -1e-3f64..-1e-7,
        rho in 1e-3f64..0.14,
        th in 0.0f64..std::f64::consts::TAU,
    ) {
        let m = common::reference();
        let p = SigmaPoint::new(rho * th.cos(), rho * th.sin());
        let h = 1e-7 * rho;
        let j = fd_jacobian(|q| Ok(sigma(transit_map(&m, c, disk(q))?)), p, [h, h]).unwrap();
        prop_assert!((det2(&j) - 1.0).abs() <= 1e-6, "det {}", det2(&j));
    }

    #[test]
    fn global_maps_preserve_area(c in -1e-2f64..1e-2, du in -0.019f64..0.019, v in -0.029f64..0.029) {
        let m = common::reference();
        let p = SigmaPoint::new(0.1 + du, v);
        let j1 = fd_jacobian(|q| Ok(sigma(t1_apply(&m, c, q)?)), p, [1e-7, 1e-7]).unwrap();
        prop_assert!((det2(&j1) - 1.0).abs() <= 1e-6);
        let j2 = fd_jacobian(|q| Ok(t2_affine(&m, c, disk(q))), SigmaPoint::new(du, v), [1e-7, 1e-7]).unwrap();
        prop_assert!((det2(&j2) - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn strip_maps_preserve_area(
        c in -1e-3f64..-1e-6,
        k in 3i64..9,
        v in 0.0805f64..0.1195,
        t in 0.02f64..0.98,
    ) {
        let m = common::reference_fzeta();
        let lo = strip_boundary(&m, k, StripSide::Minus, v).unwrap();
        let hi = strip_boundary(&m, k, StripSide::Plus, v).unwrap();
        let p = SigmaPoint::new(lo + t * (hi - lo), v);
        let h = [1e-6 * (hi - lo), 1e-6];
        let j = fd_jacobian(|q| strip_map(&m, c, k as i32, q), p, h).unwrap();
        prop_assert!((det2(&j) - 1.0).abs() <= 1e-6, "det {}", det2(&j));
    }
}
