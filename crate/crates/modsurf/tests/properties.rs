//! Property suites for the geometric and arithmetic invariants.

use modsurf::forms::{kronecker, Discriminant};
use modsurf::hyperbolic::{
    dist, dist_log_form, geodesic_flow, isometry_to_tangent, tangent_to_isometry, u_invariant,
    Isometry, PointH, Tangent,
};
use modsurf::special::AnnulusSpec;
use modsurf::surface::{kernel_value, reduce_point};
use proptest::prelude::*;

fn point_strategy() -> impl Strategy<Value = PointH> {
    (-4.0f64..4.0, 0.05f64..6.0).prop_map(|(x, y)| PointH::new(x, y))
}

fn isometry_strategy() -> impl Strategy<Value = Isometry> {
    (0.3f64..2.0, proptest::bool::ANY, -2.0f64..2.0, -2.0f64..2.0).prop_map(
        |(mag, flip, b, c)| {
            // d = (1 + bc)/a keeps the determinant at one by construction
            let a = if flip { -mag } else { mag };
            Isometry::new(a, b, c, (1.0 + b * c) / a)
        },
    )
}

proptest! {
    #[test]
    fn distance_routes_agree(z in point_strategy(), w in point_strategy()) {
        let a = dist(z, w);
        if z != w {
            let b = dist_log_form(z, w);
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a), "asinh {a} vs log {b}");
        }
        prop_assert!((u_invariant(z, w) - (a / 2.0).sinh().powi(2)).abs()
            <= 1e-10 * (1.0 + u_invariant(z, w)));
    }

    #[test]
    fn isometries_preserve_distance_and_u(
        z in point_strategy(),
        w in point_strategy(),
        g in isometry_strategy(),
    ) {
        let d0 = dist(z, w);
        let d1 = dist(g.apply(z), g.apply(w));
        prop_assert!((d0 - d1).abs() <= 1e-9 * (1.0 + d0), "{d0} vs {d1}");
        let u0 = u_invariant(z, w);
        let u1 = u_invariant(g.apply(z), g.apply(w));
        prop_assert!((u0 - u1).abs() <= 1e-9 * (1.0 + u0));
    }

    #[test]
    fn flow_group_law_and_equivariance(
        z in point_strategy(),
        angle in 0.0f64..std::f64::consts::TAU,
        s1 in -2.0f64..2.0,
        s2 in -2.0f64..2.0,
        g in isometry_strategy(),
    ) {
        let t = Tangent::new(z, angle);
        let two_steps = geodesic_flow(geodesic_flow(t, s1), s2);
        let one_step = geodesic_flow(t, s1 + s2);
        prop_assert!((two_steps.base.x - one_step.base.x).abs() < 1e-9);
        prop_assert!((two_steps.base.y - one_step.base.y).abs() < 1e-9 * one_step.base.y.max(1.0));

        let left = geodesic_flow(g.apply_tangent(t), s1);
        let right = g.apply_tangent(geodesic_flow(t, s1));
        prop_assert!((left.base.x - right.base.x).abs() < 1e-8 * (1.0 + right.base.x.abs()));
        prop_assert!((left.base.y - right.base.y).abs() < 1e-8 * right.base.y.max(1.0));
    }

    #[test]
    fn nak_round_trips(z in point_strategy(), angle in 0.0f64..std::f64::consts::TAU) {
        let t = Tangent::new(z, angle);
        let back = isometry_to_tangent(tangent_to_isometry(t));
        prop_assert!((back.base.x - t.base.x).abs() < 1e-10 * (1.0 + t.base.x.abs()));
        prop_assert!((back.base.y - t.base.y).abs() < 1e-10 * t.base.y);
        let da = (back.angle - t.angle).abs();
        prop_assert!(da.min(std::f64::consts::TAU - da) < 1e-9);
    }

    #[test]
    fn reduction_is_idempotent(z in point_strategy()) {
        let once = reduce_point(z).unwrap();
        let twice = reduce_point(once.point).unwrap();
        prop_assert!(twice.reducer.is_identity());
        // the reducer genuinely maps z onto the reduced representative
        let image = once.reducer.apply(z);
        prop_assert!((image.x - once.point.x).abs() < 1e-8);
        prop_assert!((image.y - once.point.y).abs() < 1e-8 * once.point.y.max(1.0));
    }

    #[test]
    fn automorphic_kernel_is_symmetric(
        z in point_strategy(),
        w in point_strategy(),
        outer in 0.05f64..0.6,
    ) {
        let ann = AnnulusSpec::new(outer / 3.0, outer).unwrap();
        let zw = kernel_value(z, w, &ann).unwrap();
        let wz = kernel_value(w, z, &ann).unwrap();
        prop_assert_eq!(zw, wz, "K(z, w) must equal K(w, z)");
    }

    #[test]
    fn kronecker_is_completely_multiplicative(
        m in -3000i64..3000,
        n in -3000i64..3000,
    ) {
        for dv in [5i64, 8, 13, 89] {
            let d = Discriminant::new(dv).unwrap();
            prop_assert_eq!(
                kronecker(d.value(), m * n),
                kronecker(d.value(), m) * kronecker(d.value(), n)
            );
        }
    }
}
