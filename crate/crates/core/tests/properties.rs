//! Property-based invariants across module boundaries.

use narrowcap::capture::{solve_splitting, PatchCondition, PatchSpec, Scene};
use narrowcap::geometry::{BoundaryPoint, Domain};
use narrowcap::greens::{bulk_green, surface_green};
use narrowcap::halfplane::{g_dirichlet, CFunction, IntervalSteklovBasis};
use narrowcap::scenefile::SceneFile;
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

fn basis() -> Arc<IntervalSteklovBasis> {
    Arc::new(IntervalSteklovBasis::build(11, 40).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn green_symmetry_disk(t1 in -PI..PI, t2 in -PI..PI) {
        prop_assume!((t1 - t2).abs() > 0.05);
        let d = Domain::disk_interior();
        let p1 = d.boundary_point(t1);
        let p2 = d.boundary_point(t2);
        let g12 = surface_green(&d, p1.xy(), &p2).unwrap();
        let g21 = surface_green(&d, p2.xy(), &p1).unwrap();
        prop_assert!((g12 - g21).abs() < 1e-12);
    }

    #[test]
    fn green_symmetry_ellipse_bulk(x1 in -0.6..0.6f64, y1 in -0.3..0.3f64,
                                   x2 in -0.6..0.6f64, y2 in -0.3..0.3f64) {
        prop_assume!(((x1 - x2).powi(2) + (y1 - y2).powi(2)).sqrt() > 0.05);
        let e = Domain::ellipse_interior(2.0, 1.0).unwrap();
        let g12 = bulk_green(&e, [2.0 * x1, y1], [2.0 * x2, y2]).unwrap();
        let g21 = bulk_green(&e, [2.0 * x2, y2], [2.0 * x1, y1]).unwrap();
        prop_assert!((g12 - g21).abs() < 1e-10);
    }

    #[test]
    fn g_dirichlet_nonnegative_and_zero_only_on_interval(x in -3.0..3.0f64, y in 0.0..3.0f64) {
        let v = g_dirichlet([x, y]);
        prop_assert!(v >= 0.0);
        if y > 1e-6 {
            prop_assert!(v > 0.0);
        }
    }

    #[test]
    fn two_patch_chi_bounds(eps1 in 0.02..0.2f64, eps2 in 0.02..0.2f64, gap in 1.0..PI) {
        let d = Domain::disk_interior();
        let scene = Scene::new(
            d,
            vec![
                PatchSpec::new(d.boundary_point(0.0), eps1, PatchCondition::Dirichlet),
                PatchSpec::new(d.boundary_point(gap), eps2, PatchCondition::Dirichlet),
            ],
        );
        prop_assume!(scene.is_ok());
        let cfun = CFunction::new(basis());
        let sol0 = solve_splitting(scene.as_ref().unwrap(), 0, &cfun).unwrap();
        let sol1 = solve_splitting(scene.as_ref().unwrap(), 1, &cfun).unwrap();
        prop_assert!(sol0.chi() > 0.0 && sol0.chi() < 1.0);
        prop_assert!((sol0.chi() + sol1.chi() - 1.0).abs() < 1e-10);
        // the larger patch wins at equal placement symmetry
        if eps1 > 1.5 * eps2 {
            prop_assert!(sol0.chi() > 0.5);
        }
    }

    #[test]
    fn scene_json_roundtrip(angle in -3.0..3.0f64, eps in 0.01..0.3f64, q in 0.1..100.0f64) {
        let text = format!(
            r#"{{"version":1,"domain":{{"kind":"disk-interior"}},
               "patches":[{{"center_angle":{angle},"half_length":{eps},
                            "bc":{{"type":"robin","q":{q}}}}}]}}"#
        );
        let file = SceneFile::from_str(&text).unwrap();
        let json = file.to_canonical_json();
        let file2 = SceneFile::from_str(&json).unwrap();
        prop_assert_eq!(json, file2.to_canonical_json());
    }

    #[test]
    fn boundary_points_land_on_curve(t in -10.0..10.0f64, a in 1.1..4.0f64) {
        let e = Domain::ellipse_interior(a, 1.0).unwrap();
        let bp = e.boundary_point(t);
        let [x, y] = bp.xy();
        let level = (x / a).powi(2) + y.powi(2);
        prop_assert!((level - 1.0).abs() < 1e-12);
        let back = BoundaryPoint::from_xy(&e, bp.xy()).unwrap();
        prop_assert!((back.xy()[0] - x).abs() < 1e-12);
    }

    #[test]
    fn c_function_decreasing_between_evaluations(lo in -2.9..1.0f64, delta in 0.01..1.0f64) {
        // on the segment right of the first pole interval boundary
        let cfun = CFunction::new(basis());
        let a = 10f64.powf(lo);
        let b = a + delta;
        let ca = cfun.eval(a).unwrap();
        let cb = cfun.eval(b).unwrap();
        prop_assert!(cb < ca);
    }
}

#[test]
fn splitting_scale_invariance_under_rotation() {
    // rotating the whole scene leaves chi unchanged
    let d = Domain::disk_interior();
    let cfun = CFunction::new(basis());
    let mut previous = None;
    for shift in [0.0, 0.7, 2.1, -1.3] {
        let scene = Scene::new(
            d,
            vec![
                PatchSpec::new(d.boundary_point(shift), 0.07, PatchCondition::Dirichlet),
                PatchSpec::new(d.boundary_point(shift + 2.0), 0.11, PatchCondition::Dirichlet),
                PatchSpec::new(d.boundary_point(shift + 4.2), 0.05, PatchCondition::Dirichlet),
            ],
        )
        .unwrap();
        let chi = solve_splitting(&scene, 1, &cfun).unwrap().chi();
        if let Some(prev) = previous {
            assert!((chi - prev as f64).abs() < 1e-12, "{chi} vs {prev}");
        }
        previous = Some(chi);
    }
}
