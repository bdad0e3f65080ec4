mod common;

use sdqc_core::cli::oracle_compare;
use sdqc_core::hull::{circle_point_hull, hsdqc, two_point_hull};
use sdqc_core::lamination::{lamination_closure, DEFAULT_MAX_ITER};
use sdqc_core::{PlanarSet, SdqcError};

#[test]
fn two_point_fixpoint_matches_separation_hull() {
    let set = two_point_hull(0.5, 1.0).unwrap().set();
    let lam = lamination_closure(&set, 256, DEFAULT_MAX_ITER).unwrap();
    let outer = hsdqc(&set, 256, 1e-9).unwrap();
    let step = outer.region.step().max(lam.q_step);
    assert!(lam.region.hausdorff(&outer.region) <= 2.0 * step);
    // the saddle below the two points is filled by the hyperbola through them
    let mid = lam.region.psi[lam.region.grid.nearest(0.0)].unwrap();
    assert!(mid > 0.85, "{mid}");
    assert!(lam.sweeps >= 1);
}

#[test]
fn circle_point_fixpoint() {
    let set = circle_point_hull(0.0, 1.0, -3.0, 2.0).unwrap().set();
    let (report, ok, _) = oracle_compare(&set, 256, 1e-9).unwrap();
    assert!(ok, "{report}");
}

#[test]
fn inner_bound_stays_below_outer() {
    for set in common::connected_sets(5, 8, 128) {
        let lam = lamination_closure(&set, 128, DEFAULT_MAX_ITER).unwrap();
        let h = hsdqc(&set, 128, 1e-9).unwrap();
        // inner columns never exceed the convex hull, and exceed the
        // separation hull only by snapping of isolated points
        assert!(lam.region.excess_over(&h.conv) <= 1e-12 + h.region.step() * 40.0);
        assert!(lam.region.defined_count() >= h.hhat.defined_count());
    }
}

#[test]
fn single_point_and_base_segment() {
    let set = PlanarSet::from_points(&[(0.0, 1.0)]).unwrap();
    let lam = lamination_closure(&set, 64, DEFAULT_MAX_ITER).unwrap();
    assert_eq!(lam.region.defined_count(), 1);

    let set = PlanarSet::from_json(r#"{"segments": [[[-1, 0], [1, 0]]]}"#).unwrap();
    let lam = lamination_closure(&set, 64, DEFAULT_MAX_ITER).unwrap();
    assert!(lam.region.psi.iter().all(|v| *v == Some(0.0)));
}

#[test]
fn sweep_budget_is_enforced() {
    let set = two_point_hull(0.5, 1.0).unwrap().set();
    assert_eq!(lamination_closure(&set, 256, 1).err(), Some(SdqcError::NotConverged { iterations: 1 }));
}

#[test]
fn random_connected_instances_agree() {
    for set in common::connected_sets(7, 10, 128) {
        let (report, ok, _) = oracle_compare(&set, 128, 1e-9).unwrap();
        assert!(ok, "{} {report}", set.to_json());
    }
}
