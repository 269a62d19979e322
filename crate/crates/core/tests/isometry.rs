use std::f64::consts::PI;

use ferrand::isometry::{
    certified_pairs, default_sample_points, dilatation_bound_profile, dilatation_profile_routes,
    geometric_radii, isometry_bound_check, lambda_distortion, linear_dilatation,
    metric_sphere_margins, PlaneMap,
};
use ferrand::lambda::PairClass;
use ferrand::{tau, Error};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn certified_pairs_are_all_exact() {
    let pairs = certified_pairs();
    assert_eq!(pairs.len(), 100);
    assert!(pairs.iter().all(|p| p.classify() != PairClass::General));
}

#[test]
fn similarities_and_inversions_are_isometries() {
    let maps = [
        PlaneMap::scaling(c(0.25, 0.0)).unwrap(),
        PlaneMap::scaling(c(1.0, 7.0)).unwrap(),
        PlaneMap::inversion(c(0.0, 1.0)).unwrap(),
        PlaneMap::compose(vec![
            PlaneMap::inversion(c(2.0, 0.0)).unwrap(),
            PlaneMap::scaling(c(0.0, -3.0)).unwrap(),
        ])
        .unwrap(),
    ];
    for map in &maps {
        let r = isometry_bound_check(map, &default_sample_points()).unwrap();
        assert!(r.distortion.max_discrepancy <= 1e-10);
        assert_eq!(r.distortion.checked, 100);
        assert!(r.holds && r.max_estimate <= 4.0);
    }
}

#[test]
fn similarity_dilatation_is_one() {
    let map = PlaneMap::scaling(c(2.0, -5.0)).unwrap();
    let r = linear_dilatation(&map, c(0.3, 0.4), &geometric_radii(0.05, 3), 64).unwrap();
    assert!((r.limsup - 1.0).abs() < 1e-9);
}

#[test]
fn inversion_dilatation_tends_to_one() {
    let map = PlaneMap::inversion(c(1.0, 0.0)).unwrap();
    let r = linear_dilatation(&map, c(2.0, 0.0), &geometric_radii(1e-2, 4), 64).unwrap();
    let last = *r.ratios.last().unwrap();
    assert!(r.ratios.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    assert!((last - 1.0).abs() < 1e-4, "{last}");
}

#[test]
fn radial_square_is_not_an_isometry() {
    let map = PlaneMap::radial_power(2.0).unwrap();
    match isometry_bound_check(&map, &default_sample_points()) {
        Err(Error::NotIsometry(d)) => assert!(d > 0.1),
        other => panic!("expected rejection, got {other:?}"),
    }
    let pair = ferrand::PuncturedPair::planar(c(1.0, 0.0), c(2.0, 0.0)).unwrap();
    let d = lambda_distortion(&map, &[pair]).unwrap();
    let expected = tau(1.0).unwrap() - tau(3.0).unwrap();
    assert!((d.max_discrepancy - expected).abs() <= 1e-14);
}

#[test]
fn radial_square_dilatation_near_exponent() {
    // angles stay fixed and radii square, so small circles map to ellipses of
    // axis ratio 2
    let map = PlaneMap::radial_power(2.0).unwrap();
    let r = linear_dilatation(&map, c(1.0, 0.0), &geometric_radii(0.1, 3), 64).unwrap();
    assert!((r.limsup - 2.0).abs() <= 0.1, "{}", r.limsup);
    assert!((r.ratios[2] - 2.0).abs() <= 0.01);
}

#[test]
fn maps_off_the_punctured_plane_are_refused() {
    let shift = PlaneMap::mobius(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
    assert!(matches!(
        lambda_distortion(&shift, &certified_pairs()),
        Err(Error::InvalidMap(_))
    ));
}

#[test]
fn degenerate_maps_are_refused() {
    assert!(PlaneMap::mobius(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)).is_err());
    assert!(PlaneMap::radial_power(0.0).is_err());
    assert!(PlaneMap::compose(vec![]).is_err());
    let inv = PlaneMap::inversion(c(1.0, 0.0)).unwrap();
    assert!(matches!(inv.apply(c(0.0, 0.0)), Err(Error::Pole { .. })));
}

#[test]
fn map_json_round_trip() {
    let map = PlaneMap::compose(vec![
        PlaneMap::radial_power(1.5).unwrap(),
        PlaneMap::inversion(c(1.0, 1.0)).unwrap(),
    ])
    .unwrap();
    let text = serde_json::to_string(&map).unwrap();
    assert_eq!(serde_json::from_str::<PlaneMap>(&text).unwrap(), map);
}

#[test]
fn profile_is_below_bound_and_stabilizes() {
    for r in [0.3, 0.1, 0.03, 0.01, 0.003] {
        assert!(dilatation_bound_profile(r).unwrap() <= 256.0);
    }
    let a = dilatation_bound_profile(0.003).unwrap();
    let b = dilatation_bound_profile(0.001).unwrap();
    assert!((a - b).abs() / b <= 0.05);
}

#[test]
fn profile_routes_agree() {
    for r in [0.5, 0.3, 0.1, 0.01, 0.001] {
        let p = dilatation_profile_routes(r).unwrap();
        assert!((p.psi_form - p.tau_form).abs() <= 1e-8 * p.tau_form);
        // the limit form drops a factor below 1
        assert!(p.limit_form < p.tau_form);
    }
    let p = dilatation_profile_routes(1e-3).unwrap();
    assert!((p.limit_form - p.tau_form).abs() / p.tau_form < 0.01);
}

#[test]
fn metric_sphere_bulges_outward() {
    let points = metric_sphere_margins(2.0, &[PI / 4.0, PI]).unwrap();
    assert!(points
        .iter()
        .all(|p| p.strict() && p.report.levels.iter().all(|l| l.energy_monotone)));
    assert!(metric_sphere_margins(0.5, &[1.0]).is_err());
    assert!(metric_sphere_margins(2.0, &[2.0 * PI]).is_err());
}
