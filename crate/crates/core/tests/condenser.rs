use std::f64::consts::PI;

use ferrand::condenser::{solve_capacity, solve_single, CondenserSpec, Frame, Plate, Primitive};
use ferrand::{tau, Error};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn annulus_in_box_frame() {
    let r = solve_capacity(&CondenserSpec::annulus(1.0, std::f64::consts::E), None).unwrap();
    assert!(rel(r.best(), 2.0 * PI) < 0.01, "{}", r.best());
    assert!(r
        .levels
        .iter()
        .all(|l| l.energy_monotone && l.residual <= 1e-10));
}

#[test]
fn annulus_in_log_polar_frame_is_exact() {
    let spec = CondenserSpec {
        frame: Frame::log_polar([0.0, 0.0]),
        plate_e: Plate::new(
            "E",
            vec![Primitive::Circle {
                center: [0.0, 0.0],
                radius: 1.0,
            }],
        ),
        plate_f: Plate::new(
            "F",
            vec![Primitive::Circle {
                center: [0.0, 0.0],
                radius: 3.0,
            }],
        ),
    };
    let r = solve_capacity(&spec, None).unwrap();
    assert!(rel(r.best(), 2.0 * PI / 3f64.ln()) < 1e-8, "{}", r.best());
}

#[test]
fn teichmuller_rings() {
    for s in [0.5, 1.0, 3.0] {
        let r = solve_capacity(&CondenserSpec::teichmuller(s), None).unwrap();
        let exact = tau(s).unwrap();
        assert!(
            rel(r.best(), exact) < 0.02,
            "s = {s}: {} vs {exact}",
            r.best()
        );
        assert!(!r.extrapolation_refused);
    }
}

#[test]
fn grotzsch_ring() {
    let r = solve_capacity(&CondenserSpec::grotzsch(2.0), None).unwrap();
    let exact = ferrand::gamma(2.0).unwrap();
    assert!(rel(r.best(), exact) < 0.02, "{} vs {exact}", r.best());
}

#[test]
fn extrapolation_at_least_halves_the_error() {
    let r = solve_capacity(&CondenserSpec::teichmuller(1.0), None).unwrap();
    let fine = (r.capacity - 2.0).abs();
    let extrapolated = (r.extrapolated.unwrap() - 2.0).abs();
    assert!(2.0 * extrapolated <= fine, "{extrapolated} vs {fine}");
    let order = r.order.unwrap();
    assert!(order > 0.5 && order < 2.5, "{order}");
}

#[test]
fn capacity_is_scale_invariant() {
    let base = CondenserSpec::teichmuller(1.0);
    let r0 = solve_capacity(&base, None).unwrap();
    let discretization = (r0.capacity - r0.best()).abs();
    for c in [0.5, 3.0] {
        let r = solve_capacity(&base.scaled(c), None).unwrap();
        assert!((r.best() - r0.best()).abs() <= 2.0 * discretization);
    }
}

#[test]
fn capacity_grows_with_the_plate() {
    let ray = |from: f64| {
        Plate::new(
            "F",
            vec![Primitive::Ray {
                from: [from, 0.0],
                direction: [1.0, 0.0],
            }],
        )
    };
    let mut spec = CondenserSpec::teichmuller(1.0);
    let a = solve_capacity(&spec, None).unwrap().best();
    spec.plate_f = ray(0.5);
    let b = solve_capacity(&spec, None).unwrap().best();
    assert!(b > a);
    // truncating F removes curves
    spec.plate_f = Plate::new(
        "F",
        vec![Primitive::Segment {
            a: [1.0, 0.0],
            b: [3.0, 0.0],
        }],
    );
    let c = solve_capacity(&spec, None).unwrap().best();
    assert!(c < a);
}

#[test]
fn repeated_solves_are_identical() {
    let spec = CondenserSpec::teichmuller(3.0);
    assert_eq!(
        solve_capacity(&spec, None).unwrap(),
        solve_capacity(&spec, None).unwrap()
    );
}

#[test]
fn single_grid_reports_no_extrapolation() {
    let r = solve_single(&CondenserSpec::teichmuller(1.0), None).unwrap();
    assert_eq!(r.levels.len(), 1);
    assert!(r.extrapolated.is_none() && !r.extrapolation_refused);
}

#[test]
fn toml_round_trip() {
    let spec = CondenserSpec::grotzsch(1.5);
    assert_eq!(CondenserSpec::from_toml(&spec.to_toml()).unwrap(), spec);
    let text = r#"
        [frame]
        kind = "log-polar"
        center = [0.0, 0.0]

        [plate_e]
        id = "E"
        primitives = [{ kind = "segment", a = [-1.0, 0.0], b = [0.0, 0.0] }]

        [plate_f]
        id = "F"
        primitives = [{ kind = "ray", from = [1.0, 0.0], direction = [1.0, 0.0] }]
    "#;
    assert_eq!(
        CondenserSpec::from_toml(text).unwrap(),
        CondenserSpec::teichmuller(1.0)
    );
}

#[test]
fn malformed_toml_is_a_parse_error() {
    assert!(matches!(
        CondenserSpec::from_toml("[frame]\nkind = \"sphere\""),
        Err(Error::Parse(_))
    ));
    assert!(matches!(
        CondenserSpec::from_toml("not toml at all ="),
        Err(Error::Parse(_))
    ));
}

#[test]
fn overlapping_plates_are_rejected() {
    let spec = CondenserSpec {
        frame: Frame::log_polar([0.0, 0.0]),
        plate_e: Plate::new(
            "E",
            vec![Primitive::Segment {
                a: [-1.0, 0.0],
                b: [2.0, 0.0],
            }],
        ),
        plate_f: Plate::new(
            "F",
            vec![Primitive::Ray {
                from: [1.0, 0.0],
                direction: [1.0, 0.0],
            }],
        ),
    };
    assert!(matches!(
        solve_capacity(&spec, None),
        Err(Error::Condenser(_))
    ));
}

#[test]
fn coarse_grid_is_rejected() {
    let err = solve_capacity(&CondenserSpec::teichmuller(1.0), Some(1.0)).unwrap_err();
    assert!(matches!(err, Error::TooCoarse { .. }), "{err}");
}

#[test]
fn unbounded_plate_needs_log_polar_frame() {
    let mut spec = CondenserSpec::teichmuller(1.0);
    spec.frame = Frame::Box {
        xmin: -4.0,
        xmax: 4.0,
        ymin: -4.0,
        ymax: 4.0,
    };
    assert!(matches!(
        solve_capacity(&spec, None),
        Err(Error::Condenser(_))
    ));
}

#[test]
fn invalid_primitives_are_rejected() {
    let mut spec = CondenserSpec::teichmuller(1.0);
    spec.plate_e = Plate::new(
        "E",
        vec![Primitive::Circle {
            center: [0.0, 0.0],
            radius: -1.0,
        }],
    );
    assert!(solve_capacity(&spec, None).is_err());
    spec.plate_e = Plate::new("E", vec![]);
    assert!(matches!(spec.validate(), Err(Error::Condenser(_))));
}
