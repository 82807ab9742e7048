use std::f64::consts::PI;

use lietaut::legendre::{CatalogSurface, EmbeddedSurface};
use lietaut::morse::{
    build_field, criticality_residual, pencil_center, pencil_radius, pl_critical_points, spherical_distance,
    CriticalKind, FieldKind,
};
use lietaut::quadric::random_contact_element;
use lietaut::rng::{rng_from_seed, unit_vector};

fn surfaces() -> Vec<EmbeddedSurface> {
    vec![
        CatalogSurface::RoundSphere { k: 2, n: 3, radius: 1.0 }.build(32).unwrap(),
        CatalogSurface::CliffordTorus.build(32).unwrap(),
        CatalogSurface::bumpy_torus(0.3).build(32).unwrap(),
    ]
}

#[test]
fn reversing_the_direction_reflects_the_radius() {
    let mut rng = rng_from_seed(21);
    for _ in 0..1000 {
        let c = random_contact_element(&mut rng, 4).unwrap();
        let x = unit_vector(&mut rng, 5);
        let r = pencil_radius(&c, &x).unwrap();
        let s = pencil_radius(&c.reversed(), &x).unwrap();
        assert!((r + s - PI).abs() < 1e-12);
        assert!(r > 0.0 && r < PI);
    }
}

#[test]
fn level_sets_are_pencil_spheres() {
    let mut rng = rng_from_seed(22);
    for _ in 0..500 {
        let c = random_contact_element(&mut rng, 3).unwrap();
        let t = 0.05 + (PI - 0.1) * rand::Rng::random::<f64>(&mut rng);
        let center = pencil_center(&c, t);
        // a random point at angle t from the center
        let g = unit_vector(&mut rng, 4);
        let w = (&g - &center * center.dot(&g)).normalize();
        let x = &center * t.cos() + &w * t.sin();
        assert!((spherical_distance(&center, &x) - t).abs() < 1e-12);
        assert!((pencil_radius(&c, &x).unwrap() - t).abs() < 1e-10);
    }
}

#[test]
fn distance_to_antipode_is_complementary() {
    let mut rng = rng_from_seed(23);
    for _ in 0..500 {
        let p = unit_vector(&mut rng, 4);
        let x = unit_vector(&mut rng, 4);
        assert!((spherical_distance(&p, &x) + spherical_distance(&-&p, &x) - PI).abs() < 1e-12);
    }
}

#[test]
fn critical_points_satisfy_the_euler_identity() {
    let mut rng = rng_from_seed(24);
    for s in surfaces() {
        let tol = 2.0 * s.max_edge_length();
        let mut checked = 0;
        while checked < 20 {
            let c = random_contact_element(&mut rng, 3).unwrap();
            let Ok(f) = build_field(&s, FieldKind::PencilRadius(c), tol) else {
                continue;
            };
            let report = pl_critical_points(&f).unwrap();
            assert_eq!(report.alternating_sum(), s.euler_characteristic(), "{}", s.name());
            assert!(report.count(CriticalKind::Minimum) >= 1 && report.count(CriticalKind::Maximum) >= 1);
            assert!(report.total >= s.betti_sum());
            checked += 1;
        }
    }
}

#[test]
fn reversed_field_swaps_minima_and_maxima() {
    let mut rng = rng_from_seed(25);
    let s = CatalogSurface::bumpy_torus(0.3).build(32).unwrap();
    let tol = 2.0 * s.max_edge_length();
    let mut checked = 0;
    while checked < 20 {
        let c = random_contact_element(&mut rng, 3).unwrap();
        let (Ok(f), Ok(g)) = (
            build_field(&s, FieldKind::PencilRadius(c.clone()), tol),
            build_field(&s, FieldKind::PencilRadius(c.reversed()), tol),
        ) else {
            continue;
        };
        let (a, b) = (pl_critical_points(&f).unwrap(), pl_critical_points(&g).unwrap());
        assert_eq!(a.total, b.total);
        assert_eq!(a.count(CriticalKind::Minimum), b.count(CriticalKind::Maximum));
        assert_eq!(a.count(CriticalKind::Saddle), b.count(CriticalKind::Saddle));
        checked += 1;
    }
}

#[test]
fn pl_critical_vertices_are_near_tangency() {
    let mut rng = rng_from_seed(26);
    for s in surfaces() {
        let h = s.max_edge_length();
        let mut checked = 0;
        while checked < 20 {
            let c = random_contact_element(&mut rng, 3).unwrap();
            let Ok(f) = build_field(&s, FieldKind::PencilRadius(c.clone()), 2.0 * h) else {
                continue;
            };
            for p in pl_critical_points(&f).unwrap().points {
                let res = criticality_residual(&s, p.vertex, &c).unwrap();
                assert!(res < 3.0 * h, "{}: residual {res} vs h {h}", s.name());
            }
            checked += 1;
        }
    }
}

#[test]
fn clifford_distance_functions_have_four_critical_points() {
    let mut rng = rng_from_seed(27);
    let s = CatalogSurface::CliffordTorus.build(48).unwrap();
    let tol = 2.0 * s.max_edge_length();
    let mut checked = 0;
    while checked < 20 {
        let p = unit_vector(&mut rng, 4);
        let (Ok(f), Ok(_)) = (
            build_field(&s, FieldKind::SphericalDistance(p.clone()), tol),
            build_field(&s, FieldKind::SphericalDistance(-&p), tol),
        ) else {
            continue;
        };
        let report = pl_critical_points(&f).unwrap();
        if !report.degenerate {
            assert_eq!(report.total, 4);
        }
        checked += 1;
    }
}

#[test]
fn bumpy_torus_regression_example() {
    use lietaut::homology::{injectivity_defects, kuiper_scan, sublevel};
    use lietaut::morse::{taut_check, TautOptions, Verdict};
    use lietaut::quadric::ContactElement;
    use nalgebra::DVector;

    let s = CatalogSurface::bumpy_torus(0.3).build(64).unwrap();
    let v = taut_check(&s, &TautOptions { seed: 7, ..Default::default() }).unwrap();
    assert_eq!(v.verdict, Verdict::NotTaut);
    let conf = v.confirmations.iter().find(|c| c.confirmed).unwrap();
    assert_eq!(conf.sample, 1);
    let rec = &v.samples[conf.sample];
    let c = ContactElement::new(DVector::from_vec(rec.point.clone()), DVector::from_vec(rec.direction.clone())).unwrap();
    let f = build_field(&s, FieldKind::PencilRadius(c), 0.0).unwrap();
    let fast = kuiper_scan(s.complex(), &f.values).unwrap();
    let fail = fast.first_failure.unwrap();
    assert!((fail.threshold - 2.139553).abs() < 1e-6, "{}", fail.threshold);
    assert_eq!(fail.degree, 0);
    // two sublevel components that the torus joins
    assert_eq!(injectivity_defects(&sublevel(s.complex(), &f.values, fail.threshold).unwrap())[0], 1);
}
