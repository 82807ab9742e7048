use std::f64::consts::PI;

use nalgebra::DVector;
use proptest::prelude::*;

use lietaut::morse::pencil_radius;
use lietaut::quadric::{
    contact_to_line, lie_inner, line_to_contact, oriented_contact, pencil_sphere, quadric_to_sphere,
    random_contact_element, sphere_to_quadric, OrientedSphere,
};
use lietaut::rng::{rng_from_seed, unit_vector};
use lietaut::transform::{
    apply_line, apply_point, apply_to_point_of_sphere, parallel_transformation, random_lie_transformation,
    random_rotation_transformation, TransformSampler,
};

fn unit(seed: u64, dim: usize) -> DVector<f64> {
    unit_vector(&mut rng_from_seed(seed), dim)
}

proptest! {
    #[test]
    fn spheres_land_on_the_quadric(seed in any::<u64>(), n in 2usize..7, rho in -3.1f64..3.1) {
        let s = OrientedSphere::new(unit(seed, n + 1), rho).unwrap();
        let k = sphere_to_quadric(&s);
        prop_assert!(k.quadric_residual() < 1e-12);
        let back = quadric_to_sphere(&k).unwrap();
        // either description of the same oriented sphere
        let same = (back.center() - s.center()).norm() < 1e-9 && (back.signed_radius() - rho).abs() < 1e-9;
        let flip = s.antipodal_description().map_or(false, |a| {
            (back.center() - a.center()).norm() < 1e-9 && (back.signed_radius() - a.signed_radius()).abs() < 1e-9
        });
        prop_assert!(same || flip);
    }

    #[test]
    fn contact_lines_round_trip(seed in any::<u64>(), n in 2usize..7) {
        let c = random_contact_element(&mut rng_from_seed(seed), n).unwrap();
        let line = contact_to_line(&c);
        prop_assert!(line.invariant_residual() < 1e-12);
        let back = line_to_contact(&line).unwrap();
        prop_assert!((back.point() - c.point()).norm() < 1e-9);
        prop_assert!((back.direction() - c.direction()).norm() < 1e-9);
    }

    #[test]
    fn pencil_members_are_in_mutual_contact(seed in any::<u64>(), t1 in 0.01f64..3.13, t2 in 0.01f64..3.13) {
        let c = random_contact_element(&mut rng_from_seed(seed), 3).unwrap();
        let a = pencil_sphere(&c, t1).unwrap();
        let b = pencil_sphere(&c, t2).unwrap();
        prop_assert!(oriented_contact(&a, &b).unwrap());
    }

    #[test]
    fn transformations_preserve_the_lie_form(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = rng_from_seed(seed);
        let t = random_lie_transformation(&mut rng, n, &TransformSampler::default());
        prop_assert!(t.residual() < 1e-9);
        let a = sphere_to_quadric(&OrientedSphere::new(unit_vector(&mut rng, n + 1), 0.7).unwrap());
        let b = sphere_to_quadric(&OrientedSphere::new(unit_vector(&mut rng, n + 1), -0.4).unwrap());
        let before = lie_inner(a.rep(), b.rep()).unwrap();
        let after = lie_inner(&t.apply_vector(a.rep()).unwrap(), &t.apply_vector(b.rep()).unwrap()).unwrap();
        prop_assert!((before - after).abs() < 1e-9 * (1.0 + t.matrix().norm().powi(2)));
        prop_assert!(apply_point(&t, &a).unwrap().quadric_residual() < 1e-9);
    }

    #[test]
    fn transformed_contact_lines_stay_on_the_quadric(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let t = random_lie_transformation(&mut rng, 3, &TransformSampler::default());
        let c = random_contact_element(&mut rng, 3).unwrap();
        let img = apply_line(&t, &contact_to_line(&c)).unwrap();
        prop_assert!(img.invariant_residual() < 1e-9);
        prop_assert!(line_to_contact(&img).is_ok());
    }

    #[test]
    fn inverse_undoes_composition(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let a = random_lie_transformation(&mut rng, 3, &TransformSampler::default());
        let b = random_rotation_transformation(&mut rng, 3);
        let id = a.compose(&b).compose(&b.inverse()).compose(&a.inverse());
        let err = (id.matrix() - nalgebra::DMatrix::<f64>::identity(6, 6)).abs().max();
        prop_assert!(err < 1e-9);
    }

    #[test]
    fn rotations_move_points_rigidly(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let t = random_rotation_transformation(&mut rng, 3);
        let p = unit_vector(&mut rng, 4);
        let q = unit_vector(&mut rng, 4);
        let (tp, tq) = (apply_to_point_of_sphere(&t, &p).unwrap(), apply_to_point_of_sphere(&t, &q).unwrap());
        prop_assert!((tp.norm() - 1.0).abs() < 1e-12);
        prop_assert!((tp.dot(&tq) - p.dot(&q)).abs() < 1e-12);
    }

    #[test]
    fn parallel_transformations_add(s in -1.0f64..1.0, t in -1.0f64..1.0) {
        let a = parallel_transformation(s, 3).compose(&parallel_transformation(t, 3));
        let b = parallel_transformation(s + t, 3);
        prop_assert!((a.matrix() - b.matrix()).abs().max() < 1e-12);
    }

    #[test]
    fn pencil_radius_stays_in_range(seed in any::<u64>(), n in 2usize..7) {
        let mut rng = rng_from_seed(seed);
        let c = random_contact_element(&mut rng, n).unwrap();
        let x = unit_vector(&mut rng, n + 1);
        if (&x - c.point()).norm() > 1e-6 {
            let r = pencil_radius(&c, &x).unwrap();
            prop_assert!(r > 0.0 && r < PI);
        }
    }
}
