//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};
use std::time::Instant;

use nalgebra::DVector;
use rand::Rng;

use lietaut::homology::{induced_map_injective, kuiper_scan, sublevel};
use lietaut::legendre::{arccot, shape_operator, CatalogSurface, EmbeddedSurface, LegendreLift, NormalFrame};
use lietaut::morse::{
    build_field, index_agreement, kuiper_check, lie_taut_check, pencil_radius,
    sard_directional_derivative, taut_check, FieldKind, LineSampling, SampleRecord, TautOptions, TautVerdict, Transport, Verdict,
};
use lietaut::quadric::{
    contact_to_line, lie_inner, line_to_contact, pencil_sphere, quadric_to_sphere,
    random_contact_element, sphere_to_quadric, ContactElement, OrientedSphere, ProjectivePoint,
};
use lietaut::rng::{rng_from_seed, unit_vector};
use lietaut::transform::{
    apply_point, parallel_transformation, random_lie_transformation, random_rotation_transformation,
    LieTransformation, TransformSampler,
};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Check {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn sphere_spec() -> CatalogSurface {
    CatalogSurface::RoundSphere {
        k: 2,
        n: 3,
        radius: PI / 3.0,
    }
}

fn opts(num_samples: usize, seed: u64) -> TautOptions {
    TautOptions {
        num_samples,
        seed,
        ..Default::default()
    }
}

fn kept(v: &TautVerdict) -> Vec<usize> {
    v.kept_counts().into_iter().map(|(_, c)| c).collect()
}

fn c1_point_values() -> Check {
    let mut rng = rng_from_seed(1);
    let mut worst: f64 = 0.0;
    for n in [2, 3, 5] {
        for _ in 0..100 {
            let c = random_contact_element(&mut rng, n).unwrap();
            let (p, xi) = (c.point(), c.direction());
            for (x, want) in [(xi.clone(), FRAC_PI_4), (-p, FRAC_PI_2), (-xi, 3.0 * FRAC_PI_4)] {
                worst = worst.max((pencil_radius(&c, &x).unwrap() - want).abs());
            }
        }
    }
    ensure(worst < 1e-12, format!("max error {worst:.1e}"))
}

fn c2_implicit_residual() -> Check {
    let mut rng = rng_from_seed(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100_000 {
        let c = random_contact_element(&mut rng, 3).unwrap();
        let x = unit_vector(&mut rng, 4);
        let r = pencil_radius(&c, &x).unwrap();
        let res = r.cos() - x.dot(&(c.point() * r.cos() + c.direction() * r.sin()));
        worst = worst.max(res.abs());
    }
    ensure(worst < 1e-12, format!("max residual {worst:.1e} over 1e5 draws"))
}

fn c3_quadric_suites() -> Check {
    let mut rng = rng_from_seed(3);
    let mut worst: f64 = 0.0;
    for n in [3, 5] {
        for _ in 0..10_000 {
            // sphere round trip
            let p = unit_vector(&mut rng, n + 1);
            let rho = rng.random_range(-FRAC_PI_2 + 1e-3..FRAC_PI_2);
            let s = OrientedSphere::new(p.clone(), rho).unwrap();
            let back = quadric_to_sphere(&sphere_to_quadric(&s)).unwrap();
            worst = worst.max((back.center() - &p).norm()).max((back.signed_radius() - rho).abs());
            // contact element round trip
            let c = random_contact_element(&mut rng, n).unwrap();
            let line = contact_to_line(&c);
            worst = worst.max(line.invariant_residual());
            let c2 = line_to_contact(&line).unwrap();
            worst = worst.max((c2.point() - c.point()).norm()).max((c2.direction() - c.direction()).norm());
            // pencil collinearity and mutual contact
            let t1 = rng.random_range(0.0..PI);
            let t2 = rng.random_range(0.0..PI);
            let k1 = sphere_to_quadric(&pencil_sphere(&c, t1).unwrap()).normalized();
            let k2 = sphere_to_quadric(&pencil_sphere(&c, t2).unwrap()).normalized();
            worst = worst.max(lie_inner(k1.rep(), k2.rep()).unwrap().abs());
            let on_line = ProjectivePoint::new(line.pencil_point(t1)).unwrap();
            worst = worst.max(on_line.projective_distance(&k1));
        }
    }
    ensure(worst < 1e-9, format!("max violation {worst:.1e} over 2·1e4 draws"))
}

fn c4_group() -> Check {
    let mut rng = rng_from_seed(4);
    let mut a = LieTransformation::identity(3);
    for _ in 0..100 {
        let g = if rng.random_bool(0.5) {
            random_lie_transformation(&mut rng, 3, &TransformSampler::default())
        } else {
            random_rotation_transformation(&mut rng, 3)
        };
        a = a.compose(&g);
    }
    let residual = a.residual();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p = unit_vector(&mut rng, 4);
        let rho = rng.random_range(-1.0..1.0);
        let t = rng.random_range(-0.5..0.5);
        let img = apply_point(
            &parallel_transformation(t, 3),
            &sphere_to_quadric(&OrientedSphere::new(p.clone(), rho).unwrap()),
        )
        .unwrap();
        let want = sphere_to_quadric(&OrientedSphere::new(p, rho + t).unwrap());
        worst = worst.max(img.projective_distance(&want));
    }
    ensure(
        residual < 1e-8 && worst < 1e-10,
        format!("composition residual {residual:.1e}, radius law error {worst:.1e}"),
    )
}

fn c5_sphere() -> Check {
    let s = sphere_spec().build(64).unwrap();
    let v = taut_check(&s, &opts(200, 7)).unwrap();
    let counts = kept(&v);
    ensure(
        v.samples_used >= 150 && counts.iter().all(|&c| c == 2) && v.verdict == Verdict::Taut,
        format!("{} kept, histogram {:?}, verdict {:?}", v.samples_used, v.counts_histogram, v.verdict),
    )
}

fn c6_clifford() -> Check {
    let s = CatalogSurface::CliffordTorus.build(64).unwrap();
    let v = taut_check(&s, &opts(200, 7)).unwrap();
    let d = v.distance.clone().unwrap();
    let pencil_ok = kept(&v).iter().all(|&c| c == 4) && v.verdict == Verdict::Taut;
    let distance_ok = d.counts.keys().all(|&c| c == 4) && d.used > 0;
    ensure(
        pencil_ok && distance_ok,
        format!(
            "pencil {:?} ({} kept), distance {:?} ({} kept), verdict {:?}",
            v.counts_histogram, v.samples_used, d.counts, d.used, v.verdict
        ),
    )
}

fn c7_lie_invariance() -> Check {
    let s = CatalogSurface::CliffordTorus.build(64).unwrap();
    let lift = LegendreLift::of_surface(&s, 2).unwrap();
    let mut rng = rng_from_seed(77);
    let transforms = [
        ("identity", LieTransformation::identity(3)),
        ("P_pi/8", parallel_transformation(FRAC_PI_8, 3)),
        ("rotation", random_rotation_transformation(&mut rng, 3)),
        ("mixed", random_lie_transformation(&mut rng, 3, &TransformSampler::default())),
    ];
    let o = opts(200, 7);
    let mut reference: Option<Vec<(usize, usize)>> = None;
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, t) in &transforms {
        let v = lie_taut_check(&lift, Some(t), &o, &LineSampling::Contact, Transport::Consistent).unwrap();
        let counts = v.kept_counts();
        ok &= v.expected == 4 && counts.iter().all(|&(_, c)| c == 4) && v.verdict == Verdict::Taut;
        match &reference {
            None => reference = Some(counts.clone()),
            Some(r) => ok &= *r == counts,
        }
        notes.push(format!("{name}: {:?}/{}", v.counts_histogram, v.samples_used));
    }
    ensure(ok, notes.join("; "))
}

fn c8_bumpy() -> Check {
    let s = CatalogSurface::bumpy_torus(0.3).build(64).unwrap();
    let v = taut_check(&s, &opts(200, 7)).unwrap();
    let Some(conf) = v.confirmations.iter().find(|c| c.confirmed) else {
        return Err(format!("verdict {:?}, histogram {:?}, no confirmed sample", v.verdict, v.counts_histogram));
    };
    let rec = &v.samples[conf.sample];
    let c = record_contact(rec);
    let field = build_field(&s, FieldKind::PencilRadius(c), 0.0).unwrap();
    let scan = kuiper_scan(s.complex(), &field.values).unwrap();
    let Some(fail) = scan.first_failure.clone() else {
        return Err("failing field passes the Kuiper scan".into());
    };
    let sub = sublevel(s.complex(), &field.values, fail.threshold).unwrap();
    let direct = induced_map_injective(&sub);
    ensure(
        v.verdict == Verdict::NotTaut && conf.refined_count.unwrap_or(0) >= 6 && !direct,
        format!(
            "verdict {:?}, sample {} μ = {} → {:?} at {} vertices; Kuiper fails at r = {:.6} (degree {})",
            v.verdict,
            conf.sample,
            conf.coarse_count,
            conf.refined_count,
            conf.refined_vertices,
            fail.threshold,
            fail.degree
        ),
    )
}

fn record_contact(rec: &SampleRecord) -> ContactElement {
    ContactElement::new(DVector::from_vec(rec.point.clone()), DVector::from_vec(rec.direction.clone())).unwrap()
}

fn index_stats(s: &EmbeddedSurface, seed: u64, fields: usize) -> (usize, usize, Vec<ContactElement>) {
    let h = s.max_edge_length();
    let o = opts(fields, seed);
    let v = taut_check(s, &TautOptions { distance_check: false, confirm_with_refinement: false, ..o }).unwrap();
    let (mut total, mut matched) = (0, 0);
    let mut mismatched = Vec::new();
    for rec in v.samples.iter().filter(|r| r.rejection.is_none()) {
        let c = record_contact(rec);
        let mut bad = false;
        for cmp in index_agreement(s, &c, 10.0 * h).unwrap() {
            if cmp.degenerate || cmp.multiplicity != 1 {
                continue;
            }
            total += 1;
            if cmp.matches() {
                matched += 1;
            } else {
                bad = true;
            }
        }
        if bad {
            mismatched.push(c);
        }
    }
    (total, matched, mismatched)
}

fn c9_index_agreement() -> Check {
    let specs = [
        sphere_spec(),
        CatalogSurface::CliffordTorus,
        CatalogSurface::TorusOfRevolution { a: 1.0, b: 2.0 },
        CatalogSurface::bumpy_torus(0.3),
    ];
    let mut notes = Vec::new();
    let mut ok = true;
    for spec in &specs {
        let s = spec.build(64).unwrap();
        let (total, matched, mismatched) = index_stats(&s, 9, 100);
        let rate = matched as f64 / total.max(1) as f64;
        ok &= total > 0 && rate >= 0.95;
        let mut note = format!("{spec}: {matched}/{total}");
        if !mismatched.is_empty() {
            // the mismatched fields, one refinement up
            let fine = s.refine().unwrap();
            let mut fine_bad = 0;
            for c in &mismatched {
                fine_bad += index_agreement(&fine, c, 10.0 * fine.max_edge_length())
                    .unwrap()
                    .iter()
                    .filter(|m| !m.degenerate && m.multiplicity == 1 && !m.matches())
                    .count();
            }
            ok &= fine_bad == 0;
            note.push_str(&format!(", refined mismatches {fine_bad}"));
        }
        notes.push(note);
    }
    ensure(ok, notes.join("; "))
}

fn c10_sard() -> Check {
    let s = CatalogSurface::CliffordTorus.build(64).unwrap();
    let lift = LegendreLift::of_surface(&s, 2).unwrap();
    let step = 1e-5;
    let mut rng = rng_from_seed(10);
    let (mut focal_max, mut generic_min): (f64, f64) = (0.0, f64::INFINITY);
    for i in 0..200 {
        let frame: &NormalFrame = &lift.frames()[rng.random_range(0..lift.frames().len())];
        let sd = shape_operator(&s, frame).unwrap();
        let which = rng.random_range(0..2);
        let x_dir = sd.principal_directions[which].clone();
        let focal = i % 2 == 0;
        let r = if focal {
            arccot(sd.principal_curvatures[which])
        } else {
            loop {
                let r: f64 = rng.random_range(0.05..PI - 0.05);
                if sd.principal_curvatures.iter().all(|&k| (arccot(k) - r).abs() > 0.1) {
                    break r;
                }
            }
        };
        let q = &frame.point * r.cos() + &frame.normal * r.sin();
        let g = unit_vector(&mut rng, 4);
        let eta = {
            let e = &g - &q * q.dot(&g);
            &e / e.norm()
        };
        let d = sard_directional_derivative(&s, frame, r, &eta, &x_dir, step).unwrap();
        if focal {
            focal_max = focal_max.max(d);
        } else {
            generic_min = generic_min.min(d);
        }
    }
    ensure(
        focal_max < 10.0 * step && generic_min > 1e3 * step,
        format!("curvature-sphere max |dF| {focal_max:.2e}, generic min |dF| {generic_min:.2e} (h = {step:.0e})"),
    )
}

fn c11_kuiper() -> Check {
    let specs = [
        sphere_spec(),
        CatalogSurface::CliffordTorus,
        CatalogSurface::TorusOfRevolution { a: 1.0, b: 2.0 },
        CatalogSurface::bumpy_torus(0.3),
    ];
    let mut notes = Vec::new();
    let mut ok = true;
    for spec in &specs {
        let s = spec.build(32).unwrap();
        // draw until 50 nondegenerate fields are kept
        let report = kuiper_check(&s, &opts(120, 11)).unwrap();
        let used: Vec<_> = report.samples.iter().take(50).collect();
        let agree = used.iter().filter(|k| k.agrees).count();
        let failing = used.iter().filter(|k| !k.injective).count();
        ok &= used.len() == 50 && agree == 50;
        notes.push(format!("{spec}: {agree}/{} agree, {failing} non-injective", used.len()));
    }
    ensure(ok, notes.join("; "))
}

fn c12_determinism() -> Check {
    let s = CatalogSurface::CliffordTorus.build(32).unwrap();
    let o = opts(60, 12);
    let a = serde_json::to_string(&taut_check(&s, &o).unwrap()).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| serde_json::to_string(&taut_check(&s, &o).unwrap()).unwrap());
    let lift = LegendreLift::of_surface(&s, 2).unwrap();
    let t = parallel_transformation(0.3, 3);
    let run = || {
        serde_json::to_string(&lie_taut_check(&lift, Some(&t), &o, &LineSampling::Contact, Transport::Independent).unwrap())
            .unwrap()
    };
    let (c, d) = (run(), pool.install(run));
    ensure(a == b && c == d, format!("taut report {} bytes, lie-taut report {} bytes", a.len(), c.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("pencil-radius point values", c1_point_values),
        ("implicit-equation residual", c2_implicit_residual),
        ("quadric round trip and pencil collinearity", c3_quadric_suites),
        ("transformation group", c4_group),
        ("round sphere is taut", c5_sphere),
        ("Clifford torus is taut", c6_clifford),
        ("Lie invariance of the count", c7_lie_invariance),
        ("bumpy torus is not taut", c8_bumpy),
        ("Hessian / PL index agreement", c9_index_agreement),
        ("Sard map degeneracy", c10_sard),
        ("Kuiper scan equals perfect count", c11_kuiper),
        ("determinism", c12_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = check();
        let secs = t0.elapsed().as_secs_f64();
        let (tag, msg) = match outcome {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!("[{tag}] {:>2} {name} ({secs:.2}s): {msg}", i + 1);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 12 acceptance criteria passed");
}

