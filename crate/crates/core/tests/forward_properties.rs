use std::f64::consts::TAU;

use stefan_core::fem::{boundary_flux, CrankNicolson, NodalField};
use stefan_core::forward::{
    advance_boundary, random_star_boundary, simulate_forward, ForwardParams, InitialField, MeltingSchedule, MeshResolution, SchedulePreset,
};
use stefan_core::geometry::{map_mesh, FourierBoundary};

fn params(boundary: FourierBoundary, mesh: MeshResolution, preset: SchedulePreset, steps: usize) -> ForwardParams {
    ForwardParams::new(preset, 0.05, steps, mesh, boundary).unwrap()
}

#[test]
fn constant_melting_temperature_keeps_the_domain() {
    let b = random_star_boundary(7, 0.1, 11);
    let mut p = params(b.clone(), MeshResolution::new(64, 8), SchedulePreset::Quadratic, 20);
    p.schedule = MeltingSchedule::from_values(0.0, 0.05, vec![0.4; 21]).unwrap();
    let run = simulate_forward(&p).unwrap();
    for r in run.tube.records() {
        for (x, y) in r.boundary.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).abs() <= 1e-10);
        }
    }
}

#[test]
fn forward_map_commutes_with_sector_rotations() {
    // 64 boundary vertices on 8 rings: ring j has 8j vertices, so a turn by
    // 2 pi / 8 maps the reference mesh onto itself
    let mesh = MeshResolution::new(64, 8);
    let theta = TAU / 8.0;
    let b = random_star_boundary(5, 0.15, 3);
    let run = simulate_forward(&params(b.clone(), mesh, SchedulePreset::Cosine, 6)).unwrap();
    let turned = simulate_forward(&params(b.rotated(theta), mesh, SchedulePreset::Cosine, 6)).unwrap();
    for (r, s) in run.tube.records().iter().zip(turned.tube.records()) {
        let want = r.boundary.rotated(theta);
        for (x, y) in want.coeffs().iter().zip(s.boundary.coeffs()) {
            assert!((x - y).abs() <= 1e-8, "t={}: {x} vs {y}", r.t);
        }
    }
}

#[test]
fn disc_stays_a_disc_when_sectors_exceed_the_order() {
    // 128 / 16 = 8 sectors; mesh asymmetry only excites modes that are
    // multiples of 8, which order 7 drops
    let run = simulate_forward(&params(FourierBoundary::circle(7, 1.0), MeshResolution::COARSE, SchedulePreset::Quadratic, 10)).unwrap();
    let last = run.tube.boundary(10);
    assert!(last.mean_radius() > 1.0);
    for r in run.tube.records() {
        assert!(r.boundary.shape_energy() < 1e-24, "{}", r.boundary.shape_energy());
    }
}

#[test]
fn boundary_update_is_affine_in_the_slope() {
    let reference = MeshResolution::new(48, 6).build().unwrap();
    let b = random_star_boundary(6, 0.1, 8);
    let mesh = map_mesh(&b, &reference, 0).unwrap();
    let v: NodalField = InitialField::Radial(vec![(0.0, 0.3), (0.5, 0.1), (1.0, 0.0)]).project(&mesh).unwrap();
    let dt = 0.05;
    let heat = CrankNicolson::new(&mesh, dt).unwrap();
    let (v1, v2) = heat.split(&v).unwrap();
    let f1 = boundary_flux(&mesh, &v1, &b).unwrap();
    let f2 = boundary_flux(&mesh, &v2, &b).unwrap();
    for alpha in [-1.0, 0.37, 2.0] {
        let direct = advance_boundary(&b, &boundary_flux(&mesh, &heat.step(&v, alpha).unwrap(), &b).unwrap(), dt, 6).unwrap();
        let mut combined = f1.clone();
        for (c, g) in combined.values.iter_mut().zip(&f2.values) {
            *c += alpha * g;
        }
        let split = advance_boundary(&b, &combined, dt, 6).unwrap();
        for (x, y) in direct.coeffs().iter().zip(split.coeffs()) {
            assert!((x - y).abs() <= 1e-10);
        }
    }
}

#[test]
fn recorded_fields_follow_the_meshes() {
    let mut p = params(random_star_boundary(3, 0.1, 2), MeshResolution::new(32, 4), SchedulePreset::Quadratic, 3);
    p.record_fields = true;
    let run = simulate_forward(&p).unwrap();
    assert_eq!(run.fields.len(), 4);
    assert_eq!(run.diagnostics.len(), 3);
    for (f, r) in run.fields.iter().zip(run.tube.records()) {
        assert_eq!(f.t, r.t);
        assert_eq!(f.vertices.len(), f.values.len());
    }
    // heating from u_m decreasing: the field is positive and the front advances
    assert!(run.fields[3].values.iter().all(|&v| v >= 0.0));
    assert!(run.diagnostics.iter().all(|d| d.front_speed.0 > 0.0));
}

#[test]
fn collapsing_domain_reports_the_step() {
    let mut p = params(FourierBoundary::circle(2, 0.2), MeshResolution::new(32, 4), SchedulePreset::Quadratic, 40);
    // u_m rising steeply: the melt cools and the domain shrinks to nothing
    p.schedule = MeltingSchedule::sample(0.05, 40, |t| 40.0 * t).unwrap();
    let err = simulate_forward(&p).unwrap_err();
    assert!(matches!(err, stefan_core::StefanError::AtStep { .. }), "{err}");
}
