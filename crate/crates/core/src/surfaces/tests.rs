use super::*;
use crate::group::{dilate, rotate_z};
use crate::numerics::gauss_legendre_1d;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn grid_points(d: Rect, n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let a = d.x0 + (d.x1 - d.x0) * (i as f64 + 0.37) / n as f64;
            let b = d.y0 + (d.y1 - d.y0) * (j as f64 + 0.61) / n as f64;
            out.push((a, b));
        }
    }
    out
}

#[test]
fn vertical_plane_frame() {
    let p = VerticalPlane::x_equals_zero();
    for u in [(0.0, 0.0), (1.5, -2.0), (-3.0, 4.0)] {
        let f = surface_frame(&p, u).unwrap();
        assert!((f.n - FrameVector::X).norm() < 1e-15);
        assert_eq!(f.nh_norm, 1.0);
        assert_eq!(f.nt, 0.0);
        assert!((f.bzs - 1.0).abs() < 1e-14);
        assert!((f.z - FrameVector::Y).norm() < 1e-15);
        assert!((f.s + FrameVector::T).norm() < 1e-15);
    }
    // tilted direction through an offset point: same invariants
    let p = VerticalPlane::new(0.7, -1.2, 0.4);
    let f = surface_frame(&p, (0.3, 2.0)).unwrap();
    assert!(f.nt.abs() < 1e-15 && (f.bzs - 1.0).abs() < 1e-13 && f.h.abs() < 1e-13);
}

#[test]
fn helicoid_normal_matches_closed_forms() {
    for r in [0.5, 1.0, 2.0, 3.0] {
        let hel = Helicoid::new(r).unwrap();
        for (s, e) in grid_points(hel.domain, 9) {
            let nd = normal_data(&hel, (s, e)).unwrap();
            let d = hel.d(s).sqrt();
            let (sn, cs) = (r * e).sin_cos();
            let expect = FrameVector::new(hel.f(s) * cs, -hel.f(s) * sn, -r * s) * (1.0 / d);
            assert!((nd.n_unit - expect).norm() < 1e-14);
            assert!((nd.nh_norm - hel.nh_closed(s)).abs() < 1e-14);
            assert!((nd.nt - hel.nt_closed(s)).abs() < 1e-14);
            if (s.abs() - 1.0 / r).abs() > 1e-3 {
                let f = surface_frame(&hel, (s, e)).unwrap();
                assert!((f.bzs - hel.bzs_closed(s)).abs() < 1e-8, "R={r} s={s}");
                assert!((f.q() - hel.q_closed(s)).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn q_vanishes_on_h2() {
    let hel = Helicoid::new(2.0).unwrap();
    for (s, e) in grid_points(hel.domain, 15) {
        if let Ok(f) = surface_frame(&hel, (s, e)) {
            assert!(f.q().abs() < 1e-8);
        }
    }
}

#[test]
fn catalog_surfaces_are_minimal() {
    let charts: Vec<Box<dyn Chart>> = vec![
        Box::new(Paraboloid::default()),
        Box::new(Catenoid::new(1.0, 1.0).unwrap()),
        Box::new(Catenoid::new(1.0, -1.0).unwrap()),
        Box::new(Helicoid::new(1.0).unwrap()),
        Box::new(Helicoid::new(2.0).unwrap()),
        Box::new(Plane::new(0.3, -1.1, 2.0)),
        Box::new(VerticalPlane::new(1.0, 2.0, 0.9)),
    ];
    for c in &charts {
        let mut n = 0;
        for u in grid_points(c.domain(), 12) {
            match surface_frame(c.as_ref(), u) {
                Ok(f) => {
                    assert!(f.h.abs() < 1e-8, "{}: H = {} at {u:?}", c.label(), f.h);
                    n += 1;
                }
                Err(Error::SingularPoint { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
        assert!(n > 100);
    }
}

#[test]
fn frame_relations_hold() {
    let charts: Vec<Box<dyn Chart>> = vec![
        Box::new(Paraboloid::default()),
        Box::new(Catenoid::new(1.0, 1.0).unwrap()),
        Box::new(Helicoid::new(2.0).unwrap()),
        Box::new(Plane::new(0.3, -1.1, 2.0)),
    ];
    for c in &charts {
        for u in grid_points(c.domain(), 8) {
            let Ok(f) = surface_frame(c.as_ref(), u) else { continue };
            assert!((f.n.norm() - 1.0).abs() < 1e-12);
            assert!((f.nh_norm.powi(2) + f.nt.powi(2) - 1.0).abs() < 1e-12);
            assert!(f.z.c.abs() < 1e-15 && (f.z.norm() - 1.0).abs() < 1e-12);
            assert!((f.s.norm() - 1.0).abs() < 1e-12 && f.z.dot(&f.s).abs() < 1e-12);
            assert!(f.z.dot(&f.n).abs() < 1e-12 && f.s.dot(&f.n).abs() < 1e-12);
            // tangential parts of ν_h and T
            let tang = |v: FrameVector| v - v.dot(&f.n) * f.n;
            assert!((tang(f.nu_h) - f.nt * f.s).norm() < 1e-10);
            assert!((tang(FrameVector::T) + f.nh_norm * f.s).norm() < 1e-10);
            // B is tangent-valued and symmetric
            assert!(f.bz.dot(&f.n).abs() < 1e-9 && f.bs.dot(&f.n).abs() < 1e-9);
            assert!((f.bz.dot(&f.s) - f.bs.dot(&f.z)).abs() < 1e-9 * (1.0 + f.bzs.abs()));
            assert!((2.0 * f.h * f.nh_norm - f.bzz).abs() < 1e-14);
        }
    }
}

#[test]
fn reversed_orientation_flips_h_only() {
    struct Flip(Catenoid);
    impl Chart for Flip {
        fn domain(&self) -> Rect {
            self.0.domain()
        }
        fn jet(&self, a: f64, b: f64) -> Result<ChartJet> {
            self.0.jet(a, b)
        }
        fn orientation(&self) -> f64 {
            -1.0
        }
        fn label(&self) -> String {
            "flipped".into()
        }
    }
    let c = Catenoid::new(1.0, 1.0).unwrap();
    let f = Flip(c);
    let a = surface_frame(&c, (1.7, 0.4)).unwrap();
    let b = surface_frame(&f, (1.7, 0.4)).unwrap();
    assert!((a.n + b.n).norm() < 1e-15);
    assert!((a.bzs - b.bzs).abs() < 1e-12 && (a.q() - b.q()).abs() < 1e-12);
    assert!((a.s - b.s).norm() < 1e-15 && (a.z + b.z).norm() < 1e-15);
}

#[test]
fn paraboloid_singular_at_origin() {
    let p = Paraboloid::default();
    let nd = normal_data(&p, (0.0, 0.0)).unwrap();
    assert_eq!(nd.nh_norm, 0.0);
    assert!(matches!(surface_frame(&p, (0.0, 0.0)), Err(Error::SingularPoint { .. })));
    // the whole line x = 0 is singular: F_x = X and F_y = Y there
    assert_eq!(normal_data(&p, (0.0, 1.3)).unwrap().nh_norm, 0.0);
    assert!(normal_data(&p, (0.1, 0.0)).unwrap().nh_norm > 0.1);
}

#[test]
fn plane_singular_point() {
    let p = Plane::new(0.5, -0.25, 1.0);
    assert_eq!(normal_data(&p, (0.25, 0.5)).unwrap().nh_norm, 0.0);
    let loc = singular_locus(&p, &Grid::new(Axis::new(-1.0, 1.0, 9), Axis::new(-1.0, 1.0, 9)), 1e-9).unwrap();
    // (0.25, 0.5) is the node (5, 6), shared by four cells
    assert_eq!(loc.cells, vec![(4, 5), (4, 6), (5, 5), (5, 6)]);
    assert_eq!(loc.points, vec![(0.25, 0.5)]);
}

#[test]
fn area_density_examples() {
    let p = VerticalPlane::x_equals_zero();
    assert_eq!(area_element(&p, (0.2, 0.3)).unwrap(), 1.0);
    let quad = QuadratureSpec::new(8, (2, 2)).unwrap();
    let a = area(&p, Rect::new(0.0, 1.0, 0.0, 1.0), &quad).unwrap();
    assert!((a - 1.0).abs() < 1e-15);

    let hel = Helicoid::new(2.0).unwrap();
    for (s, e) in grid_points(hel.domain, 7) {
        let d = area_element(&hel, (s, e)).unwrap();
        assert!((d - hel.f(s).abs()).abs() < 1e-14 && d >= 0.0);
    }
    assert!(area_element(&hel, (0.5, 0.3)).unwrap() < 1e-15);
}

#[test]
fn helicoid_patch_area_by_one_dimensional_oracle() {
    let hel = Helicoid::new(2.0).unwrap();
    let quad = QuadratureSpec::new(16, (4, 4)).unwrap();
    let a = area(&hel, Rect::new(0.0, 0.4, 0.0, 1.0), &quad).unwrap();
    let exact = 0.4 / 2.0 - 2.0 * 0.4f64.powi(3) / 3.0;
    assert!((a - exact).abs() < 1e-14);
    assert!((a - 0.157333333333333).abs() < 1e-12);
    let oracle = gauss_legendre_1d(|s| hel.f(s).abs(), 0.0, 0.4, &quad).unwrap();
    assert!((a - oracle).abs() < 1e-14);
    let a2 = area(&hel, Rect::new(0.0, 0.4, 0.0, 1.0), &quad.doubled()).unwrap();
    assert!(((a2 - a) / a).abs() < 1e-10);
}

#[test]
fn area_scaling_and_isometries() {
    let hel = Helicoid::new(2.0).unwrap();
    let region = Rect::new(-0.9, 1.1, -0.7, 1.3);
    let quad = QuadratureSpec::new(16, (8, 8)).unwrap();
    let a = area(&hel, region, &quad).unwrap();
    let lam = 0.3;
    let ad = area(&AffineImage::dilation(hel, lam), region, &quad).unwrap();
    assert!((ad / ((3.0 * lam).exp() * a) - 1.0).abs() < 1e-6);
    let ar = area(&AffineImage::rotation(hel, 0.77), region, &quad).unwrap();
    assert!(((ar - a) / a).abs() < 1e-10);
    let at = area(&AffineImage::left_translation(hel, Point::new(0.4, -1.0, 2.0)), region, &quad).unwrap();
    assert!(((at - a) / a).abs() < 1e-10);
    // the affine images really are the transformed point sets
    let img = AffineImage::dilation(hel, lam);
    let (u, v) = (0.3, 0.2);
    assert!(img.eval(u, v).unwrap().euclid_dist(&dilate(lam, hel.eval(u, v).unwrap())) < 1e-15);
    let img = AffineImage::rotation(hel, 0.77);
    assert!(img.eval(u, v).unwrap().euclid_dist(&rotate_z(0.77, hel.eval(u, v).unwrap())) < 1e-15);
}

#[test]
fn helicoid_singular_locus_is_two_helices() {
    for r in [1.0, 2.0] {
        let hel = Helicoid::new(r).unwrap();
        let d = hel.domain;
        let grid = Grid::new(Axis::new(d.x0, d.x1, 17), Axis::new(d.y0, d.y1, 11));
        let loc = singular_locus(&hel, &grid, SINGULAR_TOL).unwrap();
        assert_eq!(loc.points.len(), 2 * 11, "{:?}", loc.points);
        for (s, _) in &loc.points {
            assert!((s.abs() - 1.0 / r).abs() < 1e-9);
        }
        assert_eq!(loc.cells.len(), 2 * 10);
        let mut sorted = loc.cells.clone();
        sorted.sort();
        assert_eq!(sorted, loc.cells);
    }
}

#[test]
fn catenoid_singular_locus_is_empty() {
    let c = Catenoid::new(1.0, 1.0).unwrap();
    let d = c.domain;
    let grid = Grid::new(Axis::new(d.x0, d.x1, 15), Axis::new(d.y0, d.y1, 15));
    assert!(singular_locus(&c, &grid, SINGULAR_TOL).unwrap().is_empty());
}

#[test]
fn paraboloid_singular_locus_is_the_line_x_zero() {
    let p = Paraboloid::default();
    let grid = Grid::new(Axis::new(-1.05, 0.95, 12), Axis::new(-1.0, 1.0, 9));
    let loc = singular_locus(&p, &grid, SINGULAR_TOL).unwrap();
    assert_eq!(loc.points.len(), 9);
    assert!(loc.points.iter().all(|(x, _)| x.abs() < 1e-9));
    assert!(loc.points.iter().any(|(x, y)| x.abs() < 1e-9 && y.abs() < 1e-12));
}

#[test]
fn rays_are_straight() {
    let hel = Helicoid::new(2.0).unwrap();
    // from the axis point (s=0, ε) the ray runs along the ruling
    let e = 0.3;
    let ray = characteristic_ray(&hel, (0.0, e), 0.4, 40).unwrap();
    assert!(straightness_residual(&ray) < 1e-8);
    let fr = surface_frame(&hel, (0.0, e)).unwrap();
    let ze = euclid(fr.point, fr.z);
    let last = ray.last().unwrap();
    let expect = hel.eval(0.4 * fr.zeta.0.signum(), e).unwrap();
    assert!(last.euclid_dist(&expect) < 1e-8, "{last:?} vs {expect:?} z={ze:?}");

    let cat = Catenoid::new(1.0, 1.0).unwrap().with_domain(Rect::new(1.01, 10.0, -4.0, 4.0));
    let ray = characteristic_ray(&cat, (2.0_f64.sqrt(), 0.0), 2.0, 200).unwrap();
    assert!(straightness_residual(&ray) < 1e-6);

    let vp = VerticalPlane::x_equals_zero();
    let ray = characteristic_ray(&vp, (0.0, 1.5), 3.0, 10).unwrap();
    assert!(ray.iter().all(|p| p.x.abs() < 1e-15 && (p.t - 1.5).abs() < 1e-14));
}

#[test]
fn ray_into_singular_curve_stops() {
    let hel = Helicoid::new(2.0).unwrap();
    let r = characteristic_ray(&hel, (0.0, 0.0), 1.0, 100);
    assert!(matches!(r, Err(Error::StoppedAtSingular { .. })), "{r:?}");
    assert!(matches!(characteristic_ray(&hel, (0.5, 0.0), 1.0, 10), Err(Error::StoppedAtSingular { steps: 0 })));
}

#[test]
fn ruled_chart_of_vertical_plane_is_affine() {
    let vp = VerticalPlane::x_equals_zero();
    let rc = ruled_coordinates(Arc::new(vp), (0.5, 0.25), (-1.0, 1.0), (-2.0, 2.0)).unwrap();
    // S = −T, Z = Y: F(ε, s) = (0, 0.5 + s, 0.25 − ε)
    for (e, s) in [(0.0, 0.0), (0.7, -1.3), (-0.9, 1.9)] {
        let p = rc.eval(e, s).unwrap();
        assert!(p.euclid_dist(&Point::new(0.0, 0.5 + s, 0.25 - e)) < 1e-12, "{p:?}");
        let j = rc.jet(e, s).unwrap();
        assert!(j.f11.iter().chain(j.f12.iter()).all(|v| v.abs() < 1e-8));
    }
}

#[test]
fn ruled_chart_of_catenoid_stays_on_catenoid() {
    let cat = Catenoid::new(1.0, 1.0).unwrap().with_domain(Rect::new(1.001, 20.0, -7.0, 7.0));
    let rc = ruled_coordinates(Arc::new(cat), (2.0_f64.sqrt(), 0.0), (-0.5, 0.5), (-3.0, 3.0)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..50 {
        let p = rc.eval(rng.gen_range(-0.5..0.5), rng.gen_range(-3.0..3.0)).unwrap();
        let res = p.t * p.t - (p.x * p.x + p.y * p.y - 1.0);
        assert!(res.abs() < 1e-6, "{res}");
    }
    // frames agree with the base chart along Γ
    let b = rc.base_frame(0.2).unwrap();
    let f = surface_frame(&rc, (0.2, 0.0)).unwrap();
    assert!((b.n - f.n).norm() < 1e-9);
    assert!((b.bzs - f.bzs).abs() < 1e-6 && (b.h - f.h).abs() < 1e-6);
}

#[test]
fn ruled_chart_of_helicoid_matches_rulings() {
    let hel = Helicoid::new(2.0).unwrap();
    let rc = ruled_coordinates(Arc::new(hel), (0.2, 0.1), (-0.6, 0.6), (-0.25, 0.25)).unwrap();
    for i in 0..7 {
        for j in 0..5 {
            let e = -0.6 + 0.2 * i as f64;
            let s = -0.25 + 0.125 * j as f64;
            let p = rc.eval(e, s).unwrap();
            // nearest point on the helicoid: ε from t, s from the (x, y) projection
            let eps = p.t * 2.0;
            let (sn, cs) = (2.0 * eps).sin_cos();
            let sp = p.x * sn + p.y * cs;
            let q = hel.eval(sp, eps).unwrap();
            assert!(p.euclid_dist(&q) < 1e-6);
        }
    }
}

#[test]
fn ruled_chart_stops_at_singular_curve() {
    let hel = Helicoid::new(2.0).unwrap();
    assert!(matches!(
        ruled_coordinates(Arc::new(hel), (0.5, 0.0), (-0.1, 0.1), (-0.1, 0.1)),
        Err(Error::StoppedAtSingular { .. })
    ));
}
