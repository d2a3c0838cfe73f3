use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::connection::christoffel;
use crate::geodesics::{jacobi_field, FnFamily};
use crate::group::{frame_to_euclid, FrameVector};
use crate::numerics::{fit_quadratic, QuadratureSpec, Rect};
use crate::surfaces::{normal_data, ruled_coordinates, surface_frame, Catenoid, Chart, Helicoid, VerticalPlane};

fn catenoid() -> Catenoid {
    Catenoid::new(1.0, 1.0).unwrap()
}

fn random_regular<C: Chart + ?Sized>(c: &C, rng: &mut ChaCha8Rng, n: usize) -> Vec<(f64, f64)> {
    let d = c.domain();
    let mut out = Vec::new();
    while out.len() < n {
        let u = (rng.gen_range(d.x0..d.x1), rng.gen_range(d.y0..d.y1));
        if let Ok(f) = surface_frame(c, u) {
            if f.nh_norm > 1e-2 {
                out.push(u);
            }
        }
    }
    out
}

#[test]
fn z_derivative_of_constant_vanishes() {
    let c = catenoid();
    let v = z_derivative(&c, &SurfaceField::Const(3.0), (2.0, 0.3), 1).unwrap();
    assert_eq!(v, 0.0);
}

#[test]
fn z_derivative_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let charts: Vec<Box<dyn Chart>> = vec![Box::new(catenoid()), Box::new(Helicoid::new(2.0).unwrap()), Box::new(Helicoid::new(1.0).unwrap())];
    for c in &charts {
        for u in random_regular(c.as_ref(), &mut rng, 20) {
            let f = surface_frame(c.as_ref(), u).unwrap();
            let znt = z_derivative(c.as_ref(), &SurfaceField::Nt, u, 1).unwrap();
            assert!((znt - f.nh_norm * (f.bzs - 1.0)).abs() < 1e-5, "{}", c.label());
            let snt = s_derivative(c.as_ref(), &SurfaceField::Nt, u, 1).unwrap();
            assert!((snt - f.nh_norm * f.bss).abs() < 1e-5);
            let znh = z_derivative(c.as_ref(), &SurfaceField::Nh, u, 1).unwrap();
            assert!((znh - f.nt * (1.0 - f.bzs)).abs() < 1e-5);
            let zb = z_derivative(c.as_ref(), &SurfaceField::Bzs, u, 1).unwrap();
            let expect = 4.0 * f.nh_norm * f.nt - 2.0 / f.nh_norm * f.nt * f.bzs * (1.0 + f.bzs);
            assert!((zb - expect).abs() < 1e-4 * (1.0 + expect.abs()), "{zb} vs {expect}");
            let dzz = z_covariant(c.as_ref(), |f| f.z, u).unwrap();
            assert!((dzz - 2.0 * f.h * f.nu_h).norm() < 1e-5);
            let dnu = z_covariant(c.as_ref(), |f| f.nu_h, u).unwrap();
            assert!((dnu - (FrameVector::T - 2.0 * f.h * f.z)).norm() < 1e-5);
        }
    }
}

#[test]
fn z_covariant_includes_connection_term() {
    // on the vertical plane x = 0, Z = Y is left-invariant: D_Z Z = Γ(Y, Y) = 0
    let vp = VerticalPlane::x_equals_zero();
    let d = z_covariant(&vp, |f| f.z, (0.3, 0.2)).unwrap();
    assert!(d.norm() < 1e-10);
    assert!(christoffel(FrameVector::Y, FrameVector::Y).norm() == 0.0);
}

#[test]
fn second_z_derivative_of_nh_on_catenoid() {
    let c = catenoid();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for u in random_regular(&c, &mut rng, 20) {
        let f = surface_frame(&c, u).unwrap();
        let (n, b) = (f.nh_norm, f.bzs);
        let expect = -5.0 * n + 4.0 * n.powi(3) + 2.0 / n * b + 2.0 / n * b * b - 3.0 * n * b * b;
        let got = z_derivative(&c, &SurfaceField::Nh, u, 2).unwrap();
        assert!((got - expect).abs() < 1e-4 * (1.0 + expect.abs()), "{got} vs {expect}");
    }
}

#[test]
fn z_derivative_stops_at_singular_point() {
    let h = Helicoid::new(2.0).unwrap();
    assert!(matches!(
        z_derivative(&h, &SurfaceField::Nh, (0.5, 0.0), 1),
        Err(crate::Error::StoppedAtSingular { .. })
    ));
}

#[test]
fn operator_l_examples() {
    let vp = VerticalPlane::x_equals_zero();
    assert!(operator_l(&vp, &SurfaceField::Nh, (0.4, -0.2)).unwrap().abs() < 1e-8);
    assert!(l_nh_closed(&vp, (0.4, -0.2)).unwrap().abs() < 1e-12);
    let c = catenoid();
    assert_eq!(operator_l(&c, &SurfaceField::Const(0.0), (2.0, 0.1)).unwrap(), 0.0);
}

#[test]
fn operator_l_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let charts: Vec<Box<dyn Chart>> = vec![Box::new(catenoid()), Box::new(Helicoid::new(2.0).unwrap())];
    for c in &charts {
        for u in random_regular(c.as_ref(), &mut rng, 100) {
            let direct = operator_l(c.as_ref(), &SurfaceField::Nh, u).unwrap();
            let closed = l_nh_closed(c.as_ref(), u).unwrap();
            assert!(((direct - closed) / closed).abs() < 1e-4, "{}: {direct} vs {closed} at {u:?}", c.label());
        }
    }
}

#[test]
fn l_nh_signs() {
    let c = catenoid();
    let d = c.domain();
    for i in 0..30 {
        for j in 0..30 {
            let u = (d.x0 + (d.x1 - d.x0) * (i as f64 + 0.5) / 30.0, d.y0 + (d.y1 - d.y0) * (j as f64 + 0.5) / 30.0);
            assert!(l_nh_closed(&c, u).unwrap() >= -1e-8);
        }
    }
    // on helicoids the closed form equals −4/f², negative on the regular part
    for r in [1.0, 2.0] {
        let h = Helicoid::new(r).unwrap();
        for s in [-1.3_f64, -0.2, 0.0, 0.31, 0.9, 2.0] {
            if (s.abs() - 1.0 / r).abs() < 1e-3 || s.abs() > 2.9 / r {
                continue;
            }
            let v = l_nh_closed(&h, (s, 0.4)).unwrap();
            assert!((v - h.l_nh_closed_form(s)).abs() < 1e-8 * (1.0 + v.abs()));
            assert!(v < 0.0);
        }
    }
}

#[test]
fn jacobi_quadratic_examples() {
    let vp = VerticalPlane::x_equals_zero();
    let q = jacobi_vertical_quadratic(&vp, (0.0, 0.0)).unwrap();
    assert!(q.a.abs() < 1e-14 && q.b.abs() < 1e-14 && (q.c + 1.0).abs() < 1e-14);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let charts: Vec<Box<dyn Chart>> = vec![Box::new(catenoid()), Box::new(Helicoid::new(2.0).unwrap())];
    for c in &charts {
        for u in random_regular(c.as_ref(), &mut rng, 100) {
            let f = surface_frame(c.as_ref(), u).unwrap();
            let q = jacobi_vertical_quadratic(c.as_ref(), u).unwrap();
            let rhs = -f.nh_norm * f.nh_norm * l_nh_of(&f);
            assert!((q.disc - rhs).abs() < 1e-8 * (1.0 + rhs.abs()));
        }
    }
}

#[test]
fn jacobi_quadratic_matches_fitted_field() {
    // family of characteristic lines through the S-curve Γ of the catenoid
    let c = Arc::new(catenoid());
    let u0 = (2f64.sqrt(), 0.0);
    let rc = ruled_coordinates(c.clone(), u0, (-0.2, 0.2), (-1.0, 1.0)).unwrap();
    let fam = FnFamily::new(
        |e: f64| rc.base_frame(e).unwrap().point,
        |e: f64| rc.base_frame(e).unwrap().z,
    );
    let q = jacobi_vertical_quadratic(c.as_ref(), u0).unwrap();
    let samples: Vec<(f64, f64)> = (0..21)
        .map(|i| {
            let s = -1.0 + 0.1 * i as f64;
            (s, jacobi_field(&fam, 0.0, s).unwrap().v.c)
        })
        .collect();
    let ([c0, c1, c2], resid) = fit_quadratic(&samples).unwrap();
    assert!(resid < 1e-6, "{resid}");
    assert!((c0 - q.c).abs() < 1e-5 && (c1 - q.b).abs() < 1e-5 && (c2 - q.a).abs() < 1e-5, "{:?} vs {q:?}", (c0, c1, c2));
}

#[test]
fn index_form_examples() {
    let c = catenoid();
    let quad = QuadratureSpec::new(16, (4, 4)).unwrap();
    let zero = Separable::zero();
    let u = Separable::new(Profile::bump(2.0, 0.6).unwrap(), Profile::bump(0.0, 1.0).unwrap());
    assert_eq!(index_form(&c, &zero, &zero, &quad).unwrap(), 0.0);
    assert_eq!(index_form(&c, &u, &zero, &quad).unwrap(), 0.0);

    // vertical plane: q vanishes, so I(u,u) = ∫Z(u)² with Z = ∂/∂u₁
    let vp = VerticalPlane::x_equals_zero();
    let w = Separable::new(Profile::bump(0.0, 1.0).unwrap(), Profile::bump(0.5, 0.5).unwrap());
    let i = index_form(&vp, &w, &w, &quad).unwrap();
    // ∫φ'² over [−1,1] = π²/4, ∫φ² over a width-1 bump = 3/8
    let expect = PI * PI / 4.0 * 0.375;
    assert!((i - expect).abs() < 1e-10, "{i} vs {expect}");
}

#[test]
fn index_form_nh_identity_on_catenoid() {
    let c = catenoid();
    let quad = QuadratureSpec::new(16, (4, 4)).unwrap();
    let fs = [
        Separable::new(Profile::bump(2.0, 0.6).unwrap(), Profile::bump(0.0, 1.0).unwrap()),
        Separable::new(Profile::bump(1.6, 0.4).unwrap(), Profile::bump(0.5, 0.8).unwrap()),
        Separable::new(Profile::bump(3.0, 1.0).unwrap(), Profile::bump(-1.0, 1.5).unwrap()),
        Separable::new(Profile::bump(2.5, 1.2).unwrap(), Profile::cosine(2.0).unwrap()),
        Separable::new(Profile::bump(4.0, 0.5).unwrap(), Profile::bump(2.0, 0.5).unwrap()),
    ];
    for f in &fs {
        let g = FnTestFunction::new(
            |a, b| {
                let v = f.value(a, b);
                if v == 0.0 {
                    0.0
                } else {
                    v * normal_data(&c, (a, b)).unwrap().nh_norm
                }
            },
            f.support(),
        );
        let lhs = index_form(&c, &g, &g, &quad).unwrap();
        let rhs = index_form_nh_weighted(&c, f, &quad).unwrap();
        assert!((lhs - rhs).abs() <= 1e-3 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
    }
}

#[test]
fn second_variation_matches_index_form() {
    let c = catenoid();
    let quad = QuadratureSpec::new(16, (4, 4)).unwrap();
    let v = Separable::new(Profile::bump(2.0, 0.6).unwrap(), Profile::bump(0.0, 1.0).unwrap());
    let zero = Separable::zero();
    let av = area_variation(&c, &v, &zero, &quad, 1e-3).unwrap();
    let i = index_form(&c, &v, &v, &quad).unwrap();
    assert!(((av.second - i) / i).abs() < 1e-2, "{} vs {i}", av.second);
    assert!(av.first.abs() <= 1e-6 * av.a0, "{}", av.first);

    // a mixed variation: u = v + ⟨N,T⟩w
    let w = Separable::new(Profile::bump(2.2, 0.5).unwrap(), Profile::bump(0.3, 0.7).unwrap());
    let u = FnTestFunction::new(
        |a, b| {
            let vv = v.value(a, b);
            let ww = w.value(a, b);
            if vv == 0.0 && ww == 0.0 {
                return 0.0;
            }
            vv + normal_data(&c, (a, b)).unwrap().nt * ww
        },
        Rect::new(1.4, 2.7, -1.0, 1.0),
    );
    let d = second_variation_direct(&c, &v, &w, &quad, 1e-3).unwrap();
    let iu = index_form(&c, &u, &u, &quad).unwrap();
    assert!(((d - iu) / iu).abs() < 1e-2, "{d} vs {iu}");
    assert_eq!(second_variation_direct(&c, &zero, &zero, &quad, 1e-3).unwrap(), 0.0);
}

#[test]
fn first_variation_vanishes_on_minimal_surfaces() {
    let quad = QuadratureSpec::new(8, (4, 4)).unwrap();
    let zero = Separable::zero();
    let charts: Vec<(Box<dyn Chart>, Separable)> = vec![
        (Box::new(Helicoid::new(2.0).unwrap()), Separable::new(Profile::bump(1.2, 0.4).unwrap(), Profile::bump(0.0, 1.0).unwrap())),
        (Box::new(crate::surfaces::Paraboloid::default()), Separable::new(Profile::bump(1.0, 0.5).unwrap(), Profile::bump(0.0, 1.0).unwrap())),
        (Box::new(VerticalPlane::x_equals_zero()), Separable::new(Profile::bump(0.0, 1.0).unwrap(), Profile::bump(0.0, 1.0).unwrap())),
    ];
    for (c, v) in &charts {
        for w in [&zero, v] {
            let av = area_variation(c.as_ref(), v, w, &quad, 1e-3).unwrap();
            assert!(av.first.abs() <= 1e-6 * av.a0, "{}: {}", c.label(), av.first);
        }
    }
}

#[test]
fn bracket_examples() {
    let c = bracket_integral(0.6, 2.2).unwrap();
    assert!((c - 7.772358524916193).abs() < 1e-12);
    let cq = bracket_integral_quadrature(0.6, 2.2, 1e-13).unwrap();
    assert!((c - cq).abs() < 1e-10);
    let c = bracket_integral(1.0, 3.0).unwrap();
    assert!((c - 10.427477540043022).abs() < 1e-12);
    assert!((c - bracket_integral_quadrature(1.0, 3.0, 1e-13).unwrap()).abs() < 1e-10);
    assert!(bracket_integral(0.5001, 2.0002).unwrap() > 8.0);
    assert!(matches!(bracket_integral(0.5, 2.0), Err(crate::Error::Domain(_))));
}

#[test]
fn q_form_matches_bracket_formula() {
    let quad = QuadratureSpec::new(16, (8, 8)).unwrap();
    for (k, eps0) in [(0.6, 10.0), (0.55, 4.0), (1.0, 2.0)] {
        let delta = 2.0 * k + 1.0;
        let u = h2_test_function(k, delta, eps0).unwrap();
        let q = q_form(2.0, &u, &quad).unwrap();
        // ∫φ² = ε₀ and ∫φ'² = (π/(2ε₀))²ε₀ for φ = cos(πε/(2ε₀))
        let phi2 = eps0;
        let dphi2 = (PI / (2.0 * eps0)).powi(2) * eps0;
        let expect = phi2 * bracket_integral(k, delta).unwrap() - 8.0 * phi2 + 2.0 * dphi2;
        assert!((q - expect).abs() < 1e-8 * expect.abs().max(1.0), "k={k}: {q} vs {expect}");
    }
    let u = h2_test_function(0.6, 2.2, 10.0).unwrap();
    let ratio = q_form(2.0, &u, &quad).unwrap() / 10.0;
    assert!((ratio + 0.17829345307836).abs() < 1e-8, "{ratio}");
}

#[test]
fn q_form_positive_on_regular_support() {
    let quad = QuadratureSpec::new(16, (8, 8)).unwrap();
    for (c, w) in [(1.5, 0.5), (-2.0, 1.0), (0.2, 0.2), (0.9, 0.3)] {
        let u = Separable::new(Profile::bump(c, w).unwrap(), Profile::bump(0.3, 1.5).unwrap());
        let p = q_form_parts(2.0, &u, &quad).unwrap();
        assert_eq!(p.trace_sq, 0.0);
        assert!(p.total() >= -1e-10, "{p:?}");
    }
    assert_eq!(q_form(2.0, &Separable::zero(), &quad).unwrap(), 0.0);
}

#[test]
fn q_form_rejects_tube_violations() {
    let quad = QuadratureSpec::default();
    let u = Separable::new(Profile::bump(0.5, 0.3).unwrap(), Profile::bump(0.0, 1.0).unwrap());
    assert!(matches!(q_form(2.0, &u, &quad), Err(crate::Error::TubeViolation(_))));
    let u = h2_test_function(0.52, 2.04, 4.0).unwrap();
    assert!(matches!(q_form(2.0, &u, &quad), Err(crate::Error::TubeViolation(_))));
    // R = 1 puts the helices at s = ±1, inside the ramp of φ_{0.6, 2.2}
    let u = h2_test_function(0.6, 2.2, 4.0).unwrap();
    assert!(matches!(q_form(1.0, &u, &quad), Err(crate::Error::TubeViolation(_))));
}

#[test]
fn h2_certificate_is_lex_first_and_stable() {
    let cert = certify_instability_h2(&H2Search::default()).unwrap();
    assert!((cert.k - 0.55).abs() < 1e-12, "{cert}");
    assert_eq!(cert.eps0, 4.0);
    assert!(cert.c_value.unwrap() < 8.0);
    assert!(cert.q_value < 0.0 && cert.q_value_doubled < 0.0);
    assert!((cert.delta.unwrap() - (2.0 * cert.k + 1.0)).abs() < 1e-15);
    assert!(((cert.q_value - cert.q_value_doubled) / cert.q_value).abs() < 1e-8);
    let parsed: InstabilityCertificate = cert.to_string().parse().unwrap();
    assert_eq!(parsed, cert);
    // same answer on a single thread
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let again = pool.install(|| certify_instability_h2(&H2Search::default())).unwrap();
    assert_eq!(again.to_string(), cert.to_string());
}

#[test]
fn h2_certificate_needs_a_passing_grid_point() {
    let search = H2Search { k_values: vec![0.51, 2.0], ..H2Search::default() };
    assert!(matches!(certify_instability_h2(&search), Err(crate::Error::CertificateNotFound(_))));
    let search = H2Search { eps0_values: vec![1.0, 2.0], ..H2Search::default() };
    let cert = certify_instability_h2(&search);
    assert!(matches!(cert, Err(crate::Error::CertificateNotFound(_))), "{cert:?}");
}

#[test]
fn helicoid_certificate_by_dilation() {
    let base = certify_instability_h2(&H2Search::default()).unwrap();
    let c4 = certify_instability_helicoid(4.0, &H2Search::default()).unwrap();
    let lam = 0.5f64.ln();
    assert!((c4.q_value - (3.0 * lam).exp() * base.q_value).abs() < 1e-14);
    assert!((c4.k - 0.5 * base.k).abs() < 1e-15);
    assert!(c4.extra_value("area_scaling_gap").unwrap().parse::<f64>().unwrap() < 1e-6);
    assert!(c4.is_confirmed());
    let c2 = certify_instability_helicoid(2.0, &H2Search::default()).unwrap();
    assert_eq!(c2, base);
}

#[test]
fn catenoid_certificate() {
    let c: Arc<dyn Chart> = Arc::new(catenoid());
    let quad = QuadratureSpec::new(16, (8, 32)).unwrap();
    let phi = Profile::bump(0.0, 0.5).unwrap();
    let ks: Vec<f64> = (1..=64).map(|k| k as f64).collect();
    let cert = certify_instability_nosing(c.clone(), (2f64.sqrt(), 0.0), &ks, phi, &quad).unwrap();
    assert!(cert.q_value < 0.0 && cert.q_value_doubled < 0.0, "{cert}");
    assert!(((cert.q_value - cert.q_value_doubled) / cert.q_value).abs() < 1e-6);
    // first passing k: the previous one is non-negative
    if cert.k > 1.0 {
        let prev = nosing_index_value(c.clone(), (2f64.sqrt(), 0.0), cert.k - 1.0, phi, &quad).unwrap();
        assert!(prev >= 0.0);
    }
}

#[test]
fn vertical_plane_has_no_nosing_certificate() {
    let vp: Arc<dyn Chart> = Arc::new(VerticalPlane::x_equals_zero());
    let phi = Profile::bump(0.0, 0.5).unwrap();
    let ks: Vec<f64> = (1..=16).map(|k| k as f64).collect();
    let r = certify_instability_nosing(vp, (0.0, 0.0), &ks, phi, &QuadratureSpec::new(8, (4, 8)).unwrap());
    assert!(matches!(r, Err(crate::Error::CertificateNotFound(_))), "{r:?}");
}

#[test]
fn nosing_index_matches_direct_index_form() {
    // the ruled-coordinate formula against the generic index form on the
    // ruled chart, for w = u_k v⁻¹|N_h|
    let c: Arc<dyn Chart> = Arc::new(catenoid());
    let u0 = (2f64.sqrt(), 0.0);
    let phi = Profile::bump(0.0, 0.3).unwrap();
    let k = 2.0;
    let psi = phi.stretched(k).unwrap();
    let quad = QuadratureSpec::new(8, (4, 8)).unwrap();
    let formula = nosing_index_value(c.clone(), u0, k, phi, &quad).unwrap();
    let rc = ruled_coordinates(c.clone(), u0, (-0.3, 0.3), (-0.6, 0.6)).unwrap();
    let w = FnTestFunction::new(
        |e, s| {
            let u = phi.value(e) * psi.value(s);
            if u == 0.0 {
                return 0.0;
            }
            let nd = normal_data(&rc, (e, s)).unwrap();
            let v = nd.f1.c.abs().sqrt();
            u * nd.nh_norm / v
        },
        Rect::new(-0.3, 0.3, -0.6, 0.6),
    );
    let direct = index_form(&rc, &w, &w, &quad).unwrap();
    assert!(((direct - formula) / formula).abs() < 1e-3, "{direct} vs {formula}");
}

#[test]
fn vertical_variation_second_difference() {
    let w = Profile::bump(0.0, 1.0).unwrap();
    let vv = VerticalVariation::helicoid(2.0, w, 0.25).unwrap();
    assert!((vv.h_curv + 2.0).abs() < 1e-14);
    let quad = QuadratureSpec::new(16, (8, 8)).unwrap();
    let (first, second) = vertical_variation_differences(&vv, &quad).unwrap();
    assert!(first.abs() < 1e-6, "{first}");
    assert!((second / (PI * PI / 4.0) - 1.0).abs() < 1e-3, "{second}");
}

#[test]
fn vertical_variation_edge_cases() {
    let quad = QuadratureSpec::new(16, (8, 8)).unwrap();
    let flat = VerticalVariation::helicoid(2.0, Profile::bump(0.0, 1.0).unwrap(), 0.25)
        .unwrap();
    let flat = VerticalVariation { w: Profile::Const(1.0), ..flat }.with_eps_range(-1.0, 1.0);
    let a0 = vertical_variation_area(&flat, 0.0, &quad).unwrap();
    let a1 = vertical_variation_area(&flat, 0.3, &quad).unwrap();
    assert_eq!(a0, a1);
    let vv = VerticalVariation::helicoid(2.0, Profile::bump(0.0, 1.0).unwrap(), 0.25).unwrap();
    assert!(matches!(vertical_variation_area(&vv, 0.5, &quad), Err(crate::Error::TubeTooSmall { .. })));
    let wide = VerticalVariation { s_window: 1.2, ..vv };
    assert!(matches!(vertical_variation_area(&wide, 1e-3, &quad), Err(crate::Error::TubeTooSmall { .. })));
}

#[test]
fn singular_curve_curvature_is_minus_r() {
    for r in [0.5, 1.0, 2.0, 3.0] {
        for side in [1.0, -1.0] {
            for e in [-1.0, 0.0, 0.7] {
                assert!((singular_curve_curvature(r, side, e).unwrap() + r).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn boundary_flux_limit() {
    let v = Separable::new(Profile::Ramp(PhiKDelta::new(0.8, 1.0).unwrap()), Profile::cosine(2.0).unwrap());
    let (lim, samples) = super::boundary_flux_limit(2.0, &v, 1e-2).unwrap();
    // 4∫_{Σ₀}v² over two helices with ∫φ² = ε₀ = 2
    let expect = 4.0 * 2.0 * 2.0;
    assert!(((lim - expect) / expect).abs() < 1e-2, "{lim} {samples:?}");
    assert!(samples.iter().all(|b| b.is_finite()));
    assert_eq!(boundary_flux(2.0, &Separable::zero(), 1e-3).unwrap(), 0.0);
}

#[test]
fn bzs_tends_to_minus_one_at_singular_curve() {
    let h = Helicoid::new(2.0).unwrap();
    for side in [1.0, -1.0] {
        let vals: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|sg| surface_frame(&h, (0.5 + side * sg, 0.3)).unwrap().bzs)
            .collect();
        let gaps: Vec<f64> = vals.iter().map(|b| (b + 1.0).abs()).collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[2] < 1e-3, "{vals:?}");
    }
}

#[test]
fn euclid_helper_agrees() {
    let v = FrameVector::new(0.3, -0.2, 0.5);
    let p = crate::Point::new(1.0, 2.0, 3.0);
    assert_eq!(frame_to_euclid(p, v), crate::surfaces::euclid(p, v));
}
