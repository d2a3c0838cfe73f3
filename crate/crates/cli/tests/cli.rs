use std::path::Path;
use std::process::{Command, Output};

fn h1geom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_h1geom")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn verify_core_passes() {
    let o = h1geom(&["verify", "--suite", "core"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    for name in ["christoffel_table", "curvature_table", "ricci_table", "curvature_nested_fd", "flow_commutator"] {
        let line = out.lines().find(|l| l.contains(name)).unwrap_or_else(|| panic!("{name} missing"));
        assert!(line.ends_with("PASS"), "{line}");
    }
    // one line per check plus the summary
    assert!(out.lines().filter(|l| !l.starts_with('#')).all(|l| l.contains("max_residual=") && l.contains("threshold=")));
}

#[test]
fn verify_stability_reports_q_zero_on_h2() {
    let o = h1geom(&["verify", "--suite", "stability"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let line = out.lines().find(|l| l.contains("q_identically_zero_R2")).unwrap();
    assert!(line.ends_with("PASS"));
}

#[test]
fn verify_override_is_noted() {
    let o = h1geom(&["verify", "--suite", "all", "--tol", "z_derivative=1e-3"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("# tolerance override z_derivative=1e-3"));
    let line = out.lines().find(|l| l.contains(" dzz ")).unwrap();
    assert!(line.contains("threshold=1.0e-3") && line.contains("[override z_derivative]"), "{line}");
    for s in ["core", "geodesics", "surfaces", "stability", "numerics"] {
        assert!(out.lines().any(|l| l.starts_with(s)));
    }
}

#[test]
fn verify_fails_with_exit_one_under_impossible_threshold() {
    let o = h1geom(&["verify", "--suite", "core", "--tol", "associativity=1e-300"]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    let line = out.lines().find(|l| !l.starts_with('#') && l.contains("associativity")).unwrap();
    assert!(line.ends_with("FAIL [override associativity]"), "{line}");
}

#[test]
fn overflow_exits_three() {
    let o = h1geom(&["export", "geodesic", "--v0", "1e308,1e308,0", "--s-max", "10", "--samples", "2"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("numerical failure"));
}

#[test]
fn verify_is_deterministic() {
    let a = h1geom(&["verify", "--suite", "all"]);
    let b = h1geom(&["verify", "--suite", "all"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&h1geom(&["verify", "--suite", "nonsense"])), 2);
    assert_eq!(code(&h1geom(&["verify", "--tol", "not_a_check=1e-3"])), 2);
    assert_eq!(code(&h1geom(&["verify", "--tol", "dzz=-1"])), 2);
    assert_eq!(code(&h1geom(&["verify", "--tol", "dzz"])), 2);
    assert_eq!(code(&h1geom(&["frobnicate"])), 2);
    assert_eq!(code(&h1geom(&["export", "geodesic"])), 2);
    assert_eq!(code(&h1geom(&["export", "surface-grid", "--surface", "torus"])), 2);
    assert_eq!(code(&h1geom(&["export", "surface-grid", "--surface", "paraboloid", "--R", "2"])), 2);
    assert_eq!(code(&h1geom(&["export", "surface-grid", "--surface", "catenoid", "--u1=0.5,2,3"])), 2);
    assert_eq!(code(&h1geom(&["certify", "helicoid"])), 2);
    assert_eq!(code(&h1geom(&["certify", "helicoid", "--R", "-1"])), 2);
    assert_eq!(code(&h1geom(&["certify", "h2", "--quad-points", "5"])), 2);
    assert_eq!(code(&h1geom(&["--help"])), 0);
}

#[test]
fn horizontal_geodesic_export() {
    let o = h1geom(&["export", "geodesic", "--v0", "1,0,0", "--s-min=-2", "--s-max", "3", "--samples", "6"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("s,x,y,t,lambda,speed\n"));
    let r = rows(&out);
    assert_eq!(r.len(), 6);
    for row in &r {
        assert_eq!(f(&row[1]), f(&row[0]));
        assert_eq!(f(&row[2]), 0.0);
        assert_eq!(f(&row[3]), 0.0);
        assert_eq!(f(&row[4]), 0.0);
        assert_eq!(f(&row[5]), 1.0);
        // 17 significant digits
        assert_eq!(row[0].split('e').next().unwrap().trim_start_matches('-').len(), 18);
    }
}

#[test]
fn helicoid_grid_export_marks_singular_rows() {
    let o = h1geom(&["export", "surface-grid", "--surface", "helicoid", "--R", "2", "--u1=-0.5,0.5,5", "--u2", "0,1,3"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("u1,u2,x,y,t,Nh,NT,BZS,H,q,area_density\n"));
    let r = rows(&out);
    assert_eq!(r.len(), 15);
    for row in &r {
        let s = f(&row[0]);
        if (s.abs() - 0.5).abs() < 1e-12 {
            assert!(f(&row[5]).abs() < 1e-12, "{row:?}");
            assert_eq!(row[7], "nan");
            assert_eq!(row[8], "nan");
            assert_eq!(row[9], "nan");
        } else {
            assert!(f(&row[5]) > 0.1);
            assert!(f(&row[8]).abs() < 1e-8);
            assert!(f(&row[9]).abs() < 1e-8);
        }
    }
}

#[test]
fn empty_grid_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    let o = h1geom(&[
        "export", "surface-grid", "--surface", "paraboloid", "--u1=-1,1,0", "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "u1,u2,x,y,t,Nh,NT,BZS,H,q,area_density\n");
    let o = h1geom(&["export", "geodesic", "--v0", "0,0,1", "--samples", "0"]);
    assert_eq!(stdout(&o), "s,x,y,t,lambda,speed\n");
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn config_file_with_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", "# helicoid grid\nsurface = helicoid\nR = 1\nu1 = -1, 1, 3\nu2 = 0, 0, 1\n");
    let from_file = stdout(&h1geom(&["export", "surface-grid", "--config", &cfg]));
    assert_eq!(rows(&from_file).len(), 3);
    // on H_1 the singular helices sit at s = ±1
    assert!(f(&rows(&from_file)[0][5]).abs() < 1e-12);
    let flagged = stdout(&h1geom(&["export", "surface-grid", "--config", &cfg, "--R", "2"]));
    assert!(f(&rows(&flagged)[0][5]) > 0.1, "flag R=2 must win over the file");

    let bad = write(dir.path(), "bad.cfg", "surface = helicoid\ncolour = blue\n");
    let o = h1geom(&["export", "surface-grid", "--config", &bad]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key 'colour'"));

    let vcfg = write(dir.path(), "verify.cfg", "suite = core\ntol.associativity = 1e-300\n");
    assert_eq!(code(&h1geom(&["verify", "--config", &vcfg])), 1);
    assert_eq!(code(&h1geom(&["verify", "--config", &vcfg, "--tol", "associativity=1e-12"])), 0);
    assert_eq!(code(&h1geom(&["verify", "--config", "/nonexistent/file.cfg"])), 2);
}

#[test]
fn certify_h2_writes_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h2.cert");
    let o = h1geom(&["certify", "h2", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let cert: h1geom::stability::InstabilityCertificate = text.parse().unwrap();
    assert!(cert.c_value.unwrap() < 8.0);
    assert!(cert.q_value < 0.0 && cert.q_value_doubled < 0.0);
    assert!((cert.k - 0.55).abs() < 1e-12);
    // byte-identical on rerun
    let again = h1geom(&["certify", "h2"]);
    assert_eq!(stdout(&again), text);
}

#[test]
fn certify_helicoid_by_dilation() {
    let o = h1geom(&["certify", "helicoid", "--R", "4"]);
    assert_eq!(code(&o), 0);
    let c4: h1geom::stability::InstabilityCertificate = stdout(&o).parse().unwrap();
    let c2: h1geom::stability::InstabilityCertificate = stdout(&h1geom(&["certify", "h2"])).parse().unwrap();
    let lam = 0.5f64.ln();
    assert!((f(c4.extra_value("lambda").unwrap()) - lam).abs() < 1e-15);
    assert!((c4.q_value - (3.0 * lam).exp() * c2.q_value).abs() < 1e-14);
}

#[test]
fn certify_catenoid_finds_negative_index() {
    let o = h1geom(&["certify", "catenoid", "--lambda", "1"]);
    assert_eq!(code(&o), 0);
    let c: h1geom::stability::InstabilityCertificate = stdout(&o).parse().unwrap();
    assert!(c.q_value < 0.0 && c.q_value_doubled < 0.0);
    assert!(c.k >= 1.0 && c.k <= 64.0);
    // too small a k range gives a certificate failure, not a usage error
    let o = h1geom(&["certify", "catenoid", "--lambda", "1", "--k-max", "1"]);
    assert_eq!(code(&o), 1);
}
