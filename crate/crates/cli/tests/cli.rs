use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn nlslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlslab"))
        .args(args)
        .output()
        .expect("spawn nlslab")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn csv_row(text: &str) -> Vec<String> {
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "manifold,n,residual,c,tau1,tau2,kappa_min,p_min"
    );
    lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect()
}

#[test]
fn verify_hemisphere_certificate() {
    let out = nlslab(&["verify", "--manifold", "sphere_cap", "--dim", "2", "--csv"]);
    assert_eq!(code(&out), 0);
    let row = csv_row(&stdout(&out));
    let f = |i: usize| row[i].parse::<f64>().unwrap();
    assert_eq!(row[0], "sphere_cap");
    assert!(f(2) < 1e-12);
    assert!((f(3) - 1.0).abs() < 1e-12);
    assert!((f(6) - 3.0).abs() < 1e-12);
    assert!((f(7) - 5.0).abs() < 1e-12);
}

#[test]
fn verify_hyperbolic_four() {
    let out = nlslab(&[
        "verify",
        "--manifold",
        "hyperbolic",
        "--dim",
        "4",
        "--rmax",
        "20",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("phi bounds  pass"), "{text}");
    let out = nlslab(&[
        "verify",
        "--manifold",
        "hyperbolic",
        "--dim",
        "4",
        "--rmax",
        "20",
        "--csv",
    ]);
    let c: f64 = csv_row(&stdout(&out))[3].parse().unwrap();
    assert!((c - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn verify_rejects_bad_warp() {
    let dir = tempfile::tempdir().unwrap();
    let warp = write(dir.path(), "bad.txt", "0 0.1 1\n0.5 0.6 1\n1 1.1 1\n");
    let out = nlslab(&[
        "verify",
        "--manifold",
        "custom",
        "--warp",
        warp.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("h(0)"));
}

#[test]
fn verify_custom_warp_matches_sphere() {
    let dir = tempfile::tempdir().unwrap();
    let rows: String = (0..=400)
        .map(|k| {
            let r = std::f64::consts::FRAC_PI_2 * k as f64 / 400.0;
            format!("{r} {} {}\n", r.sin(), r.cos())
        })
        .collect();
    let warp = write(dir.path(), "sin.txt", &rows);
    let out = nlslab(&[
        "verify",
        "--manifold",
        "custom",
        "--warp",
        warp.to_str().unwrap(),
        "--csv",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let kappa: f64 = csv_row(&stdout(&out))[6].parse().unwrap();
    assert!((kappa - 3.0).abs() < 1e-3);
}

#[test]
fn run_missing_config() {
    let out = nlslab(&["run", "--config", "/definitely/not/here.conf"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn run_flagship_short_blows_up() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "f.conf",
        "manifold.kind = sphere_cap\nsolver.p = 5\nsolver.dt = 5e-5\nsolver.blowup_threshold = 15\n\
         profile.name = zonal_cos\nprofile.margin = 0.21\n",
    );
    let out_dir = dir.path().join("out");
    let out = nlslab(&[
        "run",
        "--quiet",
        "--config",
        cfg.to_str().unwrap(),
        "--cells",
        "128",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = fs::read_to_string(out_dir.join("summary.txt")).unwrap();
    assert!(summary.contains("outcome = blowup_detected"));

    let rep = nlslab(&["report", out_dir.join("diagnostics.csv").to_str().unwrap()]);
    assert_eq!(code(&rep), 0);
    let text = stdout(&rep);
    assert!(text.contains("before T_star"), "{text}");

    let csv = fs::read_to_string(out_dir.join("diagnostics.csv")).unwrap();
    let cut = write(dir.path(), "cut.csv", &csv[..csv.len() / 2]);
    assert_eq!(code(&nlslab(&["report", cut.to_str().unwrap()])), 1);
}

#[test]
fn run_small_data_completes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.conf",
        "manifold.kind = sphere_cap\ngrid.cells = 64\nsolver.p = 2\nsolver.dt = 1e-3\n\
         solver.t_max = 0.5\nprofile.amplitude = 0.1\n",
    );
    let out = nlslab(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not predicted"));
}

#[test]
fn zero_field_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "z.conf",
        "manifold.kind = sphere_cap\ngrid.cells = 32\nsolver.t_max = 0.01\nsolver.dt = 1e-3\n\
         profile.amplitude = 0\n",
    );
    let o = dir.path().join("o");
    let out = nlslab(&[
        "run",
        "--quiet",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        o.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let rep = nlslab(&["report", o.join("diagnostics.csv").to_str().unwrap()]);
    assert_eq!(code(&rep), 0);
    assert!(stdout(&rep).contains("all functionals identically 0"));
}

#[test]
fn sweep_is_deterministic_and_checks_axes() {
    let dir = tempfile::tempdir().unwrap();
    let base =
        "manifold.kind = sphere_cap\ngrid.cells = 64\nsolver.dt = 1e-4\nsolver.t_max = 0.05\n\
                sweep.p = 3, 5\n";
    let cfg = write(
        dir.path(),
        "sw.conf",
        &format!("{base}sweep.amplitude = 0.5, 1.2\n"),
    );
    let run = |name: &str| {
        let o = dir.path().join(name);
        let out = nlslab(&[
            "sweep",
            "--quiet",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            o.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        fs::read(o.join("phase_table.csv")).unwrap()
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 5);
    assert!(dir.path().join("a/run_003.csv").exists());

    let empty = write(dir.path(), "e.conf", &format!("{base}sweep.amplitude =\n"));
    let out = nlslab(&[
        "sweep",
        "--config",
        empty.to_str().unwrap(),
        "--out",
        dir.path().join("e").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
}
