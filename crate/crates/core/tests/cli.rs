use std::path::Path;
use std::process::{Command, Output};

use miquel::twobytwo::rectangular_2x2;
use miquel::{standard_grid, Point, TorusPattern};

fn miquel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_miquel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, p: &TorusPattern) -> String {
    let path = dir.join(name);
    std::fs::write(&path, p.to_json()).unwrap();
    path.to_str().unwrap().to_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn forge_then_validate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    let path = path.to_str().unwrap();
    let o = miquel(&[
        "forge", "--m", "4", "--n", "2", "--s", "2", "--seed", "7", "-o", path,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = miquel(&["validate", path]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("\"pass\": true"));
}

#[test]
fn forge_is_deterministic() {
    let args = ["forge", "--m", "2", "--n", "2", "--seed", "11"];
    assert_eq!(miquel(&args).stdout, miquel(&args).stdout);
    let other = miquel(&["forge", "--m", "2", "--n", "2", "--seed", "12"]);
    assert_ne!(miquel(&args).stdout, other.stdout);
}

#[test]
fn evolving_the_grid_repeats_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "grid.json", &standard_grid(2, 2, 0).unwrap());
    let o = miquel(&["evolve", &input, "--steps", "10"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# miquel evolve v1"));
    assert_eq!(
        lines.next(),
        Some("t,vx,vy,gamma_h,gamma_v,ratio_re,ratio_im,residual")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 11);
    let body = |r: &str| r.split_once(',').unwrap().1.to_owned();
    for (t, r) in rows.iter().enumerate() {
        assert!(r.starts_with(&format!("{t},")));
        assert_eq!(body(r), body(rows[0]));
    }
}

#[test]
fn evolve_writes_svg_and_phi_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "rect.json",
        &rectangular_2x2(1.0, 0.7, -1.0, Point::new(0.2, 0.1)).unwrap(),
    );
    let svg = dir.path().join("orbit.svg");
    let phi = dir.path().join("phi");
    let o = miquel(&[
        "evolve",
        &input,
        "--steps",
        "6",
        "--track",
        "1,1",
        "--ref",
        "0,0",
        "--svg",
        svg.to_str().unwrap(),
        "--dump-phi",
        phi.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    assert!(phi.join("phi_6.json").exists());
}

#[test]
fn phi_reconstruct_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let forged = dir.path().join("p.json");
    let phi = dir.path().join("phi.json");
    let rebuilt = dir.path().join("q.json");
    let f = forged.to_str().unwrap();
    assert_eq!(
        code(&miquel(&[
            "forge", "--m", "4", "--n", "1", "--s", "1", "--seed", "3", "-o", f
        ])),
        0
    );
    assert_eq!(code(&miquel(&["phi", f, "-o", phi.to_str().unwrap()])), 0);
    let o = miquel(&[
        "reconstruct",
        phi.to_str().unwrap(),
        "-o",
        rebuilt.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&miquel(&["validate", rebuilt.to_str().unwrap()])), 0);
    let o = miquel(&["invariants", f]);
    assert_eq!(code(&o), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // every (m,1,1) pattern is isoradial
    assert_eq!(report["isoradial"], serde_json::Value::Bool(true));
}

#[test]
fn quartic_on_two_by_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "rect.json",
        &rectangular_2x2(1.2, 0.9, -1.2, Point::new(0.3, -0.1)).unwrap(),
    );
    let csv = dir.path().join("e.csv");
    let o = miquel(&[
        "quartic",
        &input,
        "--steps",
        "20",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert!(rows.lines().any(|l| l == "t,ex,ey,residual"));
    assert_eq!(
        rows.lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with('t'))
            .count(),
        21
    );
}

#[test]
fn usage_and_parse_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let wide = write(dir.path(), "wide.json", &standard_grid(4, 2, 0).unwrap());
    assert_eq!(code(&miquel(&[])), 2);
    assert_eq!(code(&miquel(&["frobnicate"])), 2);
    assert_eq!(code(&miquel(&["validate", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&miquel(&["validate", "/nonexistent/p.json"])), 2);
    assert_eq!(code(&miquel(&["evolve", &wide, "--track", "1"])), 2);
    assert_eq!(code(&miquel(&["quartic", &wide])), 2);
    assert_eq!(code(&miquel(&["validate", &wide, "--tol", "-1"])), 2);
}

#[test]
fn domain_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let g = standard_grid(2, 2, 0).unwrap();
    let mut v = g.vertices().to_vec();
    v[3] += Point::new(0.2, 0.05);
    let broken = TorusPattern::new(2, 2, 0, v, g.u(), g.v()).unwrap();
    let input = write(dir.path(), "broken.json", &broken);
    let o = miquel(&["validate", &input]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("\"pass\": false"));
    assert_eq!(code(&miquel(&["evolve", &input])), 1);
}
