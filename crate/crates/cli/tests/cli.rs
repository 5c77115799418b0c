use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn tilecoh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tilecoh")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn penrose_runs_clean_on_both_routes() {
    let dir = tempfile::tempdir().unwrap();
    let out = tilecoh(&["cohomology", s(&fixture("penrose.json")), "--out", s(dir.path()), "--export-complex"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("spectral       Z, Z^2, Z^3, Z^2"), "{stdout}");
    assert!(stdout.contains("mapping torus  Z, Z^2, Z^3, Z^2"), "{stdout}");
    assert!(!stdout.contains("FAIL"));

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("penrose.report.json")).unwrap()).unwrap();
    assert!(report.get("timings").is_none_or(|t| t.is_null()));
    assert!(dir.path().join("penrose.complex.json").exists());
}

#[test]
fn json_output_matches_the_written_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = tilecoh(&["cohomology", s(&fixture("square.json")), "--json", "--out", s(dir.path())]);
    assert_eq!(code(&out), 0);
    let written = fs::read(dir.path().join("square.report.json")).unwrap();
    assert_eq!(out.stdout, written);
}

#[test]
fn input_problems_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{").unwrap();
    let out = tilecoh(&["atlas", s(&bad)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed"));

    // the spectral route on a one-dimensional system
    assert_eq!(code(&tilecoh(&["cohomology", s(&fixture("fibonacci.json")), "--route", "spectral"])), 2);
    // no H_0(T^0) data for the spectral route
    assert_eq!(code(&tilecoh(&["cohomology", s(&fixture("square_plain.json")), "--route", "spectral"])), 2);
    assert_eq!(code(&tilecoh(&["cohomology", s(&dir.path().join("missing.json"))])), 2);
}

#[test]
fn inline_fixture_feeds_the_spectral_route() {
    let fixture_h0 = r#"{"h0_t0": {"rank": 1, "torsion": []}, "omega_class": [0]}"#;
    let out = tilecoh(&["cohomology", s(&fixture("square.json")), "--route", "spectral", "--fixture-h0", fixture_h0]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("spectral       Z, Z^3, Z^3, Z"));
}

#[test]
fn failed_checks_exit_with_one() {
    let out = tilecoh(&["cohomology", s(&fixture("square_plain.json")), "--route", "mapping-torus"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("isotropy"));
    assert_eq!(code(&tilecoh(&["omega", s(&fixture("square_plain.json"))])), 1);
}

#[test]
fn compare_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = tilecoh(&["cohomology", s(&fixture("penrose.json")), s(&fixture("square.json")), "--out", s(dir.path())]);
    assert_eq!(code(&out), 0);
    let p = dir.path().join("penrose.report.json");
    let q = dir.path().join("square.report.json");
    let same = tilecoh(&["compare", s(&p), s(&p)]);
    assert_eq!(code(&same), 0);
    let diff = tilecoh(&["compare", s(&p), s(&q)]);
    assert_eq!(code(&diff), 1);
    assert!(String::from_utf8_lossy(&diff.stdout).contains("degree 1"));
}

#[test]
fn reports_and_pictures_are_deterministic() {
    let runs: Vec<_> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let out = tilecoh(&["cohomology", s(&fixture("penrose.json")), "--svg", "--out", s(dir.path())]);
            assert_eq!(code(&out), 0);
            dir
        })
        .collect();
    let read_all = |d: &Path| -> Vec<(String, Vec<u8>)> {
        let mut files: Vec<_> = fs::read_dir(d.join("penrose-svg"))
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        files.push(("report".into(), fs::read(d.join("penrose.report.json")).unwrap()));
        files
    };
    assert_eq!(read_all(runs[0].path()), read_all(runs[1].path()));
}

#[test]
fn render_draws_every_star_class() {
    let dir = tempfile::tempdir().unwrap();
    let out = tilecoh(&["render", s(&fixture("penrose.json")), "--out", s(dir.path())]);
    assert_eq!(code(&out), 0);
    let mut vertices = Vec::new();
    for e in fs::read_dir(dir.path()).unwrap() {
        let e = e.unwrap();
        let name = e.file_name().into_string().unwrap();
        let text = fs::read_to_string(e.path()).unwrap();
        assert!(text.starts_with("<svg") || text.starts_with("<?xml"), "{name}");
        if name.starts_with("vertex_star_") {
            vertices.push(text);
        }
    }
    assert_eq!(vertices.len(), 7);
    let fivefold: Vec<_> = vertices.iter().filter(|t| t.contains("sym 5")).collect();
    assert_eq!(fivefold.len(), 2);
    assert!(fivefold.iter().all(|t| t.contains("omega +1")));
}
